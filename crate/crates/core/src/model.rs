//! Continuous models: the Helmholtz problem, its first-order ODE form, the
//! hyperbolic relaxation system and its Riemann-invariant (characteristic) form.
//!
//! All quantities are real. The complex solution `u = u_R + i u_I` is carried
//! as the state `q = (u_R, u_I, u_R', u_I')` and the Riemann invariants are
//! `r = L q` with `L = B0 + B1`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix4, Vector4};

use crate::error::{Error, Result};

pub type Mat4 = Matrix4<f64>;
pub type Vec4 = Vector4<f64>;

/// A real-valued source term on `[0, 1]`.
#[derive(Clone, Default)]
pub enum Source {
    /// Identically zero. Lets the propagators skip the source integral.
    #[default]
    Zero,
    Function(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Source {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Source::Function(Arc::new(f))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Source::Zero => 0.0,
            Source::Function(f) => f(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Source::Zero)
    }
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Zero => f.write_str("Source::Zero"),
            Source::Function(_) => f.write_str("Source::Function(..)"),
        }
    }
}

/// Impedance boundary data `g0 = g0r + i g0i` at `x = 0`, `g1 = g1r + i g1i` at `x = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundaryData {
    pub g0r: f64,
    pub g0i: f64,
    pub g1r: f64,
    pub g1i: f64,
}

impl BoundaryData {
    pub fn new(g0r: f64, g0i: f64, g1r: f64, g1i: f64) -> Self {
        Self { g0r, g0i, g1r, g1i }
    }

    /// Left boundary vector `G0 = (g0r, g0i, 0, 0)`.
    pub fn left(&self) -> Vec4 {
        Vec4::new(self.g0r, self.g0i, 0.0, 0.0)
    }

    /// Right boundary vector `G1 = (0, 0, g1r, g1i)`.
    pub fn right(&self) -> Vec4 {
        Vec4::new(0.0, 0.0, self.g1r, self.g1i)
    }
}

/// `u'' + k^2 u = f` on `(0, 1)` with impedance boundary conditions.
#[derive(Debug, Clone)]
pub struct HelmholtzProblem {
    k: f64,
    f_re: Source,
    f_im: Source,
    boundary: BoundaryData,
}

impl HelmholtzProblem {
    pub fn new(k: f64, f_re: Source, f_im: Source, boundary: BoundaryData) -> Result<Self> {
        check_wavenumber(k)?;
        let b = boundary;
        if ![b.g0r, b.g0i, b.g1r, b.g1i].iter().all(|g| g.is_finite()) {
            return Err(Error::invalid("boundary data must be finite"));
        }
        Ok(Self {
            k,
            f_re,
            f_im,
            boundary,
        })
    }

    /// Problem with `f = 0`.
    pub fn homogeneous(k: f64, boundary: BoundaryData) -> Result<Self> {
        Self::new(k, Source::Zero, Source::Zero, boundary)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn boundary(&self) -> BoundaryData {
        self.boundary
    }

    pub fn source(&self) -> (&Source, &Source) {
        (&self.f_re, &self.f_im)
    }

    pub fn has_source(&self) -> bool {
        !(self.f_re.is_zero() && self.f_im.is_zero())
    }
}

pub(crate) fn check_wavenumber(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "wavenumber must be positive and finite, got {k}"
        )))
    }
}

/// Characteristic speeds `λ1, λ2 > 0 > λ3, λ4` of the relaxation system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    speeds: [f64; 4],
}

impl SpectralParams {
    pub fn new(l1: f64, l2: f64, l3: f64, l4: f64) -> Result<Self> {
        let speeds = [l1, l2, l3, l4];
        if !speeds.iter().all(|l| l.is_finite()) {
            return Err(Error::invalid("characteristic speeds must be finite"));
        }
        if !(l1 > 0.0 && l2 > 0.0 && l3 < 0.0 && l4 < 0.0) {
            return Err(Error::invalid(format!(
                "characteristic speeds must satisfy λ1, λ2 > 0 and λ3, λ4 < 0, got {speeds:?}"
            )));
        }
        Ok(Self { speeds })
    }

    /// `λ = (1, 1, -1, -1)`.
    pub fn unit() -> Self {
        Self {
            speeds: [1.0, 1.0, -1.0, -1.0],
        }
    }

    pub fn speeds(&self) -> [f64; 4] {
        self.speeds
    }

    pub fn max_speed(&self) -> f64 {
        self.speeds.iter().fold(0.0_f64, |m, l| m.max(l.abs()))
    }

    /// True when `λ1 = λ2` and `λ3 = λ4`; the relaxation then becomes
    /// exactly stationary after [`SpectralParams::steady_state_time`].
    pub fn finite_time_eligible(&self) -> bool {
        let [l1, l2, l3, l4] = self.speeds;
        l1 == l2 && l3 == l4
    }

    /// `1/|λ3| + 1/λ1` when the speeds are finite-time eligible.
    pub fn steady_state_time(&self) -> Option<f64> {
        self.finite_time_eligible()
            .then(|| 1.0 / self.speeds[2].abs() + 1.0 / self.speeds[0])
    }
}

impl Default for SpectralParams {
    fn default() -> Self {
        Self::unit()
    }
}

/// Boundary operators `B0`, `B1`.
pub fn build_boundary_matrices(k: f64) -> Result<(Mat4, Mat4)> {
    check_wavenumber(k)?;
    #[rustfmt::skip]
    let b0 = Mat4::new(
        k,   0.0, 1.0, 0.0,
        0.0, k,   0.0, 1.0,
        0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0,
    );
    #[rustfmt::skip]
    let b1 = Mat4::new(
        0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0,
        0.0, k,   1.0, 0.0,
        -k,  0.0, 0.0, 1.0,
    );
    Ok((b0, b1))
}

/// Advection matrix `A` and relaxation matrix `B` of `Q_t + A Q_x = B Q + F`.
///
/// `B` satisfies `B = A Bq`, so steady states of the hyperbolic system solve
/// the first-order Helmholtz system.
pub fn build_hyperbolic_matrices(s: &SpectralParams, k: f64) -> Result<(Mat4, Mat4)> {
    check_wavenumber(k)?;
    let [l1, l2, l3, l4] = s.speeds;
    let k2 = k * k;
    #[rustfmt::skip]
    let a = Mat4::new(
        l1 + l4,        l2 - l3,        (l1 - l3) / k, (l2 - l4) / k,
        l4 - l1,        l2 + l3,        (l3 - l1) / k, (l2 - l4) / k,
        (l1 - l4) * k,  (l3 - l2) * k,  l1 + l3,       l4 - l2,
        (l1 - l4) * k,  (l2 - l3) * k,  l1 - l3,       l4 + l2,
    ) * 0.5;
    #[rustfmt::skip]
    let b = Mat4::new(
        (l3 - l1) * k,    (l4 - l2) * k,    l1 + l4,        l2 - l3,
        (l1 - l3) * k,    (l4 - l2) * k,    l4 - l1,        l2 + l3,
        -(l1 + l3) * k2,  (l2 - l4) * k2,   (l1 - l4) * k,  (l3 - l2) * k,
        (l3 - l1) * k2,   -(l2 + l4) * k2,  (l1 - l4) * k,  (l2 - l3) * k,
    ) * 0.5;
    Ok((a, b))
}

/// Relaxation source `F(x)` of the hyperbolic system.
pub fn hyperbolic_source(s: &SpectralParams, k: f64, f_re: f64, f_im: f64) -> Vec4 {
    let [l1, l2, l3, l4] = s.speeds;
    Vec4::new(
        (f_im * (l2 - l4) + f_re * (l1 - l3)) / k,
        (f_im * (l2 - l4) + f_re * (l3 - l1)) / k,
        f_im * (l4 - l2) + f_re * (l1 + l3),
        f_im * (l2 + l4) + f_re * (l1 - l3),
    ) * 0.5
}

/// Matrices of the Riemann-invariant system `r_t + Λ r_x = Br r + Fr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSystem {
    pub lambda: Mat4,
    pub br: Mat4,
    /// `Λ⁻¹ Br`, the generator of the steady ODE `r' = M r + Λ⁻¹ Fr`.
    pub m: Mat4,
}

pub fn build_riemann_system(s: &SpectralParams, k: f64) -> Result<RiemannSystem> {
    check_wavenumber(k)?;
    let [l1, l2, l3, l4] = s.speeds;
    let lambda = Mat4::from_diagonal(&Vec4::new(l1, l2, l3, l4));
    #[rustfmt::skip]
    let br = Mat4::new(
        0.0, -l1, l1,  l1,
        l2,  0.0, -l2, l2,
        0.0, 0.0, 0.0, l3,
        0.0, 0.0, -l4, 0.0,
    ) * k;
    let lambda_inv = Mat4::from_diagonal(&Vec4::new(1.0 / l1, 1.0 / l2, 1.0 / l3, 1.0 / l4));
    Ok(RiemannSystem {
        lambda,
        br,
        m: lambda_inv * br,
    })
}

/// `Fr(x) = (λ1 f_R, λ2 f_I, λ3 f_R, λ4 f_I)`.
pub fn riemann_source(s: &SpectralParams, f_re: f64, f_im: f64) -> Vec4 {
    let [l1, l2, l3, l4] = s.speeds;
    Vec4::new(l1 * f_re, l2 * f_im, l3 * f_re, l4 * f_im)
}

/// First-order form `q' = Bq q + Fq` of the Helmholtz equation.
pub fn build_first_order_form(k: f64) -> Result<Mat4> {
    check_wavenumber(k)?;
    let k2 = k * k;
    #[rustfmt::skip]
    let bq = Mat4::new(
        0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        -k2, 0.0, 0.0, 0.0,
        0.0, -k2, 0.0, 0.0,
    );
    Ok(bq)
}

/// `Fq(x) = (0, 0, f_R, f_I)`.
pub fn first_order_source(f_re: f64, f_im: f64) -> Vec4 {
    Vec4::new(0.0, 0.0, f_re, f_im)
}

/// Which variables a [`StateVec`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    /// `q = (u_R, u_I, v_R, v_I)` with `v = du/dx`.
    Primitive,
    /// `r = L q`.
    Riemann,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Primitive => "primitive",
            Representation::Riemann => "riemann",
        }
    }
}

/// A 4-vector tagged with its representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVec {
    repr: Representation,
    values: Vec4,
}

impl StateVec {
    pub fn primitive(values: Vec4) -> Self {
        Self {
            repr: Representation::Primitive,
            values,
        }
    }

    pub fn riemann(values: Vec4) -> Self {
        Self {
            repr: Representation::Riemann,
            values,
        }
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn values(&self) -> &Vec4 {
        &self.values
    }

    fn expect(&self, expected: Representation) -> Result<&Vec4> {
        if self.repr == expected {
            Ok(&self.values)
        } else {
            Err(Error::RepresentationMismatch {
                expected: expected.name(),
                found: self.repr.name(),
            })
        }
    }
}

/// Every matrix and source of the three continuous models for one `(k, λ)` pair.
#[derive(Debug, Clone)]
pub struct ModelMatrices {
    pub k: f64,
    pub spectral: SpectralParams,
    pub a: Mat4,
    pub b: Mat4,
    pub b0: Mat4,
    pub b1: Mat4,
    pub l: Mat4,
    pub l_inv: Mat4,
    pub lambda: Mat4,
    pub lambda_inv: Mat4,
    pub bq: Mat4,
    pub br: Mat4,
    pub m: Mat4,
    pub g0: Vec4,
    pub g1: Vec4,
    boundary: BoundaryData,
    f_re: Source,
    f_im: Source,
}

impl ModelMatrices {
    pub fn build(problem: &HelmholtzProblem, spectral: &SpectralParams) -> Result<Self> {
        let k = problem.k();
        let (b0, b1) = build_boundary_matrices(k)?;
        let (a, b) = build_hyperbolic_matrices(spectral, k)?;
        let riemann = build_riemann_system(spectral, k)?;
        let bq = build_first_order_form(k)?;
        let l = b0 + b1;
        let l_inv = l
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::invalid("L = B0 + B1 is singular"))?;
        let lambda_inv = riemann
            .lambda
            .try_inverse()
            .ok_or_else(|| Error::invalid("Λ is singular"))?;
        let boundary = problem.boundary();
        let (f_re, f_im) = problem.source();
        Ok(Self {
            k,
            spectral: *spectral,
            a,
            b,
            b0,
            b1,
            l,
            l_inv,
            lambda: riemann.lambda,
            lambda_inv,
            bq,
            br: riemann.br,
            m: riemann.m,
            g0: boundary.left(),
            g1: boundary.right(),
            boundary,
            f_re: f_re.clone(),
            f_im: f_im.clone(),
        })
    }

    pub fn boundary(&self) -> BoundaryData {
        self.boundary
    }

    pub fn has_source(&self) -> bool {
        !(self.f_re.is_zero() && self.f_im.is_zero())
    }

    fn f_pair(&self, x: f64) -> (f64, f64) {
        (self.f_re.eval(x), self.f_im.eval(x))
    }

    /// `F(x)` of the hyperbolic system.
    pub fn f(&self, x: f64) -> Vec4 {
        let (fr, fi) = self.f_pair(x);
        hyperbolic_source(&self.spectral, self.k, fr, fi)
    }

    /// `Fq(x)` of the first-order form.
    pub fn fq(&self, x: f64) -> Vec4 {
        let (fr, fi) = self.f_pair(x);
        first_order_source(fr, fi)
    }

    /// `Fr(x)` of the Riemann-invariant system.
    pub fn fr(&self, x: f64) -> Vec4 {
        let (fr, fi) = self.f_pair(x);
        riemann_source(&self.spectral, fr, fi)
    }

    /// Source of the steady ODE in Riemann variables, `Λ⁻¹ Fr(x)`.
    pub fn steady_source(&self, x: f64) -> Vec4 {
        self.lambda_inv * self.fr(x)
    }

    pub fn to_riemann(&self, q: &StateVec) -> Result<StateVec> {
        let q = q.expect(Representation::Primitive)?;
        Ok(StateVec::riemann(self.l * q))
    }

    pub fn from_riemann(&self, r: &StateVec) -> Result<StateVec> {
        let r = r.expect(Representation::Riemann)?;
        Ok(StateVec::primitive(self.l_inv * r))
    }
}

//! Dense 4x4 kernels: matrix exponential, cached exponential powers,
//! Gauss-Legendre rules and the exact propagators of the steady ODE
//! `r' = M r + Λ⁻¹ Fr(x)` used by the well-balanced reconstructions.

use crate::error::{Error, Result};
use crate::model::{Mat4, ModelMatrices, Vec4};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// The scaled argument handed to the Padé approximant has 1-norm at most this.
const SCALED_NORM_BOUND: f64 = 0.5;

pub fn norm1(x: &Mat4) -> f64 {
    x.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with the [13/13] Padé approximant.
pub fn expm(x: &Mat4) -> Result<Mat4> {
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInput(
            "matrix exponential of non-finite matrix".into(),
        ));
    }
    let norm = norm1(x);
    let squarings = if norm <= SCALED_NORM_BOUND {
        0
    } else {
        (norm / SCALED_NORM_BOUND).log2().ceil() as i32
    };
    let a = x * 2f64.powi(-squarings);

    let b = &PADE13;
    let ident = Mat4::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let u = a
        * (a6 * (a6 * b[13] + a4 * b[11] + a2 * b[9])
            + a6 * b[7]
            + a4 * b[5]
            + a2 * b[3]
            + ident * b[1]);
    let v = a6 * (a6 * b[12] + a4 * b[10] + a2 * b[8])
        + a6 * b[6]
        + a4 * b[4]
        + a2 * b[2]
        + ident * b[0];

    let mut result = (v - u)
        .lu()
        .solve(&(v + u))
        .ok_or_else(|| Error::InvalidInput("Padé denominator is singular".into()))?;
    for _ in 0..squarings {
        result *= result;
    }
    Ok(result)
}

/// Powers of `expm(unit)` for integer multiples of a unit step.
///
/// If a run needs `expm(M Δx)` with `M Δx = m · unit` for an integer `m`,
/// the exponential is read from the table instead of being recomputed.
#[derive(Debug, Clone)]
pub struct ExpmCache {
    unit: Mat4,
    powers: Vec<Mat4>,
}

impl ExpmCache {
    /// Tabulates `expm(unit)^m` for `m = 0..=max_power`.
    pub fn build(unit: &Mat4, max_power: u64) -> Result<Self> {
        if max_power == 0 {
            return Err(Error::invalid("expm cache needs at least one power"));
        }
        let base = expm(unit)?;
        let mut powers = Vec::with_capacity(max_power as usize + 1);
        powers.push(Mat4::identity());
        for m in 1..=max_power as usize {
            let next = powers[m - 1] * base;
            powers.push(next);
        }
        Ok(Self {
            unit: *unit,
            powers,
        })
    }

    pub fn unit(&self) -> &Mat4 {
        &self.unit
    }

    pub fn base(&self) -> &Mat4 {
        &self.powers[1]
    }

    pub fn max_power(&self) -> u64 {
        (self.powers.len() - 1) as u64
    }

    pub fn power(&self, m: u64) -> Result<&Mat4> {
        if m == 0 {
            return Err(Error::invalid("expm power must be positive"));
        }
        self.powers.get(m as usize).ok_or_else(|| {
            Error::invalid(format!(
                "expm power {m} exceeds cached maximum {}",
                self.max_power()
            ))
        })
    }
}

/// `expm(unit)^m` from the cache.
pub fn expm_fast(cache: &ExpmCache, m: u64) -> Result<Mat4> {
    cache.power(m).copied()
}

/// Returns `m` when `k Δx` is a positive integer up to round-off.
pub fn integer_steps(k: f64, dx: f64) -> Option<u64> {
    let kdx = k * dx;
    let m = kdx.round();
    (m >= 1.0 && (kdx - m).abs() <= 1e-9 * m.max(1.0)).then_some(m as u64)
}

/// Gauss-Legendre rule on the reference interval `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_a^b g` with the rule mapped to `[a, b]`.
    pub fn integrate<T, F>(&self, a: f64, b: f64, mut g: F) -> T
    where
        T: std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
        F: FnMut(f64) -> T,
    {
        let h = b - a;
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::default(), |acc, (&s, &w)| acc + g(a + s * h) * (w * h))
    }
}

pub const MAX_QUADRATURE_ORDER: usize = 16;

/// Gauss-Legendre nodes and weights of the given order, mapped to `[0, 1]`.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    if !(1..=MAX_QUADRATURE_ORDER).contains(&order) {
        return Err(Error::invalid(format!(
            "quadrature order must be in 1..={MAX_QUADRATURE_ORDER}, got {order}"
        )));
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    // roots come in ± pairs; Newton on P_n from the Tricomi initial guess
    for i in 0..n.div_ceil(2) {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            dp = d;
            let step = p / d;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, t);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - t * t) * dp * dp);
        // map [-1, 1] -> [0, 1]
        nodes[i] = 0.5 * (1.0 - t);
        nodes[n - 1 - i] = 0.5 * (1.0 + t);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    Ok(QuadratureRule {
        order,
        nodes,
        weights,
    })
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let (mut p_prev, mut p) = (1.0, t);
    for j in 2..=n {
        let jf = j as f64;
        let p_next = ((2.0 * jf - 1.0) * t * p - (jf - 1.0) * p_prev) / jf;
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (t * p - p_prev) / (t * t - 1.0);
    (p, d)
}

/// Value at `x_left + Δx` of the solution of `r' = M r + Λ⁻¹ Fr(x)` with
/// `r(x_left) = r_left`.
pub fn propagate_forward(
    r_left: &Vec4,
    x_left: f64,
    dx: f64,
    model: &ModelMatrices,
    quad: &QuadratureRule,
) -> Result<Vec4> {
    check_step(dx)?;
    let e = expm(&(model.m * dx))?;
    if !model.has_source() {
        return Ok(e * r_left);
    }
    let integral = forward_source_integral(x_left, dx, model, quad)?;
    Ok(e * (r_left + integral))
}

/// Value at `x_right - Δx` of the solution of `r' = M r + Λ⁻¹ Fr(x)` with
/// `r(x_right) = r_right`.
pub fn propagate_backward(
    r_right: &Vec4,
    x_right: f64,
    dx: f64,
    model: &ModelMatrices,
    quad: &QuadratureRule,
) -> Result<Vec4> {
    check_step(dx)?;
    let e = expm(&(-model.m * dx))?;
    if !model.has_source() {
        return Ok(e * r_right);
    }
    let integral = backward_source_integral(x_right, dx, model, quad)?;
    Ok(e * (r_right - integral))
}

fn check_step(dx: f64) -> Result<()> {
    if dx.is_finite() && dx > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "propagation step must be positive, got {dx}"
        )))
    }
}

/// `∫_{x}^{x+Δx} e^{-M(ξ-x)} Λ⁻¹Fr(ξ) dξ`
fn forward_source_integral(
    x_left: f64,
    dx: f64,
    model: &ModelMatrices,
    quad: &QuadratureRule,
) -> Result<Vec4> {
    let mut acc = Vec4::zeros();
    for (&s, &w) in quad.nodes().iter().zip(quad.weights()) {
        let kernel = expm(&(-model.m * (s * dx)))?;
        acc += kernel * model.steady_source(x_left + s * dx) * (w * dx);
    }
    Ok(acc)
}

/// `∫_{x-Δx}^{x} e^{-M(ξ-x)} Λ⁻¹Fr(ξ) dξ`
fn backward_source_integral(
    x_right: f64,
    dx: f64,
    model: &ModelMatrices,
    quad: &QuadratureRule,
) -> Result<Vec4> {
    let mut acc = Vec4::zeros();
    for (&s, &w) in quad.nodes().iter().zip(quad.weights()) {
        let kernel = expm(&(model.m * ((1.0 - s) * dx)))?;
        acc += kernel * model.steady_source(x_right - dx + s * dx) * (w * dx);
    }
    Ok(acc)
}

/// How the per-cell exponentials `expm(±M Δx)` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpmMode {
    /// Tabulated powers of `expm(±M/k)` whenever `k Δx` is an integer.
    Auto,
    /// Always scaling and squaring.
    Direct,
}

/// Node-to-node propagators for a uniform mesh, with the per-cell source
/// integrals evaluated once.
#[derive(Debug, Clone)]
pub struct CellPropagator {
    forward: Mat4,
    backward: Mat4,
    /// Index `j`: contribution to `r(x_{j+1})` from the cell `[x_j, x_{j+1}]`.
    forward_source: Vec<Vec4>,
    /// Index `j`: contribution to `r(x_j)` from the cell `[x_j, x_{j+1}]`.
    backward_source: Vec<Vec4>,
    fast_path: bool,
}

impl CellPropagator {
    pub fn new(
        model: &ModelMatrices,
        n_cells: usize,
        quad: &QuadratureRule,
        mode: ExpmMode,
    ) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::invalid("mesh needs at least one cell"));
        }
        let dx = 1.0 / n_cells as f64;
        let steps = match mode {
            ExpmMode::Auto => integer_steps(model.k, dx),
            ExpmMode::Direct => None,
        };
        let (forward, backward) = match steps {
            Some(m) => {
                let unit = model.m / model.k;
                let fwd = ExpmCache::build(&unit, m)?;
                let bwd = ExpmCache::build(&(-unit), m)?;
                (expm_fast(&fwd, m)?, expm_fast(&bwd, m)?)
            }
            None => (expm(&(model.m * dx))?, expm(&(-model.m * dx))?),
        };

        let (forward_source, backward_source) = if model.has_source() {
            // kernels depend only on the offset inside the cell
            let fwd_kernels = quad
                .nodes()
                .iter()
                .map(|&s| expm(&(-model.m * (s * dx))))
                .collect::<Result<Vec<_>>>()?;
            let bwd_kernels = quad
                .nodes()
                .iter()
                .map(|&s| expm(&(model.m * ((1.0 - s) * dx))))
                .collect::<Result<Vec<_>>>()?;
            let mut fsrc = Vec::with_capacity(n_cells);
            let mut bsrc = Vec::with_capacity(n_cells);
            for j in 0..n_cells {
                let x0 = j as f64 * dx;
                let mut fi = Vec4::zeros();
                let mut bi = Vec4::zeros();
                for (i, (&s, &w)) in quad.nodes().iter().zip(quad.weights()).enumerate() {
                    let g = model.steady_source(x0 + s * dx) * (w * dx);
                    fi += fwd_kernels[i] * g;
                    bi += bwd_kernels[i] * g;
                }
                fsrc.push(forward * fi);
                bsrc.push(-(backward * bi));
            }
            (fsrc, bsrc)
        } else {
            (Vec::new(), Vec::new())
        };

        Ok(Self {
            forward,
            backward,
            forward_source,
            backward_source,
            fast_path: steps.is_some(),
        })
    }

    pub fn forward_matrix(&self) -> &Mat4 {
        &self.forward
    }

    pub fn backward_matrix(&self) -> &Mat4 {
        &self.backward
    }

    pub fn used_fast_path(&self) -> bool {
        self.fast_path
    }

    /// `r_{j,+}`: the steady solution through `r_j = r` evaluated at `x_{j+1}`.
    #[inline]
    pub fn forward(&self, cell: usize, r: &Vec4) -> Vec4 {
        let out = self.forward * r;
        match self.forward_source.get(cell) {
            Some(s) => out + s,
            None => out,
        }
    }

    /// `r_{j+1,-}`: the steady solution through `r_{j+1} = r` evaluated at `x_j`.
    #[inline]
    pub fn backward(&self, cell: usize, r: &Vec4) -> Vec4 {
        let out = self.backward * r;
        match self.backward_source.get(cell) {
            Some(s) => out + s,
            None => out,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BoundaryData, HelmholtzProblem, Source, SpectralParams};

    fn unit_model(k: f64) -> ModelMatrices {
        let problem = HelmholtzProblem::homogeneous(k, BoundaryData::default()).unwrap();
        ModelMatrices::build(&problem, &SpectralParams::unit()).unwrap()
    }

    #[test]
    fn expm_of_zero_is_identity() {
        assert_eq!(expm(&Mat4::zeros()).unwrap(), Mat4::identity());
    }

    #[test]
    fn expm_of_diagonal() {
        let d = [0.3, -1.7, 2.5, -4.0];
        let e = expm(&Mat4::from_diagonal(&Vec4::from(d))).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { d[i].exp() } else { 0.0 };
                assert!((e[(i, j)] - want).abs() <= 1e-13 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn expm_rejects_nan() {
        let mut x = Mat4::zeros();
        x[(1, 2)] = f64::NAN;
        assert!(matches!(expm(&x), Err(Error::InvalidInput(_))));
        x[(1, 2)] = f64::INFINITY;
        assert!(expm(&x).is_err());
    }

    #[test]
    fn cache_powers() {
        let unit = unit_model(1.0).m;
        let cache = ExpmCache::build(&unit, 4).unwrap();
        assert_eq!(expm_fast(&cache, 1).unwrap(), *cache.base());
        let direct = expm(&(unit * 2.0)).unwrap();
        let diff = (expm_fast(&cache, 2).unwrap() - direct).amax();
        assert!(diff <= 1e-12 * direct.amax());
        assert!(expm_fast(&cache, 0).is_err());
        assert!(expm_fast(&cache, 5).is_err());
        assert!(ExpmCache::build(&unit, 0).is_err());
    }

    #[test]
    fn integer_step_detection() {
        assert_eq!(integer_steps(10.0, 0.1), Some(1));
        assert_eq!(integer_steps(1e5, 0.1), Some(10_000));
        assert_eq!(integer_steps(1e3, 1e-3), Some(1));
        assert_eq!(integer_steps(10.0, 0.125), None);
        assert_eq!(integer_steps(1.0, 0.1), None);
    }

    #[test]
    fn gauss_legendre_small_orders() {
        let r1 = gauss_legendre(1).unwrap();
        assert_eq!(r1.nodes(), [0.5]);
        assert!((r1.weights()[0] - 1.0).abs() < 1e-15);
        let r2 = gauss_legendre(2).unwrap();
        let d = 0.5 / 3f64.sqrt();
        assert!((r2.nodes()[0] - (0.5 - d)).abs() < 1e-15);
        assert!((r2.nodes()[1] - (0.5 + d)).abs() < 1e-15);
        let r4 = gauss_legendre(4).unwrap();
        let i: f64 = r4.integrate(0.0, 1.0, |x: f64| x.powi(7));
        assert!((i - 0.125).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_order_range() {
        assert!(gauss_legendre(0).is_err());
        assert!(gauss_legendre(17).is_err());
        for n in 1..=MAX_QUADRATURE_ORDER {
            let rule = gauss_legendre(n).unwrap();
            let sum: f64 = rule.weights().iter().sum();
            assert!((sum - 1.0).abs() < 1e-14, "order {n}: {sum}");
            // exact for degree 2n - 1
            let deg = 2 * n - 1;
            let i: f64 = rule.integrate(0.0, 1.0, |x: f64| x.powi(deg as i32));
            assert!((i - 1.0 / (deg + 1) as f64).abs() < 1e-12, "order {n}");
        }
    }

    #[test]
    fn propagate_zero_state_without_source() {
        let model = unit_model(10.0);
        let quad = gauss_legendre(4).unwrap();
        let out = propagate_forward(&Vec4::zeros(), 0.0, 0.1, &model, &quad).unwrap();
        assert_eq!(out, Vec4::zeros());
        assert!(propagate_forward(&Vec4::zeros(), 0.0, 0.0, &model, &quad).is_err());
    }

    #[test]
    fn zero_generator_with_constant_source() {
        let problem = HelmholtzProblem::new(
            1.0,
            Source::new(|_| 0.7),
            Source::new(|_| -0.2),
            BoundaryData::default(),
        )
        .unwrap();
        let mut model = ModelMatrices::build(&problem, &SpectralParams::unit()).unwrap();
        model.m = Mat4::zeros();
        let quad = gauss_legendre(3).unwrap();
        let r = Vec4::new(1.0, 2.0, 3.0, 4.0);
        let dx = 0.25;
        let c = model.steady_source(0.0);
        let fwd = propagate_forward(&r, 0.1, dx, &model, &quad).unwrap();
        assert!((fwd - (r + c * dx)).amax() < 1e-15);
        let bwd = propagate_backward(&r, 0.6, dx, &model, &quad).unwrap();
        assert!((bwd - (r - c * dx)).amax() < 1e-15);
    }

    #[test]
    fn cell_propagator_agrees_with_free_functions() {
        let problem = HelmholtzProblem::new(
            7.0,
            Source::new(|x| (3.0 * x).sin()),
            Source::new(|x| x * x),
            BoundaryData::default(),
        )
        .unwrap();
        let model = ModelMatrices::build(
            &problem,
            &SpectralParams::new(2.0, 1.0, -1.0, -3.0).unwrap(),
        )
        .unwrap();
        let quad = gauss_legendre(4).unwrap();
        let n = 8;
        let dx = 1.0 / n as f64;
        let cells = CellPropagator::new(&model, n, &quad, ExpmMode::Auto).unwrap();
        assert!(!cells.used_fast_path());
        let r = Vec4::new(0.3, -1.0, 2.0, 0.5);
        for j in 0..n {
            let x = j as f64 * dx;
            let a = cells.forward(j, &r);
            let b = propagate_forward(&r, x, dx, &model, &quad).unwrap();
            assert!((a - b).amax() < 1e-12 * b.amax().max(1.0));
            let a = cells.backward(j, &r);
            let b = propagate_backward(&r, x + dx, dx, &model, &quad).unwrap();
            assert!((a - b).amax() < 1e-12 * b.amax().max(1.0));
        }
    }

    #[test]
    fn fast_path_engages_for_integer_kdx() {
        let model = unit_model(100.0);
        let quad = gauss_legendre(4).unwrap();
        let fast = CellPropagator::new(&model, 10, &quad, ExpmMode::Auto).unwrap();
        let direct = CellPropagator::new(&model, 10, &quad, ExpmMode::Direct).unwrap();
        assert!(fast.used_fast_path());
        assert!(!direct.used_fast_path());
        let diff = (fast.forward_matrix() - direct.forward_matrix()).amax();
        assert!(diff < 1e-11 * direct.forward_matrix().amax());
    }
}

//! C interface to the helmwave solver.
//!
//! Objects are exposed as opaque handles created by `hw_*_new`/`hw_run` and
//! released by the matching `hw_*_free`. Every fallible call returns an
//! [`HwStatus`]; outputs are written through caller-provided pointers.
//! Panics never cross the boundary and are reported as `HW_STATUS_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::ffi::{c_char, c_void};
use std::panic::{catch_unwind, AssertUnwindSafe};

use helmwave::linalg::{expm, ExpmMode};
use helmwave::solver::{
    Mesh, RiemannField, RunDiagnostics, RunOptions, Solver, TimeGrid, DEFAULT_STEADY_TOL,
};
use helmwave::verification::{solve_plane_wave, ErrorReport, Group};
use helmwave::{
    BoundaryData, Error, HelmholtzProblem, Mat4, ModelMatrices, Source, SpectralParams, Vec4,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    CflViolation = 3,
    NumericalError = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

impl From<&Error> for HwStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::Usage(_) => HwStatus::InvalidArgument,
            Error::CflViolation { .. } => HwStatus::CflViolation,
            _ => HwStatus::NumericalError,
        }
    }
}

/// Real-valued source callback `f(x, user_data)`.
pub type HwSourceFn = Option<unsafe extern "C" fn(x: f64, user_data: *mut c_void) -> f64>;

/// Opaque problem handle.
pub struct HwProblem {
    inner: HelmholtzProblem,
}

/// Opaque handle holding a finished run.
pub struct HwRun {
    model: ModelMatrices,
    mesh: Mesh,
    field: RiemannField,
    diagnostics: RunDiagnostics,
}

/// Run parameters; obtain defaults from `hw_run_params_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HwRunParams {
    /// Characteristic speeds, two positive then two negative.
    pub lambda: [f64; 4],
    pub n_x: usize,
    /// Number of time steps; 0 selects CFL = 1.
    pub n_t: usize,
    pub t_final: f64,
    pub quadrature_order: usize,
    pub allow_cfl_violation: bool,
    pub early_stop: bool,
    pub steady_tol: f64,
    pub fast_expm: bool,
}

/// Error norms of a plane-wave run. Relative norms are NaN when undefined.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HwErrorReport {
    pub l2_abs: [f64; 4],
    pub linf_abs: [f64; 4],
    pub l2_rel: [f64; 4],
    pub linf_rel: [f64; 4],
    /// Group maxima: index 0 is `(u_R, u_I)`, index 1 is `(v_R, v_I)`.
    pub group_l2_rel: [f64; 2],
    pub group_linf_rel: [f64; 2],
    pub steps: usize,
    pub fast_expm: bool,
}

impl From<(&ErrorReport, usize, bool)> for HwErrorReport {
    fn from((r, steps, fast_expm): (&ErrorReport, usize, bool)) -> Self {
        let nan = |v: Option<f64>| v.unwrap_or(f64::NAN);
        let groups = Group::ALL.map(|g| r.group(g));
        Self {
            l2_abs: r.components.map(|c| c.l2_abs),
            linf_abs: r.components.map(|c| c.linf_abs),
            l2_rel: r.components.map(|c| nan(c.l2_rel)),
            linf_rel: r.components.map(|c| nan(c.linf_rel)),
            group_l2_rel: groups.map(|g| nan(g.l2_rel)),
            group_linf_rel: groups.map(|g| nan(g.linf_rel)),
            steps,
            fast_expm,
        }
    }
}

struct Callback {
    f: unsafe extern "C" fn(f64, *mut c_void) -> f64,
    user_data: *mut c_void,
}

// The caller guarantees the callback and its user data may be used from any thread.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

impl Callback {
    fn call(&self, x: f64) -> f64 {
        unsafe { (self.f)(x, self.user_data) }
    }
}

fn source(f: HwSourceFn, user_data: *mut c_void) -> Source {
    match f {
        None => Source::Zero,
        Some(f) => {
            let cb = Callback { f, user_data };
            Source::new(move |x| cb.call(x))
        }
    }
}

fn guard(f: impl FnOnce() -> Result<(), HwStatus>) -> HwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HwStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => HwStatus::Panic,
    }
}

fn check<T>(r: helmwave::Result<T>) -> Result<T, HwStatus> {
    r.map_err(|e| HwStatus::from(&e))
}

impl HwRunParams {
    fn resolve(&self) -> Result<(SpectralParams, Mesh, TimeGrid, RunOptions), HwStatus> {
        let [l1, l2, l3, l4] = self.lambda;
        let spectral = check(SpectralParams::new(l1, l2, l3, l4))?;
        let mesh = check(Mesh::new(self.n_x))?;
        let grid = if self.n_t == 0 {
            check(TimeGrid::from_cfl(self.t_final, 1.0, &spectral, &mesh))?
        } else {
            check(TimeGrid::new(self.t_final, self.n_t, &spectral, &mesh))?
        };
        let options = RunOptions {
            allow_cfl_override: self.allow_cfl_violation,
            quadrature_order: self.quadrature_order,
            early_stop: self.early_stop,
            steady_tol: self.steady_tol,
            expm_mode: if self.fast_expm {
                ExpmMode::Auto
            } else {
                ExpmMode::Direct
            },
        };
        Ok((spectral, mesh, grid, options))
    }
}

/// Default parameters: unit speeds, `N_x = 10`, CFL = 1, `T = 2`.
#[no_mangle]
pub extern "C" fn hw_run_params_default() -> HwRunParams {
    let d = RunOptions::default();
    HwRunParams {
        lambda: SpectralParams::unit().speeds(),
        n_x: 10,
        n_t: 0,
        t_final: 2.0,
        quadrature_order: d.quadrature_order,
        allow_cfl_violation: false,
        early_stop: false,
        steady_tol: DEFAULT_STEADY_TOL,
        fast_expm: true,
    }
}

/// Creates a problem with wavenumber `k`, boundary data `g0 = g0r + i g0i`,
/// `g1 = g1r + i g1i` and source `f = f_re + i f_im`. Null callbacks mean zero.
#[no_mangle]
pub unsafe extern "C" fn hw_problem_new(
    k: f64,
    g0r: f64,
    g0i: f64,
    g1r: f64,
    g1i: f64,
    f_re: HwSourceFn,
    f_im: HwSourceFn,
    user_data: *mut c_void,
    out: *mut *mut HwProblem,
) -> HwStatus {
    guard(|| {
        if out.is_null() {
            return Err(HwStatus::NullPointer);
        }
        let inner = check(HelmholtzProblem::new(
            k,
            source(f_re, user_data),
            source(f_im, user_data),
            BoundaryData::new(g0r, g0i, g1r, g1i),
        ))?;
        *out = Box::into_raw(Box::new(HwProblem { inner }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn hw_problem_free(problem: *mut HwProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Marches `problem` from a zero initial field.
#[no_mangle]
pub unsafe extern "C" fn hw_run(
    problem: *const HwProblem,
    params: *const HwRunParams,
    out: *mut *mut HwRun,
) -> HwStatus {
    guard(|| {
        if problem.is_null() || params.is_null() || out.is_null() {
            return Err(HwStatus::NullPointer);
        }
        let problem = &(*problem).inner;
        let (spectral, mesh, grid, options) = (*params).resolve()?;
        let model = check(ModelMatrices::build(problem, &spectral))?;
        let solver = check(Solver::new(model, mesh, grid, options))?;
        let (field, diagnostics) = check(solver.march(solver.initialize(|_| Vec4::zeros())))?;
        let model = solver.model().clone();
        *out = Box::into_raw(Box::new(HwRun {
            model,
            mesh,
            field,
            diagnostics,
        }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn hw_run_free(run: *mut HwRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Number of mesh nodes, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn hw_run_n_nodes(run: *const HwRun) -> usize {
    run.as_ref().map_or(0, |r| r.mesh.n_nodes())
}

/// Number of time steps executed, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn hw_run_steps(run: *const HwRun) -> usize {
    run.as_ref().map_or(0, |r| r.diagnostics.steps_executed())
}

unsafe fn copy_nodes(
    run: *const HwRun,
    buf: *mut f64,
    len: usize,
    map: impl Fn(&HwRun, &Vec4) -> Vec4,
) -> HwStatus {
    guard(|| {
        let run = run.as_ref().ok_or(HwStatus::NullPointer)?;
        if buf.is_null() {
            return Err(HwStatus::NullPointer);
        }
        let n = run.field.len() * 4;
        if len < n {
            return Err(HwStatus::BufferTooSmall);
        }
        let out = std::slice::from_raw_parts_mut(buf, n);
        for (chunk, r) in out.chunks_exact_mut(4).zip(&run.field.values) {
            chunk.copy_from_slice(map(run, r).as_slice());
        }
        Ok(())
    })
}

/// Copies the Riemann variables, 4 values per node, into `buf` (`len >= 4 * n_nodes`).
#[no_mangle]
pub unsafe extern "C" fn hw_run_copy_riemann(
    run: *const HwRun,
    buf: *mut f64,
    len: usize,
) -> HwStatus {
    copy_nodes(run, buf, len, |_, r| *r)
}

/// Copies `(u_R, u_I, v_R, v_I)` per node into `buf` (`len >= 4 * n_nodes`).
#[no_mangle]
pub unsafe extern "C" fn hw_run_copy_primitive(
    run: *const HwRun,
    buf: *mut f64,
    len: usize,
) -> HwStatus {
    copy_nodes(run, buf, len, |h, r| h.model.l_inv * r)
}

/// Copies the residual history into `buf`; `written` receives its length.
#[no_mangle]
pub unsafe extern "C" fn hw_run_copy_residuals(
    run: *const HwRun,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> HwStatus {
    guard(|| {
        let run = run.as_ref().ok_or(HwStatus::NullPointer)?;
        if buf.is_null() || written.is_null() {
            return Err(HwStatus::NullPointer);
        }
        let hist = &run.diagnostics.residual_history;
        *written = hist.len();
        if len < hist.len() {
            return Err(HwStatus::BufferTooSmall);
        }
        std::slice::from_raw_parts_mut(buf, hist.len()).copy_from_slice(hist);
        Ok(())
    })
}

/// Solves the plane-wave test case `u = e^{ikx}` and reports its error norms.
#[no_mangle]
pub unsafe extern "C" fn hw_plane_wave_report(
    k: f64,
    params: *const HwRunParams,
    out: *mut HwErrorReport,
) -> HwStatus {
    guard(|| {
        if params.is_null() || out.is_null() {
            return Err(HwStatus::NullPointer);
        }
        let (spectral, mesh, grid, options) = (*params).resolve()?;
        let run = check(solve_plane_wave(k, &spectral, mesh, grid, &options))?;
        *out = HwErrorReport::from((
            &run.report,
            run.diagnostics.steps_executed(),
            run.diagnostics.fast_expm,
        ));
        Ok(())
    })
}

/// Matrix exponential of a row-major 4×4 matrix.
#[no_mangle]
pub unsafe extern "C" fn hw_expm(input: *const f64, output: *mut f64) -> HwStatus {
    guard(|| {
        if input.is_null() || output.is_null() {
            return Err(HwStatus::NullPointer);
        }
        let x = Mat4::from_row_slice(std::slice::from_raw_parts(input, 16));
        let e = check(expm(&x))?;
        let out = std::slice::from_raw_parts_mut(output, 16);
        for (i, v) in out.iter_mut().enumerate() {
            *v = e[(i / 4, i % 4)];
        }
        Ok(())
    })
}

/// Static, NUL-terminated description of `status`.
#[no_mangle]
pub extern "C" fn hw_status_message(status: HwStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        HwStatus::Ok => b"ok\0",
        HwStatus::NullPointer => b"null pointer argument\0",
        HwStatus::InvalidArgument => b"invalid argument\0",
        HwStatus::CflViolation => b"CFL number exceeds 1\0",
        HwStatus::NumericalError => b"numerical error\0",
        HwStatus::BufferTooSmall => b"output buffer too small\0",
        HwStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Library version as a static, NUL-terminated string.
#[no_mangle]
pub extern "C" fn hw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

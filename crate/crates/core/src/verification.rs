//! Manufactured plane-wave solution, discrete error norms and the sweeps
//! over wavenumber and mesh size.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    build_boundary_matrices, check_wavenumber, BoundaryData, HelmholtzProblem, ModelMatrices,
    SpectralParams, StateVec, Vec4,
};
use crate::solver::{Mesh, RiemannField, RunDiagnostics, RunOptions, Solver, TimeGrid};

/// Exact solution `u(x) = sin(kx) + 2i cos(kx)` of the homogeneous equation,
/// with boundary data derived from `B0 q(0)` and `B1 q(1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedCase {
    k: f64,
    boundary: BoundaryData,
}

pub fn plane_wave_case(k: f64) -> Result<ManufacturedCase> {
    check_wavenumber(k)?;
    let (b0, b1) = build_boundary_matrices(k)?;
    let g0 = b0 * plane_wave_q(k, 0.0);
    let g1 = b1 * plane_wave_q(k, 1.0);
    Ok(ManufacturedCase {
        k,
        boundary: BoundaryData::new(g0[0], g0[1], g1[2], g1[3]),
    })
}

fn plane_wave_q(k: f64, x: f64) -> Vec4 {
    let (s, c) = (k * x).sin_cos();
    Vec4::new(s, 2.0 * c, k * c, -2.0 * k * s)
}

impl ManufacturedCase {
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn boundary(&self) -> BoundaryData {
        self.boundary
    }

    /// `(u_R, u_I, v_R, v_I)` at `x`.
    pub fn exact_q(&self, x: f64) -> Vec4 {
        plane_wave_q(self.k, x)
    }

    /// Complex `u(x)` as `(u_R, u_I)`.
    pub fn exact_u(&self, x: f64) -> (f64, f64) {
        let q = self.exact_q(x);
        (q[0], q[1])
    }

    pub fn problem(&self) -> HelmholtzProblem {
        HelmholtzProblem::homogeneous(self.k, self.boundary)
            .expect("plane-wave data is valid by construction")
    }

    pub fn exact_riemann(&self, model: &ModelMatrices, x: f64) -> Vec4 {
        model.l * self.exact_q(x)
    }
}

/// Norms of one error component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentNorms {
    pub l2_abs: f64,
    pub linf_abs: f64,
    /// `None` when the exact component vanishes on the mesh.
    pub l2_rel: Option<f64>,
    pub linf_rel: Option<f64>,
}

/// Norms of a component group: the maximum over its two members.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupNorms {
    pub l2_rel: Option<f64>,
    pub linf_rel: Option<f64>,
    pub l2_abs: f64,
    pub linf_abs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Group {
    /// `(u_R, u_I)`
    #[serde(rename = "1-2")]
    Solution,
    /// `(v_R, v_I)`
    #[serde(rename = "3-4")]
    Derivative,
}

impl Group {
    pub const ALL: [Group; 2] = [Group::Solution, Group::Derivative];

    pub fn label(self) -> &'static str {
        match self {
            Group::Solution => "1-2",
            Group::Derivative => "3-4",
        }
    }

    fn components(self) -> [usize; 2] {
        match self {
            Group::Solution => [0, 1],
            Group::Derivative => [2, 3],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorReport {
    pub components: [ComponentNorms; 4],
}

impl ErrorReport {
    pub fn group(&self, g: Group) -> GroupNorms {
        let [a, b] = g.components().map(|c| self.components[c]);
        let max_opt = |x: Option<f64>, y: Option<f64>| match (x, y) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, None) => x,
            (None, y) => y,
        };
        GroupNorms {
            l2_rel: max_opt(a.l2_rel, b.l2_rel),
            linf_rel: max_opt(a.linf_rel, b.linf_rel),
            l2_abs: a.l2_abs.max(b.l2_abs),
            linf_abs: a.linf_abs.max(b.linf_abs),
        }
    }
}

/// Discrete norms of `error` against `exact`; `l2 = sqrt(Σ e_j²)` without
/// mesh weighting.
pub fn component_norms(error: &[f64], exact: &[f64]) -> ComponentNorms {
    let l2 = |v: &[f64]| v.iter().map(|e| e * e).sum::<f64>().sqrt();
    let linf = |v: &[f64]| v.iter().fold(0.0_f64, |m, e| m.max(e.abs()));
    let (l2_abs, linf_abs) = (l2(error), linf(error));
    let (l2_ref, linf_ref) = (l2(exact), linf(exact));
    ComponentNorms {
        l2_abs,
        linf_abs,
        l2_rel: (l2_ref > 0.0).then(|| l2_abs / l2_ref),
        linf_rel: (linf_ref > 0.0).then(|| linf_abs / linf_ref),
    }
}

/// Errors `q_exact(x_j) - q_numeric,j` of a computed field.
pub fn error_report(
    numeric: &RiemannField,
    case: &ManufacturedCase,
    model: &ModelMatrices,
    mesh: &Mesh,
) -> Result<ErrorReport> {
    if numeric.len() != mesh.n_nodes() {
        return Err(Error::MeshMismatch(format!(
            "field has {} nodes, mesh has {}",
            numeric.len(),
            mesh.n_nodes()
        )));
    }
    let n = mesh.n_nodes();
    let mut errors: [Vec<f64>; 4] = Default::default();
    let mut exact: [Vec<f64>; 4] = Default::default();
    for (j, r) in numeric.values.iter().enumerate() {
        let q = model.from_riemann(&StateVec::riemann(*r))?;
        let qe = case.exact_q(mesh.node(j));
        for c in 0..4 {
            if j == 0 {
                errors[c].reserve(n);
                exact[c].reserve(n);
            }
            errors[c].push(qe[c] - q.values()[c]);
            exact[c].push(qe[c]);
        }
    }
    let components = [0, 1, 2, 3].map(|c| component_norms(&errors[c], &exact[c]));
    Ok(ErrorReport { components })
}

/// Result of one manufactured-solution solve.
#[derive(Debug, Clone)]
pub struct CaseRun {
    pub case: ManufacturedCase,
    pub model: ModelMatrices,
    pub mesh: Mesh,
    pub grid: TimeGrid,
    pub field: RiemannField,
    pub diagnostics: RunDiagnostics,
    pub report: ErrorReport,
}

/// Solves the plane-wave case from a zero initial field and measures the error.
pub fn solve_plane_wave(
    k: f64,
    spectral: &SpectralParams,
    mesh: Mesh,
    grid: TimeGrid,
    options: &RunOptions,
) -> Result<CaseRun> {
    let case = plane_wave_case(k)?;
    let model = ModelMatrices::build(&case.problem(), spectral)?;
    let solver = Solver::new(model, mesh, grid, *options)?;
    let field = solver.initialize(|_| Vec4::zeros());
    let (field, diagnostics) = solver.march(field)?;
    let model = solver.model().clone();
    let report = error_report(&field, &case, &model, &mesh)?;
    Ok(CaseRun {
        case,
        model,
        mesh,
        grid,
        field,
        diagnostics,
        report,
    })
}

/// One row of a sweep table.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    /// `k` for wavenumber sweeps, `Δx` for refinement sweeps.
    pub parameter: f64,
    pub k: f64,
    pub n_x: usize,
    pub n_t: usize,
    pub fast_expm: bool,
    pub report: ErrorReport,
}

impl SweepRow {
    fn from_run(parameter: f64, run: &CaseRun) -> Self {
        Self {
            parameter,
            k: run.case.k(),
            n_x: run.mesh.n_cells(),
            n_t: run.grid.steps(),
            fast_expm: run.diagnostics.fast_expm,
            report: run.report,
        }
    }
}

/// Runs `jobs` on at most `threads` workers, keeping input order.
fn run_parallel<T, R>(
    jobs: &[T],
    threads: Option<usize>,
    f: impl Fn(&T) -> Result<R> + Sync,
) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
{
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
            pool.install(|| jobs.par_iter().map(&f).collect())
        }
        None => jobs.par_iter().map(&f).collect(),
    }
}

/// Fixed mesh, one solve per wavenumber.
pub fn sweep_wavenumber(
    ks: &[f64],
    n_x: usize,
    n_t: usize,
    t_final: f64,
    spectral: &SpectralParams,
    options: &RunOptions,
    threads: Option<usize>,
) -> Result<Vec<SweepRow>> {
    let mesh = Mesh::new(n_x)?;
    let grid = TimeGrid::new(t_final, n_t, spectral, &mesh)?;
    grid.check_cfl(options.allow_cfl_override)?;
    run_parallel(ks, threads, |&k| {
        let run = solve_plane_wave(k, spectral, mesh, grid, options)?;
        Ok(SweepRow::from_run(k, &run))
    })
}

/// Fixed `k Δx`, one solve per mesh spacing with `Δt = Δx / max|λ|`.
pub fn sweep_refinement(
    k_dx: f64,
    dxs: &[f64],
    t_final: f64,
    spectral: &SpectralParams,
    options: &RunOptions,
    threads: Option<usize>,
) -> Result<Vec<SweepRow>> {
    if !(k_dx.is_finite() && k_dx > 0.0) {
        return Err(Error::invalid(format!("kΔx must be positive, got {k_dx}")));
    }
    let configs = dxs
        .iter()
        .map(|&dx| {
            let mesh = Mesh::with_spacing(dx)?;
            let grid = TimeGrid::from_cfl(t_final, 1.0, spectral, &mesh)?;
            Ok((dx, mesh, grid))
        })
        .collect::<Result<Vec<_>>>()?;
    run_parallel(&configs, threads, |&(dx, mesh, grid)| {
        let k = k_dx * mesh.n_cells() as f64;
        let run = solve_plane_wave(k, spectral, mesh, grid, options)?;
        Ok(SweepRow::from_run(dx, &run))
    })
}

/// Flattened table record: one per (row, group).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRecord {
    pub parameter: f64,
    pub group: Group,
    pub l2_rel: Option<f64>,
    pub linf_rel: Option<f64>,
    pub l2_abs: f64,
    pub linf_abs: f64,
}

pub fn table_records(rows: &[SweepRow]) -> Vec<TableRecord> {
    rows.iter()
        .flat_map(|row| {
            Group::ALL.into_iter().map(move |g| {
                let n = row.report.group(g);
                TableRecord {
                    parameter: row.parameter,
                    group: g,
                    l2_rel: n.l2_rel,
                    linf_rel: n.linf_rel,
                    l2_abs: n.l2_abs,
                    linf_abs: n.linf_abs,
                }
            })
        })
        .collect()
}

pub const TABLE_HEADER: &str = "parameter,group,l2_rel,linf_rel,l2_abs,linf_abs";

/// Full-precision scientific notation.
pub fn fmt_sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_sci).unwrap_or_default()
}

/// Error table as CSV; not-applicable relative norms are empty fields.
pub fn table_csv(records: &[TableRecord]) -> String {
    let mut out = String::from(TABLE_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_sci(r.parameter),
            r.group.label(),
            fmt_opt(r.l2_rel),
            fmt_opt(r.linf_rel),
            fmt_sci(r.l2_abs),
            fmt_sci(r.linf_abs),
        ));
    }
    out
}

/// Error table as a JSON array; not-applicable relative norms are `null`.
pub fn table_json(records: &[TableRecord]) -> String {
    let mut s = serde_json::to_string_pretty(records).expect("table records serialize");
    s.push('\n');
    s
}

/// Outcome of one self-check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= bound && value.is_finite(),
            detail: format!("{value:.3e} <= {bound:.1e}"),
        }
    }
}

/// Invariant checks run by `helmwave verify`.
pub fn invariant_suite() -> Result<Vec<CheckOutcome>> {
    use crate::linalg::{expm, expm_fast, ExpmCache};
    use crate::model::Mat4;

    let mut out = Vec::new();
    let speed_sets = [
        SpectralParams::unit(),
        SpectralParams::new(2.0, 1.0, -1.0, -3.0)?,
    ];

    for s in &speed_sets {
        for k in [1.0, 10.0, 1e3, 1e5] {
            let case = plane_wave_case(k)?;
            let m = ModelMatrices::build(&case.problem(), s)?;
            let rel = |a: &Mat4, b: &Mat4| (a - b).amax() / b.amax();
            let worst = [
                rel(&(m.l * m.l_inv), &Mat4::identity()),
                rel(&(m.l_inv * m.lambda * m.l), &m.a),
                rel(&(m.l_inv * m.br * m.l), &m.b),
                rel(&(m.l * m.bq * m.l_inv), &m.m),
                (m.a.determinant() / s.speeds().iter().product::<f64>() - 1.0).abs(),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            out.push(CheckOutcome::new(
                format!("matrix identities k={k:e} λ={:?}", s.speeds()),
                worst,
                1e-12,
            ));

            // steady equivalence: A q' - B q - F = 0 on the exact solution
            let mut res = 0.0_f64;
            for i in 0..50 {
                let x = i as f64 / 49.0;
                let q = case.exact_q(x);
                let dq = m.bq * q;
                res = res.max((m.a * dq - m.b * q - m.f(x)).amax());
            }
            out.push(CheckOutcome::new(
                format!("steady equivalence k={k:e} λ={:?}", s.speeds()),
                res,
                1e-9 * k,
            ));
        }
    }

    let probes: Vec<Mat4> = (1..=6)
        .map(|seed| Mat4::from_fn(|i, j| ((seed * 7 + i * 4 + j) as f64 * 1.3).sin() * 2.5))
        .collect();
    let inv_err = probes
        .iter()
        .map(|x| Ok((expm(x)? * expm(&-x)? - Mat4::identity()).amax()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.push(CheckOutcome::new("expm(X) expm(-X) = I", inv_err, 1e-11));

    let unit = ModelMatrices::build(&plane_wave_case(1.0)?.problem(), &SpectralParams::unit())?.m;
    let cache = ExpmCache::build(&unit, 100)?;
    for m in [2u64, 10, 100] {
        let direct = expm(&(unit * m as f64))?;
        let err = (expm_fast(&cache, m)? - direct).amax() / direct.amax();
        out.push(CheckOutcome::new(
            format!("cached expm power m={m}"),
            err,
            1e-11,
        ));
    }

    for k in [10.0, 100.0, 1000.0] {
        let drift = well_balanced_drift(k, 10, 50)?;
        out.push(CheckOutcome::new(
            format!("well-balanced drift k={k:e}"),
            drift,
            1e-11,
        ));
    }

    let case = plane_wave_case(10.0)?;
    let s = SpectralParams::unit();
    let mesh = Mesh::new(100)?;
    let grid = TimeGrid::new(2.2, 220, &s, &mesh)?;
    let run = solve_plane_wave(case.k(), &s, mesh, grid, &RunOptions::default())?;
    let t_steady = s.steady_state_time().unwrap_or(f64::INFINITY) + 2.0 * grid.dt();
    let late = run
        .diagnostics
        .residual_history
        .iter()
        .enumerate()
        .filter(|(n, _)| grid.time(n + 1) >= t_steady)
        .map(|(_, r)| *r)
        .fold(0.0, f64::max);
    out.push(CheckOutcome::new(
        "finite-time steady state k=10",
        late,
        1e-12,
    ));

    for k in [1.0, 10.0, 100.0] {
        let case = plane_wave_case(k)?;
        let (b0, b1) = build_boundary_matrices(k)?;
        let g = case.boundary();
        let gap = (b0 * case.exact_q(0.0) - g.left())
            .amax()
            .max((b1 * case.exact_q(1.0) - g.right()).amax());
        out.push(CheckOutcome::new(
            format!("boundary consistency k={k:e}"),
            gap,
            1e-12 * k,
        ));
    }
    Ok(out)
}

/// Largest relative change of the projected exact solution over `steps`
/// steps at CFL 1.
pub fn well_balanced_drift(k: f64, n_x: usize, steps: usize) -> Result<f64> {
    let s = SpectralParams::unit();
    let case = plane_wave_case(k)?;
    let model = ModelMatrices::build(&case.problem(), &s)?;
    let mesh = Mesh::new(n_x)?;
    let grid = TimeGrid::new(steps as f64 * mesh.dx() / s.max_speed(), steps, &s, &mesh)?;
    let solver = Solver::new(model, mesh, grid, RunOptions::default())?;
    let start = solver.initialize(|x| case.exact_riemann(solver.model(), x));
    let (end, _) = solver.march(start.clone())?;
    let scale = start.sup_norm();
    Ok(start
        .values
        .iter()
        .zip(&end.values)
        .map(|(a, b)| (a - b).amax())
        .fold(0.0, f64::max)
        / scale)
}

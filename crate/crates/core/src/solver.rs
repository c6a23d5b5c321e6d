//! Explicit time marching of the Riemann-invariant system.
//!
//! Each step is the first-order upwind update
//!
//! ```text
//! r_j^{n+1} = r_j^n - ν Λ⁺ (r_j^n - r_{j-1,+}^n) - ν Λ⁻ (r_{j+1,-}^n - r_j^n),   ν = Δt/Δx
//! ```
//!
//! where `r_{j-1,+}` and `r_{j+1,-}` are the neighbours carried to `x_j`
//! along the exact steady ODE. Incoming components are pinned to the
//! boundary data: `r_1, r_2` at `x = 0` and `r_3, r_4` at `x = 1`. Outgoing
//! components at the two end nodes are updated by the same formula with the
//! one-sided term that exists there.

use crate::error::{Error, Result};
use crate::linalg::{gauss_legendre, CellPropagator, ExpmMode};
use crate::model::{BoundaryData, HelmholtzProblem, ModelMatrices, SpectralParams, Vec4};

/// Tolerance on the CFL number above 1 that is still accepted.
pub const CFL_SLACK: f64 = 1e-12;

pub const DEFAULT_STEADY_TOL: f64 = 1e-12;

/// Uniform mesh `x_j = j Δx`, `j = 0..=N_x`, on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mesh {
    n_cells: usize,
}

impl Mesh {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < 2 {
            return Err(Error::invalid(format!(
                "mesh needs N_x >= 2, got {n_cells}"
            )));
        }
        Ok(Self { n_cells })
    }

    /// Mesh with spacing `dx`; `1/dx` must be an integer.
    pub fn with_spacing(dx: f64) -> Result<Self> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::invalid(format!(
                "mesh spacing must be positive, got {dx}"
            )));
        }
        let n = (1.0 / dx).round();
        if (n * dx - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "1/Δx must be an integer, got Δx = {dx}"
            )));
        }
        Self::new(n as usize)
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 / self.n_cells as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n_cells).map(|j| self.node(j))
    }
}

/// `t_n = n Δt`, `Δt = T / N_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    steps: usize,
    dt: f64,
    cfl: f64,
}

impl TimeGrid {
    pub fn new(t_final: f64, steps: usize, spectral: &SpectralParams, mesh: &Mesh) -> Result<Self> {
        if !(t_final.is_finite() && t_final >= 0.0) {
            return Err(Error::invalid(format!(
                "final time must be non-negative, got {t_final}"
            )));
        }
        if steps > 0 && t_final == 0.0 {
            return Err(Error::invalid(
                "positive step count needs a positive final time",
            ));
        }
        let dt = if steps == 0 {
            0.0
        } else {
            t_final / steps as f64
        };
        Ok(Self {
            t_final,
            steps,
            dt,
            cfl: spectral.max_speed() * dt / mesh.dx(),
        })
    }

    /// Smallest step count whose CFL number does not exceed `cfl`.
    pub fn from_cfl(
        t_final: f64,
        cfl: f64,
        spectral: &SpectralParams,
        mesh: &Mesh,
    ) -> Result<Self> {
        if !(cfl.is_finite() && cfl > 0.0) {
            return Err(Error::invalid(format!(
                "CFL number must be positive, got {cfl}"
            )));
        }
        let steps = (t_final * spectral.max_speed() / (cfl * mesh.dx()) - 1e-9)
            .ceil()
            .max(0.0);
        Self::new(t_final, steps as usize, spectral, mesh)
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn cfl(&self) -> f64 {
        self.cfl
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.dt
    }

    /// Accepts `cfl <= 1` always and larger values only with `allow_override`.
    pub fn check_cfl(&self, allow_override: bool) -> Result<()> {
        if self.cfl <= 1.0 + CFL_SLACK || allow_override {
            Ok(())
        } else {
            Err(Error::CflViolation { cfl: self.cfl })
        }
    }
}

/// Riemann invariants at every node for one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannField {
    pub values: Vec<Vec4>,
    pub time: f64,
}

impl RiemannField {
    pub fn zeros(mesh: &Mesh) -> Self {
        Self {
            values: vec![Vec4::zeros(); mesh.n_nodes()],
            time: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.amax()).fold(0.0, f64::max)
    }

    /// Overwrites the incoming components with the boundary data.
    pub fn pin_boundary(&mut self, g: &BoundaryData) {
        if let Some(first) = self.values.first_mut() {
            first[0] = g.g0r;
            first[1] = g.g0i;
        }
        if let Some(last) = self.values.last_mut() {
            last[2] = g.g1r;
            last[3] = g.g1i;
        }
    }

    pub fn boundary_pinned(&self, g: &BoundaryData) -> bool {
        match (self.values.first(), self.values.last()) {
            (Some(a), Some(b)) => a[0] == g.g0r && a[1] == g.g0i && b[2] == g.g1r && b[3] == g.g1i,
            _ => false,
        }
    }
}

/// Nodal projection of `init` followed by the boundary assignment.
pub fn initialize(mesh: &Mesh, model: &ModelMatrices, init: impl Fn(f64) -> Vec4) -> RiemannField {
    let mut field = RiemannField {
        values: mesh.nodes().map(init).collect(),
        time: 0.0,
    };
    field.pin_boundary(&model.boundary());
    field
}

/// `max_j,c |next - prev| / Δt`.
pub fn residual(prev: &RiemannField, next: &RiemannField, dt: f64) -> Result<f64> {
    if prev.len() != next.len() {
        return Err(Error::MeshMismatch(format!(
            "fields have {} and {} nodes",
            prev.len(),
            next.len()
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid(format!(
            "time step must be positive, got {dt}"
        )));
    }
    Ok(max_change(&prev.values, &next.values) / dt)
}

fn max_change(prev: &[Vec4], next: &[Vec4]) -> f64 {
    prev.iter()
        .zip(next)
        .map(|(a, b)| (b - a).amax())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub allow_cfl_override: bool,
    pub quadrature_order: usize,
    /// Stop once the residual falls below `steady_tol`.
    pub early_stop: bool,
    pub steady_tol: f64,
    pub expm_mode: ExpmMode,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            allow_cfl_override: false,
            quadrature_order: 4,
            early_stop: false,
            steady_tol: DEFAULT_STEADY_TOL,
            expm_mode: ExpmMode::Auto,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunDiagnostics {
    /// Residual of step `n -> n+1` at index `n`.
    pub residual_history: Vec<f64>,
    /// First step index whose residual is below the steady tolerance.
    pub steady_step: Option<usize>,
    pub dt: f64,
    pub cfl: f64,
    pub fast_expm: bool,
}

impl RunDiagnostics {
    pub fn steps_executed(&self) -> usize {
        self.residual_history.len()
    }
}

/// One-step operator for a fixed model, mesh and time step.
#[derive(Debug, Clone)]
pub struct Stepper {
    cells: CellPropagator,
    /// `ν λ_i`
    courant: [f64; 4],
    boundary: BoundaryData,
    n_nodes: usize,
}

impl Stepper {
    pub fn new(model: &ModelMatrices, mesh: &Mesh, dt: f64, options: &RunOptions) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid(format!(
                "time step must be positive, got {dt}"
            )));
        }
        let cfl = model.spectral.max_speed() * dt / mesh.dx();
        if cfl > 1.0 + CFL_SLACK && !options.allow_cfl_override {
            return Err(Error::CflViolation { cfl });
        }
        let quad = gauss_legendre(options.quadrature_order)?;
        let cells = CellPropagator::new(model, mesh.n_cells(), &quad, options.expm_mode)?;
        let nu = dt / mesh.dx();
        Ok(Self {
            cells,
            courant: model.spectral.speeds().map(|l| nu * l),
            boundary: model.boundary(),
            n_nodes: mesh.n_nodes(),
        })
    }

    pub fn propagator(&self) -> &CellPropagator {
        &self.cells
    }

    /// Writes the next time level of `cur` into `next`.
    pub fn apply(&self, cur: &[Vec4], next: &mut [Vec4]) -> Result<()> {
        let n = self.n_nodes;
        if cur.len() != n || next.len() != n {
            return Err(Error::MeshMismatch(format!(
                "stepper built for {n} nodes, got {} and {}",
                cur.len(),
                next.len()
            )));
        }
        let c = &self.courant;
        let last = n - 1;
        for j in 0..n {
            let r = &cur[j];
            let mut out = *r;
            if j > 0 {
                // Λ⁺ term: right-going components from the left neighbour
                let plus = self.cells.forward(j - 1, &cur[j - 1]);
                out[0] = (1.0 - c[0]) * r[0] + c[0] * plus[0];
                out[1] = (1.0 - c[1]) * r[1] + c[1] * plus[1];
            }
            if j < last {
                // Λ⁻ term: left-going components from the right neighbour
                let minus = self.cells.backward(j, &cur[j + 1]);
                out[2] = (1.0 + c[2]) * r[2] - c[2] * minus[2];
                out[3] = (1.0 + c[3]) * r[3] - c[3] * minus[3];
            }
            next[j] = out;
        }
        let g = &self.boundary;
        next[0][0] = g.g0r;
        next[0][1] = g.g0i;
        next[last][2] = g.g1r;
        next[last][3] = g.g1i;
        Ok(())
    }
}

/// Advances `field` by one step of size `dt`.
pub fn step(
    field: &RiemannField,
    model: &ModelMatrices,
    mesh: &Mesh,
    dt: f64,
    options: &RunOptions,
) -> Result<RiemannField> {
    let stepper = Stepper::new(model, mesh, dt, options)?;
    let mut next = vec![Vec4::zeros(); field.len()];
    stepper.apply(&field.values, &mut next)?;
    Ok(RiemannField {
        values: next,
        time: field.time + dt,
    })
}

/// Time marching for one configuration.
#[derive(Debug, Clone)]
pub struct Solver {
    model: ModelMatrices,
    mesh: Mesh,
    grid: TimeGrid,
    options: RunOptions,
    stepper: Option<Stepper>,
}

impl Solver {
    pub fn new(
        model: ModelMatrices,
        mesh: Mesh,
        grid: TimeGrid,
        options: RunOptions,
    ) -> Result<Self> {
        grid.check_cfl(options.allow_cfl_override)?;
        let stepper = if grid.steps() > 0 {
            Some(Stepper::new(&model, &mesh, grid.dt(), &options)?)
        } else {
            None
        };
        Ok(Self {
            model,
            mesh,
            grid,
            options,
            stepper,
        })
    }

    pub fn model(&self) -> &ModelMatrices {
        &self.model
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn initialize(&self, init: impl Fn(f64) -> Vec4) -> RiemannField {
        initialize(&self.mesh, &self.model, init)
    }

    /// Marches `field` for the configured number of steps.
    pub fn march(&self, mut field: RiemannField) -> Result<(RiemannField, RunDiagnostics)> {
        let mut diag = RunDiagnostics {
            dt: self.grid.dt(),
            cfl: self.grid.cfl(),
            fast_expm: self
                .stepper
                .as_ref()
                .is_some_and(|s| s.propagator().used_fast_path()),
            ..Default::default()
        };
        let Some(stepper) = &self.stepper else {
            return Ok((field, diag));
        };
        if field.len() != self.mesh.n_nodes() {
            return Err(Error::MeshMismatch(format!(
                "field has {} nodes, mesh has {}",
                field.len(),
                self.mesh.n_nodes()
            )));
        }
        let dt = self.grid.dt();
        let mut next = vec![Vec4::zeros(); field.len()];
        diag.residual_history.reserve(self.grid.steps());
        for n in 0..self.grid.steps() {
            stepper.apply(&field.values, &mut next)?;
            let res = max_change(&field.values, &next) / dt;
            std::mem::swap(&mut field.values, &mut next);
            field.time = self.grid.time(n + 1);
            diag.residual_history.push(res);
            if res < self.options.steady_tol && diag.steady_step.is_none() {
                diag.steady_step = Some(n);
                if self.options.early_stop {
                    break;
                }
            }
        }
        Ok((field, diag))
    }
}

/// Builds the model, initializes from `init` (Riemann variables) and marches.
pub fn run(
    problem: &HelmholtzProblem,
    spectral: &SpectralParams,
    mesh: &Mesh,
    grid: &TimeGrid,
    init: impl Fn(f64) -> Vec4,
    options: &RunOptions,
) -> Result<(RiemannField, RunDiagnostics)> {
    let model = ModelMatrices::build(problem, spectral)?;
    let solver = Solver::new(model, *mesh, *grid, *options)?;
    let field = solver.initialize(init);
    solver.march(field)
}

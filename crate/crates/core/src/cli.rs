//! Command-line front end for the `helmwave` binary.
//!
//! Every flag can also come from a flat `key = value` config file passed with
//! `--config`; keys are the long flag names without the leading dashes and
//! flags given on the command line win.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::linalg::{ExpmMode, MAX_QUADRATURE_ORDER};
use crate::model::SpectralParams;
use crate::solver::{Mesh, RunOptions, TimeGrid, CFL_SLACK, DEFAULT_STEADY_TOL};
use crate::verification::{
    fmt_sci, invariant_suite, solve_plane_wave, sweep_refinement, sweep_wavenumber, table_csv,
    table_json, table_records, CaseRun, SweepRow,
};

pub const THREADS_ENV: &str = "HELMWAVE_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

impl Error {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::InvalidParameter(_) => EXIT_USAGE,
            Error::Io { .. } => EXIT_IO,
            Error::CflViolation { .. }
            | Error::InvalidInput(_)
            | Error::RepresentationMismatch { .. }
            | Error::MeshMismatch(_) => EXIT_NUMERICAL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "helmwave",
    version,
    about = "Hyperbolic relaxation solver for the 1-D Helmholtz equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the plane-wave case for one wavenumber.
    Solve(SolveArgs),
    /// Fixed mesh, sweep over wavenumbers.
    SweepK(SweepKArgs),
    /// Fixed kΔx, sweep over mesh spacings.
    SweepDx(SweepDxArgs),
    /// Run the built-in invariant checks.
    Verify(CommonArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub nt: Option<usize>,
    /// Derive N_t from this CFL number instead of giving --nt.
    #[arg(long)]
    pub cfl: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SweepKArgs {
    /// Comma-separated wavenumbers.
    #[arg(long)]
    pub ks: Option<String>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub nt: Option<usize>,
    #[arg(long)]
    pub cfl: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SweepDxArgs {
    #[arg(long)]
    pub kdx: Option<f64>,
    /// Comma-separated mesh spacings.
    #[arg(long)]
    pub dx: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Final time T.
    #[arg(long = "t")]
    pub t_final: Option<f64>,
    /// Characteristic speeds λ1,λ2,λ3,λ4.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long = "quad-order")]
    pub quad_order: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Table format: csv or json.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long = "early-stop")]
    pub early_stop: bool,
    #[arg(long = "steady-tol")]
    pub steady_tol: Option<f64>,
    /// Always use scaling and squaring, never the cached powers.
    #[arg(long = "no-fast-expm")]
    pub no_fast_expm: bool,
    /// Run even when the CFL number exceeds 1.
    #[arg(long = "allow-cfl-violation")]
    pub allow_cfl_violation: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Usage(format!(
                "unknown format '{other}', expected csv or json"
            ))),
        }
    }

    fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

/// How the time step is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stepping {
    Steps(usize),
    Cfl(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Solve {
        k: f64,
        n_x: usize,
        stepping: Stepping,
    },
    SweepK {
        ks: Vec<f64>,
        n_x: usize,
        stepping: Stepping,
    },
    SweepDx {
        k_dx: f64,
        dxs: Vec<f64>,
    },
    Verify,
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub t_final: f64,
    pub spectral: SpectralParams,
    pub options: RunOptions,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
}

const CONFIG_KEYS: &[&str] = &[
    "k",
    "ks",
    "nx",
    "nt",
    "cfl",
    "kdx",
    "dx",
    "t",
    "lambda",
    "quad-order",
    "out",
    "format",
    "early-stop",
    "steady-tol",
    "fast-expm",
    "allow-cfl-violation",
];

/// Reads a flat `key = value` file; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Usage(format!("config line {}: expected `key = value`", i + 1))
        })?;
        let key = key.trim();
        if !CONFIG_KEYS.contains(&key) {
            return Err(Error::Usage(format!(
                "config line {}: unknown key '{key}'",
                i + 1
            )));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

struct Resolver {
    file: BTreeMap<String, String>,
}

impl Resolver {
    fn new(config: Option<&Path>) -> Result<Self> {
        let file = match config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        Ok(Self { file })
    }

    fn value<T: std::str::FromStr>(&self, cli: Option<T>, key: &str) -> Result<Option<T>> {
        if cli.is_some() {
            return Ok(cli);
        }
        self.file
            .get(key)
            .map(|s| {
                s.parse::<T>()
                    .map_err(|_| Error::Usage(format!("config key '{key}': cannot parse '{s}'")))
            })
            .transpose()
    }

    fn list(&self, cli: Option<String>, key: &str) -> Result<Option<Vec<f64>>> {
        let raw = cli.or_else(|| self.file.get(key).cloned());
        raw.map(|s| parse_list(&s, key)).transpose()
    }

    fn flag(&self, cli: bool, key: &str) -> Result<bool> {
        if cli {
            return Ok(true);
        }
        Ok(self.value::<bool>(None, key)?.unwrap_or(false))
    }
}

fn parse_list(s: &str, key: &str) -> Result<Vec<f64>> {
    let values = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Usage(format!("--{key}: cannot parse '{}'", t.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::Usage(format!("--{key} needs at least one value")));
    }
    Ok(values)
}

fn stepping(nt: Option<usize>, cfl: Option<f64>) -> Result<Stepping> {
    match (nt, cfl) {
        (Some(_), Some(_)) => Err(Error::Usage("give either --nt or --cfl, not both".into())),
        (Some(n), None) => Ok(Stepping::Steps(n)),
        (None, Some(c)) if c.is_finite() && c > 0.0 => Ok(Stepping::Cfl(c)),
        (None, Some(c)) => Err(Error::Usage(format!("--cfl must be positive, got {c}"))),
        (None, None) => Ok(Stepping::Cfl(1.0)),
    }
}

fn require<T>(v: Option<T>, flag: &str, cmd: &str) -> Result<T> {
    v.ok_or_else(|| Error::Usage(format!("{cmd} requires --{flag}")))
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let (common, task_of) = match cli.command {
            Command::Solve(a) => (a.common, Some(TaskArgs::Solve(a.k, a.nx, a.nt, a.cfl))),
            Command::SweepK(a) => (a.common, Some(TaskArgs::SweepK(a.ks, a.nx, a.nt, a.cfl))),
            Command::SweepDx(a) => (a.common, Some(TaskArgs::SweepDx(a.kdx, a.dx))),
            Command::Verify(c) => (c, None),
        };
        let r = Resolver::new(common.config.as_deref())?;

        let task = match task_of {
            Some(TaskArgs::Solve(k, nx, nt, cfl)) => {
                let k = require(r.value(k, "k")?, "k", "solve")?;
                if !(k.is_finite() && k > 0.0) {
                    return Err(Error::Usage(format!("--k must be positive, got {k}")));
                }
                let n_x = require(r.value(nx, "nx")?, "nx", "solve")?;
                Mesh::new(n_x).map_err(|e| Error::Usage(e.to_string()))?;
                let stepping = stepping(r.value(nt, "nt")?, r.value(cfl, "cfl")?)?;
                Task::Solve { k, n_x, stepping }
            }
            Some(TaskArgs::SweepK(ks, nx, nt, cfl)) => {
                let ks = require(r.list(ks, "ks")?, "ks", "sweep-k")?;
                if let Some(k) = ks.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
                    return Err(Error::Usage(format!(
                        "wavenumbers must be positive, got {k}"
                    )));
                }
                let n_x = require(r.value(nx, "nx")?, "nx", "sweep-k")?;
                Mesh::new(n_x).map_err(|e| Error::Usage(e.to_string()))?;
                let stepping = stepping(r.value(nt, "nt")?, r.value(cfl, "cfl")?)?;
                Task::SweepK { ks, n_x, stepping }
            }
            Some(TaskArgs::SweepDx(kdx, dx)) => {
                let k_dx = require(r.value(kdx, "kdx")?, "kdx", "sweep-dx")?;
                if !(k_dx.is_finite() && k_dx > 0.0) {
                    return Err(Error::Usage(format!("--kdx must be positive, got {k_dx}")));
                }
                let dxs = require(r.list(dx, "dx")?, "dx", "sweep-dx")?;
                for &dx in &dxs {
                    Mesh::with_spacing(dx).map_err(|e| Error::Usage(e.to_string()))?;
                }
                Task::SweepDx { k_dx, dxs }
            }
            None => Task::Verify,
        };

        let t_final = r.value(common.t_final, "t")?.unwrap_or(2.0);
        if !(t_final.is_finite() && t_final >= 0.0) {
            return Err(Error::Usage(format!(
                "--t must be non-negative, got {t_final}"
            )));
        }
        let spectral = match r.list(common.lambda, "lambda")? {
            None => SpectralParams::unit(),
            Some(l) if l.len() == 4 => SpectralParams::new(l[0], l[1], l[2], l[3])
                .map_err(|e| Error::Usage(e.to_string()))?,
            Some(l) => {
                return Err(Error::Usage(format!(
                    "--lambda needs 4 values, got {}",
                    l.len()
                )))
            }
        };
        let quadrature_order = r.value(common.quad_order, "quad-order")?.unwrap_or(4);
        if !(1..=MAX_QUADRATURE_ORDER).contains(&quadrature_order) {
            return Err(Error::Usage(format!(
                "--quad-order must be in 1..={MAX_QUADRATURE_ORDER}, got {quadrature_order}"
            )));
        }
        let steady_tol = r
            .value(common.steady_tol, "steady-tol")?
            .unwrap_or(DEFAULT_STEADY_TOL);
        if !(steady_tol.is_finite() && steady_tol > 0.0) {
            return Err(Error::Usage(format!(
                "--steady-tol must be positive, got {steady_tol}"
            )));
        }
        let fast_expm = if common.no_fast_expm {
            false
        } else {
            r.value::<bool>(None, "fast-expm")?.unwrap_or(true)
        };
        let format = match r.value(common.format, "format")? {
            Some(s) => OutputFormat::parse(&s)?,
            None => OutputFormat::Csv,
        };
        let out = r
            .value(common.out.map(|p| p.display().to_string()), "out")?
            .map(PathBuf::from);

        Ok(Self {
            task,
            t_final,
            spectral,
            options: RunOptions {
                allow_cfl_override: r.flag(common.allow_cfl_violation, "allow-cfl-violation")?,
                quadrature_order,
                early_stop: r.flag(common.early_stop, "early-stop")?,
                steady_tol,
                expm_mode: if fast_expm {
                    ExpmMode::Auto
                } else {
                    ExpmMode::Direct
                },
            },
            out,
            format,
        })
    }

    fn time_grid(&self, n_x: usize, stepping: Stepping) -> Result<(Mesh, TimeGrid)> {
        let mesh = Mesh::new(n_x)?;
        let grid = match stepping {
            Stepping::Steps(n) => TimeGrid::new(self.t_final, n, &self.spectral, &mesh)?,
            Stepping::Cfl(c) => TimeGrid::from_cfl(self.t_final, c, &self.spectral, &mesh)?,
        };
        Ok((mesh, grid))
    }
}

enum TaskArgs {
    Solve(Option<f64>, Option<usize>, Option<usize>, Option<f64>),
    SweepK(Option<String>, Option<usize>, Option<usize>, Option<f64>),
    SweepDx(Option<f64>, Option<String>),
}

/// Parses `argv` (including the program name) into a validated configuration.
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Usage(e.to_string()))?;
    RunConfig::from_cli(cli)
}

/// Worker cap from `HELMWAVE_THREADS`.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| {
                Error::Usage(format!(
                    "{THREADS_ENV} must be a positive integer, got '{v}'"
                ))
            }),
        Err(_) => Ok(None),
    }
}

/// Solution profile: numeric and exact `q` at every node.
pub fn profile_csv(run: &CaseRun) -> String {
    let mut out = String::from("x,u_R,u_I,v_R,v_I,u_R_exact,u_I_exact,v_R_exact,v_I_exact\n");
    for (j, r) in run.field.values.iter().enumerate() {
        let x = run.mesh.node(j);
        let q = run.model.l_inv * r;
        let e = run.case.exact_q(x);
        let cols = [x, q[0], q[1], q[2], q[3], e[0], e[1], e[2], e[3]];
        let line = cols
            .iter()
            .map(|v| fmt_sci(*v))
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Residual history; `t` is the time level reached by the step.
pub fn residual_csv(run: &CaseRun) -> String {
    let mut out = String::from("t,residual\n");
    for (n, r) in run.diagnostics.residual_history.iter().enumerate() {
        let _ = writeln!(out, "{},{}", fmt_sci(run.grid.time(n + 1)), fmt_sci(*r));
    }
    out
}

fn table_text(rows: &[SweepRow], format: OutputFormat) -> String {
    let records = table_records(rows);
    match format {
        OutputFormat::Csv => table_csv(&records),
        OutputFormat::Json => table_json(&records),
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(format!("writing {}", path.display()), e))?;
    Ok(path)
}

/// What a command produced.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    /// Text for stdout.
    pub stdout: String,
    /// One summary line per run, for stderr.
    pub summary: Vec<String>,
    pub written: Vec<PathBuf>,
    pub exit_code: i32,
}

fn summary_line(row: &SweepRow, steady_step: Option<usize>) -> String {
    let g = row.report.group(crate::verification::Group::Solution);
    format!(
        "k={:e} N_x={} N_t={} fast_expm={} steady_step={} l2_rel(1-2)={}",
        row.k,
        row.n_x,
        row.n_t,
        row.fast_expm,
        steady_step.map_or("none".to_string(), |s| s.to_string()),
        g.l2_rel.map_or("n/a".to_string(), fmt_sci),
    )
}

fn cfl_warning(grid: &TimeGrid) -> Option<String> {
    (grid.cfl() > 1.0 + CFL_SLACK).then(|| {
        format!(
            "warning: CFL number {:.6} exceeds 1, results may be unstable",
            grid.cfl()
        )
    })
}

/// Runs the configured task and writes its outputs.
pub fn execute(config: &RunConfig, threads: Option<usize>) -> Result<Outcome> {
    let mut outcome = Outcome::default();
    match &config.task {
        Task::Solve { k, n_x, stepping } => {
            let (mesh, grid) = config.time_grid(*n_x, *stepping)?;
            grid.check_cfl(config.options.allow_cfl_override)?;
            outcome.summary.extend(cfl_warning(&grid));
            let run = solve_plane_wave(*k, &config.spectral, mesh, grid, &config.options)?;
            let row = SweepRow {
                parameter: *k,
                k: *k,
                n_x: mesh.n_cells(),
                n_t: run.diagnostics.steps_executed(),
                fast_expm: run.diagnostics.fast_expm,
                report: run.report,
            };
            outcome
                .summary
                .push(summary_line(&row, run.diagnostics.steady_step));
            let table = table_text(std::slice::from_ref(&row), config.format);
            match &config.out {
                Some(dir) => {
                    let ext = config.format.extension();
                    outcome
                        .written
                        .push(write_file(dir, &format!("errors.{ext}"), &table)?);
                    outcome
                        .written
                        .push(write_file(dir, "profile.csv", &profile_csv(&run))?);
                    outcome
                        .written
                        .push(write_file(dir, "residuals.csv", &residual_csv(&run))?);
                }
                None => outcome.stdout = table,
            }
        }
        Task::SweepK { ks, n_x, stepping } => {
            let (_, grid) = config.time_grid(*n_x, *stepping)?;
            grid.check_cfl(config.options.allow_cfl_override)?;
            outcome.summary.extend(cfl_warning(&grid));
            let rows = sweep_wavenumber(
                ks,
                *n_x,
                grid.steps(),
                config.t_final,
                &config.spectral,
                &config.options,
                threads,
            )?;
            finish_sweep(config, &rows, &mut outcome)?;
        }
        Task::SweepDx { k_dx, dxs } => {
            let rows = sweep_refinement(
                *k_dx,
                dxs,
                config.t_final,
                &config.spectral,
                &config.options,
                threads,
            )?;
            finish_sweep(config, &rows, &mut outcome)?;
        }
        Task::Verify => {
            let checks = invariant_suite()?;
            let mut text = String::new();
            for c in &checks {
                let _ = writeln!(
                    text,
                    "{} {} ({})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            outcome
                .summary
                .push(format!("{} checks, {} failed", checks.len(), failed));
            if failed > 0 {
                outcome.exit_code = EXIT_CHECK_FAILED;
            }
            match &config.out {
                Some(dir) => outcome.written.push(write_file(dir, "verify.txt", &text)?),
                None => outcome.stdout = text,
            }
        }
    }
    Ok(outcome)
}

fn finish_sweep(config: &RunConfig, rows: &[SweepRow], outcome: &mut Outcome) -> Result<()> {
    outcome
        .summary
        .extend(rows.iter().map(|r| summary_line(r, None)));
    let table = table_text(rows, config.format);
    match &config.out {
        Some(dir) => {
            let name = format!("table.{}", config.format.extension());
            outcome.written.push(write_file(dir, &name, &table)?);
        }
        None => outcome.stdout = table,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &str) -> Result<RunConfig> {
        parse_config(std::iter::once("helmwave").chain(args.split_whitespace()))
    }

    #[test]
    fn solve_defaults() {
        let c = parse("solve --k 10 --nx 10 --nt 20 --t 2").unwrap();
        assert_eq!(
            c.task,
            Task::Solve {
                k: 10.0,
                n_x: 10,
                stepping: Stepping::Steps(20)
            }
        );
        assert_eq!(c.t_final, 2.0);
        assert_eq!(c.spectral, SpectralParams::unit());
        assert_eq!(c.options.quadrature_order, 4);
        assert_eq!(c.format, OutputFormat::Csv);
        assert_eq!(c.options.expm_mode, ExpmMode::Auto);
        assert!(!c.options.early_stop);
    }

    #[test]
    fn sweep_dx_lists() {
        let c = parse("sweep-dx --kdx 1 --dx 1e-1,1e-2,1e-3").unwrap();
        assert_eq!(
            c.task,
            Task::SweepDx {
                k_dx: 1.0,
                dxs: vec![0.1, 0.01, 0.001]
            }
        );
    }

    #[test]
    fn usage_errors() {
        for bad in [
            "solve --nx 10",
            "solve --k 10",
            "solve --k 10 --nx 10 --nt 20 --cfl 1",
            "solve --k -1 --nx 10",
            "solve --k 10 --nx 1",
            "solve --k 10 --nx 10 --bogus 3",
            "solve --k 10 --nx 10 --format xml",
            "solve --k 10 --nx 10 --lambda 1,1,-1",
            "solve --k 10 --nx 10 --lambda 1,1,1,-1",
            "solve --k 10 --nx 10 --quad-order 0",
            "sweep-k --nx 10",
            "sweep-dx --kdx 1 --dx 0.3",
            "frobnicate",
        ] {
            let err = parse(bad).unwrap_err();
            assert_eq!(err.exit_code(), EXIT_USAGE, "{bad}: {err}");
        }
    }

    #[test]
    fn lambda_flag_accepts_negative_values() {
        let c = parse("solve --k 10 --nx 10 --lambda 2,1,-1,-3").unwrap();
        assert_eq!(c.spectral.speeds(), [2.0, 1.0, -1.0, -3.0]);
    }

    #[test]
    fn config_text_parsing() {
        let map = parse_config_text("# comment\nk = 10\n\nnx=10 # trailing\n").unwrap();
        assert_eq!(map["k"], "10");
        assert_eq!(map["nx"], "10");
        assert!(parse_config_text("k 10").is_err());
        assert!(parse_config_text("colour = red").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Error::CflViolation { cfl: 2.0 }.exit_code(), EXIT_NUMERICAL);
        assert_eq!(Error::Usage("x".into()).exit_code(), EXIT_USAGE);
        let io = Error::io("x", std::io::Error::other("boom"));
        assert_eq!(io.exit_code(), EXIT_IO);
    }
}

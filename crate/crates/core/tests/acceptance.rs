//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use helmwave::linalg::{expm, expm_fast, ExpmCache};
use helmwave::solver::{Mesh, RiemannField, RunOptions, Stepper, TimeGrid};
use helmwave::verification::{
    plane_wave_case, solve_plane_wave, sweep_refinement, sweep_wavenumber, well_balanced_drift,
    Group,
};
use helmwave::{BoundaryData, HelmholtzProblem, Mat4, ModelMatrices, Source, SpectralParams, Vec4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn within_factor(got: f64, want: f64, factor: f64) -> bool {
    got.is_finite() && got > 0.0 && got <= want * factor && got >= want / factor
}

fn l2_rel_solution(report: &helmwave::verification::ErrorReport) -> f64 {
    report.group(Group::Solution).l2_rel.unwrap_or(f64::NAN)
}

fn criterion_1() -> Verdict {
    let mut worst = 0.0_f64;
    let mut slowest = 0.0_f64;
    let mut parts = Vec::new();
    for k in [10.0, 100.0, 1000.0] {
        let t = Instant::now();
        let drift = well_balanced_drift(k, 10, 50).unwrap();
        let secs = t.elapsed().as_secs_f64();
        worst = worst.max(drift);
        slowest = slowest.max(secs);
        parts.push(format!("k={k:e}: {drift:.2e}"));
    }
    verdict(
        worst <= 1e-11 && slowest < 0.1,
        format!(
            "{} (tol 1e-11), slowest case {slowest:.4} s (limit 0.1 s)",
            parts.join(", ")
        ),
    )
}

fn criterion_2() -> Verdict {
    let t = Instant::now();
    let s = SpectralParams::unit();
    let mesh = Mesh::new(100).unwrap();
    let grid = TimeGrid::from_cfl(2.2, 1.0, &s, &mesh).unwrap();
    let run = solve_plane_wave(10.0, &s, mesh, grid, &RunOptions::default()).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let dt = grid.dt();
    let hist = &run.diagnostics.residual_history;
    // hist[n] is the residual of the step landing on t_{n+1}
    let late = hist
        .iter()
        .enumerate()
        .filter(|(n, _)| grid.time(n + 1) >= 2.0 + 2.0 * dt - 1e-12)
        .map(|(_, r)| *r)
        .fold(0.0, f64::max);
    let n_one = (1.0 / dt).round() as usize;
    let at_one = hist[n_one - 1];
    verdict(
        grid.steps() == 220 && late < 1e-12 && at_one > 1e-6 && secs < 0.5,
        format!(
            "N_t={}, max residual for t>=2+2dt {late:.2e} (< 1e-12), residual at t=1 {at_one:.2e} (> 1e-6), {secs:.4} s",
            grid.steps()
        ),
    )
}

fn criterion_3() -> Verdict {
    let reference = [3.30e-7, 3.19e-6, 3.95e-5, 3.28e-4, 2.81e-3];
    let ks = [1e1, 1e2, 1e3, 1e4, 1e5];
    let t = Instant::now();
    let rows = sweep_wavenumber(
        &ks,
        10,
        20,
        2.0,
        &SpectralParams::unit(),
        &RunOptions::default(),
        None,
    )
    .unwrap();
    let secs = t.elapsed().as_secs_f64();
    let mut ok = secs < 5.0;
    let mut parts = Vec::new();
    for (row, want) in rows.iter().zip(reference) {
        let got = l2_rel_solution(&row.report);
        ok &= within_factor(got, want, 5.0) && row.fast_expm;
        parts.push(format!("k={:e}: {got:.2e} vs {want:.2e}", row.k));
    }
    verdict(
        ok,
        format!(
            "{}; fast path on all rows: {}; {secs:.3} s",
            parts.join(", "),
            rows.iter().all(|r| r.fast_expm)
        ),
    )
}

fn criterion_4() -> Verdict {
    let reference = [3.95e-5, 3.37e-6, 3.40e-7];
    let dxs = [1e-1, 1e-2, 1e-3];
    let s = SpectralParams::unit();
    let options = RunOptions::default();
    let t = Instant::now();
    let rows = sweep_refinement(1.0, &dxs, 2.0, &s, &options, None).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let mut ok = secs < 60.0;
    let mut parts = Vec::new();
    for (row, want) in rows.iter().zip(reference) {
        let got = l2_rel_solution(&row.report);
        ok &= within_factor(got, want, 5.0);
        parts.push(format!("dx={:e}: {got:.2e} vs {want:.2e}", row.parameter));
    }
    let fine = sweep_refinement(1.0, &[1e-4], 2.0, &s, &options, None).unwrap();
    let e3 = l2_rel_solution(&rows[2].report);
    let e4 = l2_rel_solution(&fine[0].report);
    let plateau = within_factor(e4, e3, 2.0);
    ok &= plateau;
    verdict(
        ok,
        format!(
            "{}; plateau dx=1e-3 -> 1e-4: {e3:.2e} -> {e4:.2e} (ratio {:.2}, need within 2x); three rows {secs:.2} s",
            parts.join(", "),
            e4 / e3
        ),
    )
}

fn criterion_5() -> Verdict {
    let t = Instant::now();
    let sets = [
        SpectralParams::unit(),
        SpectralParams::new(2.0, 1.0, -1.0, -3.0).unwrap(),
    ];
    let rel = |a: &Mat4, b: &Mat4| (a - b).amax() / b.amax();
    let mut worst = 0.0_f64;
    for s in &sets {
        for k in [1.0, 10.0, 1e3, 1e5] {
            let problem = HelmholtzProblem::new(
                k,
                Source::new(|x| (3.0 * x).cos()),
                Source::new(|x| x * x - 0.5),
                BoundaryData::new(0.3, -0.2, 1.0, 0.5),
            )
            .unwrap();
            let m = ModelMatrices::build(&problem, s).unwrap();
            worst = worst
                .max(rel(&(m.l_inv * m.lambda * m.l), &m.a))
                .max(rel(&(m.l_inv * m.br * m.l), &m.b))
                .max(rel(&(m.lambda_inv * m.br), &(m.l * m.bq * m.l_inv)))
                .max((m.a.determinant() / s.speeds().iter().product::<f64>() - 1.0).abs());
            for x in [0.0, 0.25, 0.7, 1.0] {
                let f = m.f(x);
                worst = worst.max((m.l_inv * m.fr(x) - f).amax() / f.amax());
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    verdict(
        worst <= 1e-12 && secs < 0.1,
        format!("worst relative residual {worst:.2e} (tol 1e-12) over 8 (k, λ) pairs, {secs:.4} s"),
    )
}

/// Truncated Taylor series, 60 terms.
fn taylor_expm(x: &Mat4) -> Mat4 {
    let mut term = Mat4::identity();
    let mut sum = Mat4::identity();
    for n in 1..60 {
        term = term * x / n as f64;
        sum += term;
    }
    sum
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let raw = Mat4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let target = rng.gen_range(0.01..=5.0);
        let x = raw * (target / helmwave::linalg::norm1(&raw));
        let got = expm(&x).unwrap();
        let want = taylor_expm(&x);
        worst = worst.max((got - want).amax() / want.amax());
    }
    let unit = ModelMatrices::build(
        &plane_wave_case(1.0).unwrap().problem(),
        &SpectralParams::unit(),
    )
    .unwrap()
    .m;
    let cache = ExpmCache::build(&unit, 10_000).unwrap();
    let mut fast_worst = 0.0_f64;
    let mut parts = Vec::new();
    for m in [2u64, 10, 10_000] {
        let direct = expm(&(unit * m as f64)).unwrap();
        let err = (expm_fast(&cache, m).unwrap() - direct).amax() / direct.amax();
        fast_worst = fast_worst.max(err);
        parts.push(format!("m={m}: {err:.2e}"));
    }
    verdict(
        worst <= 1e-12 && fast_worst <= 1e-9,
        format!(
            "Padé vs Taylor worst {worst:.2e} (tol 1e-12); cached powers {} (tol 1e-9)",
            parts.join(", ")
        ),
    )
}

fn random_field(mesh: &Mesh, rng: &mut ChaCha8Rng) -> RiemannField {
    let mut field = RiemannField::zeros(mesh);
    for v in &mut field.values {
        *v = Vec4::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    }
    field.pin_boundary(&BoundaryData::default());
    field
}

fn sup_history(k: f64, n_x: usize, cfl: f64, steps: usize, seed: u64) -> Vec<f64> {
    let s = SpectralParams::unit();
    let mesh = Mesh::new(n_x).unwrap();
    let model = ModelMatrices::build(
        &HelmholtzProblem::homogeneous(k, BoundaryData::default()).unwrap(),
        &s,
    )
    .unwrap();
    let options = RunOptions {
        allow_cfl_override: true,
        ..RunOptions::default()
    };
    let stepper = Stepper::new(&model, &mesh, cfl * mesh.dx(), &options).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = random_field(&mesh, &mut rng);
    let mut next = cur.clone();
    let mut hist = vec![cur.sup_norm()];
    for _ in 0..steps {
        stepper.apply(&cur.values, &mut next.values).unwrap();
        std::mem::swap(&mut cur, &mut next);
        hist.push(cur.sup_norm());
    }
    hist
}

fn criterion_7() -> Verdict {
    let n_x = 50;
    let stable = sup_history(10.0, n_x, 1.0, 500, 7);
    let worst_ratio = stable
        .windows(2)
        .map(|w| w[1] / w[0])
        .filter(|r| r.is_finite())
        .fold(0.0, f64::max);
    let first_increase = stable.windows(2).position(|w| w[1] > w[0] * (1.0 + 1e-12));
    let zero_after = stable.iter().position(|v| *v == 0.0);
    let peak = stable.iter().copied().fold(0.0, f64::max);
    let non_increasing = first_increase.is_none();

    let unstable = sup_history(10.0, n_x, 1.5, 200, 8);
    let growth = unstable.iter().copied().fold(0.0, f64::max) / unstable[0];
    let grows = growth >= 10.0;
    verdict(
        non_increasing && grows,
        format!(
            "CFL=1: non-increasing {non_increasing} (first increase at step {}, worst step ratio {worst_ratio:.3}, peak/initial {:.2}, zero from step {}); CFL=1.5: growth {growth:.2e} within 200 steps (need >= 10)",
            first_increase.map_or("-".into(), |n| (n + 1).to_string()),
            peak / stable[0],
            zero_after.map_or("never".into(), |n| n.to_string()),
        ),
    )
}

/// Single-step defect between the scheme and its first-order Taylor form,
/// maximised over interior nodes.
fn taylor_defect(n_x: usize) -> f64 {
    let k = 1.0;
    let s = SpectralParams::unit();
    let problem = HelmholtzProblem::new(
        k,
        Source::new(|x| (2.0 * x).cos()),
        Source::new(|x| 1.0 + x * x),
        BoundaryData::default(),
    )
    .unwrap();
    let model = ModelMatrices::build(&problem, &s).unwrap();
    let mesh = Mesh::new(n_x).unwrap();
    let dx = mesh.dx();
    let dt = dx / s.max_speed();
    let options = RunOptions::default();
    let stepper = Stepper::new(&model, &mesh, dt, &options).unwrap();

    let init = |x: f64| {
        Vec4::new(
            (std::f64::consts::PI * x).sin(),
            (2.0 * x).cos(),
            (-x).exp(),
            1.0 - x * x,
        )
    };
    let cur: Vec<Vec4> = mesh.nodes().map(init).collect();
    let mut next = cur.clone();
    stepper.apply(&cur, &mut next).unwrap();

    let lam = s.speeds();
    let lp = Mat4::from_diagonal(&Vec4::new(lam[0], lam[1], 0.0, 0.0));
    let lm = Mat4::from_diagonal(&Vec4::new(0.0, 0.0, lam[2], lam[3]));
    let mut worst = 0.0_f64;
    for j in 1..n_x {
        let x = mesh.node(j);
        let oracle = cur[j] - dt * (lp * (cur[j] - cur[j - 1]) + lm * (cur[j + 1] - cur[j])) / dx
            + dt * (lp * model.m * cur[j - 1] + lm * model.m * cur[j + 1] + model.fr(x));
        worst = worst.max((next[j] - oracle).amax());
    }
    worst
}

fn criterion_8() -> Verdict {
    let ns = [40, 80, 160];
    let d: Vec<f64> = ns.iter().map(|&n| taylor_defect(n)).collect();
    let orders: Vec<f64> = d.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let min_order = orders.iter().copied().fold(f64::INFINITY, f64::min);
    verdict(
        min_order >= 1.9,
        format!(
            "defects {:.3e}, {:.3e}, {:.3e}; observed orders {:.3}, {:.3} (need >= 1.9)",
            d[0], d[1], d[2], orders[0], orders[1]
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("well-balanced steady state preserved", criterion_1),
        ("finite-time steady state", criterion_2),
        ("wavenumber sweep error levels", criterion_3),
        ("mesh refinement error levels", criterion_4),
        ("matrix identities", criterion_5),
        ("matrix exponential accuracy", criterion_6),
        ("stability boundary", criterion_7),
        ("consistency order", criterion_8),
    ];
    println!("\nrunning {} acceptance criteria", criteria.len());
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        if !v.passed {
            failed += 1;
        }
        println!(
            "[{}] {}. {name}: {}",
            if v.passed { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
    }
    println!(
        "\nacceptance: {} passed, {failed} failed\n",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

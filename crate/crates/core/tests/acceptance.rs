//! Acceptance criteria, one line per criterion. Runs without the libtest
//! harness so the table is always printed; exits non-zero if any fails.

use std::f64::consts::PI;
use std::fs;
use std::time::{Duration, Instant};

use dnstrip::discretize::{assemble, Grid, TruncBc};
use dnstrip::eigensolve::{lowest_eigenpairs, rayleigh_quotient, Verdict};
use dnstrip::geometry::ProfileSpec;
use dnstrip::scenario::{preset, run_scenario, write_outputs, RunOutput, Scenario, Task};
use dnstrip::transverse::{bessel_lambda0, boundary_ratio, sufficient_condition_rhs, robin_lambda0, shoot_lambda0};
use dnstrip::variational::{eval_q, prop2_bound, TrialFunction, TrialSpec};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), dnstrip::Error>;

struct Row {
    id: usize,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    limit: Option<Duration>,
}

fn timed(id: usize, title: &'static str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Row {
    let start = Instant::now();
    let res = f();
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = match res {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    if let Some(l) = limit {
        if elapsed >= l {
            pass = false;
            detail.push_str(&format!("; runtime {:.1} s exceeds {:.0} s", elapsed.as_secs_f64(), l.as_secs_f64()));
        }
    }
    let row = Row {
        id,
        title,
        pass,
        detail,
        elapsed,
        limit,
    };
    println!(
        "criterion {:>2} {:<34} {}  [{:.2} s{}]  {}",
        row.id,
        row.title,
        if row.pass { "PASS" } else { "FAIL" },
        row.elapsed.as_secs_f64(),
        row.limit.map_or(String::new(), |l| format!(" / {:.0} s", l.as_secs_f64())),
        row.detail
    );
    row
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

/// Lowest eigenvalue recorded for a given truncation at the scenario's base grid.
fn base_lambda(run: &RunOutput, sc: &Scenario, bc: TruncBc) -> Option<f64> {
    run.report
        .facts
        .spectra
        .iter()
        .find(|s| s.trunc_bc == bc && s.ns == sc.grid.ns && s.nu == sc.grid.nu)
        .map(|s| s.eigenvalues[0])
}

fn all_tasks_run(name: &str, tasks: &[Task]) -> Result<(Scenario, RunOutput), dnstrip::Error> {
    let sc = preset(name)?;
    let run = run_scenario(&sc, tasks)?;
    Ok((sc, run))
}

fn straight_threshold(cache: &mut Vec<(Scenario, RunOutput)>) -> Outcome {
    let (sc, run) = all_tasks_run("straight", &[Task::Solve])?;
    let thr = PI * PI / 4.0;
    let lam = base_lambda(&run, &sc, TruncBc::Neumann).unwrap_or(f64::NAN);
    let verdict = run.report.verdict();
    let ok = (lam - thr).abs() <= 5e-3 && verdict == Some(Verdict::NoneDetected) && sc.grid.ns == 480 && sc.grid.nu == 48;
    let detail = format!(
        "lambda1 {lam:.9} (pi^2/4 = {thr:.9}), verdict {}",
        verdict.map_or("-", |v| v.as_str())
    );
    cache.push((sc, run));
    Ok((ok, detail))
}

fn prop1_existence(cache: &mut Vec<(Scenario, RunOutput)>) -> Outcome {
    let (sc, run) = all_tasks_run("prop1_bend", &[Task::Solve, Task::Certify])?;
    let g = sc.strip()?;
    let bending = g.profile.total_bending()?;
    let cert = run.certificate.as_ref().expect("certify task ran");
    let det = run.detection.as_ref().expect("solve task ran");
    let a = cert.found && cert.q_value < 0.0;
    let b = det.margin > 0.0 && det.extrapolated.dirichlet_value < det.threshold - det.margin;
    let fine = run
        .finest
        .iter()
        .find(|r| r.trunc_bc() == TruncBc::Dirichlet)
        .expect("dirichlet level");
    let pencil = assemble(&g, &fine.grid)?;
    let trial = TrialFunction::new(&g, cert.trial)?;
    let rq = rayleigh_quotient(&pencil, &pencil.interpolate(|s, u| trial.value(s, u)))?;
    let c = rq >= fine.lowest();
    let detail = format!(
        "bending {bending:.6}; (a) q {:.6e} at sigma {:e}; (b) extrapolated {:.9} < {:.9}; (c) RQ {rq:.9} >= lambda1 {:.9}",
        cert.q_value,
        cert.sigma,
        det.extrapolated.dirichlet_value,
        det.threshold - det.margin,
        fine.lowest()
    );
    cache.push((sc, run));
    Ok(((bending + 0.64).abs() < 1e-12 && a && b && c, detail))
}

fn prop3_nonexistence(cache: &mut Vec<(Scenario, RunOutput)>) -> Outcome {
    let (sc, run) = all_tasks_run("prop3_bend", &[Task::Solve, Task::Transverse])?;
    let g = sc.strip()?;
    let transverse = run.transverse.as_ref().map(|t| t.all_pass);
    let lam = base_lambda(&run, &sc, TruncBc::Neumann).unwrap_or(f64::NAN);
    let thr = g.threshold;
    let verdict = run.report.verdict();
    let ok = transverse == Some(true)
        && run.transverse.as_ref().is_some_and(|t| !t.samples.is_empty())
        && lam >= thr - 5e-3
        && verdict == Some(Verdict::NoneDetected);
    let detail = format!(
        "transverse certificate {:?} over {} samples; neumann lambda1 {lam:.9} >= {:.9}; verdict {}",
        transverse,
        run.transverse.as_ref().map_or(0, |t| t.samples.len()),
        thr - 5e-3,
        verdict.map_or("-", |v| v.as_str())
    );
    cache.push((sc, run));
    Ok((ok, detail))
}

fn sufficient_condition_constants() -> Outcome {
    let r0 = sufficient_condition_rhs(0.0);
    let r1 = sufficient_condition_rhs(2.0 / 3.0);
    let ok = r0.abs() <= 1e-12 && ((r1 - 2.0) / 2.0).abs() <= 1e-12 && 2.0 < PI * PI / 4.0;
    Ok((ok, format!("RHS(0) = {r0:e}, RHS(2/3) = {r1:.16}, pi^2/4 = {:.9}", PI * PI / 4.0)))
}

fn lemma_sweep() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_mono, mut worst_gap) = (f64::INFINITY, f64::INFINITY);
    for _ in 0..200 {
        let d: f64 = rng.random_range(0.25..3.0);
        let x: f64 = rng.random_range(-0.45..6.0) / d;
        let y: f64 = rng.random_range(-0.45..6.0) / d;
        let (a1, a2) = (x.max(y), x.min(y));
        let l1 = robin_lambda0(d, a1)?.lambda0;
        let l2 = robin_lambda0(d, a2)?.lambda0;
        worst_mono = worst_mono.min(l1 - l2);
        let bound = l1 + (a2 - a1) * boundary_ratio(d, a1, l1);
        worst_gap = worst_gap.min(bound - l2);
    }
    Ok((
        worst_mono >= -1e-9 && worst_gap >= -1e-9,
        format!("min lambda0(a1) - lambda0(a2) = {worst_mono:.3e}, min bound slack = {worst_gap:.3e}"),
    ))
}

fn bessel_shooting() -> Outcome {
    let (mut worst_rel, mut worst_res) = (0.0f64, 0.0f64);
    for d in [0.5, 1.0, 2.0] {
        for k in 1..=9 {
            let gamma = 0.1 * k as f64 / d;
            let b = bessel_lambda0(d, gamma)?;
            let s = shoot_lambda0(d, gamma)?;
            worst_rel = worst_rel.max(((b.lambda0 - s.lambda0) / s.lambda0).abs());
            worst_res = worst_res.max(b.residual);
        }
    }
    Ok((
        worst_rel <= 1e-8 && worst_res <= 1e-10,
        format!("worst relative disagreement {worst_rel:.2e}, worst cross-product residual {worst_res:.2e}"),
    ))
}

fn counterexample() -> Outcome {
    let sc = preset("counterexample")?;
    let g = sc.strip()?;
    let ProfileSpec::TwoBump { s1, s2, area1, s3, area2, .. } = *g.profile.spec() else {
        return Ok((false, "preset is not a two-bump profile".into()));
    };
    let bending = g.profile.total_bending()?;
    let trial = TrialSpec::counterexample(s1, s2, s3, 0.1);
    let q = eval_q(&g, &trial)?;
    let closed = trial.envelope().derivative_energy() + g.profile.integral_over(s1, s2) / g.d;
    let run = run_scenario(&sc, &[Task::Solve])?;
    let verdict = run.report.verdict();
    let ok = area1 < 0.0
        && area2 > 0.0
        && (bending - 0.2).abs() < 1e-12
        && g.d == 0.2
        && q.q < 0.0
        && (q.q - closed).abs() <= 1e-8
        && verdict == Some(Verdict::BoundState);
    Ok((
        ok,
        format!(
            "bending {bending:.12}; q {:.12} vs closed form {closed:.12}; verdict {}",
            q.q,
            verdict.map_or("-", |v| v.as_str())
        ),
    ))
}

fn prop2_certificate() -> Outcome {
    let sc = preset("prop2_sbend")?;
    let g = sc.strip()?;
    let s0 = match *g.profile.spec() {
        ProfileSpec::SBend { s0, .. } => s0,
        _ => return Ok((false, "preset is not an s-bend".into())),
    };
    let eps = prop2_bound(&g, &TrialSpec::prop2(s0, 1e-4, 0.0))?.optimal_epsilon;
    let bound = prop2_bound(&g, &TrialSpec::prop2(s0, 1e-4, eps))?.value;
    let run = run_scenario(&sc, &[Task::Solve])?;
    let verdict = run.report.verdict();
    let setup = sc.truncation.half_length == dnstrip::scenario::Length::Fixed(60.0) && sc.grid.ns == 960 && sc.grid.nu == 48;
    let ok = setup && bound < 0.0 && matches!(verdict, Some(Verdict::BoundState | Verdict::Inconclusive));
    Ok((
        ok,
        format!(
            "bound {bound:.6e} at eps* {eps:.6}; verdict {}",
            verdict.map_or("-", |v| v.as_str())
        ),
    ))
}

/// Grid-order band, truncation bracketing at each level, and the monotone
/// drift of both truncations as `L` doubles at fixed cell size.
fn bracketing(cache: &[(Scenario, RunOutput)]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (sc, run) in cache {
        let g = sc.strip()?;
        let mut notes = Vec::new();
        for s in run.report.facts.spectra.iter().filter(|s| s.trunc_bc == TruncBc::Dirichlet) {
            let partner = run
                .report
                .facts
                .spectra
                .iter()
                .find(|n| n.trunc_bc == TruncBc::Neumann && n.ns == s.ns && n.nu == s.nu);
            if let Some(n) = partner {
                if s.eigenvalues[0] < n.eigenvalues[0] {
                    ok = false;
                    notes.push(format!("dirichlet below neumann at {}x{}", s.ns, s.nu));
                }
            }
        }
        for row in run.report.facts.convergence.iter().filter_map(|r| r.observed_order.map(|o| (r.trunc_bc, o))) {
            let (bc, order) = row;
            if !(1.7..=2.3).contains(&order) {
                ok = false;
            }
            notes.push(format!("order[{}] {order:.3}", bc.as_str()));
        }
        let half_length = run.report.facts.spectra[0].half_length;
        let base = Grid::new(half_length, sc.grid.ns, sc.grid.nu, TruncBc::Dirichlet)?;
        for bc in [TruncBc::Dirichlet, TruncBc::Neumann] {
            let at = |grid: &Grid| -> Result<f64, dnstrip::Error> {
                Ok(lowest_eigenpairs(&assemble(&g, grid)?, 1, sc.solver.tol)?.lowest())
            };
            let short = at(&base.with_bc(bc))?;
            let long = at(&base.with_bc(bc).doubled_length())?;
            // Equal values (straight strip, Neumann) may differ by solver rounding.
            let slack = 1e-10 * short.abs();
            let monotone = match bc {
                TruncBc::Dirichlet => long <= short + slack,
                TruncBc::Neumann => long >= short - slack,
            };
            if !monotone {
                ok = false;
            }
            notes.push(format!(
                "{} L {half_length}->{}: {short:.9}->{long:.9}{}",
                bc.as_str(),
                2.0 * half_length,
                if monotone { "" } else { " (wrong direction)" }
            ));
        }
        parts.push(format!("{}: {}", sc.name, notes.join(", ")));
    }
    Ok((ok && cache.len() == 3, parts.join(" | ")))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir()?;
    let mut detail = Vec::new();
    let mut ok = true;
    for name in ["counterexample", "straight"] {
        let sc = preset(name)?;
        let g = sc.strip()?;
        let mut files = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("{name}-{rep}"));
            let run = run_scenario(&sc, &[Task::Solve])?;
            write_outputs(&sc, &g, &run, &out, Duration::ZERO)?;
            files.push((
                fs::read(out.join("eigenvalues.csv"))?,
                fs::read(out.join("eigenvalues_neumann.csv"))?,
                fs::read(out.join("report.json"))?,
            ));
        }
        let same = files[0] == files[1];
        ok &= same;
        detail.push(format!("{name}: {}", if same { "identical" } else { "differs" }));
    }
    Ok((ok, detail.join(", ")))
}

fn main() {
    let mut cache = Vec::new();
    let rows = vec![
        timed(1, "straight-strip threshold", secs(30), || straight_threshold(&mut cache)),
        timed(2, "existence for inward bend", secs(120), || prop1_existence(&mut cache)),
        timed(3, "non-existence for outward bend", secs(120), || prop3_nonexistence(&mut cache)),
        timed(4, "sufficient-condition constants", secs(1), sufficient_condition_constants),
        timed(5, "Robin monotonicity and gap", secs(5), lemma_sweep),
        timed(6, "Bessel vs shooting", secs(10), bessel_shooting),
        timed(7, "positive-bending counterexample", secs(120), counterexample),
        timed(8, "zero-bending certificate", secs(300), prop2_certificate),
        timed(9, "bracketing and convergence", secs(300), || bracketing(&cache)),
        timed(10, "determinism", None, determinism),
    ];
    let failed: Vec<usize> = rows.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    println!(
        "acceptance: {} of {} criteria pass{}",
        rows.len() - failed.len(),
        rows.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failing: {failed:?}")
        }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}

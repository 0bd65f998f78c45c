use std::fs;
use std::io::BufWriter;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Length, Scenario, Task, SCHEMA_VERSION};
use crate::discretize::{assemble, Grid, TruncBc};
use crate::eigensolve::{detect_bound_states, solve, write_mode_csv, Bracket, Detection, SpectralResult, Verdict};
use crate::error::{Error, Result};
use crate::geometry::{reconstruct_curve, ProfileSpec, StripGeometry, ValidityReport};
use crate::transverse::{bessel_lambda0, nonexistence_certificate, shoot_lambda0, Method};
use crate::variational::{certify, Certificate, TrialKind};

/// Facts about one solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumFacts {
    pub level: String,
    pub trunc_bc: TruncBc,
    pub half_length: f64,
    pub ns: usize,
    pub nu: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub trunc_bc: TruncBc,
    pub ns: usize,
    pub nu: usize,
    pub hs: f64,
    pub hu: f64,
    pub lambda1: f64,
    pub residual: f64,
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationFacts {
    pub policy: &'static str,
    pub half_length: f64,
    pub doublings: usize,
    pub bracket_width: Option<f64>,
    pub bracket_closed: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryFacts {
    pub d: f64,
    pub profile: ProfileSpec,
    pub threshold: f64,
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    pub total_bending: Option<f64>,
    pub validity: ValidityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Facts {
    pub spectra: Vec<SpectrumFacts>,
    pub convergence: Vec<ConvergenceRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fine_bracket: Option<Bracket>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extrapolated: Option<Bracket>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundStateVerdict {
    pub verdict: Verdict,
    pub margin: f64,
    pub threshold: f64,
    pub extrapolated_dirichlet: f64,
    pub extrapolated_neumann: f64,
    pub coarse_grid: [usize; 2],
    pub fine_grid: [usize; 2],
    pub half_length: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recommendation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateVerdict {
    pub kind: TrialKind,
    pub found: bool,
    pub q_value: f64,
    pub sigma: f64,
    pub epsilon: f64,
    pub upper_bound_on_inf_spectrum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransverseVerdict {
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_pass: Option<bool>,
    pub verdict: String,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_d_gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Verdicts {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_state: Option<BoundStateVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transverse: Option<TransverseVerdict>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub consistency: Vec<ConsistencyCheck>,
}

/// Contents of `report.json`; free of timestamps so reruns are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: String,
    pub tasks: Vec<Task>,
    pub geometry: GeometryFacts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationFacts>,
    pub facts: Facts,
    pub verdicts: Verdicts,
}

impl Report {
    /// `Some(verdict)` when a bound-state decision was made.
    pub fn verdict(&self) -> Option<Verdict> {
        self.verdicts.bound_state.as_ref().map(|b| b.verdict)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransverseRow {
    pub d: f64,
    pub gamma: f64,
    pub lambda0: f64,
    pub method: Method,
    pub residual: f64,
}

/// `λ₀` at each distinct sampled curvature value, Bessel route for `γ > 0`
/// and shooting otherwise.
pub fn transverse_table(g: &StripGeometry, n: usize) -> Result<Vec<TransverseRow>> {
    let (a, b) = g.profile.window;
    let mut gammas: Vec<f64> = (0..n)
        .map(|i| g.profile.gamma(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect();
    gammas.push(g.profile.gamma_plus - 1e-12);
    gammas.push(0.0 - g.profile.gamma_minus);
    gammas.sort_by(f64::total_cmp);
    gammas.dedup_by(|x, y| (*x - *y).abs() <= 1e-14);
    gammas
        .into_par_iter()
        .map(|gamma| {
            let e = if gamma > 0.0 {
                bessel_lambda0(g.d, gamma)?
            } else {
                shoot_lambda0(g.d, gamma)?
            };
            Ok(TransverseRow {
                d: g.d,
                gamma,
                lambda0: e.lambda0,
                method: e.method,
                residual: e.residual,
            })
        })
        .collect()
}

/// Everything produced by one scenario run, before writing.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    pub certificate: Option<Certificate>,
    pub transverse: Option<crate::transverse::CertificateReport>,
    /// Lowest transverse eigenvalue at sampled curvature values.
    pub transverse_table: Vec<TransverseRow>,
    /// Results at the finest level, keyed by truncation.
    pub finest: Vec<SpectralResult>,
    pub detection: Option<Detection>,
}

struct LevelSolve {
    label: String,
    grid: Grid,
    result: SpectralResult,
}

fn level_grids(sc: &Scenario) -> Vec<(String, usize, usize)> {
    let mut out = Vec::new();
    let (ns, nu) = (sc.grid.ns, sc.grid.nu);
    if ns % 2 == 0 && nu % 2 == 0 && ns / 2 >= 4 && nu / 2 >= 4 {
        out.push(("coarsened".to_string(), ns / 2, nu / 2));
    }
    for i in 0..=sc.grid.refine_levels {
        let label = if i == 0 { "base".to_string() } else { format!("refined{i}") };
        out.push((label, ns << i, nu << i));
    }
    out
}

fn solve_levels(sc: &Scenario, g: &StripGeometry, half_length: f64, ns_scale: usize) -> Result<Vec<LevelSolve>> {
    let jobs: Vec<(String, Grid)> = level_grids(sc)
        .into_iter()
        .flat_map(|(label, ns, nu)| {
            sc.truncation
                .trunc_bc
                .variants()
                .into_iter()
                .map(move |bc| (label.clone(), ns * ns_scale, nu, bc))
        })
        .map(|(label, ns, nu, bc)| Ok((label, Grid::new(half_length, ns, nu, bc)?)))
        .collect::<Result<_>>()?;
    let solved: Vec<Option<LevelSolve>> = jobs
        .into_par_iter()
        .map(|(label, grid)| {
            let pencil = match assemble(g, &grid) {
                Ok(p) => p,
                // A coarsened grid may under-resolve the curvature; it is optional.
                Err(Error::Argument(_)) if label == "coarsened" => return Ok(None),
                Err(e) => return Err(e),
            };
            let result = solve(&pencil, &sc.solver)?;
            Ok(Some(LevelSolve { label, grid, result }))
        })
        .collect::<Result<_>>()?;
    Ok(solved.into_iter().flatten().collect())
}

fn observed_order(values: &[f64]) -> Option<f64> {
    if values.len() < 3 {
        return None;
    }
    let n = values.len();
    let (a, b, c) = (values[n - 3], values[n - 2], values[n - 1]);
    let ratio = (a - b) / (b - c);
    (ratio > 0.0 && ratio.is_finite()).then(|| ratio.log2())
}

fn convergence_rows(levels: &[LevelSolve], d: f64) -> Vec<ConvergenceRow> {
    let mut rows = Vec::new();
    for bc in [TruncBc::Dirichlet, TruncBc::Neumann] {
        let series: Vec<&LevelSolve> = levels.iter().filter(|l| l.grid.trunc_bc == bc).collect();
        let mut values = Vec::new();
        for l in series {
            values.push(l.result.lowest());
            rows.push(ConvergenceRow {
                trunc_bc: bc,
                ns: l.grid.ns,
                nu: l.grid.nu,
                hs: l.grid.hs(),
                hu: d / l.grid.nu as f64,
                lambda1: l.result.lowest(),
                residual: l.result.residuals[0],
                observed_order: observed_order(&values),
            });
        }
    }
    rows
}

/// Detection from the two finest levels, when both truncations were solved.
fn detect(levels: &[LevelSolve]) -> Result<Option<Detection>> {
    let pick = |label: &str, bc: TruncBc| {
        levels
            .iter()
            .find(|l| l.label == label && l.grid.trunc_bc == bc)
            .map(|l| &l.result)
    };
    let mut labels: Vec<&str> = Vec::new();
    for l in levels {
        if l.label != "coarsened" && !labels.contains(&l.label.as_str()) {
            labels.push(&l.label);
        }
    }
    if labels.len() < 2 && levels.iter().any(|l| l.label == "coarsened") {
        labels.insert(0, "coarsened");
    }
    if labels.len() < 2 {
        return Ok(None);
    }
    let (c, f) = (labels[labels.len() - 2], labels[labels.len() - 1]);
    match (
        pick(c, TruncBc::Dirichlet),
        pick(c, TruncBc::Neumann),
        pick(f, TruncBc::Dirichlet),
        pick(f, TruncBc::Neumann),
    ) {
        (Some(cd), Some(cn), Some(fd), Some(fneu)) => detect_bound_states(cd, cn, fd, fneu).map(Some),
        _ => Ok(None),
    }
}

/// Trial family matching the profile's hypotheses.
pub fn default_certificate_kind(g: &StripGeometry) -> TrialKind {
    let p = &g.profile;
    let total = p.total_bending().unwrap_or(0.0);
    let tiny = 1e-10 * (1.0 + p.l2_norm_sq().sqrt());
    match p.spec() {
        ProfileSpec::TwoBump { area1, .. } if total > tiny && *area1 < 0.0 => TrialKind::Counterexample,
        _ if total.abs() <= tiny && p.l2_norm_sq() > 0.0 && p.is_compact() => TrialKind::Prop2,
        _ => TrialKind::Prop1,
    }
}

/// Curvature values sampled over the profile window, including the maximum.
fn gamma_samples(g: &StripGeometry, n: usize) -> Vec<f64> {
    let (a, b) = g.profile.window;
    let mut v: Vec<f64> = (0..n)
        .map(|i| g.profile.gamma(a + (b - a) * i as f64 / (n - 1) as f64).max(0.0))
        .collect();
    let top = (g.profile.gamma_plus - 1e-12).max(0.0);
    v.push(top);
    v
}

/// Runs the requested tasks of a scenario.
pub fn run_scenario(sc: &Scenario, tasks: &[Task]) -> Result<RunOutput> {
    sc.check()?;
    let g = sc.strip()?;
    let geometry = GeometryFacts {
        d: g.d,
        profile: g.profile.spec().clone(),
        threshold: g.threshold,
        gamma_minus: g.profile.gamma_minus,
        gamma_plus: g.profile.gamma_plus,
        total_bending: g.profile.total_bending().ok(),
        validity: g.valid,
    };
    let mut facts = Facts::default();
    let mut verdicts = Verdicts::default();
    let mut truncation = None;
    let mut finest = Vec::new();
    let mut detection = None;
    let mut certificate = None;
    let mut transverse = None;
    let mut transverse_table_rows = Vec::new();

    if tasks.contains(&Task::Solve) {
        let (policy, mut half_length, max_doublings) = match sc.truncation.half_length {
            Length::Fixed(l) => ("fixed", l, 0),
            Length::Auto => ("auto", g.profile.support_radius() + 12.0 * g.d, 2),
        };
        let mut doublings = 0;
        let mut levels = solve_levels(sc, &g, half_length, 1)?;
        let mut det = detect(&levels)?;
        while let Some(dt) = &det {
            if doublings >= max_doublings || dt.fine.width() < dt.margin {
                break;
            }
            doublings += 1;
            half_length *= 2.0;
            levels = solve_levels(sc, &g, half_length, 1 << doublings)?;
            det = detect(&levels)?;
        }
        truncation = Some(TruncationFacts {
            policy,
            half_length,
            doublings,
            bracket_width: det.as_ref().map(|d| d.fine.width()),
            bracket_closed: det.as_ref().map(|d| d.fine.width() < d.margin),
        });
        facts.convergence = convergence_rows(&levels, g.d);
        facts.spectra = levels
            .iter()
            .map(|l| SpectrumFacts {
                level: l.label.clone(),
                trunc_bc: l.grid.trunc_bc,
                half_length: l.grid.half_length,
                ns: l.grid.ns,
                nu: l.grid.nu,
                eigenvalues: l.result.eigenvalues.clone(),
                residuals: l.result.residuals.clone(),
                converged: l.result.converged,
                shift: l.result.shift,
            })
            .collect();
        if let Some(dt) = &det {
            facts.fine_bracket = Some(dt.fine);
            facts.extrapolated = Some(dt.extrapolated);
            let fine_ns = levels.iter().map(|l| l.grid.ns).max().unwrap_or(0);
            let fine_nu = levels.iter().map(|l| l.grid.nu).max().unwrap_or(0);
            verdicts.bound_state = Some(BoundStateVerdict {
                verdict: dt.verdict,
                margin: dt.margin,
                threshold: dt.threshold,
                extrapolated_dirichlet: dt.extrapolated.dirichlet_value,
                extrapolated_neumann: dt.extrapolated.neumann_value,
                coarse_grid: [fine_ns / 2, fine_nu / 2],
                fine_grid: [fine_ns, fine_nu],
                half_length,
                recommendation: (dt.verdict == Verdict::Inconclusive).then(|| {
                    "the eigenvalue sits within the numerical margin of the threshold; run `dnstrip certify` for a variational certificate".to_string()
                }),
            });
        }
        let top_ns = levels.iter().map(|l| l.grid.ns).max().unwrap_or(0);
        finest = levels
            .into_iter()
            .filter(|l| l.grid.ns == top_ns)
            .map(|l| l.result)
            .collect();
        detection = det;
    }

    if tasks.contains(&Task::Certify) {
        let kind = sc.certificate_kind.unwrap_or_else(|| default_certificate_kind(&g));
        let c = certify(&g, kind)?;
        verdicts.certificate = Some(CertificateVerdict {
            kind,
            found: c.found,
            q_value: c.q_value,
            sigma: c.sigma,
            epsilon: c.epsilon,
            upper_bound_on_inf_spectrum: c.upper_bound_on_inf_spectrum,
        });
        certificate = Some(c);
    }

    if tasks.contains(&Task::Transverse) {
        let samples = gamma_samples(&g, sc.transverse_samples);
        transverse_table_rows = transverse_table(&g, sc.transverse_samples)?;
        if g.profile.gamma_minus > 0.0 {
            verdicts.transverse = Some(TransverseVerdict {
                applicable: false,
                all_pass: None,
                verdict: "not applicable: curvature takes negative values".into(),
                samples: 0,
                max_d_gamma: None,
            });
        } else {
            let t = nonexistence_certificate(g.d, &samples)?;
            verdicts.transverse = Some(TransverseVerdict {
                applicable: true,
                all_pass: Some(t.all_pass),
                verdict: t.verdict.clone(),
                samples: t.samples.len(),
                max_d_gamma: t.samples.iter().map(|s| s.d_gamma).reduce(f64::max),
            });
            transverse = Some(t);
        }
    }

    if tasks.contains(&Task::Validate) {
        let mut checks = Vec::new();
        checks.push(ConsistencyCheck {
            name: "geometry.valid".into(),
            pass: g.valid.is_valid(),
            detail: format!(
                "min metric {:.6}, edges {:?}",
                g.valid.min_metric, g.valid.non_self_intersecting
            ),
        });
        if let Some(dt) = &detection {
            checks.push(ConsistencyCheck {
                name: "bracketing.trunc_bc".into(),
                pass: dt.fine.dirichlet_value >= dt.fine.neumann_value && dt.coarse.dirichlet_value >= dt.coarse.neumann_value,
                detail: format!("dirichlet {:.10} >= neumann {:.10}", dt.fine.dirichlet_value, dt.fine.neumann_value),
            });
        }
        if let (Some(c), Some(dt)) = (&certificate, &detection) {
            if c.found {
                checks.push(ConsistencyCheck {
                    name: "certificate.implies_neumann_below".into(),
                    pass: dt.fine.neumann_value < dt.threshold,
                    detail: format!("q = {:.3e}, neumann lambda1 = {:.10}", c.q_value, dt.fine.neumann_value),
                });
            }
        }
        if let (Some(t), Some(dt)) = (&transverse, &detection) {
            if t.all_pass {
                checks.push(ConsistencyCheck {
                    name: "transverse.agrees_with_detection".into(),
                    pass: dt.verdict != Verdict::BoundState,
                    detail: format!("verdict {}", dt.verdict.as_str()),
                });
            }
        }
        verdicts.consistency = checks;
    }

    Ok(RunOutput {
        report: Report {
            schema_version: SCHEMA_VERSION,
            scenario: sc.name.clone(),
            tasks: tasks.to_vec(),
            geometry,
            truncation,
            facts,
            verdicts,
        },
        certificate,
        transverse,
        transverse_table: transverse_table_rows,
        finest,
        detection,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct Metadata<'a> {
    schema_version: u32,
    scenario: &'a str,
    tool: &'static str,
    version: &'static str,
    started_unix_seconds: u64,
    elapsed_seconds: f64,
    threads: usize,
}

/// Writes all artifacts of a run into `out`.
pub fn write_outputs(sc: &Scenario, g: &StripGeometry, run: &RunOutput, out: &Path, elapsed: std::time::Duration) -> Result<()> {
    fs::create_dir_all(out)?;
    write_json(&out.join("report.json"), &run.report)?;
    let margin = run.detection.as_ref().map_or(1e-4 * g.threshold, |d| d.margin);
    if !run.finest.is_empty() {
        let primary = run
            .finest
            .iter()
            .find(|r| r.trunc_bc() == TruncBc::Dirichlet)
            .unwrap_or(&run.finest[0]);
        primary.save_csv(&out.join("eigenvalues.csv"), margin)?;
        for r in &run.finest {
            if !std::ptr::eq(r, primary) {
                r.save_csv(&out.join(format!("eigenvalues_{}.csv", r.trunc_bc().as_str())), margin)?;
            }
        }
        let pencil = assemble(g, &primary.grid)?;
        for (i, mode) in primary.modes.iter().enumerate() {
            let name = if i == 0 { "modes.csv".to_string() } else { format!("modes_{}.csv", i + 1) };
            write_mode_csv(&pencil, mode, BufWriter::new(fs::File::create(out.join(name))?))?;
        }
    }
    if !run.report.facts.convergence.is_empty() {
        let mut w = csv::Writer::from_path(out.join("convergence.csv"))?;
        w.write_record(["trunc_bc", "ns", "nu", "hs", "hu", "lambda1", "residual", "observed_order"])?;
        for r in &run.report.facts.convergence {
            w.write_record([
                r.trunc_bc.as_str().to_string(),
                r.ns.to_string(),
                r.nu.to_string(),
                format!("{:e}", r.hs),
                format!("{:e}", r.hu),
                format!("{:.15e}", r.lambda1),
                format!("{:.6e}", r.residual),
                r.observed_order.map_or(String::new(), |o| format!("{o:.6}")),
            ])?;
        }
        w.flush()?;
    }
    if let Some(c) = &run.certificate {
        write_json(&out.join("certificate.json"), c)?;
    }
    if let Some(t) = &run.transverse {
        write_json(&out.join("transverse.json"), t)?;
    }
    if !run.transverse_table.is_empty() {
        let mut w = csv::Writer::from_path(out.join("transverse.csv"))?;
        w.write_record(["d", "gamma", "lambda0", "method", "residual"])?;
        for r in &run.transverse_table {
            w.write_record([
                r.d.to_string(),
                format!("{:.15e}", r.gamma),
                format!("{:.15e}", r.lambda0),
                r.method.as_str().to_string(),
                format!("{:.3e}", r.residual),
            ])?;
        }
        w.flush()?;
    }
    if run.report.tasks.contains(&Task::Validate) {
        let (a, b) = g.profile.window;
        let pad = 2.0 + 2.0 * g.d;
        let (lo, hi) = g.profile.domain();
        let curve = reconstruct_curve(&g.profile, ((a - pad).max(lo), (b + pad).min(hi)), 0.01)?;
        curve.save_csv(&out.join("curve.csv"))?;
    }
    let started = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    write_json(
        &out.join("metadata.json"),
        &Metadata {
            schema_version: SCHEMA_VERSION,
            scenario: &sc.name,
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            started_unix_seconds: started.saturating_sub(elapsed.as_secs()),
            elapsed_seconds: elapsed.as_secs_f64(),
            threads: rayon::current_num_threads(),
        },
    )?;
    Ok(())
}

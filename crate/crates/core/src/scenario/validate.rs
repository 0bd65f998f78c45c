//! Invariant suite behind `dnstrip validate`.

use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::discretize::{assemble, asymmetry, Grid, TruncBc};
use crate::eigensolve::lowest_eigenpairs;
use crate::error::Result;
use crate::geometry::{reconstruct_curve, CurvatureProfile, ProfileSpec, StripGeometry};
use crate::transverse::bessel::{check_zeros, REFERENCE_ZEROS};
use crate::transverse::{
    bessel_lambda0, boundary_ratio, lemma_gap_bound, nonexistence_certificate, sufficient_condition_rhs, robin_lambda0, shoot_lambda0,
};
use crate::variational::{envelope, eval_q, prop1_bound, prop2_bound, TrialSpec};

#[derive(Debug, Clone, Default)]
pub struct ValidateOptions {
    /// Only checks whose name contains this substring run.
    pub filter: Option<String>,
    /// Test hook: perturbs the reference Bessel-zero table.
    pub corrupt_bessel_table: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationTable {
    pub rows: Vec<CheckRow>,
}

impl ValidationTable {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.rows.iter().filter(|r| !r.pass).map(|r| r.name).collect()
    }

    pub fn render(&self) -> String {
        let width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(5);
        let mut out = format!("{:<width$}  {:<6}  detail\n", "check", "status");
        for r in &self.rows {
            let status = if r.pass { "pass" } else { "FAIL" };
            out.push_str(&format!("{:<width$}  {:<6}  {}\n", r.name, status, r.detail));
        }
        out
    }
}

type Check = fn(&ValidateOptions) -> Result<(bool, String)>;

fn strip(d: f64, spec: ProfileSpec) -> Result<StripGeometry> {
    StripGeometry::new(d, CurvatureProfile::new(spec)?)
}

fn circle_closure(_: &ValidateOptions) -> Result<(bool, String)> {
    let p = CurvatureProfile::new(ProfileSpec::Tabulated {
        s: vec![0.0, 2.0 * PI],
        gamma: vec![1.0, 1.0],
        zero_tail: false,
    })?;
    let c = reconstruct_curve(&p, (0.0, 2.0 * PI), 1e-3)?;
    let end = c.last();
    let gap = (end.x - c.samples[0].x).hypot(end.y - c.samples[0].y);
    Ok((gap < 1e-6, format!("unit circle closes to {gap:.2e}")))
}

fn total_bending(_: &ValidateOptions) -> Result<(bool, String)> {
    let p = CurvatureProfile::new(ProfileSpec::PolyBump { c: 0.3, s0: 2.0 })?;
    let total = p.total_bending()?;
    let theta = reconstruct_curve(&p, (-3.0, 3.0), 1e-3)?.last().theta;
    let ok = (total + 0.64).abs() < 1e-12 && (theta + 0.64).abs() < 1e-8;
    Ok((ok, format!("integral {total:.15}, final angle {theta:.12}")))
}

fn bessel_zeros(o: &ValidateOptions) -> Result<(bool, String)> {
    let mut table = REFERENCE_ZEROS;
    if o.corrupt_bessel_table {
        table[0][0] += 1e-3;
    }
    let checks = check_zeros(&table, 1e-10);
    let worst = checks.iter().map(|c| c.rel_error).fold(0.0, f64::max);
    let bad: Vec<String> = checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} zero {}", c.kind, c.index))
        .collect();
    Ok((
        bad.is_empty(),
        if bad.is_empty() {
            format!("12 zeros, worst relative error {worst:.1e}")
        } else {
            format!("mismatch: {}", bad.join(", "))
        },
    ))
}

fn bessel_vs_shooting(_: &ValidateOptions) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for d in [0.5, 1.0, 2.0] {
        for k in 1..=9 {
            let gamma = 0.1 * k as f64 / d;
            let b = bessel_lambda0(d, gamma)?;
            let s = shoot_lambda0(d, gamma)?;
            worst = worst.max(((b.lambda0 - s.lambda0) / s.lambda0).abs());
        }
    }
    Ok((worst <= 1e-8, format!("27 points, worst relative gap {worst:.1e}")))
}

fn lemma_triples() -> Vec<(f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    (0..200)
        .map(|_| {
            let d: f64 = rng.random_range(0.2..3.0);
            let a: f64 = rng.random_range(-0.4..5.0) / d;
            let b: f64 = rng.random_range(-0.4..5.0) / d;
            (d, a.max(b), a.min(b))
        })
        .collect()
}

fn lemma_monotonicity(_: &ValidateOptions) -> Result<(bool, String)> {
    let mut worst = f64::INFINITY;
    for (d, a1, a2) in lemma_triples() {
        let gap = robin_lambda0(d, a1)?.lambda0 - robin_lambda0(d, a2)?.lambda0;
        worst = worst.min(gap);
    }
    Ok((worst >= -1e-9, format!("200 triples, min lambda0(a1) - lambda0(a2) = {worst:.3e}")))
}

fn lemma_gap(_: &ValidateOptions) -> Result<(bool, String)> {
    let mut worst = f64::INFINITY;
    for (d, a1, a2) in lemma_triples() {
        let slack = lemma_gap_bound(d, a1, a2)? - robin_lambda0(d, a2)?.lambda0;
        worst = worst.min(slack);
    }
    Ok((worst >= -1e-9, format!("200 triples, min bound slack {worst:.3e}")))
}

fn lemma_ratio(_: &ValidateOptions) -> Result<(bool, String)> {
    // ψ(u) = sin(ku): ψ(d)²/∫ψ² with k from the Robin condition.
    let (d, alpha) = (1.3, 0.7);
    let lam = robin_lambda0(d, alpha)?.lambda0;
    let k = lam.sqrt();
    let direct = (k * d).sin().powi(2) / (0.5 * d - (2.0 * k * d).sin() / (4.0 * k));
    let r = boundary_ratio(d, alpha, lam);
    Ok(((r - direct).abs() < 1e-12 * direct, format!("closed form {r:.15} vs direct {direct:.15}")))
}

fn sufficient_condition_endpoints(_: &ValidateOptions) -> Result<(bool, String)> {
    let r0 = sufficient_condition_rhs(0.0);
    let r1 = sufficient_condition_rhs(2.0 / 3.0);
    let ok = r0 == 0.0 && ((r1 - 2.0) / 2.0).abs() <= 1e-12 && 2.0 < PI * PI / 4.0;
    Ok((ok, format!("rhs(0) = {r0}, rhs(2/3) = {r1:.15}, pi^2/4 = {:.6}", PI * PI / 4.0)))
}

fn transverse_certificate(_: &ValidateOptions) -> Result<(bool, String)> {
    let samples: Vec<f64> = (0..=18).map(|i| 0.05 * i as f64).collect();
    let rep = nonexistence_certificate(1.0, &samples)?;
    Ok((rep.all_pass, format!("{} samples of d*gamma in [0, 0.9]", rep.samples.len())))
}

fn threshold_floor(_: &ValidateOptions) -> Result<(bool, String)> {
    let d = 1.0;
    let thr = PI * PI / 4.0;
    let mut worst = f64::INFINITY;
    for i in 0..=99 {
        let gamma = 0.01 * i as f64;
        let lam = if gamma > 0.0 {
            bessel_lambda0(d, gamma)?.lambda0
        } else {
            shoot_lambda0(d, gamma)?.lambda0
        };
        worst = worst.min(lam - thr);
    }
    Ok((worst >= -1e-9, format!("100 points of d*gamma in [0, 0.99], min lambda0 - threshold {worst:.3e}")))
}

fn symmetry(_: &ValidateOptions) -> Result<(bool, String)> {
    let g = strip(0.8, ProfileSpec::SBend { amplitude: 0.4, s0: 1.5 })?;
    let p = assemble(&g, &Grid::new(3.0, 48, 8, TruncBc::Neumann)?)?;
    let (a, m) = (asymmetry(&p.a), asymmetry(&p.m));
    Ok((a == 0.0 && m == 0.0, format!("max |A - A^T| = {a:e}, max |M - M^T| = {m:e}")))
}

fn straight_separable(_: &ValidateOptions) -> Result<(bool, String)> {
    let g = strip(1.0, ProfileSpec::Zero)?;
    let p = assemble(&g, &Grid::new(3.0, 24, 8, TruncBc::Neumann)?)?;
    let r = lowest_eigenpairs(&p, 1, 1e-10)?;
    let (h, t) = (1.0 / 8.0, PI / 16.0);
    let exact = 6.0 / (h * h) * (1.0 - t.cos()) / (2.0 + t.cos());
    let err = (r.lowest() - exact).abs();
    Ok((err < 1e-9, format!("lambda1 {:.12} vs separable {exact:.12}", r.lowest())))
}

fn bracketing(_: &ValidateOptions) -> Result<(bool, String)> {
    let g = strip(1.0, ProfileSpec::PolyBump { c: 0.3, s0: 2.0 })?;
    let solve = |bc| -> Result<f64> {
        let p = assemble(&g, &Grid::new(6.0, 96, 8, bc)?)?;
        Ok(lowest_eigenpairs(&p, 1, 1e-9)?.lowest())
    };
    let (dv, nv) = (solve(TruncBc::Dirichlet)?, solve(TruncBc::Neumann)?);
    Ok((dv >= nv, format!("dirichlet {dv:.10} >= neumann {nv:.10}")))
}

fn determinism(_: &ValidateOptions) -> Result<(bool, String)> {
    let g = strip(1.0, ProfileSpec::SBend { amplitude: 0.3, s0: 2.0 })?;
    let p = assemble(&g, &Grid::new(8.0, 128, 8, TruncBc::Dirichlet)?)?;
    let a = lowest_eigenpairs(&p, 2, 1e-9)?;
    let b = lowest_eigenpairs(&p, 2, 1e-9)?;
    let same = a.eigenvalues.iter().zip(&b.eigenvalues).all(|(x, y)| x.to_bits() == y.to_bits());
    Ok((same, "two identical solves compared bitwise".into()))
}

fn straight_q(_: &ValidateOptions) -> Result<(bool, String)> {
    let g = strip(1.0, ProfileSpec::Zero)?;
    let t = TrialSpec::prop1(1.0, 0.1);
    let q = eval_q(&g, &t)?.q;
    let expect = 0.1 * 2.0 * envelope::tail_energy(t.tail_width);
    Ok(((q - expect).abs() < 1e-10, format!("q {q:.14} vs sigma*|phi'|^2 {expect:.14}")))
}

fn prop1_dominance(_: &ValidateOptions) -> Result<(bool, String)> {
    let g = strip(1.0, ProfileSpec::PolyBump { c: 0.3, s0: 2.0 })?;
    let t = TrialSpec::prop1(2.0, 0.05);
    let (q, b) = (eval_q(&g, &t)?.q, prop1_bound(&g, &t)?);
    Ok((q <= b + 1e-8, format!("q {q:.10} <= bound {b:.10}")))
}

fn prop2_certificate(_: &ValidateOptions) -> Result<(bool, String)> {
    let g = strip(1.0, ProfileSpec::SBend { amplitude: 0.3, s0: 2.0 })?;
    let eps = prop2_bound(&g, &TrialSpec::prop2(2.0, 1e-4, 0.0))?.optimal_epsilon;
    let t = TrialSpec::prop2(2.0, 1e-4, eps);
    let b = prop2_bound(&g, &t)?.value;
    let q = eval_q(&g, &t)?.q;
    Ok((b < 0.0 && q <= b + 1e-8, format!("bound {b:.6e} at eps* = {eps:.6}, q {q:.6e}")))
}

fn counterexample_formula(_: &ValidateOptions) -> Result<(bool, String)> {
    let g = strip(
        0.2,
        ProfileSpec::TwoBump {
            s1: -3.0,
            s2: -1.0,
            area1: -0.5,
            s3: 1.0,
            s4: 3.0,
            area2: 0.7,
        },
    )?;
    let t = TrialSpec::counterexample(-3.0, -1.0, 1.0, 0.1);
    let q = eval_q(&g, &t)?.q;
    let closed = t.envelope().derivative_energy() + g.profile.integral_over(-3.0, -1.0) / g.d;
    Ok(((q - closed).abs() < 1e-8 && q < 0.0, format!("q {q:.12} vs closed form {closed:.12}")))
}

const CHECKS: &[(&str, Check)] = &[
    ("geometry.circle_closure", circle_closure),
    ("geometry.total_bending", total_bending),
    ("bessel.zero_table", bessel_zeros),
    ("bessel.shooting_agreement", bessel_vs_shooting),
    ("lemma.monotonicity", lemma_monotonicity),
    ("lemma.gap_bound", lemma_gap),
    ("lemma.boundary_ratio", lemma_ratio),
    ("transverse.sufficient_condition", sufficient_condition_endpoints),
    ("transverse.certificate", transverse_certificate),
    ("transverse.threshold_floor", threshold_floor),
    ("discretize.symmetry", symmetry),
    ("eigensolve.straight_separable", straight_separable),
    ("eigensolve.bracketing", bracketing),
    ("eigensolve.determinism", determinism),
    ("variational.straight_closed_form", straight_q),
    ("variational.prop1_bound", prop1_dominance),
    ("variational.prop2_certificate", prop2_certificate),
    ("variational.counterexample", counterexample_formula),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.0).collect()
}

/// Runs the invariant suite; a check that errors counts as failed.
pub fn validate(opts: &ValidateOptions) -> ValidationTable {
    let rows = CHECKS
        .iter()
        .filter(|(name, _)| opts.filter.as_deref().is_none_or(|f| name.contains(f)))
        .map(|(name, check)| match check(opts) {
            Ok((pass, detail)) => CheckRow { name, pass, detail },
            Err(e) => CheckRow {
                name,
                pass: false,
                detail: format!("error: {e}"),
            },
        })
        .collect();
    ValidationTable { rows }
}

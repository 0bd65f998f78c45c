use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Scenario, SweepGrid, Task};
use super::run::run_scenario;
use crate::error::{Error, Result};
use crate::geometry::ProfileSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub c: f64,
    pub d: f64,
    pub s0: f64,
    pub total_bending: Option<f64>,
    pub threshold: Option<f64>,
    pub lambda1_dirichlet: Option<f64>,
    pub lambda1_neumann: Option<f64>,
    pub margin: Option<f64>,
    pub verdict: String,
    pub certificate_q: Option<f64>,
}

/// `(strength, extent)` of the families a sweep can vary.
fn family_params(p: &ProfileSpec) -> Result<(f64, f64)> {
    match *p {
        ProfileSpec::PolyBump { c, s0 } => Ok((c, s0)),
        ProfileSpec::SBend { amplitude, s0 } => Ok((amplitude, s0)),
        ProfileSpec::GaussianBump { amplitude, width, .. } => Ok((amplitude, width)),
        ref other => Err(Error::config(
            "geometry.profile.kind",
            format!(
                "sweeps vary poly_bump, s_bend or gaussian_bump profiles, got {}",
                other.kind_name()
            ),
        )),
    }
}

fn with_params(p: &ProfileSpec, strength: f64, extent: f64) -> ProfileSpec {
    match p.clone() {
        ProfileSpec::PolyBump { .. } => ProfileSpec::PolyBump { c: strength, s0: extent },
        ProfileSpec::SBend { .. } => ProfileSpec::SBend {
            amplitude: strength,
            s0: extent,
        },
        ProfileSpec::GaussianBump { center, .. } => ProfileSpec::GaussianBump {
            amplitude: strength,
            width: extent,
            center,
        },
        other => other,
    }
}

/// Grid used when a scenario carries no `sweep` block.
pub fn default_grid(sc: &Scenario) -> Result<SweepGrid> {
    let (c, s0) = family_params(&sc.geometry.profile)?;
    Ok(SweepGrid {
        c: vec![-c.abs(), -0.5 * c.abs(), 0.5 * c.abs(), c.abs()],
        d: vec![sc.geometry.d],
        s0: vec![s0],
    })
}

/// Runs detection and certification over the Cartesian product of the grid.
/// Points whose geometry is invalid are reported, not fatal.
pub fn run_sweep(sc: &Scenario) -> Result<Vec<SweepRow>> {
    let (c0, s00) = family_params(&sc.geometry.profile)?;
    let grid = match &sc.sweep {
        Some(g) => g.clone(),
        None => default_grid(sc)?,
    };
    let pick = |v: &Vec<f64>, fallback: f64| if v.is_empty() { vec![fallback] } else { v.clone() };
    let (cs, ds, s0s) = (pick(&grid.c, c0), pick(&grid.d, sc.geometry.d), pick(&grid.s0, s00));
    let mut points = Vec::new();
    for &c in &cs {
        for &d in &ds {
            for &s0 in &s0s {
                points.push((c, d, s0));
            }
        }
    }
    let tasks = [Task::Solve, Task::Certify];
    Ok(points
        .into_par_iter()
        .map(|(c, d, s0)| {
            let mut point = sc.clone();
            point.name = format!("{}[c={c},d={d},s0={s0}]", sc.name);
            point.geometry.d = d;
            point.geometry.profile = with_params(&sc.geometry.profile, c, s0);
            point.certificate_kind = None;
            let mut row = SweepRow {
                c,
                d,
                s0,
                total_bending: None,
                threshold: None,
                lambda1_dirichlet: None,
                lambda1_neumann: None,
                margin: None,
                verdict: String::new(),
                certificate_q: None,
            };
            match run_scenario(&point, &tasks) {
                Ok(out) => {
                    let r = out.report;
                    row.total_bending = r.geometry.total_bending;
                    row.threshold = Some(r.geometry.threshold);
                    if let Some(b) = r.facts.fine_bracket {
                        row.lambda1_dirichlet = Some(b.dirichlet_value);
                        row.lambda1_neumann = Some(b.neumann_value);
                    }
                    if let Some(v) = &r.verdicts.bound_state {
                        row.margin = Some(v.margin);
                        row.verdict = v.verdict.as_str().to_string();
                    }
                    row.certificate_q = r.verdicts.certificate.map(|c| c.q_value);
                }
                Err(e) => row.verdict = format!("invalid: {e}"),
            }
            row
        })
        .collect())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "c",
        "d",
        "s0",
        "total_bending",
        "threshold",
        "lambda1_dirichlet",
        "lambda1_neumann",
        "margin",
        "verdict",
        "certificate_q",
    ])?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.12e}"));
    for r in rows {
        w.write_record([
            r.c.to_string(),
            r.d.to_string(),
            r.s0.to_string(),
            opt(r.total_bending),
            opt(r.threshold),
            opt(r.lambda1_dirichlet),
            opt(r.lambda1_neumann),
            opt(r.margin),
            r.verdict.clone(),
            opt(r.certificate_q),
        ])?;
    }
    w.flush()?;
    Ok(())
}

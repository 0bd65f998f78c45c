use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{envelope, eval_q, prop1_bound, prop2_bound, TrialKind, TrialSpec};
use crate::error::{Error, Result};
use crate::geometry::{ProfileSpec, StripGeometry};

pub const SIGMA_GRID: [f64; 7] = [1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
pub const EPSILON_FACTORS: [f64; 5] = [0.5, 0.75, 1.0, 1.25, 1.5];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateSample {
    pub sigma: f64,
    pub epsilon: f64,
    pub q_value: f64,
    pub q_error: f64,
    pub closed_form_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    /// ‖φ̇‖² of the unscaled envelope (both flanks).
    pub phi_dot_sq: f64,
    /// ∫γ over the plateau.
    pub gamma_plateau_integral: f64,
    pub gamma_l2_sq: f64,
    pub gamma_dot_l2_sq: f64,
    pub gamma_l3_cubed: f64,
    /// Weighted ‖Φ‖² of the best trial.
    pub trial_norm_sq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub kind: TrialKind,
    pub found: bool,
    pub verdict: String,
    pub sigma: f64,
    pub epsilon: f64,
    pub q_value: f64,
    pub q_error: f64,
    /// `threshold + q/‖Φ‖²`; strictly below the threshold when `found`.
    pub upper_bound_on_inf_spectrum: f64,
    pub threshold: f64,
    pub d: f64,
    pub first_negative: Option<CertificateSample>,
    pub norms: Norms,
    pub trial: TrialSpec,
    pub samples: Vec<CertificateSample>,
}

/// Plateau covering the curvature window.
fn plateau(g: &StripGeometry) -> (f64, f64) {
    if matches!(g.profile.spec(), ProfileSpec::Zero) {
        return (0.0, 1.0);
    }
    let (a, b) = g.profile.window;
    (0.5 * (a + b), (0.5 * (b - a)).max(1e-3))
}

/// Searches the trial family of `kind` for a negative value of `q`.
pub fn certify(g: &StripGeometry, kind: TrialKind) -> Result<Certificate> {
    g.require_valid()?;
    let (center, s0) = plateau(g);
    let p = &g.profile;
    let mut norms = Norms {
        phi_dot_sq: 2.0 * envelope::tail_energy(super::DEFAULT_TAIL_WIDTH),
        gamma_plateau_integral: p.integral_over(center - s0, center + s0),
        gamma_l2_sq: p.l2_norm_sq(),
        gamma_dot_l2_sq: p.derivative_l2_norm_sq(),
        gamma_l3_cubed: p.l3_norm_cubed(),
        trial_norm_sq: 0.0,
    };

    let trials: Vec<TrialSpec> = match kind {
        TrialKind::Prop1 => SIGMA_GRID
            .iter()
            .map(|&s| TrialSpec::prop1(s0, s).centered_at(center))
            .collect(),
        TrialKind::Prop2 => {
            let probe = prop2_bound(g, &TrialSpec::prop2(s0, 1.0, 0.0).centered_at(center))?;
            SIGMA_GRID
                .iter()
                .flat_map(|&s| {
                    EPSILON_FACTORS
                        .iter()
                        .map(move |&f| TrialSpec::prop2(s0, s, f * probe.optimal_epsilon).centered_at(center))
                })
                .collect()
        }
        TrialKind::Counterexample => {
            let ProfileSpec::TwoBump { s1, s2, s3, .. } = *p.spec() else {
                return Err(Error::Inapplicable(format!(
                    "counterexample trial needs a two_bump profile, got {}",
                    p.kind_name()
                )));
            };
            if !(s2 < s3) {
                return Err(Error::Inapplicable("counterexample needs a gap s2 < s3 for the ramp".into()));
            }
            norms.phi_dot_sq = envelope::tail_energy(super::DEFAULT_TAIL_WIDTH) + 1.2 / (s3 - s2);
            norms.gamma_plateau_integral = p.integral_over(s1, s2);
            SIGMA_GRID
                .iter()
                .map(|&s| TrialSpec::counterexample(s1, s2, s3, s))
                .collect()
        }
    };

    let evaluated: Vec<(CertificateSample, f64)> = trials
        .par_iter()
        .map(|t| {
            let q = eval_q(g, t)?;
            let bound = match kind {
                TrialKind::Prop1 => prop1_bound(g, t)?,
                TrialKind::Prop2 => prop2_bound(g, t)?.value,
                TrialKind::Counterexample => t.envelope().derivative_energy() + norms.gamma_plateau_integral / g.d,
            };
            Ok((
                CertificateSample {
                    sigma: t.sigma,
                    epsilon: t.epsilon,
                    q_value: q.q,
                    q_error: q.error,
                    closed_form_bound: bound,
                },
                q.weighted_norm_sq,
            ))
        })
        .collect::<Result<_>>()?;

    let first_negative = evaluated.iter().map(|e| e.0).find(|s| s.q_value + s.q_error < 0.0);
    let best = (0..evaluated.len())
        .min_by(|&a, &b| evaluated[a].0.q_value.total_cmp(&evaluated[b].0.q_value))
        .expect("non-empty search grid");
    let (sample, norm_sq) = evaluated[best];
    norms.trial_norm_sq = norm_sq;
    let found = first_negative.is_some();
    Ok(Certificate {
        schema_version: 1,
        kind,
        found,
        verdict: if found { "certificate" } else { "no certificate" }.to_string(),
        sigma: sample.sigma,
        epsilon: sample.epsilon,
        q_value: sample.q_value,
        q_error: sample.q_error,
        upper_bound_on_inf_spectrum: g.threshold + sample.q_value / norm_sq,
        threshold: g.threshold,
        d: g.d,
        first_negative,
        norms,
        trial: trials[best],
        samples: evaluated.into_iter().map(|e| e.0).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CurvatureProfile;

    fn geom(spec: ProfileSpec, d: f64) -> StripGeometry {
        StripGeometry::new(d, CurvatureProfile::new(spec).unwrap()).unwrap()
    }

    #[test]
    fn straight_strip_has_no_certificate() {
        let c = certify(&geom(ProfileSpec::Zero, 1.0), TrialKind::Prop1).unwrap();
        assert!(!c.found);
        assert_eq!(c.verdict, "no certificate");
        assert!(c.samples.iter().all(|s| s.q_value >= 0.0));
    }

    #[test]
    fn inward_bump_is_certified() {
        let g = geom(ProfileSpec::PolyBump { c: 0.3, s0: 2.0 }, 1.0);
        let c = certify(&g, TrialKind::Prop1).unwrap();
        assert!(c.found);
        assert!(c.q_value < 0.0);
        assert!(c.upper_bound_on_inf_spectrum < g.threshold);
        // q decreases along the σ grid toward (1/d)∫γ.
        assert!(c.samples.windows(2).all(|w| w[1].q_value <= w[0].q_value + 1e-12));
        assert!((c.samples[6].q_value - c.norms.gamma_plateau_integral).abs() < 1e-4);
        for s in &c.samples {
            assert!(s.q_value <= s.closed_form_bound + 1e-8);
        }
    }

    #[test]
    fn wrong_family_is_inapplicable() {
        let g = geom(ProfileSpec::PolyBump { c: 0.3, s0: 2.0 }, 1.0);
        assert!(matches!(certify(&g, TrialKind::Counterexample), Err(Error::Inapplicable(_))));
        assert!(matches!(certify(&g, TrialKind::Prop2), Err(Error::Inapplicable(_))));
    }
}

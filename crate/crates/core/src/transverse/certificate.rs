use rayon::prelude::*;
use serde::Serialize;

use super::robin::{boundary_ratio, curvature_alpha, robin_lambda0};
use super::{bessel_lambda0, shoot_lambda0};
use crate::error::{Error, Result};
use crate::geometry::threshold;

use std::f64::consts::PI;

/// Right-hand side of the sufficient condition
/// `π²/4 >= x²/(4(1−x)²) · (1 + x/(2(1−x))) / (2 − x/(2(1−x)))` with `x = dγ`.
pub fn sufficient_condition_rhs(x: f64) -> f64 {
    let a = x / (2.0 * (1.0 - x));
    x * x / (4.0 * (1.0 - x).powi(2)) * (1.0 + a) / (2.0 - a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleRoute {
    /// dγ < 2/3: closed-form inequality plus Robin localisation.
    Inequality,
    /// dγ ∈ [2/3, 1): direct root scan of the Bessel cross-product equation.
    BesselScan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleCheck {
    pub gamma: f64,
    pub d_gamma: f64,
    pub route: SampleRoute,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sufficient_condition_rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda01: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location_ok: Option<bool>,
    /// α·ψ₀(d)²/‖ψ₀‖² − α², non-negative when the chain closes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_slack: Option<f64>,
    /// Lowest transverse eigenvalue (Bessel for γ > 0, shooting at γ = 0).
    pub lambda0: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub d: f64,
    pub threshold: f64,
    pub samples: Vec<SampleCheck>,
    pub all_pass: bool,
    pub verdict: String,
    pub note: String,
}

fn check_sample(d: f64, gamma: f64) -> Result<SampleCheck> {
    let thr = threshold(d);
    let x = d * gamma;
    let lambda0 = if gamma > 0.0 {
        bessel_lambda0(d, gamma)?.lambda0
    } else {
        shoot_lambda0(d, gamma)?.lambda0
    };
    if x < 2.0 / 3.0 {
        let rhs = sufficient_condition_rhs(x);
        let alpha = curvature_alpha(d, gamma);
        let lam01 = robin_lambda0(d, alpha)?.lambda0;
        let upper = PI * PI / (d * d);
        let eps = 1e-12 * thr;
        let location_ok = if alpha > 0.0 {
            lam01 > thr && lam01 < upper
        } else {
            (lam01 - thr).abs() <= eps
        };
        let slack = alpha * boundary_ratio(d, alpha, lam01) - alpha * alpha;
        let pass = rhs <= PI * PI / 4.0 && x < 0.8 && location_ok;
        Ok(SampleCheck {
            gamma,
            d_gamma: x,
            route: SampleRoute::Inequality,
            sufficient_condition_rhs: Some(rhs),
            lambda01: Some(lam01),
            location_ok: Some(location_ok),
            chain_slack: Some(slack),
            lambda0,
            pass,
        })
    } else {
        Ok(SampleCheck {
            gamma,
            d_gamma: x,
            route: SampleRoute::BesselScan,
            sufficient_condition_rhs: None,
            lambda01: None,
            location_ok: None,
            chain_slack: None,
            lambda0,
            pass: lambda0 >= thr - 1e-9 * thr.max(1.0),
        })
    }
}

/// Pointwise certificate that the lowest transverse eigenvalue is at least
/// `π²/4d²` for every sampled curvature value `γ >= 0`, which rules out
/// discrete spectrum below the threshold when it holds for all `s`.
pub fn nonexistence_certificate(d: f64, gamma_samples: &[f64]) -> Result<CertificateReport> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Argument(format!("d must be positive, got {d}")));
    }
    if let Some(g) = gamma_samples.iter().find(|g| !(**g >= 0.0)) {
        return Err(Error::Argument(format!(
            "certificate needs gamma >= 0 everywhere, found sample {g}"
        )));
    }
    if let Some(g) = gamma_samples.iter().find(|g| d * **g >= 1.0) {
        return Err(Error::Domain(format!("d * gamma = {} >= 1", d * g)));
    }
    let samples = gamma_samples
        .par_iter()
        .map(|&g| check_sample(d, g))
        .collect::<Result<Vec<_>>>()?;
    let all_pass = samples.iter().all(|s| s.pass);
    Ok(CertificateReport {
        d,
        threshold: threshold(d),
        all_pass,
        verdict: if all_pass {
            "no discrete spectrum below threshold".into()
        } else {
            "certificate failed".into()
        },
        note: "d*gamma in [2/3, 1) is checked by direct root scanning of the Bessel cross-product equation".into(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhs_endpoint_values() {
        assert_eq!(sufficient_condition_rhs(0.0), 0.0);
        assert!((sufficient_condition_rhs(2.0 / 3.0) - 2.0).abs() <= 2.0 * 1e-12);
        assert!(2.0 < PI * PI / 4.0);
    }

    #[test]
    fn rhs_is_increasing() {
        let xs: Vec<f64> = (0..=66).map(|i| i as f64 / 100.0).collect();
        assert!(xs.windows(2).all(|w| sufficient_condition_rhs(w[1]) > sufficient_condition_rhs(w[0])));
    }

    #[test]
    fn unit_width_sweep_passes() {
        let samples: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
        let r = nonexistence_certificate(1.0, &samples).unwrap();
        assert!(r.all_pass, "{r:#?}");
        assert_eq!(r.samples[7].route, SampleRoute::BesselScan);
        for s in &r.samples {
            if let Some(slack) = s.chain_slack {
                assert!(slack >= -1e-14, "{s:?}");
            }
        }
    }

    #[test]
    fn negative_sample_is_rejected() {
        assert!(matches!(nonexistence_certificate(1.0, &[0.1, -0.2]), Err(Error::Argument(_))));
    }
}

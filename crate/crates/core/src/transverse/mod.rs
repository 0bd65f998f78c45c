//! Transverse (cross-section) eigenproblems.
//!
//! For fixed `s` the cross-section operator is
//! `h = −d²/du² + γ/(1 − uγ) d/du` on `[0, d]` with Dirichlet at `u = 0` and
//! Neumann at `u = d`. For `γ > 0` its eigenvalues solve the Bessel
//! cross-product equation; the unitary map `ψ = √(1 − uγ) χ` turns it into a
//! Schrödinger operator with a Robin condition, compared against the pure
//! Robin problem to certify that the lowest transverse eigenvalue stays above
//! `π²/4d²`.

pub mod bessel;
mod certificate;
mod robin;
mod shooting;

pub use certificate::{nonexistence_certificate, sufficient_condition_rhs, CertificateReport, SampleCheck, SampleRoute};
pub use robin::{boundary_ratio, curvature_alpha, lemma_gap_bound, robin_lambda0};
pub use shooting::{shoot_h, shoot_h_tilde, shoot_lambda0, shoot_robin, ShootingProblem};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::roots::{bisect, first_sign_change, newton_polish};

use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    RobinTangent,
    BesselCrossproduct,
    Shooting,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::RobinTangent => "robin_tangent",
            Method::BesselCrossproduct => "bessel_crossproduct",
            Method::Shooting => "shooting",
        }
    }
}

/// Lowest transverse eigenvalue with the residual of its defining equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransverseEigen {
    pub lambda0: f64,
    pub method: Method,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode_samples: Option<Vec<f64>>,
}

impl TransverseEigen {
    pub fn new(lambda0: f64, method: Method, residual: f64) -> Self {
        TransverseEigen {
            lambda0,
            method,
            residual,
            mode_samples: None,
        }
    }
}

/// Lowest eigenvalue of `h` for `0 < dγ < 1` from
/// `J₀(ν)Y₁(ν(1 − dγ)) − Y₀(ν)J₁(ν(1 − dγ)) = 0`, `λ = (νγ)²`.
///
/// The ν axis is scanned with step `0.05·π/(dγ)` (a twentieth of the
/// asymptotic root spacing) from near zero; the first bracket is refined by
/// 80 bisections and 5 guarded Newton steps.
pub fn bessel_lambda0(d: f64, gamma: f64) -> Result<TransverseEigen> {
    if !(d > 0.0) || !d.is_finite() || !gamma.is_finite() {
        return Err(Error::Argument(format!("invalid (d, gamma) = ({d}, {gamma})")));
    }
    if gamma <= 0.0 {
        return Err(Error::Unsupported(
            "the Bessel cross-product route needs gamma > 0; use shoot_lambda0".into(),
        ));
    }
    let dg = d * gamma;
    if dg >= 1.0 {
        return Err(Error::Domain(format!("d * gamma = {dg} >= 1")));
    }
    let r = 1.0 - dg;
    let spacing = PI / dg;
    let step = 0.05 * spacing;
    let f = |nu: f64| bessel::cross_product(nu, r);
    let nu_max = 2.0 * PI / dg;
    let Some((a, b)) = first_sign_change(f, 0.5 * step, nu_max + step, step) else {
        return Err(Error::Search(format!(
            "no root of the cross-product equation below nu = {nu_max} (d = {d}, gamma = {gamma})"
        )));
    };
    let (lo, hi) = bisect(f, a, b, 80);
    let nu = newton_polish(f, |x| bessel::cross_product_derivative(x, r), 0.5 * (lo + hi), a, b, 5);
    Ok(TransverseEigen::new((nu * gamma).powi(2), Method::BesselCrossproduct, f(nu).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_straight_limit() {
        let e = bessel_lambda0(1.0, 1e-8).unwrap();
        assert!((e.lambda0 / (PI * PI / 4.0) - 1.0).abs() < 1e-6, "{}", e.lambda0);
    }

    #[test]
    fn bessel_matches_shooting() {
        let b = bessel_lambda0(1.0, 0.5).unwrap();
        let s = shoot_lambda0(1.0, 0.5).unwrap();
        assert!((b.lambda0 / s.lambda0 - 1.0).abs() < 1e-8, "{} vs {}", b.lambda0, s.lambda0);
        assert!(b.residual <= 1e-10);
    }

    #[test]
    fn bessel_rejects_bad_inputs() {
        assert!(matches!(bessel_lambda0(1.0, -0.2), Err(Error::Unsupported(_))));
        assert!(matches!(bessel_lambda0(1.0, 0.0), Err(Error::Unsupported(_))));
        assert!(matches!(bessel_lambda0(1.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn bessel_above_threshold_in_upper_range() {
        for dg in [2.0 / 3.0, 0.7, 0.8, 0.9, 0.95, 0.99] {
            let e = bessel_lambda0(1.0, dg).unwrap();
            assert!(e.lambda0 >= PI * PI / 4.0, "dg={dg}: {}", e.lambda0);
        }
    }
}

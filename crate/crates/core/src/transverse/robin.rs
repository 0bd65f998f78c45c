//! Lowest eigenvalue of `-ψ'' = λψ` on `[0, d]` with `ψ(0) = 0` and the
//! Robin condition `ψ'(d) + αψ(d) = 0`, and the comparison bound between two
//! Robin coefficients.

use super::{Method, TransverseEigen};
use crate::error::{Error, Result};
use crate::numerics::roots::{bisect, newton_polish};

use std::f64::consts::PI;

/// Closed-form lowest Robin eigenvalue.
///
/// For `1 + αd > 0` the root of `x cos x + αd sin x = 0` on `(0, π)` with
/// `x = √λ d`; `λ = 0` when `1 + αd = 0`; otherwise `λ = -κ²` from
/// `κd coth(κd) = -αd`.
pub fn robin_lambda0(d: f64, alpha: f64) -> Result<TransverseEigen> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Argument(format!("d must be positive, got {d}")));
    }
    if !alpha.is_finite() {
        return Err(Error::Argument("alpha must be finite".into()));
    }
    let ad = alpha * d;
    let balance = 1.0 + ad;
    if balance == 0.0 {
        return Ok(TransverseEigen::new(0.0, Method::RobinTangent, 0.0));
    }
    if balance > 0.0 {
        // Normalised so that the residual is scale free in α.
        let g = |x: f64| (x * x.cos() + ad * x.sin()) / (x + ad.abs());
        let dg = |x: f64| {
            let num = x * x.cos() + ad * x.sin();
            let dnum = x.cos() - x * x.sin() + ad * x.cos();
            (dnum * (x + ad.abs()) - num) / (x + ad.abs()).powi(2)
        };
        let (lo, hi) = if alpha > 0.0 {
            (0.5 * PI, PI)
        } else if alpha < 0.0 {
            (0.0, 0.5 * PI)
        } else {
            let x = 0.5 * PI;
            return Ok(TransverseEigen::new((x / d).powi(2), Method::RobinTangent, g(x).abs()));
        };
        // g(0+) has the sign of 1 + αd > 0 and g(π) < 0.
        let lo = if lo == 0.0 { 1e-300 } else { lo };
        let (a, b) = bisect(g, lo, hi, 200);
        let x = newton_polish(g, dg, 0.5 * (a + b), a.min(b), a.max(b), 5);
        return Ok(TransverseEigen::new((x / d).powi(2), Method::RobinTangent, g(x).abs()));
    }
    // y coth y = -αd > 1
    let target = -ad;
    let h = |y: f64| y / y.tanh() - target;
    let (a, b) = bisect(h, 1e-12, target + 1.0, 200);
    let y = 0.5 * (a + b);
    let residual = (y * y.cosh() + ad * y.sinh()).abs() / (y.cosh() * (y + target));
    Ok(TransverseEigen::new(-(y / d).powi(2), Method::RobinTangent, residual))
}

/// `ψ₀(d)²/‖ψ₀‖²` for the lowest Robin mode, via `2λ / (d(α² + λ) + α)`.
/// Near `λ = 0` the closed form degenerates and its series `3/d (1 - 2λd²/15)` is used.
pub fn boundary_ratio(d: f64, alpha: f64, lambda: f64) -> f64 {
    let t = lambda * d * d;
    if t.abs() < 1e-4 {
        return 3.0 / d * (1.0 - 2.0 * t / 15.0 + t * t / 175.0);
    }
    2.0 * lambda / (d * (alpha * alpha + lambda) + alpha)
}

/// Right-hand side of the Robin comparison bound
/// `λ₀(α₂) <= λ₀(α₁) + (α₂ − α₁) ψ₀(d)²/‖ψ₀‖²` for `α₁ >= α₂`.
pub fn lemma_gap_bound(d: f64, alpha1: f64, alpha2: f64) -> Result<f64> {
    if alpha1 < alpha2 {
        return Err(Error::Argument(format!(
            "lemma requires alpha1 >= alpha2, got {alpha1} < {alpha2}"
        )));
    }
    let lam1 = robin_lambda0(d, alpha1)?.lambda0;
    Ok(lam1 + (alpha2 - alpha1) * boundary_ratio(d, alpha1, lam1))
}

/// Robin coefficient of the transformed transverse operator, `γ / (2(1 − dγ))`.
pub fn curvature_alpha(d: f64, gamma: f64) -> f64 {
    gamma / (2.0 * (1.0 - d * gamma))
}

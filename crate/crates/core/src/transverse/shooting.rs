//! Shooting solver for the lowest eigenvalue of a transverse Sturm-Liouville
//! problem on `[0, d]` with a Dirichlet condition at `u = 0`.

use super::{Method, TransverseEigen};
use crate::error::{Error, Result};
use crate::numerics::ode::{dopri5, Tolerance};
use crate::numerics::roots::first_sign_change;

use std::f64::consts::PI;

/// `y'' = b(u) y' + (c(u) − λ) y` with `y(0) = 0`, `y'(0) = 1`; the eigenvalue
/// condition at `u = d` is `y'(d) + α y(d) = 0`.
pub struct ShootingProblem<'a> {
    pub d: f64,
    pub alpha: f64,
    pub drift: &'a dyn Fn(f64) -> f64,
    pub potential: &'a dyn Fn(f64) -> f64,
    /// Lower bound for the spectrum; scanning starts here.
    pub lambda_floor: f64,
    pub tol: Tolerance,
}

impl ShootingProblem<'_> {
    fn endpoint(&self, lambda: f64) -> Option<[f64; 2]> {
        let rhs = |u: f64, y: &[f64; 2]| [y[1], (self.drift)(u) * y[1] + ((self.potential)(u) - lambda) * y[0]];
        dopri5(rhs, 0.0, self.d, [0.0, 1.0], self.tol).map(|o| o.y)
    }

    /// Miss function normalised by the size of the end state.
    pub fn miss(&self, lambda: f64) -> f64 {
        match self.endpoint(lambda) {
            Some([y, dy]) => {
                let scale = y.abs() * (lambda.abs().sqrt() + 1.0 / self.d + self.alpha.abs()) + dy.abs();
                (dy + self.alpha * y) / scale
            }
            None => f64::NAN,
        }
    }

    /// Scans `√(λ − floor)` in steps of `π/(20d)` up to `λ = floor + 4π²/d²`
    /// for the first sign change, then bisects to relative width 1e-15.
    pub fn lowest(&self) -> Result<TransverseEigen> {
        let kmax = 2.0 * PI / self.d;
        let step = PI / (20.0 * self.d);
        let floor = self.lambda_floor;
        let Some((ka, kb)) = first_sign_change(|k| self.miss(floor + k * k), 0.0, kmax, step) else {
            return Err(Error::Search(format!(
                "no sign change of the shooting miss function for lambda in [{floor}, {}] (d = {}, alpha = {})",
                floor + kmax * kmax,
                self.d,
                self.alpha
            )));
        };
        let (mut a, mut b) = (floor + ka * ka, floor + kb * kb);
        let mut fa = self.miss(a);
        for _ in 0..200 {
            if (b - a).abs() <= 1e-15 * a.abs().max(b.abs()).max(1e-300) {
                break;
            }
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = self.miss(m);
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if (fm < 0.0) == (fa < 0.0) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        let lambda = 0.5 * (a + b);
        Ok(TransverseEigen::new(lambda, Method::Shooting, self.miss(lambda).abs()))
    }
}

fn check_gamma(d: f64, gamma: f64) -> Result<()> {
    if !(d > 0.0) || !d.is_finite() || !gamma.is_finite() {
        return Err(Error::Argument(format!("invalid (d, gamma) = ({d}, {gamma})")));
    }
    if d * gamma.max(0.0) >= 1.0 {
        return Err(Error::Domain(format!("d * gamma = {} >= 1", d * gamma)));
    }
    Ok(())
}

/// Lowest eigenvalue of `h = −d²/du² + γ/(1 − uγ) d/du` with `χ(0) = 0`, `χ'(d) = 0`.
pub fn shoot_h(d: f64, gamma: f64) -> Result<TransverseEigen> {
    check_gamma(d, gamma)?;
    let drift = move |u: f64| gamma / (1.0 - u * gamma);
    let zero = |_: f64| 0.0;
    ShootingProblem {
        d,
        alpha: 0.0,
        drift: &drift,
        potential: &zero,
        lambda_floor: 0.0,
        tol: Tolerance::default(),
    }
    .lowest()
}

/// Lowest eigenvalue of the unitarily equivalent form
/// `h̃ = −d²/du² − γ²/(4(1 − uγ)²)` with `ψ(0) = 0`, `ψ'(d) + γ/(2(1 − dγ)) ψ(d) = 0`.
pub fn shoot_h_tilde(d: f64, gamma: f64) -> Result<TransverseEigen> {
    check_gamma(d, gamma)?;
    let alpha = super::robin::curvature_alpha(d, gamma);
    let potential = move |u: f64| -gamma * gamma / (4.0 * (1.0 - u * gamma).powi(2));
    let zero = |_: f64| 0.0;
    let vmin = potential(0.0).min(potential(d));
    ShootingProblem {
        d,
        alpha,
        drift: &zero,
        potential: &potential,
        lambda_floor: vmin - alpha.min(0.0).powi(2) - 1.0,
        tol: Tolerance::default(),
    }
    .lowest()
}

/// Shooting value of the lowest transverse eigenvalue for curvature `γ`,
/// computed in both the original and transformed formulations; errors if
/// they disagree by more than 1e-9 relative.
pub fn shoot_lambda0(d: f64, gamma: f64) -> Result<TransverseEigen> {
    let direct = shoot_h(d, gamma)?;
    let transformed = shoot_h_tilde(d, gamma)?;
    let rel = (direct.lambda0 - transformed.lambda0).abs() / direct.lambda0.abs().max(1e-300);
    if rel > 1e-9 {
        return Err(Error::Search(format!(
            "h and h~ formulations disagree: {} vs {} (rel {rel:e})",
            direct.lambda0, transformed.lambda0
        )));
    }
    Ok(direct)
}

/// Lowest eigenvalue of `−ψ'' + V ψ` with `ψ(0) = 0`, `ψ'(d) + αψ(d) = 0`
/// for a bounded potential sampled to find its minimum.
pub fn shoot_robin(d: f64, alpha: f64, potential: &dyn Fn(f64) -> f64) -> Result<TransverseEigen> {
    if !(d > 0.0) {
        return Err(Error::Argument(format!("d must be positive, got {d}")));
    }
    let vmin = (0..=400).map(|i| potential(d * i as f64 / 400.0)).fold(f64::INFINITY, f64::min);
    let zero = |_: f64| 0.0;
    ShootingProblem {
        d,
        alpha,
        drift: &zero,
        potential,
        lambda_floor: vmin - alpha.min(0.0).powi(2) - 1.0,
        tol: Tolerance::default(),
    }
    .lowest()
}

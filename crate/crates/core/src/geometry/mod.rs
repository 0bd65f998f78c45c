//! Curvature profiles, strips built on them, and reconstruction of the
//! physical reference curve.
//!
//! The strip is parametrized by arc length `s` along the reference curve Γ
//! and the normal distance `u ∈ (0, d)`, with `N = (-Γ̇₂, Γ̇₁)`. The spectral
//! problem only depends on `(γ, d)`; the planar curve is derived output.

mod curve;
mod intersect;
mod profile;

pub use curve::{reconstruct_curve, CurveSample, PlanarCurve};
pub use intersect::{sweep, IntersectionStatus, SweepReport};
pub use profile::{CurvatureProfile, ProfileSpec, POLY_BUMP_MASS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Near-miss band of the self-intersection sweep.
pub const NEAR_MISS_BAND: f64 = 1e-9;

/// π²/(4d²), the bottom of the essential spectrum of an asymptotically
/// straight Dirichlet-Neumann strip of width `d`.
pub fn threshold(d: f64) -> f64 {
    std::f64::consts::PI.powi(2) / (4.0 * d * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub metric_positive: bool,
    /// min over the strip of 1 - uγ(s), i.e. 1 - d·gamma_plus.
    pub min_metric: f64,
    pub non_self_intersecting: IntersectionStatus,
    pub crossings: usize,
    pub near_misses: usize,
    pub range: (f64, f64),
    pub resolution: f64,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.metric_positive && self.non_self_intersecting != IntersectionStatus::Crossing
    }
}

/// A strip of width `d` over a curvature profile.
#[derive(Debug, Clone)]
pub struct StripGeometry {
    pub d: f64,
    pub profile: CurvatureProfile,
    pub threshold: f64,
    pub valid: ValidityReport,
}

impl StripGeometry {
    pub fn new(d: f64, profile: CurvatureProfile) -> Result<Self> {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Argument(format!("strip width d must be positive, got {d}")));
        }
        let range = default_range(d, &profile);
        let resolution = (0.05 * d).min(0.01);
        let valid = validate_range(d, &profile, range, resolution)?;
        Ok(StripGeometry {
            d,
            threshold: threshold(d),
            profile,
            valid,
        })
    }

    /// Metric factor 1 - uγ(s).
    pub fn metric(&self, s: f64, u: f64) -> f64 {
        1.0 - u * self.profile.gamma(s)
    }

    pub fn min_metric(&self) -> f64 {
        1.0 - self.d * self.profile.gamma_plus
    }

    /// Errors unless the metric factor is positive and no edge crossing was found.
    pub fn require_valid(&self) -> Result<()> {
        if !self.valid.metric_positive {
            return Err(Error::Metric(format!(
                "d * gamma_plus = {} >= 1",
                self.d * self.profile.gamma_plus
            )));
        }
        if self.valid.non_self_intersecting == IntersectionStatus::Crossing {
            return Err(Error::Domain(format!(
                "strip edges self-intersect ({} crossings)",
                self.valid.crossings
            )));
        }
        Ok(())
    }
}

fn default_range(d: f64, profile: &CurvatureProfile) -> (f64, f64) {
    let pad = 2.0 + 12.0 * d;
    let (a, b) = profile.window;
    let (lo, hi) = profile.domain();
    ((a - pad).max(lo), (b + pad).min(hi))
}

/// Validity of a strip over the default reporting range.
pub fn validate_strip(g: &StripGeometry) -> ValidityReport {
    g.valid
}

/// Checks d·gamma_plus < 1 and runs the self-intersection sweep over both
/// edges sampled on `range` at `min(step, 0.05 d)`.
pub fn validate_range(d: f64, profile: &CurvatureProfile, range: (f64, f64), step: f64) -> Result<ValidityReport> {
    let min_metric = 1.0 - d * profile.gamma_plus;
    let resolution = step.min(0.05 * d);
    let curve = reconstruct_curve(profile, range, resolution)?;
    let inner: Vec<(f64, f64)> = curve.samples.iter().map(|p| (p.x, p.y)).collect();
    let outer: Vec<(f64, f64)> = curve.samples.iter().map(|p| p.offset(d)).collect();
    let sweep = sweep(&[inner, outer], NEAR_MISS_BAND);
    Ok(ValidityReport {
        metric_positive: min_metric > 0.0,
        min_metric,
        non_self_intersecting: sweep.status,
        crossings: sweep.crossings,
        near_misses: sweep.near_misses,
        range,
        resolution,
    })
}

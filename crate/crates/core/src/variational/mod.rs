//! Explicit trial functions `Φ(s, u) = √(2/d)·φ(s)·sin(πu/2d)` for the
//! functional `q[Φ] = q₀(Φ, Φ) − (π²/4d²)‖Φ‖²` and the closed-form bounds
//! that accompany them. A negative `q` proves that the spectrum starts
//! below the threshold, independently of any eigensolver.

mod certify;
pub mod envelope;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ProfileSpec, StripGeometry};
use crate::numerics::quadrature::{integrate, integrate_with_breaks};

pub use certify::{certify, Certificate, CertificateSample, Norms};
pub use envelope::{Envelope, Flank};

pub const DEFAULT_TAIL_WIDTH: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialKind {
    Prop1,
    Prop2,
    Counterexample,
}

impl TrialKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TrialKind::Prop1 => "prop1",
            TrialKind::Prop2 => "prop2",
            TrialKind::Counterexample => "counterexample",
        }
    }
}

impl std::str::FromStr for TrialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prop1" => Ok(TrialKind::Prop1),
            "prop2" => Ok(TrialKind::Prop2),
            "counterexample" => Ok(TrialKind::Counterexample),
            other => Err(Error::Argument(format!(
                "unknown trial kind `{other}` (expected prop1, prop2 or counterexample)"
            ))),
        }
    }
}

/// Parameters of one trial function.
///
/// `prop1`/`prop2`: plateau `[center − s0, center + s0]` with externally
/// scaled tails; `prop2` multiplies the plateau by `1 − εγ`.
/// `counterexample`: plateau `[s1, s2]`, a scaled tail on the left and a
/// cubic ramp down to zero at `s3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub kind: TrialKind,
    pub s0: f64,
    #[serde(default)]
    pub center: f64,
    pub sigma: f64,
    #[serde(default)]
    pub epsilon: f64,
    pub tail_width: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 3]>,
}

impl TrialSpec {
    pub fn prop1(s0: f64, sigma: f64) -> Self {
        TrialSpec {
            kind: TrialKind::Prop1,
            s0,
            center: 0.0,
            sigma,
            epsilon: 0.0,
            tail_width: DEFAULT_TAIL_WIDTH,
            window: None,
        }
    }

    pub fn prop2(s0: f64, sigma: f64, epsilon: f64) -> Self {
        TrialSpec {
            kind: TrialKind::Prop2,
            epsilon,
            ..Self::prop1(s0, sigma)
        }
    }

    pub fn counterexample(s1: f64, s2: f64, s3: f64, sigma: f64) -> Self {
        TrialSpec {
            kind: TrialKind::Counterexample,
            s0: 0.5 * (s2 - s1),
            center: 0.5 * (s1 + s2),
            sigma,
            epsilon: 0.0,
            tail_width: DEFAULT_TAIL_WIDTH,
            window: Some([s1, s2, s3]),
        }
    }

    pub fn centered_at(self, center: f64) -> Self {
        let shift = center - self.center;
        TrialSpec {
            center,
            window: self.window.map(|w| w.map(|x| x + shift)),
            ..self
        }
    }

    pub fn check(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma <= 1.0) {
            return Err(Error::Argument(format!("sigma must lie in (0, 1], got {}", self.sigma)));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Argument(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if !(self.s0 > 0.0) || !self.center.is_finite() || !(self.tail_width > 0.0) {
            return Err(Error::Argument("trial needs s0 > 0, finite center, tail_width > 0".into()));
        }
        if self.kind == TrialKind::Counterexample {
            match self.window {
                Some([s1, s2, s3]) if s1 < s2 && s2 < s3 => {}
                _ => return Err(Error::Argument("counterexample trial needs s1 < s2 < s3".into())),
            }
        }
        Ok(())
    }

    pub fn envelope(&self) -> Envelope {
        let tail = Flank::Tail {
            width: self.tail_width,
            sigma: self.sigma,
        };
        match (self.kind, self.window) {
            (TrialKind::Counterexample, Some([s1, s2, s3])) => Envelope {
                a: s1,
                b: s2,
                left: tail,
                right: Flank::Ramp { length: s3 - s2 },
            },
            _ => Envelope {
                a: self.center - self.s0,
                b: self.center + self.s0,
                left: tail,
                right: tail,
            },
        }
    }
}

/// The trial envelope with the `prop2` deformation applied.
#[derive(Debug, Clone)]
pub struct TrialFunction<'a> {
    g: &'a StripGeometry,
    spec: TrialSpec,
    env: Envelope,
}

impl<'a> TrialFunction<'a> {
    pub fn new(g: &'a StripGeometry, spec: TrialSpec) -> Result<Self> {
        spec.check()?;
        Ok(TrialFunction {
            g,
            spec,
            env: spec.envelope(),
        })
    }

    pub fn envelope(&self) -> &Envelope {
        &self.env
    }

    fn deformed(&self, s: f64) -> bool {
        self.spec.kind == TrialKind::Prop2 && s >= self.env.a && s <= self.env.b
    }

    /// φ(s)
    pub fn phi(&self, s: f64) -> f64 {
        if self.deformed(s) {
            1.0 - self.spec.epsilon * self.g.profile.gamma(s)
        } else {
            self.env.value(s)
        }
    }

    /// φ̇(s)
    pub fn phi_dot(&self, s: f64) -> f64 {
        if self.deformed(s) {
            -self.spec.epsilon * self.g.profile.gamma_dot(s)
        } else {
            self.env.derivative(s)
        }
    }

    /// Φ(s, u)
    pub fn value(&self, s: f64, u: f64) -> f64 {
        (2.0 / self.g.d).sqrt() * self.phi(s) * (PI * u / (2.0 * self.g.d)).sin()
    }

    /// Integration interval and break points in `s`.
    fn layout(&self) -> Result<((f64, f64), Vec<f64>)> {
        let (lo, hi) = self.env.extent();
        if !(lo.is_finite() && hi.is_finite()) || hi - lo > 1e12 {
            return Err(Error::Argument(format!("trial support [{lo}, {hi}] overflows the quadrature window")));
        }
        let (dlo, dhi) = self.g.profile.domain();
        if lo < dlo || hi > dhi {
            return Err(Error::Domain(format!(
                "trial support [{lo}, {hi}] leaves the profile's tabulated range"
            )));
        }
        let mut breaks = self.env.breaks();
        breaks.extend(self.g.profile.breaks());
        Ok(((lo, hi), breaks))
    }
}

/// Result of the 2D quadrature of `q[Φ]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QValue {
    pub q: f64,
    /// Nested-rule error estimate.
    pub error: f64,
    /// `‖Φ‖²` with weight `1 − uγ`.
    pub weighted_norm_sq: f64,
}

impl QValue {
    /// Upper bound on the bottom of the spectrum implied by this trial.
    pub fn spectral_upper_bound(&self, threshold: f64) -> f64 {
        threshold + self.q / self.weighted_norm_sq
    }
}

/// `q[Φ]` by adaptive quadrature in `u` nested in adaptive quadrature in `s`.
pub fn eval_q(g: &StripGeometry, t: &TrialSpec) -> Result<QValue> {
    g.require_valid()?;
    let trial = TrialFunction::new(g, *t)?;
    let ((lo, hi), breaks) = trial.layout()?;
    let d = g.d;
    let thr = g.threshold;
    let inner = |s: f64, norm: bool| -> f64 {
        let gamma = g.profile.gamma(s);
        let phi = trial.phi(s);
        if norm {
            return integrate(
                |u| (2.0 / d) * phi * phi * (PI * u / (2.0 * d)).sin().powi(2) * (1.0 - u * gamma),
                0.0,
                d,
                1e-15,
                1e-14,
            )
            .value;
        }
        let dphi = trial.phi_dot(s);
        integrate(
            |u| {
                let w = 1.0 - u * gamma;
                (2.0 / d)
                    * (dphi * dphi * (PI * u / (2.0 * d)).sin().powi(2) / w + thr * w * phi * phi * (PI * u / d).cos())
            },
            0.0,
            d,
            1e-15,
            1e-14,
        )
        .value
    };
    let q = integrate_with_breaks(|s| inner(s, false), lo, hi, &breaks, 1e-11, 1e-13);
    let norm = integrate_with_breaks(|s| inner(s, true), lo, hi, &breaks, 1e-11, 1e-13);
    Ok(QValue {
        q: q.value,
        error: q.error,
        weighted_norm_sq: norm.value,
    })
}

/// Checks γ ≤ 0 outside the plateau on a fine sample of the profile window.
fn nonpositive_outside(g: &StripGeometry, a: f64, b: f64) -> bool {
    let (wa, wb) = g.profile.window;
    let n = 4000;
    (0..=n).all(|i| {
        let s = wa + (wb - wa) * i as f64 / n as f64;
        (s >= a && s <= b) || g.profile.gamma(s) <= 0.0
    })
}

/// `σ‖φ̇‖²/(1 − dγ₊) + (1/d)∫_{plateau} γ` for the `prop1` trial.
pub fn prop1_bound(g: &StripGeometry, t: &TrialSpec) -> Result<f64> {
    t.check()?;
    if t.kind != TrialKind::Prop1 {
        return Err(Error::Inapplicable(format!("prop1 bound requested for a {} trial", t.kind.as_str())));
    }
    let env = t.envelope();
    if !nonpositive_outside(g, env.a, env.b) {
        return Err(Error::Inapplicable("curvature is positive somewhere outside the plateau".into()));
    }
    let unscaled = envelope::tail_energy(t.tail_width) * 2.0;
    Ok(t.sigma * unscaled / g.min_metric() + g.profile.integral_over(env.a, env.b) / g.d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prop2Bound {
    pub value: f64,
    pub optimal_epsilon: f64,
    /// Largest σ making the bound negative at `optimal_epsilon`; zero if none.
    pub sigma_for_negative: f64,
    pub gamma_l2_sq: f64,
    pub gamma_dot_l2_sq: f64,
    pub gamma_l3_cubed: f64,
    pub phi_dot_sq: f64,
}

/// `σ‖φ̇‖² + ε²‖γ̇‖²/(1 − dγ₊) + ε²‖γ‖³_{L³}/d − 2ε‖γ‖²/d` and its minimizing ε.
pub fn prop2_bound(g: &StripGeometry, t: &TrialSpec) -> Result<Prop2Bound> {
    t.check()?;
    if t.kind != TrialKind::Prop2 {
        return Err(Error::Inapplicable(format!("prop2 bound requested for a {} trial", t.kind.as_str())));
    }
    let p = &g.profile;
    if matches!(p.spec(), ProfileSpec::Zero) || !p.is_compact() {
        return Err(Error::Inapplicable("prop2 needs a non-zero, compactly supported curvature".into()));
    }
    let (a, b) = (t.center - t.s0, t.center + t.s0);
    if p.support.0 < a - 1e-12 || p.support.1 > b + 1e-12 {
        return Err(Error::Inapplicable(format!(
            "curvature support [{}, {}] exceeds the plateau [{a}, {b}]",
            p.support.0, p.support.1
        )));
    }
    let l2 = p.l2_norm_sq();
    if !(l2 > 0.0) {
        return Err(Error::Inapplicable("curvature has zero L2 norm".into()));
    }
    let total = p.total_bending()?;
    if total.abs() > 1e-10 * (1.0 + l2.sqrt()) {
        return Err(Error::Inapplicable(format!("total bending is {total:e}, not zero")));
    }
    let l3 = p.l3_norm_cubed();
    let dot = p.derivative_l2_norm_sq();
    let phi_dot_sq = 2.0 * envelope::tail_energy(t.tail_width);
    let quad = dot / g.min_metric() + l3 / g.d;
    let lin = 2.0 * l2 / g.d;
    let eps = t.epsilon;
    let value = t.sigma * phi_dot_sq + eps * eps * quad - eps * lin;
    let optimal_epsilon = (l2 / g.d) / quad;
    let best = -optimal_epsilon * optimal_epsilon * quad;
    Ok(Prop2Bound {
        value,
        optimal_epsilon,
        sigma_for_negative: (-best / phi_dot_sq).max(0.0),
        gamma_l2_sq: l2,
        gamma_dot_l2_sq: dot,
        gamma_l3_cubed: l3,
        phi_dot_sq,
    })
}

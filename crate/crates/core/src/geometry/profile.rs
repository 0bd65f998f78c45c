use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::quadrature::integrate_with_breaks;
use crate::numerics::roots::golden_max;

/// ∫_{-1}^{1} (1 - x²)² dx
pub const POLY_BUMP_MASS: f64 = 16.0 / 15.0;

// max |x (1 - x²)²| on [-1, 1] is attained at x = 1/√5.
fn s_bend_scale() -> f64 {
    25.0 * 5f64.sqrt() / 16.0
}

/// Declarative description of a curvature profile, as it appears in
/// scenario files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    /// γ ≡ 0.
    Zero,
    /// γ(s) = a·exp(-(s - center)² / 2w²).
    GaussianBump {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
    /// γ(s) = -c·(1 - (s/s0)²)² on |s| < s0, zero outside.
    PolyBump { c: f64, s0: f64 },
    /// Odd profile γ(s) = a·k·x(1 - x²)², x = s/s0, scaled so max |γ| = a.
    SBend { amplitude: f64, s0: f64 },
    /// Two polynomial bumps of prescribed signed areas on (s1, s2) and (s3, s4).
    TwoBump {
        s1: f64,
        s2: f64,
        area1: f64,
        s3: f64,
        s4: f64,
        area2: f64,
    },
    /// C¹ cubic Hermite interpolation of tabulated values.
    Tabulated {
        s: Vec<f64>,
        gamma: Vec<f64>,
        #[serde(default)]
        zero_tail: bool,
    },
}

impl ProfileSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ProfileSpec::Zero => "zero",
            ProfileSpec::GaussianBump { .. } => "gaussian_bump",
            ProfileSpec::PolyBump { .. } => "poly_bump",
            ProfileSpec::SBend { .. } => "s_bend",
            ProfileSpec::TwoBump { .. } => "two_bump",
            ProfileSpec::Tabulated { .. } => "tabulated",
        }
    }
}

/// A validated signed-curvature profile γ(s) with its bounds
/// `-gamma_minus <= γ <= gamma_plus`.
#[derive(Debug, Clone)]
pub struct CurvatureProfile {
    spec: ProfileSpec,
    /// Closure of the set where γ may be non-zero; infinite for Gaussian tails.
    pub support: (f64, f64),
    /// Finite window outside of which |γ| is negligible (exactly zero for compact families).
    pub window: (f64, f64),
    pub gamma_minus: f64,
    pub gamma_plus: f64,
    slopes: Vec<f64>,
}

impl CurvatureProfile {
    pub fn new(spec: ProfileSpec) -> Result<Self> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Argument(format!("{name} must be finite")))
            }
        };
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Argument(format!("{name} must be positive, got {v}")))
            }
        };
        let mut slopes = Vec::new();
        let (support, window) = match &spec {
            ProfileSpec::Zero => ((0.0, 0.0), (0.0, 0.0)),
            ProfileSpec::GaussianBump {
                amplitude,
                width,
                center,
            } => {
                finite("amplitude", *amplitude)?;
                finite("center", *center)?;
                positive("width", *width)?;
                (
                    (f64::NEG_INFINITY, f64::INFINITY),
                    (center - 12.0 * width, center + 12.0 * width),
                )
            }
            ProfileSpec::PolyBump { c, s0 } => {
                finite("c", *c)?;
                positive("s0", *s0)?;
                ((-s0, *s0), (-s0, *s0))
            }
            ProfileSpec::SBend { amplitude, s0 } => {
                finite("amplitude", *amplitude)?;
                positive("s0", *s0)?;
                ((-s0, *s0), (-s0, *s0))
            }
            ProfileSpec::TwoBump {
                s1,
                s2,
                area1,
                s3,
                s4,
                area2,
            } => {
                for (n, v) in [("s1", s1), ("s2", s2), ("s3", s3), ("s4", s4), ("area1", area1), ("area2", area2)] {
                    finite(n, *v)?;
                }
                if !(s1 < s2 && s2 <= s3 && s3 < s4) {
                    return Err(Error::Argument("two_bump requires s1 < s2 <= s3 < s4".into()));
                }
                ((*s1, *s4), (*s1, *s4))
            }
            ProfileSpec::Tabulated { s, gamma, zero_tail } => {
                if s.len() < 2 || s.len() != gamma.len() {
                    return Err(Error::Argument(
                        "tabulated profile needs at least two points and equal-length s/gamma".into(),
                    ));
                }
                if s.iter().chain(gamma).any(|v| !v.is_finite()) {
                    return Err(Error::Argument("tabulated values must be finite".into()));
                }
                if s.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::Argument("tabulated s must be strictly increasing".into()));
                }
                if *zero_tail && (gamma[0] != 0.0 || gamma[gamma.len() - 1] != 0.0) {
                    return Err(Error::Argument(
                        "zero_tail requires gamma to vanish at both table ends".into(),
                    ));
                }
                slopes = hermite_slopes(s, gamma, *zero_tail);
                let range = (s[0], s[s.len() - 1]);
                (range, range)
            }
        };
        let mut profile = CurvatureProfile {
            spec,
            support,
            window,
            gamma_minus: 0.0,
            gamma_plus: 0.0,
            slopes,
        };
        let (lo, hi) = profile.extrema();
        profile.gamma_plus = if hi > 0.0 { hi + 1e-12 } else { 0.0 };
        profile.gamma_minus = if lo < 0.0 { -lo + 1e-12 } else { 0.0 };
        Ok(profile)
    }

    pub fn zero() -> Self {
        Self::new(ProfileSpec::Zero).expect("zero profile is valid")
    }

    pub fn spec(&self) -> &ProfileSpec {
        &self.spec
    }

    pub fn kind_name(&self) -> &'static str {
        self.spec.kind_name()
    }

    /// True when γ vanishes identically outside a bounded interval.
    pub fn is_compact(&self) -> bool {
        self.support.0.is_finite() && self.support.1.is_finite() && !self.has_restricted_domain()
    }

    /// A tabulated profile without zero tails is only defined on its table.
    pub fn has_restricted_domain(&self) -> bool {
        matches!(self.spec, ProfileSpec::Tabulated { zero_tail: false, .. })
    }

    /// Interval on which queries are admissible.
    pub fn domain(&self) -> (f64, f64) {
        if self.has_restricted_domain() {
            self.support
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        }
    }

    /// Largest |s| touched by the (numerical) support window.
    pub fn support_radius(&self) -> f64 {
        self.window.0.abs().max(self.window.1.abs())
    }

    /// Points where γ is only C¹ (or support ends); used to split quadratures.
    pub fn breaks(&self) -> Vec<f64> {
        match &self.spec {
            ProfileSpec::Zero => vec![],
            ProfileSpec::GaussianBump { center, width, .. } => {
                vec![center - 4.0 * width, *center, center + 4.0 * width]
            }
            ProfileSpec::PolyBump { s0, .. } | ProfileSpec::SBend { s0, .. } => vec![-s0, 0.0, *s0],
            ProfileSpec::TwoBump { s1, s2, s3, s4, .. } => vec![*s1, *s2, *s3, *s4],
            ProfileSpec::Tabulated { s, .. } => s.clone(),
        }
    }

    /// γ(s) and γ̇(s).
    pub fn eval(&self, s: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.domain();
        if s < lo || s > hi || s.is_nan() {
            return Err(Error::Domain(format!(
                "s = {s} outside tabulated range [{lo}, {hi}] without zero tail"
            )));
        }
        Ok(self.eval_unchecked(s))
    }

    /// γ(s); outside a restricted table domain the end value is held.
    pub fn gamma(&self, s: f64) -> f64 {
        self.eval_unchecked(s).0
    }

    pub fn gamma_dot(&self, s: f64) -> f64 {
        self.eval_unchecked(s).1
    }

    fn eval_unchecked(&self, s: f64) -> (f64, f64) {
        match &self.spec {
            ProfileSpec::Zero => (0.0, 0.0),
            ProfileSpec::GaussianBump {
                amplitude,
                width,
                center,
            } => {
                let z = (s - center) / width;
                let g = amplitude * (-0.5 * z * z).exp();
                (g, -g * z / width)
            }
            ProfileSpec::PolyBump { c, s0 } => {
                let x = s / s0;
                if x.abs() >= 1.0 {
                    return (0.0, 0.0);
                }
                let w = 1.0 - x * x;
                (-c * w * w, 4.0 * c * x * w / s0)
            }
            ProfileSpec::SBend { amplitude, s0 } => {
                let x = s / s0;
                if x.abs() >= 1.0 {
                    return (0.0, 0.0);
                }
                let w = 1.0 - x * x;
                let k = amplitude * s_bend_scale();
                (k * x * w * w, k * w * (1.0 - 5.0 * x * x) / s0)
            }
            ProfileSpec::TwoBump {
                s1,
                s2,
                area1,
                s3,
                s4,
                area2,
            } => {
                let (g1, d1) = area_bump(s, *s1, *s2, *area1);
                let (g2, d2) = area_bump(s, *s3, *s4, *area2);
                (g1 + g2, d1 + d2)
            }
            ProfileSpec::Tabulated { s: xs, gamma, zero_tail } => {
                let n = xs.len();
                if s <= xs[0] || s >= xs[n - 1] {
                    if *zero_tail {
                        return (0.0, 0.0);
                    }
                    let v = if s <= xs[0] { gamma[0] } else { gamma[n - 1] };
                    return (v, 0.0);
                }
                let i = xs.partition_point(|&x| x <= s) - 1;
                hermite(xs[i], xs[i + 1], gamma[i], gamma[i + 1], self.slopes[i], self.slopes[i + 1], s)
            }
        }
    }

    /// Signed area of γ over [a, b] by adaptive quadrature.
    pub fn integral_over(&self, a: f64, b: f64) -> f64 {
        integrate_with_breaks(|s| self.gamma(s), a, b, &self.breaks(), 1e-13, 1e-14).value
    }

    /// Total bending ∫_ℝ γ ds.
    pub fn total_bending(&self) -> Result<f64> {
        if self.has_restricted_domain() {
            return Err(Error::Domain(
                "tabulated profile without zero tail has non-integrable tails".into(),
            ));
        }
        if let ProfileSpec::Zero = self.spec {
            return Ok(0.0);
        }
        Ok(self.integral_over(self.window.0, self.window.1))
    }

    fn norm_integral<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        if let ProfileSpec::Zero = self.spec {
            return 0.0;
        }
        integrate_with_breaks(f, self.window.0, self.window.1, &self.breaks(), 1e-14, 1e-13).value
    }

    /// ‖γ‖²_{L²}
    pub fn l2_norm_sq(&self) -> f64 {
        self.norm_integral(|s| self.gamma(s).powi(2))
    }

    /// ‖γ‖³_{L³}
    pub fn l3_norm_cubed(&self) -> f64 {
        self.norm_integral(|s| self.gamma(s).abs().powi(3))
    }

    /// ‖γ̇‖²_{L²}
    pub fn derivative_l2_norm_sq(&self) -> f64 {
        self.norm_integral(|s| self.gamma_dot(s).powi(2))
    }

    /// Smallest and largest value of γ: dense sampling plus golden-section
    /// refinement, or exact cubic extrema for tables.
    fn extrema(&self) -> (f64, f64) {
        match &self.spec {
            ProfileSpec::Zero => (0.0, 0.0),
            ProfileSpec::Tabulated { s, gamma, .. } => {
                let mut lo = gamma.iter().copied().fold(f64::INFINITY, f64::min);
                let mut hi = gamma.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                for i in 0..s.len() - 1 {
                    for t in hermite_critical_points(s[i], s[i + 1], gamma[i], gamma[i + 1], self.slopes[i], self.slopes[i + 1]) {
                        let v = self.gamma(t);
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                }
                (lo, hi)
            }
            _ => {
                let (a, b) = self.window;
                let n = 4000;
                let h = (b - a) / n as f64;
                let xs: Vec<f64> = (0..=n).map(|i| a + h * i as f64).collect();
                let vs: Vec<f64> = xs.iter().map(|&x| self.gamma(x)).collect();
                let mut lo = vs.iter().copied().fold(0.0f64, f64::min);
                let mut hi = vs.iter().copied().fold(0.0f64, f64::max);
                for i in 1..n {
                    if vs[i] >= vs[i - 1] && vs[i] >= vs[i + 1] && vs[i] > 0.0 {
                        let (_, v) = golden_max(|x| self.gamma(x), xs[i - 1], xs[i + 1], 1e-12);
                        hi = hi.max(v);
                    }
                    if vs[i] <= vs[i - 1] && vs[i] <= vs[i + 1] && vs[i] < 0.0 {
                        let (_, v) = golden_max(|x| -self.gamma(x), xs[i - 1], xs[i + 1], 1e-12);
                        lo = lo.min(-v);
                    }
                }
                (lo, hi)
            }
        }
    }
}

fn area_bump(s: f64, left: f64, right: f64, area: f64) -> (f64, f64) {
    let hw = 0.5 * (right - left);
    let x = (s - 0.5 * (left + right)) / hw;
    if x.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let amp = area / (POLY_BUMP_MASS * hw);
    let w = 1.0 - x * x;
    (amp * w * w, -4.0 * amp * x * w / hw)
}

fn hermite_slopes(s: &[f64], g: &[f64], zero_tail: bool) -> Vec<f64> {
    let n = s.len();
    let delta: Vec<f64> = (0..n - 1).map(|i| (g[i + 1] - g[i]) / (s[i + 1] - s[i])).collect();
    let mut m = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = s[i] - s[i - 1];
        let h1 = s[i + 1] - s[i];
        m[i] = (h1 * delta[i - 1] + h0 * delta[i]) / (h0 + h1);
    }
    if !zero_tail {
        m[0] = delta[0];
        m[n - 1] = delta[n - 2];
    }
    m
}

fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, m0: f64, m1: f64, s: f64) -> (f64, f64) {
    let h = x1 - x0;
    let t = (s - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let value = h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
    let d00 = 6.0 * t2 - 6.0 * t;
    let d10 = 3.0 * t2 - 4.0 * t + 1.0;
    let d01 = -6.0 * t2 + 6.0 * t;
    let d11 = 3.0 * t2 - 2.0 * t;
    let deriv = (d00 * y0 + d10 * h * m0 + d01 * y1 + d11 * h * m1) / h;
    (value, deriv)
}

/// Interior critical points of a Hermite cubic segment.
fn hermite_critical_points(x0: f64, x1: f64, y0: f64, y1: f64, m0: f64, m1: f64) -> Vec<f64> {
    let h = x1 - x0;
    // derivative in t: a t² + b t + c
    let a = 6.0 * y0 + 3.0 * h * m0 - 6.0 * y1 + 3.0 * h * m1;
    let b = -6.0 * y0 - 4.0 * h * m0 + 6.0 * y1 - 2.0 * h * m1;
    let c = h * m0;
    let mut ts = Vec::new();
    if a.abs() < 1e-300 {
        if b != 0.0 {
            ts.push(-c / b);
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let r = disc.sqrt();
            ts.push((-b - r) / (2.0 * a));
            ts.push((-b + r) / (2.0 * a));
        }
    }
    ts.into_iter()
        .filter(|t| *t > 0.0 && *t < 1.0)
        .map(|t| x0 + t * h)
        .collect()
}

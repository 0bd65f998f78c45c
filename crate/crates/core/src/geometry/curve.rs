use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::CurvatureProfile;
use crate::error::{Error, Result};
use crate::numerics::ode::rk4_step;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveSample {
    pub s: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub gamma: f64,
}

impl CurveSample {
    /// Point Γ(s) + u·N(s) with N = (-sin θ, cos θ).
    pub fn offset(&self, u: f64) -> (f64, f64) {
        (self.x - u * self.theta.sin(), self.y + u * self.theta.cos())
    }
}

/// Arc-length parametrized reference curve reconstructed from γ.
#[derive(Debug, Clone)]
pub struct PlanarCurve {
    pub samples: Vec<CurveSample>,
    pub step: f64,
}

impl PlanarCurve {
    pub fn last(&self) -> &CurveSample {
        self.samples.last().expect("curve has at least one sample")
    }

    /// Largest deviation of |Γ̇| = |(cos θ, sin θ)| from one.
    pub fn speed_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|p| (p.theta.cos().hypot(p.theta.sin()) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.samples {
            w.serialize(p)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// Integrates θ̇ = γ, Γ̇ = (cos θ, sin θ) with classical RK4 from Γ(s_a) = 0,
/// θ(s_a) = 0. The final step is shortened to land on `s_b`.
pub fn reconstruct_curve(profile: &CurvatureProfile, range: (f64, f64), step: f64) -> Result<PlanarCurve> {
    let (sa, sb) = range;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Argument(format!("step must be positive, got {step}")));
    }
    if !(sb >= sa) {
        return Err(Error::Argument("curve range must satisfy s_a <= s_b".into()));
    }
    let rhs = |s: f64, y: &[f64; 3]| [profile.gamma(s), y[0].cos(), y[0].sin()];
    let n = ((sb - sa) / step).ceil().max(0.0) as usize;
    let mut samples = Vec::with_capacity(n + 1);
    let mut state = [0.0, 0.0, 0.0];
    let mut s = sa;
    samples.push(CurveSample {
        s,
        x: 0.0,
        y: 0.0,
        theta: 0.0,
        gamma: profile.gamma(s),
    });
    for i in 0..n {
        let next = if i + 1 == n { sb } else { sa + (i + 1) as f64 * step };
        state = rk4_step(&rhs, s, &state, next - s);
        s = next;
        samples.push(CurveSample {
            s,
            x: state[1],
            y: state[2],
            theta: state[0],
            gamma: profile.gamma(s),
        });
    }
    Ok(PlanarCurve { samples, step })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ProfileSpec;

    #[test]
    fn straight_line() {
        let c = reconstruct_curve(&CurvatureProfile::zero(), (0.0, 5.0), 0.1).unwrap();
        let end = c.last();
        assert!((end.x - 5.0).abs() < 1e-12 && end.y.abs() < 1e-14 && end.theta == 0.0);
    }

    #[test]
    fn constant_curvature_closes_circle() {
        let k = 0.5;
        let len = 2.0 * std::f64::consts::PI / k;
        let p = CurvatureProfile::new(ProfileSpec::Tabulated {
            s: vec![0.0, len],
            gamma: vec![k, k],
            zero_tail: false,
        })
        .unwrap();
        let c = reconstruct_curve(&p, (0.0, len), 0.01).unwrap();
        let end = c.last();
        assert!(end.x.hypot(end.y) < 1e-6);
        // every point sits at distance 1/k from the center (0, 1/k)
        for q in &c.samples {
            assert!((q.x.hypot(q.y - 1.0 / k) - 1.0 / k).abs() < 1e-8);
        }
    }

    #[test]
    fn final_angle_is_total_bending() {
        let p = CurvatureProfile::new(ProfileSpec::PolyBump { c: 0.3, s0: 2.0 }).unwrap();
        let c = reconstruct_curve(&p, (-3.0, 3.0), 0.01).unwrap();
        assert!((c.last().theta - p.total_bending().unwrap()).abs() < 1e-8);
        assert!((c.last().theta + 0.64).abs() < 1e-8);
        assert!(c.speed_defect() < 1e-15);
    }

    #[test]
    fn csv_header() {
        let c = reconstruct_curve(&CurvatureProfile::zero(), (0.0, 1.0), 0.5).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("s,x,y,theta,gamma\n"));
        assert_eq!(text.lines().count(), 4);
    }
}

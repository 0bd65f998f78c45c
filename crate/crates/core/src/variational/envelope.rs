//! Longitudinal envelopes: a plateau equal to one, with decaying flanks.

use crate::numerics::quadrature::integrate_with_breaks;

/// Tail `exp(−t³/(w²(t + w)))`: C² against the plateau, Gaussian for large `t`.
pub fn tail(t: f64, w: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    (-(t * t * t) / (w * w * (t + w))).exp()
}

pub fn tail_derivative(t: f64, w: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let den = w * (t + w);
    -tail(t, w) * t * t * (2.0 * t + 3.0 * w) / (den * den)
}

/// Beyond this distance the tail is below `e^{-90}`.
pub fn tail_cutoff(w: f64) -> f64 {
    10.0 * w
}

/// C¹ cubic ramp from 1 at `t = 0` to 0 at `t = len`.
pub fn ramp(t: f64, len: f64) -> f64 {
    let x = (t / len).clamp(0.0, 1.0);
    1.0 - x * x * (3.0 - 2.0 * x)
}

pub fn ramp_derivative(t: f64, len: f64) -> f64 {
    let x = t / len;
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    6.0 * x * (x - 1.0) / len
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Flank {
    /// Scaled tail `tail(σ t, w)`.
    Tail { width: f64, sigma: f64 },
    Ramp { length: f64 },
}

impl Flank {
    fn value(&self, t: f64) -> f64 {
        match *self {
            Flank::Tail { width, sigma } => tail(sigma * t, width),
            Flank::Ramp { length } => ramp(t, length),
        }
    }

    /// d/dt of the flank as a function of the distance from the plateau.
    fn slope(&self, t: f64) -> f64 {
        match *self {
            Flank::Tail { width, sigma } => sigma * tail_derivative(sigma * t, width),
            Flank::Ramp { length } => ramp_derivative(t, length),
        }
    }

    pub fn reach(&self) -> f64 {
        match *self {
            Flank::Tail { width, sigma } => tail_cutoff(width) / sigma,
            Flank::Ramp { length } => length,
        }
    }

    /// ∫ |slope|² over the flank.
    pub fn energy(&self) -> f64 {
        match *self {
            Flank::Tail { width, sigma } => sigma * tail_energy(width),
            Flank::Ramp { length } => 1.2 / length,
        }
    }
}

/// ∫₀^∞ |tail'(t)|² dt for width `w`.
pub fn tail_energy(w: f64) -> f64 {
    let cut = tail_cutoff(w);
    integrate_with_breaks(|t| tail_derivative(t, w).powi(2), 0.0, cut, &[w, 2.0 * w, 4.0 * w], 1e-15, 1e-14).value
}

/// φ with φ = 1 on `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub a: f64,
    pub b: f64,
    pub left: Flank,
    pub right: Flank,
}

impl Envelope {
    pub fn value(&self, s: f64) -> f64 {
        if s < self.a {
            self.left.value(self.a - s)
        } else if s > self.b {
            self.right.value(s - self.b)
        } else {
            1.0
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        if s < self.a {
            -self.left.slope(self.a - s)
        } else if s > self.b {
            self.right.slope(s - self.b)
        } else {
            0.0
        }
    }

    /// Interval outside of which φ is negligible (tails) or zero (ramps).
    pub fn extent(&self) -> (f64, f64) {
        (self.a - self.left.reach(), self.b + self.right.reach())
    }

    pub fn breaks(&self) -> Vec<f64> {
        let (lo, hi) = self.extent();
        let mut v = vec![lo, self.a, self.b, hi];
        for (flank, edge, dir) in [(self.left, self.a, -1.0), (self.right, self.b, 1.0)] {
            if let Flank::Tail { width, sigma } = flank {
                for k in [0.5, 1.0, 2.0, 4.0] {
                    v.push(edge + dir * k * width / sigma);
                }
            }
        }
        v
    }

    /// ‖φ̇‖²
    pub fn derivative_energy(&self) -> f64 {
        self.left.energy() + self.right.energy()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_is_c2_at_the_junction_and_decays() {
        let w = 1.0;
        let h = 1e-4;
        assert_eq!(tail(0.0, w), 1.0);
        assert!(tail_derivative(h, w).abs() < 1e-7);
        let second = (tail_derivative(2.0 * h, w) - tail_derivative(h, w)) / h;
        assert!(second.abs() < 1e-3);
        assert!(tail(tail_cutoff(w), w) < 1e-39);
        let fd = (tail(1.3 + 1e-6, w) - tail(1.3 - 1e-6, w)) / 2e-6;
        assert!((fd - tail_derivative(1.3, w)).abs() < 1e-8);
    }

    #[test]
    fn scaling_multiplies_energy_by_sigma() {
        let e1 = Envelope {
            a: -1.0,
            b: 1.0,
            left: Flank::Tail { width: 1.0, sigma: 1.0 },
            right: Flank::Tail { width: 1.0, sigma: 1.0 },
        };
        let q = |env: &Envelope| {
            let (lo, hi) = env.extent();
            integrate_with_breaks(|s| env.derivative(s).powi(2), lo, hi, &env.breaks(), 1e-15, 1e-13).value
        };
        assert!((q(&e1) - e1.derivative_energy()).abs() < 1e-12);
        let sigma = 1e-3;
        let e2 = Envelope {
            left: Flank::Tail { width: 1.0, sigma },
            right: Flank::Tail { width: 1.0, sigma },
            ..e1
        };
        assert!((q(&e2) - sigma * q(&e1)).abs() < 1e-12);
    }

    #[test]
    fn ramp_energy_closed_form() {
        let len = 2.0;
        let num = integrate_with_breaks(|t| ramp_derivative(t, len).powi(2), 0.0, len, &[], 1e-15, 1e-14).value;
        assert!((num - 0.6).abs() < 1e-14);
        assert_eq!(ramp(0.0, len), 1.0);
        assert_eq!(ramp(len, len), 0.0);
    }
}

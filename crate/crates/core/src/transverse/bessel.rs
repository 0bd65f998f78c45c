//! Bessel functions of orders 0 and 1 and the annular cross-product
//! `J₀(ν)Y₁(νr) − Y₀(ν)J₁(νr)`.
//!
//! Function values come from the `libm` port of the FreeBSD/musl routines
//! (rational approximations below 2, Hankel-form expansions above); this
//! module adds derivatives, zero finding and a reference-zero check.

use crate::numerics::roots::{bisect, first_sign_change, newton_polish};

pub fn j0(x: f64) -> f64 {
    libm::j0(x)
}
pub fn j1(x: f64) -> f64 {
    libm::j1(x)
}
pub fn y0(x: f64) -> f64 {
    libm::y0(x)
}
pub fn y1(x: f64) -> f64 {
    libm::y1(x)
}

/// `J₀(ν)Y₁(νr) − Y₀(ν)J₁(νr)`
pub fn cross_product(nu: f64, r: f64) -> f64 {
    j0(nu) * y1(nu * r) - y0(nu) * j1(nu * r)
}

/// d/dν of [`cross_product`].
pub fn cross_product_derivative(nu: f64, r: f64) -> f64 {
    let x = nu * r;
    let dy1 = y0(x) - y1(x) / x;
    let dj1 = j0(x) - j1(x) / x;
    -j1(nu) * y1(x) + r * j0(nu) * dy1 + y1(nu) * j1(x) - r * y0(nu) * dj1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselKind {
    J0,
    J1,
    Y0,
    Y1,
}

impl BesselKind {
    pub const ALL: [BesselKind; 4] = [BesselKind::J0, BesselKind::J1, BesselKind::Y0, BesselKind::Y1];

    pub fn eval(self, x: f64) -> f64 {
        match self {
            BesselKind::J0 => j0(x),
            BesselKind::J1 => j1(x),
            BesselKind::Y0 => y0(x),
            BesselKind::Y1 => y1(x),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BesselKind::J0 => "J0",
            BesselKind::J1 => "J1",
            BesselKind::Y0 => "Y0",
            BesselKind::Y1 => "Y1",
        }
    }
}

/// Published first three positive zeros of J₀, J₁, Y₀, Y₁ (Abramowitz & Stegun, table 9.5).
pub const REFERENCE_ZEROS: [[f64; 3]; 4] = [
    [2.404_825_557_695_773, 5.520_078_110_286_311, 8.653_727_912_911_013],
    [3.831_705_970_207_512, 7.015_586_669_815_619, 10.173_468_135_062_722],
    [0.893_576_966_279_167_5, 3.957_678_419_314_858, 7.086_051_060_301_773],
    [2.197_141_326_031_017, 5.429_681_040_794_135, 8.596_005_868_331_169],
];

/// First `count` positive zeros of the given function, located by scanning
/// with step 0.05 and refining by bisection plus Newton.
pub fn zeros(kind: BesselKind, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    let mut start = 0.05;
    while out.len() < count {
        let Some((a, b)) = first_sign_change(|x| kind.eval(x), start, start + 100.0, 0.05) else {
            break;
        };
        let (lo, hi) = bisect(|x| kind.eval(x), a, b, 80);
        let deriv = |x: f64| match kind {
            BesselKind::J0 => -j1(x),
            BesselKind::Y0 => -y1(x),
            BesselKind::J1 => j0(x) - j1(x) / x,
            BesselKind::Y1 => y0(x) - y1(x) / x,
        };
        let x = newton_polish(|x| kind.eval(x), deriv, 0.5 * (lo + hi), a, b, 5);
        out.push(x);
        start = b;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroCheck {
    pub kind: &'static str,
    pub index: usize,
    pub computed: f64,
    pub reference: f64,
    pub rel_error: f64,
    pub pass: bool,
}

/// Compares computed zeros against a reference table at relative tolerance `tol`.
pub fn check_zeros(reference: &[[f64; 3]; 4], tol: f64) -> Vec<ZeroCheck> {
    let mut out = Vec::new();
    for (kind, refs) in BesselKind::ALL.iter().zip(reference) {
        let z = zeros(*kind, 3);
        for (i, r) in refs.iter().enumerate() {
            let computed = z.get(i).copied().unwrap_or(f64::NAN);
            let rel_error = ((computed - r) / r).abs();
            out.push(ZeroCheck {
                kind: kind.name(),
                index: i + 1,
                computed,
                reference: *r,
                rel_error,
                pass: rel_error <= tol,
            });
        }
    }
    out
}

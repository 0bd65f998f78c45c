//! Scalar root bracketing, bisection and extremum refinement.

/// Bisection on a sign-changing bracket `[a, b]` for at most `iters` halvings.
/// Returns the final bracket.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let mut fa = f(a);
    for _ in 0..iters {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return (m, m);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    (a, b)
}

/// Guarded Newton polish inside `[lo, hi]`: a step that leaves the bracket
/// is rejected and the current iterate kept.
pub fn newton_polish<F, D>(f: F, df: D, mut x: f64, lo: f64, hi: f64, steps: usize) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    for _ in 0..steps {
        let fx = f(x);
        let dfx = df(x);
        if fx == 0.0 || dfx == 0.0 || !dfx.is_finite() {
            break;
        }
        let next = x - fx / dfx;
        if !(next >= lo && next <= hi) {
            break;
        }
        if f(next).abs() > fx.abs() {
            break;
        }
        x = next;
    }
    x
}

/// Scans `[start, end]` with the given step and returns the first
/// sub-interval on which `f` changes sign (or hits zero).
pub fn first_sign_change<F: FnMut(f64) -> f64>(mut f: F, start: f64, end: f64, step: f64) -> Option<(f64, f64)> {
    let mut a = start;
    let mut fa = f(a);
    if fa == 0.0 {
        return Some((a, a));
    }
    while a < end {
        let b = (a + step).min(end);
        let fb = f(b);
        if fb == 0.0 || (fb < 0.0) != (fa < 0.0) {
            return Some((a, b));
        }
        a = b;
        fa = fb;
    }
    None
}

/// Golden-section search for a local maximum of `f` on `[a, b]`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let candidates = [(a, f(a)), (b, f(b)), (c, fc), (d, fd)];
    candidates
        .into_iter()
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_and_newton_find_sqrt2() {
        let (a, b) = bisect(|x| x * x - 2.0, 0.0, 2.0, 40);
        let x = newton_polish(|x| x * x - 2.0, |x| 2.0 * x, 0.5 * (a + b), a.min(b), a.max(b), 5);
        assert!((x - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn scan_finds_first_bracket() {
        let br = first_sign_change(|x: f64| x.sin(), 0.5, 10.0, 0.1).unwrap();
        assert!(br.0 <= std::f64::consts::PI && br.1 >= std::f64::consts::PI);
        assert!(first_sign_change(|x: f64| x * x + 1.0, 0.0, 5.0, 0.1).is_none());
    }

    #[test]
    fn golden_locates_peak() {
        let (x, v) = golden_max(|x: f64| -(x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7 && (v - 1.0).abs() < 1e-12);
    }
}

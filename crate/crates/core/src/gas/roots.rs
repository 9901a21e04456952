//! Bracketing bisection followed by a secant/Newton polish.

/// Root of a monotone `f` on `[lo, hi]`. Returns `None` without a sign change.
pub(crate) fn bracketed_root<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return None;
    }
    let (a, b) = (lo, hi);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    // Newton polish with a central-difference slope, kept inside the bracket
    let mut x = 0.5 * (lo + hi);
    for _ in 0..8 {
        let fx = f(x);
        if fx == 0.0 {
            break;
        }
        let h = 1e-7 * (1.0 + x.abs());
        let slope = (f(x + h) - f(x - h)) / (2.0 * h);
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        let next = x - fx / slope;
        if !(next >= a && next <= b) || f(next).abs() >= fx.abs() {
            break;
        }
        x = next;
    }
    Some(x)
}

//! Pointwise flux kernels in the x direction. The y direction reuses them
//! by swapping the two momentum components on the way in and out.

use super::Limiter;

pub(crate) type Q = [f64; 4];

#[inline]
pub(crate) fn swap(q: Q) -> Q {
    [q[0], q[2], q[1], q[3]]
}

#[inline]
pub(crate) fn primitive(q: &Q, gamma: f64) -> Q {
    let rho = q[0];
    let u = q[1] / rho;
    let v = q[2] / rho;
    let p = (gamma - 1.0) * (q[3] - 0.5 * rho * (u * u + v * v));
    [rho, u, v, p]
}

#[inline]
pub(crate) fn conserved(w: &Q, gamma: f64) -> Q {
    let e = w[3] / (gamma - 1.0) + 0.5 * w[0] * (w[1] * w[1] + w[2] * w[2]);
    [w[0], w[0] * w[1], w[0] * w[2], e]
}

#[inline]
fn flux_of_primitive(w: &Q, gamma: f64) -> Q {
    let (rho, u, v, p) = (w[0], w[1], w[2], w[3]);
    let e = p / (gamma - 1.0) + 0.5 * rho * (u * u + v * v);
    [rho * u, rho * u * u + p, rho * u * v, u * (e + p)]
}

#[inline]
pub(crate) fn physical_flux(q: &Q, gamma: f64) -> Q {
    flux_of_primitive(&primitive(q, gamma), gamma)
}

/// Steger-Warming split flux: `plus` keeps the nonnegative eigenvalues.
pub(crate) fn steger_warming(q: &Q, gamma: f64, plus: bool) -> Q {
    let w = primitive(q, gamma);
    let (rho, u, v, p) = (w[0], w[1], w[2], w[3]);
    let c = (gamma * p / rho).sqrt();
    let pick = |l: f64| if plus { 0.5 * (l + l.abs()) } else { 0.5 * (l - l.abs()) };
    let (l1, l2, l4) = (pick(u - c), pick(u), pick(u + c));
    let g1 = gamma - 1.0;
    let k = rho / (2.0 * gamma);
    let q2 = u * u + v * v;
    [
        k * (2.0 * g1 * l2 + l1 + l4),
        k * (2.0 * g1 * l2 * u + l1 * (u - c) + l4 * (u + c)),
        k * (2.0 * g1 * l2 + l1 + l4) * v,
        k * (g1 * l2 * q2
            + 0.5 * l1 * ((u - c) * (u - c) + v * v)
            + 0.5 * l4 * ((u + c) * (u + c) + v * v)
            + (3.0 - gamma) / (2.0 * g1) * (l1 + l4) * c * c),
    ]
}

/// First-order upwind face flux by flux-vector splitting.
#[inline]
pub(crate) fn split_flux(left: &Q, right: &Q, gamma: f64) -> Q {
    let a = steger_warming(left, gamma, true);
    let b = steger_warming(right, gamma, false);
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

/// HLLC flux between primitive states with Davis wave-speed bounds.
pub(crate) fn hllc(wl: &Q, wr: &Q, gamma: f64) -> Q {
    let cl = (gamma * wl[3] / wl[0]).sqrt();
    let cr = (gamma * wr[3] / wr[0]).sqrt();
    let sl = (wl[1] - cl).min(wr[1] - cr);
    let sr = (wl[1] + cl).max(wr[1] + cr);
    if sl >= 0.0 {
        return flux_of_primitive(wl, gamma);
    }
    if sr <= 0.0 {
        return flux_of_primitive(wr, gamma);
    }
    let (ml, mr) = (wl[0] * (sl - wl[1]), wr[0] * (sr - wr[1]));
    let s_star = (wr[3] - wl[3] + wl[1] * ml - wr[1] * mr) / (ml - mr);
    let star = |w: &Q, s: f64, m: f64| -> (Q, Q) {
        let q = conserved(w, gamma);
        let f = flux_of_primitive(w, gamma);
        let factor = m / (s - s_star);
        let e = q[3] / w[0] + (s_star - w[1]) * (s_star + w[3] / m);
        let qs = [factor, factor * s_star, factor * w[2], factor * e];
        (
            [
                f[0] + s * (qs[0] - q[0]),
                f[1] + s * (qs[1] - q[1]),
                f[2] + s * (qs[2] - q[2]),
                f[3] + s * (qs[3] - q[3]),
            ],
            qs,
        )
    };
    if s_star >= 0.0 {
        star(wl, sl, ml).0
    } else {
        star(wr, sr, mr).0
    }
}

#[inline]
fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

#[inline]
fn van_leer(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

#[inline]
pub(crate) fn limited_slope(limiter: Limiter, a: f64, b: f64) -> f64 {
    match limiter {
        Limiter::Minmod => minmod(a, b),
        Limiter::VanLeer => van_leer(a, b),
    }
}

/// MUSCL face states from four consecutive primitive cells `w[0..4]`
/// straddling the face between `w[1]` and `w[2]`. Falls back to the cell
/// values if the reconstruction would lose positivity.
pub(crate) fn muscl_states(w: [&Q; 4], limiter: Limiter) -> (Q, Q) {
    let mut l = *w[1];
    let mut r = *w[2];
    for c in 0..4 {
        l[c] += 0.5 * limited_slope(limiter, w[1][c] - w[0][c], w[2][c] - w[1][c]);
        r[c] -= 0.5 * limited_slope(limiter, w[2][c] - w[1][c], w[3][c] - w[2][c]);
    }
    if l[0] > 0.0 && l[3] > 0.0 && r[0] > 0.0 && r[3] > 0.0 {
        (l, r)
    } else {
        (*w[1], *w[2])
    }
}

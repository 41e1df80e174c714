//! One-dimensional kernels: golden-section search and bisection.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_STEPS: usize = 400;

/// Golden-section minimization of a convex `f` on `[lo, hi]`.
///
/// Returns `(argmin, min)`. Ties between equal values go to the smaller argument.
pub fn minimize_convex_1d<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::invalid("golden-section bracket must be finite with lo <= hi"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let mut eval = |t: f64| -> Result<f64> {
        let v = f(t);
        if v.is_finite() { Ok(v) } else { Err(Error::NonFinite("objective of 1-d minimization")) }
    };
    let mut best = (lo, eval(lo)?);
    let consider = |t: f64, v: f64, best: &mut (f64, f64)| {
        if v < best.1 || (v == best.1 && t < best.0) {
            *best = (t, v);
        }
    };
    let fhi = eval(hi)?;
    consider(hi, fhi, &mut best);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    consider(c, fc, &mut best);
    consider(d, fd, &mut best);
    for _ in 0..MAX_STEPS {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
            consider(c, fc, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
            consider(d, fd, &mut best);
        }
        if c >= d {
            break;
        }
    }
    Ok(best)
}

/// Root of a monotone `g` on `[lo, hi]` to within `tol`.
///
/// `g` may return infinities; only signs matter.
pub fn bisect_root<F: FnMut(f64) -> f64>(mut g: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::invalid("bisection bracket must be finite with lo <= hi"));
    }
    let (mut a, mut b) = (lo, hi);
    let ga = g(a);
    let gb = g(b);
    if ga.is_nan() || gb.is_nan() {
        return Err(Error::NonFinite("bisection function"));
    }
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    let neg_at_a = ga < 0.0;
    if neg_at_a == (gb < 0.0) {
        return Err(Error::NoSignChange { lo, hi });
    }
    for _ in 0..MAX_STEPS {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let gm = g(mid);
        if gm.is_nan() {
            return Err(Error::NonFinite("bisection function"));
        }
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm < 0.0) == neg_at_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

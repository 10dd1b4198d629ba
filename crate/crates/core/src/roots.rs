//! Bracketing root finders for monotone scalar functions.

use crate::error::{Error, Result};

/// Stopping rule for [`brent`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    /// Absolute tolerance on the abscissa.
    pub xtol: f64,
    /// Relative tolerance on the abscissa.
    pub rtol: f64,
    /// Stop as soon as `|f(x)| <= ftol`.
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { xtol: 1e-14, rtol: 4.0 * f64::EPSILON, ftol: 0.0, max_iter: 200 }
    }
}

/// Brent's method on `[a, b]`; `f(a)` and `f(b)` must not share a sign.
pub fn brent<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::NumericalFailure(format!(
            "root not bracketed on [{a}, {b}]: f(a)={fa}, f(b)={fb}"
        )));
    }

    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * tol.rtol * b.abs() + 0.5 * tol.xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 || fb.abs() <= tol.ftol {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // inverse quadratic interpolation, secant when only two points
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::NumericalFailure(format!(
        "brent did not converge in {} iterations (last x={b}, f={fb})",
        tol.max_iter
    )))
}

/// Grows `[lo, hi]` geometrically upward until `f(lo)` and `f(hi)` differ in
/// sign. `lo` stays fixed; returns the final `hi`.
pub fn expand_upper<F>(mut f: F, lo: f64, mut hi: f64, max_doublings: usize) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let flo = f(lo);
    for _ in 0..max_doublings {
        let fhi = f(hi);
        if flo == 0.0 || fhi == 0.0 || flo.signum() != fhi.signum() {
            return Ok(hi);
        }
        hi = lo + 2.0 * (hi - lo);
    }
    Err(Error::NumericalFailure(format!("could not bracket a root above {lo} (reached {hi})")))
}

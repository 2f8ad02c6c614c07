//! Bracketed scalar root finding.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Brent's method on a bracket `[a, b]` with `f(a)·f(b) ≤ 0`.
pub fn brent<T: Real, F: FnMut(T) -> Result<T>>(mut f: F, a: T, b: T, xtol: T, max_iter: usize) -> Result<T> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidParameter("root is not bracketed".into()));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    let two = T::two();
    for _ in 0..max_iter {
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
        let tol = two * T::epsilon() * b.abs() + T::half() * xtol;
        let m = T::half() * (c - b);
        if m.abs() <= tol || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * m * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * m * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            } else {
                p = -p;
            }
            if two * p < (T::lit(3.0) * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol { b + d } else { b + tol * m.signum() };
        fb = f(b)?;
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let r = brent(|x: f64| Ok(x * x * x - 2.0), 0.0, 3.0, 1e-14, 200).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn rejects_missing_bracket() {
        assert!(brent(|x: f64| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 50).is_err());
    }
}

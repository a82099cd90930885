//! Bracketing and Brent's root finder.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootConfig {
    pub xtol: f64,
    pub max_iter: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            xtol: 1e-12,
            max_iter: 200,
        }
    }
}

/// Finds the first sign change of `f` by doubling from `start` up to `limit`.
///
/// Returns `(lo, hi)` with `f(lo)` and `f(hi)` of opposite sign (or one of
/// them zero). `start` must be positive.
pub fn scan_bracket<F>(f: F, start: f64, limit: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(start > 0.0 && start < limit) {
        return Err(Error::domain(format!(
            "bracket scan needs 0 < start < limit, got start={start}, limit={limit}"
        )));
    }
    let mut lo = start;
    let mut flo = f(lo)?;
    if flo == 0.0 {
        return Ok((lo, lo));
    }
    while lo < limit {
        let hi = (2.0 * lo).min(limit);
        let fhi = f(hi)?;
        if fhi == 0.0 || fhi.signum() != flo.signum() {
            return Ok((lo, hi));
        }
        lo = hi;
        flo = fhi;
    }
    Err(Error::NoBracket {
        lo: start,
        hi: limit,
    })
}

/// Brent's method on a bracket `[a, b]` with `f(a)·f(b) ≤ 0`.
pub fn brent_root<F>(f: F, a: f64, b: f64, cfg: &RootConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket {
            lo: a.min(b),
            hi: a.max(b),
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..cfg.max_iter {
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
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * cfg.xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
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
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::NotConverged {
        what: "brent root".into(),
        iterations: cfg.max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = brent_root(|x| Ok(x * x - 2.0), 0.0, 2.0, &RootConfig::default()).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn coth_fixed_point_against_bisection() {
        let g = |x: f64| 1.0 / x.tanh() - x;
        let (mut lo, mut hi) = (1.0, 2.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = brent_root(|x| Ok(g(x)), 1.0, 2.0, &RootConfig::default()).unwrap();
        assert!((r - lo).abs() < 1e-12);
    }

    #[test]
    fn scan_doubles_until_sign_change() {
        let (lo, hi) = scan_bracket(|x| Ok(x - 3.0), 0.25, 100.0).unwrap();
        assert_eq!((lo, hi), (2.0, 4.0));
        let err = scan_bracket(|x| Ok(x + 1.0), 0.25, 10.0).unwrap_err();
        assert_eq!(err, Error::NoBracket { lo: 0.25, hi: 10.0 });
    }

    #[test]
    fn rejects_non_bracket() {
        let err = brent_root(|x| Ok(x * x + 1.0), -1.0, 1.0, &RootConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NoBracket { .. }));
    }
}

//! Cheeger constant of `Σ ×_f ℝ` from two sides.
//!
//! The upper bound is the best symmetric slab `[−x, x]`, whose quotient
//! `|∂Ω|/|Ω| = f(x)²/∫₀ˣ f²` does not depend on the base. The lower bound
//! comes from the calibration potential `φ` solving `(f²φ′)′ = 2f²`: the
//! divergence theorem gives `2|Ω| ≤ sup|φ′|·|∂Ω|` for every region, hence
//! `h ≥ 2 / sup|φ′|`. For the cosh warp `φ = r·tanh r`, both bounds meet
//! at `2/α` with `α = coth α`.

use std::cell::RefCell;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{brent_root, integrate, scan_bracket, RootConfig};
use crate::warp::WarpedProduct;

/// Unique positive solution of `α = coth α`.
pub fn fuchsian_alpha() -> f64 {
    static ALPHA: OnceLock<f64> = OnceLock::new();
    *ALPHA.get_or_init(|| {
        let cfg = RootConfig {
            xtol: 1e-16,
            max_iter: 200,
        };
        brent_root(|x| Ok(1.0 / x.tanh() - x), 1.0, 2.0, &cfg)
            .expect("coth x - x changes sign on [1, 2]")
    })
}

/// `2/α ≈ 1.66711`, the Cheeger constant of every Fuchsian manifold.
pub fn fuchsian_cheeger_constant() -> f64 {
    2.0 / fuchsian_alpha()
}

/// Perimeter over volume of the symmetric slab `[−x, x]`.
pub fn slab_quotient(m: &WarpedProduct, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("slab half-width must be positive, got {x}")));
    }
    Ok(m.warp.eval(x).powi(2) / m.unit_slab_volume(0.0, x)?)
}

fn phi_prime(m: &WarpedProduct, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * m.unit_slab_volume(0.0, r)? / m.warp.eval(r).powi(2))
}

/// Normalised slab stationarity `(f′/f)·φ′ − 1`, i.e. `A′V/A² − 1` with
/// `A = f²` and `V = ∫₀ˣ f²`. Negative where the slab quotient decreases.
pub fn slab_stationarity(m: &WarpedProduct, x: f64) -> Result<f64> {
    Ok(m.warp.log_derivative(x) * phi_prime(m, x)? - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalSlab {
    pub alpha: f64,
    pub quotient: f64,
    pub stationarity_residual: f64,
}

/// Half-width of the best symmetric slab and its quotient.
///
/// The stationarity condition is bracketed by doubling from `x = 0.25`
/// and solved with Brent's method to `1e−12`.
pub fn optimal_slab(m: &WarpedProduct) -> Result<OptimalSlab> {
    if !m.warp.is_even() {
        return Err(Error::domain("optimal slab search needs an even warp"));
    }
    let window = m.window();
    for k in 1..=200 {
        let r = window * k as f64 / 200.0;
        if !(m.warp.deriv1(r) > 0.0) {
            return Err(Error::domain(format!(
                "optimal slab search needs f' > 0 on (0, {window}], fails at r = {r}"
            )));
        }
    }
    let start = 0.25f64.min(0.5 * window);
    let (lo, hi) = scan_bracket(|x| slab_stationarity(m, x), start, window)?;
    let alpha = if lo == hi {
        lo
    } else {
        brent_root(|x| slab_stationarity(m, x), lo, hi, &RootConfig::default())?
    };
    // the quotient must turn from decreasing to increasing at alpha
    let delta = 1e-6 * alpha.max(1.0);
    let left = slab_stationarity(m, (alpha - delta).max(0.5 * alpha))?;
    let right = slab_stationarity(m, alpha + delta)?;
    if !(left < 0.0 && right > 0.0) {
        return Err(Error::NonCertifiable(format!(
            "stationary slab at {alpha} is not a local minimum ({left:e}, {right:e})"
        )));
    }
    Ok(OptimalSlab {
        alpha,
        quotient: slab_quotient(m, alpha)?,
        stationarity_residual: slab_stationarity(m, alpha)?.abs(),
    })
}

/// `(φ(r), φ′(r))` for the odd solution of `(f²φ′)′ = 2f²`.
pub fn calibration_potential(m: &WarpedProduct, r: f64) -> Result<(f64, f64)> {
    let d = phi_prime(m, r)?;
    if r == 0.0 {
        return Ok((0.0, 0.0));
    }
    let failure = RefCell::new(None);
    let phi = integrate(
        |t| match phi_prime(m, t) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        r,
        m.quadrature(),
    );
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok((phi?.value, d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationMaximum {
    /// Radius where `|φ′|` peaks.
    pub r: f64,
    /// `sup |φ′|` over the working window.
    pub phi_prime: f64,
}

const SCAN_POINTS: usize = 500;

/// Locates `sup |φ′|` over the working window.
///
/// Fails with [`Error::NonCertifiable`] when the supremum sits on the window
/// edge, since then nothing bounds `φ′` beyond it.
pub fn calibration_maximum(m: &WarpedProduct) -> Result<CalibrationMaximum> {
    let window = m.window();
    let mut best: Option<(f64, f64, f64, f64, bool)> = None; // (|φ′|, r, left, right, edge)
    let sides: &[f64] = if m.warp.is_even() { &[1.0] } else { &[1.0, -1.0] };
    for &sign in sides {
        let mut volume = 0.0;
        let mut prev_r = 0.0;
        let mut values = Vec::with_capacity(SCAN_POINTS + 1);
        values.push((0.0, 0.0));
        for k in 1..=SCAN_POINTS {
            let r = sign * window * k as f64 / SCAN_POINTS as f64;
            volume += m.unit_slab_volume(prev_r, r)?;
            prev_r = r;
            values.push((r, (2.0 * volume / m.warp.eval(r).powi(2)).abs()));
        }
        let (idx, &(r, v)) = values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
            .expect("scan is non-empty");
        let left = values[idx.saturating_sub(1)].0;
        let right = values[(idx + 1).min(SCAN_POINTS)].0;
        if best.is_none_or(|b| v > b.0) {
            best = Some((v, r, left, right, idx == SCAN_POINTS));
        }
    }
    let (value, r, left, right, edge) = best.expect("at least one side scanned");
    if edge {
        return Err(Error::NonCertifiable(format!(
            "sup |phi'| = {value} is attained at the window edge r = {r}"
        )));
    }
    // φ″ = 2 − 2(f′/f)φ′ vanishes at the interior extremum
    let second = |t: f64| -> Result<f64> { Ok(2.0 - 2.0 * m.warp.log_derivative(t) * phi_prime(m, t)?) };
    let (a, b) = if left < right { (left, right) } else { (right, left) };
    let refined = match (second(a)?, second(b)?) {
        (sa, sb) if sa.signum() != sb.signum() => {
            let t = brent_root(second, a, b, &RootConfig::default())?;
            let v = phi_prime(m, t)?.abs();
            if v >= value {
                CalibrationMaximum { r: t, phi_prime: v }
            } else {
                CalibrationMaximum { r, phi_prime: value }
            }
        }
        _ => CalibrationMaximum { r, phi_prime: value },
    };
    Ok(refined)
}

/// `2 / sup|φ′|`, valid over all finite-perimeter regions.
pub fn cheeger_lower_bound(m: &WarpedProduct) -> Result<f64> {
    Ok(2.0 / calibration_maximum(m)?.phi_prime)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheegerCertificate {
    pub upper: f64,
    pub lower: f64,
    pub alpha: f64,
    pub sup_phi_prime: f64,
    /// Radius at which the calibration gradient peaks.
    pub sup_at: f64,
    pub gap: f64,
    /// `|A′V/A² − 1|` at `alpha`.
    pub residual: f64,
    pub tol: f64,
    pub certified: bool,
}

pub fn certify(m: &WarpedProduct, tol: f64) -> Result<CheegerCertificate> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let slab = optimal_slab(m)?;
    let max = calibration_maximum(m)?;
    // the calibration peak is at least φ′(alpha) = 2 / quotient
    let sup = max.phi_prime.max(2.0 / slab.quotient);
    let lower = (2.0 / sup).min(slab.quotient);
    let gap = slab.quotient - lower;
    Ok(CheegerCertificate {
        upper: slab.quotient,
        lower,
        alpha: slab.alpha,
        sup_phi_prime: sup,
        sup_at: max.r,
        gap,
        residual: slab.stationarity_residual,
        tol,
        certified: gap <= tol && slab.stationarity_residual <= 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warp::{BaseSurface, WarpFunction};

    /// Bisection on `coth x − x`, independent of Brent.
    fn alpha_by_bisection() -> f64 {
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if 1.0 / mid.tanh() - mid > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn closed_quotient(x: f64) -> f64 {
        x.cosh().powi(2) / (0.5 * (x + x.sinh() * x.cosh()))
    }

    #[test]
    fn alpha_matches_bisection() {
        let a = fuchsian_alpha();
        assert!((a - alpha_by_bisection()).abs() < 1e-15);
        assert!((1.0 / a.tanh() - a).abs() < 1e-12);
        assert!(a > 1.19 && a < 1.21);
        assert!((fuchsian_cheeger_constant() - 1.66711).abs() < 5e-6);
    }

    #[test]
    fn slab_quotient_examples() {
        let m = WarpedProduct::fuchsian(2).unwrap();
        let a = alpha_by_bisection();
        assert!((slab_quotient(&m, a).unwrap() - 2.0 / a).abs() < 1e-10);
        let q1 = slab_quotient(&m, 1.0).unwrap();
        assert!((q1 - closed_quotient(1.0)).abs() < 1e-10);
        assert!((q1 - 1.692_665_303_885_07).abs() < 1e-9);
        let mut prev = 0.0;
        for &x in &[1e-1, 1e-2, 1e-3, 1e-4] {
            let q = slab_quotient(&m, x).unwrap();
            assert!(q > prev && q.is_finite());
            assert!((q * x - 1.0).abs() < 0.05);
            prev = q;
        }
        assert!(slab_quotient(&m, 0.0).is_err());
        assert!(slab_quotient(&m, -1.0).is_err());
    }

    #[test]
    fn slab_quotient_is_unimodal() {
        let m = WarpedProduct::fuchsian(2).unwrap();
        let a = alpha_by_bisection();
        let xs: Vec<f64> = (1..=600).map(|k| 0.01 * k as f64).collect();
        let qs: Vec<f64> = xs.iter().map(|&x| slab_quotient(&m, x).unwrap()).collect();
        for (w, q) in xs.windows(2).zip(qs.windows(2)) {
            if w[1] <= a {
                assert!(q[1] < q[0], "not decreasing at {}", w[1]);
            } else if w[0] >= a {
                assert!(q[1] > q[0], "not increasing at {}", w[0]);
            }
        }
    }

    #[test]
    fn optimal_slab_examples() {
        let m = WarpedProduct::fuchsian(2).unwrap();
        let s = optimal_slab(&m).unwrap();
        let a = alpha_by_bisection();
        assert!((s.alpha - a).abs() < 1e-12);
        assert!((s.alpha - 1.1996786).abs() < 1e-7);
        assert!((s.quotient - 1.66711).abs() < 5e-6);
        assert!((s.quotient * s.alpha - 2.0).abs() < 1e-10);
        assert!((1.0 / s.alpha.tanh() - s.alpha).abs() < 1e-12);
        // ten times the base area: same slab
        let big = WarpedProduct::fuchsian(11).unwrap();
        let sb = optimal_slab(&big).unwrap();
        assert!((sb.alpha - s.alpha).abs() < 1e-15);
        assert!((sb.quotient - s.quotient).abs() < 1e-15);
    }

    #[test]
    fn optimal_slab_rejects_odd_or_flat_warps() {
        let base = BaseSurface::hyperbolic(2).unwrap();
        let e = WarpedProduct::new(base, WarpFunction::exponential()).unwrap();
        assert!(optimal_slab(&e).is_err());
        let flat = WarpedProduct::new(base, WarpFunction::constant()).unwrap();
        assert!(optimal_slab(&flat).is_err());
    }

    #[test]
    fn calibration_potential_examples() {
        let m = WarpedProduct::fuchsian(2).unwrap();
        let (phi, d) = calibration_potential(&m, 1.0).unwrap();
        assert!((phi - 1f64.tanh()).abs() < 1e-9);
        assert!((phi - 0.76159).abs() < 1e-5);
        assert!((d - (1f64.tanh() + 1.0 / 1f64.cosh().powi(2))).abs() < 1e-10);
        assert_eq!(calibration_potential(&m, 0.0).unwrap(), (0.0, 0.0));
        let a = alpha_by_bisection();
        let (_, da) = calibration_potential(&m, a).unwrap();
        assert!((da - a).abs() < 1e-10);
        for &r in &[-2.5, -0.3, 0.7, 4.0] {
            let (phi, _) = calibration_potential(&m, r).unwrap();
            assert!((phi - r * r.tanh()).abs() < 1e-9, "r={r}");
        }
    }

    #[test]
    fn lower_bound_examples() {
        let m = WarpedProduct::fuchsian(2).unwrap();
        let h = 2.0 / alpha_by_bisection();
        assert!((cheeger_lower_bound(&m).unwrap() - h).abs() < 1e-10);
        let narrow =
            WarpedProduct::with_window(BaseSurface::hyperbolic(2).unwrap(), WarpFunction::cosh(), 5.0)
                .unwrap();
        let max = calibration_maximum(&narrow).unwrap();
        assert!((max.r - alpha_by_bisection()).abs() < 1e-8);
        assert!((cheeger_lower_bound(&narrow).unwrap() - h).abs() < 1e-10);
        let base = BaseSurface::hyperbolic(2).unwrap();
        for warp in [WarpFunction::constant(), WarpFunction::exponential()] {
            let m = WarpedProduct::new(base, warp).unwrap();
            assert!(matches!(cheeger_lower_bound(&m), Err(Error::NonCertifiable(_))));
        }
    }

    #[test]
    fn certificate_examples() {
        let m = WarpedProduct::fuchsian(2).unwrap();
        let c = certify(&m, 1e-8).unwrap();
        assert!(c.certified);
        assert!(c.lower <= c.upper);
        assert!((c.upper - 1.66711).abs() < 5e-6 && (c.lower - 1.66711).abs() < 5e-6);
        assert!(c.upper > 0.0 && c.upper < 2.0);
        let tight = certify(&m, 1e-15).unwrap();
        assert!(tight.gap >= 0.0);
        assert_eq!(tight.certified, tight.gap <= 1e-15);
        assert!(certify(&m, 0.0).is_err());
    }

    #[test]
    fn certificate_is_topology_independent() {
        let c2 = certify(&WarpedProduct::fuchsian(2).unwrap(), 1e-8).unwrap();
        for g in [3, 7] {
            let c = certify(&WarpedProduct::fuchsian(g).unwrap(), 1e-8).unwrap();
            assert!((c.upper - c2.upper).abs() < 1e-12);
            assert!((c.lower - c2.lower).abs() < 1e-12);
            assert!((c.alpha - c2.alpha).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_cosh_has_its_own_slab() {
        // f = cosh(c r): substituting s = c·r gives alpha / c and quotient c·2/alpha
        let c = 0.5;
        let m = WarpedProduct::new(
            BaseSurface::hyperbolic(2).unwrap(),
            WarpFunction::cosh_scaled(c).unwrap(),
        )
        .unwrap();
        let s = optimal_slab(&m).unwrap();
        let a = alpha_by_bisection();
        assert!((s.alpha - a / c).abs() < 1e-10);
        assert!((s.quotient - c * 2.0 / a).abs() < 1e-10);
        let cert = certify(&m, 1e-8).unwrap();
        assert!(cert.certified);
    }
}

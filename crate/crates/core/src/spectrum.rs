//! Bottom of the spectrum for radial functions.
//!
//! Radial eigenfunctions of the Laplacian on `Σ ×_f ℝ` solve the
//! Sturm–Liouville problem `−(w u′)′ = λ w u` with weight `w = f²`. On the
//! truncated interval `[−L, L]` it is discretised by second-order finite
//! differences into a generalised tridiagonal problem `K u = λ M u`, which
//! is symmetrised to `M^{-1/2} K M^{-1/2}` and solved by Sturm-sequence
//! bisection followed by shifted inverse iteration.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::integrate;
use crate::radial::RadialFunction;
use crate::warp::WarpedProduct;

pub const DEFAULT_HALF_WIDTH: f64 = 12.0;
pub const DEFAULT_GRID: usize = 8000;
/// `cosh²` overflows past roughly 355; stay well inside.
pub const MAX_HALF_WIDTH: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralResult {
    pub lambda0: f64,
    pub half_width: f64,
    pub grid_n: usize,
    pub boundary_condition: BoundaryCondition,
    /// Rayleigh quotient of `sech r` on `[−L, L]`.
    pub rayleigh_of_sech: f64,
    /// `‖Bv − λv‖∞ / ‖v‖∞` for the symmetrised operator `B`.
    pub residual: f64,
    pub bisection_steps: usize,
}

/// Symmetric tridiagonal matrix: `diag[i]`, `off[i]` couples `i` and `i + 1`.
#[derive(Debug, Clone)]
struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    fn len(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1].powi(2) / q };
            q = self.diag[i] - x - coupling;
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.len() {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < self.len() { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * v[i + 1];
            }
            out[i] = s;
        }
    }

    /// Solves `(self − shift·I) x = rhs` by the Thomas algorithm; the shifted
    /// matrix must be positive definite.
    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut denom = self.diag[0] - shift;
        c[0] = if n > 1 { self.off[0] / denom } else { 0.0 };
        d[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - shift - self.off[i - 1] * c[i - 1];
            c[i] = if i + 1 < n { self.off[i] / denom } else { 0.0 };
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / denom;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        x
    }
}

fn assemble(m: &WarpedProduct, half_width: f64, n: usize, bc: BoundaryCondition) -> Result<Tridiagonal> {
    let h = 2.0 * half_width / n as f64;
    let node = |i: usize| -half_width + h * i as f64;
    let weight = |r: f64| m.warp.eval(r).powi(2);
    let face = |i: usize| weight(node(i) + 0.5 * h); // between node i and i + 1
    let (first, last) = match bc {
        BoundaryCondition::Dirichlet => (1, n - 1),
        BoundaryCondition::Neumann => (0, n),
    };
    let size = last - first + 1;
    let mut stiff_diag = Vec::with_capacity(size);
    let mut mass = Vec::with_capacity(size);
    let mut stiff_off = Vec::with_capacity(size.saturating_sub(1));
    let h2 = h * h;
    for i in first..=last {
        let left = if i > 0 { face(i - 1) } else { 0.0 };
        let right = if i < n { face(i) } else { 0.0 };
        let w = weight(node(i));
        let lumped = if i == 0 || i == n { 0.5 * w } else { w };
        stiff_diag.push((left + right) / h2);
        mass.push(lumped);
        if i < last {
            stiff_off.push(-right / h2);
        }
    }
    if mass
        .iter()
        .chain(stiff_diag.iter())
        .any(|v| !v.is_finite() || *v < 0.0)
    {
        return Err(Error::domain(format!(
            "weight f^2 is not finite on [-{half_width}, {half_width}]"
        )));
    }
    let diag = stiff_diag.iter().zip(&mass).map(|(k, w)| k / w).collect();
    let off = stiff_off
        .iter()
        .enumerate()
        .map(|(i, k)| k / (mass[i] * mass[i + 1]).sqrt())
        .collect();
    Ok(Tridiagonal { diag, off })
}

const MAX_BISECTION: usize = 400;
const MAX_INVERSE: usize = 50;

/// Smallest eigenvalue of the truncated radial problem on `[−L, L]` with `n` cells.
pub fn lambda0_truncated(
    m: &WarpedProduct,
    half_width: f64,
    n: usize,
    bc: BoundaryCondition,
) -> Result<SpectralResult> {
    if !(half_width > 0.0 && half_width <= MAX_HALF_WIDTH) {
        return Err(Error::domain(format!(
            "half-width must lie in (0, {MAX_HALF_WIDTH}], got {half_width}"
        )));
    }
    if n < 100 {
        return Err(Error::domain(format!("grid needs at least 100 cells, got {n}")));
    }
    let op = assemble(m, half_width, n, bc)?;
    let (mut lo, mut hi) = op.gershgorin();
    let scale = lo.abs().max(hi.abs());
    let mut steps = 0;
    while hi - lo > 4.0 * f64::EPSILON * scale {
        if steps == MAX_BISECTION {
            return Err(Error::NotConverged {
                what: "Sturm bisection".into(),
                iterations: steps,
            });
        }
        let mid = 0.5 * (lo + hi);
        if op.count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    let lambda = 0.5 * (lo + hi);

    let shift = lambda - 1e-6 * lambda.abs().max(1.0);
    let mut v = vec![1.0; op.len()];
    let mut converged = false;
    for _ in 0..MAX_INVERSE {
        let mut next = op.solve_shifted(shift, &v);
        let norm = next.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if !(norm.is_finite() && norm > 0.0) {
            break;
        }
        let sign = if next[next.len() / 2] < 0.0 { -1.0 } else { 1.0 };
        next.iter_mut().for_each(|x| *x *= sign / norm);
        let change = next
            .iter()
            .zip(&v)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        v = next;
        if change < 1e-13 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NotConverged {
            what: "inverse iteration".into(),
            iterations: MAX_INVERSE,
        });
    }
    let mut bv = vec![0.0; op.len()];
    op.apply(&v, &mut bv);
    let residual = bv
        .iter()
        .zip(&v)
        .fold(0.0f64, |a, (b, x)| a.max((b - lambda * x).abs()));

    Ok(SpectralResult {
        lambda0: lambda,
        half_width,
        grid_n: n,
        boundary_condition: bc,
        rayleigh_of_sech: rayleigh_quotient(m, &RadialFunction::sech(), half_width)?,
        residual,
        bisection_steps: steps,
    })
}

/// `∫ f² u′² / ∫ f² u²` over `[−L, L]`.
pub fn rayleigh_quotient(m: &WarpedProduct, u: &RadialFunction, half_width: f64) -> Result<f64> {
    if !(half_width > 0.0) {
        return Err(Error::domain(format!("half-width must be positive, got {half_width}")));
    }
    let w = |r: f64| m.warp.eval(r).powi(2);
    let cfg = m.quadrature();
    let num = integrate(|r| w(r) * u.deriv1(r).powi(2), -half_width, half_width, cfg)?.value;
    let den = integrate(|r| w(r) * u.eval(r).powi(2), -half_width, half_width, cfg)?.value;
    if !(den > 0.0) {
        return Err(Error::domain(format!(
            "trial function {} vanishes on [-{half_width}, {half_width}]",
            u.name()
        )));
    }
    Ok(num / den)
}

/// `λ₀ = D(2 − D)` in terms of the limit-set dimension `D ∈ [1, 2]`.
pub fn sullivan_lambda0(dimension: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&dimension) {
        return Err(Error::domain(format!(
            "dimension formula holds for 1 <= D <= 2, got D = {dimension}"
        )));
    }
    Ok(dimension * (2.0 - dimension))
}

/// `h²/4 ≤ λ₀`.
pub fn cheeger_inequality_holds(h: f64, lambda0: f64) -> bool {
    0.25 * h * h <= lambda0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Conjugating by `cosh` turns the cosh-weighted problem into
    /// `−v″ + v = λv`, so the Dirichlet bottom on `[−L, L]` is `1 + (π/2L)²`.
    fn dirichlet_exact(l: f64) -> f64 {
        1.0 + (PI / (2.0 * l)).powi(2)
    }

    fn fuchsian() -> WarpedProduct {
        WarpedProduct::fuchsian(2).unwrap()
    }

    #[test]
    fn dirichlet_bottom_matches_conjugated_problem() {
        let m = fuchsian();
        let r8 = lambda0_truncated(&m, 8.0, 4000, BoundaryCondition::Dirichlet).unwrap();
        assert!((r8.lambda0 - dirichlet_exact(8.0)).abs() < 1e-5, "{r8:?}");
        assert!(r8.residual < 1e-8);
        let r12 = lambda0_truncated(&m, 12.0, 8000, BoundaryCondition::Dirichlet).unwrap();
        assert!((r12.lambda0 - dirichlet_exact(12.0)).abs() < 1e-5);
        assert!((r12.lambda0 - 1.0).abs() < (r8.lambda0 - 1.0).abs());
        assert!(r12.lambda0 > 1.0);
    }

    #[test]
    fn exact_eigenfunction_rayleigh_quotient() {
        let m = fuchsian();
        let l = 12.0;
        let k = PI / (2.0 * l);
        // u = sech r · cos(kr), which vanishes at ±L
        let u = RadialFunction::new(
            "sech*cos",
            move |r| (k * r).cos() / r.cosh(),
            move |r| (-k * (k * r).sin() - r.tanh() * (k * r).cos()) / r.cosh(),
            |_| f64::NAN,
        );
        let q = rayleigh_quotient(&m, &u, l).unwrap();
        assert!((q - dirichlet_exact(l)).abs() < 1e-9);
        let s = lambda0_truncated(&m, l, 8000, BoundaryCondition::Dirichlet).unwrap();
        assert!((s.lambda0 - q).abs() < 1e-5);
    }

    #[test]
    fn dirichlet_trial_functions_bound_from_above() {
        let m = fuchsian();
        let l = 6.0;
        let lam = lambda0_truncated(&m, l, 2000, BoundaryCondition::Dirichlet).unwrap().lambda0;
        let u = RadialFunction::new(
            "bump",
            move |r| (l * l - r * r) / r.cosh(),
            move |r| (-2.0 * r - (l * l - r * r) * r.tanh()) / r.cosh(),
            |_| f64::NAN,
        );
        assert!(rayleigh_quotient(&m, &u, l).unwrap() >= lam - 1e-6);
    }

    #[test]
    fn dirichlet_bottom_decreases_with_width() {
        let m = fuchsian();
        let values: Vec<f64> = [6.0, 9.0, 12.0]
            .iter()
            .map(|&l| {
                lambda0_truncated(&m, l, 4000, BoundaryCondition::Dirichlet)
                    .unwrap()
                    .lambda0
            })
            .collect();
        assert!(values[0] > values[1] && values[1] > values[2], "{values:?}");
    }

    #[test]
    fn second_order_refinement() {
        let m = fuchsian();
        let at = |n| {
            lambda0_truncated(&m, 6.0, n, BoundaryCondition::Dirichlet)
                .unwrap()
                .lambda0
        };
        let (a, b, c) = (at(400), at(800), at(1600));
        let ratio = (a - b) / (b - c);
        assert!((ratio - 4.0).abs() < 0.3, "ratio {ratio}");
    }

    #[test]
    fn neumann_bottom_is_zero() {
        let m = fuchsian();
        let r = lambda0_truncated(&m, 6.0, 1000, BoundaryCondition::Neumann).unwrap();
        assert!(r.lambda0.abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn rayleigh_quotient_examples() {
        let m = fuchsian();
        // sech is not square integrable here: ∫ tanh² / ∫ 1 = 1 − tanh(L)/L
        for &l in &[5.0f64, 15.0] {
            let q = rayleigh_quotient(&m, &RadialFunction::sech(), l).unwrap();
            assert!((q - (1.0 - l.tanh() / l)).abs() < 1e-9);
        }
        assert_eq!(rayleigh_quotient(&m, &RadialFunction::constant(1.0), 5.0).unwrap(), 0.0);
        assert!(rayleigh_quotient(&m, &RadialFunction::constant(0.0), 5.0).is_err());
    }

    #[test]
    fn sullivan_examples() {
        assert_eq!(sullivan_lambda0(1.0).unwrap(), 1.0);
        assert_eq!(sullivan_lambda0(2.0).unwrap(), 0.0);
        assert_eq!(sullivan_lambda0(1.5).unwrap(), 0.75);
        assert!(sullivan_lambda0(0.9).is_err());
        assert!(sullivan_lambda0(2.1).is_err());
    }

    #[test]
    fn rejects_bad_discretisations() {
        let m = fuchsian();
        assert!(lambda0_truncated(&m, 0.0, 1000, BoundaryCondition::Dirichlet).is_err());
        assert!(lambda0_truncated(&m, 5.0, 50, BoundaryCondition::Dirichlet).is_err());
        assert!(lambda0_truncated(&m, 400.0, 1000, BoundaryCondition::Dirichlet).is_err());
    }

    #[test]
    fn cheeger_inequality_for_fuchsian() {
        let h = crate::cheeger::fuchsian_cheeger_constant();
        assert!((0.25 * h * h - 0.694816538053797).abs() < 1e-12);
        let lam = lambda0_truncated(&fuchsian(), 12.0, 8000, BoundaryCondition::Dirichlet)
            .unwrap()
            .lambda0;
        assert!(cheeger_inequality_holds(h, lam));
        assert!(cheeger_inequality_holds(h, 1.0));
    }
}

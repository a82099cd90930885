//! The radial Laplace–Beltrami operator `u″ + 2(f′/f)u′` and the identity
//! suite it satisfies on the Fuchsian warp.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::cheeger::{calibration_maximum, calibration_potential};
use crate::error::{Error, Result};
use crate::warp::WarpedProduct;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A function of the radial coordinate with its first two derivatives.
#[derive(Clone)]
pub struct RadialFunction {
    name: String,
    f: ScalarFn,
    d1: ScalarFn,
    d2: ScalarFn,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction").field("name", &self.name).finish()
    }
}

impl RadialFunction {
    pub fn new<F, D1, D2>(name: impl Into<String>, f: F, d1: D1, d2: D2) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D1: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            f: Arc::new(f),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
        }
    }

    /// The distance coordinate `r` itself.
    pub fn distance() -> Self {
        Self::new("r", |r| r, |_| 1.0, |_| 0.0)
    }

    pub fn sinh() -> Self {
        Self::new("sinh", f64::sinh, f64::cosh, f64::sinh)
    }

    pub fn tanh() -> Self {
        Self::new(
            "tanh",
            f64::tanh,
            |r| r.cosh().powi(2).recip(),
            |r| -2.0 * r.tanh() / r.cosh().powi(2),
        )
    }

    pub fn sech() -> Self {
        Self::new(
            "sech",
            |r| r.cosh().recip(),
            |r| -r.tanh() / r.cosh(),
            |r| {
                let s = r.cosh().recip();
                let t = r.tanh();
                s * (t * t - s * s)
            },
        )
    }

    /// `r·tanh r`, the calibration potential of the Fuchsian warp.
    pub fn r_tanh_r() -> Self {
        Self::new(
            "r*tanh",
            |r| r * r.tanh(),
            |r| r.tanh() + r / r.cosh().powi(2),
            |r| 2.0 / r.cosh().powi(2) * (1.0 - r * r.tanh()),
        )
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_| c, |_| 0.0, |_| 0.0)
    }

    /// Same function with derivatives replaced by central differences of step `h`.
    pub fn finite_differences(&self, h: f64) -> Self {
        let f1 = self.f.clone();
        let f2 = self.f.clone();
        Self {
            name: format!("{}[fd h={h:e}]", self.name),
            f: self.f.clone(),
            d1: Arc::new(move |r| (f1(r + h) - f1(r - h)) / (2.0 * h)),
            d2: Arc::new(move |r| (f2(r + h) - 2.0 * f2(r) + f2(r - h)) / (h * h)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.f)(r)
    }

    pub fn deriv1(&self, r: f64) -> f64 {
        (self.d1)(r)
    }

    pub fn deriv2(&self, r: f64) -> f64 {
        (self.d2)(r)
    }
}

pub fn radial_laplacian(m: &WarpedProduct, u: &RadialFunction, r: f64) -> f64 {
    u.deriv2(r) + 2.0 * m.warp.log_derivative(r) * u.deriv1(r)
}

/// The radial identities of the Fuchsian warp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `Δr = 2 tanh r`
    Distance,
    /// `Δ sinh r = 3 sinh r`
    Sinh,
    /// `Δ sech r = −sech r`
    Sech,
    /// `Δ tanh r = 0`
    Tanh,
    /// `Δ(r tanh r) = 2`
    Potential,
}

impl Identity {
    pub const ALL: [Identity; 5] = [
        Identity::Distance,
        Identity::Sinh,
        Identity::Sech,
        Identity::Tanh,
        Identity::Potential,
    ];

    pub fn function(self) -> RadialFunction {
        match self {
            Identity::Distance => RadialFunction::distance(),
            Identity::Sinh => RadialFunction::sinh(),
            Identity::Sech => RadialFunction::sech(),
            Identity::Tanh => RadialFunction::tanh(),
            Identity::Potential => RadialFunction::r_tanh_r(),
        }
    }

    pub fn expected(self, r: f64) -> f64 {
        match self {
            Identity::Distance => 2.0 * r.tanh(),
            Identity::Sinh => 3.0 * r.sinh(),
            Identity::Sech => -r.cosh().recip(),
            Identity::Tanh => 0.0,
            Identity::Potential => 2.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Identity::Distance => "lap(r) = 2 tanh r",
            Identity::Sinh => "lap(sinh) = 3 sinh",
            Identity::Sech => "lap(sech) = -sech",
            Identity::Tanh => "lap(tanh) = 0",
            Identity::Potential => "lap(r tanh r) = 2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference { step: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub identity: Identity,
    pub label: &'static str,
    /// Largest `|Δu − expected| / max(1, |expected|)` over the grid.
    pub max_residual: f64,
    pub worst_r: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub mode: DerivativeMode,
    pub tol: f64,
    pub grid_points: usize,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// The default verification grid: 1000 evenly spaced points on `[−10, 10]`.
pub fn default_grid() -> Vec<f64> {
    uniform_grid(-10.0, 10.0, 1000)
}

pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..points)
            .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Checks every identity at every grid radius.
///
/// Residuals are scaled by `max(1, |expected|)` so the exponentially growing
/// `sinh` identity is judged relatively in the tails.
pub fn verify_identities(
    m: &WarpedProduct,
    grid: &[f64],
    tol: f64,
    mode: DerivativeMode,
) -> Result<IdentityReport> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    if grid.is_empty() {
        return Err(Error::domain("identity grid is empty"));
    }
    let checks = Identity::ALL
        .iter()
        .map(|&id| {
            let u = match mode {
                DerivativeMode::Analytic => id.function(),
                DerivativeMode::FiniteDifference { step } => id.function().finite_differences(step),
            };
            let (max_residual, worst_r) = grid
                .par_iter()
                .map(|&r| {
                    let expected = id.expected(r);
                    let res = (radial_laplacian(m, &u, r) - expected).abs() / expected.abs().max(1.0);
                    (res, r)
                })
                .reduce(
                    || (0.0, f64::NAN),
                    |a, b| {
                        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) || a.1.is_nan() {
                            b
                        } else {
                            a
                        }
                    },
                );
            IdentityCheck {
                identity: id,
                label: id.label(),
                max_residual,
                worst_r,
                passed: max_residual <= tol,
            }
        })
        .collect();
    Ok(IdentityReport {
        mode,
        tol,
        grid_points: grid.len(),
        checks,
    })
}

/// Divergence theorem for the symmetric slab `[−x, x]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceCheck {
    pub x: f64,
    /// `2·|Ω|`, the integral of `Δφ = 2` over the slab.
    pub lhs: f64,
    /// Boundary flux `φ′(x)·|∂Ω|`.
    pub rhs: f64,
    /// `sup φ′ · |∂Ω|`, the calibration bound on the flux.
    pub calibrated_bound: f64,
    pub sup_phi_prime: f64,
}

impl DivergenceCheck {
    pub fn flux_residual(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.lhs.abs().max(1.0)
    }

    /// Relative slack `1 − lhs / calibrated_bound`; zero only at the optimal slab.
    pub fn calibration_slack(&self) -> f64 {
        1.0 - self.lhs / self.calibrated_bound
    }
}

pub fn slab_divergence_check(m: &WarpedProduct, x: f64) -> Result<DivergenceCheck> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("slab half-width must be positive, got {x}")));
    }
    let volume = 2.0 * m.base.area * m.unit_slab_volume(0.0, x)?;
    if !m.warp.is_even() {
        return Err(Error::domain("symmetric slab check needs an even warp"));
    }
    let (_, phi_prime) = calibration_potential(m, x)?;
    let boundary = 2.0 * m.slice_area(x);
    let sup = calibration_maximum(m)?.phi_prime;
    Ok(DivergenceCheck {
        x,
        lhs: 2.0 * volume,
        rhs: phi_prime * boundary,
        calibrated_bound: sup * boundary,
        sup_phi_prime: sup,
    })
}

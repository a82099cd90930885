//! Curvature of `Σ ×_f ℝ` and energy functionals of its slices.
//!
//! In the orthonormal frame `{∂r, e₁, e₂}` the radial planes have sectional
//! curvature `−f″/f` and the tangential plane has `(K − f′²)/f²`, where `K`
//! is the Gauss curvature of the base.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::warp::WarpedProduct;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureReport {
    pub at_r: f64,
    pub ric_radial: f64,
    pub ric_tangential: f64,
    pub scalar: f64,
}

impl CurvatureReport {
    /// `scalar − ric_radial − 2·ric_tangential`.
    pub fn trace_residual(&self) -> f64 {
        self.scalar - self.ric_radial - 2.0 * self.ric_tangential
    }
}

/// Second fundamental form data of a slice `Σ × {r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceShape {
    /// Mean curvature (average of the principal curvatures).
    pub mean_curvature: f64,
    /// `|A|²`.
    pub norm_a2: f64,
    /// `|Å|²`, the traceless part.
    pub traceless2: f64,
    /// Intrinsic Gauss curvature of the induced metric.
    pub gauss_curvature: f64,
}

impl SliceShape {
    /// Residual of the Gauss equation `K_amb = K + (|Å|² − 2H²)/2` for an
    /// ambient tangential sectional curvature `ambient`.
    pub fn gauss_residual(&self, ambient: f64) -> f64 {
        ambient - self.gauss_curvature - 0.5 * (self.traceless2 - 2.0 * self.mean_curvature.powi(2))
    }
}

pub fn curvature_at(m: &WarpedProduct, r: f64) -> CurvatureReport {
    let w = &m.warp;
    let f = w.eval(r);
    let radial_sec = -w.curvature_ratio(r);
    let tangential_sec = (m.base.curvature - w.deriv1(r).powi(2)) / (f * f);
    let ric_radial = 2.0 * radial_sec;
    let ric_tangential = radial_sec + tangential_sec;
    CurvatureReport {
        at_r: r,
        ric_radial,
        ric_tangential,
        scalar: ric_radial + 2.0 * ric_tangential,
    }
}

/// Sectional curvature of the plane tangent to the slice at `r`.
pub fn tangential_sectional(m: &WarpedProduct, r: f64) -> f64 {
    let w = &m.warp;
    (m.base.curvature - w.deriv1(r).powi(2)) / w.eval(r).powi(2)
}

pub fn slice_shape(m: &WarpedProduct, r: f64) -> SliceShape {
    let h = m.slice_mean_curvature(r);
    SliceShape {
        mean_curvature: h,
        norm_a2: 2.0 * h * h,
        traceless2: 0.0,
        gauss_curvature: m.base.curvature / m.warp.eval(r).powi(2),
    }
}

/// `∫_Σr (1 − H²) dΣ` for the slice at `r`; requires a hyperbolic base.
///
/// For the Fuchsian warp this is `|Σ₀|` at every `r`, the equality case of
/// the Gauss–Bonnet bound `∫(1 − H²) ≤ 4π(g − 1)`.
pub fn gauss_bonnet_energy(m: &WarpedProduct, r: f64) -> Result<f64> {
    if m.base.curvature != -1.0 {
        return Err(Error::domain(format!(
            "Gauss-Bonnet energy is defined for hyperbolic bases (K = -1), got K = {}",
            m.base.curvature
        )));
    }
    Ok(m.warp.curvature_defect(r) * m.slice_area(r))
}

/// `∫_Σr (2 − |A|²) dΣ`, the stability form evaluated on the constant test function.
pub fn stability_integrand(m: &WarpedProduct, r: f64) -> f64 {
    2.0 * m.warp.curvature_defect(r) * m.slice_area(r)
}

/// Strict energy bound `(1 − H²)·area > 2π(g − 1)` satisfied by strongly
/// stable constant mean curvature surfaces.
pub fn energy_lower_bound_check(shape: &SliceShape, area: f64, genus: u32) -> Result<bool> {
    if genus < 2 {
        return Err(Error::domain(format!("genus must be >= 2, got {genus}")));
    }
    let h = shape.mean_curvature;
    Ok((1.0 - h) * (1.0 + h) * area > 2.0 * PI * f64::from(genus - 1))
}

/// Conformal radial coordinate `2·arctan(tanh(r/2))`, mapping ℝ onto (−π/2, π/2).
pub fn conformal_coordinate(r: f64) -> f64 {
    2.0 * (0.5 * r).tanh().atan()
}

/// `π/2 − conformal_coordinate(r)`, evaluated as `2·arctan(e^{−r})`.
fn distance_to_conformal_boundary(r: f64) -> f64 {
    2.0 * (-r).exp().atan()
}

fn require_spherical(m: &WarpedProduct) -> Result<()> {
    if m.base.curvature != 1.0 {
        return Err(Error::domain(format!(
            "conformal blow-up is defined for the round sphere base (K = 1), got K = {}",
            m.base.curvature
        )));
    }
    Ok(())
}

/// `4(1 − tan²(F/2)) / (F − π/2)²` with `F` the conformal coordinate.
///
/// This is the expression obtained by writing `R + 6` in the conformal
/// coordinate through `tanh r ↦ tan(F/2)`; it grows like `4eʳ`.
/// [`scalar_defect_ratio`] evaluates the curvature itself.
pub fn blowup_ratio(m: &WarpedProduct, r: f64) -> Result<f64> {
    require_spherical(m)?;
    // tan(F/2) = tanh(r/2), so 1 − tan²(F/2) = sech²(r/2).
    let numerator = 4.0 / (0.5 * r).cosh().powi(2);
    Ok(numerator / distance_to_conformal_boundary(r).powi(2))
}

/// `(R(r) + 6) / (F(r) − π/2)²` with `R` the scalar curvature.
///
/// Since `tanh r = sin F`, `R + 6 = 4cos²F` and this ratio tends to 4.
pub fn scalar_defect_ratio(m: &WarpedProduct, r: f64) -> Result<f64> {
    require_spherical(m)?;
    let c = curvature_at(m, r);
    Ok((c.scalar + 6.0) / distance_to_conformal_boundary(r).powi(2))
}

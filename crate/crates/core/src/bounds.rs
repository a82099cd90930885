//! Upper bounds on the Cheeger constant from end genera and core volumes.
//!
//! Two competitor families are evaluated. The outermost region itself gives
//! `Σ ½|∂Ω_{gᵢ,h}| / |Ω₀|`. Regions of excess volume `V` outside it give
//! `I_TG(W) / (W + |Ω_TG|)` with `W = V + |Ω₀| − |Ω_TG|`, minimised over the
//! equidistant parameter. The case label follows the comparison of the
//! excess volume with half the total Cheeger-region volume.

use std::f64::consts::PI;

use serde::Serialize;

use crate::cheeger::{fuchsian_alpha, fuchsian_cheeger_constant};
use crate::error::{Error, Result};
use crate::numerics::{brent_root, RootConfig};
use crate::profiles::{end_parameter, end_volume, ModelGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheegerRegion {
    pub genus: u32,
    pub volume: f64,
    pub boundary_area: f64,
    pub ratio: f64,
}

/// The Fuchsian Cheeger region `Σ_g × [−α, α]`.
pub fn cheeger_region_volume(genus: u32) -> Result<CheegerRegion> {
    if genus < 2 {
        return Err(Error::domain(format!("genus must be >= 2, got {genus}")));
    }
    let a = fuchsian_alpha();
    let s = 4.0 * PI * (genus as f64 - 1.0);
    let volume = s * (a + a.sinh() * a.cosh());
    let boundary_area = 2.0 * s * a.cosh().powi(2);
    Ok(CheegerRegion { genus, volume, boundary_area, ratio: boundary_area / volume })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundCase {
    CoreDominates,
    ProfileCase,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub bound: f64,
    pub case_taken: BoundCase,
    pub equality_possible: bool,
    pub h_fuchsian: f64,
    pub model: ModelGeometry,
    /// `½ Σ |Ω_{gᵢ,h}|`.
    pub half_cheeger_volume: f64,
    /// `Σ ½|∂Ω_{gᵢ,h}| / |Ω₀|`, when `|Ω₀| > 0`.
    pub core_bound: Option<f64>,
    /// The same numerator over `|Ω₀| − |Ω_TG|`, when positive.
    pub relaxed_core_bound: Option<f64>,
    pub profile_bound: f64,
    /// Equidistant parameter at which the profile quotient is evaluated.
    pub profile_parameter: f64,
    /// Unconstrained minimiser: `tanh t · (t + 2|Ω_TG|/S) = 1`.
    pub stationary_parameter: f64,
}

fn profile_quotient(s: f64, c: f64, t: f64) -> f64 {
    s * t.cosh().powi(2) / (end_volume(s, t) + c)
}

/// Two-case upper bound on `h(M)`.
pub fn cheeger_upper_bound(model: &ModelGeometry) -> Result<BoundsReport> {
    let a = fuchsian_alpha();
    let h_fuchsian = fuchsian_cheeger_constant();
    let s = model.ends.total_area();
    let c = model.tg_core_volume;
    let excess = model.excess_volume();

    let mut half_cheeger_volume = 0.0;
    let mut half_boundary = 0.0;
    for &g in &model.ends.genera {
        let region = cheeger_region_volume(g)?;
        half_cheeger_volume += 0.5 * region.volume;
        half_boundary += 0.5 * region.boundary_area;
    }

    let stationary_parameter = if c == 0.0 {
        a
    } else {
        let cfg = RootConfig { xtol: 1e-15, ..RootConfig::default() };
        brent_root(|t| Ok(t.tanh() * (t + 2.0 * c / s) - 1.0), 0.0, a, &cfg)?
    };
    let lower = end_parameter(s, excess)?;
    let profile_parameter = stationary_parameter.max(lower);
    let profile_bound = profile_quotient(s, c, profile_parameter);

    let core_bound = (model.outermost_volume > 0.0).then(|| half_boundary / model.outermost_volume);
    let relaxed_core_bound = (excess > 0.0).then(|| half_boundary / excess);
    let case_taken = if excess >= half_cheeger_volume && core_bound.is_some() {
        BoundCase::CoreDominates
    } else {
        BoundCase::ProfileCase
    };
    let bound = core_bound.map_or(profile_bound, |b| b.min(profile_bound));

    Ok(BoundsReport {
        bound,
        case_taken,
        equality_possible: c == 0.0 && model.outermost_volume == 0.0,
        h_fuchsian,
        model: model.clone(),
        half_cheeger_volume,
        core_bound,
        relaxed_core_bound,
        profile_bound,
        profile_parameter,
        stationary_parameter,
    })
}

/// `Σ 8π(gᵢ − 1) / |C(M)|`, the convex core as competitor.
pub fn core_quotient_bound(core_volume: f64, genera: &[u32]) -> Result<f64> {
    if !(core_volume > 0.0 && core_volume.is_finite()) {
        return Err(Error::domain(format!("core volume must be positive, got {core_volume}")));
    }
    if genera.is_empty() {
        return Err(Error::domain("at least one boundary component is required"));
    }
    if let Some(g) = genera.iter().find(|&&g| g < 2) {
        return Err(Error::domain(format!("genus must be >= 2, got {g}")));
    }
    let total: f64 = genera.iter().map(|&g| 8.0 * PI * (g as f64 - 1.0)).sum();
    Ok(total / core_volume)
}

//! Model isoperimetric profiles and comparisons against external curves.
//!
//! Volumes passed to [`tg_profile`] are measured outside the totally
//! geodesic core, so `tg_profile(model, 0)` is the area of the core boundary.

use std::f64::consts::PI;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::round_significant;
use crate::numerics::{brent_root, RootConfig};
use crate::warp::{Slab, WarpedProduct};

/// Relative tolerance for equality and violation flags.
pub const EQUALITY_TOL: f64 = 1e-9;
/// Maximum tail slope of the profile gap, per unit volume.
pub const STABILISATION_SLOPE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndData {
    pub genera: Vec<u32>,
    pub areas: Vec<f64>,
}

impl EndData {
    pub fn new(genera: &[u32]) -> Result<Self> {
        if genera.is_empty() {
            return Err(Error::domain("at least one end is required"));
        }
        if let Some(g) = genera.iter().find(|&&g| g < 2) {
            return Err(Error::domain(format!("end genus must be >= 2, got {g}")));
        }
        let areas = genera.iter().map(|&g| 4.0 * PI * (g as f64 - 1.0)).collect();
        Ok(Self { genera: genera.to_vec(), areas })
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelGeometry {
    pub ends: EndData,
    pub tg_core_volume: f64,
    pub outermost_volume: f64,
}

impl ModelGeometry {
    pub fn new(genera: &[u32], tg_core_volume: f64, outermost_volume: f64) -> Result<Self> {
        let ends = EndData::new(genera)?;
        for (name, v) in [("tg core", tg_core_volume), ("outermost", outermost_volume)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::domain(format!("{name} volume must be finite and >= 0, got {v}")));
            }
        }
        if outermost_volume < tg_core_volume {
            return Err(Error::domain(format!(
                "outermost volume {outermost_volume} is below the tg core volume {tg_core_volume}"
            )));
        }
        Ok(Self { ends, tg_core_volume, outermost_volume })
    }

    /// `|Ω₀| − |Ω_TG|`.
    pub fn excess_volume(&self) -> f64 {
        self.outermost_volume - self.tg_core_volume
    }

    /// The equidistant ratio stays below 2 for every `t` exactly when the
    /// core holds more than half the total end area in volume.
    pub fn has_thick_core(&self) -> bool {
        self.tg_core_volume > 0.5 * self.ends.total_area()
    }
}

/// `Σ Sᵢ ∫₀ᵗ cosh²` for total end area `s`.
pub(crate) fn end_volume(s: f64, t: f64) -> f64 {
    0.5 * s * (t + t.sinh() * t.cosh())
}

/// Equidistant parameter with `Σ Sᵢ ∫₀ᵗ cosh² = v`.
pub(crate) fn end_parameter(s: f64, v: f64) -> Result<f64> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::domain(format!("volume must be finite and >= 0, got {v}")));
    }
    if v == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while end_volume(s, hi) < v {
        hi *= 2.0;
    }
    let cfg = RootConfig { xtol: 1e-15, ..RootConfig::default() };
    brent_root(|t| Ok(end_volume(s, t) - v), 0.0, hi, &cfg)
}

/// Equidistant parameter `t(V)` of the totally geodesic model.
pub fn tg_parameter(model: &ModelGeometry, v: f64) -> Result<f64> {
    end_parameter(model.ends.total_area(), v)
}

/// Outermost profile `I_TG(V) = Σ Sᵢ cosh² t(V)`.
pub fn tg_profile(model: &ModelGeometry, v: f64) -> Result<f64> {
    let t = tg_parameter(model, v)?;
    Ok(model.ends.total_area() * t.cosh().powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquidistantRatio {
    pub t: f64,
    pub area: f64,
    pub volume: f64,
    pub ratio: f64,
    /// `2 − ratio`, computed without cancellation.
    pub deficit: f64,
    pub below_two: bool,
}

/// Area over volume of the equidistant set at distance `t` from the core.
pub fn equidistant_ratio(model: &ModelGeometry, t: f64) -> Result<EquidistantRatio> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!("t must be finite and >= 0, got {t}")));
    }
    let s = model.ends.total_area();
    let c = model.tg_core_volume;
    let volume = c + end_volume(s, t);
    if volume == 0.0 {
        return Err(Error::domain("equidistant set has zero volume"));
    }
    let area = s * t.cosh().powi(2);
    // 2W − A = S(t − (1 + e^{−2t})/2)
    let deficit = (2.0 * c + s * (t - 0.5 * (1.0 + (-2.0 * t).exp()))) / volume;
    Ok(EquidistantRatio {
        t,
        area,
        volume,
        ratio: 2.0 - deficit,
        deficit,
        below_two: deficit > 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FoliationPoint {
    pub volume: f64,
    pub area: f64,
    pub r: f64,
    pub slope: f64,
}

/// Area-volume profile `β(V)` of the symmetric slabs `[−r, r]`.
pub fn foliation_profile_beta(m: &WarpedProduct, v: f64) -> Result<FoliationPoint> {
    if !m.warp.is_even() {
        return Err(Error::domain("foliation profile needs an even warp"));
    }
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::domain(format!("volume must be positive, got {v}")));
    }
    let vol = |r: f64| m.slab_volume(&Slab::symmetric(r)?);
    let mut hi = 0.5;
    loop {
        if vol(hi)? >= v {
            break;
        }
        if hi >= m.window() {
            return Err(Error::domain(format!(
                "volume {v} exceeds the slab volume at the window edge r = {}",
                m.window()
            )));
        }
        hi = (2.0 * hi).min(m.window());
    }
    let cfg = RootConfig { xtol: 1e-14, ..RootConfig::default() };
    let r = brent_root(|r| Ok(vol(r)? - v), 0.0, hi, &cfg)?;
    Ok(FoliationPoint {
        volume: v,
        area: 2.0 * m.slice_area(r),
        r,
        slope: 2.0 * m.warp.log_derivative(r),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    #[serde(rename = "I_TG")]
    Tg,
    #[serde(rename = "I_F")]
    Fuchsian,
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "external")]
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub kind: ProfileKind,
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    #[serde(rename = "V")]
    v: f64,
    #[serde(rename = "A")]
    a: f64,
}

impl ProfileCurve {
    pub fn new(kind: ProfileKind, samples: Vec<(f64, f64)>) -> Result<Self> {
        let curve = Self { kind, samples };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::validation("profile curve has no samples"));
        }
        if let Some((v, a)) = self.samples.iter().find(|(v, a)| !(v.is_finite() && a.is_finite())) {
            return Err(Error::validation(format!("non-finite sample ({v}, {a})")));
        }
        for (i, w) in self.samples.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(Error::validation(format!(
                    "V is not strictly increasing at sample {}: {} after {}",
                    i + 1,
                    w[1].0,
                    w[0].0
                )));
            }
            if w[1].1 <= w[0].1 {
                return Err(Error::validation(format!(
                    "A is not strictly increasing at sample {}: {} after {}",
                    i + 1,
                    w[1].1,
                    w[0].1
                )));
            }
        }
        Ok(())
    }

    /// Samples `I_TG` at the given volumes.
    pub fn sample_tg(model: &ModelGeometry, volumes: &[f64]) -> Result<Self> {
        let samples = volumes
            .par_iter()
            .map(|&v| Ok((v, tg_profile(model, v)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ProfileKind::Tg, samples)
    }

    /// Samples `β` at the given volumes.
    pub fn sample_beta(m: &WarpedProduct, volumes: &[f64]) -> Result<Self> {
        let samples = volumes
            .par_iter()
            .map(|&v| Ok((v, foliation_profile_beta(m, v)?.area)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ProfileKind::Beta, samples)
    }

    pub fn with_kind(mut self, kind: ProfileKind) -> Self {
        self.kind = kind;
        self
    }

    /// Applies `A ↦ map(V, A)` to every sample and revalidates.
    pub fn map_areas(&self, kind: ProfileKind, map: impl Fn(f64, f64) -> f64) -> Result<Self> {
        Self::new(kind, self.samples.iter().map(|&(v, a)| (v, map(v, a))).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        for &(v, a) in &self.samples {
            w.serialize(CsvRow { v: round_significant(v), a: round_significant(a) })
                .map_err(|e| Error::validation(format!("csv write failed: {e}")))?;
        }
        w.flush().map_err(|e| Error::validation(format!("csv write failed: {e}")))
    }

    pub fn read_csv<R: Read>(kind: ProfileKind, input: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
        let headers = r
            .headers()
            .map_err(|e| Error::validation(format!("csv read failed: {e}")))?;
        if headers.len() != 2 || &headers[0] != "V" || &headers[1] != "A" {
            return Err(Error::validation(format!(
                "profile csv header must be `V,A`, got `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let samples = r
            .deserialize::<CsvRow>()
            .map(|row| {
                row.map(|row| (row.v, row.a))
                    .map_err(|e| Error::validation(format!("csv read failed: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(kind, samples)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let curve: Self = serde_json::from_str(text)
            .map_err(|e| Error::validation(format!("profile json is malformed: {e}")))?;
        curve.validate()?;
        Ok(curve)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonSample {
    pub volume: f64,
    pub area: f64,
    pub model_area: f64,
    pub margin: f64,
    pub equality: bool,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    /// `|Ω₀| − |Ω_TG|`, added to each volume before evaluating `I_TG`.
    pub shift: f64,
    pub tol: f64,
    pub samples: Vec<ComparisonSample>,
    pub violations: usize,
    pub equality_points: usize,
    /// Equality anywhere forces `Ω₀ = Ω_TG`.
    pub rigidity: bool,
    /// Equality was seen although the inputs have `|Ω₀| ≠ |Ω_TG|`.
    pub rigidity_conflict: bool,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks `A ≤ I_TG(V + |Ω₀| − |Ω_TG|)` sample by sample.
pub fn compare_profiles(external: &ProfileCurve, model: &ModelGeometry) -> Result<ComparisonReport> {
    external.validate()?;
    let shift = model.excess_volume();
    let samples = external
        .samples
        .par_iter()
        .map(|&(v, a)| {
            let model_area = tg_profile(model, v + shift)?;
            let margin = model_area - a;
            let scale = EQUALITY_TOL * model_area.abs().max(a.abs());
            Ok(ComparisonSample {
                volume: v,
                area: a,
                model_area,
                margin,
                equality: margin.abs() <= scale,
                violation: margin < -scale,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = samples.iter().filter(|s| s.violation).count();
    let equality_points = samples.iter().filter(|s| s.equality).count();
    Ok(ComparisonReport {
        shift,
        tol: EQUALITY_TOL,
        violations,
        equality_points,
        rigidity: equality_points > 0,
        rigidity_conflict: equality_points > 0 && shift != 0.0,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RenvolEstimate {
    pub renormalized_volume: f64,
    pub mean_gap: f64,
    pub tail_start: f64,
    pub tail_samples: usize,
    pub tail_slope: f64,
    pub slope_threshold: f64,
}

/// `|Ω₀| + ½·(tail mean of I_TG(V) − A)`, using the last decade of sampled volumes.
pub fn renvol_estimate(external: &ProfileCurve, model: &ModelGeometry) -> Result<RenvolEstimate> {
    external.validate()?;
    let v_max = external.samples.last().map(|s| s.0).unwrap_or(0.0);
    if !(v_max > 0.0) {
        return Err(Error::validation("insufficient profile range: no positive volumes"));
    }
    let tail_start = 0.1 * v_max;
    let tail: Vec<(f64, f64)> = external
        .samples
        .iter()
        .filter(|s| s.0 >= tail_start)
        .map(|&(v, a)| Ok((v, tg_profile(model, v)? - a)))
        .collect::<Result<_>>()?;
    if tail.len() < 3 {
        return Err(Error::validation(format!(
            "insufficient profile range: {} samples in the tail [{tail_start}, {v_max}], need 3",
            tail.len()
        )));
    }
    let n = tail.len() as f64;
    let mean_v = tail.iter().map(|s| s.0).sum::<f64>() / n;
    let mean_gap = tail.iter().map(|s| s.1).sum::<f64>() / n;
    let sxx: f64 = tail.iter().map(|s| (s.0 - mean_v).powi(2)).sum();
    let sxy: f64 = tail.iter().map(|s| (s.0 - mean_v) * (s.1 - mean_gap)).sum();
    let tail_slope = sxy / sxx;
    if !(tail_slope.abs() < STABILISATION_SLOPE) {
        return Err(Error::validation(format!(
            "insufficient profile range: tail gap slope {tail_slope:e} exceeds {STABILISATION_SLOPE:e}"
        )));
    }
    Ok(RenvolEstimate {
        renormalized_volume: model.outermost_volume + 0.5 * mean_gap,
        mean_gap,
        tail_start,
        tail_samples: tail.len(),
        tail_slope,
        slope_threshold: STABILISATION_SLOPE,
    })
}

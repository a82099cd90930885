//! Warped-product manifolds `Σ ×_f ℝ` with metric `dr² + f(r)² g_Σ`.
//!
//! Lengths are measured in units of the hyperbolic curvature radius, so the
//! Fuchsian case is `f = cosh` over a base of constant curvature −1.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{integrate, QuadratureConfig};

/// Default radial half-width. `cosh` overflows near 710, so this stays well clear.
pub const DEFAULT_WINDOW: f64 = 25.0;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WarpFamily {
    Cosh,
    /// `f(r) = cosh(rate · r)`.
    CoshScaled(f64),
    Custom,
}

#[derive(Clone)]
enum Kind {
    Cosh,
    CoshScaled(f64),
    Custom {
        name: String,
        f: ScalarFn,
        d1: ScalarFn,
        d2: ScalarFn,
    },
}

/// The warping factor `f` together with closed-form `f′` and `f″`.
#[derive(Clone)]
pub struct WarpFunction {
    kind: Kind,
    even: bool,
}

impl fmt::Debug for WarpFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WarpFunction")
            .field("name", &self.name())
            .field("even", &self.even)
            .finish()
    }
}

impl WarpFunction {
    pub fn cosh() -> Self {
        Self {
            kind: Kind::Cosh,
            even: true,
        }
    }

    pub fn cosh_scaled(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::domain(format!("cosh rate must be positive, got {rate}")));
        }
        Ok(Self {
            kind: Kind::CoshScaled(rate),
            even: true,
        })
    }

    /// A custom warp from a closed-form evaluator triple `(f, f′, f″)`.
    ///
    /// `even` declares `f(−r) = f(r)`; it is checked when the warp is attached
    /// to a [`WarpedProduct`].
    pub fn custom<F, D1, D2>(name: impl Into<String>, even: bool, f: F, d1: D1, d2: D2) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D1: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: Kind::Custom {
                name: name.into(),
                f: Arc::new(f),
                d1: Arc::new(d1),
                d2: Arc::new(d2),
            },
            even,
        }
    }

    /// `f(r) = exp(r)`, the horospherical warp.
    pub fn exponential() -> Self {
        Self::custom("exp", false, f64::exp, f64::exp, f64::exp)
    }

    /// `f ≡ 1`, the flat cylinder.
    pub fn constant() -> Self {
        Self::custom("constant", true, |_| 1.0, |_| 0.0, |_| 0.0)
    }

    pub fn family(&self) -> WarpFamily {
        match self.kind {
            Kind::Cosh => WarpFamily::Cosh,
            Kind::CoshScaled(rate) => WarpFamily::CoshScaled(rate),
            Kind::Custom { .. } => WarpFamily::Custom,
        }
    }

    pub fn name(&self) -> String {
        match &self.kind {
            Kind::Cosh => "cosh".into(),
            Kind::CoshScaled(rate) => format!("cosh({rate}r)"),
            Kind::Custom { name, .. } => name.clone(),
        }
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn eval(&self, r: f64) -> f64 {
        match &self.kind {
            Kind::Cosh => r.cosh(),
            Kind::CoshScaled(c) => (c * r).cosh(),
            Kind::Custom { f, .. } => f(r),
        }
    }

    pub fn deriv1(&self, r: f64) -> f64 {
        match &self.kind {
            Kind::Cosh => r.sinh(),
            Kind::CoshScaled(c) => c * (c * r).sinh(),
            Kind::Custom { d1, .. } => d1(r),
        }
    }

    pub fn deriv2(&self, r: f64) -> f64 {
        match &self.kind {
            Kind::Cosh => r.cosh(),
            Kind::CoshScaled(c) => c * c * (c * r).cosh(),
            Kind::Custom { d2, .. } => d2(r),
        }
    }

    /// `f′/f`, the mean curvature of the slice at `r`.
    pub fn log_derivative(&self, r: f64) -> f64 {
        match &self.kind {
            Kind::Cosh => r.tanh(),
            Kind::CoshScaled(c) => c * (c * r).tanh(),
            Kind::Custom { .. } => self.deriv1(r) / self.eval(r),
        }
    }

    /// `1 − (f′/f)²` without the cancellation of the naive formula.
    ///
    /// For the cosh families this is `sech²`-based and stays accurate far out
    /// in the ends, where `tanh r` rounds to one.
    pub fn curvature_defect(&self, r: f64) -> f64 {
        match &self.kind {
            Kind::Cosh => r.cosh().powi(2).recip(),
            Kind::CoshScaled(c) => {
                let s = (c * r).cosh().powi(2).recip();
                (1.0 - c * c) + c * c * s
            }
            Kind::Custom { .. } => {
                let h = self.log_derivative(r);
                (1.0 - h) * (1.0 + h)
            }
        }
    }

    /// `f″/f`.
    pub fn curvature_ratio(&self, r: f64) -> f64 {
        match &self.kind {
            Kind::Cosh => 1.0,
            Kind::CoshScaled(c) => c * c,
            Kind::Custom { .. } => self.deriv2(r) / self.eval(r),
        }
    }
}

/// A closed surface of constant Gauss curvature.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BaseSurface {
    pub curvature: f64,
    pub area: f64,
    pub genus: Option<u32>,
    pub euler_char: i32,
}

impl BaseSurface {
    /// Closed hyperbolic surface of genus `g ≥ 2`, area `4π(g − 1)`.
    pub fn hyperbolic(genus: u32) -> Result<Self> {
        if genus < 2 {
            return Err(Error::domain(format!(
                "hyperbolic base needs genus >= 2, got {genus}"
            )));
        }
        Ok(Self {
            curvature: -1.0,
            area: 4.0 * PI * f64::from(genus - 1),
            genus: Some(genus),
            euler_char: 2 - 2 * genus as i32,
        })
    }

    /// Unit round sphere.
    pub fn sphere() -> Self {
        Self {
            curvature: 1.0,
            area: 4.0 * PI,
            genus: Some(0),
            euler_char: 2,
        }
    }

    /// Flat torus of the given area.
    pub fn flat_torus(area: f64) -> Result<Self> {
        Self::new(0.0, area, 0)
    }

    /// General constant-curvature base; Gauss–Bonnet `K·area = 2πχ` is enforced.
    pub fn new(curvature: f64, area: f64, euler_char: i32) -> Result<Self> {
        if !(area.is_finite() && area > 0.0) {
            return Err(Error::domain(format!("base area must be positive, got {area}")));
        }
        let lhs = curvature * area;
        let rhs = 2.0 * PI * f64::from(euler_char);
        if (lhs - rhs).abs() > 1e-9 * lhs.abs().max(rhs.abs()).max(1.0) {
            return Err(Error::validation(format!(
                "Gauss-Bonnet violated: K*area = {lhs}, 2*pi*chi = {rhs}"
            )));
        }
        let genus = if euler_char <= 2 && euler_char % 2 == 0 {
            Some(((2 - euler_char) / 2) as u32)
        } else {
            None
        };
        Ok(Self {
            curvature,
            area,
            genus,
            euler_char,
        })
    }
}

/// A radial interval `[lo, hi]`. Degenerate slabs (`lo == hi`) are allowed
/// and have zero volume.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Slab {
    pub lo: f64,
    pub hi: f64,
}

impl Slab {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::domain(format!("invalid slab [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn symmetric(half_width: f64) -> Result<Self> {
        Self::new(-half_width, half_width)
    }
}

/// `Σ ×_f ℝ` restricted to a working window `[−window, window]`.
#[derive(Debug, Clone)]
pub struct WarpedProduct {
    pub base: BaseSurface,
    pub warp: WarpFunction,
    window: f64,
    quadrature: QuadratureConfig,
}

impl WarpedProduct {
    /// Checks positivity (and declared evenness) of the warp on the default window.
    pub fn new(base: BaseSurface, warp: WarpFunction) -> Result<Self> {
        Self::with_window(base, warp, DEFAULT_WINDOW)
    }

    pub fn fuchsian(genus: u32) -> Result<Self> {
        Self::new(BaseSurface::hyperbolic(genus)?, WarpFunction::cosh())
    }

    pub fn with_window(base: BaseSurface, warp: WarpFunction, window: f64) -> Result<Self> {
        if !(window.is_finite() && window > 0.0) {
            return Err(Error::domain(format!("window must be positive, got {window}")));
        }
        const SAMPLES: usize = 2001;
        for k in 0..SAMPLES {
            let r = -window + 2.0 * window * k as f64 / (SAMPLES - 1) as f64;
            let f = warp.eval(r);
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::validation(format!(
                    "warp {} is not positive and finite at r = {r} (f = {f})",
                    warp.name()
                )));
            }
            if warp.is_even() {
                let g = warp.eval(-r);
                if (f - g).abs() > 1e-12 * f.max(1.0) {
                    return Err(Error::validation(format!(
                        "warp {} declared even but f({r}) - f({}) = {}",
                        warp.name(),
                        -r,
                        f - g
                    )));
                }
            }
        }
        Ok(Self {
            base,
            warp,
            window,
            quadrature: QuadratureConfig::default(),
        })
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn quadrature(&self) -> &QuadratureConfig {
        &self.quadrature
    }

    pub fn with_quadrature(mut self, cfg: QuadratureConfig) -> Self {
        self.quadrature = cfg;
        self
    }

    pub fn slice_area(&self, r: f64) -> f64 {
        self.base.area * self.warp.eval(r).powi(2)
    }

    /// Mean curvature `f′/f` of the slice `Σ × {r}`, toward `−∂r`.
    pub fn slice_mean_curvature(&self, r: f64) -> f64 {
        self.warp.log_derivative(r)
    }

    /// `∫_lo^hi f(t)² dt`: the slab volume per unit base area.
    pub fn unit_slab_volume(&self, lo: f64, hi: f64) -> Result<f64> {
        let w = &self.warp;
        Ok(integrate(|t| w.eval(t).powi(2), lo, hi, &self.quadrature)?.value)
    }

    pub fn slab_volume(&self, slab: &Slab) -> Result<f64> {
        Ok(self.base.area * self.unit_slab_volume(slab.lo, slab.hi)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed_cosh2(lo: f64, hi: f64) -> f64 {
        let prim = |t: f64| 0.5 * (t + t.sinh() * t.cosh());
        prim(hi) - prim(lo)
    }

    #[test]
    fn hyperbolic_base_satisfies_gauss_bonnet() {
        for g in 2..12 {
            let b = BaseSurface::hyperbolic(g).unwrap();
            assert!((b.curvature * b.area - 2.0 * PI * f64::from(b.euler_char)).abs() < 1e-12);
            assert_eq!(b.euler_char, 2 - 2 * g as i32);
        }
        assert!(BaseSurface::hyperbolic(1).is_err());
        assert!(BaseSurface::new(-1.0, 5.0, -2).is_err());
        assert_eq!(BaseSurface::new(-1.0, 8.0 * PI, -4).unwrap().genus, Some(3));
    }

    #[test]
    fn slice_area_examples() {
        let m = WarpedProduct::fuchsian(2).unwrap();
        assert!((m.slice_area(0.0) - 4.0 * PI).abs() < 1e-12);
        let expected = 4.0 * PI * 1f64.cosh().powi(2);
        assert!((m.slice_area(1.0) - expected).abs() < 1e-12);
        assert!((m.slice_area(1.0) - 29.921_757_996_130_6).abs() < 1e-9);
        let s = WarpedProduct::new(BaseSurface::sphere(), WarpFunction::cosh()).unwrap();
        assert!((s.slice_area(0.0) - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn slab_volume_examples() {
        let m = WarpedProduct::fuchsian(2).unwrap();
        let alpha = 1.199_678_640_257_734;
        let v = m.slab_volume(&Slab::symmetric(alpha).unwrap()).unwrap();
        let exact = 4.0 * PI * (alpha + alpha.sinh() * alpha.cosh());
        assert!(((v - exact) / exact).abs() < 1e-10);
        assert!((v - 49.40).abs() < 5e-3);
        assert_eq!(m.slab_volume(&Slab::new(0.0, 0.0).unwrap()).unwrap(), 0.0);
        let v1 = m.slab_volume(&Slab::symmetric(1.0).unwrap()).unwrap();
        let e1 = 4.0 * PI * (1.0 + 1f64.sinh() * 1f64.cosh());
        assert!(((v1 - e1) / e1).abs() < 1e-10);
        assert!((v1 - 35.35).abs() < 5e-3);
        assert!(Slab::new(1.0, 0.0).is_err());
    }

    #[test]
    fn slice_mean_curvature_examples() {
        let m = WarpedProduct::fuchsian(2).unwrap();
        assert_eq!(m.slice_mean_curvature(0.0), 0.0);
        let alpha = 1.199_678_640_257_734;
        assert!((m.slice_mean_curvature(alpha) - 1.0 / alpha).abs() < 1e-12);
        let h = m.slice_mean_curvature(25.0);
        assert!(h <= 1.0 && 1.0 - h < 1e-20);
    }

    #[test]
    fn volume_derivative_is_slice_area() {
        use rand::{Rng, SeedableRng};
        let m = WarpedProduct::fuchsian(2).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let h = 1e-4;
        for _ in 0..20 {
            let x: f64 = rng.gen_range(0.0..5.0);
            let hi = m.slab_volume(&Slab::new(0.0, x + h).unwrap()).unwrap();
            let lo = m.slab_volume(&Slab::new(0.0, (x - h).max(0.0)).unwrap()).unwrap();
            let d = (hi - lo) / (x + h - (x - h).max(0.0));
            let a = m.slice_area(x);
            assert!(((d - a) / a).abs() < 1e-6, "x={x}: {d} vs {a}");
        }
    }

    #[test]
    fn slab_volume_is_additive() {
        let m = WarpedProduct::fuchsian(3).unwrap();
        let cuts = [-4.0, -1.3, 0.2, 0.9, 3.7];
        for w in cuts.windows(3) {
            let a = m.slab_volume(&Slab::new(w[0], w[1]).unwrap()).unwrap();
            let b = m.slab_volume(&Slab::new(w[1], w[2]).unwrap()).unwrap();
            let ab = m.slab_volume(&Slab::new(w[0], w[2]).unwrap()).unwrap();
            assert!(((a + b - ab) / ab).abs() < 1e-12, "{w:?}");
            let exact = m.base.area * closed_cosh2(w[0], w[2]);
            assert!(((ab - exact) / exact).abs() < 1e-10);
        }
    }

    #[test]
    fn even_warp_has_even_slice_area() {
        let m = WarpedProduct::fuchsian(2).unwrap();
        for k in 0..=100 {
            let r = 0.25 * k as f64;
            assert_eq!(m.slice_area(r), m.slice_area(-r));
        }
    }

    #[test]
    fn derivative_consistency_of_builtin_warps() {
        let warps = [
            WarpFunction::cosh(),
            WarpFunction::cosh_scaled(0.7).unwrap(),
            WarpFunction::exponential(),
        ];
        for w in &warps {
            for &r in &[-2.0, -0.3, 0.4, 1.7] {
                let e3 = ((w.eval(r + 1e-3) - w.eval(r - 1e-3)) / 2e-3 - w.deriv1(r)).abs();
                let e4 = ((w.eval(r + 1e-4) - w.eval(r - 1e-4)) / 2e-4 - w.deriv1(r)).abs();
                let order = (e3 / e4).log10();
                assert!(order >= 1.9, "{} at {r}: order {order}", w.name());
            }
        }
    }

    #[test]
    fn rejects_bad_warps() {
        let base = BaseSurface::hyperbolic(2).unwrap();
        let sign_change = WarpFunction::custom("sinh", false, f64::sinh, f64::cosh, f64::sinh);
        assert!(WarpedProduct::new(base, sign_change).is_err());
        let fake_even = WarpFunction::custom("exp", true, f64::exp, f64::exp, f64::exp);
        assert!(WarpedProduct::new(base, fake_even).is_err());
        let overflow = WarpedProduct::with_window(base, WarpFunction::cosh(), 800.0);
        assert!(overflow.is_err());
    }

    #[test]
    fn curvature_defect_is_accurate_in_the_ends() {
        let w = WarpFunction::cosh();
        for &r in &[0.0f64, 1.0, 10.0, 20.0] {
            let exact = 1.0 / r.cosh().powi(2);
            assert!((w.curvature_defect(r) - exact).abs() <= 1e-15 * exact.max(1e-300));
        }
        let s = WarpFunction::cosh_scaled(1.0).unwrap();
        assert!((s.curvature_defect(3.0) - w.curvature_defect(3.0)).abs() < 1e-15);
    }
}

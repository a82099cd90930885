//! Brute-force validators for the radial reduction.
//!
//! [`DiscreteLine`] cuts `[−L, L]` into `n` cells. A radial region is a union
//! of cell intervals, its volume is the sum of cell weights `f²Δr` and its
//! perimeter is the sum of `f²` over its boundary faces (per unit base area).
//! Single intervals are searched exhaustively; unions with a fixed number of
//! components are minimised exactly by Dinkelbach iteration over a layered
//! dynamic program on the faces.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::radial::{radial_laplacian, RadialFunction};
use crate::warp::WarpedProduct;

pub const DEFAULT_MAX_COMPONENTS: usize = 2;

#[derive(Debug, Clone, Serialize)]
pub struct DiscreteLine {
    pub half_width: f64,
    pub n: usize,
    pub step: f64,
    /// Cell centres.
    pub nodes: Vec<f64>,
    /// `f(r_k)² Δr`.
    pub weights: Vec<f64>,
    /// `f²` at the `n + 1` faces.
    pub face_weights: Vec<f64>,
    #[serde(skip)]
    prefix: Vec<f64>,
}

impl DiscreteLine {
    pub fn new(m: &WarpedProduct, half_width: f64, n: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::domain(format!("half-width must be positive, got {half_width}")));
        }
        if n < 2 {
            return Err(Error::domain(format!("need at least 2 cells, got {n}")));
        }
        let step = 2.0 * half_width / n as f64;
        let face = |j: usize| -half_width + step * j as f64;
        let nodes: Vec<f64> = (0..n).map(|k| face(k) + 0.5 * step).collect();
        let weights: Vec<f64> = nodes.iter().map(|&r| m.warp.eval(r).powi(2) * step).collect();
        let face_weights: Vec<f64> = (0..=n).map(|j| m.warp.eval(face(j)).powi(2)).collect();
        if weights.iter().chain(&face_weights).any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::domain("f^2 must be positive and finite on the line"));
        }
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for w in &weights {
            acc += w;
            prefix.push(acc);
        }
        Ok(Self { half_width, n, step, nodes, weights, face_weights, prefix })
    }

    pub fn face_position(&self, j: usize) -> f64 {
        -self.half_width + self.step * j as f64
    }

    /// Volume of cells `lo..hi`.
    pub fn volume(&self, lo: usize, hi: usize) -> f64 {
        self.prefix[hi] - self.prefix[lo]
    }

    pub fn total_volume(&self) -> f64 {
        self.prefix[self.n]
    }

    /// Quotient of a union of disjoint, non-touching face intervals.
    pub fn quotient(&self, intervals: &[(usize, usize)]) -> f64 {
        let perimeter: f64 = intervals
            .iter()
            .map(|&(a, b)| self.face_weights[a] + self.face_weights[b])
            .sum();
        let volume: f64 = intervals.iter().map(|&(a, b)| self.volume(a, b)).sum();
        perimeter / volume
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentOptimum {
    pub components: usize,
    pub quotient: f64,
    /// Face indices `(lo, hi)` of each component.
    pub faces: Vec<(usize, usize)>,
    /// Radii of the faces.
    pub intervals: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteCheegerResult {
    pub quotient: f64,
    pub intervals: Vec<(f64, f64)>,
    pub by_components: Vec<ComponentOptimum>,
    /// Best single-interval quotient minus the overall best.
    pub improvement_over_single: f64,
}

fn optimum(line: &DiscreteLine, faces: Vec<(usize, usize)>) -> ComponentOptimum {
    ComponentOptimum {
        components: faces.len(),
        quotient: line.quotient(&faces),
        intervals: faces
            .iter()
            .map(|&(a, b)| (line.face_position(a), line.face_position(b)))
            .collect(),
        faces,
    }
}

/// Exhaustive search over all `(lo, hi)` face pairs.
///
/// Ties go to the smallest left face, then the smallest width.
pub fn best_single_interval(line: &DiscreteLine) -> ComponentOptimum {
    let fw = &line.face_weights;
    let (_, lo, hi) = (0..line.n)
        .into_par_iter()
        .map(|lo| {
            let mut best = (f64::INFINITY, lo, lo + 1);
            for hi in lo + 1..=line.n {
                let q = (fw[lo] + fw[hi]) / line.volume(lo, hi);
                if q < best.0 {
                    best = (q, lo, hi);
                }
            }
            best
        })
        .reduce(
            || (f64::INFINITY, usize::MAX, usize::MAX),
            |a, b| {
                if b.0 < a.0 || (b.0 == a.0 && (b.1, b.2 - b.1) < (a.1, a.2.wrapping_sub(a.1))) {
                    b
                } else {
                    a
                }
            },
        );
    optimum(line, vec![(lo, hi)])
}

/// Minimises `perimeter − λ·volume` over unions of exactly `k` components.
fn parametric_min(line: &DiscreteLine, k: usize, lambda: f64) -> Vec<(usize, usize)> {
    // state 2c: outside after c components, 2c − 1: inside component c
    let states = 2 * k + 1;
    let n = line.n;
    let fw = &line.face_weights;
    let mut cost = vec![f64::INFINITY; states];
    cost[0] = 0.0;
    let mut from = vec![0u8; (n + 1) * states]; // 0 stay, 1 toggled at this face
    let mut next = vec![f64::INFINITY; states];
    for j in 0..=n {
        for s in 0..states {
            let stay = cost[s];
            // crossing face j, in either direction, advances the state by one
            let toggled = if s > 0 { cost[s - 1] + fw[j] } else { f64::INFINITY };
            let (v, t) = if toggled < stay { (toggled, 1) } else { (stay, 0) };
            next[s] = v;
            from[j * states + s] = t;
        }
        if j < n {
            for s in (1..states).step_by(2) {
                next[s] -= lambda * line.weights[j];
            }
        } else {
            for s in (1..states).step_by(2) {
                next[s] = f64::INFINITY;
            }
        }
        std::mem::swap(&mut cost, &mut next);
    }
    let mut faces = Vec::with_capacity(k);
    let mut s = states - 1;
    let mut close = 0;
    for j in (0..=n).rev() {
        if s == 0 {
            break;
        }
        if from[j * states + s] == 1 {
            if s.is_multiple_of(2) {
                close = j;
            } else {
                faces.push((j, close));
            }
            s -= 1;
        }
    }
    faces.reverse();
    faces
}

/// Exact minimum over unions of exactly `k` non-touching intervals.
pub fn best_k_components(line: &DiscreteLine, k: usize) -> Result<ComponentOptimum> {
    if k == 0 || 2 * k > line.n + 1 {
        return Err(Error::domain(format!(
            "{k} components do not fit on a line with {} cells",
            line.n
        )));
    }
    // feasible start: k single cells separated by gaps
    let start: Vec<(usize, usize)> = (0..k).map(|i| (2 * i, 2 * i + 1)).collect();
    let mut lambda = line.quotient(&start);
    let mut faces = start;
    for _ in 0..200 {
        let candidate = parametric_min(line, k, lambda);
        let q = line.quotient(&candidate);
        if !(q < lambda) {
            return Ok(optimum(line, faces));
        }
        lambda = q;
        faces = candidate;
    }
    Err(Error::NotConverged { what: "Dinkelbach iteration".into(), iterations: 200 })
}

/// Discrete Cheeger quotient over unions of up to `max_components` intervals.
pub fn discrete_cheeger_intervals(line: &DiscreteLine, max_components: usize) -> Result<DiscreteCheegerResult> {
    if max_components == 0 {
        return Err(Error::domain("max_components must be at least 1"));
    }
    let mut by_components = vec![best_single_interval(line)];
    for k in 2..=max_components {
        by_components.push(best_k_components(line, k)?);
    }
    let best = by_components
        .iter()
        .min_by(|a, b| a.quotient.total_cmp(&b.quotient))
        .expect("at least one component count");
    Ok(DiscreteCheegerResult {
        quotient: best.quotient,
        intervals: best.intervals.clone(),
        improvement_over_single: by_components[0].quotient - best.quotient,
        by_components: by_components.clone(),
    })
}

/// `[u(r+h) − 2u(r) + u(r−h)]/h² + 2(f′/f)[u(r+h) − u(r−h)]/(2h)`.
pub fn fd_laplacian(m: &WarpedProduct, u: &RadialFunction, r: f64, h: f64) -> f64 {
    let (up, mid, down) = (u.eval(r + h), u.eval(r), u.eval(r - h));
    (up - 2.0 * mid + down) / (h * h) + 2.0 * m.warp.log_derivative(r) * (up - down) / (2.0 * h)
}

/// Largest `|Δu − Δ_h u|` over the grid.
pub fn fd_operator_check(m: &WarpedProduct, u: &RadialFunction, grid: &[f64], h: f64) -> Result<f64> {
    if !(h > 1e-6 && h < 1e-2) {
        return Err(Error::domain(format!("step must lie in (1e-6, 1e-2), got {h}")));
    }
    Ok(grid
        .par_iter()
        .map(|&r| (radial_laplacian(m, u, r) - fd_laplacian(m, u, r, h)).abs())
        .reduce(|| 0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheeger::{fuchsian_alpha, fuchsian_cheeger_constant};
    use crate::radial::uniform_grid;
    use crate::warp::{BaseSurface, Slab, WarpFunction};
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn fuchsian() -> WarpedProduct {
        WarpedProduct::fuchsian(2).unwrap()
    }

    fn brute_two(line: &DiscreteLine) -> f64 {
        let n = line.n;
        let mut best = f64::INFINITY;
        for a in 0..n {
            for b in a + 1..=n {
                for c in b + 1..n {
                    for d in c + 1..=n {
                        best = best.min(line.quotient(&[(a, b), (c, d)]));
                    }
                }
            }
        }
        best
    }

    #[test]
    fn line_weights_match_quadrature() {
        let m = fuchsian();
        let exact = m.unit_slab_volume(-3.0, 3.0).unwrap();
        let mut prev = f64::INFINITY;
        for n in [600, 1200, 2400] {
            let line = DiscreteLine::new(&m, 3.0, n).unwrap();
            let err = (line.total_volume() - exact).abs();
            assert!(err < prev / 3.5 || prev.is_infinite(), "n {n}: {err} vs {prev}");
            assert!(err < line.step.powi(2) * exact);
            prev = err;
        }
        let line = DiscreteLine::new(&m, 3.0, 100).unwrap();
        assert!(line.weights.iter().all(|w| *w > 0.0));
        assert_eq!(line.face_weights.len(), 101);
    }

    #[test]
    fn single_interval_matches_the_slab() {
        let line = DiscreteLine::new(&fuchsian(), 10.0, 4000).unwrap();
        let best = best_single_interval(&line);
        let a = fuchsian_alpha();
        assert!((best.quotient - fuchsian_cheeger_constant()).abs() < 1e-3);
        let (lo, hi) = best.intervals[0];
        assert!((lo + a).abs() < 1e-2 && (hi - a).abs() < 1e-2, "{lo} {hi}");
    }

    #[test]
    fn endpoints_converge_with_refinement() {
        let m = fuchsian();
        let a = fuchsian_alpha();
        for n in [2000, 4000, 8000] {
            let line = DiscreteLine::new(&m, 10.0, n).unwrap();
            let (lo, hi) = best_single_interval(&line).intervals[0];
            let err = (lo + a).abs().max((hi - a).abs());
            assert!(err <= line.step, "n {n}: endpoint error {err}, step {}", line.step);
        }
    }

    #[test]
    fn flat_cylinder_prefers_the_whole_line() {
        let base = BaseSurface::hyperbolic(2).unwrap();
        let m = WarpedProduct::new(base, WarpFunction::constant()).unwrap();
        let line = DiscreteLine::new(&m, 10.0, 1000).unwrap();
        let best = best_single_interval(&line);
        assert_eq!(best.faces, vec![(0, 1000)]);
        assert!((best.quotient - 0.1).abs() < 1e-12);
    }

    #[test]
    fn dynamic_program_agrees_with_brute_force() {
        let mut rng = StdRng::seed_from_u64(7);
        let m = fuchsian();
        for n in [12, 17, 24] {
            let mut line = DiscreteLine::new(&m, 2.0, n).unwrap();
            // random positive weights exercise configurations the cosh profile never produces
            line.weights.iter_mut().for_each(|w| *w = rng.gen_range(0.1..2.0));
            line.face_weights.iter_mut().for_each(|w| *w = rng.gen_range(0.1..2.0));
            line.prefix = std::iter::once(0.0)
                .chain(line.weights.iter().scan(0.0, |acc, w| {
                    *acc += w;
                    Some(*acc)
                }))
                .collect();
            let single = best_single_interval(&line);
            let dp_single = best_k_components(&line, 1).unwrap();
            assert!((single.quotient - dp_single.quotient).abs() < 1e-14);
            let two = best_k_components(&line, 2).unwrap();
            assert_eq!(two.faces.len(), 2);
            assert!((two.quotient - brute_two(&line)).abs() < 1e-12, "n {n}");
            assert!(two.faces[0].1 < two.faces[1].0);
        }
    }

    #[test]
    fn two_components_never_beat_one() {
        let line = DiscreteLine::new(&fuchsian(), 10.0, 2000).unwrap();
        let r = discrete_cheeger_intervals(&line, 3).unwrap();
        assert_eq!(r.by_components.len(), 3);
        assert!(r.improvement_over_single <= 0.0);
        assert!(r.by_components[1].quotient > r.by_components[0].quotient);
        assert!(r.by_components[2].quotient > r.by_components[1].quotient);
        assert!(discrete_cheeger_intervals(&line, 0).is_err());
    }

    #[test]
    fn fd_stencil_reproduces_the_identities() {
        let m = fuchsian();
        let grid = uniform_grid(-10.0, 10.0, 1000);
        let potential = RadialFunction::r_tanh_r();
        let worst = grid
            .iter()
            .map(|&r| (fd_laplacian(&m, &potential, r, 1e-4) - 2.0).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
        let tanh = RadialFunction::tanh();
        let worst = grid
            .iter()
            .map(|&r| fd_laplacian(&m, &tanh, r, 1e-4).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "{worst}");
        assert!(fd_operator_check(&m, &potential, &grid, 1e-4).unwrap() < 1e-6);
    }

    #[test]
    fn fd_stencil_is_second_order() {
        let m = fuchsian();
        let grid = uniform_grid(-10.0, 10.0, 1000);
        let sech = RadialFunction::sech();
        // below h ≈ 1e-3 rounding (~ε/h²) takes over from truncation
        let coarse = fd_operator_check(&m, &sech, &grid, 5e-3).unwrap();
        let fine = fd_operator_check(&m, &sech, &grid, 5e-4).unwrap();
        assert!(coarse / fine > 80.0, "{coarse} / {fine}");
        let tiny = fd_operator_check(&m, &sech, &grid, 1e-4).unwrap();
        assert!(tiny < 1e-6);
        assert!(fd_operator_check(&m, &sech, &grid, 1e-2).is_err());
        assert!(fd_operator_check(&m, &sech, &grid, 1e-7).is_err());
    }

    #[test]
    fn slab_quotient_and_line_quotient_agree() {
        let m = fuchsian();
        let line = DiscreteLine::new(&m, 4.0, 4000).unwrap();
        // faces at ±1 are 1500 and 2500
        let q = line.quotient(&[(1500, 2500)]);
        let exact = 2.0 * m.slice_area(1.0) / m.slab_volume(&Slab::symmetric(1.0).unwrap()).unwrap();
        assert!((q - exact).abs() < 1e-5);
    }
}

//! Adaptive Simpson quadrature with Richardson correction.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Relative accuracy target, measured against the magnitude of the integral.
    pub rel_tol: f64,
    /// Absolute floor for the accuracy target.
    pub abs_tol: f64,
    /// Maximum bisection depth of any panel.
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_depth: 48,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Sum of the per-panel error estimates.
    pub error: f64,
    pub evaluations: usize,
}

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrates `f` over `[a, b]`.
///
/// The interval is first cut into 16 panels to get a scale estimate, then
/// every panel is bisected until the two-level Simpson difference falls
/// below its share of the tolerance. Reversed limits flip the sign.
pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Integral>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain(format!(
            "integration limits must be finite, got [{a}, {b}]"
        )));
    }
    if b < a {
        let r = integrate(f, b, a, cfg)?;
        return Ok(Integral {
            value: -r.value,
            ..r
        });
    }

    const INITIAL_PANELS: usize = 16;
    let h = (b - a) / INITIAL_PANELS as f64;
    let mut evaluations = 0usize;
    let mut eval = |x: f64| {
        evaluations += 1;
        f(x)
    };

    let mut nodes = Vec::with_capacity(2 * INITIAL_PANELS + 1);
    for k in 0..=2 * INITIAL_PANELS {
        let x = if k == 2 * INITIAL_PANELS {
            b
        } else {
            a + 0.5 * h * k as f64
        };
        nodes.push((x, eval(x)));
    }
    let mut coarse = 0.0;
    let mut panels = Vec::with_capacity(INITIAL_PANELS);
    for k in 0..INITIAL_PANELS {
        let (pa, fa) = nodes[2 * k];
        let (_, fm) = nodes[2 * k + 1];
        let (pb, fb) = nodes[2 * k + 2];
        let whole = simpson(pa, pb, fa, fm, fb);
        coarse += whole;
        panels.push((pa, pb, fa, fm, fb, whole));
    }
    if !coarse.is_finite() {
        return Err(Error::Quadrature {
            lo: a,
            hi: b,
            achieved: f64::INFINITY,
            target: cfg.abs_tol,
        });
    }

    let target = (cfg.rel_tol * coarse.abs()).max(cfg.abs_tol);
    let mut stack: Vec<Panel> = panels
        .into_iter()
        .rev()
        .map(|(pa, pb, fa, fm, fb, whole)| Panel {
            a: pa,
            b: pb,
            fa,
            fm,
            fb,
            whole,
            tol: target / INITIAL_PANELS as f64,
            depth: 0,
        })
        .collect();

    let mut value = 0.0;
    let mut error = 0.0;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = eval(lm);
        let frm = eval(rm);
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        if !delta.is_finite() {
            return Err(Error::Quadrature {
                lo: p.a,
                hi: p.b,
                achieved: f64::INFINITY,
                target,
            });
        }
        if delta.abs() <= 15.0 * p.tol {
            value += left + right + delta / 15.0;
            error += delta.abs() / 15.0;
            continue;
        }
        if p.depth >= cfg.max_depth {
            return Err(Error::Quadrature {
                lo: p.a,
                hi: p.b,
                achieved: delta.abs() / 15.0,
                target: p.tol,
            });
        }
        stack.push(Panel {
            a: m,
            b: p.b,
            fa: p.fm,
            fm: frm,
            fb: p.fb,
            whole: right,
            tol: 0.5 * p.tol,
            depth: p.depth + 1,
        });
        stack.push(Panel {
            a: p.a,
            b: m,
            fa: p.fa,
            fm: flm,
            fb: p.fm,
            whole: left,
            tol: 0.5 * p.tol,
            depth: p.depth + 1,
        });
    }

    Ok(Integral {
        value,
        error,
        evaluations,
    })
}

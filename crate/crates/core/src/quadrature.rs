//! Adaptive Gauss–Legendre quadrature on intervals and rectangles.
//!
//! Each panel is integrated with an `n`-point and a `2n`-point rule; the
//! difference is the panel's error estimate and the `2n` value is kept.
//! Refinement proceeds in rounds: every panel whose estimate exceeds its
//! share of the tolerance is bisected (intervals) or quartered
//! (rectangles), and the new panels are evaluated in parallel. Panel sums
//! use [`pairwise_sum`] over a panel list whose order depends only on the
//! refinement history, so the result is independent of thread scheduling.

use crate::error::{Error, Result};
use crate::par::{map_slice, pairwise_sum};
use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::num::NonZeroUsize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Points of the low-order rule per axis; the high-order rule uses twice as many.
    pub order: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            order: 10,
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_panels: 1 << 16,
        }
    }
}

impl QuadConfig {
    fn validate(&self) -> Result<()> {
        if self.order == 0 || self.max_panels == 0 {
            return Err(Error::InvalidConfig("quadrature order and max_panels must be positive".into()));
        }
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0) || self.abs_tol + self.rel_tol <= 0.0 {
            return Err(Error::InvalidConfig("quadrature tolerances must be nonnegative, not both zero".into()));
        }
        Ok(())
    }

    fn tolerance(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    #[serde(with = "crate::complex_serde")]
    pub value: Complex64,
    pub est_error: f64,
    pub n_evals: usize,
}

/// Nodes and weights on `[-1, 1]`.
struct Rule(Vec<(f64, f64)>);

impl Rule {
    fn new(n: usize) -> Self {
        let n = NonZeroUsize::new(n).expect("positive rule size");
        Rule(GaussLegendre::new(n).as_node_weight_pairs().to_vec())
    }

    fn len(&self) -> usize {
        self.0.len()
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<B> {
    bounds: B,
    value: Complex64,
    error: f64,
}

type Interval = (f64, f64);
type Rect = ((f64, f64), (f64, f64));

fn rule_1d<F: Fn(f64) -> Complex64>(f: &F, (a, b): Interval, rule: &Rule) -> Complex64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let terms: Vec<Complex64> = rule.0.iter().map(|&(x, w)| f(mid + half * x) * w).collect();
    pairwise_sum(&terms) * half
}

fn rule_2d<F: Fn(f64, f64) -> Complex64>(f: &F, ((x0, x1), (y0, y1)): Rect, rule: &Rule) -> Complex64 {
    let (hx, mx) = (0.5 * (x1 - x0), 0.5 * (x0 + x1));
    let (hy, my) = (0.5 * (y1 - y0), 0.5 * (y0 + y1));
    let rows: Vec<Complex64> = rule
        .0
        .iter()
        .map(|&(u, wu)| {
            let x = mx + hx * u;
            let col: Vec<Complex64> = rule.0.iter().map(|&(v, wv)| f(x, my + hy * v) * wv).collect();
            pairwise_sum(&col) * wu
        })
        .collect();
    pairwise_sum(&rows) * (hx * hy)
}

/// Generic refinement loop shared by the 1D and 2D drivers.
fn refine<B, E, S>(initial: Vec<B>, cfg: &QuadConfig, evals_per_panel: usize, eval: E, split: S) -> Result<QuadResult>
where
    B: Copy + Send + Sync,
    E: Fn(B) -> Panel<B> + Sync + Send,
    S: Fn(B) -> Vec<B>,
{
    cfg.validate()?;
    let mut panels: Vec<Panel<B>> = map_slice(&initial, |&b| eval(b));
    let mut n_evals = panels.len() * evals_per_panel;
    loop {
        let values: Vec<Complex64> = panels.iter().map(|p| p.value).collect();
        let errors: Vec<f64> = panels.iter().map(|p| p.error).collect();
        let value = pairwise_sum(&values);
        let est_error = pairwise_sum(&errors);
        let tol = cfg.tolerance(value);
        if est_error <= tol {
            return Ok(QuadResult { value, est_error, n_evals });
        }
        let share = tol / panels.len() as f64;
        let mut next_bounds = Vec::with_capacity(panels.len() * 2);
        let mut keep = Vec::with_capacity(panels.len());
        for p in &panels {
            if p.error > share {
                let children = split(p.bounds);
                keep.push((None, next_bounds.len(), children.len()));
                next_bounds.extend(children);
            } else {
                keep.push((Some(*p), 0, 0));
            }
        }
        if panels.len() - keep.iter().filter(|k| k.0.is_none()).count() + next_bounds.len() > cfg.max_panels {
            return Err(Error::QuadratureNotConverged { est_error, tolerance: tol });
        }
        let fresh = map_slice(&next_bounds, |&b| eval(b));
        n_evals += fresh.len() * evals_per_panel;
        panels = keep
            .into_iter()
            .flat_map(|(kept, start, len)| match kept {
                Some(p) => vec![p],
                None => fresh[start..start + len].to_vec(),
            })
            .collect();
    }
}

fn panels_from(breaks: &[f64]) -> Result<Vec<Interval>> {
    if breaks.len() < 2 {
        return Err(Error::InvalidConfig("need at least two breakpoints".into()));
    }
    if breaks.iter().any(|b| !b.is_finite()) || breaks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("breakpoints must be finite and strictly increasing".into()));
    }
    Ok(breaks.windows(2).map(|w| (w[0], w[1])).collect())
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, starting from the panels
/// delimited by `breaks`.
pub fn integrate_1d<F>(f: F, breaks: &[f64], cfg: &QuadConfig) -> Result<QuadResult>
where
    F: Fn(f64) -> Complex64 + Sync + Send,
{
    let low = Rule::new(cfg.order);
    let high = Rule::new(2 * cfg.order);
    let evals = low.len() + high.len();
    refine(
        panels_from(breaks)?,
        cfg,
        evals,
        |b| {
            let value = rule_1d(&f, b, &high);
            let error = (value - rule_1d(&f, b, &low)).norm();
            Panel { bounds: b, value, error }
        },
        |(a, b)| {
            let m = 0.5 * (a + b);
            vec![(a, m), (m, b)]
        },
    )
}

/// Real-valued convenience wrapper around [`integrate_1d`].
pub fn integrate_1d_real<F>(f: F, breaks: &[f64], cfg: &QuadConfig) -> Result<QuadResult>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    integrate_1d(|x| Complex64::new(f(x), 0.0), breaks, cfg)
}

/// Tensor-product integration of `f(x, y)` over the rectangle spanned by the
/// breakpoint lists, starting from their product panels.
pub fn integrate_2d<F>(f: F, x_breaks: &[f64], y_breaks: &[f64], cfg: &QuadConfig) -> Result<QuadResult>
where
    F: Fn(f64, f64) -> Complex64 + Sync + Send,
{
    let xs = panels_from(x_breaks)?;
    let ys = panels_from(y_breaks)?;
    let initial: Vec<Rect> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect();
    let low = Rule::new(cfg.order);
    let high = Rule::new(2 * cfg.order);
    let evals = low.len().pow(2) + high.len().pow(2);
    refine(
        initial,
        cfg,
        evals,
        |b| {
            let value = rule_2d(&f, b, &high);
            let error = (value - rule_2d(&f, b, &low)).norm();
            Panel { bounds: b, value, error }
        },
        |((x0, x1), (y0, y1))| {
            let (xm, ym) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
            vec![((x0, xm), (y0, ym)), ((x0, xm), (ym, y1)), ((xm, x1), (y0, ym)), ((xm, x1), (ym, y1))]
        },
    )
}

/// `n + 1` breakpoints on `[a, b]` refined geometrically toward `b`:
/// `a, a + (b−a)/2, a + 3(b−a)/4, …, b`.
pub fn geometric_breaks_toward_end(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut out: Vec<f64> = (0..n).map(|k| b - (b - a) * 0.5f64.powi(k as i32)).collect();
    out.push(b);
    out
}

/// `n + 1` equally spaced breakpoints on `[a, b]`.
pub fn uniform_breaks(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|k| if k == n { b } else { a + (b - a) * k as f64 / n as f64 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn integrates_polynomial_exactly() {
        let r = integrate_1d_real(|x| 3.0 * x * x, &[0.0, 2.0], &QuadConfig::default()).unwrap();
        assert!((r.value.re - 8.0).abs() < 1e-14);
        assert!(r.est_error <= 1e-12);
    }

    #[test]
    fn adapts_to_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let cfg = QuadConfig { rel_tol: 1e-9, ..Default::default() };
        let r = integrate_1d_real(|x| 1.0 / x.sqrt(), &[0.0, 1.0], &cfg).unwrap();
        assert!((r.value.re - 2.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn rectangle_of_trig_product() {
        let r = integrate_2d(
            |x, y| Complex64::new(x.sin() * y.cos(), x),
            &[0.0, PI],
            &[0.0, PI / 2.0],
            &QuadConfig::default(),
        )
        .unwrap();
        assert!((r.value - Complex64::new(2.0, PI * PI / 2.0 * PI / 2.0)).norm() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let cfg = QuadConfig { max_panels: 4, rel_tol: 1e-14, abs_tol: 0.0, ..Default::default() };
        let err = integrate_1d_real(|x| (1.0 / x).sin(), &[1e-6, 1.0], &cfg).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }));
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(integrate_1d_real(|x| x, &[1.0, 0.0], &QuadConfig::default()).is_err());
        assert!(integrate_1d_real(|x| x, &[1.0], &QuadConfig::default()).is_err());
    }

    #[test]
    fn geometric_breaks_accumulate_at_end() {
        let b = geometric_breaks_toward_end(0.0, 1.0, 4);
        assert_eq!(b, vec![0.0, 0.5, 0.75, 0.875, 1.0]);
    }
}

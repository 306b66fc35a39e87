//! Power maps `g_c(z) = z^c / i^c` on the upper half-plane, their Schwarzian
//! derivatives, and three independent tests of univalence.
//!
//! `S(g_c) = ((1 − c²)/2)·dz²/z²`, and `g_c` is univalent on `ℍ²` exactly
//! when `|c − 1| ≤ 1` (for `Re c > 0`): `c·Log` maps `ℍ²` onto a slanted
//! strip whose vertical cross-sections have length `|c|π / cos(arg c)`, and
//! `exp` is injective on the strip iff that length is at most `2π`.

use crate::error::{Error, Result};
use crate::mobius::MobiusTransform;
use crate::par::map_range;
use crate::rng::substream;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A holomorphic map on (a region of) the upper half-plane.
pub trait HolomorphicMap: Sync {
    fn eval(&self, z: Complex64) -> Complex64;

    /// `(f′, f″, f‴)` in closed form, when known.
    fn jet(&self, _z: Complex64) -> Option<[Complex64; 3]> {
        None
    }
}

/// `g_c(z) = exp(c·Log z) / exp(c·Log i)` (principal `Log`); `g_0 = Log`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerMapSpec {
    #[serde(with = "crate::complex_serde")]
    pub c: Complex64,
}

impl PowerMapSpec {
    pub fn new(c: Complex64) -> Self {
        Self { c }
    }

    fn is_log(&self) -> bool {
        self.c == Complex64::new(0.0, 0.0)
    }
}

impl HolomorphicMap for PowerMapSpec {
    fn eval(&self, z: Complex64) -> Complex64 {
        if self.is_log() {
            z.ln()
        } else {
            // Log i = iπ/2
            (self.c * (z.ln() - I * FRAC_PI_2)).exp()
        }
    }

    fn jet(&self, z: Complex64) -> Option<[Complex64; 3]> {
        let zi = z.inv();
        if self.is_log() {
            return Some([zi, -zi * zi, zi * zi * zi * 2.0]);
        }
        let c = self.c;
        let g = self.eval(z);
        let d1 = c * g * zi;
        let d2 = d1 * (c - 1.0) * zi;
        let d3 = d2 * (c - 2.0) * zi;
        Some([d1, d2, d3])
    }
}

impl HolomorphicMap for MobiusTransform {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.apply(z)
    }

    fn jet(&self, z: Complex64) -> Option<[Complex64; 3]> {
        let inv = (self.c * z + self.d).inv();
        let d1 = inv * inv;
        let d2 = d1 * inv * self.c * -2.0;
        let d3 = d1 * inv * inv * self.c * self.c * 6.0;
        Some([d1, d2, d3])
    }
}

/// `m ∘ f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostComposed<M> {
    pub outer: MobiusTransform,
    pub inner: M,
}

impl<M: HolomorphicMap> HolomorphicMap for PostComposed<M> {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.outer.apply(self.inner.eval(z))
    }
}

/// Coefficient `C` of the quadratic differential `C·dz²/z²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadDiffCoefficient {
    #[serde(with = "crate::complex_serde")]
    pub c: Complex64,
}

impl QuadDiffCoefficient {
    /// Pointwise value `C / z²`.
    pub fn at(&self, z: Complex64) -> Complex64 {
        self.c / (z * z)
    }
}

/// `S(g_c) = C·dz²/z²` with `C = (1 − c²)/2`.
pub fn schwarzian_closed_form(c: Complex64) -> QuadDiffCoefficient {
    QuadDiffCoefficient { c: (1.0 - c * c) * 0.5 }
}

/// `f‴/f′ − (3/2)(f″/f′)²`.
pub fn schwarzian_from_jet([d1, d2, d3]: [Complex64; 3]) -> Complex64 {
    let r = d2 / d1;
    d3 / d1 - r * r * 1.5
}

/// Schwarzian from closed-form derivatives, for maps that provide them.
pub fn schwarzian_analytic<M: HolomorphicMap + ?Sized>(map: &M, z: Complex64) -> Option<Complex64> {
    map.jet(z).map(schwarzian_from_jet)
}

/// Schwarzian from a 7-point horizontal stencil `z + kh`, `k = −3..3`.
///
/// The stencil keeps `Im` fixed, so it never meets the branch cut of `Log`.
pub fn schwarzian_numeric<M: HolomorphicMap + ?Sized>(map: &M, z: Complex64, h: f64) -> Result<Complex64> {
    let out = || Error::StencilOutOfDomain(crate::format_complex(z));
    if !(z.im > 0.0) || !(h > 0.0) || !h.is_finite() || !z.re.is_finite() {
        return Err(out());
    }
    let mut f = [Complex64::new(0.0, 0.0); 7];
    for (k, slot) in f.iter_mut().enumerate() {
        let v = map.eval(z + h * (k as f64 - 3.0));
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(out());
        }
        *slot = v;
    }
    let [m3, m2, m1, f0, p1, p2, p3] = f;
    let d1 = (-m3 + m2 * 9.0 - m1 * 45.0 + p1 * 45.0 - p2 * 9.0 + p3) / (60.0 * h);
    let d2 = (m3 * 2.0 - m2 * 27.0 + m1 * 270.0 - f0 * 490.0 + p1 * 270.0 - p2 * 27.0 + p3 * 2.0) / (180.0 * h * h);
    let d3 = (m3 - m2 * 8.0 + m1 * 13.0 - p1 * 13.0 + p2 * 8.0 - p3) / (8.0 * h * h * h);
    if d1.norm() == 0.0 {
        return Err(out());
    }
    Ok(schwarzian_from_jet([d1, d2, d3]))
}

/// Default stencil step `1e−3·|z|`.
pub fn default_step(z: Complex64) -> f64 {
    1e-3 * z.norm()
}

/// Disk test: `|c − 1| ≤ 1`, boundary included.
pub fn univalence_criterion(c: Complex64) -> bool {
    (c - 1.0).norm() <= 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StripLength {
    Finite(f64),
    Infinite,
}

impl StripLength {
    pub fn at_most(&self, bound: f64) -> bool {
        matches!(*self, StripLength::Finite(l) if l <= bound)
    }
}

/// Length of a vertical line's intersection with `c·𝒮`, where `𝒮` is the
/// strip `0 < Im w < π`: `|c|π / cos(arg c) = |c|²π / Re c` for `Re c > 0`.
pub fn strip_intersection_length(c: Complex64) -> StripLength {
    if c.re > 0.0 {
        StripLength::Finite(c.norm_sqr() * PI / c.re)
    } else {
        StripLength::Infinite
    }
}

/// Strip test: cross-sections no longer than `2π`.
pub fn strip_criterion(c: Complex64) -> bool {
    strip_intersection_length(c).at_most(2.0 * PI)
}

/// Sampling region of [`empirical_injectivity`], in log-polar coordinates
/// `w = Log z`: `|Re w| ≤ LOG_RADIUS`, `ARG_MARGIN ≤ Im w ≤ π − ARG_MARGIN`.
pub const LOG_RADIUS: f64 = 12.0;
pub const ARG_MARGIN: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InjectivityVerdict {
    pub injective: bool,
    /// Two sample points (in `z`) with the same image, when found.
    pub witness: Option<[[f64; 2]; 2]>,
    pub n_samples: usize,
}

fn in_region(w: Complex64) -> bool {
    w.re.abs() <= LOG_RADIUS && w.im >= ARG_MARGIN && w.im <= PI - ARG_MARGIN
}

/// Newton on `G(w) = g(e^w) − target` in log coordinates.
fn newton_preimage(map: &PowerMapSpec, target: Complex64, mut w: Complex64) -> Option<Complex64> {
    for _ in 0..80 {
        let z = w.exp();
        let g = map.eval(z);
        let resid = g - target;
        if resid.norm() <= 1e-14 * target.norm() {
            return Some(w);
        }
        let dg = map.jet(z)?[0] * z;
        if dg.norm() == 0.0 || !dg.is_finite() {
            return None;
        }
        let mut step = resid / dg;
        if step.norm() > 2.0 {
            step = step * (2.0 / step.norm());
        }
        w -= step;
        if !(w.re.abs() < 4.0 * LOG_RADIUS && w.im.abs() < 4.0 * PI) {
            return None;
        }
    }
    let resid = map.eval(w.exp()) - target;
    (resid.norm() <= 1e-12 * target.norm()).then_some(w)
}

/// Monte-Carlo search for two far-apart points with (numerically) the same
/// image under `g_c`.
///
/// Each of the `n_samples` draws picks a point `z₁` and a Newton seed
/// uniformly in the log-polar region; Newton solves `g_c(z₂) = g_c(z₁)`
/// from the seed. The map is declared non-injective iff some pair of points
/// in the region is farther apart than `margin` (in log coordinates) while
/// their images differ by less than `margin·1e−3` relative to their size.
pub fn empirical_injectivity_detail(c: Complex64, n_samples: usize, rng_seed: u64, margin: f64) -> Result<InjectivityVerdict> {
    if n_samples < 100 {
        return Err(Error::InvalidConfig(format!("n_samples must be at least 100, got {n_samples}")));
    }
    if !(margin > 0.0) {
        return Err(Error::InvalidConfig("margin must be positive".into()));
    }
    let map = PowerMapSpec::new(c);
    let draw = |rng: &mut rand_chacha::ChaCha8Rng| {
        Complex64::new(rng.gen_range(-LOG_RADIUS..=LOG_RADIUS), rng.gen_range(ARG_MARGIN..=PI - ARG_MARGIN))
    };
    let hits = map_range(n_samples, |k| {
        let mut rng = substream(rng_seed, k as u64);
        let w1 = draw(&mut rng);
        let seed = draw(&mut rng);
        let target = map.eval(w1.exp());
        let w2 = newton_preimage(&map, target, seed)?;
        if !in_region(w2) || (w2 - w1).norm() <= margin {
            return None;
        }
        let g2 = map.eval(w2.exp());
        let scale = target.norm().max(g2.norm());
        ((g2 - target).norm() < margin * 1e-3 * scale).then_some((w1.exp(), w2.exp()))
    });
    let witness = hits.into_iter().flatten().next();
    Ok(InjectivityVerdict {
        injective: witness.is_none(),
        witness: witness.map(|(a, b)| [[a.re, a.im], [b.re, b.im]]),
        n_samples,
    })
}

pub fn empirical_injectivity(c: Complex64, n_samples: usize, rng_seed: u64, margin: f64) -> Result<bool> {
    empirical_injectivity_detail(c, n_samples, rng_seed, margin).map(|v| v.injective)
}

/// `|S(m∘g_c)(z) − S(g_c)(z)|`, both from the stencil.
pub fn mobius_invariance_check(c: Complex64, m: MobiusTransform, z: Complex64) -> Result<f64> {
    let g = PowerMapSpec::new(c);
    let h = default_step(z);
    let composed = PostComposed { outer: m, inner: g };
    Ok((schwarzian_numeric(&composed, z, h)? - schwarzian_numeric(&g, z, h)?).norm())
}

/// `|φ(e^s z)·e^{2s} − φ(z)|` for `φ = C/z²`.
pub fn s_invariance_check(coef: QuadDiffCoefficient, s: f64, z: Complex64) -> Result<f64> {
    if !(z.im > 0.0) {
        return Err(Error::OutOfDomain(format!("z = {} is not in the upper half-plane", crate::format_complex(z))));
    }
    let k = s.exp();
    Ok((coef.at(z * k) * (k * k) - coef.at(z)).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn closed_form_coefficients() {
        assert_eq!(schwarzian_closed_form(c(1.0, 0.0)).c, c(0.0, 0.0));
        assert_eq!(schwarzian_closed_form(c(0.0, 0.0)).c, c(0.5, 0.0));
        assert_eq!(schwarzian_closed_form(c(2.0, 0.0)).c, c(-1.5, 0.0));
    }

    #[test]
    fn power_map_normalisation() {
        let g = PowerMapSpec::new(c(1.3, 0.4));
        assert!((g.eval(I) - 1.0).norm() < 1e-15);
        assert!((PowerMapSpec::new(c(0.0, 0.0)).eval(I) - I * FRAC_PI_2).norm() < 1e-15);
    }

    #[test]
    fn numeric_schwarzian_matches_closed_form() {
        let ex = c(1.3, 0.4);
        let s = schwarzian_numeric(&PowerMapSpec::new(ex), I, 1e-3).unwrap();
        let expected = -(1.0 - ex * ex) * 0.5;
        assert!((s - expected).norm() < 1e-5 * expected.norm(), "{s} vs {expected}");
        let s = schwarzian_numeric(&PowerMapSpec::new(c(0.0, 0.0)), I, 1e-3).unwrap();
        assert!((s - c(-0.5, 0.0)).norm() < 1e-5 * 0.5);
    }

    #[test]
    fn analytic_and_stencil_paths_agree() {
        for ex in [c(0.5, 0.0), c(1.8, -0.3), c(0.0, 0.0), c(2.5, 1.0)] {
            let g = PowerMapSpec::new(ex);
            for z in [c(0.3, 0.9), c(-1.2, 0.8), c(0.0, 2.0)] {
                let a = schwarzian_analytic(&g, z).unwrap();
                let n = schwarzian_numeric(&g, z, default_step(z)).unwrap();
                let cf = schwarzian_closed_form(ex).at(z);
                assert!((a - cf).norm() <= 1e-12 * (1.0 + cf.norm()), "{ex} {z}");
                assert!((n - cf).norm() <= 1e-5 * (1.0 + cf.norm()), "{ex} {z}");
            }
        }
    }

    #[test]
    fn mobius_has_zero_schwarzian() {
        let m = MobiusTransform::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)).unwrap();
        let z = c(0.0, 2.0);
        assert!(schwarzian_numeric(&m, z, default_step(z)).unwrap().norm() < 1e-6);
        assert!(schwarzian_analytic(&m, z).unwrap().norm() < 1e-14);
    }

    #[test]
    fn stencil_rejects_lower_half_plane() {
        let g = PowerMapSpec::new(c(1.5, 0.0));
        assert!(matches!(schwarzian_numeric(&g, c(1.0, -0.5), 1e-3), Err(Error::StencilOutOfDomain(_))));
        assert!(matches!(schwarzian_numeric(&g, c(1.0, 0.0), 1e-3), Err(Error::StencilOutOfDomain(_))));
        assert!(schwarzian_numeric(&g, I, 0.0).is_err());
    }

    #[test]
    fn disk_and_strip_tests() {
        assert!(univalence_criterion(c(2.0, 0.0)));
        assert!(univalence_criterion(c(1.0, 0.0)));
        assert!(!univalence_criterion(c(2.2, 0.0)));
        assert_eq!(strip_intersection_length(c(1.0, 0.0)), StripLength::Finite(PI));
        assert_eq!(strip_intersection_length(c(2.0, 0.0)), StripLength::Finite(2.0 * PI));
        match strip_intersection_length(c(1.0, 1.0)) {
            StripLength::Finite(l) => assert!((l - 2.0 * PI).abs() < 1e-14),
            StripLength::Infinite => panic!(),
        }
        assert_eq!(strip_intersection_length(c(0.0, 1.0)), StripLength::Infinite);
        assert!(strip_criterion(c(2.0, 0.0)) && !strip_criterion(c(2.2, 0.0)));
    }

    #[test]
    fn empirical_injectivity_examples() {
        assert!(empirical_injectivity(c(1.5, 0.0), 10_000, 0, 0.05).unwrap());
        assert!(!empirical_injectivity(c(2.5, 0.0), 10_000, 0, 0.05).unwrap());
        assert!(empirical_injectivity(c(1.0, 0.0), 1_000, 0, 0.05).unwrap());
        assert!(empirical_injectivity(c(0.5, 0.0), 50, 0, 0.05).is_err());
    }

    #[test]
    fn injectivity_witness_really_collides() {
        let v = empirical_injectivity_detail(c(1.2, 1.4), 2_000, 9, 0.05).unwrap();
        let [[x1, y1], [x2, y2]] = v.witness.expect("outside the disk");
        let g = PowerMapSpec::new(c(1.2, 1.4));
        let (a, b) = (g.eval(c(x1, y1)), g.eval(c(x2, y2)));
        assert!((a - b).norm() < 1e-9 * a.norm());
        assert!((c(x1, y1) - c(x2, y2)).norm() > 1e-6);
    }

    #[test]
    fn invariance_checks() {
        assert_eq!(mobius_invariance_check(c(1.3, 0.2), MobiusTransform::IDENTITY, I).unwrap(), 0.0);
        let inv_shift = MobiusTransform::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)).unwrap();
        assert!(mobius_invariance_check(c(1.2, 0.0), inv_shift, I).unwrap() < 1e-5);
        let dilate = MobiusTransform::new(c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(mobius_invariance_check(c(0.5, 0.0), dilate, c(0.0, 2.0)).unwrap() < 1e-5);

        let half = QuadDiffCoefficient { c: c(0.5, 0.0) };
        assert!(s_invariance_check(half, 0.7, I).unwrap() < 1e-15);
        let z = c(1.0, 1.0);
        assert!(s_invariance_check(half, 2.0, z).unwrap() <= 1e-15 * half.at(z).norm());
        assert_eq!(s_invariance_check(QuadDiffCoefficient { c: c(0.0, 0.0) }, 1.3, z).unwrap(), 0.0);
    }
}

//! Geometric estimates in the upper half-space model of `ℍ³`: Margulis-tube
//! relations, half-space shadow areas in the quotient-cylinder metric,
//! visual measure, projection bounds, Poincaré series of cyclic loxodromic
//! groups, orthogeodesic-sum combinators and volume growth of
//! neighbourhoods of the convex core.

use crate::error::{Error, Result};
use crate::mobius::{HalfSpacePoint, MobiusTransform};
use crate::quadrature::{geometric_breaks_toward_end, integrate_1d_real, integrate_2d, QuadConfig};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2, TAU};

/// Default for the 3-dimensional Margulis constant; no sharpness is claimed.
pub const DEFAULT_EPSILON_3: f64 = 0.1;

/// `log(1 + √2)`, the horoball-intersection threshold.
pub fn log_one_plus_sqrt2() -> f64 {
    (1.0 + SQRT_2).ln()
}

/// Minimum tube radius required by the shadow lemma: `log(1+√2) + √2`.
pub fn shadow_radius_threshold() -> f64 {
    log_one_plus_sqrt2() + SQRT_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeSpec {
    #[serde(with = "crate::complex_serde")]
    pub l: Complex64,
    pub epsilon: f64,
    pub radius: f64,
}

impl TubeSpec {
    pub fn new(l: Complex64, epsilon: f64, radius: f64) -> Result<Self> {
        if !(l.re > 0.0 && epsilon > 0.0 && radius >= 0.0) {
            return Err(Error::InvalidConfig("tube needs Re L > 0, epsilon > 0, R ≥ 0".into()));
        }
        Ok(Self { l, epsilon, radius })
    }

    pub fn boundary_area(&self) -> f64 {
        tube_boundary_area(self.radius, self.l.re).expect("validated")
    }

    /// `π sinh(2R) Re 𝓛 ≥ π ε²`.
    pub fn is_consistent(&self) -> bool {
        self.boundary_area() >= PI * self.epsilon * self.epsilon * (1.0 - 1e-14)
    }
}

/// Boundary disk (in `ℂ`) of a half-space of `ℍ³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSpaceSpec {
    #[serde(with = "crate::complex_serde")]
    pub center: Complex64,
    pub radius: f64,
}

impl HalfSpaceSpec {
    pub fn new(center: Complex64, radius: f64) -> Result<Self> {
        if radius > 0.0 && radius.is_finite() {
            Ok(Self { center, radius })
        } else {
            Err(Error::InvalidConfig(format!("half-space radius must be positive, got {radius}")))
        }
    }

    /// Distance from `p` to the bounding hemisphere:
    /// `sinh d = ||z − c|² + h² − R²| / (2Rh)`.
    pub fn distance_from(&self, p: HalfSpacePoint) -> f64 {
        let num = ((p.z - self.center).norm_sqr() + p.h * p.h - self.radius * self.radius).abs();
        (num / (2.0 * self.radius * p.h)).asinh()
    }
}

/// Cyclic group generated by `z ↦ e^{t + iθ} z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoxodromicCyclicGroup {
    pub t: f64,
    pub theta: f64,
}

impl LoxodromicCyclicGroup {
    pub fn new(t: f64, theta: f64) -> Result<Self> {
        if t > 0.0 && t.is_finite() && theta.is_finite() {
            Ok(Self { t, theta })
        } else {
            Err(Error::InvalidConfig(format!("translation length must be positive, got {t}")))
        }
    }

    pub fn generator(&self) -> MobiusTransform {
        MobiusTransform::loxodromic(Complex64::new(self.t, self.theta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoreNeighborhoodSpec {
    /// `|χ(∂M)|`
    pub chi_abs: f64,
    /// Length `L(β_M)` of the bending lamination.
    pub bending_length: f64,
    pub offset: f64,
}

impl CoreNeighborhoodSpec {
    pub fn new(chi_abs: f64, bending_length: f64, offset: f64) -> Result<Self> {
        if chi_abs >= 0.0 && bending_length >= 0.0 && offset >= 0.0 {
            Ok(Self { chi_abs, bending_length, offset })
        } else {
            Err(Error::InvalidConfig("neighbourhood parameters must be nonnegative".into()))
        }
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::OutOfDomain(msg()))
    }
}

/// `area(∂T) = π sinh(2R) Re 𝓛`.
pub fn tube_boundary_area(radius: f64, re_l: f64) -> Result<f64> {
    require(radius >= 0.0 && re_l > 0.0, || format!("need R ≥ 0, Re L > 0; got {radius}, {re_l}"))?;
    Ok(PI * (2.0 * radius).sinh() * re_l)
}

/// `ε² / sinh(2R)`, a lower bound for `Re 𝓛` (and `|𝓛|`).
pub fn min_length_bound(epsilon: f64, radius: f64) -> Result<f64> {
    require(epsilon > 0.0 && radius > 0.0, || format!("need epsilon > 0, R > 0; got {epsilon}, {radius}"))?;
    Ok(epsilon * epsilon / (2.0 * radius).sinh())
}

/// Largest disk radius accepted by [`quotient_disk_area_exact`].
pub const MAX_QUOTIENT_DISK_RADIUS: f64 = 0.9;

/// Area of `|z| < r` in the metric `4|dz|²/|z² − 1|²` (the pull-back of
/// `|dw|²/|w|²` under `w = (z − 1)/(z + 1)`), by polar quadrature.
pub fn quotient_disk_area_exact(r: f64, cfg: &QuadConfig) -> Result<f64> {
    require(r > 0.0 && r <= MAX_QUOTIENT_DISK_RADIUS, || format!("need 0 < r ≤ 0.9, got {r}"))?;
    let rho = geometric_breaks_toward_end(0.0, r, 6);
    let phi: Vec<f64> = (0..=8).map(|k| k as f64 * TAU / 8.0).collect();
    let res = integrate_2d(
        |p, a| {
            let z = Complex64::from_polar(p, a);
            Complex64::new(4.0 * p / (z * z - 1.0).norm_sqr(), 0.0)
        },
        &rho,
        &phi,
        cfg,
    )?;
    Ok(res.value.re)
}

/// Closed form `2π log((1 + r²)/(1 − r²))` of [`quotient_disk_area_exact`].
pub fn quotient_disk_area_closed_form(r: f64) -> f64 {
    let r2 = r * r;
    TAU * (2.0 * r2.atanh())
}

/// `πr²` times the sup of the density on the disk: `4πr² / (1 − r²)²`.
/// Equals [`quotient_disk_area_bound`] at `d = log(1/r)` and strictly
/// exceeds the exact area for `r > 0`.
pub fn quotient_disk_area_sup_bound(r: f64) -> f64 {
    4.0 * PI * r * r / (1.0 - r * r).powi(2)
}

/// `π / sinh²(d)`; equals the exact area for the concentric disk of radius `e^{−d}`.
pub fn quotient_disk_area_bound(d: f64) -> Result<f64> {
    require(d > 0.0, || format!("need d > 0, got {d}"))?;
    Ok(PI / d.sinh().powi(2))
}

/// Visual area of a half-space at distance `d`: `2π(1 − tanh d)`.
pub fn visual_area_exact(d: f64) -> Result<f64> {
    require(d >= 0.0, || format!("need d ≥ 0, got {d}"))?;
    // 1 − tanh d = 2/(1 + e^{2d}), without cancellation at large d
    Ok(2.0 * TAU / (1.0 + (2.0 * d).exp()))
}

/// Certified `log(2 coth ε)` bound on the distance to the projected half-space.
pub fn projection_halfspace_distance_bound(epsilon: f64) -> Result<f64> {
    require(epsilon > 0.0, || format!("need epsilon > 0, got {epsilon}"))?;
    Ok((2.0 / epsilon.tanh()).ln())
}

/// Opposite side of a Lambert quadrilateral: `sinh d₁ · sinh d₂ = 1`.
pub fn lambert_quadrilateral(d1: f64) -> Result<f64> {
    require(d1 > 0.0, || format!("need d1 > 0, got {d1}"))?;
    Ok((1.0 / d1.sinh()).asinh())
}

/// `d(α, H) = R_{ε₃} + ℓ(u) − log(1 + √2)`, valid once `R_{ε₃} ≥ log(1+√2) + √2`.
pub fn halfspace_shadow_distance(r_eps3: f64, ell_u: f64) -> Result<f64> {
    if !(r_eps3 >= shadow_radius_threshold()) {
        return Err(Error::HypothesisViolated(format!(
            "tube radius {r_eps3} is below log(1+√2) + √2 = {}",
            shadow_radius_threshold()
        )));
    }
    if !(ell_u >= 0.0) {
        return Err(Error::HypothesisViolated(format!("orthogeodesic length must be nonnegative, got {ell_u}")));
    }
    Ok(r_eps3 + ell_u - log_one_plus_sqrt2())
}

/// `16π e^{−2d}` with `d` from [`halfspace_shadow_distance`].
pub fn shadow_area_bound(r_eps3: f64, ell_u: f64) -> Result<f64> {
    Ok(shadow_area_from_distance(halfspace_shadow_distance(r_eps3, ell_u)?))
}

/// `16π e^{−2d}`; dominates `π/sinh²(d)` whenever `d ≥ log √2`.
pub fn shadow_area_from_distance(d: f64) -> f64 {
    16.0 * PI * (-2.0 * d).exp()
}

/// `d(x, gⁿx)` for `x` at distance `r` from the axis:
/// `cosh d = cosh²r·cosh(nt) − sinh²r·cos(nθ)`.
pub fn loxodromic_displacement(g: LoxodromicCyclicGroup, n: i64, r: f64) -> f64 {
    // cosh d − 1 written without cancellation so that n = 0 gives exactly 0
    let nf = n as f64;
    let x = 2.0 * (r.cosh() * (0.5 * nf * g.t).sinh()).powi(2)
        + 2.0 * (r.sinh() * (0.5 * nf * g.theta).sin()).powi(2);
    (x + (x * (2.0 + x)).sqrt()).ln_1p()
}

/// Same displacement computed by applying the matrix power `gⁿ` to the
/// point `(sinh r, 1)` of upper half-space.
pub fn loxodromic_displacement_by_matrix(g: LoxodromicCyclicGroup, n: i64, r: f64) -> f64 {
    let p = HalfSpacePoint::new(Complex64::new(r.sinh(), 0.0), 1.0);
    let q = g.generator().pow(n).apply_half_space(p);
    p.distance(&q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSum {
    pub value: f64,
    /// Largest `|n|` included.
    pub n_max: u64,
    /// Bound on the omitted tail.
    pub tail_bound: f64,
}

/// `Σ_{n∈ℤ} e^{−2 d(x, gⁿx)}`, truncated once the tail bound
/// `2e^{−2(N+1)t}/(1 − e^{−2t})` (from `d(x, gⁿx) ≥ |n|t`) drops below `tail_tol`.
pub fn poincare_series_cyclic(g: LoxodromicCyclicGroup, r: f64, tail_tol: f64) -> Result<SeriesSum> {
    require(tail_tol > 0.0 && r >= 0.0, || format!("need tail_tol > 0 and r ≥ 0, got {tail_tol}, {r}"))?;
    let q = (-2.0 * g.t).exp();
    let tail = |n: u64| 2.0 * (-2.0 * (n as f64 + 1.0) * g.t).exp() / (1.0 - q);
    let mut terms = vec![1.0];
    let mut n = 0u64;
    while tail(n) >= tail_tol {
        n += 1;
        let ni = n as i64;
        terms.push((-2.0 * loxodromic_displacement(g, ni, r)).exp());
        terms.push((-2.0 * loxodromic_displacement(g, -ni, r)).exp());
    }
    // smallest terms first
    let value = terms.iter().rev().sum();
    Ok(SeriesSum { value, n_max: n, tail_bound: tail(n) })
}

/// Uniform bound `8 coth²(ε)` for points of injectivity radius `≥ ε`.
pub fn poincare_uniform_bound(epsilon: f64) -> Result<f64> {
    require(epsilon > 0.0, || format!("need epsilon > 0, got {epsilon}"))?;
    Ok(8.0 / epsilon.tanh().powi(2))
}

/// `N e^{2D} P`.
pub fn orthosum_bound(n: u64, diameter: f64, poincare: f64) -> Result<f64> {
    require(n >= 1 && diameter >= 0.0 && poincare >= 0.0, || "need N ≥ 1, D ≥ 0, P ≥ 0".to_string())?;
    Ok(n as f64 * (2.0 * diameter).exp() * poincare)
}

/// `A_t = 2π|χ| cosh²t + L sinh t cosh t`.
pub fn neighborhood_boundary_area(spec: &CoreNeighborhoodSpec) -> f64 {
    let t = spec.offset;
    TAU * spec.chi_abs * t.cosh().powi(2) + spec.bending_length * t.sinh() * t.cosh()
}

/// `V_ε = ∫₀^ε A_t dt = 2π|χ|(ε/2 + sinh(2ε)/4) + L sinh²(ε)/2`, with `ε = spec.offset`.
pub fn neighborhood_volume(spec: &CoreNeighborhoodSpec) -> f64 {
    let e = spec.offset;
    TAU * spec.chi_abs * (0.5 * e + 0.25 * (2.0 * e).sinh()) + 0.5 * spec.bending_length * e.sinh().powi(2)
}

/// [`neighborhood_volume`] by quadrature of [`neighborhood_boundary_area`].
pub fn neighborhood_volume_quadrature(spec: &CoreNeighborhoodSpec, cfg: &QuadConfig) -> Result<f64> {
    if spec.offset == 0.0 {
        return Ok(0.0);
    }
    let area = |t: f64| neighborhood_boundary_area(&CoreNeighborhoodSpec { offset: t, ..*spec });
    Ok(integrate_1d_real(area, &[0.0, spec.offset], cfg)?.value.re)
}

/// `(A + B/δ)|χ|` with caller-supplied constants `A`, `B`.
pub fn bending_length_bound(chi_abs: f64, delta: f64, a: f64, b: f64) -> Result<f64> {
    require(delta > 0.0 && chi_abs >= 0.0, || format!("need delta > 0 and chi ≥ 0, got {delta}, {chi_abs}"))?;
    Ok((a + b / delta) * chi_abs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tube_relations() {
        assert_eq!(tube_boundary_area(0.0, 0.3).unwrap(), 0.0);
        let (eps, r) = (0.1, 1.0);
        let re_l = min_length_bound(eps, r).unwrap();
        assert_relative_eq!(tube_boundary_area(r, re_l).unwrap(), PI * eps * eps, max_relative = 1e-15);
        assert_relative_eq!(tube_boundary_area(1.0, 0.01).unwrap(), PI * 2f64.sinh() * 0.01);
        assert!((tube_boundary_area(1.0, 0.01).unwrap() - 0.11394).abs() < 1e-5);
        assert!((min_length_bound(0.1, 1.0).unwrap() - 2.757e-3).abs() < 1e-6);
        assert!(min_length_bound(1e-9, 1.0).unwrap() < 1e-17);
        assert!(min_length_bound(0.1, 50.0).unwrap() < 1e-40);
        let spec = TubeSpec::new(Complex64::new(re_l, 0.2), eps, r).unwrap();
        assert!(spec.is_consistent());
        assert!(!TubeSpec::new(Complex64::new(re_l * 0.5, 0.0), eps, r).unwrap().is_consistent());
    }

    #[test]
    fn quotient_disk_area() {
        let cfg = QuadConfig::default();
        let a = quotient_disk_area_exact(0.5, &cfg).unwrap();
        assert_relative_eq!(a, quotient_disk_area_closed_form(0.5), max_relative = 1e-10);
        assert_relative_eq!(quotient_disk_area_sup_bound(0.5), 16.0 * PI / 9.0, max_relative = 1e-14);
        for k in 1..=9 {
            let r = 0.1 * k as f64;
            assert!(quotient_disk_area_exact(r, &cfg).unwrap() < quotient_disk_area_sup_bound(r));
            let b = quotient_disk_area_bound((1.0 / r).ln()).unwrap();
            assert_relative_eq!(b, quotient_disk_area_sup_bound(r), max_relative = 1e-12);
        }
        assert_relative_eq!(quotient_disk_area_bound(2f64.ln()).unwrap(), 16.0 * PI / 9.0, max_relative = 1e-14);
        let tiny = quotient_disk_area_exact(1e-3, &cfg).unwrap();
        assert_relative_eq!(tiny, 4.0 * PI * 1e-6, max_relative = 1e-5);
        assert!((quotient_disk_area_sup_bound(0.3) - 1.3655).abs() < 1e-3);
        assert!((quotient_disk_area_bound(1.0).unwrap() - 2.2744).abs() < 1e-3);
        assert!(quotient_disk_area_exact(0.95, &cfg).is_err());
        let d = 12.0;
        assert_relative_eq!(quotient_disk_area_bound(d).unwrap(), 4.0 * PI * (-2.0 * d).exp(), max_relative = 1e-9);
    }

    #[test]
    fn concentric_half_space_distance_is_log_inverse_radius() {
        let r = 0.37;
        let h = HalfSpaceSpec::new(Complex64::new(0.0, 0.0), r).unwrap();
        // closest point of the geodesic with endpoints ±1 is its top (0, 1)
        let top = HalfSpacePoint::new(Complex64::new(0.0, 0.0), 1.0);
        assert_relative_eq!(h.distance_from(top), (1.0 / r).ln(), max_relative = 1e-14);
        for k in 1..20 {
            let phi = PI * k as f64 / 20.0;
            let p = HalfSpacePoint::new(Complex64::new(phi.cos(), 0.0), phi.sin());
            assert!(h.distance_from(p) >= (1.0 / r).ln() - 1e-14);
        }
    }

    #[test]
    fn visual_and_projection() {
        assert_eq!(visual_area_exact(0.0).unwrap(), TAU);
        let d = 5.0;
        let ratio = visual_area_exact(d).unwrap() / (PI * (-2.0 * d).exp());
        assert_relative_eq!(ratio, 4.0 / (1.0 + (-2.0 * d).exp()), max_relative = 1e-12);
        assert!((projection_halfspace_distance_bound(1.0).unwrap() - 0.9657).abs() < 1e-3);
        assert!((projection_halfspace_distance_bound(40.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((projection_halfspace_distance_bound(0.1).unwrap() - 3.0).abs() < 1e-2);
    }

    #[test]
    fn lambert_is_an_involution() {
        let one = 1f64.asinh();
        assert_relative_eq!(lambert_quadrilateral(one).unwrap(), one, max_relative = 1e-15);
        assert!((lambert_quadrilateral(1.0).unwrap() - 0.7719).abs() < 1e-4);
        for d in [0.1, 0.5, 2.0, 7.0] {
            let back = lambert_quadrilateral(lambert_quadrilateral(d).unwrap()).unwrap();
            assert!((back - d).abs() < 1e-12);
        }
    }

    #[test]
    fn shadow_distances() {
        let r0 = shadow_radius_threshold();
        let d = halfspace_shadow_distance(r0, 0.0).unwrap();
        assert_relative_eq!(d, SQRT_2, max_relative = 1e-15);
        assert!(d >= SQRT_2.ln());
        assert!((halfspace_shadow_distance(3.0, 1.0).unwrap() - 3.1186).abs() < 1e-4);
        assert!(halfspace_shadow_distance(3.0, 0.0).unwrap() < halfspace_shadow_distance(3.0, 0.5).unwrap());
        assert!(matches!(halfspace_shadow_distance(2.0, 0.0), Err(Error::HypothesisViolated(_))));
        assert!((shadow_area_bound(3.0, 1.0).unwrap() - 0.0983).abs() < 1e-4);
        assert!(shadow_area_bound(3.0, 400.0).unwrap() < 1e-300);
        let d = SQRT_2.ln();
        assert_relative_eq!(shadow_area_from_distance(d), 8.0 * PI, max_relative = 1e-15);
        assert!(shadow_area_from_distance(d) >= quotient_disk_area_bound(d).unwrap());
    }

    #[test]
    fn displacement_formula_vs_matrix() {
        let g = LoxodromicCyclicGroup::new(1.0, PI / 3.0).unwrap();
        assert_relative_eq!(loxodromic_displacement(g, 3, 0.0), 3.0, max_relative = 1e-14);
        assert_relative_eq!(loxodromic_displacement(g, -2, 0.0), 2.0, max_relative = 1e-14);
        assert_eq!(loxodromic_displacement(g, 0, 0.7), 0.0);
        let a = loxodromic_displacement(g, 2, 0.5);
        let b = loxodromic_displacement_by_matrix(g, 2, 0.5);
        assert!((a - b).abs() < 1e-9, "{a} {b}");
    }

    #[test]
    fn poincare_series_on_axis() {
        let g = LoxodromicCyclicGroup::new(1.0, 0.3).unwrap();
        let s = poincare_series_cyclic(g, 0.0, 1e-15).unwrap();
        assert!((s.value - 1.0 / 1f64.tanh()).abs() < 1e-12);
        assert!((s.value - 1.3130).abs() < 1e-4);
        for t in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let g = LoxodromicCyclicGroup::new(t, 0.0).unwrap();
            let v = poincare_series_cyclic(g, 0.0, 1e-14).unwrap().value;
            assert!(v <= poincare_uniform_bound(t / 2.0).unwrap());
        }
        let far = poincare_series_cyclic(LoxodromicCyclicGroup::new(40.0, 0.0).unwrap(), 0.0, 1e-15).unwrap();
        assert!((far.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn combinators() {
        assert_eq!(orthosum_bound(1, 0.0, 2.5).unwrap(), 2.5);
        assert!((orthosum_bound(4, 1.0, 2.0).unwrap() - 59.11).abs() < 1e-2);
        assert!(orthosum_bound(0, 1.0, 2.0).is_err());
        assert_eq!(bending_length_bound(0.0, 0.3, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(bending_length_bound(2.0, 0.5, 1.0, 1.0).unwrap(), 6.0);
        assert!(bending_length_bound(2.0, 0.25, 1.0, 1.0).unwrap() > bending_length_bound(2.0, 0.5, 1.0, 1.0).unwrap());
    }

    #[test]
    fn neighborhood_growth() {
        let cfg = QuadConfig::default();
        let s = CoreNeighborhoodSpec::new(3.0, 1.5, 0.0).unwrap();
        assert_eq!(neighborhood_boundary_area(&s), TAU * 3.0);
        assert_eq!(neighborhood_volume(&s), 0.0);
        let s = CoreNeighborhoodSpec::new(2.0, 0.0, 1.0).unwrap();
        assert!((neighborhood_boundary_area(&s) - 29.93).abs() < 1e-2);
        assert_relative_eq!(neighborhood_volume(&s), 4.0 * PI * (0.5 + 2f64.sinh() / 4.0), max_relative = 1e-14);
        assert!((neighborhood_volume(&s) - 17.676).abs() < 2e-3);
        let q = neighborhood_volume_quadrature(&s, &cfg).unwrap();
        assert_relative_eq!(q, neighborhood_volume(&s), max_relative = 1e-8);
        let s = CoreNeighborhoodSpec::new(0.0, 1.0, 1.0).unwrap();
        assert!((neighborhood_volume(&s) - 0.6908).abs() < 1e-3);
        assert_relative_eq!(neighborhood_boundary_area(&s), 1f64.sinh() * 1f64.cosh());
    }
}

//! Pairings of harmonic Beltrami differentials with quadratic differentials
//! on quotient annuli `ℍ² / ⟨z ↦ e^s z⟩`, and their limit functionals.
//!
//! In the strip model `𝒮 = {0 < Im w < π}` (`z = e^w`) the annulus has
//! fundamental domain `[0, s] × (0, π)`, hyperbolic density `1/sin² y`, and
//! `dz²/z²` becomes `dw²`. For `φ = ((1 − c²)/2)·dz²/z²` the associated
//! Beltrami differential is `μ_φ = sin²y·(c̄² − 1)/2`, and
//! `⟨μ_φ, dz²/z²⟩_s = s·π(c̄² − 1)/4`.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_2d, uniform_breaks, QuadConfig, QuadResult};
use crate::schwarzian::{default_step, HolomorphicMap, PowerMapSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub type PairingResult = QuadResult;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    /// Translation length of the deck transformation `z ↦ e^s z`.
    pub s: f64,
}

impl AnnulusSpec {
    pub fn new(s: f64) -> Result<Self> {
        if s > 0.0 && s.is_finite() {
            Ok(Self { s })
        } else {
            Err(Error::InvalidConfig(format!("annulus parameter s must be positive, got {s}")))
        }
    }
}

/// Boundary length `ℓ` and complex length `𝓛` of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthPair {
    pub ell: f64,
    #[serde(with = "crate::complex_serde")]
    pub l: Complex64,
}

impl LengthPair {
    pub fn new(ell: f64, l: Complex64) -> Result<Self> {
        if !(ell > 0.0 && l.re > 0.0) || !ell.is_finite() || !l.is_finite() {
            return Err(Error::InvalidConfig(format!("need ell > 0 and Re L > 0, got ell = {ell}, L = {l}")));
        }
        Ok(Self { ell, l })
    }

    pub fn ratio(&self) -> Complex64 {
        self.l / self.ell
    }

    /// Optional sanity predicate `Re 𝓛 ≤ 2ℓ`; reported, never enforced.
    pub fn real_length_at_most_twice_ell(&self) -> bool {
        self.l.re <= 2.0 * self.ell
    }
}

/// Strip-model pairing `∫∫_{[0,s]×(0,π)} μ(w)·ψ(w) dx dy`.
pub fn pair_strip_with<Mu, Psi>(mu: Mu, psi: Psi, annulus: AnnulusSpec, cfg: &QuadConfig) -> Result<PairingResult>
where
    Mu: Fn(Complex64) -> Complex64 + Sync + Send,
    Psi: Fn(Complex64) -> Complex64 + Sync + Send,
{
    // finer initial panels next to the boundary lines y = 0, π
    let ys = [0.0, PI / 16.0, PI / 8.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, 7.0 * PI / 8.0, 15.0 * PI / 16.0, PI];
    let xs = uniform_breaks(0.0, annulus.s, 2);
    integrate_2d(
        |x, y| {
            let w = Complex64::new(x, y);
            mu(w) * psi(w)
        },
        &xs,
        &ys,
        cfg,
    )
}

/// Harmonic Beltrami differential `μ_φ(w) = sin²y·(c̄² − 1)/2` of `S(g_c)`.
pub fn beltrami_of_power_map(c: Complex64) -> impl Fn(Complex64) -> Complex64 + Sync + Send {
    let coef = (c.conj() * c.conj() - 1.0) * 0.5;
    move |w: Complex64| coef * w.im.sin().powi(2)
}

/// `⟨μ_φ, dz²/z²⟩_s` by quadrature.
pub fn pair_strip(c: Complex64, annulus: AnnulusSpec, cfg: &QuadConfig) -> Result<PairingResult> {
    pair_strip_with(beltrami_of_power_map(c), |_| Complex64::new(1.0, 0.0), annulus, cfg)
}

/// Closed form `s·π(c̄² − 1)/4` of [`pair_strip`].
pub fn pair_strip_closed_form(c: Complex64, annulus: AnnulusSpec) -> Complex64 {
    (c.conj() * c.conj() - 1.0) * (annulus.s * PI / 4.0)
}

/// `F_ℓ(c) = (Re(c²) − 1)/2`.
#[allow(non_snake_case)]
pub fn F_ell(c: Complex64) -> f64 {
    ((c * c).re - 1.0) * 0.5
}

/// `F_𝓛(c) = c(c̄² − 1)/4`.
#[allow(non_snake_case)]
pub fn F_L(c: Complex64) -> Complex64 {
    c * (c.conj() * c.conj() - 1.0) * 0.25
}

/// `F_ℓ` recovered from the pairing: `(2/π)·Re⟨μ_φ, dz²/z²⟩_1`.
pub fn f_ell_by_quadrature(c: Complex64, cfg: &QuadConfig) -> Result<f64> {
    Ok(2.0 / PI * pair_strip(c, AnnulusSpec { s: 1.0 }, cfg)?.value.re)
}

/// `F_𝓛` recovered from the pairing: `(c/π)·⟨μ_φ, dz²/z²⟩_1`.
pub fn f_l_by_quadrature(c: Complex64, cfg: &QuadConfig) -> Result<Complex64> {
    Ok(c / PI * pair_strip(c, AnnulusSpec { s: 1.0 }, cfg)?.value)
}

/// Limit of `dc` along the flow: `¼(|c|⁴ − 2c·Re(c²) − c² + 2c)`.
pub fn dc_limit(c: Complex64) -> Complex64 {
    let c2 = c * c;
    (Complex64::from(c.norm_sqr().powi(2)) - c * (2.0 * c2.re) - c2 + c * 2.0) * 0.25
}

/// Pre-limit `F_𝓛` on the annulus of parameter `s`:
/// `(c/(πs))·⟨μ_φ, c⁻²·g*(dz²/z²)⟩_s`, with the pullback
/// `g*(dz²/z²) = (g′(z)·z/g(z))²·dw²` evaluated from `map`'s derivative
/// (closed form when available, otherwise the 7-point stencil).
pub fn prelimit_f_l<M: HolomorphicMap>(map: &M, c: Complex64, annulus: AnnulusSpec, cfg: &QuadConfig) -> Result<Complex64> {
    if c.norm() == 0.0 {
        return Err(Error::OutOfDomain("pre-limit F_L needs c ≠ 0".into()));
    }
    let c2_inv = (c * c).inv();
    let pullback = |w: Complex64| {
        let z = w.exp();
        let d1 = match map.jet(z) {
            Some(j) => j[0],
            None => first_derivative_stencil(map, z),
        };
        let r = d1 * z / map.eval(z);
        r * r * c2_inv
    };
    let pairing = pair_strip_with(beltrami_of_power_map(c), pullback, annulus, cfg)?;
    Ok(c / (PI * annulus.s) * pairing.value)
}

/// [`prelimit_f_l`] for the power map `g_c` itself.
pub fn prelimit_f_l_power(c: Complex64, annulus: AnnulusSpec, cfg: &QuadConfig) -> Result<Complex64> {
    prelimit_f_l(&PowerMapSpec::new(c), c, annulus, cfg)
}

fn first_derivative_stencil<M: HolomorphicMap + ?Sized>(map: &M, z: Complex64) -> Complex64 {
    let h = default_step(z);
    let f = |k: f64| map.eval(z + h * k);
    (-f(-3.0) + f(-2.0) * 9.0 - f(-1.0) * 45.0 + f(1.0) * 45.0 - f(2.0) * 9.0 + f(3.0)) / (60.0 * h)
}

/// Outcome of the Bers-inequality test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BersVerdict {
    pub satisfies: bool,
    #[serde(with = "crate::complex_serde")]
    pub c: Complex64,
}

/// Relative slack used to break exact ties in favour of `≤`.
pub const TIE_SLACK: f64 = 1e-14;

/// Bers' inequality `1/ℓ ≤ 2·Re 𝓛 / |𝓛|²`, equivalent to `|𝓛/ℓ − 1| ≤ 1`.
pub fn bers_region(pair: LengthPair) -> BersVerdict {
    let lhs = 1.0 / pair.ell;
    let rhs = 2.0 * pair.l.re / pair.l.norm_sqr();
    BersVerdict { satisfies: lhs <= rhs + TIE_SLACK * lhs.max(rhs), c: pair.ratio() }
}

/// `|c − 1| ≤ 1` with the same tie slack as [`bers_region`].
pub fn in_closed_unit_disk_about_one(c: Complex64) -> bool {
    (c - 1.0).norm() <= 1.0 + TIE_SLACK
}

/// Certified ceiling `η·Re 𝓛` for the auxiliary term.
pub fn aux_term_bound(eta: f64, re_l: f64) -> Result<f64> {
    if !(eta > 0.0) || !(re_l >= 0.0) {
        return Err(Error::OutOfDomain(format!("need eta > 0 and Re L ≥ 0, got {eta}, {re_l}")));
    }
    Ok(eta * re_l)
}

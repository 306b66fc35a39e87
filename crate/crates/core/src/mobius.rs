//! Möbius transformations as normalised `SL(2, ℂ)` matrices, acting on the
//! Riemann sphere and (by Poincaré extension) on upper half-space `ℍ³`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::ops::Mul;

/// `z ↦ (az + b)/(cz + d)` with `ad − bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusTransform {
    #[serde(with = "crate::complex_serde")]
    pub a: Complex64,
    #[serde(with = "crate::complex_serde")]
    pub b: Complex64,
    #[serde(with = "crate::complex_serde")]
    pub c: Complex64,
    #[serde(with = "crate::complex_serde")]
    pub d: Complex64,
}

/// A point `(z, h)` of the upper half-space model, `h > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfSpacePoint {
    pub z: Complex64,
    pub h: f64,
}

impl HalfSpacePoint {
    pub fn new(z: Complex64, h: f64) -> Self {
        Self { z, h }
    }

    /// Hyperbolic distance, `cosh d = 1 + (|p − q|² + (h_p − h_q)²) / (2 h_p h_q)`.
    pub fn distance(&self, other: &HalfSpacePoint) -> f64 {
        let num = (self.z - other.z).norm_sqr() + (self.h - other.h).powi(2);
        let arg = 1.0 + num / (2.0 * self.h * other.h);
        arg.max(1.0).acosh()
    }
}

impl MobiusTransform {
    pub const IDENTITY: MobiusTransform = MobiusTransform {
        a: Complex64::new(1.0, 0.0),
        b: Complex64::new(0.0, 0.0),
        c: Complex64::new(0.0, 0.0),
        d: Complex64::new(1.0, 0.0),
    };

    /// Normalises an arbitrary invertible matrix to determinant one.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.norm() > 0.0) || !det.is_finite() {
            return Err(Error::InvalidConfig("Möbius matrix must be invertible and finite".into()));
        }
        let s = det.sqrt();
        Ok(Self { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    /// `z ↦ e^{L} z`, the loxodromic element with complex translation length `L`.
    pub fn loxodromic(complex_length: Complex64) -> Self {
        let half = (complex_length * 0.5).exp();
        Self {
            a: half,
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: half.inv(),
        }
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// Derivative `1/(cz + d)²`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.c * z + self.d;
        (den * den).inv()
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut acc = Self::IDENTITY;
        let mut sq = base;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * sq;
            }
            sq = sq * sq;
            k >>= 1;
        }
        acc
    }

    /// Poincaré extension to `ℍ³`, computed as the quaternion action
    /// `q ↦ (aq + b)(cq + d)⁻¹` with `q = z + hj`.
    pub fn apply_half_space(&self, p: HalfSpacePoint) -> HalfSpacePoint {
        let cz_d = self.c * p.z + self.d;
        let den = cz_d.norm_sqr() + self.c.norm_sqr() * p.h * p.h;
        let z = ((self.a * p.z + self.b) * cz_d.conj() + self.a * self.c.conj() * p.h * p.h) / den;
        HalfSpacePoint { z, h: p.h / den }
    }
}

impl Mul for MobiusTransform {
    type Output = MobiusTransform;

    fn mul(self, o: MobiusTransform) -> MobiusTransform {
        MobiusTransform {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalisation_gives_unit_determinant() {
        let m = MobiusTransform::new(c(2.0, 1.0), c(0.5, 0.0), c(-1.0, 3.0), c(4.0, -2.0)).unwrap();
        assert!((m.determinant() - 1.0).norm() < 1e-12);
        assert!(MobiusTransform::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)).is_err());
    }

    #[test]
    fn composition_matches_application() {
        let m = MobiusTransform::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)).unwrap();
        let n = MobiusTransform::new(c(2.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let z = c(0.3, 0.7);
        assert!(((m * n).apply(z) - m.apply(n.apply(z))).norm() < 1e-14);
        assert!(((m * m.inverse()).apply(z) - z).norm() < 1e-14);
        assert!((m.pow(3).apply(z) - m.apply(m.apply(m.apply(z)))).norm() < 1e-13);
        assert!((m.pow(-2).apply(m.pow(2).apply(z)) - z).norm() < 1e-13);
    }

    #[test]
    fn half_space_action_is_an_isometry() {
        let m = MobiusTransform::new(c(1.0, 2.0), c(0.5, -1.0), c(0.3, 0.1), c(2.0, 0.5)).unwrap();
        let p = HalfSpacePoint::new(c(0.2, -0.4), 0.7);
        let q = HalfSpacePoint::new(c(-1.0, 0.9), 2.3);
        let before = p.distance(&q);
        let after = m.apply_half_space(p).distance(&m.apply_half_space(q));
        assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn loxodromic_translates_the_vertical_axis() {
        let g = MobiusTransform::loxodromic(c(1.5, 0.4));
        let p = HalfSpacePoint::new(c(0.0, 0.0), 1.0);
        assert!((p.distance(&g.apply_half_space(p)) - 1.5).abs() < 1e-12);
    }
}

//! Numerical laboratory for the limiting model flow of the renormalized-volume
//! gradient flow on convex cocompact hyperbolic 3-manifolds.
//!
//! The crate is organised by subsystem:
//!
//! - [`model_flow`]: the planar vector field `v(z) = ¼(|z|⁴ − 2z·Re(z²) − z² + 2z)`,
//!   its zeros and their linearisations, ODE integration, basin rasters and
//!   noisy-flow accumulation experiments.
//! - [`schwarzian`]: the power-map family `g_c`, Schwarzian derivatives and
//!   the univalence disk `|c − 1| ≤ 1`.
//! - [`pairing`]: Beltrami/quadratic-differential pairings on quotient annuli
//!   and the limit functionals `F_ℓ`, `F_𝓛`.
//! - [`hyperbolic`]: Margulis-tube, shadow-area, visual-measure and Poincaré
//!   series estimates in upper half-space.
//! - [`convergence`]: Ahlfors–Weill and Banach-contraction certificates.
//! - [`verify`]: the invariant suites behind `rvflow verify`.
//! - [`cli`]: the command-line front end.
//!
//! Data-parallel loops (basin rasters, randomized checks, Monte-Carlo
//! sampling) run on rayon when the `parallel` feature is enabled and fall
//! back to plain iterators otherwise. Results are identical either way.

// `!(x > 0.0)` is used on purpose throughout: it rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod cli;
pub mod convergence;
pub mod error;
pub mod hyperbolic;
pub mod mobius;
pub mod model_flow;
pub mod pairing;
pub mod par;
pub mod quadrature;
pub mod rng;
pub mod schwarzian;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// A complex number on which every operation of the crate acts.
pub type ComplexValue = Complex64;

/// Serde adapter writing complex numbers as `{"re": .., "im": ..}`.
pub mod complex_serde {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Parts {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        Parts { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let p = Parts::deserialize(d)?;
        Ok(Complex64::new(p.re, p.im))
    }

    /// Same encoding for fixed-size arrays of complex numbers.
    pub mod pair {
        use super::Parts;
        use num_complex::Complex64;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(z: &[Complex64; 2], s: S) -> Result<S::Ok, S::Error> {
            [
                Parts { re: z[0].re, im: z[0].im },
                Parts { re: z[1].re, im: z[1].im },
            ]
            .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Complex64; 2], D::Error> {
            let [a, b] = <[Parts; 2]>::deserialize(d)?;
            Ok([Complex64::new(a.re, a.im), Complex64::new(b.re, b.im)])
        }
    }
}

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i` (no spaces).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::Parse(format!("invalid complex number `{s}`"));
    let t = s.trim();
    if t.is_empty() || t.contains(char::is_whitespace) {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        let re: f64 = t.parse().map_err(|_| bad())?;
        return finite(Complex64::new(re, 0.0)).ok_or_else(bad);
    };
    // split at the last sign that is not an exponent sign and not the leading char
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let parse_imag = |p: &str| -> Result<f64> {
        match p {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => p.parse().map_err(|_| bad()),
        }
    };
    let z = match split {
        Some(k) => {
            let re: f64 = body[..k].parse().map_err(|_| bad())?;
            Complex64::new(re, parse_imag(&body[k..])?)
        }
        None => Complex64::new(0.0, parse_imag(body)?),
    };
    finite(z).ok_or_else(bad)
}

fn finite(z: Complex64) -> Option<Complex64> {
    (z.re.is_finite() && z.im.is_finite()).then_some(z)
}

/// Formats a complex number in the `a+bi` form accepted by [`parse_complex`].
pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

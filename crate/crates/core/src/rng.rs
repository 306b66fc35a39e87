//! Seeded pseudorandomness.
//!
//! Every randomized routine takes a `u64` seed and draws from
//! [`ChaCha8Rng`] seeded through `SeedableRng::seed_from_u64`. ChaCha8 is a
//! fixed, documented stream cipher, so a seed reproduces the same stream on
//! every platform. Independent sub-streams (one per parallel task) are
//! obtained with [`substream`], which selects ChaCha stream `index`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Prng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Prng {
    Prng::seed_from_u64(seed)
}

/// Stream `index` of the generator seeded with `seed`.
pub fn substream(seed: u64, index: u64) -> Prng {
    let mut rng = seeded(seed);
    rng.set_stream(index);
    rng
}

/// Uniform point in the closed disk of radius `radius` about `center`.
pub fn uniform_in_disk<R: Rng>(rng: &mut R, center: Complex64, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    let phi = std::f64::consts::TAU * rng.gen::<f64>();
    center + Complex64::from_polar(r, phi)
}

pub fn uniform_in_rect<R: Rng>(rng: &mut R, x: (f64, f64), y: (f64, f64)) -> Complex64 {
    Complex64::new(rng.gen_range(x.0..=x.1), rng.gen_range(y.0..=y.1))
}

use super::field::{eval_v, real_jacobian, wirtinger_derivatives, Jacobian};
use crate::error::{Error, Result};
use crate::par::map_slice;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// The zeros of `v`; Newton limits within [`SNAP_RADIUS`] are reported exactly.
pub const KNOWN_ZEROS: [f64; 4] = [-1.0, 0.0, 1.0, 2.0];

const ZERO_RESIDUAL: f64 = 1e-8;
const DEDUP_RADIUS: f64 = 1e-8;
const SNAP_RADIUS: f64 = 1e-6;
const NONHYPERBOLIC_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FixedPointClass {
    Stable,
    Unstable,
    Saddle,
    Nonhyperbolic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    #[serde(with = "crate::complex_serde")]
    pub location: Complex64,
    #[serde(with = "crate::complex_serde")]
    pub dz: Complex64,
    #[serde(with = "crate::complex_serde")]
    pub dzbar: Complex64,
    pub jacobian: Jacobian,
    #[serde(with = "crate::complex_serde::pair")]
    pub eigenvalues: [Complex64; 2],
    pub class: FixedPointClass,
}

/// Eigenvalues of a real 2×2 matrix, larger real part first.
pub fn eigenvalues(j: &Jacobian) -> [Complex64; 2] {
    let half_tr = 0.5 * (j[0][0] + j[1][1]);
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let disc = half_tr * half_tr - det;
    if disc >= 0.0 {
        let s = disc.sqrt();
        // avoid cancellation in the smaller-magnitude root
        let big = if half_tr >= 0.0 { half_tr + s } else { half_tr - s };
        let small = if big != 0.0 { det / big } else { 0.0 };
        let (hi, lo) = if big >= small { (big, small) } else { (small, big) };
        [Complex64::new(hi, 0.0), Complex64::new(lo, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [Complex64::new(half_tr, s), Complex64::new(half_tr, -s)]
    }
}

fn class_of(eig: &[Complex64; 2]) -> FixedPointClass {
    if eig.iter().any(|l| l.re.abs() < NONHYPERBOLIC_EPS) {
        FixedPointClass::Nonhyperbolic
    } else if eig.iter().all(|l| l.re < 0.0) {
        FixedPointClass::Stable
    } else if eig.iter().all(|l| l.re > 0.0) {
        FixedPointClass::Unstable
    } else {
        FixedPointClass::Saddle
    }
}

/// Linearisation and stability class of a zero of `v`.
pub fn classify_fixed_point(z: Complex64) -> Result<FixedPointReport> {
    let residual = eval_v(z).norm();
    if !(residual < ZERO_RESIDUAL) {
        return Err(Error::NotAZero { z: crate::format_complex(z), residual });
    }
    let (dz, dzbar) = wirtinger_derivatives(z);
    let jacobian = real_jacobian(z);
    let eigenvalues = eigenvalues(&jacobian);
    Ok(FixedPointReport { location: z, dz, dzbar, jacobian, eigenvalues, class: class_of(&eigenvalues) })
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl SearchBox {
    pub fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        Self { x, y }
    }

    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.x.0 - slack && z.re <= self.x.1 + slack && z.im >= self.y.0 - slack && z.im <= self.y.1 + slack
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointSearch {
    pub zeros: Vec<FixedPointReport>,
    /// Grid seeds whose Newton iteration failed or left the box.
    pub non_converged: usize,
    pub n_seeds: usize,
}

fn newton(mut z: Complex64) -> Option<Complex64> {
    for _ in 0..100 {
        let v = eval_v(z);
        let j = real_jacobian(z);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 || !det.is_finite() {
            return None;
        }
        let dx = (j[1][1] * v.re - j[0][1] * v.im) / det;
        let dy = (-j[1][0] * v.re + j[0][0] * v.im) / det;
        z -= Complex64::new(dx, dy);
        if !(z.norm() < 1e6) {
            return None;
        }
        if dx.hypot(dy) < 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    (eval_v(z).norm() < 1e-12).then_some(z)
}

/// Newton's method on the real 2D system from a `grid_n × grid_n` lattice of
/// seeds covering `search_box`; returns the distinct zeros found inside it,
/// ordered by real then imaginary part.
pub fn find_fixed_points(search_box: SearchBox, grid_n: usize) -> Result<FixedPointSearch> {
    if grid_n < 8 {
        return Err(Error::InvalidConfig(format!("grid_n must be at least 8, got {grid_n}")));
    }
    if !(search_box.x.1 > search_box.x.0 && search_box.y.1 > search_box.y.0) {
        return Err(Error::InvalidConfig("search box must have positive extent".into()));
    }
    let step = |(a, b): (f64, f64), k: usize| a + (b - a) * k as f64 / (grid_n - 1) as f64;
    let seeds: Vec<Complex64> = (0..grid_n * grid_n)
        .map(|k| Complex64::new(step(search_box.x, k / grid_n), step(search_box.y, k % grid_n)))
        .collect();
    let limits = map_slice(&seeds, |&s| newton(s).filter(|z| search_box.contains(*z, 0.0)));

    let mut found: Vec<Complex64> = Vec::new();
    let mut non_converged = 0;
    for z in limits {
        let Some(mut z) = z else {
            non_converged += 1;
            continue;
        };
        if let Some(&exact) = KNOWN_ZEROS.iter().find(|&&k| (z - k).norm() < SNAP_RADIUS) {
            z = Complex64::new(exact, 0.0);
        }
        if !found.iter().any(|f| (f - z).norm() < DEDUP_RADIUS) {
            found.push(z);
        }
    }
    found.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let zeros = found.into_iter().map(classify_fixed_point).collect::<Result<Vec<_>>>()?;
    Ok(FixedPointSearch { zeros, non_converged, n_seeds: seeds.len() })
}

use super::fixed_points::KNOWN_ZEROS;
use super::integrator::{integrate_field, IntegratorConfig, TerminalStatus};
use super::field::eval_v;
use crate::error::{Error, Result};
use crate::par::map_range;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Terminal fate of a start point under the model flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasinLabel {
    #[serde(rename = "-1")]
    MinusOne,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "DIVERGED")]
    Diverged,
    #[serde(rename = "MAX_TIME")]
    MaxTime,
}

impl BasinLabel {
    fn from_zero(x: f64) -> Self {
        match x as i64 {
            -1 => BasinLabel::MinusOne,
            0 => BasinLabel::Zero,
            1 => BasinLabel::One,
            _ => BasinLabel::Two,
        }
    }
}

impl fmt::Display for BasinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasinLabel::MinusOne => "-1",
            BasinLabel::Zero => "0",
            BasinLabel::One => "1",
            BasinLabel::Two => "2",
            BasinLabel::Diverged => "DIVERGED",
            BasinLabel::MaxTime => "MAX_TIME",
        })
    }
}

/// Lattice `x0 + i·(x1−x0)/(nx−1)`, `y0 + j·(y1−y0)/(ny−1)`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    pub fn new(x: (f64, f64), y: (f64, f64), nx: usize, ny: usize) -> Self {
        Self { x, y, nx, ny }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidConfig(format!(
                "basin grid needs at least 2 points per axis, got {}×{}",
                self.nx, self.ny
            )));
        }
        if !(self.x.1 > self.x.0 && self.y.1 > self.y.0) {
            return Err(Error::InvalidConfig("basin grid must have positive extent".into()));
        }
        Ok(())
    }

    /// Point of row `j`, column `i`.
    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        let lerp = |(a, b): (f64, f64), k: usize, n: usize| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 };
        Complex64::new(lerp(self.x, i, self.nx), lerp(self.y, j, self.ny))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinRaster {
    pub grid: GridSpec,
    /// Row-major, `labels[j * nx + i]` for the point `grid.point(i, j)`.
    pub labels: Vec<BasinLabel>,
}

impl BasinRaster {
    pub fn iter(&self) -> impl Iterator<Item = (Complex64, BasinLabel)> + '_ {
        self.labels.iter().enumerate().map(|(k, &l)| (self.grid.point(k % self.grid.nx, k / self.grid.nx), l))
    }

    /// `re,im,label` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,label\n");
        for (z, l) in self.iter() {
            out.push_str(&format!("{:.16e},{:.16e},{}\n", z.re, z.im, l));
        }
        out
    }
}

/// Integrates from `z0` until it lands within `convergence_radius` of a zero
/// of `v`, leaves the divergence radius, or runs out of time.
pub fn classify_start(z0: Complex64, cfg: &IntegratorConfig) -> Result<BasinLabel> {
    let targets: Vec<Complex64> = KNOWN_ZEROS.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let tr = integrate_field(|_, z| eval_v(z), z0, cfg, &targets)?;
    Ok(match tr.terminal_status {
        TerminalStatus::Diverged => BasinLabel::Diverged,
        TerminalStatus::MaxTime => BasinLabel::MaxTime,
        TerminalStatus::Converged => {
            let z = tr.final_state().1;
            let nearest = KNOWN_ZEROS
                .iter()
                .copied()
                .min_by(|a, b| (z - a).norm().total_cmp(&(z - b).norm()))
                .expect("non-empty");
            BasinLabel::from_zero(nearest)
        }
    })
}

/// Labels every lattice point by its terminal fate. Cells are independent,
/// so the raster does not depend on how the work is scheduled.
pub fn basin_sample(grid: GridSpec, cfg: &IntegratorConfig) -> Result<BasinRaster> {
    grid.validate()?;
    cfg.validate()?;
    let labels = map_range(grid.nx * grid.ny, |k| classify_start(grid.point(k % grid.nx, k / grid.nx), cfg))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(BasinRaster { grid, labels })
}

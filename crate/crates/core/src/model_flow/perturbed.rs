use super::field::eval_v;
use super::integrator::{integrate_field, IntegratorConfig, Trajectory};
use crate::error::{Error, Result};
use crate::rng::{seeded, uniform_in_disk};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Spacing of the random knots of the perturbation direction `u(t)`.
pub const NOISE_KNOT_SPACING: f64 = 0.1;

/// Amplitude `a(t)` of the perturbation; must decrease monotonically to 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSchedule {
    Zero,
    /// `a(t) = amplitude · e^{−rate·t}`
    ExpDecay { amplitude: f64, rate: f64 },
    /// `a(t) = amplitude / (1 + t)^power`
    PowerDecay { amplitude: f64, power: f64 },
}

impl NoiseSchedule {
    pub fn amplitude(&self, t: f64) -> f64 {
        match *self {
            NoiseSchedule::Zero => 0.0,
            NoiseSchedule::ExpDecay { amplitude, rate } => amplitude * (-rate * t).exp(),
            NoiseSchedule::PowerDecay { amplitude, power } => amplitude / (1.0 + t).powf(power),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            NoiseSchedule::Zero => true,
            NoiseSchedule::ExpDecay { amplitude, rate } => amplitude >= 0.0 && (rate > 0.0 || amplitude == 0.0),
            NoiseSchedule::PowerDecay { amplitude, power } => amplitude >= 0.0 && (power > 0.0 || amplitude == 0.0),
        };
        if ok && self.amplitude(0.0).is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("noise schedule {self:?} is not monotone decreasing to 0")))
        }
    }
}

/// Mean and diameter of the last 10% of the samples of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailAccumulation {
    #[serde(with = "crate::complex_serde")]
    pub mean: Complex64,
    pub diameter: f64,
    pub n_samples: usize,
}

impl TailAccumulation {
    pub fn of(samples: &[(f64, Complex64)]) -> Self {
        let n = samples.len();
        let m = (n / 10).max(1).min(n);
        let tail: Vec<Complex64> = samples[n - m..].iter().map(|s| s.1).collect();
        let mean = tail.iter().sum::<Complex64>() / m as f64;
        let mut diameter: f64 = 0.0;
        for (i, a) in tail.iter().enumerate() {
            for b in &tail[i + 1..] {
                diameter = diameter.max((a - b).norm());
            }
        }
        TailAccumulation { mean, diameter, n_samples: m }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbedRun {
    pub trajectory: Trajectory,
    pub tail: TailAccumulation,
}

/// Piecewise-linear interpolation of unit-disk knots drawn from the seeded
/// PRNG at spacing [`NOISE_KNOT_SPACING`]; `|u(t)| ≤ 1` by convexity.
struct Direction {
    knots: Vec<Complex64>,
}

impl Direction {
    fn new(seed: u64, t_max: f64) -> Self {
        let n = (t_max / NOISE_KNOT_SPACING).ceil() as usize + 2;
        let mut rng = seeded(seed);
        Direction { knots: (0..n).map(|_| uniform_in_disk(&mut rng, Complex64::new(0.0, 0.0), 1.0)).collect() }
    }

    fn at(&self, t: f64) -> Complex64 {
        let s = (t / NOISE_KNOT_SPACING).max(0.0);
        let k = (s.floor() as usize).min(self.knots.len() - 2);
        let frac = (s - k as f64).clamp(0.0, 1.0);
        self.knots[k] * (1.0 - frac) + self.knots[k + 1] * frac
    }
}

/// Integrates `z' = v(z) + a(t)·u(t)` to `t_max` (no early stop), and
/// summarises where the tail of the path accumulates.
pub fn perturbed_integrate(z0: Complex64, noise: NoiseSchedule, rng_seed: u64, cfg: &IntegratorConfig) -> Result<PerturbedRun> {
    noise.validate()?;
    cfg.validate()?;
    let dir = Direction::new(rng_seed, cfg.t_max);
    let trajectory = integrate_field(|t, z| eval_v(z) + dir.at(t) * noise.amplitude(t), z0, cfg, &[])?;
    let tail = TailAccumulation::of(&trajectory.samples);
    Ok(PerturbedRun { trajectory, tail })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_flow::integrate;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_noise_reproduces_plain_integration() {
        let cfg = IntegratorConfig { t_max: 30.0, ..IntegratorConfig::default() };
        let run = perturbed_integrate(c(1.2, 0.1), NoiseSchedule::Zero, 3, &cfg).unwrap();
        let plain = integrate(c(1.2, 0.1), &cfg, None).unwrap();
        assert_eq!(run.trajectory, plain);
    }

    #[test]
    fn decaying_noise_accumulates_at_one() {
        let cfg = IntegratorConfig::default();
        let noise = NoiseSchedule::ExpDecay { amplitude: 1.0, rate: 1.0 };
        let run = perturbed_integrate(c(1.2, 0.1), noise, 11, &cfg).unwrap();
        assert!((run.tail.mean - 1.0).norm() < 1e-4);
        assert!(run.tail.diameter < 1e-4);
        let run = perturbed_integrate(c(1.0, 0.0), noise, 7, &cfg).unwrap();
        assert!((run.tail.mean - 1.0).norm() < 1e-3);
    }

    #[test]
    fn direction_is_bounded_and_seeded() {
        let d = Direction::new(5, 10.0);
        for k in 0..1000 {
            assert!(d.at(k as f64 * 0.0137).norm() <= 1.0 + 1e-15);
        }
        let e = Direction::new(5, 10.0);
        assert_eq!(d.at(3.3), e.at(3.3));
        assert_ne!(d.at(3.3), Direction::new(6, 10.0).at(3.3));
    }

    #[test]
    fn rejects_growing_schedule() {
        let bad = NoiseSchedule::ExpDecay { amplitude: 1.0, rate: -1.0 };
        assert!(perturbed_integrate(c(1.0, 0.0), bad, 0, &IntegratorConfig::default()).is_err());
    }
}

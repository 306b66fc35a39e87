use super::field::eval_v;
use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    /// Classical fourth-order Runge–Kutta with fixed step `dt`.
    Rk4Fixed { dt: f64 },
    /// Dormand–Prince 5(4) with mixed absolute/relative error control.
    Rk45Adaptive { abs_tol: f64, rel_tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub t_max: f64,
    /// Stop as soon as the state is within this distance of a target.
    pub convergence_radius: f64,
    /// Abort once `|z|` exceeds this.
    pub divergence_radius: f64,
    /// Largest step the adaptive method may take.
    pub max_dt: f64,
    /// Accepted-step budget; exhausting it ends the run with `MAX_TIME`.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk45Adaptive { abs_tol: 1e-9, rel_tol: 1e-9 },
            t_max: 200.0,
            convergence_radius: 1e-7,
            divergence_radius: 50.0,
            max_dt: 0.5,
            max_steps: 10_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(dt: f64, t_max: f64) -> Self {
        Self { method: Method::Rk4Fixed { dt }, t_max, ..Self::default() }
    }

    pub fn rk45(tol: f64, t_max: f64) -> Self {
        Self { method: Method::Rk45Adaptive { abs_tol: tol, rel_tol: tol }, t_max, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x > 0.0 && x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {x}")))
            }
        };
        match self.method {
            Method::Rk4Fixed { dt } => positive("dt", dt)?,
            Method::Rk45Adaptive { abs_tol, rel_tol } => {
                positive("abs_tol", abs_tol)?;
                positive("rel_tol", rel_tol)?;
            }
        }
        positive("t_max", self.t_max)?;
        positive("convergence_radius", self.convergence_radius)?;
        positive("divergence_radius", self.divergence_radius)?;
        positive("max_dt", self.max_dt)?;
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive".into()));
        }
        Ok(())
    }

    pub fn integrator_id(&self) -> &'static str {
        match self.method {
            Method::Rk4Fixed { .. } => "rk4-fixed",
            Method::Rk45Adaptive { .. } => "dopri5-adaptive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TerminalStatus {
    Converged,
    MaxTime,
    Diverged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub min_dt: f64,
    pub max_dt: f64,
    pub n_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    /// `(t, z)` with strictly increasing `t`, starting at `t = 0`.
    pub samples: Vec<(f64, Complex64)>,
    pub integrator_id: String,
    pub step_stats: StepStats,
    pub terminal_status: TerminalStatus,
}

impl Trajectory {
    pub fn final_state(&self) -> (f64, Complex64) {
        *self.samples.last().expect("trajectory has an initial sample")
    }
}

/// Integrates `z' = v(z)` from `z0`. With a `target`, the run stops with
/// `CONVERGED` once `|z − target| < convergence_radius`.
pub fn integrate(z0: Complex64, cfg: &IntegratorConfig, target: Option<Complex64>) -> Result<Trajectory> {
    let targets: Vec<Complex64> = target.into_iter().collect();
    integrate_field(|_, z| eval_v(z), z0, cfg, &targets)
}

/// Integrates `z' = f(t, z)` from `z0` at `t = 0`, stopping at the first of:
/// a target within `convergence_radius`, `|z| > divergence_radius`, `t_max`.
pub fn integrate_field<F>(f: F, z0: Complex64, cfg: &IntegratorConfig, targets: &[Complex64]) -> Result<Trajectory>
where
    F: Fn(f64, Complex64) -> Complex64,
{
    cfg.validate()?;
    if !(z0.re.is_finite() && z0.im.is_finite()) {
        return Err(Error::InvalidConfig("initial point must be finite".into()));
    }
    let mut run = Run::new(z0, cfg, targets);
    if run.status.is_none() {
        match cfg.method {
            Method::Rk4Fixed { dt } => run.rk4(&f, dt),
            Method::Rk45Adaptive { abs_tol, rel_tol } => run.dopri5(&f, abs_tol, rel_tol),
        }
    }
    Ok(run.finish())
}

struct Run<'a> {
    cfg: &'a IntegratorConfig,
    targets: &'a [Complex64],
    samples: Vec<(f64, Complex64)>,
    stats: StepStats,
    status: Option<TerminalStatus>,
}

impl<'a> Run<'a> {
    fn new(z0: Complex64, cfg: &'a IntegratorConfig, targets: &'a [Complex64]) -> Self {
        let mut run = Run {
            cfg,
            targets,
            samples: vec![(0.0, z0)],
            stats: StepStats { min_dt: f64::INFINITY, max_dt: 0.0, n_steps: 0 },
            status: None,
        };
        run.status = run.event(z0);
        run
    }

    fn event(&self, z: Complex64) -> Option<TerminalStatus> {
        if !(z.norm() <= self.cfg.divergence_radius) {
            Some(TerminalStatus::Diverged)
        } else if self.targets.iter().any(|t| (z - t).norm() < self.cfg.convergence_radius) {
            Some(TerminalStatus::Converged)
        } else {
            None
        }
    }

    /// Records an accepted step; returns true when the run should stop.
    fn accept(&mut self, t: f64, z: Complex64, h: f64) -> bool {
        self.samples.push((t, z));
        self.stats.n_steps += 1;
        self.stats.min_dt = self.stats.min_dt.min(h);
        self.stats.max_dt = self.stats.max_dt.max(h);
        self.status = self.event(z);
        if self.status.is_none() && self.stats.n_steps >= self.cfg.max_steps {
            self.status = Some(TerminalStatus::MaxTime);
        }
        self.status.is_some()
    }

    fn rk4<F: Fn(f64, Complex64) -> Complex64>(&mut self, f: &F, dt: f64) {
        let t_max = self.cfg.t_max;
        let n = (t_max / dt).ceil() as usize;
        let (mut t, mut z) = (0.0, self.samples[0].1);
        for k in 1..=n {
            let t_next = if k == n { t_max } else { k as f64 * dt };
            let h = t_next - t;
            let k1 = f(t, z);
            let k2 = f(t + 0.5 * h, z + k1 * (0.5 * h));
            let k3 = f(t + 0.5 * h, z + k2 * (0.5 * h));
            let k4 = f(t + h, z + k3 * h);
            z += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            t = t_next;
            if self.accept(t, z, h) {
                return;
            }
        }
    }

    fn dopri5<F: Fn(f64, Complex64) -> Complex64>(&mut self, f: &F, abs_tol: f64, rel_tol: f64) {
        const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
        const A21: f64 = 1.0 / 5.0;
        const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
        const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
        const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
        const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
        const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
        // fifth-order minus embedded fourth-order weights
        const E: [f64; 7] = [
            71.0 / 57600.0,
            0.0,
            -71.0 / 16695.0,
            71.0 / 1920.0,
            -17253.0 / 339200.0,
            22.0 / 525.0,
            -1.0 / 40.0,
        ];

        let t_max = self.cfg.t_max;
        let (mut t, mut z) = (0.0, self.samples[0].1);
        let mut h = (1e-3f64).min(self.cfg.max_dt).min(t_max);
        let mut k1 = f(t, z);
        loop {
            let last = t + h >= t_max;
            if last {
                h = t_max - t;
            }
            let k2 = f(t + C[0] * h, z + k1 * (A21 * h));
            let k3 = f(t + C[1] * h, z + (k1 * A3[0] + k2 * A3[1]) * h);
            let k4 = f(t + C[2] * h, z + (k1 * A4[0] + k2 * A4[1] + k3 * A4[2]) * h);
            let k5 = f(t + C[3] * h, z + (k1 * A5[0] + k2 * A5[1] + k3 * A5[2] + k4 * A5[3]) * h);
            let k6 = f(t + C[4] * h, z + (k1 * A6[0] + k2 * A6[1] + k3 * A6[2] + k4 * A6[3] + k5 * A6[4]) * h);
            let z_new = z + (k1 * B[0] + k3 * B[2] + k4 * B[3] + k5 * B[4] + k6 * B[5]) * h;
            let k7 = f(t + h, z_new);
            let err_vec = (k1 * E[0] + k3 * E[2] + k4 * E[3] + k5 * E[4] + k6 * E[5] + k7 * E[6]) * h;

            let scale = |a: f64, b: f64| abs_tol + rel_tol * a.abs().max(b.abs());
            let er = err_vec.re / scale(z.re, z_new.re);
            let ei = err_vec.im / scale(z.im, z_new.im);
            let err = (0.5 * (er * er + ei * ei)).sqrt();

            if !err.is_finite() {
                // the step blew up; shrink hard and retry
                h *= 0.1;
            } else if err <= 1.0 {
                t = if last { t_max } else { t + h };
                z = z_new;
                k1 = k7;
                if self.accept(t, z, h) || last {
                    return;
                }
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h = (h * factor).min(self.cfg.max_dt);
            } else {
                h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            }
            if h < 1e-14 * t.abs().max(1.0) {
                // step-size underflow only happens on the way to a blow-up
                self.status = Some(TerminalStatus::Diverged);
                return;
            }
        }
    }

    fn finish(self) -> Trajectory {
        let mut stats = self.stats;
        if stats.n_steps == 0 {
            stats.min_dt = 0.0;
        }
        Trajectory {
            samples: self.samples,
            integrator_id: self.cfg.integrator_id().to_string(),
            step_stats: stats,
            terminal_status: self.status.unwrap_or(TerminalStatus::MaxTime),
        }
    }
}

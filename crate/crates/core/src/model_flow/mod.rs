//! The limiting model flow `z' = v(z)` on `ℂ`.
//!
//! `v(z) = ¼(|z|⁴ − 2z·Re(z²) − z² + 2z)` vanishes exactly at `−1, 0, 1, 2`.
//! The closed disk `|z − 1| ≤ 1` is invariant: its interior is the basin of
//! the attracting zero `1` and each boundary arc is a trajectory from `0` to
//! `2`.

mod basin;
mod export;
mod field;
mod fixed_points;
mod integrator;
mod perturbed;

pub use basin::{basin_sample, classify_start, BasinLabel, BasinRaster, GridSpec};
pub use export::{labels_csv, phase_portrait_svg, trajectory_csv, PortraitSpec};
pub use field::{circle_decompose, eval_v, real_jacobian, wirtinger_derivatives, Jacobian};
pub use fixed_points::{
    classify_fixed_point, eigenvalues, find_fixed_points, FixedPointClass, FixedPointReport, FixedPointSearch,
    SearchBox, KNOWN_ZEROS,
};
pub use integrator::{integrate, integrate_field, IntegratorConfig, Method, StepStats, TerminalStatus, Trajectory};
pub use perturbed::{perturbed_integrate, NoiseSchedule, PerturbedRun, TailAccumulation};

//! Command-line front end.
//!
//! [`run`] parses arguments, merges an optional `key=value` config file
//! (flags win), echoes the resolved configuration as one JSON line on the
//! error stream, dispatches, and maps outcomes to exit codes: 0 success,
//! 1 failed check or numerical failure, 2 usage error.

use crate::convergence::{
    ahlfors_weill_certificate, banach_iterate, chained_from_budget, chained_tail_bound, contraction_tail_certificate,
    wolpert_certificate, ContractionSpec, NormBudget, DEFAULT_MAX_ITERS,
};
use crate::error::{Error, Result};
use crate::hyperbolic as geo;
use crate::model_flow::{
    find_fixed_points, integrate, labels_csv, perturbed_integrate, phase_portrait_svg, trajectory_csv, IntegratorConfig,
    Method, NoiseSchedule, PortraitSpec, SearchBox,
};
use crate::pairing::{pair_strip, AnnulusSpec};
use crate::quadrature::QuadConfig;
use crate::rng::{uniform_in_disk, Prng};
use crate::schwarzian::{
    default_step, empirical_injectivity_detail, schwarzian_closed_form, schwarzian_numeric, strip_criterion,
    strip_intersection_length, univalence_criterion, PowerMapSpec,
};
use crate::verify::{run_all, run_suite, VerifyReport};
use crate::{format_complex, parse_complex, Complex64};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "RVFLOW_OUT_DIR";

fn complex_arg(s: &str) -> std::result::Result<Complex64, String> {
    parse_complex(s).map_err(|e| e.to_string())
}

#[derive(Debug, Parser, Serialize)]
#[command(name = "rvflow", version, about = "Model flow, Schwarzian and hyperbolic-estimate toolkit")]
pub struct Cli {
    /// `key=value` file supplying defaults for the subcommand's flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for written files; defaults to $RVFLOW_OUT_DIR, then `.`.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "subcommand")]
pub enum Command {
    /// Integrate the model flow and print the trajectory as CSV.
    #[command(allow_negative_numbers = true)]
    Flow(FlowArgs),
    /// Write the phase portrait (SVG) and the basin raster (CSV).
    #[command(allow_negative_numbers = true)]
    Portrait(PortraitArgs),
    /// Locate and classify the zeros of the field.
    #[command(name = "fixed-points", allow_negative_numbers = true)]
    FixedPoints(FixedPointArgs),
    /// Schwarzian and univalence verdicts for a power map.
    #[command(allow_negative_numbers = true)]
    Schwarzian(SchwarzianArgs),
    /// Strip pairing by quadrature.
    #[command(allow_negative_numbers = true)]
    Pair(PairArgs),
    /// Hyperbolic-geometry calculators.
    Geom(GeomArgs),
    /// Convergence certificates.
    Converge(ConvergeArgs),
    /// Run invariant suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Rk45,
    Rk4,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseArg {
    None,
    Exp,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Plain,
}

#[derive(Debug, Args, Serialize)]
pub struct IntegratorArgs {
    #[arg(long, value_enum, default_value = "rk45")]
    pub method: MethodArg,
    /// Fixed step for rk4.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Absolute and relative tolerance for rk45.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 200.0)]
    pub t_max: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub convergence_radius: f64,
    #[arg(long, default_value_t = 50.0)]
    pub divergence_radius: f64,
}

impl IntegratorArgs {
    fn config(&self) -> Result<IntegratorConfig> {
        let method = match self.method {
            MethodArg::Rk45 => Method::Rk45Adaptive { abs_tol: self.tol, rel_tol: self.tol },
            MethodArg::Rk4 => Method::Rk4Fixed { dt: self.dt },
        };
        let cfg = IntegratorConfig {
            method,
            t_max: self.t_max,
            convergence_radius: self.convergence_radius,
            divergence_radius: self.divergence_radius,
            ..IntegratorConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct FlowArgs {
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub z0: Complex64,
    /// Stop once within the convergence radius of this point.
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub target: Option<Complex64>,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
    /// Perturbation schedule; a nonzero schedule runs to t_max.
    #[arg(long, value_enum, default_value = "none")]
    pub noise: NoiseArg,
    #[arg(long, default_value_t = 1.0)]
    pub noise_amplitude: f64,
    /// Decay rate (exp) or power (power).
    #[arg(long, default_value_t = 1.0)]
    pub noise_decay: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the CSV to this file (relative to the output directory) instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct PortraitArgs {
    #[arg(long, default_value_t = -0.5)]
    pub x_min: f64,
    #[arg(long, default_value_t = 2.5)]
    pub x_max: f64,
    #[arg(long, default_value_t = -1.5)]
    pub y_min: f64,
    #[arg(long, default_value_t = 1.5)]
    pub y_max: f64,
    #[arg(long, default_value_t = 24)]
    pub nx: usize,
    #[arg(long, default_value_t = 24)]
    pub ny: usize,
    #[arg(long, default_value_t = 640.0)]
    pub width_px: f64,
    /// Skip basin labelling (no CSV, unshaded SVG).
    #[arg(long)]
    pub no_labels: bool,
    /// File stem of the written pair.
    #[arg(long, default_value = "portrait")]
    pub stem: String,
    #[command(flatten)]
    pub integrator: IntegratorArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct FixedPointArgs {
    #[arg(long, default_value_t = -2.0)]
    pub x_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = -2.0)]
    pub y_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub y_max: f64,
    /// Newton seeds per axis.
    #[arg(long, default_value_t = 40)]
    pub grid_n: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SchwarzianArgs {
    /// Exponent of the power map.
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub c: Complex64,
    /// Evaluation point in the upper half-plane.
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true, default_value = "i")]
    pub z: Complex64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.05)]
    pub margin: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct PairArgs {
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub c: Complex64,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub rel_tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct GeomArgs {
    #[command(subcommand)]
    pub verb: GeomVerb,
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "verb")]
pub enum GeomVerb {
    /// Tube boundary area π·sinh(2R)·Re L.
    TubeArea { #[arg(long)] radius: f64, #[arg(long)] re_l: f64 },
    /// Length floor ε²/sinh(2R).
    MinLength { #[arg(long)] epsilon: f64, #[arg(long)] radius: f64 },
    /// Quadrature area of the disk |z| < r in the quotient metric.
    DiskArea { #[arg(long)] r: f64 },
    /// π/sinh²(d).
    DiskAreaBound { #[arg(long)] d: f64 },
    /// 2π(1 − tanh d).
    VisualArea { #[arg(long)] d: f64 },
    /// log(2 coth ε).
    ProjectionBound { #[arg(long)] epsilon: f64 },
    /// Opposite side of a Lambert quadrilateral.
    Lambert { #[arg(long)] d: f64 },
    /// Half-space distance R + ℓ − log(1 + √2).
    ShadowDistance { #[arg(long)] r_eps3: f64, #[arg(long)] ell_u: f64 },
    /// 16π·exp(−2·shadow distance).
    ShadowArea { #[arg(long)] r_eps3: f64, #[arg(long)] ell_u: f64 },
    /// Displacement of gⁿ at distance r from the axis.
    #[command(allow_negative_numbers = true)]
    Displacement {
        #[arg(long)] t: f64,
        #[arg(long, default_value_t = 0.0)] theta: f64,
        #[arg(long)] n: i64,
        #[arg(long, default_value_t = 0.0)] r: f64,
    },
    /// Poincaré series of a loxodromic cyclic group.
    Poincare {
        #[arg(long)] t: f64,
        #[arg(long, default_value_t = 0.0)] theta: f64,
        #[arg(long, default_value_t = 0.0)] r: f64,
        #[arg(long, default_value_t = 1e-15)] tail_tol: f64,
    },
    /// 8 coth²(ε).
    PoincareBound { #[arg(long)] epsilon: f64 },
    /// N e^{2D} P.
    Orthosum { #[arg(long)] n: u64, #[arg(long)] diameter: f64, #[arg(long)] poincare: f64 },
    /// Boundary area of the core neighbourhood at offset t.
    BoundaryArea { #[arg(long)] chi: f64, #[arg(long)] bending_length: f64, #[arg(long)] t: f64 },
    /// Volume of the core neighbourhood of width ε.
    Volume { #[arg(long)] chi: f64, #[arg(long)] bending_length: f64, #[arg(long)] epsilon: f64 },
    /// (A + B/δ)|χ|.
    BendingBound {
        #[arg(long)] chi: f64,
        #[arg(long)] delta: f64,
        #[arg(long, default_value_t = 1.0)] a: f64,
        #[arg(long, default_value_t = 1.0)] b: f64,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct ConvergeArgs {
    #[command(subcommand)]
    pub verb: ConvergeVerb,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "verb")]
pub enum ConvergeVerb {
    /// ½ log((1 + 2k)/(1 − 2k)).
    AhlforsWeill { #[arg(long)] k: f64 },
    /// d/(1 − c).
    Tail { #[arg(long)] d: f64, #[arg(long)] c: f64 },
    /// c·(½·deriv + l2); the default constant is not certified.
    Wolpert {
        #[arg(long, default_value_t = 0.0)] sup_norm: f64,
        #[arg(long)] l2: f64,
        #[arg(long)] deriv: f64,
        #[arg(long, default_value_t = 1.0)] wolpert_c: f64,
    },
    /// Sup norm → Ahlfors–Weill → contraction tail. With --l2/--deriv the sup
    /// norm comes from the Wolpert bound.
    Chain {
        #[arg(long)] sup_norm: Option<f64>,
        #[arg(long)] contraction: f64,
        #[arg(long)] l2: Option<f64>,
        #[arg(long)] deriv: Option<f64>,
        #[arg(long, default_value_t = 1.0)] wolpert_c: f64,
    },
    /// Certified iteration of z ↦ p + factor·(z − p).
    #[command(allow_negative_numbers = true)]
    Banach {
        #[arg(long)] factor: f64,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)] fixed: Complex64,
        #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)] x0: Complex64,
        #[arg(long, default_value_t = 1e-10)] tol: f64,
        #[arg(long, default_value_t = 0)] seed: u64,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Suite name or `all`.
    pub suite: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Outcome of a dispatched command: text for stdout, and whether checks passed.
struct Outcome {
    stdout: String,
    passed: bool,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { stdout, passed: true }
    }
}

/// Runs the CLI on `argv` (including the program name) with the process streams.
pub fn run(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with_io<W: Write, E: Write>(argv: &[String], out: &mut W, err: &mut E) -> i32 {
    let argv = match with_config_defaults(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    let cli = match Cli::command().try_get_matches_from(&argv).and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let out_dir = resolved_out_dir(&cli);
    let echo = json!({ "config": &cli, "resolved_out_dir": out_dir });
    let _ = writeln!(err, "{echo}");
    match dispatch(&cli.command, &out_dir) {
        Ok(o) => {
            let _ = write!(out, "{}", o.stdout);
            if o.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::InvalidConfig(_)
        | Error::OutOfDomain(_)
        | Error::HypothesisViolated(_)
        | Error::StencilOutOfDomain(_)
        | Error::NotAZero { .. } => 2,
        Error::QuadratureNotConverged { .. } | Error::NotContractive { .. } | Error::MaxIters(_) | Error::Io(_) => 1,
    }
}

fn resolved_out_dir(cli: &Cli) -> PathBuf {
    cli.out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Appends `--key value` for every config entry whose flag is absent from `argv`.
fn with_config_defaults(argv: &[String]) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else if a == "--config" {
            path = argv.get(i + 1).cloned();
        }
    }
    let Some(path) = path else { return Ok(argv.to_vec()) };
    let text = std::fs::read_to_string(&path).map_err(|e| Error::InvalidConfig(format!("config file {path}: {e}")))?;
    let mut extended = argv.to_vec();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("{path}:{}: expected key=value", lineno + 1)))?;
        let flag = format!("--{}", key.trim().replace('_', "-"));
        let given = argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if !given {
            extended.push(format!("{flag}={}", value.trim()));
        }
    }
    Ok(extended)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn write_file(dir: &Path, name: &Path, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

fn dispatch(cmd: &Command, out_dir: &Path) -> Result<Outcome> {
    match cmd {
        Command::Flow(a) => flow(a, out_dir),
        Command::Portrait(a) => portrait(a, out_dir),
        Command::FixedPoints(a) => {
            let search = find_fixed_points(SearchBox::new((a.x_min, a.x_max), (a.y_min, a.y_max)), a.grid_n)?;
            Ok(Outcome::ok(to_json(&search)))
        }
        Command::Schwarzian(a) => schwarzian(a),
        Command::Pair(a) => {
            let cfg = QuadConfig { rel_tol: a.rel_tol, ..QuadConfig::default() };
            let r = pair_strip(a.c, AnnulusSpec::new(a.s)?, &cfg)?;
            Ok(Outcome::ok(to_json(&json!({
                "value_re": r.value.re,
                "value_im": r.value.im,
                "est_error": r.est_error,
                "n_evals": r.n_evals,
            }))))
        }
        Command::Geom(a) => geom(&a.verb, a.format),
        Command::Converge(a) => converge(&a.verb),
        Command::Verify(a) => verify(a),
    }
}

fn flow(a: &FlowArgs, out_dir: &Path) -> Result<Outcome> {
    let cfg = a.integrator.config()?;
    let noise = match a.noise {
        NoiseArg::None => NoiseSchedule::Zero,
        NoiseArg::Exp => NoiseSchedule::ExpDecay { amplitude: a.noise_amplitude, rate: a.noise_decay },
        NoiseArg::Power => NoiseSchedule::PowerDecay { amplitude: a.noise_amplitude, power: a.noise_decay },
    };
    let trajectory = match noise {
        NoiseSchedule::Zero => integrate(a.z0, &cfg, a.target)?,
        _ => perturbed_integrate(a.z0, noise, a.seed, &cfg)?.trajectory,
    };
    let csv = trajectory_csv(&trajectory);
    match &a.out {
        Some(name) => {
            let path = write_file(out_dir, name, &csv)?;
            Ok(Outcome::ok(to_json(&json!({
                "csv": path,
                "n_samples": trajectory.samples.len(),
                "integrator_id": trajectory.integrator_id,
                "terminal_status": trajectory.terminal_status,
            }))))
        }
        None => Ok(Outcome::ok(csv)),
    }
}

fn portrait(a: &PortraitArgs, out_dir: &Path) -> Result<Outcome> {
    let spec = PortraitSpec { x: (a.x_min, a.x_max), y: (a.y_min, a.y_max), nx: a.nx, ny: a.ny, width_px: a.width_px };
    spec.validate()?;
    let labels = if a.no_labels { None } else { Some(spec.labels(&a.integrator.config()?)?) };
    let svg = phase_portrait_svg(&spec, labels.as_deref())?;
    let svg_path = write_file(out_dir, Path::new(&format!("{}.svg", a.stem)), &svg)?;
    let csv_path = match &labels {
        Some(l) => Some(write_file(out_dir, Path::new(&format!("{}.csv", a.stem)), &labels_csv(l))?),
        None => None,
    };
    Ok(Outcome::ok(to_json(&json!({ "svg": svg_path, "csv": csv_path, "n_cells": a.nx * a.ny }))))
}

fn schwarzian(a: &SchwarzianArgs) -> Result<Outcome> {
    let g = PowerMapSpec::new(a.c);
    let coefficient = schwarzian_closed_form(a.c);
    let numeric = schwarzian_numeric(&g, a.z, default_step(a.z))?;
    let expected = coefficient.at(a.z);
    let rel_error = if expected.norm() > 0.0 { (numeric - expected).norm() / expected.norm() } else { numeric.norm() };
    let empirical = empirical_injectivity_detail(a.c, a.samples, a.seed, a.margin)?;
    let disk = univalence_criterion(a.c);
    let strip = strip_criterion(a.c);
    Ok(Outcome::ok(to_json(&json!({
        "c": format_complex(a.c),
        "schwarzian_coefficient": format_complex(coefficient.c),
        "z": format_complex(a.z),
        "numeric": format_complex(numeric),
        "closed_form": format_complex(expected),
        "rel_error": rel_error,
        "disk_criterion": disk,
        "strip_length": strip_intersection_length(a.c),
        "strip_criterion": strip,
        "empirical": empirical,
        "tests_agree": disk == strip && strip == empirical.injective,
    }))))
}

fn geom(verb: &GeomVerb, format: Format) -> Result<Outcome> {
    let (name, value, inputs): (&str, f64, Value) = match *verb {
        GeomVerb::TubeArea { radius, re_l } => ("tube_area", geo::tube_boundary_area(radius, re_l)?, json!({"radius": radius, "re_l": re_l})),
        GeomVerb::MinLength { epsilon, radius } => {
            ("min_length", geo::min_length_bound(epsilon, radius)?, json!({"epsilon": epsilon, "radius": radius}))
        }
        GeomVerb::DiskArea { r } => ("disk_area", geo::quotient_disk_area_exact(r, &QuadConfig::default())?, json!({"r": r})),
        GeomVerb::DiskAreaBound { d } => ("disk_area_bound", geo::quotient_disk_area_bound(d)?, json!({"d": d})),
        GeomVerb::VisualArea { d } => ("visual_area", geo::visual_area_exact(d)?, json!({"d": d})),
        GeomVerb::ProjectionBound { epsilon } => {
            ("projection_bound", geo::projection_halfspace_distance_bound(epsilon)?, json!({"epsilon": epsilon}))
        }
        GeomVerb::Lambert { d } => ("lambert", geo::lambert_quadrilateral(d)?, json!({"d": d})),
        GeomVerb::ShadowDistance { r_eps3, ell_u } => {
            ("shadow_distance", geo::halfspace_shadow_distance(r_eps3, ell_u)?, json!({"r_eps3": r_eps3, "ell_u": ell_u}))
        }
        GeomVerb::ShadowArea { r_eps3, ell_u } => {
            ("shadow_area", geo::shadow_area_bound(r_eps3, ell_u)?, json!({"r_eps3": r_eps3, "ell_u": ell_u}))
        }
        GeomVerb::Displacement { t, theta, n, r } => {
            let g = geo::LoxodromicCyclicGroup::new(t, theta)?;
            if !(r >= 0.0) {
                return Err(Error::OutOfDomain(format!("need r ≥ 0, got {r}")));
            }
            ("displacement", geo::loxodromic_displacement(g, n, r), json!({"t": t, "theta": theta, "n": n, "r": r}))
        }
        GeomVerb::Poincare { t, theta, r, tail_tol } => {
            let s = geo::poincare_series_cyclic(geo::LoxodromicCyclicGroup::new(t, theta)?, r, tail_tol)?;
            let inputs = json!({"t": t, "theta": theta, "r": r, "tail_tol": tail_tol, "n_max": s.n_max, "tail_bound": s.tail_bound});
            ("poincare", s.value, inputs)
        }
        GeomVerb::PoincareBound { epsilon } => ("poincare_bound", geo::poincare_uniform_bound(epsilon)?, json!({"epsilon": epsilon})),
        GeomVerb::Orthosum { n, diameter, poincare } => (
            "orthosum",
            geo::orthosum_bound(n, diameter, poincare)?,
            json!({"n": n, "diameter": diameter, "poincare": poincare}),
        ),
        GeomVerb::BoundaryArea { chi, bending_length, t } => {
            let spec = geo::CoreNeighborhoodSpec::new(chi, bending_length, t)?;
            ("boundary_area", geo::neighborhood_boundary_area(&spec), json!({"chi": chi, "bending_length": bending_length, "t": t}))
        }
        GeomVerb::Volume { chi, bending_length, epsilon } => {
            let spec = geo::CoreNeighborhoodSpec::new(chi, bending_length, epsilon)?;
            ("volume", geo::neighborhood_volume(&spec), json!({"chi": chi, "bending_length": bending_length, "epsilon": epsilon}))
        }
        GeomVerb::BendingBound { chi, delta, a, b } => {
            ("bending_bound", geo::bending_length_bound(chi, delta, a, b)?, json!({"chi": chi, "delta": delta, "a": a, "b": b}))
        }
    };
    let text = match format {
        Format::Plain => format!("{value}\n"),
        Format::Json => to_json(&json!({ "verb": name, "value": value, "inputs": inputs })),
    };
    Ok(Outcome::ok(text))
}

fn converge(verb: &ConvergeVerb) -> Result<Outcome> {
    let text = match *verb {
        ConvergeVerb::AhlforsWeill { k } => to_json(&ahlfors_weill_certificate(k)?),
        ConvergeVerb::Tail { d, c } => to_json(&contraction_tail_certificate(d, c)?),
        ConvergeVerb::Wolpert { sup_norm, l2, deriv, wolpert_c } => {
            to_json(&wolpert_certificate(&NormBudget::new(sup_norm, l2, deriv, wolpert_c)?))
        }
        ConvergeVerb::Chain { sup_norm, contraction, l2, deriv, wolpert_c } => match (sup_norm, l2, deriv) {
            (Some(s), None, None) => to_json(&chained_tail_bound(s, contraction)?),
            (None, Some(l2), Some(deriv)) => {
                to_json(&chained_from_budget(&NormBudget::new(0.0, l2, deriv, wolpert_c)?, contraction)?)
            }
            _ => return Err(Error::InvalidConfig("chain needs either --sup-norm or both --l2 and --deriv".into())),
        },
        ConvergeVerb::Banach { factor, fixed, x0, tol, seed } => {
            let spec = ContractionSpec::new(
                factor,
                move |z: &Complex64| fixed + (z - fixed) * factor,
                |a: &Complex64, b: &Complex64| (a - b).norm(),
            )?
            .with_resolution(8.0 * f64::EPSILON * (1.0 + fixed.norm()))?;
            let radius = 2.0 * (x0 - fixed).norm().max(1.0);
            let sampler = move |r: &mut Prng| uniform_in_disk(r, fixed, radius);
            let res = banach_iterate(&spec, x0, tol, sampler, seed, DEFAULT_MAX_ITERS)?;
            to_json(&json!({
                "fixed_point": format_complex(res.fixed_point),
                "n_iters": res.n_iters,
                "certified_radius": res.certified_radius,
                "formula_id": "contraction_tail",
            }))
        }
    };
    Ok(Outcome::ok(text))
}

fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let reports: Vec<VerifyReport> = if a.suite == "all" { run_all(a.seed) } else { vec![run_suite(&a.suite, a.seed)?] };
    let passed = reports.iter().all(VerifyReport::passed);
    Ok(Outcome { stdout: to_json(&reports), passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let argv: Vec<String> = std::iter::once("rvflow").chain(args.iter().copied()).map(String::from).collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with_io(&argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn flow_prints_csv() {
        let (code, out, err) = run_str(&["flow", "--z0", "0.3+0.2i", "--target", "1"]);
        assert_eq!(code, 0, "{err}");
        assert!(out.starts_with("t,re,im\n"));
        assert!(err.contains("\"config\""));
    }

    #[test]
    fn negative_complex_arguments_parse() {
        let (code, _, err) = run_str(&["flow", "--z0", "-0.5+0.1i", "--t-max", "1"]);
        assert_eq!(code, 0, "{err}");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_str(&["flow", "--z0", "1", "--nope", "3"]).0, 2);
        assert_eq!(run_str(&["flow"]).0, 2);
        assert_eq!(run_str(&["geom", "volume", "--chi", "-1", "--bending-length", "0", "--epsilon", "1"]).0, 2);
        assert_eq!(run_str(&["converge", "ahlfors-weill", "--k", "0.5"]).0, 2);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("verify"));
    }

    #[test]
    fn geom_plain_and_json() {
        let (code, out, _) = run_str(&["geom", "poincare", "--t", "1", "--r", "0", "--format", "plain"]);
        assert_eq!(code, 0);
        let v: f64 = out.trim().parse().unwrap();
        assert!((v - 1.0 / 1f64.tanh()).abs() < 1e-12);
        let (_, out, _) = run_str(&["geom", "--format", "json", "visual-area", "--d", "0"]);
        let j: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(j["verb"], "visual_area");
    }

    #[test]
    fn converge_chain_certificate() {
        let (code, out, _) = run_str(&["converge", "chain", "--sup-norm", "0.1", "--contraction", "0.5"]);
        assert_eq!(code, 0);
        let j: Value = serde_json::from_str(&out).unwrap();
        assert!((j["bound"].as_f64().unwrap() - 0.4055).abs() < 1e-4);
        assert!(j["inputs"].is_object() && j["formula_id"].is_string());
    }

    #[test]
    fn config_file_supplies_defaults_and_flags_win() {
        let dir = std::env::temp_dir().join(format!("rvflow-cli-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let cfg = dir.join("run.conf");
        std::fs::write(&cfg, "# comment\nt_max = 0.5\nmethod=rk4\ndt=0.1\n").unwrap();
        let cfg = cfg.to_str().unwrap();
        let (code, out, err) = run_str(&["flow", "--z0", "0.3+0.2i", "--config", cfg]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(out.lines().count(), 1 + 6);
        let (_, out, _) = run_str(&["flow", "--z0", "0.3+0.2i", "--dt", "0.25", "--config", cfg]);
        assert_eq!(out.lines().count(), 1 + 3);
        std::fs::write(dir.join("bad.conf"), "warp=9\n").unwrap();
        let (code, _, _) = run_str(&["flow", "--z0", "1", "--config", dir.join("bad.conf").to_str().unwrap()]);
        assert_eq!(code, 2);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}

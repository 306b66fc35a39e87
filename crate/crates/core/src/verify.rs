//! Invariant suites behind `rvflow verify`.
//!
//! Every check is numbered `<suite>.<n>`; a number groups all the
//! comparisons made for one invariant. Randomized checks draw from
//! substreams of the run seed, one per suite, so suites are independent of
//! each other and of scheduling.

use crate::convergence::{
    ahlfors_weill_bound, banach_iterate, chained_tail_bound, wolpert_sup_bound, ContractionSpec, NormBudget,
    DEFAULT_MAX_ITERS,
};
use crate::error::Result;
use crate::hyperbolic::{
    halfspace_shadow_distance, lambert_quadrilateral, loxodromic_displacement, loxodromic_displacement_by_matrix,
    neighborhood_boundary_area, neighborhood_volume, neighborhood_volume_quadrature, poincare_series_cyclic,
    poincare_uniform_bound, quotient_disk_area_bound, quotient_disk_area_closed_form, quotient_disk_area_exact,
    quotient_disk_area_sup_bound, shadow_area_from_distance, shadow_radius_threshold, visual_area_exact,
    CoreNeighborhoodSpec, LoxodromicCyclicGroup,
};
use crate::mobius::MobiusTransform;
use crate::model_flow::{
    circle_decompose, classify_fixed_point, classify_start, eval_v, find_fixed_points, integrate, real_jacobian,
    wirtinger_derivatives, BasinLabel, FixedPointClass, IntegratorConfig, SearchBox, KNOWN_ZEROS,
};
use crate::pairing::{
    bers_region, dc_limit, in_closed_unit_disk_about_one, pair_strip, pair_strip_closed_form, prelimit_f_l_power,
    AnnulusSpec, LengthPair, F_L, F_ell,
};
use crate::par::map_range;
use crate::quadrature::QuadConfig;
use crate::rng::{substream, uniform_in_disk, uniform_in_rect, Prng};
use crate::schwarzian::{
    default_step, empirical_injectivity, mobius_invariance_check, schwarzian_analytic, schwarzian_closed_form,
    schwarzian_numeric, strip_criterion, univalence_criterion, PowerMapSpec,
};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::fmt::Display;

/// Suite names, in report order.
pub const SUITES: [&str; 6] = [
    "cli",
    "convergence_bounds",
    "hyperbolic_estimates",
    "model_flow",
    "pairing_functionals",
    "schwarzian_lab",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckFailure {
    pub check_id: String,
    pub expected: String,
    pub got: String,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub n_checks: usize,
    pub n_failed: usize,
    pub failures: Vec<CheckFailure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.n_failed == 0
    }
}

struct Checker {
    suite: &'static str,
    n_checks: usize,
    failures: Vec<CheckFailure>,
}

impl Checker {
    fn new(suite: &'static str) -> Self {
        Self { suite, n_checks: 0, failures: Vec::new() }
    }

    fn record(&mut self, id: u32, ok: bool, expected: impl Display, got: impl Display, tolerance: f64) {
        self.n_checks += 1;
        if !ok {
            self.failures.push(CheckFailure {
                check_id: format!("{}.{id}", self.suite),
                expected: expected.to_string(),
                got: got.to_string(),
                tolerance,
            });
        }
    }

    fn abs(&mut self, id: u32, expected: f64, got: f64, tol: f64) {
        self.record(id, (got - expected).abs() <= tol, expected, got, tol);
    }

    /// `|got − expected| ≤ tol·scale`.
    fn scaled(&mut self, id: u32, expected: f64, got: f64, tol: f64, scale: f64) {
        self.record(id, (got - expected).abs() <= tol * scale, expected, got, tol * scale);
    }

    fn rel(&mut self, id: u32, expected: f64, got: f64, tol: f64) {
        self.scaled(id, expected, got, tol, expected.abs());
    }

    fn complex_abs(&mut self, id: u32, expected: Complex64, got: Complex64, tol: f64) {
        self.record(id, (got - expected).norm() <= tol, expected, got, tol);
    }

    fn complex_rel(&mut self, id: u32, expected: Complex64, got: Complex64, tol: f64) {
        let t = tol * expected.norm();
        self.record(id, (got - expected).norm() <= t, expected, got, t);
    }

    fn holds(&mut self, id: u32, ok: bool, expected: impl Display, got: impl Display) {
        self.record(id, ok, expected, got, 0.0);
    }

    fn ok<T>(&mut self, id: u32, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.record(id, false, "Ok", format!("error: {e}"), 0.0);
                None
            }
        }
    }

    fn finish(self, seed: u64) -> VerifyReport {
        VerifyReport {
            suite: self.suite.to_string(),
            seed,
            n_checks: self.n_checks,
            n_failed: self.failures.len(),
            failures: self.failures,
        }
    }
}

/// Runs one suite by name.
pub fn run_suite(name: &str, seed: u64) -> Result<VerifyReport> {
    let suite = SUITES
        .iter()
        .position(|s| *s == name)
        .ok_or_else(|| crate::Error::InvalidConfig(format!("unknown suite '{name}', expected one of {}", SUITES.join(", "))))?;
    let mut rng = substream(seed, suite as u64);
    let report = match suite {
        0 => cli_suite(),
        1 => convergence_suite(&mut rng),
        2 => hyperbolic_suite(&mut rng),
        3 => model_flow_suite(&mut rng),
        4 => pairing_suite(&mut rng),
        _ => schwarzian_suite(&mut rng, seed),
    };
    Ok(report.finish(seed))
}

/// All suites, possibly in parallel, reported in [`SUITES`] order.
pub fn run_all(seed: u64) -> Vec<VerifyReport> {
    map_range(SUITES.len(), |k| run_suite(SUITES[k], seed).expect("suite names are static"))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn in_disk_about_one(rng: &mut Prng) -> Complex64 {
    uniform_in_disk(rng, c(1.0, 0.0), 1.0)
}

fn model_flow_suite(rng: &mut Prng) -> Checker {
    let mut k = Checker::new("model_flow");

    // 1: the field is the limit of dc along the flow
    for _ in 0..1000 {
        let z = in_disk_about_one(rng);
        k.complex_abs(1, z * (F_L(z) - F_ell(z)), eval_v(z), 1e-12);
    }

    // 2: no zeros besides the four known ones
    let (nx, ny) = (400usize, 400usize);
    let mins = map_range(nx, |i| {
        let x = -3.0 + 7.0 * i as f64 / (nx - 1) as f64;
        (0..ny)
            .map(|j| c(x, -3.0 + 6.0 * j as f64 / (ny - 1) as f64))
            .filter(|z| KNOWN_ZEROS.iter().all(|&r| (z - r).norm() > 0.1))
            .map(|z| eval_v(z).norm())
            .fold(f64::INFINITY, f64::min)
    });
    for m in mins {
        k.record(2, m > 1e-3, "> 1e-3", m, 1e-3);
    }

    // 3, 4: tangency to the circle about 1 and the sign of the horizontal part
    let n = 10_000;
    for i in 0..n {
        let theta = TAU * i as f64 / n as f64;
        let (radial, horizontal) = circle_decompose(theta);
        k.abs(3, 0.0, radial, 1e-12);
        let expected = 0.5 * theta.sin().powi(2) * (3.0 + 2.0 * theta.cos());
        k.abs(4, expected, horizontal, 1e-12);
        let at_pole = i == 0 || 2 * i == n;
        if at_pole {
            k.abs(4, 0.0, horizontal, 1e-12);
        } else {
            k.record(4, horizontal > 1e-12, "> 1e-12", horizontal, 1e-12);
        }
    }

    // 5: derivatives against central differences
    let h = 1e-5;
    for _ in 0..100 {
        let z = uniform_in_rect(rng, (-3.0, 4.0), (-3.0, 3.0));
        let vx = (eval_v(z + h) - eval_v(z - h)) / (2.0 * h);
        let vy = (eval_v(z + c(0.0, h)) - eval_v(z - c(0.0, h))) / (2.0 * h);
        let (dz, dzbar) = wirtinger_derivatives(z);
        let scale = dz.norm() + dzbar.norm();
        let tol = 1e-6 * scale;
        k.record(5, ((vx - c(0.0, 1.0) * vy) * 0.5 - dz).norm() <= tol, dz, (vx - c(0.0, 1.0) * vy) * 0.5, tol);
        k.record(5, ((vx + c(0.0, 1.0) * vy) * 0.5 - dzbar).norm() <= tol, dzbar, (vx + c(0.0, 1.0) * vy) * 0.5, tol);
        let j = real_jacobian(z);
        let fd = [[vx.re, vy.re], [vx.im, vy.im]];
        for (r, row) in j.iter().enumerate() {
            for (s, &entry) in row.iter().enumerate() {
                k.scaled(5, entry, fd[r][s], 1e-6, scale);
            }
        }
        // 6: trace and determinant in terms of the Wirtinger pair
        k.scaled(6, 2.0 * dz.re, j[0][0] + j[1][1], 1e-12, scale);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        k.scaled(6, dz.norm_sqr() - dzbar.norm_sqr(), det, 1e-12, scale * scale);
    }

    // 7: classification of the zeros, consistent with eigenvalue signs
    let expected = [
        (-1.0, FixedPointClass::Saddle),
        (0.0, FixedPointClass::Unstable),
        (1.0, FixedPointClass::Stable),
        (2.0, FixedPointClass::Saddle),
    ];
    for (z, class) in expected {
        if let Some(rep) = k.ok(7, classify_fixed_point(c(z, 0.0))) {
            let [a, b] = rep.eigenvalues.map(|l| l.re);
            let by_sign = if a.abs() < 1e-9 || b.abs() < 1e-9 {
                FixedPointClass::Nonhyperbolic
            } else if a < 0.0 && b < 0.0 {
                FixedPointClass::Stable
            } else if a > 0.0 && b > 0.0 {
                FixedPointClass::Unstable
            } else {
                FixedPointClass::Saddle
            };
            k.holds(7, rep.class == class && by_sign == class, format!("{class:?}"), format!("{:?}/{by_sign:?}", rep.class));
        }
    }

    // 8: the Newton search finds exactly the four zeros
    if let Some(found) = k.ok(8, find_fixed_points(SearchBox::new((-2.0, 3.0), (-2.0, 2.0)), 24)) {
        k.holds(8, found.zeros.len() == 4, 4, found.zeros.len());
        for (rep, z) in found.zeros.iter().zip(KNOWN_ZEROS) {
            k.complex_abs(8, c(z, 0.0), rep.location, 1e-10);
        }
    }

    // 9: trajectories start at t = 0 with strictly increasing times;
    // 10: starts inside the disk about 1 converge to 1
    let cfg = IntegratorConfig::default();
    for _ in 0..20 {
        let z0 = uniform_in_disk(rng, c(1.0, 0.0), 0.95);
        if let Some(tr) = k.ok(9, integrate(z0, &cfg, Some(c(1.0, 0.0)))) {
            let increasing = tr.samples.windows(2).all(|w| w[1].0 > w[0].0);
            k.holds(9, tr.samples[0].0 == 0.0 && increasing, "t0 = 0, increasing", format!("t0 = {}", tr.samples[0].0));
        }
        if let Some(label) = k.ok(10, classify_start(z0, &cfg)) {
            k.holds(10, label == BasinLabel::One, BasinLabel::One, label);
        }
    }

    // 11: RK4 global error shrinks at fourth order
    let z0 = c(1.3, 0.2);
    let end = |dt: f64| integrate(z0, &IntegratorConfig::rk4(dt, 5.0), None).map(|t| t.final_state().1);
    if let (Some(reference), Some(a), Some(b)) = (k.ok(11, end(1e-4)), k.ok(11, end(1e-2)), k.ok(11, end(5e-3))) {
        let order = ((a - reference).norm() / (b - reference).norm()).log2();
        k.record(11, order >= 3.8, ">= 3.8", order, 0.0);
    }
    k
}

fn schwarzian_suite(rng: &mut Prng, seed: u64) -> Checker {
    let mut k = Checker::new("schwarzian_lab");

    // 1: disk, strip and empirical univalence tests agree away from the circle
    let mut cs = Vec::with_capacity(200);
    while cs.len() < 200 {
        let z = uniform_in_rect(rng, (0.0, 3.0), (-2.0, 2.0));
        if z.re > 0.0 && ((z - 1.0).norm() - 1.0).abs() > 0.05 {
            cs.push(z);
        }
    }
    let verdicts = map_range(cs.len(), |i| empirical_injectivity(cs[i], 2000, seed ^ i as u64, 0.05));
    for (z, emp) in cs.iter().zip(verdicts) {
        if let Some(emp) = k.ok(1, emp) {
            let (disk, strip) = (univalence_criterion(*z), strip_criterion(*z));
            k.holds(1, disk == strip && strip == emp, disk, format!("c = {z}: strip {strip}, empirical {emp}"));
        }
    }

    // 2: S(g_c)·z² does not depend on z
    let safe = [c(0.0, 1.0), c(1.0, 1.0), c(-1.0, 1.0), c(0.5, 2.0), c(-2.0, 0.5), c(3.0, 1.0), c(0.0, 0.3), c(-0.2, 4.0), c(1.5, 0.7), c(-0.7, 0.2)];
    for _ in 0..5 {
        let ex = uniform_in_disk(rng, c(1.0, 0.0), 1.5);
        let g = PowerMapSpec::new(ex);
        let coef = schwarzian_closed_form(ex).c;
        for z in safe {
            if let Some(s) = k.ok(2, schwarzian_numeric(&g, z, default_step(z))) {
                let scale = coef.norm().max(1e-2);
                let tol = 1e-4 * scale;
                k.record(2, (s * z * z - coef).norm() <= tol, coef, s * z * z, tol);
            }
        }
    }

    // 3: stencil values stay finite across the open upper half-plane
    for i in 1..40 {
        let arg = PI * i as f64 / 40.0;
        for r in [0.1, 0.5, 1.0, 3.0, 10.0] {
            let z = Complex64::from_polar(r, arg);
            let g = PowerMapSpec::new(c(1.7, -0.6));
            let s = schwarzian_numeric(&g, z, default_step(z));
            k.holds(3, matches!(s, Ok(v) if v.is_finite()), "finite", format!("{s:?}"));
        }
    }

    // 4: stencil against the closed form; 5: analytic jet against the closed form
    for z in [c(0.0, 1.0), c(1.0, 1.0), c(-0.5, 2.0)] {
        for ex in [c(0.5, 0.0), c(1.5, 0.5), c(0.0, 0.0)] {
            let g = PowerMapSpec::new(ex);
            let cf = schwarzian_closed_form(ex).at(z);
            if let Some(s) = k.ok(4, schwarzian_numeric(&g, z, default_step(z))) {
                k.complex_rel(4, cf, s, 1e-5);
            }
            if let Some(a) = schwarzian_analytic(&g, z) {
                k.complex_abs(5, cf, a, 1e-12 * (1.0 + cf.norm()));
            }
        }
    }

    // 6: post-composition with Möbius maps leaves S unchanged; S(Möbius) = 0
    let mobius = [
        MobiusTransform::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(3.0, 0.0)),
        MobiusTransform::new(c(2.0, 1.0), c(0.0, 0.5), c(0.3, 0.0), c(1.0, -0.2)),
        MobiusTransform::new(c(1.0, 0.0), c(5.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
    ];
    for m in mobius {
        let Some(m) = k.ok(6, m) else { continue };
        for ex in [c(0.5, 0.0), c(1.5, 0.5)] {
            let z = c(0.3, 1.2);
            if let Some(d) = k.ok(6, mobius_invariance_check(ex, m, z)) {
                let scale = schwarzian_closed_form(ex).at(z).norm().max(1.0);
                k.record(6, d <= 1e-5 * scale, 0.0, d, 1e-5 * scale);
            }
        }
        if let Some(s) = schwarzian_analytic(&m, c(0.3, 1.2)) {
            k.complex_abs(6, c(0.0, 0.0), s, 1e-12);
        }
    }

    // 7: the boundary circle counts as univalent
    for ex in [c(2.0, 0.0), c(1.0, 1.0), c(1.0, -1.0)] {
        k.holds(7, univalence_criterion(ex) && strip_criterion(ex), true, format!("c = {ex}"));
    }
    k
}

fn pairing_suite(rng: &mut Prng) -> Checker {
    let mut k = Checker::new("pairing_functionals");
    let cfg = QuadConfig::default();

    // 1: quadrature against the closed form
    for _ in 0..20 {
        let z = in_disk_about_one(rng);
        for s in [0.5, 1.0, 2.0] {
            let a = AnnulusSpec { s };
            if let Some(q) = k.ok(1, pair_strip(z, a, &cfg)) {
                k.complex_rel(1, pair_strip_closed_form(z, a), q.value, 1e-8);
            }
        }
    }

    // 2: the pairing scales linearly with the annulus parameter
    for _ in 0..5 {
        let z = in_disk_about_one(rng);
        let Some(base) = k.ok(2, pair_strip(z, AnnulusSpec { s: 1.0 }, &cfg)) else { continue };
        for m in [2.0, 3.0, 5.0] {
            if let Some(q) = k.ok(2, pair_strip(z, AnnulusSpec { s: m }, &cfg)) {
                k.complex_rel(2, base.value * m, q.value, 1e-10);
            }
        }
    }

    // 3: dc_limit = c(F_L − F_ell)
    for _ in 0..1000 {
        let z = in_disk_about_one(rng);
        k.complex_abs(3, z * (F_L(z) - F_ell(z)), dc_limit(z), 1e-12);
    }

    // 4: at c = 2 the length grows while c is stationary; the value at 0
    k.abs(4, 1.5, F_ell(c(2.0, 0.0)), 0.0);
    k.complex_abs(4, c(0.0, 0.0), dc_limit(c(2.0, 0.0)), 0.0);
    k.complex_abs(4, c(0.5, 0.0), F_L(c(0.0, 0.0)) - F_ell(c(0.0, 0.0)), 0.0);

    // 5: Bers inequality ⇔ |L/ℓ − 1| ≤ 1
    for i in 0..10_000 {
        let ell = 10f64.powf(rng.gen_range(-2.0..1.0));
        let ratio = if i % 20 == 0 {
            // exact ties on the boundary circle
            [c(2.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(1.6, 0.8), c(1.6, -0.8)][(i / 20) % 5]
        } else {
            let mut z = uniform_in_rect(rng, (0.0, 2.5), (-1.5, 1.5));
            while z.re <= 0.0 {
                z = uniform_in_rect(rng, (0.0, 2.5), (-1.5, 1.5));
            }
            z
        };
        if let Some(pair) = k.ok(5, LengthPair::new(ell, ratio * ell)) {
            let v = bers_region(pair);
            let disk = in_closed_unit_disk_about_one(pair.ratio());
            k.holds(5, v.satisfies == disk, disk, format!("{} for ratio {}", v.satisfies, pair.ratio()));
        }
    }

    // 6: the pre-limit F_L approaches the limit as s decreases
    for ex in [c(1.3, 0.4), c(0.6, -0.5)] {
        let mut prev = f64::INFINITY;
        for s in [0.5, 0.25, 0.125] {
            if let Some(v) = k.ok(6, prelimit_f_l_power(ex, AnnulusSpec { s }, &cfg)) {
                let err = (v - F_L(ex)).norm();
                k.record(6, err <= prev + 1e-13 && err < 1e-10, format!("<= {prev}"), err, 1e-13);
                prev = err;
            }
        }
    }
    k
}

fn hyperbolic_suite(rng: &mut Prng) -> Checker {
    let mut k = Checker::new("hyperbolic_estimates");
    let cfg = QuadConfig::default();

    // 1: disk area: quadrature = its closed form ≤ 4πr²/(1−r²)² = π/sinh²(log 1/r)
    for i in 1..=7 {
        let r = 0.1 * i as f64;
        if let Some(q) = k.ok(1, quotient_disk_area_exact(r, &cfg)) {
            k.rel(1, quotient_disk_area_closed_form(r), q, 1e-10);
            k.record(1, q <= quotient_disk_area_sup_bound(r), quotient_disk_area_sup_bound(r), q, 0.0);
        }
        if let Some(b) = k.ok(1, quotient_disk_area_bound((1.0 / r).ln())) {
            k.rel(1, quotient_disk_area_sup_bound(r), b, 1e-12);
        }
    }

    // 2: visual area against πe^{−2d}
    let ds = std::iter::once(0.0).chain((0..=60).map(|i| 10f64.powf(-3.0 + 4.30103 * i as f64 / 60.0).min(20.0)));
    for d in ds {
        if let Some(v) = k.ok(2, visual_area_exact(d)) {
            let floor = PI * (-2.0 * d).exp();
            k.record(2, v >= floor, floor, v, 0.0);
            k.rel(2, 4.0 / (1.0 + (-2.0 * d).exp()), v / floor, 1e-12);
        }
    }

    // 3: Lambert quadrilateral relation is an involution
    for i in 1..=100 {
        let d = 0.01 * (1000f64).powf(i as f64 / 100.0);
        if let Some(d2) = k.ok(3, lambert_quadrilateral(d)) {
            if let Some(back) = k.ok(3, lambert_quadrilateral(d2)) {
                k.scaled(3, d, back, 1e-12, d.max(1.0));
            }
        }
    }

    // 4: displacement identity against the matrix oracle
    for _ in 0..1000 {
        let t = rng.gen_range(0.05..3.0);
        let theta = rng.gen_range(0.0..TAU);
        let n = rng.gen_range(-5i64..=5);
        let r = rng.gen_range(0.0..2.0);
        let Some(g) = k.ok(4, LoxodromicCyclicGroup::new(t, theta)) else { continue };
        let a = loxodromic_displacement(g, n, r);
        k.scaled(4, loxodromic_displacement_by_matrix(g, n, r), a, 1e-9, a.max(1.0));
    }

    // 5: on-axis series equals coth t and respects the uniform bound
    for t in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let Some(g) = k.ok(5, LoxodromicCyclicGroup::new(t, 0.7)) else { continue };
        if let Some(s) = k.ok(5, poincare_series_cyclic(g, 0.0, 1e-14)) {
            k.abs(5, 1.0 / t.tanh(), s.value, 1e-10);
            if let Some(b) = k.ok(5, poincare_uniform_bound(t / 2.0)) {
                k.record(5, s.value <= b, b, s.value, 0.0);
            }
        }
    }

    // 6: at r = 0 the series decreases in t and ignores the rotation
    let mut prev = f64::INFINITY;
    for i in 1..=40 {
        let t = 0.1 * i as f64;
        let values: Vec<f64> = [0.0, 1.0, 2.5]
            .iter()
            .filter_map(|&theta| LoxodromicCyclicGroup::new(t, theta).ok())
            .filter_map(|g| poincare_series_cyclic(g, 0.0, 1e-15).ok())
            .map(|s| s.value)
            .collect();
        k.holds(6, values.len() == 3, 3, values.len());
        let Some(&v) = values.first() else { continue };
        k.record(6, v < prev, format!("< {prev}"), v, 0.0);
        for w in &values[1..] {
            k.abs(6, v, *w, 1e-14);
        }
        prev = v;
    }

    // 7: neighbourhood volume: closed form against quadrature; A_0 = 2π|χ|
    for _ in 0..100 {
        let spec = CoreNeighborhoodSpec::new(rng.gen_range(0.0..10.0), rng.gen_range(0.0..5.0), rng.gen_range(0.0..3.0));
        let Some(spec) = k.ok(7, spec) else { continue };
        if let Some(q) = k.ok(7, neighborhood_volume_quadrature(&spec, &cfg)) {
            k.scaled(7, neighborhood_volume(&spec), q, 1e-8, neighborhood_volume(&spec).max(f64::MIN_POSITIVE));
        }
        let a0 = neighborhood_boundary_area(&CoreNeighborhoodSpec { offset: 0.0, ..spec });
        k.rel(7, TAU * spec.chi_abs, a0, 1e-15);
    }

    // 8: shadow estimates: hypothesis guard, and the 16π form dominates π/sinh²
    k.holds(8, halfspace_shadow_distance(shadow_radius_threshold() - 1e-3, 1.0).is_err(), "error", "below threshold");
    for i in 0..50 {
        let d = 2f64.sqrt().ln() + 0.2 * i as f64;
        if let Some(b) = k.ok(8, quotient_disk_area_bound(d)) {
            let s = shadow_area_from_distance(d);
            k.record(8, s >= b, b, s, 0.0);
        }
    }
    k
}

fn convergence_suite(rng: &mut Prng) -> Checker {
    let mut k = Checker::new("convergence_bounds");

    // 1: Banach certificates on affine contractions with known fixed points
    for trial in 0..100 {
        let factor = rng.gen_range(0.05..0.95);
        let fixed = uniform_in_disk(rng, c(0.0, 0.0), 2.0);
        let rot = Complex64::from_polar(1.0, rng.gen_range(0.0..TAU));
        let x0 = uniform_in_disk(rng, fixed, 3.0);
        let spec = ContractionSpec::new(
            factor,
            move |z: &Complex64| fixed + rot * factor * (z - fixed),
            |a: &Complex64, b: &Complex64| (a - b).norm(),
        )
        .and_then(|s| s.with_resolution(8.0 * f64::EPSILON * (1.0 + fixed.norm())));
        let Some(spec) = k.ok(1, spec) else { continue };
        let sampler = move |r: &mut Prng| uniform_in_disk(r, fixed, 3.0);
        if let Some(res) = k.ok(1, banach_iterate(&spec, x0, 1e-10, sampler, trial, DEFAULT_MAX_ITERS)) {
            let err = (res.fixed_point - fixed).norm();
            k.record(1, err <= res.certified_radius, format!("<= {}", res.certified_radius), err, 0.0);
        }
    }

    // 2: Ahlfors–Weill bound: value at ¼, monotone and convex on [0, ½)
    if let Some(v) = k.ok(2, ahlfors_weill_bound(0.25)) {
        k.abs(2, 0.5 * 3f64.ln(), v, 1e-14);
    }
    let grid: Vec<f64> = (0..200).filter_map(|i| ahlfors_weill_bound(0.49 * i as f64 / 199.0).ok()).collect();
    k.holds(2, grid.len() == 200, 200, grid.len());
    for w in grid.windows(3) {
        k.record(2, w[1] > w[0], format!("> {}", w[0]), w[1], 0.0);
        let second = w[2] - 2.0 * w[1] + w[0];
        k.record(2, second >= -1e-15, ">= 0", second, 1e-15);
    }

    // 3: the chained tail bound vanishes with the sup norm
    // sup norm ½ (k = 1) is the edge of the domain
    k.holds(3, chained_tail_bound(0.5, 0.5).is_err(), "OUT_OF_DOMAIN", "sup norm 1/2");
    let mut prev = f64::INFINITY;
    for j in 2..=20 {
        if let Some(cert) = k.ok(3, chained_tail_bound(0.5f64.powi(j), 0.5)) {
            k.record(3, cert.bound < prev, format!("< {prev}"), cert.bound, 0.0);
            prev = cert.bound;
        }
    }
    k.record(3, prev < 1e-5, "< 1e-5", prev, 1e-5);

    // 4: the sup-norm combinator
    if let Some(b) = k.ok(4, NormBudget::with_default_constant(0.0, 0.0, 0.0)) {
        k.abs(4, 0.0, wolpert_sup_bound(&b), 0.0);
    }
    if let Some(b) = k.ok(4, NormBudget::new(0.3, 0.1, 0.2, 1.0)) {
        k.abs(4, 0.2, wolpert_sup_bound(&b), 1e-15);
    }
    k.holds(4, NormBudget::with_default_constant(1.6, 0.0, 0.0).is_err(), "error", "sup norm above 3/2");
    k
}

fn cli_suite() -> Checker {
    let mut k = Checker::new("cli");
    let run = |args: &[&str]| {
        let argv: Vec<String> = std::iter::once("rvflow").chain(args.iter().copied()).map(String::from).collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = crate::cli::run_with_io(&argv, &mut out, &mut err);
        (code, String::from_utf8_lossy(&out).into_owned())
    };

    // 1: identical flags give byte-identical output
    for args in [
        &["flow", "--z0", "0.3+0.2i", "--target", "1"][..],
        &["geom", "poincare", "--t", "1", "--r", "0"][..],
        &["pair", "--c", "1.2+0.3i", "--s", "1"][..],
        &["converge", "chain", "--sup-norm", "0.1", "--contraction", "0.5"][..],
    ] {
        let (a, b) = (run(args), run(args));
        k.holds(1, a.0 == 0 && a == b, "exit 0, identical output", format!("{} vs {}, exit {}", a.1.len(), b.1.len(), a.0));
    }

    // 2: unknown flags and malformed complex numbers are usage errors
    for args in [&["flow", "--bogus", "1"][..], &["flow", "--z0", "0.3 + 0.2i"][..], &["geom", "teleport"][..]] {
        let (code, _) = run(args);
        k.holds(2, code == 2, 2, code);
    }

    // 3: plain numeric output
    let (code, out) = run(&["geom", "poincare", "--t", "1", "--r", "0", "--format", "plain"]);
    let value = out.lines().last().and_then(|l| l.trim().parse::<f64>().ok());
    k.holds(3, code == 0 && value.is_some(), "a number", out.trim());
    if let Some(v) = value {
        k.abs(3, 1.0 / 1f64.tanh(), v, 1e-10);
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("nope", 0).is_err());
    }

    #[test]
    fn suite_names_are_sorted() {
        let mut sorted = SUITES;
        sorted.sort_unstable();
        assert_eq!(sorted, SUITES);
    }

    #[test]
    fn convergence_suite_passes() {
        let r = run_suite("convergence_bounds", 42).unwrap();
        assert!(r.passed(), "{:#?}", r.failures);
        assert_eq!(r.n_failed, r.failures.len());
    }
}

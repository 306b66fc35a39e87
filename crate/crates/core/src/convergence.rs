//! Certificates for the end of the convergence argument: the Ahlfors–Weill
//! distance bound, the Banach contraction tail bound, a generic certified
//! fixed-point iterator, and the sup-norm bound combinator.

use crate::error::{Error, Result};
use crate::rng::{seeded, Prng};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Sup-norm ceiling for Schwarzians of univalent maps, used to validate inputs.
pub const NEHARI_SUP_CEILING: f64 = 1.5;

/// Relative slack granted to the Lipschitz spot-check.
pub const LIPSCHITZ_SLACK: f64 = 0.05;
pub const LIPSCHITZ_SPOT_CHECKS: usize = 100;
pub const DEFAULT_MAX_ITERS: usize = 100_000;

/// Machine-readable bound with the inputs that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub bound: f64,
    pub inputs: BTreeMap<String, f64>,
    pub formula_id: String,
}

impl Certificate {
    fn new(formula_id: &str, bound: f64, inputs: &[(&str, f64)]) -> Self {
        Certificate {
            bound,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            formula_id: formula_id.to_string(),
        }
    }
}

/// Teichmüller distance bound `½ log((1 + 2k)/(1 − 2k))` for `‖φ‖∞ = k < ½`.
pub fn ahlfors_weill_bound(k: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&k) {
        return Err(Error::OutOfDomain(format!("Ahlfors–Weill needs 0 ≤ k < 1/2, got {k}")));
    }
    Ok(0.5 * ((1.0 + 2.0 * k) / (1.0 - 2.0 * k)).ln())
}

/// `d(x, x*) ≤ d(x, Tx)/(1 − c)` for a `c`-contraction `T`.
pub fn contraction_tail_bound(d_first_step: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && c < 1.0) || !(d_first_step >= 0.0) {
        return Err(Error::OutOfDomain(format!("need d ≥ 0 and 0 < c < 1, got {d_first_step}, {c}")));
    }
    Ok(d_first_step / (1.0 - c))
}

/// A self-map of a metric space claimed to be `factor`-Lipschitz.
pub struct ContractionSpec<X, T, D> {
    pub factor: f64,
    pub map: T,
    pub metric: D,
    /// Absolute rounding allowance of `metric` near the fixed point, added to
    /// the final step before forming the radius. Zero by default.
    pub resolution: f64,
    _point: std::marker::PhantomData<fn(&X) -> X>,
}

impl<X, T, D> ContractionSpec<X, T, D>
where
    T: Fn(&X) -> X,
    D: Fn(&X, &X) -> f64,
{
    pub fn new(factor: f64, map: T, metric: D) -> Result<Self> {
        if !(factor > 0.0 && factor < 1.0) {
            return Err(Error::InvalidConfig(format!("contraction factor must lie in (0, 1), got {factor}")));
        }
        Ok(Self { factor, map, metric, resolution: 0.0, _point: std::marker::PhantomData })
    }

    pub fn with_resolution(mut self, resolution: f64) -> Result<Self> {
        if !(resolution >= 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidConfig(format!("resolution must be finite and nonnegative, got {resolution}")));
        }
        self.resolution = resolution;
        Ok(self)
    }

    /// Samples pairs with `sampler` and rejects the map if any pair violates
    /// `d(Tx, Ty) ≤ (1 + slack)·c·d(x, y)`. Heuristic only.
    pub fn spot_check<S>(&self, sampler: &mut S, rng: &mut Prng, pairs: usize) -> Result<()>
    where
        S: FnMut(&mut Prng) -> X,
    {
        for _ in 0..pairs {
            let (x, y) = (sampler(rng), sampler(rng));
            let d = (self.metric)(&x, &y);
            let image = (self.metric)(&(self.map)(&x), &(self.map)(&y));
            let bound = (1.0 + LIPSCHITZ_SLACK) * self.factor * d;
            if image > bound {
                return Err(Error::NotContractive { factor: self.factor, image, bound });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanachResult<X> {
    pub fixed_point: X,
    /// Map applications accepted before the stopping rule fired.
    pub n_iters: usize,
    /// `(d(x, Tx) + resolution)/(1 − c)`, a bound on the distance from `fixed_point` to the true fixed point.
    pub certified_radius: f64,
}

/// Picard iteration with an a-posteriori certificate.
///
/// After a Lipschitz spot-check on [`LIPSCHITZ_SPOT_CHECKS`] sampled pairs,
/// iterates `x ← Tx` until `d(x, Tx) < tol·(1 − c)` and returns `x` with
/// radius `(d(x, Tx) + resolution)/(1 − c)`.
pub fn banach_iterate<X, T, D, S>(
    spec: &ContractionSpec<X, T, D>,
    x0: X,
    tol: f64,
    mut sampler: S,
    seed: u64,
    max_iters: usize,
) -> Result<BanachResult<X>>
where
    T: Fn(&X) -> X,
    D: Fn(&X, &X) -> f64,
    S: FnMut(&mut Prng) -> X,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
    }
    spec.spot_check(&mut sampler, &mut seeded(seed), LIPSCHITZ_SPOT_CHECKS)?;
    let c = spec.factor;
    let mut x = x0;
    for k in 0..max_iters {
        let tx = (spec.map)(&x);
        let step = (spec.metric)(&x, &tx);
        if step < tol * (1.0 - c) {
            return Ok(BanachResult { fixed_point: x, n_iters: k, certified_radius: (step + spec.resolution) / (1.0 - c) });
        }
        x = tx;
    }
    Err(Error::MaxIters(max_iters))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBudget {
    pub sup_norm: f64,
    pub l2_norm: f64,
    pub max_log_length_deriv: f64,
    /// Caller-supplied constant. With the default of 1 the bound has the
    /// right shape but is not certified.
    pub wolpert_c: f64,
}

impl NormBudget {
    pub fn new(sup_norm: f64, l2_norm: f64, max_log_length_deriv: f64, wolpert_c: f64) -> Result<Self> {
        if !(sup_norm >= 0.0 && l2_norm >= 0.0 && max_log_length_deriv >= 0.0 && wolpert_c > 0.0) {
            return Err(Error::InvalidConfig("norm budget entries must be nonnegative, constant positive".into()));
        }
        if sup_norm > NEHARI_SUP_CEILING {
            return Err(Error::InvalidConfig(format!(
                "sup norm {sup_norm} exceeds the univalent ceiling {NEHARI_SUP_CEILING}"
            )));
        }
        Ok(Self { sup_norm, l2_norm, max_log_length_deriv, wolpert_c })
    }

    /// Same budget with the uncertified default constant 1.
    pub fn with_default_constant(sup_norm: f64, l2_norm: f64, max_log_length_deriv: f64) -> Result<Self> {
        Self::new(sup_norm, l2_norm, max_log_length_deriv, 1.0)
    }
}

/// `c·(½ max_α |d log ℓ_α(μ)| + ‖μ₀‖₂)`.
pub fn wolpert_sup_bound(budget: &NormBudget) -> f64 {
    budget.wolpert_c * (0.5 * budget.max_log_length_deriv + budget.l2_norm)
}

pub fn wolpert_certificate(budget: &NormBudget) -> Certificate {
    Certificate::new(
        "wolpert_sup",
        wolpert_sup_bound(budget),
        &[
            ("wolpert_c", budget.wolpert_c),
            ("max_log_length_deriv", budget.max_log_length_deriv),
            ("l2_norm", budget.l2_norm),
        ],
    )
}

/// Sup norm → Ahlfors–Weill step bound → contraction tail bound.
pub fn chained_tail_bound(sup_norm: f64, contraction: f64) -> Result<Certificate> {
    let step = ahlfors_weill_bound(sup_norm)?;
    let tail = contraction_tail_bound(step, contraction)?;
    Ok(Certificate::new(
        "ahlfors_weill_then_contraction_tail",
        tail,
        &[("sup_norm", sup_norm), ("contraction", contraction), ("ahlfors_weill_step", step)],
    ))
}

/// [`chained_tail_bound`] fed by [`wolpert_sup_bound`].
pub fn chained_from_budget(budget: &NormBudget, contraction: f64) -> Result<Certificate> {
    chained_tail_bound(wolpert_sup_bound(budget), contraction)
}

pub fn ahlfors_weill_certificate(k: f64) -> Result<Certificate> {
    Ok(Certificate::new("ahlfors_weill", ahlfors_weill_bound(k)?, &[("k", k)]))
}

pub fn contraction_tail_certificate(d_first_step: f64, c: f64) -> Result<Certificate> {
    Ok(Certificate::new(
        "contraction_tail",
        contraction_tail_bound(d_first_step, c)?,
        &[("d_first_step", d_first_step), ("c", c)],
    ))
}

//! Optimal per-hop power allocation under an outage constraint.
//!
//! Writing `F_k = P_k^(2/alpha)`, the path outage exponents become
//! `A_co * sum(d_k^2 / F_k)` and `B_so * sum(F_k)`. Minimising one exponent
//! with the other held at its budget is a Cauchy-Schwarz problem whose
//! solution is proportional to `d_k`:
//!
//! * minimum COP subject to `SOP <= beta_so` (SO-COP): `F_k = eps * d_k / sum(d)`,
//!   `eps = -ln(1 - beta_so) / B_so`;
//! * minimum SOP subject to `COP <= beta_co` (QO-SOP): `F_k = A_co * sum(d) * d_k / eps`,
//!   `eps = -ln(1 - beta_co)`.
//!
//! In both cases the optimum is `1 - exp(lambda_e pi (gamma_c/gamma_e)^(2/alpha) (sum d)^2 / ln(1 - beta))`,
//! which depends on neither the jammer density nor the jammer power.

use rand::Rng;
use rayon::prelude::*;

use crate::analytics::{a_co, b_so, path_cop, path_sop};
use crate::error::{Error, Result};
use crate::params::{OutageConstraint, PathSpec, SystemParams};
use crate::rng::StreamKey;

/// Agreement required between the simplified optimum and the outage
/// formulas evaluated on the returned powers.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// Minimise connection outage with a secrecy outage budget (SO-COP).
    MinimizeCop,
    /// Minimise secrecy outage with a connection outage budget (QO-SOP).
    MinimizeSop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerAllocation {
    pub powers: Vec<f64>,
    pub objective: Objective,
    pub achieved_cop: f64,
    pub achieved_sop: f64,
    pub constraint: OutageConstraint,
}

impl PowerAllocation {
    /// The optimised outage probability.
    pub fn achieved(&self) -> f64 {
        match self.objective {
            Objective::MinimizeCop => self.achieved_cop,
            Objective::MinimizeSop => self.achieved_sop,
        }
    }

    /// `path` with these powers attached.
    pub fn apply(&self, path: &PathSpec) -> Result<PathSpec> {
        PathSpec::with_powers(&path.distances(), &self.powers)
    }
}

/// The common optimal value of both problems at budget `beta`.
pub fn optimal_outage(total_length: f64, params: &SystemParams, beta: f64) -> f64 {
    let exponent = params.lambda_e()
        * std::f64::consts::PI
        * (params.gamma_c() / params.gamma_e()).powf(2.0 / params.alpha())
        * total_length
        * total_length
        / -(-beta).ln_1p();
    -(-exponent).exp_m1()
}

fn finish(
    path: &PathSpec,
    params: &SystemParams,
    weights: Vec<f64>,
    objective: Objective,
    constraint: OutageConstraint,
) -> Result<PowerAllocation> {
    let half_alpha = params.alpha() / 2.0;
    let powers: Vec<f64> = weights.iter().map(|f| f.powf(half_alpha)).collect();
    if let Some(k) = powers.iter().position(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(Error::param(
            "power",
            format!(
                "hop {k} power {} is not representable for these parameters",
                powers[k]
            ),
        ));
    }
    let powered = PathSpec::with_powers(&path.distances(), &powers)?;
    let cop = path_cop(&powered, params)?.probability();
    let sop = path_sop(&powered, params)?.probability();
    let closed = optimal_outage(path.total_length(), params, constraint.beta());
    let (optimised, constrained) = match objective {
        Objective::MinimizeCop => (cop, sop),
        Objective::MinimizeSop => (sop, cop),
    };
    if (optimised - closed).abs() > CROSS_CHECK_TOL {
        return Err(Error::CrossCheck(format!(
            "optimal value {closed} disagrees with the outage formula on the allocated powers ({optimised})"
        )));
    }
    if (constrained - constraint.beta()).abs() > CROSS_CHECK_TOL {
        return Err(Error::CrossCheck(format!(
            "constraint not active: outage {constrained} against budget {}",
            constraint.beta()
        )));
    }
    let (achieved_cop, achieved_sop) = match objective {
        Objective::MinimizeCop => (closed, sop),
        Objective::MinimizeSop => (cop, closed),
    };
    Ok(PowerAllocation {
        powers,
        objective,
        achieved_cop,
        achieved_sop,
        constraint,
    })
}

/// Powers minimising path COP subject to path SOP at most `beta_so`.
pub fn solve_so_cop(
    path: &PathSpec,
    params: &SystemParams,
    beta_so: f64,
) -> Result<PowerAllocation> {
    let constraint = OutageConstraint::secrecy(beta_so)?;
    if params.lambda_e() == 0.0 {
        return Err(Error::ConstraintVacuous(
            "without eavesdroppers the secrecy outage is zero at any power".into(),
        ));
    }
    let budget = -(-constraint.beta()).ln_1p() / b_so(params);
    let total = path.total_length();
    let weights = path
        .distances()
        .iter()
        .map(|d| budget * d / total)
        .collect();
    finish(path, params, weights, Objective::MinimizeCop, constraint)
}

/// Powers minimising path SOP subject to path COP at most `beta_co`.
pub fn solve_qo_sop(
    path: &PathSpec,
    params: &SystemParams,
    beta_co: f64,
) -> Result<PowerAllocation> {
    let constraint = OutageConstraint::connection(beta_co)?;
    if params.gamma_c() == 0.0 {
        return Err(Error::ConstraintVacuous(
            "with a zero connection threshold the connection outage is zero at any power".into(),
        ));
    }
    let budget = -(-constraint.beta()).ln_1p();
    let scale = a_co(params) * path.total_length() / budget;
    let weights = path.distances().iter().map(|d| scale * d).collect();
    finish(path, params, weights, Objective::MinimizeSop, constraint)
}

/// Outcome of [`verify_optimality`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub trials: usize,
    /// Perturbations that beat the allocation by more than the tolerance.
    pub improving: usize,
    /// Largest relative improvement seen (negative when every trial was worse).
    pub best_improvement: f64,
    /// Powers of the best improving perturbation, if any.
    pub counterexample: Option<Vec<f64>>,
}

impl VerificationReport {
    pub fn is_optimal(&self) -> bool {
        self.improving == 0
    }
}

/// Relative improvement a perturbation must exceed to count.
pub const IMPROVEMENT_TOL: f64 = 1e-9;

/// Brute-force check that no feasible allocation near `allocation` does
/// better. Each trial multiplies the `P^(2/alpha)` weights by random factors
/// at a random scale, rescales them back onto the active constraint and
/// compares the objective exponents.
pub fn verify_optimality(
    allocation: &PowerAllocation,
    path: &PathSpec,
    params: &SystemParams,
    trials: usize,
    key: StreamKey,
) -> Result<VerificationReport> {
    if allocation.powers.len() != path.len() {
        return Err(Error::InvalidPath(format!(
            "{} powers for a {}-hop path",
            allocation.powers.len(),
            path.len()
        )));
    }
    let t = 2.0 / params.alpha();
    let d2: Vec<f64> = path.distances().iter().map(|d| d * d).collect();
    let weights: Vec<f64> = allocation.powers.iter().map(|p| p.powf(t)).collect();
    let a = a_co(params);
    let budget = -(-allocation.constraint.beta()).ln_1p();

    // Put a weight vector on the constraint surface and return its objective exponent.
    let project = |w: &mut Vec<f64>| -> f64 {
        match allocation.objective {
            Objective::MinimizeCop => {
                let target = budget / b_so(params);
                let s: f64 = w.iter().sum();
                w.iter_mut().for_each(|x| *x *= target / s);
                a * d2.iter().zip(w.iter()).map(|(d, f)| d / f).sum::<f64>()
            }
            Objective::MinimizeSop => {
                let s: f64 = d2.iter().zip(w.iter()).map(|(d, f)| d / f).sum();
                let scale = a * s / budget;
                w.iter_mut().for_each(|x| *x *= scale);
                b_so(params) * w.iter().sum::<f64>()
            }
        }
    };

    let mut base = weights;
    let base_value = project(&mut base);

    let results: Vec<(f64, Vec<f64>)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = key.index(i).rng();
            // log-uniform perturbation size between 1e-6 and 1
            let size = 10f64.powf(-6.0 * rng.random::<f64>());
            let mut w: Vec<f64> = base
                .iter()
                .map(|f| f * (size * (2.0 * rng.random::<f64>() - 1.0)).exp())
                .collect();
            let value = project(&mut w);
            let improvement = if base_value > 0.0 {
                (base_value - value) / base_value
            } else {
                base_value - value
            };
            (improvement, w)
        })
        .collect();

    let improving = results
        .iter()
        .filter(|(imp, _)| *imp > IMPROVEMENT_TOL)
        .count();
    let best = results
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(b.0.cmp(&a.0)));
    let (best_improvement, counterexample) = match best {
        Some((_, (imp, w))) if *imp > IMPROVEMENT_TOL => {
            (*imp, Some(w.iter().map(|f| f.powf(1.0 / t)).collect()))
        }
        Some((_, (imp, _))) => (*imp, None),
        None => (f64::NEG_INFINITY, None),
    };
    Ok(VerificationReport {
        trials,
        improving,
        best_improvement,
        counterexample,
    })
}

//! Closed-form equilibrium analysis of a strategy held under stable prices.
//!
//! Holding strategy `sigma` forever, the capital/income ratio of each sector
//! settles at `sigma_i / (p_i (g + delta))` and income grows at
//!
//! ```text
//! g* = s * prod p_i^(-a_i) * prod sigma_i^(a_i) - delta
//! ```
//!
//! Only the response term `prod sigma_i^(a_i)` depends on the strategy, so
//! `s`, `delta` and `p` never change the ranking of strategies. The response
//! is maximized at `sigma = alpha` and its superlevel sets are convex.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::economy::{
    check_prices, log_weighted_sum, project_to_simplex, weighted_geometric_mean, EconomyParams,
    ProductionCoefficients, Strategy,
};
use crate::error::{Error, Result};

fn check_dims(strategy: &Strategy, coefficients: &ProductionCoefficients) -> Result<()> {
    if strategy.sectors() != coefficients.sectors() {
        return Err(Error::Dimension(format!(
            "strategy has {} sectors, coefficients {}",
            strategy.sectors(),
            coefficients.sectors()
        )));
    }
    Ok(())
}

/// The strategy-dependent factor `prod sigma_i^(a_i)`, in `[0, 1]`.
pub fn response(strategy: &Strategy, coefficients: &ProductionCoefficients) -> Result<f64> {
    check_dims(strategy, coefficients)?;
    weighted_geometric_mean(strategy.weights(), coefficients)
}

/// Equilibrium income growth rate of `strategy` at the given prices.
///
/// The price and response factors are combined in one log-space sum. Returns
/// exactly `-deprecation` when the response is zero.
pub fn equilibrium_growth(strategy: &Strategy, params: &EconomyParams, prices: &[f64]) -> Result<f64> {
    let coefficients = &params.coefficients;
    check_dims(strategy, coefficients)?;
    check_prices(prices, coefficients.sectors())?;
    let alphas = coefficients.weights();
    let Some(log_response) = log_weighted_sum(strategy.weights(), alphas)? else {
        return Ok(-params.deprecation);
    };
    let log_price: f64 = alphas
        .iter()
        .zip(prices)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &p)| a * p.ln())
        .sum();
    Ok(params.scaling * (log_response - log_price).exp() - params.deprecation)
}

/// Limit of `k_i / y` while holding `strategy`: `sigma_i / (p_i (g* + delta))`.
pub fn equilibrium_ratio(strategy: &Strategy, params: &EconomyParams, prices: &[f64]) -> Result<Vec<f64>> {
    let growth = equilibrium_growth(strategy, params, prices)?;
    let denom_rate = growth + params.deprecation;
    strategy
        .weights()
        .iter()
        .zip(prices)
        .enumerate()
        .map(|(i, (&sigma, &p))| {
            if sigma == 0.0 {
                Ok(0.0)
            } else if denom_rate > 0.0 {
                Ok(sigma / (p * denom_rate))
            } else {
                Err(Error::Domain(format!(
                    "sector {i} receives investment but the equilibrium growth is -deprecation; \
                     its capital/income ratio diverges"
                )))
            }
        })
        .collect()
}

/// A level set query: strategies whose equilibrium growth is at least `level`.
#[derive(Debug, Clone)]
pub struct ContourQuery {
    pub level: f64,
    pub params: EconomyParams,
}

impl ContourQuery {
    pub fn new(level: f64, params: EconomyParams) -> Result<Self> {
        if !level.is_finite() || level < -params.deprecation {
            return Err(Error::Domain(format!(
                "contour level {level} below the growth floor -{}",
                params.deprecation
            )));
        }
        Ok(ContourQuery { level, params })
    }
}

/// Whether `strategy` lies in the (closed) superlevel set of the query.
///
/// Equivalent to `prod sigma^a >= ((level + delta) / s) * prod p^a`; the test
/// is carried out on the growth rate itself so that a strategy sitting exactly
/// on the contour compares equal.
pub fn contour_contains(strategy: &Strategy, query: &ContourQuery, prices: &[f64]) -> Result<bool> {
    Ok(equilibrium_growth(strategy, &query.params, prices)? >= query.level)
}

/// Scaling factor that gives the optimal strategy `sigma = alpha` the
/// equilibrium growth `target_growth`.
pub fn calibrate_scaling(
    target_growth: f64,
    coefficients: &ProductionCoefficients,
    deprecation: f64,
    prices: &[f64],
) -> Result<f64> {
    check_prices(prices, coefficients.sectors())?;
    if !target_growth.is_finite() || target_growth <= -deprecation {
        return Err(Error::Domain(format!(
            "target growth {target_growth} must exceed -deprecation (-{deprecation})"
        )));
    }
    let alphas = coefficients.weights();
    // alpha_i = 0 factors drop out (0^0 = 1), so the log-sum always exists.
    let log_response = log_weighted_sum(alphas, alphas)?
        .ok_or_else(|| Error::Invariant("response of alpha is zero".into()))?;
    let log_price: f64 = alphas
        .iter()
        .zip(prices)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &p)| a * p.ln())
        .sum();
    let scaling = (target_growth + deprecation) / (log_response - log_price).exp();
    if !(scaling.is_finite() && scaling > 0.0) {
        return Err(Error::Domain(format!("calibrated scaling {scaling} is not positive")));
    }
    Ok(scaling)
}

/// The unique maximizer of the equilibrium growth rate.
pub fn optimal_strategy(coefficients: &ProductionCoefficients) -> Strategy {
    Strategy::new(coefficients.weights().to_vec()).expect("coefficients are a simplex point")
}

#[derive(Debug, Clone, PartialEq)]
pub struct HillClimbConfig {
    /// Initial standard deviation of the per-component perturbation.
    pub step_size: f64,
    pub max_iters: usize,
    /// Factor applied to `step_size` after `stall_limit` rejected proposals in a row.
    pub decay: f64,
    pub stall_limit: usize,
    /// The search stops (converged) once the step size falls below this.
    pub min_step: f64,
}

impl Default for HillClimbConfig {
    fn default() -> Self {
        HillClimbConfig {
            step_size: 0.05,
            max_iters: 10_000,
            decay: 0.5,
            stall_limit: 40,
            min_step: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HillClimbOutcome {
    pub strategy: Strategy,
    pub response: f64,
    pub iterations: usize,
    /// False when `max_iters` ran out before the step size collapsed.
    pub converged: bool,
}

/// Perturb, project, accept if strictly better. The step size shrinks
/// geometrically whenever progress stalls.
pub fn hill_climb<R: Rng + ?Sized>(
    start: &Strategy,
    coefficients: &ProductionCoefficients,
    config: &HillClimbConfig,
    rng: &mut R,
) -> Result<HillClimbOutcome> {
    check_dims(start, coefficients)?;
    if !(config.step_size.is_finite() && config.step_size > 0.0) {
        return Err(Error::Domain(format!("step size {} must be positive", config.step_size)));
    }
    if !(config.decay > 0.0 && config.decay < 1.0) {
        return Err(Error::Domain(format!("decay {} must lie in (0, 1)", config.decay)));
    }

    let mut best = start.clone();
    let mut best_response = response(&best, coefficients)?;
    let mut step = config.step_size;
    let mut stalls = 0;
    let mut candidate = vec![0.0; start.sectors()];

    for iter in 0..config.max_iters {
        let noise = Normal::new(0.0, step).map_err(|e| Error::Domain(e.to_string()))?;
        for (c, &w) in candidate.iter_mut().zip(best.weights()) {
            *c = w + noise.sample(rng);
        }
        let improved = match project_to_simplex(&candidate) {
            Ok(proposal) => {
                let r = response(&proposal, coefficients)?;
                if r > best_response {
                    best = proposal;
                    best_response = r;
                    true
                } else {
                    false
                }
            }
            Err(Error::Degenerate(_)) => false,
            Err(e) => return Err(e),
        };
        if improved {
            stalls = 0;
            continue;
        }
        stalls += 1;
        if stalls >= config.stall_limit {
            stalls = 0;
            step *= config.decay;
            if step < config.min_step {
                return Ok(HillClimbOutcome {
                    strategy: best,
                    response: best_response,
                    iterations: iter + 1,
                    converged: true,
                });
            }
        }
    }

    Ok(HillClimbOutcome {
        strategy: best,
        response: best_response,
        iterations: config.max_iters,
        converged: false,
    })
}

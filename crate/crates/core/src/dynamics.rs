//! Forward simulation of a single agent.
//!
//! Each step invests `sigma_i * y / p_i` in sector `i` on top of the
//! depreciated capital stock, then recomputes income from capital:
//!
//! ```text
//! k_i' = (sigma_i / p_i) y + (1 - delta) k_i
//! y'   = s prod k_i'^(a_i)
//! ```

use crate::economy::{check_prices, AgentState, EconomyParams, Strategy};
use crate::equilibrium::{equilibrium_growth, equilibrium_ratio};
use crate::error::{Error, Result};

/// Capital prices over time. Lookups past the end of a series hold the last entry.
#[derive(Debug, Clone, PartialEq)]
pub enum PriceSchedule {
    Constant(Vec<f64>),
    /// Entry `t` applies to step `t`; entry 0 is used for initialization.
    Series(Vec<Vec<f64>>),
}

impl PriceSchedule {
    pub fn constant(prices: Vec<f64>) -> Result<Self> {
        check_prices(&prices, prices.len())?;
        if prices.is_empty() {
            return Err(Error::Dimension("empty price vector".into()));
        }
        Ok(PriceSchedule::Constant(prices))
    }

    pub fn series(series: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = series.first() else {
            return Err(Error::Dimension("empty price series".into()));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::Dimension("empty price vector".into()));
        }
        for prices in &series {
            check_prices(prices, n)?;
        }
        Ok(PriceSchedule::Series(series))
    }

    /// Unit prices in every sector.
    pub fn unit(sectors: usize) -> Self {
        PriceSchedule::Constant(vec![1.0; sectors])
    }

    pub fn sectors(&self) -> usize {
        match self {
            PriceSchedule::Constant(p) => p.len(),
            PriceSchedule::Series(s) => s[0].len(),
        }
    }

    pub fn at(&self, step: u64) -> &[f64] {
        match self {
            PriceSchedule::Constant(p) => p,
            PriceSchedule::Series(s) => {
                let idx = usize::try_from(step).unwrap_or(usize::MAX).min(s.len() - 1);
                &s[idx]
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, PriceSchedule::Constant(_))
    }
}

/// One row of simulation output.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub step: u64,
    pub agent_id: u64,
    pub income: f64,
    pub growth: f64,
    /// Equilibrium growth of the strategy in force during this step.
    pub equilibrium_growth: f64,
    /// `growth - equilibrium_growth`.
    pub excess_growth: f64,
    pub strategy: Vec<f64>,
}

impl TraceRecord {
    pub fn new(step: u64, agent_id: u64, state: &AgentState, equilibrium_growth: f64) -> Self {
        TraceRecord {
            step,
            agent_id,
            income: state.income,
            growth: state.growth,
            equilibrium_growth,
            excess_growth: state.growth - equilibrium_growth,
            strategy: state.strategy.weights().to_vec(),
        }
    }
}

impl AgentState {
    /// A state sitting at the equilibrium capital/income ratio of its
    /// strategy, scaled to the given income.
    pub fn at_equilibrium(
        strategy: Strategy,
        params: &EconomyParams,
        prices: &[f64],
        income: f64,
    ) -> Result<Self> {
        if !(income.is_finite() && income > 0.0) {
            return Err(Error::Domain(format!("initial income {income} must be positive")));
        }
        let ratio = equilibrium_ratio(&strategy, params, prices)?;
        let growth = equilibrium_growth(&strategy, params, prices)?;
        let capital = ratio.into_iter().map(|r| r * income).collect();
        let mut state = AgentState::from_capital(capital, strategy, params)?;
        state.growth = growth;
        Ok(state)
    }

    /// The same amount of capital in every sector.
    pub fn uniform(strategy: Strategy, params: &EconomyParams, capital_per_sector: f64) -> Result<Self> {
        if !(capital_per_sector.is_finite() && capital_per_sector > 0.0) {
            return Err(Error::Domain(format!(
                "capital per sector {capital_per_sector} must be positive"
            )));
        }
        AgentState::from_capital(vec![capital_per_sector; params.sectors()], strategy, params)
    }
}

/// `income_curr / income_prev - 1`.
pub fn growth_rate(income_prev: f64, income_curr: f64) -> Result<f64> {
    if !(income_prev.is_finite() && income_prev > 0.0) {
        return Err(Error::Domain(format!("previous income {income_prev} must be positive")));
    }
    if !income_curr.is_finite() {
        return Err(Error::NonFinite("current income".into()));
    }
    Ok(income_curr / income_prev - 1.0)
}

fn check_step_inputs(state: &AgentState, params: &EconomyParams, prices: &[f64]) -> Result<()> {
    let n = params.sectors();
    if state.capital.len() != n || state.strategy.sectors() != n {
        return Err(Error::Dimension(format!(
            "agent has {} capital sectors and a {}-sector strategy, economy has {n}",
            state.capital.len(),
            state.strategy.sectors()
        )));
    }
    check_prices(prices, n)?;
    if !params.scaling.is_finite() || !params.deprecation.is_finite() {
        return Err(Error::NonFinite("economy parameters".into()));
    }
    if !(0.0..=1.0).contains(&params.deprecation) {
        return Err(Error::Domain(format!(
            "deprecation {} outside [0, 1]",
            params.deprecation
        )));
    }
    if !state.income.is_finite() || state.capital.iter().any(|k| !k.is_finite()) {
        return Err(Error::NonFinite("agent state".into()));
    }
    if let Some(k) = state.capital.iter().find(|&&k| k < 0.0) {
        return Err(Error::Domain(format!("negative capital {k}")));
    }
    Ok(())
}

/// Income growth from the per-sector capital ratios. Equal to
/// `income / income_prev - 1` by homogeneity, without the rounding of two
/// separately computed products.
fn capital_growth(
    prev: &[f64],
    next: &[f64],
    params: &EconomyParams,
    income_prev: f64,
    income: f64,
) -> Result<f64> {
    let mut log_ratio = 0.0;
    for ((&k0, &k1), &a) in prev.iter().zip(next).zip(params.coefficients.weights()) {
        if a == 0.0 {
            continue;
        }
        if k0 == 0.0 {
            // income inconsistent with capital; fall back to the incomes
            return growth_rate(income_prev, income);
        }
        log_ratio += a * (k1 / k0).ln();
    }
    Ok(log_ratio.exp_m1())
}

/// Advances one agent by one step at the given prices.
pub fn step_agent(state: &AgentState, params: &EconomyParams, prices: &[f64]) -> Result<AgentState> {
    check_step_inputs(state, params, prices)?;
    let keep = 1.0 - params.deprecation;
    let capital: Vec<f64> = state
        .capital
        .iter()
        .zip(state.strategy.weights())
        .zip(prices)
        .map(|((&k, &sigma), &p)| sigma / p * state.income + keep * k)
        .collect();
    let income = params.production(&capital)?;
    if !income.is_finite() {
        return Err(Error::NonFinite("income after step".into()));
    }
    let (growth, zero_income) = if state.income > 0.0 {
        (capital_growth(&state.capital, &capital, params, state.income, income)?, income == 0.0)
    } else {
        (0.0, true)
    };
    Ok(AgentState {
        capital,
        income,
        growth,
        strategy: state.strategy.clone(),
        zero_income,
    })
}

/// Holds the agent's strategy fixed for `steps` steps, one record per step.
pub fn run_hold(
    state: &AgentState,
    params: &EconomyParams,
    prices: &PriceSchedule,
    steps: u64,
) -> Result<Vec<TraceRecord>> {
    run_switch_experiment(state, &[], params, prices, steps)
}

/// Simulates one agent that replaces its strategy at the given steps.
///
/// A switch at step `t` takes effect for the investment made during step `t`.
/// Capital is never reallocated, only new investment follows the new strategy.
pub fn run_switch_experiment(
    initial: &AgentState,
    switches: &[(u64, Strategy)],
    params: &EconomyParams,
    prices: &PriceSchedule,
    steps: u64,
) -> Result<Vec<TraceRecord>> {
    if steps == 0 {
        return Err(Error::config("steps", "must be at least 1"));
    }
    if prices.sectors() != params.sectors() {
        return Err(Error::Dimension(format!(
            "price schedule has {} sectors, economy {}",
            prices.sectors(),
            params.sectors()
        )));
    }
    let mut last = 0;
    for (i, (step, strategy)) in switches.iter().enumerate() {
        if *step <= last || *step > steps {
            return Err(Error::config(
                format!("switches[{i}].step"),
                format!("switch steps must be strictly increasing within [1, {steps}], got {step}"),
            ));
        }
        if strategy.sectors() != params.sectors() {
            return Err(Error::Dimension(format!(
                "switch {i} strategy has {} sectors, economy {}",
                strategy.sectors(),
                params.sectors()
            )));
        }
        last = *step;
    }

    let mut records = Vec::with_capacity(steps as usize);
    let mut pending = switches.iter().peekable();
    let mut state = initial.clone();
    for t in 1..=steps {
        if let Some((_, strategy)) = pending.next_if(|(s, _)| *s == t) {
            state.strategy = strategy.clone();
        }
        let p = prices.at(t);
        state = step_agent(&state, params, p)?;
        let eq = equilibrium_growth(&state.strategy, params, p)?;
        records.push(TraceRecord::new(t, 0, &state, eq));
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economy::ProductionCoefficients;

    fn coeffs(v: &[f64]) -> ProductionCoefficients {
        ProductionCoefficients::new(v.to_vec()).unwrap()
    }

    fn strat(v: &[f64]) -> Strategy {
        Strategy::new(v.to_vec()).unwrap()
    }

    #[test]
    fn symmetric_step_without_deprecation() {
        // deprecation = 0 is outside the validated parameter range but the
        // step itself is well defined.
        let params = EconomyParams {
            scaling: 1.0,
            deprecation: 0.0,
            coefficients: coeffs(&[0.5, 0.5]),
        };
        let state = AgentState::from_capital(vec![1.0, 1.0], strat(&[0.5, 0.5]), &params).unwrap();
        assert_eq!(state.income, 1.0);
        let next = step_agent(&state, &params, &[1.0, 1.0]).unwrap();
        assert_eq!(next.capital, vec![1.5, 1.5]);
        assert!((next.income - 1.5).abs() < 1e-15);
        assert!((next.growth - 0.5).abs() < 1e-15);
    }

    #[test]
    fn full_deprecation_single_sector() {
        let params = EconomyParams::new(0.9, 1.0, coeffs(&[1.0])).unwrap();
        let state = AgentState::from_capital(vec![2.0], strat(&[1.0]), &params).unwrap();
        assert!((state.income - 1.8).abs() < 1e-15);
        let next = step_agent(&state, &params, &[1.0]).unwrap();
        assert!((next.capital[0] - 1.8).abs() < 1e-15);
        assert!((next.income - 1.62).abs() < 1e-14);
        assert!((next.growth + 0.1).abs() < 1e-14);
    }

    #[test]
    fn uninvested_sector_decays_by_deprecation() {
        let params = EconomyParams::new(0.1, 0.05, coeffs(&[0.5, 0.5])).unwrap();
        let mut state = AgentState::uniform(strat(&[0.0, 1.0]), &params, 1.0).unwrap();
        for _ in 0..50 {
            let next = step_agent(&state, &params, &[1.0, 1.0]).unwrap();
            assert_eq!(next.capital[0], state.capital[0] * 0.95);
            state = next;
        }
    }

    #[test]
    fn growth_rate_examples() {
        assert_eq!(growth_rate(1.0, 1.5).unwrap(), 0.5);
        assert_eq!(growth_rate(2.0, 2.0).unwrap(), 0.0);
        assert!((growth_rate(1.0, 0.97).unwrap() + 0.03).abs() < 1e-15);
        assert!(growth_rate(0.0, 1.0).is_err());
        assert!(growth_rate(-1.0, 1.0).is_err());
    }

    #[test]
    fn zero_income_is_absorbing() {
        let params = EconomyParams::new(0.1, 0.05, coeffs(&[0.5, 0.5])).unwrap();
        let state = AgentState::from_capital(vec![0.0, 1.0], strat(&[0.5, 0.5]), &params).unwrap();
        assert!(state.zero_income);
        let next = step_agent(&state, &params, &[1.0, 1.0]).unwrap();
        assert_eq!(next.income, 0.0);
        assert_eq!(next.growth, 0.0);
        assert!(next.zero_income);
        assert!(next.growth.is_finite());
    }

    #[test]
    fn step_rejects_bad_inputs() {
        let params = EconomyParams::new(0.1, 0.05, coeffs(&[0.5, 0.5])).unwrap();
        let state = AgentState::uniform(strat(&[0.5, 0.5]), &params, 1.0).unwrap();
        assert!(matches!(step_agent(&state, &params, &[1.0]), Err(Error::Dimension(_))));
        assert!(matches!(
            step_agent(&state, &params, &[1.0, f64::NAN]),
            Err(Error::NonFinite(_))
        ));
        let mut broken = state.clone();
        broken.capital[0] = f64::INFINITY;
        assert!(matches!(step_agent(&broken, &params, &[1.0, 1.0]), Err(Error::NonFinite(_))));
    }

    #[test]
    fn equilibrium_start_grows_at_equilibrium_rate() {
        let params = EconomyParams::new(0.1, 0.03, coeffs(&[0.2, 0.3, 0.5])).unwrap();
        let prices = PriceSchedule::constant(vec![1.0, 1.5, 0.7]).unwrap();
        let sigma = strat(&[0.3, 0.3, 0.4]);
        let g = equilibrium_growth(&sigma, &params, prices.at(0)).unwrap();
        let state = AgentState::at_equilibrium(sigma, &params, prices.at(0), 1.0).unwrap();
        assert!((state.income - 1.0).abs() < 1e-12);
        for rec in run_hold(&state, &params, &prices, 100).unwrap() {
            assert!((rec.growth - g).abs() < 1e-10);
        }
    }

    #[test]
    fn hold_converges_from_uniform_capital() {
        let params = EconomyParams::new(0.1, 0.05, coeffs(&[0.2, 0.3, 0.5])).unwrap();
        let prices = PriceSchedule::unit(3);
        let sigma = strat(&[0.1, 0.6, 0.3]);
        let g = equilibrium_growth(&sigma, &params, prices.at(0)).unwrap();
        let state = AgentState::uniform(sigma, &params, 1.0).unwrap();
        let trace = run_hold(&state, &params, &prices, 2000).unwrap();
        assert_eq!(trace.len(), 2000);
        assert!((trace.last().unwrap().growth - g).abs() < 1e-8);
    }

    #[test]
    fn no_switch_matches_hold() {
        let params = EconomyParams::new(0.1, 0.05, coeffs(&[0.5, 0.5])).unwrap();
        let prices = PriceSchedule::unit(2);
        let state = AgentState::uniform(strat(&[0.3, 0.7]), &params, 2.0).unwrap();
        assert_eq!(
            run_hold(&state, &params, &prices, 50).unwrap(),
            run_switch_experiment(&state, &[], &params, &prices, 50).unwrap()
        );
    }

    #[test]
    fn switch_to_superior_strategy_overshoots() {
        let params = EconomyParams::new(0.1, 0.03, coeffs(&[0.5, 0.5])).unwrap();
        let prices = PriceSchedule::unit(2);
        let inferior = strat(&[0.8, 0.2]);
        let superior = strat(&[0.55, 0.45]);
        let state = AgentState::at_equilibrium(inferior, &params, prices.at(0), 1.0).unwrap();
        let trace =
            run_switch_experiment(&state, &[(10, superior.clone())], &params, &prices, 200).unwrap();
        let g_sup = equilibrium_growth(&superior, &params, &[1.0, 1.0]).unwrap();
        assert!(trace[9].growth > g_sup);
        assert_eq!(trace[9].strategy, superior.weights());
        for rec in &trace[9..] {
            assert!(rec.excess_growth >= -1e-12);
            assert_eq!(rec.equilibrium_growth, g_sup);
        }
    }

    #[test]
    fn equal_growth_switch_approaches_from_above() {
        let params = EconomyParams::new(0.1, 0.03, coeffs(&[0.5, 0.5])).unwrap();
        let prices = PriceSchedule::unit(2);
        // Mirror images around alpha share one equilibrium growth rate.
        let a = strat(&[0.3, 0.7]);
        let b = strat(&[0.7, 0.3]);
        let g = equilibrium_growth(&a, &params, &[1.0, 1.0]).unwrap();
        let state = AgentState::at_equilibrium(a, &params, prices.at(0), 1.0).unwrap();
        let trace = run_switch_experiment(&state, &[(1, b)], &params, &prices, 400).unwrap();
        assert!(trace[0].growth > g);
        for w in trace.windows(2) {
            assert!(w[1].growth <= w[0].growth + 1e-12, "{} -> {} at {}", w[0].growth, w[1].growth, w[1].step);
            assert!(w[1].growth >= g - 1e-12);
        }
        assert!((trace.last().unwrap().growth - g).abs() < 1e-8);
    }

    #[test]
    fn switch_schedule_must_increase() {
        let params = EconomyParams::new(0.1, 0.03, coeffs(&[0.5, 0.5])).unwrap();
        let prices = PriceSchedule::unit(2);
        let state = AgentState::uniform(strat(&[0.5, 0.5]), &params, 1.0).unwrap();
        let s = strat(&[0.4, 0.6]);
        let bad = [(5, s.clone()), (5, s.clone())];
        assert!(matches!(
            run_switch_experiment(&state, &bad, &params, &prices, 10),
            Err(Error::Config { .. })
        ));
        let late = [(11, s)];
        assert!(run_switch_experiment(&state, &late, &params, &prices, 10).is_err());
        assert!(run_hold(&state, &params, &prices, 0).is_err());
    }

    #[test]
    fn price_series_holds_last_value() {
        let series = PriceSchedule::series(vec![vec![1.0, 1.0], vec![2.0, 1.0]]).unwrap();
        assert_eq!(series.at(0), &[1.0, 1.0]);
        assert_eq!(series.at(1), &[2.0, 1.0]);
        assert_eq!(series.at(1000), &[2.0, 1.0]);
        assert!(PriceSchedule::series(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(PriceSchedule::series(vec![]).is_err());
        assert!(PriceSchedule::constant(vec![1.0, -1.0]).is_err());
    }
}

//! Shared fixtures for the benchmarks.

use growthlab::{
    calibrate_scaling, AgentState, EconomyParams, EvolutionConfig, Population, PriceSchedule,
    ProductionCoefficients, Strategy,
};

/// An `n`-sector economy with descending coefficients whose optimal strategy
/// grows 1.85% per step.
pub fn economy(n: usize) -> (EconomyParams, PriceSchedule) {
    let raw: Vec<f64> = (1..=n).rev().map(|i| i as f64).collect();
    let total: f64 = raw.iter().sum();
    let coeffs = ProductionCoefficients::new(raw.iter().map(|x| x / total).collect()).expect("valid coefficients");
    let prices = vec![1.0; n];
    let s = calibrate_scaling(0.0185, &coeffs, 0.05, &prices).expect("calibrates");
    (
        EconomyParams::new(s, 0.05, coeffs).expect("valid economy"),
        PriceSchedule::constant(prices).expect("valid prices"),
    )
}

pub fn agent(params: &EconomyParams) -> AgentState {
    let sigma = Strategy::uniform(params.sectors()).expect("non-empty");
    AgentState::uniform(sigma, params, 1.0).expect("valid agent")
}

pub fn population(size: usize, params: &EconomyParams, prices: &PriceSchedule) -> (Population, EvolutionConfig) {
    let config = EvolutionConfig {
        population_size: size,
        ..EvolutionConfig::default()
    };
    let pop = Population::random(&config, params, prices).expect("valid population");
    (pop, config)
}

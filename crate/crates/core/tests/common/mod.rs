//! Test-only oracles and random instance generators.
//!
//! The oracles use direct `powf` products instead of the library's log-space
//! kernels so that they stay independent of the code under test.

#![allow(dead_code)]

use growthlab::{calibrate_scaling, EconomyParams, ProductionCoefficients, Strategy};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `prod x_i^a_i` by direct exponentiation.
pub fn oracle_product(x: &[f64], a: &[f64]) -> f64 {
    x.iter().zip(a).map(|(&x, &a)| if a == 0.0 { 1.0 } else { x.powf(a) }).product()
}

/// `s prod p^-a prod sigma^a - delta` by direct exponentiation.
pub fn oracle_growth(sigma: &[f64], a: &[f64], s: f64, delta: f64, p: &[f64]) -> f64 {
    s / oracle_product(p, a) * oracle_product(sigma, a) - delta
}

/// Interior point of the simplex, every component at least `floor / n`.
pub fn random_simplex(rng: &mut impl Rng, n: usize, floor: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let sum: f64 = raw.iter().sum();
    let v: Vec<f64> = raw.iter().map(|x| floor / n as f64 + (1.0 - floor) * x / sum).collect();
    let total: f64 = v.iter().sum();
    v.iter().map(|x| x / total).collect()
}

pub fn strategy(v: Vec<f64>) -> Strategy {
    Strategy::new(v).unwrap()
}

pub fn coefficients(v: Vec<f64>) -> ProductionCoefficients {
    ProductionCoefficients::new(v).unwrap()
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub params: EconomyParams,
    pub prices: Vec<f64>,
    pub sigma: Strategy,
    /// Oracle value of the equilibrium growth of `sigma`.
    pub target: f64,
}

/// Random economy with `n` sectors. The scaling is calibrated so that the
/// held strategy `sigma` grows at a random target rate in [0.005, 0.05];
/// deprecation is drawn from [0.01, 1].
pub fn random_instance(rng: &mut impl Rng, n: usize) -> Instance {
    let alphas = random_simplex(rng, n, 0.05);
    let sigma = random_simplex(rng, n, 0.05);
    let delta = rng.random_range(0.01..=1.0);
    let prices: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..=2.0)).collect();
    let target = rng.random_range(0.005..=0.05);
    // the optimal strategy's rate that puts sigma at `target`
    let target_alpha =
        (target + delta) * oracle_product(&alphas, &alphas) / oracle_product(&sigma, &alphas) - delta;
    let coeffs = coefficients(alphas);
    let scaling = calibrate_scaling(target_alpha, &coeffs, delta, &prices).unwrap();
    Instance {
        params: EconomyParams::new(scaling, delta, coeffs).unwrap(),
        prices,
        sigma: strategy(sigma),
        target,
    }
}

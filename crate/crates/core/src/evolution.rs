//! A population of agents that imitate each other's strategies.
//!
//! Every step is a synchronous two-phase update. First all agents advance
//! economically under their current strategies. Then each agent, with a fixed
//! probability, picks a parent by observing realized growth rates on that
//! phase-1 snapshot and adopts a noisy copy of the parent's strategy. Capital
//! is never copied.
//!
//! Randomness is drawn from one ChaCha stream per agent, keyed by the master
//! seed and the agent's index.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Normal};
use serde::{Deserialize, Serialize};

use crate::dynamics::{step_agent, PriceSchedule};
use crate::economy::{project_to_simplex, AgentState, EconomyParams, Strategy};
use crate::error::{Error, Result};

const MUTATION_RETRIES: usize = 16;
const INIT_DOMAIN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionRule {
    /// Copy the highest-growth agent among the observer and its sampled peers.
    ImitateBestObserved,
    /// Pick a sampled peer with probability proportional to `g + delta`.
    GrowthProportional,
    /// Compare with one random peer; copy it only if it grows faster.
    PairwiseBetter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionConfig {
    pub population_size: usize,
    /// Standard deviation of the per-component Gaussian imitation error.
    pub imitation_error_sd: f64,
    pub imitation_probability: f64,
    pub selection_rule: SelectionRule,
    /// Peers observed per imitation decision.
    pub observation_sample: usize,
    pub seed: u64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            population_size: 50,
            imitation_error_sd: 0.02,
            imitation_probability: 0.02,
            selection_rule: SelectionRule::ImitateBestObserved,
            observation_sample: 5,
            seed: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::config(
                "evolution.population_size",
                "a population needs at least two agents",
            ));
        }
        if !(self.imitation_error_sd.is_finite() && self.imitation_error_sd >= 0.0) {
            return Err(Error::config(
                "evolution.imitation_error_sd",
                format!("must be non-negative, got {}", self.imitation_error_sd),
            ));
        }
        if !(0.0..=1.0).contains(&self.imitation_probability) {
            return Err(Error::config(
                "evolution.imitation_probability",
                format!("must lie in [0, 1], got {}", self.imitation_probability),
            ));
        }
        if self.observation_sample == 0 || self.observation_sample > self.population_size - 1 {
            return Err(Error::config(
                "evolution.observation_sample",
                format!(
                    "must lie in [1, population_size - 1 = {}], got {}",
                    self.population_size - 1,
                    self.observation_sample
                ),
            ));
        }
        Ok(())
    }
}

/// The random stream owned by agent `agent` under master seed `seed`.
pub fn agent_stream(seed: u64, agent: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(agent as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub agents: Vec<AgentState>,
    pub step: u64,
    streams: Vec<ChaCha8Rng>,
    /// `imitated[i]` is true when agent `i` adopted a new strategy in the last step.
    pub imitated: Vec<bool>,
}

impl Population {
    pub fn new(agents: Vec<AgentState>, seed: u64) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::Dimension("empty population".into()));
        }
        let n = agents[0].sectors();
        if agents.iter().any(|a| a.sectors() != n || a.strategy.sectors() != n) {
            return Err(Error::Dimension("agents disagree on the number of sectors".into()));
        }
        let streams = (0..agents.len()).map(|i| agent_stream(seed, i)).collect();
        let imitated = vec![false; agents.len()];
        Ok(Population {
            agents,
            step: 0,
            streams,
            imitated,
        })
    }

    /// Agents with strategies drawn uniformly from the simplex, each starting
    /// at the equilibrium of its own strategy with unit income.
    pub fn random(config: &EvolutionConfig, params: &EconomyParams, prices: &PriceSchedule) -> Result<Self> {
        config.validate()?;
        let n = params.sectors();
        let agents = (0..config.population_size)
            .map(|i| {
                let mut rng = agent_stream(config.seed ^ INIT_DOMAIN, i);
                let strategy = random_strategy(n, &mut rng)?;
                AgentState::at_equilibrium(strategy, params, prices.at(0), 1.0)
            })
            .collect::<Result<Vec<_>>>()?;
        Population::new(agents, config.seed)
    }

    pub fn len(&self) -> usize {
        self.agents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.agents.is_empty()
    }
}

/// A uniformly distributed point on the simplex (normalized exponentials).
pub fn random_strategy<R: Rng + ?Sized>(sectors: usize, rng: &mut R) -> Result<Strategy> {
    if sectors == 0 {
        return Err(Error::Dimension("strategy needs at least one sector".into()));
    }
    let draws: Vec<f64> = (0..sectors).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    project_to_simplex(&draws)
}

/// Copies `parent` with independent `N(0, sd^2)` noise on every component,
/// then clips and renormalizes onto the simplex.
pub fn mutate_strategy<R: Rng + ?Sized>(parent: &Strategy, sd: f64, rng: &mut R) -> Result<Strategy> {
    if !(sd.is_finite() && sd >= 0.0) {
        return Err(Error::Domain(format!("imitation error sd {sd} must be non-negative")));
    }
    if sd == 0.0 {
        return Ok(parent.clone());
    }
    let noise = Normal::new(0.0, sd).map_err(|e| Error::Domain(e.to_string()))?;
    for _ in 0..MUTATION_RETRIES {
        let noisy: Vec<f64> = parent.weights().iter().map(|&w| w + noise.sample(rng)).collect();
        match project_to_simplex(&noisy) {
            Ok(s) => return Ok(s),
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(parent.clone())
}

/// Chooses whom `observer` imitates. Returning `observer` itself means the
/// agent keeps its own strategy.
pub fn select_parent<R: Rng + ?Sized>(
    observer: usize,
    population: &Population,
    config: &EvolutionConfig,
    params: &EconomyParams,
    rng: &mut R,
) -> Result<usize> {
    let growth: Vec<f64> = population.agents.iter().map(|a| a.growth).collect();
    select_parent_by_growth(observer, &growth, config, params.deprecation, rng)
}

fn select_parent_by_growth<R: Rng + ?Sized>(
    observer: usize,
    growth: &[f64],
    config: &EvolutionConfig,
    deprecation: f64,
    rng: &mut R,
) -> Result<usize> {
    let n = growth.len();
    if n < 2 {
        return Err(Error::Selection("imitation needs at least two agents".into()));
    }
    if observer >= n {
        return Err(Error::Selection(format!("observer {observer} out of range")));
    }
    let sample_peers = |k: usize, rng: &mut R| -> Vec<usize> {
        let mut peers: Vec<usize> = index::sample(rng, n - 1, k.min(n - 1))
            .into_iter()
            .map(|j| if j >= observer { j + 1 } else { j })
            .collect();
        peers.sort_unstable();
        peers
    };

    match config.selection_rule {
        SelectionRule::ImitateBestObserved => {
            let mut best = observer;
            for j in sample_peers(config.observation_sample, rng) {
                if growth[j] > growth[best] {
                    best = j;
                }
            }
            Ok(best)
        }
        SelectionRule::GrowthProportional => {
            let peers = sample_peers(config.observation_sample, rng);
            let weights: Vec<f64> = peers
                .iter()
                .map(|&j| (growth[j] + deprecation).max(0.0))
                .collect();
            let pick = match WeightedIndex::new(&weights) {
                Ok(dist) => dist.sample(rng),
                // every weight zero: nobody is better than anybody else
                Err(_) => rng.random_range(0..peers.len()),
            };
            Ok(peers[pick])
        }
        SelectionRule::PairwiseBetter => {
            let peer = sample_peers(1, rng)[0];
            Ok(if growth[peer] > growth[observer] { peer } else { observer })
        }
    }
}

/// One synchronous evolutionary step.
pub fn evolve_step(
    population: &Population,
    params: &EconomyParams,
    prices: &PriceSchedule,
    config: &EvolutionConfig,
) -> Result<Population> {
    let order: Vec<usize> = (0..population.len()).collect();
    evolve_step_in_order(population, params, prices, config, &order)
}

/// [`evolve_step`] with the imitation phase visiting agents in `order`.
///
/// The result does not depend on `order`: every decision reads the same
/// snapshot and consumes only the deciding agent's random stream.
pub fn evolve_step_in_order(
    population: &Population,
    params: &EconomyParams,
    prices: &PriceSchedule,
    config: &EvolutionConfig,
    order: &[usize],
) -> Result<Population> {
    let n = population.len();
    if n < 2 {
        return Err(Error::Selection("imitation needs at least two agents".into()));
    }
    let mut seen = vec![false; n];
    if order.len() != n || order.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
        return Err(Error::Dimension("processing order is not a permutation of the agents".into()));
    }

    let step = population.step + 1;
    let p = prices.at(step);
    let snapshot = population
        .agents
        .iter()
        .map(|a| step_agent(a, params, p))
        .collect::<Result<Vec<_>>>()?;
    let growth: Vec<f64> = snapshot.iter().map(|a| a.growth).collect();

    let mut agents = snapshot.clone();
    let mut streams = population.streams.clone();
    let mut imitated = vec![false; n];
    for &i in order {
        let rng = &mut streams[i];
        if rng.random::<f64>() >= config.imitation_probability {
            continue;
        }
        let parent = select_parent_by_growth(i, &growth, config, params.deprecation, rng)?;
        if parent == i {
            continue;
        }
        agents[i].strategy = mutate_strategy(&snapshot[parent].strategy, config.imitation_error_sd, rng)?;
        imitated[i] = true;
    }

    Ok(Population {
        agents,
        step,
        streams,
        imitated,
    })
}

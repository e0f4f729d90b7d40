//! Simulation and analysis of an evolutionary agent-based growth economy.
//!
//! Agents (firms) split their income over capital sectors according to an
//! investment strategy, a point on the probability simplex. Capital feeds a
//! constant-returns Cobb-Douglas production function. Holding a strategy
//! drives income growth to a closed-form equilibrium rate; after a strategy
//! change the realized growth approaches the new equilibrium from above.
//! Strategies spread through a population by noisy imitation of agents with
//! high realized growth.
//!
//! - [`economy`]: strategies, coefficients, parameters, agent state, simplex helpers
//! - [`dynamics`]: single-agent stepping and strategy-switch trajectories
//! - [`equilibrium`]: equilibrium growth and ratios, contours, calibration, hill climbing
//! - [`evolution`]: imitating populations
//! - [`experiments`]: configs, drivers, CSV and SVG output

pub mod dynamics;
pub mod economy;
pub mod equilibrium;
pub mod error;
pub mod evolution;
pub mod experiments;

pub use dynamics::{growth_rate, run_hold, run_switch_experiment, step_agent, PriceSchedule, TraceRecord};
pub use economy::{
    project_to_simplex, validate_simplex, weighted_geometric_mean, AgentState, EconomyParams,
    ProductionCoefficients, Strategy, SIMPLEX_TOL,
};
pub use equilibrium::{
    calibrate_scaling, contour_contains, equilibrium_growth, equilibrium_ratio, hill_climb,
    optimal_strategy, response, ContourQuery, HillClimbConfig, HillClimbOutcome,
};
pub use error::{Error, Result};
pub use evolution::{
    evolve_step, mutate_strategy, select_parent, EvolutionConfig, Population, SelectionRule,
};

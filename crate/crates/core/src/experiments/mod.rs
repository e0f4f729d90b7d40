//! Experiment drivers behind the command-line tool.
//!
//! Each driver takes a [`RunConfig`], simulates, and either returns the data
//! ([`simulate_switch`], [`run_evolution`], [`landscape`]) or also writes it
//! to disk ([`run_experiment`]).

pub mod config;
pub mod csv;
pub mod svg;

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{run_switch_experiment, TraceRecord};
use crate::economy::{AgentState, Strategy};
use crate::equilibrium::{equilibrium_growth, optimal_strategy, response};
use crate::error::{Error, Result};
use crate::evolution::{evolve_step, mutate_strategy, Population};

pub use config::{
    load_config, EconomyConfig, ExperimentKind, InitialCapital, LandscapeConfig, PriceConfig,
    ResolvedRun, RunConfig, SwitchConfig, SwitchSpec,
};
pub use csv::LandscapeRow;
pub use svg::{emit_svg, ChartLabels, Series};

/// Lattice points beyond this count are refused by [`landscape`].
const MAX_LANDSCAPE_POINTS: u128 = 2_000_000;

fn experiment_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn initial_state(config: &RunConfig, run: &ResolvedRun, strategy: Strategy) -> Result<AgentState> {
    match config.initial_capital {
        InitialCapital::Equilibrium => AgentState::at_equilibrium(strategy, &run.params, run.prices.at(0), 1.0),
        InitialCapital::Uniform => AgentState::uniform(strategy, &run.params, 1.0),
    }
}

/// Switch steps spread over the run, between `min_switches` and
/// `max_switches` of them, each jittered within its slot.
pub fn draw_switch_steps<R: Rng + ?Sized>(steps: u64, cfg: &SwitchConfig, rng: &mut R) -> Vec<u64> {
    let count = rng.random_range(cfg.min_switches..=cfg.max_switches).min(steps.saturating_sub(1));
    if count == 0 {
        return Vec::new();
    }
    let slot = steps as f64 / (count + 1) as f64;
    let mut out = Vec::with_capacity(count as usize);
    let mut last = 0;
    for j in 1..=count {
        let jitter = rng.random_range(-0.25..=0.25) * slot;
        let step = ((j as f64 * slot + jitter).round() as u64).clamp(last + 1, steps);
        if step > last && step <= steps {
            out.push(step);
            last = step;
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct SwitchRun {
    pub trace: Vec<TraceRecord>,
    pub switch_steps: Vec<u64>,
    /// Equilibrium growth of the optimal strategy at the initial prices.
    pub optimal_growth: f64,
}

/// The single-agent strategy-switch experiment.
///
/// Without an explicit schedule, the initial strategy and every adopted
/// strategy are noisy copies of the optimal strategy, and the switch times are
/// drawn from the seed.
pub fn simulate_switch(config: &RunConfig) -> Result<SwitchRun> {
    let run = config.resolve()?;
    let optimum = optimal_strategy(&run.params.coefficients);
    let sd = config.switch.imitation_error_sd;
    let mut rng = experiment_rng(config.seed);
    let initial = match &run.initial_strategy {
        Some(s) => s.clone(),
        None => mutate_strategy(&optimum, sd, &mut rng)?,
    };
    let switches = match &run.switches {
        Some(s) => s.clone(),
        None => draw_switch_steps(config.steps, &config.switch, &mut rng)
            .into_iter()
            .map(|t| Ok((t, mutate_strategy(&optimum, sd, &mut rng)?)))
            .collect::<Result<Vec<_>>>()?,
    };
    let state = initial_state(config, &run, initial)?;
    let trace = run_switch_experiment(&state, &switches, &run.params, &run.prices, config.steps)?;
    Ok(SwitchRun {
        trace,
        switch_steps: switches.iter().map(|(t, _)| *t).collect(),
        optimal_growth: equilibrium_growth(&optimum, &run.params, run.prices.at(0))?,
    })
}

/// Holding one strategy for the whole run. Uses the same initial strategy as
/// [`simulate_switch`], so an empty switch schedule reproduces it exactly.
pub fn simulate_hold(config: &RunConfig) -> Result<Vec<TraceRecord>> {
    let mut hold = config.clone();
    hold.switch.schedule = Some(Vec::new());
    Ok(simulate_switch(&hold)?.trace)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImitationEvent {
    /// Step in which the new strategy was first used for investment.
    pub step: u64,
    pub agent: usize,
    pub growth: f64,
    /// Equilibrium growth of the newly adopted strategy.
    pub equilibrium_growth: f64,
}

#[derive(Debug, Clone)]
pub struct EvolutionRun {
    /// One record per agent per step, steps `1..=steps`.
    pub records: Vec<TraceRecord>,
    /// Population-mean response term, index = step (0 is the initial population).
    pub mean_response: Vec<f64>,
    pub events: Vec<ImitationEvent>,
    pub final_population: Population,
}

/// Runs the imitation dynamics from a random initial population.
pub fn run_evolution(config: &RunConfig) -> Result<EvolutionRun> {
    let run = config.resolve()?;
    let mut evo = config
        .evolution
        .clone()
        .ok_or_else(|| Error::config("evolution", "required for the evolve experiment"))?;
    evo.seed = config.seed;
    let params = &run.params;
    let mean_response = |pop: &Population| -> Result<f64> {
        let total = pop
            .agents
            .iter()
            .map(|a| response(&a.strategy, &params.coefficients))
            .sum::<Result<f64>>()?;
        Ok(total / pop.len() as f64)
    };

    let mut pop = Population::random(&evo, params, &run.prices)?;
    let mut means = vec![mean_response(&pop)?];
    let mut records = Vec::with_capacity(config.steps as usize * pop.len());
    let mut events = Vec::new();
    for _ in 0..config.steps {
        let adopted = pop.imitated.clone();
        // growth realized in a step comes from the strategy held going into it
        let held: Vec<Strategy> = pop.agents.iter().map(|a| a.strategy.clone()).collect();
        pop = evolve_step(&pop, params, &run.prices, &evo)?;
        let p = run.prices.at(pop.step);
        for (i, agent) in pop.agents.iter().enumerate() {
            let eq = equilibrium_growth(&held[i], params, p)?;
            let mut rec = TraceRecord::new(pop.step, i as u64, agent, eq);
            rec.strategy = held[i].weights().to_vec();
            if adopted[i] {
                events.push(ImitationEvent {
                    step: pop.step,
                    agent: i,
                    growth: agent.growth,
                    equilibrium_growth: eq,
                });
            }
            records.push(rec);
        }
        means.push(mean_response(&pop)?);
    }
    Ok(EvolutionRun {
        records,
        mean_response: means,
        events,
        final_population: pop,
    })
}

/// All simplex points with components `k / resolution`, with their response
/// and equilibrium growth.
pub fn landscape(config: &RunConfig) -> Result<Vec<LandscapeRow>> {
    let run = config.resolve()?;
    let n = run.params.sectors();
    let res = config.landscape.resolution;
    // C(res + n - 1, n - 1)
    let mut count: u128 = 1;
    for i in 1..n as u128 {
        count = count * (res as u128 + i) / i;
        if count > MAX_LANDSCAPE_POINTS {
            return Err(Error::config(
                "landscape.resolution",
                format!("lattice would exceed {MAX_LANDSCAPE_POINTS} points"),
            ));
        }
    }
    let mut rows = Vec::with_capacity(count as usize);
    let mut parts = vec![0u64; n];
    lattice(&mut parts, 0, res, &mut |parts| {
        let weights: Vec<f64> = parts.iter().map(|&k| k as f64 / res as f64).collect();
        let strategy = Strategy::new(weights)?;
        rows.push(LandscapeRow {
            response: response(&strategy, &run.params.coefficients)?,
            equilibrium_growth: equilibrium_growth(&strategy, &run.params, run.prices.at(0))?,
            strategy: strategy.into_inner(),
        });
        Ok(())
    })?;
    Ok(rows)
}

fn lattice(
    parts: &mut [u64],
    idx: usize,
    remaining: u64,
    visit: &mut dyn FnMut(&[u64]) -> Result<()>,
) -> Result<()> {
    if idx == parts.len() - 1 {
        parts[idx] = remaining;
        return visit(parts);
    }
    for k in (0..=remaining).rev() {
        parts[idx] = k;
        lattice(parts, idx + 1, remaining - k, visit)?;
    }
    Ok(())
}

/// `dir/stem<suffix>.<ext>` next to `path`.
pub fn sibling_path(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("growthlab");
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

/// The growth panel (realized vs equilibrium growth) and excess panel of a
/// switch run, as CSV documents.
pub fn switch_panels(run: &SwitchRun) -> (String, String) {
    let growth: Vec<(u64, Vec<f64>)> = run
        .trace
        .iter()
        .map(|r| (r.step, vec![r.growth, r.equilibrium_growth, run.optimal_growth]))
        .collect();
    let excess: Vec<(u64, Vec<f64>)> = run.trace.iter().map(|r| (r.step, vec![r.excess_growth])).collect();
    (
        csv::series_csv(&["growth", "equilibrium_growth", "optimal_equilibrium_growth"], &growth),
        csv::series_csv(&["excess_growth"], &excess),
    )
}

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
}

/// Runs the switch experiment and writes the trace, both panels, and
/// optionally an SVG chart of each panel.
pub fn write_switch_experiment(config: &RunConfig) -> Result<(SwitchRun, RunOutput)> {
    let run = simulate_switch(config)?;
    let out = Path::new(&config.output_path);
    let mut files = Vec::new();
    csv::write_file(out, &csv::trace_csv(&run.trace))?;
    files.push(out.to_path_buf());

    let (growth_csv, excess_csv) = switch_panels(&run);
    let growth_path = sibling_path(out, "_growth", "csv");
    let excess_path = sibling_path(out, "_excess", "csv");
    csv::write_file(&growth_path, &growth_csv)?;
    csv::write_file(&excess_path, &excess_csv)?;
    files.extend([growth_path, excess_path]);

    if config.emit_svg {
        let pts = |f: fn(&TraceRecord) -> f64| run.trace.iter().map(|r| (r.step as f64, f(r))).collect();
        let growth = [
            Series::new("income growth rate", pts(|r| r.growth)),
            Series::new("equilibrium growth rate", pts(|r| r.equilibrium_growth)),
            Series::new(
                "optimal equilibrium growth rate",
                run.trace.iter().map(|r| (r.step as f64, run.optimal_growth)).collect(),
            ),
        ];
        let excess = [Series::new("excess growth rate", pts(|r| r.excess_growth))];
        let growth_svg = sibling_path(out, "_growth", "svg");
        let excess_svg = sibling_path(out, "_excess", "svg");
        emit_svg(
            &growth,
            &ChartLabels {
                title: "Realized vs equilibrium income growth".into(),
                x_label: "time steps".into(),
                y_label: "income growth rate".into(),
            },
            &growth_svg,
        )?;
        emit_svg(
            &excess,
            &ChartLabels {
                title: "Realized minus equilibrium growth".into(),
                x_label: "time steps".into(),
                y_label: "excess growth rate".into(),
            },
            &excess_svg,
        )?;
        files.extend([growth_svg, excess_svg]);
    }
    Ok((run, RunOutput { files }))
}

/// Runs the configured experiment, writes its outputs and the effective
/// config next to the main output file.
pub fn run_experiment(config: &RunConfig) -> Result<RunOutput> {
    let out = PathBuf::from(&config.output_path);
    let mut output = match config.experiment {
        ExperimentKind::Switch => write_switch_experiment(config)?.1,
        ExperimentKind::Hold => {
            let trace = simulate_hold(config)?;
            csv::write_file(&out, &csv::trace_csv(&trace))?;
            let mut files = vec![out.clone()];
            if config.emit_svg {
                let path = sibling_path(&out, "", "svg");
                let series = [
                    Series::new("income growth rate", trace.iter().map(|r| (r.step as f64, r.growth)).collect()),
                    Series::new(
                        "equilibrium growth rate",
                        trace.iter().map(|r| (r.step as f64, r.equilibrium_growth)).collect(),
                    ),
                ];
                emit_svg(
                    &series,
                    &ChartLabels {
                        title: "Income growth under a fixed strategy".into(),
                        x_label: "time steps".into(),
                        y_label: "income growth rate".into(),
                    },
                    &path,
                )?;
                files.push(path);
            }
            RunOutput { files }
        }
        ExperimentKind::Evolve => {
            let evo = run_evolution(config)?;
            csv::write_file(&out, &csv::population_csv(&evo.records))?;
            let mut files = vec![out.clone()];
            if config.emit_svg {
                let path = sibling_path(&out, "_response", "svg");
                let series = [Series::new(
                    "mean response",
                    evo.mean_response.iter().enumerate().map(|(t, &m)| (t as f64, m)).collect(),
                )];
                emit_svg(
                    &series,
                    &ChartLabels {
                        title: "Population mean response term".into(),
                        x_label: "time steps".into(),
                        y_label: "mean response".into(),
                    },
                    &path,
                )?;
                files.push(path);
            }
            RunOutput { files }
        }
        ExperimentKind::Landscape => {
            let rows = landscape(config)?;
            csv::write_file(&out, &csv::landscape_csv(&rows))?;
            RunOutput { files: vec![out.clone()] }
        }
    };
    let effective = sibling_path(&out, ".config", "json");
    csv::write_file(&effective, &config.effective()?.to_json())?;
    output.files.push(effective);
    Ok(output)
}

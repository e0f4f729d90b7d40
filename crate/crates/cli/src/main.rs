//! `growthlab` command-line tool.
//!
//! Exit status: 0 on success, 2 for usage and configuration errors, 1 when a
//! simulation or file write fails.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use growthlab::experiments::{
    load_config, run_experiment, ExperimentKind, InitialCapital, PriceConfig, RunConfig,
};
use growthlab::{
    calibrate_scaling, equilibrium_growth, EconomyParams, Error, EvolutionConfig,
    ProductionCoefficients, SelectionRule, Strategy,
};

#[derive(Debug, Parser)]
#[command(name = "growthlab", version, about = "Evolutionary growth economy experiments")]
struct Cli {
    /// JSON run configuration; command-line flags override its values
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed for every random choice in the run
    #[arg(long, global = true, env = "GROWTHLAB_SEED", value_name = "N")]
    seed: Option<u64>,

    /// Main CSV output file; companion files are written next to it
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Also render SVG line charts
    #[arg(long, global = true)]
    svg: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the equilibrium growth rate of a strategy
    Equilibrium {
        /// Investment strategy, comma separated
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        sigma: Option<Vec<f64>>,
        #[command(flatten)]
        economy: EconomyArgs,
    },
    /// Print the scaling that gives the optimal strategy a target growth rate
    Calibrate {
        #[command(flatten)]
        economy: EconomyArgs,
    },
    /// Single-agent strategy-switch experiment, one trace row per step
    Converge {
        #[command(flatten)]
        economy: EconomyArgs,
        #[arg(long)]
        steps: Option<u64>,
        /// Initial strategy; drawn around the optimum when absent
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        strategy: Option<Vec<f64>>,
        /// Keep the initial strategy for the whole run
        #[arg(long)]
        hold: bool,
        /// Start from one unit of capital per sector instead of equilibrium
        #[arg(long)]
        uniform_capital: bool,
        /// Imitation error sd for the drawn strategies
        #[arg(long)]
        imitation_error_sd: Option<f64>,
    },
    /// Population of imitating agents, one row per agent per step
    Evolve {
        #[command(flatten)]
        economy: EconomyArgs,
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long)]
        population: Option<usize>,
        #[arg(long)]
        imitation_probability: Option<f64>,
        #[arg(long)]
        imitation_error_sd: Option<f64>,
        /// imitate-best-observed, growth-proportional or pairwise-better
        #[arg(long, value_parser = parse_rule)]
        selection_rule: Option<SelectionRule>,
        #[arg(long)]
        observation_sample: Option<usize>,
    },
    /// Response and equilibrium growth over a lattice of strategies
    Landscape {
        #[command(flatten)]
        economy: EconomyArgs,
        /// Lattice denominator
        #[arg(long)]
        resolution: Option<u64>,
    },
}

#[derive(Debug, Args)]
struct EconomyArgs {
    /// Production coefficients, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    alpha: Option<Vec<f64>>,
    /// Capital deprecation rate
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Production scaling
    #[arg(long = "s", visible_alias = "scaling", allow_negative_numbers = true)]
    scaling: Option<f64>,
    /// Equilibrium growth of the optimal strategy; calibrates the scaling
    #[arg(long, allow_negative_numbers = true)]
    target: Option<f64>,
    /// Constant capital prices, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    prices: Option<Vec<f64>>,
}

fn parse_rule(s: &str) -> Result<SelectionRule, String> {
    match s {
        "imitate-best-observed" => Ok(SelectionRule::ImitateBestObserved),
        "growth-proportional" => Ok(SelectionRule::GrowthProportional),
        "pairwise-better" => Ok(SelectionRule::PairwiseBetter),
        _ => Err("expected imitate-best-observed, growth-proportional or pairwise-better".into()),
    }
}

enum Failure {
    Usage(Error),
    Runtime(Error),
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage<T>(r: growthlab::Result<T>) -> CliResult<T> {
    r.map_err(Failure::Usage)
}

fn runtime<T>(r: growthlab::Result<T>) -> CliResult<T> {
    r.map_err(|e| match e {
        e @ Error::Config { .. } => Failure::Usage(e),
        e => Failure::Runtime(e),
    })
}

/// Rounded to 12 significant digits, printed in the shortest form.
fn format_value(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded}")
}

fn config_error(key: &str, message: impl Into<String>) -> Failure {
    Failure::Usage(Error::Config {
        key: key.into(),
        message: message.into(),
    })
}

fn base_config(cli: &Cli, kind: ExperimentKind) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => usage(load_config(path))?,
        None => RunConfig::default_for(kind),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.output {
        cfg.output_path = out.to_string_lossy().into_owned();
    }
    cfg.emit_svg |= cli.svg;
    Ok(cfg)
}

fn apply_economy(cfg: &mut RunConfig, args: &EconomyArgs) {
    if let Some(alpha) = &args.alpha {
        cfg.economy.alphas = alpha.clone();
    }
    if let Some(delta) = args.delta {
        cfg.economy.deprecation = delta;
    }
    if let Some(s) = args.scaling {
        cfg.economy.scaling = Some(s);
        cfg.target_growth = None;
    }
    if let Some(t) = args.target {
        cfg.target_growth = Some(t);
    }
    if let Some(p) = &args.prices {
        cfg.prices = Some(PriceConfig::Constant(p.clone()));
    }
}

fn expect_kind(cfg: &RunConfig, allowed: &[ExperimentKind], command: &str) -> CliResult<()> {
    if allowed.contains(&cfg.experiment) {
        Ok(())
    } else {
        Err(config_error("experiment", format!("{:?} config cannot drive `{command}`", cfg.experiment)))
    }
}

fn run_and_report(cfg: &RunConfig) -> CliResult<()> {
    usage(cfg.resolve())?;
    let out = runtime(run_experiment(cfg))?;
    for f in out.files {
        println!("{}", f.display());
    }
    Ok(())
}

/// Economy for the one-shot `equilibrium` and `calibrate` queries: flags
/// first, then the config file, then the built-in defaults.
fn query_economy(cli: &Cli, args: &EconomyArgs) -> CliResult<(RunConfig, ProductionCoefficients, Vec<f64>)> {
    let mut cfg = match &cli.config {
        Some(path) => usage(load_config(path))?,
        None => RunConfig::default_for(ExperimentKind::Hold),
    };
    apply_economy(&mut cfg, args);
    let coeffs = usage(ProductionCoefficients::new(cfg.economy.alphas.clone()))?;
    let prices = match &cfg.prices {
        Some(PriceConfig::Constant(p)) => p.clone(),
        Some(PriceConfig::Series(series)) => series.first().cloned().unwrap_or_default(),
        None => vec![1.0; coeffs.sectors()],
    };
    Ok((cfg, coeffs, prices))
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Equilibrium { sigma, economy } => {
            let (cfg, coeffs, prices) = query_economy(&cli, economy)?;
            let sigma = sigma
                .clone()
                .or_else(|| cfg.strategy.clone())
                .ok_or_else(|| config_error("sigma", "a strategy is required"))?;
            let scaling = match (cfg.economy.scaling, cfg.target_growth) {
                (_, Some(t)) => usage(calibrate_scaling(t, &coeffs, cfg.economy.deprecation, &prices))?,
                (Some(s), None) => s,
                (None, None) => return Err(config_error("s", "a scaling or a target is required")),
            };
            let params = usage(EconomyParams::new(scaling, cfg.economy.deprecation, coeffs))?;
            let sigma = usage(Strategy::new(sigma))?;
            let g = usage(equilibrium_growth(&sigma, &params, &prices))?;
            println!("{}", format_value(g));
        }
        Command::Calibrate { economy } => {
            let (cfg, coeffs, prices) = query_economy(&cli, economy)?;
            let target = cfg
                .target_growth
                .ok_or_else(|| config_error("target", "a target growth rate is required"))?;
            let s = usage(calibrate_scaling(target, &coeffs, cfg.economy.deprecation, &prices))?;
            println!("{}", format_value(s));
        }
        Command::Converge {
            economy,
            steps,
            strategy,
            hold,
            uniform_capital,
            imitation_error_sd,
        } => {
            let mut cfg = base_config(&cli, ExperimentKind::Switch)?;
            expect_kind(&cfg, &[ExperimentKind::Switch, ExperimentKind::Hold], "converge")?;
            apply_economy(&mut cfg, economy);
            if *hold {
                cfg.experiment = ExperimentKind::Hold;
            }
            if let Some(steps) = steps {
                cfg.steps = *steps;
            }
            if let Some(s) = strategy {
                cfg.strategy = Some(s.clone());
            }
            if *uniform_capital {
                cfg.initial_capital = InitialCapital::Uniform;
            }
            if let Some(sd) = imitation_error_sd {
                cfg.switch.imitation_error_sd = *sd;
            }
            run_and_report(&cfg)?;
        }
        Command::Evolve {
            economy,
            steps,
            population,
            imitation_probability,
            imitation_error_sd,
            selection_rule,
            observation_sample,
        } => {
            let mut cfg = base_config(&cli, ExperimentKind::Evolve)?;
            expect_kind(&cfg, &[ExperimentKind::Evolve], "evolve")?;
            apply_economy(&mut cfg, economy);
            if let Some(steps) = steps {
                cfg.steps = *steps;
            }
            let evo = cfg.evolution.get_or_insert_with(EvolutionConfig::default);
            if let Some(n) = population {
                evo.population_size = *n;
            }
            if let Some(p) = imitation_probability {
                evo.imitation_probability = *p;
            }
            if let Some(sd) = imitation_error_sd {
                evo.imitation_error_sd = *sd;
            }
            if let Some(rule) = selection_rule {
                evo.selection_rule = *rule;
            }
            if let Some(k) = observation_sample {
                evo.observation_sample = *k;
            }
            run_and_report(&cfg)?;
        }
        Command::Landscape { economy, resolution } => {
            let mut cfg = base_config(&cli, ExperimentKind::Landscape)?;
            expect_kind(&cfg, &[ExperimentKind::Landscape], "landscape")?;
            apply_economy(&mut cfg, economy);
            if let Some(r) = resolution {
                cfg.landscape.resolution = *r;
            }
            run_and_report(&cfg)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

//! JSON run configuration.
//!
//! A config is parsed into [`RunConfig`], then [`RunConfig::resolve`] checks
//! every constraint and builds the validated domain objects. Errors carry the
//! dotted key path of the offending field.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::PriceSchedule;
use crate::economy::{validate_simplex, EconomyParams, ProductionCoefficients, Strategy, SIMPLEX_TOL};
use crate::equilibrium::calibrate_scaling;
use crate::error::{Error, Result};
use crate::evolution::EvolutionConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Hold,
    Switch,
    Evolve,
    Landscape,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialCapital {
    /// Start at the equilibrium capital/income ratio of the initial strategy, income 1.
    #[default]
    Equilibrium,
    /// One unit of capital in every sector.
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomyConfig {
    /// Required unless `target_growth` is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<f64>,
    #[serde(default = "default_deprecation")]
    pub deprecation: f64,
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PriceConfig {
    Constant(Vec<f64>),
    Series(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchSpec {
    pub step: u64,
    pub strategy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SwitchConfig {
    /// Explicit switch schedule. When absent one is drawn from the seed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<SwitchSpec>>,
    /// Sd of the imitation error applied to the optimal strategy for drawn strategies.
    pub imitation_error_sd: f64,
    pub min_switches: u64,
    pub max_switches: u64,
}

impl Default for SwitchConfig {
    fn default() -> Self {
        SwitchConfig {
            schedule: None,
            imitation_error_sd: 0.02,
            min_switches: 6,
            max_switches: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LandscapeConfig {
    /// Lattice denominator: strategies are all points with components `k / resolution`.
    pub resolution: u64,
}

impl Default for LandscapeConfig {
    fn default() -> Self {
        LandscapeConfig { resolution: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub economy: EconomyConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prices: Option<PriceConfig>,
    #[serde(default = "default_steps")]
    pub steps: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_growth: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output")]
    pub output_path: String,
    #[serde(default)]
    pub emit_svg: bool,
    #[serde(default)]
    pub initial_capital: InitialCapital,
    /// Initial strategy for `hold` and `switch`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Vec<f64>>,
    #[serde(default)]
    pub switch: SwitchConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolution: Option<EvolutionConfig>,
    #[serde(default)]
    pub landscape: LandscapeConfig,
}

fn default_deprecation() -> f64 {
    0.03
}

fn default_steps() -> u64 {
    500
}

fn default_output() -> String {
    "growthlab.csv".to_string()
}

/// Validated domain objects derived from a [`RunConfig`].
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub params: EconomyParams,
    pub prices: PriceSchedule,
    pub initial_strategy: Option<Strategy>,
    pub switches: Option<Vec<(u64, Strategy)>>,
}

impl RunConfig {
    /// The economy used when no config file is given: four sectors, the
    /// optimal strategy calibrated to grow 1.85% per step.
    pub fn default_for(experiment: ExperimentKind) -> Self {
        RunConfig {
            experiment,
            economy: EconomyConfig {
                scaling: None,
                deprecation: 0.05,
                alphas: vec![0.4, 0.3, 0.2, 0.1],
            },
            prices: None,
            steps: default_steps(),
            target_growth: Some(0.0185),
            seed: 0,
            output_path: default_output(),
            emit_svg: false,
            initial_capital: InitialCapital::Equilibrium,
            strategy: None,
            switch: SwitchConfig::default(),
            evolution: (experiment == ExperimentKind::Evolve).then(EvolutionConfig::default),
            landscape: LandscapeConfig::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { String::new() } else { path }, e.inner().to_string())
        })?;
        config.resolve()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every constraint and builds the domain objects.
    pub fn resolve(&self) -> Result<ResolvedRun> {
        if self.steps == 0 {
            return Err(Error::config("steps", "must be at least 1"));
        }
        let alphas = &self.economy.alphas;
        if alphas.is_empty() || !validate_simplex(alphas, SIMPLEX_TOL)? || alphas.iter().any(|&a| a < 0.0) {
            return Err(Error::config(
                "economy.alphas",
                format!(
                    "production coefficients must be non-negative and sum to 1 (sum = {})",
                    alphas.iter().sum::<f64>()
                ),
            ));
        }
        let coefficients = ProductionCoefficients::new(alphas.clone())
            .map_err(|e| Error::config("economy.alphas", e.to_string()))?;
        let n = coefficients.sectors();
        let delta = self.economy.deprecation;
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::config(
                "economy.deprecation",
                format!("must lie in (0, 1], got {delta}"),
            ));
        }

        let prices = match &self.prices {
            None => PriceSchedule::unit(n),
            Some(PriceConfig::Constant(p)) => PriceSchedule::constant(p.clone())
                .map_err(|e| Error::config("prices.constant", e.to_string()))?,
            Some(PriceConfig::Series(s)) => {
                PriceSchedule::series(s.clone()).map_err(|e| Error::config("prices.series", e.to_string()))?
            }
        };
        if prices.sectors() != n {
            let key = if prices.is_constant() { "prices.constant" } else { "prices.series" };
            return Err(Error::config(
                key,
                format!("{} prices for {n} sectors", prices.sectors()),
            ));
        }

        let scaling = match (self.target_growth, self.economy.scaling) {
            (Some(target), _) => calibrate_scaling(target, &coefficients, delta, prices.at(0))
                .map_err(|e| Error::config("target_growth", e.to_string()))?,
            (None, Some(s)) => s,
            (None, None) => {
                return Err(Error::config(
                    "economy.scaling",
                    "required when target_growth is not given",
                ))
            }
        };
        if !(scaling.is_finite() && scaling > 0.0) {
            return Err(Error::config("economy.scaling", format!("must be positive, got {scaling}")));
        }
        let params = EconomyParams::new(scaling, delta, coefficients)?;

        let initial_strategy = self
            .strategy
            .as_ref()
            .map(|w| parse_strategy(w, n, "strategy"))
            .transpose()?;

        let sw = &self.switch;
        if !(sw.imitation_error_sd.is_finite() && sw.imitation_error_sd >= 0.0) {
            return Err(Error::config("switch.imitation_error_sd", "must be non-negative"));
        }
        if sw.min_switches > sw.max_switches {
            return Err(Error::config(
                "switch.max_switches",
                "must be at least switch.min_switches",
            ));
        }
        let switches = match &sw.schedule {
            None => None,
            Some(schedule) => {
                let mut last = 0;
                let mut out = Vec::with_capacity(schedule.len());
                for (i, spec) in schedule.iter().enumerate() {
                    if spec.step <= last || spec.step > self.steps {
                        return Err(Error::config(
                            format!("switch.schedule[{i}].step"),
                            format!(
                                "steps must be strictly increasing within [1, {}], got {}",
                                self.steps, spec.step
                            ),
                        ));
                    }
                    last = spec.step;
                    let s = parse_strategy(&spec.strategy, n, &format!("switch.schedule[{i}].strategy"))?;
                    out.push((spec.step, s));
                }
                Some(out)
            }
        };

        if self.experiment == ExperimentKind::Evolve && self.evolution.is_none() {
            return Err(Error::config("evolution", "required for the evolve experiment"));
        }
        if let Some(evo) = &self.evolution {
            evo.validate()?;
        }
        if self.experiment == ExperimentKind::Landscape && self.landscape.resolution == 0 {
            return Err(Error::config("landscape.resolution", "must be at least 1"));
        }

        Ok(ResolvedRun {
            params,
            prices,
            initial_strategy,
            switches,
        })
    }

    /// The config with every default written out, including the calibrated
    /// scaling and the price vector. Reloading it reproduces the same run.
    pub fn effective(&self) -> Result<RunConfig> {
        let resolved = self.resolve()?;
        let mut out = self.clone();
        out.economy.scaling = Some(resolved.params.scaling);
        if out.prices.is_none() {
            out.prices = Some(PriceConfig::Constant(resolved.prices.at(0).to_vec()));
        }
        if let Some(evo) = out.evolution.as_mut() {
            evo.seed = self.seed;
        }
        Ok(out)
    }
}

fn parse_strategy(weights: &[f64], sectors: usize, key: &str) -> Result<Strategy> {
    if weights.len() != sectors {
        return Err(Error::config(
            key,
            format!("expected {sectors} components, got {}", weights.len()),
        ));
    }
    Strategy::new(weights.to_vec()).map_err(|e| Error::config(key, e.to_string()))
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RunConfig::from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(err: Error) -> String {
        match err {
            Error::Config { key, .. } => key,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_json(
            r#"{"experiment": "hold", "economy": {"scaling": 0.1, "alphas": [0.5, 0.5]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.steps, 500);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.economy.deprecation, 0.03);
        assert_eq!(cfg.output_path, "growthlab.csv");
        assert!(!cfg.emit_svg);
        assert_eq!(cfg.initial_capital, InitialCapital::Equilibrium);
        assert_eq!(cfg.switch, SwitchConfig::default());
        assert_eq!(cfg.landscape.resolution, 20);
        let run = cfg.resolve().unwrap();
        assert_eq!(run.prices, PriceSchedule::unit(2));
    }

    #[test]
    fn bad_alphas_name_their_key() {
        let err = RunConfig::from_json(
            r#"{"experiment": "hold", "economy": {"scaling": 0.1, "alphas": [0.5, 0.4]}}"#,
        )
        .unwrap_err();
        assert_eq!(key_of(err), "economy.alphas");
    }

    #[test]
    fn type_errors_name_their_key() {
        let err = RunConfig::from_json(
            r#"{"experiment": "hold", "economy": {"scaling": 0.1, "alphas": [0.5, "x"]}}"#,
        )
        .unwrap_err();
        assert_eq!(key_of(err), "economy.alphas[1]");
        let err = RunConfig::from_json(
            r#"{"experiment": "hold", "economy": {"scaling": 0.1, "alphas": [1.0]}, "stepz": 3}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn semantic_errors_name_their_key() {
        let base = |extra: &str| {
            format!(
                r#"{{"experiment": "switch", "economy": {{"scaling": 0.1, "alphas": [0.5, 0.5]}} {extra}}}"#
            )
        };
        let cases = [
            (r#", "steps": 0"#, "steps"),
            (r#", "prices": {"constant": [1.0]}"#, "prices.constant"),
            (r#", "prices": {"constant": [1.0, -2.0]}"#, "prices.constant"),
            (r#", "strategy": [0.9, 0.9]"#, "strategy"),
            (
                r#", "switch": {"schedule": [{"step": 3, "strategy": [0.5, 0.5]}, {"step": 2, "strategy": [0.5, 0.5]}]}"#,
                "switch.schedule[1].step",
            ),
            (r#", "target_growth": -0.5"#, "target_growth"),
        ];
        for (extra, key) in cases {
            let err = RunConfig::from_json(&base(extra)).unwrap_err();
            assert_eq!(key_of(err), key, "case {extra}");
        }
        let err = RunConfig::from_json(
            r#"{"experiment": "hold", "economy": {"deprecation": 0.0, "scaling": 0.1, "alphas": [1.0]}}"#,
        )
        .unwrap_err();
        assert_eq!(key_of(err), "economy.deprecation");
        let err = RunConfig::from_json(r#"{"experiment": "hold", "economy": {"alphas": [1.0]}}"#).unwrap_err();
        assert_eq!(key_of(err), "economy.scaling");
        let err = RunConfig::from_json(
            r#"{"experiment": "evolve", "economy": {"scaling": 0.1, "alphas": [1.0]}}"#,
        )
        .unwrap_err();
        assert_eq!(key_of(err), "evolution");
    }

    #[test]
    fn target_growth_calibrates_scaling() {
        let cfg = RunConfig::from_json(
            r#"{"experiment": "hold", "target_growth": 0.0185, "economy": {"alphas": [0.5, 0.5]}}"#,
        )
        .unwrap();
        let run = cfg.resolve().unwrap();
        assert!((run.params.scaling - 0.097).abs() < 1e-15);
    }

    #[test]
    fn effective_config_round_trips() {
        let cfg = RunConfig::from_json(
            r#"{"experiment": "evolve", "target_growth": 0.0185, "seed": 4,
                "economy": {"alphas": [0.2, 0.3, 0.5]}, "evolution": {"population_size": 10}}"#,
        )
        .unwrap();
        let eff = cfg.effective().unwrap();
        let reloaded = RunConfig::from_json(&eff.to_json()).unwrap();
        assert_eq!(reloaded, eff);
        assert_eq!(reloaded.effective().unwrap(), eff);
        assert_eq!(
            reloaded.resolve().unwrap().params,
            cfg.resolve().unwrap().params
        );
    }
}

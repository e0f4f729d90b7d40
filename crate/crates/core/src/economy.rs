//! Domain types shared by every part of the simulator.
//!
//! Strategies and production coefficients both live on the probability
//! simplex. Products of the form `prod x_i^a_i` are evaluated in log space,
//! with the convention `0^0 = 1` so that sectors with a zero coefficient are
//! economically inert.

use crate::error::{Error, Result};

/// Absolute tolerance used when validating simplex points.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Returns whether `v` is a point on the probability simplex.
///
/// Components may dip to `-tol`; after clamping those to zero the sum must be
/// within `tol` of one. Non-finite components make the vector invalid.
pub fn validate_simplex(v: &[f64], tol: f64) -> Result<bool> {
    if v.is_empty() {
        return Err(Error::Dimension("simplex point must have at least one component".into()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Ok(false);
    }
    if v.iter().any(|&x| x < -tol) {
        return Ok(false);
    }
    let sum: f64 = v.iter().map(|&x| x.max(0.0)).sum();
    Ok((sum - 1.0).abs() <= tol)
}

/// Clip negative components to zero and rescale onto the simplex.
pub fn project_to_simplex(v: &[f64]) -> Result<Strategy> {
    if v.is_empty() {
        return Err(Error::Dimension("cannot project an empty vector".into()));
    }
    if v.iter().any(|x| x.is_nan()) {
        return Err(Error::NonFinite("vector to project".into()));
    }
    let clipped: Vec<f64> = v.iter().map(|&x| x.max(0.0)).collect();
    let sum: f64 = clipped.iter().sum();
    if !(sum.is_finite() && sum > 0.0) {
        return Err(Error::Degenerate(
            "no positive component left after clipping".into(),
        ));
    }
    Ok(Strategy(clipped.into_iter().map(|x| x / sum).collect()))
}

/// `exp(sum_{a_i > 0} a_i ln x_i)`, i.e. the Cobb-Douglas kernel `prod x_i^a_i`.
///
/// Returns exactly zero when a factor with positive exponent is zero.
pub fn weighted_geometric_mean(base: &[f64], exponents: &ProductionCoefficients) -> Result<f64> {
    Ok(match log_weighted_sum(base, exponents.weights())? {
        Some(log) => log.exp(),
        None => 0.0,
    })
}

/// `sum_{a_i > 0} a_i ln x_i`, or `None` when some `x_i = 0` has `a_i > 0`.
pub(crate) fn log_weighted_sum(base: &[f64], exponents: &[f64]) -> Result<Option<f64>> {
    if base.len() != exponents.len() {
        return Err(Error::Dimension(format!(
            "base has {} components, exponents have {}",
            base.len(),
            exponents.len()
        )));
    }
    let mut acc = 0.0;
    let mut zero = false;
    for (&x, &a) in base.iter().zip(exponents) {
        if x.is_nan() || x.is_infinite() {
            return Err(Error::NonFinite("product base".into()));
        }
        if x < 0.0 {
            return Err(Error::Domain(format!("negative base component {x}")));
        }
        if a > 0.0 {
            if x == 0.0 {
                zero = true;
            } else {
                acc += a * x.ln();
            }
        }
    }
    Ok(if zero { None } else { Some(acc) })
}

fn check_simplex_point(v: &[f64], what: &str) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Dimension(format!("{what} must have at least one component")));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(what.to_string()));
    }
    if let Some(x) = v.iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::Domain(format!("{what} component {x} outside [0, 1]")));
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::Domain(format!("{what} components sum to {sum}, expected 1")));
    }
    Ok(())
}

/// Fraction of income invested in each sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy(Vec<f64>);

impl Strategy {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        check_simplex_point(&weights, "strategy")?;
        Ok(Strategy(weights))
    }

    /// Equal investment in every sector.
    pub fn uniform(sectors: usize) -> Result<Self> {
        if sectors == 0 {
            return Err(Error::Dimension("strategy needs at least one sector".into()));
        }
        Ok(Strategy(vec![1.0 / sectors as f64; sectors]))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn sectors(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Strategy, lambda: f64) -> Result<Strategy> {
        if self.sectors() != other.sectors() {
            return Err(Error::Dimension("mixing strategies of different dimension".into()));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Domain(format!("mixing weight {lambda} outside [0, 1]")));
        }
        let mixed: Vec<f64> = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        project_to_simplex(&mixed)
    }
}

/// Cobb-Douglas elasticities; they sum to one (constant returns to scale).
#[derive(Debug, Clone, PartialEq)]
pub struct ProductionCoefficients(Vec<f64>);

impl ProductionCoefficients {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        check_simplex_point(&alphas, "production coefficients")?;
        Ok(ProductionCoefficients(alphas))
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn sectors(&self) -> usize {
        self.0.len()
    }
}

/// Parameters shared by every agent of an economy.
///
/// Fields are public so that callers can assemble boundary cases (the
/// dynamics accept `deprecation = 0`); [`EconomyParams::new`] enforces the
/// full `0 < deprecation <= 1` contract.
#[derive(Debug, Clone, PartialEq)]
pub struct EconomyParams {
    /// Income per unit of composite capital.
    pub scaling: f64,
    /// Per-step proportional capital decay, identical for all sectors.
    pub deprecation: f64,
    pub coefficients: ProductionCoefficients,
}

impl EconomyParams {
    pub fn new(scaling: f64, deprecation: f64, coefficients: ProductionCoefficients) -> Result<Self> {
        let params = EconomyParams {
            scaling,
            deprecation,
            coefficients,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.scaling.is_finite() || self.scaling <= 0.0 {
            return Err(Error::Domain(format!("scaling must be positive, got {}", self.scaling)));
        }
        if !(self.deprecation > 0.0 && self.deprecation <= 1.0) {
            return Err(Error::Domain(format!(
                "deprecation must lie in (0, 1], got {}",
                self.deprecation
            )));
        }
        Ok(())
    }

    pub fn sectors(&self) -> usize {
        self.coefficients.sectors()
    }

    /// Income produced by a capital vector: `s * prod k_i^a_i`.
    pub fn production(&self, capital: &[f64]) -> Result<f64> {
        Ok(self.scaling * weighted_geometric_mean(capital, &self.coefficients)?)
    }
}

/// Checks that `prices` is a positive, finite vector of the expected size.
pub fn check_prices(prices: &[f64], sectors: usize) -> Result<()> {
    if prices.len() != sectors {
        return Err(Error::Dimension(format!(
            "{} prices for {} sectors",
            prices.len(),
            sectors
        )));
    }
    for &p in prices {
        if !p.is_finite() {
            return Err(Error::NonFinite("prices".into()));
        }
        if p <= 0.0 {
            return Err(Error::Domain(format!("price {p} is not positive")));
        }
    }
    Ok(())
}

/// State of a single agent between two steps.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    /// Capital per sector.
    pub capital: Vec<f64>,
    /// Income derived from `capital`; always recomputed, never accumulated.
    pub income: f64,
    /// Income growth realized in the last step.
    pub growth: f64,
    pub strategy: Strategy,
    /// Set once income has dropped to zero. The zero-income state is absorbing.
    pub zero_income: bool,
}

impl AgentState {
    /// Builds a state from explicit capital, deriving income.
    pub fn from_capital(capital: Vec<f64>, strategy: Strategy, params: &EconomyParams) -> Result<Self> {
        if capital.len() != params.sectors() || strategy.sectors() != params.sectors() {
            return Err(Error::Dimension(format!(
                "capital has {} sectors, strategy {}, economy {}",
                capital.len(),
                strategy.sectors(),
                params.sectors()
            )));
        }
        let income = params.production(&capital)?;
        Ok(AgentState {
            capital,
            income,
            growth: 0.0,
            strategy,
            zero_income: income == 0.0,
        })
    }

    pub fn sectors(&self) -> usize {
        self.capital.len()
    }
}

//! JSON entry points for every input the CLI accepts. Each parser validates
//! completely, so a value that parses is safe to feed to the numerics.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::circle::{AnalyticPolynomial, CircleGrid, SampledFunction, TrigCoefficients};
use crate::error::{Error, Result};
use crate::hardy::BoundedAnalyticWitness;
use crate::scenarios::{ProviderSpec, ScenarioSpec};

fn parse<T: DeserializeOwned>(input: &str) -> Result<T> {
    Ok(serde_json::from_str(input)?)
}

pub fn parse_sampled(input: &str) -> Result<SampledFunction> {
    parse(input)
}

pub fn parse_polynomial(input: &str) -> Result<AnalyticPolynomial> {
    parse(input)
}

pub fn parse_coefficients(input: &str) -> Result<TrigCoefficients> {
    parse(input)
}

pub fn parse_witness(input: &str) -> Result<BoundedAnalyticWitness> {
    parse(input)
}

pub fn parse_provider(input: &str) -> Result<ProviderSpec> {
    parse(input)
}

pub fn parse_scenario(input: &str) -> Result<ScenarioSpec> {
    let s: ScenarioSpec = parse(input)?;
    s.validate()?;
    Ok(s)
}

/// A boundary function given either by samples or by a finite Fourier window.
#[derive(Clone, Debug, PartialEq)]
pub enum Symbol {
    Samples(SampledFunction),
    Coefficients(TrigCoefficients),
}

impl Symbol {
    /// Samples on `grid`; a sampled symbol must already live on it when a
    /// grid is requested.
    pub fn to_samples(&self, grid: Option<CircleGrid>) -> Result<SampledFunction> {
        match self {
            Symbol::Samples(s) => match grid {
                Some(g) if g != *s.grid() => Err(Error::GridMismatch {
                    left: g.len(),
                    right: s.grid().len(),
                }),
                _ => Ok(s.clone()),
            },
            Symbol::Coefficients(c) => {
                let grid = grid.ok_or_else(|| {
                    Error::invalid("grid", "a coefficient symbol needs an explicit grid size")
                })?;
                c.sample_on(grid)
            }
        }
    }
}

/// `{"n", "values"}` or `{"k", "coeffs"}`.
pub fn parse_symbol(input: &str) -> Result<Symbol> {
    let v: Value = serde_json::from_str(input)?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::invalid("symbol", "expected a JSON object"))?;
    if obj.contains_key("values") {
        Ok(Symbol::Samples(serde_json::from_value(v)?))
    } else if obj.contains_key("coeffs") {
        Ok(Symbol::Coefficients(serde_json::from_value(v)?))
    } else {
        Err(Error::invalid("symbol", "expected `values` (samples) or `coeffs` (Fourier window)"))
    }
}

/// The weak-star limit: a witness (`{"kind": ...}`) or boundary samples.
#[derive(Clone, Debug, PartialEq)]
pub enum Limit {
    Witness(BoundedAnalyticWitness),
    Samples(SampledFunction),
}

impl Limit {
    pub fn to_samples(&self, grid: CircleGrid) -> Result<SampledFunction> {
        match self {
            Limit::Witness(w) => w.boundary_samples(grid),
            Limit::Samples(s) => Symbol::Samples(s.clone()).to_samples(Some(grid)),
        }
    }
}

pub fn parse_limit(input: &str) -> Result<Limit> {
    let v: Value = serde_json::from_str(input)?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::invalid("g", "expected a JSON object"))?;
    if obj.contains_key("kind") {
        Ok(Limit::Witness(serde_json::from_value(v)?))
    } else {
        Ok(Limit::Samples(serde_json::from_value(v)?))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

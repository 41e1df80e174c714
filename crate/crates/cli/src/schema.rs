//! Market files: `{"space": ..., "market": ..., "claims": {...}, "measures": {...}}`.

use std::collections::BTreeMap;

use gooddeal_core::market::{Friction, MarketBody};
use gooddeal_core::space::YoungFunction;
use gooddeal_core::{MarketModel, SampleSpace};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// Largest drift of the probability total that is silently renormalized.
pub const PROB_DRIFT: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketFile {
    pub space: SpaceSpec,
    pub market: MarketSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub claims: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub measures: BTreeMap<String, Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<String>>,
    pub probs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MarketSpec {
    Polytope {
        generators: Vec<Vec<f64>>,
    },
    Illiquid {
        #[serde(rename = "S")]
        underlying: Vec<f64>,
        friction: FrictionSpec,
        /// `null` stands for an unbounded end.
        #[serde(default = "unbounded")]
        alpha: [Option<f64>; 2],
    },
    ScaledBox {
        #[serde(rename = "S")]
        claims: Vec<Vec<f64>>,
        #[serde(rename = "box")]
        bounds: Vec<[Option<f64>; 2]>,
    },
}

fn unbounded() -> [Option<f64>; 2] {
    [None, None]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FrictionSpec {
    Quadratic { c: f64 },
    #[serde(alias = "exponential")]
    Exp { c: f64, k: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum YoungSpec {
    Power { p: f64 },
    #[serde(alias = "exponential")]
    Exp { gamma: f64 },
    Capped,
}

impl YoungSpec {
    pub fn build(self) -> Result<YoungFunction, CliError> {
        let phi = match self {
            YoungSpec::Power { p } => YoungFunction::Power { p },
            YoungSpec::Exp { gamma } => YoungFunction::Exponential { gamma },
            YoungSpec::Capped => YoungFunction::Capped,
        };
        phi.validate()?;
        Ok(phi)
    }
}

fn lower(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NEG_INFINITY)
}

fn upper(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::INFINITY)
}

fn end(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl SpaceSpec {
    pub fn build(&self) -> Result<SampleSpace, CliError> {
        let total: f64 = self.probs.iter().sum();
        if !((total - 1.0).abs() <= PROB_DRIFT) {
            return Err(CliError::Usage(format!("probabilities sum to {total}; drift beyond {PROB_DRIFT} is not renormalized")));
        }
        let probs: Vec<f64> = self.probs.iter().map(|p| p / total).collect();
        let space = match &self.atoms {
            Some(atoms) => SampleSpace::new(atoms.clone(), probs)?,
            None => SampleSpace::from_probs(probs)?,
        };
        Ok(space)
    }
}

impl MarketFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("market file: {e}")))
    }

    pub fn load(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
        Self::parse(&text)
    }

    pub fn build(&self) -> Result<MarketModel, CliError> {
        let space = self.space.build()?;
        let n = space.dim();
        for (name, c) in &self.claims {
            if c.len() != n {
                return Err(CliError::Usage(format!("claim {name} has {} entries, the space has {n} atoms", c.len())));
            }
        }
        Ok(self.market.build(space)?)
    }

    /// Canonical text: sorted keys, two-space indentation, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("market files serialize");
        let mut out = serde_json::to_string_pretty(&value).expect("values serialize");
        out.push('\n');
        out
    }

    pub fn from_model(market: &MarketModel) -> Self {
        let space = market.space();
        MarketFile {
            space: SpaceSpec { atoms: Some(space.atoms().to_vec()), probs: space.probs().to_vec() },
            market: MarketSpec::from_model(market),
            claims: BTreeMap::new(),
            measures: BTreeMap::new(),
        }
    }
}

impl MarketSpec {
    pub fn build(&self, space: SampleSpace) -> gooddeal_core::Result<MarketModel> {
        match self {
            MarketSpec::Polytope { generators } => MarketModel::polytope(space, generators.clone()),
            MarketSpec::Illiquid { underlying, friction, alpha } => {
                let friction = match *friction {
                    FrictionSpec::Quadratic { c } => Friction::Quadratic { c },
                    FrictionSpec::Exp { c, k } => Friction::Exponential { c, k },
                };
                MarketModel::illiquid(space, underlying.clone(), friction, lower(alpha[0]), upper(alpha[1]))
            }
            MarketSpec::ScaledBox { claims, bounds } => {
                let bounds = bounds.iter().map(|[a, b]| (lower(*a), upper(*b))).collect();
                MarketModel::scaled_box(space, claims.clone(), bounds)
            }
        }
    }

    pub fn from_model(market: &MarketModel) -> Self {
        match market.body() {
            MarketBody::Polytope(p) => MarketSpec::Polytope { generators: p.generators.clone() },
            MarketBody::Illiquid(c) => MarketSpec::Illiquid {
                underlying: c.underlying.clone(),
                friction: match c.friction {
                    Friction::Quadratic { c } => FrictionSpec::Quadratic { c },
                    Friction::Exponential { c, k } => FrictionSpec::Exp { c, k },
                },
                alpha: [end(c.alpha_lo), end(c.alpha_hi)],
            },
            MarketBody::ScaledBox(b) => MarketSpec::ScaledBox {
                claims: b.claims.clone(),
                bounds: b.bounds.iter().map(|&(a, b)| [end(a), end(b)]).collect(),
            },
        }
    }
}

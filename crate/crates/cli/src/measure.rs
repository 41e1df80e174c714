//! Risk-measure descriptors: `{"kind": "rho_hat0" | "rho0" | "entropic" |
//! "worst_case" | "shortfall" | "penalty_table" | "indifference" | "conical", ...}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use gooddeal_core::risk::{
    restrict_conical, Entropic, IndifferencePrice, PenaltyTable, Restriction, RhoHat0, RiskMeasure, Shortfall, Superhedging,
};
use gooddeal_core::{Density, MarketModel};
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;
use crate::schema::YoungSpec;

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureSpec {
    RhoHat0,
    #[serde(alias = "superhedging")]
    Rho0,
    Entropic {
        gamma: f64,
    },
    WorstCase {
        q: Vec<f64>,
    },
    Shortfall {
        #[serde(default = "quadratic_loss")]
        loss: YoungSpec,
        delta: f64,
        #[serde(default)]
        normalized: bool,
    },
    PenaltyTable {
        #[serde(default)]
        name: Option<String>,
        entries: Vec<TableEntry>,
    },
    Indifference {
        eta: Box<MeasureSpec>,
    },
    Conical {
        base: Box<MeasureSpec>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub q: Vec<f64>,
    pub penalty: f64,
}

fn quadratic_loss() -> YoungSpec {
    YoungSpec::Power { p: 2.0 }
}

fn numbers(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("not a number: {t:?}"))))
        .collect()
}

impl MeasureSpec {
    /// Inline JSON, a shorthand (`rho_hat0`, `rho0`, `entropic:G`,
    /// `worst_case:q1,q2,..`, `shortfall:DELTA`) or a name from the market file.
    pub fn resolve(text: &str, named: &BTreeMap<String, Value>) -> Result<Self, CliError> {
        let text = text.trim();
        if text.starts_with('{') {
            return serde_json::from_str(text).map_err(|e| CliError::Usage(format!("measure descriptor: {e}")));
        }
        if let Some(v) = named.get(text) {
            return serde_json::from_value(v.clone()).map_err(|e| CliError::Usage(format!("measure {text}: {e}")));
        }
        let (head, arg) = match text.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (text, None),
        };
        let spec = match (head, arg) {
            ("rho_hat0", None) => MeasureSpec::RhoHat0,
            ("rho0" | "superhedging", None) => MeasureSpec::Rho0,
            ("entropic", Some(a)) => MeasureSpec::Entropic { gamma: numbers(a)?[0] },
            ("worst_case", Some(a)) => MeasureSpec::WorstCase { q: numbers(a)? },
            ("shortfall", Some(a)) => MeasureSpec::Shortfall { loss: quadratic_loss(), delta: numbers(a)?[0], normalized: false },
            _ => return Err(CliError::Usage(format!("unknown measure {text:?}"))),
        };
        Ok(spec)
    }

    pub fn build(&self, market: &MarketModel) -> Result<Arc<dyn RiskMeasure>, CliError> {
        let n = market.dim();
        let check = |q: &[f64]| {
            if q.len() == n {
                Ok(())
            } else {
                Err(CliError::Usage(format!("density has {} entries, the space has {n} atoms", q.len())))
            }
        };
        Ok(match self {
            MeasureSpec::RhoHat0 => Arc::new(RhoHat0::new(market.clone())),
            MeasureSpec::Rho0 => Arc::new(Superhedging::new(market.clone())),
            MeasureSpec::Entropic { gamma } => Arc::new(Entropic::new(market.space().clone(), *gamma)?),
            MeasureSpec::WorstCase { q } => {
                check(q)?;
                Arc::new(PenaltyTable::worst_case(Density::new(q.clone())?))
            }
            MeasureSpec::Shortfall { loss, delta, normalized } => {
                let phi = loss.build()?;
                if *normalized {
                    Arc::new(Shortfall::normalized(market.clone(), phi, *delta)?)
                } else {
                    Arc::new(Shortfall::new(market.clone(), phi, *delta)?)
                }
            }
            MeasureSpec::PenaltyTable { name, entries } => {
                let mut rows = Vec::with_capacity(entries.len());
                for e in entries {
                    check(&e.q)?;
                    rows.push((Density::new(e.q.clone())?, e.penalty));
                }
                Arc::new(PenaltyTable::named(name.clone().unwrap_or_else(|| String::from("penalty_table")), rows)?)
            }
            MeasureSpec::Indifference { eta } => Arc::new(IndifferencePrice::new(eta.build(market)?, market.clone())?),
            MeasureSpec::Conical { base } => match restrict_conical(base.build(market)?, market)? {
                Restriction::Ready(r) => Arc::new(r),
                Restriction::EmptyZeroSet => {
                    return Err(CliError::Numeric(String::from("the zero set of sigma_M is empty; no conical restriction")))
                }
                Restriction::OpaquePenalty => {
                    return Err(CliError::Usage(String::from("conical restriction needs a measure with a dual form")))
                }
            },
        })
    }
}

//! Closed-form measures: finite penalty tables (including worst-case
//! expectations) and the entropic measure.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{DualForm, RiskMeasure};
use crate::error::{Error, Result};
use crate::math::{self, dot};
use crate::solvers::{LinearProgram, Sense, SolveResult};
use crate::space::{Density, SampleSpace};
use crate::value::Extended;

/// `rho(x) = max_i { E_{q_i}[-x] - a_i }`.
///
/// The exact penalty is the convex envelope of the table, `+inf` off the
/// convex hull of the listed densities.
#[derive(Clone, Debug, PartialEq)]
pub struct PenaltyTable {
    name: String,
    entries: Vec<(Density, f64)>,
}

impl PenaltyTable {
    pub fn new(entries: Vec<(Density, f64)>) -> Result<Self> {
        Self::named("penalty_table", entries)
    }

    pub fn named(name: impl Into<String>, entries: Vec<(Density, f64)>) -> Result<Self> {
        let Some(first) = entries.first() else {
            return Err(Error::invalid("penalty table needs at least one entry"));
        };
        let n = first.0.dim();
        for (q, a) in &entries {
            Error::check_dim(n, q.dim())?;
            if !a.is_finite() {
                return Err(Error::NonFinite("penalty table entry"));
            }
        }
        Ok(PenaltyTable { name: name.into(), entries })
    }

    /// `rho_Q(x) = E_Q[-x]`.
    pub fn worst_case(q: Density) -> Self {
        PenaltyTable { name: String::from("worst_case"), entries: vec![(q, 0.0)] }
    }

    pub fn entries(&self) -> &[(Density, f64)] {
        &self.entries
    }

    fn best_entry(&self, x: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, (q, a)) in self.entries.iter().enumerate() {
            let v = -dot(q, x) - a;
            if v > best.1 {
                best = (i, v);
            }
        }
        best
    }

    /// Convex envelope `min { sum l_i a_i : sum l_i q_i = q, l >= 0 }`.
    pub fn envelope(&self, q: &[f64]) -> Result<Extended> {
        Error::check_dim(self.dim(), q.len())?;
        let m = self.entries.len();
        let mut lp = LinearProgram::minimize(self.entries.iter().map(|e| e.1).collect());
        for k in 0..q.len() {
            lp.constrain(self.entries.iter().map(|e| e.0[k]).collect(), Sense::Eq, q[k]);
        }
        lp.constrain(vec![1.0; m], Sense::Eq, 1.0);
        match lp.solve()? {
            SolveResult::Optimal(s) => Ok(Extended::Finite(s.value)),
            SolveResult::Infeasible => Ok(Extended::PosInf),
            SolveResult::Unbounded => Err(Error::invalid("penalty envelope LP unbounded")),
        }
    }
}

impl RiskMeasure for PenaltyTable {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn dim(&self) -> usize {
        self.entries[0].0.dim()
    }

    fn evaluate(&self, x: &[f64]) -> Result<Extended> {
        Error::check_dim(self.dim(), x.len())?;
        Ok(Extended::Finite(self.best_entry(x).1))
    }

    fn exact_penalty(&self, q: &[f64]) -> Option<Result<Extended>> {
        Some(self.envelope(q))
    }

    fn dual_form(&self) -> DualForm<'_> {
        DualForm::Table(&self.entries)
    }

    fn supporting_density(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        Some(Error::check_dim(self.dim(), x.len()).map(|_| self.entries[self.best_entry(x).0].0.to_vec()))
    }
}

/// `rho(x) = (1/gamma) log E_P[exp(-gamma x)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Entropic {
    space: SampleSpace,
    gamma: f64,
}

impl Entropic {
    pub fn new(space: SampleSpace, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::invalid("entropic measure needs gamma > 0"));
        }
        Ok(Entropic { space, gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    fn shifted_weights(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let shift = x.iter().map(|v| -self.gamma * v).fold(f64::NEG_INFINITY, f64::max);
        let w = self.space.probs().iter().zip(x).map(|(p, v)| p * math::exp(-self.gamma * v - shift)).collect();
        (shift, w)
    }
}

impl RiskMeasure for Entropic {
    fn name(&self) -> String {
        format!("entropic(gamma={})", self.gamma)
    }

    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn evaluate(&self, x: &[f64]) -> Result<Extended> {
        Error::check_dim(self.dim(), x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("claim"));
        }
        let (shift, w) = self.shifted_weights(x);
        let total: f64 = w.iter().sum();
        Ok(Extended::Finite((shift + math::ln(total)) / self.gamma))
    }

    /// The Gibbs density `q ~ p exp(-gamma x)`.
    fn supporting_density(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        if let Err(e) = Error::check_dim(self.dim(), x.len()) {
            return Some(Err(e));
        }
        let (_, mut w) = self.shifted_weights(x);
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= total);
        Some(Ok(w))
    }
}

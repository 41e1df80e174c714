//! Kelley's cutting-plane method for concave maximization over a bounded polytope.
//!
//! The oracle either returns a value with a supergradient or reports that the
//! query point lies outside the effective domain, together with a half-space
//! that separates it. Each iteration solves an LP over the accumulated cuts.
//! The best evaluated value is a certified lower bound and the LP optimum an
//! upper bound; iteration stops once they are within `tol`.

use alloc::vec;
use alloc::vec::Vec;

use super::lp::{LinearProgram, Sense, SolveResult};
use crate::error::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 2_000;

/// `normal . q <= bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub bound: f64,
}

impl HalfSpace {
    pub fn new(normal: Vec<f64>, bound: f64) -> Self {
        HalfSpace { normal, bound }
    }

    pub fn slack(&self, q: &[f64]) -> f64 {
        self.bound - crate::math::dot(&self.normal, q)
    }
}

pub enum Oracle {
    Value { value: f64, supergradient: Vec<f64> },
    Outside(HalfSpace),
}

/// A bounded polytope: finite variable bounds, equalities and half-spaces.
#[derive(Clone, Debug)]
pub struct Domain {
    pub bounds: Vec<(f64, f64)>,
    pub equalities: Vec<(Vec<f64>, f64)>,
    pub halfspaces: Vec<HalfSpace>,
}

impl Domain {
    /// The probability simplex in `R^n`.
    pub fn simplex(n: usize) -> Self {
        Domain { bounds: vec![(0.0, 1.0); n], equalities: vec![(vec![1.0; n], 1.0)], halfspaces: Vec::new() }
    }

    pub fn boxed(bounds: Vec<(f64, f64)>) -> Self {
        Domain { bounds, equalities: Vec::new(), halfspaces: Vec::new() }
    }

    pub fn with_halfspaces(mut self, extra: impl IntoIterator<Item = HalfSpace>) -> Self {
        self.halfspaces.extend(extra);
        self
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    fn contains(&self, q: &[f64]) -> bool {
        self.bounds.iter().zip(q).all(|(&(lo, hi), &v)| v >= lo - 1e-12 && v <= hi + 1e-12)
            && self.equalities.iter().all(|(a, b)| (crate::math::dot(a, q) - b).abs() <= 1e-12)
            && self.halfspaces.iter().all(|h| h.slack(q) >= -1e-12)
    }

    // Centre of the bounds, or the uniform density for the simplex.
    fn natural_start(&self) -> Vec<f64> {
        if !self.equalities.is_empty() && self.bounds.iter().all(|&b| b == (0.0, 1.0)) {
            let n = self.dim();
            return vec![1.0 / n as f64; n];
        }
        self.bounds.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    fn base_lp(&self, objective: Vec<f64>, extra: &[HalfSpace]) -> LinearProgram {
        let n = self.dim();
        let width = objective.len();
        let mut lp = LinearProgram::maximize(objective);
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            lp.bound(j, lo, hi);
        }
        let pad = |v: &[f64]| {
            let mut row = vec![0.0; width];
            row[..n].copy_from_slice(v);
            row
        };
        for (a, b) in &self.equalities {
            lp.constrain(pad(a), Sense::Eq, *b);
        }
        for h in self.halfspaces.iter().chain(extra) {
            lp.constrain(pad(&h.normal), Sense::Le, h.bound);
        }
        lp
    }
}

#[derive(Clone, Debug)]
pub struct ConcaveMax {
    pub argmax: Vec<f64>,
    pub value: f64,
    pub upper_bound: f64,
    pub iterations: usize,
}

impl ConcaveMax {
    pub fn gap(&self) -> f64 {
        self.upper_bound - self.value
    }
}

#[derive(Clone, Debug)]
pub enum ConcaveOutcome {
    Solved(ConcaveMax),
    /// The oracle's domain does not meet the polytope.
    Empty,
}

pub fn maximize_concave_simplex<F>(n: usize, h: F, tol: f64) -> Result<ConcaveOutcome>
where
    F: FnMut(&[f64]) -> Oracle,
{
    maximize_concave(&Domain::simplex(n), h, tol, DEFAULT_MAX_ITER)
}

pub fn maximize_concave<F>(domain: &Domain, mut h: F, tol: f64, max_iter: usize) -> Result<ConcaveOutcome>
where
    F: FnMut(&[f64]) -> Oracle,
{
    let n = domain.dim();
    if n == 0 || domain.bounds.iter().any(|&(lo, hi)| !(lo.is_finite() && hi.is_finite()) || lo > hi) {
        return Err(Error::invalid("cutting-plane domain must be a nonempty bounded box"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let mut feas: Vec<HalfSpace> = Vec::new();
    // (supergradient, value - g . q_i)  meaning  t <= g . q + offset
    let mut cuts: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let start = domain.natural_start();
    let mut q = if domain.contains(&start) {
        start
    } else {
        match feasible_point(domain, &feas)? {
            Some(p) => p,
            None => return Ok(ConcaveOutcome::Empty),
        }
    };
    let mut upper = f64::INFINITY;
    for iter in 0..max_iter {
        match h(&q) {
            Oracle::Value { value, supergradient } => {
                Error::check_dim(n, supergradient.len())?;
                if !value.is_finite() || supergradient.iter().any(|g| !g.is_finite()) {
                    return Err(Error::NonFinite("cutting-plane oracle"));
                }
                let offset = value - crate::math::dot(&supergradient, &q);
                cuts.push((supergradient, offset));
                if best.as_ref().map_or(true, |b| value > b.1) {
                    best = Some((q.clone(), value));
                }
            }
            Oracle::Outside(cut) => {
                Error::check_dim(n, cut.normal.len())?;
                feas.push(cut);
            }
        }
        if cuts.is_empty() {
            match feasible_point(domain, &feas)? {
                Some(p) => q = p,
                None => return Ok(ConcaveOutcome::Empty),
            }
            continue;
        }
        let mut objective = vec![0.0; n + 1];
        objective[n] = 1.0;
        let mut lp = domain.base_lp(objective, &feas);
        lp.free(n);
        for (g, offset) in &cuts {
            let mut row: Vec<f64> = g.iter().map(|v| -v).collect();
            row.push(1.0);
            lp.constrain(row, Sense::Le, *offset);
        }
        match lp.solve()? {
            SolveResult::Optimal(sol) => {
                upper = sol.value;
                q = sol.x[..n].to_vec();
            }
            SolveResult::Infeasible => {
                if best.is_none() {
                    return Ok(ConcaveOutcome::Empty);
                }
                break;
            }
            SolveResult::Unbounded => return Err(Error::invalid("cutting-plane LP unbounded on a bounded domain")),
        }
        let (_, value) = best.as_ref().expect("a value cut exists");
        if upper - value <= tol {
            let (argmax, value) = best.take().expect("checked above");
            return Ok(ConcaveOutcome::Solved(ConcaveMax { argmax, value, upper_bound: upper, iterations: iter + 1 }));
        }
    }
    match best {
        Some((argmax, value)) => Ok(ConcaveOutcome::Solved(ConcaveMax {
            argmax,
            value,
            upper_bound: upper.max(value),
            iterations: max_iter,
        })),
        None => Ok(ConcaveOutcome::Empty),
    }
}

fn feasible_point(domain: &Domain, feas: &[HalfSpace]) -> Result<Option<Vec<f64>>> {
    let lp = domain.base_lp(vec![0.0; domain.dim()], feas);
    Ok(lp.solve()?.optimal().map(|s| s.x))
}

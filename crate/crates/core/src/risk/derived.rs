//! Measures built from a market: shortfall, acceptance-set valuations, risk
//! indifference prices and the conical restriction.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::inner::{golden, minimize_over_market, InnerMin};
use super::superhedge::dual_sup;
use super::{DualForm, RiskMeasure};
use crate::error::{Error, Result};
use crate::market::{MarketBody, MarketModel};
use crate::math::dot;
use crate::solvers::{HalfSpace, LinearProgram, Sense, SolveResult};
use crate::space::YoungFunction;
use crate::value::Extended;

const INNER_TOL: f64 = 1e-11;
const SEARCH_LIMIT: f64 = 1_125_899_906_842_624.0; // 2^50

fn finite_value(v: Extended, what: &'static str) -> Result<f64> {
    v.finite().ok_or(Error::NonFinite(what))
}

fn shifted(x: &[f64], p: &[f64], r: f64) -> Vec<f64> {
    x.iter().zip(p).map(|(a, b)| a + b + r).collect()
}

/// `inf_{m in M} eta(m + x)`.
pub fn inner_infimum(eta: &dyn RiskMeasure, market: &MarketModel, x: &[f64]) -> Result<Extended> {
    Ok(match inner(eta, market, x)? {
        InnerMin::Attained { value, .. } => Extended::Finite(value),
        InnerMin::Unbounded => Extended::NegInf,
    })
}

fn inner(eta: &dyn RiskMeasure, market: &MarketModel, x: &[f64]) -> Result<InnerMin> {
    Error::check_dim(market.dim(), x.len())?;
    Error::check_dim(eta.dim(), x.len())?;
    let mut f = |p: &[f64]| -> Result<(f64, Option<Vec<f64>>)> {
        let y = shifted(x, p, 0.0);
        let v = finite_value(eta.evaluate(&y)?, "inner objective")?;
        let g = match eta.supporting_density(&y) {
            Some(q) => Some(q?.iter().map(|v| -v).collect()),
            None => None,
        };
        Ok((v, g))
    };
    minimize_over_market(market, &mut f, INNER_TOL)
}

/// Smallest `r` with `feasible(r)`, for `feasible` monotone in `r`.
fn bisect_feasible(mut feasible: impl FnMut(f64) -> Result<bool>, start: f64) -> Result<Extended> {
    let (mut lo, mut hi);
    if feasible(start)? {
        hi = start;
        let mut step = 1.0;
        loop {
            lo = hi - step;
            if !feasible(lo)? {
                break;
            }
            hi = lo;
            step *= 2.0;
            if step > SEARCH_LIMIT {
                return Ok(Extended::NegInf);
            }
        }
    } else {
        lo = start;
        let mut step = 1.0;
        loop {
            hi = lo + step;
            if feasible(hi)? {
                break;
            }
            lo = hi;
            step *= 2.0;
            if step > SEARCH_LIMIT {
                return Ok(Extended::PosInf);
            }
        }
    }
    for _ in 0..400 {
        if hi - lo <= 1e-13 * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Extended::Finite(hi))
}

/// `rho_l(y) = inf{r : E_P[l(r + m + y)] <= delta for some m in M}` with
/// `l(a) = Phi(min(0, a))`, optionally shifted so that it vanishes at 0.
#[derive(Clone, Debug)]
pub struct Shortfall {
    market: MarketModel,
    loss: YoungFunction,
    threshold: f64,
    offset: f64,
    normalized: bool,
}

impl Shortfall {
    pub fn new(market: MarketModel, loss: YoungFunction, threshold: f64) -> Result<Self> {
        loss.validate()?;
        if matches!(loss, YoungFunction::Capped) {
            return Err(Error::invalid("shortfall needs a finite loss function"));
        }
        if !(threshold > 0.0 && threshold.is_finite()) {
            return Err(Error::invalid("shortfall threshold must be positive"));
        }
        Ok(Shortfall { market, loss, threshold, offset: 0.0, normalized: false })
    }

    /// `rho_l - rho_l(0)`.
    pub fn normalized(market: MarketModel, loss: YoungFunction, threshold: f64) -> Result<Self> {
        let mut s = Self::new(market, loss, threshold)?;
        let n = s.market.dim();
        s.offset = finite_value(s.raw(&vec![0.0; n])?.0, "shortfall at zero")?;
        s.normalized = true;
        Ok(s)
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    fn expected_loss(&self, r: f64, y: &[f64]) -> Result<(f64, Vec<f64>)> {
        let probs = self.market.space().probs();
        let loss = self.loss;
        let mut f = |p: &[f64]| -> Result<(f64, Option<Vec<f64>>)> {
            let mut v = 0.0;
            let mut g = Vec::with_capacity(p.len());
            for k in 0..p.len() {
                let a = (r + p[k] + y[k]).min(0.0);
                v += probs[k] * loss.eval(a);
                g.push(if a < 0.0 { probs[k] * loss.derivative(a) } else { 0.0 });
            }
            Ok((v, Some(g)))
        };
        match minimize_over_market(&self.market, &mut f, INNER_TOL * self.threshold)? {
            InnerMin::Attained { value, element, .. } => Ok((value, element)),
            InnerMin::Unbounded => Ok((0.0, vec![0.0; y.len()])),
        }
    }

    fn raw(&self, y: &[f64]) -> Result<(Extended, Option<Vec<f64>>)> {
        Error::check_dim(self.market.dim(), y.len())?;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("claim"));
        }
        let start = y.iter().map(|v| -v).fold(0.0, f64::max);
        let value = bisect_feasible(|r| Ok(self.expected_loss(r, y)?.0 <= self.threshold), start)?;
        let element = match value {
            Extended::Finite(r) => Some(self.expected_loss(r, y)?.1),
            _ => None,
        };
        Ok((value, element))
    }
}

impl RiskMeasure for Shortfall {
    fn name(&self) -> String {
        if self.normalized { String::from("shortfall_normalized") } else { String::from("shortfall") }
    }

    fn dim(&self) -> usize {
        self.market.dim()
    }

    fn evaluate(&self, y: &[f64]) -> Result<Extended> {
        Ok(match self.raw(y)?.0 {
            Extended::Finite(v) => Extended::Finite(v - self.offset),
            other => other,
        })
    }

    /// Marginal loss weights at the optimal `(r, m)`.
    fn supporting_density(&self, y: &[f64]) -> Option<Result<Vec<f64>>> {
        let (value, element) = match self.raw(y) {
            Ok(v) => v,
            Err(e) => return Some(Err(e)),
        };
        let (r, p) = (value.finite()?, element?);
        let probs = self.market.space().probs();
        let w: Vec<f64> = (0..y.len())
            .map(|k| {
                let a = (r + p[k] + y[k]).min(0.0);
                if a < 0.0 { -probs[k] * self.loss.derivative(a) } else { 0.0 }
            })
            .collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 { Some(Ok(w.iter().map(|v| v / total).collect())) } else { None }
    }
}

/// An acceptance set `A` with `0 in A` and `A + L_+ subset A`.
#[derive(Clone)]
pub enum AcceptanceSet {
    /// `{y : eta(y) <= 0}`.
    Sublevel(Arc<dyn RiskMeasure>),
    /// `{y : a_i . y <= b_i}` with every `a_i <= 0` componentwise.
    Polyhedral(Vec<HalfSpace>),
}

impl AcceptanceSet {
    /// `A = L_+`.
    pub fn nonnegative(n: usize) -> Self {
        AcceptanceSet::Polyhedral(
            (0..n)
                .map(|k| {
                    let mut a = vec![0.0; n];
                    a[k] = -1.0;
                    HalfSpace::new(a, 0.0)
                })
                .collect(),
        )
    }

    pub fn polyhedral(rows: Vec<HalfSpace>) -> Result<Self> {
        for h in &rows {
            if h.normal.iter().any(|a| *a > 0.0) || !(h.bound >= 0.0) {
                return Err(Error::invalid("polyhedral acceptance rows need a <= 0 and b >= 0"));
            }
        }
        Ok(AcceptanceSet::Polyhedral(rows))
    }
}

/// `inf{r : r + m + x in A for some m in M}`.
pub fn acceptance_set_measure(set: &AcceptanceSet, market: &MarketModel, x: &[f64]) -> Result<Extended> {
    let n = market.dim();
    Error::check_dim(n, x.len())?;
    match set {
        AcceptanceSet::Sublevel(eta) => bisect_feasible(
            |r| {
                let y: Vec<f64> = x.iter().map(|v| v + r).collect();
                Ok(inner_infimum(eta.as_ref(), market, &y)?.at_most(0.0))
            },
            0.0,
        ),
        AcceptanceSet::Polyhedral(rows) => {
            for h in rows {
                Error::check_dim(n, h.normal.len())?;
            }
            polyhedral_acceptance(rows, market, x)
        }
    }
}

fn polyhedral_acceptance(rows: &[HalfSpace], market: &MarketModel, x: &[f64]) -> Result<Extended> {
    let lp_result = |gens: &[Vec<f64>], bounds: Option<&[(f64, f64)]>| -> Result<Extended> {
        // variables: weights on gens, then r
        let j = gens.len();
        let mut obj = vec![0.0; j + 1];
        obj[j] = 1.0;
        let mut lp = LinearProgram::minimize(obj);
        lp.free(j);
        match bounds {
            Some(b) => {
                for (i, &(lo, hi)) in b.iter().enumerate() {
                    lp.bound(i, lo, hi);
                }
            }
            None if j > 0 => {
                let mut row = vec![1.0; j];
                row.push(0.0);
                lp.constrain(row, Sense::Le, 1.0);
            }
            None => {}
        }
        for h in rows {
            let mut row: Vec<f64> = gens.iter().map(|m| dot(&h.normal, m)).collect();
            row.push(h.normal.iter().sum());
            lp.constrain(row, Sense::Le, h.bound - dot(&h.normal, x));
        }
        Ok(match lp.solve()? {
            SolveResult::Optimal(s) => Extended::Finite(s.value),
            SolveResult::Unbounded => Extended::NegInf,
            SolveResult::Infeasible => Extended::PosInf,
        })
    };
    match market.body() {
        MarketBody::Polytope(p) => lp_result(&p.generators, None),
        MarketBody::ScaledBox(b) => lp_result(&b.claims, Some(&b.bounds)),
        MarketBody::Illiquid(c) => {
            let (lo, hi) = c.effective_range();
            bisect_feasible(
                |r| {
                    let (_, slack) = golden(
                        |a| {
                            let y = shifted(x, &c.element(a), r);
                            Ok(rows.iter().map(|h| -h.slack(&y)).fold(f64::NEG_INFINITY, f64::max))
                        },
                        lo,
                        hi,
                        1e-12,
                    )?;
                    Ok(slack <= 1e-12)
                },
                0.0,
            )
        }
    }
}

/// `I(eta)(x) = inf_m eta(m + x) - inf_m eta(m)`.
#[derive(Clone)]
pub struct IndifferencePrice {
    eta: Arc<dyn RiskMeasure>,
    market: MarketModel,
    base: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndifferenceOutcome {
    pub price: Extended,
    pub inner_inf: Extended,
    pub inner_inf_at_zero: Extended,
}

/// All three numbers of the indifference price; a `-inf` inner infimum at zero
/// marks a price functional that is not proper.
pub fn indifference_price(eta: &dyn RiskMeasure, market: &MarketModel, x: &[f64]) -> Result<IndifferenceOutcome> {
    let zero = vec![0.0; market.dim()];
    let inner_inf_at_zero = inner_infimum(eta, market, &zero)?;
    let inner_inf = inner_infimum(eta, market, x)?;
    let price = match (inner_inf, inner_inf_at_zero) {
        (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a - b),
        (Extended::NegInf, Extended::Finite(_)) => Extended::NegInf,
        _ => Extended::NegInf,
    };
    Ok(IndifferenceOutcome { price, inner_inf, inner_inf_at_zero })
}

impl IndifferencePrice {
    pub fn new(eta: Arc<dyn RiskMeasure>, market: MarketModel) -> Result<Self> {
        Error::check_dim(market.dim(), eta.dim())?;
        let zero = vec![0.0; market.dim()];
        let base = match inner_infimum(eta.as_ref(), &market, &zero)? {
            Extended::Finite(v) => v,
            _ => return Err(Error::invalid("inf over M of eta is not finite; the indifference price is not proper")),
        };
        Ok(IndifferencePrice { eta, market, base })
    }

    pub fn base(&self) -> f64 {
        self.base
    }
}

impl RiskMeasure for IndifferencePrice {
    fn name(&self) -> String {
        format!("indifference({})", self.eta.name())
    }

    fn dim(&self) -> usize {
        self.market.dim()
    }

    fn evaluate(&self, x: &[f64]) -> Result<Extended> {
        Ok(match inner_infimum(self.eta.as_ref(), &self.market, x)? {
            Extended::Finite(v) => Extended::Finite(v - self.base),
            other => other,
        })
    }

    fn supporting_density(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        match inner(self.eta.as_ref(), &self.market, x) {
            Ok(InnerMin::Attained { element, .. }) => self.eta.supporting_density(&shifted(x, &element, 0.0)),
            Ok(InnerMin::Unbounded) => None,
            Err(e) => Some(Err(e)),
        }
    }
}

/// `rho'(x) = sup_{q in Q_0} { E_q[-x] - rho^*(q) }` with `Q_0` the zero set of `sigma_M`.
#[derive(Clone)]
pub struct ConicalRestriction {
    base: Arc<dyn RiskMeasure>,
    zero_set: Vec<HalfSpace>,
}

pub enum Restriction {
    Ready(ConicalRestriction),
    /// `Q_0` is empty, or misses the domain of the penalty.
    EmptyZeroSet,
    /// The measure has no dual form to restrict.
    OpaquePenalty,
}

pub fn restrict_conical(rho: Arc<dyn RiskMeasure>, market: &MarketModel) -> Result<Restriction> {
    Error::check_dim(market.dim(), rho.dim())?;
    if matches!(rho.dual_form(), DualForm::Opaque) {
        return Ok(Restriction::OpaquePenalty);
    }
    let zero_set = market.zero_set_halfspaces();
    let r = ConicalRestriction { base: rho, zero_set };
    let zero = vec![0.0; market.dim()];
    match r.restricted_sup(&zero)?.0 {
        Extended::NegInf => Ok(Restriction::EmptyZeroSet),
        _ => Ok(Restriction::Ready(r)),
    }
}

impl ConicalRestriction {
    pub fn zero_set(&self) -> &[HalfSpace] {
        &self.zero_set
    }

    fn restricted_sup(&self, x: &[f64]) -> Result<(Extended, Option<Vec<f64>>)> {
        Error::check_dim(self.base.dim(), x.len())?;
        match self.base.dual_form() {
            DualForm::Table(entries) => {
                let mut lp = LinearProgram::maximize(entries.iter().map(|(q, a)| -dot(q, x) - a).collect());
                lp.constrain(vec![1.0; entries.len()], Sense::Eq, 1.0);
                for h in &self.zero_set {
                    lp.constrain(entries.iter().map(|(q, _)| dot(&h.normal, q)).collect(), Sense::Le, h.bound);
                }
                match lp.solve()? {
                    SolveResult::Optimal(s) => {
                        let mut q = vec![0.0; x.len()];
                        for ((d, _), l) in entries.iter().zip(&s.x) {
                            for (o, v) in q.iter_mut().zip(d.iter()) {
                                *o += l * v;
                            }
                        }
                        Ok((Extended::Finite(s.value), Some(q)))
                    }
                    SolveResult::Infeasible => Ok((Extended::NegInf, None)),
                    SolveResult::Unbounded => Err(Error::invalid("restricted table LP unbounded")),
                }
            }
            DualForm::Support(m) => {
                let d = dual_sup(m, x, &self.zero_set)?;
                Ok((d.value, d.density))
            }
            DualForm::Opaque => Err(Error::invalid("measure has no dual form")),
        }
    }

    fn in_zero_set(&self, q: &[f64]) -> bool {
        self.zero_set.iter().all(|h| h.slack(q) >= -1e-9)
    }
}

impl RiskMeasure for ConicalRestriction {
    fn name(&self) -> String {
        format!("conical({})", self.base.name())
    }

    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn evaluate(&self, x: &[f64]) -> Result<Extended> {
        Ok(self.restricted_sup(x)?.0)
    }

    fn exact_penalty(&self, q: &[f64]) -> Option<Result<Extended>> {
        if self.in_zero_set(q) { self.base.exact_penalty(q) } else { Some(Ok(Extended::PosInf)) }
    }

    fn supporting_density(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        match self.restricted_sup(x) {
            Ok((_, q)) => q.map(Ok),
            Err(e) => Some(Err(e)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::Friction;
    use crate::risk::{rho_hat0, Entropic, PenaltyTable, RhoHat0};
    use crate::space::{Density, SampleSpace};

    fn half() -> SampleSpace {
        SampleSpace::from_probs(vec![0.5, 0.5]).unwrap()
    }

    fn two_state() -> MarketModel {
        MarketModel::illiquid(half(), vec![1.0, -1.0], Friction::Quadratic { c: 1.0 }, f64::NEG_INFINITY, f64::INFINITY)
            .unwrap()
    }

    fn fin(v: Extended) -> f64 {
        v.finite().expect("finite")
    }

    #[test]
    fn shortfall_on_nonpositive_market() {
        let m = MarketModel::nonpositive(half());
        let s = Shortfall::new(m, YoungFunction::Power { p: 2.0 }, 0.04).unwrap();
        assert!((fin(s.evaluate(&[0.0, 0.0]).unwrap()) + 0.2).abs() < 1e-9);
        // cash shift is exact
        assert!((fin(s.evaluate(&[0.3, 0.3]).unwrap()) + 0.5).abs() < 1e-9);
    }

    #[test]
    fn shortfall_on_larger_market_is_cheaper() {
        let s = Shortfall::new(two_state(), YoungFunction::Power { p: 2.0 }, 0.04).unwrap();
        let v = fin(s.evaluate(&[0.0, 0.0]).unwrap());
        assert!(v <= -0.2 + 1e-12);
        // nested grid over (r, alpha)
        let mut grid = f64::INFINITY;
        for i in 0..=2000 {
            let a = -0.5 + i as f64 * 5e-4;
            let p = [a - a * a, -a - a * a];
            // for fixed alpha the smallest r solves a quadratic; scan it
            let (mut lo, mut hi) = (-2.0, 2.0);
            for _ in 0..100 {
                let r = 0.5 * (lo + hi);
                let l: f64 = p.iter().map(|pk| 0.5 * (r + pk).min(0.0).powi(2)).sum();
                if l <= 0.04 { hi = r } else { lo = r }
            }
            grid = grid.min(hi);
        }
        assert!((v - grid).abs() < 1e-6, "{v} vs {grid}");
    }

    #[test]
    fn shortfall_rejects_bad_threshold() {
        assert!(Shortfall::new(two_state(), YoungFunction::Power { p: 2.0 }, 0.0).is_err());
    }

    #[test]
    fn acceptance_of_entropic_sublevel_on_nonpositive_market() {
        let ent: Arc<dyn RiskMeasure> = Arc::new(Entropic::new(half(), 1.0).unwrap());
        let m = MarketModel::nonpositive(half());
        let x = [0.4, -1.3];
        let v = fin(acceptance_set_measure(&AcceptanceSet::Sublevel(ent.clone()), &m, &x).unwrap());
        assert!((v - fin(ent.evaluate(&x).unwrap())).abs() < 1e-6);
    }

    #[test]
    fn acceptance_of_nonnegative_claims() {
        let m = MarketModel::nonpositive(half());
        let v = acceptance_set_measure(&AcceptanceSet::nonnegative(2), &m, &[-1.0, -2.0]).unwrap();
        assert!((fin(v) - 2.0).abs() < 1e-12);
        let v = acceptance_set_measure(&AcceptanceSet::nonnegative(2), &two_state(), &[-0.5, 0.0]).unwrap();
        assert!((fin(v) - 0.3125).abs() < 1e-9);
    }

    // Trading twice along the curve is cheaper than trading once, so the
    // sublevel set of rho_hat0 gives 9/32 rather than 5/16.
    #[test]
    fn acceptance_of_rho_hat0_sublevel() {
        let m = two_state();
        let eta: Arc<dyn RiskMeasure> = Arc::new(RhoHat0::new(m.clone()));
        let v = fin(acceptance_set_measure(&AcceptanceSet::Sublevel(eta), &m, &[-0.5, 0.0]).unwrap());
        let mut grid = f64::INFINITY;
        for i in 0..=400 {
            for j in 0..=400 {
                let (a, b) = (i as f64 / 800.0, j as f64 / 800.0);
                let cost = a * a + b * b;
                grid = grid.min((cost - a - b + 0.5).max(cost + a + b));
            }
        }
        assert!((v - 9.0 / 32.0).abs() < 1e-9);
        assert!((grid - 9.0 / 32.0).abs() < 1e-12);
    }

    #[test]
    fn indifference_on_nonpositive_market_is_shifted_eta() {
        let ent: Arc<dyn RiskMeasure> = Arc::new(Entropic::new(half(), 1.0).unwrap());
        let m = MarketModel::nonpositive(half());
        let out = indifference_price(ent.as_ref(), &m, &[1.0, -1.0]).unwrap();
        assert!((fin(out.price) - libm::log(libm::cosh(1.0))).abs() < 1e-12);
        assert_eq!(out.inner_inf_at_zero, Extended::Finite(0.0));
    }

    #[test]
    fn entropic_inner_infimum_is_zero_when_expectations_are_nonpositive() {
        let space = SampleSpace::from_probs(vec![0.4, 0.6]).unwrap();
        let ent = Entropic::new(space.clone(), 1.0).unwrap();
        let m = MarketModel::scaled_box(space.clone(), vec![vec![1.0, -1.0]], vec![(0.0, 2.0)]).unwrap();
        assert!(fin(inner_infimum(&ent, &m, &[0.0, 0.0]).unwrap()).abs() < 1e-10);
        let m = MarketModel::polytope(space, vec![vec![1.0, -1.0], vec![-3.0, 1.0]]).unwrap();
        assert!(fin(inner_infimum(&ent, &m, &[0.0, 0.0]).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn indifference_price_axioms_spot() {
        let ent: Arc<dyn RiskMeasure> = Arc::new(Entropic::new(half(), 1.0).unwrap());
        let i = IndifferencePrice::new(ent, two_state()).unwrap();
        assert!(fin(i.evaluate(&[0.0, 0.0]).unwrap()).abs() < 1e-12);
        let a = fin(i.evaluate(&[0.3, -0.2]).unwrap());
        let b = fin(i.evaluate(&[0.8, 0.3]).unwrap());
        assert!((a - b - 0.5).abs() < 1e-10);
    }

    #[test]
    fn conical_restriction_of_two_state_rho_hat0() {
        let m = two_state();
        let rho: Arc<dyn RiskMeasure> = Arc::new(RhoHat0::new(m.clone()));
        let Restriction::Ready(r) = restrict_conical(rho, &m).unwrap() else { panic!("restriction failed") };
        assert!((fin(r.evaluate(&[-0.5, 0.0]).unwrap()) - 0.25).abs() < 1e-12);
        assert!((fin(r.evaluate(&[0.7, 0.7]).unwrap()) + 0.7).abs() < 1e-12);
        assert!(fin(r.evaluate(&[-0.5, 0.0]).unwrap()) <= fin(rho_hat0(&m, &[-0.5, 0.0]).unwrap()));
    }

    #[test]
    fn conical_restriction_of_table() {
        let m = two_state();
        let t: Arc<dyn RiskMeasure> = Arc::new(
            PenaltyTable::new(vec![
                (Density::two_point(0.0).unwrap(), 0.25),
                (Density::two_point(0.5).unwrap(), 0.0),
                (Density::two_point(1.0).unwrap(), 0.25),
            ])
            .unwrap(),
        );
        let Restriction::Ready(r) = restrict_conical(t, &m).unwrap() else { panic!("restriction failed") };
        assert!((fin(r.evaluate(&[-1.0, 3.0]).unwrap()) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn conical_restriction_empty_zero_set() {
        let m = MarketModel::scaled_box(half(), vec![vec![1.0, 0.5]], vec![(0.0, 1.0)]).unwrap();
        let rho: Arc<dyn RiskMeasure> = Arc::new(RhoHat0::new(m.clone()));
        assert!(matches!(restrict_conical(rho, &m).unwrap(), Restriction::EmptyZeroSet));
        let ent: Arc<dyn RiskMeasure> = Arc::new(Entropic::new(half(), 1.0).unwrap());
        assert!(matches!(restrict_conical(ent, &m).unwrap(), Restriction::OpaquePenalty));
    }
}

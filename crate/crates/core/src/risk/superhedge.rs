//! The superhedging cost `rho0` and its dual minorant `rho_hat0`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{DualForm, RiskMeasure};
use crate::error::{Error, Result};
use crate::market::{support_function, IlliquidCurve, MarketBody, MarketModel};
use crate::math::dot;
use crate::solvers::{
    maximize_concave, minimize_convex_1d, ConcaveOutcome, Domain, HalfSpace, LinearProgram, Oracle, Sense,
    SolveResult, DEFAULT_MAX_ITER,
};
use crate::value::Extended;

const CURVE_TOL: f64 = 1e-13;
const KELLEY_TOL: f64 = 1e-11;

/// `rho0(x) = inf{r : r + m + x >= 0 for some m in M}`.
pub fn superhedging_rho0(market: &MarketModel, x: &[f64]) -> Result<Extended> {
    let n = market.dim();
    Error::check_dim(n, x.len())?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("claim"));
    }
    match market.body() {
        MarketBody::Polytope(p) => {
            // variables: lambda_1..lambda_J, r
            let j = p.generators.len();
            let mut obj = vec![0.0; j + 1];
            obj[j] = 1.0;
            let mut lp = LinearProgram::minimize(obj);
            lp.free(j);
            for k in 0..n {
                let mut row: Vec<f64> = p.generators.iter().map(|g| g[k]).collect();
                row.push(1.0);
                lp.constrain(row, Sense::Ge, -x[k]);
            }
            if j > 0 {
                let mut row = vec![1.0; j];
                row.push(0.0);
                lp.constrain(row, Sense::Le, 1.0);
            }
            lp_value(lp.solve()?)
        }
        MarketBody::ScaledBox(b) => {
            let d = b.claims.len();
            let mut obj = vec![0.0; d + 1];
            obj[d] = 1.0;
            let mut lp = LinearProgram::minimize(obj);
            for (i, &(lo, hi)) in b.bounds.iter().enumerate() {
                lp.bound(i, lo, hi);
            }
            lp.free(d);
            for k in 0..n {
                let mut row: Vec<f64> = b.claims.iter().map(|s| s[k]).collect();
                row.push(1.0);
                lp.constrain(row, Sense::Ge, -x[k]);
            }
            lp_value(lp.solve()?)
        }
        MarketBody::Illiquid(c) => {
            let (lo, hi) = c.effective_range();
            let cost = |a: f64| {
                let f = c.friction.value(a);
                c.underlying.iter().zip(x).map(|(s, xk)| f - a * s - xk).fold(f64::NEG_INFINITY, f64::max)
            };
            let (_, v) = minimize_convex_1d(cost, lo, hi, CURVE_TOL)?;
            Ok(Extended::Finite(v))
        }
    }
}

fn lp_value(result: SolveResult) -> Result<Extended> {
    match result {
        SolveResult::Optimal(s) => Ok(Extended::Finite(s.value)),
        SolveResult::Unbounded => Ok(Extended::NegInf),
        SolveResult::Infeasible => Err(Error::invalid("superhedging LP infeasible")),
    }
}

/// `(rho0)^*(q) = sigma_M(q)`.
pub fn penalty_rho0(market: &MarketModel, q: &[f64]) -> Result<Extended> {
    support_function(market, q)
}

/// Outcome of a dual supremum `sup_q { -E_q[x] - sigma_M(q) }`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualSup {
    pub value: Extended,
    /// A maximizing density; absent when the feasible set is empty.
    pub density: Option<Vec<f64>>,
}

/// `sup { -q.x - sigma_M(q) : q in simplex, sigma_M(q) < inf, q satisfies extra }`.
pub fn dual_sup(market: &MarketModel, x: &[f64], extra: &[HalfSpace]) -> Result<DualSup> {
    let n = market.dim();
    Error::check_dim(n, x.len())?;
    for h in extra {
        Error::check_dim(n, h.normal.len())?;
    }
    match market.body() {
        MarketBody::Polytope(p) => {
            // variables: q_1..q_n, t with t >= q.m_j and t >= 0
            let mut obj: Vec<f64> = x.iter().map(|v| -v).collect();
            obj.push(-1.0);
            let mut lp = LinearProgram::maximize(obj);
            for g in &p.generators {
                let mut row = g.clone();
                row.push(-1.0);
                lp.constrain(row, Sense::Le, 0.0);
            }
            simplex_rows(&mut lp, n, 1, extra);
            lp_density(lp.solve()?, n)
        }
        MarketBody::ScaledBox(b) => {
            // variables: q_1..q_n, u_1..u_d with u_i >= max(a_i q.S_i, b_i q.S_i)
            let d = b.claims.len();
            let mut obj: Vec<f64> = x.iter().map(|v| -v).collect();
            obj.extend(core::iter::repeat(-1.0).take(d));
            let mut lp = LinearProgram::maximize(obj);
            for (i, (s, &(lo, hi))) in b.claims.iter().zip(&b.bounds).enumerate() {
                for end in [lo, hi] {
                    if end.is_finite() && end != 0.0 {
                        let mut row: Vec<f64> = s.iter().map(|v| end * v).collect();
                        row.extend(core::iter::repeat(0.0).take(d));
                        row[n + i] = -1.0;
                        lp.constrain(row, Sense::Le, 0.0);
                    }
                }
            }
            let domain = market.domain_halfspaces();
            simplex_rows(&mut lp, n, d, &domain);
            simplex_rows_extra(&mut lp, n, d, extra);
            lp_density(lp.solve()?, n)
        }
        MarketBody::Illiquid(c) => match curve_range(c, extra) {
            Some(range) => curve_dual(c, x, range),
            None => kelley_dual(market, x, extra),
        },
    }
}

fn simplex_rows(lp: &mut LinearProgram, n: usize, pad: usize, extra: &[HalfSpace]) {
    let mut row = vec![1.0; n];
    row.extend(core::iter::repeat(0.0).take(pad));
    lp.constrain(row, Sense::Eq, 1.0);
    simplex_rows_extra(lp, n, pad, extra);
}

fn simplex_rows_extra(lp: &mut LinearProgram, _n: usize, pad: usize, extra: &[HalfSpace]) {
    for h in extra {
        let mut row = h.normal.clone();
        row.extend(core::iter::repeat(0.0).take(pad));
        lp.constrain(row, Sense::Le, h.bound);
    }
}

fn lp_density(result: SolveResult, n: usize) -> Result<DualSup> {
    match result {
        SolveResult::Optimal(s) => {
            let q = clean_density(&s.x[..n]);
            Ok(DualSup { value: Extended::Finite(s.value), density: Some(q) })
        }
        SolveResult::Infeasible => Ok(DualSup { value: Extended::NegInf, density: None }),
        SolveResult::Unbounded => Err(Error::invalid("dual LP unbounded on the simplex")),
    }
}

pub(crate) fn clean_density(q: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = q.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = out.iter().sum();
    if total > 0.0 {
        out.iter_mut().for_each(|v| *v /= total);
    }
    out
}

/// When every extra half-space is `+-S.q <= b`, the constraint set is an
/// interval for `s = q.S`. Returns `None` for other half-spaces.
fn curve_range(c: &IlliquidCurve, extra: &[HalfSpace]) -> Option<(f64, f64)> {
    let s = &c.underlying;
    let mut lo = s.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for h in extra {
        if h.normal.iter().zip(s).all(|(a, b)| a == b) {
            hi = hi.min(h.bound);
        } else if h.normal.iter().zip(s).all(|(a, b)| *a == -b) {
            lo = lo.max(-h.bound);
        } else {
            return None;
        }
    }
    Some((lo, hi))
}

/// Upper concave envelope of the points `(S_k, -x_k)`: the best value of
/// `-q.x` over densities with `q.S = s`.
struct Envelope {
    // (s, value, atom), increasing in s
    hull: Vec<(f64, f64, usize)>,
}

impl Envelope {
    fn new(s: &[f64], x: &[f64]) -> Self {
        let mut pts: Vec<(f64, f64, usize)> = s.iter().zip(x).enumerate().map(|(k, (a, b))| (*a, -b, k)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        pts.dedup_by(|later, earlier| later.0 == earlier.0);
        let mut hull: Vec<(f64, f64, usize)> = Vec::with_capacity(pts.len());
        for p in pts {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                // drop b when it lies on or below the chord a-p
                if (b.1 - a.1) * (p.0 - a.0) <= (p.1 - a.1) * (b.0 - a.0) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        Envelope { hull }
    }

    /// Envelope value and the two-atom density attaining it.
    fn at(&self, s: f64, n: usize) -> (f64, Vec<f64>) {
        let h = &self.hull;
        let mut q = vec![0.0; n];
        if h.len() == 1 || s <= h[0].0 {
            q[h[0].2] = 1.0;
            return (h[0].1, q);
        }
        let last = h[h.len() - 1];
        if s >= last.0 {
            q[last.2] = 1.0;
            return (last.1, q);
        }
        let i = h.partition_point(|p| p.0 <= s);
        let (a, b) = (h[i - 1], h[i]);
        let w = (s - a.0) / (b.0 - a.0);
        q[a.2] += 1.0 - w;
        q[b.2] += w;
        (a.1 + w * (b.1 - a.1), q)
    }
}

fn curve_dual(c: &IlliquidCurve, x: &[f64], (lo, hi): (f64, f64)) -> Result<DualSup> {
    if lo > hi {
        return Ok(DualSup { value: Extended::NegInf, density: None });
    }
    let env = Envelope::new(&c.underlying, x);
    let n = x.len();
    let (s, neg) = minimize_convex_1d(|s| c.conjugate(s).0 - env.at(s, n).0, lo, hi, CURVE_TOL * (1.0 + hi - lo))?;
    Ok(DualSup { value: Extended::Finite(-neg), density: Some(env.at(s, n).1) })
}

/// Cutting-plane route; the value is a certified lower bound within `KELLEY_TOL`.
pub(crate) fn kelley_dual(market: &MarketModel, x: &[f64], extra: &[HalfSpace]) -> Result<DualSup> {
    let n = market.dim();
    let domain = Domain::simplex(n).with_halfspaces(extra.iter().cloned());
    let oracle = |q: &[f64]| match market.support_with_element(q) {
        (Extended::Finite(sigma), Some(p)) => Oracle::Value {
            value: -dot(q, x) - sigma,
            supergradient: x.iter().zip(&p).map(|(a, b)| -a - b).collect(),
        },
        _ => {
            // only polyhedral boxes have infinite support; cut with the domain rows
            let h = market
                .domain_halfspaces()
                .into_iter()
                .find(|h| h.slack(q) < 0.0)
                .unwrap_or_else(|| HalfSpace::new(vec![0.0; n], -1.0));
            Oracle::Outside(h)
        }
    };
    match maximize_concave(&domain, oracle, KELLEY_TOL, DEFAULT_MAX_ITER)? {
        ConcaveOutcome::Solved(m) => Ok(DualSup { value: Extended::Finite(m.value), density: Some(m.argmax) }),
        ConcaveOutcome::Empty => Ok(DualSup { value: Extended::NegInf, density: None }),
    }
}

/// `rho_hat0(x) = sup_q { E_q[-x] - sigma_M(q) }`.
pub fn rho_hat0(market: &MarketModel, x: &[f64]) -> Result<Extended> {
    Ok(dual_sup(market, x, &[])?.value)
}

/// `rho_hat0` as a risk measure with exact penalty `sigma_M`.
#[derive(Clone, Debug)]
pub struct RhoHat0 {
    market: MarketModel,
}

impl RhoHat0 {
    pub fn new(market: MarketModel) -> Self {
        RhoHat0 { market }
    }

    pub fn market(&self) -> &MarketModel {
        &self.market
    }
}

impl RiskMeasure for RhoHat0 {
    fn name(&self) -> String {
        String::from("rho_hat0")
    }

    fn dim(&self) -> usize {
        self.market.dim()
    }

    fn evaluate(&self, x: &[f64]) -> Result<Extended> {
        rho_hat0(&self.market, x)
    }

    fn exact_penalty(&self, q: &[f64]) -> Option<Result<Extended>> {
        Some(penalty_rho0(&self.market, q))
    }

    fn dual_form(&self) -> DualForm<'_> {
        DualForm::Support(&self.market)
    }

    fn supporting_density(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        match dual_sup(&self.market, x, &[]) {
            Ok(d) => d.density.map(Ok),
            Err(e) => Some(Err(e)),
        }
    }
}

/// `rho0` as a risk measure. Its penalty is `sigma_M` as well.
#[derive(Clone, Debug)]
pub struct Superhedging {
    market: MarketModel,
}

impl Superhedging {
    pub fn new(market: MarketModel) -> Self {
        Superhedging { market }
    }
}

impl RiskMeasure for Superhedging {
    fn name(&self) -> String {
        String::from("rho0")
    }

    fn dim(&self) -> usize {
        self.market.dim()
    }

    fn evaluate(&self, x: &[f64]) -> Result<Extended> {
        superhedging_rho0(&self.market, x)
    }

    fn exact_penalty(&self, q: &[f64]) -> Option<Result<Extended>> {
        Some(penalty_rho0(&self.market, q))
    }
}

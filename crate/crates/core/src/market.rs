//! The convex set `M` of 0-attainable claims.
//!
//! Three closed-form bodies are supported; each is `body - L_+`:
//! - [`MarketBody::Polytope`]: `conv{0, m_1, .., m_J}`. The zero generator is
//!   always adjoined so that `0 in M` and `L_- subset M`.
//! - [`MarketBody::Illiquid`]: the curve `{alpha S - f(alpha)}` for a convex
//!   friction `f` and a position range `[alpha_lo, alpha_hi]`.
//! - [`MarketBody::ScaledBox`]: `{sum_i theta_i S_i : theta in K}` for a box `K`
//!   containing the origin; box ends may be infinite.
//!
//! Densities enter only through the support function
//! `sigma_M(q) = sup_{m in M} E_q[m]`, which is the penalty of the superhedging
//! cost. All formulas accept any nonnegative weight vector, not just
//! probability vectors, because `sigma_M` is positively homogeneous.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::math::{self, dot};
use crate::risk::{superhedging_rho0, RiskMeasure};
use crate::solvers::HalfSpace;
use crate::space::SampleSpace;
use crate::value::Extended;

/// Membership tolerance used when no other is given.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Even convex trading cost with `f(0) = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Friction {
    /// `c alpha^2`.
    Quadratic { c: f64 },
    /// `c (exp(k |alpha|) - 1)`.
    Exponential { c: f64, k: f64 },
}

impl Friction {
    fn validate(&self) -> Result<()> {
        match *self {
            Friction::Quadratic { c } if c > 0.0 && c.is_finite() => Ok(()),
            Friction::Exponential { c, k } if c > 0.0 && k > 0.0 && c.is_finite() && k.is_finite() => Ok(()),
            _ => Err(Error::invalid("friction parameters must be positive and finite")),
        }
    }

    pub fn value(&self, alpha: f64) -> f64 {
        match *self {
            Friction::Quadratic { c } => c * alpha * alpha,
            Friction::Exponential { c, k } => c * libm::expm1(k * alpha.abs()),
        }
    }

    /// `f'(0+)`; the subdifferential at zero is `[-d, d]`.
    pub fn slope_at_zero(&self) -> f64 {
        match *self {
            Friction::Quadratic { .. } => 0.0,
            Friction::Exponential { c, k } => c * k,
        }
    }

    /// Unconstrained maximizer of `alpha s - f(alpha)`.
    pub fn best_position(&self, s: f64) -> f64 {
        match *self {
            Friction::Quadratic { c } => s / (2.0 * c),
            Friction::Exponential { c, k } => {
                let d = c * k;
                if s.abs() <= d {
                    0.0
                } else {
                    s.signum() * math::ln(s.abs() / d) / k
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IlliquidCurve {
    pub underlying: Vec<f64>,
    pub friction: Friction,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
}

impl IlliquidCurve {
    /// `alpha S - f(alpha)`.
    pub fn element(&self, alpha: f64) -> Vec<f64> {
        let cost = self.friction.value(alpha);
        self.underlying.iter().map(|s| alpha * s - cost).collect()
    }

    fn clamp(&self, alpha: f64) -> f64 {
        alpha.max(self.alpha_lo).min(self.alpha_hi)
    }

    /// Positions outside this interval are dominated componentwise by its
    /// endpoints, so every monotone problem over `M` can be restricted to it.
    pub fn effective_range(&self) -> (f64, f64) {
        let (lo, hi) = self
            .underlying
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        (self.clamp(self.friction.best_position(lo)).min(0.0), self.clamp(self.friction.best_position(hi)).max(0.0))
    }

    /// `f*(s) = sup_alpha { alpha s - f(alpha) }` over the position range, and its maximizer.
    pub fn conjugate(&self, s: f64) -> (f64, f64) {
        let alpha = self.clamp(self.friction.best_position(s));
        let value = alpha * s - self.friction.value(alpha);
        // alpha = 0 is always admissible
        if value > 0.0 { (value, alpha) } else { (0.0, 0.0) }
    }

    /// `sup_alpha { alpha (y.S) - |y| f(alpha) }` and its maximizer.
    fn support(&self, y: &[f64]) -> (f64, f64) {
        let mass: f64 = y.iter().sum();
        if mass <= 0.0 {
            return (0.0, 0.0);
        }
        let (value, alpha) = self.conjugate(dot(y, &self.underlying) / mass);
        (mass * value, alpha)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    /// User generators; the zero generator is implicit.
    pub generators: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScaledBox {
    pub claims: Vec<Vec<f64>>,
    /// `(a_i, b_i)` with `a_i <= 0 <= b_i`; either may be infinite.
    pub bounds: Vec<(f64, f64)>,
}

impl ScaledBox {
    pub fn element(&self, theta: &[f64]) -> Vec<f64> {
        let n = self.claims.first().map_or(0, |c| c.len());
        let mut out = vec![0.0; n];
        for (t, s) in theta.iter().zip(&self.claims) {
            for (o, v) in out.iter_mut().zip(s) {
                *o += t * v;
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MarketBody {
    Polytope(Polytope),
    Illiquid(IlliquidCurve),
    ScaledBox(ScaledBox),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MarketModel {
    space: SampleSpace,
    body: MarketBody,
}

impl MarketModel {
    pub fn polytope(space: SampleSpace, generators: Vec<Vec<f64>>) -> Result<Self> {
        for g in &generators {
            check_claim(&space, g)?;
        }
        Ok(MarketModel { space, body: MarketBody::Polytope(Polytope { generators }) })
    }

    /// `M = -L_+`.
    pub fn nonpositive(space: SampleSpace) -> Self {
        MarketModel { space, body: MarketBody::Polytope(Polytope { generators: Vec::new() }) }
    }

    pub fn illiquid(space: SampleSpace, underlying: Vec<f64>, friction: Friction, alpha_lo: f64, alpha_hi: f64) -> Result<Self> {
        check_claim(&space, &underlying)?;
        friction.validate()?;
        if alpha_lo.is_nan() || alpha_hi.is_nan() || alpha_lo > 0.0 || alpha_hi < 0.0 {
            return Err(Error::invalid("position range must contain 0"));
        }
        let body = MarketBody::Illiquid(IlliquidCurve { underlying, friction, alpha_lo, alpha_hi });
        Ok(MarketModel { space, body })
    }

    pub fn scaled_box(space: SampleSpace, claims: Vec<Vec<f64>>, bounds: Vec<(f64, f64)>) -> Result<Self> {
        Error::check_dim(claims.len(), bounds.len())?;
        for c in &claims {
            check_claim(&space, c)?;
        }
        if bounds.iter().any(|&(a, b)| a.is_nan() || b.is_nan() || a > 0.0 || b < 0.0) {
            return Err(Error::invalid("box must contain the origin"));
        }
        Ok(MarketModel { space, body: MarketBody::ScaledBox(ScaledBox { claims, bounds }) })
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn body(&self) -> &MarketBody {
        &self.body
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// True when `M` is a polyhedron, so LP paths are exact.
    pub fn is_polyhedral(&self) -> bool {
        !matches!(self.body, MarketBody::Illiquid(_))
    }

    pub fn kind(&self) -> &'static str {
        match self.body {
            MarketBody::Polytope(_) => "polytope",
            MarketBody::Illiquid(_) => "illiquid",
            MarketBody::ScaledBox(_) => "scaled_box",
        }
    }

    /// `sigma_M(y)` for a nonnegative weight vector `y`.
    pub fn support(&self, y: &[f64]) -> Extended {
        self.support_with_element(y).0
    }

    /// `sigma_M(y)` together with a maximizing element of `M` (a subgradient).
    pub fn support_with_element(&self, y: &[f64]) -> (Extended, Option<Vec<f64>>) {
        let n = self.dim();
        match &self.body {
            MarketBody::Polytope(p) => {
                let mut best = (0.0, None);
                for g in &p.generators {
                    let v = dot(y, g);
                    if v > best.0 {
                        best = (v, Some(g));
                    }
                }
                (Extended::Finite(best.0), Some(best.1.cloned().unwrap_or_else(|| vec![0.0; n])))
            }
            MarketBody::Illiquid(c) => {
                let (value, alpha) = c.support(y);
                (Extended::Finite(value), Some(c.element(alpha)))
            }
            MarketBody::ScaledBox(b) => {
                let mut total = 0.0;
                let mut theta = Vec::with_capacity(b.claims.len());
                for (s, &(lo, hi)) in b.claims.iter().zip(&b.bounds) {
                    let e = dot(y, s);
                    let t = if e > 0.0 {
                        hi
                    } else if e < 0.0 {
                        lo
                    } else {
                        0.0
                    };
                    if !t.is_finite() {
                        return (Extended::PosInf, None);
                    }
                    total += t * e;
                    theta.push(t);
                }
                (Extended::Finite(total), Some(b.element(&theta)))
            }
        }
    }

    /// Half-spaces cutting the simplex down to `{q : sigma_M(q) < inf}`.
    /// Empty unless a box end is infinite.
    pub fn domain_halfspaces(&self) -> Vec<HalfSpace> {
        let mut out = Vec::new();
        if let MarketBody::ScaledBox(b) = &self.body {
            for (s, &(lo, hi)) in b.claims.iter().zip(&b.bounds) {
                if hi == f64::INFINITY {
                    out.push(HalfSpace::new(s.clone(), 0.0));
                }
                if lo == f64::NEG_INFINITY {
                    out.push(HalfSpace::new(s.iter().map(|v| -v).collect(), 0.0));
                }
            }
        }
        out
    }

    /// Half-spaces cutting the simplex down to `{q : sigma_M(q) = 0}`.
    pub fn zero_set_halfspaces(&self) -> Vec<HalfSpace> {
        match &self.body {
            MarketBody::Polytope(p) => p.generators.iter().map(|g| HalfSpace::new(g.clone(), 0.0)).collect(),
            MarketBody::ScaledBox(b) => {
                let mut out = Vec::new();
                for (s, &(lo, hi)) in b.claims.iter().zip(&b.bounds) {
                    if hi > 0.0 {
                        out.push(HalfSpace::new(s.clone(), 0.0));
                    }
                    if lo < 0.0 {
                        out.push(HalfSpace::new(s.iter().map(|v| -v).collect(), 0.0));
                    }
                }
                out
            }
            MarketBody::Illiquid(c) => {
                // sigma(q) = 0 iff q.S lies in the subdifferential of f at 0,
                // intersected with the sides the position range allows
                let d = c.friction.slope_at_zero();
                let mut out = Vec::new();
                if c.alpha_hi > 0.0 {
                    out.push(HalfSpace::new(c.underlying.clone(), d));
                }
                if c.alpha_lo < 0.0 {
                    out.push(HalfSpace::new(c.underlying.iter().map(|v| -v).collect(), d));
                }
                out
            }
        }
    }

    /// Generators, box vertices or a grid along the curve. All lie in `M`.
    pub fn extreme_elements(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut out = vec![vec![0.0; n]];
        match &self.body {
            MarketBody::Polytope(p) => out.extend(p.generators.iter().cloned()),
            MarketBody::Illiquid(c) => {
                let (lo, hi) = c.effective_range();
                for i in 0..=40 {
                    out.push(c.element(lo + (hi - lo) * i as f64 / 40.0));
                }
            }
            MarketBody::ScaledBox(b) => {
                let d = b.claims.len();
                // infinite ends are probed at a finite scale
                let ends: Vec<(f64, f64)> = b.bounds.iter().map(|&(lo, hi)| (lo.max(-10.0), hi.min(10.0))).collect();
                if d <= 10 {
                    for mask in 0..(1usize << d) {
                        let theta: Vec<f64> =
                            (0..d).map(|i| if mask >> i & 1 == 1 { ends[i].1 } else { ends[i].0 }).collect();
                        out.push(b.element(&theta));
                    }
                } else {
                    for i in 0..d {
                        let mut theta = vec![0.0; d];
                        theta[i] = ends[i].1;
                        out.push(b.element(&theta));
                        theta[i] = ends[i].0;
                        out.push(b.element(&theta));
                    }
                }
            }
        }
        out
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        contains(self, x, tol)
    }
}

fn check_claim(space: &SampleSpace, v: &[f64]) -> Result<()> {
    Error::check_dim(space.dim(), v.len())?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("market claim"));
    }
    Ok(())
}

/// `sigma_M(q)`; `+inf` marks `q` outside the finite-penalty set.
pub fn support_function(market: &MarketModel, q: &[f64]) -> Result<Extended> {
    Error::check_dim(market.dim(), q.len())?;
    if q.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::invalid("support function needs nonnegative weights"));
    }
    Ok(market.support(q))
}

/// `x in M` up to `tol`: some element `m` of the body has `m >= x - tol`.
pub fn contains(market: &MarketModel, x: &[f64], tol: f64) -> Result<bool> {
    Error::check_dim(market.dim(), x.len())?;
    if !(tol > 0.0) {
        return Err(Error::invalid("membership tolerance must be positive"));
    }
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    // rho0(-x) = min over the body of max_k (x_k - m_k)
    Ok(superhedging_rho0(market, &neg)?.at_most(tol))
}

/// Something that plays the role of `M` in the checkers.
pub trait AttainableSet {
    fn dim(&self) -> usize;
    fn label(&self) -> String;
    fn support(&self, q: &[f64]) -> Extended;
    /// Elements of the set: extremes, random convex combinations of them and
    /// random `-L_+` perturbations.
    fn probe_elements(&self, rng: &mut dyn RngCore, random: usize) -> Vec<Vec<f64>>;
    /// Superhedging cost, where it is available.
    fn superhedge(&self, _x: &[f64]) -> Option<Result<Extended>> {
        None
    }
}

fn perturbed_combinations(extremes: &[Vec<f64>], rng: &mut dyn RngCore, count: usize) -> Vec<Vec<f64>> {
    let n = extremes[0].len();
    let mut out = extremes.to_vec();
    for i in 0..count {
        let k = rng.gen_range(1..=extremes.len().min(4));
        let mut weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0f64) + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let mut m = vec![0.0; n];
        for w in weights {
            let e = &extremes[rng.gen_range(0..extremes.len())];
            for (a, b) in m.iter_mut().zip(e) {
                *a += w * b;
            }
        }
        if i % 2 == 1 {
            for a in m.iter_mut() {
                *a -= rng.gen_range(0.0..1.0f64);
            }
        }
        out.push(m);
    }
    out
}

impl AttainableSet for MarketModel {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn label(&self) -> String {
        String::from(self.kind())
    }

    fn support(&self, q: &[f64]) -> Extended {
        MarketModel::support(self, q)
    }

    fn probe_elements(&self, rng: &mut dyn RngCore, random: usize) -> Vec<Vec<f64>> {
        perturbed_combinations(&self.extreme_elements(), rng, random)
    }

    fn superhedge(&self, x: &[f64]) -> Option<Result<Extended>> {
        Some(superhedging_rho0(self, x))
    }
}

/// The cone `M' = {c m : c >= 0, m in M}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConicalMarket {
    base: MarketModel,
}

pub fn conical_hull(market: &MarketModel) -> ConicalMarket {
    ConicalMarket { base: market.clone() }
}

impl ConicalMarket {
    pub fn base(&self) -> &MarketModel {
        &self.base
    }
}

impl AttainableSet for ConicalMarket {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn label(&self) -> String {
        format!("cone({})", self.base.kind())
    }

    /// `0` where `sigma_M` vanishes, `+inf` elsewhere.
    fn support(&self, q: &[f64]) -> Extended {
        if self.base.support(q).at_most(MEMBERSHIP_TOL) {
            Extended::Finite(0.0)
        } else {
            Extended::PosInf
        }
    }

    fn probe_elements(&self, rng: &mut dyn RngCore, random: usize) -> Vec<Vec<f64>> {
        let base = self.base.probe_elements(rng, random);
        let mut out = Vec::with_capacity(base.len() * 4);
        for m in base {
            for c in [0.5, 2.0, 10.0, 100.0] {
                out.push(m.iter().map(|v| c * v).collect());
            }
        }
        out
    }
}

/// `M^rho = {x : rho(-x) <= 0}`, represented by its membership oracle.
pub struct ExtendedMarket<'a> {
    rho: &'a dyn RiskMeasure,
}

pub fn extended_market(rho: &dyn RiskMeasure) -> ExtendedMarket<'_> {
    ExtendedMarket { rho }
}

impl ExtendedMarket<'_> {
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        Error::check_dim(self.rho.dim(), x.len())?;
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        Ok(self.rho.evaluate(&neg)?.at_most(tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risk::{Entropic, PenaltyTable};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn half() -> SampleSpace {
        SampleSpace::from_probs(vec![0.5, 0.5]).unwrap()
    }

    pub(crate) fn two_state_illiquid() -> MarketModel {
        MarketModel::illiquid(half(), vec![1.0, -1.0], Friction::Quadratic { c: 1.0 }, f64::NEG_INFINITY, f64::INFINITY)
            .unwrap()
    }

    fn scaled_half() -> MarketModel {
        MarketModel::scaled_box(half(), vec![vec![1.0, 0.5]], vec![(0.0, 1.0)]).unwrap()
    }

    #[test]
    fn illiquid_support_closed_form() {
        let m = two_state_illiquid();
        for i in 0..=20 {
            let q = i as f64 / 20.0;
            let v = m.support(&[q, 1.0 - q]).finite().unwrap();
            assert!((v - (2.0 * q - 1.0).powi(2) / 4.0).abs() < 1e-15, "q = {q}");
        }
        assert!((m.support(&[0.75, 0.25]).finite().unwrap() - 1.0 / 16.0).abs() < 1e-15);
    }

    // The closed-form conjugate against golden-section on the defining sup.
    #[test]
    fn illiquid_support_matches_1d_search() {
        let m = MarketModel::illiquid(half(), vec![1.0, -0.3], Friction::Exponential { c: 0.2, k: 1.5 }, -2.0, 0.7).unwrap();
        let MarketBody::Illiquid(c) = m.body() else { unreachable!() };
        for q in [0.0, 0.1, 0.35, 0.6, 0.9, 1.0] {
            let y = [q, 1.0 - q];
            let oracle = crate::solvers::minimize_convex_1d(|a| -dot(&y, &c.element(a)), -2.0, 0.7, 1e-12).unwrap();
            assert!((m.support(&y).finite().unwrap() + oracle.1).abs() < 1e-12);
        }
    }

    #[test]
    fn scaled_box_support() {
        let m = scaled_half();
        assert_eq!(m.support(&[0.0, 1.0]), Extended::Finite(0.5));
        for q in [0.0, 0.3, 1.0] {
            assert!((m.support(&[q, 1.0 - q]).finite().unwrap() - (1.0 + q) / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn trivial_polytope_support_is_zero() {
        let m = MarketModel::nonpositive(half());
        assert_eq!(m.support(&[0.3, 0.7]), Extended::Finite(0.0));
    }

    #[test]
    fn infinite_box_end_gives_infinite_support() {
        let m = MarketModel::scaled_box(half(), vec![vec![1.0, -1.0]], vec![(0.0, f64::INFINITY)]).unwrap();
        assert_eq!(m.support(&[0.7, 0.3]), Extended::PosInf);
        assert_eq!(m.support(&[0.3, 0.7]), Extended::Finite(0.0));
        assert_eq!(m.domain_halfspaces().len(), 1);
    }

    #[test]
    fn membership_examples() {
        let m = two_state_illiquid();
        assert!(m.contains(&[0.0, 0.0], 1e-9).unwrap());
        assert!(m.contains(&[-0.2, -3.0], 1e-9).unwrap());
        // alpha = 0.4 gives (0.24, -0.56) which dominates (0.2, -0.8)
        assert!(m.contains(&[0.2, -0.8], 1e-9).unwrap());
        assert!(!m.contains(&[0.3, 0.0], 1e-9).unwrap());
    }

    // Brute-force slack search over alpha for the membership example.
    #[test]
    fn membership_against_slack_scan() {
        let m = two_state_illiquid();
        let MarketBody::Illiquid(c) = m.body() else { unreachable!() };
        let x = [0.3, -0.8];
        let best_slack = (0..=100_000)
            .map(|i| -0.5 + i as f64 * 1e-5)
            .map(|a| {
                let e = c.element(a);
                (e[0] - x[0]).min(e[1] - x[1])
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(best_slack < 0.0);
        assert!(!m.contains(&x, 1e-9).unwrap());
        let y = [0.2, -0.8];
        assert!(m.contains(&y, 1e-9).unwrap());
    }

    #[test]
    fn conical_support_values() {
        let cone = conical_hull(&two_state_illiquid());
        assert_eq!(cone.support(&[0.5, 0.5]), Extended::Finite(0.0));
        assert_eq!(cone.support(&[0.6, 0.4]), Extended::PosInf);
        let cone = conical_hull(&scaled_half());
        for i in 0..=10 {
            let q = i as f64 / 10.0;
            assert_eq!(cone.support(&[q, 1.0 - q]), Extended::PosInf);
        }
        let cone = conical_hull(&MarketModel::nonpositive(half()));
        assert_eq!(cone.support(&[0.2, 0.8]), Extended::Finite(0.0));
    }

    #[test]
    fn zero_set_of_two_state_market() {
        let m = two_state_illiquid();
        let hs = m.zero_set_halfspaces();
        let inside = |q: &[f64]| hs.iter().all(|h| h.slack(q) >= -1e-12);
        assert!(inside(&[0.5, 0.5]));
        assert!(!inside(&[0.51, 0.49]));
    }

    #[test]
    fn extended_market_examples() {
        let ent = Entropic::new(half(), 1.0).unwrap();
        let ext = extended_market(&ent);
        assert!(ext.contains(&[0.0, 0.0], 1e-12).unwrap());
        // rho(-x) = log cosh(1) > 0
        assert!(!ext.contains(&[1.0, -1.0], 1e-12).unwrap());
        let wc = PenaltyTable::worst_case(crate::space::Density::new(vec![0.5, 0.5]).unwrap());
        let ext = extended_market(&wc);
        assert!(!ext.contains(&[1e-3, 0.0], 1e-12).unwrap());
    }

    #[test]
    fn probe_elements_lie_in_market() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for m in [two_state_illiquid(), scaled_half(), MarketModel::polytope(half(), vec![vec![1.0, -2.0], vec![-0.5, 0.4]]).unwrap()] {
            for e in m.probe_elements(&mut rng, 50) {
                assert!(m.contains(&e, 1e-9).unwrap(), "{:?} not in {}", e, m.kind());
            }
        }
    }

    #[test]
    fn constructor_validation() {
        assert!(MarketModel::illiquid(half(), vec![1.0], Friction::Quadratic { c: 1.0 }, -1.0, 1.0).is_err());
        assert!(MarketModel::illiquid(half(), vec![1.0, 0.0], Friction::Quadratic { c: 0.0 }, -1.0, 1.0).is_err());
        assert!(MarketModel::illiquid(half(), vec![1.0, 0.0], Friction::Quadratic { c: 1.0 }, 0.5, 1.0).is_err());
        assert!(MarketModel::scaled_box(half(), vec![vec![1.0, 0.0]], vec![(0.1, 1.0)]).is_err());
    }
}

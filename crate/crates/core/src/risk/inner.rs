//! Minimization of a convex, nonincreasing functional over `M`.
//!
//! Callers pass `F(p)` for elements `p` of the body of `M`; the `-L_+` part
//! never helps a nonincreasing `F`, so only the body is searched. `F` may
//! return a gradient in claim space, which drives a cutting-plane solve over
//! the parametrization. Without one, a restarted coordinate search is used.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::market::{MarketBody, MarketModel};
use crate::math::dot;
use crate::solvers::{maximize_concave, minimize_convex_1d, ConcaveOutcome, Domain, HalfSpace, Oracle};

pub(crate) type Objective<'a> = dyn FnMut(&[f64]) -> Result<(f64, Option<Vec<f64>>)> + 'a;

const CURVE_TOL: f64 = 1e-12;
const MAX_RADIUS: f64 = 1_099_511_627_776.0; // 2^40
const RESTARTS: usize = 8;
const KELLEY_ITER: usize = 3_000;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum InnerMin {
    Attained { value: f64, element: Vec<f64>, params: Vec<f64> },
    /// Descent continued without bound.
    Unbounded,
}

pub(crate) fn golden<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    let mut err = None;
    let r = minimize_convex_1d(
        |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        tol,
    );
    match err {
        Some(e) => Err(e),
        None => r,
    }
}

pub(crate) fn minimize_over_market(market: &MarketModel, f: &mut Objective<'_>, tol: f64) -> Result<InnerMin> {
    match market.body() {
        MarketBody::Illiquid(c) => {
            let (lo, hi) = c.effective_range();
            let (a, v) = golden(|a| Ok(f(&c.element(a))?.0), lo, hi, CURVE_TOL)?;
            Ok(InnerMin::Attained { value: v, element: c.element(a), params: vec![a] })
        }
        MarketBody::Polytope(p) => {
            let n = market.dim();
            if p.generators.is_empty() {
                let zero = vec![0.0; n];
                let (value, _) = f(&zero)?;
                return Ok(InnerMin::Attained { value, element: zero, params: Vec::new() });
            }
            // lambda_0 weights the implicit zero generator
            let mut gens = vec![vec![0.0; n]];
            gens.extend(p.generators.iter().cloned());
            let domain = Domain::simplex(gens.len());
            let combine = |lambda: &[f64]| combination(&gens, lambda, n);
            solve_param(&domain, &gens, f, &combine, tol)
        }
        MarketBody::ScaledBox(b) => {
            let n = market.dim();
            let combine = |theta: &[f64]| combination(&b.claims, theta, n);
            let infinite = b.bounds.iter().any(|(lo, hi)| !lo.is_finite() || !hi.is_finite());
            let mut radius = 1.0;
            let mut last: Option<f64> = None;
            loop {
                let bounds: Vec<(f64, f64)> = b.bounds.iter().map(|&(lo, hi)| (lo.max(-radius), hi.min(radius))).collect();
                let out = solve_param(&Domain::boxed(bounds), &b.claims, f, &combine, tol)?;
                if !infinite {
                    return Ok(out);
                }
                let InnerMin::Attained { value, params, .. } = &out else { return Ok(out) };
                let value = *value;
                let pinned = params.iter().zip(&b.bounds).any(|(t, &(lo, hi))| {
                    (!hi.is_finite() && *t >= radius * (1.0 - 1e-6)) || (!lo.is_finite() && *t <= -radius * (1.0 - 1e-6))
                });
                let settled = last.map_or(false, |prev| prev - value <= tol);
                if !pinned || settled {
                    return Ok(out);
                }
                if radius >= MAX_RADIUS {
                    return Ok(if value < -1e9 { InnerMin::Unbounded } else { out });
                }
                last = Some(value);
                radius *= 2.0;
            }
        }
    }
}

fn combination(gens: &[Vec<f64>], w: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (g, c) in gens.iter().zip(w) {
        for (o, v) in out.iter_mut().zip(g) {
            *o += c * v;
        }
    }
    out
}

/// Minimize `F(G w)` over a parameter polytope.
fn solve_param(
    domain: &Domain,
    gens: &[Vec<f64>],
    f: &mut Objective<'_>,
    combine: &dyn Fn(&[f64]) -> Vec<f64>,
    tol: f64,
) -> Result<InnerMin> {
    let start = domain_start(domain);
    let (_, g0) = f(&combine(&start))?;
    if g0.is_none() {
        return coordinate_search(domain, f, combine, tol);
    }
    let mut err = None;
    let oracle = |w: &[f64]| {
        if err.is_some() {
            return Oracle::Outside(HalfSpace::new(vec![0.0; w.len()], -1.0));
        }
        match f(&combine(w)) {
            Ok((v, Some(g))) => Oracle::Value { value: -v, supergradient: gens.iter().map(|m| -dot(&g, m)).collect() },
            Ok((_, None)) => {
                err = Some(Error::invalid("objective stopped returning gradients"));
                Oracle::Outside(HalfSpace::new(vec![0.0; w.len()], -1.0))
            }
            Err(e) => {
                err = Some(e);
                Oracle::Outside(HalfSpace::new(vec![0.0; w.len()], -1.0))
            }
        }
    };
    let out = maximize_concave(domain, oracle, tol, KELLEY_ITER)?;
    if let Some(e) = err {
        return Err(e);
    }
    match out {
        ConcaveOutcome::Solved(m) => {
            Ok(InnerMin::Attained { value: -m.value, element: combine(&m.argmax), params: m.argmax })
        }
        ConcaveOutcome::Empty => Err(Error::invalid("empty parameter domain")),
    }
}

fn domain_start(domain: &Domain) -> Vec<f64> {
    if domain.equalities.is_empty() {
        domain.bounds.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
    } else {
        let n = domain.dim();
        vec![1.0 / n as f64; n]
    }
}

/// Restarted coordinate search: pairwise mass transfers on the simplex,
/// single-coordinate golden sections on a box.
fn coordinate_search(
    domain: &Domain,
    f: &mut Objective<'_>,
    combine: &dyn Fn(&[f64]) -> Vec<f64>,
    tol: f64,
) -> Result<InnerMin> {
    let simplex = !domain.equalities.is_empty();
    let d = domain.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for restart in 0..RESTARTS {
        let mut w = if restart == 0 {
            domain_start(domain)
        } else if simplex {
            let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..1.0f64)).collect();
            let s: f64 = raw.iter().sum();
            raw.iter().map(|v| v / s).collect()
        } else {
            domain.bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..=hi)).collect()
        };
        let mut value = f(&combine(&w))?.0;
        for _ in 0..200 {
            let before = value;
            if simplex {
                for i in 0..d {
                    for j in (i + 1)..d {
                        let (wi, wj) = (w[i], w[j]);
                        let mut trial = w.clone();
                        let (t, v) = golden(
                            |t| {
                                trial[i] = wi + t;
                                trial[j] = wj - t;
                                Ok(f(&combine(&trial))?.0)
                            },
                            -wi,
                            wj,
                            1e-12,
                        )?;
                        if v < value {
                            w[i] = wi + t;
                            w[j] = wj - t;
                            value = v;
                        }
                    }
                }
            } else {
                for i in 0..d {
                    let (lo, hi) = domain.bounds[i];
                    let mut trial = w.clone();
                    let (t, v) = golden(
                        |t| {
                            trial[i] = t;
                            Ok(f(&combine(&trial))?.0)
                        },
                        lo,
                        hi,
                        1e-12,
                    )?;
                    if v < value {
                        w[i] = t;
                        value = v;
                    }
                }
            }
            if before - value <= tol {
                break;
            }
        }
        if best.as_ref().map_or(true, |b| value < b.0) {
            best = Some((value, w));
        }
    }
    let (value, w) = best.expect("at least one restart");
    Ok(InnerMin::Attained { value, element: combine(&w), params: w })
}

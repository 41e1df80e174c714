//! Convex risk measures on a finite sample space.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::market::MarketModel;
use crate::math::dot;
use crate::report::{DiagnosticReport, Verdict};
use crate::space::Density;
use crate::value::Extended;

mod derived;
pub(crate) mod inner;
mod measures;
mod superhedge;

pub use derived::{
    acceptance_set_measure, indifference_price, inner_infimum, restrict_conical, AcceptanceSet, ConicalRestriction,
    IndifferenceOutcome, IndifferencePrice, Restriction, Shortfall,
};
pub use measures::{Entropic, PenaltyTable};
pub use superhedge::{dual_sup, penalty_rho0, rho_hat0, superhedging_rho0, DualSup, RhoHat0, Superhedging};
pub(crate) use superhedge::clean_density;

/// Tolerance of the axiom checks.
pub const AXIOM_TOL: f64 = 1e-9;

/// How a measure's penalty is represented, if at all.
pub enum DualForm<'a> {
    /// `max_i { E_{q_i}[-x] - a_i }`.
    Table(&'a [(Density, f64)]),
    /// `sup_q { E_q[-x] - sigma_M(q) }`.
    Support(&'a MarketModel),
    Opaque,
}

/// `rho : L -> R`, monotone, cash-invariant and convex.
pub trait RiskMeasure: Send + Sync {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn evaluate(&self, x: &[f64]) -> Result<Extended>;

    /// The penalty `rho^*(q)`, where it is known in closed form.
    fn exact_penalty(&self, _q: &[f64]) -> Option<Result<Extended>> {
        None
    }

    fn dual_form(&self) -> DualForm<'_> {
        DualForm::Opaque
    }

    /// A density attaining the dual supremum at `x`; `-q` is a subgradient.
    fn supporting_density(&self, _x: &[f64]) -> Option<Result<Vec<f64>>> {
        None
    }
}

impl<T: RiskMeasure + ?Sized> RiskMeasure for alloc::sync::Arc<T> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn evaluate(&self, x: &[f64]) -> Result<Extended> {
        (**self).evaluate(x)
    }
    fn exact_penalty(&self, q: &[f64]) -> Option<Result<Extended>> {
        (**self).exact_penalty(q)
    }
    fn dual_form(&self) -> DualForm<'_> {
        (**self).dual_form()
    }
    fn supporting_density(&self, x: &[f64]) -> Option<Result<Vec<f64>>> {
        (**self).supporting_density(x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenaltyEstimate {
    pub value: Extended,
    /// False when `value` is only a probe lower bound.
    pub exact: bool,
}

/// `rho^*(q) = sup_x { E_q[-x] - rho(x) }`: exact where available, otherwise
/// the best value over structured and random probe claims.
pub fn penalty_of(rho: &dyn RiskMeasure, q: &[f64], probe_radius: f64, probe_count: usize, seed: u64) -> Result<PenaltyEstimate> {
    let n = rho.dim();
    Error::check_dim(n, q.len())?;
    if let Some(v) = rho.exact_penalty(q) {
        return Ok(PenaltyEstimate { value: v?, exact: true });
    }
    if probe_count == 0 {
        return Err(Error::invalid("penalty estimate needs at least one probe"));
    }
    let mut best = Extended::NegInf;
    let mut consider = |x: &[f64]| -> Result<()> {
        let v = match rho.evaluate(x)? {
            Extended::Finite(r) => Extended::Finite(-dot(q, x) - r),
            Extended::NegInf => Extended::PosInf,
            Extended::PosInf => return Ok(()),
        };
        if v.to_f64() > best.to_f64() {
            best = v;
        }
        Ok(())
    };
    consider(&vec![0.0; n])?;
    for k in 0..n {
        for s in [probe_radius, -probe_radius] {
            let mut x = vec![0.0; n];
            x[k] = s;
            consider(&x)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..probe_count {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-probe_radius..=probe_radius)).collect();
        consider(&x)?;
    }
    Ok(PenaltyEstimate { value: best, exact: false })
}

/// Randomized check of monotonicity, cash invariance and convexity, with
/// positive homogeneity reported alongside.
pub fn axioms_check(rho: &dyn RiskMeasure, samples: usize, seed: u64) -> Result<DiagnosticReport> {
    if samples == 0 {
        return Err(Error::invalid("axioms check needs at least one sample"));
    }
    let n = rho.dim();
    let mut report = DiagnosticReport::new("axioms");
    report.text("measure", rho.name());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut skipped = 0usize;
    let mut worst = [0.0f64; 4];
    let mut witness: [Option<(Vec<f64>, f64)>; 4] = [None, None, None, None];
    let zero = rho.evaluate(&vec![0.0; n])?;
    report.margin("normalization", zero.to_f64().abs());

    for _ in 0..samples {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let z: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let r: f64 = rng.gen_range(-2.0..2.0);
        let lambda: f64 = rng.gen_range(0.0..1.0);
        let mu: f64 = rng.gen_range(0.0..3.0);
        let add = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(u, v)| u + v).collect() };
        let mix: Vec<f64> = x.iter().zip(&y).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let cash: Vec<f64> = x.iter().map(|a| a + r).collect();
        let scaled: Vec<f64> = x.iter().map(|a| mu * a).collect();
        let values = [
            rho.evaluate(&x)?,
            rho.evaluate(&add(&x, &z))?,
            rho.evaluate(&cash)?,
            rho.evaluate(&y)?,
            rho.evaluate(&mix)?,
            rho.evaluate(&scaled)?,
        ];
        let Some([fx, fxz, fcash, fy, fmix, fscaled]) = finite_all(&values) else {
            skipped += 1;
            continue;
        };
        let scale = 1.0 + fx.abs().max(fy.abs());
        let violations = [
            (fxz - fx) / scale,
            (fcash - fx + r).abs() / scale,
            (fmix - lambda * fx - (1.0 - lambda) * fy) / scale,
            (fscaled - mu * fx).abs() / scale,
        ];
        for i in 0..4 {
            if violations[i] > worst[i] {
                worst[i] = violations[i];
                witness[i] = Some((x.clone(), [0.0, r, lambda, mu][i]));
            }
        }
    }
    let names = ["monotonicity", "cash_invariance", "convexity", "homogeneity"];
    for i in 0..4 {
        report.margin(names[i], worst[i]);
        if let Some((x, p)) = &witness[i] {
            if worst[i] > AXIOM_TOL {
                report.vector(format!("{}_claim", names[i]), x.clone());
                if i > 0 {
                    report.scalar(format!("{}_parameter", names[i]), *p);
                }
            }
        }
    }
    report.margin("samples", (samples - skipped) as f64);
    if worst[3] <= AXIOM_TOL {
        report.note("positive homogeneity holds on all samples");
    } else {
        report.note("positive homogeneity fails; see homogeneity_claim and homogeneity_parameter");
    }
    let verdict = if skipped > 0 {
        report.note(format!("{skipped} samples produced infinite values and were skipped"));
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(worst[..3].iter().all(|w| *w <= AXIOM_TOL))
    };
    report.set_verdict(verdict);
    Ok(report)
}

fn finite_all<const N: usize>(values: &[Extended; N]) -> Option<[f64; N]> {
    let mut out = [0.0; N];
    for (o, v) in out.iter_mut().zip(values) {
        *o = v.finite()?;
    }
    Some(out)
}

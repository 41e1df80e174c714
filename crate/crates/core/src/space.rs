//! Finite sample spaces and the objects living on them.
//!
//! On a finite `Omega` every Orlicz space collapses to `R^n`, so a claim is a
//! vector indexed by atoms and a probability measure `Q << P` is a vector on the
//! simplex. Densities are stored as the measure itself; the Radon-Nikodym view
//! `q_k / p_k` is available through [`Density::ratio`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{Error, Result};
use crate::math::{self, dot};
use crate::solvers::bisect_root;

const SUM_TOL: f64 = 1e-12;

/// Atoms with strictly positive reference probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSpace {
    atoms: Vec<String>,
    probs: Vec<f64>,
}

impl SampleSpace {
    pub fn new(atoms: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("sample space needs at least one atom"));
        }
        Error::check_dim(atoms.len(), probs.len())?;
        if probs.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(Error::invalid("reference probabilities must be strictly positive"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::invalid(format!("reference probabilities sum to {total}, not 1")));
        }
        Ok(SampleSpace { atoms, probs })
    }

    /// Atoms labelled `w1..wn` with the given probabilities.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let atoms = (1..=probs.len()).map(|k| format!("w{k}")).collect();
        Self::new(atoms, probs)
    }

    /// Renormalizes positive weights into probabilities.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::invalid("weights must be strictly positive"));
        }
        let total: f64 = weights.iter().sum();
        let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        fix_sum(&mut probs);
        Self::from_probs(probs)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("sample space needs at least one atom"));
        }
        Self::from_weights(&alloc::vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// The reference measure as a density.
    pub fn reference(&self) -> Density {
        Density(self.probs.clone())
    }
}

// Push rounding drift of a normalized vector into its largest entry.
fn fix_sum(v: &mut [f64]) {
    let total: f64 = v.iter().sum();
    if let Some(k) = (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])) {
        v[k] += 1.0 - total;
    }
}

/// A terminal payoff, one real value per atom.
#[derive(Clone, Debug, PartialEq)]
pub struct Claim(Vec<f64>);

impl Claim {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("claim"));
        }
        Ok(Claim(values))
    }

    pub fn zeros(n: usize) -> Self {
        Claim(alloc::vec![0.0; n])
    }

    pub fn constant(n: usize, r: f64) -> Self {
        Claim(alloc::vec![r; n])
    }

    /// `scale * 1_{omega_k}`.
    pub fn indicator(n: usize, k: usize, scale: f64) -> Self {
        let mut v = alloc::vec![0.0; n];
        v[k] = scale;
        Claim(v)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Claim {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// A probability measure on the atoms, stored as the vector `Q({omega_k})`.
#[derive(Clone, Debug, PartialEq)]
pub struct Density(Vec<f64>);

impl Density {
    pub fn new(q: Vec<f64>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::invalid("density needs at least one atom"));
        }
        if q.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("density entries must be finite and nonnegative"));
        }
        let total: f64 = q.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::invalid(format!("density sums to {total}, not 1")));
        }
        Ok(Density(q))
    }

    /// Cleans solver output: clips entries within `1e-9` of zero and renormalizes.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let mut q: Vec<f64> = weights
            .iter()
            .map(|&w| if w < 0.0 && w > -1e-9 { 0.0 } else { w })
            .collect();
        if q.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("density weights must be nonnegative"));
        }
        let total: f64 = q.iter().sum();
        if total <= 0.0 {
            return Err(Error::invalid("density weights sum to zero"));
        }
        q.iter_mut().for_each(|v| *v /= total);
        fix_sum(&mut q);
        Density::new(q)
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::from_weights(&alloc::vec![1.0; n])
    }

    pub fn point_mass(n: usize, k: usize) -> Self {
        let mut q = alloc::vec![0.0; n];
        q[k] = 1.0;
        Density(q)
    }

    /// Two-atom density `(q1, 1 - q1)`.
    pub fn two_point(q1: f64) -> Result<Self> {
        Self::new(alloc::vec![q1, 1.0 - q1])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_equivalent(&self) -> bool {
        self.0.iter().all(|q| *q > 0.0)
    }

    /// `dQ/dP` as a vector.
    pub fn ratio(&self, space: &SampleSpace) -> Result<Vec<f64>> {
        Error::check_dim(space.dim(), self.dim())?;
        Ok(self.0.iter().zip(space.probs()).map(|(q, p)| q / p).collect())
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Density {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityClass {
    /// `Q ~ P`: every atom carries mass.
    Equivalent,
    /// `Q << P` only.
    AbsolutelyContinuous,
}

pub fn classify_density(space: &SampleSpace, q: &Density) -> Result<DensityClass> {
    Error::check_dim(space.dim(), q.dim())?;
    Ok(if q.is_equivalent() { DensityClass::Equivalent } else { DensityClass::AbsolutelyContinuous })
}

/// `E_Q[x]` as a plain dot product.
pub fn expectation(space: &SampleSpace, q: &Density, x: &Claim) -> Result<f64> {
    Error::check_dim(space.dim(), q.dim())?;
    Error::check_dim(space.dim(), x.len())?;
    Ok(dot(q, x))
}

/// Even convex functions with `Phi(0) = 0`, finite near the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum YoungFunction {
    /// `|a|^p`, `p >= 1`.
    Power { p: f64 },
    /// `exp(gamma |a|) - 1`.
    Exponential { gamma: f64 },
    /// `|a|` on `[-1, 1]`, `+inf` outside.
    Capped,
}

impl YoungFunction {
    pub fn validate(&self) -> Result<()> {
        match *self {
            YoungFunction::Power { p } if !(p >= 1.0 && p.is_finite()) => {
                Err(Error::invalid("power Young function needs finite p >= 1"))
            }
            YoungFunction::Exponential { gamma } if !(gamma > 0.0 && gamma.is_finite()) => {
                Err(Error::invalid("exponential Young function needs gamma > 0"))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, a: f64) -> f64 {
        let t = a.abs();
        match *self {
            YoungFunction::Power { p } => {
                if p == 2.0 {
                    t * t
                } else {
                    math::powf(t, p)
                }
            }
            YoungFunction::Exponential { gamma } => libm::expm1(gamma * t),
            YoungFunction::Capped => {
                if t <= 1.0 {
                    t
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// A derivative of `Phi` at `a` (right derivative at kinks).
    pub fn derivative(&self, a: f64) -> f64 {
        let t = a.abs();
        let s = if a < 0.0 { -1.0 } else { 1.0 };
        match *self {
            YoungFunction::Power { p } => {
                if t == 0.0 {
                    if p == 1.0 { s } else { 0.0 }
                } else {
                    s * p * math::powf(t, p - 1.0)
                }
            }
            YoungFunction::Exponential { gamma } => s * gamma * math::exp(gamma * t),
            YoungFunction::Capped => {
                if t <= 1.0 {
                    s
                } else {
                    f64::INFINITY * s
                }
            }
        }
    }
}

/// The Luxemburg norm `inf{c > 0 : E[Phi(x / c)] <= 1}` under `P`.
pub fn luxemburg_norm(phi: &YoungFunction, space: &SampleSpace, x: &Claim) -> Result<f64> {
    phi.validate()?;
    Error::check_dim(space.dim(), x.len())?;
    let sup = math::max_abs(x);
    if sup == 0.0 {
        return Ok(0.0);
    }
    let modular = |c: f64| -> f64 {
        space.probs().iter().zip(x.iter()).map(|(p, v)| p * phi.eval(v / c)).sum::<f64>()
    };
    // E[Phi(x/c)] is nonincreasing in c; widen until the bracket straddles 1.
    let mut hi = 2.0 * sup;
    while modular(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    loop {
        lo /= 2.0;
        if modular(lo) > 1.0 {
            break;
        }
        if lo < f64::MIN_POSITIVE {
            return Ok(0.0);
        }
    }
    bisect_root(|c| 1.0 - modular(c), lo, hi, 1e-15 * hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn half() -> SampleSpace {
        SampleSpace::from_probs(vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn expectation_examples() {
        let s = half();
        let e = |q: Vec<f64>, x: Vec<f64>| {
            expectation(&s, &Density::new(q).unwrap(), &Claim::new(x).unwrap()).unwrap()
        };
        assert_eq!(e(vec![1.0, 0.0], vec![5.0, -3.0]), 5.0);
        assert_eq!(e(vec![0.5, 0.5], vec![1.0, -1.0]), 0.0);
        assert!((e(vec![0.75, 0.25], vec![-0.5, 0.0]) + 0.375).abs() < 1e-15);
    }

    #[test]
    fn expectation_rejects_dimension_mismatch() {
        let s = half();
        let q = Density::uniform(2).unwrap();
        let x = Claim::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(expectation(&s, &q, &x), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn sample_space_validation() {
        assert!(SampleSpace::from_probs(vec![]).is_err());
        assert!(SampleSpace::from_probs(vec![0.5, 0.6]).is_err());
        assert!(SampleSpace::from_probs(vec![1.0, 0.0]).is_err());
        assert!(SampleSpace::from_weights(&[1.0, 2.0, 1.0]).is_ok());
    }

    #[test]
    fn claim_rejects_nan() {
        assert!(Claim::new(vec![1.0, f64::NAN]).is_err());
        assert!(Claim::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn luxemburg_examples() {
        let s = half();
        let sq = YoungFunction::Power { p: 2.0 };
        let n = |x: Vec<f64>| luxemburg_norm(&sq, &s, &Claim::new(x).unwrap()).unwrap();
        assert!((n(vec![1.0, 1.0]) - 1.0).abs() < 1e-12);
        assert!((n(vec![2.0, 0.0]) - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(n(vec![0.0, 0.0]), 0.0);
    }

    #[test]
    fn luxemburg_capped_is_sup_norm() {
        let s = SampleSpace::from_probs(vec![0.25, 0.75]).unwrap();
        let x = Claim::new(vec![3.0, -1.0]).unwrap();
        let v = luxemburg_norm(&YoungFunction::Capped, &s, &x).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn classify() {
        let s = half();
        let c = |q: Vec<f64>| classify_density(&s, &Density::new(q).unwrap()).unwrap();
        assert_eq!(c(vec![0.5, 0.5]), DensityClass::Equivalent);
        assert_eq!(c(vec![1.0, 0.0]), DensityClass::AbsolutelyContinuous);
        assert_eq!(c(vec![0.999, 0.001]), DensityClass::Equivalent);
    }

    #[test]
    fn ratio_view() {
        let s = SampleSpace::from_probs(vec![0.25, 0.75]).unwrap();
        let q = Density::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(q.ratio(&s).unwrap(), vec![2.0, 0.5 / 0.75]);
    }
}

//! Dense two-phase tableau simplex with Bland's rule.
//!
//! Problem sizes in this crate stay in the low hundreds of variables, so the
//! tableau is stored densely and rebuilt for every solve.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const EPS_REDUCED: f64 = 1e-10;
const EPS_PIVOT: f64 = 1e-10;
const MAX_PIVOTS: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// `max` or `min` of `c . x` subject to row constraints and per-variable bounds.
///
/// Variables default to `[0, +inf)`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    objective: Vec<f64>,
    maximize: bool,
    constraints: Vec<Constraint>,
    bounds: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    /// Sensitivity of the optimal value to each row's right-hand side.
    pub duals: Vec<f64>,
    /// Dual objective, including the contribution of variable bounds.
    pub dual_value: f64,
}

impl LpSolution {
    pub fn duality_gap(&self) -> f64 {
        (self.value - self.dual_value).abs()
    }
}

#[derive(Clone, Debug)]
pub enum SolveResult {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl SolveResult {
    pub fn status(&self) -> LpStatus {
        match self {
            SolveResult::Optimal(_) => LpStatus::Optimal,
            SolveResult::Infeasible => LpStatus::Infeasible,
            SolveResult::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn optimal(self) -> Option<LpSolution> {
        match self {
            SolveResult::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn maximize(objective: Vec<f64>) -> Self {
        Self::with_direction(objective, true)
    }

    pub fn minimize(objective: Vec<f64>) -> Self {
        Self::with_direction(objective, false)
    }

    fn with_direction(objective: Vec<f64>, maximize: bool) -> Self {
        let n = objective.len();
        LinearProgram { objective, maximize, constraints: Vec::new(), bounds: vec![(0.0, f64::INFINITY); n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, sense, rhs });
        self
    }

    pub fn bound(&mut self, var: usize, lo: f64, hi: f64) -> &mut Self {
        self.bounds[var] = (lo, hi);
        self
    }

    pub fn free(&mut self, var: usize) -> &mut Self {
        self.bound(var, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn solve(&self) -> Result<SolveResult> {
        solve_lp(self)
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("LP objective"));
        }
        for row in &self.constraints {
            Error::check_dim(n, row.coeffs.len())?;
            if row.coeffs.iter().any(|c| !c.is_finite()) || !row.rhs.is_finite() {
                return Err(Error::NonFinite("LP constraint"));
            }
        }
        for &(lo, hi) in &self.bounds {
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY || lo > hi {
                return Err(Error::invalid("LP variable bounds must satisfy lo <= hi"));
            }
        }
        Ok(())
    }
}

// How a user variable is rebuilt from nonnegative internal columns.
struct VarMap {
    offset: f64,
    cols: Vec<(usize, f64)>,
}

/// Solves `lp`; infeasibility and unboundedness are statuses, not errors.
pub fn solve_lp(lp: &LinearProgram) -> Result<SolveResult> {
    lp.validate()?;
    let n = lp.num_vars();
    let mut maps = Vec::with_capacity(n);
    let mut n_int = 0usize;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for &(lo, hi) in &lp.bounds {
        let map = if lo.is_finite() {
            let col = n_int;
            n_int += 1;
            if hi.is_finite() {
                bound_rows.push((col, hi - lo));
            }
            VarMap { offset: lo, cols: vec![(col, 1.0)] }
        } else if hi.is_finite() {
            let col = n_int;
            n_int += 1;
            VarMap { offset: hi, cols: vec![(col, -1.0)] }
        } else {
            let col = n_int;
            n_int += 2;
            VarMap { offset: 0.0, cols: vec![(col, 1.0), (col + 1, -1.0)] }
        };
        maps.push(map);
    }

    let dir = if lp.maximize { 1.0 } else { -1.0 };
    let mut cost = vec![0.0; n_int];
    let mut constant = 0.0;
    for (j, map) in maps.iter().enumerate() {
        let c = dir * lp.objective[j];
        constant += c * map.offset;
        for &(col, s) in &map.cols {
            cost[col] += c * s;
        }
    }

    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::with_capacity(lp.constraints.len() + bound_rows.len());
    for con in &lp.constraints {
        let mut coeffs = vec![0.0; n_int];
        let mut rhs = con.rhs;
        for (j, map) in maps.iter().enumerate() {
            let a = con.coeffs[j];
            if a == 0.0 {
                continue;
            }
            rhs -= a * map.offset;
            for &(col, s) in &map.cols {
                coeffs[col] += a * s;
            }
        }
        rows.push((coeffs, con.sense, rhs));
    }
    for &(col, cap) in &bound_rows {
        let mut coeffs = vec![0.0; n_int];
        coeffs[col] = 1.0;
        rows.push((coeffs, Sense::Le, cap));
    }

    let std = match solve_standard(&cost, &rows)? {
        StandardOutcome::Optimal(s) => s,
        StandardOutcome::Infeasible => return Ok(SolveResult::Infeasible),
        StandardOutcome::Unbounded => return Ok(SolveResult::Unbounded),
    };

    let x = maps
        .iter()
        .map(|m| m.offset + m.cols.iter().map(|&(c, s)| s * std.x[c]).sum::<f64>())
        .collect();
    let dual_int: f64 = rows.iter().zip(&std.y).map(|(r, y)| r.2 * y).sum();
    let duals = std.y[..lp.constraints.len()].iter().map(|y| dir * y).collect();
    Ok(SolveResult::Optimal(LpSolution {
        value: dir * (std.value + constant),
        x,
        duals,
        dual_value: dir * (dual_int + constant),
    }))
}

struct StandardSolution {
    value: f64,
    x: Vec<f64>,
    y: Vec<f64>,
}

enum StandardOutcome {
    Optimal(StandardSolution),
    Infeasible,
    Unbounded,
}

struct Tableau {
    width: usize,
    // rows * (width + 1); the last entry of each row is the right-hand side
    cells: Vec<f64>,
    // reduced costs, last entry is minus the current objective
    z: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rows(&self) -> usize {
        self.basis.len()
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.cells[r * (self.width + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width + 1;
        let p = self.at(r, c);
        for k in 0..w {
            self.cells[r * w + k] /= p;
        }
        let pivot_row: Vec<f64> = self.cells[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows() {
            if i == r {
                continue;
            }
            let f = self.cells[i * w + c];
            if f != 0.0 {
                for k in 0..w {
                    self.cells[i * w + k] -= f * pivot_row[k];
                }
            }
        }
        let f = self.z[c];
        if f != 0.0 {
            for k in 0..w {
                self.z[k] -= f * pivot_row[k];
            }
        }
        self.basis[r] = c;
    }

    fn price(&mut self, cost: &[f64]) {
        let w = self.width;
        self.z = vec![0.0; w + 1];
        self.z[..w].copy_from_slice(cost);
        for r in 0..self.rows() {
            let cb = cost[self.basis[r]];
            if cb == 0.0 {
                continue;
            }
            for k in 0..=w {
                self.z[k] -= cb * self.at(r, k);
            }
        }
    }

    /// Bland's rule: lowest-index improving column, lowest-index leaving basic.
    fn run(&mut self, allowed: &[bool]) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            let Some(c) = (0..self.width).find(|&j| allowed[j] && self.z[j] > EPS_REDUCED) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows() {
                let a = self.at(r, c);
                if a <= EPS_PIVOT {
                    continue;
                }
                let ratio = self.rhs(r).max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - 1e-12 || (ratio <= lratio + 1e-12 && self.basis[r] < self.basis[lr]) {
                            Some((r, ratio))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, c),
            }
        }
        Err(Error::IterationLimit("simplex"))
    }
}

// max cost . x  s.t. rows, x >= 0
fn solve_standard(cost: &[f64], rows: &[(Vec<f64>, Sense, f64)]) -> Result<StandardOutcome> {
    let n = cost.len();
    let m = rows.len();
    let mut flipped = vec![false; m];
    let mut senses = Vec::with_capacity(m);
    for (i, (_, sense, rhs)) in rows.iter().enumerate() {
        let s = if *rhs < 0.0 {
            flipped[i] = true;
            match sense {
                Sense::Le => Sense::Ge,
                Sense::Ge => Sense::Le,
                Sense::Eq => Sense::Eq,
            }
        } else {
            *sense
        };
        senses.push(s);
    }
    let mut width = n;
    let mut identity = vec![0usize; m];
    let mut surplus = vec![usize::MAX; m];
    let mut artificial = Vec::new();
    for i in 0..m {
        match senses[i] {
            Sense::Le => {
                identity[i] = width;
                width += 1;
            }
            Sense::Ge => {
                surplus[i] = width;
                identity[i] = width + 1;
                artificial.push(width + 1);
                width += 2;
            }
            Sense::Eq => {
                identity[i] = width;
                artificial.push(width);
                width += 1;
            }
        }
    }
    let mut is_art = vec![false; width];
    for &a in &artificial {
        is_art[a] = true;
    }

    let mut cells = vec![0.0; m * (width + 1)];
    for (i, (coeffs, _, rhs)) in rows.iter().enumerate() {
        let sign = if flipped[i] { -1.0 } else { 1.0 };
        let base = i * (width + 1);
        for j in 0..n {
            cells[base + j] = sign * coeffs[j];
        }
        cells[base + identity[i]] = 1.0;
        if surplus[i] != usize::MAX {
            cells[base + surplus[i]] = -1.0;
        }
        cells[base + width] = sign * rhs;
    }
    let mut tab = Tableau { width, cells, z: Vec::new(), basis: identity.clone() };

    if !artificial.is_empty() {
        let phase1: Vec<f64> = (0..width).map(|j| if is_art[j] { -1.0 } else { 0.0 }).collect();
        tab.price(&phase1);
        tab.run(&vec![true; width])?;
        let infeasibility = tab.z[width];
        let scale = rows.iter().fold(1.0f64, |s, r| s.max(r.2.abs()));
        if infeasibility > 1e-9 * scale {
            return Ok(StandardOutcome::Infeasible);
        }
        for r in 0..m {
            if !is_art[tab.basis[r]] {
                continue;
            }
            if let Some(c) = (0..width).find(|&j| !is_art[j] && tab.at(r, j).abs() > 1e-9) {
                tab.pivot(r, c);
            }
        }
    }

    let mut phase2 = vec![0.0; width];
    phase2[..n].copy_from_slice(cost);
    tab.price(&phase2);
    let allowed: Vec<bool> = (0..width).map(|j| !is_art[j]).collect();
    if !tab.run(&allowed)? {
        return Ok(StandardOutcome::Unbounded);
    }

    let mut x = vec![0.0; n];
    for r in 0..m {
        let b = tab.basis[r];
        if b < n {
            x[b] = tab.rhs(r).max(0.0);
        }
    }
    let y = (0..m)
        .map(|i| {
            let yi = -tab.z[identity[i]];
            if flipped[i] { -yi } else { yi }
        })
        .collect();
    Ok(StandardOutcome::Optimal(StandardSolution { value: -tab.z[width], x, y }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(lp: &LinearProgram) -> LpSolution {
        match lp.solve().unwrap() {
            SolveResult::Optimal(s) => s,
            other => panic!("expected optimal, got {:?}", other.status()),
        }
    }

    #[test]
    fn single_variable() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.constrain(vec![1.0], Sense::Le, 3.0);
        let s = optimal(&lp);
        assert!((s.value - 3.0).abs() < 1e-12);
        assert!(s.duality_gap() < 1e-12);
        assert!((s.duals[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_system() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.constrain(vec![1.0], Sense::Le, -1.0);
        assert_eq!(lp.solve().unwrap().status(), LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_system() {
        let mut lp = LinearProgram::maximize(vec![1.0, 1.0]);
        lp.constrain(vec![1.0, -1.0], Sense::Le, 1.0);
        assert_eq!(lp.solve().unwrap().status(), LpStatus::Unbounded);
    }

    #[test]
    fn free_and_boxed_variables() {
        // min x + 2y, x free with x >= -3 via row, y in [-1, 4]
        let mut lp = LinearProgram::minimize(vec![1.0, 2.0]);
        lp.free(0).bound(1, -1.0, 4.0);
        lp.constrain(vec![1.0, 0.0], Sense::Ge, -3.0);
        let s = optimal(&lp);
        assert!((s.value + 5.0).abs() < 1e-12);
        assert!((s.x[0] + 3.0).abs() < 1e-12 && (s.x[1] + 1.0).abs() < 1e-12);
        assert!(s.duality_gap() < 1e-12);
    }

    #[test]
    fn equality_rows_and_sensitivity() {
        // min 2a + 3b s.t. a + b = 1, a, b >= 0 -> a = 1, value 2, dual 2
        let mut lp = LinearProgram::minimize(vec![2.0, 3.0]);
        lp.constrain(vec![1.0, 1.0], Sense::Eq, 1.0);
        let s = optimal(&lp);
        assert!((s.value - 2.0).abs() < 1e-12);
        assert!((s.duals[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::maximize(vec![1.0, 1.0]);
        lp.constrain(vec![1.0, 1.0], Sense::Eq, 1.0);
        lp.constrain(vec![2.0, 2.0], Sense::Eq, 2.0);
        lp.constrain(vec![1.0, 0.0], Sense::Le, 0.3);
        let s = optimal(&lp);
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!(s.duality_gap() < 1e-10);
    }

    // The two-state superhedging LP discretized at alpha in {-1/2, .., 1/2} has
    // its optimum at the grid point alpha = 1/4.
    #[test]
    fn superhedge_like_lp() {
        let alphas: Vec<f64> = (0..=20).map(|i| -0.5 + i as f64 * 0.05).collect();
        let nvar = alphas.len() + 1;
        let mut obj = vec![0.0; nvar];
        obj[0] = 1.0;
        let mut lp = LinearProgram::minimize(obj);
        lp.free(0);
        for k in 0..2 {
            let mut row = vec![0.0; nvar];
            row[0] = 1.0;
            for (j, a) in alphas.iter().enumerate() {
                let s = if k == 0 { 1.0 } else { -1.0 };
                row[j + 1] = a * s - a * a;
            }
            let x = if k == 0 { -0.5 } else { 0.0 };
            lp.constrain(row, Sense::Ge, -x);
        }
        let mut simplex = vec![1.0; nvar];
        simplex[0] = 0.0;
        lp.constrain(simplex, Sense::Eq, 1.0);
        let s = optimal(&lp);
        // min over the convex hull of grid points is at most the alpha = 1/4 value
        assert!(s.value <= 5.0 / 16.0 + 1e-12);
        assert!(s.value >= 5.0 / 16.0 - 0.01);
        assert!(s.duality_gap() < 1e-10);
    }

    #[test]
    fn rejects_bad_bounds() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.bound(0, 2.0, 1.0);
        assert!(lp.solve().is_err());
    }
}

//! Exact linear programming.
//!
//! `max c·x s.t. A x <= b` (x free) is solved through its dual
//! `min b·y s.t. Aᵀ y = c, y >= 0`, a standard-form problem with only `n`
//! equality rows. The two-phase tableau simplex uses Bland's rule throughout,
//! so it terminates without any tolerance. The primal optimum is read off the
//! simplex multipliers of the dual.

use serde::Serialize;

use crate::scalar::{serde_rational, Field, Rational};
use crate::system::LinearSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// An optimal primal/dual pair.
///
/// `dual` has one nonnegative entry per row. For maximization `Aᵀ dual = c`,
/// for minimization `Aᵀ dual = -c`; in both cases `b · dual` equals the
/// optimal value up to the sign of the sense.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "")]
pub struct LpOptimum<T: Field = Rational> {
    #[serde(serialize_with = "serde_rational::serialize")]
    pub value: T,
    #[serde(serialize_with = "serde_rational::vec")]
    pub primal: Vec<T>,
    #[serde(serialize_with = "serde_rational::vec")]
    pub dual: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpResult<T: Field = Rational> {
    Optimal(LpOptimum<T>),
    Infeasible,
    Unbounded,
}

impl<T: Field> LpResult<T> {
    pub fn status(&self) -> LpStatus {
        match self {
            LpResult::Optimal(_) => LpStatus::Optimal,
            LpResult::Infeasible => LpStatus::Infeasible,
            LpResult::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn optimum(&self) -> Option<&LpOptimum<T>> {
        match self {
            LpResult::Optimal(opt) => Some(opt),
            _ => None,
        }
    }

    pub fn value(&self) -> Option<&T> {
        self.optimum().map(|o| &o.value)
    }
}

impl<T: Field> LpOptimum<T> {
    /// Re-checks primal feasibility, dual feasibility and equality of the two
    /// objective values, all exactly.
    pub fn certifies(&self, sys: &LinearSystem, objective: &[T], sense: Sense) -> bool {
        let n = sys.n_vars();
        if self.primal.len() != n || self.dual.len() != sys.len() || objective.len() != n {
            return false;
        }
        if !sys.contains(&self.primal) || self.dual.iter().any(|y| y.is_negative()) {
            return false;
        }
        let sign = match sense {
            Sense::Maximize => T::one(),
            Sense::Minimize => -T::one(),
        };
        for j in 0..n {
            let combo = sys
                .rows()
                .iter()
                .zip(&self.dual)
                .fold(T::zero(), |acc, (row, y)| acc + T::from_i64(row.coeffs[j]) * y.clone());
            if combo != sign.clone() * objective[j].clone() {
                return false;
            }
        }
        let primal_value = objective
            .iter()
            .zip(&self.primal)
            .fold(T::zero(), |acc, (c, x)| acc + c.clone() * x.clone());
        let dual_value = sys
            .rows()
            .iter()
            .zip(&self.dual)
            .fold(T::zero(), |acc, (row, y)| acc + T::from_i64(row.rhs) * y.clone());
        primal_value == self.value && dual_value * sign == self.value
    }
}

/// Optimizes `objective · x` over `{x : sys}` exactly.
pub fn solve_lp<T: Field>(sys: &LinearSystem, objective: &[T], sense: Sense) -> LpResult<T> {
    assert_eq!(objective.len(), sys.n_vars(), "objective length must equal n_vars");
    let c: Vec<T> = match sense {
        Sense::Maximize => objective.to_vec(),
        Sense::Minimize => objective.iter().map(|v| -v.clone()).collect(),
    };
    match maximize(sys, &c) {
        LpResult::Optimal(mut opt) => {
            if sense == Sense::Minimize {
                opt.value = -opt.value;
            }
            LpResult::Optimal(opt)
        }
        other => other,
    }
}

/// `max coeffs · x` for an integer objective, the usual validity query.
pub fn maximize_row<T: Field>(sys: &LinearSystem, coeffs: &[i64]) -> LpResult<T> {
    let c: Vec<T> = coeffs.iter().map(|&v| T::from_i64(v)).collect();
    maximize(sys, &c)
}

/// A point of the polyhedron, or `None` when it is empty.
pub fn feasible_point<T: Field>(sys: &LinearSystem) -> Option<Vec<T>> {
    let zero = vec![T::zero(); sys.n_vars()];
    match maximize(sys, &zero) {
        LpResult::Optimal(opt) => Some(opt.primal),
        _ => None,
    }
}

fn maximize<T: Field>(sys: &LinearSystem, c: &[T]) -> LpResult<T> {
    let n = sys.n_vars();
    let rows = sys.rows();
    // Dual in standard form: n equality rows, one column per primal row.
    let a: Vec<Vec<T>> = (0..n)
        .map(|j| rows.iter().map(|r| T::from_i64(r.coeffs[j])).collect())
        .collect();
    let cost: Vec<T> = rows.iter().map(|r| T::from_i64(r.rhs)).collect();
    match solve_standard(a, c.to_vec(), cost) {
        StandardOutcome::Optimal { y, multipliers } => {
            let value = rows
                .iter()
                .zip(&y)
                .fold(T::zero(), |acc, (r, yi)| acc + T::from_i64(r.rhs) * yi.clone());
            LpResult::Optimal(LpOptimum {
                value,
                primal: multipliers,
                dual: y,
            })
        }
        // Dual unbounded: the primal is empty.
        StandardOutcome::Unbounded => LpResult::Infeasible,
        // Dual empty: the primal is empty or unbounded.
        StandardOutcome::Infeasible => {
            if c.iter().all(|v| v.is_zero()) || feasible_point::<T>(sys).is_none() {
                LpResult::Infeasible
            } else {
                LpResult::Unbounded
            }
        }
    }
}

enum StandardOutcome<T> {
    Optimal { y: Vec<T>, multipliers: Vec<T> },
    Infeasible,
    Unbounded,
}

struct Tableau<T> {
    /// `m` rows of `width + 1` entries; the last entry is the right-hand side.
    rows: Vec<Vec<T>>,
    /// Reduced costs, last entry is minus the objective value.
    cost_row: Vec<T>,
    basis: Vec<usize>,
    /// Number of structural columns; artificial columns follow them.
    structural: usize,
}

impl<T: Field> Tableau<T> {
    fn rhs_col(&self) -> usize {
        self.structural + self.rows.len()
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let inv = T::one() / self.rows[p][q].clone();
        for v in self.rows[p].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() * inv.clone();
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[p]);
        let support: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        let eliminate = |row: &mut Vec<T>| {
            let factor = row[q].clone();
            if factor.is_zero() {
                return;
            }
            for &j in &support {
                row[j] = row[j].clone() - factor.clone() * pivot_row[j].clone();
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != p {
                eliminate(row);
            }
        }
        eliminate(&mut self.cost_row);
        self.rows[p] = pivot_row;
        self.basis[p] = q;
    }

    /// Runs Bland's rule over structural columns. Returns false when unbounded.
    fn optimize(&mut self) -> bool {
        let rhs = self.rhs_col();
        loop {
            let Some(q) = (0..self.structural).find(|&j| self.cost_row[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, T)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[q].is_positive() {
                    continue;
                }
                let ratio = row[rhs].clone() / row[q].clone();
                let better = match &leave {
                    None => true,
                    Some((l, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((p, _)) => self.pivot(p, q),
                None => return false,
            }
        }
    }

    fn reset_costs(&mut self, cost: &[T]) {
        let width = self.rhs_col() + 1;
        let col_cost = |j: usize| -> T {
            if j < self.structural {
                cost[j].clone()
            } else {
                T::zero()
            }
        };
        let mut z: Vec<T> = (0..width)
            .map(|j| if j < self.rhs_col() { col_cost(j) } else { T::zero() })
            .collect();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = col_cost(self.basis[i]);
            if cb.is_zero() {
                continue;
            }
            for j in 0..width {
                if !row[j].is_zero() {
                    z[j] = z[j].clone() - cb.clone() * row[j].clone();
                }
            }
        }
        self.cost_row = z;
    }
}

/// `min cost·y s.t. a y = b, y >= 0` by the two-phase method.
fn solve_standard<T: Field>(a: Vec<Vec<T>>, b: Vec<T>, cost: Vec<T>) -> StandardOutcome<T> {
    let m = a.len();
    let structural = cost.len();
    let width = structural + m + 1;
    let mut signs = Vec::with_capacity(m);
    let mut rows = Vec::with_capacity(m);
    for (i, (arow, bi)) in a.into_iter().zip(b).enumerate() {
        let flip = bi.is_negative();
        signs.push(flip);
        let mut row = Vec::with_capacity(width);
        row.extend(arow.into_iter().map(|v| if flip { -v } else { v }));
        row.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
        row.push(if flip { -bi } else { bi });
        rows.push(row);
    }

    // Phase one: minimize the sum of artificials.
    let mut cost_row = vec![T::zero(); width];
    for row in &rows {
        for j in 0..structural {
            cost_row[j] = cost_row[j].clone() - row[j].clone();
        }
        cost_row[width - 1] = cost_row[width - 1].clone() - row[width - 1].clone();
    }
    let mut tab = Tableau {
        rows,
        cost_row,
        basis: (structural..structural + m).collect(),
        structural,
    };
    tab.optimize();
    if !tab.cost_row[width - 1].is_zero() {
        return StandardOutcome::Infeasible;
    }
    // Drive zero-level artificials out of the basis where a structural column allows it.
    for p in 0..m {
        if tab.basis[p] >= structural {
            if let Some(q) = (0..structural).find(|&j| !tab.rows[p][j].is_zero()) {
                tab.pivot(p, q);
            }
        }
    }

    tab.reset_costs(&cost);
    if !tab.optimize() {
        return StandardOutcome::Unbounded;
    }

    let mut y = vec![T::zero(); structural];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < structural {
            y[bv] = tab.rows[i][width - 1].clone();
        }
    }
    let multipliers = (0..m)
        .map(|i| {
            let v = -tab.cost_row[structural + i].clone();
            if signs[i] {
                -v
            } else {
                v
            }
        })
        .collect();
    StandardOutcome::Optimal { y, multipliers }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational_from_i64 as r;
    use num_rational::Rational64;

    fn ones(n: usize) -> Vec<Rational> {
        vec![r(1); n]
    }

    #[test]
    fn unit_square_max() {
        let sys = LinearSystem::unit_box(2);
        let res = solve_lp(&sys, &ones(2), Sense::Maximize);
        let opt = res.optimum().unwrap();
        assert_eq!(opt.value, r(2));
        assert_eq!(opt.primal, vec![r(1), r(1)]);
        assert!(opt.certifies(&sys, &ones(2), Sense::Maximize));
    }

    #[test]
    fn contradictory_bounds_infeasible() {
        let sys = LinearSystem::from_pairs(1, &[(&[-1], -1), (&[1], 0)]);
        assert_eq!(solve_lp(&sys, &ones(1), Sense::Minimize), LpResult::Infeasible);
        assert_eq!(solve_lp(&sys, &ones(1), Sense::Maximize), LpResult::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let sys = LinearSystem::from_pairs(2, &[(&[-1, 0], 0), (&[0, -1], 0)]);
        assert_eq!(solve_lp(&sys, &ones(2), Sense::Maximize), LpResult::Unbounded);
        let min = solve_lp(&sys, &ones(2), Sense::Minimize);
        assert_eq!(min.value(), Some(&r(0)));
        assert!(min.optimum().unwrap().certifies(&sys, &ones(2), Sense::Minimize));
    }

    #[test]
    fn empty_system() {
        let sys = LinearSystem::new(2);
        assert_eq!(solve_lp(&sys, &ones(2), Sense::Maximize), LpResult::Unbounded);
        let zero = vec![r(0); 2];
        assert_eq!(solve_lp(&sys, &zero, Sense::Maximize).value(), Some(&r(0)));
    }

    #[test]
    fn fractional_optimum_and_min_sense() {
        // 2x1 <= 1, 0 <= x1 <= 1
        let sys = LinearSystem::from_pairs(1, &[(&[2], 1), (&[-1], 0), (&[1], 1)]);
        let max = solve_lp(&sys, &ones(1), Sense::Maximize);
        assert_eq!(max.value(), Some(&Rational::new(1.into(), 2.into())));
        let c = vec![r(-3)];
        let min = solve_lp(&sys, &c, Sense::Minimize);
        assert_eq!(min.value(), Some(&Rational::new((-3).into(), 2.into())));
        assert!(min.optimum().unwrap().certifies(&sys, &c, Sense::Minimize));
    }

    #[test]
    fn implicit_equality_and_degeneracy() {
        // x1 + x2 = 1 written twice, x >= 0.
        let sys = LinearSystem::from_pairs(
            2,
            &[(&[1, 1], 1), (&[-1, -1], -1), (&[2, 2], 2), (&[-1, 0], 0), (&[0, -1], 0)],
        );
        let c = vec![r(3), r(1)];
        let res = solve_lp(&sys, &c, Sense::Maximize);
        let opt = res.optimum().unwrap();
        assert_eq!(opt.value, r(3));
        assert!(opt.certifies(&sys, &c, Sense::Maximize));
    }

    #[test]
    fn generic_over_fixed_width_ratio() {
        let sys = LinearSystem::from_pairs(2, &[(&[1, 2], 3), (&[2, 1], 3), (&[-1, 0], 0), (&[0, -1], 0)]);
        let c = vec![Rational64::from_i64(1); 2];
        let res = solve_lp(&sys, &c, Sense::Maximize);
        let opt = res.optimum().unwrap();
        assert_eq!(opt.value, Rational64::from_i64(2));
        assert!(opt.certifies(&sys, &c, Sense::Maximize));
    }
}

use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::scalar::{dot, Field};

/// An integer inequality `coeffs · x <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Inequality {
    pub coeffs: Vec<i64>,
    pub rhs: i64,
}

impl Inequality {
    pub fn new(coeffs: Vec<i64>, rhs: i64) -> Self {
        Self { coeffs, rhs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero_row(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// `0 <= rhs` with `rhs >= 0`: satisfied everywhere.
    pub fn is_trivial(&self) -> bool {
        self.is_zero_row() && self.rhs >= 0
    }

    /// `0 <= rhs` with `rhs < 0`: the empty halfspace.
    pub fn is_infeasible(&self) -> bool {
        self.is_zero_row() && self.rhs < 0
    }

    /// Divides coefficients and right-hand side by their joint gcd.
    ///
    /// Scaling by a positive integer never changes the halfspace, so two rows
    /// describing the same halfspace share a canonical representative. No
    /// rounding of the right-hand side happens here; `(2,2 | 3)` stays as is.
    pub fn canonicalize(&self) -> Inequality {
        let g = self.joint_gcd();
        if g <= 1 {
            return self.clone();
        }
        Inequality {
            coeffs: self.coeffs.iter().map(|c| c / g).collect(),
            rhs: self.rhs / g,
        }
    }

    pub fn joint_gcd(&self) -> i64 {
        self.coeffs
            .iter()
            .fold(self.rhs.abs(), |g, &c| g.gcd(&c))
    }

    /// Whether `(coeffs | rhs)` of both rows are positive multiples of each other.
    pub fn same_halfspace(&self, other: &Inequality) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        // lambda * self = mu * other with lambda, mu > 0: cross-multiply
        // against a pivot entry that is nonzero in one of them.
        let a = self.coeffs.iter().chain(std::iter::once(&self.rhs));
        let b = other.coeffs.iter().chain(std::iter::once(&other.rhs));
        let pairs: Vec<(i128, i128)> = a.zip(b).map(|(&x, &y)| (x as i128, y as i128)).collect();
        let Some(&(px, py)) = pairs.iter().find(|(x, y)| *x != 0 || *y != 0) else {
            return true;
        };
        if px == 0 || py == 0 || (px > 0) != (py > 0) {
            return false;
        }
        pairs.iter().all(|&(x, y)| x * py == y * px)
    }

    pub fn evaluate<T: Field>(&self, x: &[T]) -> T {
        dot(&self.coeffs, x)
    }

    /// `rhs - coeffs · x`.
    pub fn slack<T: Field>(&self, x: &[T]) -> T {
        T::from_i64(self.rhs) - self.evaluate(x)
    }

    pub fn is_satisfied_by<T: Field>(&self, x: &[T]) -> bool {
        !self.slack(x).is_negative()
    }

    pub fn is_tight_at<T: Field>(&self, x: &[T]) -> bool {
        self.slack(x).is_zero()
    }

    pub fn is_satisfied_by_integer(&self, x: &[i64]) -> bool {
        let lhs: i128 = self
            .coeffs
            .iter()
            .zip(x)
            .map(|(&c, &v)| c as i128 * v as i128)
            .sum();
        lhs <= self.rhs as i128
    }

    pub fn negated_coeffs(&self) -> Vec<i64> {
        self.coeffs.iter().map(|c| -c).collect()
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.coeffs {
            write!(f, "{c} ")?;
        }
        write!(f, "{}", self.rhs)
    }
}

//! Vertices, integrality and integer points of bounded systems.
//!
//! Vertices are computed with the double description method on the
//! homogenized cone `{(x, t) : A x - b t <= 0, t >= 0}`, whose extreme rays
//! with `t > 0` are the vertices of a bounded polyhedron. Adjacency of rays
//! is decided combinatorially from their zero sets.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use crate::dd;
use crate::error::{Error, Result};
use crate::linalg::{independent_subset, integer_rows, rank};
use crate::lp::{maximize_row, LpResult};
use crate::scalar::{serde_rational, Field, Rational};
use crate::system::LinearSystem;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "")]
pub struct Polytope<T: Field = Rational> {
    /// Sorted lexicographically, duplicate free.
    #[serde(serialize_with = "serde_rational::vec_of_vec")]
    pub vertices: Vec<Vec<T>>,
    /// All rows tight at each vertex; they always have rank `n`.
    pub tight_rows: Vec<Vec<usize>>,
}

impl<T: Field> Polytope<T> {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// A linearly independent subset of size `n` of the rows tight at vertex `i`.
    pub fn basis(&self, sys: &LinearSystem, i: usize) -> Vec<usize> {
        let rows: Vec<&[i64]> = self.tight_rows[i]
            .iter()
            .map(|&r| sys.row(r).coeffs.as_slice())
            .collect();
        let chosen = independent_subset::<T>(&integer_rows(&rows));
        chosen.into_iter().map(|k| self.tight_rows[i][k]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "", tag = "integral")]
pub enum Integrality<T: Field = Rational> {
    #[serde(rename = "true")]
    Integral,
    #[serde(rename = "false")]
    Fractional {
        #[serde(serialize_with = "serde_rational::vec")]
        vertex: Vec<T>,
        basis: Vec<usize>,
    },
}

impl<T: Field> Integrality<T> {
    pub fn is_integral(&self) -> bool {
        matches!(self, Integrality::Integral)
    }
}

/// Checks `sys` is nonempty and bounded with `2n` LPs maximizing `±x_i`.
pub fn check_bounded(sys: &LinearSystem) -> Result<()> {
    let n = sys.n_vars();
    for i in 0..n {
        for sign in [1, -1] {
            let mut c = vec![0; n];
            c[i] = sign;
            match maximize_row::<Rational>(sys, &c) {
                LpResult::Optimal(_) => {}
                LpResult::Infeasible => return Err(Error::InfeasibleInput),
                LpResult::Unbounded => return Err(Error::UnboundedInput),
            }
        }
    }
    if n == 0 && crate::lp::feasible_point::<Rational>(sys).is_none() {
        return Err(Error::InfeasibleInput);
    }
    Ok(())
}

/// Exact vertex set of a bounded, nonempty system.
pub fn vertices<T: Field>(sys: &LinearSystem) -> Result<Polytope<T>> {
    check_bounded(sys)?;
    let n = sys.n_vars();
    let mut verts: Vec<Vec<T>> = vertex_rays(sys)
        .into_iter()
        .map(|z| z[..n].iter().map(|v| T::from_bigint_ratio(v, &z[n])).collect())
        .collect();
    if n == 0 {
        verts = vec![Vec::new()];
    }
    verts.sort();
    verts.dedup();
    let tight_rows = verts.iter().map(|v| sys.tight_rows(v)).collect();
    Ok(Polytope {
        vertices: verts,
        tight_rows,
    })
}

pub fn is_integral<T: Field>(sys: &LinearSystem, poly: &Polytope<T>) -> Integrality<T> {
    for (i, v) in poly.vertices.iter().enumerate() {
        if v.iter().any(|x| !x.is_integral()) {
            return Integrality::Fractional {
                vertex: v.clone(),
                basis: poly.basis(sys, i),
            };
        }
    }
    Integrality::Integral
}

/// Whether `vertex` is the unique solution of its tight rows in `sys`.
pub fn reproduces_vertex<T: Field>(sys: &LinearSystem, vertex: &[T], rows: &[usize]) -> bool {
    if !sys.contains(vertex) || rows.iter().any(|&r| !sys.row(r).is_tight_at(vertex)) {
        return false;
    }
    let coeffs: Vec<&[i64]> = rows.iter().map(|&r| sys.row(r).coeffs.as_slice()).collect();
    rank::<T>(&integer_rows(&coeffs)) == sys.n_vars()
}

/// Vertices of a bounded system as primitive integer vectors `(t·x, t)`, `t > 0`.
pub(crate) fn vertex_rays(sys: &LinearSystem) -> Vec<Vec<BigInt>> {
    let n = sys.n_vars();
    dd::extreme_rays_exact(&cone_constraints(sys), n + 1)
        .into_iter()
        .filter(|z| z[n].is_positive())
        .collect()
}

/// Homogenized constraints `(a, -b)` of `{(x, t) : A x - b t <= 0, t >= 0}`.
fn cone_constraints(sys: &LinearSystem) -> Vec<Vec<i64>> {
    let dim = sys.n_vars() + 1;
    let mut t_row = vec![0; dim];
    t_row[dim - 1] = -1;
    let mut out = vec![t_row];
    // Input order keeps intermediate cones small on cut-augmented systems
    // (original rows first); sorting by sparsity builds the whole box first.
    for row in sys.rows() {
        let mut h = row.coeffs.clone();
        h.push(-row.rhs);
        out.push(h);
    }
    out
}

/// All integer points of a box, in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegerPointSet {
    pub points: Vec<Vec<i64>>,
}

impl IntegerPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, point: &[i64]) -> bool {
        self.points.iter().any(|p| p == point)
    }
}

/// Integer points of `sys` inside `bounds` (inclusive, one pair per variable).
pub fn integer_points(sys: &LinearSystem, bounds: &[(i64, i64)], limit: u64) -> Result<IntegerPointSet> {
    if bounds.len() != sys.n_vars() {
        return Err(Error::DimensionMismatch {
            expected: sys.n_vars(),
            found: bounds.len(),
        });
    }
    let mut volume: u128 = 1;
    for &(lo, hi) in bounds {
        if hi < lo {
            return Ok(IntegerPointSet { points: Vec::new() });
        }
        volume = volume.saturating_mul((hi as i128 - lo as i128 + 1) as u128);
    }
    if volume > limit as u128 {
        return Err(Error::limit("integer box", volume, limit as u128));
    }
    let mut points = Vec::new();
    let mut x: Vec<i64> = bounds.iter().map(|b| b.0).collect();
    loop {
        if sys.rows().iter().all(|r| r.is_satisfied_by_integer(&x)) {
            points.push(x.clone());
        }
        // odometer, last coordinate fastest
        let mut k = x.len();
        loop {
            if k == 0 {
                return Ok(IntegerPointSet { points });
            }
            k -= 1;
            if x[k] < bounds[k].1 {
                x[k] += 1;
                break;
            }
            x[k] = bounds[k].0;
        }
    }
}

/// Integer box `[ceil(min x_i), floor(max x_i)]` of a bounded system.
pub fn integer_box(sys: &LinearSystem) -> Result<Vec<(i64, i64)>> {
    let n = sys.n_vars();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut ends = [0i64; 2];
        for (slot, sign) in [(0, -1), (1, 1)] {
            let mut c = vec![0; n];
            c[i] = sign;
            let value = match maximize_row::<Rational>(sys, &c) {
                LpResult::Optimal(opt) => opt.value,
                LpResult::Infeasible => return Err(Error::InfeasibleInput),
                LpResult::Unbounded => return Err(Error::UnboundedInput),
            };
            let end = if sign > 0 { value.floor() } else { -(value.floor()) };
            ends[slot] = num_traits::ToPrimitive::to_i64(end.numer()).ok_or(Error::TooLarge {
                what: "integer box bound",
                size: usize::MAX,
                max: i64::MAX as usize,
            })?;
        }
        out.push((ends[0], ends[1]));
    }
    Ok(out)
}

/// Whether both systems define the same polyhedron: every row of each is
/// valid for the other (a row is vacuously valid over an empty polyhedron).
pub fn equal_polyhedra(a: &LinearSystem, b: &LinearSystem) -> Result<bool> {
    if a.n_vars() != b.n_vars() {
        return Err(Error::DimensionMismatch {
            expected: a.n_vars(),
            found: b.n_vars(),
        });
    }
    Ok(all_rows_valid(a, b) && all_rows_valid(b, a))
}

/// Whether every row of `rows` is valid for the polyhedron of `over`.
pub fn all_rows_valid(rows: &LinearSystem, over: &LinearSystem) -> bool {
    rows.rows().iter().all(|row| match maximize_row::<Rational>(over, &row.coeffs) {
        LpResult::Optimal(opt) => opt.value <= Rational::from_integer(row.rhs.into()),
        LpResult::Infeasible => true,
        LpResult::Unbounded => false,
    })
}

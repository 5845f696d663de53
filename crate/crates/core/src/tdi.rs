//! Total dual integrality at desk scale.
//!
//! A bounded system is TDI iff at every vertex the rows tight there form a
//! Hilbert basis of the cone they generate. Hilbert bases are verified by
//! checking every integer point of the generators' zonotope box.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::halfclosure::ScaledPoint;
use crate::inequality::Inequality;
use crate::linalg::{integer_rows, rank};
use crate::lp::{feasible_point, maximize_row, LpResult};
use crate::polyhedra::{is_integral, vertices, Integrality};
use crate::redundancy::irredundant_rows;
use crate::scalar::{rational_from_i64, serde_rational, Rational};
use crate::system::LinearSystem;

/// Largest active-row count handled by the general checker.
pub const MAX_ACTIVE_ROWS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HilbertQuery {
    pub generators: Vec<Vec<i64>>,
}

impl HilbertQuery {
    pub fn new(generators: Vec<Vec<i64>>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::EmptyGenerators);
        };
        let dim = first.len();
        if let Some(g) = generators.iter().find(|g| g.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: g.len(),
            });
        }
        Ok(Self { generators })
    }

    pub fn dim(&self) -> usize {
        self.generators[0].len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HilbertVerdict {
    pub hilbert_basis: bool,
    /// An integer point of the cone that is no nonnegative integer combination.
    pub missing_point: Option<Vec<i64>>,
}

/// Scans the integer points of the zonotope box of `q`.
///
/// Every integer point `z` of the cone is `z0 + sum floor(l_i) g_i` with `z0`
/// in the zonotope, so it suffices to test points of its bounding box.
pub fn is_hilbert_basis(q: &HilbertQuery, limit: u64) -> Result<HilbertVerdict> {
    let dim = q.dim();
    let mut bounds = vec![(0i64, 0i64); dim];
    for g in &q.generators {
        for (b, &c) in bounds.iter_mut().zip(g) {
            if c < 0 {
                b.0 += c;
            } else {
                b.1 += c;
            }
        }
    }
    let volume = bounds
        .iter()
        .fold(1u128, |acc, (lo, hi)| acc.saturating_mul((hi - lo + 1) as u128));
    if volume > limit as u128 {
        return Err(Error::limit("zonotope box", volume, limit as u128));
    }
    let semigroup = Semigroup::new(&q.generators);
    let mut z: Vec<i64> = bounds.iter().map(|b| b.0).collect();
    loop {
        if !semigroup.contains(&z) && in_cone(&q.generators, &z) {
            return Ok(HilbertVerdict {
                hilbert_basis: false,
                missing_point: Some(z),
            });
        }
        let mut k = dim;
        loop {
            if k == 0 {
                return Ok(HilbertVerdict {
                    hilbert_basis: true,
                    missing_point: None,
                });
            }
            k -= 1;
            if z[k] < bounds[k].1 {
                z[k] += 1;
                break;
            }
            z[k] = bounds[k].0;
        }
    }
}

/// `λ >= 0` system for `sum λ_i g_i = z`.
fn cone_system(generators: &[Vec<i64>], z: &[i64]) -> LinearSystem {
    let p = generators.len();
    let mut sys = LinearSystem::new(p);
    for i in 0..p {
        let mut row = vec![0; p];
        row[i] = -1;
        sys.push(Inequality::new(row, 0)).unwrap();
    }
    for (j, &zj) in z.iter().enumerate() {
        let row: Vec<i64> = generators.iter().map(|g| g[j]).collect();
        let neg: Vec<i64> = row.iter().map(|c| -c).collect();
        sys.push(Inequality::new(row, zj)).unwrap();
        sys.push(Inequality::new(neg, -zj)).unwrap();
    }
    sys
}

fn in_cone(generators: &[Vec<i64>], z: &[i64]) -> bool {
    feasible_point::<Rational>(&cone_system(generators, z)).is_some()
}

/// The additive semigroup generated by a finite set of integer vectors.
///
/// Generators whose negation lies in the cone span its lineality space; the
/// semigroup they generate is the lattice `L` they span. The remaining
/// generators are counted against a functional `w` that vanishes on the
/// lineality space and is at least 1 on each of them, which bounds the search.
struct Semigroup {
    pointed: Vec<Vec<i64>>,
    weights: Vec<Rational>,
    w: Vec<Rational>,
    lattice: Lattice,
}

impl Semigroup {
    fn new(generators: &[Vec<i64>]) -> Self {
        let dim = generators[0].len();
        let (line, pointed): (Vec<Vec<i64>>, Vec<Vec<i64>>) = generators
            .iter()
            .filter(|g| g.iter().any(|&c| c != 0))
            .cloned()
            .partition(|g| {
                let neg: Vec<i64> = g.iter().map(|c| -c).collect();
                in_cone(generators, &neg)
            });
        let mut sys = LinearSystem::new(dim);
        for g in &line {
            sys.push(Inequality::new(g.clone(), 0)).unwrap();
            sys.push(Inequality::new(g.iter().map(|c| -c).collect(), 0)).unwrap();
        }
        for g in &pointed {
            sys.push(Inequality::new(g.iter().map(|c| -c).collect(), -1)).unwrap();
        }
        let w: Vec<Rational> = feasible_point(&sys).expect("pointed part admits a separating functional");
        let weights = pointed.iter().map(|g| weight(&w, g)).collect();
        Self {
            pointed,
            weights,
            w,
            lattice: Lattice::new(&line, dim),
        }
    }

    /// Depth-first search over remainders `z - sum μ_i g_i`; each step lowers
    /// `w·z` by at least 1, so the search space is finite.
    fn contains(&self, z: &[i64]) -> bool {
        let zero = Rational::from_integer(0.into());
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut stack = vec![z.to_vec()];
        while let Some(r) = stack.pop() {
            if self.lattice.contains(&r) {
                return true;
            }
            let budget = weight(&self.w, &r);
            for (g, wg) in self.pointed.iter().zip(&self.weights) {
                if budget.clone() - wg.clone() < zero {
                    continue;
                }
                let next: Vec<i64> = r.iter().zip(g).map(|(a, b)| a - b).collect();
                if seen.insert(next.clone()) {
                    stack.push(next);
                }
            }
        }
        false
    }
}

fn weight(w: &[Rational], z: &[i64]) -> Rational {
    w.iter()
        .zip(z)
        .fold(Rational::from_integer(0.into()), |acc, (a, &b)| acc + a * rational_from_i64(b))
}

/// Integer lattice in echelon form (integer row operations only).
struct Lattice {
    rows: Vec<Vec<i128>>,
    pivots: Vec<usize>,
}

impl Lattice {
    fn new(generators: &[Vec<i64>], dim: usize) -> Self {
        let mut pool: Vec<Vec<i128>> = generators
            .iter()
            .map(|g| g.iter().map(|&c| c as i128).collect())
            .collect();
        let mut rows = Vec::new();
        let mut pivots = Vec::new();
        for col in 0..dim {
            loop {
                let mut nz: Vec<usize> = (0..pool.len()).filter(|&i| pool[i][col] != 0).collect();
                if nz.is_empty() {
                    break;
                }
                nz.sort_by_key(|&i| pool[i][col].abs());
                let p = nz[0];
                if nz.len() == 1 {
                    let mut row = pool.swap_remove(p);
                    if row[col] < 0 {
                        row.iter_mut().for_each(|v| *v = -*v);
                    }
                    rows.push(row);
                    pivots.push(col);
                    break;
                }
                let pivot = pool[p].clone();
                for &i in &nz[1..] {
                    let f = pool[i][col] / pivot[col];
                    for (a, b) in pool[i].iter_mut().zip(&pivot) {
                        *a -= f * b;
                    }
                }
            }
        }
        Self { rows, pivots }
    }

    fn contains(&self, z: &[i64]) -> bool {
        let mut r: Vec<i128> = z.iter().map(|&c| c as i128).collect();
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            if r[col] % row[col] != 0 {
                return false;
            }
            let f = r[col] / row[col];
            for (a, b) in r.iter_mut().zip(row) {
                *a -= f * b;
            }
        }
        r.iter().all(|&c| c == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TdiVerdict {
    pub tdi: bool,
    /// Set when the polytope has a fractional vertex, which rules out TDI
    /// for integral right-hand sides without any Hilbert basis check.
    pub shortcut: bool,
    #[serde(serialize_with = "serde_rational::option_vec")]
    pub failing_vertex: Option<Vec<Rational>>,
    pub active_rows: Option<Vec<usize>>,
    pub missing_point: Option<Vec<i64>>,
}

fn tight_rows(sys: &LinearSystem, x: &[Rational]) -> Vec<usize> {
    let x = ScaledPoint::new(x);
    (0..sys.len()).into_par_iter().filter(|&i| x.is_tight(sys.row(i))).collect()
}

pub fn is_tdi(sys: &LinearSystem, limit: u64) -> Result<TdiVerdict> {
    // vertices come from an irredundant subsystem, active rows from the full one
    let reduced = sys.select(&irredundant_rows(sys)?);
    let mut poly = vertices::<Rational>(&reduced)?;
    if let Integrality::Fractional { vertex, .. } = is_integral(&reduced, &poly) {
        let active = tight_rows(sys, &vertex);
        return Ok(TdiVerdict {
            tdi: false,
            shortcut: true,
            failing_vertex: Some(vertex),
            active_rows: Some(active),
            missing_point: None,
        });
    }
    poly.tight_rows = poly.vertices.iter().map(|v| tight_rows(sys, v)).collect();
    if let Some(rows) = poly.tight_rows.iter().find(|r| r.len() > MAX_ACTIVE_ROWS) {
        return Err(Error::limit("active rows", rows.len() as u128, MAX_ACTIVE_ROWS as u128));
    }
    let results: Vec<Result<HilbertVerdict>> = poly
        .tight_rows
        .par_iter()
        .map(|rows| {
            let generators = rows.iter().map(|&r| sys.row(r).coeffs.clone()).collect();
            is_hilbert_basis(&HilbertQuery { generators }, limit)
        })
        .collect();
    for (i, result) in results.into_iter().enumerate() {
        let verdict = result?;
        if !verdict.hilbert_basis {
            return Ok(TdiVerdict {
                tdi: false,
                shortcut: false,
                failing_vertex: Some(poly.vertices[i].clone()),
                active_rows: Some(poly.tight_rows[i].clone()),
                missing_point: verdict.missing_point,
            });
        }
    }
    Ok(TdiVerdict {
        tdi: true,
        shortcut: false,
        failing_vertex: None,
        active_rows: None,
        missing_point: None,
    })
}

/// An integral dual solution for the objective `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TdiCertificate {
    pub objective: Vec<i64>,
    pub optimal_value: i64,
    /// One nonnegative multiplier per row of the system.
    pub dual_multipliers: Vec<i64>,
}

impl TdiCertificate {
    /// Nonnegative multipliers whose combination of rows is exactly `(c | value)`.
    pub fn recombines(&self, sys: &LinearSystem) -> bool {
        if self.dual_multipliers.len() != sys.len() || self.objective.len() != sys.n_vars() {
            return false;
        }
        if self.dual_multipliers.iter().any(|&y| y < 0) {
            return false;
        }
        let mut coeffs = vec![0i128; sys.n_vars()];
        let mut rhs = 0i128;
        for (row, &y) in sys.rows().iter().zip(&self.dual_multipliers) {
            if y == 0 {
                continue;
            }
            for (c, &a) in coeffs.iter_mut().zip(&row.coeffs) {
                *c += y as i128 * a as i128;
            }
            rhs += y as i128 * row.rhs as i128;
        }
        coeffs.iter().zip(&self.objective).all(|(&a, &c)| a == c as i128) && rhs == self.optimal_value as i128
    }

    /// Recombination plus agreement of the value with the LP optimum.
    pub fn verify(&self, sys: &LinearSystem) -> bool {
        self.recombines(sys) && self.value_matches(sys)
    }

    /// The LP optimum of the objective over `sys` equals the certified value.
    /// `sys` may be any system defining the same polyhedron.
    pub fn value_matches(&self, sys: &LinearSystem) -> bool {
        matches!(
            maximize_row::<Rational>(sys, &self.objective),
            LpResult::Optimal(opt) if opt.value == rational_from_i64(self.optimal_value)
        )
    }
}

/// Dual certificate over the rows `1ᵀx <= 1`, `-1ᵀx <= -1` and `-x <= 0` of a
/// closure whose polytope is the simplex: with `c_max = max c_i`, take `c_max`
/// copies of the appropriate cardinality row and `c_max - c_i` of `-x_i <= 0`.
pub fn reduction_dual_certificate(closure: &LinearSystem, c: &[i64]) -> Result<TdiCertificate> {
    let n = closure.n_vars();
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.len(),
        });
    }
    let find = |coeffs: &[i64], rhs: i64| closure.rows().iter().position(|r| r.coeffs == coeffs && r.rhs == rhs);
    let ones = vec![1; n];
    let minus_ones = vec![-1; n];
    let (Some(upper), Some(lower)) = (find(&ones, 1), find(&minus_ones, -1)) else {
        return Err(Error::MissingCardinalityRows);
    };
    let mut y = vec![0i64; closure.len()];
    let c_max = c.iter().copied().max().unwrap_or(0);
    if c_max >= 0 {
        y[upper] = c_max;
    } else {
        y[lower] = -c_max;
    }
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = -1;
        let row = find(&e, 0).ok_or(Error::MissingNonnegativityRow(i))?;
        y[row] += c_max - c[i];
    }
    Ok(TdiCertificate {
        objective: c.to_vec(),
        optimal_value: c_max,
        dual_multipliers: y,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rejection {
    DimensionMismatch,
    RowOutOfRange,
    NotInPolyhedron,
    BasisRowNotTight,
    RankDeficient,
    IntegralPoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FractionalVertexCheck {
    pub valid: bool,
    pub reason: Option<Rejection>,
}

/// Accepts `point` iff it lies in `sys`, the `basis` rows are tight there with
/// rank `n`, and some coordinate is fractional.
pub fn verify_fractional_vertex_certificate(
    sys: &LinearSystem,
    point: &[Rational],
    basis: &[usize],
) -> FractionalVertexCheck {
    let reject = |reason| FractionalVertexCheck {
        valid: false,
        reason: Some(reason),
    };
    if point.len() != sys.n_vars() {
        return reject(Rejection::DimensionMismatch);
    }
    if basis.iter().any(|&r| r >= sys.len()) {
        return reject(Rejection::RowOutOfRange);
    }
    if !sys.contains(point) {
        return reject(Rejection::NotInPolyhedron);
    }
    if basis.iter().any(|&r| !sys.row(r).is_tight_at(point)) {
        return reject(Rejection::BasisRowNotTight);
    }
    let rows: Vec<&[i64]> = basis.iter().map(|&r| sys.row(r).coeffs.as_slice()).collect();
    if rank::<Rational>(&integer_rows(&rows)) < sys.n_vars() {
        return reject(Rejection::RankDeficient);
    }
    if point.iter().all(|x| x.is_integer()) {
        return reject(Rejection::IntegralPoint);
    }
    FractionalVertexCheck {
        valid: true,
        reason: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hilbert(gens: &[&[i64]]) -> HilbertVerdict {
        let q = HilbertQuery::new(gens.iter().map(|g| g.to_vec()).collect()).unwrap();
        is_hilbert_basis(&q, 1 << 16).unwrap()
    }

    #[test]
    fn unit_vectors_form_hilbert_basis() {
        assert!(hilbert(&[&[1, 0], &[0, 1]]).hilbert_basis);
    }

    #[test]
    fn missing_middle_point() {
        let v = hilbert(&[&[1, 2], &[2, 1]]);
        assert!(!v.hilbert_basis);
        assert_eq!(v.missing_point, Some(vec![1, 1]));
    }

    #[test]
    fn fan_is_hilbert_basis() {
        assert!(hilbert(&[&[1, 0], &[1, 1], &[1, 2]]).hilbert_basis);
        assert!(!hilbert(&[&[1, 0], &[1, 2]]).hilbert_basis);
    }

    #[test]
    fn lineality_handled() {
        assert!(hilbert(&[&[1, 1], &[-1, -1], &[0, -1]]).hilbert_basis);
        // the line through (2, 2) misses (1, 1)
        let v = hilbert(&[&[2, 2], &[-2, -2], &[0, -1]]);
        assert!(!v.hilbert_basis);
        assert!(hilbert(&[&[1], &[-1]]).hilbert_basis);
    }

    #[test]
    fn zonotope_limit() {
        let q = HilbertQuery::new(vec![vec![50, 0], vec![0, 50]]).unwrap();
        assert!(matches!(
            is_hilbert_basis(&q, 100),
            Err(Error::LimitExceeded { required: 2601, .. })
        ));
    }

    fn simplex_system(n: usize) -> LinearSystem {
        let mut sys = LinearSystem::new(n);
        sys.push(Inequality::new(vec![1; n], 1)).unwrap();
        sys.push(Inequality::new(vec![-1; n], -1)).unwrap();
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = -1;
            sys.push(Inequality::new(e, 0)).unwrap();
        }
        sys
    }

    #[test]
    fn tdi_examples() {
        let v = is_tdi(&simplex_system(3), 1 << 16).unwrap();
        assert!(v.tdi && !v.shortcut);

        let sys = LinearSystem::from_pairs(2, &[(&[1, 2], 3), (&[2, 1], 3), (&[-1, 0], 0), (&[0, -1], 0)]);
        let v = is_tdi(&sys, 1 << 16).unwrap();
        assert!(!v.tdi && v.shortcut);
        assert_eq!(v.failing_vertex, Some(vec![Rational::from_integer(0.into()), Rational::new(3.into(), 2.into())]));

        assert!(is_tdi(&LinearSystem::unit_box(2), 1 << 16).unwrap().tdi);
    }

    #[test]
    fn integral_but_not_tdi() {
        // integral triangle whose apex cone misses (1, 1)
        let sys = LinearSystem::from_pairs(2, &[(&[1, 2], 0), (&[2, 1], 0), (&[-1, -1], 3)]);
        let v = is_tdi(&sys, 1 << 16).unwrap();
        assert!(!v.tdi && !v.shortcut);
        assert_eq!(v.missing_point, Some(vec![1, 1]));
    }

    #[test]
    fn simplex_dual_certificates() {
        let sys = simplex_system(3);
        let cert = reduction_dual_certificate(&sys, &[2, 1, 0]).unwrap();
        assert_eq!(cert.optimal_value, 2);
        assert_eq!(cert.dual_multipliers, vec![2, 0, 0, 1, 2]);
        assert!(cert.verify(&sys));

        let zero = reduction_dual_certificate(&sys, &[0, 0, 0]).unwrap();
        assert_eq!(zero.optimal_value, 0);
        assert!(zero.dual_multipliers.iter().all(|&y| y == 0));

        let neg = reduction_dual_certificate(&sys, &[-1, -1, -1]).unwrap();
        assert_eq!(neg.optimal_value, -1);
        assert_eq!(neg.dual_multipliers, vec![0, 1, 0, 0, 0]);
        assert!(neg.verify(&sys));

        assert_eq!(
            reduction_dual_certificate(&LinearSystem::unit_box(3), &[1, 0, 0]),
            Err(Error::MissingCardinalityRows)
        );
    }

    #[test]
    fn fractional_vertex_certificates() {
        let sys = LinearSystem::from_pairs(1, &[(&[2], 1), (&[-1], 0), (&[1], 1)]);
        let half = vec![Rational::new(1.into(), 2.into())];
        assert!(verify_fractional_vertex_certificate(&sys, &half, &[0]).valid);
        let zero = vec![Rational::from_integer(0.into())];
        assert_eq!(
            verify_fractional_vertex_certificate(&sys, &zero, &[1]).reason,
            Some(Rejection::IntegralPoint)
        );
        assert_eq!(
            verify_fractional_vertex_certificate(&sys, &half, &[1]).reason,
            Some(Rejection::BasisRowNotTight)
        );
        assert_eq!(
            verify_fractional_vertex_certificate(&sys, &half, &[]).reason,
            Some(Rejection::RankDeficient)
        );
        let outside = vec![Rational::from_integer(1.into())];
        assert_eq!(
            verify_fractional_vertex_certificate(&sys, &outside, &[2]).reason,
            Some(Rejection::NotInPolyhedron)
        );
    }
}

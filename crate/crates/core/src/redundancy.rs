//! Removal of implied rows.
//!
//! Rows are discarded one at a time, each only when it is implied by the rows
//! still present, so the polyhedron never changes. Cheap exact implications
//! (trivial rows, duplicate halfspaces, rows implied by the variable bounds,
//! rows implied by one other row plus the bounds) run first. Large bounded
//! systems are then cut down by vertex refinement, and full-dimensional
//! polytopes keep exactly their facet rows; otherwise every surviving row is
//! tested with one LP against the remaining system.

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::inequality::Inequality;
use crate::linalg::rank;
use crate::lp::{feasible_point, maximize_row, LpResult};
use crate::polyhedra::vertex_rays;
use crate::scalar::{rational_from_i64, Rational};
use crate::system::{LinearSystem, RowTag};

pub fn remove_redundant(sys: &LinearSystem) -> Result<LinearSystem> {
    let keep = irredundant_rows(sys)?;
    Ok(sys.select(&keep))
}

/// Indices (ascending) of an irredundant subsystem defining the same polyhedron.
pub fn irredundant_rows(sys: &LinearSystem) -> Result<Vec<usize>> {
    let rows = sys.rows();
    let mut alive = vec![true; rows.len()];

    let mut seen = HashSet::new();
    for (i, row) in rows.iter().enumerate() {
        if row.is_trivial() || !seen.insert(row.canonicalize()) {
            alive[i] = false;
        }
    }

    if let Some(bounds) = ScaledBounds::from_system(sys) {
        let is_bound_row = |i: usize| rows[i].coeffs.iter().filter(|&&c| c != 0).count() <= 1;
        for i in 0..rows.len() {
            if alive[i] && !is_bound_row(i) && bounds.implies(None, &rows[i].coeffs, rows[i].rhs) {
                alive[i] = false;
            }
        }
        // Keep the maximal rows under pairwise implication. Implication is
        // transitive, so a row only needs testing against the current maximal
        // set; rows that dominate often drift to the front of it.
        let implies = |j: usize, i: usize| bounds.implies(Some((&rows[j].coeffs, rows[j].rhs)), &rows[i].coeffs, rows[i].rhs);
        let mut kept: Vec<usize> = Vec::new();
        for i in 0..rows.len() {
            if !alive[i] || is_bound_row(i) {
                continue;
            }
            if let Some(pos) = kept.iter().position(|&j| implies(j, i)) {
                alive[i] = false;
                kept.swap(pos, pos / 2);
                continue;
            }
            kept.retain(|&j| {
                let dominated = implies(i, j);
                if dominated {
                    alive[j] = false;
                }
                !dominated
            });
            kept.push(i);
        }
    }

    // the prefilters preserve the polyhedron, so feasibility is checked on the survivors
    let survivors: Vec<usize> = (0..rows.len()).filter(|&i| alive[i]).collect();
    if feasible_point::<Rational>(&sys.select(&survivors)).is_none() {
        return Err(Error::InfeasibleInput);
    }
    if survivors.len() > REFINE_THRESHOLD {
        if let Some((kept, rays)) = refine_by_vertices(sys, &survivors) {
            if let Some(facets) = facet_rows(sys, &kept, &rays) {
                return Ok(facets);
            }
            alive.iter_mut().for_each(|a| *a = false);
            for i in kept {
                alive[i] = true;
            }
        }
    }
    for i in 0..rows.len() {
        if !alive[i] {
            continue;
        }
        let others: Vec<usize> = (0..rows.len()).filter(|&j| j != i && alive[j]).collect();
        let rest = sys.select(&others);
        if let LpResult::Optimal(opt) = maximize_row::<Rational>(&rest, &rows[i].coeffs) {
            if opt.value <= rational_from_i64(rows[i].rhs) {
                alive[i] = false;
            }
        }
    }
    Ok((0..rows.len()).filter(|&i| alive[i]).collect())
}

/// Above this many prefilter survivors, bounded systems go through
/// [`refine_by_vertices`] before the per-row LPs.
const REFINE_THRESHOLD: usize = 64;

/// Outer approximation by vertices: starting from a bounded subsystem (the
/// supports of the dual solutions of the `2n` LPs `max ±x_i`), repeatedly add
/// the most violated row at each vertex that violates some row. On return
/// every row of `candidates` holds at every vertex of the returned subsystem,
/// so the subsystem defines the same polytope. `None` when unbounded.
fn refine_by_vertices(sys: &LinearSystem, candidates: &[usize]) -> Option<(Vec<usize>, Vec<Vec<BigInt>>)> {
    let n = sys.n_vars();
    let full = sys.select(candidates);
    // original rows of a closure system are a good starting approximation
    let mut kept: BTreeSet<usize> = candidates
        .iter()
        .copied()
        .filter(|&i| sys.tag(i).is_some_and(|t| t != RowTag::Cut))
        .collect();
    let single: Vec<(usize, i64)> = kept
        .iter()
        .filter_map(|&r| {
            let c = &sys.rows()[r].coeffs;
            let mut nz = c.iter().enumerate().filter(|(_, &v)| v != 0);
            match (nz.next(), nz.next()) {
                (Some((k, &v)), None) => Some((k, v.signum())),
                _ => None,
            }
        })
        .collect();
    // a variable already bounded in K0 in that direction needs no LP
    let boxed = |i: usize, sign: i64| single.contains(&(i, sign));
    for i in 0..n {
        for sign in [1, -1] {
            if boxed(i, sign) {
                continue;
            }
            let mut c = vec![0; n];
            c[i] = sign;
            let LpResult::Optimal(opt) = maximize_row::<Rational>(&full, &c) else {
                return None;
            };
            kept.extend(opt.dual.iter().enumerate().filter(|(_, y)| y.is_positive()).map(|(k, _)| candidates[k]));
        }
    }
    loop {
        let current: Vec<usize> = kept.iter().copied().collect();
        let rays = vertex_rays(&sys.select(&current));
        let mut added = false;
        for z in &rays {
            let worst = candidates
                .iter()
                .filter(|i| !kept.contains(i))
                .map(|&i| (excess(&sys.rows()[i], z), i))
                .filter(|(e, _)| e.is_positive())
                .max_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
            if let Some((_, i)) = worst {
                added |= kept.insert(i);
            }
        }
        if !added {
            return Some((current, rays));
        }
    }
}

/// For a full-dimensional polytope with vertex set `rays`, the rows of `kept`
/// that define facets (tight vertices of affine rank `n`). Distinct rows define
/// distinct facets after deduplication, so these rows are irredundant and
/// describe the polytope. `None` when the polytope is not full-dimensional.
fn facet_rows(sys: &LinearSystem, kept: &[usize], rays: &[Vec<BigInt>]) -> Option<Vec<usize>> {
    let n = sys.n_vars();
    let to_rational = |z: &Vec<BigInt>| -> Vec<Rational> { z.iter().map(|v| Rational::from_integer(v.clone())).collect() };
    let all: Vec<Vec<Rational>> = rays.iter().map(to_rational).collect();
    if rank(&all) < n + 1 {
        return None;
    }
    let facets = kept
        .iter()
        .copied()
        .filter(|&i| {
            let tight: Vec<Vec<Rational>> = rays
                .iter()
                .filter(|z| excess(sys.row(i), z).is_zero())
                .map(to_rational)
                .collect();
            tight.len() >= n && rank(&tight) == n
        })
        .collect();
    Some(facets)
}

/// `a·(t x) - b t` for a vertex given as the integer vector `(t x, t)`.
fn excess(row: &Inequality, z: &[BigInt]) -> BigInt {
    let n = row.coeffs.len();
    let mut acc = -BigInt::from(row.rhs) * &z[n];
    for (a, v) in row.coeffs.iter().zip(z) {
        if *a != 0 {
            acc += BigInt::from(*a) * v;
        }
    }
    acc
}

/// Variable bounds taken from single-variable rows, all scaled by a common
/// denominator so the implication tests run in integer arithmetic.
struct ScaledBounds {
    scale: i128,
    lower: Vec<Option<i128>>,
    upper: Vec<Option<i128>>,
}

impl ScaledBounds {
    fn from_system(sys: &LinearSystem) -> Option<Self> {
        let n = sys.n_vars();
        let mut lower: Vec<Option<Rational>> = vec![None; n];
        let mut upper: Vec<Option<Rational>> = vec![None; n];
        for row in sys.rows() {
            let mut nz = row.coeffs.iter().enumerate().filter(|(_, &c)| c != 0);
            let (Some((k, &c)), None) = (nz.next(), nz.next()) else {
                continue;
            };
            let bound = Rational::new(row.rhs.into(), c.into());
            if c > 0 {
                if upper[k].as_ref().is_none_or(|u| bound < *u) {
                    upper[k] = Some(bound);
                }
            } else if lower[k].as_ref().is_none_or(|l| bound > *l) {
                lower[k] = Some(bound);
            }
        }
        let mut scale: i128 = 1;
        for b in lower.iter().chain(&upper).flatten() {
            let d: i128 = i128::try_from(b.denom()).ok()?;
            scale = scale.lcm(&d);
            if scale > 1 << 40 {
                return None;
            }
        }
        let scaled = |b: &Option<Rational>| -> Option<Option<i128>> {
            match b {
                None => Some(None),
                Some(v) => {
                    let num = i128::try_from(v.numer()).ok()?;
                    let den = i128::try_from(v.denom()).ok()?;
                    Some(Some(num.checked_mul(scale / den)?))
                }
            }
        };
        Some(Self {
            scale,
            lower: lower.iter().map(scaled).collect::<Option<_>>()?,
            upper: upper.iter().map(scaled).collect::<Option<_>>()?,
        })
    }

    /// Whether `coeffs·x <= rhs` follows from `base` (if any) plus the bounds:
    /// `base_rhs + max over the box of (coeffs - base)·x <= rhs`.
    fn implies(&self, base: Option<(&[i64], i64)>, coeffs: &[i64], rhs: i64) -> bool {
        let mut total: i128 = base.map_or(0, |(_, b)| b as i128 * self.scale);
        for k in 0..coeffs.len() {
            let d = coeffs[k] as i128 - base.map_or(0, |(a, _)| a[k] as i128);
            let extreme = match d {
                0 => continue,
                d if d > 0 => self.upper[k],
                _ => self.lower[k],
            };
            match extreme.and_then(|e| d.checked_mul(e)) {
                Some(v) => total += v,
                None => return false,
            }
        }
        total <= rhs as i128 * self.scale
    }
}

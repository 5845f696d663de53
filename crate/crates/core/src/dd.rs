//! Double description method on integer rays.
//!
//! Computes the extreme rays of a pointed cone `{z : H z <= 0}`. Rays are
//! kept as primitive integer vectors; the fast path runs on `i128` with
//! checked arithmetic and the caller retries on `BigInt` after an overflow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed};
use rayon::prelude::*;

pub(crate) trait RayInt:
    Clone + Integer + Signed + CheckedAdd + CheckedSub + CheckedMul + From<i64> + Into<BigInt> + Send + Sync
{
}

impl<I> RayInt for I where
    I: Clone + Integer + Signed + CheckedAdd + CheckedSub + CheckedMul + From<i64> + Into<BigInt> + Send + Sync
{
}

struct Ray<I> {
    z: Vec<I>,
    /// Processed constraints this ray is tight on.
    zero: Vec<u64>,
}

fn set_bit(set: &mut [u64], i: usize) {
    set[i / 64] |= 1 << (i % 64);
}

fn ones(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(w, &word)| {
        (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| w * 64 + b)
    })
}

fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn count(set: &[u64]) -> usize {
    set.iter().map(|w| w.count_ones() as usize).sum()
}

fn dot<I: RayInt>(h: &[i64], z: &[I]) -> Option<I> {
    let mut acc = I::zero();
    for (&a, b) in h.iter().zip(z) {
        if a != 0 && !b.is_zero() {
            acc = acc.checked_add(&I::from(a).checked_mul(b)?)?;
        }
    }
    Some(acc)
}

/// `a·x + b·y`, made primitive.
fn combine<I: RayInt>(a: &I, x: &[I], b: &I, y: &[I]) -> Option<Vec<I>> {
    let mut out = Vec::with_capacity(x.len());
    for (xi, yi) in x.iter().zip(y) {
        out.push(a.checked_mul(xi)?.checked_add(&b.checked_mul(yi)?)?);
    }
    make_primitive(&mut out);
    Some(out)
}

fn make_primitive<I: RayInt>(z: &mut [I]) {
    let g = z.iter().fold(I::zero(), |g, v| g.gcd(v));
    if !g.is_zero() && !g.is_one() {
        z.iter_mut().for_each(|v| *v = v.clone() / g.clone());
    }
}

/// Extreme rays of `{z : h·z <= 0 for every h}`, or `None` on overflow.
/// Panics (debug) if the cone is not pointed.
pub(crate) fn extreme_rays<I: RayInt>(constraints: &[Vec<i64>], dim: usize) -> Option<Vec<Vec<I>>> {
    let words = constraints.len().div_ceil(64).max(1);
    let mut lineality: Vec<Vec<I>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { I::one() } else { I::zero() }).collect())
        .collect();
    let mut rays: Vec<Ray<I>> = Vec::new();

    for (ci, h) in constraints.iter().enumerate() {
        let lin_values: Vec<I> = lineality.iter().map(|l| dot(h, l)).collect::<Option<_>>()?;
        if let Some(li) = lin_values.iter().position(|v| !v.is_zero()) {
            let mut l = lineality.remove(li);
            let mut hl = lin_values[li].clone();
            if hl.is_positive() {
                l.iter_mut().for_each(|v| *v = -v.clone());
                hl = -hl;
            }
            let mut rest = Vec::with_capacity(lineality.len());
            for (j, other) in lineality.iter().enumerate() {
                let k = if j < li { j } else { j + 1 };
                let ho = lin_values[k].clone();
                rest.push(if ho.is_zero() { other.clone() } else { combine(&hl, other, &-ho, &l)? });
            }
            lineality = rest;
            for ray in rays.iter_mut() {
                let hr = dot(h, &ray.z)?;
                if !hr.is_zero() {
                    ray.z = combine(&-hl.clone(), &ray.z, &hr, &l)?;
                }
                set_bit(&mut ray.zero, ci);
            }
            let mut zero = vec![0u64; words];
            for k in 0..ci {
                set_bit(&mut zero, k);
            }
            make_primitive(&mut l);
            rays.push(Ray { z: l, zero });
            continue;
        }

        let values: Vec<I> = rays.iter().map(|r| dot(h, &r.z)).collect::<Option<_>>()?;
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        if pos.is_empty() {
            for (ray, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    set_bit(&mut ray.zero, ci);
                }
            }
            continue;
        }
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        let pointed_dim = dim - lineality.len();

        // rays tight at each processed constraint, for the adjacency test
        let mut tight: Vec<Vec<u32>> = vec![Vec::new(); ci];
        for (r, ray) in rays.iter().enumerate() {
            for c in ones(&ray.zero) {
                tight[c].push(r as u32);
            }
        }
        let created: Vec<Option<Ray<I>>> = pos
            .par_iter()
            .flat_map_iter(|&p| {
                let (rays, values, tight) = (&rays, &values, &tight);
                neg.iter().filter_map(move |&q| {
                    let common: Vec<u64> = rays[p].zero.iter().zip(&rays[q].zero).map(|(a, b)| a & b).collect();
                    if count(&common) + 2 < pointed_dim {
                        return None;
                    }
                    let witnesses = ones(&common).min_by_key(|&c| tight[c].len()).map(|c| &tight[c]);
                    let adjacent = match witnesses {
                        Some(list) => list.iter().all(|&r| {
                            let r = r as usize;
                            r == p || r == q || !is_subset(&common, &rays[r].zero)
                        }),
                        None => rays.len() == 2,
                    };
                    if !adjacent {
                        return None;
                    }
                    let z = combine(&values[p], &rays[q].z, &-values[q].clone(), &rays[p].z);
                    let mut zero = common;
                    set_bit(&mut zero, ci);
                    Some(z.map(|z| Ray { z, zero }))
                })
            })
            .collect();
        let created: Vec<Ray<I>> = created.into_iter().collect::<Option<_>>()?;

        let mut next: Vec<Ray<I>> = Vec::with_capacity(rays.len() - pos.len() + created.len());
        for (i, mut ray) in rays.into_iter().enumerate() {
            if values[i].is_positive() {
                continue;
            }
            if values[i].is_zero() {
                set_bit(&mut ray.zero, ci);
            }
            next.push(ray);
        }
        next.extend(created);
        rays = next;
    }
    debug_assert!(lineality.is_empty(), "cone must be pointed");
    Some(rays.into_iter().map(|r| r.z).collect())
}

/// Extreme rays as `BigInt` vectors, retrying in arbitrary precision on overflow.
pub(crate) fn extreme_rays_exact(constraints: &[Vec<i64>], dim: usize) -> Vec<Vec<BigInt>> {
    match extreme_rays::<i128>(constraints, dim) {
        Some(rays) => rays
            .into_iter()
            .map(|z| z.into_iter().map(BigInt::from).collect())
            .collect(),
        None => extreme_rays::<BigInt>(constraints, dim).expect("arbitrary precision cannot overflow"),
    }
}

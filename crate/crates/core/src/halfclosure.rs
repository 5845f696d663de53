//! {0,1/2}-cuts and the {0,1/2}-closure.
//!
//! A cut is determined by a binary multiplier `t = 2u` in the GF(2) left kernel
//! of the coefficient matrix: `(tᵀA / 2) x <= floor(tᵀb / 2)`. Multipliers with
//! even `tᵀb` only reproduce implied inequalities and are skipped.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{left_kernel, partition_kernel, BitMatrix, BitVector, KernelBasis};
use crate::inequality::Inequality;
use crate::scalar::{serde_rational, Rational};
use crate::system::{LinearSystem, RowTag};

/// Fixed partitioning of the kernel walk; the canonical enumeration order
/// does not depend on the number of worker threads.
const PARTITION_BITS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HalfCut {
    pub multiplier: BitVector,
    #[serde(flatten)]
    pub cut: Inequality,
}

impl HalfCut {
    /// The cut induced by `t`, or `None` when `t` is not in the left kernel
    /// mod 2 or has even right-hand-side parity.
    pub fn from_multiplier(sys: &LinearSystem, t: &BitVector) -> Option<HalfCut> {
        if t.len() != sys.len() {
            return None;
        }
        let mut sum = vec![0i64; sys.n_vars()];
        let mut rhs = 0i64;
        for i in t.ones() {
            let row = sys.row(i);
            for (s, c) in sum.iter_mut().zip(&row.coeffs) {
                *s += c;
            }
            rhs += row.rhs;
        }
        if sum.iter().any(|s| s % 2 != 0) || rhs % 2 == 0 {
            return None;
        }
        Some(HalfCut {
            multiplier: t.clone(),
            cut: Inequality::new(sum.iter().map(|s| s / 2).collect(), rhs.div_euclid(2)),
        })
    }
}

/// Deduplicated cuts of a system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutFamily {
    /// One representative per halfspace, in order of first appearance in the
    /// canonical kernel walk. Among multipliers producing the same halfspace
    /// the one with the most reduced coefficients is kept.
    pub cuts: Vec<HalfCut>,
    /// Number of odd-parity multipliers behind each cut.
    pub multiplicity: Vec<u64>,
    /// Whether some cut reads `0 <= rhs` with `rhs < 0`.
    pub closure_empty: bool,
    pub kernel_dimension: usize,
}

impl CutFamily {
    pub fn len(&self) -> usize {
        self.cuts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.is_empty()
    }

    pub fn inequalities(&self) -> impl Iterator<Item = &Inequality> {
        self.cuts.iter().map(|c| &c.cut)
    }
}

struct Collected {
    key: Inequality,
    cut: HalfCut,
    gcd: i64,
    count: u64,
}

/// Running `tᵀA`, `tᵀb` over a kernel walk, updated one basis vector at a time.
struct RunningSum<'s> {
    sys: &'s LinearSystem,
    coeffs: Vec<i64>,
    rhs: i64,
}

impl<'s> RunningSum<'s> {
    fn new(sys: &'s LinearSystem) -> Self {
        Self {
            sys,
            coeffs: vec![0; sys.n_vars()],
            rhs: 0,
        }
    }

    fn reset(&mut self, t: &BitVector) {
        self.coeffs.iter_mut().for_each(|c| *c = 0);
        self.rhs = 0;
        for i in t.ones() {
            self.add_row(i, 1);
        }
    }

    fn add_row(&mut self, i: usize, sign: i64) {
        let row = self.sys.row(i);
        for (s, c) in self.coeffs.iter_mut().zip(&row.coeffs) {
            *s += sign * c;
        }
        self.rhs += sign * row.rhs;
    }

    fn step(&mut self, basis: &KernelBasis, t: &BitVector, flipped: Option<usize>) {
        match flipped {
            None => self.reset(t),
            Some(j) => {
                for i in basis.basis[j].ones() {
                    self.add_row(i, if t.get(i) { 1 } else { -1 });
                }
            }
        }
    }

    fn cut(&self) -> Option<Inequality> {
        if self.rhs % 2 == 0 {
            return None;
        }
        debug_assert!(self.coeffs.iter().all(|c| c % 2 == 0));
        Some(Inequality::new(
            self.coeffs.iter().map(|c| c / 2).collect(),
            self.rhs.div_euclid(2),
        ))
    }
}

/// Every {0,1/2}-cut of `sys`, deduplicated by halfspace.
pub fn generate_cuts(sys: &LinearSystem, limit: u64) -> Result<CutFamily> {
    let kernel = left_kernel(&BitMatrix::coefficients_mod2(sys));
    let walks = partition_kernel(&kernel, PARTITION_BITS, limit)?;

    let partials: Vec<Vec<Collected>> = walks
        .into_par_iter()
        .map(|mut walk| {
            let basis = walk.basis();
            let mut sum = RunningSum::new(sys);
            let mut index: HashMap<Inequality, usize> = HashMap::new();
            let mut found: Vec<Collected> = Vec::new();
            while let Some((t, flipped)) = walk.advance() {
                sum.step(basis, t, flipped);
                let Some(cut) = sum.cut() else { continue };
                if cut.is_trivial() {
                    continue;
                }
                let gcd = cut.joint_gcd();
                let key = cut.canonicalize();
                match index.get(&key) {
                    Some(&pos) => {
                        let entry = &mut found[pos];
                        entry.count += 1;
                        if gcd < entry.gcd {
                            entry.gcd = gcd;
                            entry.cut = HalfCut { multiplier: t.clone(), cut };
                        }
                    }
                    None => {
                        index.insert(key.clone(), found.len());
                        found.push(Collected {
                            key,
                            cut: HalfCut { multiplier: t.clone(), cut },
                            gcd,
                            count: 1,
                        });
                    }
                }
            }
            found
        })
        .collect();

    let mut index: HashMap<Inequality, usize> = HashMap::new();
    let mut merged: Vec<Collected> = Vec::new();
    for entry in partials.into_iter().flatten() {
        match index.get(&entry.key) {
            Some(&pos) => {
                let kept = &mut merged[pos];
                kept.count += entry.count;
                if entry.gcd < kept.gcd {
                    kept.gcd = entry.gcd;
                    kept.cut = entry.cut;
                }
            }
            None => {
                index.insert(entry.key.clone(), merged.len());
                merged.push(entry);
            }
        }
    }

    let closure_empty = merged.iter().any(|e| e.cut.cut.is_infeasible());
    let multiplicity = merged.iter().map(|e| e.count).collect();
    Ok(CutFamily {
        cuts: merged.into_iter().map(|e| e.cut).collect(),
        multiplicity,
        closure_empty,
        kernel_dimension: kernel.dimension(),
    })
}

/// The original rows followed by every cut, cuts tagged [`RowTag::Cut`].
pub fn closure_system(sys: &LinearSystem, limit: u64) -> Result<LinearSystem> {
    let family = generate_cuts(sys, limit)?;
    Ok(closure_from_cuts(sys, &family))
}

pub fn closure_from_cuts(sys: &LinearSystem, family: &CutFamily) -> LinearSystem {
    let mut out = sys.clone();
    for cut in &family.cuts {
        out.push_tagged(cut.cut.clone(), RowTag::Cut)
            .expect("cuts have the system's dimension");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum MembershipCertificate {
    Member,
    Violated {
        violating_multiplier: BitVector,
        violated_cut: Inequality,
        #[serde(serialize_with = "serde_rational::serialize")]
        violation_amount: Rational,
    },
}

impl MembershipCertificate {
    pub fn is_member(&self) -> bool {
        matches!(self, MembershipCertificate::Member)
    }

    /// Re-derives the cut from the multiplier and re-evaluates the violation.
    /// A `Member` verdict carries no short certificate and is not checked here.
    pub fn verify_violation(&self, sys: &LinearSystem, point: &[Rational]) -> bool {
        match self {
            MembershipCertificate::Member => true,
            MembershipCertificate::Violated {
                violating_multiplier,
                violated_cut,
                violation_amount,
            } => {
                let Some(derived) = HalfCut::from_multiplier(sys, violating_multiplier) else {
                    return false;
                };
                derived.cut == *violated_cut
                    && violation_amount.is_positive()
                    && -violated_cut.slack(point) == *violation_amount
            }
        }
    }
}

/// A rational point over a common denominator, for fast repeated evaluation.
pub(crate) struct ScaledPoint {
    numer: Vec<BigInt>,
    denom: BigInt,
    small: Option<(Vec<i128>, i128)>,
}

impl ScaledPoint {
    pub(crate) fn new(point: &[Rational]) -> Self {
        let denom = point
            .iter()
            .fold(BigInt::from(1), |acc, v| num_integer::lcm(acc, v.denom().clone()));
        let numer: Vec<BigInt> = point
            .iter()
            .map(|v| v.numer() * (&denom / v.denom()))
            .collect();
        let small = numer
            .iter()
            .map(|v| v.to_i128())
            .collect::<Option<Vec<_>>>()
            .zip(denom.to_i128())
            .filter(|(nums, d)| nums.iter().all(|v| v.abs() < 1 << 60) && *d < 1 << 60);
        Self { numer, denom, small }
    }

    /// `coeffs·x > rhs`.
    pub(crate) fn violates(&self, cut: &Inequality) -> bool {
        self.side(cut) == Ordering::Greater
    }

    /// `coeffs·x = rhs`.
    pub(crate) fn is_tight(&self, cut: &Inequality) -> bool {
        self.side(cut) == Ordering::Equal
    }

    /// Sign of `coeffs·x - rhs`.
    fn side(&self, cut: &Inequality) -> Ordering {
        if let Some(lhs) = self.small_slack(cut) {
            return lhs.cmp(&0);
        }
        self.big_slack(cut).cmp(&BigInt::zero())
    }

    fn small_slack(&self, cut: &Inequality) -> Option<i128> {
        let (nums, d) = self.small.as_ref()?;
        let lhs = cut
            .coeffs
            .iter()
            .zip(nums)
            .try_fold(0i128, |acc, (&c, &v)| acc.checked_add((c as i128).checked_mul(v)?))?;
        lhs.checked_sub((cut.rhs as i128).checked_mul(*d)?)
    }

    fn big_slack(&self, cut: &Inequality) -> BigInt {
        cut.coeffs
            .iter()
            .zip(&self.numer)
            .map(|(&c, v)| BigInt::from(c) * v)
            .sum::<BigInt>()
            - BigInt::from(cut.rhs) * &self.denom
    }

    /// `coeffs·x - rhs` when positive.
    fn excess(&self, cut: &Inequality) -> Option<Rational> {
        if let Some(lhs) = self.small_slack(cut) {
            let d = self.small.as_ref().map_or(0, |s| s.1);
            return (lhs > 0).then(|| Rational::new(lhs.into(), d.into()));
        }
        let lhs = self.big_slack(cut);
        (lhs > BigInt::zero()).then(|| Rational::new(lhs, self.denom.clone()))
    }
}

/// Decides whether `point` lies in the {0,1/2}-closure. A violated verdict
/// names the first violated cut in the canonical enumeration order.
pub fn membership(sys: &LinearSystem, point: &[Rational], limit: u64) -> Result<MembershipCertificate> {
    if point.len() != sys.n_vars() {
        return Err(Error::DimensionMismatch {
            expected: sys.n_vars(),
            found: point.len(),
        });
    }
    if let Some(row) = sys.first_violated(point) {
        return Err(Error::PointNotInPolyhedron { row });
    }
    let kernel = left_kernel(&BitMatrix::coefficients_mod2(sys));
    let walks = partition_kernel(&kernel, PARTITION_BITS, limit)?;
    let scaled = ScaledPoint::new(point);

    let first = walks
        .into_par_iter()
        .map(|mut walk| {
            let basis = walk.basis();
            let mut sum = RunningSum::new(sys);
            while let Some((t, flipped)) = walk.advance() {
                sum.step(basis, t, flipped);
                let Some(cut) = sum.cut() else { continue };
                if let Some(violation) = scaled.excess(&cut) {
                    return Some((t.clone(), cut, violation));
                }
            }
            None
        })
        .find_first(|hit| hit.is_some())
        .flatten();

    Ok(match first {
        None => MembershipCertificate::Member,
        Some((t, cut, violation)) => MembershipCertificate::Violated {
            violating_multiplier: t,
            violated_cut: cut,
            violation_amount: violation,
        },
    })
}

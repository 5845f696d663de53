//! Linear algebra over GF(2) on packed bit rows.

use std::fmt;

use crate::error::{Error, Result};
use crate::system::LinearSystem;

const WORD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, ones: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in ones {
            v.set(i, true);
        }
        v
    }

    /// Parses a string of `0`/`1` characters.
    pub fn parse(text: &str) -> Option<Self> {
        let bits = text
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(Self::from_bools(&bits))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index out of range");
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl serde::Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: Vec<BitVector>,
    cols: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows: vec![BitVector::zeros(cols); rows],
            cols,
        }
    }

    pub fn from_rows(rows: Vec<BitVector>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged bit matrix");
        Self { rows, cols }
    }

    /// Coefficient matrix of the system reduced mod 2.
    pub fn coefficients_mod2(sys: &LinearSystem) -> Self {
        let rows = sys
            .rows()
            .iter()
            .map(|r| {
                let bits: Vec<bool> = r.coeffs.iter().map(|c| c.rem_euclid(2) == 1).collect();
                BitVector::from_bools(&bits)
            })
            .collect();
        Self::from_rows(rows, sys.n_vars())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Rank by row reduction.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for row in rows.iter_mut().skip(rank + 1) {
                if row.get(c) {
                    row.xor_assign(&pivot);
                }
            }
            rank += 1;
        }
        rank
    }

    /// `tᵀ A` over GF(2).
    pub fn left_multiply(&self, t: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.cols);
        for i in t.ones() {
            out.xor_assign(&self.rows[i]);
        }
        out
    }
}

/// A basis of the left kernel `{t : tᵀ A = 0}` of a bit matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelBasis {
    /// Length of the multiplier vectors (row count of the matrix).
    pub len: usize,
    pub basis: Vec<BitVector>,
}

impl KernelBasis {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// `2^dimension`, saturating.
    pub fn size(&self) -> u128 {
        1u128.checked_shl(self.dimension() as u32).unwrap_or(u128::MAX)
    }
}

/// Left kernel by elimination on `[A | I]`: rows whose `A` part vanishes
/// carry kernel vectors in their identity part.
pub fn left_kernel(a: &BitMatrix) -> KernelBasis {
    let m = a.n_rows();
    let mut rows: Vec<(BitVector, BitVector)> = (0..m)
        .map(|i| (a.row(i).clone(), BitVector::from_indices(m, &[i])))
        .collect();
    let mut rank = 0;
    for c in 0..a.n_cols() {
        let Some(p) = (rank..m).find(|&i| rows[i].0.get(c)) else {
            continue;
        };
        rows.swap(rank, p);
        let (pa, pt) = rows[rank].clone();
        for (ra, rt) in rows.iter_mut().skip(rank + 1) {
            if ra.get(c) {
                ra.xor_assign(&pa);
                rt.xor_assign(&pt);
            }
        }
        rank += 1;
    }
    KernelBasis {
        len: m,
        basis: rows.into_iter().skip(rank).map(|(_, t)| t).collect(),
    }
}

/// All kernel elements, or an error naming the required count.
pub fn enumerate_kernel(basis: &KernelBasis, limit: u64) -> Result<KernelWalk<'_>> {
    check_limit(basis, limit)?;
    Ok(KernelWalk::new(basis, 0, 0))
}

pub(crate) fn check_limit(basis: &KernelBasis, limit: u64) -> Result<()> {
    if basis.size() > limit as u128 {
        return Err(Error::limit("kernel enumeration", basis.size(), limit as u128));
    }
    Ok(())
}

/// Splits the kernel into `2^prefix_bits` disjoint walks by fixing the
/// coefficients of the last `prefix_bits` basis vectors. Walks are returned
/// in increasing prefix order; concatenating them gives the canonical order.
pub fn partition_kernel(basis: &KernelBasis, prefix_bits: usize, limit: u64) -> Result<Vec<KernelWalk<'_>>> {
    check_limit(basis, limit)?;
    let p = prefix_bits.min(basis.dimension());
    Ok((0..1u64 << p).map(|prefix| KernelWalk::new(basis, p, prefix)).collect())
}

/// Gray-code walk over the combinations of the free basis vectors of one
/// partition; consecutive elements differ by exactly one basis vector.
#[derive(Debug, Clone)]
pub struct KernelWalk<'a> {
    basis: &'a KernelBasis,
    current: BitVector,
    step: u64,
    total: u64,
}

impl<'a> KernelWalk<'a> {
    fn new(basis: &'a KernelBasis, prefix_bits: usize, prefix: u64) -> Self {
        let d = basis.dimension();
        let free = d - prefix_bits;
        let mut current = BitVector::zeros(basis.len);
        for b in 0..prefix_bits {
            if prefix >> b & 1 == 1 {
                current.xor_assign(&basis.basis[free + b]);
            }
        }
        Self {
            basis,
            current,
            step: 0,
            total: 1u64 << free,
        }
    }

    /// Number of elements this walk yields in total.
    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// Advances the walk. Returns the current element together with the index
    /// of the basis vector flipped to reach it (`None` for the first element).
    pub fn advance(&mut self) -> Option<(&BitVector, Option<usize>)> {
        if self.step >= self.total {
            return None;
        }
        let flipped = if self.step == 0 {
            None
        } else {
            let j = self.step.trailing_zeros() as usize;
            self.current.xor_assign(&self.basis.basis[j]);
            Some(j)
        };
        self.step += 1;
        Some((&self.current, flipped))
    }

    pub fn basis(&self) -> &'a KernelBasis {
        self.basis
    }
}

impl Iterator for KernelWalk<'_> {
    type Item = BitVector;

    fn next(&mut self) -> Option<BitVector> {
        self.advance().map(|(t, _)| t.clone())
    }
}

//! Small dense exact linear algebra.

use crate::scalar::Field;

/// Rank of a list of rows, by fraction-producing Gaussian elimination.
pub fn rank<T: Field>(rows: &[Vec<T>]) -> usize {
    let mut m: Vec<Vec<T>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone() / pivot.clone();
            for j in c..cols {
                let v = m[r][j].clone();
                m[i][j] = m[i][j].clone() - f.clone() * v;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

pub fn integer_rows<T: Field>(rows: &[&[i64]]) -> Vec<Vec<T>> {
    rows.iter()
        .map(|r| r.iter().map(|&v| T::from_i64(v)).collect())
        .collect()
}

/// Indices of a maximal linearly independent subset, chosen greedily in order.
pub fn independent_subset<T: Field>(rows: &[Vec<T>]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut echelon: Vec<Vec<T>> = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut v = row.clone();
        for e in &echelon {
            let lead = e.iter().position(|x| !x.is_zero()).unwrap();
            if !v[lead].is_zero() {
                let f = v[lead].clone() / e[lead].clone();
                for j in lead..v.len() {
                    v[j] = v[j].clone() - f.clone() * e[j].clone();
                }
            }
        }
        if v.iter().any(|x| !x.is_zero()) {
            chosen.push(idx);
            // echelon stays sorted by leading column
            let lead = v.iter().position(|x| !x.is_zero()).unwrap();
            let pos = echelon
                .iter()
                .position(|e| e.iter().position(|x| !x.is_zero()).unwrap() > lead)
                .unwrap_or(echelon.len());
            echelon.insert(pos, v);
        }
    }
    chosen
}

/// Solves a square system; `None` when singular.
pub fn solve_square<T: Field>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = a.len();
    let mut m: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = T::one() / m[c][c].clone();
        for j in c..=n {
            m[c][j] = m[c][j].clone() * inv.clone();
        }
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in c..=n {
                let v = m[c][j].clone();
                m[i][j] = m[i][j].clone() - f.clone() * v;
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

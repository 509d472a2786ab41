//! Dense integer matrices: exact determinant, rank, signature and Smith
//! invariants. Entries are stored as i64; anything that can grow is done in
//! BigInt / BigRational.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<i64>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect()
}

pub fn is_square(a: &IntMatrix) -> bool {
    a.iter().all(|row| row.len() == a.len())
}

pub fn transpose(a: &IntMatrix) -> IntMatrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

fn checked(x: i128) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Internal("integer matrix entry overflows i64".into()))
}

pub fn mul(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    let inner = b.len();
    if a.iter().any(|row| row.len() != inner) {
        return Err(Error::Internal("matrix product shape mismatch".into()));
    }
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| checked((0..inner).map(|k| row[k] as i128 * b[k][j] as i128).sum()))
                .collect()
        })
        .collect()
}

pub fn add(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn sub(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn pow(a: &IntMatrix, k: u32) -> Result<IntMatrix> {
    let mut result = identity(a.len());
    for _ in 0..k {
        result = mul(&result, a)?;
    }
    Ok(result)
}

pub fn block_diag(blocks: &[&IntMatrix]) -> IntMatrix {
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    let mut out = vec![vec![0; n]; n];
    let mut offset = 0;
    for b in blocks {
        for (i, row) in b.iter().enumerate() {
            out[offset + i][offset..offset + row.len()].copy_from_slice(row);
        }
        offset += b.len();
    }
    out
}

pub fn is_symmetric(a: &IntMatrix) -> bool {
    is_square(a) && (0..a.len()).all(|i| (0..i).all(|j| a[i][j] == a[j][i]))
}

fn to_big(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(a: &IntMatrix) -> Result<BigInt> {
    if !is_square(a) {
        return Err(Error::Internal("determinant of a non-square matrix".into()));
    }
    let n = a.len();
    let mut m = to_big(a);
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return Ok(BigInt::zero());
            };
            m.swap(k, r);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    Ok(sign * prev)
}

/// Rank over Q.
pub fn rank_q(a: &IntMatrix) -> usize {
    let mut m = to_big(a);
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, r);
        for i in rank + 1..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let (a, b) = (m[rank][c].clone(), m[i][c].clone());
            for j in c..cols {
                let v = &m[i][j] * &a - &m[rank][j] * &b;
                m[i][j] = v;
            }
            let g = m[i].iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if !g.is_zero() && !g.is_one() {
                for x in m[i].iter_mut() {
                    *x /= &g;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over F_p.
pub fn rank_mod_p(a: &IntMatrix, p: u32) -> usize {
    let p = p as i64;
    let mut m: Vec<Vec<i64>> = a
        .iter()
        .map(|r| r.iter().map(|x| x.rem_euclid(p)).collect())
        .collect();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let inv = |x: i64| {
        let (mut r, mut b, mut e) = (1i64, x, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(r) = (rank..rows).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, r);
        let scale = inv(m[rank][c]);
        for x in m[rank].iter_mut() {
            *x = *x * scale % p;
        }
        for i in 0..rows {
            if i != rank && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    m[i][j] = (m[i][j] - f * m[rank][j]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Inertia (positive, negative, zero) of a symmetric integer matrix, by
/// congruence diagonalization over Q.
pub fn inertia(a: &IntMatrix) -> Result<(usize, usize, usize)> {
    if !is_symmetric(a) {
        return Err(Error::Internal("inertia of a non-symmetric matrix".into()));
    }
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let (mut pos, mut neg) = (0, 0);
    for k in 0..n {
        if m[k][k].is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !m[i][i].is_zero()) {
                m.swap(k, i);
                for row in m.iter_mut() {
                    row.swap(k, i);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !m[k][j].is_zero()) {
                // x_k ← x_k + x_j makes the pivot 2·m[k][j] ≠ 0.
                for c in 0..n {
                    let v = &m[k][c] + &m[j][c];
                    m[k][c] = v;
                }
                for r in 0..n {
                    let v = &m[r][k] + &m[r][j];
                    m[r][k] = v;
                }
            } else {
                continue;
            }
        }
        let pivot = m[k][k].clone();
        if pivot.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if m[i][k].is_zero() {
                continue;
            }
            let f = &m[i][k] / &pivot;
            for j in k..n {
                let v = &m[i][j] - &f * &m[k][j];
                m[i][j] = v;
            }
        }
        for i in k + 1..n {
            m[k][i] = BigRational::zero();
        }
        for i in k + 1..n {
            m[i][k] = BigRational::zero();
        }
    }
    Ok((pos, neg, n - pos - neg))
}

/// Signature of a symmetric integer matrix.
pub fn signature(a: &IntMatrix) -> Result<i64> {
    let (pos, neg, _) = inertia(a)?;
    Ok(pos as i64 - neg as i64)
}

/// Nonzero Smith invariant factors d_1 | d_2 | … (positive).
pub fn smith_invariants(a: &IntMatrix) -> Vec<BigInt> {
    let mut m = to_big(a);
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest nonzero entry in the remaining block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        m.swap(t, bi);
        for row in m.iter_mut() {
            row.swap(t, bj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                for j in t..cols {
                    let v = &m[i][j] - &q * &m[t][j];
                    m[i][j] = v;
                }
                if !m[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                for i in t..rows {
                    let v = &m[i][j] - &q * &m[i][t];
                    m[i][j] = v;
                }
                if !m[t][j].is_zero() {
                    clean = false;
                }
            }
            if clean {
                // The pivot must divide the rest; otherwise fold a row in.
                let bad = (t + 1..rows)
                    .find(|&i| (t + 1..cols).any(|j| !m[i][j].is_multiple_of(&m[t][t])));
                match bad {
                    None => break,
                    Some(i) => {
                        for j in t..cols {
                            let v = &m[t][j] + &m[i][j];
                            m[t][j] = v;
                        }
                        continue;
                    }
                }
            }
            // Move the smallest nonzero entry of row/column t to the pivot.
            let mut best = (t, t);
            for i in t..rows {
                if !m[i][t].is_zero() && m[i][t].abs() < m[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if !m[t][j].is_zero() && m[t][j].abs() < m[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.1 == t {
                m.swap(t, best.0);
            } else {
                for row in m.iter_mut() {
                    row.swap(t, best.1);
                }
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag
}

/// Exact inverse over Q, or `None` when singular.
pub fn inverse_rational(a: &IntMatrix) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .chain((0..n).map(|j| BigRational::from_integer(((i == j) as i64).into())))
                .collect()
        })
        .collect();
    for c in 0..n {
        let r = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, r);
        let pivot = m[c][c].clone();
        for x in m[c].iter_mut() {
            *x = &*x / &pivot;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..2 * n {
                    let v = &m[i][j] - &f * &m[c][j];
                    m[i][j] = v;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

//! Integral lattices with an order-p isometry: form invariants, the
//! Z[G]-module decomposition, and the g-signature.

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{check_odd_prime, CycNum};
use crate::error::{Error, Result};
use crate::intmat::{self, IntMatrix};

/// A lattice Z^n with Gram matrix `gram` and generator action `action`
/// (x ↦ action·x on coordinate columns).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GLattice {
    pub p: u32,
    pub gram: IntMatrix,
    pub action: IntMatrix,
}

impl GLattice {
    /// Checks shapes, symmetry, invariance AᵀGA = G and A^p = 1.
    pub fn new(p: u32, gram: IntMatrix, action: IntMatrix) -> Result<Self> {
        check_odd_prime(p)?;
        let n = gram.len();
        if !intmat::is_square(&gram) || !intmat::is_square(&action) || action.len() != n {
            return Err(Error::Usage("Gram and action must be square of equal size".into()));
        }
        if !intmat::is_symmetric(&gram) {
            return Err(Error::Verification("Gram matrix is not symmetric".into()));
        }
        let l = GLattice { p, gram, action };
        if intmat::mul(&intmat::mul(&intmat::transpose(&l.action), &l.gram)?, &l.action)? != l.gram {
            return Err(Error::Verification("action does not preserve the form".into()));
        }
        if intmat::pow(&l.action, p)? != intmat::identity(n) {
            return Err(Error::Verification(format!("action does not have order dividing {p}")));
        }
        Ok(l)
    }

    /// The form with the trivial action.
    pub fn trivial(p: u32, gram: IntMatrix) -> Result<Self> {
        let n = gram.len();
        Self::new(p, gram, intmat::identity(n))
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    /// The same G-lattice in the basis given by the columns of `basis`:
    /// Gram BᵀGB and action B⁻¹AB. Fails unless B is unimodular.
    pub fn change_basis(&self, basis: &IntMatrix) -> Result<Self> {
        let d = intmat::det(basis)?;
        if d.abs() != BigInt::one() {
            return Err(Error::Verification(format!("basis change has determinant {d}")));
        }
        let inv = intmat::inverse_rational(basis)
            .ok_or_else(|| Error::Internal("unimodular matrix without inverse".into()))?;
        let inv: IntMatrix = inv
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer().to_i64().unwrap_or(i64::MAX)).collect())
            .collect();
        let gram = intmat::mul(&intmat::mul(&intmat::transpose(basis), &self.gram)?, basis)?;
        let action = intmat::mul(&intmat::mul(&inv, &self.action)?, basis)?;
        GLattice::new(self.p, gram, action)
    }
}

/// Orthogonal direct sum.
pub fn direct_sum(parts: &[GLattice]) -> Result<GLattice> {
    let Some(first) = parts.first() else {
        return Err(Error::Usage("direct sum of nothing".into()));
    };
    if parts.iter().any(|l| l.p != first.p) {
        return Err(Error::Usage("direct sum of lattices for different primes".into()));
    }
    let grams: Vec<&IntMatrix> = parts.iter().map(|l| &l.gram).collect();
    let actions: Vec<&IntMatrix> = parts.iter().map(|l| &l.action).collect();
    Ok(GLattice {
        p: first.p,
        gram: intmat::block_diag(&grams),
        action: intmat::block_diag(&actions),
    })
}

/// Rank, determinant, signature and parity of the underlying form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormInvariants {
    pub rank: usize,
    pub det: BigInt,
    pub signature: i64,
    pub even: bool,
}

impl FormInvariants {
    pub fn unimodular(&self) -> bool {
        self.det.abs().is_one()
    }
}

pub fn form_invariants(l: &GLattice) -> Result<FormInvariants> {
    Ok(FormInvariants {
        rank: l.rank(),
        det: intmat::det(&l.gram)?,
        signature: intmat::signature(&l.gram)?,
        even: (0..l.rank()).all(|i| l.gram[i][i] % 2 == 0),
    })
}

/// Z[G]-module decomposition Z^trivial ⊕ Z[G]^free ⊕ Z[ζ]^cyclotomic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RepInvariants {
    pub trivial: usize,
    pub free: usize,
    pub cyclotomic: usize,
}

fn norm_matrix(l: &GLattice) -> Result<IntMatrix> {
    let n = l.rank();
    let mut acc = vec![vec![0; n]; n];
    let mut power = intmat::identity(n);
    for _ in 0..l.p {
        acc = intmat::add(&acc, &power);
        power = intmat::mul(&power, &l.action)?;
    }
    Ok(acc)
}

/// p-adic valuation of the product of the nonzero Smith invariants; this is
/// log_p of the order of ker B / im A when im A ⊂ ker B has full rank.
fn log_p_order(smith: &[BigInt], p: u32) -> Result<usize> {
    let p = BigInt::from(p);
    let mut total = 0;
    for d in smith {
        let mut d = d.clone();
        while (&d % &p).is_zero() {
            d /= &p;
            total += 1;
        }
        if !d.is_one() {
            return Err(Error::Verification(format!(
                "Tate cohomology has torsion prime to p (factor {d})"
            )));
        }
    }
    Ok(total)
}

/// Module decomposition from Tate cohomology: Ĥ⁰ = ker(g−1)/im N has
/// order p^trivial and Ĥ¹ = ker N/im(g−1) has order p^cyclotomic. Both
/// orders are the products of the Smith invariants of N and g−1.
pub fn rep_invariants(l: &GLattice) -> Result<RepInvariants> {
    let n = l.rank();
    let p = l.p as usize;
    let g_minus_1 = intmat::sub(&l.action, &intmat::identity(n));
    let norm = norm_matrix(l)?;
    if intmat::rank_q(&g_minus_1) + intmat::rank_q(&norm) != n {
        return Err(Error::Internal("ker(g−1) and im N have different ranks".into()));
    }
    let trivial = log_p_order(&intmat::smith_invariants(&norm), l.p)?;
    let cyclotomic = log_p_order(&intmat::smith_invariants(&g_minus_1), l.p)?;
    let rest = n
        .checked_sub(trivial + (p - 1) * cyclotomic)
        .filter(|r| r % p == 0)
        .ok_or_else(|| Error::Verification("inconsistent module decomposition".into()))?;
    Ok(RepInvariants { trivial, free: rest / p, cyclotomic })
}

/// The same decomposition read off from ranks over F_p: on the reduction,
/// g−1 has rank p−1 per free summand and p−2 per cyclotomic summand, and N
/// has rank 1 per free summand.
pub fn rep_invariants_mod_p(l: &GLattice) -> Result<RepInvariants> {
    let n = l.rank();
    let p = l.p as usize;
    let g_minus_1 = intmat::sub(&l.action, &intmat::identity(n));
    let free = intmat::rank_mod_p(&norm_matrix(l)?, l.p);
    let r = intmat::rank_mod_p(&g_minus_1, l.p);
    let cyclotomic = match r.checked_sub(free * (p - 1)) {
        Some(0) => 0,
        Some(rest) if p > 2 && rest % (p - 2) == 0 => rest / (p - 2),
        _ => return Err(Error::Verification("inconsistent F_p ranks".into())),
    };
    let trivial = n
        .checked_sub(free * p + cyclotomic * (p - 1))
        .ok_or_else(|| Error::Verification("inconsistent F_p ranks".into()))?;
    Ok(RepInvariants { trivial, free, cyclotomic })
}

/// Signatures σ_0, …, σ_h (h = (p−1)/2) of the form on the ζ^j-eigenspaces.
///
/// For m = 0..h the symmetric matrix G(A^m + A^{−m}) acts on the ζ^{±j}
/// part as 2cos(2πjm/p) times the form, so its signature is
/// σ_0 + Σ_{j≥1} sgn(cos(2πjm/p))·2σ_j. These h+1 equations are solved
/// exactly; the sign matrix is invertible for p ∈ {3, 5, 7}.
pub fn eigen_signatures(l: &GLattice) -> Result<Vec<i64>> {
    let p = l.p as usize;
    let h = (p - 1) / 2;
    let n = l.rank();
    let inverse = intmat::pow(&l.action, l.p - 1)?;
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut power = intmat::identity(n);
    let mut inv_power = intmat::identity(n);
    for m in 0..=h {
        let twisted = intmat::mul(&l.gram, &intmat::add(&power, &inv_power))?;
        let sig = intmat::signature(&twisted)?;
        let mut row = vec![BigRational::one()];
        for j in 1..=h {
            let c = (2.0 * std::f64::consts::PI * (j * m) as f64 / p as f64).cos();
            row.push(BigRational::from_integer(if c > 0.0 { 2 } else { -2 }.into()));
        }
        row.push(BigRational::from_integer(sig.into()));
        rows.push(row);
        power = intmat::mul(&power, &l.action)?;
        inv_power = intmat::mul(&inv_power, &inverse)?;
    }
    // Gauss–Jordan on the (h+1)×(h+1) system.
    let size = h + 1;
    for c in 0..size {
        let r = (c..size)
            .find(|&r| !rows[r][c].is_zero())
            .ok_or_else(|| Error::Unsupported(format!("twisted signatures do not determine σ_j for p = {p}")))?;
        rows.swap(c, r);
        let pivot = rows[c][c].clone();
        for x in rows[c].iter_mut() {
            *x = &*x / &pivot;
        }
        for i in 0..size {
            if i != c && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..=size {
                    let v = &rows[i][j] - &f * &rows[c][j];
                    rows[i][j] = v;
                }
            }
        }
    }
    rows.iter()
        .map(|r| {
            let v = &r[size];
            if v.is_integer() {
                Ok(v.to_integer().to_i64().unwrap_or(0))
            } else {
                Err(Error::Verification(format!("eigenspace signature {v} is not an integer")))
            }
        })
        .collect()
}

/// Sign(g, L) = Σ_j σ_j ζ^j.
pub fn g_signature_of_form(l: &GLattice) -> Result<CycNum> {
    let sigma = eigen_signatures(l)?;
    let p = l.p;
    let mut acc = CycNum::from_integer(p, sigma[0])?;
    for (j, &s) in sigma.iter().enumerate().skip(1) {
        let pair = &CycNum::zeta_pow(p, j as i64)? + &CycNum::zeta_pow(p, -(j as i64))?;
        acc = &acc + &pair.scale_int(s);
    }
    Ok(acc)
}

/// (r_+^G, r_-^G): inertia of the form restricted to the fixed sublattice.
pub fn fixed_part_inertia(l: &GLattice) -> Result<(i64, i64)> {
    let n = l.rank();
    let fixed_rank = (n - intmat::rank_q(&intmat::sub(&l.action, &intmat::identity(n)))) as i64;
    let sigma0 = eigen_signatures(l)?[0];
    if (fixed_rank + sigma0) % 2 != 0 {
        return Err(Error::Verification("fixed part rank and signature have different parity".into()));
    }
    Ok(((fixed_rank + sigma0) / 2, (fixed_rank - sigma0) / 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyperbolic() -> IntMatrix {
        vec![vec![0, 1], vec![1, 0]]
    }

    /// Z[G] with the form −Σx_i² permuted cyclically.
    fn regular(p: u32) -> GLattice {
        let n = p as usize;
        let gram = (0..n).map(|i| (0..n).map(|j| -((i == j) as i64)).collect()).collect();
        let action = (0..n).map(|i| (0..n).map(|j| ((i + n - 1) % n == j) as i64).collect()).collect();
        GLattice::new(p, gram, action).unwrap()
    }

    #[test]
    fn rejects_non_invariant_action() {
        let gram = vec![vec![2, 1], vec![1, 2]];
        let swap = vec![vec![1, 0], vec![1, -1]];
        assert!(GLattice::new(3, gram, swap).is_err());
    }

    #[test]
    fn regular_representation() {
        for p in [3, 5, 7] {
            let l = regular(p);
            let rep = RepInvariants { trivial: 0, free: 1, cyclotomic: 0 };
            assert_eq!(rep_invariants(&l).unwrap(), rep);
            assert_eq!(rep_invariants_mod_p(&l).unwrap(), rep);
            // Negative definite: σ_j = −1 for every j, so Sign(g) = −Σ_j ζ^j = 0.
            assert_eq!(eigen_signatures(&l).unwrap(), vec![-1; (p as usize + 1) / 2]);
            assert_eq!(g_signature_of_form(&l).unwrap(), CycNum::from_integer(p, 0).unwrap());
            assert_eq!(fixed_part_inertia(&l).unwrap(), (0, 1));
        }
    }

    #[test]
    fn trivial_hyperbolic() {
        let l = GLattice::trivial(5, hyperbolic()).unwrap();
        let f = form_invariants(&l).unwrap();
        assert!(f.unimodular() && f.even);
        assert_eq!(f.signature, 0);
        assert_eq!(rep_invariants(&l).unwrap(), RepInvariants { trivial: 2, free: 0, cyclotomic: 0 });
        assert_eq!(fixed_part_inertia(&l).unwrap(), (1, 1));
    }

    #[test]
    fn cyclotomic_summand() {
        // Z[ζ_3] as the quotient of Z[G] by the norm: basis 1, ζ with ζ² = −1 − ζ.
        let action = vec![vec![0, -1], vec![1, -1]];
        let gram = vec![vec![2, -1], vec![-1, 2]];
        let l = GLattice::new(3, gram, action).unwrap();
        let rep = RepInvariants { trivial: 0, free: 0, cyclotomic: 1 };
        assert_eq!(rep_invariants(&l).unwrap(), rep);
        assert_eq!(rep_invariants_mod_p(&l).unwrap(), rep);
    }

    #[test]
    fn direct_sum_adds() {
        let a = regular(3);
        let b = GLattice::trivial(3, hyperbolic()).unwrap();
        let s = direct_sum(&[a, b]).unwrap();
        assert_eq!(s.rank(), 5);
        assert_eq!(rep_invariants(&s).unwrap(), RepInvariants { trivial: 2, free: 1, cyclotomic: 0 });
        assert!(direct_sum(&[regular(3), regular(5)]).is_err());
    }
}

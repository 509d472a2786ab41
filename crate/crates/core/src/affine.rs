//! The generic character computation compiled to integer affine forms.
//!
//! Every quantity the generic path produces — d_j^± and the Dirac
//! coefficients k_j — is an affine function of the type counts with rational
//! coefficients. [`AffineModel`] evaluates these exactly once per (p, manifold)
//! through [`CycNum`] arithmetic and stores them as `(c + Σ w_t n_t) / den`
//! over i64, which makes exhaustive scans cheap. Equality with the direct
//! evaluation is covered by tests.

use num::rational::Ratio;
use num::{BigInt, BigRational, Integer, ToPrimitive, Zero};

use crate::cyclotomic::{signature_term, spin_term, CycNum};
use crate::error::{Error, Result};
use crate::fixed_point::{enumerate_types, FpType, ManifoldInvariants};

/// `(constant + Σ weights[t]·n_t) / den` with `den > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineRow {
    pub constant: i64,
    pub weights: Vec<i64>,
    pub den: i64,
}

impl AffineRow {
    fn from_rationals(constant: &BigRational, weights: &[BigRational]) -> Result<Self> {
        let den = weights
            .iter()
            .fold(constant.denom().clone(), |acc, w| acc.lcm(w.denom()));
        let scale = |q: &BigRational| -> Result<i64> {
            (q * BigRational::from_integer(den.clone()))
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Internal("affine coefficient overflows i64".into()))
        };
        Ok(AffineRow {
            constant: scale(constant)?,
            weights: weights.iter().map(scale).collect::<Result<_>>()?,
            den: den
                .to_i64()
                .ok_or_else(|| Error::Internal("affine denominator overflows i64".into()))?,
        })
    }

    #[inline]
    pub fn numerator(&self, counts: &[u32]) -> i64 {
        self.weights
            .iter()
            .zip(counts)
            .fold(self.constant, |acc, (&w, &n)| acc + w * n as i64)
    }

    pub fn value(&self, counts: &[u32]) -> Ratio<i64> {
        Ratio::new(self.numerator(counts), self.den)
    }

    /// Integer value, or `None` when the numerator is not divisible.
    #[inline]
    pub fn integer_value(&self, counts: &[u32]) -> Option<i64> {
        let n = self.numerator(counts);
        (n % self.den == 0).then_some(n / self.den)
    }
}

/// Compiled generic model for one prime and one manifold.
#[derive(Clone, Debug)]
pub struct AffineModel {
    pub p: u32,
    pub types: Vec<FpType>,
    pub e: i64,
    pub b_plus: i64,
    pub b_minus: i64,
    /// d_j^+ for j = 0..=(p−1)/2 (the rest follow by d_j = d_{p−j}).
    pub d_plus: Vec<AffineRow>,
    pub d_minus: Vec<AffineRow>,
    /// k_j for j = 0..=(p−1)/2.
    pub k: Vec<AffineRow>,
}

/// Σ_{m=1}^{p−1} ζ^(−jm) f(m) as a rational; `f(m)` must make the sum
/// Galois-stable.
fn twisted_sum(p: u32, j: i64, f: impl Fn(i64) -> Result<CycNum>) -> Result<BigRational> {
    let mut acc = CycNum::zero(p)?;
    for m in 1..p as i64 {
        acc = &acc + &f(m)?.mul_zeta_pow(-j * m);
    }
    acc.to_rational()
        .ok_or_else(|| Error::Internal(format!("twisted character sum at j = {j} is irrational")))
}

impl AffineModel {
    pub fn new(p: u32, manifold: &ManifoldInvariants) -> Result<Self> {
        let types = enumerate_types(p)?;
        let h = (p as i64 - 1) / 2;
        let q = |n: i64| BigRational::from_integer(BigInt::from(n));
        let two_p = q(2 * p as i64);
        let (b2, s) = (manifold.b2(), manifold.s);
        let mut d_plus = Vec::new();
        let mut d_minus = Vec::new();
        let mut k = Vec::new();
        for j in 0..=h {
            // Σ_{m≥1} ζ^(−mj) is p−1 for j = 0 and −1 otherwise.
            let unit_sum = if j == 0 { p as i64 - 1 } else { -1 };
            let mut w_plus = Vec::new();
            let mut w_minus = Vec::new();
            let mut w_k = Vec::new();
            for t in &types {
                let (a, b) = (t.a() as i64, t.b() as i64);
                let sig = twisted_sum(p, j, |m| signature_term(p, m * a, m * b))?;
                w_plus.push((q(unit_sum) + &sig) / &two_p);
                w_minus.push((q(unit_sum) - &sig) / &two_p);
                let spin = twisted_sum(p, j, |m| spin_term(p, m * a, m * b))?;
                w_k.push(spin / q(p as i64));
            }
            let c_plus = (q(b2 + s) - q(2 * unit_sum)) / &two_p;
            let c_minus = (q(b2 - s) - q(2 * unit_sum)) / &two_p;
            let c_k = BigRational::new(BigInt::from(-s), BigInt::from(8 * p as i64));
            d_plus.push(AffineRow::from_rationals(&c_plus, &w_plus)?);
            d_minus.push(AffineRow::from_rationals(&c_minus, &w_minus)?);
            k.push(AffineRow::from_rationals(&c_k, &w_k)?);
        }
        Ok(AffineModel {
            p,
            types,
            e: manifold.e,
            b_plus: manifold.b_plus,
            b_minus: manifold.b_minus,
            d_plus,
            d_minus,
            k,
        })
    }

    /// #fix ≤ e, every d_j^± is an integer, and 0 ≤ d_0^± ≤ b_±.
    #[inline]
    pub fn admissible(&self, counts: &[u32]) -> bool {
        let fix: i64 = counts.iter().map(|&n| n as i64).sum();
        fix <= self.e
            && matches!(self.d_plus[0].integer_value(counts), Some(v) if (0..=self.b_plus).contains(&v))
            && matches!(self.d_minus[0].integer_value(counts), Some(v) if (0..=self.b_minus).contains(&v))
            && self
                .d_plus
                .iter()
                .chain(&self.d_minus)
                .all(|row| row.integer_value(counts).is_some())
    }

    /// Every d_j^± is a non-negative integer.
    #[inline]
    pub fn eigenspaces_nonnegative(&self, counts: &[u32]) -> bool {
        self.d_plus
            .iter()
            .chain(&self.d_minus)
            .all(|row| matches!(row.integer_value(counts), Some(v) if v >= 0))
    }

    /// b_±^G = b_±.
    pub fn homologically_trivial(&self, counts: &[u32]) -> bool {
        self.d_plus[0].integer_value(counts) == Some(self.b_plus)
            && self.d_minus[0].integer_value(counts) == Some(self.b_minus)
    }

    pub fn b_plus_g(&self, counts: &[u32]) -> Ratio<i64> {
        self.d_plus[0].value(counts)
    }

    pub fn b_minus_g(&self, counts: &[u32]) -> Ratio<i64> {
        self.d_minus[0].value(counts)
    }

    /// d_j^± for all j = 0..p−1.
    pub fn dims(&self, counts: &[u32]) -> (Vec<Ratio<i64>>, Vec<Ratio<i64>>) {
        let expand = |rows: &[AffineRow]| {
            (0..self.p as usize)
                .map(|j| rows[j.min(self.p as usize - j)].value(counts))
                .collect()
        };
        (expand(&self.d_plus), expand(&self.d_minus))
    }

    /// k_j for all j = 0..p−1, as rationals.
    pub fn dirac(&self, counts: &[u32]) -> Vec<Ratio<i64>> {
        (0..self.p as usize)
            .map(|j| self.k[j.min(self.p as usize - j)].value(counts))
            .collect()
    }

    /// Linear conditions modulo p implied by integrality of the d_j^±:
    /// each entry `(weights, constant)` means `constant + Σ w·n ≡ 0 (mod p)`.
    pub fn congruences_mod_p(&self) -> Vec<(Vec<i64>, i64)> {
        let p = self.p as i64;
        self.d_plus
            .iter()
            .chain(&self.d_minus)
            .filter(|row| row.den % p == 0)
            .map(|row| {
                (
                    row.weights.iter().map(|w| w.rem_euclid(p)).collect::<Vec<i64>>(),
                    row.constant.rem_euclid(p),
                )
            })
            .filter(|(w, c)| !(w.iter().all(Zero::is_zero) && *c == 0))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{admissible_generic, eigenspace_dims};
    use crate::fixed_point::FpClass;

    fn to_big(r: Ratio<i64>) -> BigRational {
        BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
    }

    #[test]
    fn matches_direct_evaluation_on_samples() {
        let k3 = ManifoldInvariants::k3();
        let samples = [
            (3, "m+=12,m-=0"),
            (3, "m+=5,m-=7"),
            (5, "m14=2,m23=2"),
            (5, "m22=1,m13=3,m12=5"),
            (5, "m11=1,m12=3,m23=4"),
            (7, "m33=7,m24=7,m14=8,m23=2"),
            (7, "m16=1,m13=2"),
        ];
        for (p, text) in samples {
            let c = FpClass::parse(p, text).unwrap();
            let model = AffineModel::new(p, &k3).unwrap();
            let direct = eigenspace_dims(&c, &k3).unwrap();
            let (plus, minus) = model.dims(c.counts());
            assert_eq!(plus.into_iter().map(to_big).collect::<Vec<_>>(), direct.d_plus);
            assert_eq!(minus.into_iter().map(to_big).collect::<Vec<_>>(), direct.d_minus);
            assert_eq!(model.admissible(c.counts()), admissible_generic(&c, &k3).unwrap());
            assert_eq!(
                model.eigenspaces_nonnegative(c.counts()),
                crate::constraints::eigenspaces_nonnegative(&c, &k3).unwrap()
            );
        }
    }

    #[test]
    fn p3_rows_are_the_closed_forms() {
        let e4 = ManifoldInvariants::elliptic(4).unwrap();
        let model = AffineModel::new(3, &e4).unwrap();
        // b+^G = (3(e+s) + 8m+ + 4m−)/18 − 1 and 72 k_0 = 16(m+ − m−) − 3s.
        for counts in [[12u32, 0], [9, 6], [0, 24], [3, 0]] {
            let (mp, mm) = (counts[0] as i64, counts[1] as i64);
            assert_eq!(
                model.b_plus_g(&counts),
                Ratio::new(3 * (48 - 32) + 8 * mp + 4 * mm, 18) - 1
            );
            assert_eq!(model.dirac(&counts)[0], Ratio::new(16 * (mp - mm) + 96, 72));
        }
    }

    #[test]
    fn congruences_hold_on_admissible_classes() {
        let k3 = ManifoldInvariants::k3();
        let model = AffineModel::new(5, &k3).unwrap();
        let rows = model.congruences_mod_p();
        assert!(!rows.is_empty());
        let c = FpClass::parse(5, "m22=1,m13=3,m12=5").unwrap();
        assert!(model.admissible(c.counts()));
        for (w, k) in rows {
            let v: i64 = k + w.iter().zip(c.counts()).map(|(w, &n)| w * n as i64).sum::<i64>();
            assert_eq!(v.rem_euclid(5), 0);
        }
    }
}

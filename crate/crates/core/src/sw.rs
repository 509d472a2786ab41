//! Seiberg–Witten data of the standard smooth structures on E(n), the
//! equivariant Dirac index, and the mod-p vanishing obstruction.

use std::fmt;

use num::rational::Ratio;
use num::{BigInt, BigRational, Integer, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::closed_form::dirac_closed_rational;
use crate::cyclotomic::{check_odd_prime, residue, spin_term, CycNum};
use crate::error::{Error, Result};
use crate::fixed_point::{enumerate_types, FpClass, ManifoldInvariants};

/// A smooth structure on E(n): multiple-fiber multiplicities (k, l) and the
/// central Alexander coefficient a₀ of the surgery knot (1 without surgery).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothStructureDesc {
    pub n: u32,
    pub log_mult: (u64, u64),
    pub knot_a0: i64,
}

impl SmoothStructureDesc {
    pub fn new(n: u32, log_mult: (u64, u64), knot_a0: i64) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::Domain(format!("E({n}) must have even n >= 2")));
        }
        let (k, l) = log_mult;
        if k % 2 == 0 || l % 2 == 0 || k.gcd(&l) != 1 {
            return Err(Error::Domain(format!(
                "multiplicities ({k}, {l}) must be odd and coprime"
            )));
        }
        Ok(SmoothStructureDesc { n, log_mult, knot_a0 })
    }

    /// The standard structure on E(n).
    pub fn standard(n: u32) -> Result<Self> {
        Self::new(n, (1, 1), 1)
    }

    /// Membership in the family on which the obstruction is applied: every
    /// log transform E(n)_{k,l} qualifies, knot surgery needs a₀ ≢ 0 mod p.
    pub fn in_family(&self, p: u32) -> bool {
        residue(self.knot_a0, p) != 0
    }
}

/// binom(n, k) as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// SW(c_spin) of E(n)_{k,l}: (−1)^((n−2)/2) · binom(n−2, (n−2)/2).
pub fn sw_spin_en(n: u32) -> Result<BigInt> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::Domain(format!("E({n}) is not spin or not defined")));
    }
    let half = (n as u64 - 2) / 2;
    let magnitude = binomial(n as u64 - 2, half);
    Ok(if half % 2 == 0 { magnitude } else { -magnitude })
}

/// SW(c_spin) of a described structure: a₀ · SW_{E(n)}(c_spin).
pub fn sw_of_structure(d: &SmoothStructureDesc) -> Result<BigInt> {
    Ok(sw_spin_en(d.n)? * d.knot_a0)
}

/// binom(n, k) mod p via Lucas' theorem.
pub fn binom_mod_p_lucas(n: u64, k: u64, p: u32) -> Result<u32> {
    check_odd_prime(p)?;
    if k > n {
        return Err(Error::Domain(format!("binom({n}, {k}) requires k <= n")));
    }
    let p64 = p as u64;
    let (mut n, mut k) = (n, k);
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (ni, ki) = (n % p64, k % p64);
        if ki > ni {
            return Ok(0);
        }
        // Digits are below p, so the small binomial fits in u64.
        acc = acc * (binomial(ni, ki) % p64).to_u64().expect("below p") % p64;
        n /= p64;
        k /= p64;
    }
    Ok(acc as u32)
}

/// Every base-p digit of (n−2)/2 is at most (p−1)/2; equivalent to
/// binom(n−2, (n−2)/2) ≢ 0 mod p.
pub fn digit_condition(n: u32, p: u32) -> Result<bool> {
    check_odd_prime(p)?;
    if n < 2 || n % 2 != 0 {
        return Err(Error::Domain(format!("n = {n} must be even and >= 2")));
    }
    let mut half = (n - 2) / 2;
    while half > 0 {
        if half % p > (p - 1) / 2 {
            return Ok(false);
        }
        half /= p;
    }
    Ok(true)
}

/// Multiplicities k_j of the weight-j representation in ind_G of the Dirac
/// operator, j = 0..p−1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiracCoefficients {
    pub p: u32,
    pub k: Vec<i64>,
}

impl DiracCoefficients {
    fn from_rationals(p: u32, values: &[Ratio<i64>], s: i64) -> Result<Self> {
        let mut k = Vec::with_capacity(values.len());
        for (j, v) in values.iter().enumerate() {
            if !v.is_integer() {
                return Err(Error::Inconsistent(format!("k_{j} = {v} is not an integer")));
            }
            k.push(v.to_integer());
        }
        let out = DiracCoefficients { p, k };
        out.check(s)?;
        Ok(out)
    }

    fn check(&self, s: i64) -> Result<()> {
        let p = self.p as usize;
        if (1..p).any(|j| self.k[j] != self.k[p - j]) {
            return Err(Error::Internal(format!("k = {:?} is not conjugate-symmetric", self.k)));
        }
        let total: i64 = self.k.iter().sum();
        if 8 * total != -s {
            return Err(Error::Internal(format!("Σ k_j = {total} differs from −s/8")));
        }
        Ok(())
    }

    pub fn max(&self) -> i64 {
        *self.k.iter().max().expect("p >= 3 entries")
    }
}

fn require_spin(manifold: &ManifoldInvariants) -> Result<()> {
    if !manifold.spin {
        return Err(Error::Domain(format!("{} is not spin", manifold.name)));
    }
    Ok(())
}

/// k_j = (1/p)[−s/8 + Σ_{m=1}^{p−1} ζ^(−jm) Σ_i p(m·a_i, m·b_i)], computed
/// in Q(ζ).
pub fn dirac_coefficients_generic(
    c: &FpClass,
    manifold: &ManifoldInvariants,
) -> Result<DiracCoefficients> {
    require_spin(manifold)?;
    let p = c.p();
    let types = enumerate_types(p)?;
    let mut index = Vec::with_capacity(p as usize);
    for m in 1..p as i64 {
        let mut total = CycNum::zero(p)?;
        for (t, &n) in types.iter().zip(c.counts()) {
            if n > 0 {
                let term = spin_term(p, m * t.a() as i64, m * t.b() as i64)?;
                total = &total + &term.scale_int(n as i64);
            }
        }
        index.push(total);
    }
    let base = BigRational::new(BigInt::from(-manifold.s), BigInt::from(8));
    let mut values = Vec::with_capacity(p as usize);
    for j in 0..p as i64 {
        let mut acc = CycNum::from_rational(p, base.clone())?;
        for (i, value) in index.iter().enumerate() {
            let m = i as i64 + 1;
            acc = &acc + &value.mul_zeta_pow(-j * m);
        }
        let q = acc
            .to_rational()
            .ok_or_else(|| Error::Internal(format!("k_{j} is irrational")))?
            / BigInt::from(p);
        let to_i64 = |x: &BigInt| {
            x.to_i64()
                .ok_or_else(|| Error::Internal("Dirac coefficient overflows i64".into()))
        };
        values.push(Ratio::new(to_i64(q.numer())?, to_i64(q.denom())?));
    }
    DiracCoefficients::from_rationals(p, &values, manifold.s)
}

/// The hand-derived k_j formulas (p ∈ {3, 5, 7}).
pub fn dirac_coefficients_closed(
    c: &FpClass,
    manifold: &ManifoldInvariants,
) -> Result<DiracCoefficients> {
    require_spin(manifold)?;
    let values = dirac_closed_rational(c, manifold)?;
    DiracCoefficients::from_rationals(c.p(), &values, manifold.s)
}

/// Outcome of the mod-p vanishing obstruction, relative to one smooth
/// structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    /// No smooth action in this class for the given structure.
    Nonsmoothable,
    /// The obstruction gives no conclusion.
    NoObstruction,
    /// SW ≡ 0 mod p or b_+^G = 0: the vanishing theorem does not apply.
    NotApplicable,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Nonsmoothable => "Nonsmoothable",
            Verdict::NoObstruction => "NoObstruction",
            Verdict::NotApplicable => "NotApplicable",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The obstruction from precomputed data: `sw_nonzero` is SW ≢ 0 mod p.
pub fn verdict(sw_nonzero: bool, b_plus_g: i64, k: &[i64]) -> Verdict {
    if !sw_nonzero || b_plus_g < 1 {
        return Verdict::NotApplicable;
    }
    // A smooth action forces SW ≡ 0 mod p unless some 2k_j ≥ 1 + b_+^G.
    if k.iter().all(|&kj| 2 * kj < 1 + b_plus_g) {
        Verdict::Nonsmoothable
    } else {
        Verdict::NoObstruction
    }
}

/// Nonsmoothability test for an admissible class on a spin manifold with
/// b_+ ≥ 2, relative to the structure `d`.
pub fn ns_test(
    c: &FpClass,
    manifold: &ManifoldInvariants,
    d: &SmoothStructureDesc,
    p: u32,
) -> Result<Verdict> {
    if c.p() != p {
        return Err(Error::Usage(format!("class is for p = {}, test asked for p = {p}", c.p())));
    }
    if manifold.b_plus < 2 {
        return Err(Error::Domain("the vanishing theorem needs b+ >= 2".into()));
    }
    let data = crate::constraints::quotient_data(c, manifold)?;
    let k = dirac_coefficients_generic(c, manifold)?;
    let sw = sw_of_structure(d)?;
    let sw_nonzero = !(sw % BigInt::from(p)).is_zero();
    Ok(verdict(sw_nonzero, data.b_plus_g, &k.k))
}

/// Residue of an SW value in 0..p.
pub fn sw_mod_p(sw: &BigInt, p: u32) -> u32 {
    sw.mod_floor(&BigInt::from(p)).to_u32().expect("residue below p")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(p: u32, text: &str) -> FpClass {
        FpClass::parse(p, text).unwrap()
    }

    #[test]
    fn sw_values() {
        assert_eq!(sw_spin_en(2).unwrap(), BigInt::from(1));
        assert_eq!(sw_spin_en(4).unwrap(), BigInt::from(-2));
        assert_eq!(sw_spin_en(6).unwrap(), BigInt::from(6));
        assert!(sw_spin_en(5).is_err());
        assert!(sw_spin_en(0).is_err());
        let d = SmoothStructureDesc::new(4, (1, 1), 3).unwrap();
        assert_eq!(sw_of_structure(&d).unwrap(), BigInt::from(-6));
        let d = SmoothStructureDesc::new(2, (3, 5), 1).unwrap();
        assert_eq!(sw_of_structure(&d).unwrap(), BigInt::from(1));
        assert!(SmoothStructureDesc::new(2, (3, 9), 1).is_err());
        assert!(SmoothStructureDesc::new(2, (2, 1), 1).is_err());
        assert_eq!(sw_mod_p(&BigInt::from(-2), 3), 1);
    }

    #[test]
    fn lucas_examples() {
        assert_eq!(binom_mod_p_lucas(2, 1, 3).unwrap(), 2);
        assert_eq!(binom_mod_p_lucas(4, 2, 3).unwrap(), 0);
        assert!(binom_mod_p_lucas(1, 2, 3).is_err());
        for n in (2..=60).step_by(2) {
            if n % 10 == 0 || n % 10 == 8 {
                assert_eq!(binom_mod_p_lucas(n - 2, (n - 2) / 2, 5).unwrap(), 0, "n = {n}");
            }
        }
        assert!(digit_condition(4, 3).unwrap());
        assert!(!digit_condition(6, 3).unwrap());
    }

    #[test]
    fn dirac_examples_agree() {
        let e4 = ManifoldInvariants::elliptic(4).unwrap();
        let k3 = ManifoldInvariants::k3();
        let cases = [
            (3, "m+=12,m-=0", &e4, vec![4, 0, 0]),
            (5, "m22=1,m13=3,m12=5", &k3, vec![0, 1, 0, 0, 1]),
            (7, "m33=7,m24=7,m14=8,m23=2", &k3, vec![0, 1, 0, 0, 0, 0, 1]),
        ];
        for (p, text, m, expected) in cases {
            let c = class(p, text);
            assert_eq!(dirac_coefficients_generic(&c, m).unwrap().k, expected);
            assert_eq!(dirac_coefficients_closed(&c, m).unwrap().k, expected);
        }
    }

    #[test]
    fn verdicts() {
        let e4 = ManifoldInvariants::elliptic(4).unwrap();
        let std4 = SmoothStructureDesc::standard(4).unwrap();
        assert_eq!(ns_test(&class(3, "m+=9,m-=6"), &e4, &std4, 3).unwrap(), Verdict::Nonsmoothable);
        // 2k_0 = 8 = 1 + b+^G: the strict inequality fails.
        assert_eq!(ns_test(&class(3, "m+=12,m-=0"), &e4, &std4, 3).unwrap(), Verdict::NoObstruction);
        let e6 = ManifoldInvariants::elliptic(6).unwrap();
        let std6 = SmoothStructureDesc::standard(6).unwrap();
        assert_eq!(ns_test(&class(3, "m+=9,m-=18"), &e6, &std6, 3).unwrap(), Verdict::NotApplicable);
        assert_eq!(verdict(true, 0, &[0, 0, 0]), Verdict::NotApplicable);
        let knot = SmoothStructureDesc::new(4, (1, 1), 3).unwrap();
        assert!(!knot.in_family(3));
        assert_eq!(ns_test(&class(3, "m+=9,m-=6"), &e4, &knot, 3).unwrap(), Verdict::NotApplicable);
    }
}

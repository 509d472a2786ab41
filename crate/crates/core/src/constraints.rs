//! Admissibility of fixed-point classes through the generic eigenspace
//! computation.
//!
//! The generator g acts on H²(X; C) with eigenvalues ζ^j. Writing d_j^± for the
//! dimension of the ζ^j-eigenspace on the positive/negative part of the form,
//! the Lefschetz formula fixes the character Σ_j ζ^(mj)(d_j^+ + d_j^−) and the
//! G-signature formula fixes Σ_j ζ^(mj)(d_j^+ − d_j^−) for every power g^m.
//! Character orthogonality inverts both. A class is admissible when every
//! d_j^± is an integer and the invariant parts satisfy 0 ≤ d_0^± ≤ b_±; this
//! is the same condition set as the hand-derived congruences in
//! [`crate::closed_form`]. Non-negativity of the remaining d_j^± is a further
//! necessary condition for any invariant form and is reported separately by
//! [`eigenspaces_nonnegative`].

use num::{BigInt, BigRational, Signed, ToPrimitive};
use serde::Serialize;

use crate::cyclotomic::{residue, signature_term, CycNum};
use crate::error::{Error, Result};
use crate::fixed_point::{FpClass, ManifoldInvariants};

/// Sign(g^m, X) from the fixed data: Σ_i s(m·a_i, m·b_i).
pub fn g_power_signature(c: &FpClass, m: i64) -> Result<CycNum> {
    let p = c.p();
    if residue(m, p) == 0 {
        return Err(Error::Domain(format!("g^{m} is trivial for p = {p}")));
    }
    let mut total = CycNum::zero(p)?;
    for (t, &n) in crate::fixed_point::enumerate_types(p)?.iter().zip(c.counts()) {
        if n > 0 {
            let term = signature_term(p, m * t.a() as i64, m * t.b() as i64)?;
            total = &total + &term.scale_int(n as i64);
        }
    }
    Ok(total)
}

/// (χ(X/G), Sign(X/G)) as exact rationals.
pub fn quotient_invariants(
    c: &FpClass,
    manifold: &ManifoldInvariants,
) -> Result<(BigRational, BigRational)> {
    let p = c.p() as i64;
    let chi = BigRational::new(
        BigInt::from(manifold.e + (p - 1) * c.fix_count() as i64),
        BigInt::from(p),
    );
    let mut total = CycNum::from_integer(c.p(), manifold.s)?;
    for m in 1..p {
        total = &total + &g_power_signature(c, m)?;
    }
    let sum = total.to_rational().ok_or_else(|| {
        Error::Internal("sum of g^m-signatures over all powers is not rational".into())
    })?;
    Ok((chi, sum / BigInt::from(p)))
}

/// Candidate eigenspace dimensions d_j^± for j = 0..p−1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenspaceDims {
    pub p: u32,
    pub d_plus: Vec<BigRational>,
    pub d_minus: Vec<BigRational>,
}

impl EigenspaceDims {
    /// True when every entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.d_plus.iter().chain(&self.d_minus).all(|d| d.is_integer())
    }

    /// True when every entry is a non-negative integer, i.e. the dimensions
    /// could come from an actual representation.
    pub fn is_realizable(&self) -> bool {
        self.is_integral() && self.d_plus.iter().chain(&self.d_minus).all(|d| !d.is_negative())
    }

    /// Integrality plus 0 ≤ d_0^± ≤ b_±.
    pub fn is_admissible(&self, manifold: &ManifoldInvariants) -> bool {
        let within = |d: &BigRational, bound: i64| {
            !d.is_negative() && *d <= BigRational::from_integer(bound.into())
        };
        self.is_integral()
            && within(self.b_plus_g(), manifold.b_plus)
            && within(self.b_minus_g(), manifold.b_minus)
    }

    pub fn b_plus_g(&self) -> &BigRational {
        &self.d_plus[0]
    }

    pub fn b_minus_g(&self) -> &BigRational {
        &self.d_minus[0]
    }
}

/// Solves the Lefschetz and G-signature character system for d_j^±.
pub fn eigenspace_dims(c: &FpClass, manifold: &ManifoldInvariants) -> Result<EigenspaceDims> {
    let p = c.p();
    let trace_fixed = CycNum::from_integer(p, c.fix_count() as i64 - 2)?;
    // Character values at g^m, m = 0..p−1: trace and signature.
    let mut traces = vec![CycNum::from_integer(p, manifold.b2())?];
    let mut sigs = vec![CycNum::from_integer(p, manifold.s)?];
    for m in 1..p as i64 {
        traces.push(trace_fixed.clone());
        sigs.push(g_power_signature(c, m)?);
    }
    let two_p = BigRational::from_integer(BigInt::from(2 * p as i64));
    let mut d_plus = Vec::with_capacity(p as usize);
    let mut d_minus = Vec::with_capacity(p as usize);
    for j in 0..p as i64 {
        let mut plus = CycNum::zero(p)?;
        let mut minus = CycNum::zero(p)?;
        for m in 0..p as i64 {
            let sum = &traces[m as usize] + &sigs[m as usize];
            let diff = &traces[m as usize] - &sigs[m as usize];
            plus = &plus + &sum.mul_zeta_pow(-m * j);
            minus = &minus + &diff.mul_zeta_pow(-m * j);
        }
        let rational = |x: CycNum| {
            x.to_rational()
                .map(|q| q / &two_p)
                .ok_or_else(|| Error::Internal(format!("d_{j} is not rational")))
        };
        d_plus.push(rational(plus)?);
        d_minus.push(rational(minus)?);
    }
    Ok(EigenspaceDims { p, d_plus, d_minus })
}

/// Admissibility via the eigenspace system: #fix ≤ e, every d_j^± is an
/// integer, and 0 ≤ d_0^± ≤ b_±.
pub fn admissible_generic(c: &FpClass, manifold: &ManifoldInvariants) -> Result<bool> {
    if c.fix_count() as i64 > manifold.e {
        return Ok(false);
    }
    Ok(eigenspace_dims(c, manifold)?.is_admissible(manifold))
}

/// Every d_j^± (not only the invariant ones) is a non-negative integer.
pub fn eigenspaces_nonnegative(c: &FpClass, manifold: &ManifoldInvariants) -> Result<bool> {
    Ok(eigenspace_dims(c, manifold)?.is_realizable())
}

/// b_+^G = b_+ and b_−^G = b_−, i.e. g acts trivially on H².
pub fn homologically_trivial(c: &FpClass, manifold: &ManifoldInvariants) -> Result<bool> {
    let dims = eigenspace_dims(c, manifold)?;
    Ok(*dims.b_plus_g() == BigRational::from_integer(manifold.b_plus.into())
        && *dims.b_minus_g() == BigRational::from_integer(manifold.b_minus.into()))
}

/// Integer invariants of an admissible class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientData {
    pub fix_count: i64,
    pub b2_g: i64,
    pub b_plus_g: i64,
    pub b_minus_g: i64,
    pub sign_quotient: i64,
    pub chi_quotient: i64,
}

/// Invariants of the quotient for an admissible class; errors if the class
/// is not admissible.
pub fn quotient_data(c: &FpClass, manifold: &ManifoldInvariants) -> Result<QuotientData> {
    let dims = eigenspace_dims(c, manifold)?;
    if !dims.is_admissible(manifold) || c.fix_count() as i64 > manifold.e {
        return Err(Error::Inconsistent(format!("class {c} is not admissible")));
    }
    let (chi, sign) = quotient_invariants(c, manifold)?;
    let as_int = |q: &BigRational, what: &str| -> Result<i64> {
        if !q.is_integer() {
            return Err(Error::Inconsistent(format!("{what} = {q} is not an integer")));
        }
        q.to_integer()
            .to_i64()
            .ok_or_else(|| Error::Internal(format!("{what} overflows i64")))
    };
    let bp = as_int(dims.b_plus_g(), "b+^G")?;
    let bm = as_int(dims.b_minus_g(), "b-^G")?;
    Ok(QuotientData {
        fix_count: c.fix_count() as i64,
        b2_g: bp + bm,
        b_plus_g: bp,
        b_minus_g: bm,
        sign_quotient: as_int(&sign, "Sign(X/G)")?,
        chi_quotient: as_int(&chi, "chi(X/G)")?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn class(p: u32, text: &str) -> FpClass {
        FpClass::parse(p, text).unwrap()
    }

    #[test]
    fn p3_signatures() {
        let c = class(3, "m+=12,m-=0");
        assert_eq!(g_power_signature(&c, 1).unwrap().to_rational(), Some(q(4)));
        assert_eq!(g_power_signature(&c, 2).unwrap().to_rational(), Some(q(4)));
        let c = class(3, "m+=6,m-=12");
        assert_eq!(g_power_signature(&c, 1).unwrap().to_rational(), Some(q(-2)));
        assert!(g_power_signature(&FpClass::empty(7).unwrap(), 3).unwrap().is_zero());
        assert!(g_power_signature(&c, 3).is_err());
    }

    #[test]
    fn galois_consistency() {
        let c = class(7, "m33=7,m24=7,m14=8,m23=2");
        let base = g_power_signature(&c, 1).unwrap();
        for m in 1..7 {
            assert_eq!(g_power_signature(&c, m).unwrap(), base.galois(m).unwrap());
        }
    }

    #[test]
    fn quotient_rows_of_the_e4_table() {
        let e4 = ManifoldInvariants::elliptic(4).unwrap();
        let (chi, sign) = quotient_invariants(&class(3, "m+=12,m-=0"), &e4).unwrap();
        assert_eq!((chi, sign), (q(24), q(-8)));
        let (chi, sign) = quotient_invariants(&class(3, "m+=9,m-=6"), &e4).unwrap();
        assert_eq!((chi, sign), (q(26), q(-10)));
        let (chi, sign) = quotient_invariants(&FpClass::empty(5).unwrap(), &e4).unwrap();
        assert_eq!(chi, BigRational::new(48.into(), 5.into()));
        assert_eq!(sign, BigRational::new((-32).into(), 5.into()));
    }

    #[test]
    fn eigenspace_dims_a1() {
        let e4 = ManifoldInvariants::elliptic(4).unwrap();
        let d = eigenspace_dims(&class(3, "m+=12,m-=0"), &e4).unwrap();
        // Σ_j d_j^+ = b_+ = 7 forces d_1^+ = d_2^+ = 0.
        assert_eq!(d.d_plus, vec![q(7), q(0), q(0)]);
        assert_eq!(d.d_minus, vec![q(15), q(12), q(12)]);
        assert!(d.is_realizable());
        let d = eigenspace_dims(&class(3, "m+=12,m-=3"), &e4).unwrap();
        assert!(!d.is_integral());
    }

    #[test]
    fn eigenspace_dims_k3_z5_smooth_example() {
        let k3 = ManifoldInvariants::k3();
        let d = eigenspace_dims(&class(5, "m14=2,m23=2"), &k3).unwrap();
        // (e − s)/2 = 20 and no m11, m22, m12, m13 terms: b−^G = 20/5 − 1 = 3.
        assert_eq!((d.b_plus_g().clone(), d.b_minus_g().clone()), (q(3), q(3)));
        assert!(d.is_realizable());
    }

    #[test]
    fn admissibility_examples() {
        let e4 = ManifoldInvariants::elliptic(4).unwrap();
        assert!(admissible_generic(&class(3, "m+=12,m-=0"), &e4).unwrap());
        assert!(!admissible_generic(&class(3, "m+=0,m-=0"), &e4).unwrap());
        assert!(!admissible_generic(&class(3, "m+=49,m-=0"), &e4).unwrap());
        let k3 = ManifoldInvariants::k3();
        let c = class(7, "m33=7,m24=7,m14=8,m23=2");
        assert!(admissible_generic(&c, &k3).unwrap());
        assert!(homologically_trivial(&c, &k3).unwrap());
        // Invariant parts are all of H², yet Σ s-terms ≠ Sign(X): the
        // non-invariant eigenspace dimensions come out negative.
        assert!(!eigenspaces_nonnegative(&c, &k3).unwrap());
        assert!(eigenspaces_nonnegative(&class(5, "m11=1,m12=3"), &k3).unwrap());
        assert!(!homologically_trivial(&class(3, "m+=12,m-=0"), &e4).unwrap());
    }

    #[test]
    fn quotient_data_of_a2() {
        let e4 = ManifoldInvariants::elliptic(4).unwrap();
        let data = quotient_data(&class(3, "m+=9,m-=6"), &e4).unwrap();
        assert_eq!(
            data,
            QuotientData {
                fix_count: 15,
                b2_g: 24,
                b_plus_g: 7,
                b_minus_g: 17,
                sign_quotient: -10,
                chi_quotient: 26,
            }
        );
        assert!(quotient_data(&class(3, "m+=0,m-=0"), &e4).is_err());
    }

    #[test]
    fn reconstruction_identities() {
        let k3 = ManifoldInvariants::k3();
        let c = class(5, "m22=1,m13=3,m12=5");
        let d = eigenspace_dims(&c, &k3).unwrap();
        let total: BigRational = d.d_plus.iter().chain(&d.d_minus).sum();
        assert_eq!(total + q(2), q(k3.e));
        let mut char_sig = CycNum::zero(5).unwrap();
        for j in 0..5 {
            let diff = &d.d_plus[j] - &d.d_minus[j];
            char_sig = &char_sig
                + &CycNum::zeta_pow(5, j as i64).unwrap().scale(&diff);
        }
        assert_eq!(char_sig, g_power_signature(&c, 1).unwrap());
    }
}

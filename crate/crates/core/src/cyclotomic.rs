//! Exact arithmetic in the cyclotomic field Q(ζ), ζ a primitive p-th root of
//! unity, together with the two local contributions of an isolated fixed
//! point: the signature defect `s_xy` and the spin-index defect `p_xy`.
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^(p-2)`. Every product is
//! reduced with `ζ^(p-1) = -(1 + ζ + … + ζ^(p-2))`, so two elements are equal
//! exactly when their coefficient vectors are.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{OnceLock, RwLock};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Returns an error unless `p` is an odd prime.
pub fn check_odd_prime(p: u32) -> Result<()> {
    if p < 3 || p % 2 == 0 {
        return Err(Error::Usage(format!("p = {p} is not an odd prime")));
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return Err(Error::Usage(format!("p = {p} is not an odd prime")));
        }
        d += 2;
    }
    Ok(())
}

/// Reduces an arbitrary integer into `0..p`.
pub(crate) fn residue(x: i64, p: u32) -> u32 {
    x.rem_euclid(p as i64) as u32
}

/// An element of Q(ζ_p).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNum {
    p: u32,
    coeffs: Vec<BigRational>,
}

impl CycNum {
    pub fn zero(p: u32) -> Result<Self> {
        check_odd_prime(p)?;
        Ok(Self::zero_unchecked(p))
    }

    fn zero_unchecked(p: u32) -> Self {
        CycNum {
            p,
            coeffs: vec![BigRational::zero(); (p - 1) as usize],
        }
    }

    pub fn one(p: u32) -> Result<Self> {
        Self::from_rational(p, BigRational::one())
    }

    pub fn from_rational(p: u32, q: BigRational) -> Result<Self> {
        let mut z = Self::zero(p)?;
        z.coeffs[0] = q;
        Ok(z)
    }

    pub fn from_integer(p: u32, n: i64) -> Result<Self> {
        Self::from_rational(p, BigRational::from_integer(BigInt::from(n)))
    }

    /// The generator ζ = exp(2πi/p).
    pub fn zeta(p: u32) -> Result<Self> {
        Self::zeta_pow(p, 1)
    }

    /// ζ^k for any integer k.
    pub fn zeta_pow(p: u32, k: i64) -> Result<Self> {
        check_odd_prime(p)?;
        let mut full = vec![BigRational::zero(); p as usize];
        full[residue(k, p) as usize] = BigRational::one();
        Ok(Self::from_full(p, full))
    }

    /// Builds an element from a coefficient vector in the power basis.
    pub fn from_coeffs(p: u32, coeffs: Vec<BigRational>) -> Result<Self> {
        check_odd_prime(p)?;
        if coeffs.len() != (p - 1) as usize {
            return Err(Error::Usage(format!(
                "expected {} coefficients for p = {p}, got {}",
                p - 1,
                coeffs.len()
            )));
        }
        Ok(CycNum { p, coeffs })
    }

    /// Reduces a length-p vector indexed by exponents 0..p into the power basis.
    fn from_full(p: u32, mut full: Vec<BigRational>) -> Self {
        debug_assert_eq!(full.len(), p as usize);
        let top = full.pop().expect("p >= 3");
        if !top.is_zero() {
            for c in full.iter_mut() {
                *c -= &top;
            }
        }
        CycNum { p, coeffs: full }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// True when the element lies in Q.
    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::Usage(format!(
                "cyclotomic fields differ: p = {} vs p = {}",
                self.p, other.p
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(CycNum { p: self.p, coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(CycNum { p: self.p, coeffs })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let p = self.p as usize;
        let mut full = vec![BigRational::zero(); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                full[(i + j) % p] += a * b;
            }
        }
        Ok(Self::from_full(self.p, full))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        CycNum {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Image under the field automorphism ζ ↦ ζ^m.
    pub fn galois(&self, m: i64) -> Result<Self> {
        let m = residue(m, self.p);
        if m == 0 {
            return Err(Error::Domain(format!(
                "multiplier must be a unit modulo {}",
                self.p
            )));
        }
        let p = self.p as usize;
        let mut full = vec![BigRational::zero(); p];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                full[(i * m as usize) % p] += c;
            }
        }
        Ok(Self::from_full(self.p, full))
    }

    /// Multiplies by ζ^k; a coefficient rotation followed by reduction.
    pub fn mul_zeta_pow(&self, k: i64) -> Self {
        let p = self.p as usize;
        let shift = residue(k, self.p) as usize;
        let mut full = vec![BigRational::zero(); p];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                full[(i + shift) % p] = c.clone();
            }
        }
        Self::from_full(self.p, full)
    }

    /// Field norm down to Q: the product of all Galois conjugates.
    pub fn norm(&self) -> BigRational {
        let mut prod = self.clone();
        for m in 2..self.p as i64 {
            prod = &prod * &self.galois(m).expect("unit multiplier");
        }
        prod.to_rational()
            .expect("the norm of an element of Q(zeta) is rational")
    }

    /// Multiplicative inverse, computed as the product of the other conjugates
    /// divided by the norm.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero in Q(zeta)".into()));
        }
        let mut others = CycNum::one(self.p)?;
        for m in 2..self.p as i64 {
            others = &others * &self.galois(m)?;
        }
        let n = (&others * self)
            .to_rational()
            .ok_or_else(|| Error::Internal("norm is not rational".into()))?;
        Ok(others.scale(&n.recip()))
    }

    /// Sum of all Galois conjugates (the trace to Q).
    pub fn trace(&self) -> BigRational {
        let mut acc = CycNum::zero_unchecked(self.p);
        for m in 1..self.p as i64 {
            acc = &acc + &self.galois(m).expect("unit multiplier");
        }
        acc.to_rational().expect("the trace is rational")
    }

    /// Double-precision value under the embedding ζ ↦ exp(2πi/p). Diagnostic only.
    pub fn to_complex_approx(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let v = c.to_f64().unwrap_or(f64::NAN);
            let angle = 2.0 * std::f64::consts::PI * i as f64 / self.p as f64;
            re += v * angle.cos();
            im += v * angle.sin();
        }
        (re, im)
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum(p={}, {})", self.p, self)
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if i == 1 {
                        write!(f, "z")?;
                    } else {
                        write!(f, "z^{i}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        self.try_add(rhs).expect("operands in the same cyclotomic field")
    }
}

impl Sub for &CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        self.try_sub(rhs).expect("operands in the same cyclotomic field")
    }
}

impl Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        self.try_mul(rhs).expect("operands in the same cyclotomic field")
    }
}

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

pub fn cyc_add(x: &CycNum, y: &CycNum) -> Result<CycNum> {
    x.try_add(y)
}

pub fn cyc_mul(x: &CycNum, y: &CycNum) -> Result<CycNum> {
    x.try_mul(y)
}

pub fn cyc_inv(x: &CycNum) -> Result<CycNum> {
    x.inv()
}

/// Applies ζ ↦ ζ^m to `x`.
pub fn galois_apply(m: i64, x: &CycNum) -> Result<CycNum> {
    x.galois(m)
}

fn check_weights(p: u32, x: i64, y: i64) -> Result<()> {
    check_odd_prime(p)?;
    if residue(x, p) == 0 || residue(y, p) == 0 {
        return Err(Error::Domain(format!(
            "weights ({x}, {y}) must be nonzero modulo {p}"
        )));
    }
    Ok(())
}

type TermKey = (bool, u32, u32, u32);

/// Both terms depend only on the weights mod p and are requested millions of
/// times by the exhaustive scans; each costs a field inversion.
fn memoized(spin: bool, p: u32, x: i64, y: i64, compute: fn(u32, i64, i64) -> Result<CycNum>) -> Result<CycNum> {
    static CACHE: OnceLock<RwLock<HashMap<TermKey, CycNum>>> = OnceLock::new();
    check_weights(p, x, y)?;
    let key = (spin, p, residue(x, p), residue(y, p));
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.read().expect("term cache").get(&key) {
        return Ok(v.clone());
    }
    let v = compute(p, key.2 as i64, key.3 as i64)?;
    cache.write().expect("term cache").insert(key, v.clone());
    Ok(v)
}

/// Contribution of a fixed point with rotation weights (x, y) to Sign(g, X):
/// `(ζ^x + 1)(ζ^y + 1) / ((ζ^x - 1)(ζ^y - 1))`.
pub fn signature_term(p: u32, x: i64, y: i64) -> Result<CycNum> {
    memoized(false, p, x, y, signature_term_uncached)
}

fn signature_term_uncached(p: u32, x: i64, y: i64) -> Result<CycNum> {
    let one = CycNum::one(p)?;
    let zx = CycNum::zeta_pow(p, x)?;
    let zy = CycNum::zeta_pow(p, y)?;
    let num = &(&zx + &one) * &(&zy + &one);
    let den = &(&zx - &one) * &(&zy - &one);
    Ok(&num * &den.inv()?)
}

/// Contribution of a fixed point with weights (x, y) to ind_g of the Dirac
/// operator. The square root of ζ^x is the p-th root of unity ζ^(x(p+1)/2).
pub fn spin_term(p: u32, x: i64, y: i64) -> Result<CycNum> {
    memoized(true, p, x, y, spin_term_uncached)
}

fn spin_term_uncached(p: u32, x: i64, y: i64) -> Result<CycNum> {
    let half = (p as i64 + 1) / 2;
    let factor = |w: i64| -> Result<CycNum> {
        let root = CycNum::zeta_pow(p, w * half)?;
        let root_inv = CycNum::zeta_pow(p, -w * half)?;
        Ok(&root - &root_inv)
    };
    let den = &factor(x)? * &factor(y)?;
    den.inv()
}

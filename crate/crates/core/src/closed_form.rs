//! Hand-derived closed forms for p = 3, 5, 7: the congruences and inequalities
//! on the fixed-point counts, b_±^G, and the Dirac index coefficients k_j.
//!
//! These are kept deliberately literal, one formula per published display, so
//! that they can be checked against the generic character computation in
//! [`crate::constraints`] and [`crate::sw`].

use num::rational::Ratio;

use crate::error::{Error, Result};
use crate::fixed_point::{FpClass, ManifoldInvariants};

type Q = Ratio<i64>;

/// Evaluation of the closed-form admissibility conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormEval {
    /// #fix ≤ e.
    pub fix_ok: bool,
    /// All congruences (Euler characteristic and signature) hold.
    pub congruences_ok: bool,
    pub b_plus_g: Q,
    pub b_minus_g: Q,
}

impl ClosedFormEval {
    pub fn admissible(&self, manifold: &ManifoldInvariants) -> bool {
        let zero = Q::from_integer(0);
        self.fix_ok
            && self.congruences_ok
            && self.b_plus_g >= zero
            && self.b_plus_g <= Q::from_integer(manifold.b_plus)
            && self.b_minus_g >= zero
            && self.b_minus_g <= Q::from_integer(manifold.b_minus)
    }
}

fn counts(c: &FpClass) -> Vec<i64> {
    c.counts().iter().map(|&n| n as i64).collect()
}

fn unsupported(p: u32) -> Error {
    Error::Unsupported(format!(
        "closed forms exist only for p = 3, 5, 7 (got {p}); use the generic path"
    ))
}

fn divisible(x: i64, m: i64) -> bool {
    x.rem_euclid(m) == 0
}

/// Evaluates the closed-form conditions for p ∈ {3, 5, 7}.
pub fn closed_form_eval(c: &FpClass, manifold: &ManifoldInvariants) -> Result<ClosedFormEval> {
    let (e, s) = (manifold.e, manifold.s);
    let m = counts(c);
    let sum: i64 = m.iter().sum();
    let fix_ok = sum <= e;
    let one = Q::from_integer(1);
    match c.p() {
        3 => {
            let (mp, mm) = (m[0], m[1]);
            let congruences_ok = divisible(2 * sum + e, 3) && divisible(2 * (mp - mm) + 3 * s, 9);
            Ok(ClosedFormEval {
                fix_ok,
                congruences_ok,
                b_plus_g: Q::new(3 * (e + s) + 8 * mp + 4 * mm, 18) - one,
                b_minus_g: Q::new(3 * (e - s) + 4 * mp + 8 * mm, 18) - one,
            })
        }
        5 => {
            let [m11, m22, m12, m13, m14, m23] = m[..] else {
                return Err(Error::Internal("p = 5 class without six counts".into()));
            };
            let congruences_ok = divisible(4 * sum + e, 5)
                && divisible(4 * (-m11 - m22 + m14 + m23) + s, 5)
                && divisible(-m11 + 3 * m22 - m12 + m13 + m14 - 3 * m23 + s, 5)
                && divisible(3 * m11 - m22 + m12 - m13 - 3 * m14 + m23 + s, 5);
            Ok(ClosedFormEval {
                fix_ok,
                congruences_ok,
                b_plus_g: Q::new((e + s) + 2 * (2 * m12 + 2 * m13 + 4 * m14 + 4 * m23), 10) - one,
                b_minus_g: Q::new((e - s) + 2 * (4 * m11 + 4 * m22 + 2 * m12 + 2 * m13), 10)
                    - one,
            })
        }
        7 => {
            let [m11, m22, m33, m12, m24, m14, m15, m23, m13, m16, m25, m34] = m[..] else {
                return Err(Error::Internal("p = 7 class without twelve counts".into()));
            };
            let d = m11 + m22 + m33;
            let q = m12 + m24 + m14;
            let r = m16 + m25 + m34;
            let t = m15 + m23 + m13;
            let l1 = -10 * d - 2 * q + 10 * r + 2 * t;
            let l2 = -5 * m11 + 7 * m22 + 3 * m33 - 3 * m12 + 3 * m24 + m14 + 5 * m16
                - 7 * m25
                - 3 * m34
                + 3 * m15
                - 3 * m23
                - m13;
            let l3 = 3 * m11 - 5 * m22 + 7 * m33 + m12 - 3 * m24 + 3 * m14 - 3 * m16
                + 5 * m25
                - 7 * m34
                - m15
                + 3 * m23
                - 3 * m13;
            let l4 = 7 * m11 + 3 * m22 - 5 * m33 + 3 * m12 + m24 - 3 * m14 - 7 * m16
                - 3 * m25
                + 5 * m34
                - 3 * m15
                - m23
                + 3 * m13;
            let congruences_ok = divisible(sum + 6 * e, 7)
                && [l1, l2, l3, l4].iter().all(|&l| divisible(l + s, 7));
            Ok(ClosedFormEval {
                fix_ok,
                congruences_ok,
                b_plus_g: Q::new((e + s) + 2 * (-2 * d + 2 * q + 8 * r + 4 * t), 14) - one,
                b_minus_g: Q::new((e - s) + 2 * (8 * d + 4 * q - 2 * r + 2 * t), 14) - one,
            })
        }
        p => Err(unsupported(p)),
    }
}

/// Admissibility by the closed-form congruences and inequalities.
pub fn admissible_closed_form(c: &FpClass, manifold: &ManifoldInvariants) -> Result<bool> {
    Ok(closed_form_eval(c, manifold)?.admissible(manifold))
}

/// Closed-form Dirac index coefficients (k_0, …, k_{p−1}) as rationals.
pub fn dirac_closed_rational(c: &FpClass, manifold: &ManifoldInvariants) -> Result<Vec<Q>> {
    let s = manifold.s;
    let m = counts(c);
    match c.p() {
        3 => {
            let d = m[0] - m[1];
            let k0 = Q::new(16 * d - 3 * s, 72);
            let k1 = Q::new(-8 * d - 3 * s, 72);
            Ok(vec![k0, k1, k1])
        }
        5 => {
            let [m11, m22, m12, m13, m14, m23] = m[..] else {
                return Err(Error::Internal("p = 5 class without six counts".into()));
            };
            let k = |x: i64| Q::new(-s + 8 * x, 40);
            let k0 = k(-2 * m11 - 2 * m22 + 2 * m14 + 2 * m23);
            let k1 = k(m22 + m12 - m13 - m23);
            let k2 = k(m11 - m12 + m13 - m14);
            Ok(vec![k0, k1, k2, k2, k1])
        }
        7 => {
            let [m11, m22, m33, m12, m24, m14, m15, m23, m13, m16, m25, m34] = m[..] else {
                return Err(Error::Internal("p = 7 class without twelve counts".into()));
            };
            let k = |x: i64| Q::new(-s + 8 * x, 56);
            let k0 = k(-4 * (m11 + m22 + m33) + 2 * (m12 + m24 + m14) + 4 * (m16 + m25 + m34)
                - 2 * (m15 + m23 + m13));
            let k1 = k(-m11 + 2 * m22 + m33 - 2 * m24 + m14 + m16 - 2 * m25 - m34 + 2 * m23 - m13);
            let k2 = k(m11 - m22 + 2 * m33 + m12 - 2 * m14 - m16 + m25 - 2 * m34 - m15 + 2 * m13);
            let k3 = k(2 * m11 + m22 - m33 - 2 * m12 + m24 - 2 * m16 - m25 + m34 + 2 * m15 - m23);
            Ok(vec![k0, k1, k2, k3, k3, k2, k1])
        }
        p => Err(unsupported(p)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(p: u32, n: u32, text: &str) -> (ClosedFormEval, bool) {
        let m = ManifoldInvariants::elliptic(n).unwrap();
        let c = FpClass::parse(p, text).unwrap();
        let ev = closed_form_eval(&c, &m).unwrap();
        let ok = ev.admissible(&m);
        (ev, ok)
    }

    #[test]
    fn e4_rows() {
        let (ev, ok) = eval(3, 4, "m+=9,m-=6");
        assert!(ok);
        assert_eq!((ev.b_plus_g, ev.b_minus_g), (Q::from(7), Q::from(17)));
        let (ev, ok) = eval(3, 4, "m+=3,m-=0");
        assert!(ok);
        assert_eq!(ev.b_plus_g, Q::from(3));
        assert!(!eval(3, 4, "m+=0,m-=0").1);
    }

    #[test]
    fn k3_examples() {
        assert!(eval(5, 2, "m22=1,m13=3,m12=5").1);
        assert!(eval(5, 2, "m14=2,m23=2").1);
        assert!(eval(5, 2, "m11=1,m12=3").1);
        let (ev, ok) = eval(7, 2, "m33=7,m24=7,m14=8,m23=2");
        assert!(ok);
        assert_eq!((ev.b_plus_g, ev.b_minus_g), (Q::from(3), Q::from(19)));
        // Three fixed points of types (1,6), (1,3), (1,3) fail the signature
        // congruences; the generic path rejects them as well.
        assert!(!eval(7, 2, "m16=1,m13=2").1);
    }

    #[test]
    fn dirac_examples() {
        let m = ManifoldInvariants::elliptic(4).unwrap();
        let k = dirac_closed_rational(&FpClass::parse(3, "m+=12").unwrap(), &m).unwrap();
        assert_eq!(k, vec![Q::from(4), Q::from(0), Q::from(0)]);
        let k3 = ManifoldInvariants::k3();
        let k = dirac_closed_rational(&FpClass::parse(5, "m22=1,m13=3,m12=5").unwrap(), &k3)
            .unwrap();
        assert_eq!(k, [0, 1, 0, 0, 1].map(Q::from).to_vec());
        let c = FpClass::parse(7, "m33=7,m24=7,m14=8,m23=2").unwrap();
        let k = dirac_closed_rational(&c, &k3).unwrap();
        assert_eq!(k, [0, 1, 0, 0, 0, 0, 1].map(Q::from).to_vec());
    }

    #[test]
    fn other_primes_unsupported() {
        let c = FpClass::empty(11).unwrap();
        let m = ManifoldInvariants::k3();
        assert!(matches!(closed_form_eval(&c, &m), Err(Error::Unsupported(_))));
        assert!(matches!(dirac_closed_rational(&c, &m), Err(Error::Unsupported(_))));
    }
}

//! Fixed-point types, fixed-point data classes and the invariants of the
//! target manifold.
//!
//! A fixed point of a pseudofree Z_p action is described by the rotation
//! weights (a, b) of the generator on the tangent space, well defined up to
//! order and a simultaneous sign change. [`FpType`] stores the
//! lexicographically smallest member of that four-element set. A class
//! ([`FpClass`]) counts fixed points per type, in the canonical type order
//! returned by [`enumerate_types`].

use std::fmt;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::cyclotomic::{check_odd_prime, residue};
use crate::error::{Error, Result};

/// A fixed-point type: canonical weight pair modulo p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FpType {
    p: u32,
    a: u32,
    b: u32,
}

impl FpType {
    /// Canonical type of the weight pair (a, b).
    pub fn new(p: u32, a: i64, b: i64) -> Result<Self> {
        check_odd_prime(p)?;
        let (a, b) = (residue(a, p), residue(b, p));
        if a == 0 || b == 0 {
            return Err(Error::Domain(format!(
                "weights ({a}, {b}) must be nonzero modulo {p}"
            )));
        }
        let candidates = [(a, b), (b, a), (p - a, p - b), (p - b, p - a)];
        let (a, b) = *candidates.iter().min().expect("non-empty");
        Ok(FpType { p, a, b })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    /// Key used in the textual class syntax: `m+`/`m-` for p = 3, `m<a><b>` otherwise.
    pub fn key(&self) -> String {
        if self.p == 3 {
            if (self.a, self.b) == (1, 2) {
                "m+".to_string()
            } else {
                "m-".to_string()
            }
        } else if self.p < 10 {
            format!("m{}{}", self.a, self.b)
        } else {
            format!("m{}_{}", self.a, self.b)
        }
    }
}

impl fmt::Display for FpType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// Listing order used for p = 5 and p = 7; it fixes table column order.
const ORDER_5: [(u32, u32); 6] = [(1, 1), (2, 2), (1, 2), (1, 3), (1, 4), (2, 3)];
const ORDER_7: [(u32, u32); 12] = [
    (1, 1),
    (2, 2),
    (3, 3),
    (1, 2),
    (2, 4),
    (1, 4),
    (1, 5),
    (2, 3),
    (1, 3),
    (1, 6),
    (2, 5),
    (3, 4),
];

/// All fixed-point types for the prime p in canonical order.
///
/// For p = 3 the order is `[(1,2), (1,1)]`, i.e. type (+) then type (−).
pub fn enumerate_types(p: u32) -> Result<Vec<FpType>> {
    check_odd_prime(p)?;
    let pairs: Vec<(u32, u32)> = match p {
        3 => vec![(1, 2), (1, 1)],
        5 => ORDER_5.to_vec(),
        7 => ORDER_7.to_vec(),
        _ => {
            let mut all: Vec<(u32, u32)> = Vec::new();
            for a in 1..p {
                for b in 1..p {
                    let t = FpType::new(p, a as i64, b as i64)?;
                    if (t.a, t.b) == (a, b) {
                        all.push((a, b));
                    }
                }
            }
            all
        }
    };
    Ok(pairs.into_iter().map(|(a, b)| FpType { p, a, b }).collect())
}

/// Number of fixed-point types: (p−1)²/4 + (p−1)/2.
pub fn type_count(p: u32) -> usize {
    let h = (p as usize - 1) / 2;
    h * h + h
}

/// Canonical type of (m·a, m·b).
pub fn multiply_type(m: i64, t: FpType) -> Result<FpType> {
    if residue(m, t.p) == 0 {
        return Err(Error::Domain(format!("multiplier {m} is not a unit mod {}", t.p)));
    }
    FpType::new(t.p, m * t.a as i64, m * t.b as i64)
}

/// Representatives 1..=(p−1)/2 of the multiplier group (Z/p)*/{±1}.
pub fn multipliers(p: u32) -> Vec<i64> {
    (1..=((p as i64 - 1) / 2)).collect()
}

/// Index permutation induced by the multiplier m: type i goes to `perm[i]`.
pub fn multiplier_permutation(p: u32, m: i64) -> Result<Vec<usize>> {
    let types = enumerate_types(p)?;
    types
        .iter()
        .map(|&t| {
            let image = multiply_type(m, t)?;
            types
                .iter()
                .position(|&u| u == image)
                .ok_or_else(|| Error::Internal(format!("type {image} missing from table")))
        })
        .collect()
}

/// A fixed-point data class: multiplicities per fixed-point type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpClass {
    p: u32,
    counts: Vec<u32>,
}

impl FpClass {
    /// Builds a class from counts in [`enumerate_types`] order.
    pub fn new(p: u32, counts: Vec<u32>) -> Result<Self> {
        check_odd_prime(p)?;
        if counts.len() != type_count(p) {
            return Err(Error::Usage(format!(
                "p = {p} has {} fixed-point types, got {} counts",
                type_count(p),
                counts.len()
            )));
        }
        Ok(FpClass { p, counts })
    }

    pub fn empty(p: u32) -> Result<Self> {
        Self::new(p, vec![0; type_count(p)])
    }

    /// Builds a class from (weight pair, multiplicity) entries; pairs are
    /// canonicalized and repeated types accumulate.
    pub fn from_pairs(p: u32, entries: &[((i64, i64), u32)]) -> Result<Self> {
        let types = enumerate_types(p)?;
        let mut counts = vec![0; types.len()];
        for &((a, b), m) in entries {
            let t = FpType::new(p, a, b)?;
            let i = types.iter().position(|&u| u == t).expect("complete table");
            counts[i] += m;
        }
        Ok(FpClass { p, counts })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn count(&self, t: FpType) -> u32 {
        let types = enumerate_types(self.p).expect("validated prime");
        types
            .iter()
            .position(|&u| u == t)
            .map_or(0, |i| self.counts[i])
    }

    /// Number of fixed points, #X^G.
    pub fn fix_count(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Parses `m+=12,m-=0` (p = 3) or `m11=1,m12=3` (p ≥ 5); absent keys are 0.
    pub fn parse(p: u32, text: &str) -> Result<Self> {
        let types = enumerate_types(p)?;
        let keys: Vec<String> = types.iter().map(FpType::key).collect();
        let mut counts = vec![0u32; types.len()];
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("expected key=value, got '{item}'")))?;
            let key = key.trim();
            let i = keys
                .iter()
                .position(|k| k == key)
                .or_else(|| {
                    // Accept non-canonical spellings such as m41 or m24 for p = 5.
                    parse_pair_key(key).and_then(|(a, b)| {
                        let t = FpType::new(p, a, b).ok()?;
                        types.iter().position(|&u| u == t)
                    })
                })
                .ok_or_else(|| Error::Usage(format!("unknown type key '{key}' for p = {p}")))?;
            counts[i] = value
                .trim()
                .parse()
                .map_err(|_| Error::Usage(format!("bad count '{value}' for {key}")))?;
        }
        Ok(FpClass { p, counts })
    }

    /// Relabels types by the multiplier m (replacing g by g^m).
    pub fn multiply(&self, m: i64) -> Result<Self> {
        let perm = multiplier_permutation(self.p, m)?;
        let mut counts = vec![0; self.counts.len()];
        for (i, &c) in self.counts.iter().enumerate() {
            counts[perm[i]] += c;
        }
        Ok(FpClass { p: self.p, counts })
    }
}

fn parse_pair_key(key: &str) -> Option<(i64, i64)> {
    let body = key.strip_prefix('m')?;
    if let Some((a, b)) = body.split_once('_') {
        return Some((a.parse().ok()?, b.parse().ok()?));
    }
    let digits: Vec<i64> = body
        .chars()
        .map(|c| c.to_digit(10).map(i64::from))
        .collect::<Option<_>>()?;
    match digits[..] {
        [a, b] => Some((a, b)),
        _ => None,
    }
}

impl fmt::Display for FpClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let types = enumerate_types(self.p).map_err(|_| fmt::Error)?;
        let parts: Vec<String> = types
            .iter()
            .zip(&self.counts)
            .map(|(t, c)| format!("{}={c}", t.key()))
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Serialize for FpClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let types = enumerate_types(self.p).map_err(serde::ser::Error::custom)?;
        let mut map = serializer.serialize_map(Some(types.len()))?;
        for (t, c) in types.iter().zip(&self.counts) {
            map.serialize_entry(&t.key(), c)?;
        }
        map.end()
    }
}

/// Smallest class, lexicographically on counts, in the orbit of `c` under
/// relabeling by (Z/p)*/{±1}.
pub fn weak_canonical(c: &FpClass) -> FpClass {
    multipliers(c.p)
        .into_iter()
        .map(|m| c.multiply(m).expect("unit multiplier"))
        .min()
        .expect("the identity multiplier is always present")
}

/// Expands a class into its fixed point data: each type's representative
/// pair repeated by its multiplicity, in type order.
pub fn fixed_data_multiset(c: &FpClass) -> Vec<(u32, u32)> {
    let types = enumerate_types(c.p).expect("validated prime");
    types
        .iter()
        .zip(&c.counts)
        .flat_map(|(t, &n)| std::iter::repeat_n((t.a, t.b), n as usize))
        .collect()
}

/// Topological invariants of a closed simply-connected 4-manifold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifoldInvariants {
    pub name: String,
    /// Euler number.
    pub e: i64,
    /// Signature.
    pub s: i64,
    pub b_plus: i64,
    pub b_minus: i64,
    pub spin: bool,
    /// Set when the manifold is the elliptic surface E(n).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<u32>,
}

impl ManifoldInvariants {
    pub fn new(name: &str, e: i64, s: i64, b_plus: i64, b_minus: i64, spin: bool) -> Result<Self> {
        if b_plus < 0 || b_minus < 0 {
            return Err(Error::Usage("Betti numbers must be non-negative".into()));
        }
        if e != 2 + b_plus + b_minus {
            return Err(Error::Usage(format!(
                "Euler number {e} is not 2 + b+ + b- = {}",
                2 + b_plus + b_minus
            )));
        }
        if s != b_plus - b_minus {
            return Err(Error::Usage(format!(
                "signature {s} is not b+ - b- = {}",
                b_plus - b_minus
            )));
        }
        Ok(ManifoldInvariants {
            name: name.to_string(),
            e,
            s,
            b_plus,
            b_minus,
            spin,
            n: None,
        })
    }

    /// The elliptic surface E(n) for even n ≥ 2: (12n, −8n, 2n−1, 10n−1), spin.
    pub fn elliptic(n: u32) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::Domain(format!(
                "E({n}) is only supported for even n >= 2 (the spin case)"
            )));
        }
        let n64 = n as i64;
        let mut m = Self::new(
            &format!("E({n})"),
            12 * n64,
            -8 * n64,
            2 * n64 - 1,
            10 * n64 - 1,
            true,
        )?;
        m.n = Some(n);
        Ok(m)
    }

    /// The K3 surface, E(2).
    pub fn k3() -> Self {
        Self::elliptic(2).expect("E(2) is valid")
    }

    pub fn b2(&self) -> i64 {
        self.b_plus + self.b_minus
    }

    /// Parses `E4`, `E(4)`, `K3`, or `e=24,s=-16,b+=3,b-=19[,spin]`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("k3") {
            return Ok(Self::k3());
        }
        if let Some(rest) = t.strip_prefix('E').or_else(|| t.strip_prefix('e')) {
            let inner = rest.trim_start_matches('(').trim_end_matches(')');
            if let Ok(n) = inner.parse::<u32>() {
                return Self::elliptic(n);
            }
        }
        let mut fields = (None, None, None, None);
        let mut spin = false;
        for item in t.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if item == "spin" {
                spin = true;
                continue;
            }
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("cannot parse surface field '{item}'")))?;
            let v: i64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Usage(format!("bad integer in '{item}'")))?;
            match k.trim() {
                "e" => fields.0 = Some(v),
                "s" => fields.1 = Some(v),
                "b+" | "b_plus" => fields.2 = Some(v),
                "b-" | "b_minus" => fields.3 = Some(v),
                "spin" => spin = v != 0,
                other => return Err(Error::Usage(format!("unknown surface field '{other}'"))),
            }
        }
        match fields {
            (Some(e), Some(s), Some(bp), Some(bm)) => Self::new("X", e, s, bp, bm, spin),
            _ => Err(Error::Usage(format!(
                "surface '{text}' must be En, K3, or e=..,s=..,b+=..,b-=..[,spin]"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(p: u32) -> Vec<(u32, u32)> {
        enumerate_types(p).unwrap().iter().map(|t| (t.a(), t.b())).collect()
    }

    #[test]
    fn type_lists_match_listing_order() {
        assert_eq!(pairs(3), vec![(1, 2), (1, 1)]);
        assert_eq!(pairs(5), ORDER_5.to_vec());
        assert_eq!(pairs(7), ORDER_7.to_vec());
        for p in [3, 5, 7, 11, 13] {
            let types = enumerate_types(p).unwrap();
            assert_eq!(types.len(), type_count(p));
            for t in &types {
                assert_eq!(FpType::new(p, t.a as i64, t.b as i64).unwrap(), *t);
            }
        }
        assert_eq!(type_count(3), 2);
        assert_eq!(type_count(5), 6);
        assert_eq!(type_count(7), 12);
        assert!(enumerate_types(9).is_err());
        assert!(enumerate_types(4).is_err());
    }

    #[test]
    fn canonical_representatives() {
        let t = FpType::new(5, 4, 2).unwrap();
        assert_eq!((t.a(), t.b()), (1, 3));
        assert_eq!(FpType::new(3, 2, 2).unwrap(), FpType::new(3, 1, 1).unwrap());
        assert_eq!(FpType::new(3, 2, 1).unwrap().key(), "m+");
        assert!(FpType::new(5, 0, 1).is_err());
    }

    #[test]
    fn multiply_examples() {
        let t11 = FpType::new(5, 1, 1).unwrap();
        assert_eq!(multiply_type(2, t11).unwrap(), FpType::new(5, 2, 2).unwrap());
        let t12 = FpType::new(5, 1, 2).unwrap();
        assert_eq!(multiply_type(2, t12).unwrap(), FpType::new(5, 1, 3).unwrap());
        for t in enumerate_types(7).unwrap() {
            assert_eq!(multiply_type(1, t).unwrap(), t);
        }
        assert!(multiply_type(10, t11).is_err());
    }

    #[test]
    fn z7_triples_cycle_under_doubling() {
        let cycles = [
            [(1, 1), (2, 2), (3, 3)],
            [(1, 2), (2, 4), (1, 4)],
            [(1, 5), (2, 3), (1, 3)],
            [(1, 6), (2, 5), (3, 4)],
        ];
        for cycle in cycles {
            for i in 0..3 {
                let t = FpType::new(7, cycle[i].0, cycle[i].1).unwrap();
                let next = cycle[(i + 1) % 3];
                assert_eq!(
                    multiply_type(2, t).unwrap(),
                    FpType::new(7, next.0, next.1).unwrap()
                );
            }
        }
    }

    #[test]
    fn weak_canonical_examples() {
        let c = FpClass::parse(3, "m+=4,m-=7").unwrap();
        assert_eq!(weak_canonical(&c), c);
        let a = FpClass::parse(5, "m22=1,m13=3").unwrap();
        let b = FpClass::parse(5, "m11=1,m12=3").unwrap();
        assert_eq!(a.multiply(2).unwrap(), b);
        assert_eq!(weak_canonical(&a), weak_canonical(&b));
        assert_eq!(weak_canonical(&a), a);
    }

    #[test]
    fn multiset_expansion() {
        let c = FpClass::parse(3, "m+=1,m-=1").unwrap();
        assert_eq!(fixed_data_multiset(&c), vec![(1, 2), (1, 1)]);
        let c = FpClass::parse(5, "m14=2,m23=2").unwrap();
        assert_eq!(fixed_data_multiset(&c), vec![(1, 4), (1, 4), (2, 3), (2, 3)]);
        assert!(fixed_data_multiset(&FpClass::empty(7).unwrap()).is_empty());
    }

    #[test]
    fn class_parsing_and_display() {
        let c = FpClass::parse(5, "m41=2, m24=1").unwrap();
        assert_eq!(c.to_string(), "m11=0,m22=0,m12=0,m13=1,m14=2,m23=0");
        assert_eq!(c.fix_count(), 3);
        assert!(FpClass::parse(5, "m15=1").is_err());
        assert!(FpClass::parse(3, "m+=x").is_err());
        assert!(FpClass::parse(3, "m+").is_err());
        let json = serde_json::to_string(&FpClass::parse(3, "m+=12").unwrap()).unwrap();
        assert_eq!(json, r#"{"m+":12,"m-":0}"#);
    }

    #[test]
    fn manifold_presets() {
        let e4 = ManifoldInvariants::elliptic(4).unwrap();
        assert_eq!((e4.e, e4.s, e4.b_plus, e4.b_minus), (48, -32, 7, 39));
        for n in (2..=30).step_by(2) {
            let m = ManifoldInvariants::elliptic(n).unwrap();
            assert_eq!(2 * m.e + 3 * m.s, 0);
            assert_eq!(m.e, 2 + m.b2());
        }
        assert!(ManifoldInvariants::elliptic(3).is_err());
        assert!(ManifoldInvariants::new("bad", 10, 0, 3, 3, false).is_err());
        assert_eq!(ManifoldInvariants::parse("E4").unwrap(), e4);
        assert_eq!(ManifoldInvariants::parse("E(4)").unwrap(), e4);
        assert_eq!(ManifoldInvariants::parse("K3").unwrap().n, Some(2));
        let x = ManifoldInvariants::parse("e=24,s=-16,b+=3,b-=19,spin").unwrap();
        assert!(x.spin && x.n.is_none());
        assert!(ManifoldInvariants::parse("e=24").is_err());
    }
}

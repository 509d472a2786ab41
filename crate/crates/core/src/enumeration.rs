//! Exhaustive enumeration of admissible fixed-point classes.
//!
//! The search runs over count vectors with Σ n_t ≤ e. Integrality of the
//! eigenspace dimensions imposes linear congruences modulo p on the counts;
//! after row reduction mod p the pivot variables are determined modulo p by
//! the free ones, so only consistent residue classes are visited. Each
//! candidate is then checked exactly with the compiled [`AffineModel`], and
//! only weak-canonical representatives are kept.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::affine::AffineModel;
use crate::closed_form::{closed_form_eval, dirac_closed_rational};
use crate::constraints::{admissible_generic, eigenspace_dims};
use crate::error::{Error, Result};
use crate::fixed_point::{multiplier_permutation, multipliers, FpClass, ManifoldInvariants};
use crate::forms::{select_recipe, RecipeStatus};
use crate::sw::{sw_of_structure, verdict, SmoothStructureDesc, Verdict};

/// Knobs for [`enumerate_classes`].
#[derive(Clone, Debug)]
pub struct EnumOptions {
    /// Worker threads; `None` uses the rayon default.
    pub workers: Option<usize>,
    /// Structure for the NS verdicts; defaults to the standard E(n).
    pub structure: Option<SmoothStructureDesc>,
    /// Abort after this many exact candidate checks.
    pub max_candidates: Option<u64>,
    /// Search block decompositions for classes without a published recipe.
    pub block_search: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            workers: None,
            structure: None,
            max_candidates: None,
            block_search: true,
        }
    }
}

/// One admissible class with its derived invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassRecord {
    pub label: String,
    #[serde(rename = "counts")]
    pub class: FpClass,
    pub fix_count: i64,
    #[serde(rename = "b2G")]
    pub b2_g: i64,
    #[serde(rename = "bpG")]
    pub b_plus_g: i64,
    #[serde(rename = "bmG")]
    pub b_minus_g: i64,
    pub sign_quotient: i64,
    /// Dirac index coefficients k_0..k_{p−1}; empty for non-spin manifolds.
    pub dirac: Vec<i64>,
    pub ns_verdict: Verdict,
    pub homologically_trivial: bool,
    /// All eigenspace dimensions d_j^± are non-negative, not only d_0^±.
    pub eigenspaces_nonnegative: bool,
    pub recipe_status: RecipeStatus,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: u64,
    pub ns: u64,
    pub no_recipe: u64,
    pub homologically_trivial: u64,
    pub homologically_trivial_ns: u64,
    pub eigenspaces_nonnegative: u64,
    /// Admissible count vectors before weak-equivalence identification.
    pub raw_admissible: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationTable {
    pub p: u32,
    pub manifold: ManifoldInvariants,
    pub structure: Option<SmoothStructureDesc>,
    pub records: Vec<ClassRecord>,
    pub summary: Summary,
}

/// Reduced congruence system mod p with pivots taken from the last columns.
struct CongruencePlan {
    p: i64,
    /// Enumeration order: free columns (ascending) then pivot columns.
    free: Vec<usize>,
    pivots: Vec<usize>,
    /// For pivot i: x_{pivots[i]} ≡ offset[i] − Σ_f coeff[i][f]·x_{free[f]}.
    offset: Vec<i64>,
    coeff: Vec<Vec<i64>>,
    consistent: bool,
}

fn inverse_mod(a: i64, p: i64) -> i64 {
    // p is prime, so a^(p−2) is the inverse.
    let mut result = 1;
    let mut base = a.rem_euclid(p);
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    result
}

impl CongruencePlan {
    fn new(p: u32, n: usize, rows: &[(Vec<i64>, i64)]) -> Self {
        let p = p as i64;
        let mut m: Vec<Vec<i64>> = rows
            .iter()
            .map(|(w, c)| {
                let mut r: Vec<i64> = w.iter().map(|x| x.rem_euclid(p)).collect();
                r.push(c.rem_euclid(p));
                r
            })
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in (0..n).rev() {
            let Some(found) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
                continue;
            };
            m.swap(rank, found);
            let inv = inverse_mod(m[rank][col], p);
            for x in m[rank].iter_mut() {
                *x = *x * inv % p;
            }
            for r in 0..m.len() {
                if r != rank && m[r][col] != 0 {
                    let factor = m[r][col];
                    for c in 0..=n {
                        m[r][c] = (m[r][c] - factor * m[rank][c]).rem_euclid(p);
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        let consistent = m[rank..].iter().all(|r| r[n] == 0);
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let offset = (0..rank).map(|i| (-m[i][n]).rem_euclid(p)).collect();
        let coeff = (0..rank)
            .map(|i| free.iter().map(|&f| m[i][f]).collect())
            .collect();
        CongruencePlan { p, free, pivots, offset, coeff, consistent }
    }
}

struct Search<'a> {
    model: &'a AffineModel,
    plan: CongruencePlan,
    perms: Vec<Vec<usize>>,
    e: u32,
    visited: AtomicU64,
    found: AtomicU64,
    raw: AtomicU64,
    limit: Option<u64>,
    aborted: AtomicBool,
}

impl Search<'_> {
    fn is_weak_canonical(&self, x: &[u32]) -> bool {
        let mut image = vec![0u32; x.len()];
        for perm in &self.perms {
            for (i, &v) in x.iter().enumerate() {
                image[perm[i]] = v;
            }
            if image.as_slice() < x {
                return false;
            }
        }
        true
    }

    fn leaf(&self, x: &[u32], out: &mut Vec<Vec<u32>>) {
        let visited = self.visited.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(limit) = self.limit {
            if visited > limit {
                self.aborted.store(true, Ordering::Relaxed);
                return;
            }
        }
        if self.model.admissible(x) {
            self.raw.fetch_add(1, Ordering::Relaxed);
            if self.is_weak_canonical(x) {
                self.found.fetch_add(1, Ordering::Relaxed);
                out.push(x.to_vec());
            }
        }
    }

    fn free_level(&self, level: usize, budget: u32, x: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if self.aborted.load(Ordering::Relaxed) {
            return;
        }
        if level == self.plan.free.len() {
            let residues: Vec<u32> = (0..self.plan.pivots.len())
                .map(|i| {
                    let s: i64 = self.plan.coeff[i]
                        .iter()
                        .zip(&self.plan.free)
                        .map(|(&c, &f)| c * x[f] as i64)
                        .sum();
                    (self.plan.offset[i] - s).rem_euclid(self.plan.p) as u32
                })
                .collect();
            self.pivot_level(0, budget, &residues, x, out);
            return;
        }
        let col = self.plan.free[level];
        for v in 0..=budget {
            x[col] = v;
            self.free_level(level + 1, budget - v, x, out);
        }
        x[col] = 0;
    }

    fn pivot_level(
        &self,
        level: usize,
        budget: u32,
        residues: &[u32],
        x: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if level == self.plan.pivots.len() {
            self.leaf(x, out);
            return;
        }
        let col = self.plan.pivots[level];
        let mut v = residues[level];
        while v <= budget {
            x[col] = v;
            self.pivot_level(level + 1, budget - v, residues, x, out);
            v += self.plan.p as u32;
        }
        x[col] = 0;
    }
}

fn weak_perms(p: u32) -> Result<Vec<Vec<usize>>> {
    multipliers(p)
        .into_iter()
        .filter(|&m| m != 1)
        .map(|m| multiplier_permutation(p, m))
        .collect()
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Weak-canonical admissible count vectors (sorted ascending) and the
/// number of admissible vectors before identification.
pub fn admissible_counts(
    model: &AffineModel,
    workers: Option<usize>,
    max_candidates: Option<u64>,
) -> Result<(Vec<Vec<u32>>, u64)> {
    let n = model.types.len();
    let plan = CongruencePlan::new(model.p, n, &model.congruences_mod_p());
    if !plan.consistent || model.e < 0 {
        return Ok((Vec::new(), 0));
    }
    let e = model.e as u32;
    let search = Search {
        model,
        plan,
        perms: weak_perms(model.p)?,
        e,
        visited: AtomicU64::new(0),
        found: AtomicU64::new(0),
        raw: AtomicU64::new(0),
        limit: max_candidates,
        aborted: AtomicBool::new(false),
    };
    // Split on the first two free variables for load balance.
    let prefix_len = search.plan.free.len().min(2);
    let mut prefixes: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..prefix_len {
        prefixes = prefixes
            .into_iter()
            .flat_map(|pre| {
                let used: u32 = pre.iter().sum();
                (0..=search.e - used).map(move |v| {
                    let mut next = pre.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    let mut found: Vec<Vec<u32>> = with_pool(workers, || {
        prefixes
            .par_iter()
            .flat_map_iter(|pre| {
                let mut x = vec![0u32; n];
                for (level, &v) in pre.iter().enumerate() {
                    x[search.plan.free[level]] = v;
                }
                let used: u32 = pre.iter().sum();
                let mut out = Vec::new();
                search.free_level(prefix_len, search.e - used, &mut x, &mut out);
                out
            })
            .collect()
    })?;
    if search.aborted.load(Ordering::Relaxed) {
        return Err(Error::ResourceLimit {
            visited: search.visited.load(Ordering::Relaxed),
            found: search.found.load(Ordering::Relaxed),
        });
    }
    found.sort();
    Ok((found, search.raw.load(Ordering::Relaxed)))
}

/// Unpruned reference enumerator: every vector with Σ ≤ e.
pub fn admissible_counts_naive(model: &AffineModel) -> Result<(Vec<Vec<u32>>, u64)> {
    fn rec(
        i: usize,
        budget: u32,
        x: &mut Vec<u32>,
        f: &mut dyn FnMut(&[u32]),
    ) {
        if i == x.len() {
            f(x);
            return;
        }
        for v in 0..=budget {
            x[i] = v;
            rec(i + 1, budget - v, x, f);
        }
        x[i] = 0;
    }
    let perms = weak_perms(model.p)?;
    let mut found = Vec::new();
    let mut raw = 0;
    let mut x = vec![0u32; model.types.len()];
    rec(0, model.e.max(0) as u32, &mut x, &mut |c| {
        if model.admissible(c) {
            raw += 1;
            let canonical = perms.iter().all(|perm| {
                let mut image = vec![0u32; c.len()];
                for (i, &v) in c.iter().enumerate() {
                    image[perm[i]] = v;
                }
                image.as_slice() >= c
            });
            if canonical {
                found.push(c.to_vec());
            }
        }
    });
    found.sort();
    Ok((found, raw))
}

fn default_structure(manifold: &ManifoldInvariants) -> Option<SmoothStructureDesc> {
    manifold.n.and_then(|n| SmoothStructureDesc::standard(n).ok())
}

/// Builds the record for one admissible count vector.
pub fn class_record(
    model: &AffineModel,
    manifold: &ManifoldInvariants,
    counts: &[u32],
    sw_nonzero: Option<bool>,
    block_search: bool,
) -> Result<ClassRecord> {
    let p = model.p;
    let class = FpClass::new(p, counts.to_vec())?;
    let int = |row: &crate::affine::AffineRow, what: &str| {
        row.integer_value(counts)
            .ok_or_else(|| Error::Inconsistent(format!("{what} is not an integer for {class}")))
    };
    let b_plus_g = int(&model.d_plus[0], "b+^G")?;
    let b_minus_g = int(&model.d_minus[0], "b-^G")?;
    let dirac: Vec<i64> = if manifold.spin {
        let half: Vec<i64> = model
            .k
            .iter()
            .map(|row| int(row, "k_j"))
            .collect::<Result<_>>()?;
        (0..p as usize).map(|j| half[j.min(p as usize - j)]).collect()
    } else {
        Vec::new()
    };
    let ns_verdict = match sw_nonzero {
        Some(nonzero) if manifold.spin && manifold.b_plus >= 2 => {
            verdict(nonzero, b_plus_g, &dirac)
        }
        _ => Verdict::NotApplicable,
    };
    let homologically_trivial = model.homologically_trivial(counts);
    let recipe_status = select_recipe(manifold, &class, b_plus_g, b_minus_g, block_search)?;
    Ok(ClassRecord {
        label: String::new(),
        fix_count: class.fix_count() as i64,
        b2_g: b_plus_g + b_minus_g,
        b_plus_g,
        b_minus_g,
        sign_quotient: b_plus_g - b_minus_g,
        dirac,
        ns_verdict,
        homologically_trivial,
        eigenspaces_nonnegative: model.eigenspaces_nonnegative(counts),
        recipe_status,
        class,
    })
}

fn sort_and_label(p: u32, manifold: &ManifoldInvariants, records: &mut [ClassRecord]) {
    records.sort_by(|a, b| {
        b.b_plus_g.cmp(&a.b_plus_g).then_with(|| {
            if p == 3 {
                b.class.counts()[0].cmp(&a.class.counts()[0])
            } else {
                a.class.counts().cmp(b.class.counts())
            }
        })
    });
    if p == 3 && manifold.n == Some(4) {
        let mut block = 0u8;
        let mut index = 0;
        for i in 0..records.len() {
            if i > 0 && records[i].b_plus_g != records[i - 1].b_plus_g {
                block += 1;
                index = 0;
            }
            index += 1;
            records[i].label = format!("{}{}", (b'A' + block) as char, index);
        }
    } else {
        for (i, r) in records.iter_mut().enumerate() {
            r.label = (i + 1).to_string();
        }
    }
}

/// All weak-canonical admissible classes for (p, manifold) with their
/// invariants, NS verdicts and recipe status.
pub fn enumerate_classes(
    p: u32,
    manifold: &ManifoldInvariants,
    options: &EnumOptions,
) -> Result<ClassificationTable> {
    if !matches!(p, 3 | 5 | 7) {
        return Err(Error::Unsupported(format!("enumeration is provided for p = 3, 5, 7 (got {p})")));
    }
    let model = AffineModel::new(p, manifold)?;
    let (counts, raw) = admissible_counts(&model, options.workers, options.max_candidates)?;
    let structure = options.structure.or_else(|| default_structure(manifold));
    let sw_nonzero = match &structure {
        Some(d) => Some(sw_of_structure(d)? % p as i64 != 0.into()),
        None => None,
    };
    let mut records = with_pool(options.workers, || {
        counts
            .par_iter()
            .map(|c| class_record(&model, manifold, c, sw_nonzero, options.block_search))
            .collect::<Result<Vec<_>>>()
    })??;
    sort_and_label(p, manifold, &mut records);
    let mut summary = Summary {
        total: records.len() as u64,
        raw_admissible: raw,
        ..Summary::default()
    };
    for r in &records {
        let ns = r.ns_verdict == Verdict::Nonsmoothable;
        summary.ns += ns as u64;
        summary.no_recipe += matches!(r.recipe_status, RecipeStatus::NoRecipe) as u64;
        summary.homologically_trivial += r.homologically_trivial as u64;
        summary.homologically_trivial_ns += (r.homologically_trivial && ns) as u64;
        summary.eigenspaces_nonnegative += r.eigenspaces_nonnegative as u64;
    }
    Ok(ClassificationTable {
        p,
        manifold: manifold.clone(),
        structure,
        records,
        summary,
    })
}

/// (n, total, ns, no_recipe) for p = 3 on E(n).
pub fn count_table_en(n_list: &[u32], workers: Option<usize>) -> Result<Vec<(u32, u64, u64, u64)>> {
    n_list
        .iter()
        .map(|&n| {
            let m = ManifoldInvariants::elliptic(n)?;
            let options = EnumOptions { workers, ..EnumOptions::default() };
            let t = enumerate_classes(3, &m, &options)?;
            Ok((n, t.summary.total, t.summary.ns, t.summary.no_recipe))
        })
        .collect()
}

/// Result of a full-grid comparison of the two admissibility routes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GridReport {
    pub p: u32,
    pub bound: u32,
    pub tuples: u64,
    pub admissible: u64,
    /// Tuples also evaluated through the direct Q(ζ) computation.
    pub direct_checked: u64,
}

/// Visits every count vector with Σ ≤ bound and requires the compiled generic
/// model and the closed forms to agree on admissibility and, for admissible
/// vectors, on the Dirac coefficients. Every admissible vector and every
/// `direct_stride`-th vector is additionally checked against the direct
/// Q(ζ) computation. Any disagreement is an error naming the witness.
pub fn scan_grid_crosscheck(
    p: u32,
    manifold: &ManifoldInvariants,
    bound: u32,
    direct_stride: u64,
) -> Result<GridReport> {
    if bound as i64 > manifold.e {
        return Err(Error::Usage(format!("bound {bound} exceeds e = {}", manifold.e)));
    }
    let model = AffineModel::new(p, manifold)?;
    let n = model.types.len();
    let mut report = GridReport { p, bound, ..GridReport::default() };
    let mut x = vec![0u32; n];
    let mut failure: Option<Error> = None;
    let visit = |c: &[u32], report: &mut GridReport| -> Result<()> {
        report.tuples += 1;
        let class = FpClass::new(p, c.to_vec())?;
        let generic = model.admissible(c);
        let closed = closed_form_eval(&class, manifold)?.admissible(manifold);
        if generic != closed {
            return Err(Error::Verification(format!(
                "admissibility differs on {class}: generic {generic}, closed form {closed}"
            )));
        }
        let direct = generic || (direct_stride > 0 && report.tuples % direct_stride == 0);
        if direct {
            report.direct_checked += 1;
            if admissible_generic(&class, manifold)? != generic {
                return Err(Error::Verification(format!(
                    "compiled and direct generic admissibility differ on {class}"
                )));
            }
            let dims = eigenspace_dims(&class, manifold)?;
            let (plus, minus) = model.dims(c);
            let same = |a: &[num::rational::Ratio<i64>], b: &[num::BigRational]| {
                a.iter().zip(b).all(|(x, y)| {
                    num::BigRational::new((*x.numer()).into(), (*x.denom()).into()) == *y
                })
            };
            if !same(&plus, &dims.d_plus) || !same(&minus, &dims.d_minus) {
                return Err(Error::Verification(format!(
                    "compiled and direct eigenspace dimensions differ on {class}"
                )));
            }
        }
        if generic {
            report.admissible += 1;
            if manifold.spin {
                let closed_k = dirac_closed_rational(&class, manifold)?;
                if closed_k != model.dirac(c) {
                    return Err(Error::Verification(format!(
                        "Dirac coefficients differ on {class}: generic {:?}, closed {:?}",
                        model.dirac(c),
                        closed_k
                    )));
                }
            }
        }
        Ok(())
    };
    fn rec(
        i: usize,
        budget: u32,
        x: &mut Vec<u32>,
        f: &mut dyn FnMut(&[u32]) -> bool,
    ) -> bool {
        if i == x.len() {
            return f(x);
        }
        for v in 0..=budget {
            x[i] = v;
            if !rec(i + 1, budget - v, x, f) {
                return false;
            }
        }
        x[i] = 0;
        true
    }
    rec(0, bound, &mut x, &mut |c| match visit(c, &mut report) {
        Ok(()) => true,
        Err(e) => {
            failure = Some(e);
            false
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(report),
    }
}

use std::collections::BTreeSet;

use nsmooth_core::affine::AffineModel;
use nsmooth_core::constraints::admissible_generic;
use nsmooth_core::enumeration::{admissible_counts, admissible_counts_naive, enumerate_classes, EnumOptions};
use nsmooth_core::fixed_point::{multipliers, weak_canonical};
use nsmooth_core::{FpClass, ManifoldInvariants};

fn options(workers: usize) -> EnumOptions {
    EnumOptions { workers: Some(workers), ..EnumOptions::default() }
}

#[test]
fn pruned_search_matches_naive_for_p7_on_a_small_manifold() {
    // Full-grid naive enumeration is out of reach for p = 7 on K3; a small
    // non-spin manifold keeps the 12-type grid manageable.
    let m = ManifoldInvariants::parse("e=10,s=-6,b+=1,b-=7").unwrap();
    let model = AffineModel::new(7, &m).unwrap();
    let (mut pruned, _) = admissible_counts(&model, Some(2), None).unwrap();
    let (mut naive, _) = admissible_counts_naive(&model).unwrap();
    pruned.sort();
    naive.sort();
    assert!(!naive.is_empty());
    assert_eq!(pruned, naive);
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let k3 = ManifoldInvariants::k3();
    let one = enumerate_classes(5, &k3, &options(1)).unwrap();
    let three = enumerate_classes(5, &k3, &options(3)).unwrap();
    assert_eq!(
        serde_json::to_string(&one).unwrap(),
        serde_json::to_string(&three).unwrap()
    );
}

#[test]
fn weak_classes_partition_the_raw_vectors() {
    let t = enumerate_classes(5, &ManifoldInvariants::k3(), &options(2)).unwrap();
    let mut orbit_total = 0;
    let mut seen = BTreeSet::new();
    for r in &t.records {
        assert_eq!(weak_canonical(&r.class), r.class);
        assert!(seen.insert(r.class.clone()), "{} listed twice", r.class);
        let orbit: BTreeSet<FpClass> = multipliers(5).into_iter().map(|m| r.class.multiply(m).unwrap()).collect();
        orbit_total += orbit.len() as u64;
    }
    assert_eq!(orbit_total, t.summary.raw_admissible);
}

#[test]
fn p3_classes_follow_the_quotient_pattern() {
    // b_+^G = 2k − 1 and 2m+ + m− = 9k − 3n for some integer k.
    for n in [2u32, 4, 8, 10] {
        let t = enumerate_classes(3, &ManifoldInvariants::elliptic(n).unwrap(), &options(2)).unwrap();
        for r in &t.records {
            assert_eq!(r.b_plus_g % 2, 1, "E({n}) {}", r.class);
            let k = (r.b_plus_g + 1) / 2;
            let c = r.class.counts();
            assert_eq!(2 * c[0] as i64 + c[1] as i64, 9 * k - 3 * n as i64, "E({n}) {}", r.class);
        }
    }
}

#[test]
fn every_unlisted_vector_is_rejected() {
    let k3 = ManifoldInvariants::k3();
    let t = enumerate_classes(3, &k3, &options(1)).unwrap();
    let listed: BTreeSet<Vec<u32>> = t.records.iter().map(|r| r.class.counts().to_vec()).collect();
    for mp in 0..=24u32 {
        for mm in 0..=24 - mp {
            let c = FpClass::new(3, vec![mp, mm]).unwrap();
            assert_eq!(admissible_generic(&c, &k3).unwrap(), listed.contains(&vec![mp, mm]), "{c}");
        }
    }
}

#[test]
fn standard_e6_structure_gives_no_verdict_for_p3() {
    let t = enumerate_classes(3, &ManifoldInvariants::elliptic(6).unwrap(), &options(2)).unwrap();
    assert!(t.summary.total > 0);
    assert_eq!(t.summary.ns, 0);
}

#[test]
fn unsupported_primes_are_rejected() {
    assert!(enumerate_classes(11, &ManifoldInvariants::k3(), &options(1)).is_err());
}

use nsmooth_core::constraints::{g_power_signature, quotient_data};
use nsmooth_core::forms::{block_lattice, build_form, gamma_lattice, select_recipe, verify_form, Block, RecipeStatus};
use nsmooth_core::intmat::{self, det};
use nsmooth_core::lattice::{form_invariants, g_signature_of_form, rep_invariants, GLattice, RepInvariants};
use nsmooth_core::{CycNum, FpClass, ManifoldInvariants};

fn recipe_check(p: u32, manifold: &ManifoldInvariants, class: &str) -> nsmooth_core::forms::FormCheck {
    let c = FpClass::parse(p, class).unwrap();
    let q = quotient_data(&c, manifold).unwrap();
    let status = select_recipe(manifold, &c, q.b_plus_g, q.b_minus_g, true).unwrap();
    let recipe = status.recipe().expect("class has a recipe");
    verify_form(&build_form(recipe).unwrap(), &recipe.to_string(), &c, manifold).unwrap()
}

#[test]
fn special_block_forms_are_sums_of_hyperbolic_planes() {
    // The 4×4 form of B20 is 2H (det 1), the 6×6 form of B511 is 3H (det −1).
    for (p, block, rank, d) in [(3, Block::B20, 4, 1), (5, Block::B511, 6, -1)] {
        let l = block_lattice(p, block).unwrap();
        assert_eq!(det(&l.gram).unwrap(), d.into());
        let f = form_invariants(&l).unwrap();
        assert!(f.even);
        assert_eq!((f.rank, f.signature), (rank, 0));
    }
}

#[test]
fn rank_96_gamma_is_even_unimodular_for_every_k() {
    // r = 16(5q + 1) with q = 1 admits up to 16q + 3 = 19 free summands.
    for k in 0..=19 {
        let l = gamma_lattice(5, 96, k).unwrap();
        let f = form_invariants(&l).unwrap();
        assert!(f.even && f.unimodular(), "k = {k}");
        assert_eq!(f.signature, -96);
        assert_eq!(rep_invariants(&l).unwrap(), RepInvariants { trivial: 96 - 5 * k as usize, free: k as usize, cyclotomic: 0 });
    }
    assert!(gamma_lattice(5, 96, 20).is_err());
    assert!(gamma_lattice(5, 80, 1).is_err());
}

#[test]
fn corrupted_gram_is_not_unimodular() {
    let mut gram = gamma_lattice(3, 16, 0).unwrap().gram;
    gram[0][0] += 2;
    let l = GLattice::trivial(3, gram).unwrap();
    assert!(!form_invariants(&l).unwrap().unimodular());
}

#[test]
fn companion_matrix_is_one_cyclotomic_summand() {
    // Companion matrix of 1 + x + x² + x³ + x⁴ acting on Z[ζ_5], with the
    // zero form so that only the module structure matters.
    let mut action = vec![vec![0; 4]; 4];
    for i in 1..4 {
        action[i][i - 1] = 1;
    }
    for row in action.iter_mut() {
        row[3] = -1;
    }
    assert_eq!(intmat::pow(&action, 5).unwrap(), intmat::identity(4));
    let l = GLattice::new(5, vec![vec![0; 4]; 4], action).unwrap();
    assert_eq!(rep_invariants(&l).unwrap(), RepInvariants { trivial: 0, free: 0, cyclotomic: 1 });
}

#[test]
fn e4_a3_form_has_g_signature_minus_two() {
    let e4 = ManifoldInvariants::elliptic(4).unwrap();
    let check = recipe_check(3, &e4, "m+=6,m-=12");
    assert!(check.passed(), "{:?}", check.failures());
    let c = FpClass::parse(3, "m+=6,m-=12").unwrap();
    assert_eq!(g_power_signature(&c, 1).unwrap(), CycNum::from_integer(3, -2).unwrap());
    assert_eq!(check.g_signature, "-2");
}

#[test]
fn k3_z5_example_form_passes_with_the_stated_inertia() {
    let k3 = ManifoldInvariants::k3();
    let check = recipe_check(5, &k3, "m22=1,m13=3,m12=5");
    assert_eq!(check.form, "3A5 + Gamma5(16,3)");
    assert_eq!(check.fixed_inertia, (3, 7));
    assert!(check.passed(), "{:?}", check.failures());
}

#[test]
fn gamma_g_signature_is_minus_r_plus_pk() {
    for (p, r, cap) in [(3u32, 16u32, 5u32), (5, 16, 3), (3, 64, 21)] {
        for k in 0..=cap {
            let l = gamma_lattice(p, r, k).unwrap();
            let expected = CycNum::from_integer(p, -(r as i64) + (p * k) as i64).unwrap();
            assert_eq!(g_signature_of_form(&l).unwrap(), expected, "p={p} r={r} k={k}");
        }
    }
}

#[test]
fn smooth_k3_example_has_no_form() {
    let k3 = ManifoldInvariants::k3();
    let c = FpClass::parse(5, "m14=2,m23=2").unwrap();
    let q = quotient_data(&c, &k3).unwrap();
    assert_eq!(select_recipe(&k3, &c, q.b_plus_g, q.b_minus_g, true).unwrap(), RecipeStatus::SmoothExample);
}

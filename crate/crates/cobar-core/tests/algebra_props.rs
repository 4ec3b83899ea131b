//! Property suites for the algebraic identities that pin sign conventions.

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cobar_core::chain::SparseMat;
use cobar_core::cobar::{
    chain_add, chain_mul, cobar_differential, cobar_product, word_basis, CobarChain,
    CobarMonomial, Generators, TruncationPolicy,
};
use cobar_core::fsq::{fsq_basis, phi};
use cobar_core::snf::smith_normal_form;
use cobar_core::space::builtin_space;

use common::minor_gcd_factors;

fn torus_gens() -> Generators {
    Generators::build(&builtin_space("torus").unwrap()).unwrap()
}

fn differential_chain(c: &CobarChain, gens: &Generators, policy: &TruncationPolicy) -> CobarChain {
    let mut out = CobarChain::new();
    for (m, &coeff) in c {
        for (t, &ct) in cobar_differential(m, gens, policy).iter() {
            chain_add(&mut out, t.clone(), coeff * ct);
        }
    }
    out
}

#[test]
fn leibniz_rule_on_random_pairs() {
    let gens = torus_gens();
    let free = TruncationPolicy::new(6, None);
    let pool: Vec<CobarMonomial> = (0..=2)
        .flat_map(|n| {
            word_basis(&gens, n, &TruncationPolicy::new(2, Some(3)))
                .unwrap()
                .into_iter()
                .map(CobarMonomial)
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let m1 = &pool[rng.gen_range(0..pool.len())];
        let m2 = &pool[rng.gen_range(0..pool.len())];
        if gens.word_degree(&m1.0) + gens.word_degree(&m2.0) > 5 {
            continue;
        }
        let product = cobar_product(m1, m2);
        let lhs = cobar_differential(&product, &gens, &free);
        // D(m1) * m2 + (-1)^{deg m1} m1 * D(m2)
        let mut c1 = CobarChain::new();
        chain_add(&mut c1, m1.clone(), 1);
        let mut c2 = CobarChain::new();
        chain_add(&mut c2, m2.clone(), 1);
        let mut rhs = chain_mul(&cobar_differential(m1, &gens, &free), &c2);
        let sign = if gens.word_degree(&m1.0) % 2 == 0 { 1 } else { -1 };
        for (t, &c) in chain_mul(&c1, &cobar_differential(m2, &gens, &free)).iter() {
            chain_add(&mut rhs, t.clone(), sign * c);
        }
        assert_eq!(lhs, rhs, "Leibniz fails on {m1:?} * {m2:?}");
    }
}

#[test]
fn differential_grading_and_length() {
    // Every term of D(m) has degree deg(m) - 1 and length len(m) or
    // len(m) + 1.
    for name in ["torus", "rp2"] {
        let gens = Generators::build(&builtin_space(name).unwrap()).unwrap();
        let free = TruncationPolicy::new(5, None);
        for n in 1..=4u32 {
            for w in word_basis(&gens, n, &TruncationPolicy::new(4, Some(4))).unwrap() {
                let m = CobarMonomial(w);
                for (t, _) in cobar_differential(&m, &gens, &free).iter() {
                    assert_eq!(gens.word_degree(&t.0), n - 1);
                    assert!(t.len() == m.len() || t.len() == m.len() + 1);
                }
            }
        }
    }
}

#[test]
fn d_squared_zero_as_chain_identity() {
    let gens = torus_gens();
    let free = TruncationPolicy::new(8, None);
    for n in 2..=4u32 {
        for w in word_basis(&gens, n, &TruncationPolicy::new(4, Some(4))).unwrap() {
            let d = cobar_differential(&CobarMonomial(w), &gens, &free);
            assert!(differential_chain(&d, &gens, &free).is_empty());
        }
    }
}

#[test]
fn identity_map_induces_identity_on_bases() {
    // Functoriality smoke test: the same space enumerated twice gives the
    // same bases in the same order.
    let k1 = builtin_space("torus").unwrap();
    let k2 = builtin_space("torus").unwrap();
    let g1 = Generators::build(&k1).unwrap();
    let g2 = Generators::build(&k2).unwrap();
    let p = TruncationPolicy::new(3, Some(4));
    for n in 0..=3 {
        assert_eq!(
            word_basis(&g1, n, &p).unwrap(),
            word_basis(&g2, n, &p).unwrap()
        );
    }
}

#[test]
fn wedge_inclusion_commutes_with_phi() {
    // Naturality smoke test: the inclusion of wedge-circles:1 into
    // wedge-circles:2 is letter 0 -> letter 0; bases and phi images
    // correspond under that relabeling.
    let g1 = Generators::build(&builtin_space("wedge-circles:1").unwrap()).unwrap();
    let g2 = Generators::build(&builtin_space("wedge-circles:2").unwrap()).unwrap();
    let p = TruncationPolicy::new(0, Some(3));
    let b1 = fsq_basis(&g1, 0, &p).unwrap();
    let b2 = fsq_basis(&g2, 0, &p).unwrap();
    for w in &b1 {
        assert!(b2.contains(w), "image word {w:?} missing");
        let img1 = phi(w, &g1);
        let img2 = phi(w, &g2);
        // Letter 0 means `a` in both alphabets, so the chains agree on the
        // nose.
        assert_eq!(img1, img2);
    }
}

#[test]
fn truncated_complexes_verify_on_builtins() {
    for name in [
        "sphere:2",
        "sphere:3",
        "wedge-circles:2",
        "torus",
        "rp2",
    ] {
        let gens = Generators::build(&builtin_space(name).unwrap()).unwrap();
        let policy = if gens.has_edges() {
            TruncationPolicy::new(4, Some(4))
        } else {
            TruncationPolicy::new(6, None)
        };
        let c = cobar_core::cobar::cobar_complex_with(&gens, &policy).unwrap();
        assert!(cobar_core::chain::verify_complex(&c).passed(), "cobar {name}");
        let f = cobar_core::fsq::fsq_complex(&gens, &policy).unwrap();
        assert!(cobar_core::chain::verify_complex(&f).passed(), "fsq {name}");
    }
}

proptest! {
    // Smith normal form agrees with the minor-gcd oracle on random small
    // matrices; the acceptance suite runs the fixed 1000-case version.
    #[test]
    fn snf_matches_minor_gcd(rows in 1usize..=5, cols in 1usize..=5,
                             seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries: Vec<Vec<i64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect())
            .collect();
        let got: Vec<i128> = smith_normal_form(&SparseMat::from_dense(&entries), false)
            .factors
            .iter()
            .map(|d| i128::try_from(d).unwrap())
            .collect();
        let wide: Vec<Vec<i128>> = entries
            .iter()
            .map(|r| r.iter().map(|&v| v as i128).collect())
            .collect();
        prop_assert_eq!(got, minor_gcd_factors(&wide));
    }
}

//! Property suites for the operator calculus and the restriction maps.

mod common;

use proptest::prelude::*;

use cobar_core::operator::{compose_operators, SimplicialOperator};
use cobar_core::space::{builtin_space, SimplexRef};

use common::{normal_form_map, oracle_compose, Elem};

/// Strategy: a random applicable elementary word from a random start
/// dimension, staying within dimensions 0..=5.
fn words() -> impl Strategy<Value = (u32, Vec<(bool, u32)>)> {
    (0u32..=5, proptest::collection::vec((any::<bool>(), 0u32..=6), 0..=6))
}

fn materialize(source: u32, raw: &[(bool, u32)]) -> (Vec<Elem>, SimplicialOperator) {
    let mut dim = source;
    let mut word = Vec::new();
    let mut op = SimplicialOperator::identity(source);
    for &(face_bias, idx) in raw {
        let face = if dim == 0 {
            false
        } else if dim == 5 {
            true
        } else {
            face_bias
        };
        if face {
            let i = idx % (dim + 1);
            word.push(Elem::Face(i));
            op = op.then_face(i).unwrap();
            dim -= 1;
        } else {
            let j = idx % (dim + 1);
            word.push(Elem::Degeneracy(j));
            op = op.then_degeneracy(j).unwrap();
            dim += 1;
        }
    }
    (word, op)
}

proptest! {
    #[test]
    fn normal_form_matches_monotone_oracle((source, raw) in words()) {
        let (word, op) = materialize(source, &raw);
        prop_assert_eq!(normal_form_map(&op), oracle_compose(source, &word));
    }

    #[test]
    fn normal_form_is_independent_of_association((source, raw) in words(),
                                                 cut_seed in any::<usize>()) {
        let (word, op) = materialize(source, &raw);
        let cut = if word.is_empty() { 0 } else { cut_seed % (word.len() + 1) };
        let mut left = SimplicialOperator::identity(source);
        for &e in &word[..cut] {
            left = match e {
                Elem::Face(i) => left.then_face(i).unwrap(),
                Elem::Degeneracy(j) => left.then_degeneracy(j).unwrap(),
            };
        }
        let mut right = SimplicialOperator::identity(left.target_dim());
        for &e in &word[cut..] {
            right = match e {
                Elem::Face(i) => right.then_face(i).unwrap(),
                Elem::Degeneracy(j) => right.then_degeneracy(j).unwrap(),
            };
        }
        prop_assert_eq!(compose_operators(&left, &right).unwrap(), op);
    }
}

#[test]
fn face_maps_respect_simplicial_identities() {
    // d_i d_j = d_{j-1} d_i for i < j, on every nondegenerate simplex of
    // every builtin, evaluated through the face tables.
    for name in [
        "sphere:2",
        "sphere:3",
        "sphere:4",
        "wedge-circles:2",
        "torus",
        "rp2",
    ] {
        let k = builtin_space(name).unwrap();
        for (gid, _) in k.iter_cells() {
            if gid.dim < 2 {
                continue;
            }
            let r = SimplexRef::nondegenerate(gid);
            for j in 1..=gid.dim {
                for i in 0..j {
                    let lhs = k.apply_face(i, &k.apply_face(j, &r).unwrap()).unwrap();
                    let rhs = k.apply_face(j - 1, &k.apply_face(i, &r).unwrap()).unwrap();
                    assert_eq!(lhs, rhs, "{name}: d_{i} d_{j} on {gid:?}");
                }
            }
        }
    }
}

#[test]
fn front_restrictions_compose() {
    // The front j-face of the front i-face is the front j-face.
    for name in ["sphere:3", "torus", "rp2"] {
        let k = builtin_space(name).unwrap();
        for (gid, _) in k.iter_cells() {
            let r = SimplexRef::nondegenerate(gid);
            for i in 0..=gid.dim {
                let (front_i, _) = k.front_back(&r, i).unwrap();
                for j in 0..=i {
                    let (front_j_direct, _) = k.front_back(&r, j).unwrap();
                    let (front_j_through, _) = k.front_back(&front_i, j).unwrap();
                    assert_eq!(front_j_direct, front_j_through, "{name}: {i} then {j}");
                }
            }
        }
    }
}

//! Independent oracles shared by the integration suites.
//!
//! Nothing here calls back into the code paths under test: operators are
//! modelled as plain monotone maps between finite ordinals, and invariant
//! factors are recovered from gcds of minors.

// Each suite pulls in the oracles it needs; the rest stay unused per crate.
#![allow(dead_code)]

use cobar_core::operator::SimplicialOperator;

/// An elementary operator application, used to drive both the symbolic
/// implementation and the monotone-map oracle.
#[derive(Clone, Copy, Debug)]
pub enum Elem {
    Face(u32),
    Degeneracy(u32),
}

/// The monotone map of one elementary operator on `dim`-simplices, as the
/// vector of its values. A face `d_i` is the injection skipping `i`; a
/// degeneracy `s_j` repeats `j`.
pub fn elem_map(e: Elem, dim: u32) -> Vec<u32> {
    match e {
        Elem::Face(i) => (0..=dim).filter(|&t| t != i).collect(),
        Elem::Degeneracy(j) => {
            let mut v = Vec::with_capacity(dim as usize + 2);
            for t in 0..=dim {
                v.push(t);
                if t == j {
                    v.push(t);
                }
            }
            v
        }
    }
}

/// Applies a sequence of elementary operators to the identity, composing
/// underlying monotone maps pointwise. Returns the vector of the composite
/// `[target_dim] -> [source_dim]` together with the running dimension.
pub fn oracle_compose(source_dim: u32, word: &[Elem]) -> Vec<u32> {
    let mut vec: Vec<u32> = (0..=source_dim).collect();
    let mut dim = source_dim;
    for &e in word {
        let m = elem_map(e, dim);
        // Applying e after the current operator precomposes the map.
        vec = m.iter().map(|&t| vec[t as usize]).collect();
        dim = match e {
            Elem::Face(_) => dim - 1,
            Elem::Degeneracy(_) => dim + 1,
        };
    }
    vec
}

/// Expands a normal form `(faces, degeneracies, source_dim)` into the vector
/// of its monotone map, independent of the rewriting engine.
pub fn normal_form_map(op: &SimplicialOperator) -> Vec<u32> {
    let values: Vec<u32> = (0..=op.source_dim())
        .filter(|t| !op.faces().contains(t))
        .collect();
    let m = op.target_dim();
    let mut out = Vec::with_capacity(m as usize + 1);
    let mut idx = 0usize;
    out.push(values[0]);
    for t in 1..=m {
        if !op.degeneracies().contains(&(t - 1)) {
            idx += 1;
        }
        out.push(values[idx]);
    }
    out
}

/// Determinant of a small integer matrix by first-row expansion.
fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    let mut acc = 0i128;
    for (j, &v) in m[0].iter().enumerate() {
        if v == 0 {
            continue;
        }
        let minor: Vec<Vec<i128>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        acc += sign * v * det(&minor);
    }
    acc
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Invariant factors from the gcds of k×k minors: `d_1 ... d_k` equals the
/// gcd of all k×k minors, so `d_k` is the ratio of consecutive gcds.
pub fn minor_gcd_factors(entries: &[Vec<i128>]) -> Vec<i128> {
    let rows = entries.len();
    let cols = entries.first().map_or(0, |r| r.len());
    let mut factors = Vec::new();
    let mut prev = 1i128;
    for k in 1..=rows.min(cols) {
        let mut g = 0i128;
        for rsel in subsets(rows, k) {
            for csel in subsets(cols, k) {
                let sub: Vec<Vec<i128>> = rsel
                    .iter()
                    .map(|&r| csel.iter().map(|&c| entries[r][c]).collect())
                    .collect();
                g = gcd(g, det(&sub));
            }
        }
        if g == 0 {
            break;
        }
        factors.push(g / prev);
        prev = g;
    }
    factors
}

//! Smith normal form over the integers.
//!
//! Boundary matrices arriving here are extremely sparse with almost all
//! entries ±1, so elimination runs in two phases: a sparse pass that picks
//! ±1 pivots with a Markowitz-style fill heuristic, then a dense
//! arbitrary-precision pass on whatever core remains. Intermediate entries
//! are `BigInt` throughout the dense pass; coefficient blowup, not matrix
//! size, is the failure mode this guards against.

// Row/column index loops mirror the pivot arithmetic; iterators obscure it.
#![allow(clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::chain::SparseMat;

/// Invariant factors `d_1 | d_2 | ...` plus optional unimodular transforms
/// with `u * m * v` diagonal.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub factors: Vec<BigInt>,
    pub u: Option<Vec<Vec<BigInt>>>,
    pub v: Option<Vec<Vec<BigInt>>>,
}

/// Rank of an integer matrix.
pub fn rank(m: &SparseMat) -> usize {
    smith_normal_form(m, false).factors.len()
}

pub fn smith_normal_form(m: &SparseMat, with_transforms: bool) -> SnfResult {
    if with_transforms {
        return dense_snf(m);
    }
    let (units, core) = sparse_unit_elimination(m);
    let mut factors: Vec<BigInt> = vec![BigInt::one(); units];
    if !core.is_empty() {
        let core_factors = dense_snf_factors(core);
        factors.extend(core_factors);
    }
    factors
        .sort_by(|a, b| a.magnitude().cmp(b.magnitude()));
    debug_assert!(divisibility_chain_holds(&factors));
    SnfResult {
        factors,
        u: None,
        v: None,
    }
}

fn divisibility_chain_holds(factors: &[BigInt]) -> bool {
    factors
        .windows(2)
        .all(|w| w[0].is_zero() || (&w[1] % &w[0]).is_zero())
}

/// Eliminates ±1 pivots sparsely; returns the number of pivots taken and the
/// remaining dense core (entries only, positions forgotten).
///
/// Pivot selection approximates Markowitz: pick the sparsest live row that
/// still contains a ±1, then the ±1 entry in it with the fewest other rows
/// in its column. Row fills and unit flags are cached so selection costs a
/// linear scan instead of touching every entry.
fn sparse_unit_elimination(m: &SparseMat) -> (usize, Vec<Vec<BigInt>>) {
    let rows = m.rows();
    let cols = m.n_cols();
    let mut row_entries: Vec<std::collections::BTreeMap<usize, i128>> =
        vec![std::collections::BTreeMap::new(); rows];
    for c in 0..cols {
        for &(r, v) in m.column(c) {
            row_entries[r].insert(c, v as i128);
        }
    }
    let mut col_rows: Vec<std::collections::BTreeSet<usize>> =
        vec![std::collections::BTreeSet::new(); cols];
    for (r, entries) in row_entries.iter().enumerate() {
        for &c in entries.keys() {
            col_rows[c].insert(r);
        }
    }
    let mut col_count: Vec<usize> = col_rows.iter().map(|s| s.len()).collect();
    let mut live_row: Vec<bool> = row_entries.iter().map(|r| !r.is_empty()).collect();
    let mut live_col: Vec<bool> = col_count.iter().map(|&n| n > 0).collect();
    // may_have_unit is allowed to be stale-true; it is re-verified on pick.
    let mut may_have_unit: Vec<bool> = row_entries
        .iter()
        .map(|r| r.values().any(|&v| v == 1 || v == -1))
        .collect();
    let mut pivots = 0;

    loop {
        let mut pick: Option<(usize, usize)> = None;
        loop {
            let mut best: Option<(usize, usize)> = None; // (fill, row)
            for r in 0..rows {
                if live_row[r] && may_have_unit[r] {
                    let fill = row_entries[r].len();
                    if best.is_none_or(|(f, _)| fill < f) {
                        best = Some((fill, r));
                        if fill == 1 {
                            break;
                        }
                    }
                }
            }
            let (_, pr) = match best {
                Some(b) => b,
                None => break,
            };
            // Verify the cached flag and choose the column.
            let mut unit: Option<(usize, usize)> = None; // (col_count, col)
            for (&c, &v) in row_entries[pr].iter() {
                if v == 1 || v == -1 {
                    let cc = col_count[c];
                    if unit.is_none_or(|(n, _)| cc < n) {
                        unit = Some((cc, c));
                    }
                }
            }
            match unit {
                Some((_, pc)) => {
                    pick = Some((pr, pc));
                    break;
                }
                None => {
                    may_have_unit[pr] = false;
                }
            }
        }
        let (pr, pc) = match pick {
            Some(p) => p,
            None => break,
        };
        let pivot = row_entries[pr][&pc];
        // Clear column pc using row pr.
        let pivot_row: Vec<(usize, i128)> = row_entries[pr]
            .iter()
            .map(|(&c, &v)| (c, v))
            .collect();
        let touched: Vec<usize> = col_rows[pc]
            .iter()
            .copied()
            .filter(|&r| r != pr && live_row[r])
            .collect();
        for r in touched {
            let factor = row_entries[r][&pc] * pivot; // pivot = ±1, so this is v/pivot
            for &(c, pv) in &pivot_row {
                let slot = row_entries[r].entry(c).or_insert(0);
                let before = *slot != 0;
                *slot -= factor * pv;
                if *slot == 1 || *slot == -1 {
                    may_have_unit[r] = true;
                }
                let after = *slot != 0;
                if before && !after {
                    row_entries[r].remove(&c);
                    col_count[c] -= 1;
                    col_rows[c].remove(&r);
                } else if !before && after {
                    col_count[c] += 1;
                    col_rows[c].insert(r);
                }
            }
            if row_entries[r].is_empty() {
                live_row[r] = false;
            }
        }
        // Retire the pivot row and column.
        for &(c, _) in &pivot_row {
            col_count[c] -= 1;
            col_rows[c].remove(&pr);
            if col_count[c] == 0 {
                live_col[c] = false;
            }
        }
        live_row[pr] = false;
        row_entries[pr].clear();
        live_col[pc] = false;
        pivots += 1;
    }

    // Collect whatever is left into a dense core.
    let live_cols: Vec<usize> = (0..cols).filter(|&c| live_col[c]).collect();
    let col_pos: std::collections::HashMap<usize, usize> = live_cols
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .collect();
    let mut core: Vec<Vec<BigInt>> = Vec::new();
    for (r, entries) in row_entries.iter().enumerate() {
        if !live_row[r] {
            continue;
        }
        let mut row = vec![BigInt::zero(); live_cols.len()];
        for (&c, &v) in entries.iter() {
            row[col_pos[&c]] = BigInt::from(v);
        }
        core.push(row);
    }
    (pivots, core)
}

fn dense_snf_factors(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut factors = Vec::new();
    let mut k = 0;
    while k < rows.min(cols) {
        let pivot = match find_pivot(&a, k) {
            Some(p) => p,
            None => break,
        };
        a.swap(k, pivot.0);
        swap_cols(&mut a, k, pivot.1);
        loop {
            // Reduce column k below the pivot.
            let mut clean = true;
            for r in k + 1..rows {
                if a[r][k].is_zero() {
                    continue;
                }
                let q = div_rounded(&a[r][k], &a[k][k]);
                if !q.is_zero() {
                    for c in k..cols {
                        let sub = &q * &a[k][c];
                        a[r][c] -= sub;
                    }
                }
                if !a[r][k].is_zero() {
                    // Remainder smaller than the pivot; swap it up.
                    a.swap(k, r);
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Reduce row k to the right of the pivot.
            for c in k + 1..cols {
                if a[k][c].is_zero() {
                    continue;
                }
                let q = div_rounded(&a[k][c], &a[k][k]);
                if !q.is_zero() {
                    for r in k..rows {
                        let sub = &q * &a[r][k];
                        a[r][c] -= sub;
                    }
                }
                if !a[k][c].is_zero() {
                    swap_cols(&mut a, k, c);
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if a[k][k].is_negative() {
            for c in k..cols {
                a[k][c] = -a[k][c].clone();
            }
        }
        k += 1;
    }
    for i in 0..k {
        factors.push(a[i][i].clone());
    }
    fix_divisibility(&mut factors);
    factors
}

/// After diagonalization, enforce `d_i | d_{i+1}` with gcd/lcm replacements.
fn fix_divisibility(factors: &mut [BigInt]) {
    let n = factors.len();
    for i in 0..n {
        for j in i + 1..n {
            let (di, dj) = (factors[i].clone(), factors[j].clone());
            if (&dj % &di).is_zero() {
                continue;
            }
            let g = di.gcd(&dj);
            let l = (&di / &g) * &dj;
            factors[i] = g;
            factors[j] = l;
        }
    }
    factors.sort_by(|a, b| a.magnitude().cmp(b.magnitude()));
}

fn find_pivot(a: &[Vec<BigInt>], k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut best_mag: Option<BigInt> = None;
    for (r, row) in a.iter().enumerate().skip(k) {
        for (c, v) in row.iter().enumerate().skip(k) {
            if v.is_zero() {
                continue;
            }
            let mag = v.abs();
            if mag.is_one() {
                return Some((r, c));
            }
            if best_mag.as_ref().is_none_or(|m| &mag < m) {
                best_mag = Some(mag);
                best = Some((r, c));
            }
        }
    }
    best
}

fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    if i == j {
        return;
    }
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// Division rounded to the nearest integer keeps remainders at most half the
/// divisor, which is what tames entry growth.
fn div_rounded(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut q, r) = a.div_rem(b);
    let two_r = r.abs() * BigInt::from(2);
    if two_r > b.abs() {
        if (a.is_negative()) == (b.is_negative()) {
            q += 1;
        } else {
            q -= 1;
        }
    }
    q
}

/// Fully dense SNF tracking unimodular transforms.
fn dense_snf(m: &SparseMat) -> SnfResult {
    let rows = m.rows();
    let cols = m.n_cols();
    let mut a: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); cols]; rows];
    for c in 0..cols {
        for &(r, v) in m.column(c) {
            a[r][c] = BigInt::from(v);
        }
    }
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut k = 0;
    while k < rows.min(cols) {
        let pivot = match find_pivot(&a, k) {
            Some(p) => p,
            None => break,
        };
        a.swap(k, pivot.0);
        u.swap(k, pivot.0);
        swap_cols(&mut a, k, pivot.1);
        swap_cols(&mut v, k, pivot.1);
        loop {
            let mut clean = true;
            for r in k + 1..rows {
                if a[r][k].is_zero() {
                    continue;
                }
                let q = div_rounded(&a[r][k], &a[k][k]);
                row_op(&mut a, &mut u, r, k, &q);
                if !a[r][k].is_zero() {
                    a.swap(k, r);
                    u.swap(k, r);
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            for c in k + 1..cols {
                if a[k][c].is_zero() {
                    continue;
                }
                let q = div_rounded(&a[k][c], &a[k][k]);
                col_op(&mut a, &mut v, c, k, &q);
                if !a[k][c].is_zero() {
                    swap_cols(&mut a, k, c);
                    swap_cols(&mut v, k, c);
                    clean = false;
                }
            }
            if clean {
                // Make sure the pivot divides everything south-east of it;
                // if not, fold the offending row in and continue.
                let mut offender = None;
                'scan: for r in k + 1..rows {
                    for c in k + 1..cols {
                        if !(&a[r][c] % &a[k][k]).is_zero() {
                            offender = Some(r);
                            break 'scan;
                        }
                    }
                }
                match offender {
                    None => break,
                    Some(r) => {
                        let minus_one = -BigInt::one();
                        row_op(&mut a, &mut u, k, r, &minus_one);
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if a[k][k].is_negative() {
            for c in 0..cols {
                a[k][c] = -a[k][c].clone();
            }
            for c in 0..rows {
                u[k][c] = -u[k][c].clone();
            }
        }
        k += 1;
    }
    let factors: Vec<BigInt> = (0..k).map(|i| a[i][i].clone()).collect();
    SnfResult {
        factors,
        u: Some(u),
        v: Some(v),
    }
}

/// `row r -= q * row k` on the matrix and its row transform.
fn row_op(a: &mut [Vec<BigInt>], u: &mut [Vec<BigInt>], r: usize, k: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let cols = a[0].len();
    for c in 0..cols {
        let sub = q * &a[k][c];
        a[r][c] -= sub;
    }
    let ucols = u[0].len();
    for c in 0..ucols {
        let sub = q * &u[k][c];
        u[r][c] -= sub;
    }
}

/// `col c -= q * col k` on the matrix and its column transform.
fn col_op(a: &mut [Vec<BigInt>], v: &mut [Vec<BigInt>], c: usize, k: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in a.iter_mut() {
        let sub = q * &row[k];
        row[c] -= sub;
    }
    for row in v.iter_mut() {
        let sub = q * &row[k];
        row[c] -= sub;
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = BigInt::one();
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factors_i64(entries: &[Vec<i64>]) -> Vec<i64> {
        smith_normal_form(&SparseMat::from_dense(entries), false)
            .factors
            .iter()
            .map(|d| i64::try_from(d).unwrap())
            .collect()
    }

    #[test]
    fn two_by_two_with_torsion() {
        assert_eq!(factors_i64(&[vec![2, 4], vec![6, 8]]), vec![2, 4]);
    }

    #[test]
    fn identity_matrix() {
        assert_eq!(
            factors_i64(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]),
            vec![1, 1, 1]
        );
    }

    #[test]
    fn zero_matrix() {
        assert!(factors_i64(&[vec![0, 0], vec![0, 0]]).is_empty());
        assert!(smith_normal_form(&SparseMat::zero(0, 0), false)
            .factors
            .is_empty());
    }

    #[test]
    fn transforms_diagonalize() {
        let m = SparseMat::from_dense(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let snf = smith_normal_form(&m, true);
        let u = snf.u.unwrap();
        let v = snf.v.unwrap();
        // u * m * v must be diagonal with the invariant factors.
        let mut dense = vec![vec![BigInt::zero(); 3]; 3];
        for c in 0..3 {
            for &(r, val) in m.column(c) {
                dense[r][c] = BigInt::from(val);
            }
        }
        let prod = mat_mul(&mat_mul(&u, &dense), &v);
        for (i, row) in prod.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                if i == j && i < snf.factors.len() {
                    assert_eq!(entry, &snf.factors[i]);
                } else {
                    assert!(entry.is_zero(), "off-diagonal entry at ({i},{j})");
                }
            }
        }
        assert!(divisibility_chain_holds(&snf.factors));
    }

    fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
        let n = a.len();
        let m = b[0].len();
        let inner = b.len();
        let mut out = vec![vec![BigInt::zero(); m]; n];
        for i in 0..n {
            for j in 0..m {
                let mut acc = BigInt::zero();
                for (t, bt) in b.iter().enumerate().take(inner) {
                    acc += &a[i][t] * &bt[j];
                }
                out[i][j] = acc;
            }
        }
        out
    }

    #[test]
    fn mixed_sparse_dense_path() {
        // A matrix whose unit phase leaves a non-unit core.
        let m = SparseMat::from_dense(&[
            vec![1, 0, 0, 0],
            vec![0, 2, 4, 0],
            vec![0, 6, 8, 0],
            vec![0, 0, 0, 5],
        ]);
        let f = smith_normal_form(&m, false).factors;
        let ints: Vec<i64> = f.iter().map(|d| i64::try_from(d).unwrap()).collect();
        assert_eq!(ints, vec![1, 1, 2, 20]);
    }
}

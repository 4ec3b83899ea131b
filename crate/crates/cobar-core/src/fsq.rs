//! The cubical necklace model: words of nondegenerate beads carrying the
//! top chain of a cube, with the colimit differential and the explicit
//! isomorphism `phi` onto the cobar construction.
//!
//! A word with bead dimensions `(n_1, ..., n_k)` lives on a cube of
//! dimension `Σ(n_i - 1)`. Each bead contributes one cube coordinate per
//! inner vertex, ordered lexicographically by bead and then by local index.
//! The differential sends the top chain to its cubical boundary: at global
//! slot `s` the face on the `1` side is the splitting of the bead at that
//! inner vertex, the face on the `0` side is the inner face, and the slot
//! carries the sign `(-1)^{s+1}`. Raw faces are then reduced: degenerate
//! edge beads are deleted (their cube factor is a point), and a degenerate
//! bead of dimension >= 2 collapses the cube a dimension, so the transported
//! top chain is degenerate and the term dies.
//!
//! `phi` sends an edge bead `e` to `1 - [s^{-1}e]` and a bead of dimension
//! `n >= 2` to `(-1)^n [s^{-1}f]`, extended as an algebra map. These per-bead
//! signs are the unique assignment (up to global equivalence) under which
//! `phi` intertwines the two differentials above; the checks in
//! [`verify_phi`] pin them.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cobar::{
    chain_add, chain_mul, cobar_differential, word_basis, BeadOutcome, CobarChain, CobarError,
    CobarMonomial, Generators, TruncationPolicy,
};
use crate::chain::{IntegerComplex, SparseMat};
use std::collections::{BTreeMap, HashMap};

/// An ordered word of nondegenerate beads of dimension >= 1. The empty word
/// is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NecklaceWord(pub Vec<u32>);

impl NecklaceWord {
    pub fn unit() -> Self {
        NecklaceWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn cube_dim(&self, gens: &Generators) -> u32 {
        gens.word_degree(&self.0)
    }
}

/// `dim(T) = n_1 + ... + n_k - k`, with the empty word conventionally 0.
pub fn necklace_dim(dims: &[u32]) -> u32 {
    dims.iter().map(|&n| n - 1).sum()
}

/// An integer combination of necklace words.
pub type FsqChain = BTreeMap<NecklaceWord, i64>;

pub fn fsq_add(chain: &mut FsqChain, w: NecklaceWord, coeff: i64) {
    if coeff == 0 {
        return;
    }
    match chain.entry(w) {
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += coeff;
            if *e.get() == 0 {
                e.remove();
            }
        }
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(coeff);
        }
    }
}

/// Basis of cube dimension `n`: in bijection with the cobar basis by the
/// underlying word.
pub fn fsq_basis(
    gens: &Generators,
    degree: u32,
    policy: &TruncationPolicy,
) -> Result<Vec<NecklaceWord>, CobarError> {
    Ok(word_basis(gens, degree, policy)?
        .into_iter()
        .map(NecklaceWord)
        .collect())
}

/// Concatenation of bead lists; the unit word is a two-sided unit.
pub fn fsq_product(w1: &NecklaceWord, w2: &NecklaceWord) -> NecklaceWord {
    let mut beads = w1.0.clone();
    beads.extend_from_slice(&w2.0);
    NecklaceWord(beads)
}

/// One raw codimension-1 face of a word: the subword after reduction, or
/// `None` when a degenerate bead of dimension >= 2 kills the term.
fn reduced_subword(
    word: &[u32],
    pos: usize,
    replacement: &[BeadOutcome],
) -> Option<Vec<u32>> {
    let mut out = Vec::with_capacity(word.len() + 1);
    out.extend_from_slice(&word[..pos]);
    for b in replacement {
        match b {
            BeadOutcome::Bead(l) => out.push(*l),
            BeadOutcome::DegenerateEdge => {}
            BeadOutcome::DegenerateHigher => return None,
        }
    }
    out.extend_from_slice(&word[pos + 1..]);
    Some(out)
}

/// The colimit differential of a word. Terms longer than the policy bound
/// are dropped; note that deletion terms can also be shorter than the input,
/// so assembling a complex out of these columns takes care — see
/// [`fsq_complex`].
pub fn fsq_differential(
    w: &NecklaceWord,
    gens: &Generators,
    policy: &TruncationPolicy,
) -> FsqChain {
    let mut out = FsqChain::new();
    let len_cap = policy.max_length;
    let mut slot = 0u32;
    for (pos, &letter) in w.0.iter().enumerate() {
        let n = gens.dim(letter);
        for t in 1..n {
            slot += 1;
            let sign = if slot % 2 == 1 { 1 } else { -1 };
            let restriction = gens.restriction(letter, t);
            if let Some(word) =
                reduced_subword(&w.0, pos, &[restriction.front, restriction.back])
            {
                if len_cap.is_none_or(|cap| word.len() as u32 <= cap) {
                    fsq_add(&mut out, NecklaceWord(word), sign);
                }
            }
            if let Some(word) = reduced_subword(&w.0, pos, &[gens.inner_face(letter, t)]) {
                if len_cap.is_none_or(|cap| word.len() as u32 <= cap) {
                    fsq_add(&mut out, NecklaceWord(word), -sign);
                }
            }
        }
    }
    out
}

/// True when some differential term of some generator deletes a degenerate
/// edge bead, which makes the differential shorten words.
pub fn has_edge_deletions(gens: &Generators) -> bool {
    (0..gens.count() as u32).any(|letter| {
        (1..gens.dim(letter)).any(|t| {
            let r = gens.restriction(letter, t);
            r.front == BeadOutcome::DegenerateEdge
                || r.back == BeadOutcome::DegenerateEdge
                || gens.inner_face(letter, t) == BeadOutcome::DegenerateEdge
        })
    })
}

/// Assembles the truncated chain complex of the model.
///
/// The differential never shortens a word only when no generator's faces
/// collapse to degenerate edges; in that case (and when no length bound is
/// needed at all) the quotient by words longer than the policy bound is a
/// complex and is used directly. Otherwise the word-length quotient is not
/// closed under the differential, and the assembled complex is instead the
/// smallest monomial-spanned subcomplex containing every word within the
/// policy: the closure of those words under differential terms, which is
/// finite because total bead dimension never increases.
pub fn fsq_complex(
    gens: &Generators,
    policy: &TruncationPolicy,
) -> Result<IntegerComplex, CobarError> {
    let quotient_sound = policy.max_length.is_none() || !has_edge_deletions(gens);
    let untruncated = TruncationPolicy::new(policy.max_degree, None);
    let mut bases: Vec<Vec<NecklaceWord>> = Vec::new();
    if quotient_sound {
        for n in 0..=policy.max_degree {
            bases.push(fsq_basis(gens, n, policy)?);
        }
    } else {
        // Closure of the in-policy words under differential terms.
        let mut seen: std::collections::HashSet<NecklaceWord> = std::collections::HashSet::new();
        let mut queue: Vec<NecklaceWord> = Vec::new();
        for n in 0..=policy.max_degree {
            for w in fsq_basis(gens, n, policy)? {
                if seen.insert(w.clone()) {
                    queue.push(w);
                }
            }
        }
        while let Some(w) = queue.pop() {
            for t in fsq_differential(&w, gens, &untruncated).into_keys() {
                if seen.insert(t.clone()) {
                    queue.push(t);
                }
            }
        }
        bases = vec![Vec::new(); policy.max_degree as usize + 1];
        for w in seen {
            bases[w.cube_dim(gens) as usize].push(w);
        }
        for list in bases.iter_mut() {
            list.sort_by_key(|w| (w.len(), w.0.clone()));
        }
    }
    let labels: Vec<Vec<String>> = bases
        .iter()
        .map(|b| b.iter().map(|w| word_label(w, gens)).collect())
        .collect();
    let column_policy = if quotient_sound {
        *policy
    } else {
        untruncated
    };
    let mut boundaries = Vec::new();
    for n in 1..=policy.max_degree as usize {
        let index: HashMap<&NecklaceWord, usize> = bases[n - 1]
            .iter()
            .enumerate()
            .map(|(i, w)| (w, i))
            .collect();
        let mut cols = Vec::with_capacity(bases[n].len());
        for w in &bases[n] {
            let d = fsq_differential(w, gens, &column_policy);
            let mut col: Vec<(usize, i64)> = d.iter().map(|(t, &c)| (index[t], c)).collect();
            col.sort_unstable_by_key(|&(r, _)| r);
            cols.push(col);
        }
        boundaries.push(SparseMat::from_columns(bases[n - 1].len(), cols));
    }
    Ok(IntegerComplex::new(labels, boundaries).with_truncation(policy.truncation()))
}

pub fn word_label(w: &NecklaceWord, gens: &Generators) -> String {
    if w.is_empty() {
        "u".to_string()
    } else {
        let parts: Vec<&str> = w.0.iter().map(|&l| gens.name(l)).collect();
        format!("({})", parts.join("∨"))
    }
}

/// The image of a word under the dg-algebra isomorphism onto the cobar
/// construction.
pub fn phi(w: &NecklaceWord, gens: &Generators) -> CobarChain {
    let mut acc = CobarChain::new();
    chain_add(&mut acc, CobarMonomial::unit(), 1);
    for &bead in &w.0 {
        let mut image = CobarChain::new();
        let n = gens.dim(bead);
        if n == 1 {
            chain_add(&mut image, CobarMonomial::unit(), 1);
            chain_add(&mut image, CobarMonomial(vec![bead]), -1);
        } else {
            let sign = if n.is_multiple_of(2) { 1 } else { -1 };
            chain_add(&mut image, CobarMonomial(vec![bead]), sign);
        }
        acc = chain_mul(&acc, &image);
    }
    acc
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PhiReport {
    pub degrees_checked: u32,
    pub basis_sizes: Vec<(u32, usize)>,
    pub bijection_ok: bool,
    pub triangular_ok: bool,
    pub chain_map_ok: bool,
    pub algebra_pairs_checked: usize,
    pub algebra_ok: bool,
    pub failures: Vec<String>,
}

impl PhiReport {
    pub fn passed(&self) -> bool {
        self.bijection_ok && self.triangular_ok && self.chain_map_ok && self.algebra_ok
    }
}

/// Checks, degree by degree up to the policy bounds, that `phi` is a basis
/// bijection with unipotent triangularity, a chain map, and an algebra map
/// on seeded random word pairs.
pub fn verify_phi(
    gens: &Generators,
    policy: &TruncationPolicy,
    rng: &mut ChaCha8Rng,
    algebra_pairs: usize,
) -> Result<PhiReport, CobarError> {
    let mut report = PhiReport {
        bijection_ok: true,
        triangular_ok: true,
        chain_map_ok: true,
        algebra_ok: true,
        ..PhiReport::default()
    };
    let mut pool: Vec<NecklaceWord> = Vec::new();
    for n in 0..=policy.max_degree {
        let fsq = fsq_basis(gens, n, policy)?;
        let cob = crate::cobar::cobar_basis(gens, n, policy)?;
        report.basis_sizes.push((n, fsq.len()));
        if fsq.len() != cob.len()
            || fsq.iter().zip(&cob).any(|(w, m)| w.0 != m.0)
        {
            report.bijection_ok = false;
            report
                .failures
                .push(format!("bases differ in degree {n}"));
        }
        for w in &fsq {
            let image = phi(w, gens);
            // Triangularity: coefficient ±1 on the corresponding monomial,
            // everything else strictly shorter.
            let lead = image.get(&CobarMonomial(w.0.clone())).copied().unwrap_or(0);
            if lead.abs() != 1 {
                report.triangular_ok = false;
                report.failures.push(format!(
                    "phi({}) has diagonal coefficient {lead}",
                    word_label(w, gens)
                ));
            }
            for m in image.keys() {
                if m.0 != w.0 && m.len() >= w.len() {
                    report.triangular_ok = false;
                    report.failures.push(format!(
                        "phi({}) has a non-shorter off-diagonal term {}",
                        word_label(w, gens),
                        gens.monomial_label(m)
                    ));
                }
            }
            // Chain map, untruncated: each side of the identity is a finite
            // sum for a fixed word, and phi lowers length so it does not
            // descend to the length quotients; the identity itself lives in
            // the full algebras.
            let free = TruncationPolicy::new(policy.max_degree + 1, None);
            let mut lhs = CobarChain::new();
            for (t, &c) in fsq_differential(w, gens, &free).iter() {
                for (m, &cm) in phi(t, gens).iter() {
                    chain_add(&mut lhs, m.clone(), c * cm);
                }
            }
            let mut rhs = CobarChain::new();
            for (m, &cm) in image.iter() {
                for (t, &ct) in cobar_differential(m, gens, &free).iter() {
                    chain_add(&mut rhs, t.clone(), cm * ct);
                }
            }
            if lhs != rhs {
                report.chain_map_ok = false;
                report.failures.push(format!(
                    "phi fails the chain map identity on {}",
                    word_label(w, gens)
                ));
            }
        }
        pool.extend(fsq);
    }
    report.degrees_checked = policy.max_degree + 1;
    if pool.len() > 1 {
        for _ in 0..algebra_pairs {
            let w1 = &pool[rng.gen_range(0..pool.len())];
            let w2 = &pool[rng.gen_range(0..pool.len())];
            let lhs = phi(&fsq_product(w1, w2), gens);
            let rhs = chain_mul(&phi(w1, gens), &phi(w2, gens));
            report.algebra_pairs_checked += 1;
            if lhs != rhs {
                report.algebra_ok = false;
                report.failures.push(format!(
                    "phi fails multiplicativity on {} * {}",
                    word_label(w1, gens),
                    word_label(w2, gens)
                ));
            }
        }
    }
    Ok(report)
}

//! The cobar construction of the normalized chain coalgebra, as a dg algebra
//! on explicit truncated monomial bases.
//!
//! Generators are the nondegenerate simplices of dimension >= 1, desuspended
//! by one degree. On a generator the differential is
//! `-s^{-1}∂ + (s^{-1}⊗s^{-1})Δ̄`, extended to words as a derivation. The
//! sign conventions are fixed once here and validated by the `D² = 0` and
//! chain-map suites: the linear part contributes `-(-1)^i [d_i σ]`, the
//! quadratic part `(-1)^{i-1} [σ|_{[0..i]} | σ|_{[i..n]}]`, and the Leibniz
//! rule carries `(-1)^{degree of the prefix}`.
//!
//! Whenever the space has edges, every degree has infinite rank; all bases
//! and differentials are therefore taken in the quotient by words longer
//! than the policy's `max_length`, which is well defined because the
//! differential never shortens a word. The cobar functor is not invariant
//! under quasi-isomorphism of coalgebras, so none of these homology outputs
//! may be transported along mere quasi-isomorphisms of the input.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::chain::{IntegerComplex, SparseMat, Truncation};
use crate::space::{GenId, ReducedSimplicialSet, SimplexRef, SpaceError};

#[derive(Debug, Error)]
pub enum CobarError {
    #[error("unbounded word length is only allowed when the space has no nondegenerate edges")]
    UnboundedLength,
    #[error("degree {degree} exceeds the policy maximum {max}")]
    DegreeOutOfPolicy { degree: u32, max: u32 },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Degree and length bounds for truncated bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TruncationPolicy {
    pub max_degree: u32,
    pub max_length: Option<u32>,
}

impl TruncationPolicy {
    pub fn new(max_degree: u32, max_length: Option<u32>) -> Self {
        TruncationPolicy {
            max_degree,
            max_length,
        }
    }

    pub fn truncation(&self) -> Truncation {
        Truncation {
            max_degree: self.max_degree,
            max_length: self.max_length,
        }
    }
}

/// A monomial `[s^{-1}σ_1 | ... | s^{-1}σ_k]`, stored as generator indices.
/// The empty word is the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CobarMonomial(pub Vec<u32>);

impl CobarMonomial {
    pub fn unit() -> Self {
        CobarMonomial(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Multiplication is concatenation of monomials.
pub fn cobar_product(m1: &CobarMonomial, m2: &CobarMonomial) -> CobarMonomial {
    let mut word = m1.0.clone();
    word.extend_from_slice(&m2.0);
    CobarMonomial(word)
}

/// An integer combination of monomials.
pub type CobarChain = BTreeMap<CobarMonomial, i64>;

pub fn chain_add(chain: &mut CobarChain, m: CobarMonomial, coeff: i64) {
    if coeff == 0 {
        return;
    }
    match chain.entry(m) {
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

/// Product of two chains by bilinear concatenation.
pub fn chain_mul(a: &CobarChain, b: &CobarChain) -> CobarChain {
    let mut out = CobarChain::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            chain_add(&mut out, cobar_product(ma, mb), ca * cb);
        }
    }
    out
}

/// The generator alphabet of a space: its nondegenerate simplices of
/// dimension >= 1 in (dimension, input order), with cached differential data.
pub struct Generators {
    gens: Vec<GenId>,
    names: Vec<String>,
    dims: Vec<u32>,
    index: HashMap<GenId, u32>,
    /// Linear differential terms per generator: `(letter, coefficient)`.
    linear: Vec<Vec<(u32, i64)>>,
    /// Quadratic terms per generator: `(front, back, sign)`.
    quad: Vec<Vec<(u32, u32, i64)>>,
    /// Front/back splittings of each generator for the necklace side.
    restrictions: Vec<Vec<Restriction>>,
    inner_faces: Vec<Vec<BeadOutcome>>,
}

/// A front/back splitting of a bead, classified after normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub front: BeadOutcome,
    pub back: BeadOutcome,
}

/// What a restricted simplex becomes inside a necklace word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BeadOutcome {
    /// A nondegenerate simplex of dimension >= 1.
    Bead(u32),
    /// A degenerate edge; deleted from words, the class survives.
    DegenerateEdge,
    /// A degenerate simplex of dimension >= 2; kills the whole term.
    DegenerateHigher,
}

impl Generators {
    pub fn build(k: &ReducedSimplicialSet) -> Result<Self, SpaceError> {
        let mut gens = Vec::new();
        let mut names = Vec::new();
        let mut dims = Vec::new();
        let mut index = HashMap::new();
        for (gid, data) in k.iter_cells() {
            index.insert(gid, gens.len() as u32);
            gens.push(gid);
            names.push(data.id.clone());
            dims.push(gid.dim);
        }
        let mut this = Generators {
            gens,
            names,
            dims,
            index,
            linear: Vec::new(),
            quad: Vec::new(),
            restrictions: Vec::new(),
            inner_faces: Vec::new(),
        };
        for gi in 0..this.gens.len() {
            let gid = this.gens[gi];
            let n = gid.dim;
            let r = SimplexRef::nondegenerate(gid);
            let mut linear: Vec<(u32, i64)> = Vec::new();
            if n >= 2 {
                for i in 0..=n {
                    let face = k.apply_face(i, &r)?;
                    if face.is_degenerate() {
                        continue;
                    }
                    let letter = this.index[&face.base.expect("positive-dimensional face")];
                    let coeff = if i % 2 == 0 { -1 } else { 1 };
                    merge_term(&mut linear, letter, coeff);
                }
            }
            let mut quad = Vec::new();
            let mut restrictions = Vec::new();
            let mut inner = Vec::new();
            for i in 1..n {
                let (front, back) = k.front_back(&r, i)?;
                let fo = this.classify(&front);
                let bo = this.classify(&back);
                if let (BeadOutcome::Bead(f), BeadOutcome::Bead(b)) = (fo, bo) {
                    let sign = if (i - 1) % 2 == 0 { 1 } else { -1 };
                    quad.push((f, b, sign));
                }
                restrictions.push(Restriction {
                    front: fo,
                    back: bo,
                });
                let df = k.apply_face(i, &r)?;
                inner.push(this.classify(&df));
            }
            this.linear.push(linear);
            this.quad.push(quad);
            this.restrictions.push(restrictions);
            this.inner_faces.push(inner);
        }
        Ok(this)
    }

    fn classify(&self, r: &SimplexRef) -> BeadOutcome {
        if !r.is_degenerate() {
            BeadOutcome::Bead(self.index[&r.base.expect("dim >= 1 restriction")])
        } else if r.dim() == 1 {
            BeadOutcome::DegenerateEdge
        } else {
            BeadOutcome::DegenerateHigher
        }
    }

    pub fn count(&self) -> usize {
        self.gens.len()
    }

    pub fn dim(&self, letter: u32) -> u32 {
        self.dims[letter as usize]
    }

    /// Desuspended degree of a letter.
    pub fn degree(&self, letter: u32) -> u32 {
        self.dims[letter as usize] - 1
    }

    pub fn name(&self, letter: u32) -> &str {
        &self.names[letter as usize]
    }

    pub fn gen_id(&self, letter: u32) -> GenId {
        self.gens[letter as usize]
    }

    pub fn letter_of(&self, id: GenId) -> Option<u32> {
        self.index.get(&id).copied()
    }

    pub fn linear_terms(&self, letter: u32) -> &[(u32, i64)] {
        &self.linear[letter as usize]
    }

    pub fn quad_terms(&self, letter: u32) -> &[(u32, u32, i64)] {
        &self.quad[letter as usize]
    }

    pub fn restriction(&self, letter: u32, cut: u32) -> &Restriction {
        &self.restrictions[letter as usize][cut as usize - 1]
    }

    pub fn inner_face(&self, letter: u32, cut: u32) -> BeadOutcome {
        self.inner_faces[letter as usize][cut as usize - 1]
    }

    pub fn word_degree(&self, word: &[u32]) -> u32 {
        word.iter().map(|&l| self.degree(l)).sum()
    }

    pub fn has_edges(&self) -> bool {
        self.dims.contains(&1)
    }

    pub fn monomial_label(&self, m: &CobarMonomial) -> String {
        if m.is_empty() {
            "1".to_string()
        } else {
            let parts: Vec<&str> = m.0.iter().map(|&l| self.name(l)).collect();
            format!("[{}]", parts.join("|"))
        }
    }
}

fn merge_term(terms: &mut Vec<(u32, i64)>, letter: u32, coeff: i64) {
    for t in terms.iter_mut() {
        if t.0 == letter {
            t.1 += coeff;
            if t.1 == 0 {
                terms.retain(|t| t.1 != 0);
            }
            return;
        }
    }
    terms.push((letter, coeff));
}

/// Enumerates all words of the given degree with length within policy, in
/// canonical order: graded by length, then lexicographic in letter indices.
pub fn word_basis(
    gens: &Generators,
    degree: u32,
    policy: &TruncationPolicy,
) -> Result<Vec<Vec<u32>>, CobarError> {
    if degree > policy.max_degree {
        return Err(CobarError::DegreeOutOfPolicy {
            degree,
            max: policy.max_degree,
        });
    }
    let max_len = match policy.max_length {
        Some(l) => l,
        None => {
            if gens.has_edges() {
                return Err(CobarError::UnboundedLength);
            }
            // Every letter has desuspended degree >= 1.
            degree
        }
    };
    let max_letter_degree = (0..gens.count() as u32)
        .map(|l| gens.degree(l))
        .max()
        .unwrap_or(0);
    let mut out = Vec::new();
    let mut word: Vec<u32> = Vec::new();
    for len in 0..=max_len {
        extend_words(gens, degree, len, max_letter_degree, &mut word, &mut out);
    }
    Ok(out)
}

fn extend_words(
    gens: &Generators,
    remaining: u32,
    slots: u32,
    max_letter_degree: u32,
    word: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    if slots == 0 {
        if remaining == 0 {
            out.push(word.clone());
        }
        return;
    }
    if remaining > slots * max_letter_degree {
        return;
    }
    for l in 0..gens.count() as u32 {
        let d = gens.degree(l);
        if d > remaining {
            continue;
        }
        word.push(l);
        extend_words(gens, remaining - d, slots - 1, max_letter_degree, word, out);
        word.pop();
    }
}

/// The ordered basis of cobar degree `n`.
pub fn cobar_basis(
    gens: &Generators,
    degree: u32,
    policy: &TruncationPolicy,
) -> Result<Vec<CobarMonomial>, CobarError> {
    Ok(word_basis(gens, degree, policy)?
        .into_iter()
        .map(CobarMonomial)
        .collect())
}

/// The differential of a monomial, in the quotient by words longer than the
/// policy length.
pub fn cobar_differential(
    m: &CobarMonomial,
    gens: &Generators,
    policy: &TruncationPolicy,
) -> CobarChain {
    let mut out = CobarChain::new();
    let len_cap = policy.max_length;
    let mut prefix_degree = 0u32;
    for (pos, &letter) in m.0.iter().enumerate() {
        let koszul = if prefix_degree.is_multiple_of(2) { 1 } else { -1 };
        for &(l, c) in gens.linear_terms(letter) {
            let mut word = m.0.clone();
            word[pos] = l;
            chain_add(&mut out, CobarMonomial(word), koszul * c);
        }
        if len_cap.is_none_or(|cap| (m.len() as u32) < cap) {
            for &(f, b, c) in gens.quad_terms(letter) {
                let mut word = Vec::with_capacity(m.len() + 1);
                word.extend_from_slice(&m.0[..pos]);
                word.push(f);
                word.push(b);
                word.extend_from_slice(&m.0[pos + 1..]);
                chain_add(&mut out, CobarMonomial(word), koszul * c);
            }
        }
        prefix_degree += gens.degree(letter);
    }
    out
}

/// Assembles bases and boundary matrices for degrees `0 ..= max_degree`.
pub fn cobar_complex(
    k: &ReducedSimplicialSet,
    policy: &TruncationPolicy,
) -> Result<IntegerComplex, CobarError> {
    let gens = Generators::build(k)?;
    cobar_complex_with(&gens, policy)
}

pub fn cobar_complex_with(
    gens: &Generators,
    policy: &TruncationPolicy,
) -> Result<IntegerComplex, CobarError> {
    let mut bases: Vec<Vec<CobarMonomial>> = Vec::new();
    for n in 0..=policy.max_degree {
        bases.push(cobar_basis(gens, n, policy)?);
    }
    let labels: Vec<Vec<String>> = bases
        .iter()
        .map(|b| b.iter().map(|m| gens.monomial_label(m)).collect())
        .collect();
    let mut boundaries = Vec::new();
    for n in 1..=policy.max_degree as usize {
        let index: HashMap<&CobarMonomial, usize> = bases[n - 1]
            .iter()
            .enumerate()
            .map(|(i, m)| (m, i))
            .collect();
        let mut cols = Vec::with_capacity(bases[n].len());
        for m in &bases[n] {
            let d = cobar_differential(m, gens, policy);
            let mut col: Vec<(usize, i64)> = d.iter().map(|(t, &c)| (index[t], c)).collect();
            col.sort_unstable_by_key(|&(r, _)| r);
            cols.push(col);
        }
        boundaries.push(SparseMat::from_columns(bases[n - 1].len(), cols));
    }
    Ok(IntegerComplex::new(labels, boundaries).with_truncation(policy.truncation()))
}

// ---------------------------------------------------------------------------
// Degree-zero ring presentation
// ---------------------------------------------------------------------------

/// Generators and relations of the degree-zero cobar ring, in both raw and
/// monoid (`Ahat_e := 1 - A_e`) form.
#[derive(Clone, Debug, Serialize)]
pub struct H0Presentation {
    pub generators: Vec<String>,
    pub relations_raw: Vec<String>,
    pub relations_monoid: Vec<String>,
}

/// One generator `A_e` per nondegenerate edge and one relation per
/// nondegenerate 2-simplex, read off from the vanishing of its cobar
/// differential. In monoid form every relation becomes
/// `Ahat_{d_1} = Ahat_{d_2} * Ahat_{d_0}` with degenerate faces contributing
/// the unit.
pub fn h0_ring_presentation(k: &ReducedSimplicialSet) -> Result<H0Presentation, SpaceError> {
    let mut generators = Vec::new();
    for s in k.simplices(1) {
        generators.push(format!("A_{}", s.id));
    }
    let mut relations_raw = Vec::new();
    let mut relations_monoid = Vec::new();
    for (gid, data) in k.iter_cells() {
        if gid.dim != 2 {
            continue;
        }
        let r = SimplexRef::nondegenerate(gid);
        let d0 = k.apply_face(0, &r)?;
        let d1 = k.apply_face(1, &r)?;
        let d2 = k.apply_face(2, &r)?;
        let name = |f: &SimplexRef| -> Option<String> {
            if f.is_degenerate() {
                None
            } else {
                Some(k.simplex(f.base.expect("edge")).id.clone())
            }
        };
        let (a, b, c) = (name(&d2), name(&d0), name(&d1));
        // Raw form: A_c = A_a + A_b - A_a*A_b with degenerate entries zero.
        let lhs = c.as_ref().map_or("0".to_string(), |e| format!("A_{e}"));
        let mut rhs = String::new();
        if let Some(e) = &a {
            rhs.push_str(&format!("A_{e}"));
        }
        if let Some(e) = &b {
            if !rhs.is_empty() {
                rhs.push_str(" + ");
            }
            rhs.push_str(&format!("A_{e}"));
        }
        if let (Some(ea), Some(eb)) = (&a, &b) {
            rhs.push_str(&format!(" - A_{ea}*A_{eb}"));
        }
        if rhs.is_empty() {
            rhs.push('0');
        }
        relations_raw.push(format!("{lhs} = {rhs}  [from {}]", data.id));
        // Monoid form.
        let hat =
            |e: &Option<String>| -> String { e.as_ref().map_or("1".to_string(), |x| format!("Ahat_{x}")) };
        let lhs_m = hat(&c);
        let rhs_m = match (&a, &b) {
            (None, None) => "1".to_string(),
            (Some(_), None) => hat(&a),
            (None, Some(_)) => hat(&b),
            (Some(_), Some(_)) => format!("{} * {}", hat(&a), hat(&b)),
        };
        if lhs_m == "1" && rhs_m == "1" {
            continue;
        }
        let rendered = if lhs_m == "1" {
            format!("{rhs_m} = 1")
        } else {
            format!("{lhs_m} = {rhs_m}")
        };
        relations_monoid.push(rendered);
    }
    Ok(H0Presentation {
        generators,
        relations_raw,
        relations_monoid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::builtin_space;

    fn policy(n: u32, l: Option<u32>) -> TruncationPolicy {
        TruncationPolicy::new(n, l)
    }

    fn chain_of(pairs: &[(&[u32], i64)]) -> CobarChain {
        let mut c = CobarChain::new();
        for (w, coeff) in pairs {
            chain_add(&mut c, CobarMonomial(w.to_vec()), *coeff);
        }
        c
    }

    #[test]
    fn sphere_basis_is_one_per_degree() {
        let k = builtin_space("sphere:2").unwrap();
        let gens = Generators::build(&k).unwrap();
        let p = policy(6, None);
        let b3 = cobar_basis(&gens, 3, &p).unwrap();
        assert_eq!(b3, vec![CobarMonomial(vec![0, 0, 0])]);
        for n in 0..=6 {
            assert_eq!(cobar_basis(&gens, n, &p).unwrap().len(), 1, "degree {n}");
        }
    }

    #[test]
    fn unit_basis_at_length_zero() {
        let k = builtin_space("torus").unwrap();
        let gens = Generators::build(&k).unwrap();
        let b = cobar_basis(&gens, 0, &policy(0, Some(0))).unwrap();
        assert_eq!(b, vec![CobarMonomial::unit()]);
    }

    #[test]
    fn wedge_words_of_length_two() {
        let k = builtin_space("wedge-circles:2").unwrap();
        let gens = Generators::build(&k).unwrap();
        let b = cobar_basis(&gens, 0, &policy(0, Some(2))).unwrap();
        let rendered: Vec<String> = b.iter().map(|m| gens.monomial_label(m)).collect();
        assert_eq!(
            rendered,
            vec!["1", "[a]", "[b]", "[a|a]", "[a|b]", "[b|a]", "[b|b]"]
        );
    }

    #[test]
    fn unbounded_length_needs_no_edges() {
        let k = builtin_space("wedge-circles:1").unwrap();
        let gens = Generators::build(&k).unwrap();
        assert!(matches!(
            cobar_basis(&gens, 0, &policy(0, None)),
            Err(CobarError::UnboundedLength)
        ));
    }

    #[test]
    fn differential_vanishes_on_sphere_generator() {
        let k = builtin_space("sphere:2").unwrap();
        let gens = Generators::build(&k).unwrap();
        let d = cobar_differential(&CobarMonomial(vec![0]), &gens, &policy(6, None));
        assert!(d.is_empty());
    }

    #[test]
    fn differential_of_torus_triangle() {
        let k = builtin_space("torus").unwrap();
        let gens = Generators::build(&k).unwrap();
        let a = gens.letter_of(k.lookup("a").unwrap()).unwrap();
        let b = gens.letter_of(k.lookup("b").unwrap()).unwrap();
        let c = gens.letter_of(k.lookup("c").unwrap()).unwrap();
        let p = gens.letter_of(k.lookup("p").unwrap()).unwrap();
        let d = cobar_differential(&CobarMonomial(vec![p]), &gens, &policy(8, Some(8)));
        let expected = chain_of(&[(&[b], -1), (&[c], 1), (&[a], -1), (&[a, b], 1)]);
        assert_eq!(d, expected);
    }

    #[test]
    fn differential_of_rp2_triangle() {
        let k = builtin_space("rp2").unwrap();
        let gens = Generators::build(&k).unwrap();
        let a = gens.letter_of(k.lookup("a").unwrap()).unwrap();
        let s = gens.letter_of(k.lookup("s").unwrap()).unwrap();
        let d = cobar_differential(&CobarMonomial(vec![s]), &gens, &policy(8, Some(8)));
        let expected = chain_of(&[(&[a], -2), (&[a, a], 1)]);
        assert_eq!(d, expected);
    }

    #[test]
    fn complex_ranks_of_spheres() {
        let k3 = builtin_space("sphere:3").unwrap();
        let c3 = cobar_complex(&k3, &policy(6, None)).unwrap();
        let ranks: Vec<usize> = (0..=6).map(|n| c3.rank(n)).collect();
        assert_eq!(ranks, vec![1, 0, 1, 0, 1, 0, 1]);

        let k2 = builtin_space("sphere:2").unwrap();
        let c2 = cobar_complex(&k2, &policy(6, None)).unwrap();
        let ranks: Vec<usize> = (0..=6).map(|n| c2.rank(n)).collect();
        assert_eq!(ranks, vec![1; 7]);
    }

    #[test]
    fn torus_complex_verifies() {
        let k = builtin_space("torus").unwrap();
        let c = cobar_complex(&k, &policy(2, Some(4))).unwrap();
        assert!(crate::chain::verify_complex(&c).passed());
    }

    #[test]
    fn product_is_concatenation() {
        let m1 = CobarMonomial(vec![0]);
        let m2 = CobarMonomial(vec![1]);
        assert_eq!(cobar_product(&m1, &m2), CobarMonomial(vec![0, 1]));
        assert_eq!(cobar_product(&CobarMonomial::unit(), &m1), m1);
        let m3 = CobarMonomial(vec![2]);
        assert_eq!(
            cobar_product(&cobar_product(&m1, &m2), &m3),
            cobar_product(&m1, &cobar_product(&m2, &m3))
        );
    }

    #[test]
    fn h0_presentations_of_builtins() {
        let wedge = builtin_space("wedge-circles:2").unwrap();
        let p = h0_ring_presentation(&wedge).unwrap();
        assert_eq!(p.generators, vec!["A_a", "A_b"]);
        assert!(p.relations_monoid.is_empty());

        let torus = builtin_space("torus").unwrap();
        let p = h0_ring_presentation(&torus).unwrap();
        assert_eq!(
            p.relations_monoid,
            vec!["Ahat_c = Ahat_a * Ahat_b", "Ahat_c = Ahat_b * Ahat_a"]
        );

        let rp2 = builtin_space("rp2").unwrap();
        let p = h0_ring_presentation(&rp2).unwrap();
        assert_eq!(p.relations_monoid, vec!["Ahat_a * Ahat_a = 1"]);
    }
}

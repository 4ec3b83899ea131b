//! A finite truncated chain model of the rigidification mapping monoid,
//! presented as a colimit of cubes over necklace words, with the comparison
//! map `psi` onto it.
//!
//! Generators are pairs (totally nondegenerate word, nondegenerate simplex
//! of its cube). Identifications are generated by the codimension-1 necklace
//! inclusions realized as cubical face inclusions: for every word, every
//! cube slot and both sides, each simplex on that facet is glued to its
//! preimage in the facet's word. Facet words with degenerate beads are
//! rewritten on the fly: a degenerate edge bead is deleted (its cube block
//! is empty), and a degenerate bead of dimension >= 2 collapses one cube
//! coordinate, merging or dropping bits of every vertex; a simplex whose
//! image acquires repeated vertices lands in the degenerate subcomplex and
//! its whole class is zero.
//!
//! Identifications whose target word exceeds the length bound cannot be
//! applied; they are counted and the orphaned classes flagged, so homology
//! in degrees touching the frontier is reported as provisional rather than
//! silently wrong.

use std::collections::HashMap;

use serde::Serialize;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::chain::{homology, IntegerComplex, SparseMat, Truncation};
use crate::cobar::{CobarError, Generators, TruncationPolicy};
use crate::cube::{cube_simplices, ez_power, ez_shuffle, CubeChain, CubeSimplex};
use crate::fsq::{fsq_basis, fsq_complex, fsq_differential, word_label, NecklaceWord};
use crate::space::{ReducedSimplicialSet, SimplexRef};

/// All totally nondegenerate words with `cube_dim <= max_cube_dim` and
/// length within policy, ordered by cube dimension then canonically.
pub fn enumerate_necklace_maps(
    gens: &Generators,
    max_cube_dim: u32,
    policy: &TruncationPolicy,
) -> Result<Vec<NecklaceWord>, CobarError> {
    let p = TruncationPolicy::new(max_cube_dim, policy.max_length);
    let mut out = Vec::new();
    for n in 0..=max_cube_dim {
        out.extend(fsq_basis(gens, n, &p)?);
    }
    Ok(out)
}

/// The truncated colimit chain complex alone, over words of cube dimension
/// at most `max_degree + 2`. Use [`RigidModel::build`] directly to keep the
/// identification bookkeeping and frontier flags.
pub fn rigid_chain_complex(
    k: &ReducedSimplicialSet,
    gens: &Generators,
    max_degree: u32,
    policy: &TruncationPolicy,
) -> Result<IntegerComplex, CobarError> {
    Ok(RigidModel::build(k, gens, max_degree, max_degree + 2, policy)?.complex)
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller id wins so representatives are canonical.
            if ra < rb {
                self.parent[rb as usize] = ra;
            } else {
                self.parent[ra as usize] = rb;
            }
        }
    }
}

/// An integer chain on the classes of the rigid complex, keyed by
/// `(degree, index in the degree basis)`.
pub type RigidChain = std::collections::BTreeMap<(u32, u32), i64>;

fn rigid_add(chain: &mut RigidChain, key: (u32, u32), coeff: i64) {
    if coeff == 0 {
        return;
    }
    let slot = chain.entry(key).or_insert(0);
    *slot += coeff;
    if *slot == 0 {
        chain.remove(&key);
    }
}

/// Cached simplices of one cube dimension with position lookup.
struct CubeTable {
    by_degree: Vec<Vec<CubeSimplex>>,
    index: Vec<HashMap<Vec<u32>, u32>>,
}

impl CubeTable {
    fn build(cube_dim: u32, max_degree: u32) -> Self {
        let by_degree = cube_simplices(cube_dim, max_degree);
        let index = by_degree
            .iter()
            .map(|list| {
                list.iter()
                    .enumerate()
                    .map(|(i, s)| (s.vertices.clone(), i as u32))
                    .collect()
            })
            .collect();
        CubeTable { by_degree, index }
    }
}

/// Where a (word, simplex) pair ends up after identification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassRef {
    Class { degree: u32, index: u32 },
    Degenerate,
}

/// The truncated chain model with its identification bookkeeping.
pub struct RigidModel {
    pub max_degree: u32,
    pub cube_cap: u32,
    pub max_length: Option<u32>,
    words: Vec<NecklaceWord>,
    word_index: HashMap<NecklaceWord, u32>,
    cube_dims: Vec<u32>,
    /// Global id layout: `offsets[w][d]` is the first id of the degree-`d`
    /// simplices of word `w`.
    offsets: Vec<Vec<u32>>,
    word_base: Vec<u32>,
    roots: Vec<ClassInfo>,
    root_of: Vec<u32>,
    /// Per degree, the class representatives in basis order.
    bases: Vec<Vec<u32>>,
    tables: HashMap<u32, CubeTable>,
    pub complex: IntegerComplex,
    /// Classes orphaned by identifications that left the enumeration.
    pub dropped_identifications: usize,
    flagged: Vec<bool>,
    pub degree_flags: Vec<bool>,
}

#[derive(Clone, Copy)]
enum ClassInfo {
    Alive { degree: u32, index: u32 },
    Dead,
    NotRoot,
}

impl RigidModel {
    /// Builds the model over all words with `cube_dim <= cube_cap` and
    /// length within the policy, keeping cube simplices of degree
    /// `<= max_degree`.
    pub fn build(
        k: &ReducedSimplicialSet,
        gens: &Generators,
        max_degree: u32,
        cube_cap: u32,
        policy: &TruncationPolicy,
    ) -> Result<RigidModel, CobarError> {
        let words = enumerate_necklace_maps(gens, cube_cap, policy)?;
        let word_index: HashMap<NecklaceWord, u32> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        let cube_dims: Vec<u32> = words.iter().map(|w| w.cube_dim(gens)).collect();
        let mut tables: HashMap<u32, CubeTable> = HashMap::new();
        for &d in &cube_dims {
            tables
                .entry(d)
                .or_insert_with(|| CubeTable::build(d, max_degree));
            // Facet tables one dimension down drive the identifications.
            if d >= 1 {
                tables
                    .entry(d - 1)
                    .or_insert_with(|| CubeTable::build(d - 1, max_degree));
            }
        }

        // Global id layout.
        let mut offsets: Vec<Vec<u32>> = Vec::with_capacity(words.len());
        let mut degrees_of: Vec<u32> = Vec::new();
        let mut next = 0u32;
        for (wi, _) in words.iter().enumerate() {
            let table = &tables[&cube_dims[wi]];
            let mut word_offsets = Vec::with_capacity(table.by_degree.len());
            for (d, list) in table.by_degree.iter().enumerate() {
                word_offsets.push(next);
                next += list.len() as u32;
                degrees_of.extend(std::iter::repeat_n(d as u32, list.len()));
            }
            offsets.push(word_offsets);
        }
        let word_base: Vec<u32> = offsets.iter().map(|o| o[0]).collect();
        let total = next as usize;
        let dead = total as u32;
        let mut uf = UnionFind::new(total + 1);

        let gid = |wi: u32, verts: &Vec<u32>| -> u32 {
            let d = verts.len() - 1;
            let table = &tables[&cube_dims[wi as usize]];
            offsets[wi as usize][d] + table.index[d][verts]
        };

        // Restriction cache keyed by (letter, cut).
        let mut restriction_refs: Vec<Vec<(SimplexRef, SimplexRef, SimplexRef)>> = Vec::new();
        for letter in 0..gens.count() as u32 {
            let n = gens.dim(letter);
            let r = SimplexRef::nondegenerate(gens.gen_id(letter));
            let mut per_cut = Vec::new();
            for t in 1..n {
                let (front, back) = k.front_back(&r, t).map_err(CobarError::Space)?;
                let inner = k.apply_face(t, &r).map_err(CobarError::Space)?;
                per_cut.push((front, back, inner));
            }
            restriction_refs.push(per_cut);
        }

        let mut dropped: Vec<u32> = Vec::new();
        for (wi, word) in words.iter().enumerate() {
            let d = cube_dims[wi];
            if d == 0 {
                continue;
            }
            let facet_table = &tables[&(d - 1)];
            let mut slot = 0u32;
            for (pos, &letter) in word.0.iter().enumerate() {
                let n = gens.dim(letter);
                for t in 1..n {
                    slot += 1;
                    let bit = slot - 1;
                    let (front, back, inner) =
                        restriction_refs[letter as usize][t as usize - 1].clone();
                    for side in [1u32, 0u32] {
                        let mut raw: Vec<SimplexRef> = Vec::with_capacity(word.len() + 1);
                        for &l in &word.0[..pos] {
                            raw.push(SimplexRef::nondegenerate(gens.gen_id(l)));
                        }
                        if side == 1 {
                            raw.push(front.clone());
                            raw.push(back.clone());
                        } else {
                            raw.push(inner.clone());
                        }
                        for &l in &word.0[pos + 1..] {
                            raw.push(SimplexRef::nondegenerate(gens.gen_id(l)));
                        }
                        for facet_list in &facet_table.by_degree {
                            for sub in facet_list {
                                let img: Vec<u32> = sub
                                    .vertices
                                    .iter()
                                    .map(|&v| insert_bit(v, bit, side))
                                    .collect();
                                let a = gid(wi as u32, &img);
                                match transport(gens, raw.clone(), sub.vertices.clone()) {
                                    Transported::Degenerate => uf.union(a, dead),
                                    Transported::Word(letters, verts) => {
                                        match word_index.get(&NecklaceWord(letters)) {
                                            Some(&wj) => uf.union(a, gid(wj, &verts)),
                                            None => dropped.push(a),
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }

        // Collect classes: canonical representative is the smallest global
        // id; a class touching the degenerate sink is zero.
        let dead_root = uf.find(dead);
        let mut root_of: Vec<u32> = Vec::with_capacity(total);
        for i in 0..total as u32 {
            root_of.push(uf.find(i));
        }
        let mut min_member: HashMap<u32, u32> = HashMap::new();
        for i in 0..total as u32 {
            min_member.entry(root_of[i as usize]).or_insert(i);
        }
        let mut bases: Vec<Vec<u32>> = vec![Vec::new(); max_degree as usize + 1];
        for i in 0..total as u32 {
            let r = root_of[i as usize];
            if r == dead_root || min_member[&r] != i {
                continue;
            }
            bases[degrees_of[i as usize] as usize].push(i);
        }
        for list in &mut bases {
            list.sort_unstable();
        }
        let mut roots: Vec<ClassInfo> = vec![ClassInfo::NotRoot; total];
        for (deg, list) in bases.iter().enumerate() {
            for (idx, &rep) in list.iter().enumerate() {
                roots[root_of[rep as usize] as usize] = ClassInfo::Alive {
                    degree: deg as u32,
                    index: idx as u32,
                };
            }
        }
        if (dead_root as usize) < total {
            roots[dead_root as usize] = ClassInfo::Dead;
        }

        let class_slot = |g: u32| -> Option<(u32, u32)> {
            match roots[root_of[g as usize] as usize] {
                ClassInfo::Alive { degree, index } => Some((degree, index)),
                ClassInfo::Dead => None,
                ClassInfo::NotRoot => unreachable!("non-root stored as class info"),
            }
        };
        let decode = |g: u32| -> (u32, Vec<u32>) {
            let wi = word_base.partition_point(|&b| b <= g) - 1;
            let word_offsets = &offsets[wi];
            let mut deg = word_offsets.len() - 1;
            while word_offsets[deg] > g {
                deg -= 1;
            }
            let pos = (g - word_offsets[deg]) as usize;
            let table = &tables[&cube_dims[wi]];
            (wi as u32, table.by_degree[deg][pos].vertices.clone())
        };

        // Frontier flags: orphaned endpoints of dropped identifications.
        let flat_base: Vec<usize> = bases
            .iter()
            .scan(0usize, |acc, b| {
                let start = *acc;
                *acc += b.len();
                Some(start)
            })
            .collect();
        let total_classes: usize = bases.iter().map(|b| b.len()).sum();
        let mut flagged = vec![false; total_classes];
        let mut degree_flags = vec![false; max_degree as usize + 1];
        for &g in &dropped {
            if let Some((deg, idx)) = class_slot(g) {
                flagged[flat_base[deg as usize] + idx as usize] = true;
                degree_flags[deg as usize] = true;
            }
        }

        // Boundary matrices on class representatives.
        let mut boundaries = Vec::new();
        for deg in 1..=max_degree as usize {
            let rows = bases[deg - 1].len();
            let mut cols = Vec::with_capacity(bases[deg].len());
            for &rep in &bases[deg] {
                let (wi, verts) = decode(rep);
                let mut col: HashMap<u32, i64> = HashMap::new();
                for i in 0..verts.len() {
                    let mut face = verts.clone();
                    face.remove(i);
                    if let Some((fd, fidx)) = class_slot(gid(wi, &face)) {
                        debug_assert_eq!(fd as usize, deg - 1);
                        let sign = if i % 2 == 0 { 1 } else { -1 };
                        *col.entry(fidx).or_insert(0) += sign;
                    }
                }
                let mut entries: Vec<(usize, i64)> = col
                    .into_iter()
                    .filter(|&(_, c)| c != 0)
                    .map(|(r, c)| (r as usize, c))
                    .collect();
                entries.sort_unstable_by_key(|&(r, _)| r);
                cols.push(entries);
            }
            boundaries.push(SparseMat::from_columns(rows, cols));
        }
        let labels: Vec<Vec<String>> = bases
            .iter()
            .map(|list| {
                list.iter()
                    .map(|&rep| {
                        let (wi, verts) = decode(rep);
                        let s = CubeSimplex {
                            cube_dim: cube_dims[wi as usize],
                            vertices: verts,
                        };
                        format!("{}@{}", word_label(&words[wi as usize], gens), s.label())
                    })
                    .collect()
            })
            .collect();
        let complex = IntegerComplex::new(labels, boundaries).with_truncation(Truncation {
            max_degree,
            max_length: policy.max_length,
        });
        Ok(RigidModel {
            max_degree,
            cube_cap,
            max_length: policy.max_length,
            words,
            word_index,
            cube_dims,
            offsets,
            word_base,
            roots,
            root_of,
            bases,
            tables,
            complex,
            dropped_identifications: dropped.len(),
            flagged,
            degree_flags,
        })
    }

    fn flat_index(&self, degree: u32, index: u32) -> usize {
        self.bases[..degree as usize]
            .iter()
            .map(|b| b.len())
            .sum::<usize>()
            + index as usize
    }

    /// Whether a class was orphaned by a truncated identification.
    pub fn class_flagged(&self, degree: u32, index: u32) -> bool {
        self.flagged[self.flat_index(degree, index)]
    }

    fn class_slot(&self, g: u32) -> Option<(u32, u32)> {
        match self.roots[self.root_of[g as usize] as usize] {
            ClassInfo::Alive { degree, index } => Some((degree, index)),
            ClassInfo::Dead => None,
            ClassInfo::NotRoot => unreachable!("non-root stored as class info"),
        }
    }

    fn gid(&self, wi: u32, verts: &Vec<u32>) -> u32 {
        let d = verts.len() - 1;
        let table = &self.tables[&self.cube_dims[wi as usize]];
        self.offsets[wi as usize][d] + table.index[d][verts]
    }

    fn decode(&self, g: u32) -> (u32, Vec<u32>) {
        let wi = self.word_base.partition_point(|&b| b <= g) - 1;
        let word_offsets = &self.offsets[wi];
        let mut deg = word_offsets.len() - 1;
        while word_offsets[deg] > g {
            deg -= 1;
        }
        let pos = (g - word_offsets[deg]) as usize;
        let table = &self.tables[&self.cube_dims[wi]];
        (wi as u32, table.by_degree[deg][pos].vertices.clone())
    }
}

fn insert_bit(v: u32, bit: u32, value: u32) -> u32 {
    let low = v & ((1 << bit) - 1);
    let high = v >> bit;
    low | (value << bit) | (high << (bit + 1))
}

fn remove_bit(v: u32, bit: u32) -> u32 {
    let low = v & ((1 << bit) - 1);
    let high = v >> (bit + 1);
    low | (high << bit)
}

enum Transported {
    Word(Vec<u32>, Vec<u32>),
    Degenerate,
}

/// Reduces a raw word (beads possibly degenerate) and transports a vertex
/// chain on its cube through the collapse maps.
fn transport(gens: &Generators, mut raw: Vec<SimplexRef>, mut verts: Vec<u32>) -> Transported {
    loop {
        let mut changed = false;
        let mut offset = 0u32;
        for i in 0..raw.len() {
            let dim = raw[i].dim();
            if !raw[i].is_degenerate() {
                offset += dim - 1;
                continue;
            }
            if dim == 1 {
                // A degenerate edge bead has no cube coordinates; delete it.
                raw.remove(i);
            } else {
                // Strip the outermost degeneracy s_j and collapse the
                // corresponding cube coordinates.
                let j = raw[i].degeneracies[0];
                let m = dim;
                let inner = SimplexRef {
                    degeneracies: raw[i].degeneracies[1..].to_vec(),
                    base: raw[i].base,
                };
                raw[i] = inner;
                if j == 0 {
                    let bit = offset;
                    for v in verts.iter_mut() {
                        *v = remove_bit(*v, bit);
                    }
                } else if j == m - 1 {
                    let bit = offset + m - 2;
                    for v in verts.iter_mut() {
                        *v = remove_bit(*v, bit);
                    }
                } else {
                    // Merge local coordinates j and j+1 (bits offset+j-1 and
                    // offset+j) by maximum.
                    let lo = offset + j - 1;
                    for v in verts.iter_mut() {
                        let merged = ((*v >> lo) | (*v >> (lo + 1))) & 1;
                        let cleared = (*v & !(1 << lo)) | (merged << lo);
                        *v = remove_bit(cleared, lo + 1);
                    }
                }
                if verts.windows(2).any(|w| w[0] == w[1]) {
                    return Transported::Degenerate;
                }
            }
            changed = true;
            break;
        }
        if !changed {
            break;
        }
    }
    let letters: Vec<u32> = raw
        .iter()
        .map(|r| {
            gens.letter_of(r.base.expect("nondegenerate bead"))
                .expect("bead is a generator")
        })
        .collect();
    Transported::Word(letters, verts)
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeComparison {
    pub degree: u32,
    pub rigid_free_rank: usize,
    pub rigid_torsion: Vec<i64>,
    pub fsq_free_rank: usize,
    pub fsq_torsion: Vec<i64>,
    pub provisional: bool,
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PsiReport {
    pub words_checked: usize,
    pub chain_map_ok: bool,
    pub chain_map_skipped: usize,
    pub product_pairs_checked: usize,
    pub product_direct_ok: bool,
    pub product_reversed_ok: bool,
    pub homology: Vec<DegreeComparison>,
    pub dropped_identifications: usize,
    pub failures: Vec<String>,
}

impl PsiReport {
    pub fn passed(&self) -> bool {
        self.chain_map_ok
            && (self.product_direct_ok || self.product_reversed_ok)
            && self
                .homology
                .iter()
                .all(|d| d.agrees || d.provisional)
    }
}

/// The comparison map: a word goes to the shuffle power of the interval
/// generator on its own cube, expressed in class representatives.
pub fn psi(w: &NecklaceWord, gens: &Generators, model: &RigidModel) -> Option<RigidChain> {
    let wi = *model.word_index.get(w)?;
    let n = w.cube_dim(gens);
    if n > model.max_degree {
        return None;
    }
    let power = ez_power(n);
    Some(model.chain_from_cube(wi, &power))
}

impl RigidModel {
    fn chain_from_cube(&self, wi: u32, chain: &CubeChain) -> RigidChain {
        let mut out = RigidChain::new();
        for (verts, &coeff) in chain.terms() {
            if let Some(key) = self.class_slot(self.gid(wi, verts)) {
                rigid_add(&mut out, key, coeff);
            }
        }
        out
    }

    /// Boundary of a chain of classes, computed on representatives.
    pub fn boundary_chain(&self, chain: &RigidChain) -> RigidChain {
        let mut out = RigidChain::new();
        for (&(deg, idx), &coeff) in chain {
            if deg == 0 {
                continue;
            }
            let rep = self.bases[deg as usize][idx as usize];
            let (wi, verts) = self.decode(rep);
            for i in 0..verts.len() {
                let mut face = verts.clone();
                face.remove(i);
                if let Some(key) = self.class_slot(self.gid(wi, &face)) {
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    rigid_add(&mut out, key, coeff * sign);
                }
            }
        }
        out
    }

    /// The product `[w1, c1] · [w2, c2] = [w1 ∨ w2, c1 × c2]` on cube
    /// chains, in class representatives. `None` when the concatenated word
    /// leaves the enumeration.
    pub fn product_chain(
        &self,
        w1: &NecklaceWord,
        c1: &CubeChain,
        w2: &NecklaceWord,
        c2: &CubeChain,
    ) -> Option<RigidChain> {
        let target = crate::fsq::fsq_product(w1, w2);
        let wi = *self.word_index.get(&target)?;
        let prod = ez_shuffle(c1, c2);
        Some(self.chain_from_cube(wi, &prod))
    }

    pub fn word_flagged(&self, w: &NecklaceWord) -> bool {
        match self.word_index.get(w) {
            None => true,
            Some(&wi) => {
                if let Some(l) = self.max_length {
                    self.words[wi as usize].len() as u32 >= l
                } else {
                    false
                }
            }
        }
    }
}

/// Checks that `psi` is a chain map, that the product corresponds (in
/// direct or reversed order, recorded separately), and that the homology of
/// the rigid model agrees with the cubical necklace model in degrees
/// `0..=max_degree`.
pub fn verify_psi(
    k: &ReducedSimplicialSet,
    gens: &Generators,
    max_degree: u32,
    policy: &TruncationPolicy,
    rng: &mut ChaCha8Rng,
    product_pairs: usize,
) -> Result<PsiReport, CobarError> {
    let build_degree = max_degree + 1;
    let cube_cap = max_degree + 2;
    let model = RigidModel::build(k, gens, build_degree, cube_cap, policy)?;
    let mut report = PsiReport {
        words_checked: 0,
        chain_map_ok: true,
        chain_map_skipped: 0,
        product_pairs_checked: 0,
        product_direct_ok: true,
        product_reversed_ok: true,
        homology: Vec::new(),
        dropped_identifications: model.dropped_identifications,
        failures: Vec::new(),
    };

    // Chain map on every enumerated word whose differential stays inside
    // the enumeration.
    let word_policy = TruncationPolicy::new(cube_cap, policy.max_length);
    for w in &model.words {
        let n = w.cube_dim(gens);
        if n == 0 || n > build_degree {
            continue;
        }
        let image = match psi(w, gens, &model) {
            Some(c) => c,
            None => continue,
        };
        let lhs = model.boundary_chain(&image);
        let free = TruncationPolicy::new(word_policy.max_degree, None);
        let diff = fsq_differential(w, gens, &free);
        let mut rhs = RigidChain::new();
        let mut skipped = false;
        for (t, &c) in diff.iter() {
            match psi(t, gens, &model) {
                Some(img) => {
                    for (&key, &cm) in img.iter() {
                        rigid_add(&mut rhs, key, c * cm);
                    }
                }
                None => {
                    skipped = true;
                    break;
                }
            }
        }
        if skipped {
            report.chain_map_skipped += 1;
            continue;
        }
        report.words_checked += 1;
        if lhs != rhs {
            report.chain_map_ok = false;
            report.failures.push(format!(
                "psi fails the chain map identity on {}",
                word_label(w, gens)
            ));
        }
    }

    // Product compatibility on seeded random pairs, sampled from the
    // feasible combinations so the checks actually run.
    let pool: Vec<&NecklaceWord> = model
        .words
        .iter()
        .filter(|w| w.cube_dim(gens) <= build_degree)
        .collect();
    if !pool.is_empty() {
        for _ in 0..product_pairs {
            let w1 = pool[rng.gen_range(0..pool.len())];
            let n1 = w1.cube_dim(gens);
            let partners: Vec<&&NecklaceWord> = pool
                .iter()
                .filter(|w2| {
                    n1 + w2.cube_dim(gens) <= build_degree
                        && policy
                            .max_length
                            .is_none_or(|l| (w1.len() + w2.len()) as u32 <= l)
                })
                .collect();
            if partners.is_empty() {
                continue;
            }
            let w2 = *partners[rng.gen_range(0..partners.len())];
            let n2 = w2.cube_dim(gens);
            let target = match psi(&crate::fsq::fsq_product(w1, w2), gens, &model) {
                Some(c) => c,
                None => continue,
            };
            let (e1, e2) = (ez_power(n1), ez_power(n2));
            report.product_pairs_checked += 1;
            match model.product_chain(w1, &e1, w2, &e2) {
                Some(direct) if direct == target => {}
                _ => {
                    report.product_direct_ok = false;
                }
            }
            match model.product_chain(w2, &e2, w1, &e1) {
                Some(rev) if rev == target => {}
                _ => {
                    report.product_reversed_ok = false;
                }
            }
        }
    }

    // Homology agreement against the cubical necklace model.
    let fsq_pol = TruncationPolicy::new(build_degree, policy.max_length);
    let fsq = fsq_complex(gens, &fsq_pol)?;
    let h_fsq = homology(&fsq, 0..=max_degree).map_err(|_| CobarError::DegreeOutOfPolicy {
        degree: max_degree,
        max: build_degree,
    })?;
    let h_rigid =
        homology(&model.complex, 0..=max_degree).map_err(|_| CobarError::DegreeOutOfPolicy {
            degree: max_degree,
            max: build_degree,
        })?;
    for n in 0..=max_degree {
        let r = h_rigid.summand(n).expect("degree in range");
        let f = h_fsq.summand(n).expect("degree in range");
        let provisional = model.degree_flags[n as usize] || r.provisional || f.provisional;
        let agrees = r.free_rank == f.free_rank && r.torsion == f.torsion;
        if !agrees && !provisional {
            report
                .failures
                .push(format!("homology disagrees in degree {n}"));
        }
        report.homology.push(DegreeComparison {
            degree: n,
            rigid_free_rank: r.free_rank,
            rigid_torsion: r.torsion.clone(),
            fsq_free_rank: f.free_rank,
            fsq_torsion: f.torsion.clone(),
            provisional,
            agrees,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::builtin_space;
    use rand::SeedableRng;

    fn setup(name: &str) -> (ReducedSimplicialSet, Generators) {
        let k = builtin_space(name).unwrap();
        let gens = Generators::build(&k).unwrap();
        (k, gens)
    }

    #[test]
    fn enumerate_sphere_words() {
        let (_, gens) = setup("sphere:2");
        let words =
            enumerate_necklace_maps(&gens, 2, &TruncationPolicy::new(2, None)).unwrap();
        assert_eq!(
            words,
            vec![
                NecklaceWord::unit(),
                NecklaceWord(vec![0]),
                NecklaceWord(vec![0, 0])
            ]
        );
    }

    #[test]
    fn enumerate_wedge_words() {
        let (_, gens) = setup("wedge-circles:1");
        let words =
            enumerate_necklace_maps(&gens, 0, &TruncationPolicy::new(0, Some(2))).unwrap();
        assert_eq!(
            words,
            vec![
                NecklaceWord::unit(),
                NecklaceWord(vec![0]),
                NecklaceWord(vec![0, 0])
            ]
        );
    }

    #[test]
    fn wedge_complex_is_free_monoid_in_degree_zero() {
        let (k, gens) = setup("wedge-circles:1");
        let policy = TruncationPolicy::new(0, Some(3));
        let model = RigidModel::build(&k, &gens, 2, 2, &policy).unwrap();
        // Words u, a, aa, aaa: all cubes are points, no identifications.
        assert_eq!(model.complex.rank(0), 4);
        assert_eq!(model.complex.rank(1), 0);
        let h = homology(&model.complex, 0..=0).unwrap();
        assert_eq!(h.summand(0).unwrap().free_rank, 4);
    }

    #[test]
    fn sphere_degree_zero_is_one_class() {
        let (k, gens) = setup("sphere:2");
        let policy = TruncationPolicy::new(4, Some(4));
        let model = RigidModel::build(&k, &gens, 3, 4, &policy).unwrap();
        assert_eq!(model.complex.rank(0), 1, "all cube vertices reach u");
        assert_eq!(model.dropped_identifications, 0);
    }

    #[test]
    fn sphere_rigid_homology_is_loop_space_of_s2() {
        let (k, gens) = setup("sphere:2");
        let policy = TruncationPolicy::new(4, Some(4));
        let model = RigidModel::build(&k, &gens, 3, 4, &policy).unwrap();
        let h = homology(&model.complex, 0..=2).unwrap();
        for n in 0..=2 {
            let s = h.summand(n).unwrap();
            assert_eq!(s.free_rank, 1, "degree {n}");
            assert!(s.torsion.is_empty(), "degree {n}");
        }
    }

    #[test]
    fn sphere_rigid_homology_extends_to_degree_three() {
        let (k, gens) = setup("sphere:2");
        let policy = TruncationPolicy::new(5, Some(5));
        let model = RigidModel::build(&k, &gens, 4, 5, &policy).unwrap();
        assert_eq!(model.dropped_identifications, 0);
        let h = homology(&model.complex, 0..=3).unwrap();
        for n in 0..=3 {
            assert_eq!(h.summand(n).unwrap().free_rank, 1, "degree {n}");
        }
    }

    #[test]
    fn rp2_rigid_degree_zero_sees_both_components() {
        // Two loop components (the fundamental group has order two); the
        // degree-0 classes collapse onto two path components even though
        // higher degrees stay provisional at this truncation.
        let (k, gens) = setup("rp2");
        let policy = TruncationPolicy::new(3, Some(4));
        let model = RigidModel::build(&k, &gens, 2, 3, &policy).unwrap();
        let h = homology(&model.complex, 0..=1).unwrap();
        assert_eq!(h.summand(0).unwrap().free_rank, 2);
        assert_eq!(h.summand(1).unwrap().free_rank, 2);
    }

    #[test]
    fn psi_on_sphere_word_is_the_interval() {
        let (k, gens) = setup("sphere:2");
        let policy = TruncationPolicy::new(3, Some(3));
        let model = RigidModel::build(&k, &gens, 2, 3, &policy).unwrap();
        let chain = psi(&NecklaceWord(vec![0]), &gens, &model).unwrap();
        assert_eq!(chain.len(), 1);
        let (&(deg, _), &coeff) = chain.iter().next().unwrap();
        assert_eq!(deg, 1);
        assert_eq!(coeff, 1);
    }

    #[test]
    fn verify_psi_sphere() {
        let (k, gens) = setup("sphere:2");
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let report = verify_psi(&k, &gens, 2, &TruncationPolicy::new(2, Some(4)), &mut rng, 40)
            .unwrap();
        assert!(report.chain_map_ok, "{:?}", report.failures);
        assert!(report.product_direct_ok);
        for d in &report.homology {
            assert!(d.agrees, "degree {}: {:?}", d.degree, d);
            assert_eq!(d.rigid_free_rank, 1);
        }
        assert!(report.passed());
    }

    #[test]
    fn verify_psi_wedges() {
        for name in ["wedge-circles:1", "wedge-circles:2"] {
            let (k, gens) = setup(name);
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let report =
                verify_psi(&k, &gens, 0, &TruncationPolicy::new(0, Some(3)), &mut rng, 40)
                    .unwrap();
            assert!(report.passed(), "{name}: {:?}", report.failures);
            assert!(report.homology[0].agrees);
        }
    }

    #[test]
    fn point_space_is_the_one_point_monoid() {
        // A space with no simplices above the vertex: the unit word is the
        // only generator in any truncation.
        let k = crate::space::from_json(r#"{"name":"point","simplices":{}}"#).unwrap();
        let gens = Generators::build(&k).unwrap();
        let words = enumerate_necklace_maps(&gens, 0, &TruncationPolicy::new(0, Some(0))).unwrap();
        assert_eq!(words, vec![NecklaceWord::unit()]);
        let model = RigidModel::build(&k, &gens, 2, 2, &TruncationPolicy::new(2, Some(4))).unwrap();
        assert_eq!(model.complex.rank(0), 1);
        assert_eq!(model.complex.rank(1), 0);
        let u = psi(&NecklaceWord::unit(), &gens, &model).unwrap();
        assert_eq!(u.len(), 1);
        assert_eq!(u.iter().next(), Some((&(0u32, 0u32), &1i64)));
    }

    #[test]
    fn rigid_boundary_squares_to_zero() {
        for (name, deg, cap, len) in
            [("sphere:2", 3, 4, Some(4)), ("rp2", 2, 3, Some(4)), ("torus", 2, 3, Some(4))]
        {
            let (k, gens) = setup(name);
            let policy = TruncationPolicy::new(cap, len);
            let model = RigidModel::build(&k, &gens, deg, cap, &policy).unwrap();
            let report = crate::chain::verify_complex(&model.complex);
            assert!(report.passed(), "{name}: {report}");
        }
    }
}

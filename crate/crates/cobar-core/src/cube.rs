//! Simplices of cubes `(Δ¹)^{×n}` and the Eilenberg-Zilber shuffle map.
//!
//! A vertex of the `n`-cube is a bitmask over coordinates `1..=n` (bit
//! `s - 1` is coordinate `s`); an `m`-simplex is a componentwise weakly
//! increasing sequence of `m + 1` vertices, nondegenerate exactly when the
//! sequence is strictly increasing. Faces of strict chains stay strict, so
//! no normalization is needed in boundaries.

use std::collections::BTreeMap;

use crate::chain::{IntegerComplex, SparseMat};

/// A simplex of `(Δ¹)^{×n}` given by its vertex chain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeSimplex {
    pub cube_dim: u32,
    pub vertices: Vec<u32>,
}

impl CubeSimplex {
    pub fn vertex_of_point() -> Self {
        CubeSimplex {
            cube_dim: 0,
            vertices: vec![0],
        }
    }

    /// The nondegenerate edge of the interval.
    pub fn interval_edge() -> Self {
        CubeSimplex {
            cube_dim: 1,
            vertices: vec![0, 1],
        }
    }

    pub fn degree(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_monotone(&self) -> bool {
        self.vertices
            .windows(2)
            .all(|w| w[0] & w[1] == w[0])
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.vertices.windows(2).all(|w| w[0] != w[1])
    }

    pub fn face(&self, i: usize) -> CubeSimplex {
        let mut vertices = self.vertices.clone();
        vertices.remove(i);
        CubeSimplex {
            cube_dim: self.cube_dim,
            vertices,
        }
    }

    /// Collapses consecutive duplicate vertices; `None` when that leaves a
    /// degenerate simplex (i.e. duplicates existed).
    pub fn strict(self) -> Option<CubeSimplex> {
        if self.is_nondegenerate() {
            Some(self)
        } else {
            None
        }
    }

    pub fn label(&self) -> String {
        if self.cube_dim == 0 {
            return "pt".to_string();
        }
        let verts: Vec<String> = self
            .vertices
            .iter()
            .map(|v| {
                (0..self.cube_dim)
                    .map(|s| if v >> s & 1 == 1 { '1' } else { '0' })
                    .collect()
            })
            .collect();
        verts.join("<")
    }
}

/// Integer chain on the simplices of one cube.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CubeChain {
    pub cube_dim: u32,
    terms: BTreeMap<Vec<u32>, i64>,
}

impl CubeChain {
    pub fn zero(cube_dim: u32) -> Self {
        CubeChain {
            cube_dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn generator(s: &CubeSimplex) -> Self {
        let mut c = CubeChain::zero(s.cube_dim);
        c.add(s.vertices.clone(), 1);
        c
    }

    pub fn add(&mut self, vertices: Vec<u32>, coeff: i64) {
        if coeff == 0 {
            return;
        }
        match self.terms.entry(vertices) {
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

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &i64)> {
        self.terms.iter()
    }

    /// Simplicial boundary with degenerate faces dropped (none arise on
    /// strict chains).
    pub fn boundary(&self) -> CubeChain {
        let mut out = CubeChain::zero(self.cube_dim);
        for (verts, &coeff) in &self.terms {
            if verts.len() == 1 {
                continue;
            }
            for i in 0..verts.len() {
                let mut face = verts.clone();
                face.remove(i);
                if face.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                let sign = if i % 2 == 0 { coeff } else { -coeff };
                out.add(face, sign);
            }
        }
        out
    }
}

/// Shuffle product of two cube simplices into the product cube, second
/// factor's coordinates shifted up. Terms are `(vertex chain, sign)`.
pub fn shuffle_simplices(
    a: &CubeSimplex,
    b: &CubeSimplex,
) -> Vec<(Vec<u32>, i64)> {
    shuffle_vertex_chains(&a.vertices, &b.vertices, a.cube_dim)
}

fn shuffle_vertex_chains(a: &[u32], b: &[u32], shift: u32) -> Vec<(Vec<u32>, i64)> {
    let p = a.len() - 1;
    let q = b.len() - 1;
    let total = p + q;
    let mut out = Vec::new();
    // Iterate monotone lattice paths as bitmasks: bit t set means step t
    // advances the first factor.
    for mask in 0u64..(1u64 << total) {
        if (mask.count_ones() as usize) != p {
            continue;
        }
        let mut i = 0usize;
        let mut j = 0usize;
        let mut inversions = 0usize;
        let mut verts = Vec::with_capacity(total + 1);
        verts.push(a[0] | (b[0] << shift));
        for t in 0..total {
            if mask >> t & 1 == 1 {
                i += 1;
                inversions += j;
            } else {
                j += 1;
            }
            verts.push(a[i] | (b[j] << shift));
        }
        let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
        out.push((verts, sign));
    }
    out
}

/// Bilinear Eilenberg-Zilber shuffle map
/// `C_*(□^p) ⊗ C_*(□^q) → C_*(□^{p+q})`; degenerate outputs are dropped.
pub fn ez_shuffle(a: &CubeChain, b: &CubeChain) -> CubeChain {
    let mut out = CubeChain::zero(a.cube_dim + b.cube_dim);
    for (va, &ca) in a.terms() {
        for (vb, &cb) in b.terms() {
            for (verts, sign) in shuffle_vertex_chains(va, vb, a.cube_dim) {
                if verts.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                out.add(verts, sign * ca * cb);
            }
        }
    }
    out
}

/// The shuffle power `e^{×n}` of the interval generator: the alternating
/// sum of the `n!` top simplices of the `n`-cube.
pub fn ez_power(n: u32) -> CubeChain {
    let mut acc = CubeChain::generator(&CubeSimplex::vertex_of_point());
    let e = CubeChain::generator(&CubeSimplex::interval_edge());
    for _ in 0..n {
        acc = ez_shuffle(&acc, &e);
    }
    acc
}

/// Enumerates the nondegenerate `m`-simplices of the `n`-cube for
/// `m <= max_degree`, in lexicographic vertex-chain order per degree.
pub fn cube_simplices(n: u32, max_degree: u32) -> Vec<Vec<CubeSimplex>> {
    let verts: Vec<u32> = (0..(1u32 << n)).collect();
    let mut by_degree: Vec<Vec<CubeSimplex>> = vec![Vec::new(); max_degree as usize + 1];
    let mut stack: Vec<Vec<u32>> = verts.iter().map(|&v| vec![v]).collect();
    // Depth-first extension; lists are sorted at the end so the basis order
    // is lexicographic within each degree.
    while let Some(chain) = stack.pop() {
        let d = chain.len() - 1;
        by_degree[d].push(CubeSimplex {
            cube_dim: n,
            vertices: chain.clone(),
        });
        if (d as u32) < max_degree {
            let last = *chain.last().unwrap();
            for &w in &verts {
                if w != last && last & w == last {
                    let mut next = chain.clone();
                    next.push(w);
                    stack.push(next);
                }
            }
        }
    }
    for list in &mut by_degree {
        list.sort();
    }
    by_degree
}

/// Normalized simplicial chain complex of `(Δ¹)^{×n}` up to `max_degree`.
pub fn cube_simplicial_chains(n: u32, max_degree: u32) -> IntegerComplex {
    let by_degree = cube_simplices(n, max_degree);
    let top = by_degree
        .iter()
        .rposition(|l| !l.is_empty())
        .map_or(0, |i| i);
    let bases: Vec<Vec<String>> = by_degree[..=top]
        .iter()
        .map(|l| l.iter().map(|s| s.label()).collect())
        .collect();
    let mut boundaries = Vec::new();
    for d in 1..=top {
        let index: BTreeMap<&Vec<u32>, usize> = by_degree[d - 1]
            .iter()
            .enumerate()
            .map(|(i, s)| (&s.vertices, i))
            .collect();
        let mut cols = Vec::with_capacity(by_degree[d].len());
        for s in &by_degree[d] {
            let mut col: Vec<(usize, i64)> = Vec::new();
            let b = CubeChain::generator(s).boundary();
            for (verts, &coeff) in b.terms() {
                col.push((index[verts], coeff));
            }
            col.sort_unstable_by_key(|&(r, _)| r);
            cols.push(col);
        }
        boundaries.push(SparseMat::from_columns(by_degree[d - 1].len(), cols));
    }
    IntegerComplex::new(bases, boundaries)
}

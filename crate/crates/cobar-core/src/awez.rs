//! Normalized chains of a reduced simplicial set: boundary, the
//! Alexander-Whitney coproduct and its coassociativity check.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::space::{GenId, ReducedSimplicialSet, SimplexRef, SpaceError};

/// Key of a normalized-chain basis element: `None` is the basepoint vertex,
/// `Some(g)` a nondegenerate simplex of positive dimension.
pub type ChainKey = Option<GenId>;

/// An integer chain on the nondegenerate simplices of one degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NormalizedChain {
    terms: BTreeMap<ChainKey, i64>,
}

impl NormalizedChain {
    pub fn zero() -> Self {
        NormalizedChain::default()
    }

    pub fn add(&mut self, key: ChainKey, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let slot = self.terms.entry(key).or_insert(0);
        *slot += coeff;
        if *slot == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ChainKey, &i64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &ChainKey) -> i64 {
        self.terms.get(key).copied().unwrap_or(0)
    }
}

/// `Σ (-1)^i d_i σ` with degenerate faces dropped.
pub fn normalized_boundary(
    sigma: GenId,
    k: &ReducedSimplicialSet,
) -> Result<NormalizedChain, SpaceError> {
    let r = SimplexRef::nondegenerate(sigma);
    let mut out = NormalizedChain::zero();
    for i in 0..=sigma.dim {
        let face = k.apply_face(i, &r)?;
        if face.is_degenerate() {
            continue;
        }
        let sign = if i % 2 == 0 { 1 } else { -1 };
        out.add(face.base, sign);
    }
    Ok(out)
}

/// All `n + 1` Alexander-Whitney terms `σ|[0..i] ⊗ σ|[i..n]`, in order of
/// the cut index and each in normal form. Factors may be degenerate; callers
/// working in normalized chains drop those terms. Every coefficient is `+1`.
pub fn aw_coproduct(
    r: &SimplexRef,
    k: &ReducedSimplicialSet,
) -> Result<Vec<(SimplexRef, SimplexRef)>, SpaceError> {
    let n = r.dim();
    let mut out = Vec::with_capacity(n as usize + 1);
    for i in 0..=n {
        out.push(k.front_back(r, i)?);
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CoassociativityReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CoassociativityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Verifies `(Δ ⊗ id)Δ = (id ⊗ Δ)Δ` on every nondegenerate simplex of
/// dimension at most `max_dim`, in the normalized setting (terms with a
/// degenerate tensor factor are dropped on both sides).
pub fn coassociativity_check(
    k: &ReducedSimplicialSet,
    max_dim: u32,
) -> Result<CoassociativityReport, SpaceError> {
    let mut report = CoassociativityReport::default();
    let mut targets: Vec<SimplexRef> = vec![SimplexRef::vertex()];
    for (gid, _) in k.iter_cells() {
        if gid.dim <= max_dim {
            targets.push(SimplexRef::nondegenerate(gid));
        }
    }
    for r in targets {
        let mut lhs: BTreeMap<(SimplexRef, SimplexRef, SimplexRef), i64> = BTreeMap::new();
        let mut rhs = lhs.clone();
        for (front, back) in aw_coproduct(&r, k)? {
            if front.is_degenerate() || back.is_degenerate() {
                continue;
            }
            // (Δ ⊗ id): re-split the front factor.
            for (a, b) in aw_coproduct(&front, k)? {
                if a.is_degenerate() || b.is_degenerate() {
                    continue;
                }
                *lhs.entry((a, b, back.clone())).or_insert(0) += 1;
            }
            // (id ⊗ Δ): re-split the back factor.
            for (b, c) in aw_coproduct(&back, k)? {
                if b.is_degenerate() || c.is_degenerate() {
                    continue;
                }
                *rhs.entry((front.clone(), b, c)).or_insert(0) += 1;
            }
        }
        report.checked += 1;
        if lhs != rhs {
            report.failures.push(format!(
                "coassociativity fails on {}",
                k.display_ref(&r)
            ));
        }
    }
    Ok(report)
}

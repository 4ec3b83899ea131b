//! Integer chain complexes on finite ordered bases.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Column-major sparse integer matrix. Each column holds `(row, coeff)`
/// pairs sorted by row with nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMat {
    rows: usize,
    cols: Vec<Vec<(usize, i64)>>,
}

impl SparseMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMat {
            rows,
            cols: vec![Vec::new(); cols],
        }
    }

    pub fn from_columns(rows: usize, cols: Vec<Vec<(usize, i64)>>) -> Self {
        for col in &cols {
            debug_assert!(col.windows(2).all(|w| w[0].0 < w[1].0));
            debug_assert!(col.iter().all(|&(r, c)| r < rows && c != 0));
        }
        SparseMat { rows, cols }
    }

    pub fn from_dense(entries: &[Vec<i64>]) -> Self {
        let rows = entries.len();
        let cols_n = entries.first().map_or(0, |r| r.len());
        let mut cols = vec![Vec::new(); cols_n];
        for (r, row) in entries.iter().enumerate() {
            assert_eq!(row.len(), cols_n, "ragged matrix");
            for (c, &v) in row.iter().enumerate() {
                if v != 0 {
                    cols[c].push((r, v));
                }
            }
        }
        SparseMat { rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, c: usize) -> &[(usize, i64)] {
        &self.cols[c]
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    /// `self * other`, where columns of `other` are combined columns of
    /// `self`.
    pub fn multiply(&self, other: &SparseMat) -> SparseMat {
        assert_eq!(self.n_cols(), other.rows, "dimension mismatch in product");
        let mut out = Vec::with_capacity(other.n_cols());
        let mut acc: Vec<i64> = vec![0; self.rows];
        let mut touched: Vec<usize> = Vec::new();
        for col in &other.cols {
            for &(mid, v) in col {
                for &(r, w) in &self.cols[mid] {
                    if acc[r] == 0 {
                        touched.push(r);
                    }
                    acc[r] += v * w;
                }
            }
            touched.sort_unstable();
            let mut out_col = Vec::new();
            for &r in &touched {
                if acc[r] != 0 {
                    out_col.push((r, acc[r]));
                }
                acc[r] = 0;
            }
            touched.clear();
            out.push(out_col);
        }
        SparseMat {
            rows: self.rows,
            cols: out,
        }
    }

    /// Permutes the rows of the matrix: entry `(r, c)` moves to
    /// `(perm[r], c)`.
    pub fn permute_rows(&self, perm: &[usize]) -> SparseMat {
        let mut cols = Vec::with_capacity(self.cols.len());
        for col in &self.cols {
            let mut newcol: Vec<(usize, i64)> =
                col.iter().map(|&(r, v)| (perm[r], v)).collect();
            newcol.sort_unstable_by_key(|&(r, _)| r);
            cols.push(newcol);
        }
        SparseMat {
            rows: self.rows,
            cols,
        }
    }
}

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("degree {0} outside the stored range")]
    DegreeOutOfRange(i64),
    #[error(
        "boundary matrix in degree {degree} is {rows}x{cols} but bases have sizes {expect_rows}x{expect_cols}"
    )]
    ShapeMismatch {
        degree: u32,
        rows: usize,
        cols: usize,
        expect_rows: usize,
        expect_cols: usize,
    },
}

/// Truncation metadata carried by complexes whose bases were cut off.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub max_degree: u32,
    pub max_length: Option<u32>,
}

/// A chain complex of free abelian groups concentrated in degrees
/// `0 ..= top`, with ordered bases of opaque labels and sparse boundary
/// matrices `d_n : C_n -> C_{n-1}`.
#[derive(Clone, Debug)]
pub struct IntegerComplex {
    bases: Vec<Vec<String>>,
    /// `boundaries[n - 1]` is `d_n`, for `1 <= n <= top`.
    boundaries: Vec<SparseMat>,
    pub truncation: Option<Truncation>,
}

impl IntegerComplex {
    pub fn new(bases: Vec<Vec<String>>, boundaries: Vec<SparseMat>) -> Self {
        assert_eq!(
            boundaries.len(),
            bases.len().saturating_sub(1),
            "one boundary matrix per positive degree"
        );
        IntegerComplex {
            bases,
            boundaries,
            truncation: None,
        }
    }

    pub fn empty() -> Self {
        IntegerComplex {
            bases: Vec::new(),
            boundaries: Vec::new(),
            truncation: None,
        }
    }

    pub fn with_truncation(mut self, t: Truncation) -> Self {
        self.truncation = Some(t);
        self
    }

    /// Highest stored degree, or `None` for the empty complex.
    pub fn top_degree(&self) -> Option<u32> {
        if self.bases.is_empty() {
            None
        } else {
            Some(self.bases.len() as u32 - 1)
        }
    }

    pub fn rank(&self, degree: u32) -> usize {
        self.bases
            .get(degree as usize)
            .map_or(0, |b| b.len())
    }

    pub fn basis(&self, degree: u32) -> &[String] {
        self.bases
            .get(degree as usize)
            .map_or(&[], |b| b.as_slice())
    }

    /// `d_n` for `n >= 1`; zero matrix outside the stored range.
    pub fn boundary(&self, n: u32) -> SparseMat {
        if n == 0 || n as usize > self.boundaries.len() {
            let rows = if n == 0 { 0 } else { self.rank(n - 1) };
            SparseMat::zero(rows, self.rank(n))
        } else {
            self.boundaries[n as usize - 1].clone()
        }
    }

    pub fn boundary_ref(&self, n: u32) -> Option<&SparseMat> {
        if n == 0 || n as usize > self.boundaries.len() {
            None
        } else {
            Some(&self.boundaries[n as usize - 1])
        }
    }
}

/// Result of checking `d ∘ d = 0` and shape consistency.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ComplexReport {
    pub failures: Vec<String>,
}

impl ComplexReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ComplexReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            write!(f, "complex verified: d∘d = 0")
        } else {
            for line in &self.failures {
                writeln!(f, "{line}")?;
            }
            Ok(())
        }
    }
}

/// Verifies matrix shapes and that consecutive boundaries compose to zero,
/// reporting the first nonzero entry of each offending product.
pub fn verify_complex(c: &IntegerComplex) -> ComplexReport {
    let mut report = ComplexReport::default();
    let top = match c.top_degree() {
        None => return report,
        Some(t) => t,
    };
    for n in 1..=top {
        if let Some(m) = c.boundary_ref(n) {
            if m.rows() != c.rank(n - 1) || m.n_cols() != c.rank(n) {
                report.failures.push(format!(
                    "d_{n} is {}x{} but bases have sizes {}x{}",
                    m.rows(),
                    m.n_cols(),
                    c.rank(n - 1),
                    c.rank(n)
                ));
            }
        }
    }
    if !report.failures.is_empty() {
        return report;
    }
    for n in 2..=top {
        let prod = c.boundary(n - 1).multiply(&c.boundary(n));
        if !prod.is_zero() {
            let (col, row, val) = first_nonzero(&prod);
            report.failures.push(format!(
                "d_{} ∘ d_{} != 0: entry ({row}, {col}) = {val}",
                n - 1,
                n
            ));
        }
    }
    report
}

fn first_nonzero(m: &SparseMat) -> (usize, usize, i64) {
    for (c, col) in (0..m.n_cols()).map(|c| (c, m.column(c))) {
        if let Some(&(r, v)) = col.first() {
            return (c, r, v);
        }
    }
    unreachable!("matrix is nonzero")
}

/// Homology of one degree: free rank plus torsion coefficients in a
/// divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologySummand {
    pub degree: u32,
    pub free_rank: usize,
    pub torsion: Vec<i64>,
    /// Set when the degree touches a truncation boundary and the reported
    /// group may differ from the untruncated one.
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub provisional: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HomologyResult {
    pub degrees: Vec<HomologySummand>,
}

impl HomologyResult {
    pub fn summand(&self, degree: u32) -> Option<&HomologySummand> {
        self.degrees.iter().find(|s| s.degree == degree)
    }

    /// Plain-text table renderer.
    pub fn render_table(&self) -> String {
        let mut out = String::from("degree  free_rank  torsion\n");
        for s in &self.degrees {
            let torsion = if s.torsion.is_empty() {
                "-".to_string()
            } else {
                s.torsion
                    .iter()
                    .map(|d| format!("Z/{d}"))
                    .collect::<Vec<_>>()
                    .join(" + ")
            };
            let mark = if s.provisional { " (truncated)" } else { "" };
            out.push_str(&format!(
                "{:<7} {:<10} {}{}\n",
                s.degree, s.free_rank, torsion, mark
            ));
        }
        out
    }
}

impl fmt::Display for HomologyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_table())
    }
}

/// Computes homology in the requested degrees via Smith normal form.
///
/// In the top stored degree the incoming boundary is unknown, so the result
/// there is flagged provisional along with anything a truncation touches.
pub fn homology(
    c: &IntegerComplex,
    degrees: std::ops::RangeInclusive<u32>,
) -> Result<HomologyResult, ComplexError> {
    let top = c.top_degree().ok_or(ComplexError::DegreeOutOfRange(
        *degrees.start() as i64,
    ))?;
    if *degrees.end() > top {
        return Err(ComplexError::DegreeOutOfRange(*degrees.end() as i64));
    }
    // Each boundary matrix feeds two degrees; factor it once.
    let mut snf_cache: std::collections::HashMap<u32, (usize, Vec<i64>)> =
        std::collections::HashMap::new();
    let mut snf_of = |n: u32| -> (usize, Vec<i64>) {
        if n == 0 || n > top {
            return (0, Vec::new());
        }
        snf_cache
            .entry(n)
            .or_insert_with(|| {
                let snf = crate::snf::smith_normal_form(&c.boundary(n), false);
                let one = num_bigint::BigInt::from(1);
                let torsion: Vec<i64> = snf
                    .factors
                    .iter()
                    .filter(|d| **d > one)
                    .map(|d| {
                        i64::try_from(d).expect("torsion coefficient fits in i64 at desk scale")
                    })
                    .collect();
                (snf.factors.len(), torsion)
            })
            .clone()
    };
    let mut result = HomologyResult::default();
    for n in degrees {
        let (outgoing, _) = snf_of(n);
        let (incoming_rank, torsion) = snf_of(n + 1);
        let free_rank = c.rank(n) - outgoing - incoming_rank;
        result.degrees.push(HomologySummand {
            degree: n,
            free_rank,
            torsion,
            provisional: n == top && c.truncation.is_some(),
        });
    }
    Ok(result)
}

//! Simplicial operator words in Eilenberg-Zilber normal form.
//!
//! Every composite of face and degeneracy maps factors uniquely as a strictly
//! decreasing degeneracy word applied after a strictly increasing face word.
//! Composition is performed by rewriting elementary operators past the normal
//! form with the simplicial identities, never by materializing monotone maps;
//! the monotone-map route is kept as an independent oracle in the test suite.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OperatorError {
    #[error("dimension mismatch: first operator targets dim {first_target}, second expects dim {second_source}")]
    DimensionMismatch {
        first_target: u32,
        second_source: u32,
    },
    #[error("face index {index} out of range for dimension {dim}")]
    FaceOutOfRange { index: u32, dim: u32 },
    #[error("degeneracy index {index} out of range for dimension {dim}")]
    DegeneracyOutOfRange { index: u32, dim: u32 },
    #[error("malformed operator word: {0}")]
    Malformed(String),
}

/// A simplicial operator acting on simplices of dimension `source_dim`,
/// producing simplices of dimension `target_dim`.
///
/// In application order the faces fire first, from the largest index down,
/// then the degeneracies from the smallest index up. Stored words are always
/// in normal form: `faces` strictly increasing, `degeneracies` strictly
/// decreasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplicialOperator {
    degeneracies: Vec<u32>,
    faces: Vec<u32>,
    source_dim: u32,
    target_dim: u32,
}

impl SimplicialOperator {
    pub fn identity(dim: u32) -> Self {
        SimplicialOperator {
            degeneracies: Vec::new(),
            faces: Vec::new(),
            source_dim: dim,
            target_dim: dim,
        }
    }

    /// The elementary face operator `d_i` on `dim`-simplices.
    pub fn face(i: u32, dim: u32) -> Result<Self, OperatorError> {
        if dim == 0 || i > dim {
            return Err(OperatorError::FaceOutOfRange { index: i, dim });
        }
        Ok(SimplicialOperator {
            degeneracies: Vec::new(),
            faces: vec![i],
            source_dim: dim,
            target_dim: dim - 1,
        })
    }

    /// The elementary degeneracy operator `s_j` on `dim`-simplices.
    pub fn degeneracy(j: u32, dim: u32) -> Result<Self, OperatorError> {
        if j > dim {
            return Err(OperatorError::DegeneracyOutOfRange { index: j, dim });
        }
        Ok(SimplicialOperator {
            degeneracies: vec![j],
            faces: Vec::new(),
            source_dim: dim,
            target_dim: dim + 1,
        })
    }

    /// Builds a normal-form operator from raw words, validating index ranges.
    pub fn from_parts(
        degeneracies: Vec<u32>,
        faces: Vec<u32>,
        source_dim: u32,
    ) -> Result<Self, OperatorError> {
        if !faces.windows(2).all(|w| w[0] < w[1]) {
            return Err(OperatorError::Malformed(
                "face indices must be strictly increasing".into(),
            ));
        }
        if !degeneracies.windows(2).all(|w| w[0] > w[1]) {
            return Err(OperatorError::Malformed(
                "degeneracy indices must be strictly decreasing".into(),
            ));
        }
        let q = faces.len() as u32;
        if q > source_dim {
            return Err(OperatorError::Malformed(format!(
                "{q} faces cannot apply to a {source_dim}-simplex"
            )));
        }
        if let Some(&last) = faces.last() {
            if last > source_dim {
                return Err(OperatorError::FaceOutOfRange {
                    index: last,
                    dim: source_dim,
                });
            }
        }
        // Degeneracy s_{j_t} at position t (from the left) fires on a simplex
        // of dimension source - q + (p - t - 1).
        let after_faces = source_dim - q;
        let p = degeneracies.len() as u32;
        for (t, &j) in degeneracies.iter().enumerate() {
            let dim_here = after_faces + p - t as u32 - 1;
            if j > dim_here {
                return Err(OperatorError::DegeneracyOutOfRange {
                    index: j,
                    dim: dim_here,
                });
            }
        }
        let target_dim = source_dim - q + p;
        Ok(SimplicialOperator {
            degeneracies,
            faces,
            source_dim,
            target_dim,
        })
    }

    pub fn degeneracies(&self) -> &[u32] {
        &self.degeneracies
    }

    pub fn faces(&self) -> &[u32] {
        &self.faces
    }

    pub fn source_dim(&self) -> u32 {
        self.source_dim
    }

    pub fn target_dim(&self) -> u32 {
        self.target_dim
    }

    pub fn is_identity(&self) -> bool {
        self.degeneracies.is_empty() && self.faces.is_empty()
    }

    /// True when the word contains no face part.
    pub fn is_pure_degeneracy(&self) -> bool {
        self.faces.is_empty()
    }

    /// Composes `d_i` after this operator, rewriting it past the degeneracy
    /// word. `i` must be a valid face index on `target_dim`.
    pub fn then_face(&self, i: u32) -> Result<Self, OperatorError> {
        if self.target_dim == 0 || i > self.target_dim {
            return Err(OperatorError::FaceOutOfRange {
                index: i,
                dim: self.target_dim,
            });
        }
        let mut degens = Vec::with_capacity(self.degeneracies.len());
        let mut cur = Some(i);
        let mut iter = self.degeneracies.iter();
        for &j in iter.by_ref() {
            match cur {
                Some(c) if c < j => degens.push(j - 1),
                Some(c) if c == j || c == j + 1 => {
                    // d_j s_j = d_{j+1} s_j = id: the face annihilates.
                    cur = None;
                    degens.extend(iter.by_ref().copied());
                    break;
                }
                Some(c) => {
                    degens.push(j);
                    cur = Some(c - 1);
                }
                None => unreachable!(),
            }
        }
        let mut faces = self.faces.clone();
        if let Some(c) = cur {
            insert_face(&mut faces, c);
        }
        let target_dim = self.target_dim - 1;
        Ok(SimplicialOperator {
            degeneracies: degens,
            faces,
            source_dim: self.source_dim,
            target_dim,
        })
    }

    /// Composes `s_j` after this operator.
    pub fn then_degeneracy(&self, j: u32) -> Result<Self, OperatorError> {
        if j > self.target_dim {
            return Err(OperatorError::DegeneracyOutOfRange {
                index: j,
                dim: self.target_dim,
            });
        }
        let mut degens = Vec::with_capacity(self.degeneracies.len() + 1);
        let mut placed = false;
        for (t, &jt) in self.degeneracies.iter().enumerate() {
            if j > jt {
                degens.push(j);
                degens.extend_from_slice(&self.degeneracies[t..]);
                placed = true;
                break;
            }
            // s_j s_jt = s_{jt+1} s_j for j <= jt.
            degens.push(jt + 1);
        }
        if !placed {
            degens.push(j);
        }
        Ok(SimplicialOperator {
            degeneracies: degens,
            faces: self.faces.clone(),
            source_dim: self.source_dim,
            target_dim: self.target_dim + 1,
        })
    }
}

/// Rewrites `d_c` composed after the increasing face word into normal form.
fn insert_face(faces: &mut Vec<u32>, c: u32) {
    let mut c = c;
    let mut pos = faces.len();
    for (t, &i) in faces.iter().enumerate() {
        if i <= c {
            // d_c d_i = d_i d_{c+1} for i <= c.
            c += 1;
        } else {
            pos = t;
            break;
        }
    }
    faces.insert(pos, c);
}

/// Normal form of applying `first` then `second`.
pub fn compose_operators(
    first: &SimplicialOperator,
    second: &SimplicialOperator,
) -> Result<SimplicialOperator, OperatorError> {
    if first.target_dim != second.source_dim {
        return Err(OperatorError::DimensionMismatch {
            first_target: first.target_dim,
            second_source: second.source_dim,
        });
    }
    let mut acc = first.clone();
    // Application order of the second word: faces from the largest index
    // down, then degeneracies from the smallest index up.
    for &i in second.faces.iter().rev() {
        acc = acc.then_face(i)?;
    }
    for &j in second.degeneracies.iter().rev() {
        acc = acc.then_degeneracy(j)?;
    }
    debug_assert_eq!(acc.target_dim, second.target_dim);
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_then_degeneracy_cancels() {
        // s_0 then d_0 on a 1-simplex is the identity.
        let s0 = SimplicialOperator::degeneracy(0, 1).unwrap();
        let d0 = SimplicialOperator::face(0, 2).unwrap();
        let c = compose_operators(&s0, &d0).unwrap();
        assert!(c.is_identity());
        assert_eq!(c.source_dim(), 1);
        assert_eq!(c.target_dim(), 1);
    }

    #[test]
    fn face_slides_past_degeneracy() {
        // s_1 then d_0 on a 1-simplex rewrites to d_0 then s_0.
        let s1 = SimplicialOperator::degeneracy(1, 1).unwrap();
        let d0 = SimplicialOperator::face(0, 2).unwrap();
        let c = compose_operators(&s1, &d0).unwrap();
        assert_eq!(c.faces(), &[0]);
        assert_eq!(c.degeneracies(), &[0]);
    }

    #[test]
    fn double_face_normalizes() {
        // d_1 then d_1 on a 3-simplex equals the word with faces {1, 2}.
        let d1 = SimplicialOperator::face(1, 3).unwrap();
        let d1b = SimplicialOperator::face(1, 2).unwrap();
        let c = compose_operators(&d1, &d1b).unwrap();
        assert_eq!(c.faces(), &[1, 2]);
        assert!(c.degeneracies().is_empty());
    }

    #[test]
    fn composition_associates() {
        let a = SimplicialOperator::degeneracy(2, 2).unwrap();
        let b = SimplicialOperator::face(1, 3).unwrap();
        let c = SimplicialOperator::degeneracy(0, 2).unwrap();
        let ab_c = compose_operators(&compose_operators(&a, &b).unwrap(), &c).unwrap();
        let a_bc = compose_operators(&a, &compose_operators(&b, &c).unwrap()).unwrap();
        assert_eq!(ab_c, a_bc);
    }

    #[test]
    fn from_parts_rejects_bad_words() {
        assert!(SimplicialOperator::from_parts(vec![0, 1], vec![], 0).is_err());
        assert!(SimplicialOperator::from_parts(vec![], vec![2, 1], 3).is_err());
        assert!(SimplicialOperator::from_parts(vec![], vec![4], 3).is_err());
        assert!(SimplicialOperator::from_parts(vec![3], vec![], 1).is_err());
        assert!(SimplicialOperator::from_parts(vec![1, 0], vec![], 0).is_ok());
    }

    #[test]
    fn dimension_bookkeeping() {
        let op = SimplicialOperator::from_parts(vec![2, 0], vec![1, 3], 4).unwrap();
        assert_eq!(op.source_dim(), 4);
        assert_eq!(op.target_dim(), 4);
    }
}

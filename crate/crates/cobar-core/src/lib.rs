//! Chain-level loop space models for finite reduced simplicial sets.
//!
//! The crate builds, over exact integers:
//!
//! * the cobar construction of the normalized chain coalgebra of a reduced
//!   simplicial set, as a dg algebra on explicit truncated bases;
//! * the cubical necklace model of the same algebra, with the explicit
//!   isomorphism `phi` between them;
//! * a truncated chain model of the rigidification mapping monoid, with the
//!   comparison map `psi`;
//! * exact integer homology through Smith normal form, so quasi-isomorphism
//!   statements become checkable rank/torsion equalities on desk-scale
//!   inputs.
//!
//! Inputs are either the builtin catalog (`sphere:n`, `wedge-circles:k`,
//! `torus`, `rp2`) or a JSON presentation by nondegenerate simplices and
//! face tables; see [`space::from_json`].
//!
//! Degrees with edges present have infinite-rank bases, so everything is
//! computed in quotients by word length; truncated results always carry
//! their truncation metadata. The classical theory applies to Kan complexes;
//! finite inputs generally are not Kan, and nothing here enforces or assumes
//! horn filling — degree-zero ring presentations are emitted as
//! presentations, not identified with group rings.

pub mod awez;
pub mod chain;
pub mod cobar;
pub mod cube;
pub mod fsq;
pub mod operator;
pub mod rigid;
pub mod snf;
pub mod space;

pub use chain::{homology, verify_complex, HomologyResult, IntegerComplex, SparseMat};
pub use operator::{compose_operators, SimplicialOperator};
pub use space::{builtin_space, from_json, validate, ReducedSimplicialSet, SimplexRef};

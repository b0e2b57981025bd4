//! Exact enumeration of naturally embedded d-ary trees.
//!
//! Every node of an embedded tree carries an integer label: the root is at 0
//! and the child in slot `l` of a node at label `j` sits at `j + b_l` for a
//! fixed step set `(b_1, ..., b_d)`. The ternary step set is `(-1, 0, +1)`.
//!
//! The crate computes, with exact rational arithmetic on truncated power
//! series:
//!
//! * the tree counts `T(z) = 1 + z T(z)^d` and coefficients of its powers
//!   ([`ternary`]),
//! * trees whose labels never exceed `j`, by solving the label system and by
//!   the closed form in the auxiliary series `X` ([`small_labels`]),
//! * trees weighted by the number of nodes at given labels ([`label_marks`]),
//! * leaf-depth profiles by edge type ([`leaf_depths`]),
//! * characteristic equations for other step sets ([`frontier`]),
//!
//! and checks all of it against exhaustive enumeration ([`oracle`]).

pub mod error;
pub mod frontier;
pub mod label_marks;
pub mod leaf_depths;
pub mod oracle;
pub mod series;
pub mod small_labels;
pub mod ternary;
pub mod trees;

pub use error::{Error, Result};

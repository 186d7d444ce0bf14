//! Classification of subspaces of symmetric 4×4 matrices over small finite fields
//! under congruence, and symmetric semifield spreads.

#![allow(clippy::needless_range_loop)]

pub mod bsgs;
pub mod classify;
pub mod error;
pub mod fixture;
pub mod geom;
pub mod gf;
pub mod group;
pub mod orbits;
pub mod semifield;

pub use error::{Error, Result};
pub use geom::{Subspace, SymMatrix, SymPoint};
pub use gf::{Field, FieldElement};
pub use group::{GeneratingSet, GroupElement};

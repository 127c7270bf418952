//! Exact linear algebra over Q: dense matrices for the small bicomplex computations and an
//! incremental sparse echelon form for the large, very sparse systems coming from exterior
//! algebras and polynomial spaces.

mod dense;
mod sparse;
mod subspace;

pub use dense::Matrix;
pub use sparse::{add_to, Echelon, Insertion, SparseVec};
pub use subspace::{Subquotient, Subspace};

//! Finite first-quadrant bicomplexes over Q: total cohomology, pages of the column-filtration
//! spectral sequence, edge maps, and the cone construction `A → B → C` with its `E_2`
//! connecting map `φ`.

mod bicomplex;
mod cone;
pub mod random;

use thiserror::Error;

pub use bicomplex::{Bicomplex, Page, PageData, Spot};
pub use cone::{
    build_cone_triple, phi, verify_cone_lemma, BigradedMap, ChainComplex, ConeLemmaOptions,
    ConeLemmaReport, ConeTriple, FreeComplex, PhiMap, TrialOutcome,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectralError {
    #[error("invalid differentials: {0}")]
    InvalidDifferentials(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("bidegree ({p}, {q}) outside the support")]
    IndexOutOfRange { p: usize, q: usize },
    #[error("element is not a total cocycle")]
    NotCocycle,
    #[error("element does not lie in filtration {p}")]
    NotInFiltration { p: usize },
    #[error("chain map does not commute with the differentials in degree {0}")]
    NotChainMap(usize),
    #[error("element is not a cycle on the second page")]
    NotPageCycle,
    #[error("class does not vanish in the second page of the cone")]
    NotInKernel,
    #[error("lift through the cone left the cycles of A")]
    LiftFailed,
}

//! The polynomial model of the boundary of a wonderful compactification of an adjoint group
//! `G`, and the residue of a primitive class along it.
//!
//! Polynomials live in `u_1..u_l, v_1..v_l` with `x_i = u_i - v_i`, `y_i = u_i + v_i`.
//! `A_Λ` is spanned by the products `x^Γ q(x) p(y)` with `p` invariant under
//! `W_{Δ-(Λ∪Γ)}`. The boundary cohomology is the cokernel of
//! `⊕_{i<j} A_{ij} → ⊕_k A_k`, `(f_ij) ↦ (Σ_{i<k} x_i f_ik - Σ_{j>k} x_j f_kj)`, and the
//! residue of the class of an invariant `p` is represented by `(f_k)` where
//! `p(x+y) - (-1)^d p(x-y) = Σ_k x_k f_k`.
//!
//! Simple roots are 0-based in the API and 1-based in variable names.

mod presentation;
mod roots;
mod uv;

use thiserror::Error;

use crate::poly::ParsePolyError;

pub use presentation::{
    a_lambda, beta, cokernel_degree, cokernel_presentation, decompose_beta, equivariant_cokernel,
    hypothesis_warning, is_in_a, nonequivariant_cokernel, recompose, residue_class, ALambdaSpace,
    CokernelDegree, CokernelMode, CokernelPresentation, ResidueClass, DEFAULT_DEGREE_BOUND,
};
pub use roots::{invariant_basis, RootSystemData, WeylElement, CLOSURE_CAP, MAX_RANK};
pub use uv::{display_a1_translation, uv_names, xy_names, UVPolynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WonderfulError {
    #[error("Weyl group closure exceeded {cap} elements")]
    NonFiniteClosure { cap: usize },
    #[error("polynomial is not Weyl-invariant")]
    NotInvariant,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("polynomial has a monomial divisible by no x_i")]
    NotDivisible,
    #[error("degree {needed} exceeds the degree bound {bound}")]
    DegreeBoundTooSmall { needed: usize, bound: usize },
    #[error("no decomposition with f_k in A_k exists in this degree")]
    NoDecompositionInA,
    #[error("invalid Cartan matrix: {0}")]
    InvalidCartan(String),
    #[error("unknown root system type {0:?} (expected A1, A2 or B2)")]
    UnknownType(String),
    #[error("root system file: {0}")]
    Json(String),
    #[error(transparent)]
    Parse(#[from] ParsePolyError),
}

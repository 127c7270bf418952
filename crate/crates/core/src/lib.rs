//! Exact computations around the Čech edge map for classifying spaces.
//!
//! * [`lie`], [`exterior`], [`cosimplicial`], [`transgression`]: from an invariant polynomial
//!   on a Lie algebra to a Chevalley–Eilenberg representative of its transgression.
//! * [`spectral`]: finite bicomplexes over Q, their spectral sequences and the cone lemma.
//! * [`wonderful`]: residues of primitive classes on wonderful compactifications through
//!   the polynomial presentation of the boundary cohomology.

pub mod cosimplicial;
pub mod exterior;
pub mod lie;
pub mod linalg;
pub mod poly;
pub mod rational;
pub mod spectral;
pub mod transgression;
pub mod wonderful;

pub use rational::Q;

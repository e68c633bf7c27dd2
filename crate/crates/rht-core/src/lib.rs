//! Exact-arithmetic toolkit for commutative differential graded algebras.
//!
//! The crate is organized bottom-up:
//!
//! * [`scalar`] — arbitrary-precision rational coefficients.
//! * [`graded`] — free graded-commutative algebras: generators, monomials
//!   with Koszul signs, degreewise bases, elements.
//! * [`linalg`] — sparse exact linear algebra over the rationals (RREF,
//!   kernels, images, canonical subspace bases).
//! * [`cdga`] — differentials, Leibniz rule, DG-ideal quotients, tensor
//!   products.
//! * [`finite`] — finite multiplication-table algebras with a fundamental
//!   class, associativity repair, and Poincaré-duality checks.
//! * [`cohomology`] — cocycles, coboundaries, Betti numbers, class
//!   coordinates.
//! * [`model`] — Sullivan minimal models of simply-connected targets.
//! * [`formality`] — s-formality checks, certified exactness, Poincaré
//!   descent, triple Massey products.
//! * [`joyce`] — a complete built-in case study: formality of a compact
//!   7-manifold with holonomy G2 obtained by resolving T^7/Γ.
//! * [`textio`] / [`report`] — the `.cdga` / `.galg` / `.cert` file formats
//!   and deterministic JSON reports.

pub mod scalar;
pub mod graded;
pub mod linalg;
pub mod cdga;
pub mod finite;
pub mod cohomology;
pub mod model;
pub mod formality;
pub mod joyce;
pub mod textio;
pub mod report;

pub use crate::scalar::Scalar;
pub use crate::graded::{AlgebraContext, Element, GeneratorDecl, Monomial};
pub use crate::linalg::{MatrixQ, SubspaceBasis};
pub use crate::cdga::Cdga;
pub use crate::finite::FiniteGradedAlgebra;

//! Exact-arithmetic engine for invariant Courant algebroids over Lie groups.
//!
//! All computation happens in the left-invariant frame of a Lie group, so
//! geometric operators reduce to multilinear algebra over the Lie algebra,
//! and every scalar is an exact rational. Equality checks are exact; there
//! are no tolerances anywhere.
//!
//! Layers, bottom to top:
//! - [`rat`], [`linalg`]: rational scalars, dense exact matrices.
//! - [`liealg`]: Lie algebras with structure-constant validation, Killing
//!   form, Cartan three-form, Chevalley-Eilenberg cohomology.
//! - [`tensor`]: dense rational tensors and the operators built on them
//!   (cyclic Bianchi sum, alternation, squares of three-forms, invariant
//!   subspaces).
//! - [`algebroid`]: the transitive Courant algebroid TM ⊕ ad P in its
//!   invariant normal form (g, H, fiber algebra, ω, F), Dorfman bracket,
//!   axiom checks.
//! - [`genconn`]: generalized connections in block normal form, torsion
//!   oracle and its closed-form residuals, the Bismut-type family.
//! - [`curvature`]: classical Levi-Civita/Bismut layer, generalized
//!   curvature (naive oracle and closed-form blocks), flatness and its
//!   consequences.
//! - [`modspace`]: the symmetric-alternating Koszul-type sequence, homotopy
//!   preimages, and the moduli of flat Levi-Civita generalized connections.
//! - [`model`], [`report`]: JSON model files and deterministic reports for
//!   the `courant` CLI.

pub mod algebroid;
pub mod curvature;
pub mod driver;
pub mod genconn;
pub mod liealg;
pub mod linalg;
pub mod model;
pub mod modspace;
pub mod rat;
pub mod report;
pub mod tensor;

//! Exact B-model computations for local mirror symmetry on two-dimensional reflexive
//! polytopes: GKZ and Picard–Fuchs operators, Frobenius solutions and mirror maps,
//! Yukawa couplings (Wronskian, ODE and Jacobian-ring routes), filtration tables,
//! and genus ≤ 2 amplitudes from the holomorphic anomaly recursion.

pub mod arith;
pub mod check;
pub mod error;
pub mod gkz;
pub mod hae;
pub mod jacobian;
pub mod oracle;
pub mod polytope;
pub mod registry;
pub mod yukawa;

pub use error::{Error, Result};

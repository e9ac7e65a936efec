//! Exact construction of the transfer matrix, the two Baxter Q-operators and
//! the Hamiltonian of the open spin-1/2 XXX chain with diagonal boundary
//! fields, together with a catalog of identity checks, a truncated Fock-space
//! oracle and a numeric Bethe-root pipeline.
//!
//! Tensor factors are always ordered `auxiliary ⊗ site 1 ⊗ … ⊗ site L`;
//! basis index bit `L - i` is set when site `i` carries a down spin.

pub mod boundary;
pub mod bulk;
pub mod error;
pub mod exact;
pub mod fock;
pub mod io;
pub mod operators;
pub mod params;
pub mod spectral;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use exact::{ExactPolynomial, Matrix, Rational, RationalFunction, Scalar};
pub use operators::{OperatorKind, QuantumOperator, SpinBasis};
pub use params::{ChainParams, Sign};

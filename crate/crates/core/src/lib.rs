//! Exact simulation of quantum non-locality games, communication-complexity
//! protocols and non-local boxes, together with the classical oracles and
//! lower-bound tooling used to cross-check them.
//!
//! Everything is deterministic given a seed. Quantum states are dense
//! amplitude vectors; qubit 0 is the most significant bit of a basis index,
//! and in two-party states Alice's register sits above Bob's.

pub mod bell;
pub mod bits;
pub mod ccproto;
pub mod detect;
pub mod error;
pub mod field;
pub mod games;
pub mod lbtools;
pub mod nlbox;
pub mod par;
pub mod qstate;
pub mod rng;
pub mod smp;

pub use bits::Bits;
pub use error::{Error, Result};
pub use par::Execution;
pub use rng::SeededRng;

/// Tolerance for contract checks (normalization, unitarity, completeness).
pub const CONTRACT_TOL: f64 = 1e-9;
/// Tolerance for algebraic identities between exactly representable gates.
pub const IDENTITY_TOL: f64 = 1e-12;

//! Exact resonance dynamics of a qubit coupled to a single bosonic mode in a
//! coherent state: RWA propagator, reduced density matrix, time-dependent
//! pointer states, closed-form coherence approximations and an independent
//! ODE oracle.

pub mod acceptance;
pub mod cli;
pub mod closedform;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod oracle;
pub mod pointer;
pub mod propagator;

pub use error::{Error, Result};

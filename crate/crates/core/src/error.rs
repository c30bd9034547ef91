use thiserror::Error;

use crate::pointer::PointerSign;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The Fock cutoff leaves too much coherent-state weight outside the basis.
    #[error("truncation n_max = {n_max} too small: tail mass {tail_mass:e} exceeds {limit:e}")]
    TruncationTooSmall { n_max: usize, tail_mass: f64, limit: f64 },

    /// Weight too close to the cutoff for the tridiagonal propagator.
    #[error("boundary leakage: relative weight {weight:e} at Fock index {index} (n_max = {n_max})")]
    BoundaryLeakage { index: usize, n_max: usize, weight: f64 },

    #[error("mismatched truncation: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    /// G(t) is singular: the pointer state momentarily lies along |a> or |b>.
    #[error("G(t) pole on the {sign:?} branch at theta = {theta}")]
    Pole { sign: PointerSign, theta: f64 },

    #[error("degenerate branch: |A| = 0")]
    DegenerateBranch,

    #[error("|q| undefined for rho11 = {rho11} (sigma_z eigenstate)")]
    UndefinedRatio { rho11: f64 },

    #[error("integrator did not converge after {halvings} step halvings (last difference {difference:e}, tolerance {tolerance:e})")]
    IntegratorFailure { halvings: u32, difference: f64, tolerance: f64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors raised by numerical guards (truncation, leakage, integrator,
    /// singular configurations) as opposed to bad input.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::TruncationTooSmall { .. }
                | Error::BoundaryLeakage { .. }
                | Error::TruncationMismatch { .. }
                | Error::Pole { .. }
                | Error::DegenerateBranch
                | Error::UndefinedRatio { .. }
                | Error::IntegratorFailure { .. }
        )
    }
}

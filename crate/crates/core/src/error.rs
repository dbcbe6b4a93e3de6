use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid lattice size {0}: need N >= 1")]
    InvalidSize(usize),

    #[error("intractable size: {what} exceeds limit {limit}")]
    Intractable { what: &'static str, limit: u64 },

    #[error("spin configuration covers {got} sites, lattice has {expected}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("invalid path word: {0}")]
    InvalidPath(&'static str),

    #[error("accumulated turning phase is not real ({quarter_turns} quarter turns)")]
    PhaseNotReal { quarter_turns: i64 },

    #[error("quadrature resolution {resolution} too small, need at least {required}")]
    InsufficientResolution { resolution: usize, required: usize },

    #[error("nonpositive determinant {0:e}: singular point")]
    Singular(f64),

    #[error("outside convergence domain: {0}")]
    OutsideDomain(&'static str),

    #[error("divergent at the critical point")]
    Divergent,

    #[error("integer coefficient overflow")]
    Overflow,

    #[error("non-real result: imaginary residue {0:e}")]
    ImaginaryResidue(f64),

    #[error("quadrature did not converge, last refinement delta {delta:e}")]
    NoConvergence { delta: f64 },
}

//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors produced by the algebra and search layers.
///
/// Everything here is a caller-visible condition, not an internal failure:
/// mixing moduli, asking for an inverse that does not exist, violating a
/// constructor's arithmetic precondition, or running a search past its
/// element cap.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    /// Two values from different rings ℤ/mℤ were combined.
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),

    /// Inversion of a non-unit. For matrices `value` is the determinant.
    #[error("not invertible modulo {modulus}: gcd({value}, {modulus}) > 1")]
    NonInvertible { value: u64, modulus: u64 },

    /// A reduction ℤ/mℤ → ℤ/nℤ was requested with n ∤ m, or an element
    /// order not dividing the modulus was requested.
    #[error("{0} does not divide {1}")]
    NonDivisor(u64, u64),

    /// Modulus outside 2..=65535. The upper bound exists so a matrix packs
    /// into four 16-bit lanes of a u64.
    #[error("modulus {0} outside supported range 2..=65535")]
    UnsupportedModulus(u64),

    /// A closure or census grew past its element cap. The partial result is
    /// discarded; nothing is returned.
    #[error("search exceeded size cap of {cap} elements")]
    SizeCapExceeded { cap: u64 },

    /// A constructor or subcommand was called outside its domain, e.g. a
    /// group family only defined for p ≡ 1 (mod 3).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Subgroup classification was requested for a non-solvable ambient too
    /// large for the exhaustive fallback.
    #[error("ambient of order {order} is not solvable and exceeds the exhaustive-search bound {bound}")]
    NotSolvableAndTooLarge { order: u64, bound: u64 },
}

impl AlgebraError {
    /// Process exit code the command-line tool maps this error to.
    pub fn exit_code(&self) -> u8 {
        match self {
            AlgebraError::SizeCapExceeded { .. }
            | AlgebraError::NotSolvableAndTooLarge { .. } => 3,
            _ => 2,
        }
    }
}

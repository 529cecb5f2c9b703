use alloc::string::String;
use core::fmt;

/// Errors reported by constellation construction, assembly, and the solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Unsupported modulation kind / order combination.
    UnsupportedModulation(String),
    /// Constellation geometry cannot express a DPCIR (singular normal
    /// matrix with an active weight, or fewer than two distinct neighbors).
    UnsupportedGeometry(String),
    /// A point index outside `[0, M)`.
    InvalidPointIndex { index: usize, order: usize },
    /// Instance fields have inconsistent lengths or violate `K <= N`.
    InvalidInstance(String),
    /// Candidate support columns are linearly dependent.
    DependentSupport { candidate_rank: usize, candidate_len: usize },
    /// Active-set iteration cap exceeded; carries the best iterate found.
    IterationCap {
        iterations: usize,
        best: crate::nnls::NnlsSolution,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnsupportedModulation(msg) => write!(f, "unsupported modulation: {msg}"),
            Error::UnsupportedGeometry(msg) => write!(f, "unsupported geometry: {msg}"),
            Error::InvalidPointIndex { index, order } => {
                write!(f, "point index {index} out of range for order {order}")
            }
            Error::InvalidInstance(msg) => write!(f, "invalid instance: {msg}"),
            Error::DependentSupport {
                candidate_rank,
                candidate_len,
            } => write!(
                f,
                "candidate support columns are linearly dependent (rank {candidate_rank} < {candidate_len})"
            ),
            Error::IterationCap { iterations, .. } => {
                write!(f, "active-set iteration cap of {iterations} exceeded")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure mode of the reducers and their supporting modules.
///
/// The randomized reducers report exhaustion (`NotFound`, `ActiveExhausted`,
/// `SingularBasisPersistent`, `GiveUp`) rather than returning an unverified
/// answer; callers escalate to the deterministic reducer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index {index} out of range for {len} atoms")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("atom {0} was flagged as a zero atom and has no scaling factor")]
    ZeroKappa(usize),

    #[error("weight {weight:e} at atom {index} is below the clipping threshold")]
    NegativeWeight { index: usize, weight: f64 },

    #[error("cone basis is numerically singular (pivot ratio {ratio:e})")]
    SingularBasis { ratio: f64 },

    #[error("swapping atom {candidate} into slot {slot} makes the basis singular")]
    DegenerateSwap { slot: usize, candidate: usize },

    #[error("atom {0} is not in the negative cone of the basis")]
    NotInNegativeCone(usize),

    #[error("no candidate atoms left to select from")]
    EmptyActive,

    #[error("no negative-cone hit within {tau} iterations")]
    NotFound { tau: usize },

    #[error("active set exhausted after {tau} iterations")]
    ActiveExhausted { tau: usize },

    #[error("every sampled cone basis was singular ({attempts} attempts)")]
    SingularBasisPersistent { attempts: usize },

    #[error("gave up after {resets} resets")]
    GiveUp { resets: usize },

    #[error("woodbury inner matrix is numerically singular")]
    SingularPerturbation,

    #[error("bad group count {groups} for {len} atoms")]
    BadGroupCount { groups: usize, len: usize },

    #[error("reduced normal equations are rank deficient")]
    RankDeficient,

    #[error("instance too large for exhaustive enumeration ({atoms} atoms in dimension {dim})")]
    TooLarge { atoms: usize, dim: usize },

    #[error("unknown reducer `{0}`")]
    UnknownReducer(String),
}

impl Error {
    /// True for the failures that a fallback strategy is expected to absorb.
    pub fn is_escalation(&self) -> bool {
        matches!(
            self,
            Error::NotFound { .. }
                | Error::ActiveExhausted { .. }
                | Error::SingularBasisPersistent { .. }
                | Error::GiveUp { .. }
        )
    }
}

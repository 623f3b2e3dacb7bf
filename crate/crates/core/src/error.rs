use thiserror::Error;

/// Errors raised by the set-family operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ground set must contain at least one atom")]
    EmptyGround,

    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("set {0:?} is not a member of the family")]
    UnknownMember(Vec<String>),

    #[error("duplicate member {0:?}")]
    DuplicateMember(Vec<String>),

    #[error("the empty set cannot be a family member")]
    EmptyMember,

    #[error("operands live on different ground sets")]
    GroundMismatch,

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("resource limit exceeded: {what} needs {needed}, limit is {limit}")]
    Resource {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("invalid envelope: {0:?} is not contained in its envelope {1:?}")]
    InvalidEnvelope(Vec<String>, Vec<String>),

    #[error("condition (b) fails: {s:?} \\ {t:?} is not a disjoint union of members")]
    ConditionBFailed { s: Vec<String>, t: Vec<String> },

    #[error("invalid epsilon: {0} (must be > 0)")]
    InvalidEpsilon(String),

    #[error("invalid dual combination: {0}")]
    InvalidCombo(String),

    #[error("vector #{index} lies outside the unit ball (norm_sq = {norm_sq})")]
    NotInUnitBall { index: usize, norm_sq: String },

    #[error("weight {0} is outside (0, 1]")]
    InvalidWeight(String),

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("no stratum assigned to member {0:?}")]
    MissingStratum(Vec<String>),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("gamma atom `{0}` is not in the support of any delta")]
    UncoveredGamma(String),

    #[error("delta `{0}` has empty support")]
    EmptySupport(String),

    #[error("index {index} out of range (at most {max})")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn resource(what: &'static str, needed: impl Into<u128>, limit: impl Into<u128>) -> Self {
        Error::Resource {
            what,
            needed: needed.into(),
            limit: limit.into(),
        }
    }

    /// True for budget violations; the CLI maps these to their own exit status.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

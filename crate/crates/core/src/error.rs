use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed token at byte {offset}: {token:?}")]
    MalformedToken { offset: usize, token: String },

    #[error("arc label {label} is used {count} times, expected exactly 2")]
    LabelArity { label: u64, count: usize },

    #[error("universe is disconnected")]
    Disconnected,

    #[error("rotation system is not spherical: {faces} faces for {crossings} crossings (expected {})", crossings + 2)]
    NonSpherical { crossings: usize, faces: usize },

    #[error("schema violation: {0}")]
    SchemaViolation(String),

    #[error("nugatory crossings present: {0:?}")]
    NugatoryPresent(Vec<usize>),

    #[error("diagram is not prime-like")]
    NotPrimeLike,

    #[error("starred faces {first} and {second} are not adjacent")]
    StarsNotAdjacent { first: usize, second: usize },

    #[error("periphery violation at vertex {vertex:?}: {reason}")]
    PeripheryViolation { vertex: Option<usize>, reason: String },

    #[error("matching enumeration exceeded the cap of {0}")]
    CapExceeded(usize),

    #[error("graph has no perfect matching")]
    NoPerfectMatching,

    #[error("clock theorem violated: {0}")]
    ClockTheoremViolation(String),

    #[error("flip graph has {nodes} states, above the all-pairs bound {bound}")]
    TooLarge { nodes: usize, bound: usize },

    #[error("matchings are not the extremal states: {0}")]
    NotExtremal(String),

    #[error("breaking cutvertex {cutvertex}: found {odd} odd components, expected exactly 1")]
    OddComponentAssertFailed { cutvertex: usize, odd: usize },

    #[error("grid dimensions must be odd, got {m}x{n}")]
    EvenDimension { m: usize, n: usize },

    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Coarse classification used by front ends to pick exit statuses.
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::MalformedToken { .. }
            | Error::LabelArity { .. }
            | Error::Disconnected
            | Error::NonSpherical { .. }
            | Error::SchemaViolation(_)
            | Error::UnknownFixture(_)
            | Error::EvenDimension { .. }
            | Error::Json(_) => ErrorKind::Parse,
            Error::NugatoryPresent(_)
            | Error::NotPrimeLike
            | Error::StarsNotAdjacent { .. }
            | Error::NoPerfectMatching
            | Error::TooLarge { .. } => ErrorKind::Precondition,
            Error::CapExceeded(_) => ErrorKind::Cap,
            Error::PeripheryViolation { .. }
            | Error::ClockTheoremViolation(_)
            | Error::NotExtremal(_)
            | Error::OddComponentAssertFailed { .. } => ErrorKind::TheoremViolation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Precondition,
    Cap,
    TheoremViolation,
}

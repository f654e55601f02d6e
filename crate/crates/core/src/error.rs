use thiserror::Error;

/// Errors raised by the solver.
///
/// [`Error::name`] gives a stable machine-readable identifier, used by the
/// command-line tool when reporting failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("player {player} has value {value} which is not below the threshold {threshold}")]
    DominantPlayer { player: usize, value: String, threshold: String },
    #[error("total value {total} is below the threshold {threshold}")]
    InsufficientTotal { total: String, threshold: String },
    #[error("malformed graph: {0}")]
    MalformedGraph(String),
    #[error("parameter {0} must be positive")]
    NonPositiveParameter(&'static str),
    #[error("no connected subset reaches the threshold")]
    NoEligibleConsortium,
    #[error("{n} players exceeds the enumeration limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("no strong equilibrium produces a winner")]
    NoStrongEquilibriumWithWinner,
    #[error("starting consortium {0} is not eligible")]
    IneligibleStart(String),
    #[error("instance has {0} nonzero values, expected exactly 3")]
    NotThreeNonzero(usize),
    #[error("no nonzero player outside the winner belongs to the social optimum")]
    NoOutsideNonzero,
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("invalid consortium: {0}")]
    InvalidConsortium(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("arithmetic overflow while scaling values")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn name(&self) -> &'static str {
        match self {
            Error::DominantPlayer { .. } => "DominantPlayer",
            Error::InsufficientTotal { .. } => "InsufficientTotal",
            Error::MalformedGraph(_) => "MalformedGraph",
            Error::NonPositiveParameter(_) => "NonPositiveParameter",
            Error::NoEligibleConsortium => "NoEligibleConsortium",
            Error::TooLarge { .. } => "TooLarge",
            Error::NoStrongEquilibriumWithWinner => "NoStrongEquilibriumWithWinner",
            Error::IneligibleStart(_) => "IneligibleStart",
            Error::NotThreeNonzero(_) => "NotThreeNonzero",
            Error::NoOutsideNonzero => "NoOutsideNonzero",
            Error::BadParams(_) => "BadParams",
            Error::InvalidConsortium(_) => "InvalidConsortium",
            Error::InvalidProfile(_) => "InvalidProfile",
            Error::Overflow => "Overflow",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

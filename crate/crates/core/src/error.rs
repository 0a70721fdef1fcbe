use thiserror::Error;

/// Errors raised by the library. Domain failures map to CLI exit code 1,
/// I/O and parse failures to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} has {count} darts, expected 4")]
    NonQuadrivalent { vertex: i64, count: usize },
    #[error("bad edge involution at dart {dart}: {reason}")]
    BadInvolution { dart: u64, reason: &'static str },
    #[error("dart {dart} appears in an edge but in no vertex rotation")]
    DanglingDart { dart: u64 },
    #[error("dart {dart} appears in more than one vertex rotation")]
    DuplicateDart { dart: u64 },
    #[error("the map has no vertices")]
    EmptyMap,
    #[error("the map is not connected")]
    Disconnected,

    #[error("expected {expected} entries, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("coorientation is not Eulerian at vertex {vertex}")]
    NotEulerian { vertex: usize },
    #[error("dual walk is not closed: {0}")]
    NotAClosedWalk(String),
    #[error("coorientation is not acyclic")]
    NotAcyclic,
    #[error("face {face} is not a sink")]
    NotASink { face: usize },
    #[error("order is inconsistent with the coorientation: {0}")]
    OrderInconsistent(String),
    #[error("invalid representation: {0}")]
    BadRepresentation(String),

    #[error("class parity differs from the multi-curve parity")]
    ParityMismatch,
    #[error("cochain is not a cocycle: nonzero sum {sum} around vertex {vertex}")]
    NotCocycle { vertex: usize, sum: i64 },
    #[error("coorientations are not cohomologous")]
    NotCohomologous,
    #[error("no Eulerian coorientation realizes this class")]
    ClassEmpty,

    #[error("no routing for corner of face {face} at vertex {vertex}")]
    UnsupportedCorner { face: usize, vertex: usize },

    #[error("duplicate coordinate {0}")]
    DuplicateCoordinate(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("start point lies on the multi-curve")]
    StartOnGamma,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of reading or decoding inputs.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Parse(_))
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonQuadrivalent { .. } => "NonQuadrivalent",
            Error::BadInvolution { .. } => "BadInvolution",
            Error::DanglingDart { .. } => "DanglingDart",
            Error::DuplicateDart { .. } => "DuplicateDart",
            Error::EmptyMap => "EmptyMap",
            Error::Disconnected => "Disconnected",
            Error::WrongLength { .. } => "WrongLength",
            Error::NotEulerian { .. } => "NotEulerian",
            Error::NotAClosedWalk(_) => "NotAClosedWalk",
            Error::NotAcyclic => "NotAcyclic",
            Error::NotASink { .. } => "NotASink",
            Error::OrderInconsistent(_) => "OrderInconsistent",
            Error::BadRepresentation(_) => "BadRepresentation",
            Error::ParityMismatch => "ParityMismatch",
            Error::NotCocycle { .. } => "NotCocycle",
            Error::NotCohomologous => "NotCohomologous",
            Error::ClassEmpty => "ClassEmpty",
            Error::UnsupportedCorner { .. } => "UnsupportedCorner",
            Error::DuplicateCoordinate(_) => "DuplicateCoordinate",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::Overflow(_) => "Overflow",
            Error::StartOnGamma => "StartOnGamma",
            Error::Io(_) => "Io",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

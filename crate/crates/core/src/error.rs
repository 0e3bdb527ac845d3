use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed pair encoding")]
    MalformedPair,
    #[error("malformed instance: {0}")]
    MalformedInstance(String),
    #[error("value exceeds magnitude cap 2^48")]
    Overflow,
    #[error("polynomial degree {0} exceeds cap 8")]
    DegreeCap(usize),
    #[error("scale exceeded: {0}")]
    ScaleExceeded(String),
    #[error("oracle step budget exhausted")]
    OracleTimeout,
    #[error("parameter mismatch: artifact compiled for {expected}, instance has {got}")]
    ParamMismatch { expected: String, got: String },
    #[error("online output of length {len} lies outside the table (magnitude {magnitude})")]
    OutOfTable { len: usize, magnitude: usize },
    #[error("incompatible endpoints: {0}")]
    IncompatibleEndpoints(String),
    #[error("no table entry for parameter {0}")]
    MissingTableEntry(String),
    #[error("length audit failure: {0}")]
    LengthAuditFailure(String),
    #[error("pair language {0} has no slice polynomial")]
    MissingSlicePoly(String),
    #[error("mixed reduction source is not of the form {{e}} x Q")]
    SourceShapeMismatch,
    #[error("invalid query set: {0}")]
    InvalidQuerySet(String),
    #[error("language {0} cannot enumerate instances")]
    NotEnumerable(String),
    #[error("scheme {0} does not satisfy the precondition: {1}")]
    SchemePrecondition(String, String),
    #[error("sparse table hash collision between distinct keys")]
    HashCollision,
    #[error("no rejecting sentinel for pair language {0}")]
    NoRejectingSentinel(String),
    #[error("unknown {kind} id {id:?}")]
    UnknownId { kind: &'static str, id: String },
    #[error("artifact: {0}")]
    Artifact(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::MalformedInstance(msg.into())
    }

    pub(crate) fn scale(msg: impl Into<String>) -> Self {
        Error::ScaleExceeded(msg.into())
    }
}

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite coordinate ({x}, {y})")]
    NonFinite { x: f64, y: f64 },

    #[error("degenerate segment: endpoints coincide")]
    DegenerateSegment,

    #[error("degenerate ray: target coincides with origin")]
    DegenerateRay,

    #[error("angle undefined: an arm has zero length")]
    DegenerateAngle,

    #[error("concentric circles of equal radius intersect in infinitely many points")]
    InfiniteIntersection,

    #[error("invalid radius {0}")]
    InvalidRadius(f64),

    #[error("cone arc does not exist for this configuration")]
    NoArc,

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("point ({x}, {y}) lies outside the unit square")]
    OutsideUnitSquare { x: f64, y: f64 },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid density spec: {0}")]
    InvalidDensity(String),

    #[error("vertex index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("TSPLIB: unsupported {key}: {value}")]
    TsplibUnsupported { key: String, value: String },

    #[error("TSPLIB line {line}: {message}")]
    TsplibMalformed { line: usize, message: String },

    #[error("instance size {n} outside supported range {min}..={max}")]
    SizeOutOfRange { n: usize, min: usize, max: usize },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("i/o: {0}")]
    Io(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by graph construction, enrichment solving, and the numeric pipelines.
#[derive(Debug, Error)]
pub enum MagError {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(String, String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("vertices {0} and {1} lie in different weak components")]
    PathNotFound(String, String),
    #[error("degenerate datum on {0}: values must be nonzero")]
    Degenerate(String),
    #[error("cocycle violated on triple ({0}, {1}, {2})")]
    CocycleViolation(String, String, String),
    #[error("no consistent potential on arc ({0}, {1})")]
    Characterization(String, String),
    #[error("kernel coefficient count {got} does not match basis dimension {want}")]
    CoefficientCount { got: usize, want: usize },
    #[error("size map {size_map} is incompatible with a {enrichment} enrichment")]
    SizeMapMismatch {
        size_map: &'static str,
        enrichment: &'static str,
    },
    #[error("matrix is singular")]
    Singular,
    #[error("nonpositive entry {value} at ({row}, {col}) has no logarithm")]
    LogDomain { row: usize, col: usize, value: f64 },
    #[error("weighting and coweighting sums disagree: {0} vs {1}")]
    MagnitudeMismatch(String, String),
    #[error("malformed skeleton: {0}")]
    Skeleton(String),
    #[error("line {0} is not a statement line")]
    NotAStatement(usize),
    #[error("dimension cocycle infeasible on arc ({src}, {dst}): induced value {value}")]
    DimInfeasible {
        src: String,
        dst: String,
        value: String,
    },
    #[error("Kronecker division of a {crows}x{ccols} matrix by a {drows}x{dcols} factor is undefined")]
    KroneckerDivision {
        crows: usize,
        ccols: usize,
        drows: usize,
        dcols: usize,
    },
    #[error("matrix shapes do not compose: {0}")]
    Shape(String),
    #[error("composition is path dependent on triple ({0}, {1}, {2})")]
    PathDependence(String, String, String),
    #[error("stochastic matrices over digraphs with cycles are unsupported; input must be a DAG")]
    NotADag,
    #[error("invalid channel: {0}")]
    Channel(String),
    #[error("Blahut-Arimoto did not converge within {iterations} iterations (bracket {bracket:.3e})")]
    Convergence { iterations: usize, bracket: f64 },
    #[error("Muroga formula invalid: v has a nonpositive component ({0:.6e})")]
    MurogaInvalid(f64),
    #[error("sample of size {0} is too small (need at least 8)")]
    SampleTooSmall(usize),
    #[error("sample is constant; normality test undefined")]
    DegenerateSample,
    #[error("generated graph is empty")]
    EmptyGraph,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, MagError>;

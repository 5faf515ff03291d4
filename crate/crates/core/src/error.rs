use thiserror::Error;

use crate::lattice::LatticeError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("vertex {vertex} has valence {valence}, expected 3")]
    NotTrivalent { vertex: String, valence: usize },
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("operation supports trees only (first Betti number {b1})")]
    TreeOnly { b1: usize },
    #[error("non-generic line configuration for combinatorial type {0}")]
    NonGenericConfig(String),
    #[error("kappa {kappa} exceeds the enumerator cap {cap}")]
    KappaCap { kappa: usize, cap: usize },
    #[error("not a boundary configuration: {0}")]
    NotBoundaryConfig(String),
    #[error("no corner basis: {0}")]
    NoBasis(String),
    #[error("delta {0} changes the combinatorial type of the domain")]
    DeltaTooLarge(String),
    #[error("the domain is empty")]
    EmptyDomain,
    #[error("domain is unbounded")]
    UnboundedDomain,
    #[error("point {0} is interior to the domain")]
    Interior(String),
    #[error("inconsistent rotational momenta: {0}")]
    InconsistentMomenta(String),
    #[error("split edge carries zero rotational momentum")]
    SplitDegenerate,
    #[error("curve is not even primitive: {0}")]
    NotEvenPrimitive(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("self-intersection locus is not finite: {0}")]
    NonFiniteSigma(String),
    #[error("vertex {0} has collinear edges")]
    DegenerateVertex(String),
    #[error("parse error at {path}:{line}:{column}: {message}")]
    Parse { path: String, line: usize, column: usize, message: String },
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Lattice(e) => e.code(),
            Error::NotTrivalent { .. } => "NOT_TRIVALENT",
            Error::Degenerate(_) => "DEGENERATE",
            Error::TreeOnly { .. } => "TREE_ONLY",
            Error::NonGenericConfig(_) => "NON_GENERIC_CONFIG",
            Error::KappaCap { .. } => "KAPPA_CAP",
            Error::NotBoundaryConfig(_) => "NOT_BOUNDARY_CONFIG",
            Error::NoBasis(_) => "NO_BASIS",
            Error::DeltaTooLarge(_) => "DELTA_TOO_LARGE",
            Error::EmptyDomain => "EMPTY_DOMAIN",
            Error::UnboundedDomain => "UNBOUNDED_DOMAIN",
            Error::Interior(_) => "INTERIOR",
            Error::InconsistentMomenta(_) => "INCONSISTENT_MOMENTA",
            Error::SplitDegenerate => "SPLIT_DEGENERATE",
            Error::NotEvenPrimitive(_) => "NOT_EVEN_PRIMITIVE",
            Error::InternalInconsistency(_) => "INTERNAL_INCONSISTENCY",
            Error::NonFiniteSigma(_) => "NON_FINITE_SIGMA",
            Error::DegenerateVertex(_) => "DEGENERATE_VERTEX",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::Schema { .. } => "SCHEMA_ERROR",
            Error::InvalidInput(_) => "INVALID_INPUT",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// One failed check inside a report-valued operation.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Issue {
    pub code: String,
    pub location: String,
    pub message: String,
}

impl Issue {
    pub fn new(code: &str, location: impl Into<String>, message: impl Into<String>) -> Self {
        Issue { code: code.to_string(), location: location.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, serde::Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn from_issues(issues: Vec<Issue>) -> Self {
        ValidationReport { ok: issues.is_empty(), issues }
    }

    pub fn has(&self, code: &str) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }
}

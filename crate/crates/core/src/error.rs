use thiserror::Error;

/// Every failure the library can report.
///
/// Variants split into two families: input problems (malformed data, shape
/// mismatches, violated preconditions) and mathematical failures (a claimed
/// identity does not hold). [`Error::is_input_error`] tells them apart; the
/// CLI maps the two families onto distinct exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("multiplication table entry ({row}, {col}) = {value} is out of range for order {order}")]
    TableOutOfRange { row: usize, col: usize, value: usize, order: usize },
    #[error("multiplication table is not square or is empty")]
    TableShape,
    #[error("table is not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NonAssociative { a: usize, b: usize, c: usize },
    #[error("table has no two-sided identity element")]
    NoIdentity,
    #[error("element {element} has no two-sided inverse")]
    NoInverse { element: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("group mismatch: operands live over different groups")]
    GroupMismatch,
    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("span is not invariant under group element {element}")]
    NotInvariant { element: usize },
    #[error("character value on class {class} is not rational")]
    IrrationalCharacter { class: usize },

    #[error("truncation window is empty")]
    EmptyWindow,
    #[error("invalid truncation window: {0}")]
    BadWindow(String),
    #[error("weight must be a positive rational, got {0}")]
    BadWeight(String),

    #[error("not a chain complex: d_{degree} * d_{next} has nonzero entry at ({row}, {col})", next = degree + 1)]
    NotAComplex { degree: i64, row: usize, col: usize },
    #[error("not a chain map: square at degree {degree} fails at ({row}, {col})")]
    NotAChainMap { degree: i64, row: usize, col: usize },
    #[error("homology needs a field or group-ring complex; specialize or truncate the Laurent complex first")]
    LaurentRing,
    #[error("specialization point must be nonzero")]
    ZeroLambda,
    #[error("extended complex marker violated: {0}")]
    SubcomplexMarker(String),

    #[error("depth {depth} leaves no interior band after slack {slack}")]
    DepthTooSmall { depth: usize, slack: usize },
    #[error("weight {k} is not below the certified threshold {threshold}")]
    WeightAboveThreshold { k: f64, threshold: f64 },
    #[error("{identity} identity fails at homological degree {degree}, z-degree {z_degree}")]
    IdentityFailed { identity: &'static str, degree: i64, z_degree: i64 },
    #[error("the z^-1 side needs a homotopy inverse of h")]
    MissingInverse,
    #[error("supplied inverse does not satisfy h*g = I at degree {degree}")]
    InverseMismatch { degree: i64 },

    #[error("element is not idempotent")]
    NotIdempotent,
    #[error("idempotent is not central")]
    NotCentral,
    #[error("scale {0} does not clear the denominators of the idempotent")]
    BadScale(String),
    #[error("truncated differential is not injective at depth {depth}")]
    NotInjective { depth: usize },
    #[error("cokernel character differs between depths {depth} and {next}")]
    TruncationUnstable { depth: usize, next: usize },
    #[error("class mismatch: {0}")]
    ClassMismatch(String),

    #[error("map is zero; threshold is unbounded")]
    ZeroMap,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Short machine-readable code, stable across releases.
    pub fn code(&self) -> &'static str {
        match self {
            Error::TableOutOfRange { .. } => "TableOutOfRange",
            Error::TableShape => "TableShape",
            Error::NonAssociative { .. } => "NonAssociative",
            Error::NoIdentity => "NoIdentity",
            Error::NoInverse { .. } => "NoInverse",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::GroupMismatch => "GroupMismatch",
            Error::Parse { .. } => "Parse",
            Error::NotInvariant { .. } => "NotInvariant",
            Error::IrrationalCharacter { .. } => "IrrationalCharacter",
            Error::EmptyWindow => "EmptyWindow",
            Error::BadWindow(_) => "BadWindow",
            Error::BadWeight(_) => "BadWeight",
            Error::NotAComplex { .. } => "NotAComplex",
            Error::NotAChainMap { .. } => "NotAChainMap",
            Error::LaurentRing => "LaurentRing",
            Error::ZeroLambda => "ZeroLambda",
            Error::SubcomplexMarker(_) => "SubcomplexMarker",
            Error::DepthTooSmall { .. } => "DepthTooSmall",
            Error::WeightAboveThreshold { .. } => "WeightAboveThreshold",
            Error::IdentityFailed { .. } => "IdentityFailed",
            Error::MissingInverse => "MissingInverse",
            Error::InverseMismatch { .. } => "InverseMismatch",
            Error::NotIdempotent => "NotIdempotent",
            Error::NotCentral => "NotCentral",
            Error::BadScale(_) => "BadScale",
            Error::NotInjective { .. } => "NotInjective",
            Error::TruncationUnstable { .. } => "TruncationUnstable",
            Error::ClassMismatch(_) => "ClassMismatch",
            Error::ZeroMap => "ZeroMap",
            Error::InvalidArgument(_) => "InvalidArgument",
        }
    }

    /// True for malformed or unacceptable input, false for a mathematical
    /// failure on well-formed input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::TableOutOfRange { .. }
                | Error::TableShape
                | Error::DimensionMismatch(_)
                | Error::GroupMismatch
                | Error::Parse { .. }
                | Error::EmptyWindow
                | Error::BadWindow(_)
                | Error::BadWeight(_)
                | Error::LaurentRing
                | Error::ZeroLambda
                | Error::DepthTooSmall { .. }
                | Error::WeightAboveThreshold { .. }
                | Error::MissingInverse
                | Error::BadScale(_)
                | Error::ZeroMap
                | Error::InvalidArgument(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

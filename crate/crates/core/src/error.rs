use tdk_linalg::LinalgError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TdkError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("d∘d ≠ 0 on basis element {label} (degree {degree})")]
    DSquared { degree: usize, label: String },
    #[error("Leibniz rule fails on ({a}, {b})")]
    Leibniz { a: String, b: String },
    #[error("product not associative on ({a}, {b}, {c})")]
    Associativity { a: String, b: String, c: String },
    #[error("product not graded-commutative on ({a}, {b})")]
    Commutativity { a: String, b: String },
    #[error("unit does not act as identity on {label}")]
    Unit { label: String },
    #[error("degree-0 part must be Z spanned by the unit: {0}")]
    NotConnected(String),
    #[error("degree {degree} exceeds the truncation bound {bound}")]
    Truncation { degree: usize, bound: usize },
    #[error("{what} is not closed")]
    NotClosed { what: String },
    #[error("torsion in degree {degree} of factor {factor}; product needs torsion-free factors")]
    Torsion { factor: usize, degree: usize },
    #[error("unknown builtin space {0:?}")]
    UnknownBuiltin(String),
    #[error("parameter {name}: {message}")]
    Parameter { name: String, message: String },
    #[error("flux class is not in F^2 (leading part sits in filtration degree {filtration})")]
    NotDualizable { filtration: usize },
    #[error("bundle mismatch: {0}")]
    BundleMismatch(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("matrix is not in O(n,n,Z): {0}")]
    NotOnn(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl TdkError {
    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        TdkError::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            TdkError::Json { .. } => "json",
            TdkError::Schema { .. } => "schema",
            TdkError::DSquared { .. } => "d_squared",
            TdkError::Leibniz { .. } => "leibniz",
            TdkError::Associativity { .. } => "associativity",
            TdkError::Commutativity { .. } => "commutativity",
            TdkError::Unit { .. } => "unit",
            TdkError::NotConnected(_) => "not_connected",
            TdkError::Truncation { .. } => "truncation",
            TdkError::NotClosed { .. } => "not_closed",
            TdkError::Torsion { .. } => "torsion",
            TdkError::UnknownBuiltin(_) => "unknown_builtin",
            TdkError::Parameter { .. } => "parameter",
            TdkError::NotDualizable { .. } => "not_dualizable",
            TdkError::BundleMismatch(_) => "bundle_mismatch",
            TdkError::NoSolution(_) => "no_solution",
            TdkError::Unsupported(_) => "unsupported",
            TdkError::NotOnn(_) => "not_onn",
            TdkError::Linalg(_) => "linalg",
        }
    }

    /// Where the problem was found, when that is more specific than the message.
    pub fn location(&self) -> Option<String> {
        match self {
            TdkError::Json { line, column, .. } => Some(format!("line {line}, column {column}")),
            TdkError::Schema { path, .. } => Some(path.clone()),
            TdkError::DSquared { label, .. } | TdkError::Unit { label } => Some(label.clone()),
            TdkError::Leibniz { a, b } | TdkError::Commutativity { a, b } => {
                Some(format!("({a}, {b})"))
            }
            TdkError::Associativity { a, b, c } => Some(format!("({a}, {b}, {c})")),
            TdkError::NotClosed { what } => Some(what.clone()),
            _ => None,
        }
    }

    /// Prefixes a relative schema path (one starting with `$`) with `path`.
    pub fn at(self, path: &str) -> Self {
        match self {
            TdkError::Schema { path: p, message } if p.starts_with('$') => TdkError::Schema {
                path: format!("{path}{}", &p[1..]),
                message,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, TdkError>;

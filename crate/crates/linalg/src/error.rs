use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}{}", index.map(|i| format!(" (at {i})")).unwrap_or_default())]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
        index: Option<usize>,
    },
    /// A relation generator does not lie in the numerator lattice.
    #[error("subquotient containment fails: relation generator {index} = {element:?} is not in the numerator lattice")]
    NotContained { index: usize, element: Vec<String> },
    /// An ambient vector handed to `reduce` is outside the numerator lattice.
    #[error("vector {element:?} is not an element of the group's numerator lattice")]
    NotInGroup { element: Vec<String> },
    #[error("homomorphism is not well defined: {0}")]
    IllDefinedHom(String),
}

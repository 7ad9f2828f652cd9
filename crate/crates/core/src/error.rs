use std::fmt;

use thiserror::Error;

/// 1-based position in an input text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParseErrorKind {
    MalformedXml,
    UnknownElement,
    DualArity,
    DanglingIdref,
    DuplicateId,
}

/// The single error reported for a rejected input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{location}: {kind:?}: {detail}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub location: Location,
    pub detail: String,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, location: Location, detail: impl Into<String>) -> Self {
        Self {
            kind,
            location,
            detail: detail.into(),
        }
    }
}

/// Structural violation found while navigating a document.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("idref `{0}` does not name any node")]
    DanglingRef(String),
    #[error("node is not an XMRef")]
    NotARef,
}

/// Failures of the generation and linking passes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConvertError {
    #[error("{location}: XMApp has no children")]
    MalformedApply { location: Location },
    #[error("{location}: XMWrap reached from the content branch has no content semantics")]
    ContentWrap { location: Location },
    #[error("{location}: `{meaning}` expects {expected} arguments, found {found}")]
    ArityMismatch {
        meaning: String,
        expected: usize,
        found: usize,
        location: Location,
    },
    #[error("{location}: XMRef to `{idref}` leads back into its own ancestry")]
    RefCycle { idref: String, location: Location },
    #[error("generated id `{0}` collides with another id")]
    IdCollision(String),
}

impl ConvertError {
    pub fn location(&self) -> Option<Location> {
        match self {
            ConvertError::MalformedApply { location }
            | ConvertError::ContentWrap { location }
            | ConvertError::ArityMismatch { location, .. }
            | ConvertError::RefCycle { location, .. } => Some(*location),
            ConvertError::IdCollision(_) => None,
        }
    }
}

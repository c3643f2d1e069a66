//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by library operations.
///
/// Variants map onto the CLI exit-code table: anything describing bad input
/// data exits 65, [`Error::SizeLimitExceeded`] exits 70.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A term mentions a variable the given substitution or assignment does
    /// not cover.
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    /// An application node does not match its symbol's declared arity, or a
    /// symbol is not part of the ambient signature.
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),

    /// Two values that must share a signature do not.
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    /// A configured size cap would be exceeded.
    #[error("size limit exceeded: {0}")]
    SizeLimitExceeded(String),

    /// A relation claimed to be a congruence fails one of its closure
    /// conditions.
    #[error("not a congruence: {0}")]
    NotACongruence(String),

    /// A relation claimed to be a stable preorder fails one of its closure
    /// conditions.
    #[error("not a stable preorder: {0}")]
    NotStable(String),

    /// A proof tree is structurally broken (wrong child count, dangling
    /// axiom index, malformed substitution). Carries the path to the node.
    #[error("malformed proof at {path}: {reason}")]
    MalformedProof { path: String, reason: String },

    /// A distance or bound that must be nonnegative is negative.
    #[error("negative epsilon: {0}")]
    NegativeEpsilon(String),

    /// Anything else wrong with input data: parse errors, inconsistent
    /// tables, bad file contents.
    #[error("malformed input: {0}")]
    MalformedInput(String),
}

impl Error {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::MalformedInput(msg.into())
    }
}

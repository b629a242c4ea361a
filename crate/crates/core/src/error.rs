use thiserror::Error;

/// Errors shared across the crate.
///
/// Precondition violations that a caller can always avoid (wrong arity,
/// mismatched widths) are debug-asserted at the call site instead; the
/// variants here cover conditions that depend on runtime data.
#[derive(Debug, Error)]
pub enum Error {
    /// `split_first_thick` was called on a unit box.
    #[error("cannot split a unit box: no thick dimension")]
    SplitUnit,

    /// `decompose_range` was called with an empty range.
    #[error("empty range: lo {lo} > hi {hi}")]
    EmptyRange { lo: u64, hi: u64 },

    /// `resolve` was called on a pair/dimension that does not resolve.
    #[error("boxes do not resolve on dimension {dim}")]
    NotResolvable { dim: usize },

    /// A parameter is outside the documented domain of an operation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An engine entry point was handed a mode it does not implement.
    #[error("mode `{0}` is not supported by this entry point")]
    UnsupportedMode(String),

    /// A reverse-elimination attribute order was requested for a hypergraph
    /// that is not alpha-acyclic.
    #[error("hypergraph is not alpha-acyclic; no elimination order exists")]
    NotAcyclic,

    /// An exhaustive search or enumeration exceeded its size guard.
    #[error("size guard exceeded: {0}")]
    GuardExceeded(String),

    /// A textual input (box file, query spec, trace) failed to parse.
    #[error("parse error: {0}")]
    Parse(String),

    /// An attribute order is not a permutation of the expected attributes.
    #[error("invalid attribute order: {0}")]
    BadOrder(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// A named input or output file could not be opened, read, or written.
    /// The cause lives in the source chain, per convention.
    #[error("{}", path.display())]
    File { path: std::path::PathBuf, source: std::io::Error },

    #[error("csv input")]
    Csv(#[from] csv::Error),

    #[error("json input")]
    Json(#[from] serde_json::Error),
}

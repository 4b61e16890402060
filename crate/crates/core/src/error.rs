use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong between reading a structure file and
/// reporting an observable.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no tryptophan residues with a complete indole ring were found")]
    EmptyResult,

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("atom {atom} not present in residue {chain}{residue}")]
    MissingAtom { atom: String, chain: String, residue: i32 },

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("coincident dipoles {m} and {n} (separation {distance:e} Angstrom)")]
    Singularity { m: usize, n: usize, distance: f64 },

    #[error("lattice of {requested} dipoles exceeds the capacity limit of {limit}")]
    Capacity { requested: usize, limit: usize },

    #[error("eigensolver did not converge (failing index {index})")]
    NonConvergence { index: usize },

    #[error("quasi-degenerate eigenvalue cluster {cluster:?}: c-norm {c_norm:e} too small")]
    QuasiDegenerate { cluster: Vec<usize>, c_norm: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("disorder realization failed (W = {w}, realization {realization}): {source}")]
    Realization {
        w: f64,
        realization: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

//! Error type shared by the solver core.

use std::fmt;

/// Errors produced while building meshes, assembling systems or running the
/// interface solvers.
#[derive(Debug, Clone)]
pub enum Error {
    /// Invalid geometry or mesh construction input.
    Mesh(String),
    /// Interface nodes of the two meshes do not coincide.
    InterfaceMismatch(String),
    /// Incompatible finite-element spaces or malformed assembly input.
    Assembly(String),
    /// A direct factorization hit a singular pivot.
    Singular {
        /// Label of the operator being factorized.
        operator: String,
        /// Column at which elimination broke down.
        column: usize,
    },
    /// Invalid run configuration.
    Config(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Mesh(msg) => write!(f, "mesh error: {msg}"),
            Error::InterfaceMismatch(msg) => write!(f, "interface mismatch: {msg}"),
            Error::Assembly(msg) => write!(f, "assembly error: {msg}"),
            Error::Singular { operator, column } => {
                write!(f, "singular pivot in operator `{operator}` at column {column}")
            }
            Error::Config(msg) => write!(f, "config error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

/// Result alias for the crate.
pub type Result<T> = std::result::Result<T, Error>;

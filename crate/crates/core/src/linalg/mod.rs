//! Sparse storage, direct factorization and Krylov solvers.

pub mod dense;
pub mod gmres;
pub mod lu;
pub mod sparse;

pub use dense::DenseMat;
pub use gmres::{gmres, KrylovReport};
pub use lu::SparseLu;
pub use sparse::{Csr, TripletBuilder};

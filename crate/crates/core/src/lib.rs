//! Global-in-time domain decomposition solvers for a linear fluid-structure
//! interaction system: Stokes flow coupled to linear elastodynamics across a
//! fixed interface.
//!
//! The coupled evolution problem is reformulated as a space-time interface
//! problem and solved iteratively, either through a Steklov-Poincare operator
//! acting on the interface traction or through two-sided Robin transmission
//! conditions. Each subdomain keeps its own time grid; data moves between the
//! grids through L2-in-time projections of piecewise-constant trace series,
//! so the fluid and structure can be stepped with different time step sizes.
//!
//! Module map:
//! - [`mesh`]: structured triangulations and the fluid/structure interface map
//! - [`fem`]: element spaces, quadrature, assembly, boundary conditions, norms
//! - [`linalg`]: CSR matrices, sparse LU, matrix-free GMRES
//! - [`timegrid`]: time partitions and projections between nonconforming grids
//! - [`subdomain`]: backward-Euler sweeps for the Stokes and elastodynamics
//!   subproblems with Robin or Neumann interface data
//! - [`interface`]: the two interface operators, GMRES and waveform-relaxation
//!   drivers, convergence diagnostics
//! - [`mms`]: manufactured solution used by the accuracy studies
//! - [`verify`]: dense interface-operator oracles and the self-check suite
//! - [`cases`]: experiment drivers and report formats (double precision)
//!
//! The numerical core is generic over the scalar type through [`Real`];
//! concrete aliases for the common instantiations are exported below.

pub mod cases;
pub mod error;
pub mod fem;
pub mod interface;
pub mod linalg;
pub mod mesh;
pub mod mms;
pub mod scalar;
pub mod subdomain;
pub mod timegrid;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision aliases for the main entry types.
pub type Mesh64 = mesh::Mesh<f64>;
pub type FeSpace64 = fem::FeSpace<f64>;
pub type TimeGrid64 = timegrid::TimeGrid<f64>;
pub type TraceSeries64 = timegrid::TraceSeries<f64>;
pub type FluidSolver64 = subdomain::FluidSolver<f64>;
pub type StructureSolver64 = subdomain::StructureSolver<f64>;
pub type CoupledProblem64 = interface::CoupledProblem<f64>;

/// Single-precision aliases (memory-lean instantiation of the same core).
pub type Mesh32 = mesh::Mesh<f32>;
pub type FeSpace32 = fem::FeSpace<f32>;
pub type TimeGrid32 = timegrid::TimeGrid<f32>;
pub type TraceSeries32 = timegrid::TraceSeries<f32>;

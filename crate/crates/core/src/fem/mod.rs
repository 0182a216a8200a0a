//! Finite-element core: elements, quadrature, spaces, assembly and norms.

pub mod assemble;
pub mod element;
pub mod norms;
pub mod quadrature;
pub mod space;

pub use assemble::{
    add_boundary_load, add_interface_load, add_interface_mass, apply_essential_bc,
    assemble_form, assemble_load, assemble_trace_mass, constrained_system_dofs,
    dirichlet_values, eliminate_dirichlet, lift_dirichlet_rhs, FormKind,
};
pub use element::ElementKind;
pub use norms::{energy_norm, error_norm, NormKind};
pub use space::FeSpace;

//! Vector fields with analytic Jacobians on convex box domains, and the
//! enzyme/substrate binding model used throughout the crate.

mod domain;
mod enzyme;
mod field;
mod registry;

pub use domain::BoxDomain;
pub use enzyme::{
    conservation_deviation, enzyme_conservation_check, enzyme_reduced, EnzymeFull, EnzymeParams,
    EnzymeReduced,
};
pub use field::{
    check_jacobian, finite_difference_jacobian, FnField, JacobianCheck, JacobianKind, LinearField,
    ShiftedField, VectorField,
};
pub use registry::{ModelRegistry, ModelSpec, Params};

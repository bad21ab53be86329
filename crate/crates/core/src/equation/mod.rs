//! The equation family and its named companion expressions.

mod family;
mod scaling;
mod variational;

pub use family::{
    build_delta, build_f, build_j, lagrangian, potential_delta, v_to_u, FamilySpec, NAMED_TRIPLES,
};
pub use scaling::{
    apply_scaling, normalize, transform_expr, unnormalized_delta, Coefficients, Normalization,
    ScalingTransform,
};
pub use variational::{variational_check, VariationalReport, Verdict};

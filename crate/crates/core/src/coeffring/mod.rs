//! Exact scalars: rationals and polynomials in the family parameters modulo `sigma^2 = 1`,
//! plus branch bookkeeping for parameter constraints.

mod branch;
mod scalar;

pub use branch::{Branch, Vanishing};
pub use scalar::{int, rat, Assignment, Param, ParamMonomial, ParamScalar, Rational};
pub(crate) use scalar::fmt_scalar_term;

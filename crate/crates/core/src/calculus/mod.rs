//! Total derivatives, the Euler operator and reduction modulo the solved equation.

mod derivative;
mod euler;
mod normal;
mod subst;

pub use derivative::{jet_partial, partial_indep, total_derivative, total_derivative_multi};
pub use euler::{euler_operator, euler_summands};
pub use normal::{normal_form, NormalFormer, SolvedForm};
pub use subst::{apply_rules, FuncRule};

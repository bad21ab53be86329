//! Jet-space polynomial expressions.

mod expr;
mod func;
mod jet;
mod parse;
mod print;

pub use expr::{Expr, JetMonomial, Monomial};
pub use func::{Arg, UnknownFunc};
pub use jet::{DepVar, Indep, JetVar, MultiIndex};
pub use parse::{parse_expr, parse_expr_with, parse_jet_monomial, parse_scalar, Bindings};

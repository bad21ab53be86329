pub mod calculus;
pub mod cascade;
pub mod conslaw;
pub mod coeffring;
pub mod determining;
pub mod equation;
pub mod error;
pub mod jetexpr;
pub mod report;

pub use error::{Error, Result};

//! Scripted, machine-checked classification cascades.

mod branches;
mod order0;
mod order1;
mod order2;
mod step;

pub use branches::{cascade_factors, degenerate_generic_branch, exceptional_branches, ExceptionalBranch};
pub use order0::{
    general_solution, order0_residuals, polynomial_basis, run_order0, run_order0_in,
    verify_general_solution, GeneralSolutionReport,
};
pub use order1::{run_order1, run_order1_in};
pub use order2::{run_order2_reduction, FirstOrderContrast, Order2Report, Order2Row};
pub use step::{CascadeStep, ClassificationResult, Status};

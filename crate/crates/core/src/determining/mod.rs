//! Multiplier ansatz classes and their determining systems.

mod ansatz;
mod system;

pub use ansatz::{normal_jets_up_to, Ansatz, AnsatzKind};
pub use system::{
    determining_expression, split_system, DeterminingSystem, Extraction, Provenance, Shell, Stats,
};

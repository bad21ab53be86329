use std::fmt;

use crate::coeffring::{int, Branch, Param, ParamScalar};

/// A `g = 0` sub-branch on which a forcing factor of the order-one cascade vanishes.
#[derive(Clone, Debug, PartialEq)]
pub struct ExceptionalBranch {
    pub relation: &'static str,
    pub factor: ParamScalar,
    pub branch: Branch,
    /// The zeroth-order system is enlarged here as well.
    pub order0_enlarged: bool,
}

impl fmt::Display for ExceptionalBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}} factor {}", self.branch, self.factor)?;
        if self.order0_enlarged {
            f.write_str(" (order-0 system enlarged)")?;
        }
        Ok(())
    }
}

fn lin(e: i64, f: i64) -> ParamScalar {
    &ParamScalar::param(Param::E).scale(&int(e)) + &ParamScalar::param(Param::F).scale(&int(f))
}

/// The factors in the order they are met along the `g = 0` cascade.
pub fn cascade_factors() -> Vec<(&'static str, ParamScalar)> {
    vec![
        ("e+f=0", lin(1, 1)),
        ("27e=14f", lin(27, -14)),
        ("e=2f", lin(1, -2)),
        ("e=f", lin(1, -1)),
        ("f=3e", lin(3, -1)),
    ]
}

/// The five exceptional sub-branches; on each, the other four factors are declared nonzero.
pub fn exceptional_branches() -> Vec<ExceptionalBranch> {
    let factors = cascade_factors();
    factors
        .iter()
        .map(|(relation, factor)| {
            let mut b = Branch::new()
                .with_eq(ParamScalar::param(Param::G))
                .with_eq(factor.clone());
            for (_, other) in factors.iter().filter(|(_, o)| o != factor) {
                b = b.with_ne(other.clone());
            }
            ExceptionalBranch {
                relation,
                factor: factor.clone(),
                branch: b,
                order0_enlarged: *relation == "f=3e",
            }
        })
        .collect()
}

/// `g = 0` with all five factors nonzero.
pub fn degenerate_generic_branch() -> Branch {
    cascade_factors()
        .into_iter()
        .fold(Branch::new().with_eq(ParamScalar::param(Param::G)), |b, (_, f)| b.with_ne(f))
}

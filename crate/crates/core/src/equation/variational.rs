use crate::calculus::euler_operator;
use crate::coeffring::{int, Param, ParamScalar};
use crate::error::Result;
use crate::jetexpr::{DepVar, Expr, JetMonomial, JetVar, UnknownFunc};

use super::family::{lagrangian, lagrangian_with, potential_delta, FamilySpec};

/// Outcome of the variational test for the potential equation.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Variational,
    /// `witness = potential_delta - E_v(L)`, nonzero.
    Nonvariational { witness: Expr },
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariationalReport {
    /// Coefficient conditions obtained with a general constant `A()` in front of `v_x v_xx^2`.
    pub matching: Vec<(JetMonomial, Expr)>,
    /// The compatibility factor left after eliminating `A`; the equation is variational iff it
    /// vanishes. Normalized so that `witness = compatibility * v_xx * v_xxx`.
    pub compatibility: ParamScalar,
    /// `E_v(L) = sign * potential_delta` on the variational locus.
    pub sign: i64,
    pub verdict: Verdict,
}

fn a_const() -> Expr {
    Expr::func(UnknownFunc::new("A", &[]))
}

/// Decides whether the potential equation is an Euler-Lagrange equation for this family.
pub fn variational_check(spec: &FamilySpec) -> Result<VariationalReport> {
    let sym = FamilySpec::symbolic();
    let pd = potential_delta(&sym);
    let general = &euler_operator(&lagrangian_with(&sym, &a_const()), DepVar::V, 3)? - &pd;
    let pair = [
        JetMonomial::new([(JetVar::v(1, 0, 0), 1), (JetVar::v(4, 0, 0), 1)]),
        JetMonomial::new([(JetVar::v(2, 0, 0), 1), (JetVar::v(3, 0, 0), 1)]),
    ];
    let matching: Vec<(JetMonomial, Expr)> = pair
        .iter()
        .map(|k| (k.clone(), spec.specialize(&general.coefficient_of(k))))
        .collect();
    // (4A - f) - 2(2A - e) eliminates A
    let sym_conds: Vec<Expr> = pair.iter().map(|k| general.coefficient_of(k)).collect();
    let elim = &sym_conds[1] - &sym_conds[0].scale_rational(&int(2));
    let two_e_minus_f = elim
        .as_scalar()
        .expect("A eliminates from the matching conditions");
    let compatibility = spec.specialize_scalar(&-two_e_minus_f);

    let on_locus = FamilySpec::from_substitution(
        &[(Param::F, ParamScalar::param(Param::E).scale(&int(2)))].into(),
    );
    let el = euler_operator(&lagrangian(&on_locus), DepVar::V, 3)?;
    let target = potential_delta(&on_locus);
    let sign = if el == target {
        1
    } else if el == -&target {
        -1
    } else {
        0
    };

    let witness = &potential_delta(spec) - &euler_operator(&lagrangian(spec), DepVar::V, 3)?;
    let verdict = if witness.is_zero() {
        Verdict::Variational
    } else {
        Verdict::Nonvariational { witness }
    };
    Ok(VariationalReport {
        matching,
        compatibility,
        sign,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetexpr::parse_expr;

    #[test]
    fn lax_is_variational() {
        let r = variational_check(&FamilySpec::triple(10, 20, 30)).unwrap();
        assert_eq!(r.verdict, Verdict::Variational);
        assert_eq!(r.sign, 1);
        assert!(r.compatibility.is_zero());
    }

    #[test]
    fn sawada_kotera_witness() {
        let r = variational_check(&FamilySpec::triple(5, 5, 5)).unwrap();
        assert_eq!(
            r.verdict,
            Verdict::Nonvariational {
                witness: parse_expr("-5*v_xx*v_xxx").unwrap()
            }
        );
    }

    #[test]
    fn symbolic_witness_carries_factor() {
        let r = variational_check(&FamilySpec::symbolic()).unwrap();
        assert_eq!(r.compatibility, parse_expr("f - 2*e").unwrap().as_scalar().unwrap());
        assert_eq!(
            r.matching[0].1,
            parse_expr("2*A() - e").unwrap()
        );
        assert_eq!(r.matching[1].1, parse_expr("4*A() - f").unwrap());
        match r.verdict {
            Verdict::Nonvariational { witness } => {
                assert_eq!(witness, parse_expr("(f - 2*e)*v_xx*v_xxx").unwrap())
            }
            v => panic!("{v:?}"),
        }
    }
}

use crate::calculus::{apply_rules, partial_indep, FuncRule};
use crate::coeffring::{Branch, Param, ParamScalar, Vanishing};
use crate::determining::{determining_expression, split_system, Ansatz, Extraction, Shell, Stats};
use crate::equation::FamilySpec;
use crate::error::Result;
use crate::jetexpr::{parse_expr, parse_jet_monomial, Expr, Indep, JetMonomial};

use super::step::{func, Action, ClassificationResult, Runner, Scripted, Status};

fn relation(label: &'static str, key: &str, stated: &'static str, factor: Option<&'static str>, rules: Vec<(&'static str, &'static str)>) -> Scripted {
    Scripted {
        label,
        action: Action::Extract {
            extraction: Extraction::staged(parse_jet_monomial(key).unwrap(), JetMonomial::one()),
            stated,
            factor,
            rules,
        },
    }
}

const FREE: &str = "Q_x6(x,y,t) + c*Q_x4(x,y,t) + Q_xt(x,y,t) + sigma*Q_yy(x,y,t)";

/// `[Q_xx, Q_xt + sigma*Q_yy]` for a multiplier `Q(x,y,t)`.
pub fn order0_residuals(q: &Expr) -> [Expr; 2] {
    let qx = partial_indep(q, Indep::X);
    [
        partial_indep(&qx, Indep::X),
        &partial_indep(&qx, Indep::T)
            + &partial_indep(&partial_indep(q, Indep::Y), Indep::Y).scale(&ParamScalar::sigma()),
    ]
}

fn q_residual() -> Vec<Expr> {
    order0_residuals(&parse_expr("Q(x,y,t)").unwrap()).to_vec()
}

/// Zeroth-order classification on a branch.
pub fn run_order0(branch: &Branch) -> Result<ClassificationResult> {
    let spec = FamilySpec::from_branch(branch)?;
    run_order0_in(branch, &spec)
}

pub fn run_order0_in(branch: &Branch, spec: &FamilySpec) -> Result<ClassificationResult> {
    let ansatz = Ansatz::order0();
    let e = determining_expression(&ansatz, spec, Shell::Off)?;
    let stats = Stats::of(&e);
    let mut runner = Runner::new(branch, spec, e);
    runner.ansatz = Some(ansatz.clone());
    let observed = vec![
        relation("[u^2]", "u^2", "g*Q_xx(x,y,t)", None, vec![]),
        relation("[u_xx]", "u_xx", "(3*e-f)*Q_xx(x,y,t)", None, vec![]),
        relation("[u_x]", "u_x", "(3*e-f)*Q_xxx(x,y,t)", None, vec![]),
        relation("[u]", "u", "e*Q_x4(x,y,t)", None, vec![]),
        relation("[1]", "1", FREE, None, vec![]),
    ];
    let mut status = runner.run(&observed)?;
    let g = branch.vanishes(&ParamScalar::param(Param::G))?;
    let h = branch.vanishes(&(&ParamScalar::from_int(3) * &ParamScalar::param(Param::E) - ParamScalar::param(Param::F)))?;
    let path;
    let mut residual = Vec::new();
    if status.is_closed() {
        let forcing = match (g, h) {
            (Vanishing::Yes, Vanishing::Yes) => None,
            (Vanishing::Yes, _) => Some(relation("Q_xx from [u_xx]", "u_xx", "(3*e-f)*Q_xx(x,y,t)", Some("3*e-f"), vec![("Q_xx(x,y,t)", "0")])),
            _ => Some(relation("Q_xx from [u^2]", "u^2", "g*Q_xx(x,y,t)", Some("g"), vec![("Q_xx(x,y,t)", "0")])),
        };
        match forcing {
            Some(step) => {
                path = if matches!(g, Vanishing::Yes) { "g = 0, f != 3e" } else { "g != 0" };
                status = runner.run(&[step])?;
                let target = spec.specialize(&q_residual()[1]);
                let ok = runner.expr.ratio_to(&target).is_some();
                if status.is_closed() && !ok {
                    status = Status::Failed {
                        step: "residual".into(),
                        reason: format!("leftover system {}", runner.expr),
                    };
                }
                if status.is_closed() {
                    residual = q_residual().iter().map(|r| spec.specialize(r)).collect();
                }
            }
            None => {
                path = "g = 0, f = 3e";
                status = Status::OpenBranch {
                    factor: ParamScalar::from_int(3) * ParamScalar::param(Param::E) - ParamScalar::param(Param::F),
                    step: "Q_xx".into(),
                };
                residual = split_system(&runner.expr, &ansatz).equations.into_values().collect();
            }
        }
    } else {
        path = "relations";
    }
    let multiplier = runner.reduced_ansatz().map(|a| a.q).unwrap_or(ansatz.q);
    Ok(ClassificationResult {
        order: 0,
        branch: branch.clone(),
        path: path.into(),
        steps: runner.steps,
        multiplier,
        residual,
        status,
        assumptions: runner.assumptions,
        stats: Some(stats),
    })
}

/// The six polynomial multipliers spanning the zeroth-order solutions with polynomial dependence.
pub fn polynomial_basis() -> Vec<Expr> {
    [
        "1",
        "y",
        "x",
        "x*y",
        "x*t - 1/2*sigma*y^2",
        "x*y*t - 1/6*sigma*y^3",
    ]
    .iter()
    .map(|s| parse_expr(s).unwrap())
    .collect()
}

/// The general zeroth-order solution checked against both residual equations.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralSolutionReport {
    pub q: Expr,
    pub residuals: [Expr; 2],
    /// `A0 = t` and the other functions zero gives `x*t - sigma*y^2/2`.
    pub recovers_basis: bool,
}

impl GeneralSolutionReport {
    pub fn verified(&self) -> bool {
        self.residuals.iter().all(Expr::is_zero) && self.recovers_basis
    }
}

pub fn general_solution() -> Expr {
    parse_expr(
        "x*(A0(t) + A1(t)*y) + B0(t) + B1(t)*y - 1/2*sigma*A0_t(t)*y^2 - 1/6*sigma*A1_t(t)*y^3",
    )
    .unwrap()
}

pub fn verify_general_solution() -> GeneralSolutionReport {
    let q = general_solution();
    let residuals = order0_residuals(&q);
    let special = apply_rules(
        &q,
        &[
            FuncRule::new(func("A0(t)"), parse_expr("t").unwrap()),
            FuncRule::vanish(func("A1(t)")),
            FuncRule::vanish(func("B0(t)")),
            FuncRule::vanish(func("B1(t)")),
        ],
    );
    GeneralSolutionReport {
        recovers_basis: special == polynomial_basis()[4],
        q,
        residuals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_solves_residual_system() {
        for q in polynomial_basis() {
            assert!(order0_residuals(&q).iter().all(Expr::is_zero), "{q}");
        }
    }

    #[test]
    fn non_solution_is_caught() {
        let r = order0_residuals(&parse_expr("x*t + 1/2*sigma*y^2").unwrap());
        assert_eq!(r[1], Expr::int(2));
        assert!(!order0_residuals(&parse_expr("x^2").unwrap())[0].is_zero());
    }

    #[test]
    fn general_solution_verified() {
        assert!(verify_general_solution().verified());
    }
}

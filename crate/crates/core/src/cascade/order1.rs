use crate::calculus::{apply_rules, jet_partial, total_derivative, FuncRule};
use crate::coeffring::{int, Branch, Param, ParamScalar, Vanishing};
use crate::determining::{determining_expression, split_system, Ansatz, Extraction, Shell, Stats};
use crate::equation::FamilySpec;
use crate::error::{Error, Result};
use crate::jetexpr::{parse_expr, parse_jet_monomial, Arg, Expr, Indep, JetMonomial, JetVar};

use super::step::{func, Action, CascadeStep, ClassificationResult, Runner, Scripted, Status};

fn jm(s: &str) -> JetMonomial {
    parse_jet_monomial(s).expect("scripted monomial")
}

fn staged(outer: &str, inner: &str) -> Extraction {
    Extraction::staged(jm(outer), jm(inner))
}

const Q: &str = "Q(x,y,t,u,u_x,u_y,u_t)";

fn q_deriv(suffix: &str) -> Expr {
    parse_expr(&format!("Q_{{{suffix}}}(x,y,t,u,u_x,u_y,u_t)")).expect("scripted derivative")
}

fn q_rule(suffix: &str) -> FuncRule {
    FuncRule::vanish(func(&format!("Q_{{{suffix}}}(x,y,t,u,u_x,u_y,u_t)")))
}

fn lemma_step(
    label: &str,
    extraction: Extraction,
    stated: Expr,
    obtained: Expr,
    substitution: Vec<FuncRule>,
) -> CascadeStep {
    let ratio = obtained.ratio_to(&stated);
    CascadeStep {
        label: label.to_string(),
        extraction: Some(extraction),
        verified: ratio.is_some() || (obtained.is_zero() && stated.is_zero()),
        expected: stated.clone(),
        stated,
        obtained,
        ratio,
        factor: None,
        factor_status: None,
        substitution,
        recheck: None,
    }
}

/// Every partial of `q` with respect to `args` vanishes under `rules`.
fn partials_vanish(q: &Expr, args: &[&str], rules: &[FuncRule]) -> bool {
    let f = q.funcs().into_iter().next().expect("derivative of Q");
    args.iter().all(|a| {
        let arg = match Indep::from_letter(a.chars().next().unwrap()).filter(|_| a.len() == 1) {
            Some(d) => Arg::Indep(d),
            None => Arg::Jet(jm(a).factors()[0].0),
        };
        apply_rules(&Expr::func(f.derive(&arg).expect("argument of Q")), rules).is_zero()
    })
}

/// Steps reducing the general order-one multiplier to the linear form.
fn lemma_steps(spec: &FamilySpec) -> Result<(Vec<CascadeStep>, bool)> {
    let general = Ansatz::order1_general();
    let e = determining_expression(&general, spec, Shell::Off)?;
    let mut steps = Vec::new();
    let mut rules: Vec<FuncRule> = Vec::new();
    for (dir, key, name) in [("u_y", "u_x5y", "H(y,t)"), ("u_t", "u_x5t", "K(y,t)")] {
        let qd = q_deriv(dir);
        let outer = Extraction::outer(jm(key));
        let obtained = outer.apply(&e);
        let dx = total_derivative(&qd, Indep::X);
        steps.push(lemma_step(
            &format!("D_x(Q_{dir}) from [{key}]"),
            outer.clone(),
            dx.scale_rational(&int(6)),
            obtained,
            Vec::new(),
        ));
        let mut split_rules = Vec::new();
        for second in ["u_xx", "u_xy", "u_xt"] {
            let inner = staged(key, second);
            let c = inner.apply(&e);
            let arg = match second {
                "u_xx" => "u_x",
                "u_xy" => "u_y",
                _ => "u_t",
            };
            let r = q_rule(&format!("{dir},{arg}"));
            steps.push(lemma_step(
                &format!("split D_x(Q_{dir}) on {second}"),
                inner,
                Expr::func(r.pattern.clone()).scale_rational(&int(6)),
                c,
                vec![r.clone()],
            ));
            split_rules.push(r);
        }
        rules.extend(split_rules);
        let opaque = general.opaque_jets();
        let free = outer
            .apply(&e)
            .collect_by(|j| !opaque.contains(j))
            .remove(&JetMonomial::one())
            .unwrap_or_else(Expr::zero);
        let free = apply_rules(&free, &rules);
        let by_ux = apply_rules(&jet_partial(&free, JetVar::u(1, 0, 0)), &rules);
        let r_u = q_rule(&format!("u,{dir}"));
        steps.push(lemma_step(
            &format!("d/du_x of the free part of D_x(Q_{dir})"),
            staged(key, "1"),
            Expr::func(r_u.pattern.clone()).scale_rational(&int(6)),
            by_ux,
            vec![r_u.clone()],
        ));
        rules.push(r_u);
        let rest = apply_rules(&free, &rules);
        let r_x = q_rule(&format!("x,{dir}"));
        steps.push(lemma_step(
            &format!("remaining free part of D_x(Q_{dir})"),
            staged(key, "1"),
            Expr::func(r_x.pattern.clone()).scale_rational(&int(6)),
            rest,
            vec![r_x.clone()],
        ));
        rules.push(r_x);
        let ok = partials_vanish(&qd, &["x", "u", "u_x", "u_y", "u_t"], &rules);
        steps.push(CascadeStep {
            label: format!("Q_{dir} = {name}"),
            extraction: None,
            stated: Expr::zero(),
            expected: Expr::zero(),
            obtained: Expr::zero(),
            ratio: None,
            factor: None,
            factor_status: None,
            substitution: Vec::new(),
            verified: ok,
            recheck: None,
        });
    }
    let sys = split_system(&e, &general);
    let key = jm("u_x6*u_xx");
    let r_xx = q_rule("u_x,u_x");
    steps.push(lemma_step(
        "Q_{u_x,u_x} from [u_x6*u_xx]",
        Extraction::staged(jm("u_x6"), jm("u_xx")),
        Expr::func(r_xx.pattern.clone()).scale_rational(&int(5)),
        sys.get(&key),
        vec![r_xx.clone()],
    ));
    rules.push(r_xx);
    let top = apply_rules(&sys.get(&jm("u_x6")), &rules);
    let r_u = q_rule("u,u_x");
    steps.push(lemma_step(
        "Q_{u,u_x} from d/du_x of [u_x6] free part",
        Extraction::staged(jm("u_x6"), JetMonomial::one()),
        Expr::func(r_u.pattern.clone()).scale_rational(&int(7)),
        apply_rules(&jet_partial(&top, JetVar::u(1, 0, 0)), &rules),
        vec![r_u.clone()],
    ));
    rules.push(r_u);
    let ok = partials_vanish(&q_deriv("u_x"), &["u", "u_x", "u_y", "u_t"], &rules);
    steps.push(CascadeStep {
        label: format!("{Q} = A(x,y,t,u) + B(x,y,t)*u_x + H(y,t)*u_y + K(y,t)*u_t"),
        extraction: None,
        stated: Expr::zero(),
        expected: Expr::zero(),
        obtained: Expr::zero(),
        ratio: None,
        factor: None,
        factor_status: None,
        substitution: Vec::new(),
        verified: ok,
        recheck: None,
    });
    let ok = steps.iter().all(|s| s.verified);
    Ok((steps, ok))
}

fn extract(
    label: &'static str,
    extraction: Extraction,
    stated: &'static str,
    factor: Option<&'static str>,
    rules: Vec<(&'static str, &'static str)>,
) -> Scripted {
    Scripted {
        label,
        action: Action::Extract {
            extraction,
            stated,
            factor,
            rules,
        },
    }
}

fn introduce(
    label: &'static str,
    rules: Vec<(&'static str, &'static str)>,
    must_vanish: Vec<&'static str>,
) -> Scripted {
    Scripted {
        label,
        action: Action::Introduce { rules, must_vanish },
    }
}

fn quadratic_step() -> Scripted {
    extract(
        "A_uuu from [u_xx^3]",
        Extraction::staged(jm("u_xx^3"), JetMonomial::one()),
        "15*A_{u^3}(x,y,t,u)",
        None,
        vec![(
            "A(x,y,t,u)",
            "a0(x,y,t) + a1(x,y,t)*u + a2(x,y,t)*u^2",
        )],
    )
}

/// Steps for `g != 0`.
pub(crate) fn generic_script() -> Vec<Scripted> {
    vec![
        extract("step 1: a2", staged("u^3", "u_xx"), "4*g*a2(x,y,t)", Some("g"), vec![("a2(x,y,t)", "0")]),
        extract("step 2: a1_xx", staged("u^3", "1"), "g*a1_xx(x,y,t)", Some("g"), vec![("a1_xx(x,y,t)", "0")]),
        extract("step 3: B", staged("u_x^3", "1"), "-2*g*B(x,y,t)", Some("g"), vec![("B(x,y,t)", "0")]),
        extract("step 4: H", staged("u_x^2", "u_y"), "-2*g*H(y,t)", Some("g"), vec![("H(y,t)", "0")]),
        extract("step 4: K", staged("u_x^2", "u_t"), "-2*g*K(y,t)", Some("g"), vec![("K(y,t)", "0")]),
        introduce(
            "a1 = alpha(y,t) + beta(y,t)*x",
            vec![("a1(x,y,t)", "alpha(y,t) + beta(y,t)*x")],
            vec!["a1_xx(x,y,t)"],
        ),
        extract(
            "step 5: beta",
            staged("u*u_x^2", "1").with_indep(Indep::X, 1),
            "2*g*beta(y,t)",
            Some("g"),
            vec![("beta(y,t)", "0")],
        ),
        extract(
            "step 5: alpha",
            staged("u*u_x^2", "1").with_indep(Indep::X, 0),
            "2*g*alpha(y,t)",
            Some("g"),
            vec![("alpha(y,t)", "0")],
        ),
        extract("step 6: a0_xx", staged("u^2", "1"), "g*a0_xx(x,y,t)", Some("g"), vec![("a0_xx(x,y,t)", "0")]),
    ]
}

/// Steps for `g = 0`.
pub(crate) fn degenerate_script() -> Vec<Scripted> {
    vec![
        extract("step 1: a2", staged("u_yy", "u"), "4*sigma*a2(x,y,t)", Some("sigma"), vec![("a2(x,y,t)", "0")]),
        extract("step 2: K_y", Extraction::outer(jm("u_yt")), "2*sigma*K_y(y,t)", Some("sigma"), vec![("K_y(y,t)", "0")]),
        extract("step 2: K", staged("u_xt", "u_xxx"), "(e+f)*K(y,t)", Some("e+f"), vec![("K(y,t)", "0")]),
        extract(
            "step 3: H_y",
            staged("u_xt", "1"),
            "2*a1(x,y,t) - H_y(y,t)",
            None,
            vec![("H_y(y,t)", "2*a1(x,y,t)")],
        ),
        extract(
            "step 4a: B_x",
            staged("u_yy", "1"),
            "2*sigma*a1(x,y,t) + sigma*H_y(y,t) - sigma*B_x(x,y,t)",
            None,
            vec![("B_x(x,y,t)", "4*a1(x,y,t)")],
        ),
        extract(
            "step 4b: a1",
            staged("u_xx^2", "1"),
            "3*e*a1(x,y,t) + 3*(2*e-f)*B_x(x,y,t) - f*H_y(y,t)",
            Some("27*e-14*f"),
            vec![("a1(x,y,t)", "0")],
        ),
        introduce("B = b0(y,t)", vec![("B(x,y,t)", "b0(y,t)")], vec!["B_x(x,y,t)"]),
        extract(
            "step 5: b0",
            staged("u_x*u_xxxx", "1"),
            "(e-2*f)*b0(y,t)",
            Some("e-2*f"),
            vec![("b0(y,t)", "0")],
        ),
        extract(
            "step 5: H",
            staged("u_x*u_xxxy", "1"),
            "2*(e-f)*H(y,t)",
            Some("e-f"),
            vec![("H(y,t)", "0")],
        ),
        extract(
            "step 6: a0_xx",
            staged("u_xx", "1"),
            "(3*e-f)*a0_xx(x,y,t)",
            Some("3*e-f"),
            vec![("a0_xx(x,y,t)", "0")],
        ),
    ]
}

/// Residual equations for a closed order-one cascade.
fn closed_residual() -> Vec<Expr> {
    vec![
        parse_expr("a0_xx(x,y,t)").unwrap(),
        parse_expr("a0_xt(x,y,t) + sigma*a0_yy(x,y,t)").unwrap(),
    ]
}

/// Replays the order-one classification on a branch; `g` must be decided by the branch.
pub fn run_order1(branch: &Branch) -> Result<ClassificationResult> {
    let spec = FamilySpec::from_branch(branch)?;
    run_order1_in(branch, &spec)
}

/// As [`run_order1`], with the family given explicitly (for instance with `sigma` fixed).
pub fn run_order1_in(branch: &Branch, spec: &FamilySpec) -> Result<ClassificationResult> {
    let (generic, path) = match branch.vanishes(&ParamScalar::param(Param::G))? {
        Vanishing::No => (true, "g != 0"),
        Vanishing::Yes => (false, "g = 0"),
        Vanishing::Undetermined => {
            return Err(Error::Branch("the branch must decide whether g vanishes".into()))
        }
    };
    let (mut steps, lemma_ok) = lemma_steps(spec)?;
    let linear = Ansatz::order1_linear();
    let e = determining_expression(&linear, spec, Shell::Off)?;
    let mut runner = Runner::new(branch, spec, e);
    runner.ansatz = Some(linear.clone());
    let mut status = if lemma_ok {
        Status::Closed
    } else {
        Status::Failed {
            step: "lemma".into(),
            reason: "general multiplier did not reduce to the linear form".into(),
        }
    };
    if status.is_closed() {
        status = runner.run(&[quadratic_step()])?;
    }
    let stats = Stats::of(&runner.expr);
    if status.is_closed() {
        let script = if generic { generic_script() } else { degenerate_script() };
        status = runner.run(&script)?;
    }
    let current = runner.expr.clone();
    let mut residual = Vec::new();
    if status.is_closed() {
        let free = current.coefficient_of(&JetMonomial::one());
        let shown = spec.specialize(&parse_expr(
            "a0_x6(x,y,t) + c*a0_x4(x,y,t) + a0_xt(x,y,t) + sigma*a0_yy(x,y,t)",
        )?);
        let reduced = apply_rules(&shown, &runner.rules);
        let target = spec.specialize(&closed_residual()[1]);
        let ok = current.ratio_to(&target).is_some() && free.ratio_to(&reduced).is_some();
        runner.steps.push(CascadeStep {
            label: "residual".into(),
            extraction: Some(Extraction::staged(JetMonomial::one(), JetMonomial::one())),
            stated: shown,
            ratio: free.ratio_to(&reduced),
            expected: reduced,
            obtained: free,
            factor: None,
            factor_status: None,
            substitution: Vec::new(),
            verified: ok,
            recheck: None,
        });
        if ok {
            residual = closed_residual().iter().map(|r| spec.specialize(r)).collect();
        } else {
            status = Status::Failed {
                step: "residual".into(),
                reason: format!("leftover system {current}"),
            };
        }
    } else {
        residual = split_system(&current, &linear).equations.into_values().collect();
    }
    steps.append(&mut runner.steps);
    let multiplier = runner
        .reduced_ansatz()
        .map(|a| a.q)
        .unwrap_or_else(|| linear.q.clone());
    Ok(ClassificationResult {
        order: 1,
        branch: branch.clone(),
        path: path.to_string(),
        steps,
        multiplier,
        residual,
        status,
        assumptions: runner.assumptions,
        stats: Some(stats),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::degenerate_generic_branch;

    fn obtained(r: &ClassificationResult, label: &str) -> Expr {
        r.steps
            .iter()
            .find(|s| s.label == label)
            .unwrap_or_else(|| panic!("no step {label}"))
            .obtained
            .clone()
    }

    fn ex(s: &str) -> Expr {
        parse_expr(s).unwrap()
    }

    #[test]
    fn generic_branch_closes() {
        let r = run_order1(&Branch::parse("g!=0").unwrap()).unwrap();
        assert!(r.status.is_closed(), "{}", r.status);
        assert!(r.all_verified());
        assert_eq!(obtained(&r, "step 1: a2"), ex("4*g*a2(x,y,t)"));
        assert_eq!(obtained(&r, "step 3: B"), ex("-2*g*B(x,y,t)"));
        assert_eq!(obtained(&r, "step 5: alpha"), ex("2*g*alpha(y,t)"));
        assert_eq!(r.multiplier, ex("a0(x,y,t)"));
        assert_eq!(r.residual[1], ex("a0_xt(x,y,t) + sigma*a0_yy(x,y,t)"));
        assert!(r.steps.iter().filter(|s| !s.substitution.is_empty() && s.extraction.is_some())
            .all(|s| s.recheck != Some(false)));
    }

    #[test]
    fn degenerate_branch_closes() {
        let r = run_order1(&degenerate_generic_branch()).unwrap();
        assert!(r.status.is_closed(), "{}", r.status);
        assert!(r.assumptions.is_empty());
        assert_eq!(obtained(&r, "step 4b: a1"), ex("(27*e-14*f)*a1(x,y,t)"));
        assert_eq!(obtained(&r, "step 5: H"), ex("2*(e-f)*H(y,t)"));
        let k = r.steps.iter().find(|s| s.label == "step 2: K").unwrap();
        assert_eq!(k.ratio, Some(crate::coeffring::int(-1)));
    }

    #[test]
    fn exceptional_relation_halts() {
        let r = run_order1(&Branch::parse("g=0, 27e=14f, e+f!=0").unwrap()).unwrap();
        match r.status {
            Status::OpenBranch { factor, step } => {
                assert_eq!(factor, crate::jetexpr::parse_scalar("27*e-14*f").unwrap());
                assert_eq!(step, "step 4b: a1");
            }
            s => panic!("{s}"),
        }
    }

    #[test]
    fn g_must_be_decided() {
        assert!(run_order1(&Branch::new()).is_err());
    }
}

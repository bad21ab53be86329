use std::fmt;

use crate::calculus::{apply_rules, FuncRule};
use crate::coeffring::{Branch, ParamScalar, Rational, Vanishing};
use crate::determining::{determining_expression, Ansatz, Extraction, Shell, Stats};
use crate::error::Result;
use crate::equation::FamilySpec;
use crate::jetexpr::{parse_expr, parse_scalar, Expr, UnknownFunc};

/// How a cascade ended.
#[derive(Clone, Debug, PartialEq)]
pub enum Status {
    Closed,
    /// A forcing factor vanishes on the branch; the script cannot continue.
    OpenBranch { factor: ParamScalar, step: String },
    /// A machine check disagreed with the scripted relation.
    Failed { step: String, reason: String },
}

impl Status {
    pub fn is_closed(&self) -> bool {
        matches!(self, Status::Closed)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Closed => f.write_str("closed"),
            Status::OpenBranch { factor, step } => {
                write!(f, "open-branch (factor {factor} vanishes at {step})")
            }
            Status::Failed { step, reason } => write!(f, "failed at {step}: {reason}"),
        }
    }
}

/// One machine-checked step of a cascade.
#[derive(Clone, Debug, PartialEq)]
pub struct CascadeStep {
    pub label: String,
    pub extraction: Option<Extraction>,
    /// The relation as the script states it, before the substitutions in force.
    pub stated: Expr,
    /// `stated` after the substitutions in force, restricted to the branch.
    pub expected: Expr,
    /// What the extraction actually produced.
    pub obtained: Expr,
    /// `obtained = ratio * expected` when both are nonzero.
    pub ratio: Option<Rational>,
    pub factor: Option<ParamScalar>,
    pub factor_status: Option<Vanishing>,
    pub substitution: Vec<FuncRule>,
    pub verified: bool,
    /// Re-extraction from the determining expression of the reduced ansatz vanishes.
    pub recheck: Option<bool>,
}

impl CascadeStep {
    pub fn relation(&self) -> &Expr {
        &self.obtained
    }
}

impl fmt::Display for CascadeStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if let Some(x) = &self.extraction {
            write!(f, " | {x}")?;
        }
        write!(f, " | obtained {}", self.obtained)?;
        if self.expected != self.obtained {
            match &self.ratio {
                Some(r) => write!(f, " = {r} * ({})", self.expected)?,
                None => write!(f, " vs expected {}", self.expected)?,
            }
        }
        if let Some(s) = &self.factor {
            write!(f, " | factor {s}")?;
        }
        if !self.substitution.is_empty() {
            let rules: Vec<String> = self.substitution.iter().map(|r| r.to_string()).collect();
            write!(f, " | {}", rules.join("; "))?;
        }
        if self.recheck == Some(false) {
            return f.write_str(" | recheck FAILED");
        }
        write!(f, " | {}", if self.verified { "ok" } else { "FAILED" })
    }
}

/// Result of a scripted classification.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationResult {
    pub order: u8,
    pub branch: Branch,
    pub path: String,
    pub steps: Vec<CascadeStep>,
    /// The ansatz with every substitution applied.
    pub multiplier: Expr,
    /// Equations left for the surviving unknown functions.
    pub residual: Vec<Expr>,
    pub status: Status,
    /// Factors assumed nonzero because the branch does not decide them.
    pub assumptions: Vec<ParamScalar>,
    pub stats: Option<Stats>,
}

impl ClassificationResult {
    pub fn all_verified(&self) -> bool {
        self.steps.iter().all(|s| s.verified) && !matches!(self.status, Status::Failed { .. })
    }

    /// One-line summary such as `Q = a0(x,y,t) with a0_xx = 0, a0_xt + sigma*a0_yy = 0`.
    pub fn summary(&self) -> String {
        let eqs: Vec<String> = self.residual.iter().map(|e| format!("{e} = 0")).collect();
        format!("Q = {} with {}", self.multiplier, eqs.join(", "))
    }
}

/// A scripted action.
#[derive(Clone, Debug)]
pub(crate) enum Action {
    /// Extract, compare with `stated`, and apply `rules` if `factor` does not vanish.
    Extract {
        extraction: Extraction,
        stated: &'static str,
        factor: Option<&'static str>,
        rules: Vec<(&'static str, &'static str)>,
    },
    /// Reparametrize; each `must_vanish` (after the rules in force) certifies consistency.
    Introduce {
        rules: Vec<(&'static str, &'static str)>,
        must_vanish: Vec<&'static str>,
    },
}

#[derive(Clone, Debug)]
pub(crate) struct Scripted {
    pub label: &'static str,
    pub action: Action,
}

pub(crate) fn func(s: &str) -> UnknownFunc {
    parse_expr(s)
        .expect("scripted function")
        .funcs()
        .into_iter()
        .next()
        .expect("scripted function")
}

pub(crate) fn rule(pattern: &str, replacement: &str) -> FuncRule {
    FuncRule::new(func(pattern), parse_expr(replacement).expect("scripted replacement"))
}

/// Divides every coefficient by a scalar, if possible.
fn divide(e: &Expr, s: &ParamScalar) -> Option<Expr> {
    if let Some(inv) = s.unit_inverse() {
        return Some(e.scale(&inv));
    }
    let mut out = Expr::zero();
    for (m, c) in e.terms() {
        out.add_term(m.clone(), c.exact_div(s)?);
    }
    Some(out)
}

/// Mutable state of a running script.
pub(crate) struct Runner<'a> {
    pub branch: &'a Branch,
    pub spec: &'a FamilySpec,
    pub expr: Expr,
    pub rules: Vec<FuncRule>,
    pub steps: Vec<CascadeStep>,
    pub assumptions: Vec<ParamScalar>,
    /// The ansatz the expression came from, for re-derivation after each substitution.
    pub ansatz: Option<Ansatz>,
}

impl<'a> Runner<'a> {
    pub fn new(branch: &'a Branch, spec: &'a FamilySpec, expr: Expr) -> Self {
        Runner {
            branch,
            spec,
            expr,
            rules: Vec::new(),
            steps: Vec::new(),
            assumptions: Vec::new(),
            ansatz: None,
        }
    }

    /// The ansatz with every substitution so far applied.
    pub fn reduced_ansatz(&self) -> Option<Ansatz> {
        self.ansatz
            .as_ref()
            .map(|a| Ansatz::custom(apply_rules(&a.q, &self.rules), a.order))
    }

    fn recheck(&self, x: &Extraction) -> Result<Option<bool>> {
        let Some(a) = self.reduced_ansatz() else {
            return Ok(None);
        };
        let e = determining_expression(&a, self.spec, Shell::Off)?;
        Ok(Some(x.apply(&apply_rules(&e, &self.rules)).is_zero()))
    }

    fn push_rules(&mut self, new: &[FuncRule]) {
        self.expr = apply_rules(&self.expr, new);
        self.rules.extend_from_slice(new);
    }

    /// Runs the script; returns the terminal status (`Closed` when every step went through).
    pub fn run(&mut self, script: &[Scripted]) -> Result<Status> {
        for s in script {
            if let Some(stop) = self.step(s)? {
                return Ok(stop);
            }
        }
        Ok(Status::Closed)
    }

    fn step(&mut self, s: &Scripted) -> Result<Option<Status>> {
        match &s.action {
            Action::Extract {
                extraction,
                stated,
                factor,
                rules,
            } => {
                let stated_e = parse_expr(stated)?;
                let expected = self.spec.specialize(&apply_rules(&stated_e, &self.rules));
                let obtained = extraction.apply(&self.expr);
                let ratio = if obtained == expected {
                    Some(Rational::from_integer(1.into()))
                } else {
                    obtained.ratio_to(&expected)
                };
                let matched = ratio.is_some() || (obtained.is_zero() && expected.is_zero());
                let rules: Vec<FuncRule> = rules.iter().map(|(p, r)| rule(p, r)).collect();
                let factor = factor.map(parse_scalar).transpose()?;
                let factor_status = factor.as_ref().map(|f| self.branch.vanishes(f)).transpose()?;
                let forced = match &factor {
                    _ if !matched => false,
                    Some(f) => {
                        let f = self.spec.specialize_scalar(f);
                        f.is_zero()
                            || divide(&expected, &f)
                                .is_some_and(|q| apply_rules(&q, &rules).is_zero())
                    }
                    None => rules.is_empty() || apply_rules(&expected, &rules).is_zero(),
                };
                let mut step = CascadeStep {
                    label: s.label.to_string(),
                    extraction: Some(extraction.clone()),
                    stated: stated_e,
                    expected,
                    obtained,
                    ratio,
                    factor: factor.clone(),
                    factor_status,
                    substitution: rules.clone(),
                    verified: matched && forced,
                    recheck: None,
                };
                if !step.verified {
                    let reason = if matched {
                        "relation does not force the substitution".to_string()
                    } else {
                        format!("obtained {} but expected {}", step.obtained, step.expected)
                    };
                    step.substitution.clear();
                    self.steps.push(step);
                    return Ok(Some(Status::Failed {
                        step: s.label.to_string(),
                        reason,
                    }));
                }
                match (factor, factor_status) {
                    (Some(f), Some(Vanishing::Yes)) => {
                        step.substitution.clear();
                        self.steps.push(step);
                        return Ok(Some(Status::OpenBranch {
                            factor: f,
                            step: s.label.to_string(),
                        }));
                    }
                    (Some(f), Some(Vanishing::Undetermined)) => {
                        let reduced = self.branch.reduce(&f)?;
                        if !self.assumptions.contains(&reduced) {
                            self.assumptions.push(reduced);
                        }
                    }
                    _ => {}
                }
                self.push_rules(&rules);
                if !rules.is_empty() {
                    step.recheck = self.recheck(extraction)?;
                }
                let bad = step.recheck == Some(false);
                self.steps.push(step);
                if bad {
                    return Ok(Some(Status::Failed {
                        step: s.label.to_string(),
                        reason: "re-extraction after substitution does not vanish".into(),
                    }));
                }
                Ok(None)
            }
            Action::Introduce { rules, must_vanish } => {
                let rules: Vec<FuncRule> = rules.iter().map(|(p, r)| rule(p, r)).collect();
                let mut ok = true;
                let mut residue = Expr::zero();
                for m in must_vanish {
                    let e = apply_rules(&apply_rules(&parse_expr(m)?, &self.rules), &rules);
                    if !e.is_zero() {
                        ok = false;
                        residue = e;
                    }
                }
                self.steps.push(CascadeStep {
                    label: s.label.to_string(),
                    extraction: None,
                    stated: Expr::zero(),
                    expected: Expr::zero(),
                    obtained: residue,
                    ratio: None,
                    factor: None,
                    factor_status: None,
                    substitution: rules.clone(),
                    verified: ok,
                    recheck: None,
                });
                if !ok {
                    return Ok(Some(Status::Failed {
                        step: s.label.to_string(),
                        reason: "reparametrization conflicts with earlier substitutions".into(),
                    }));
                }
                self.push_rules(&rules);
                Ok(None)
            }
        }
    }
}

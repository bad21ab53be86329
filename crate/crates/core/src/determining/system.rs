use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use crate::calculus::{euler_operator, normal_form, SolvedForm};
use crate::error::{Error, Result};
use crate::equation::{build_delta, FamilySpec};
use crate::jetexpr::{DepVar, Expr, Indep, JetMonomial, JetVar, Monomial};
use crate::coeffring::ParamScalar;

use super::ansatz::Ansatz;

/// Whether the determining expression is reduced modulo the equation before splitting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Shell {
    /// `E_u(QΔ)` as an identity in all jets, `u_tx` included.
    #[default]
    Off,
    /// `E_u(QΔ)` with `u_tx` and its consequences rewritten in normal jets.
    On,
}

/// `E_u(Q Δ)` for the ansatz, with the Euler bound `6 + order`.
pub fn determining_expression(ansatz: &Ansatz, spec: &FamilySpec, shell: Shell) -> Result<Expr> {
    let delta = build_delta(spec);
    let e = euler_operator(&(&ansatz.q * &delta), DepVar::U, 6 + ansatz.order)?;
    match shell {
        Shell::Off => Ok(e),
        Shell::On => normal_form(&e, &SolvedForm::from_delta(&delta)?),
    }
}

/// Size measures of an expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stats {
    /// Distinct monomials in jets, functions and `x, y, t`.
    pub monomials: usize,
    /// Terms once parameter coefficients are multiplied out.
    pub expanded_terms: usize,
    pub max_degrees: BTreeMap<JetVar, u16>,
}

impl Stats {
    pub fn of(e: &Expr) -> Stats {
        Stats {
            monomials: e.len(),
            expanded_terms: e.expanded_len(),
            max_degrees: e.max_degrees(),
        }
    }
}

/// What a system was computed from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Provenance {
    pub ansatz: String,
    pub family: String,
    pub branch: String,
}

/// A coefficient request: partial in `outer`, then exact in `inner`, then optionally the part
/// proportional to `d^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extraction {
    pub outer: JetMonomial,
    pub inner: Option<JetMonomial>,
    pub indep: Option<(Indep, u16)>,
}

impl Extraction {
    pub fn outer(outer: JetMonomial) -> Self {
        Extraction {
            outer,
            inner: None,
            indep: None,
        }
    }

    pub fn staged(outer: JetMonomial, inner: JetMonomial) -> Self {
        Extraction {
            outer,
            inner: Some(inner),
            indep: None,
        }
    }

    pub fn with_indep(mut self, d: Indep, n: u16) -> Self {
        self.indep = Some((d, n));
        self
    }

    pub fn jets(&self) -> impl Iterator<Item = JetVar> + '_ {
        self.outer
            .factors()
            .iter()
            .chain(self.inner.iter().flat_map(|m| m.factors()))
            .map(|&(j, _)| j)
    }

    /// Applies the extraction to an expression.
    pub fn apply(&self, e: &Expr) -> Expr {
        let mut c = e.coefficient_in(&self.outer);
        if let Some(inner) = &self.inner {
            c = c.coefficient_of(inner);
        }
        if let Some((d, n)) = self.indep {
            c = c.coefficient_of_indep(d, n);
        }
        c
    }
}

impl fmt::Display for Extraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.outer)?;
        match &self.inner {
            Some(i) if i.is_one() => write!(f, " free part")?,
            Some(i) => write!(f, " / [{i}]")?,
            None => {}
        }
        if let Some((d, n)) = self.indep {
            write!(f, " / {d}^{n}")?;
        }
        Ok(())
    }
}

/// The determining expression split by monomials in the splittable jets.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterminingSystem {
    pub expr: Expr,
    pub equations: BTreeMap<JetMonomial, Expr>,
    /// Jets left inside the equations because unknown functions depend on them.
    pub opaque: BTreeSet<JetVar>,
    pub provenance: Provenance,
}

/// Splits by jet monomials; jets that occur as unknown-function arguments are not split on.
pub fn split_system(dexpr: &Expr, ansatz: &Ansatz) -> DeterminingSystem {
    let opaque: BTreeSet<JetVar> = dexpr
        .opaque_jets()
        .into_iter()
        .chain(ansatz.opaque_jets())
        .collect();
    let terms: Vec<(&Monomial, &ParamScalar)> = dexpr.terms().collect();
    let equations = terms
        .par_chunks(256)
        .map(|chunk| {
            let mut out: BTreeMap<JetMonomial, Expr> = BTreeMap::new();
            for (m, s) in chunk {
                let (key, rest) = m.jets().partition(|j| !opaque.contains(j));
                let mono = Monomial {
                    jets: rest,
                    ..(*m).clone()
                };
                out.entry(key).or_default().add_term(mono, (*s).clone());
            }
            out
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    DeterminingSystem {
        expr: dexpr.clone(),
        equations,
        opaque,
        provenance: Provenance {
            ansatz: ansatz.to_string(),
            ..Provenance::default()
        },
    }
}

impl DeterminingSystem {
    pub fn with_provenance(mut self, family: &FamilySpec, branch: impl Into<String>) -> Self {
        self.provenance.family = family.to_string();
        self.provenance.branch = branch.into();
        self
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    /// The equation attached to an exact key, or zero.
    pub fn get(&self, key: &JetMonomial) -> Expr {
        self.equations.get(key).cloned().unwrap_or_default()
    }

    /// `Σ key * equation`.
    pub fn reassemble(&self) -> Expr {
        self.equations
            .iter()
            .map(|(k, v)| &Expr::jet_monomial(k) * v)
            .sum()
    }

    pub fn stats(&self) -> Stats {
        Stats::of(&self.expr)
    }

    /// Two-stage coefficient extraction. Refused while any unknown function still depends on a
    /// jet, since the split would then be incomplete.
    pub fn staged_coefficient(&self, x: &Extraction) -> Result<Expr> {
        if !self.opaque.is_empty() {
            let names: Vec<String> = self.opaque.iter().map(|j| j.to_string()).collect();
            return Err(Error::Opaque(format!(
                "unknown functions still depend on {}; polynomialize the ansatz first",
                names.join(", ")
            )));
        }
        Ok(x.apply(&self.expr))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetexpr::{parse_expr, parse_jet_monomial};

    fn key(s: &str) -> JetMonomial {
        parse_jet_monomial(s).unwrap()
    }

    #[test]
    fn constant_multiplier() {
        let a = Ansatz::custom(Expr::one(), 0);
        let e = determining_expression(&a, &FamilySpec::symbolic(), Shell::Off).unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn order0_relations() {
        let a = Ansatz::order0();
        let e = determining_expression(&a, &FamilySpec::symbolic(), Shell::Off).unwrap();
        let sys = split_system(&e, &a);
        assert_eq!(sys.reassemble(), e);
        let q = |s: &str| parse_expr(s).unwrap();
        let expected: BTreeMap<JetMonomial, Expr> = [
            (key("u^2"), q("g*Q_xx(x,y,t)")),
            (key("u"), q("e*Q_x4(x,y,t)")),
            (key("u_xx"), q("(3*e - f)*Q_xx(x,y,t)")),
            (key("u_x"), q("(3*e - f)*Q_xxx(x,y,t)")),
            (
                key("1"),
                q("Q_xt(x,y,t) + c*Q_x4(x,y,t) + Q_x6(x,y,t) + sigma*Q_yy(x,y,t)"),
            ),
        ]
        .into();
        assert_eq!(sys.equations, expected);
        assert!(sys.staged_coefficient(&Extraction::outer(key("u"))).is_ok());
    }

    #[test]
    fn on_shell_agrees_for_order0() {
        let a = Ansatz::order0();
        let s = FamilySpec::symbolic();
        assert_eq!(
            determining_expression(&a, &s, Shell::Off).unwrap(),
            determining_expression(&a, &s, Shell::On).unwrap()
        );
    }

    #[test]
    fn opaque_refusal() {
        let a = Ansatz::order1_linear();
        let sys = split_system(&a.q, &a);
        assert!(matches!(
            sys.staged_coefficient(&Extraction::outer(key("u_x"))),
            Err(Error::Opaque(_))
        ));
    }
}

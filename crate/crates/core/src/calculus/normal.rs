use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::jetexpr::{Expr, Indep, JetMonomial, JetVar, Monomial};

use super::derivative::total_derivative;

/// The equation solved for `u_tx`: `lhs = rhs` with `rhs` in normal jets.
#[derive(Clone, Debug, PartialEq)]
pub struct SolvedForm {
    pub lhs: JetVar,
    pub rhs: Expr,
}

const ORDER_GUARD: u32 = 40;

impl SolvedForm {
    /// Solves `delta = 0` for `u_tx`. The mixed derivative must occur in a single linear term
    /// with a unit coefficient.
    pub fn from_delta(delta: &Expr) -> Result<SolvedForm> {
        let lhs = JetVar::u(1, 0, 1);
        let key = JetMonomial::single(lhs);
        let mut coeff = None;
        let mut rest = Expr::zero();
        for (m, s) in delta.terms() {
            if m.jets().power_of(&lhs) == 0 {
                rest.add_term(m.clone(), s.clone());
            } else if m.jets() == &key && m.funcs().is_empty() && m.indep() == [0; 3] {
                coeff = Some(s.clone());
            } else {
                return Err(Error::NotSolvable(lhs, format!("{lhs} occurs nonlinearly")));
            }
        }
        let coeff = coeff.ok_or_else(|| Error::NotSolvable(lhs, format!("{lhs} does not occur")))?;
        let inv = coeff
            .unit_inverse()
            .ok_or_else(|| Error::NotSolvable(lhs, format!("coefficient {coeff} is not a unit")))?;
        let rhs = rest.scale(&-inv);
        if let Some(j) = rhs.explicit_jets().into_iter().find(|j| !j.is_normal()) {
            return Err(Error::NotSolvable(lhs, format!("right-hand side contains {j}")));
        }
        Ok(SolvedForm { lhs, rhs })
    }
}

/// Rewrites non-normal jets in terms of normal ones, memoizing per jet.
#[derive(Debug)]
pub struct NormalFormer<'a> {
    solved: &'a SolvedForm,
    memo: HashMap<JetVar, Expr>,
}

impl<'a> NormalFormer<'a> {
    pub fn new(solved: &'a SolvedForm) -> Self {
        NormalFormer {
            solved,
            memo: HashMap::new(),
        }
    }

    /// Normal form of a single jet.
    pub fn jet(&mut self, j: JetVar) -> Result<Expr> {
        if j.is_normal() || j.dep != self.solved.lhs.dep {
            return Ok(Expr::jet(j));
        }
        if let Some(e) = self.memo.get(&j) {
            return Ok(e.clone());
        }
        if j.order() > ORDER_GUARD {
            return Err(Error::NormalFormDiverged(j));
        }
        let [i, jy, k] = j.index.0;
        let result = if (i, jy, k) == (1, 0, 1) {
            self.solved.rhs.clone()
        } else {
            // innermost first: peel t, then y, then x down to u_tx
            let (prev, dir) = if k > 1 {
                (JetVar::u(i, jy, k - 1), Indep::T)
            } else if jy > 0 {
                (JetVar::u(i, jy - 1, k), Indep::Y)
            } else {
                (JetVar::u(i - 1, jy, k), Indep::X)
            };
            let base = self.jet(JetVar::new(j.dep, prev.index))?;
            let d = total_derivative(&base, dir);
            self.expr(&d)?
        };
        self.memo.insert(j, result.clone());
        Ok(result)
    }

    /// Normal form of an expression.
    pub fn expr(&mut self, e: &Expr) -> Result<Expr> {
        if e.explicit_jets().iter().all(|j| j.is_normal()) {
            return Ok(e.clone());
        }
        let mut out = Expr::zero();
        for (m, s) in e.terms() {
            let (bad, good) = m.jets().partition(|j| !j.is_normal());
            if bad.is_one() {
                out.add_term(m.clone(), s.clone());
                continue;
            }
            let mut acc = Expr::term(
                Monomial {
                    jets: good,
                    ..m.clone()
                },
                s.clone(),
            );
            for &(j, n) in bad.factors() {
                let r = self.jet(j)?;
                acc = &acc * &r.pow(n as u32);
            }
            out += acc;
        }
        Ok(out)
    }
}

/// Replaces `u_tx` and all its differential consequences by normal jets.
pub fn normal_form(expr: &Expr, solved: &SolvedForm) -> Result<Expr> {
    NormalFormer::new(solved).expr(expr)
}

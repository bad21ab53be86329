#![allow(dead_code)]

use jetcalc::coeffring::{int, Param, ParamScalar};
use jetcalc::jetexpr::Expr;

/// One term: integer coefficient, parameter slot, up to two `u` jets, powers of `x, y, t`.
#[derive(Clone, Debug)]
pub struct TermSpec {
    pub coeff: i64,
    pub param: u8,
    pub jets: Vec<(u8, u8, u8)>,
    pub indep: (u8, u8, u8),
}

fn param(slot: u8) -> ParamScalar {
    match slot % 6 {
        0 => ParamScalar::one(),
        1 => ParamScalar::param(Param::C),
        2 => ParamScalar::param(Param::E),
        3 => ParamScalar::param(Param::F),
        4 => ParamScalar::param(Param::G),
        _ => ParamScalar::sigma(),
    }
}

pub fn build(terms: &[TermSpec]) -> Expr {
    terms
        .iter()
        .map(|t| {
            let mut e = Expr::scalar(param(t.param).scale(&int(t.coeff)));
            for &(i, j, k) in &t.jets {
                e = &e * &Expr::u(i, j, k);
            }
            let (px, py, pt) = t.indep;
            &(&(&e * &Expr::x().pow(px as u32)) * &Expr::y().pow(py as u32)) * &Expr::t().pow(pt as u32)
        })
        .sum()
}

//! Conserved vectors for zeroth-order multipliers and the divergence check.

use std::collections::BTreeMap;
use std::fmt;

use crate::calculus::{partial_indep, total_derivative};
use crate::cascade::order0_residuals;
use crate::coeffring::{ParamScalar, Rational};
use crate::equation::{build_delta, build_f, build_j, FamilySpec};
use crate::error::{Error, Result};
use crate::jetexpr::{parse_expr, parse_expr_with, Bindings, Expr, Indep};

const FIXTURE: &str = include_str!("../../fixtures/conserved_vectors.txt");

/// Density `T` and fluxes `X`, `Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConservedVector {
    pub t: Expr,
    pub x: Expr,
    pub y: Expr,
}

impl fmt::Display for ConservedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T = {}\nX = {}\nY = {}", self.t, self.x, self.y)
    }
}

impl ConservedVector {
    pub fn specialize(&self, spec: &FamilySpec) -> ConservedVector {
        ConservedVector {
            t: spec.specialize(&self.t),
            x: spec.specialize(&self.x),
            y: spec.specialize(&self.y),
        }
    }
}

/// `T = Q u_x`, `X = Q F + Q_x J - Q_t u`, `Y = sigma (Q u_y - Q_y u)` for `Q(x,y,t)`.
pub fn conserved_vector_for(q: &Expr, spec: &FamilySpec) -> Result<ConservedVector> {
    if !q.explicit_jets().is_empty() || !q.opaque_jets().is_empty() {
        return Err(Error::NotAMultiplier(format!("{q} depends on jets")));
    }
    let q = spec.specialize(q);
    for r in order0_residuals(&q) {
        let r = spec.specialize(&r);
        if !r.is_zero() {
            return Err(Error::NotAMultiplier(format!("residual {r} does not vanish")));
        }
    }
    let u = Expr::u(0, 0, 0);
    let sigma = Expr::scalar(spec.sigma.clone());
    let qx = partial_indep(&q, Indep::X);
    let qt = partial_indep(&q, Indep::T);
    let qy = partial_indep(&q, Indep::Y);
    Ok(ConservedVector {
        t: &q * &Expr::u(1, 0, 0),
        x: &(&(&q * &build_f(spec)) + &(&qx * &build_j(spec))) - &(&qt * &u),
        y: &sigma * &(&(&q * &Expr::u(0, 1, 0)) - &(&qy * &u)),
    })
}

/// `D_t T + D_x X + D_y Y - Q Δ`, with no reduction modulo the equation.
pub fn divergence_residual(cv: &ConservedVector, q: &Expr, spec: &FamilySpec) -> Expr {
    let div = &(&total_derivative(&cv.t, Indep::T) + &total_derivative(&cv.x, Indep::X))
        + &total_derivative(&cv.y, Indep::Y);
    spec.specialize(&(&div - &(q * &build_delta(spec))))
}

/// One multiplier with the conserved vector shipped for it.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisLaw {
    pub index: usize,
    pub q: Expr,
    pub vector: ConservedVector,
}

fn flux_bindings(spec: &FamilySpec) -> Bindings {
    [("F".to_string(), build_f(spec)), ("J".to_string(), build_j(spec))].into()
}

/// The six shipped triples, over the given family.
pub fn basis_laws(spec: &FamilySpec) -> Result<Vec<BasisLaw>> {
    let bindings = flux_bindings(spec);
    let mut fields: BTreeMap<String, Expr> = BTreeMap::new();
    for (n, line) in FIXTURE.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Fixture(format!("line {}: expected `name = expr`", n + 1)))?;
        let e = parse_expr_with(value.trim(), &bindings)
            .map_err(|err| Error::Fixture(format!("line {}: {err}", n + 1)))?;
        fields.insert(key.trim().to_string(), spec.specialize(&e));
    }
    (0..6)
        .map(|i| {
            let mut take = |p: &str| {
                fields
                    .remove(&format!("{p}{i}"))
                    .ok_or_else(|| Error::Fixture(format!("missing {p}{i}")))
            };
            Ok(BasisLaw {
                index: i,
                q: take("Q")?,
                vector: ConservedVector {
                    t: take("T")?,
                    x: take("X")?,
                    y: take("Y")?,
                },
            })
        })
        .collect()
}

/// Check of one shipped triple.
#[derive(Clone, Debug, PartialEq)]
pub struct LawCheck {
    pub index: usize,
    pub q: Expr,
    /// The shipped triple agrees with the one built from `Q`.
    pub matches_construction: bool,
    pub residual: Expr,
}

impl LawCheck {
    pub fn verified(&self) -> bool {
        self.matches_construction && self.residual.is_zero()
    }
}

pub fn verify_basis_laws(spec: &FamilySpec) -> Result<Vec<LawCheck>> {
    basis_laws(spec)?
        .into_iter()
        .map(|law| {
            let built = conserved_vector_for(&law.q, spec)?;
            Ok(LawCheck {
                index: law.index,
                matches_construction: built == law.vector,
                residual: divergence_residual(&law.vector, &law.q, spec),
                q: law.q,
            })
        })
        .collect()
}

/// The polynomial multiplier with `A0 = a0 + a0t t`, `A1 = a1 + a1t t`, constant `B0`, `B1`.
pub fn polynomial_multiplier(a0: &Rational, a0t: &Rational, a1: &Rational, a1t: &Rational, b0: &Rational, b1: &Rational) -> Expr {
    let r = |v: &Rational| Expr::rational(v.clone());
    let (x, y, t) = (Expr::x(), Expr::y(), Expr::t());
    let sigma = Expr::scalar(ParamScalar::sigma());
    let big_a0 = &r(a0) + &(&r(a0t) * &t);
    let big_a1 = &r(a1) + &(&r(a1t) * &t);
    let half = parse_expr("1/2").unwrap();
    let sixth = parse_expr("1/6").unwrap();
    &(&(&(&x * &(&big_a0 + &(&big_a1 * &y))) + &r(b0)) + &(&r(b1) * &y))
        - &(&sigma * &(&(&(&half * &r(a0t)) * &y.pow(2)) + &(&(&sixth * &r(a1t)) * &y.pow(3))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::polynomial_basis;
    use crate::coeffring::int;

    #[test]
    fn shipped_triples_conserve() {
        let spec = FamilySpec::symbolic();
        let checks = verify_basis_laws(&spec).unwrap();
        assert_eq!(checks.len(), 6);
        for c in &checks {
            assert!(c.verified(), "law {}: {}", c.index, c.residual);
        }
        let qs: Vec<Expr> = checks.into_iter().map(|c| c.q).collect();
        assert_eq!(qs, polynomial_basis());
    }

    #[test]
    fn unit_multiplier_vector() {
        let spec = FamilySpec::symbolic();
        let cv = conserved_vector_for(&Expr::one(), &spec).unwrap();
        assert_eq!(cv.t, Expr::u(1, 0, 0));
        assert_eq!(cv.x, build_f(&spec));
        assert_eq!(cv.y, parse_expr("sigma*u_y").unwrap());
    }

    #[test]
    fn flipped_flux_is_caught() {
        let spec = FamilySpec::symbolic();
        let mut cv = conserved_vector_for(&Expr::one(), &spec).unwrap();
        cv.y = -cv.y;
        assert_eq!(
            divergence_residual(&cv, &Expr::one(), &spec),
            parse_expr("-2*sigma*u_yy").unwrap()
        );
    }

    #[test]
    fn rejects_non_multiplier() {
        let spec = FamilySpec::symbolic();
        assert!(matches!(
            conserved_vector_for(&parse_expr("x^2").unwrap(), &spec),
            Err(Error::NotAMultiplier(_))
        ));
        assert!(conserved_vector_for(&Expr::u(0, 0, 0), &spec).is_err());
    }

    #[test]
    fn pairs_differ_by_y() {
        let b = polynomial_basis();
        assert_eq!(b[1], &Expr::y() * &b[0]);
        assert_eq!(b[3], &Expr::y() * &b[2]);
        assert_ne!(b[5], &Expr::y() * &b[4]);
    }

    #[test]
    fn affine_family_member() {
        let q = polynomial_multiplier(&int(0), &int(1), &int(0), &int(0), &int(0), &int(0));
        assert_eq!(q, polynomial_basis()[4]);
    }
}

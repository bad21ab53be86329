use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed};

use crate::coeffring::{int, rat, Assignment, Branch, Param, ParamScalar, Rational};
use crate::error::{Error, Result};
use crate::jetexpr::{Expr, JetVar};

/// Coefficients of the normalized family. Each is a parameter expression; the default keeps every
/// parameter symbolic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub c: ParamScalar,
    pub e: ParamScalar,
    pub f: ParamScalar,
    pub g: ParamScalar,
    pub sigma: ParamScalar,
}

/// The one-dimensional integrable triples `(name, e, f, g)`.
pub const NAMED_TRIPLES: [(&str, i64, i64, i64); 3] = [
    ("Lax", 10, 20, 30),
    ("Sawada-Kotera", 5, 5, 5),
    ("Kaup-Kupershmidt", 10, 25, 20),
];

impl Default for FamilySpec {
    fn default() -> Self {
        Self::symbolic()
    }
}

impl FamilySpec {
    pub fn symbolic() -> Self {
        FamilySpec {
            c: Param::C.into(),
            e: Param::E.into(),
            f: Param::F.into(),
            g: Param::G.into(),
            sigma: Param::Sigma.into(),
        }
    }

    /// `(e, f, g)` fixed, `c` and `sigma` symbolic.
    pub fn triple(e: i64, f: i64, g: i64) -> Self {
        let mut s = Self::symbolic();
        s.e = ParamScalar::from_int(e);
        s.f = ParamScalar::from_int(f);
        s.g = ParamScalar::from_int(g);
        s
    }

    fn slot(&mut self, p: Param) -> &mut ParamScalar {
        match p {
            Param::C => &mut self.c,
            Param::E => &mut self.e,
            Param::F => &mut self.f,
            Param::G => &mut self.g,
            Param::Sigma => &mut self.sigma,
        }
    }

    pub fn get(&self, p: Param) -> &ParamScalar {
        match p {
            Param::C => &self.c,
            Param::E => &self.e,
            Param::F => &self.f,
            Param::G => &self.g,
            Param::Sigma => &self.sigma,
        }
    }

    /// Fixes one parameter to a number. `sigma` only accepts +1 or -1.
    pub fn with_value(mut self, p: Param, value: Rational) -> Result<Self> {
        if p == Param::Sigma && value.abs() != Rational::one() {
            return Err(Error::SigmaNotUnit(value.to_string()));
        }
        *self.slot(p) = ParamScalar::from_rational(value);
        Ok(self)
    }

    pub fn from_assignment(a: &Assignment) -> Result<Self> {
        a.iter()
            .try_fold(Self::symbolic(), |s, (p, v)| s.with_value(*p, v.clone()))
    }

    /// The family restricted to a branch's solved equalities.
    pub fn from_branch(b: &Branch) -> Result<Self> {
        Ok(Self::from_substitution(&b.validate()?))
    }

    pub fn from_substitution(subst: &BTreeMap<Param, ParamScalar>) -> Self {
        let mut s = Self::symbolic();
        for p in Param::ALL {
            *s.slot(p) = s.get(p).substitute(subst);
        }
        s
    }

    /// Parameters that are not left as themselves.
    pub fn substitution(&self) -> BTreeMap<Param, ParamScalar> {
        Param::ALL
            .into_iter()
            .filter(|&p| self.get(p) != &ParamScalar::param(p))
            .map(|p| (p, self.get(p).clone()))
            .collect()
    }

    pub fn is_symbolic(&self) -> bool {
        self.substitution().is_empty()
    }

    /// Restricts an expression written over symbolic parameters to this family.
    pub fn specialize(&self, e: &Expr) -> Expr {
        let s = self.substitution();
        if s.is_empty() {
            e.clone()
        } else {
            e.substitute_params(&s)
        }
    }

    pub fn specialize_scalar(&self, s: &ParamScalar) -> ParamScalar {
        s.substitute(&self.substitution())
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "c={}, e={}, f={}, g={}, sigma={}",
            self.c, self.e, self.f, self.g, self.sigma
        )
    }
}

fn u(i: u8, j: u8, k: u8) -> Expr {
    Expr::u(i, j, k)
}

fn v(i: u8, j: u8, k: u8) -> Expr {
    Expr::v(i, j, k)
}

fn scaled(e: Expr, s: &ParamScalar) -> Expr {
    e.scale(s)
}

/// The expanded left-hand side `Δ` of the normalized equation.
pub fn build_delta(s: &FamilySpec) -> Expr {
    let uu = u(0, 0, 0);
    let ux = u(1, 0, 0);
    let uxx = u(2, 0, 0);
    [
        u(1, 0, 1),
        scaled(u(4, 0, 0), &s.c),
        u(6, 0, 0),
        scaled(&ux * &u(3, 0, 0), &(&s.e + &s.f)),
        scaled(&uu * &u(4, 0, 0), &s.e),
        scaled(uxx.pow(2), &s.f),
        scaled(&uu * &ux.pow(2), &s.g.scale(&int(2))),
        scaled(&uu.pow(2) * &uxx, &s.g),
        scaled(u(0, 2, 0), &s.sigma),
    ]
    .into_iter()
    .sum()
}

/// The flux `F` with `Δ = D_t(u_x) + D_x(F) + D_y(σ u_y)`.
pub fn build_f(s: &FamilySpec) -> Expr {
    let uu = u(0, 0, 0);
    [
        scaled(u(3, 0, 0), &s.c),
        u(5, 0, 0),
        scaled(&uu * &u(3, 0, 0), &s.e),
        scaled(&u(1, 0, 0) * &u(2, 0, 0), &s.f),
        scaled(&uu.pow(2) * &u(1, 0, 0), &s.g),
    ]
    .into_iter()
    .sum()
}

/// The potential `J` with `D_x(J) = -F`.
pub fn build_j(s: &FamilySpec) -> Expr {
    let uu = u(0, 0, 0);
    [
        scaled(u(2, 0, 0), &-&s.c),
        -u(4, 0, 0),
        scaled(&uu * &u(2, 0, 0), &-&s.e),
        scaled(u(1, 0, 0).pow(2), &(&s.e - &s.f).scale(&rat(1, 2))),
        scaled(uu.pow(3), &s.g.scale(&rat(-1, 3))),
    ]
    .into_iter()
    .sum()
}

/// The potential form of the equation in `v` with `u = v_x`.
pub fn potential_delta(s: &FamilySpec) -> Expr {
    let vx = v(1, 0, 0);
    [
        v(1, 0, 1),
        scaled(v(4, 0, 0), &s.c),
        v(6, 0, 0),
        scaled(&vx * &v(4, 0, 0), &s.e),
        scaled(&v(2, 0, 0) * &v(3, 0, 0), &s.f),
        scaled(&vx.pow(2) * &v(2, 0, 0), &s.g),
        scaled(v(0, 2, 0), &s.sigma),
    ]
    .into_iter()
    .sum()
}

/// The Lagrangian density of the potential equation on `f = 2e`.
pub fn lagrangian(s: &FamilySpec) -> Expr {
    lagrangian_with(s, &scaled(Expr::one(), &s.e.scale(&rat(1, 2))))
}

/// The Lagrangian with the coefficient of `v_x v_xx^2` replaced by `a`.
pub(crate) fn lagrangian_with(s: &FamilySpec, a: &Expr) -> Expr {
    let half = rat(1, 2);
    let vx = v(1, 0, 0);
    [
        (&v(0, 0, 1) * &vx).scale_rational(&-&half),
        scaled(v(2, 0, 0).pow(2), &s.c.scale(&half)),
        v(3, 0, 0).pow(2).scale_rational(&-&half),
        &(&vx * &v(2, 0, 0).pow(2)) * a,
        scaled(vx.pow(4), &s.g.scale(&rat(-1, 12))),
        scaled(v(0, 1, 0).pow(2), &s.sigma.scale(&-&half)),
    ]
    .into_iter()
    .sum()
}

/// Rewrites `v_(i,j,k)` as `u_(i-1,j,k)` for `i >= 1`; other jets are kept.
pub fn v_to_u(e: &Expr) -> Expr {
    Expr::from_terms(e.terms().map(|(m, s)| {
        let mut r = m.clone();
        r.jets = crate::jetexpr::JetMonomial::new(m.jets().factors().iter().map(|&(j, n)| {
            if j.dep == crate::jetexpr::DepVar::V && j.index.0[0] >= 1 {
                let [i, jy, k] = j.index.0;
                (JetVar::u(i - 1, jy, k), n)
            } else {
                (j, n)
            }
        }));
        (r, s.clone())
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::total_derivative;
    use crate::jetexpr::{parse_jet_monomial, Indep, JetMonomial};

    fn key(s: &str) -> JetMonomial {
        parse_jet_monomial(s).unwrap()
    }

    #[test]
    fn delta_terms() {
        let d = build_delta(&FamilySpec::symbolic());
        assert_eq!(d.len(), 9);
        assert_eq!(d.collect_by_jets().len(), 9);
        assert_eq!(
            d.coefficient_of(&key("u_x*u_xxx")).as_scalar().unwrap(),
            &ParamScalar::param(Param::E) + &ParamScalar::param(Param::F)
        );
        assert_eq!(
            d.coefficient_of(&key("u_yy")).as_scalar().unwrap(),
            ParamScalar::sigma()
        );
        let sk = FamilySpec::triple(5, 5, 5).with_value(Param::Sigma, int(1)).unwrap();
        assert_eq!(
            build_delta(&sk).coefficient_of(&key("u_x*u_xxx")).as_scalar().unwrap(),
            ParamScalar::from_int(10)
        );
    }

    #[test]
    fn flux_potential() {
        let s = FamilySpec::symbolic();
        let j = build_j(&s);
        assert_eq!(
            j.coefficient_of(&key("u_x^2")).as_scalar().unwrap(),
            (&ParamScalar::param(Param::E) - &ParamScalar::param(Param::F)).scale(&rat(1, 2))
        );
        assert_eq!(
            j.coefficient_of(&key("u^3")).as_scalar().unwrap(),
            ParamScalar::param(Param::G).scale(&rat(-1, 3))
        );
        assert!((&total_derivative(&j, Indep::X) + &build_f(&s)).is_zero());
    }

    #[test]
    fn divergence_form() {
        let s = FamilySpec::symbolic();
        let div = &(&total_derivative(&Expr::u(1, 0, 0), Indep::T)
            + &total_derivative(&build_f(&s), Indep::X))
            + &total_derivative(&Expr::u(0, 1, 0).scale(&s.sigma), Indep::Y);
        assert_eq!(build_delta(&s), div);
    }

    #[test]
    fn potential_and_lagrangian() {
        let s = FamilySpec::symbolic();
        let p = potential_delta(&s);
        assert_eq!(p.len(), 7);
        assert_eq!(
            p.coefficient_of(&key("v_x*v_xxxx")).as_scalar().unwrap(),
            ParamScalar::param(Param::E)
        );
        let g0 = FamilySpec::symbolic().with_value(Param::G, int(0)).unwrap();
        assert_eq!(potential_delta(&g0).len(), 6);
        let l = lagrangian(&s);
        assert_eq!(l.len(), 6);
        assert_eq!(
            l.coefficient_of(&key("v_x^4")).as_scalar().unwrap(),
            ParamScalar::param(Param::G).scale(&rat(-1, 12))
        );
        assert_eq!(
            l.coefficient_of(&key("v_t*v_x")).as_scalar().unwrap(),
            ParamScalar::from_rational(rat(-1, 2))
        );
    }

    #[test]
    fn potential_shift_matches_delta_off_the_mixed_term() {
        // u = v_x: the potential equation is Δ integrated once in x
        let s = FamilySpec::symbolic();
        let shifted = v_to_u(&total_derivative(&potential_delta(&s), Indep::X));
        let d = build_delta(&s);
        let gap = &d - &shifted;
        assert!(gap.is_zero(), "{gap}");
    }
}

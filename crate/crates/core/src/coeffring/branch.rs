use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::scalar::{Param, ParamScalar, Rational};
use crate::error::{Error, Result};

/// Outcome of asking whether a scalar vanishes on a branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Vanishing {
    Yes,
    No,
    Undetermined,
}

/// A conjunction of parameter equalities (`p = 0`) and non-vanishing conditions (`p != 0`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Branch {
    equalities: Vec<ParamScalar>,
    nonvanishing: Vec<ParamScalar>,
}

// Elimination preference for solving linear equalities.
const SOLVE_ORDER: [Param; 4] = [Param::G, Param::F, Param::E, Param::C];

impl Branch {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn equalities(&self) -> &[ParamScalar] {
        &self.equalities
    }

    pub fn nonvanishing(&self) -> &[ParamScalar] {
        &self.nonvanishing
    }

    pub fn is_empty(&self) -> bool {
        self.equalities.is_empty() && self.nonvanishing.is_empty()
    }

    /// Adds `s = 0`.
    pub fn with_eq(mut self, s: ParamScalar) -> Self {
        if !self.equalities.contains(&s) {
            self.equalities.push(s);
        }
        self
    }

    /// Adds `s != 0`.
    pub fn with_ne(mut self, s: ParamScalar) -> Self {
        if !self.nonvanishing.contains(&s) {
            self.nonvanishing.push(s);
        }
        self
    }

    /// Binds a parameter to a value: `p - value = 0`.
    pub fn with_value(self, p: Param, value: Rational) -> Self {
        self.with_eq(&ParamScalar::param(p) - &ParamScalar::from_rational(value))
    }

    /// Checks the invariants and returns the solved substitution for the equalities.
    pub fn validate(&self) -> Result<BTreeMap<Param, ParamScalar>> {
        for s in &self.equalities {
            if self.nonvanishing.contains(s) || self.nonvanishing.contains(&-s) {
                return Err(Error::Branch(format!("{s} is both zero and nonzero")));
            }
            if s.degree_in(Param::Sigma) > 0 {
                return Err(Error::Branch(format!(
                    "constraint {s} involves sigma; branches range over c, e, f, g"
                )));
            }
        }
        let subst = self.solve()?;
        for s in &self.nonvanishing {
            if s.substitute(&subst).is_zero() {
                return Err(Error::Branch(format!(
                    "{s} != 0 contradicts the equalities"
                )));
            }
        }
        Ok(subst)
    }

    fn solve(&self) -> Result<BTreeMap<Param, ParamScalar>> {
        let mut subst: BTreeMap<Param, ParamScalar> = BTreeMap::new();
        for eq in &self.equalities {
            let reduced = eq.substitute(&subst);
            if reduced.is_zero() {
                continue;
            }
            if let Some(c) = reduced.as_constant() {
                return Err(Error::Branch(format!("{eq} = 0 is inconsistent ({c} = 0)")));
            }
            let (var, value) = solve_linear(&reduced).ok_or_else(|| {
                Error::Branch(format!(
                    "{eq} = 0 is not linear in a free parameter; only linear relations are supported"
                ))
            })?;
            let single: BTreeMap<Param, ParamScalar> = [(var, value.clone())].into();
            for v in subst.values_mut() {
                *v = v.substitute(&single);
            }
            subst.insert(var, value);
        }
        Ok(subst)
    }

    /// Reduces `a` modulo the solved equalities.
    pub fn reduce(&self, a: &ParamScalar) -> Result<ParamScalar> {
        Ok(a.substitute(&self.validate()?))
    }

    /// `Yes` if `a` reduces to zero, `No` if it is a unit on the branch (a nonzero constant,
    /// possibly times sigma and declared non-vanishing factors), `Undetermined` otherwise.
    pub fn vanishes(&self, a: &ParamScalar) -> Result<Vanishing> {
        let subst = self.validate()?;
        let r = a.substitute(&subst);
        if r.is_zero() {
            return Ok(Vanishing::Yes);
        }
        let factors: Vec<ParamScalar> = self
            .nonvanishing
            .iter()
            .map(|n| n.substitute(&subst))
            .filter(|n| n.as_unit().is_none())
            .collect();
        Ok(if is_unit_on(&r, &factors, 0) {
            Vanishing::No
        } else {
            Vanishing::Undetermined
        })
    }

    /// Parses comma-separated relations over c, e, f, g such as `g=0, 27e=14f, e+f!=0`.
    pub fn parse(text: &str) -> Result<Branch> {
        let mut b = Branch::new();
        let mut offset = 0;
        for rel in text.split(',') {
            let start = offset + (rel.len() - rel.trim_start().len());
            offset += rel.len() + 1;
            let rel = rel.trim();
            if rel.is_empty() {
                continue;
            }
            let (lhs, rhs, ne) = if let Some(i) = rel.find("!=") {
                (&rel[..i], &rel[i + 2..], true)
            } else if let Some(i) = rel.find('=') {
                (&rel[..i], &rel[i + 1..], false)
            } else {
                return Err(Error::Syntax {
                    pos: start,
                    message: format!("relation `{rel}` needs `=` or `!=`"),
                });
            };
            let s = &parse_linear(lhs, start)? - &parse_linear(rhs, start)?;
            if s.is_zero() {
                return Err(Error::Branch(format!("relation `{rel}` is trivial")));
            }
            b = if ne { b.with_ne(s) } else { b.with_eq(s) };
        }
        b.validate()?;
        Ok(b)
    }
}

fn is_unit_on(r: &ParamScalar, factors: &[ParamScalar], depth: usize) -> bool {
    if r.as_unit().is_some() {
        return true;
    }
    if depth > 16 {
        return false;
    }
    factors.iter().any(|n| {
        r.exact_div(n)
            .is_some_and(|q| is_unit_on(&q, factors, depth + 1))
    })
}

fn solve_linear(p: &ParamScalar) -> Option<(Param, ParamScalar)> {
    for var in SOLVE_ORDER {
        if p.degree_in(var) != 1 {
            continue;
        }
        let mut coeff = None;
        let mut rest = Vec::new();
        let mut ok = true;
        for (m, r) in p.terms() {
            if m.exponent(var) == 1 {
                if m.degree() != 1 || coeff.is_some() {
                    ok = false;
                    break;
                }
                coeff = Some(r.clone());
            } else {
                let mut e = [0u8; 5];
                for q in Param::ALL {
                    e[q.index()] = m.exponent(q);
                }
                rest.push((r.clone(), e));
            }
        }
        if let (true, Some(k)) = (ok, coeff) {
            let rest = ParamScalar::from_terms(rest);
            return Some((var, rest.scale(&(-k.recip()))));
        }
    }
    None
}

fn parse_linear(text: &str, pos: usize) -> Result<ParamScalar> {
    let err = |msg: String| Error::Syntax { pos, message: msg };
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(err("empty side of relation".into()));
    }
    let bytes = s.as_bytes();
    let mut i = 0;
    let mut acc = ParamScalar::zero();
    while i < bytes.len() {
        let mut sign = Rational::one();
        while i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            if bytes[i] == b'-' {
                sign = -sign;
            }
            i += 1;
        }
        let num_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let mut coeff = if i > num_start {
            Rational::from_integer(s[num_start..i].parse::<BigInt>().unwrap())
        } else {
            Rational::one()
        };
        if i < bytes.len() && bytes[i] == b'/' {
            i += 1;
            let d_start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let d: BigInt = s[d_start..i]
                .parse()
                .map_err(|_| err(format!("bad denominator in `{text}`")))?;
            if d.is_zero() {
                return Err(err("division by zero".into()));
            }
            coeff /= Rational::from_integer(d);
        }
        if i < bytes.len() && bytes[i] == b'*' {
            i += 1;
        }
        let id_start = i;
        while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
            i += 1;
        }
        let term = if i > id_start {
            let name = &s[id_start..i];
            let p = Param::from_name(name)
                .filter(|p| *p != Param::Sigma)
                .ok_or_else(|| err(format!("unknown parameter `{name}` (expected c, e, f, g)")))?;
            ParamScalar::param(p)
        } else if i > num_start {
            ParamScalar::one()
        } else {
            return Err(err(format!("cannot parse `{text}`")));
        };
        acc += term.scale(&(coeff * sign));
        if i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
            return Err(err(format!("unexpected `{}` in `{text}`", bytes[i] as char)));
        }
    }
    Ok(acc)
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.equalities.iter().map(|s| format!("{s} = 0")).collect();
        parts.extend(self.nonvanishing.iter().map(|s| format!("{s} != 0")));
        if parts.is_empty() {
            f.write_str("(generic)")
        } else {
            f.write_str(&parts.join(", "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::scalar::int;

    fn p(x: Param) -> ParamScalar {
        ParamScalar::param(x)
    }

    #[test]
    fn nonvanishing_g() {
        let b = Branch::parse("g!=0").unwrap();
        assert_eq!(b.vanishes(&p(Param::G)).unwrap(), Vanishing::No);
        assert_eq!(
            b.vanishes(&p(Param::G).scale(&int(-2))).unwrap(),
            Vanishing::No
        );
    }

    #[test]
    fn substitution_decides_equalities() {
        let b = Branch::parse("f=3e").unwrap();
        let a = &p(Param::E).scale(&int(3)) - &p(Param::F);
        assert_eq!(b.vanishes(&a).unwrap(), Vanishing::Yes);
    }

    #[test]
    fn undecided_factor() {
        let b = Branch::parse("g=0, e+f!=0").unwrap();
        let a = &p(Param::E).scale(&int(27)) - &p(Param::F).scale(&int(14));
        assert_eq!(b.vanishes(&a).unwrap(), Vanishing::Undetermined);
        let ef = (&p(Param::E) + &p(Param::F)).scale(&int(3));
        assert_eq!(
            b.vanishes(&(&ef * &ParamScalar::sigma())).unwrap(),
            Vanishing::No
        );
    }

    #[test]
    fn numeric_triple() {
        let b = Branch::parse("e=10, f=20, g=30").unwrap();
        assert_eq!(b.vanishes(&p(Param::G)).unwrap(), Vanishing::No);
        let a = &p(Param::F) - &p(Param::E).scale(&int(2));
        assert_eq!(b.vanishes(&a).unwrap(), Vanishing::Yes);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Branch::parse("g").is_err());
        assert!(Branch::parse("h=0").is_err());
        assert!(Branch::parse("g=0,g!=0").is_err());
        assert!(Branch::parse("e=1,e=2").is_err());
        assert!(Branch::parse("sigma=1").is_err());
    }

    #[test]
    fn chained_equalities() {
        let b = Branch::parse("f=3e, e=2").unwrap();
        assert_eq!(b.reduce(&p(Param::F)).unwrap(), ParamScalar::from_int(6));
        let b = Branch::parse("27e=14f").unwrap();
        assert_eq!(
            b.reduce(&p(Param::F)).unwrap(),
            p(Param::E).scale(&crate::coeffring::scalar::rat(27, 14))
        );
    }
}

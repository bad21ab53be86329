use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// The family parameters. `d` is normalized away and never appears.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    C,
    E,
    F,
    G,
    Sigma,
}

impl Param {
    pub const ALL: [Param; 5] = [Param::C, Param::E, Param::F, Param::G, Param::Sigma];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Param::C => "c",
            Param::E => "e",
            Param::F => "f",
            Param::G => "g",
            Param::Sigma => "sigma",
        }
    }

    pub fn from_name(s: &str) -> Option<Param> {
        Param::ALL.into_iter().find(|p| p.name() == s)
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponent vector over (c, e, f, g, sigma); the sigma exponent is 0 or 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ParamMonomial([u8; 5]);

impl ParamMonomial {
    pub const ONE: ParamMonomial = ParamMonomial([0; 5]);

    pub fn var(p: Param) -> Self {
        let mut e = [0; 5];
        e[p.index()] = 1;
        ParamMonomial(e)
    }

    pub fn exponent(&self, p: Param) -> u8 {
        self.0[p.index()]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0 == [0; 5]
    }

    fn mul(&self, other: &Self) -> Self {
        let mut e = [0; 5];
        for (i, slot) in e.iter_mut().enumerate() {
            *slot = self.0[i] + other.0[i];
        }
        e[Param::Sigma.index()] %= 2;
        ParamMonomial(e)
    }

    fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    fn quotient(&self, by: &Self) -> Self {
        let mut e = self.0;
        for (i, slot) in e.iter_mut().enumerate() {
            *slot -= by.0[i];
        }
        ParamMonomial(e)
    }

    fn without(&self, p: Param) -> Self {
        let mut e = self.0;
        e[p.index()] = 0;
        ParamMonomial(e)
    }
}

// Graded lex, highest first: iteration order of a `ParamScalar` starts at its leading term.
impl Ord for ParamMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for ParamMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in c, e, f, g, sigma over the rationals, modulo sigma^2 = 1.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ParamScalar {
    terms: BTreeMap<ParamMonomial, Rational>,
}

/// Exact values for (a subset of) the parameters.
pub type Assignment = BTreeMap<Param, Rational>;

impl ParamScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(int(n))
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut s = Self::zero();
        s.add_term(ParamMonomial::ONE, r);
        s
    }

    pub fn param(p: Param) -> Self {
        let mut s = Self::zero();
        s.add_term(ParamMonomial::var(p), Rational::one());
        s
    }

    pub fn sigma() -> Self {
        Self::param(Param::Sigma)
    }

    /// Builds a scalar from `(coefficient, [c, e, f, g, sigma] exponents)` pairs.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Rational, [u8; 5])>,
    {
        let mut s = Self::zero();
        for (r, mut e) in terms {
            e[Param::Sigma.index()] %= 2;
            s.add_term(ParamMonomial(e), r);
        }
        s
    }

    fn add_term(&mut self, m: ParamMonomial, r: Rational) {
        if r.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(r);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += r;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|r| r.is_one())
    }

    /// Number of monomials.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ParamMonomial, &Rational)> {
        self.terms.iter()
    }

    /// The rational value when no parameter occurs.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, r) = self.terms.iter().next().unwrap();
                m.is_one().then(|| r.clone())
            }
            _ => None,
        }
    }

    /// `r * sigma^k` with `r != 0`: the invertible elements that need no parameter division.
    pub fn as_unit(&self) -> Option<(Rational, bool)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, r) = self.terms.iter().next().unwrap();
        let s = m.exponent(Param::Sigma);
        (m.without(Param::Sigma).is_one()).then(|| (r.clone(), s == 1))
    }

    /// Multiplicative inverse of a unit (`sigma^-1 = sigma`).
    pub fn unit_inverse(&self) -> Option<ParamScalar> {
        let (r, has_sigma) = self.as_unit()?;
        let inv = ParamScalar::from_rational(r.recip());
        Some(if has_sigma { inv * ParamScalar::sigma() } else { inv })
    }

    pub fn leading(&self) -> Option<(&ParamMonomial, &Rational)> {
        self.terms.iter().next()
    }

    pub fn scale(&self, r: &Rational) -> ParamScalar {
        if r.is_zero() {
            return ParamScalar::zero();
        }
        ParamScalar {
            terms: self.terms.iter().map(|(m, c)| (*m, c * r)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> ParamScalar {
        let mut acc = ParamScalar::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn degree_in(&self, p: Param) -> u8 {
        self.terms.keys().map(|m| m.exponent(p)).max().unwrap_or(0)
    }

    pub fn params(&self) -> Vec<Param> {
        Param::ALL
            .into_iter()
            .filter(|&p| self.terms.keys().any(|m| m.exponent(p) > 0))
            .collect()
    }

    /// Replaces parameters by scalars.
    pub fn substitute(&self, subst: &BTreeMap<Param, ParamScalar>) -> ParamScalar {
        if subst.is_empty() || !self.params().iter().any(|p| subst.contains_key(p)) {
            return self.clone();
        }
        let mut out = ParamScalar::zero();
        for (m, r) in &self.terms {
            let mut t = ParamScalar::from_rational(r.clone());
            let mut rest = *m;
            for p in Param::ALL {
                if let Some(v) = subst.get(&p) {
                    let e = m.exponent(p);
                    if e > 0 {
                        t = &t * &v.pow(e as u32);
                        rest = rest.without(p);
                    }
                }
            }
            let mut mono = ParamScalar::zero();
            mono.add_term(rest, Rational::one());
            out += &t * &mono;
        }
        out
    }

    /// Exact evaluation. Every occurring parameter must be bound and sigma must be +-1.
    pub fn eval(&self, assignment: &Assignment) -> Result<Rational> {
        if let Some(s) = assignment.get(&Param::Sigma) {
            if s.abs() != Rational::one() {
                return Err(Error::SigmaNotUnit(s.to_string()));
            }
        }
        let mut acc = Rational::zero();
        for (m, r) in &self.terms {
            let mut v = r.clone();
            for p in Param::ALL {
                let e = m.exponent(p);
                if e == 0 {
                    continue;
                }
                let x = assignment
                    .get(&p)
                    .ok_or_else(|| Error::UnboundParameter(p.name().to_string()))?;
                for _ in 0..e {
                    v *= x;
                }
            }
            acc += v;
        }
        Ok(acc)
    }

    /// Exact quotient by a sigma-free divisor, or `None` when the division leaves a remainder.
    pub fn exact_div(&self, divisor: &ParamScalar) -> Option<ParamScalar> {
        let (lm, lc) = divisor.leading()?;
        if divisor.degree_in(Param::Sigma) > 0 {
            return None;
        }
        let (lm, lc) = (*lm, lc.clone());
        let mut rem = self.clone();
        let mut quot = ParamScalar::zero();
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return None;
            }
            let mut t = ParamScalar::zero();
            t.add_term(m.quotient(&lm), c / &lc);
            rem = &rem - &(&t * divisor);
            quot += t;
        }
        Some(quot)
    }
}

impl From<Rational> for ParamScalar {
    fn from(r: Rational) -> Self {
        ParamScalar::from_rational(r)
    }
}

impl From<Param> for ParamScalar {
    fn from(p: Param) -> Self {
        ParamScalar::param(p)
    }
}

impl<'a> Add<&'a ParamScalar> for &'a ParamScalar {
    type Output = ParamScalar;
    fn add(self, rhs: &ParamScalar) -> ParamScalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for ParamScalar {
    type Output = ParamScalar;
    fn add(mut self, rhs: ParamScalar) -> ParamScalar {
        self += &rhs;
        self
    }
}

impl AddAssign<&ParamScalar> for ParamScalar {
    fn add_assign(&mut self, rhs: &ParamScalar) {
        for (m, r) in &rhs.terms {
            self.add_term(*m, r.clone());
        }
    }
}

impl AddAssign for ParamScalar {
    fn add_assign(&mut self, rhs: ParamScalar) {
        for (m, r) in rhs.terms {
            self.add_term(m, r);
        }
    }
}

impl<'a> Sub<&'a ParamScalar> for &'a ParamScalar {
    type Output = ParamScalar;
    fn sub(self, rhs: &ParamScalar) -> ParamScalar {
        let mut out = self.clone();
        for (m, r) in &rhs.terms {
            out.add_term(*m, -r);
        }
        out
    }
}

impl Sub for ParamScalar {
    type Output = ParamScalar;
    fn sub(self, rhs: ParamScalar) -> ParamScalar {
        &self - &rhs
    }
}

impl<'a> Mul<&'a ParamScalar> for &'a ParamScalar {
    type Output = ParamScalar;
    fn mul(self, rhs: &ParamScalar) -> ParamScalar {
        let mut out = ParamScalar::zero();
        for (ma, ra) in &self.terms {
            for (mb, rb) in &rhs.terms {
                out.add_term(ma.mul(mb), ra * rb);
            }
        }
        out
    }
}

impl Mul for ParamScalar {
    type Output = ParamScalar;
    fn mul(self, rhs: ParamScalar) -> ParamScalar {
        &self * &rhs
    }
}

impl Neg for &ParamScalar {
    type Output = ParamScalar;
    fn neg(self) -> ParamScalar {
        ParamScalar {
            terms: self.terms.iter().map(|(m, r)| (*m, -r)).collect(),
        }
    }
}

impl Neg for ParamScalar {
    type Output = ParamScalar;
    fn neg(self) -> ParamScalar {
        -&self
    }
}

pub(crate) fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_param_monomial(m: &ParamMonomial) -> Vec<String> {
    Param::ALL
        .into_iter()
        .filter_map(|p| match m.exponent(p) {
            0 => None,
            1 => Some(p.name().to_string()),
            e => Some(format!("{}^{}", p.name(), e)),
        })
        .collect()
}

/// Renders one monomial with a nonnegative coefficient, e.g. `27*e` or `1/2*sigma`.
pub(crate) fn fmt_scalar_term(m: &ParamMonomial, abs: &Rational) -> String {
    let mut parts = Vec::new();
    let vars = fmt_param_monomial(m);
    if !abs.is_one() || vars.is_empty() {
        parts.push(fmt_rational(abs));
    }
    parts.extend(vars);
    parts.join("*")
}

impl fmt::Display for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, r)) in self.terms.iter().enumerate() {
            let body = fmt_scalar_term(m, &r.abs());
            match (i, r.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

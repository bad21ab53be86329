use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::coeffring::{Param, ParamScalar, Rational};

use super::func::{Arg, UnknownFunc};
use super::jet::{DepVar, Indep, JetVar};

/// A product of jet powers, sorted by jet.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetMonomial(Vec<(JetVar, u16)>);

impl JetMonomial {
    pub fn one() -> Self {
        JetMonomial(Vec::new())
    }

    pub fn new<I: IntoIterator<Item = (JetVar, u16)>>(factors: I) -> Self {
        let mut m = JetMonomial::one();
        for (j, n) in factors {
            m.mul_jet(j, n);
        }
        m
    }

    pub fn single(j: JetVar) -> Self {
        Self::new([(j, 1)])
    }

    pub fn factors(&self) -> &[(JetVar, u16)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, n)| n as u32).sum()
    }

    pub fn power_of(&self, j: &JetVar) -> u16 {
        self.0
            .binary_search_by(|(k, _)| k.cmp(j))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul_jet(&mut self, j: JetVar, n: u16) {
        if n == 0 {
            return;
        }
        match self.0.binary_search_by(|(k, _)| k.cmp(&j)) {
            Ok(i) => self.0[i].1 += n,
            Err(i) => self.0.insert(i, (j, n)),
        }
    }

    /// Divides out one factor of `j`; the caller guarantees it is present.
    fn remove_one(&mut self, j: &JetVar) {
        let i = self.0.binary_search_by(|(k, _)| k.cmp(j)).expect("jet present");
        if self.0[i].1 == 1 {
            self.0.remove(i);
        } else {
            self.0[i].1 -= 1;
        }
    }

    fn remove_all(&mut self, j: &JetVar) {
        if let Ok(i) = self.0.binary_search_by(|(k, _)| k.cmp(j)) {
            self.0.remove(i);
        }
    }

    pub fn mul(&self, other: &JetMonomial) -> JetMonomial {
        let mut m = self.clone();
        for &(j, n) in &other.0 {
            m.mul_jet(j, n);
        }
        m
    }

    /// Splits into the factors selected by `keep` and the rest.
    pub fn partition(&self, mut keep: impl FnMut(&JetVar) -> bool) -> (JetMonomial, JetMonomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().partition(|(j, _)| keep(j));
        (JetMonomial(a), JetMonomial(b))
    }
}

/// Everything in a term except its scalar coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub(crate) jets: JetMonomial,
    pub(crate) funcs: Vec<(UnknownFunc, u16)>,
    pub(crate) indep: [u16; 3],
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn jets(&self) -> &JetMonomial {
        &self.jets
    }

    pub fn funcs(&self) -> &[(UnknownFunc, u16)] {
        &self.funcs
    }

    pub fn indep(&self) -> [u16; 3] {
        self.indep
    }

    pub fn indep_power(&self, d: Indep) -> u16 {
        self.indep[d.index()]
    }

    pub(crate) fn mul_jet(&mut self, j: JetVar, n: u16) {
        self.jets.mul_jet(j, n);
    }

    pub(crate) fn remove_jet_once(&mut self, j: &JetVar) {
        self.jets.remove_one(j);
    }

    pub(crate) fn mul_func(&mut self, f: UnknownFunc, n: u16) {
        if n == 0 {
            return;
        }
        match self.funcs.binary_search_by(|(g, _)| g.cmp(&f)) {
            Ok(i) => self.funcs[i].1 += n,
            Err(i) => self.funcs.insert(i, (f, n)),
        }
    }

    pub(crate) fn remove_func_once(&mut self, f: &UnknownFunc) {
        let i = self
            .funcs
            .binary_search_by(|(g, _)| g.cmp(f))
            .expect("function present");
        if self.funcs[i].1 == 1 {
            self.funcs.remove(i);
        } else {
            self.funcs[i].1 -= 1;
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = self.clone();
        for &(j, n) in other.jets.factors() {
            m.jets.mul_jet(j, n);
        }
        for (f, n) in &other.funcs {
            m.mul_func(f.clone(), *n);
        }
        for i in 0..3 {
            m.indep[i] += other.indep[i];
        }
        m
    }

    pub fn without_jets(&self) -> Monomial {
        Monomial {
            jets: JetMonomial::one(),
            funcs: self.funcs.clone(),
            indep: self.indep,
        }
    }

    pub fn is_one(&self) -> bool {
        self.jets.is_one() && self.funcs.is_empty() && self.indep == [0; 3]
    }
}

/// A canonical polynomial: a map from monomials to nonzero scalar coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Expr {
    terms: BTreeMap<Monomial, ParamScalar>,
}

impl Expr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::scalar(ParamScalar::one())
    }

    pub fn int(n: i64) -> Self {
        Self::scalar(ParamScalar::from_int(n))
    }

    pub fn rational(r: Rational) -> Self {
        Self::scalar(ParamScalar::from_rational(r))
    }

    pub fn scalar(s: ParamScalar) -> Self {
        Self::term(Monomial::one(), s)
    }

    pub fn param(p: Param) -> Self {
        Self::scalar(ParamScalar::param(p))
    }

    pub fn jet(j: JetVar) -> Self {
        let mut m = Monomial::one();
        m.mul_jet(j, 1);
        Self::term(m, ParamScalar::one())
    }

    pub fn u(i: u8, j: u8, k: u8) -> Self {
        Self::jet(JetVar::u(i, j, k))
    }

    pub fn v(i: u8, j: u8, k: u8) -> Self {
        Self::jet(JetVar::v(i, j, k))
    }

    pub fn indep(d: Indep) -> Self {
        let mut m = Monomial::one();
        m.indep[d.index()] = 1;
        Self::term(m, ParamScalar::one())
    }

    pub fn x() -> Self {
        Self::indep(Indep::X)
    }

    pub fn y() -> Self {
        Self::indep(Indep::Y)
    }

    pub fn t() -> Self {
        Self::indep(Indep::T)
    }

    pub fn func(f: UnknownFunc) -> Self {
        let mut m = Monomial::one();
        m.mul_func(f, 1);
        Self::term(m, ParamScalar::one())
    }

    pub fn term(m: Monomial, s: ParamScalar) -> Self {
        let mut e = Expr::zero();
        e.add_term(m, s);
        e
    }

    pub fn jet_monomial(jm: &JetMonomial) -> Self {
        Self::term(
            Monomial {
                jets: jm.clone(),
                ..Monomial::one()
            },
            ParamScalar::one(),
        )
    }

    pub fn add_term(&mut self, m: Monomial, s: ParamScalar) {
        if s.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(s);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += s;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub(crate) fn add_term_ref(&mut self, m: &Monomial, s: &ParamScalar) {
        if s.is_zero() {
            return;
        }
        if let Some(c) = self.terms.get_mut(m) {
            *c += s;
            if c.is_zero() {
                self.terms.remove(m);
            }
        } else {
            self.terms.insert(m.clone(), s.clone());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of distinct monomials.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of terms once every scalar coefficient is expanded into its parameter monomials.
    pub fn expanded_len(&self) -> usize {
        self.terms.values().map(|s| s.len()).sum()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ParamScalar)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, ParamScalar)> {
        self.terms.into_iter()
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, ParamScalar)>>(terms: I) -> Self {
        let mut e = Expr::zero();
        for (m, s) in terms {
            e.add_term(m, s);
        }
        e
    }

    /// The scalar when the expression has no variables or functions.
    pub fn as_scalar(&self) -> Option<ParamScalar> {
        match self.terms.len() {
            0 => Some(ParamScalar::zero()),
            1 => {
                let (m, s) = self.terms.iter().next().unwrap();
                m.is_one().then(|| s.clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, s: &ParamScalar) -> Expr {
        if s.is_zero() {
            return Expr::zero();
        }
        Expr::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), c * s)))
    }

    pub fn scale_rational(&self, r: &Rational) -> Expr {
        self.scale(&ParamScalar::from_rational(r.clone()))
    }

    pub fn pow(&self, n: u32) -> Expr {
        let mut acc = Expr::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Applies `f` to every coefficient and re-canonicalizes.
    pub fn map_coeffs(&self, mut f: impl FnMut(&ParamScalar) -> ParamScalar) -> Expr {
        Expr::from_terms(self.terms.iter().map(|(m, s)| (m.clone(), f(s))))
    }

    /// Replaces parameters by scalars in every coefficient.
    pub fn substitute_params(&self, subst: &BTreeMap<Param, ParamScalar>) -> Expr {
        self.map_coeffs(|s| s.substitute(subst))
    }

    /// All jets occurring explicitly as factors.
    pub fn explicit_jets(&self) -> BTreeSet<JetVar> {
        self.terms
            .keys()
            .flat_map(|m| m.jets.factors().iter().map(|(j, _)| *j))
            .collect()
    }

    /// All jets listed as arguments of some unknown function.
    pub fn opaque_jets(&self) -> BTreeSet<JetVar> {
        self.terms
            .keys()
            .flat_map(|m| m.funcs.iter())
            .flat_map(|(f, _)| f.jet_args().map(|(_, j)| j))
            .collect()
    }

    /// All jets of `dep`, explicit or as function arguments.
    pub fn jets_of(&self, dep: DepVar) -> BTreeSet<JetVar> {
        self.explicit_jets()
            .into_iter()
            .chain(self.opaque_jets())
            .filter(|j| j.dep == dep)
            .collect()
    }

    pub fn funcs(&self) -> BTreeSet<UnknownFunc> {
        self.terms
            .keys()
            .flat_map(|m| m.funcs.iter().map(|(f, _)| f.clone()))
            .collect()
    }

    /// Highest power of each explicit jet.
    pub fn max_degrees(&self) -> BTreeMap<JetVar, u16> {
        let mut out = BTreeMap::new();
        for m in self.terms.keys() {
            for &(j, n) in m.jets.factors() {
                let e = out.entry(j).or_insert(0);
                *e = (*e).max(n);
            }
        }
        out
    }

    pub fn depends_on_indep(&self, d: Indep) -> bool {
        self.terms.keys().any(|m| {
            m.indep[d.index()] > 0 || m.funcs.iter().any(|(f, _)| f.has_arg(&Arg::Indep(d)))
        })
    }

    /// Sum of the terms whose explicit jet monomial is exactly `jm`, with `jm` divided out.
    pub fn coefficient_of(&self, jm: &JetMonomial) -> Expr {
        Expr::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| &m.jets == jm)
                .map(|(m, s)| (m.without_jets(), s.clone())),
        )
    }

    /// Coefficient of `jm` viewed as a polynomial in the jets of `jm` only: terms must carry
    /// exactly the listed power of each jet in `jm`; all other jets stay in the coefficient.
    pub fn coefficient_in(&self, jm: &JetMonomial) -> Expr {
        let mut out = Expr::zero();
        for (m, s) in &self.terms {
            if jm.factors().iter().all(|(j, n)| m.jets.power_of(j) == *n) {
                let mut rest = m.clone();
                for (j, _) in jm.factors() {
                    rest.jets.remove_all(j);
                }
                out.add_term(rest, s.clone());
            }
        }
        out
    }

    /// Coefficient of `d^n` for an independent variable, other factors kept.
    pub fn coefficient_of_indep(&self, d: Indep, n: u16) -> Expr {
        Expr::from_terms(
            self.terms
                .iter()
                .filter(|(m, _)| m.indep[d.index()] == n)
                .map(|(m, s)| {
                    let mut r = m.clone();
                    r.indep[d.index()] = 0;
                    (r, s.clone())
                }),
        )
    }

    /// Partitions the terms by their full explicit jet monomial.
    pub fn collect_by_jets(&self) -> BTreeMap<JetMonomial, Expr> {
        self.collect_by(|_| true)
    }

    /// Partitions the terms by the monomial formed from the jets selected by `splittable`;
    /// other jets stay in the values.
    pub fn collect_by(&self, mut splittable: impl FnMut(&JetVar) -> bool) -> BTreeMap<JetMonomial, Expr> {
        let mut out: BTreeMap<JetMonomial, Expr> = BTreeMap::new();
        for (m, s) in &self.terms {
            let (key, rest) = m.jets.partition(&mut splittable);
            let mono = Monomial {
                jets: rest,
                funcs: m.funcs.clone(),
                indep: m.indep,
            };
            out.entry(key).or_default().add_term(mono, s.clone());
        }
        out
    }

    /// Whether `self = k * other` for some nonzero rational `k`; returns `k`.
    pub fn ratio_to(&self, other: &Expr) -> Option<Rational> {
        if self.is_zero() || other.is_zero() || self.len() != other.len() {
            return None;
        }
        let (m0, s0) = self.terms.iter().next()?;
        let t0 = other.terms.get(m0)?;
        let k = rational_ratio(s0, t0)?;
        (self == &other.scale_rational(&k)).then_some(k)
    }
}

fn rational_ratio(a: &ParamScalar, b: &ParamScalar) -> Option<Rational> {
    let (ma, ra) = a.leading()?;
    let (mb, rb) = b.leading()?;
    if ma != mb {
        return None;
    }
    let k = ra / rb;
    (a == &b.scale(&k)).then_some(k)
}

impl From<ParamScalar> for Expr {
    fn from(s: ParamScalar) -> Self {
        Expr::scalar(s)
    }
}

impl From<JetVar> for Expr {
    fn from(j: JetVar) -> Self {
        Expr::jet(j)
    }
}

impl From<UnknownFunc> for Expr {
    fn from(f: UnknownFunc) -> Self {
        Expr::func(f)
    }
}

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        for (m, s) in &rhs.terms {
            self.add_term_ref(m, s);
        }
    }
}

impl AddAssign for Expr {
    fn add_assign(&mut self, rhs: Expr) {
        if self.terms.len() < rhs.terms.len() {
            let lhs = std::mem::replace(self, rhs);
            for (m, s) in lhs.terms {
                self.add_term(m, s);
            }
        } else {
            for (m, s) in rhs.terms {
                self.add_term(m, s);
            }
        }
    }
}

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(mut self, rhs: Expr) -> Expr {
        self += rhs;
        self
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        for (m, s) in &rhs.terms {
            out.add_term(m.clone(), -s);
        }
        out
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        &self - &rhs
    }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (ma, sa) in &self.terms {
            for (mb, sb) in &rhs.terms {
                out.add_term(ma.mul(mb), sa * sb);
            }
        }
        out
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        &self * &rhs
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            terms: self.terms.iter().map(|(m, s)| (m.clone(), -s)).collect(),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut acc = Expr::zero();
        for e in iter {
            acc += e;
        }
        acc
    }
}

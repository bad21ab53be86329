use std::fmt;
use std::sync::Arc;

use super::jet::{Indep, JetVar, MultiIndex};

/// An argument slot of an unknown function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arg {
    Indep(Indep),
    Jet(JetVar),
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Indep(d) => write!(f, "{d}"),
            Arg::Jet(j) => write!(f, "{j}"),
        }
    }
}

/// A derivative of an unknown function, e.g. `Q_{u_x,u_x}(x,y,t,u,u_x,u_y,u_t)` or `a0_xx(x,y,t)`.
///
/// Mixed partials commute, so the derivative is a multi-index over the function's own
/// argument list. Two symbols are equal iff name, arguments and derivative orders agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnknownFunc {
    name: Arc<str>,
    args: Arc<[Arg]>,
    derivs: Box<[u8]>,
}

impl UnknownFunc {
    pub fn new(name: &str, args: &[Arg]) -> Self {
        UnknownFunc {
            name: Arc::from(name),
            args: Arc::from(args),
            derivs: vec![0; args.len()].into_boxed_slice(),
        }
    }

    /// A function of a subset of `(x, y, t)`.
    pub fn of_indep(name: &str, vars: &[Indep]) -> Self {
        let args: Vec<Arg> = vars.iter().map(|&d| Arg::Indep(d)).collect();
        Self::new(name, &args)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn args(&self) -> &[Arg] {
        &self.args
    }

    pub fn derivs(&self) -> &[u8] {
        &self.derivs
    }

    pub fn order(&self) -> u32 {
        self.derivs.iter().map(|&n| n as u32).sum()
    }

    /// Same name and argument list, ignoring derivatives.
    pub fn same_function(&self, other: &UnknownFunc) -> bool {
        self.name == other.name && self.args == other.args
    }

    /// The undifferentiated function.
    pub fn base(&self) -> UnknownFunc {
        UnknownFunc {
            name: self.name.clone(),
            args: self.args.clone(),
            derivs: vec![0; self.args.len()].into_boxed_slice(),
        }
    }

    pub fn position(&self, arg: &Arg) -> Option<usize> {
        self.args.iter().position(|a| a == arg)
    }

    pub fn has_arg(&self, arg: &Arg) -> bool {
        self.position(arg).is_some()
    }

    pub fn jet_args(&self) -> impl Iterator<Item = (usize, JetVar)> + '_ {
        self.args.iter().enumerate().filter_map(|(i, a)| match a {
            Arg::Jet(j) => Some((i, *j)),
            Arg::Indep(_) => None,
        })
    }

    /// Differentiates once with respect to argument slot `pos`.
    pub fn derive_at(&self, pos: usize) -> UnknownFunc {
        let mut d = self.derivs.clone();
        d[pos] += 1;
        UnknownFunc {
            name: self.name.clone(),
            args: self.args.clone(),
            derivs: d,
        }
    }

    /// Differentiates with respect to `arg`, if it is one of the arguments.
    pub fn derive(&self, arg: &Arg) -> Option<UnknownFunc> {
        self.position(arg).map(|p| self.derive_at(p))
    }

    pub fn with_derivs(&self, derivs: &[u8]) -> UnknownFunc {
        assert_eq!(derivs.len(), self.args.len(), "derivative arity mismatch");
        UnknownFunc {
            name: self.name.clone(),
            args: self.args.clone(),
            derivs: derivs.into(),
        }
    }

    /// Derivative orders with respect to `(x, y, t)` when those appear as arguments.
    pub fn indep_derivs(&self) -> MultiIndex {
        let mut m = [0; 3];
        for (a, &n) in self.args.iter().zip(self.derivs.iter()) {
            if let Arg::Indep(d) = a {
                m[d.index()] += n;
            }
        }
        MultiIndex(m)
    }

    pub(crate) fn suffix(&self) -> Option<String> {
        if self.derivs.iter().all(|&n| n == 0) {
            return None;
        }
        let only_indep = self
            .args
            .iter()
            .zip(self.derivs.iter())
            .all(|(a, &n)| n == 0 || matches!(a, Arg::Indep(_)));
        if only_indep {
            return Some(self.indep_derivs().suffix());
        }
        let parts: Vec<String> = self
            .args
            .iter()
            .zip(self.derivs.iter())
            .filter(|(_, &n)| n > 0)
            .map(|(a, &n)| if n == 1 { a.to_string() } else { format!("{a}^{n}") })
            .collect();
        Some(format!("{{{}}}", parts.join(",")))
    }
}

impl fmt::Display for UnknownFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if let Some(s) = self.suffix() {
            write!(f, "_{s}")?;
        }
        let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", args.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        let a0 = UnknownFunc::of_indep("a0", &[Indep::X, Indep::Y, Indep::T]);
        assert_eq!(a0.derive_at(0).derive_at(0).to_string(), "a0_xx(x,y,t)");
        let q = UnknownFunc::new(
            "Q",
            &[
                Arg::Indep(Indep::X),
                Arg::Jet(JetVar::u(0, 0, 0)),
                Arg::Jet(JetVar::u(1, 0, 0)),
            ],
        );
        assert_eq!(
            q.derive_at(2).derive_at(2).derive_at(1).to_string(),
            "Q_{u,u_x^2}(x,u,u_x)"
        );
        assert_eq!(UnknownFunc::new("A", &[]).to_string(), "A()");
    }

    #[test]
    fn mixed_partials_commute() {
        let h = UnknownFunc::of_indep("H", &[Indep::Y, Indep::T]);
        assert_eq!(h.derive_at(0).derive_at(1), h.derive_at(1).derive_at(0));
        assert_ne!(h.derive_at(0), h);
        assert!(h.derive_at(0).same_function(&h));
    }
}

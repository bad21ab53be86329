use std::fmt;

use num_traits::{One, Signed};

use crate::coeffring::{fmt_scalar_term, ParamScalar};

use super::expr::{Expr, JetMonomial, Monomial};
use super::jet::Indep;

fn power(base: String, n: u16) -> String {
    if n == 1 {
        base
    } else {
        format!("{base}^{n}")
    }
}

impl Monomial {
    /// The non-scalar factors in print order: independent variables, jets, functions.
    pub(crate) fn factor_strings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for d in Indep::ALL {
            let n = self.indep[d.index()];
            if n > 0 {
                out.push(power(d.letter().to_string(), n));
            }
        }
        for &(j, n) in self.jets.factors() {
            out.push(power(j.to_string(), n));
        }
        for (f, n) in &self.funcs {
            out.push(power(f.to_string(), *n));
        }
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.factor_strings();
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

impl fmt::Display for JetMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .factors()
            .iter()
            .map(|&(j, n)| power(j.to_string(), n))
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// Renders a term as `(negative?, body)`.
fn render_term(m: &Monomial, s: &ParamScalar) -> (bool, String) {
    let factors = m.factor_strings();
    if s.len() == 1 {
        let (pm, r) = s.leading().unwrap();
        let mut parts = Vec::new();
        let scalar = fmt_scalar_term(pm, &r.abs());
        if !(pm.is_one() && r.abs().is_one() && !factors.is_empty()) {
            parts.push(scalar);
        }
        parts.extend(factors);
        (r.is_negative(), parts.join("*"))
    } else {
        let mut parts = vec![format!("({s})")];
        parts.extend(factors);
        (false, parts.join("*"))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (m, s)) in self.terms().enumerate() {
            let (neg, body) = render_term(m, s);
            match (i, neg) {
                (0, false) => f.write_str(&body)?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

use std::fmt;

use crate::jetexpr::{Expr, Monomial, UnknownFunc};

use super::derivative::partial_arg;

/// A rewrite `pattern -> replacement` on unknown functions.
///
/// Every occurrence of the pattern's function whose derivative orders dominate the pattern's is
/// replaced by the corresponding extra partial derivatives of the replacement. So `A -> a0 + a1*u`
/// also rewrites `A_u` to `a1`, and `a1_xx -> 0` also kills `a1_xxt`.
#[derive(Clone, Debug, PartialEq)]
pub struct FuncRule {
    pub pattern: UnknownFunc,
    pub replacement: Expr,
}

impl FuncRule {
    pub fn new(pattern: UnknownFunc, replacement: Expr) -> Self {
        FuncRule {
            pattern,
            replacement,
        }
    }

    /// `pattern -> 0`.
    pub fn vanish(pattern: UnknownFunc) -> Self {
        Self::new(pattern, Expr::zero())
    }

    /// The replacement for an occurrence, or `None` if the rule does not apply to it.
    pub fn image(&self, f: &UnknownFunc) -> Option<Expr> {
        if !f.same_function(&self.pattern) {
            return None;
        }
        let extra: Vec<u8> = f
            .derivs()
            .iter()
            .zip(self.pattern.derivs())
            .map(|(&a, &b)| a.checked_sub(b))
            .collect::<Option<_>>()?;
        let mut e = self.replacement.clone();
        for (arg, &n) in f.args().iter().zip(&extra) {
            for _ in 0..n {
                if e.is_zero() {
                    return Some(e);
                }
                e = partial_arg(&e, arg);
            }
        }
        Some(e)
    }

    /// Applies the rule to every matching factor of every term.
    pub fn apply(&self, expr: &Expr) -> Expr {
        let hit = expr
            .terms()
            .any(|(m, _)| m.funcs().iter().any(|(f, _)| f.same_function(&self.pattern)));
        if !hit {
            return expr.clone();
        }
        let mut out = Expr::zero();
        for (m, s) in expr.terms() {
            let mut rest = Monomial {
                funcs: Vec::new(),
                ..m.clone()
            };
            let mut images = Vec::new();
            for (f, n) in m.funcs() {
                match self.image(f) {
                    Some(img) => images.push(img.pow(*n as u32)),
                    None => rest.mul_func(f.clone(), *n),
                }
            }
            let mut acc = Expr::term(rest, s.clone());
            for img in images {
                acc = &acc * &img;
            }
            out += acc;
        }
        out
    }
}

impl fmt::Display for FuncRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.pattern, self.replacement)
    }
}

/// Applies each rule in turn.
pub fn apply_rules(expr: &Expr, rules: &[FuncRule]) -> Expr {
    rules.iter().fold(expr.clone(), |e, r| r.apply(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetexpr::parse_expr;

    fn func(s: &str) -> UnknownFunc {
        parse_expr(s).unwrap().funcs().into_iter().next().unwrap()
    }

    #[test]
    fn polynomialize() {
        let rule = FuncRule::new(
            func("A(x,y,t,u)"),
            parse_expr("a0(x,y,t) + a1(x,y,t)*u + a2(x,y,t)*u^2").unwrap(),
        );
        let e = parse_expr("A_{u,u}(x,y,t,u)*u_xx + A_x(x,y,t,u)").unwrap();
        assert_eq!(
            rule.apply(&e),
            parse_expr("2*a2(x,y,t)*u_xx + a0_x(x,y,t) + a1_x(x,y,t)*u + a2_x(x,y,t)*u^2").unwrap()
        );
    }

    #[test]
    fn derivative_patterns() {
        let kill = FuncRule::vanish(func("a1_xx(x,y,t)"));
        let e = parse_expr("a1_xxt(x,y,t) + a1_x(x,y,t)").unwrap();
        assert_eq!(kill.apply(&e), parse_expr("a1_x(x,y,t)").unwrap());
        let hy = FuncRule::new(func("H_y(y,t)"), parse_expr("2*a1(x,y,t)").unwrap());
        let e = parse_expr("H_yt(y,t)*u + H(y,t)").unwrap();
        assert_eq!(hy.apply(&e), parse_expr("2*a1_t(x,y,t)*u + H(y,t)").unwrap());
    }
}

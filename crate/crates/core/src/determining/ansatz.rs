use std::collections::BTreeSet;
use std::fmt;

use crate::jetexpr::{Arg, Expr, Indep, JetVar, UnknownFunc};

/// Which multiplier class an ansatz represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AnsatzKind {
    /// `Q(x,y,t)`.
    Order0,
    /// `Q(x,y,t,u,u_x,u_y,u_t)`.
    Order1General,
    /// `A(x,y,t,u) + B(x,y,t) u_x + H(y,t) u_y + K(y,t) u_t`.
    Order1Linear,
    /// `a0 + a1 u + a2 u^2 + B u_x + H u_y + K u_t`.
    Order1Polynomial,
    /// `Q` of `x, y, t` and every normal jet of order at most two.
    Order2General,
    Custom,
}

/// A multiplier ansatz: an expression in unknown functions of normal jets.
#[derive(Clone, Debug, PartialEq)]
pub struct Ansatz {
    pub kind: AnsatzKind,
    pub order: u8,
    pub q: Expr,
}

const XYT: [Indep; 3] = [Indep::X, Indep::Y, Indep::T];

fn indep_args() -> Vec<Arg> {
    XYT.iter().map(|&d| Arg::Indep(d)).collect()
}

/// Normal jets of `u` with order 1..=n.
pub fn normal_jets_up_to(n: u8) -> Vec<JetVar> {
    let mut out = Vec::new();
    for ord in 1..=n {
        for i in (0..=ord).rev() {
            for j in (0..=ord - i).rev() {
                let k = ord - i - j;
                let jet = JetVar::u(i, j, k);
                if jet.is_normal() {
                    out.push(jet);
                }
            }
        }
    }
    out
}

fn func_of(name: &str, vars: &[Indep]) -> Expr {
    Expr::func(UnknownFunc::of_indep(name, vars))
}

impl Ansatz {
    pub fn order0() -> Self {
        Ansatz {
            kind: AnsatzKind::Order0,
            order: 0,
            q: func_of("Q", &XYT),
        }
    }

    fn general(order: u8, kind: AnsatzKind) -> Self {
        let mut args = indep_args();
        args.push(Arg::Jet(JetVar::u(0, 0, 0)));
        args.extend(normal_jets_up_to(order).into_iter().map(Arg::Jet));
        Ansatz {
            kind,
            order,
            q: Expr::func(UnknownFunc::new("Q", &args)),
        }
    }

    pub fn order1_general() -> Self {
        Self::general(1, AnsatzKind::Order1General)
    }

    pub fn order2_general() -> Self {
        Self::general(2, AnsatzKind::Order2General)
    }

    /// The argument function `A(x,y,t,u)` of the linear form.
    pub fn a_func() -> UnknownFunc {
        let mut args = indep_args();
        args.push(Arg::Jet(JetVar::u(0, 0, 0)));
        UnknownFunc::new("A", &args)
    }

    fn first_order_tail() -> Expr {
        &(&(&func_of("B", &XYT) * &Expr::u(1, 0, 0))
            + &(&func_of("H", &[Indep::Y, Indep::T]) * &Expr::u(0, 1, 0)))
            + &(&func_of("K", &[Indep::Y, Indep::T]) * &Expr::u(0, 0, 1))
    }

    pub fn order1_linear() -> Self {
        Ansatz {
            kind: AnsatzKind::Order1Linear,
            order: 1,
            q: &Expr::func(Self::a_func()) + &Self::first_order_tail(),
        }
    }

    /// The quadratic replacement for `A(x,y,t,u)`.
    pub fn a_polynomial() -> Expr {
        let uu = Expr::u(0, 0, 0);
        &(&func_of("a0", &XYT) + &(&func_of("a1", &XYT) * &uu))
            + &(&func_of("a2", &XYT) * &uu.pow(2))
    }

    pub fn order1_polynomial() -> Self {
        Ansatz {
            kind: AnsatzKind::Order1Polynomial,
            order: 1,
            q: &Self::a_polynomial() + &Self::first_order_tail(),
        }
    }

    pub fn custom(q: Expr, order: u8) -> Self {
        Ansatz {
            kind: AnsatzKind::Custom,
            order,
            q,
        }
    }

    /// Jets that occur as arguments of unknown functions and so cannot be split on.
    pub fn opaque_jets(&self) -> BTreeSet<JetVar> {
        self.q.opaque_jets()
    }

    /// Every jet in the ansatz is normal.
    pub fn is_normal(&self) -> bool {
        self.q
            .explicit_jets()
            .into_iter()
            .chain(self.q.opaque_jets())
            .all(|j| j.is_normal())
    }
}

impl fmt::Display for Ansatz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q = {}", self.q)
    }
}

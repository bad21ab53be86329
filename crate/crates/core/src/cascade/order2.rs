use crate::calculus::{euler_summands, FuncRule};
use crate::coeffring::int;
use crate::determining::{determining_expression, split_system, Ansatz, Shell, Stats};
use crate::equation::{build_delta, FamilySpec};
use crate::error::Result;
use crate::jetexpr::{Arg, DepVar, Expr, JetMonomial, JetVar, MultiIndex};

/// One reduction row: the coefficient of `u_{J+(6,0,0)}` against `2 Q_{u_J}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Order2Row {
    pub jet: JetVar,
    pub key: JetVar,
    pub obtained: Expr,
    pub expected: Expr,
    pub verified: bool,
}

/// Contributions to the coefficient of `u_x7` at first order, by Euler summand.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrderContrast {
    pub from_u_x: Expr,
    pub from_u_x6: Expr,
    pub total: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Order2Report {
    pub rows: Vec<Order2Row>,
    pub contrast: FirstOrderContrast,
    pub stats: Stats,
    /// Vanishing conditions `Q_{u_J} -> 0` established by the rows.
    pub conclusions: Vec<FuncRule>,
}

impl Order2Report {
    pub fn verified(&self) -> bool {
        self.rows.iter().all(|r| r.verified)
            && self.contrast.total.is_zero()
            && !self.contrast.from_u_x.is_zero()
    }
}

fn split_key(e: &Expr, key: &JetMonomial, ansatz: &Ansatz) -> Expr {
    let opaque = ansatz.opaque_jets();
    e.collect_by(|j| !opaque.contains(j))
        .remove(key)
        .unwrap_or_else(Expr::zero)
}

/// The second-order ansatz collapses to first order.
pub fn run_order2_reduction() -> Result<Order2Report> {
    let spec = FamilySpec::symbolic();
    let ansatz = Ansatz::order2_general();
    let e = determining_expression(&ansatz, &spec, Shell::Off)?;
    let stats = Stats::of(&e);
    let sys = split_system(&e, &ansatz);
    let q = ansatz.q.funcs().into_iter().next().expect("Q");
    let mut rows = Vec::new();
    let mut conclusions = Vec::new();
    for (i, j, k) in [(2, 0, 0), (1, 1, 0), (0, 2, 0), (0, 1, 1), (0, 0, 2)] {
        let jet = JetVar::u(i, j, k);
        let key = JetVar::new(jet.dep, jet.index + MultiIndex::new(6, 0, 0));
        let qj = q.derive(&Arg::Jet(jet)).expect("second-order argument");
        let expected = Expr::func(qj.clone()).scale_rational(&int(2));
        let obtained = sys.get(&JetMonomial::single(key));
        rows.push(Order2Row {
            jet,
            key,
            verified: obtained == expected,
            obtained,
            expected,
        });
        conclusions.push(FuncRule::vanish(qj));
    }
    let first = Ansatz::order1_general();
    let summands = euler_summands(&(&first.q * &build_delta(&spec)), DepVar::U, 7)?;
    let q1 = first.q.funcs().into_iter().next().expect("Q");
    let qx = q1.derive(&Arg::Jet(JetVar::u(1, 0, 0))).expect("u_x argument");
    let key = JetMonomial::single(JetVar::u(7, 0, 0));
    let part = |jet: JetVar| -> Expr {
        let s = summands
            .iter()
            .find(|(j, _)| *j == jet)
            .map(|(_, s)| split_key(s, &key, &first))
            .unwrap_or_else(Expr::zero);
        Expr::from_terms(s.into_terms().filter(|(m, _)| m.funcs().iter().any(|(f, _)| *f == qx)))
    };
    let from_u_x = part(JetVar::u(1, 0, 0));
    let from_u_x6 = part(JetVar::u(6, 0, 0));
    let total = &from_u_x + &from_u_x6;
    Ok(Order2Report {
        rows,
        contrast: FirstOrderContrast {
            from_u_x,
            from_u_x6,
            total,
        },
        stats,
        conclusions,
    })
}

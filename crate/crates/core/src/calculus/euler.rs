use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jetexpr::{DepVar, Expr, JetVar};

use super::derivative::{jet_partial, total_derivative_multi};

/// The individual summands `(-1)^|J| D_J(∂expr/∂u_J)` of the Euler operator, one per jet of
/// `dep` occurring in `expr` (explicitly or as an argument of an unknown function).
pub fn euler_summands(expr: &Expr, dep: DepVar, max_order: u8) -> Result<Vec<(JetVar, Expr)>> {
    let jets: Vec<JetVar> = expr.jets_of(dep).into_iter().collect();
    if let Some(j) = jets.iter().find(|j| j.order() > max_order as u32) {
        return Err(Error::OrderBound { jet: *j, max_order });
    }
    Ok(jets
        .par_iter()
        .map(|&j| {
            let d = total_derivative_multi(&jet_partial(expr, j), j.index);
            let d = if j.order() % 2 == 1 { -d } else { d };
            (j, d)
        })
        .collect())
}

/// Euler operator `E_dep = Σ_J (-D)_J ∂/∂dep_J` with an explicit bound on the jet order.
pub fn euler_operator(expr: &Expr, dep: DepVar, max_order: u8) -> Result<Expr> {
    Ok(euler_summands(expr, dep, max_order)?
        .into_iter()
        .map(|(_, e)| e)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::int;
    use crate::jetexpr::parse_expr;

    #[test]
    fn square_of_u_x() {
        let e = parse_expr("u_x^2").unwrap();
        assert_eq!(
            euler_operator(&e, DepVar::U, 4).unwrap(),
            Expr::u(2, 0, 0).scale_rational(&int(-2))
        );
    }

    #[test]
    fn order_bound() {
        let e = parse_expr("u_x6").unwrap();
        assert_eq!(
            euler_operator(&e, DepVar::U, 5),
            Err(Error::OrderBound {
                jet: JetVar::u(6, 0, 0),
                max_order: 5
            })
        );
    }

    #[test]
    fn lagrangian_piece() {
        let e = parse_expr("A()*v_x*v_xx^2").unwrap();
        assert_eq!(
            euler_operator(&e, DepVar::V, 3).unwrap(),
            parse_expr("2*A()*v_x*v_xxxx + 4*A()*v_xx*v_xxx").unwrap()
        );
    }
}

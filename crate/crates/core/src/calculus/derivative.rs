use crate::coeffring::{int, ParamScalar};
use crate::jetexpr::{Arg, Expr, Indep, JetVar, Monomial, MultiIndex};

fn times(s: &ParamScalar, n: u16) -> ParamScalar {
    if n == 1 {
        s.clone()
    } else {
        s.scale(&int(n as i64))
    }
}

/// Explicit partial derivative with respect to an independent variable, holding jets fixed.
pub fn partial_indep(expr: &Expr, dir: Indep) -> Expr {
    let mut out = Expr::zero();
    for (m, s) in expr.terms() {
        explicit_partial_term(m, s, dir, &mut out);
    }
    out
}

fn explicit_partial_term(m: &Monomial, s: &ParamScalar, dir: Indep, out: &mut Expr) {
    let d = dir.index();
    let n = m.indep[d];
    if n > 0 {
        let mut r = m.clone();
        r.indep[d] -= 1;
        out.add_term(r, times(s, n));
    }
    for (i, (f, n)) in m.funcs.iter().enumerate() {
        if let Some(p) = f.position(&Arg::Indep(dir)) {
            let mut r = m.clone();
            let n = *n;
            if n == 1 {
                r.funcs.remove(i);
            } else {
                r.funcs[i].1 -= 1;
            }
            r.mul_func(f.derive_at(p), 1);
            out.add_term(r, times(s, n));
        }
    }
}

/// Total derivative `D_dir`.
pub fn total_derivative(expr: &Expr, dir: Indep) -> Expr {
    let mut out = Expr::zero();
    for (m, s) in expr.terms() {
        explicit_partial_term(m, s, dir, &mut out);
        for &(j, n) in m.jets.factors() {
            let mut r = m.clone();
            r.remove_jet_once(&j);
            r.mul_jet(j.derive(dir), 1);
            out.add_term(r, times(s, n));
        }
        for (f, n) in &m.funcs {
            for (p, a) in f.jet_args() {
                let mut r = m.clone();
                r.remove_func_once(f);
                r.mul_func(f.derive_at(p), 1);
                r.mul_jet(a.derive(dir), 1);
                out.add_term(r, times(s, *n));
            }
        }
    }
    out
}

/// `D_J = D_x^i D_y^j D_t^k`.
pub fn total_derivative_multi(expr: &Expr, index: MultiIndex) -> Expr {
    let mut acc = expr.clone();
    for d in index.directions() {
        if acc.is_zero() {
            break;
        }
        acc = total_derivative(&acc, d);
    }
    acc
}

/// Formal partial derivative with respect to a jet coordinate.
pub fn jet_partial(expr: &Expr, v: JetVar) -> Expr {
    let mut out = Expr::zero();
    for (m, s) in expr.terms() {
        let n = m.jets.power_of(&v);
        if n > 0 {
            let mut r = m.clone();
            r.remove_jet_once(&v);
            out.add_term(r, times(s, n));
        }
        for (f, n) in &m.funcs {
            if let Some(p) = f.position(&Arg::Jet(v)) {
                let mut r = m.clone();
                r.remove_func_once(f);
                r.mul_func(f.derive_at(p), 1);
                out.add_term(r, times(s, *n));
            }
        }
    }
    out
}

/// Partial derivative with respect to one argument slot of unknown functions.
pub(crate) fn partial_arg(expr: &Expr, arg: &Arg) -> Expr {
    match arg {
        Arg::Indep(d) => partial_indep(expr, *d),
        Arg::Jet(j) => jet_partial(expr, *j),
    }
}

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::coeffring::{Rational, ParamScalar};
use crate::error::{Error, Result};
use crate::jetexpr::{Expr, JetVar};

/// `x = λ x̃, y = μ ỹ, t = ν t̃, u = ρ ũ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalingTransform {
    pub lambda: Rational,
    pub mu: Rational,
    pub nu: Rational,
    pub rho: Rational,
}

/// The six coefficients `(c, d, e, f, g, σ)` of the unnormalized family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coefficients {
    pub c: Rational,
    pub d: Rational,
    pub e: Rational,
    pub f: Rational,
    pub g: Rational,
    pub sigma: Rational,
}

impl Coefficients {
    pub fn new(c: Rational, d: Rational, e: Rational, f: Rational, g: Rational, sigma: Rational) -> Self {
        Coefficients { c, d, e, f, g, sigma }
    }

    pub fn to_array(&self) -> [Rational; 6] {
        [
            self.c.clone(),
            self.d.clone(),
            self.e.clone(),
            self.f.clone(),
            self.g.clone(),
            self.sigma.clone(),
        ]
    }

    fn check(&self) -> Result<()> {
        if (&self.d * &self.sigma).is_zero() {
            return Err(Error::Degenerate);
        }
        Ok(())
    }
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(c, d, e, f, g, sigma) = ({}, {}, {}, {}, {}, {})",
            self.c, self.d, self.e, self.f, self.g, self.sigma
        )
    }
}

impl ScalingTransform {
    pub fn new(lambda: Rational, mu: Rational, nu: Rational, rho: Rational) -> Result<Self> {
        for (name, v) in [("lambda", &lambda), ("mu", &mu), ("nu", &nu), ("rho", &rho)] {
            if v.is_zero() {
                return Err(Error::ZeroScaling(name));
            }
        }
        Ok(ScalingTransform {
            lambda,
            mu,
            nu,
            rho,
        })
    }

    pub fn identity() -> Self {
        let one = Rational::one();
        ScalingTransform {
            lambda: one.clone(),
            mu: one.clone(),
            nu: one.clone(),
            rho: one,
        }
    }

    pub fn inverse(&self) -> Self {
        ScalingTransform {
            lambda: self.lambda.recip(),
            mu: self.mu.recip(),
            nu: self.nu.recip(),
            rho: self.rho.recip(),
        }
    }

    /// Factor picked up by `u_(i,j,k)`: `ρ λ^-i μ^-j ν^-k`.
    fn jet_factor(&self, j: &JetVar) -> Rational {
        let [i, jy, k] = j.index.0;
        &self.rho / (pow(&self.lambda, i as u32) * pow(&self.mu, jy as u32) * pow(&self.nu, k as u32))
    }
}

fn pow(r: &Rational, n: u32) -> Rational {
    (0..n).fold(Rational::one(), |acc, _| acc * r)
}

/// Transformed coefficients.
pub fn apply_scaling(tr: &ScalingTransform, k: &Coefficients) -> Result<Coefficients> {
    let tr = ScalingTransform::new(tr.lambda.clone(), tr.mu.clone(), tr.nu.clone(), tr.rho.clone())?;
    k.check()?;
    let l = &tr.lambda;
    let (nu, rho) = (&tr.nu, &tr.rho);
    Ok(Coefficients {
        c: &k.c * nu / pow(l, 3),
        d: &k.d * nu / pow(l, 5),
        e: &k.e * nu * rho / pow(l, 3),
        f: &k.f * nu * rho / pow(l, 3),
        g: &k.g * nu * rho * rho / l,
        sigma: &k.sigma * nu * l / (&tr.mu * &tr.mu),
    })
}

/// `Δ` of the unnormalized family for numeric coefficients.
pub fn unnormalized_delta(k: &Coefficients) -> Expr {
    let s = |r: &Rational, e: Expr| e.scale_rational(r);
    let u = |i, j, kk| Expr::u(i, j, kk);
    let two = Rational::from_integer(2.into());
    [
        u(1, 0, 1),
        s(&k.c, u(4, 0, 0)),
        s(&k.d, u(6, 0, 0)),
        s(&(&k.e + &k.f), &u(1, 0, 0) * &u(3, 0, 0)),
        s(&k.e, &u(0, 0, 0) * &u(4, 0, 0)),
        s(&k.f, u(2, 0, 0).pow(2)),
        s(&(&k.g * &two), &u(0, 0, 0) * &u(1, 0, 0).pow(2)),
        s(&k.g, &u(0, 0, 0).pow(2) * &u(2, 0, 0)),
        s(&k.sigma, u(0, 2, 0)),
    ]
    .into_iter()
    .sum()
}

/// Rewrites an expression in the scaled variables and divides by `νλ/ρ`.
pub fn transform_expr(e: &Expr, tr: &ScalingTransform) -> Expr {
    let norm = &tr.lambda * &tr.nu / &tr.rho;
    Expr::from_terms(e.terms().map(|(m, s)| {
        let mut r = norm.clone();
        for &(j, n) in m.jets().factors() {
            r *= pow(&tr.jet_factor(&j), n as u32);
        }
        let [px, py, pt] = m.indep();
        r *= pow(&tr.lambda, px as u32) * pow(&tr.mu, py as u32) * pow(&tr.nu, pt as u32);
        (m.clone(), s * &ParamScalar::from_rational(r))
    }))
}

/// Result of normalizing `d = 1`, `σ = ±1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalization {
    Rational {
        transform: ScalingTransform,
        coefficients: Coefficients,
        epsilon: i64,
    },
    /// No rational `μ` exists; `μ^2` is reported instead.
    Irrational {
        epsilon: i64,
        nu: Rational,
        mu_squared: Rational,
    },
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

/// Applies `ν = λ^5/d`, `μ^2 = σνλ/ε`, `ε = sign(σd)`, `ρ = 1`.
pub fn normalize(k: &Coefficients, lambda: Option<Rational>) -> Result<Normalization> {
    k.check()?;
    let lambda = lambda.unwrap_or_else(Rational::one);
    if lambda.is_zero() {
        return Err(Error::ZeroScaling("lambda"));
    }
    let nu = pow(&lambda, 5) / &k.d;
    let epsilon: i64 = if (&k.sigma * &k.d).is_positive() { 1 } else { -1 };
    let mu_squared = &k.sigma * &nu * &lambda / Rational::from_integer(epsilon.into());
    match rational_sqrt(&mu_squared) {
        Some(mu) => {
            let transform = ScalingTransform::new(lambda, mu, nu, Rational::one())?;
            let coefficients = apply_scaling(&transform, k)?;
            Ok(Normalization::Rational {
                transform,
                coefficients,
                epsilon,
            })
        }
        None => Ok(Normalization::Irrational {
            epsilon,
            nu,
            mu_squared,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::{int, rat};

    fn ks(v: [i64; 6]) -> Coefficients {
        let [c, d, e, f, g, s] = v.map(int);
        Coefficients::new(c, d, e, f, g, s)
    }

    #[test]
    fn identity_and_zero() {
        let k = ks([1, 2, 3, 4, 5, 1]);
        assert_eq!(apply_scaling(&ScalingTransform::identity(), &k).unwrap(), k);
        assert_eq!(
            ScalingTransform::new(int(1), int(0), int(1), int(1)),
            Err(Error::ZeroScaling("mu"))
        );
    }

    #[test]
    fn worked_transform() {
        let tr = ScalingTransform::new(int(1), int(1), rat(1, 2), int(1)).unwrap();
        let out = apply_scaling(&tr, &ks([1, 2, 3, 4, 5, 1])).unwrap();
        assert_eq!(
            out.to_array(),
            [rat(1, 2), int(1), rat(3, 2), int(2), rat(5, 2), rat(1, 2)]
        );
    }

    #[test]
    fn jet_substitution_matches_coefficients() {
        let k = ks([1, 2, 3, 4, 5, -3]);
        let tr = ScalingTransform::new(rat(2, 3), rat(-5, 2), rat(7, 4), rat(3, 5)).unwrap();
        assert_eq!(
            transform_expr(&unnormalized_delta(&k), &tr),
            unnormalized_delta(&apply_scaling(&tr, &k).unwrap())
        );
    }

    #[test]
    fn normalizations() {
        match normalize(&ks([0, 1, 10, 20, 30, 1]), None).unwrap() {
            Normalization::Rational {
                coefficients,
                epsilon,
                ..
            } => {
                assert_eq!(coefficients, ks([0, 1, 10, 20, 30, 1]));
                assert_eq!(epsilon, 1);
            }
            n => panic!("{n:?}"),
        }
        match normalize(&ks([0, 32, 1, 1, 1, 2]), Some(int(2))).unwrap() {
            Normalization::Rational {
                transform,
                coefficients,
                ..
            } => {
                assert_eq!(transform.nu, int(1));
                assert_eq!(transform.mu, int(2));
                assert_eq!(coefficients.sigma, int(1));
                assert_eq!(coefficients.d, int(1));
            }
            n => panic!("{n:?}"),
        }
        match normalize(&ks([0, -1, 1, 1, 1, 1]), None).unwrap() {
            Normalization::Rational {
                coefficients,
                epsilon,
                ..
            } => {
                assert_eq!(epsilon, -1);
                assert_eq!(coefficients.sigma, int(-1));
            }
            n => panic!("{n:?}"),
        }
        assert!(matches!(
            normalize(&ks([0, 2, 1, 1, 1, 1]), None).unwrap(),
            Normalization::Irrational { .. }
        ));
        assert_eq!(normalize(&ks([0, 0, 1, 1, 1, 1]), None), Err(Error::Degenerate));
    }
}

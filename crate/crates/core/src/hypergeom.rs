//! Terminating Gauss hypergeometric polynomials P_n(x) = F(A+n, −n; c; x)
//! with exact rational coefficients.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{rational_to_f64, Rational};
use crate::spaces::{chi_params, RootData};

/// Exact coefficients c_0 … c_n, indexed by degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalPoly {
    #[serde(serialize_with = "serialize_coeffs")]
    pub coeffs: Vec<Rational>,
}

fn serialize_coeffs<S: serde::Serializer>(
    coeffs: &[Rational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(coeffs.iter().map(crate::rational::format_rational))
}

impl RationalPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational_to_f64).collect()
    }

    pub fn eval_exact(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

fn is_nonpositive_integer(c: &Rational) -> bool {
    c.is_integer() && !c.is_positive()
}

/// Coefficients of F(A+n, −n; c; x) from the term recurrence
/// c_{j+1} = c_j (a+j)(b+j) / ((j+1)(c+j)).
pub fn hypergeom_poly(a_param: &Rational, n: u32, c: &Rational) -> Result<RationalPoly> {
    if is_nonpositive_integer(c) {
        return Err(Error::PoleInLowerParameter(c.to_string()));
    }
    let a = a_param + Rational::from_integer(n.into());
    let b = -Rational::from_integer(n.into());
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    let mut term = Rational::one();
    coeffs.push(term.clone());
    for j in 0..n {
        let jr = Rational::from_integer(j.into());
        term = term * (&a + &jr) * (&b + &jr) / ((&jr + Rational::one()) * (c + &jr));
        coeffs.push(term.clone());
    }
    Ok(RationalPoly { coeffs })
}

/// Linear and leading coefficients in closed form:
/// c_{n,1} = −(A+n)n/c and
/// c_{n,n} = (−1)^n ∏_{j<n} (A+n+j) / ∏_{j<n} (c+j).
///
/// For n = 0 there is no linear coefficient and c_{0,0} = 1.
pub fn closed_coeffs(
    a_param: &Rational,
    n: u32,
    c: &Rational,
) -> Result<(Option<Rational>, Rational)> {
    if is_nonpositive_integer(c) {
        return Err(Error::PoleInLowerParameter(c.to_string()));
    }
    if n == 0 {
        return Ok((None, Rational::one()));
    }
    let nr = Rational::from_integer(n.into());
    let linear = -(a_param + &nr) * &nr / c;
    let leading = gamma_ratio_lhs(a_param, n, c);
    let leading = if n % 2 == 1 { -leading } else { leading };
    Ok((Some(linear), leading))
}

/// Γ(A+2n)Γ(c) / (Γ(A+n)Γ(c+n)) as an exact finite product.
pub fn gamma_ratio_lhs(a_param: &Rational, n: u32, c: &Rational) -> Rational {
    let mut value = Rational::one();
    for j in 0..n {
        let jr = Rational::from_integer(j.into());
        let nr = Rational::from_integer(n.into());
        value = value * (a_param + &nr + &jr) / (c + &jr);
    }
    value
}

/// The polynomial P_n of isotype `n` on `space`.
pub fn chi_poly(space: &RootData, n: u32) -> RationalPoly {
    let p = chi_params(space, n);
    hypergeom_poly(&p.A, n, &p.c).expect("c = m/2 is positive")
}

/// Evaluates `coeffs` at `x` by Horner's rule.
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc.mul_add(x, c))
}

/// Spherical function along the radial ray: P_n(−sh²t).
pub fn eval_fchi(space: &RootData, n: u32, t: f64) -> f64 {
    let coeffs = chi_poly(space, n).to_f64();
    let sh = t.sinh();
    horner(&coeffs, -sh * sh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::spaces::{catalog, Family, make_space};
    use approx::assert_relative_eq;

    #[test]
    fn s3_examples() {
        assert_eq!(hypergeom_poly(&rat(2, 1), 0, &rat(3, 2)).unwrap().coeffs, vec![rat(1, 1)]);
        assert_eq!(
            hypergeom_poly(&rat(2, 1), 1, &rat(3, 2)).unwrap().coeffs,
            vec![rat(1, 1), rat(-2, 1)]
        );
        let p2 = hypergeom_poly(&rat(2, 1), 2, &rat(3, 2)).unwrap();
        assert_eq!(p2.coeffs[2], rat(16, 3));
        // 20 · 4/15 from the Γ-ratio oracle
        assert_eq!(rat(20, 1) * rat(4, 15), rat(16, 3));
    }

    #[test]
    fn closed_form_examples() {
        let (c1, c11) = closed_coeffs(&rat(2, 1), 1, &rat(3, 2)).unwrap();
        assert_eq!(c1, Some(rat(-2, 1)));
        assert_eq!(c11, rat(-2, 1));
        let (_, c22) = closed_coeffs(&rat(2, 1), 2, &rat(3, 2)).unwrap();
        assert_eq!(c22, rat(16, 3));
        let (c01, c00) = closed_coeffs(&rat(7, 3), 0, &rat(5, 2)).unwrap();
        assert_eq!((c01, c00), (None, rat(1, 1)));
    }

    #[test]
    fn rejects_poles() {
        for c in [rat(0, 1), rat(-1, 1), rat(-3, 1)] {
            assert!(matches!(
                hypergeom_poly(&rat(1, 1), 2, &c),
                Err(Error::PoleInLowerParameter(_))
            ));
        }
        assert!(hypergeom_poly(&rat(1, 1), 2, &rat(-1, 2)).is_ok());
    }

    #[test]
    fn recurrence_matches_closed_forms() {
        for space in catalog() {
            for n in 0..=8 {
                let p = chi_params(&space, n);
                let poly = hypergeom_poly(&p.A, n, &p.c).unwrap();
                assert_eq!(poly.degree(), n as usize);
                assert_eq!(poly.coeffs[0], rat(1, 1));
                assert!(!poly.coeffs[n as usize].is_zero());
                let (c1, cn) = closed_coeffs(&p.A, n, &p.c).unwrap();
                if n > 0 {
                    assert_eq!(c1.as_ref(), Some(&poly.coeffs[1]));
                }
                assert_eq!(cn, poly.coeffs[n as usize]);
            }
        }
    }

    #[test]
    fn fchi_examples() {
        let s3 = make_space(Family::Sphere, 3).unwrap();
        assert_eq!(eval_fchi(&s3, 0, 1.7), 1.0);
        assert_relative_eq!(eval_fchi(&s3, 1, 1.0), 2f64.cosh(), max_relative = 1e-14);
        assert_relative_eq!(eval_fchi(&s3, 1, 1.0), 3.7622, max_relative = 1e-4);
        for space in catalog() {
            for n in 0..5 {
                assert_eq!(eval_fchi(&space, n, 0.0), 1.0);
                assert_eq!(eval_fchi(&space, n, 0.8), eval_fchi(&space, n, -0.8));
            }
        }
    }

    #[test]
    fn float_evaluation_matches_exact() {
        for space in catalog() {
            for n in 0..=8 {
                let poly = chi_poly(&space, n);
                let floats = poly.to_f64();
                for x in [0i64, -1, -4] {
                    let exact = rational_to_f64(&poly.eval_exact(&rat(x, 1)));
                    let approx = horner(&floats, x as f64);
                    assert_relative_eq!(approx, exact, max_relative = 1e-13);
                }
            }
        }
    }
}

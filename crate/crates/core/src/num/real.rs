//! Lazily evaluated real scalars: exact rationals plus the irrational
//! constants the experiments need (square roots, rational powers of two and
//! affine combinations of those). Every variant can be enclosed in a [`Ball`]
//! at any requested precision, so downstream comparisons can escalate until
//! they are decided.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::dyadic::{exp2_ball, sqrt_ball, Ball};

/// A real scalar: exact or evaluable to arbitrary precision.
#[derive(Debug, Clone, PartialEq)]
pub enum Real {
    Rational(BigRational),
    /// `sqrt(r)` for a nonnegative rational `r`.
    Sqrt(BigRational),
    /// `2^r` for a rational `r`.
    Exp2(BigRational),
    /// `c0 + sum c_i * x_i` with rational coefficients.
    Affine {
        constant: BigRational,
        terms: Vec<(BigRational, Real)>,
    },
}

impl Real {
    pub fn zero() -> Real {
        Real::Rational(BigRational::zero())
    }

    pub fn from_int(v: i64) -> Real {
        Real::Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Real {
        Real::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `sqrt(r)`, collapsing perfect squares to rationals.
    pub fn sqrt(r: BigRational) -> Real {
        assert!(!r.is_negative(), "sqrt of a negative rational");
        let num_root = super::dyadic::isqrt(r.numer());
        let den_root = super::dyadic::isqrt(r.denom());
        if &num_root * &num_root == *r.numer() && &den_root * &den_root == *r.denom() {
            return Real::Rational(BigRational::new(num_root, den_root));
        }
        Real::Sqrt(r)
    }

    /// `2^r`, collapsing integral exponents to rationals.
    pub fn exp2(r: BigRational) -> Real {
        if r.denom().is_one() {
            let e = r.numer().to_i64().expect("2^k exponent fits in i64");
            return Real::Rational(super::pow2_rational(e));
        }
        Real::Exp2(r)
    }

    /// The golden ratio `(1 + sqrt 5) / 2`.
    pub fn golden_ratio() -> Real {
        Real::Affine {
            constant: BigRational::new(BigInt::one(), BigInt::from(2)),
            terms: vec![(
                BigRational::new(BigInt::one(), BigInt::from(2)),
                Real::Sqrt(BigRational::from_integer(BigInt::from(5))),
            )],
        }
    }

    pub fn sqrt2() -> Real {
        Real::Sqrt(BigRational::from_integer(BigInt::from(2)))
    }

    /// Exact rational view, if this value is structurally rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Real::Rational(r) => Some(r.clone()),
            Real::Sqrt(_) | Real::Exp2(_) => None,
            Real::Affine { constant, terms } => {
                let mut acc = constant.clone();
                for (c, x) in terms {
                    if c.is_zero() {
                        continue;
                    }
                    acc += c * x.as_rational()?;
                }
                Some(acc)
            }
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    /// `c * self + d` without evaluating.
    pub fn scale_shift(&self, c: &BigRational, d: &BigRational) -> Real {
        if let Some(r) = self.as_rational() {
            return Real::Rational(c * r + d);
        }
        Real::Affine {
            constant: d.clone(),
            terms: vec![(c.clone(), self.clone())],
        }
    }

    /// `constant + sum coeffs[i] * values[i]` without evaluating.
    pub fn linear_combination(constant: BigRational, parts: Vec<(BigRational, Real)>) -> Real {
        let mut terms = Vec::new();
        let mut acc = constant;
        for (c, x) in parts {
            if c.is_zero() {
                continue;
            }
            match x.as_rational() {
                Some(r) => acc += &c * r,
                None => terms.push((c, x)),
            }
        }
        if terms.is_empty() {
            Real::Rational(acc)
        } else {
            Real::Affine {
                constant: acc,
                terms,
            }
        }
    }

    /// Enclose this value at `prec` bits.
    pub fn eval(&self, prec: u32) -> Ball {
        match self {
            Real::Rational(r) => Ball::from_rational(r, prec),
            Real::Sqrt(r) => sqrt_ball(r, prec),
            Real::Exp2(r) => exp2_ball(r, prec),
            Real::Affine { constant, terms } => {
                // Evaluate sub-terms with guard bits so coefficient growth
                // does not eat the requested precision.
                let guard = prec + 16;
                let mut acc = Ball::from_rational(constant, guard);
                for (c, x) in terms {
                    let xb = x.eval(guard);
                    let cb = Ball::from_rational(c, guard);
                    acc = acc.add(&cb.mul(&xb, guard), guard);
                }
                acc.rounded(prec)
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            _ => self.eval(96).to_f64(),
        }
    }
}

impl From<BigRational> for Real {
    fn from(r: BigRational) -> Real {
        Real::Rational(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::big_rational;

    #[test]
    fn golden_ratio_digits() {
        // Known constant to the stated digits.
        let phi = Real::golden_ratio();
        let v = phi.eval(256).to_f64();
        assert!((v - 1.618_033_988_7).abs() < 1e-9);
        assert!(!phi.is_rational());
    }

    #[test]
    fn sqrt_collapses_perfect_squares() {
        assert_eq!(
            Real::sqrt(big_rational(9, 4)),
            Real::Rational(big_rational(3, 2))
        );
        assert!(matches!(Real::sqrt(big_rational(2, 1)), Real::Sqrt(_)));
    }

    #[test]
    fn exp2_collapses_integers() {
        assert_eq!(
            Real::exp2(big_rational(-3, 1)),
            Real::Rational(big_rational(1, 8))
        );
        assert!(matches!(Real::exp2(big_rational(1, 3)), Real::Exp2(_)));
    }

    #[test]
    fn linear_combination_folds_rationals() {
        let r = Real::linear_combination(
            big_rational(1, 3),
            vec![
                (big_rational(2, 1), Real::from_ratio(1, 6)),
                (big_rational(0, 1), Real::sqrt2()),
            ],
        );
        assert_eq!(r, Real::Rational(big_rational(2, 3)));
    }

    #[test]
    fn affine_eval_precision_scales() {
        // phi^2 = phi + 1; check the identity numerically at high precision.
        let phi = Real::golden_ratio();
        let prec = 512;
        let phi_ball = phi.eval(prec);
        let sq = phi_ball.mul(&phi_ball, prec);
        let rhs = phi.eval(prec).add(&Ball::from_rational(&big_rational(1, 1), prec), prec);
        let diff = sq.sub(&rhs, prec).abs();
        assert!(diff.upper().to_rational() < big_rational(1, 1 << 30) * big_rational(1, 1 << 30));
    }
}

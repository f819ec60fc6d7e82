//! Dyadic fixed-point numbers and ball arithmetic.
//!
//! A [`Dyadic`] is `mantissa * 2^exp` with a big-integer mantissa, so all
//! ring operations are exact. A [`Ball`] is a dyadic midpoint plus a dyadic
//! radius; operations propagate the radius and round the midpoint back to
//! working precision, so a ball always encloses the true value.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

use super::Decision;

/// Exact dyadic number `mantissa * 2^exp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dyadic {
    pub mantissa: BigInt,
    pub exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exp: 0,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic {
            mantissa: BigInt::from(v),
            exp: 0,
        }
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Self {
        Dyadic {
            mantissa: BigInt::one(),
            exp: e,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    /// Align two dyadics to a common exponent (the smaller of the two).
    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt, i64) {
        let exp = self.exp.min(other.exp);
        let a = &self.mantissa << (self.exp - exp) as u64;
        let b = &other.mantissa << (other.exp - exp) as u64;
        (a, b, exp)
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(other);
        Dyadic {
            mantissa: a + b,
            exp,
        }
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        let (a, b, exp) = self.aligned(other);
        Dyadic {
            mantissa: a - b,
            exp,
        }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic {
            mantissa: -self.mantissa.clone(),
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exp: self.exp,
        }
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic {
            mantissa: &self.mantissa * &other.mantissa,
            exp: self.exp + other.exp,
        }
    }

    pub fn mul_bigint(&self, k: &BigInt) -> Dyadic {
        Dyadic {
            mantissa: &self.mantissa * k,
            exp: self.exp,
        }
    }

    pub fn cmp(&self, other: &Dyadic) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }

    /// Number of significant bits in the mantissa.
    pub fn bits(&self) -> u64 {
        self.mantissa.magnitude().bits()
    }

    /// Round to `prec` mantissa bits, returning the rounded value and a
    /// bound on the rounding error.
    pub fn round_to(&self, prec: u32) -> (Dyadic, Dyadic) {
        let bits = self.bits();
        if bits <= prec as u64 {
            return (self.clone(), Dyadic::zero());
        }
        let drop = bits - prec as u64;
        // Truncation toward zero; error below 2^(exp + drop).
        let mantissa = &self.mantissa >> drop;
        (
            Dyadic {
                mantissa,
                exp: self.exp + drop as i64,
            },
            Dyadic::pow2(self.exp + drop as i64),
        )
    }

    /// Nearest integer, rounding half up (so `y - round(y)` lies in
    /// `[-1/2, 1/2)`, the fundamental-domain convention).
    pub fn round_nearest_int(&self) -> BigInt {
        if self.exp >= 0 {
            return &self.mantissa << self.exp as u64;
        }
        let shift = (-self.exp) as u64;
        // floor((m + 2^(shift-1)) / 2^shift)
        let half = BigInt::one() << (shift - 1);
        let num = &self.mantissa + half;
        num >> shift
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mantissa << self.exp as u64)
        } else {
            BigRational::new(self.mantissa.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let log = self.log2_abs();
        let sign = if self.is_negative() { -1.0 } else { 1.0 };
        sign * log.exp2()
    }

    /// `log2 |self|`; panics on zero.
    pub fn log2_abs(&self) -> f64 {
        assert!(!self.is_zero());
        super::log2_bigint(&self.mantissa) + self.exp as f64
    }
}

/// Midpoint-radius enclosure of a real number.
#[derive(Debug, Clone)]
pub struct Ball {
    pub mid: Dyadic,
    pub rad: Dyadic,
}

impl Ball {
    pub fn exact(mid: Dyadic) -> Self {
        Ball {
            mid,
            rad: Dyadic::zero(),
        }
    }

    /// The ball `[lo, hi]` (requires `lo <= hi`).
    pub fn from_bounds(lo: Dyadic, hi: Dyadic) -> Ball {
        debug_assert!(lo.cmp(&hi) != Ordering::Greater);
        let sum = lo.add(&hi);
        let diff = hi.sub(&lo);
        Ball {
            mid: Dyadic {
                mantissa: sum.mantissa,
                exp: sum.exp - 1,
            },
            rad: Dyadic {
                mantissa: diff.mantissa,
                exp: diff.exp - 1,
            },
        }
    }

    pub fn zero() -> Self {
        Ball::exact(Dyadic::zero())
    }

    /// Enclose a rational at `prec` bits.
    pub fn from_rational(v: &BigRational, prec: u32) -> Ball {
        if v.denom().is_one() {
            return Ball::exact(Dyadic {
                mantissa: v.numer().clone(),
                exp: 0,
            });
        }
        // floor(num * 2^prec / den): error below one ulp.
        let scaled = (v.numer() << prec as u64).div_euclid(v.denom());
        Ball {
            mid: Dyadic {
                mantissa: scaled,
                exp: -(prec as i64),
            },
            rad: Dyadic::pow2(-(prec as i64)),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn add(&self, other: &Ball, prec: u32) -> Ball {
        Ball {
            mid: self.mid.add(&other.mid),
            rad: self.rad.add(&other.rad),
        }
        .rounded(prec)
    }

    pub fn sub(&self, other: &Ball, prec: u32) -> Ball {
        Ball {
            mid: self.mid.sub(&other.mid),
            rad: self.rad.add(&other.rad),
        }
        .rounded(prec)
    }

    pub fn neg(&self) -> Ball {
        Ball {
            mid: self.mid.neg(),
            rad: self.rad.clone(),
        }
    }

    pub fn abs(&self) -> Ball {
        // |x| is 1-Lipschitz: |mid| +- rad encloses it.
        Ball {
            mid: self.mid.abs(),
            rad: self.rad.clone(),
        }
    }

    pub fn mul(&self, other: &Ball, prec: u32) -> Ball {
        // |xy - mx my| <= |mx| ry + |my| rx + rx ry
        let mid = self.mid.mul(&other.mid);
        let rad = self
            .mid
            .abs()
            .mul(&other.rad)
            .add(&other.mid.abs().mul(&self.rad))
            .add(&self.rad.mul(&other.rad));
        Ball { mid, rad }.rounded(prec)
    }

    pub fn mul_bigint(&self, k: &BigInt) -> Ball {
        Ball {
            mid: self.mid.mul_bigint(k),
            rad: self.rad.mul_bigint(&k.abs()),
        }
    }

    /// Round the midpoint to `prec` bits, absorbing the rounding error into
    /// the radius (the radius itself is rounded up).
    pub fn rounded(&self, prec: u32) -> Ball {
        let (mid, err) = self.mid.round_to(prec);
        let rad = self.rad.add(&err);
        let rad = if rad.bits() > prec as u64 + 8 {
            let (r, e) = rad.round_to(16);
            r.add(&e).add(&e) // round up generously
        } else {
            rad
        };
        Ball { mid, rad }
    }

    /// Distance to the nearest integer, as an enclosure. Uses the exactness
    /// of the dyadic midpoint; the map is 1-Lipschitz so the radius carries.
    pub fn dist_nearest_int(&self) -> Ball {
        let k = self.mid.round_nearest_int();
        let frac = self.mid.sub(&Dyadic {
            mantissa: k,
            exp: 0,
        });
        Ball {
            mid: frac.abs(),
            rad: self.rad.clone(),
        }
    }

    /// The integer nearest the midpoint (half rounds up).
    pub fn nearest_int(&self) -> BigInt {
        self.mid.round_nearest_int()
    }

    pub fn lower(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    pub fn upper(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    /// Three-valued `self < other`.
    pub fn lt(&self, other: &Ball) -> Decision {
        if self.upper().cmp(&other.lower()) == Ordering::Less {
            Decision::True
        } else if self.lower().cmp(&other.upper()) != Ordering::Less {
            Decision::False
        } else if self.is_exact() && other.is_exact() {
            // Equal exact values: not less.
            Decision::False
        } else {
            Decision::Undecided
        }
    }

    /// Three-valued `self == 0`.
    pub fn is_zero(&self) -> Decision {
        if self.is_exact() {
            if self.mid.is_zero() {
                Decision::True
            } else {
                Decision::False
            }
        } else if self.lower().is_negative() && !self.upper().is_negative() {
            Decision::Undecided
        } else if self.mid.is_zero() && self.rad.is_zero() {
            Decision::True
        } else if !self.lower().is_negative() && self.lower().is_zero() {
            Decision::Undecided
        } else {
            Decision::False
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    /// `log2` of the midpoint magnitude, `-inf` for zero midpoint.
    pub fn log2_abs_mid(&self) -> f64 {
        if self.mid.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mid.log2_abs()
        }
    }
}

/// Integer square root (floor) of a nonnegative big integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative());
    if n.is_zero() {
        return BigInt::zero();
    }
    let bits = n.bits();
    let mut x = BigInt::one() << (bits / 2 + 1);
    loop {
        // Newton step: y = (x + n/x) / 2, monotone decreasing to isqrt.
        let y = (&x + n / &x) >> 1u32;
        if y >= x {
            break;
        }
        x = y;
    }
    debug_assert!(&x * &x <= *n && (&x + 1u32) * (&x + 1u32) > *n);
    x
}

/// Enclose `sqrt(v)` for a nonnegative rational at `prec` bits.
pub fn sqrt_ball(v: &BigRational, prec: u32) -> Ball {
    assert!(!v.is_negative());
    if v.is_zero() {
        return Ball::zero();
    }
    // sqrt(num/den) = sqrt(num * 2^(2p) / den) / 2^p, with the floor-division
    // and isqrt each contributing below one unit at scale 2^-p.
    let scaled = (v.numer() << (2 * prec as u64)).div_euclid(v.denom());
    let s = isqrt(&scaled);
    Ball {
        mid: Dyadic {
            mantissa: s,
            exp: -(prec as i64),
        },
        rad: Dyadic {
            mantissa: BigInt::from(2),
            exp: -(prec as i64),
        },
    }
}

/// Enclose `2^e` for a rational exponent at `prec` bits.
pub fn exp2_ball(e: &BigRational, prec: u32) -> Ball {
    if e.denom().is_one() {
        let k = e
            .numer()
            .to_i64()
            .expect("integer exponent of 2^t fits in i64");
        return Ball::exact(Dyadic::pow2(k));
    }
    // Split e = k + c/b with 0 <= c < b; bisect y in [1,2] against y^b = 2^c.
    let b = e
        .denom()
        .to_u32()
        .expect("denominator of 2^t exponent fits in u32");
    let k = e.numer().div_euclid(e.denom());
    let c = e
        .numer()
        .rem_euclid(e.denom())
        .to_u32()
        .expect("2^t fractional numerator fits in u32");
    let k = k.to_i64().expect("integer part of 2^t exponent fits in i64");
    debug_assert!(c > 0 && c < b);

    // Invariant: lo^b <= 2^c < hi^b with lo, hi dyadic at scale 2^-p.
    let target = BigInt::one() << c as u64;
    let mut lo = BigInt::one();
    let mut hi = BigInt::from(2);
    let mut scale: u32 = 0;
    while scale < prec {
        scale += 1;
        lo <<= 1;
        hi <<= 1;
        let mid = (&lo + &hi) >> 1u32;
        // Compare (mid / 2^scale)^b against 2^c: mid^b vs 2^(c + b*scale).
        let lhs = mid.pow(b);
        let rhs = &target << (b as u64 * scale as u64);
        if lhs <= rhs {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let frac = Ball {
        mid: Dyadic {
            mantissa: lo,
            exp: -(scale as i64),
        },
        rad: Dyadic::pow2(-(scale as i64)),
    };
    Ball {
        mid: Dyadic {
            mantissa: frac.mid.mantissa,
            exp: frac.mid.exp + k,
        },
        rad: Dyadic {
            mantissa: frac.rad.mantissa,
            exp: frac.rad.exp + k,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::big_rational;

    #[test]
    fn dyadic_round_trip() {
        let d = Dyadic {
            mantissa: BigInt::from(-13),
            exp: -3,
        };
        assert_eq!(d.to_rational(), big_rational(-13, 8));
        assert_eq!(d.round_nearest_int(), BigInt::from(-2)); // -13/8 = -1.625
    }

    #[test]
    fn round_half_up_matches_fundamental_domain() {
        // 1/2 rounds to 1 so that 1/2 - 1 = -1/2 lies in [-1/2, 1/2).
        let half = Dyadic {
            mantissa: BigInt::one(),
            exp: -1,
        };
        assert_eq!(half.round_nearest_int(), BigInt::one());
        let neg_half = half.neg();
        assert_eq!(neg_half.round_nearest_int(), BigInt::zero());
    }

    #[test]
    fn ball_from_rational_encloses() {
        let third = big_rational(1, 3);
        let b = Ball::from_rational(&third, 64);
        assert!(b.lower().to_rational() <= third);
        assert!(third <= b.upper().to_rational());
        assert!(b.rad.to_rational() <= big_rational(1, 1 << 62));
    }

    #[test]
    fn ball_mul_encloses() {
        let a = Ball::from_rational(&big_rational(1, 3), 80);
        let b = Ball::from_rational(&big_rational(1, 7), 80);
        let p = a.mul(&b, 80);
        let truth = big_rational(1, 21);
        assert!(p.lower().to_rational() <= truth && truth <= p.upper().to_rational());
    }

    #[test]
    fn dist_nearest_int_ball() {
        let v = Ball::from_rational(&big_rational(5, 4), 64);
        let d = v.dist_nearest_int();
        let truth = big_rational(1, 4);
        assert!(d.lower().to_rational() <= truth && truth <= d.upper().to_rational());
    }

    #[test]
    fn isqrt_fixed_points() {
        assert_eq!(isqrt(&BigInt::from(0)), BigInt::from(0));
        assert_eq!(isqrt(&BigInt::from(1)), BigInt::from(1));
        assert_eq!(isqrt(&BigInt::from(24)), BigInt::from(4));
        assert_eq!(isqrt(&BigInt::from(25)), BigInt::from(5));
        let big = BigInt::from(10).pow(40);
        let r = isqrt(&big);
        assert_eq!(r, BigInt::from(10).pow(20));
    }

    #[test]
    fn sqrt_ball_of_two() {
        let b = sqrt_ball(&big_rational(2, 1), 128);
        let approx = b.to_f64();
        assert!((approx - std::f64::consts::SQRT_2).abs() < 1e-12);
        // enclosure check: lower^2 <= 2 <= upper^2
        let lo = b.lower().to_rational();
        let hi = b.upper().to_rational();
        assert!(&lo * &lo <= big_rational(2, 1));
        assert!(&hi * &hi >= big_rational(2, 1));
    }

    #[test]
    fn exp2_ball_values() {
        let b = exp2_ball(&big_rational(3, 1), 64);
        assert!(b.is_exact());
        assert_eq!(b.mid.to_rational(), big_rational(8, 1));

        let h = exp2_ball(&big_rational(1, 2), 128);
        let lo = h.lower().to_rational();
        let hi = h.upper().to_rational();
        assert!(&lo * &lo <= big_rational(2, 1));
        assert!(&hi * &hi >= big_rational(2, 1));

        let neg = exp2_ball(&big_rational(-5, 4), 96);
        let truth = 2f64.powf(-1.25);
        assert!((neg.to_f64() - truth).abs() < 1e-12);
    }

    #[test]
    fn ball_lt_decisions() {
        let a = Ball::from_rational(&big_rational(1, 3), 64);
        let b = Ball::from_rational(&big_rational(1, 2), 64);
        assert_eq!(a.lt(&b), Decision::True);
        assert_eq!(b.lt(&a), Decision::False);
        let wide = Ball {
            mid: Dyadic::from_int(0),
            rad: Dyadic::one(),
        };
        assert_eq!(wide.lt(&a), Decision::Undecided);
    }
}

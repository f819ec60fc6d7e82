//! Numeric foundations: exact rationals, dyadic ball arithmetic, lazily
//! evaluated irrational constants and extended (possibly infinite) values.
//!
//! Everything downstream follows one discipline: computations on exact
//! rationals stay exact, computations involving irrational inputs run in
//! ball arithmetic at a tracked precision, and comparisons on balls are
//! three-valued ([`Decision`]). Callers escalate precision on `Undecided`
//! by doubling, starting from [`PrecisionPolicy::start_bits`].

mod dyadic;
mod real;
pub mod reduce;

pub use dyadic::{exp2_ball, isqrt, sqrt_ball, Ball, Dyadic};
pub use real::Real;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Outcome of a comparison that may be unresolvable at the current precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    True,
    False,
    /// The operands are not separated at this precision; escalate and retry.
    Undecided,
}

impl Decision {
    pub fn is_true(self) -> bool {
        self == Decision::True
    }
    pub fn is_decided(self) -> bool {
        self != Decision::Undecided
    }
}

/// Working-precision policy: start at `start_bits`, double on undecided
/// comparisons, give up at `max_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionPolicy {
    pub start_bits: u32,
    pub max_bits: u32,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        // 256 bits covers |q| <= 2^64 ladders with margin.
        PrecisionPolicy {
            start_bits: 256,
            max_bits: 16384,
        }
    }
}

impl PrecisionPolicy {
    /// Precisions to try, in escalation order.
    pub fn ladder(&self) -> impl Iterator<Item = u32> {
        let start = self.start_bits.max(8);
        let max = self.max_bits.max(start);
        std::iter::successors(Some(start), move |&p| {
            if p >= max {
                None
            } else {
                Some((p * 2).min(max))
            }
        })
    }

    /// Run `f` at escalating precision until it returns a decided value.
    pub fn decide<F>(&self, mut f: F) -> Option<bool>
    where
        F: FnMut(u32) -> Decision,
    {
        for bits in self.ladder() {
            match f(bits) {
                Decision::True => return Some(true),
                Decision::False => return Some(false),
                Decision::Undecided => continue,
            }
        }
        None
    }
}

/// A nonnegative value extended with `+infinity`. Finite values sort below
/// infinity; `NaN` has no representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extended<T> {
    Finite(T),
    Infinity,
}

/// Extended nonnegative exact rational: the carrier for every exponent value
/// that enters or leaves a closed-form calculator.
pub type ExtReal = Extended<BigRational>;

impl<T> Extended<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinity)
    }

    pub fn as_finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinity => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Extended<U> {
        match self {
            Extended::Finite(v) => Extended::Finite(f(v)),
            Extended::Infinity => Extended::Infinity,
        }
    }
}

impl<T: PartialOrd> PartialOrd for Extended<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.partial_cmp(b),
            (Extended::Finite(_), Extended::Infinity) => Some(Ordering::Less),
            (Extended::Infinity, Extended::Finite(_)) => Some(Ordering::Greater),
            (Extended::Infinity, Extended::Infinity) => Some(Ordering::Equal),
        }
    }
}

impl<T: Ord> Ord for Extended<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
            (Extended::Finite(_), Extended::Infinity) => Ordering::Less,
            (Extended::Infinity, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Infinity, Extended::Infinity) => Ordering::Equal,
        }
    }
}

impl ExtReal {
    pub fn from_int(v: i64) -> Self {
        Extended::Finite(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Extended::Finite(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Finite(v) => v.to_f64().unwrap_or(f64::NAN),
            Extended::Infinity => f64::INFINITY,
        }
    }

    /// Render as `p/q` (or a bare integer, or `inf`).
    pub fn render(&self) -> String {
        match self {
            Extended::Finite(v) => render_rational(v),
            Extended::Infinity => "inf".to_string(),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

pub fn render_rational(v: &BigRational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Parse `p`, `p/q` or `-p/q` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    } else {
        let num: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(num))
    }
}

pub fn big_rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn big_int_rational(num: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(num))
}

/// `log2` of a positive rational as an `f64`, stable for values far outside
/// the `f64` exponent range (e.g. `2^-384`).
pub fn log2_rational(v: &BigRational) -> f64 {
    debug_assert!(v.is_positive());
    log2_bigint(v.numer()) - log2_bigint(v.denom())
}

/// `log2 |x|` for a nonzero big integer, as an `f64`.
pub fn log2_bigint(x: &BigInt) -> f64 {
    let mag = x.magnitude();
    let bits = mag.bits();
    if bits <= 53 {
        return (mag.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 53;
    let top = (mag >> shift).to_u64().unwrap();
    (top as f64).log2() + shift as f64
}

/// Floor of `log2` of a positive rational: the unique `e` with
/// `2^e <= v < 2^(e+1)`.
pub fn floor_log2_rational(v: &BigRational) -> i64 {
    assert!(v.is_positive(), "floor_log2 of a nonpositive rational");
    let num_bits = v.numer().magnitude().bits() as i64;
    let den_bits = v.denom().magnitude().bits() as i64;
    // num/den is within a factor of 2 of 2^(num_bits - den_bits).
    let mut e = num_bits - den_bits;
    let two = BigRational::from_integer(BigInt::from(2));
    while pow2_rational(e) > *v {
        e -= 1;
    }
    while pow2_rational(e + 1) <= *v {
        e += 1;
    }
    debug_assert!(pow2_rational(e) <= *v && *v < pow2_rational(e) * two);
    e
}

/// `2^e` as an exact rational, for any sign of `e`.
pub fn pow2_rational(e: i64) -> BigRational {
    let one = BigInt::one();
    if e >= 0 {
        BigRational::from_integer(one << e as u64)
    } else {
        BigRational::new(one.clone(), one << (-e) as u64)
    }
}

/// Compare `value` against `base^exponent` for a positive rational `value`,
/// integer `base >= 2` and rational `exponent`, exactly.
///
/// Raising both sides to the exponent's denominator reduces the comparison
/// to integers: `v < b^(a/d)  <=>  v^d < b^a` (`d > 0`).
pub fn cmp_vs_int_power(value: &BigRational, base: &BigInt, exponent: &BigRational) -> Ordering {
    assert!(value.is_positive());
    assert!(base > &BigInt::one());
    let d = exponent.denom();
    let a = exponent.numer();
    let d_u32 = d
        .to_u32()
        .expect("rational exponent denominator fits in u32");
    let lhs_num = value.numer().pow(d_u32);
    let lhs_den = value.denom().pow(d_u32);
    // Compare lhs_num / lhs_den against base^a.
    let a_abs = a
        .magnitude()
        .to_u64()
        .expect("rational exponent numerator magnitude fits in u64");
    let a_abs = u32::try_from(a_abs).expect("exponent numerator fits in u32");
    if a.is_negative() {
        // v^d < b^-a  <=>  v^d * b^a < 1
        (lhs_num * base.pow(a_abs)).cmp(&lhs_den)
    } else {
        lhs_num.cmp(&(lhs_den * base.pow(a_abs)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extended_order() {
        let a = ExtReal::from_ratio(1, 2);
        let b = ExtReal::from_int(3);
        assert!(a < b);
        assert!(b < Extended::Infinity);
        assert_eq!(
            Extended::<BigRational>::Infinity,
            Extended::<BigRational>::Infinity
        );
    }

    #[test]
    fn render_and_parse() {
        assert_eq!(ExtReal::from_ratio(2, 6).render(), "1/3");
        assert_eq!(ExtReal::from_int(-4).render(), "-4");
        assert_eq!(ExtReal::Infinity.render(), "inf");
        assert_eq!(parse_rational("7/4"), Some(big_rational(7, 4)));
        assert_eq!(parse_rational("-3"), Some(big_int_rational(-3)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn log2_of_extreme_rationals() {
        let tiny = pow2_rational(-384);
        assert!((log2_rational(&tiny) + 384.0).abs() < 1e-9);
        let v = big_rational(3, 4);
        assert!((log2_rational(&v) - (0.75f64).log2()).abs() < 1e-12);
    }

    #[test]
    fn floor_log2_brackets() {
        assert_eq!(floor_log2_rational(&big_rational(1, 1)), 0);
        assert_eq!(floor_log2_rational(&big_rational(1, 2)), -1);
        assert_eq!(floor_log2_rational(&big_rational(3, 8)), -2);
        assert_eq!(floor_log2_rational(&big_rational(17, 1)), 4);
        assert_eq!(floor_log2_rational(&pow2_rational(-100)), -100);
    }

    #[test]
    fn int_power_comparison() {
        // 1/9 < 10^(-1/2) < 1/3
        let base = BigInt::from(10);
        let e = big_rational(-1, 2);
        assert_eq!(
            cmp_vs_int_power(&big_rational(1, 9), &base, &e),
            Ordering::Less
        );
        assert_eq!(
            cmp_vs_int_power(&big_rational(1, 3), &base, &e),
            Ordering::Greater
        );
        // exact boundary: 2^3 = 8
        assert_eq!(
            cmp_vs_int_power(&big_int_rational(8), &BigInt::from(2), &big_int_rational(3)),
            Ordering::Equal
        );
    }

    #[test]
    fn precision_policy_ladder() {
        let p = PrecisionPolicy {
            start_bits: 256,
            max_bits: 1024,
        };
        let seq: Vec<u32> = p.ladder().collect();
        assert_eq!(seq, vec![256, 512, 1024]);
    }
}

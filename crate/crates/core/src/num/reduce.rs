//! Reduction to the fundamental domain and the product norms.
//!
//! Conventions: `<y>` is the unique representative of `y` in `[-1/2, 1/2)`
//! (so `1/2` maps to `-1/2`), and `||y|| = |<y>|` is the distance to the
//! nearest integer, with ties at exactly `1/2` regardless of side.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Nearest integer to `y`, rounding half up (consistent with `[-1/2, 1/2)`).
pub fn round_half_up(y: &BigRational) -> BigInt {
    // floor(y + 1/2)
    let shifted = y + BigRational::new(BigInt::one(), BigInt::from(2));
    shifted.floor().to_integer()
}

/// Distance from `y` to the nearest integer; result in `[0, 1/2]`.
pub fn nearest_integer_distance(y: &BigRational) -> BigRational {
    let k = round_half_up(y);
    (y - BigRational::from_integer(k)).abs()
}

/// The unique representative of `y` in `[-1/2, 1/2)` congruent to `y` mod 1.
pub fn fundamental_representative_scalar(y: &BigRational) -> BigRational {
    let k = round_half_up(y);
    y - BigRational::from_integer(k)
}

/// Componentwise reduction to `[-1/2, 1/2)^m`.
pub fn fundamental_representative(y: &[BigRational]) -> Vec<BigRational> {
    y.iter().map(fundamental_representative_scalar).collect()
}

/// `prod_j |y_j|`.
pub fn product_norm(y: &[BigRational]) -> BigRational {
    let mut acc = BigRational::one();
    for v in y {
        acc *= v.abs();
    }
    acc
}

/// `prod_i max(1, |q_i|)`; equals 1 on the zero vector.
pub fn plus_product(q: &[BigInt]) -> BigInt {
    let mut acc = BigInt::one();
    for v in q {
        let a = v.abs();
        if a > BigInt::one() {
            acc *= a;
        }
    }
    acc
}

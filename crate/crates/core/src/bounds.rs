//! Exact-rational calculators for the closed-form exponent formulas and
//! transference bounds, including the sandwich intervals for inhomogeneous
//! hyperplane exponents.
//!
//! Every function is a pure map on extended nonnegative rationals: the same
//! input produces identical output bits. Values at `+infinity` follow the
//! monotone limits of the finite formulas and are documented per operation.
//! Lower bounds are clamped at zero exactly where the source formula writes
//! `max(0, .)`, and only there.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::num::{ExtReal, Extended};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BoundsError {
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },
}

fn domain(op: &'static str, reason: impl Into<String>) -> BoundsError {
    BoundsError::Domain {
        op,
        reason: reason.into(),
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A closed-form `[lower, upper]` sandwich for an inhomogeneous exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInterval {
    pub lower: ExtReal,
    pub upper: ExtReal,
    /// Set when a denominator was nonpositive and the lower endpoint was
    /// replaced by the trivial floor 0.
    pub vacuous_lower: bool,
    pub provenance: Vec<&'static str>,
}

impl BoundInterval {
    pub fn render(&self) -> String {
        format!("[{}, {}]", self.lower.render(), self.upper.render())
    }
}

/// Dual exponent of the hyperplane parametrized by `a` in `R^(n-1)`:
/// `max(n, omega_0(a))`. At `omega_0(a) = +inf` the value is `+inf`.
///
/// Domain: `omega_0(a) >= 1/(n-1)`, the simultaneous Dirichlet floor in
/// `R^(n-1)`.
pub fn dual_exponent_of_hyperplane(omega0_a: &ExtReal, n: u32) -> Result<ExtReal, BoundsError> {
    const OP: &str = "dual_exponent_of_hyperplane";
    if n < 2 {
        return Err(domain(OP, "n >= 2 required"));
    }
    match omega0_a {
        Extended::Infinity => Ok(Extended::Infinity),
        Extended::Finite(w) => {
            if *w < rat(1, (n - 1) as i64) {
                return Err(domain(OP, format!("omega0(a) = {w} below Dirichlet floor")));
            }
            Ok(Extended::Finite(int(n).max(w.clone())))
        }
    }
}

/// Simultaneous exponent of the hyperplane parametrized by `a`:
/// `max(1/n, w / (n + (n-1) w))` with `w = omega_{n-1}(a)`. The second
/// branch increases to `1/(n-1)` as `w -> +inf`, which is the value at
/// infinity.
///
/// Domain: `w >= n - 1`, the dual Dirichlet floor in `R^(n-1)`.
pub fn sim_exponent_of_hyperplane(omega_dual_a: &ExtReal, n: u32) -> Result<ExtReal, BoundsError> {
    const OP: &str = "sim_exponent_of_hyperplane";
    if n < 2 {
        return Err(domain(OP, "n >= 2 required"));
    }
    let dirichlet = rat(1, n as i64);
    match omega_dual_a {
        Extended::Infinity => Ok(Extended::Finite(dirichlet.max(rat(1, (n - 1) as i64)))),
        Extended::Finite(w) => {
            if *w < int(n - 1) {
                return Err(domain(OP, format!("omega_dual(a) = {w} below Dirichlet floor")));
            }
            let branch = w / (int(n) + (int(n) - BigRational::one()) * w);
            Ok(Extended::Finite(dirichlet.max(branch)))
        }
    }
}

/// Multiplicative dual exponent of the affine hyperplane parametrized by
/// `a` in `R^n` with `s - 1` nonzero leading coefficients:
/// `max(n, (n/s) omega_0(a))`.
pub fn mult_dual_exponent_of_hyperplane(
    omega0_a: &ExtReal,
    n: u32,
    s: u32,
) -> Result<ExtReal, BoundsError> {
    const OP: &str = "mult_dual_exponent_of_hyperplane";
    if n < 2 {
        return Err(domain(OP, "n >= 2 required"));
    }
    if s < 1 || s > n {
        return Err(domain(OP, format!("s = {s} out of range [1, {n}]")));
    }
    match omega0_a {
        Extended::Infinity => Ok(Extended::Infinity),
        Extended::Finite(w) => {
            if *w < rat(1, n as i64) {
                return Err(domain(OP, format!("omega0(a) = {w} below Dirichlet floor")));
            }
            let scaled = rat(n as i64, s as i64) * w;
            Ok(Extended::Finite(int(n).max(scaled)))
        }
    }
}

/// Inhomogeneous lower bound from the uniform exponent of the transpose:
/// `omega(X, theta) >= 1 / what(tX)`. The reciprocal of `+inf` is 0 by the
/// monotone limit; the formula is never evaluated at 0 (domain error).
pub fn inhom_lower_from_uniform_transpose(uniform_transpose: &ExtReal) -> Result<ExtReal, BoundsError> {
    const OP: &str = "inhom_lower_from_uniform_transpose";
    match uniform_transpose {
        Extended::Infinity => Ok(Extended::Finite(BigRational::zero())),
        Extended::Finite(w) => {
            if w.is_zero() {
                return Err(domain(OP, "reciprocal at 0 is undefined here"));
            }
            Ok(Extended::Finite(w.recip()))
        }
    }
}

/// Two-sided bounds on the uniform simultaneous exponent from the uniform
/// dual exponent `w`: `[(w-1)/((n-1)w), (w-(n-1))/w]`. Monotone limits at
/// `+inf`: `[1/(n-1), 1]`.
///
/// Domain: `w >= n`.
pub fn uniform_sim_bounds_from_dual(
    omega_hat_dual: &ExtReal,
    n: u32,
) -> Result<BoundInterval, BoundsError> {
    const OP: &str = "uniform_sim_bounds_from_dual";
    if n < 2 {
        return Err(domain(OP, "n >= 2 required"));
    }
    match omega_hat_dual {
        Extended::Infinity => Ok(BoundInterval {
            lower: Extended::Finite(rat(1, (n - 1) as i64)),
            upper: Extended::Finite(BigRational::one()),
            vacuous_lower: false,
            provenance: vec!["uniform-dual-to-sim"],
        }),
        Extended::Finite(w) => {
            if *w < int(n) {
                return Err(domain(OP, format!("uniform dual {w} below n = {n}")));
            }
            let lower = (w - BigRational::one()) / ((int(n) - BigRational::one()) * w);
            let upper = (w - int(n - 1)) / w;
            Ok(BoundInterval {
                lower: Extended::Finite(lower),
                upper: Extended::Finite(upper),
                vacuous_lower: false,
                provenance: vec!["uniform-dual-to-sim"],
            })
        }
    }
}

/// Inhomogeneous simultaneous lower bound on a manifold with simultaneous
/// exponent `w`: `max(0, 1 - (n-1) w)`. Nontrivial only for
/// `1/n <= w <= 1/(n-1)`; at `+inf` the clamp yields 0.
pub fn inhom_sim_lower(omega0: &ExtReal, n: u32) -> Result<ExtReal, BoundsError> {
    const OP: &str = "inhom_sim_lower";
    if n < 2 {
        return Err(domain(OP, "n >= 2 required"));
    }
    match omega0 {
        Extended::Infinity => Ok(Extended::Finite(BigRational::zero())),
        Extended::Finite(w) => {
            if *w < rat(1, n as i64) {
                return Err(domain(OP, format!("omega0 = {w} below Dirichlet floor")));
            }
            let raw = BigRational::one() - (int(n) - BigRational::one()) * w;
            Ok(Extended::Finite(raw.max(BigRational::zero())))
        }
    }
}

/// Inhomogeneous dual lower bound on a manifold with dual exponent `w`:
/// `w / (w - n + 1)`. Decreases to 1 as `w -> +inf`.
///
/// Domain: `w >= n` (denominator then at least 1).
pub fn inhom_dual_lower(omega_dual: &ExtReal, n: u32) -> Result<ExtReal, BoundsError> {
    const OP: &str = "inhom_dual_lower";
    if n < 2 {
        return Err(domain(OP, "n >= 2 required"));
    }
    match omega_dual {
        Extended::Infinity => Ok(Extended::Finite(BigRational::one())),
        Extended::Finite(w) => {
            if *w < int(n) {
                return Err(domain(OP, format!("omega_dual = {w} below n = {n}")));
            }
            let lower = w / (w - int(n) + BigRational::one());
            Ok(Extended::Finite(lower))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixLowerBranch {
    /// `what(tX) <= 1`: bound `v / (nv - m + 1)`.
    HatLE1,
    /// `what(tX) >= 1` (e.g. `n >= m`): bound `m - (n-1) v`, clamped at 0.
    HatGE1,
}

/// Inhomogeneous lower bound for an `m x n` matrix exponent `v`,
/// piecewise in the uniform transposed exponent. At `v = +inf`: the
/// `HatLE1` branch tends to `1/n`, the `HatGE1` branch clamps to 0.
pub fn inhom_matrix_lower(
    v: &ExtReal,
    m: u32,
    n: u32,
    branch: MatrixLowerBranch,
) -> Result<ExtReal, BoundsError> {
    const OP: &str = "inhom_matrix_lower";
    if m < 1 || n < 1 {
        return Err(domain(OP, "m, n >= 1 required"));
    }
    match v {
        Extended::Infinity => Ok(Extended::Finite(match branch {
            MatrixLowerBranch::HatLE1 => rat(1, n as i64),
            MatrixLowerBranch::HatGE1 => BigRational::zero(),
        })),
        Extended::Finite(w) => {
            if *w < rat(m as i64, n as i64) {
                return Err(domain(OP, format!("v = {w} below Dirichlet floor m/n")));
            }
            match branch {
                MatrixLowerBranch::HatLE1 => {
                    let den = int(n) * w - int(m) + BigRational::one();
                    if den <= BigRational::zero() {
                        return Err(domain(OP, "denominator nv - m + 1 not positive"));
                    }
                    Ok(Extended::Finite((w / den).max(BigRational::zero())))
                }
                MatrixLowerBranch::HatGE1 => {
                    let raw = int(m) - (int(n) - BigRational::one()) * w;
                    Ok(Extended::Finite(raw.max(BigRational::zero())))
                }
            }
        }
    }
}

/// Multiplicative inhomogeneous lower bound (simultaneous side):
/// `max(0, (1 - (n-1) w) / (n w))` with `w` the multiplicative simultaneous
/// exponent. Clamps to 0 at `+inf`.
pub fn inhom_mult_lower_sim(omega0x: &ExtReal, n: u32) -> Result<ExtReal, BoundsError> {
    const OP: &str = "inhom_mult_lower_sim";
    if n < 2 {
        return Err(domain(OP, "n >= 2 required"));
    }
    match omega0x {
        Extended::Infinity => Ok(Extended::Finite(BigRational::zero())),
        Extended::Finite(w) => {
            if *w < rat(1, n as i64) {
                return Err(domain(OP, format!("omega0x = {w} below Dirichlet floor")));
            }
            let raw = (BigRational::one() - (int(n) - BigRational::one()) * w) / (int(n) * w);
            Ok(Extended::Finite(raw.max(BigRational::zero())))
        }
    }
}

/// Multiplicative inhomogeneous lower bound (dual side):
/// `n / (w - (n-1))` with `w` the multiplicative dual exponent. Tends to 0
/// at `+inf`.
///
/// Domain: `w >= n`.
pub fn inhom_mult_lower_dual(omega_dualx: &ExtReal, n: u32) -> Result<ExtReal, BoundsError> {
    const OP: &str = "inhom_mult_lower_dual";
    if n < 2 {
        return Err(domain(OP, "n >= 2 required"));
    }
    match omega_dualx {
        Extended::Infinity => Ok(Extended::Finite(BigRational::zero())),
        Extended::Finite(w) => {
            if *w < int(n) {
                return Err(domain(OP, format!("omega_dualx = {w} below n")));
            }
            let den = w - int(n - 1);
            if den <= BigRational::zero() {
                return Err(domain(OP, "denominator w - (n-1) not positive"));
            }
            Ok(Extended::Finite(int(n) / den))
        }
    }
}

/// Multiplicative uniform upper transference:
/// `what_x(X) <= (m w - n + 1) / (n - (m-1) w)` with `w = what_x(tX)`.
/// The bound is vacuous (domain error) when the denominator is not positive.
pub fn mult_uniform_upper_from_transpose(
    uniform_mult_transpose: &ExtReal,
    m: u32,
    n: u32,
) -> Result<ExtReal, BoundsError> {
    const OP: &str = "mult_uniform_upper_from_transpose";
    if m < 1 || n < 1 {
        return Err(domain(OP, "m, n >= 1 required"));
    }
    match uniform_mult_transpose {
        Extended::Infinity => Err(domain(OP, "bound vacuous at +inf")),
        Extended::Finite(w) => {
            let den = int(n) - (int(m) - BigRational::one()) * w;
            if den <= BigRational::zero() {
                return Err(domain(OP, "denominator n - (m-1) w not positive (bound vacuous)"));
            }
            let num = int(m) * w - int(n) + BigRational::one();
            Ok(Extended::Finite(num / den))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SandwichTarget {
    /// `omega_0(x, theta)` from the dual exponent of `a` in `R^(n-1)`.
    SimInhom,
    /// `omega_{n-1}(x, theta)` from the simultaneous exponent of `a`;
    /// the printed lower branch carries the caller-supplied `s`.
    DualInhom,
    /// Multiplicative `omega_{n-1}x(x, theta)` from `omega_0(a)`, `a` in
    /// `R^n`, with `s - 1` the count of nonzero leading coefficients.
    DualMultInhom,
}

/// The sandwich intervals for inhomogeneous hyperplane exponents, evaluated
/// verbatim from the printed formulas in exact rational arithmetic.
///
/// `SimInhom` needs no `s`. For `DualInhom` the printed lower branch uses an
/// `s` that the source only defines in the multiplicative setting; it is a
/// required explicit parameter here and no interpretation is guessed. When a
/// lower-branch denominator is not positive the lower endpoint is the
/// trivial floor 0 and the interval is flagged `vacuous_lower`. There is no
/// Dirichlet floor for inhomogeneous exponents, so no other clamping is
/// applied.
pub fn sandwich_hyperplane(
    input: &ExtReal,
    n: u32,
    s: Option<u32>,
    target: SandwichTarget,
) -> Result<BoundInterval, BoundsError> {
    const OP: &str = "sandwich_hyperplane";
    if n < 2 {
        return Err(domain(OP, "n >= 2 required"));
    }
    match target {
        SandwichTarget::SimInhom => {
            // [min(1/n, n/(n+(n-1)w)), max(1/n, w/(n+(n-1)w))]
            let dirichlet = rat(1, n as i64);
            let (lower, upper) = match input {
                Extended::Infinity => (BigRational::zero(), rat(1, (n - 1) as i64)),
                Extended::Finite(w) => {
                    if *w < int(n - 1) {
                        return Err(domain(OP, format!("omega_dual(a) = {w} below Dirichlet floor")));
                    }
                    let den = int(n) + (int(n) - BigRational::one()) * w;
                    (
                        dirichlet.clone().min(int(n) / den.clone()),
                        dirichlet.clone().max(w / den),
                    )
                }
            };
            Ok(BoundInterval {
                lower: Extended::Finite(lower),
                upper: Extended::Finite(upper),
                vacuous_lower: false,
                provenance: vec![
                    "hyperplane-sim-formula",
                    "inhom-upper-manifold",
                    "inhom-sim-lower-chain",
                ],
            })
        }
        SandwichTarget::DualInhom => {
            // [min(n, ns/(n w - s(n-1))), max(n, w/(w - n + 1))]
            let s = s.ok_or_else(|| domain(OP, "s required for the dual lower branch"))?;
            if s < 1 || s > n {
                return Err(domain(OP, format!("s = {s} out of range [1, {n}]")));
            }
            match input {
                Extended::Infinity => Ok(BoundInterval {
                    lower: Extended::Finite(BigRational::zero()),
                    upper: Extended::Finite(int(n)),
                    vacuous_lower: false,
                    provenance: vec!["hyperplane-dual-formula", "inhom-dual-lower-chain"],
                }),
                Extended::Finite(w) => {
                    if *w < rat(1, (n - 1) as i64) {
                        return Err(domain(OP, format!("omega0(a) = {w} below Dirichlet floor")));
                    }
                    let upper_den = w - int(n) + BigRational::one();
                    let upper = if upper_den <= BigRational::zero() {
                        // upper branch blows up; max(n, .) is +inf in the limit
                        Extended::Infinity
                    } else {
                        Extended::Finite(int(n).max(w / upper_den))
                    };
                    let lower_den = int(n) * w - int(s) * (int(n) - BigRational::one());
                    let (lower, vacuous) = if lower_den <= BigRational::zero() {
                        (BigRational::zero(), true)
                    } else {
                        (int(n).min(int(n) * int(s) / lower_den), false)
                    };
                    Ok(BoundInterval {
                        lower: Extended::Finite(lower),
                        upper,
                        vacuous_lower: vacuous,
                        provenance: vec!["hyperplane-dual-formula", "inhom-dual-lower-chain"],
                    })
                }
            }
        }
        SandwichTarget::DualMultInhom => {
            // [min(n, ns/(n w - (n-1)s)), max(n, (n/s) w)]
            let s = s.ok_or_else(|| domain(OP, "s required for the multiplicative sandwich"))?;
            if s < 1 || s > n {
                return Err(domain(OP, format!("s = {s} out of range [1, {n}]")));
            }
            match input {
                Extended::Infinity => Ok(BoundInterval {
                    lower: Extended::Finite(BigRational::zero()),
                    upper: Extended::Infinity,
                    vacuous_lower: false,
                    provenance: vec!["hyperplane-mult-formula", "inhom-mult-lower-chain"],
                }),
                Extended::Finite(w) => {
                    if *w < rat(1, n as i64) {
                        return Err(domain(OP, format!("omega0(a) = {w} below Dirichlet floor")));
                    }
                    let upper = int(n).max(rat(n as i64, s as i64) * w);
                    let lower_den = int(n) * w - (int(n) - BigRational::one()) * int(s);
                    let (lower, vacuous) = if lower_den <= BigRational::zero() {
                        (BigRational::zero(), true)
                    } else {
                        (int(n).min(int(n) * int(s) / lower_den), false)
                    };
                    Ok(BoundInterval {
                        lower: Extended::Finite(lower),
                        upper: Extended::Finite(upper),
                        vacuous_lower: vacuous,
                        provenance: vec!["hyperplane-mult-formula", "inhom-mult-lower-chain"],
                    })
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::big_rational;

    fn fin(n: i64, d: i64) -> ExtReal {
        Extended::Finite(big_rational(n, d))
    }

    #[test]
    fn dual_hyperplane_examples() {
        assert_eq!(dual_exponent_of_hyperplane(&fin(5, 1), 2).unwrap(), fin(5, 1));
        assert_eq!(dual_exponent_of_hyperplane(&fin(1, 2), 3).unwrap(), fin(3, 1));
        assert_eq!(
            dual_exponent_of_hyperplane(&Extended::Infinity, 2).unwrap(),
            Extended::Infinity
        );
        assert!(dual_exponent_of_hyperplane(&fin(1, 10), 3).is_err());
    }

    #[test]
    fn sim_hyperplane_examples() {
        assert_eq!(sim_exponent_of_hyperplane(&fin(4, 1), 2).unwrap(), fin(2, 3));
        // extremal hyperplane: collapses to the Dirichlet value
        assert_eq!(sim_exponent_of_hyperplane(&fin(1, 1), 2).unwrap(), fin(1, 2));
        // monotone limit at infinity equals 1/(n-1); checked numerically
        let mut prev = big_rational(0, 1);
        for w in [10i64, 100, 1000, 100000] {
            let v = match sim_exponent_of_hyperplane(&fin(w, 1), 3).unwrap() {
                Extended::Finite(v) => v,
                _ => unreachable!(),
            };
            assert!(v >= prev);
            prev = v;
        }
        assert!(big_rational(1, 2) - prev < big_rational(1, 1000));
        assert_eq!(
            sim_exponent_of_hyperplane(&Extended::Infinity, 3).unwrap(),
            fin(1, 2)
        );
    }

    #[test]
    fn mult_hyperplane_examples() {
        assert_eq!(
            mult_dual_exponent_of_hyperplane(&fin(4, 1), 3, 2).unwrap(),
            fin(6, 1)
        );
        assert_eq!(
            mult_dual_exponent_of_hyperplane(&fin(1, 3), 3, 3).unwrap(),
            fin(3, 1)
        );
        assert_eq!(
            mult_dual_exponent_of_hyperplane(&fin(2, 1), 2, 1).unwrap(),
            fin(4, 1)
        );
        assert!(mult_dual_exponent_of_hyperplane(&fin(2, 1), 3, 0).is_err());
        assert!(mult_dual_exponent_of_hyperplane(&fin(2, 1), 3, 4).is_err());
    }

    #[test]
    fn reciprocal_lower_examples() {
        assert_eq!(inhom_lower_from_uniform_transpose(&fin(2, 1)).unwrap(), fin(1, 2));
        assert_eq!(inhom_lower_from_uniform_transpose(&fin(1, 1)).unwrap(), fin(1, 1));
        assert_eq!(
            inhom_lower_from_uniform_transpose(&Extended::Infinity).unwrap(),
            fin(0, 1)
        );
        assert!(inhom_lower_from_uniform_transpose(&fin(0, 1)).is_err());
    }

    #[test]
    fn uniform_sim_bounds_examples() {
        // Dirichlet point collapses the interval
        let b = uniform_sim_bounds_from_dual(&fin(2, 1), 2).unwrap();
        assert_eq!(b.lower, fin(1, 2));
        assert_eq!(b.upper, fin(1, 2));
        let b = uniform_sim_bounds_from_dual(&fin(3, 1), 3).unwrap();
        assert_eq!(b.lower, fin(1, 3));
        assert_eq!(b.upper, fin(1, 3));
        let b = uniform_sim_bounds_from_dual(&fin(4, 1), 3).unwrap();
        assert_eq!(b.lower, fin(3, 8));
        assert_eq!(b.upper, fin(1, 2));
        assert!(uniform_sim_bounds_from_dual(&fin(3, 2), 2).is_err());
    }

    #[test]
    fn manifold_lower_examples() {
        assert_eq!(inhom_sim_lower(&fin(1, 2), 2).unwrap(), fin(1, 2));
        assert_eq!(inhom_dual_lower(&fin(2, 1), 2).unwrap(), fin(2, 1));
        // boundary of usefulness: clamps to zero
        assert_eq!(inhom_sim_lower(&fin(1, 2), 3).unwrap(), fin(0, 1));
        assert_eq!(inhom_dual_lower(&Extended::Infinity, 4).unwrap(), fin(1, 1));
    }

    #[test]
    fn matrix_lower_examples() {
        // extremal collapse recovers m/n on the HatGE1 branch
        assert_eq!(
            inhom_matrix_lower(&fin(2, 3), 2, 3, MatrixLowerBranch::HatGE1).unwrap(),
            fin(2, 3)
        );
        assert_eq!(
            inhom_matrix_lower(&fin(1, 1), 2, 2, MatrixLowerBranch::HatLE1).unwrap(),
            fin(1, 1)
        );
        // v = m/(n-1) lands exactly at zero on the GE1 branch
        assert_eq!(
            inhom_matrix_lower(&fin(1, 1), 1, 2, MatrixLowerBranch::HatGE1).unwrap(),
            fin(0, 1)
        );
    }

    #[test]
    fn mult_lower_examples() {
        assert_eq!(inhom_mult_lower_sim(&fin(1, 2), 2).unwrap(), fin(1, 2));
        assert_eq!(inhom_mult_lower_dual(&fin(2, 1), 2).unwrap(), fin(2, 1));
        assert_eq!(inhom_mult_lower_dual(&fin(4, 1), 3).unwrap(), fin(3, 2));
    }

    #[test]
    fn mult_uniform_upper_examples() {
        assert_eq!(
            mult_uniform_upper_from_transpose(&fin(2, 1), 1, 2).unwrap(),
            fin(1, 2)
        );
        assert_eq!(
            mult_uniform_upper_from_transpose(&fin(1, 1), 2, 2).unwrap(),
            fin(1, 1)
        );
        // vacuous-bound boundary: denominator hits zero
        let err = mult_uniform_upper_from_transpose(&fin(3, 1), 2, 3).unwrap_err();
        assert!(matches!(err, BoundsError::Domain { .. }));
    }

    #[test]
    fn sandwich_sim_examples() {
        let b = sandwich_hyperplane(&fin(4, 1), 2, None, SandwichTarget::SimInhom).unwrap();
        assert_eq!(b.lower, fin(1, 3));
        assert_eq!(b.upper, fin(2, 3));
        // extremal collapse: both endpoints 1/n
        let b = sandwich_hyperplane(&fin(1, 1), 2, None, SandwichTarget::SimInhom).unwrap();
        assert_eq!(b.lower, fin(1, 2));
        assert_eq!(b.upper, fin(1, 2));
    }

    #[test]
    fn sandwich_dual_mult_example() {
        // n=3, s=2, omega0(a)=4: lower min(3, 6/8) = 3/4, upper max(3, 6) = 6.
        // No Dirichlet clamp applies to inhomogeneous exponents, so the
        // lower endpoint stands and no vacuous flag is raised.
        let b = sandwich_hyperplane(&fin(4, 1), 3, Some(2), SandwichTarget::DualMultInhom).unwrap();
        assert_eq!(b.lower, fin(3, 4));
        assert_eq!(b.upper, fin(6, 1));
        assert!(!b.vacuous_lower);
    }

    #[test]
    fn sandwich_lower_le_upper_on_grid() {
        // SimInhom: lower <= 1/n <= upper over a rational grid of inputs.
        for n in 2u32..=5 {
            let dirichlet = big_rational(1, n as i64);
            let mut w = big_rational((n - 1) as i64, 1);
            for _ in 0..60 {
                let b = sandwich_hyperplane(
                    &Extended::Finite(w.clone()),
                    n,
                    None,
                    SandwichTarget::SimInhom,
                )
                .unwrap();
                let lo = b.lower.as_finite().unwrap().clone();
                let hi = b.upper.as_finite().unwrap().clone();
                assert!(lo <= dirichlet && dirichlet <= hi, "n={n} w={w}");
                w += big_rational(1, 2);
            }
        }
    }

    #[test]
    fn monotonicity_grids() {
        // nondecreasing maps along growing inputs
        for n in 2u32..=6 {
            let mut prev_sim: Option<BigRational> = None;
            let mut prev_dual: Option<BigRational> = None;
            let mut w = big_rational((n - 1) as i64, 1).max(big_rational(1, (n - 1) as i64));
            for _ in 0..80 {
                if let Ok(Extended::Finite(v)) =
                    sim_exponent_of_hyperplane(&Extended::Finite(w.clone()), n)
                {
                    if let Some(p) = prev_sim.replace(v.clone()) {
                        assert!(v >= p);
                    }
                }
                if let Ok(Extended::Finite(v)) =
                    dual_exponent_of_hyperplane(&Extended::Finite(w.clone()), n)
                {
                    if let Some(p) = prev_dual.replace(v.clone()) {
                        assert!(v >= p);
                    }
                }
                w += big_rational(1, 3);
            }
        }
        // mult uniform upper nondecreasing on its domain
        for (m, n) in [(1u32, 2u32), (2, 3), (2, 2)] {
            let mut prev: Option<BigRational> = None;
            let mut w = big_rational(n as i64, m as i64);
            loop {
                match mult_uniform_upper_from_transpose(&Extended::Finite(w.clone()), m, n) {
                    Ok(Extended::Finite(v)) => {
                        if let Some(p) = prev.replace(v.clone()) {
                            assert!(v >= p, "m={m} n={n} w={w}");
                        }
                    }
                    _ => break,
                }
                w += big_rational(1, 7);
                if w > big_rational(40, 1) {
                    break;
                }
            }
        }
    }

    #[test]
    fn composition_consistency() {
        // Feeding the hyperplane dual formula into the dual lower bound
        // reproduces w/(w-n+1) for w >= n.
        for n in 2u32..=5 {
            let mut w = big_rational(n as i64, 1);
            for _ in 0..40 {
                let hyper = dual_exponent_of_hyperplane(&Extended::Finite(w.clone()), n).unwrap();
                let chained = inhom_dual_lower(&hyper, n).unwrap();
                let direct = inhom_dual_lower(&Extended::Finite(w.clone()), n).unwrap();
                assert_eq!(chained, direct);
                w += big_rational(2, 5);
            }
        }
    }

    #[test]
    fn extremal_collapse_grid() {
        // Dirichlet inputs collapse every lower/upper pair onto the
        // Dirichlet value, for n in 2..=6, m in 1..=4.
        for n in 2u32..=6 {
            let dial = big_rational(1, n as i64);
            assert_eq!(inhom_sim_lower(&Extended::Finite(dial.clone()), n).unwrap(), Extended::Finite(dial.clone()));
            let dual = big_rational(n as i64, 1);
            assert_eq!(
                inhom_dual_lower(&Extended::Finite(dual.clone()), n).unwrap(),
                Extended::Finite(dual.clone())
            );
            assert_eq!(
                inhom_mult_lower_sim(&Extended::Finite(dial.clone()), n).unwrap(),
                Extended::Finite(dial)
            );
            assert_eq!(
                inhom_mult_lower_dual(&Extended::Finite(dual.clone()), n).unwrap(),
                Extended::Finite(dual)
            );
            for m in 1u32..=4 {
                let v = big_rational(m as i64, n as i64);
                for branch in [MatrixLowerBranch::HatLE1, MatrixLowerBranch::HatGE1] {
                    let got = inhom_matrix_lower(&Extended::Finite(v.clone()), m, n, branch)
                        .unwrap();
                    assert_eq!(got, Extended::Finite(v.clone()), "m={m} n={n} {branch:?}");
                }
                let hat = big_rational(n as i64, m as i64);
                if let Ok(Extended::Finite(up)) =
                    mult_uniform_upper_from_transpose(&Extended::Finite(hat), m, n)
                {
                    assert_eq!(up, v, "mult upper collapse m={m} n={n}");
                }
            }
        }
    }
}

//! Matrices with exact or tracked-precision entries, integer vectors and
//! target shifts. Only the affine evaluations the experiments need are
//! provided; this is not a general linear-algebra layer.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::num::{Ball, Real};

/// An `m x n` real matrix in row-major order. All values are immutable;
/// instances are freely shared between threads.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    m: usize,
    n: usize,
    entries: Vec<Real>,
}

impl RealMatrix {
    pub fn new(m: usize, n: usize, entries: Vec<Real>) -> RealMatrix {
        assert!(m > 0 && n > 0, "matrix dimensions must be positive");
        assert_eq!(entries.len(), m * n, "entry count must equal m*n");
        RealMatrix { m, n, entries }
    }

    pub fn from_rationals(m: usize, n: usize, entries: Vec<BigRational>) -> RealMatrix {
        RealMatrix::new(m, n, entries.into_iter().map(Real::Rational).collect())
    }

    /// A 1x1 matrix.
    pub fn scalar(x: Real) -> RealMatrix {
        RealMatrix::new(1, 1, vec![x])
    }

    /// The column matrix of a vector (simultaneous-approximation shape).
    pub fn column(x: Vec<Real>) -> RealMatrix {
        let m = x.len();
        RealMatrix::new(m, 1, x)
    }

    /// The row matrix of a vector (dual/linear-form shape).
    pub fn row(x: Vec<Real>) -> RealMatrix {
        let n = x.len();
        RealMatrix::new(1, n, x)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &Real {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Real] {
        &self.entries
    }

    pub fn row_entries(&self, i: usize) -> &[Real] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> RealMatrix {
        let mut out = Vec::with_capacity(self.m * self.n);
        for j in 0..self.n {
            for i in 0..self.m {
                out.push(self.entry(i, j).clone());
            }
        }
        RealMatrix::new(self.n, self.m, out)
    }

    /// Exact rational view of all entries, if available.
    pub fn as_rational(&self) -> Option<Vec<BigRational>> {
        self.entries.iter().map(|e| e.as_rational()).collect()
    }

    pub fn is_rational(&self) -> bool {
        self.entries.iter().all(|e| e.is_rational())
    }

    /// Enclose every entry at `prec` bits.
    pub fn eval(&self, prec: u32) -> Vec<Ball> {
        self.entries.iter().map(|e| e.eval(prec)).collect()
    }
}

/// An integer vector with exact sup-norm arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntVector(pub Vec<BigInt>);

impl IntVector {
    pub fn zeros(len: usize) -> IntVector {
        IntVector(vec![BigInt::zero(); len])
    }

    pub fn from_i64(entries: &[i64]) -> IntVector {
        IntVector(entries.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|v| v.is_zero())
    }

    /// `|q| = max_i |q_i|`.
    pub fn sup_norm(&self) -> BigInt {
        self.0
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// `prod_i max(1, |q_i|)`.
    pub fn plus_product(&self) -> BigInt {
        crate::num::reduce::plus_product(&self.0)
    }

    pub fn negated(&self) -> IntVector {
        IntVector(self.0.iter().map(|v| -v).collect())
    }

    /// Sign of the first nonzero coordinate: +1, -1, or 0 for the zero vector.
    pub fn leading_sign(&self) -> i8 {
        for v in &self.0 {
            if v.is_positive() {
                return 1;
            }
            if v.is_negative() {
                return -1;
            }
        }
        0
    }

    pub fn render(&self) -> String {
        self.0
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// The shift vector `theta` of an inhomogeneous problem; its length must
/// equal the row count of the matrix it shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetShift(pub Vec<Real>);

impl TargetShift {
    pub fn zero(m: usize) -> TargetShift {
        TargetShift(vec![Real::zero(); m])
    }

    pub fn from_rationals(v: Vec<BigRational>) -> TargetShift {
        TargetShift(v.into_iter().map(Real::Rational).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0
            .iter()
            .all(|t| t.as_rational().map(|r| r.is_zero()).unwrap_or(false))
    }

    pub fn as_rational(&self) -> Option<Vec<BigRational>> {
        self.0.iter().map(|e| e.as_rational()).collect()
    }

    /// True when `2*theta` is integral componentwise, in which case
    /// `||Xq + theta||` is symmetric under `q -> -q`.
    pub fn is_half_integral(&self) -> bool {
        self.0.iter().all(|t| match t.as_rational() {
            Some(r) => (r + r.clone()).is_integer(),
            None => false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::big_rational;

    #[test]
    fn matrix_shapes() {
        let x = RealMatrix::from_rationals(
            2,
            3,
            vec![
                big_rational(1, 2),
                big_rational(1, 3),
                big_rational(1, 5),
                big_rational(2, 7),
                big_rational(0, 1),
                big_rational(-1, 4),
            ],
        );
        assert_eq!(x.rows(), 2);
        assert_eq!(x.cols(), 3);
        assert_eq!(x.entry(1, 2).as_rational().unwrap(), big_rational(-1, 4));
        let t = x.transpose();
        assert_eq!(t.rows(), 3);
        assert_eq!(t.entry(2, 1).as_rational().unwrap(), big_rational(-1, 4));
        assert!(x.is_rational());
    }

    #[test]
    fn int_vector_norms() {
        let q = IntVector::from_i64(&[2, -3, 0]);
        assert_eq!(q.sup_norm(), BigInt::from(3));
        assert_eq!(q.plus_product(), BigInt::from(6));
        assert_eq!(q.leading_sign(), 1);
        assert_eq!(IntVector::from_i64(&[0, -2]).leading_sign(), -1);
        assert!(IntVector::zeros(3).is_zero());
    }

    #[test]
    fn shift_half_integrality() {
        assert!(TargetShift::from_rationals(vec![big_rational(1, 2), big_rational(-3, 1)])
            .is_half_integral());
        assert!(!TargetShift::from_rationals(vec![big_rational(1, 3)]).is_half_integral());
        assert!(TargetShift(vec![Real::golden_ratio()]).is_half_integral() == false);
    }
}

//! Objective evaluation kernels.
//!
//! Three regimes: an `i128` modular kernel for rational inputs with small
//! common denominators (the hot path of exhaustive scans), an exact
//! big-rational kernel, and a ball kernel for irrational inputs. Witness
//! values re-evaluate bit-for-bit because every kernel derives them from the
//! same row data.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::matrix::{IntVector, RealMatrix, TargetShift};
use crate::num::reduce::{nearest_integer_distance, round_half_up};
use crate::num::{Ball, Decision, Real};

/// A certified objective value: exact rational, or a ball at the precision
/// that decided the search.
#[derive(Debug, Clone)]
pub enum ScalarValue {
    Exact(BigRational),
    Approx { ball: Ball, bits: u32 },
}

impl ScalarValue {
    pub fn is_exact_zero(&self) -> bool {
        match self {
            ScalarValue::Exact(v) => v.is_zero(),
            ScalarValue::Approx { .. } => false,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ScalarValue::Exact(v) => v.to_f64().unwrap_or(f64::NAN),
            ScalarValue::Approx { ball, .. } => ball.to_f64(),
        }
    }

    /// `log2` of the value; `-inf` at zero. Stable far outside `f64` range.
    pub fn log2(&self) -> f64 {
        match self {
            ScalarValue::Exact(v) => {
                if v.is_zero() {
                    f64::NEG_INFINITY
                } else {
                    crate::num::log2_rational(&v.abs())
                }
            }
            ScalarValue::Approx { ball, .. } => ball.log2_abs_mid(),
        }
    }

    /// Order used by the running-minimum normalization: exact where
    /// possible, midpoint order otherwise (diagnostic sequences only).
    pub fn le_for_running_min(&self, other: &ScalarValue) -> bool {
        match (self, other) {
            (ScalarValue::Exact(a), ScalarValue::Exact(b)) => a <= b,
            _ => self.log2() <= other.log2(),
        }
    }

    pub fn render(&self) -> String {
        match self {
            ScalarValue::Exact(v) => crate::num::render_rational(v),
            ScalarValue::Approx { ball, bits } => {
                format!("~2^{:.3}@{}b", ball.log2_abs_mid(), bits)
            }
        }
    }
}

/// Row data in the `i128` modular kernel: the row value for integer `q` is
/// `dist(sum_i coeffs[i] q_i + shift mod den, 0 mod den) / den`.
#[derive(Debug, Clone)]
pub struct IntRow {
    pub coeffs: Vec<i128>,
    pub shift: i128,
    pub den: i128,
}

impl IntRow {
    /// Residue of the row form at `q`, in `[0, den)`.
    #[inline]
    pub fn residue(&self, q: &[i64]) -> i128 {
        let mut acc: i128 = self.shift;
        for (c, &qi) in self.coeffs.iter().zip(q) {
            acc += c * qi as i128;
            acc %= self.den;
        }
        acc.rem_euclid(self.den)
    }

    /// Numerator of the distance to the nearest integer (denominator `den`).
    #[inline]
    pub fn dist_num(&self, residue: i128) -> i128 {
        residue.min(self.den - residue)
    }
}

#[derive(Debug)]
pub struct IntKernel {
    pub rows: Vec<IntRow>,
}

/// Bound that keeps every cross-multiplied comparison inside `i128`.
const INT_KERNEL_DEN_LIMIT: i128 = 1 << 56;

impl IntKernel {
    pub fn build(x: &[BigRational], theta: &[BigRational], m: usize, n: usize) -> Option<IntKernel> {
        let mut rows = Vec::with_capacity(m);
        for j in 0..m {
            let mut den = theta[j].denom().clone();
            for i in 0..n {
                den = num_integer::lcm(den, x[j * n + i].denom().clone());
            }
            let den_i = den.to_i128()?;
            if den_i <= 0 || den_i > INT_KERNEL_DEN_LIMIT {
                return None;
            }
            let mut coeffs = Vec::with_capacity(n);
            for i in 0..n {
                let e = &x[j * n + i];
                let c = (e.numer() * (&den / e.denom())).to_i128()?;
                coeffs.push(c.rem_euclid(den_i));
            }
            let shift = (theta[j].numer() * (&den / theta[j].denom())).to_i128()?;
            rows.push(IntRow {
                coeffs,
                shift: shift.rem_euclid(den_i),
                den: den_i,
            });
        }
        Some(IntKernel { rows })
    }

    /// Exact rational value of the sup-norm objective at `q`.
    pub fn supnorm_value(&self, q: &[i64]) -> BigRational {
        let mut best = BigRational::zero();
        for row in &self.rows {
            let r = row.residue(q);
            let v = BigRational::new(BigInt::from(row.dist_num(r)), BigInt::from(row.den));
            if v > best {
                best = v;
            }
        }
        best
    }

    pub fn mult_value(&self, q: &[i64]) -> BigRational {
        let mut acc = BigRational::one();
        for row in &self.rows {
            let r = row.residue(q);
            acc *= BigRational::new(BigInt::from(row.dist_num(r)), BigInt::from(row.den));
        }
        acc
    }
}

/// Exact big-rational kernel.
#[derive(Debug)]
pub struct RatKernel {
    pub m: usize,
    pub n: usize,
    pub x: Vec<BigRational>,
    pub theta: Vec<BigRational>,
}

impl RatKernel {
    pub fn row_value(&self, j: usize, q: &[BigInt]) -> BigRational {
        let mut acc = self.theta[j].clone();
        for (i, qi) in q.iter().enumerate() {
            if !qi.is_zero() {
                acc += &self.x[j * self.n + i] * BigRational::from_integer(qi.clone());
            }
        }
        acc
    }

    pub fn supnorm_value(&self, q: &[BigInt]) -> BigRational {
        (0..self.m)
            .map(|j| nearest_integer_distance(&self.row_value(j, q)))
            .max()
            .expect("at least one row")
    }

    pub fn mult_value(&self, q: &[BigInt]) -> BigRational {
        let mut acc = BigRational::one();
        for j in 0..self.m {
            acc *= nearest_integer_distance(&self.row_value(j, q));
        }
        acc
    }

    pub fn realizing_p(&self, q: &[BigInt]) -> IntVector {
        IntVector(
            (0..self.m)
                .map(|j| -round_half_up(&self.row_value(j, q)))
                .collect(),
        )
    }
}

/// Ball kernel at a fixed working precision.
#[derive(Debug)]
pub struct BallKernel {
    pub m: usize,
    pub n: usize,
    pub bits: u32,
    pub x: Vec<Ball>,
    pub theta: Vec<Ball>,
}

impl BallKernel {
    pub fn build(x: &RealMatrix, theta: &TargetShift, bits: u32) -> BallKernel {
        BallKernel {
            m: x.rows(),
            n: x.cols(),
            bits,
            x: x.eval(bits),
            theta: theta.0.iter().map(|t| t.eval(bits)).collect(),
        }
    }

    pub fn row_ball(&self, j: usize, q: &[BigInt]) -> Ball {
        let mut acc = self.theta[j].clone();
        for (i, qi) in q.iter().enumerate() {
            if !qi.is_zero() {
                acc = acc.add(&self.x[j * self.n + i].mul_bigint(qi), self.bits);
            }
        }
        acc
    }

    pub fn supnorm_ball(&self, q: &[BigInt]) -> Ball {
        // max over rows lies in [max of lowers, max of uppers]
        let mut lo: Option<crate::num::Dyadic> = None;
        let mut hi: Option<crate::num::Dyadic> = None;
        for j in 0..self.m {
            let d = self.row_ball(j, q).dist_nearest_int();
            let (l, u) = (d.lower(), d.upper());
            lo = Some(match lo {
                None => l,
                Some(prev) => {
                    if prev.cmp(&l) == std::cmp::Ordering::Less {
                        l
                    } else {
                        prev
                    }
                }
            });
            hi = Some(match hi {
                None => u,
                Some(prev) => {
                    if prev.cmp(&u) == std::cmp::Ordering::Less {
                        u
                    } else {
                        prev
                    }
                }
            });
        }
        Ball::from_bounds(lo.unwrap(), hi.unwrap())
    }

    pub fn mult_ball(&self, q: &[BigInt]) -> Ball {
        let mut acc: Option<Ball> = None;
        for j in 0..self.m {
            let d = self.row_ball(j, q).dist_nearest_int();
            acc = Some(match acc {
                None => d,
                Some(a) => a.mul(&d, self.bits),
            });
        }
        acc.expect("at least one row")
    }

    pub fn realizing_p(&self, q: &[BigInt]) -> IntVector {
        IntVector(
            (0..self.m)
                .map(|j| -self.row_ball(j, q).nearest_int())
                .collect(),
        )
    }
}

/// Evaluation backend chosen from the input matrix.
pub enum Kernel {
    Int(IntKernel, RatKernel),
    Rat(RatKernel),
    Ball(BallKernel),
}

impl Kernel {
    pub fn build(x: &RealMatrix, theta: &TargetShift, bits: u32) -> Kernel {
        if let (Some(xr), Some(tr)) = (x.as_rational(), theta.as_rational()) {
            let rat = RatKernel {
                m: x.rows(),
                n: x.cols(),
                x: xr.clone(),
                theta: tr.clone(),
            };
            if let Some(ik) = IntKernel::build(&xr, &tr, x.rows(), x.cols()) {
                return Kernel::Int(ik, rat);
            }
            return Kernel::Rat(rat);
        }
        Kernel::Ball(BallKernel::build(x, theta, bits))
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Kernel::Ball(_))
    }

    /// Objective value at `q` (exact kernels yield `ScalarValue::Exact`).
    pub fn value(&self, q: &[BigInt], objective: super::Objective) -> ScalarValue {
        match self {
            Kernel::Int(_, rat) | Kernel::Rat(rat) => ScalarValue::Exact(match objective {
                super::Objective::SupNorm => rat.supnorm_value(q),
                super::Objective::Multiplicative => rat.mult_value(q),
            }),
            Kernel::Ball(b) => ScalarValue::Approx {
                ball: match objective {
                    super::Objective::SupNorm => b.supnorm_ball(q),
                    super::Objective::Multiplicative => b.mult_ball(q),
                },
                bits: b.bits,
            },
        }
    }

    pub fn realizing_p(&self, q: &[BigInt]) -> IntVector {
        match self {
            Kernel::Int(_, rat) | Kernel::Rat(rat) => rat.realizing_p(q),
            Kernel::Ball(b) => b.realizing_p(q),
        }
    }

    /// Three-valued strict comparison of two candidate values.
    pub fn value_lt(a: &ScalarValue, b: &ScalarValue) -> Decision {
        match (a, b) {
            (ScalarValue::Exact(x), ScalarValue::Exact(y)) => {
                if x < y {
                    Decision::True
                } else {
                    Decision::False
                }
            }
            (ScalarValue::Approx { ball: x, .. }, ScalarValue::Approx { ball: y, .. }) => x.lt(y),
            (ScalarValue::Exact(x), ScalarValue::Approx { ball: y, .. }) => {
                Ball::exact_rational_cmp(x, y).map(|o| match o {
                    std::cmp::Ordering::Less => Decision::True,
                    _ => Decision::False,
                }).unwrap_or(Decision::Undecided)
            }
            (ScalarValue::Approx { ball: x, .. }, ScalarValue::Exact(y)) => {
                Ball::exact_rational_cmp(y, x).map(|o| match o {
                    std::cmp::Ordering::Greater => Decision::True,
                    _ => Decision::False,
                }).unwrap_or(Decision::Undecided)
            }
        }
    }
}

impl Ball {
    /// Compare a rational against a ball, if the ball separates it.
    pub fn exact_rational_cmp(v: &BigRational, b: &Ball) -> Option<std::cmp::Ordering> {
        let lo = b.lower().to_rational();
        let hi = b.upper().to_rational();
        if *v < lo {
            Some(std::cmp::Ordering::Less)
        } else if *v > hi {
            Some(std::cmp::Ordering::Greater)
        } else if b.is_exact() && *v == lo {
            Some(std::cmp::Ordering::Equal)
        } else {
            None
        }
    }
}

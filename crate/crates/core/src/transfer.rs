//! The weighted-time scaffolding: the index set `T`, diagonal flows `g_t`,
//! affine lattice maps, shrinking-target membership tests and the two
//! reduction steps that connect approximation witnesses to flow language.
//!
//! Membership tests against thresholds of the form `c * 2^r` (rational `c`,
//! rational `r`) reduce to exact integer comparisons whenever the matrix and
//! shift are rational, so every check in this module is zero-tolerance on
//! rational fixtures; irrational inputs fall back to ball arithmetic with
//! precision escalation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use thiserror::Error;

use crate::matrix::{IntVector, RealMatrix, TargetShift};
use crate::num::{
    cmp_vs_int_power, floor_log2_rational, pow2_rational, Ball, Decision, PrecisionPolicy, Real,
};
use crate::search::{ApproxWitness, Objective};

#[derive(Debug, Clone, Error)]
pub enum TransferError {
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("comparison undecided at {max_bits} bits")]
    PrecisionExhausted { max_bits: u32 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Which weighted-time set to build: the full multiplicative set, or the
/// block-constant restriction used for ordinary (sup-norm) exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TSetMode {
    Full,
    BlockConstant,
}

/// The slope parameter `lambda = (m/n) v` tying the time set to a target
/// exponent rate `v`.
#[derive(Debug, Clone)]
pub struct LambdaParam {
    pub lambda: BigRational,
    pub mode: TSetMode,
}

impl LambdaParam {
    pub fn multiplicative(m: usize, n: usize, v: &BigRational) -> LambdaParam {
        LambdaParam {
            lambda: BigRational::new(BigInt::from(m as i64), BigInt::from(n as i64)) * v,
            mode: TSetMode::Full,
        }
    }

    /// Ordinary exponents use the same slope with the extra block-constant
    /// restriction on `(s, l)`.
    pub fn ordinary(m: usize, n: usize, v: &BigRational) -> LambdaParam {
        LambdaParam {
            lambda: BigRational::new(BigInt::from(m as i64), BigInt::from(n as i64)) * v,
            mode: TSetMode::BlockConstant,
        }
    }

    pub fn from_lambda(lambda: BigRational, mode: TSetMode) -> LambdaParam {
        LambdaParam { lambda, mode }
    }

    /// The exponent rate `v = lambda n / m` this parameter encodes.
    pub fn rate(&self, m: usize, n: usize) -> BigRational {
        &self.lambda * BigRational::new(BigInt::from(n as i64), BigInt::from(m as i64))
    }
}

/// A member of the weighted-time set: the generating pair `(s, l)`, the
/// balancing offset `zeta` and the induced time vector `t`.
#[derive(Debug, Clone)]
pub struct WeightedTime {
    pub m: usize,
    pub n: usize,
    pub s: Vec<u64>,
    pub l: Vec<u64>,
    pub lambda: BigRational,
    pub mode: TSetMode,
    pub zeta: BigRational,
    pub t: Vec<BigRational>,
    pub sigma_t: BigRational,
}

impl WeightedTime {
    pub fn new(
        m: usize,
        n: usize,
        s: Vec<u64>,
        l: Vec<u64>,
        lam: &LambdaParam,
    ) -> Result<WeightedTime, TransferError> {
        if s.len() != m || l.len() != n {
            return Err(TransferError::Dimension(format!(
                "expected |s| = {m}, |l| = {n}, got {}, {}",
                s.len(),
                l.len()
            )));
        }
        if lam.mode == TSetMode::BlockConstant {
            if s.windows(2).any(|w| w[0] != w[1]) || l.windows(2).any(|w| w[0] != w[1]) {
                return Err(TransferError::Construction(
                    "block-constant mode requires constant s and l".into(),
                ));
            }
        }
        let sigma_s = BigRational::from_integer(BigInt::from(s.iter().sum::<u64>()));
        let sigma_l = BigRational::from_integer(BigInt::from(l.iter().sum::<u64>()));
        let lambda = &lam.lambda;
        if sigma_s < lambda * &sigma_l {
            return Err(TransferError::Construction(format!(
                "sigma(s) = {sigma_s} below lambda sigma(l) = {}",
                lambda * &sigma_l
            )));
        }
        let denom = BigRational::from_integer(BigInt::from(m as i64))
            + lambda * BigRational::from_integer(BigInt::from(n as i64));
        let zeta = (&sigma_s - lambda * &sigma_l) / &denom;
        debug_assert!(!zeta.is_negative());
        let mut t = Vec::with_capacity(m + n);
        for &sj in &s {
            t.push(BigRational::from_integer(BigInt::from(sj)) - &zeta);
        }
        for &li in &l {
            t.push(BigRational::from_integer(BigInt::from(li)) + &zeta);
        }
        let sigma_t: BigRational = t.iter().cloned().sum();
        // exact identity sigma(t) = sigma(s) + sigma(l) + (m-n) zeta
        let m_minus_n =
            BigRational::from_integer(BigInt::from(m as i64) - BigInt::from(n as i64));
        debug_assert_eq!(sigma_t, &sigma_s + &sigma_l + m_minus_n * &zeta);
        Ok(WeightedTime {
            m,
            n,
            s,
            l,
            lambda: lam.lambda.clone(),
            mode: lam.mode,
            zeta,
            t,
            sigma_t,
        })
    }

    pub fn sigma_s(&self) -> u64 {
        self.s.iter().sum()
    }

    pub fn sigma_l(&self) -> u64 {
        self.l.iter().sum()
    }

    /// `sum_(j<=m) t_j`, which equals `lambda/(1+lambda) sigma(t)` exactly.
    pub fn first_block_sum(&self) -> BigRational {
        self.t[..self.m].iter().cloned().sum()
    }

    /// The balance identity `sum_(j<=m) t_j = lambda sum_(i<=n) t_(m+i)`.
    pub fn balance_holds(&self) -> bool {
        let first = self.first_block_sum();
        let second: BigRational = self.t[self.m..].iter().cloned().sum();
        first == &self.lambda * second
    }
}

/// All members with `sigma(t) <= sigma_cap`, ordered by `(sigma(t), s, l)`.
pub fn enumerate_t_set(
    m: usize,
    n: usize,
    lam: &LambdaParam,
    sigma_cap: &BigRational,
) -> Vec<WeightedTime> {
    assert!(sigma_cap.is_positive(), "sigma cap must be positive");
    let lambda = &lam.lambda;
    let one = BigRational::one();
    // sigma(s) + sigma(l) <= cap (m + n lambda)/(lambda + 1)
    let m_rat = BigRational::from_integer(BigInt::from(m as i64));
    let n_rat = BigRational::from_integer(BigInt::from(n as i64));
    let sum_cap = sigma_cap * (&m_rat + lambda * &n_rat) / (lambda + &one);
    let sum_max = sum_cap.floor().to_integer().to_u64().unwrap_or(0);
    // (lambda + 1) sigma(l) <= sigma(t) <= cap
    let l_cap = (sigma_cap / (lambda + &one)).floor().to_integer().to_u64().unwrap_or(0);

    let mut members = Vec::new();
    for sigma_s in 0..=sum_max {
        for sigma_l in 0..=l_cap.min(sum_max - sigma_s) {
            let ss = BigRational::from_integer(BigInt::from(sigma_s));
            let sl = BigRational::from_integer(BigInt::from(sigma_l));
            if ss < lambda * &sl {
                continue;
            }
            match lam.mode {
                TSetMode::BlockConstant => {
                    if sigma_s % m as u64 != 0 || sigma_l % n as u64 != 0 {
                        continue;
                    }
                    let s = vec![sigma_s / m as u64; m];
                    let l = vec![sigma_l / n as u64; n];
                    if let Ok(t) = WeightedTime::new(m, n, s, l, lam) {
                        if t.sigma_t <= *sigma_cap {
                            members.push(t);
                        }
                    }
                }
                TSetMode::Full => {
                    for s in compositions(sigma_s, m) {
                        for l in compositions(sigma_l, n) {
                            if let Ok(t) = WeightedTime::new(m, n, s.clone(), l, lam) {
                                if t.sigma_t <= *sigma_cap {
                                    members.push(t);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    members.sort_by(|a, b| {
        a.sigma_t
            .cmp(&b.sigma_t)
            .then_with(|| a.s.cmp(&b.s))
            .then_with(|| a.l.cmp(&b.l))
    });
    members
}

fn compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![0u64; parts];
    fn rec(total: u64, idx: usize, parts: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if idx == parts - 1 {
            cur[idx] = total;
            out.push(cur.clone());
            return;
        }
        for v in 0..=total {
            cur[idx] = v;
            rec(total - v, idx + 1, parts, cur, out);
        }
    }
    rec(total, 0, parts, &mut cur, &mut out);
    out
}

/// The diagonal flow entries `diag(2^t_1 .. 2^t_m, 2^-t_(m+1) .. 2^-t_(m+n))`.
pub fn g_t_entries(t: &WeightedTime) -> Vec<Real> {
    let mut out = Vec::with_capacity(t.m + t.n);
    for j in 0..t.m {
        out.push(Real::exp2(t.t[j].clone()));
    }
    for i in 0..t.n {
        out.push(Real::exp2(-t.t[t.m + i].clone()));
    }
    out
}

/// Apply `g_t` to a rational vector; entries with integral `t` stay exact.
pub fn g_t_apply(t: &WeightedTime, v: &[BigRational]) -> Result<Vec<Real>, TransferError> {
    if v.len() != t.m + t.n {
        return Err(TransferError::Dimension(format!(
            "expected length {}, got {}",
            t.m + t.n,
            v.len()
        )));
    }
    Ok(g_t_entries(t)
        .into_iter()
        .zip(v)
        .map(|(e, vi)| e.scale_shift(vi, &BigRational::zero()))
        .collect())
}

/// Threshold `coeff * 2^exp2` with exact comparisons.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsSpec {
    pub coeff: BigRational,
    pub exp2: BigRational,
}

impl EpsSpec {
    pub fn rational(c: BigRational) -> EpsSpec {
        assert!(c.is_positive());
        EpsSpec {
            coeff: c,
            exp2: BigRational::zero(),
        }
    }

    pub fn pow2(e: BigRational) -> EpsSpec {
        EpsSpec {
            coeff: BigRational::one(),
            exp2: e,
        }
    }

    pub fn log2(&self) -> f64 {
        crate::num::log2_rational(&self.coeff) + self.exp2.to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_real(&self) -> Real {
        Real::exp2(self.exp2.clone()).scale_shift(&self.coeff, &BigRational::zero())
    }
}

/// A shrinking-target membership query: is `|g_t M_X^theta alpha| < eps`?
#[derive(Debug, Clone)]
pub struct DeltaQuery {
    pub time: WeightedTime,
    pub p: IntVector,
    pub q: IntVector,
    pub epsilon: EpsSpec,
}

#[derive(Debug, Clone, Copy)]
pub struct Membership {
    pub inside: bool,
    /// `log2` of the sup coordinate of `g_t M_X^theta alpha`.
    pub sup_log2: f64,
    /// `log2(eps) - sup_log2`; positive inside.
    pub margin_log2: f64,
}

/// Exact row values `X_j q + p_j + theta_j` when everything is rational.
fn exact_rows(
    x: &RealMatrix,
    theta: &TargetShift,
    p: &IntVector,
    q: &IntVector,
) -> Option<Vec<BigRational>> {
    let xr = x.as_rational()?;
    let tr = theta.as_rational()?;
    let m = x.rows();
    let n = x.cols();
    let mut rows = Vec::with_capacity(m);
    for j in 0..m {
        let mut acc = tr[j].clone() + BigRational::from_integer(p.0[j].clone());
        for i in 0..n {
            acc += &xr[j * n + i] * BigRational::from_integer(q.0[i].clone());
        }
        rows.push(acc);
    }
    Some(rows)
}

/// `|v| < c * 2^r` exactly, for rational `v`.
fn lt_threshold_exact(v: &BigRational, c: &BigRational, r: &BigRational) -> bool {
    if v.is_zero() {
        return true;
    }
    let scaled = (v / c).abs();
    cmp_vs_int_power(&scaled, &BigInt::from(2), r) == Ordering::Less
}

/// Three-valued `|ball| < c * 2^r` at the given precision.
fn lt_threshold_ball(v: &Ball, c: &BigRational, r: &BigRational, bits: u32) -> Decision {
    let rhs_real = Real::exp2(r.clone()).scale_shift(c, &BigRational::zero());
    let rhs = rhs_real.eval(bits);
    v.abs().lt(&rhs)
}

/// Membership test for `Delta_t^theta(alpha, eps)`, with the achieved margin.
pub fn delta_membership(
    x: &RealMatrix,
    theta: &TargetShift,
    query: &DeltaQuery,
    policy: &PrecisionPolicy,
) -> Result<Membership, TransferError> {
    let t = &query.time;
    if x.rows() != t.m || x.cols() != t.n {
        return Err(TransferError::Dimension("matrix does not match time".into()));
    }
    if theta.len() != t.m || query.p.len() != t.m || query.q.len() != t.n {
        return Err(TransferError::Dimension("alpha does not match time".into()));
    }
    if query.q.is_zero() {
        return Err(TransferError::PreconditionFailed("alpha requires q != 0".into()));
    }
    let c = &query.epsilon.coeff;
    // coordinate k: |w_k| < c * 2^(e - t_k) with w the unscaled entries
    // (first block rows, second block q), t_k signed as in g_t
    let mut shifted_bounds: Vec<BigRational> = Vec::with_capacity(t.m + t.n);
    for j in 0..t.m {
        shifted_bounds.push(&query.epsilon.exp2 - &t.t[j]);
    }
    for i in 0..t.n {
        shifted_bounds.push(&query.epsilon.exp2 + &t.t[t.m + i]);
    }

    if let Some(rows) = exact_rows(x, theta, &query.p, &query.q) {
        let mut coords = rows;
        coords.extend(
            query
                .q
                .0
                .iter()
                .map(|qi| BigRational::from_integer(qi.clone())),
        );
        let mut inside = true;
        let mut sup_log2 = f64::NEG_INFINITY;
        for (k, w) in coords.iter().enumerate() {
            if !lt_threshold_exact(w, c, &shifted_bounds[k]) {
                inside = false;
            }
            if !w.is_zero() {
                let tk = if k < t.m {
                    t.t[k].to_f64().unwrap_or(0.0)
                } else {
                    -t.t[k].to_f64().unwrap_or(0.0)
                };
                sup_log2 = sup_log2.max(crate::num::log2_rational(&w.abs()) + tk);
            }
        }
        let margin = query.epsilon.log2() - sup_log2;
        return Ok(Membership {
            inside,
            sup_log2,
            margin_log2: margin,
        });
    }

    // ball path with escalation
    for bits in policy.ladder() {
        let mut all_decided = true;
        let mut inside = true;
        let mut sup_log2 = f64::NEG_INFINITY;
        let xb = x.eval(bits);
        let tbv: Vec<Ball> = theta.0.iter().map(|v| v.eval(bits)).collect();
        for k in 0..t.m + t.n {
            let w: Ball = if k < t.m {
                let mut acc = tbv[k].clone();
                acc = acc.add(
                    &Ball::from_rational(
                        &BigRational::from_integer(query.p.0[k].clone()),
                        bits,
                    ),
                    bits,
                );
                for i in 0..t.n {
                    acc = acc.add(&xb[k * t.n + i].mul_bigint(&query.q.0[i]), bits);
                }
                acc
            } else {
                Ball::from_rational(
                    &BigRational::from_integer(query.q.0[k - t.m].clone()),
                    bits,
                )
            };
            match lt_threshold_ball(&w, c, &shifted_bounds[k], bits) {
                Decision::True => {}
                Decision::False => inside = false,
                Decision::Undecided => {
                    all_decided = false;
                    break;
                }
            }
            let tk = if k < t.m {
                t.t[k].to_f64().unwrap_or(0.0)
            } else {
                -t.t[k].to_f64().unwrap_or(0.0)
            };
            let l2 = w.log2_abs_mid();
            if l2.is_finite() {
                sup_log2 = sup_log2.max(l2 + tk);
            }
        }
        if all_decided {
            let margin = query.epsilon.log2() - sup_log2;
            return Ok(Membership {
                inside,
                sup_log2,
                margin_log2: margin,
            });
        }
    }
    Err(TransferError::PrecisionExhausted {
        max_bits: policy.max_bits,
    })
}

/// `psi^eta(t) = 2^(-eta sigma(t))`, exact when the exponent is integral.
pub fn psi_eta(t: &WeightedTime, eta: &BigRational) -> Real {
    Real::exp2(-(eta * &t.sigma_t))
}

/// The explicit rate threshold of the first reduction step.
pub fn eta_zero(m: usize, n: usize, lambda: &BigRational, eps_rate: &BigRational) -> BigRational {
    let one = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    let m_rat = BigRational::from_integer(BigInt::from(m as i64));
    let n_rat = BigRational::from_integer(BigInt::from(n as i64));
    let min_eps = if *eps_rate < one { eps_rate.clone() } else { one.clone() };
    lambda * min_eps / (two * (lambda + &one) * (&m_rat + lambda * &n_rat))
}

#[derive(Debug, Clone)]
pub struct Step1Output {
    pub time: WeightedTime,
    pub query: DeltaQuery,
    pub eta0: BigRational,
    pub membership: Membership,
}

/// First reduction: read the dyadic sizes `(s, l)` off an approximation
/// witness satisfying the density condition, build the induced time vector,
/// and verify the shrinking-target membership at `eps = 2 * 2^(-zeta)`.
///
/// The density condition is enforced with the negative exponent
/// (`Pi(Xq+p+theta) < Q^(-(1+eps) m v)`), the form consistent with the
/// dyadic bracketing; witnesses that only meet it with equality are
/// rejected (strict inequality required).
pub fn step1_reduce(
    x: &RealMatrix,
    theta: &TargetShift,
    witness: &ApproxWitness,
    eps_rate: &BigRational,
    lam: &LambdaParam,
) -> Result<Step1Output, TransferError> {
    let m = x.rows();
    let n = x.cols();
    if witness.q.len() != n || witness.p.len() != m {
        return Err(TransferError::Dimension("witness does not match matrix".into()));
    }
    if !eps_rate.is_positive() {
        return Err(TransferError::Construction("eps rate must be positive".into()));
    }
    let q_int = &witness.q_bound;
    if *q_int <= BigInt::one() {
        return Err(TransferError::Construction("Q > 1 required".into()));
    }
    let lambda = &lam.lambda;
    let one = BigRational::one();
    let n_rat = BigRational::from_integer(BigInt::from(n as i64));

    let rows = exact_rows(x, theta, &witness.p, &witness.q).ok_or_else(|| {
        TransferError::Construction(
            "step 1 requires exact rational inputs (irrational fixtures go through \
             the ball path of delta membership instead)"
                .into(),
        )
    })?;
    // reformulation demands |Xq + p + theta| <= 1/2 per row
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for (j, v) in rows.iter().enumerate() {
        if v.abs() > half {
            return Err(TransferError::Construction(format!(
                "row {j} exceeds 1/2: p does not realize the distance"
            )));
        }
    }

    // density condition, strict
    let exponent = match lam.mode {
        // (1+eps) m v with m v = lambda n
        TSetMode::Full => (&one + eps_rate) * lambda * &n_rat,
        // (1+eps) v with v = lambda n / m
        TSetMode::BlockConstant => {
            (&one + eps_rate) * lambda * &n_rat
                / BigRational::from_integer(BigInt::from(m as i64))
        }
    };
    let value = match lam.mode {
        TSetMode::Full => {
            let mut acc = BigRational::one();
            for v in &rows {
                acc *= v.abs();
            }
            acc
        }
        TSetMode::BlockConstant => rows.iter().map(|v| v.abs()).max().unwrap(),
    };
    let feasible = match lam.mode {
        TSetMode::Full => witness.q.plus_product() <= q_int.pow(n as u32),
        TSetMode::BlockConstant => witness.q.sup_norm() <= q_int.clone(),
    };
    if !feasible {
        return Err(TransferError::Construction("witness violates the q constraint".into()));
    }
    if !value.is_zero()
        && cmp_vs_int_power(&value, q_int, &-exponent.clone()) != Ordering::Less
    {
        return Err(TransferError::Construction(format!(
            "density condition fails: value {value} not below Q^-{exponent}"
        )));
    }

    // Dyadic bracketing: 2^(-s_j) <= max(|row_j|, floor) < 2^(-s_j+1).
    // The floor is Q^(-(1+eps)v) with v = lambda n / m, the form whose
    // row-product equals the density threshold exactly; a floor without v
    // degenerates T-membership for rates above 1 and coincides at v = 1.
    let v_rate = lambda * &n_rat / BigRational::from_integer(BigInt::from(m as i64));
    let floor_rate = -(&one + eps_rate) * &v_rate;
    let bracket = |v: &BigRational| -> u64 {
        let use_floor = v.is_zero()
            || cmp_vs_int_power(&v.abs(), q_int, &floor_rate) == Ordering::Less;
        let e = if use_floor {
            floor_log2_int_power(q_int, &floor_rate)
        } else {
            floor_log2_rational(&v.abs())
        };
        debug_assert!(e < 0, "bracketed size must be below 1");
        (-e) as u64
    };
    let s: Vec<u64> = match lam.mode {
        TSetMode::Full => rows.iter().map(bracket).collect(),
        TSetMode::BlockConstant => vec![bracket(&value); m],
    };
    let l: Vec<u64> = match lam.mode {
        TSetMode::Full => witness
            .q
            .0
            .iter()
            .map(|qi| {
                let a = qi.magnitude().bits();
                if a <= 1 {
                    0
                } else {
                    a - 1
                }
            })
            .collect(),
        TSetMode::BlockConstant => {
            let a = witness.q.sup_norm().magnitude().bits();
            vec![if a <= 1 { 0 } else { a - 1 }; n]
        }
    };

    let time = WeightedTime::new(m, n, s, l, lam)
        .map_err(|e| TransferError::Construction(format!("bracketing degenerated: {e}")))?;
    let eta0 = eta_zero(m, n, lambda, eps_rate);
    if time.zeta <= &eta0 * &time.sigma_t {
        return Err(TransferError::Construction(format!(
            "zeta = {} fails the rate bound eta0 sigma(t) = {}",
            time.zeta,
            &eta0 * &time.sigma_t
        )));
    }

    let epsilon = EpsSpec {
        coeff: BigRational::from_integer(BigInt::from(2)),
        exp2: -time.zeta.clone(),
    };
    let query = DeltaQuery {
        time: time.clone(),
        p: witness.p.clone(),
        q: witness.q.clone(),
        epsilon,
    };
    let membership = delta_membership(x, theta, &query, &PrecisionPolicy::default())?;
    if !membership.inside {
        return Err(TransferError::Construction(
            "constructed witness fails its own membership".into(),
        ));
    }
    Ok(Step1Output {
        time,
        query,
        eta0,
        membership,
    })
}

/// `floor(log2(Q^r))` for integer `Q >= 2` and rational `r`, exact.
fn floor_log2_int_power(q: &BigInt, r: &BigRational) -> i64 {
    let bits = q.magnitude().bits() as f64;
    let r_f = r.to_f64().unwrap_or(0.0);
    let mut e = (bits * r_f).floor() as i64 - 2;
    // adjust with exact comparisons: want 2^e <= Q^r < 2^(e+1)
    while cmp_vs_int_power(&pow2_rational(e + 1), q, r) != Ordering::Greater {
        e += 1;
    }
    while cmp_vs_int_power(&pow2_rational(e), q, r) == Ordering::Greater {
        e -= 1;
    }
    e
}

#[derive(Debug, Clone)]
pub struct Step2Output {
    /// `log2 Q = sigma(t)/(n(1+lambda))`.
    pub q_log2: BigRational,
    pub epsilon: BigRational,
    pub condens_ok: bool,
}

/// Second reduction: from a shrinking-target membership at rate `eta`,
/// produce the range `Q = 2^(sigma(t)/(n(1+lambda)))` and rate
/// `eps = ((lambda+1)/lambda) m eta`, and check the density condition at
/// that `Q` (the step's conclusion).
pub fn step2_reduce(
    x: &RealMatrix,
    theta: &TargetShift,
    time: &WeightedTime,
    p: &IntVector,
    q: &IntVector,
    eta: &BigRational,
) -> Result<Step2Output, TransferError> {
    if !eta.is_positive() {
        return Err(TransferError::PreconditionFailed("eta must be positive".into()));
    }
    if time.sigma_t.is_zero() {
        return Err(TransferError::PreconditionFailed(
            "sigma(t) = 0 gives Q = 1, below the Q > 1 requirement".into(),
        ));
    }
    // membership hypothesis |g_t M alpha| < 2^(-eta sigma(t))
    let query = DeltaQuery {
        time: time.clone(),
        p: p.clone(),
        q: q.clone(),
        epsilon: EpsSpec::pow2(-(eta * &time.sigma_t)),
    };
    let membership = delta_membership(x, theta, &query, &PrecisionPolicy::default())?;
    if !membership.inside {
        return Err(TransferError::PreconditionFailed(format!(
            "membership at rate eta = {eta} fails (margin {} bits)",
            membership.margin_log2
        )));
    }

    let one = BigRational::one();
    let m_rat = BigRational::from_integer(BigInt::from(time.m as i64));
    let n_rat = BigRational::from_integer(BigInt::from(time.n as i64));
    let q_log2 = &time.sigma_t / (&n_rat * (&one + &time.lambda));
    let epsilon = (&time.lambda + &one) / &time.lambda * &m_rat * eta;

    // density condition at Q, exact in base 2
    let rows = exact_rows(x, theta, p, q).ok_or_else(|| {
        TransferError::Construction("step 2 density check requires rational inputs".into())
    })?;
    let condens_value_ok = match time.mode {
        TSetMode::Full => {
            let mut prod = BigRational::one();
            for v in &rows {
                prod *= v.abs();
            }
            // Pi < Q^(-(1+eps) m v), m v = lambda n
            let expo = -((&one + &epsilon) * &time.lambda * &n_rat) * &q_log2;
            prod.is_zero()
                || cmp_vs_int_power(&prod, &BigInt::from(2), &expo) == Ordering::Less
        }
        TSetMode::BlockConstant => {
            let sup = rows.iter().map(|v| v.abs()).max().unwrap();
            let v_rate = &time.lambda * &n_rat / &m_rat;
            let expo = -((&one + &epsilon) * v_rate) * &q_log2;
            sup.is_zero()
                || cmp_vs_int_power(&sup, &BigInt::from(2), &expo) == Ordering::Less
        }
    };
    let condens_q_ok = match time.mode {
        TSetMode::Full => {
            // plus_product(q) < Q^n = 2^(sigma(t)/(1+lambda))
            let expo = &time.sigma_t / (&one + &time.lambda);
            let pp = BigRational::from_integer(q.plus_product());
            cmp_vs_int_power(&pp, &BigInt::from(2), &expo) == Ordering::Less
        }
        TSetMode::BlockConstant => {
            let expo = &q_log2;
            let sup = BigRational::from_integer(q.sup_norm());
            sup.is_zero()
                || cmp_vs_int_power(&sup, &BigInt::from(2), expo) == Ordering::Less
        }
    };
    Ok(Step2Output {
        q_log2,
        epsilon,
        condens_ok: condens_value_ok && condens_q_ok,
    })
}

/// The componentwise strict neighborhood test `|X_j a + b_j| < eps_j`.
///
/// `a` must be an approximate unit vector in the Euclidean norm (checked to
/// about 1e-9); the test itself runs exactly on rational data and in ball
/// arithmetic otherwise.
pub fn plane_neighborhood_contains(
    x: &RealMatrix,
    a: &[Real],
    b: &[Real],
    eps: &[BigRational],
    policy: &PrecisionPolicy,
) -> Result<bool, TransferError> {
    let m = x.rows();
    let n = x.cols();
    if a.len() != n || b.len() != m || eps.len() != m {
        return Err(TransferError::Dimension("plane data mismatch".into()));
    }
    if eps.iter().any(|e| !e.is_positive()) {
        return Err(TransferError::Construction("eps must be positive".into()));
    }
    // ||a||_2 = 1 within tolerance
    let bits0 = policy.start_bits;
    let mut norm2 = Ball::from_rational(&BigRational::zero(), bits0);
    for ai in a {
        let v = ai.eval(bits0);
        norm2 = norm2.add(&v.mul(&v, bits0), bits0);
    }
    let tol = 1e-9;
    let nf = norm2.to_f64();
    if (nf - 1.0).abs() > tol {
        return Err(TransferError::PreconditionFailed(format!(
            "|a|_2^2 = {nf}, not a unit vector"
        )));
    }

    for bits in policy.ladder() {
        let xb = x.eval(bits);
        let ab: Vec<Ball> = a.iter().map(|v| v.eval(bits)).collect();
        let bb: Vec<Ball> = b.iter().map(|v| v.eval(bits)).collect();
        let mut all_decided = true;
        let mut inside = true;
        for j in 0..m {
            let mut acc = bb[j].clone();
            for i in 0..n {
                acc = acc.add(&xb[j * n + i].mul(&ab[i], bits), bits);
            }
            let bound = Ball::from_rational(&eps[j], bits);
            match acc.abs().lt(&bound) {
                Decision::True => {}
                Decision::False => inside = false,
                Decision::Undecided => {
                    all_decided = false;
                    break;
                }
            }
        }
        if all_decided {
            return Ok(inside);
        }
    }
    Err(TransferError::PrecisionExhausted {
        max_bits: policy.max_bits,
    })
}

#[cfg(test)]
mod tests;

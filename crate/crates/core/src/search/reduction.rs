//! Reduction-assisted candidate search.
//!
//! The `(m+n)`-dimensional lattice spanned by the columns of
//! `[[t*I_m, t*X], [0, I_n]]` is reduced for a sweep of dyadic scalings
//! `t = 2^j`; each step contributes the `q`-parts of the reduced basis and a
//! coefficient window around the Babai nearest-plane point for the target
//! `-t*theta`. Candidates are then evaluated exactly and the best one wins
//! under the deterministic tie-break. Nothing here is claimed optimal: the
//! exhaustive scan is the oracle on small instances.
//!
//! The sweep doubles the scaled rows in place and re-reduces the previous
//! basis, so each step after the first costs only a handful of swaps.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeSet;

use super::kernel::{Kernel, ScalarValue};
use super::{
    witness_key, ApproxWitness, Objective, SearchConfig, SearchError, SignRestriction,
};
use crate::matrix::{IntVector, RealMatrix, TargetShift};
use crate::num::reduce::round_half_up;
use crate::num::{Decision, Dyadic};

pub(super) fn run(
    x: &RealMatrix,
    theta: &TargetShift,
    q_bound: &BigInt,
    objective: Objective,
    sign: SignRestriction,
    cfg: &SearchConfig,
) -> Result<ApproxWitness, SearchError> {
    let cands = sweep_candidates(x, theta, q_bound, cfg);
    pick_best(x, theta, q_bound, objective, sign, cfg, &cands)
}

/// `round(mid * 2^s)` for a dyadic midpoint.
fn round_scaled(mid: &Dyadic, s: i64) -> BigInt {
    let e = mid.exp + s;
    if e >= 0 {
        &mid.mantissa << e as u64
    } else {
        let shift = (-e) as u64;
        let half = BigInt::one() << (shift - 1);
        (&mid.mantissa + half) >> shift
    }
}

/// Candidate `q` vectors from the scaling sweep up to `Q`, deterministic
/// order, deduplicated, zero excluded.
pub(super) fn sweep_candidates(
    x: &RealMatrix,
    theta: &TargetShift,
    q_max: &BigInt,
    cfg: &SearchConfig,
) -> Vec<IntVector> {
    let m = x.rows();
    let n = x.cols();
    let d = m + n;
    let k = q_max.bits() as i64; // ceil(log2 Q) + 1 for non-powers
    let p_bits: i64 = k + 48;
    let ratio = (1.0 + n as f64 / m as f64).max(cfg.sweep_exponent_budget);
    let j_max = (k as f64 * ratio).ceil() as i64 + 40;

    let eval_bits = (p_bits + 16).max(64) as u32;
    let xb = x.eval(eval_bits);
    let tb: Vec<_> = theta.0.iter().map(|t| t.eval(eval_bits)).collect();

    // Base columns at t = 2^0, scaled rows carrying 2^p_bits.
    let mut basis: Vec<Vec<BigInt>> = Vec::with_capacity(d);
    for j in 0..m {
        let mut col = vec![BigInt::zero(); d];
        col[j] = BigInt::one() << p_bits as u64;
        basis.push(col);
    }
    for i in 0..n {
        let mut col = vec![BigInt::zero(); d];
        for j in 0..m {
            col[j] = round_scaled(&xb[j * n + i].mid, p_bits);
        }
        col[m + i] = BigInt::one();
        basis.push(col);
    }
    let mut target: Vec<BigInt> = (0..d)
        .map(|r| {
            if r < m {
                -round_scaled(&tb[r].mid, p_bits)
            } else {
                BigInt::zero()
            }
        })
        .collect();
    let homogeneous = target.iter().all(|v| v.is_zero());

    let window: i64 = match (d, k) {
        (0..=2, _) => 3,
        (3, _) => 2,
        (4, 0..=16) => 2,
        _ => 1,
    };

    let mut seen: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    // unit seeds
    for i in 0..n {
        let mut q = vec![BigInt::zero(); n];
        q[i] = BigInt::one();
        seen.insert(q.clone());
        q[i] = -BigInt::one();
        seen.insert(q);
    }

    for j in 0..=j_max {
        if j > 0 {
            for col in basis.iter_mut() {
                for v in col.iter_mut().take(m) {
                    *v <<= 1u32;
                }
            }
            for v in target.iter_mut().take(m) {
                *v <<= 1u32;
            }
        }
        lll_reduce(&mut basis);

        let qparts: Vec<Vec<BigInt>> = basis.iter().map(|col| col[m..].to_vec()).collect();
        let mut centers: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); d]];
        if !homogeneous {
            centers.push(babai_coeffs(&basis, &target));
        }
        for center in centers {
            let mut base_q = vec![BigInt::zero(); n];
            for (c, qp) in center.iter().zip(&qparts) {
                if !c.is_zero() {
                    for (b, v) in base_q.iter_mut().zip(qp) {
                        *b += c * v;
                    }
                }
            }
            let mut offset = vec![-window; d];
            'offsets: loop {
                let mut q = base_q.clone();
                for (o, qp) in offset.iter().zip(&qparts) {
                    if *o != 0 {
                        for (b, v) in q.iter_mut().zip(qp) {
                            *b += BigInt::from(*o) * v;
                        }
                    }
                }
                if q.iter().any(|v| !v.is_zero()) {
                    seen.insert(q.clone());
                    seen.insert(q.iter().map(|v| -v).collect());
                }
                let mut i = d;
                loop {
                    if i == 0 {
                        break 'offsets;
                    }
                    i -= 1;
                    if offset[i] < window {
                        offset[i] += 1;
                        for o in &mut offset[i + 1..] {
                            *o = -window;
                        }
                        break;
                    }
                }
            }
        }
    }

    seen.into_iter().map(IntVector).collect()
}

/// Evaluate candidates exactly (escalating precision for irrational inputs)
/// and return the feasible best under the tie-break.
pub(super) fn pick_best(
    x: &RealMatrix,
    theta: &TargetShift,
    q_bound: &BigInt,
    objective: Objective,
    sign: SignRestriction,
    cfg: &SearchConfig,
    candidates: &[IntVector],
) -> Result<ApproxWitness, SearchError> {
    let qn = q_bound.pow(x.cols() as u32);
    let mut feasible: Vec<IntVector> = Vec::new();
    let mut dedup: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    for q in candidates {
        if q.is_zero() {
            continue;
        }
        let ok = match objective {
            Objective::SupNorm => q.sup_norm() <= *q_bound,
            Objective::Multiplicative => q.plus_product() <= qn,
        };
        if !ok {
            continue;
        }
        let canon = match sign {
            SignRestriction::LeadingPositive => {
                if q.leading_sign() < 0 {
                    q.negated()
                } else {
                    q.clone()
                }
            }
            SignRestriction::Any => q.clone(),
        };
        if dedup.insert(canon.0.clone()) {
            feasible.push(canon);
        }
    }
    // Unit seed keeps the set nonempty for every Q >= 1.
    if feasible.is_empty() {
        let mut q = vec![BigInt::zero(); x.cols()];
        q[0] = BigInt::one();
        feasible.push(IntVector(q));
    }

    let exact_kernel = x.is_rational() && theta.as_rational().is_some();
    if exact_kernel {
        let kernel = Kernel::build(x, theta, cfg.precision.start_bits);
        let best = choose(&kernel, &feasible, objective)
            .expect("exact comparisons are always decided");
        return Ok(finalize(&kernel, best, q_bound, objective));
    }
    for bits in cfg.precision.ladder() {
        let kernel = Kernel::build(x, theta, bits);
        if let Some(best) = choose(&kernel, &feasible, objective) {
            return Ok(finalize(&kernel, best, q_bound, objective));
        }
    }
    Err(SearchError::PrecisionExhausted {
        max_bits: cfg.precision.max_bits,
    })
}

fn choose(
    kernel: &Kernel,
    feasible: &[IntVector],
    objective: Objective,
) -> Option<(IntVector, ScalarValue)> {
    let mut best: Option<(IntVector, ScalarValue)> = None;
    for q in feasible {
        let value = kernel.value(&q.0, objective);
        match &best {
            None => best = Some((q.clone(), value)),
            Some((bq, bv)) => match Kernel::value_lt(&value, bv) {
                Decision::True => best = Some((q.clone(), value)),
                Decision::False => {
                    if let (ScalarValue::Exact(a), ScalarValue::Exact(b)) = (&value, bv) {
                        if a == b && witness_key(q) < witness_key(bq) {
                            best = Some((q.clone(), value));
                        }
                    }
                }
                Decision::Undecided => return None,
            },
        }
        if best.as_ref().map(|(_, v)| v.is_exact_zero()).unwrap_or(false) {
            break;
        }
    }
    best
}

fn finalize(
    kernel: &Kernel,
    best: (IntVector, ScalarValue),
    q_bound: &BigInt,
    objective: Objective,
) -> ApproxWitness {
    let (q, value) = best;
    let p = kernel.realizing_p(&q.0);
    let exact = value.is_exact_zero();
    ApproxWitness {
        q,
        p,
        value,
        q_bound: q_bound.clone(),
        objective,
        exact,
    }
}

// ---- integer LLL (delta = 3/4) with big-rational Gram-Schmidt ----

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Gs {
    mu: Vec<Vec<BigRational>>,
    norms2: Vec<BigRational>,
    gs: Vec<Vec<BigRational>>,
}

fn gram_schmidt(basis: &[Vec<BigInt>]) -> Gs {
    let d = basis.len();
    let dim = basis[0].len();
    let mut mu = vec![vec![BigRational::zero(); d]; d];
    let mut norms2 = vec![BigRational::zero(); d];
    let mut gs: Vec<Vec<BigRational>> = Vec::with_capacity(d);
    for i in 0..d {
        let mut v: Vec<BigRational> = basis[i]
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect();
        for j in 0..i {
            if norms2[j].is_zero() {
                continue;
            }
            // <b_i, gs_j> / |gs_j|^2
            let mut num = BigRational::zero();
            for t in 0..dim {
                num += BigRational::from_integer(basis[i][t].clone()) * &gs[j][t];
            }
            let c = num / &norms2[j];
            for t in 0..dim {
                let delta = &c * &gs[j][t];
                v[t] -= delta;
            }
            mu[i][j] = c;
        }
        let mut n2 = BigRational::zero();
        for t in 0..dim {
            n2 += &v[t] * &v[t];
        }
        norms2[i] = n2;
        gs.push(v);
    }
    Gs { mu, norms2, gs }
}

fn lll_reduce(basis: &mut [Vec<BigInt>]) {
    let d = basis.len();
    if d < 2 {
        return;
    }
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let mut g = gram_schmidt(basis);
    let mut k = 1usize;
    let mut guard = 0u64;
    let max_iter = 200_000u64;
    while k < d {
        guard += 1;
        if guard > max_iter {
            break; // candidates stay valid; quality degrades only
        }
        // size-reduce b_k against b_{k-1}..b_0
        for j in (0..k).rev() {
            let r = round_half_up(&g.mu[k][j]);
            if !r.is_zero() {
                let (head, tail) = basis.split_at_mut(k);
                let bj = &head[j];
                for t in 0..bj.len() {
                    let sub = &r * &bj[t];
                    tail[0][t] -= sub;
                }
                let rq = BigRational::from_integer(r);
                for i in 0..j {
                    let adj = &rq * &g.mu[j][i];
                    g.mu[k][i] -= adj;
                }
                g.mu[k][j] -= rq;
            }
        }
        // Lovász condition
        let m = g.mu[k][k - 1].clone();
        let lhs = g.norms2[k].clone();
        let rhs = (&delta - &m * &m) * &g.norms2[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            basis.swap(k - 1, k);
            g = gram_schmidt(basis);
            k = k.max(2) - 1;
        }
    }
}

/// Babai nearest-plane coefficients of `target` in the (reduced) basis.
fn babai_coeffs(basis: &[Vec<BigInt>], target: &[BigInt]) -> Vec<BigInt> {
    let d = basis.len();
    let dim = target.len();
    let g = gram_schmidt(basis);
    let mut residue: Vec<BigRational> = target
        .iter()
        .map(|v| BigRational::from_integer(v.clone()))
        .collect();
    let mut coeffs = vec![BigInt::zero(); d];
    for i in (0..d).rev() {
        if g.norms2[i].is_zero() {
            continue;
        }
        let mut num = BigRational::zero();
        for t in 0..dim {
            num += &residue[t] * &g.gs[i][t];
        }
        let c = round_half_up(&(num / &g.norms2[i]));
        if !c.is_zero() {
            for t in 0..dim {
                let sub = BigRational::from_integer(&c * &basis[i][t]);
                residue[t] -= sub;
            }
        }
        coeffs[i] = c;
    }
    coeffs
}

/// Shared-sweep ladder driver: one sweep serves every rung.
pub(super) fn run_ladder(
    x: &RealMatrix,
    theta: &TargetShift,
    objective: Objective,
    q_ladder: &[BigInt],
    sign: SignRestriction,
    cfg: &SearchConfig,
) -> Vec<Result<ApproxWitness, SearchError>> {
    let q_max = q_ladder.last().expect("nonempty ladder");
    let cands = sweep_candidates(x, theta, q_max, cfg);
    q_ladder
        .iter()
        .map(|q| pick_best(x, theta, q, objective, sign, cfg, &cands))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lll_reduces_skewed_basis() {
        // 2D: {(1, 0), (10000, 1)} scaled; shortest vector is short.
        let mut basis = vec![
            vec![BigInt::from(101), BigInt::from(0)],
            vec![BigInt::from(10100), BigInt::from(1)],
        ];
        lll_reduce(&mut basis);
        let norm0 = dot(&basis[0], &basis[0]);
        assert!(norm0 <= BigInt::from(101 * 101 + 1));
    }

    #[test]
    fn babai_recovers_exact_lattice_point() {
        let basis = vec![
            vec![BigInt::from(5), BigInt::from(0)],
            vec![BigInt::from(2), BigInt::from(3)],
        ];
        // target = 2*b0 - b1 exactly
        let target = vec![BigInt::from(8), BigInt::from(-3)];
        let c = babai_coeffs(&basis, &target);
        assert_eq!(c, vec![BigInt::from(2), BigInt::from(-1)]);
    }
}

//! Deterministic exhaustive scans.
//!
//! Sup-norm searches walk the box `|q| <= Q` in lexicographic order; the
//! multiplicative feasible region `plus_product(q) <= Q^n` is walked by
//! dyadic shape: for each `l` in `Z+^n` the box of `q` with
//! `2^l_i <= max(1, |q_i|) < 2^(l_i+1)`, shapes ordered by `sigma(l)` then
//! lexicographically. Work is bounded by the configured node budget.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::ops::ControlFlow;

use super::kernel::{IntKernel, Kernel, ScalarValue};
use super::{
    witness_key, ApproxWitness, Objective, SearchConfig, SearchError, SignRestriction,
};
use crate::matrix::{IntVector, RealMatrix, TargetShift};
use crate::num::Decision;

pub(super) fn run(
    x: &RealMatrix,
    theta: &TargetShift,
    q_bound: &BigInt,
    objective: Objective,
    sign: SignRestriction,
    cfg: &SearchConfig,
) -> Result<ApproxWitness, SearchError> {
    let kernel = Kernel::build(x, theta, cfg.precision.start_bits);
    match kernel {
        Kernel::Int(ik, _) => {
            let best = match objective {
                Objective::SupNorm => scan_supnorm_int(&ik, x.cols(), q_bound, sign, cfg)?,
                Objective::Multiplicative => scan_mult_int(&ik, x.cols(), q_bound, sign, cfg)?,
            };
            let kernel = Kernel::build(x, theta, cfg.precision.start_bits);
            Ok(finalize(&kernel, best.0, best.1, q_bound, objective))
        }
        Kernel::Rat(_) => {
            let (q, value) = scan_generic(&kernel, x.cols(), q_bound, objective, sign, cfg)?
                .expect("exact scan is always decided");
            Ok(finalize(&kernel, q, value, q_bound, objective))
        }
        Kernel::Ball(_) => {
            for bits in cfg.precision.ladder() {
                let kernel = Kernel::build(x, theta, bits);
                if let Some((q, value)) =
                    scan_generic(&kernel, x.cols(), q_bound, objective, sign, cfg)?
                {
                    return Ok(finalize(&kernel, q, value, q_bound, objective));
                }
            }
            Err(SearchError::PrecisionExhausted {
                max_bits: cfg.precision.max_bits,
            })
        }
    }
}

fn finalize(
    kernel: &Kernel,
    q: IntVector,
    value: ScalarValue,
    q_bound: &BigInt,
    objective: Objective,
) -> ApproxWitness {
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

/// Walk all nonzero `q` in `[-qmax, qmax]^n` (lexicographic). The callback
/// returns `Break` to short-circuit.
fn for_each_box_candidate(
    n: usize,
    qmax: i64,
    sign: SignRestriction,
    mut f: impl FnMut(&[i64]) -> ControlFlow<()>,
) {
    let mut q = vec![-qmax; n];
    loop {
        let nonzero = q.iter().any(|&v| v != 0);
        let sign_ok = match sign {
            SignRestriction::Any => true,
            SignRestriction::LeadingPositive => {
                q.iter().find(|&&v| v != 0).map(|&v| v > 0).unwrap_or(false)
            }
        };
        if nonzero && sign_ok {
            if let ControlFlow::Break(()) = f(&q) {
                return;
            }
        }
        // odometer increment
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if q[i] < qmax {
                q[i] += 1;
                for v in &mut q[i + 1..] {
                    *v = -qmax;
                }
                break;
            }
        }
    }
}

/// All shapes `l` in `Z+^n` with `sigma(l) <= smax`, ordered by `sigma`
/// then lexicographically.
fn shapes(n: usize, smax: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for sigma in 0..=smax {
        let mut cur = vec![0u32; n];
        compositions(n, sigma, 0, &mut cur, &mut out);
    }
    out
}

fn compositions(n: usize, rest: u32, idx: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if idx == n - 1 {
        cur[idx] = rest;
        out.push(cur.clone());
        return;
    }
    for v in 0..=rest {
        cur[idx] = v;
        compositions(n, rest - v, idx + 1, cur, out);
    }
}

/// Per-coordinate admissible values of a shape, ascending.
fn shape_values(l: u32) -> Vec<i64> {
    if l == 0 {
        vec![-1, 0, 1]
    } else {
        let lo = 1i64 << l;
        let hi = (1i64 << (l + 1)) - 1;
        let mut v: Vec<i64> = (-hi..=-lo).collect();
        v.extend(lo..=hi);
        v
    }
}

fn shape_min_count(l: &[u32]) -> u128 {
    l.iter()
        .map(|&li| if li == 0 { 3u128 } else { 1u128 << li })
        .product()
}

fn for_each_shape_candidate(
    l: &[u32],
    sign: SignRestriction,
    mut f: impl FnMut(&[i64]) -> ControlFlow<()>,
) {
    let values: Vec<Vec<i64>> = l.iter().map(|&li| shape_values(li)).collect();
    let n = l.len();
    let mut idx = vec![0usize; n];
    let mut q = vec![0i64; n];
    for i in 0..n {
        q[i] = values[i][0];
    }
    loop {
        let nonzero = q.iter().any(|&v| v != 0);
        let sign_ok = match sign {
            SignRestriction::Any => true,
            SignRestriction::LeadingPositive => {
                q.iter().find(|&&v| v != 0).map(|&v| v > 0).unwrap_or(false)
            }
        };
        if nonzero && sign_ok {
            if let ControlFlow::Break(()) = f(&q) {
                return;
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] + 1 < values[i].len() {
                idx[i] += 1;
                q[i] = values[i][idx[i]];
                for j in i + 1..n {
                    idx[j] = 0;
                    q[j] = values[j][0];
                }
                break;
            }
        }
    }
}

struct IntIncumbent {
    num: i128,
    den: i128,
    q: Vec<i64>,
}

fn scan_supnorm_int(
    kernel: &IntKernel,
    n: usize,
    q_bound: &BigInt,
    sign: SignRestriction,
    cfg: &SearchConfig,
) -> Result<(IntVector, ScalarValue), SearchError> {
    let qmax = q_bound
        .to_i64()
        .filter(|&q| {
            let count = (2.0 * q as f64 + 1.0).powi(n as i32);
            count <= cfg.node_budget as f64
        })
        .ok_or_else(|| SearchError::BudgetExceeded {
            visited: 0,
            budget: cfg.node_budget,
        })?;

    let mut best: Option<IntIncumbent> = None;
    for_each_box_candidate(n, qmax, sign, |q| {
        // max over rows of dist/den, early-exit once strictly above incumbent
        let mut cand_num: i128 = 0;
        let mut cand_den: i128 = 1;
        for row in &kernel.rows {
            let r = row.residue(q);
            let d = row.dist_num(r);
            if d * cand_den > cand_num * row.den {
                cand_num = d;
                cand_den = row.den;
            }
            if let Some(b) = &best {
                if cand_num * b.den > b.num * cand_den {
                    return ControlFlow::Continue(()); // cannot beat incumbent
                }
            }
        }
        match &mut best {
            None => {
                best = Some(IntIncumbent {
                    num: cand_num,
                    den: cand_den,
                    q: q.to_vec(),
                })
            }
            Some(b) => {
                let cmp = (cand_num * b.den).cmp(&(b.num * cand_den));
                if cmp == std::cmp::Ordering::Less
                    || (cmp == std::cmp::Ordering::Equal
                        && witness_key(&IntVector::from_i64(q))
                            < witness_key(&IntVector::from_i64(&b.q)))
                {
                    *b = IntIncumbent {
                        num: cand_num,
                        den: cand_den,
                        q: q.to_vec(),
                    };
                }
            }
        }
        // integer relation reached: nothing can improve on zero
        if cand_num == 0 {
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    let b = best.expect("nonempty candidate box");
    Ok((
        IntVector::from_i64(&b.q),
        ScalarValue::Exact(BigRational::new(BigInt::from(b.num), BigInt::from(b.den))),
    ))
}

fn scan_mult_int(
    kernel: &IntKernel,
    n: usize,
    q_bound: &BigInt,
    sign: SignRestriction,
    cfg: &SearchConfig,
) -> Result<(IntVector, ScalarValue), SearchError> {
    let qn: BigInt = q_bound.pow(n as u32);
    let smax = (qn.bits() as u32).saturating_sub(1); // 2^sigma <= Q^n
    let mut visited: u64 = 0;

    let mut best_val: Option<BigRational> = None;
    let mut best_log2 = f64::INFINITY;
    let mut best_q: Vec<i64> = Vec::new();

    for shape in shapes(n, smax) {
        let min_count = shape_min_count(&shape);
        if visited as u128 + min_count > cfg.node_budget as u128 {
            return Err(SearchError::BudgetExceeded {
                visited,
                budget: cfg.node_budget,
            });
        }
        // Whole-shape feasibility: the smallest plus-product in the shape is
        // 2^sigma(l); skip shapes that cannot satisfy the constraint.
        let sigma: u32 = shape.iter().sum();
        if BigInt::one() << sigma as u64 > qn {
            continue;
        }
        let shape_max: BigInt = shape
            .iter()
            .map(|&li| BigInt::from((1i64 << (li + 1)) - 1).max(BigInt::one()))
            .product();
        let check_each = shape_max > qn;

        let mut budget_hit = false;
        for_each_shape_candidate(&shape, sign, |q| {
            visited += 1;
            if visited > cfg.node_budget {
                budget_hit = true;
                return ControlFlow::Break(());
            }
            if check_each {
                let pp: i128 = q
                    .iter()
                    .map(|&v| (v.unsigned_abs().max(1)) as i128)
                    .product();
                if BigInt::from(pp) > qn {
                    return ControlFlow::Continue(());
                }
            }
            // product of per-row distances; f64 prefilter, exact confirm
            let mut log2_sum = 0.0f64;
            let mut rows: Vec<(i128, i128)> = Vec::with_capacity(kernel.rows.len());
            for row in &kernel.rows {
                let r = row.residue(q);
                let d = row.dist_num(r);
                if d == 0 {
                    best_val = Some(BigRational::zero());
                    best_log2 = f64::NEG_INFINITY;
                    best_q = q.to_vec();
                    return ControlFlow::Break(());
                }
                log2_sum += (d as f64).log2() - (row.den as f64).log2();
                rows.push((d, row.den));
            }
            if log2_sum > best_log2 + 1e-9 {
                return ControlFlow::Continue(());
            }
            let mut exact = BigRational::one();
            for (d, den) in rows {
                exact *= BigRational::new(BigInt::from(d), BigInt::from(den));
            }
            let replace = match &best_val {
                None => true,
                Some(bv) => {
                    exact < *bv
                        || (exact == *bv
                            && witness_key(&IntVector::from_i64(q))
                                < witness_key(&IntVector::from_i64(&best_q)))
                }
            };
            if replace {
                best_log2 = log2_sum;
                best_val = Some(exact);
                best_q = q.to_vec();
            }
            ControlFlow::Continue(())
        });
        if budget_hit {
            return Err(SearchError::BudgetExceeded {
                visited,
                budget: cfg.node_budget,
            });
        }
        if best_val.as_ref().map(|v| v.is_zero()).unwrap_or(false) {
            break;
        }
    }
    let v = best_val.ok_or_else(|| SearchError::InvalidInput("empty feasible region".into()))?;
    Ok((IntVector::from_i64(&best_q), ScalarValue::Exact(v)))
}

/// Generic incumbent scan through a kernel; returns `None` when a ball
/// comparison stayed undecided (caller escalates precision).
fn scan_generic(
    kernel: &Kernel,
    n: usize,
    q_bound: &BigInt,
    objective: Objective,
    sign: SignRestriction,
    cfg: &SearchConfig,
) -> Result<Option<(IntVector, ScalarValue)>, SearchError> {
    let mut best: Option<(IntVector, ScalarValue)> = None;
    let mut undecided = false;
    let mut visit = |q: &[i64]| -> ControlFlow<()> {
        let qv = IntVector::from_i64(q);
        let value = kernel.value(&qv.0, objective);
        match &best {
            None => best = Some((qv, value)),
            Some((bq, bv)) => match Kernel::value_lt(&value, bv) {
                Decision::True => best = Some((qv, value)),
                Decision::False => {
                    // tie only matters when the values are exactly equal
                    if let (ScalarValue::Exact(a), ScalarValue::Exact(b)) = (&value, bv) {
                        if a == b && witness_key(&qv) < witness_key(bq) {
                            best = Some((qv, value));
                        }
                    }
                }
                Decision::Undecided => {
                    undecided = true;
                    return ControlFlow::Break(());
                }
            },
        }
        if best.as_ref().map(|(_, v)| v.is_exact_zero()).unwrap_or(false) {
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    };

    match objective {
        Objective::SupNorm => {
            let qmax = q_bound
                .to_i64()
                .filter(|&q| (2.0 * q as f64 + 1.0).powi(n as i32) <= cfg.node_budget as f64)
                .ok_or(SearchError::BudgetExceeded {
                    visited: 0,
                    budget: cfg.node_budget,
                })?;
            for_each_box_candidate(n, qmax, sign, &mut visit);
        }
        Objective::Multiplicative => {
            let qn: BigInt = q_bound.pow(n as u32);
            let smax = (qn.bits() as u32).saturating_sub(1);
            let mut visited: u64 = 0;
            for shape in shapes(n, smax) {
                let sigma: u32 = shape.iter().sum();
                if BigInt::one() << sigma as u64 > qn {
                    continue;
                }
                let min_count = shape_min_count(&shape);
                if visited as u128 + min_count > cfg.node_budget as u128 {
                    return Err(SearchError::BudgetExceeded {
                        visited,
                        budget: cfg.node_budget,
                    });
                }
                let shape_max: BigInt = shape
                    .iter()
                    .map(|&li| BigInt::from((1i64 << (li + 1)) - 1).max(BigInt::one()))
                    .product();
                let check_each = shape_max > qn;
                let mut stop = false;
                for_each_shape_candidate(&shape, sign, |q| {
                    visited += 1;
                    if visited > cfg.node_budget {
                        stop = true;
                        return ControlFlow::Break(());
                    }
                    if check_each {
                        let pp: i128 = q
                            .iter()
                            .map(|&v| (v.unsigned_abs().max(1)) as i128)
                            .product();
                        if BigInt::from(pp) > qn {
                            return ControlFlow::Continue(());
                        }
                    }
                    visit(q)
                });
                if stop {
                    return Err(SearchError::BudgetExceeded {
                        visited,
                        budget: cfg.node_budget,
                    });
                }
                if undecided || best.as_ref().map(|(_, v)| v.is_exact_zero()).unwrap_or(false) {
                    break;
                }
            }
        }
    }

    if undecided {
        return Ok(None);
    }
    Ok(Some(best.expect("nonempty candidate set")))
}

use super::*;
use crate::matrix::{IntVector, RealMatrix, TargetShift};
use crate::num::{big_int_rational, big_rational, Real};
use crate::search::{best_multiplicative, best_supnorm, SearchConfig};
use crate::witness::liouville_number;

fn lam(n: i64, d: i64, mode: TSetMode) -> LambdaParam {
    LambdaParam::from_lambda(big_rational(n, d), mode)
}

#[test]
fn hand_enumeration_m1_n1_lambda1_cap4() {
    // pairs (s, l) with s >= l and s + l <= 4 (sigma(t) = s + l at lambda=1):
    // (0,0),(1,0),(1,1),(2,0),(2,1),(2,2),(3,0),(3,1),(4,0) - nine members.
    let members = enumerate_t_set(1, 1, &lam(1, 1, TSetMode::Full), &big_int_rational(4));
    assert_eq!(members.len(), 9);
    let pairs: Vec<(u64, u64)> = members.iter().map(|t| (t.s[0], t.l[0])).collect();
    assert!(pairs.contains(&(0, 0)));
    assert!(pairs.contains(&(2, 1)));
    assert!(pairs.contains(&(4, 0)));
    assert!(!pairs.contains(&(1, 2)));
    for t in &members {
        // zeta = (s - l)/2 and t = ((s+l)/2, (s+l)/2)
        let s = t.s[0] as i64;
        let l = t.l[0] as i64;
        assert_eq!(t.zeta, big_rational(s - l, 2));
        assert_eq!(t.t[0], big_rational(s + l, 2));
        assert_eq!(t.t[1], big_rational(s + l, 2));
    }
}

#[test]
fn spot_member_m1_n2_lambda_half() {
    // s=(1), l=(1,0): zeta = (1 - 1/2)/2 = 1/4, t = (3/4, 5/4, 1/4),
    // and 3/4 = (1/2)(5/4 + 1/4).
    let lam = lam(1, 2, TSetMode::Full);
    let t = WeightedTime::new(1, 2, vec![1], vec![1, 0], &lam).unwrap();
    assert_eq!(t.zeta, big_rational(1, 4));
    assert_eq!(t.t, vec![big_rational(3, 4), big_rational(5, 4), big_rational(1, 4)]);
    assert!(t.balance_holds());
}

#[test]
fn exact_invariants_across_configs() {
    // (m, n, lambda) in {(1,1,1), (1,2,1/2), (2,1,4), (1,1,2)}, cap 12:
    // balance, the sigma identity, relsigma and minsigmat hold exactly.
    let configs = [
        (1usize, 1usize, big_rational(1, 1)),
        (1, 2, big_rational(1, 2)),
        (2, 1, big_rational(4, 1)),
        (1, 1, big_rational(2, 1)),
    ];
    let cap = big_int_rational(12);
    let one = BigRational::one();
    for (m, n, lambda) in configs {
        let lamp = LambdaParam::from_lambda(lambda.clone(), TSetMode::Full);
        let members = enumerate_t_set(m, n, &lamp, &cap);
        assert!(!members.is_empty());
        for t in &members {
            assert!(t.balance_holds(), "condt1 m={m} n={n}");
            let ss = BigRational::from_integer(BigInt::from(t.sigma_s()));
            let sl = BigRational::from_integer(BigInt::from(t.sigma_l()));
            let m_minus_n = big_rational(m as i64 - n as i64, 1);
            assert_eq!(t.sigma_t, &ss + &sl + m_minus_n * &t.zeta, "sigma identity");
            // relsigma: (lambda+1) sigma(l) <= sigma(t) <= (lambda+1)/lambda sigma(s)
            assert!((&lambda + &one) * &sl <= t.sigma_t);
            assert!(t.sigma_t <= (&lambda + &one) / &lambda * &ss);
            // minsigmat
            let m_rat = big_rational(m as i64, 1);
            let n_rat = big_rational(n as i64, 1);
            let floor = (&lambda + &one) / (&m_rat + &lambda * &n_rat) * (&ss + &sl);
            assert!(t.sigma_t >= floor);
            // first block sum = lambda/(1+lambda) sigma(t) >= 0
            let fb = t.first_block_sum();
            assert_eq!(fb, &lambda / (&one + &lambda) * &t.sigma_t);
            assert!(!fb.is_negative());
            // second block entries are nonnegative
            for ti in &t.t[t.m..] {
                assert!(!ti.is_negative());
            }
        }
    }
}

#[test]
fn block_constant_mode_restricts_members() {
    let full = enumerate_t_set(2, 1, &lam(1, 1, TSetMode::Full), &big_int_rational(6));
    let ord = enumerate_t_set(2, 1, &lam(1, 1, TSetMode::BlockConstant), &big_int_rational(6));
    assert!(ord.len() < full.len());
    for t in &ord {
        assert_eq!(t.s[0], t.s[1]);
    }
}

#[test]
fn g_t_examples() {
    let lamp = lam(1, 1, TSetMode::Full);
    // zero member: identity
    let t0 = WeightedTime::new(1, 1, vec![0], vec![0], &lamp).unwrap();
    let applied = g_t_apply(&t0, &[big_rational(3, 1), big_rational(4, 1)]).unwrap();
    assert_eq!(applied[0].as_rational().unwrap(), big_rational(3, 1));
    assert_eq!(applied[1].as_rational().unwrap(), big_rational(4, 1));
    // t = (1, 1): (3, 4) -> (6, 2)
    let t = WeightedTime::new(1, 1, vec![2], vec![0], &lamp).unwrap();
    assert_eq!(t.t, vec![big_rational(1, 1), big_rational(1, 1)]);
    let applied = g_t_apply(&t, &[big_rational(3, 1), big_rational(4, 1)]).unwrap();
    assert_eq!(applied[0].as_rational().unwrap(), big_rational(6, 1));
    assert_eq!(applied[1].as_rational().unwrap(), big_rational(2, 1));
    // positive diagonal preserves signs
    let applied = g_t_apply(&t, &[big_rational(-3, 1), big_rational(4, 1)]).unwrap();
    assert!(applied[0].as_rational().unwrap().is_negative());
}

#[test]
fn delta_membership_hand_cases() {
    let policy = PrecisionPolicy::default();
    // X = 0, theta = 0, t = 0, eps = 1: |(p, q)| < 1 is impossible (|q| >= 1)
    let x = RealMatrix::from_rationals(1, 1, vec![big_rational(0, 1)]);
    let lamp = lam(1, 1, TSetMode::Full);
    let t0 = WeightedTime::new(1, 1, vec![0], vec![0], &lamp).unwrap();
    let q = DeltaQuery {
        time: t0,
        p: IntVector::from_i64(&[0]),
        q: IntVector::from_i64(&[1]),
        epsilon: EpsSpec::rational(BigRational::one()),
    };
    let m = delta_membership(&x, &TargetShift::zero(1), &q, &policy).unwrap();
    assert!(!m.inside);

    // X = [[1/2]], alpha = (p=-1, q=2), t = (1,1):
    // |g_t M alpha| = |(2*0, 1/2*2)| = |(0, 1)| = 1, not < 1
    let x = RealMatrix::from_rationals(1, 1, vec![big_rational(1, 2)]);
    let t = WeightedTime::new(1, 1, vec![2], vec![0], &lamp).unwrap();
    let q = DeltaQuery {
        time: t,
        p: IntVector::from_i64(&[-1]),
        q: IntVector::from_i64(&[2]),
        epsilon: EpsSpec::rational(BigRational::one()),
    };
    let m = delta_membership(&x, &TargetShift::zero(1), &q, &policy).unwrap();
    assert!(!m.inside);
    // but any eps > 1 admits it
    let mut q2 = q.clone();
    q2.epsilon = EpsSpec::rational(big_rational(9, 8));
    let m = delta_membership(&x, &TargetShift::zero(1), &q2, &policy).unwrap();
    assert!(m.inside);

    // q = 0 rejected
    let mut q3 = q.clone();
    q3.q = IntVector::from_i64(&[0]);
    assert!(delta_membership(&x, &TargetShift::zero(1), &q3, &policy).is_err());
}

#[test]
fn eta_zero_substitution() {
    // eta0 = lambda/(2 (lambda+1)(m + n lambda)) min(1, eps);
    // at eps = 1, lambda = 1, m = n = 1 this is 1/(2*2*2) = 1/8.
    let e = eta_zero(1, 1, &big_rational(1, 1), &big_rational(1, 1));
    assert_eq!(e, big_rational(1, 8));
    // min(1, eps) active for small eps
    let e = eta_zero(1, 1, &big_rational(1, 1), &big_rational(1, 4));
    assert_eq!(e, big_rational(1, 32));
    let e = eta_zero(1, 2, &big_rational(1, 2), &big_rational(1, 1));
    // 1/2 / (2 * 3/2 * (1 + 2*1/2)) = (1/2)/(3*2) = 1/12
    assert_eq!(e, big_rational(1, 12));
}

#[test]
fn psi_values() {
    let lamp = lam(1, 1, TSetMode::Full);
    let t0 = WeightedTime::new(1, 1, vec![0], vec![0], &lamp).unwrap();
    assert_eq!(
        psi_eta(&t0, &big_rational(1, 16)).as_rational().unwrap(),
        big_rational(1, 1)
    );
    // eta = 1/16, sigma(t) = 16 -> 1/2
    let t = WeightedTime::new(1, 1, vec![12], vec![4], &lamp).unwrap();
    assert_eq!(t.sigma_t, big_rational(16, 1));
    assert_eq!(
        psi_eta(&t, &big_rational(1, 16)).as_rational().unwrap(),
        big_rational(1, 2)
    );
}

#[test]
fn psi_partial_sums_have_decaying_increments() {
    // numerical check of the summability condition at desk scale
    let lamp = lam(1, 1, TSetMode::Full);
    for eta in [big_rational(1, 4), big_rational(1, 16)] {
        let mut prev_sum = 0.0f64;
        let mut increments = Vec::new();
        for cap in (4..=24).step_by(4) {
            let members = enumerate_t_set(1, 1, &lamp, &big_int_rational(cap));
            let sum: f64 = members
                .iter()
                .map(|t| psi_eta(t, &eta).to_f64())
                .sum();
            increments.push(sum - prev_sum);
            prev_sum = sum;
        }
        // increments decay beyond the first window
        for w in increments[1..].windows(2) {
            assert!(w[1] <= w[0] * 1.05, "eta={eta}: increments {increments:?}");
        }
    }
}

fn liouville_matrix(tau: i64, levels: u32) -> RealMatrix {
    let p = liouville_number(&big_rational(tau, 1), levels, 8192).unwrap();
    RealMatrix::new(1, 1, vec![p.value])
}

#[test]
fn step1_on_liouville_witness() {
    // tau = 3, witness at Q = 2^8 = 2^(a_2): value ~ 2^-24, below the
    // bracketing floor Q^(-(1+1/4)*2) = 2^-20, so s reads off the floor.
    let x = liouville_matrix(3, 4);
    let theta = TargetShift::zero(1);
    let q_bound = BigInt::from(1u64 << 8);
    let w = best_multiplicative(&x, &theta, &q_bound, &SearchConfig::reduction()).unwrap();
    assert!(!w.exact);
    let lamp = LambdaParam::multiplicative(1, 1, &big_rational(2, 1)); // lambda = 2
    let out = step1_reduce(&x, &theta, &w, &big_rational(1, 4), &lamp).unwrap();
    assert!(out.membership.inside);
    assert!(out.time.zeta > &out.eta0 * &out.time.sigma_t);
    assert_eq!(out.time.l, vec![8]);
    assert_eq!(out.time.s, vec![20]);
    assert_eq!(out.time.zeta, big_rational(4, 3));
}

#[test]
fn step1_rejects_boundary_witness() {
    // A witness whose value sits exactly at Q^-(1+eps)mv is rejected:
    // X = [[1/4]], Q = 2, eps = 1, lambda = 1/2 (v = 1/2): threshold
    // Q^-(2 * 1/2) = 1/2... use value exactly 1/4 = Q^-2 with lambda=1 v=1:
    // threshold Q^-(1+1) = 1/4; equality must be rejected.
    let x = RealMatrix::from_rationals(1, 1, vec![big_rational(1, 4)]);
    let theta = TargetShift::zero(1);
    let w = best_supnorm(&x, &theta, &BigInt::from(2), &SearchConfig::default()).unwrap();
    assert_eq!(w.value.to_f64(), 0.25);
    let lamp = LambdaParam::multiplicative(1, 1, &big_rational(1, 1));
    let err = step1_reduce(&x, &theta, &w, &big_rational(1, 1), &lamp).unwrap_err();
    assert!(matches!(err, TransferError::Construction(_)), "{err}");
}

#[test]
fn step2_formulas_at_lambda_one() {
    // Q = 2^(sigma(t)/2) and eps = 2 eta at m = n = lambda = 1.
    let x = liouville_matrix(3, 4);
    let theta = TargetShift::zero(1);
    let q_bound = BigInt::from(1u64 << 8);
    let w = best_supnorm(&x, &theta, &q_bound, &SearchConfig::reduction()).unwrap();
    let lamp = LambdaParam::multiplicative(1, 1, &big_rational(1, 1));
    let out = step1_reduce(&x, &theta, &w, &big_rational(1, 1), &lamp).unwrap();
    let eta = big_rational(1, 2) * &out.eta0;
    let s2 = step2_reduce(&x, &theta, &out.time, &w.p, &w.q, &eta).unwrap();
    assert_eq!(s2.q_log2, &out.time.sigma_t / big_rational(2, 1));
    assert_eq!(s2.epsilon, big_rational(2, 1) * &eta);
    assert!(s2.condens_ok);
}

#[test]
fn step2_rejects_zero_time() {
    let lamp = lam(1, 1, TSetMode::Full);
    let t0 = WeightedTime::new(1, 1, vec![0], vec![0], &lamp).unwrap();
    let x = liouville_matrix(3, 4);
    let err = step2_reduce(
        &x,
        &TargetShift::zero(1),
        &t0,
        &IntVector::from_i64(&[0]),
        &IntVector::from_i64(&[1]),
        &big_rational(1, 16),
    )
    .unwrap_err();
    assert!(matches!(err, TransferError::PreconditionFailed(_)));
}

#[test]
fn step1_step2_round_trip() {
    // The full consistency loop on a lacunary fixture: step 1 produces a
    // membership at 2*2^-zeta; any eta with eta <= eta0 and
    // eta sigma(t) <= zeta - 1 satisfies the step 2 hypothesis, and the
    // density condition at the reconstructed Q passes.
    let x = liouville_matrix(3, 4);
    let theta = TargetShift::from_rationals(vec![big_rational(0, 1)]);
    let lamp = LambdaParam::multiplicative(1, 1, &big_rational(1, 1));
    for k in [5u32, 8, 10] {
        let q_bound = BigInt::from(1u64) << k;
        let w = best_supnorm(&x, &theta, &q_bound, &SearchConfig::reduction()).unwrap();
        let out = match step1_reduce(&x, &theta, &w, &big_rational(1, 1), &lamp) {
            Ok(o) => o,
            Err(TransferError::Construction(_)) => continue, // rung without density
            Err(e) => panic!("unexpected: {e}"),
        };
        let slack = (&out.time.zeta - BigRational::one()) / &out.time.sigma_t;
        let eta = slack.min(out.eta0.clone() / big_rational(2, 1));
        assert!(eta.is_positive(), "fixture too shallow at k={k}");
        let s2 = step2_reduce(&x, &theta, &out.time, &w.p, &w.q, &eta).unwrap();
        assert!(s2.condens_ok, "round trip failed at k={k}");
    }
}

#[test]
fn plane_neighborhood_cases() {
    let policy = PrecisionPolicy::default();
    // X with Xa + b = 0 is in every neighborhood: X = [[3/5, -4/5]]... take
    // a = (3/5, 4/5) (unit), X = [[1, 1]], b = -(X a) = (-(7/5)).
    let x = RealMatrix::from_rationals(1, 2, vec![big_rational(1, 1), big_rational(1, 1)]);
    let a = vec![Real::from_ratio(3, 5), Real::from_ratio(4, 5)];
    let b = vec![Real::from_ratio(-7, 5)];
    for eps_num in [1i64, 3, 100] {
        assert!(plane_neighborhood_contains(
            &x,
            &a,
            &b,
            &[big_rational(eps_num, 1000)],
            &policy
        )
        .unwrap());
    }
    // shifting b by 2 eps in one row breaks membership
    let b_shift = vec![Real::from_ratio(-7, 5).scale_shift(
        &big_rational(1, 1),
        &big_rational(2, 100),
    )];
    assert!(!plane_neighborhood_contains(&x, &a, &b_shift, &[big_rational(1, 100)], &policy)
        .unwrap());
    // delta-scaling monotonicity: membership at delta*eps implies at eps
    let eps = big_rational(1, 50);
    let tighter = big_rational(1, 100);
    let at_tight =
        plane_neighborhood_contains(&x, &a, &b_shift, &[tighter], &policy).unwrap();
    let at_loose = plane_neighborhood_contains(&x, &a, &b_shift, &[eps], &policy).unwrap();
    assert!(!at_tight || at_loose);
    // non-unit a rejected
    let bad = vec![Real::from_int(1), Real::from_int(1)];
    assert!(plane_neighborhood_contains(&x, &bad, &b, &[big_rational(1, 10)], &policy).is_err());
}

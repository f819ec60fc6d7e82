//! Finite-range best-approximation searches.
//!
//! `best_supnorm` minimizes `||Xq + theta||` (sup over coordinates of the
//! distance to the nearest integer) over nonzero `q` with `|q| <= Q`;
//! `best_multiplicative` minimizes the product `prod_j ||(Xq + theta)_j||`
//! over nonzero `q` with `plus_product(q) <= Q^n`. Exact inputs are decided
//! in exact rational arithmetic (with an integer fast path); irrational
//! inputs run in ball arithmetic with precision escalation.

mod exhaustive;
mod kernel;
mod reduction;

pub use kernel::ScalarValue;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::matrix::{IntVector, RealMatrix, TargetShift};
use crate::num::PrecisionPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    SupNorm,
    Multiplicative,
}

impl Objective {
    pub fn label(&self) -> &'static str {
        match self {
            Objective::SupNorm => "supnorm",
            Objective::Multiplicative => "multiplicative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Deterministic scan of the whole feasible region. Always available;
    /// errors out rather than exceeding the node budget.
    Exhaustive,
    /// Candidates from scaled-lattice basis reduction (plus a Babai window
    /// and the unit vectors), evaluated exactly. Never claimed optimal
    /// without an oracle cross-check.
    ReductionAssisted,
}

/// Which sign class of `q` to search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignRestriction {
    /// All nonzero `q`.
    Any,
    /// Only `q` whose first nonzero coordinate is positive (`q in N` for
    /// the scalar simultaneous exponent).
    LeadingPositive,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub strategy: Strategy,
    pub precision: PrecisionPolicy,
    /// Candidate budget for enumerative scans.
    pub node_budget: u64,
    pub sign: SignRestriction,
    /// The reduction sweep scans scalings `t = 2^j` for
    /// `j <= ceil(budget * log2 Q) + 16`; raise this when hunting witnesses
    /// with value far below `Q^-budget`.
    pub sweep_exponent_budget: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            strategy: Strategy::Exhaustive,
            precision: PrecisionPolicy::default(),
            node_budget: 20_000_000,
            sign: SignRestriction::Any,
            sweep_exponent_budget: 4.0,
        }
    }
}

impl SearchConfig {
    pub fn reduction() -> Self {
        SearchConfig {
            strategy: Strategy::ReductionAssisted,
            ..SearchConfig::default()
        }
    }
}

#[derive(Debug, Clone, Error)]
pub enum SearchError {
    #[error("minimizer could not be separated at {max_bits} bits")]
    PrecisionExhausted { max_bits: u32 },
    #[error("enumeration budget exceeded: {visited} candidates (budget {budget})")]
    BudgetExceeded { visited: u64, budget: u64 },
    #[error("invalid search input: {0}")]
    InvalidInput(String),
}

/// A solution of the approximation inequalities at range `Q`.
#[derive(Debug, Clone)]
pub struct ApproxWitness {
    pub q: IntVector,
    pub p: IntVector,
    pub value: ScalarValue,
    pub q_bound: BigInt,
    pub objective: Objective,
    /// The objective value is exactly zero (integer relation reached).
    pub exact: bool,
}

impl ApproxWitness {
    pub fn value_log2(&self) -> f64 {
        self.value.log2()
    }
}

/// Deterministic tie-break key: smallest sup norm first, then prefer a
/// positive first nonzero coordinate, then lexicographically smallest.
pub(crate) fn witness_key(q: &IntVector) -> (BigInt, u8, Vec<BigInt>) {
    let sup = q.sup_norm();
    let sign_class = if q.leading_sign() >= 0 { 0 } else { 1 };
    (sup, sign_class, q.0.clone())
}

fn validate(
    x: &RealMatrix,
    theta: &TargetShift,
    q_bound: &BigInt,
) -> Result<(), SearchError> {
    if theta.len() != x.rows() {
        return Err(SearchError::InvalidInput(format!(
            "theta length {} does not match row count {}",
            theta.len(),
            x.rows()
        )));
    }
    if !q_bound.is_positive() {
        return Err(SearchError::InvalidInput(
            "Q must be a positive integer".to_string(),
        ));
    }
    Ok(())
}

/// Whether the objective value is invariant under `q -> -q`, which holds
/// exactly when `2*theta` is integral (in particular for `theta = 0`).
fn sign_symmetric(theta: &TargetShift) -> bool {
    theta.is_half_integral()
}

/// Minimize `||Xq + theta||` over nonzero `|q| <= Q`.
pub fn best_supnorm(
    x: &RealMatrix,
    theta: &TargetShift,
    q_bound: &BigInt,
    cfg: &SearchConfig,
) -> Result<ApproxWitness, SearchError> {
    validate(x, theta, q_bound)?;
    let effective_sign = if cfg.sign == SignRestriction::LeadingPositive || sign_symmetric(theta) {
        SignRestriction::LeadingPositive
    } else {
        SignRestriction::Any
    };
    match cfg.strategy {
        Strategy::Exhaustive => {
            exhaustive::run(x, theta, q_bound, Objective::SupNorm, effective_sign, cfg)
        }
        Strategy::ReductionAssisted => {
            reduction::run(x, theta, q_bound, Objective::SupNorm, effective_sign, cfg)
        }
    }
}

/// Minimize `prod_j ||(Xq + theta)_j||` over nonzero `q` with
/// `plus_product(q) <= Q^n`.
///
/// The feasible region is enumerated by dyadic shape regardless of strategy;
/// `ReductionAssisted` additionally merges lattice candidates so large-`Q`
/// searches still see the structured minimizers when the shape budget runs
/// out first.
pub fn best_multiplicative(
    x: &RealMatrix,
    theta: &TargetShift,
    q_bound: &BigInt,
    cfg: &SearchConfig,
) -> Result<ApproxWitness, SearchError> {
    validate(x, theta, q_bound)?;
    let effective_sign = if cfg.sign == SignRestriction::LeadingPositive || sign_symmetric(theta) {
        SignRestriction::LeadingPositive
    } else {
        SignRestriction::Any
    };
    let scan = exhaustive::run(
        x,
        theta,
        q_bound,
        Objective::Multiplicative,
        effective_sign,
        cfg,
    );
    match (&scan, cfg.strategy) {
        (Err(SearchError::BudgetExceeded { .. }), Strategy::ReductionAssisted) => reduction::run(
            x,
            theta,
            q_bound,
            Objective::Multiplicative,
            effective_sign,
            cfg,
        ),
        _ => scan,
    }
}

/// One rung of a minimization ladder.
#[derive(Debug, Clone)]
pub struct LadderEntry {
    pub q_bound: BigInt,
    pub witness: Result<ApproxWitness, SearchError>,
    /// Running minimum of witness values up to this rung (the feasible sets
    /// are nested, so the true minima are nonincreasing; normalizing the
    /// found values keeps heuristic rungs monotone too).
    pub running_value: Option<ScalarValue>,
}

/// Run `best_*` along a strictly increasing ladder of `Q` values. Rung
/// failures are recorded and the ladder continues.
pub fn min_ladder(
    x: &RealMatrix,
    theta: &TargetShift,
    objective: Objective,
    q_ladder: &[BigInt],
    cfg: &SearchConfig,
) -> Vec<LadderEntry> {
    for w in q_ladder.windows(2) {
        assert!(w[0] < w[1], "Q ladder must be strictly increasing");
    }
    if q_ladder.is_empty() {
        return Vec::new();
    }
    // One scaling sweep serves every rung of a reduction-assisted sup-norm
    // ladder; rungs then differ only in the feasibility filter.
    if objective == Objective::SupNorm && cfg.strategy == Strategy::ReductionAssisted {
        let sign = if cfg.sign == SignRestriction::LeadingPositive || sign_symmetric(theta) {
            SignRestriction::LeadingPositive
        } else {
            SignRestriction::Any
        };
        let results = reduction::run_ladder(x, theta, objective, q_ladder, sign, cfg);
        return fold_ladder(q_ladder, results);
    }
    let mut results = Vec::with_capacity(q_ladder.len());
    for q_bound in q_ladder {
        let witness = match objective {
            Objective::SupNorm => best_supnorm(x, theta, q_bound, cfg),
            Objective::Multiplicative => best_multiplicative(x, theta, q_bound, cfg),
        };
        // A reached integer relation cannot be improved; skip later rungs.
        let hit_zero = witness.as_ref().map(|w| w.exact).unwrap_or(false);
        results.push(witness);
        if hit_zero {
            break;
        }
    }
    while results.len() < q_ladder.len() {
        results.push(Err(SearchError::InvalidInput(
            "rung skipped after exact solution".to_string(),
        )));
    }
    fold_ladder(q_ladder, results)
}

fn fold_ladder(
    q_ladder: &[BigInt],
    results: Vec<Result<ApproxWitness, SearchError>>,
) -> Vec<LadderEntry> {
    let mut out = Vec::with_capacity(q_ladder.len());
    let mut running: Option<ScalarValue> = None;
    for (q_bound, witness) in q_ladder.iter().zip(results) {
        if let Ok(w) = &witness {
            running = Some(match running.take() {
                None => w.value.clone(),
                Some(r) => {
                    if w.value.le_for_running_min(&r) {
                        w.value.clone()
                    } else {
                        r
                    }
                }
            });
        }
        out.push(LadderEntry {
            q_bound: q_bound.clone(),
            witness,
            running_value: running.clone(),
        });
    }
    out
}

/// Dyadic ladder `2^k0, ..., 2^k1`.
pub fn dyadic_ladder(k0: u32, k1: u32) -> Vec<BigInt> {
    assert!(k1 >= k0);
    (k0..=k1).map(|k| BigInt::one() << k as u64).collect()
}

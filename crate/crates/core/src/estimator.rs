//! Exponent estimation from dyadic ladders.
//!
//! A ladder runs `Q = 2^k` for `k0 <= k <= k1`. The rung slope is
//! `log(1/v) / log Q` for the sup norm (with `v` the running-minimum best
//! value, matching the "for arbitrarily large Q" semantics) and
//! `-log v / (m log Q)` for the multiplicative objective. The ordinary
//! estimate is the maximum slope over the trailing half of the ladder, the
//! uniform estimate the minimum; the trailing window discards burn-in rungs
//! where `log Q` is too small. Estimates never claim convergence: the full
//! ladder travels with the value.

use num_bigint::BigInt;
use num_traits::One;
use serde_json::json;
use thiserror::Error;

use crate::matrix::{RealMatrix, TargetShift};
use crate::num::Extended;
use crate::search::{
    self, min_ladder, ApproxWitness, Objective, SearchConfig, SearchError, SignRestriction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// limsup semantics: best rate seen at arbitrarily large Q.
    Ordinary,
    /// liminf semantics: rate guaranteed at every large Q.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExponentKind {
    pub flavor: Flavor,
    pub objective: Objective,
}

impl ExponentKind {
    pub const ORDINARY_SUP: ExponentKind = ExponentKind {
        flavor: Flavor::Ordinary,
        objective: Objective::SupNorm,
    };
    pub const UNIFORM_SUP: ExponentKind = ExponentKind {
        flavor: Flavor::Uniform,
        objective: Objective::SupNorm,
    };
    pub const ORDINARY_MULT: ExponentKind = ExponentKind {
        flavor: Flavor::Ordinary,
        objective: Objective::Multiplicative,
    };
    pub const UNIFORM_MULT: ExponentKind = ExponentKind {
        flavor: Flavor::Uniform,
        objective: Objective::Multiplicative,
    };

    pub fn label(&self) -> String {
        format!(
            "{}-{}",
            match self.flavor {
                Flavor::Ordinary => "ordinary",
                Flavor::Uniform => "uniform",
            },
            self.objective.label()
        )
    }
}

/// Dyadic ladder bounds: `Q = 2^k0 .. 2^k1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LadderSpec {
    pub k0: u32,
    pub k1: u32,
}

impl LadderSpec {
    pub fn new(k0: u32, k1: u32) -> LadderSpec {
        assert!(k1 > k0, "ladder needs k1 > k0");
        LadderSpec { k0, k1 }
    }

    /// First rung of the trailing window (the last dyadic octave of the
    /// ladder index): `k >= k0 + (k1 - k0)/2`.
    pub fn window_start(&self) -> u32 {
        self.k0 + (self.k1 - self.k0) / 2
    }
}

#[derive(Debug, Clone)]
pub struct Rung {
    pub k: u32,
    /// Running-minimum value at this rung, as log2 (`-inf` on exact hit).
    pub value_log2: f64,
    pub value_repr: String,
    pub slope: f64,
    pub witness_q: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct WindowStats {
    pub start_k: u32,
    pub min_slope: f64,
    pub max_slope: f64,
    pub last_slope: f64,
    /// max - min over the window; the tolerance policy couples to this.
    pub slope_range: f64,
}

#[derive(Debug, Clone)]
pub struct ExponentEstimate {
    pub kind: ExponentKind,
    pub value: Extended<f64>,
    pub ladder: Vec<Rung>,
    pub window: WindowStats,
    pub exact_hit: bool,
    pub exact_witness: Option<String>,
}

impl ExponentEstimate {
    pub fn value_f64(&self) -> f64 {
        match self.value {
            Extended::Finite(v) => v,
            Extended::Infinity => f64::INFINITY,
        }
    }

    /// Versioned record for emission.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema": "dioexp.estimate/1",
            "kind": self.kind.label(),
            "value": match self.value {
                Extended::Finite(v) => json!(v),
                Extended::Infinity => json!("inf"),
            },
            "exact_hit": self.exact_hit,
            "exact_witness": self.exact_witness,
            "window": {
                "start_k": self.window.start_k,
                "min_slope": self.window.min_slope,
                "max_slope": self.window.max_slope,
                "last_slope": self.window.last_slope,
                "slope_range": self.window.slope_range,
            },
            "ladder": self.ladder.iter().map(|r| json!({
                "k": r.k,
                "value_log2": if r.value_log2.is_finite() { json!(r.value_log2) } else { json!("-inf") },
                "value": r.value_repr,
                "slope": if r.slope.is_finite() { json!(r.slope) } else { json!("inf") },
                "q": r.witness_q,
                "error": r.error,
            })).collect::<Vec<_>>(),
        })
    }
}

#[derive(Debug, Clone, Error)]
pub enum EstimatorError {
    #[error("fewer than {min} rungs succeeded ({got})")]
    InsufficientLadder { min: usize, got: usize },
    #[error("search failed on every rung: {0}")]
    AllRungsFailed(SearchError),
}

/// Estimate the exponent of `(X, theta)` for the given kind.
///
/// Exact integer relations short-circuit: the estimate reports `+infinity`
/// with the witness and the `exact_hit` flag (rational points have infinite
/// exponent).
pub fn estimate_exponent(
    x: &RealMatrix,
    theta: &TargetShift,
    kind: ExponentKind,
    ladder: LadderSpec,
    cfg: &SearchConfig,
) -> Result<ExponentEstimate, EstimatorError> {
    let qs = search::dyadic_ladder(ladder.k0, ladder.k1);
    let entries = min_ladder(x, theta, kind.objective, &qs, cfg);
    build_estimate(x.rows() as f64, kind, ladder, &entries)
}

fn build_estimate(
    m: f64,
    kind: ExponentKind,
    ladder: LadderSpec,
    entries: &[search::LadderEntry],
) -> Result<ExponentEstimate, EstimatorError> {
    let mut rungs = Vec::with_capacity(entries.len());
    let mut exact_hit = false;
    let mut exact_witness = None;
    let mut succeeded = 0usize;
    let mut last_err: Option<SearchError> = None;

    for (idx, e) in entries.iter().enumerate() {
        let k = ladder.k0 + idx as u32;
        match (&e.witness, &e.running_value) {
            (Ok(w), Some(rv)) => {
                succeeded += 1;
                let value_log2 = rv.log2();
                let slope = slope_at(kind.objective, m, k, value_log2);
                if w.exact && !exact_hit {
                    exact_hit = true;
                    exact_witness = Some(w.q.render());
                }
                rungs.push(Rung {
                    k,
                    value_log2,
                    value_repr: rv.render(),
                    slope,
                    witness_q: Some(w.q.render()),
                    error: None,
                });
            }
            (Err(err), rv) => {
                // failed rung: keep the running value for the record
                let value_log2 = rv.as_ref().map(|v| v.log2()).unwrap_or(f64::NAN);
                if exact_hit {
                    // rungs skipped after an exact solution
                } else {
                    last_err = Some(err.clone());
                }
                rungs.push(Rung {
                    k,
                    value_log2,
                    value_repr: rv.as_ref().map(|v| v.render()).unwrap_or_default(),
                    slope: f64::NAN,
                    witness_q: None,
                    error: Some(err.to_string()),
                });
            }
            (Ok(_), None) => unreachable!("successful rung always has a running value"),
        }
    }

    if exact_hit {
        let window = window_stats(ladder, &rungs);
        return Ok(ExponentEstimate {
            kind,
            value: Extended::Infinity,
            ladder: rungs,
            window,
            exact_hit: true,
            exact_witness,
        });
    }

    if succeeded < 4 {
        return match last_err {
            Some(e) if succeeded == 0 => Err(EstimatorError::AllRungsFailed(e)),
            _ => Err(EstimatorError::InsufficientLadder {
                min: 4,
                got: succeeded,
            }),
        };
    }

    let window = window_stats(ladder, &rungs);
    let value = match kind.flavor {
        Flavor::Ordinary => window.max_slope,
        Flavor::Uniform => window.min_slope,
    };
    Ok(ExponentEstimate {
        kind,
        value: Extended::Finite(value),
        ladder: rungs,
        window,
        exact_hit: false,
        exact_witness: None,
    })
}

fn slope_at(objective: Objective, m: f64, k: u32, value_log2: f64) -> f64 {
    if value_log2 == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let denom = k as f64;
    match objective {
        Objective::SupNorm => -value_log2 / denom,
        Objective::Multiplicative => -value_log2 / (m * denom),
    }
}

fn window_stats(ladder: LadderSpec, rungs: &[Rung]) -> WindowStats {
    let start = ladder.window_start();
    let slopes: Vec<f64> = rungs
        .iter()
        .filter(|r| r.k >= start && r.slope.is_finite())
        .map(|r| r.slope)
        .collect();
    let fallback: Vec<f64> = rungs
        .iter()
        .filter(|r| r.slope.is_finite())
        .map(|r| r.slope)
        .collect();
    let used = if slopes.is_empty() { &fallback } else { &slopes };
    if used.is_empty() {
        return WindowStats {
            start_k: start,
            min_slope: f64::NAN,
            max_slope: f64::NAN,
            last_slope: f64::NAN,
            slope_range: f64::NAN,
        };
    }
    let min = used.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = used.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    WindowStats {
        start_k: start,
        min_slope: min,
        max_slope: max,
        last_slope: *used.last().unwrap(),
        slope_range: max - min,
    }
}

/// Simultaneous exponent of a point `x` in `R^d`: the column matrix with a
/// scalar `q` restricted to the positive integers.
pub fn specialize_simultaneous(
    x: &[crate::num::Real],
    theta: &TargetShift,
    kind: ExponentKind,
    ladder: LadderSpec,
    cfg: &SearchConfig,
) -> Result<ExponentEstimate, EstimatorError> {
    let matrix = RealMatrix::column(x.to_vec());
    let mut cfg = cfg.clone();
    cfg.sign = SignRestriction::LeadingPositive;
    estimate_exponent(&matrix, theta, kind, ladder, &cfg)
}

/// Dual (linear form) exponent of `x`: the row matrix, `q` ranging over all
/// of `Z^d \ {0}`.
pub fn specialize_dual(
    x: &[crate::num::Real],
    theta_scalar: crate::num::Real,
    kind: ExponentKind,
    ladder: LadderSpec,
    cfg: &SearchConfig,
) -> Result<ExponentEstimate, EstimatorError> {
    let matrix = RealMatrix::row(x.to_vec());
    let theta = TargetShift(vec![theta_scalar]);
    estimate_exponent(&matrix, &theta, kind, ladder, cfg)
}

/// Per-rung witness table for emission.
pub fn ladder_table(
    x: &RealMatrix,
    theta: &TargetShift,
    objective: Objective,
    ladder: LadderSpec,
    cfg: &SearchConfig,
) -> Vec<(u32, BigInt, Result<ApproxWitness, SearchError>, Option<f64>)> {
    let qs = search::dyadic_ladder(ladder.k0, ladder.k1);
    let entries = min_ladder(x, theta, objective, &qs, cfg);
    entries
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let k = ladder.k0 + i as u32;
            let running = e.running_value.as_ref().map(|v| v.log2());
            (k, BigInt::one() << k as u64, e.witness, running)
        })
        .collect()
}

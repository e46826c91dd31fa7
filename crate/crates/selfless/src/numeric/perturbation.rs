//! The perturbation estimate behind dense-generating-set reductions.
//!
//! Replacing each centered factor `z_i` of an alternating word by a nearby
//! `y_i` changes the trace by at most
//! `sum_i ||z_i - y_i|| * prod_{j != i} max(||z_j||, ||y_j||)`:
//! telescope the difference of the two products, bound each factor by its
//! operator norm, and use that the trace is a state and unitary factors have
//! norm one. `delta_for` inverts the bound: it picks a perturbation radius
//! small enough that a check at tolerance `epsilon/2` on the perturbed set
//! implies the check at `epsilon` on the original.

use super::{ginibre, haar_unitary, op_norm, sample_rng, MatrixSpace, NumericError, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which norm produced the bounds in a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    /// Largest singular value (matrix paths).
    Operator,
    /// The l1 coefficient bound (symbolic paths); conservative.
    CoefficientL1,
}

/// Additive slack for floating-point comparisons of the estimate.
pub const ESTIMATE_SLACK: f64 = 1e-10;

/// `sum_i deviations[i] * prod_{j != i} max(norms_z[j], norms_y[j])`.
///
/// Empty products are 1, so for a single factor the bound is the deviation
/// itself. The bound is linear in the deviations.
pub fn perturbation_bound(
    norms_z: &[f64],
    norms_y: &[f64],
    deviations: &[f64],
) -> Result<f64, NumericError> {
    if norms_z.len() != norms_y.len() {
        return Err(NumericError::LengthMismatch(norms_z.len(), norms_y.len()));
    }
    if norms_z.len() != deviations.len() {
        return Err(NumericError::LengthMismatch(norms_z.len(), deviations.len()));
    }
    if norms_z.is_empty() {
        return Err(NumericError::InvalidParameter(
            "at least one factor is required".into(),
        ));
    }
    let maxes: Vec<f64> = norms_z
        .iter()
        .zip(norms_y)
        .map(|(z, y)| z.max(*y))
        .collect();
    let mut bound = 0.0;
    for (i, d) in deviations.iter().enumerate() {
        let product: f64 = maxes
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, m)| m)
            .product();
        bound += d * product;
    }
    Ok(bound)
}

/// Perturbation radius for a target tolerance: `min(1, eps / (8 N M^(N-1)))`.
///
/// The radius satisfies both constraints of the reduction: `delta <= 1`, and
/// `N * 2 delta * M^(N-1) <= eps/4 < eps/2`.
pub fn delta_for(epsilon: f64, n: u32, m_bound: f64) -> Result<f64, NumericError> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(NumericError::InvalidParameter(
            "epsilon must be positive".into(),
        ));
    }
    if n == 0 {
        return Err(NumericError::InvalidParameter("N must be at least 1".into()));
    }
    if !(m_bound.is_finite() && m_bound > 0.0) {
        return Err(NumericError::InvalidParameter(
            "the norm bound M must be positive".into(),
        ));
    }
    let delta = (epsilon / (8.0 * n as f64 * m_bound.powi(n as i32 - 1))).min(1.0);
    if delta <= 0.0 {
        return Err(NumericError::InvalidParameter(
            "delta underflowed to zero; the requested parameters are out of range".into(),
        ));
    }
    Ok(delta)
}

/// Outcome of a randomized validation of the perturbation estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub trials: usize,
    pub failures: usize,
    /// Smallest observed `bound / actual` over trials with a nonzero actual
    /// difference; a tightness diagnostic, `>= 1` when the estimate holds.
    pub worst_ratio: Option<f64>,
    /// Largest observed `actual - bound` (negative when the estimate holds
    /// with room to spare).
    pub max_excess: f64,
    pub norm: NormKind,
    pub passed: bool,
}

struct TrialOutcome {
    failed: bool,
    ratio: Option<f64>,
    excess: f64,
}

fn run_trial(space: &MatrixSpace, p: usize, master: u64, trial: u64) -> TrialOutcome {
    let mut rng = sample_rng(master, trial);
    let k = space.dimension();
    let scale = 1.0 / (k as f64).sqrt();

    let factors = rng.random_range(1..=p);
    let lead_u = rng.random::<bool>();
    let trail_u = rng.random::<bool>();

    let mut zs = Vec::with_capacity(factors);
    let mut ys = Vec::with_capacity(factors);
    for _ in 0..factors {
        let z = ginibre(k, &mut rng) * C64::new(scale, 0.0);
        let radius: f64 = rng.random_range(0.0..0.3);
        let y = &z + ginibre(k, &mut rng) * C64::new(scale * radius, 0.0);
        zs.push(z);
        ys.push(y);
    }
    let u = haar_unitary(k, &mut rng).expect("k >= 1");
    let exponents: Vec<i64> = (0..factors + 1)
        .map(|_| {
            let e = rng.random_range(1..=3i64);
            if rng.random::<bool>() {
                e
            } else {
                -e
            }
        })
        .collect();

    let u_power = |e: i64| -> DMatrix<C64> {
        let base = if e < 0 {
            u.matrix().adjoint()
        } else {
            u.matrix().clone()
        };
        let mut acc = space.identity();
        for _ in 0..e.unsigned_abs() {
            acc *= &base;
        }
        acc
    };

    let product = |factors_in: &[DMatrix<C64>]| -> DMatrix<C64> {
        let mut acc = space.identity();
        if lead_u {
            acc *= u_power(exponents[0]);
        }
        for (i, f) in factors_in.iter().enumerate() {
            acc *= f;
            let inner = i + 1 < factors_in.len();
            if inner || trail_u {
                acc *= u_power(exponents[i + 1]);
            }
        }
        acc
    };

    let w = product(&zs);
    let w_prime = product(&ys);
    let actual = (space.trace(&w) - space.trace(&w_prime)).norm();

    let norms_z: Vec<f64> = zs.iter().map(op_norm).collect();
    let norms_y: Vec<f64> = ys.iter().map(op_norm).collect();
    let deviations: Vec<f64> = zs
        .iter()
        .zip(&ys)
        .map(|(z, y)| op_norm(&(z - y)))
        .collect();
    let bound = perturbation_bound(&norms_z, &norms_y, &deviations).expect("matched lengths");

    TrialOutcome {
        failed: actual > bound + ESTIMATE_SLACK,
        ratio: (actual > 1e-300).then_some(bound / actual),
        excess: actual - bound,
    }
}

/// Randomized validation: draw alternating words with up to `p` centered
/// factors and perturbed copies, and check the bound on every trial. The
/// estimate is a theorem; a failure indicates an implementation bug.
pub fn verify_estimate(
    space: &MatrixSpace,
    p: usize,
    trials: usize,
    seed: u64,
) -> Result<EstimateReport, NumericError> {
    if p == 0 {
        return Err(NumericError::InvalidParameter(
            "p must be at least 1".into(),
        ));
    }
    if trials == 0 {
        return Err(NumericError::InvalidParameter(
            "trials must be at least 1".into(),
        ));
    }
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| run_trial(space, p, seed, t as u64))
        .collect();
    let failures = outcomes.iter().filter(|o| o.failed).count();
    let worst_ratio = outcomes
        .iter()
        .filter_map(|o| o.ratio)
        .min_by(f64::total_cmp);
    let max_excess = outcomes
        .iter()
        .map(|o| o.excess)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(EstimateReport {
        trials,
        failures,
        worst_ratio,
        max_excess,
        norm: NormKind::Operator,
        passed: failures == 0,
    })
}

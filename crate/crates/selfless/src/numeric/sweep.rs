//! Dimension sweeps: the empirical dependence of the best and median
//! violation on the matrix dimension.

use super::{
    check_matrix, haar_unitary, sample_rng, splitmix64, MatrixElement, MatrixSpace, NumericError,
    C64,
};
use crate::templates::CheckParams;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Violation statistics for one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: usize,
    pub samples: usize,
    pub best_violation: f64,
    pub median_violation: f64,
}

/// Result of a dimension sweep; rows are sorted by dimension and fully
/// reproducible from the recorded seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub seed: u64,
    pub params: CheckParams,
}

impl SweepResult {
    /// CSV rendering with columns `k,samples,best,median,seed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,samples,best,median,seed\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.k, row.samples, row.best_violation, row.median_violation, self.seed
            ));
        }
        out
    }
}

/// The default probe set: one diagonal unitary with `k` distinct equally
/// spaced phases. Deterministic, trace close to zero for `k > 1`, and in
/// generic position relative to Haar draws.
pub fn default_f_generator(k: usize) -> Result<Vec<MatrixElement>, NumericError> {
    if k == 0 {
        return Err(NumericError::ZeroDimension);
    }
    let phases = DVector::from_fn(k, |j, _| {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
        C64::new(theta.cos(), theta.sin())
    });
    Ok(vec![MatrixElement::new(DMatrix::from_diagonal(&phases))?])
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Sweep the dimensions in `k_list`, drawing `samples` fresh Haar unitaries
/// per dimension and recording the best and median largest violation.
pub fn dimension_sweep(
    k_list: &[usize],
    f_generator: impl Fn(usize) -> Result<Vec<MatrixElement>, NumericError> + Sync,
    params: &CheckParams,
    samples: usize,
    seed: u64,
) -> Result<SweepResult, NumericError> {
    if k_list.is_empty() {
        return Err(NumericError::InvalidParameter("empty dimension list".into()));
    }
    if samples == 0 {
        return Err(NumericError::InvalidParameter(
            "samples must be at least 1".into(),
        ));
    }
    let mut ks: Vec<usize> = k_list.to_vec();
    ks.sort_unstable();
    ks.dedup();

    let mut rows = Vec::with_capacity(ks.len());
    for k in ks {
        let space = MatrixSpace::new(k)?;
        let f = f_generator(k)?;
        let per_k_seed = splitmix64(seed ^ splitmix64(k as u64));
        let mut violations: Vec<f64> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let u = haar_unitary(k, &mut sample_rng(per_k_seed, i as u64))?;
                Ok(check_matrix(&space, &f, &u, params)?.max_violation)
            })
            .collect::<Result<Vec<f64>, NumericError>>()?;
        violations.sort_by(f64::total_cmp);
        rows.push(SweepRow {
            k,
            samples,
            best_violation: violations[0],
            median_violation: median(&violations),
        });
    }
    Ok(SweepResult {
        rows,
        seed,
        params: *params,
    })
}

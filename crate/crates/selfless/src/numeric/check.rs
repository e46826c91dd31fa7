//! Floating-point checks of the moment conditions in a matrix space.

use super::{centered_matrices, haar_unitary, sample_rng, MatrixElement, MatrixSpace, NumericError, C64};
use crate::report::{CheckMode, CheckReport, HaarViolation, WordViolation, WITNESS_CAP};
use crate::templates::{count_templates, enumerate_templates, CheckParams, Slot};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

fn validate_dimensions(
    space: &MatrixSpace,
    f: &[MatrixElement],
    u: &MatrixElement,
) -> Result<(), NumericError> {
    for m in f.iter().chain(std::iter::once(u)) {
        if m.dimension() != space.dimension() {
            return Err(NumericError::DimensionMismatch {
                expected: space.dimension(),
                found: m.dimension(),
            });
        }
    }
    if !u.is_unitary() {
        return Err(NumericError::NotUnitary);
    }
    Ok(())
}

/// Powers `u^e` for `e` in `-n..=n`; index with `e + n`.
fn unitary_powers(u: &MatrixElement, n: i64) -> Vec<DMatrix<C64>> {
    let k = u.dimension();
    let mut powers = vec![DMatrix::<C64>::identity(k, k); (2 * n + 1) as usize];
    for e in 1..=n {
        powers[(n + e) as usize] = &powers[(n + e - 1) as usize] * u.matrix();
        powers[(n - e) as usize] = &powers[(n - e + 1) as usize] * u.matrix().adjoint();
    }
    powers
}

/// Check conditions (i) and (ii) for a matrix unitary with the normalized
/// trace. Centered elements are built as `x - tr(x) I` together with their
/// adjoints; the report has the same shape as the exact checker's, with all
/// magnitudes computed in floating point.
pub fn check_matrix(
    space: &MatrixSpace,
    f: &[MatrixElement],
    u: &MatrixElement,
    params: &CheckParams,
) -> Result<CheckReport, NumericError> {
    validate_dimensions(space, f, u)?;
    let n = params.n as i64;
    let centered = centered_matrices(space, f);
    let powers = unitary_powers(u, n);

    let haar: Vec<HaarViolation> = (1..=params.n)
        .map(|k| HaarViolation {
            k,
            magnitude: space.trace(&powers[(n + k as i64) as usize]).norm(),
        })
        .collect();

    let templates = enumerate_templates(centered.len(), params.n, params.strict_exponents);
    let templates_checked = count_templates(centered.len(), params.n, params.strict_exponents);
    let magnitudes: Vec<f64> = templates
        .par_iter()
        .map(|t| {
            let mut acc = space.identity();
            for slot in t.slots() {
                match slot {
                    Slot::Y(i) => acc *= &centered[*i],
                    Slot::U(e) => acc *= &powers[(n + e) as usize],
                }
            }
            space.trace(&acc).norm()
        })
        .collect();

    let mut word_violations: Vec<WordViolation> = templates
        .into_iter()
        .zip(magnitudes)
        .filter(|(_, m)| *m > 0.0)
        .map(|(template, magnitude)| WordViolation {
            template,
            magnitude,
        })
        .collect();
    let violation_count = word_violations.len() as u64;
    let truncated = word_violations.len() > WITNESS_CAP;
    if truncated {
        word_violations.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude));
        word_violations.truncate(WITNESS_CAP);
    }

    Ok(CheckReport::assemble(
        *params,
        CheckMode::Numeric,
        haar,
        word_violations,
        templates_checked,
        violation_count,
        truncated,
    ))
}

/// Best unitary found by Haar sampling.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchOutcome {
    /// Index of the winning draw among `0..samples`.
    pub sample_index: usize,
    pub report: CheckReport,
    /// The winning unitary, row-major `[re, im]` pairs.
    pub unitary: Vec<Vec<[f64; 2]>>,
}

pub(crate) fn matrix_rows(m: &DMatrix<C64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

/// Sample `samples` Haar unitaries and return the one minimizing the largest
/// violation (ties to the earliest draw). Draw `i` depends only on
/// `(seed, i)`, so results are reproducible and prefix-monotone in `samples`.
pub fn search_unitary(
    space: &MatrixSpace,
    f: &[MatrixElement],
    params: &CheckParams,
    samples: usize,
    seed: u64,
) -> Result<SearchOutcome, NumericError> {
    if samples == 0 {
        return Err(NumericError::InvalidParameter(
            "samples must be at least 1".into(),
        ));
    }
    let k = space.dimension();
    let evaluated: Result<Vec<(usize, f64)>, NumericError> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let u = haar_unitary(k, &mut sample_rng(seed, i as u64))?;
            let report = check_matrix(space, f, &u, params)?;
            Ok((i, report.max_violation))
        })
        .collect();
    let evaluated = evaluated?;
    let (best_index, _) = evaluated
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .expect("samples >= 1");
    let u = haar_unitary(k, &mut sample_rng(seed, best_index as u64))?;
    let report = check_matrix(space, f, &u, params)?;
    Ok(SearchOutcome {
        sample_index: best_index,
        unitary: matrix_rows(u.matrix()),
        report,
    })
}

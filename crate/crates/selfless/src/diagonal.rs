//! Diagonal sequences: one unitary per stage for a growing set, a growing
//! length bound, and a shrinking tolerance.
//!
//! Stage `m` checks the first `m` elements of a fixed enumeration with bound
//! `N = m` and tolerance `1/m`. A sequence of stage witnesses certifies that
//! every fixed alternating word is eventually controlled: once its
//! ingredients are enrolled and its length and exponents fit the stage
//! bound, its trace magnitude at stage `m` is below `1/m` (exactly zero in
//! the group case). Moment trajectories materialize those per-stage values
//! for a chosen word.

use crate::checker::{axial_search, AxialCandidate, AxialOutcome, CheckError};
use crate::numeric::{
    haar_unitary, sample_rng, search_unitary, splitmix64, MatrixElement, MatrixSpace, NumericError,
};
use crate::report::CheckReport;
use crate::templates::{
    instantiate_word, parse_slot, AlternatingTemplate, CheckParams, ParamsError, Slot,
    TemplateError,
};
use crate::words::{GroupPresentation, ReducedWord, WordError};
use num::bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiagonalError {
    #[error("need at least {needed} enumerated elements, have {available}")]
    EnumerationTooShort { needed: usize, available: usize },
    #[error("m_max must be at least 1")]
    ZeroStages,
    #[error("trajectory index {index} exceeds the enumeration length {len}")]
    TrajectoryIndex { index: usize, len: usize },
    #[error("a power trajectory needs a nonzero exponent")]
    ZeroPower,
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Template(#[from] TemplateError),
}

/// What was enrolled at a stage; restates the stage contract for audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnrollmentInfo {
    pub elements_enrolled: usize,
    pub length_bound: u32,
    pub exponent_bound: u32,
}

/// The witness unitary of one stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StageWitness {
    /// A group word from an axial family, with its family index.
    GroupWord { n: i64, word: String },
    /// The winning draw of a Monte Carlo search.
    MatrixSample { sample_index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageReport {
    pub stage: u32,
    pub params: CheckParams,
    pub witness: StageWitness,
    pub enrollment: EnrollmentInfo,
    pub report: CheckReport,
}

/// The first stage at which no witness was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: u32,
    pub best_violation: Option<f64>,
    pub best_report: Option<Box<CheckReport>>,
}

/// A built group-case sequence together with its witnesses.
#[derive(Debug, Clone)]
pub struct GroupSequence {
    presentation: GroupPresentation,
    enumeration: Vec<ReducedWord>,
    pub stages: Vec<StageReport>,
    pub failure: Option<StageFailure>,
    witnesses: Vec<ReducedWord>,
}

impl GroupSequence {
    pub fn witnesses(&self) -> &[ReducedWord] {
        &self.witnesses
    }

    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }
}

fn stage_params(m: u32, strict: bool) -> Result<CheckParams, ParamsError> {
    let params = CheckParams::new(m, 1.0 / m as f64)?;
    Ok(if strict { params.strict() } else { params })
}

fn enrollment(m: u32) -> EnrollmentInfo {
    EnrollmentInfo {
        elements_enrolled: m as usize,
        length_bound: m,
        exponent_bound: m,
    }
}

/// Build stages `1..=m_max` over a group enumeration, drawing witnesses from
/// an axial family. The search for stage `m` starts at the previous stage's
/// family index, so witness indices are nondecreasing. Stops at the first
/// stage without a witness, recording the best report seen there.
pub fn build_group_sequence(
    presentation: &GroupPresentation,
    enumeration: &[ReducedWord],
    m_max: u32,
    candidate: &AxialCandidate,
    strict: bool,
) -> Result<GroupSequence, DiagonalError> {
    if m_max == 0 {
        return Err(DiagonalError::ZeroStages);
    }
    if enumeration.len() < m_max as usize {
        return Err(DiagonalError::EnumerationTooShort {
            needed: m_max as usize,
            available: enumeration.len(),
        });
    }
    for w in enumeration {
        presentation.validate(w)?;
    }
    let (range_min, range_max) = candidate.range();
    let mut cursor = range_min;
    let mut stages = Vec::with_capacity(m_max as usize);
    let mut witnesses = Vec::with_capacity(m_max as usize);
    let mut failure = None;

    for m in 1..=m_max {
        let params = stage_params(m, strict)?;
        let restricted = candidate.with_range(cursor, range_max)?;
        match axial_search(presentation, &enumeration[..m as usize], &restricted, &params)? {
            AxialOutcome::Found { n, report } => {
                let word = restricted.eval(presentation, n)?;
                stages.push(StageReport {
                    stage: m,
                    params,
                    witness: StageWitness::GroupWord {
                        n,
                        word: presentation.format_word(&word),
                    },
                    enrollment: enrollment(m),
                    report,
                });
                witnesses.push(word);
                cursor = n;
            }
            AxialOutcome::NotFound { best, .. } => {
                failure = Some(StageFailure {
                    stage: m,
                    best_violation: best.as_ref().map(|r| r.max_violation),
                    best_report: best,
                });
                break;
            }
        }
    }

    Ok(GroupSequence {
        presentation: presentation.clone(),
        enumeration: enumeration.to_vec(),
        stages,
        failure,
        witnesses,
    })
}

/// A built matrix-case sequence together with its witnesses.
#[derive(Debug, Clone)]
pub struct MatrixSequence {
    space: MatrixSpace,
    enumeration: Vec<MatrixElement>,
    pub stages: Vec<StageReport>,
    pub failure: Option<StageFailure>,
    witnesses: Vec<MatrixElement>,
}

impl MatrixSequence {
    pub fn witnesses(&self) -> &[MatrixElement] {
        &self.witnesses
    }

    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Build stages `1..=m_max` over a matrix enumeration, searching `samples`
/// Haar draws per stage. A stage passes when the best draw's violation is
/// strictly below `1/m`.
pub fn build_matrix_sequence(
    space: &MatrixSpace,
    enumeration: &[MatrixElement],
    m_max: u32,
    samples: usize,
    seed: u64,
    strict: bool,
) -> Result<MatrixSequence, DiagonalError> {
    if m_max == 0 {
        return Err(DiagonalError::ZeroStages);
    }
    if enumeration.len() < m_max as usize {
        return Err(DiagonalError::EnumerationTooShort {
            needed: m_max as usize,
            available: enumeration.len(),
        });
    }
    let mut stages = Vec::with_capacity(m_max as usize);
    let mut witnesses = Vec::with_capacity(m_max as usize);
    let mut failure = None;

    for m in 1..=m_max {
        let params = stage_params(m, strict)?;
        let stage_seed = splitmix64(seed ^ splitmix64(m as u64));
        let outcome = search_unitary(space, &enumeration[..m as usize], &params, samples, stage_seed)?;
        if outcome.report.passed {
            let unitary = haar_unitary(
                space.dimension(),
                &mut sample_rng(stage_seed, outcome.sample_index as u64),
            )?;
            stages.push(StageReport {
                stage: m,
                params,
                witness: StageWitness::MatrixSample {
                    sample_index: outcome.sample_index,
                },
                enrollment: enrollment(m),
                report: outcome.report,
            });
            witnesses.push(unitary);
        } else {
            failure = Some(StageFailure {
                stage: m,
                best_violation: Some(outcome.report.max_violation),
                best_report: Some(Box::new(outcome.report)),
            });
            break;
        }
    }

    Ok(MatrixSequence {
        space: *space,
        enumeration: enumeration.to_vec(),
        stages,
        failure,
        witnesses,
    })
}

/// A word whose per-stage trace is tracked: either an alternating template
/// whose `Y(i)` slots index the enumeration (centered on the fly), or a pure
/// power of the stage unitary.
#[derive(Debug, Clone, PartialEq)]
pub enum TrajectorySpec {
    Word(AlternatingTemplate),
    Power(i64),
}

impl TrajectorySpec {
    /// Parse from slot syntax: `"Y0 U1 Y2"` is a word trajectory; a single
    /// `"U3"` is the pure-power trajectory of `u^3`.
    pub fn parse(text: &str) -> Result<Self, DiagonalError> {
        let slots = text
            .split_whitespace()
            .map(parse_slot)
            .collect::<Result<Vec<_>, _>>()
            .map_err(DiagonalError::Template)?;
        if let [Slot::U(k)] = slots[..] {
            if k == 0 {
                return Err(DiagonalError::ZeroPower);
            }
            return Ok(TrajectorySpec::Power(k));
        }
        Ok(TrajectorySpec::Word(AlternatingTemplate::new(slots)?))
    }

    /// First stage from which the tail-vanishing contract applies:
    /// `max(p, L + R)` for a word with largest ingredient ordinal `p`,
    /// length `L` and exponent bound `R`; `|k|` for a pure power.
    pub fn enrollment_stage(&self) -> u32 {
        match self {
            TrajectorySpec::Word(t) => {
                let p = t.max_y_index().map(|i| i + 1).unwrap_or(0) as u32;
                let l = t.len() as u32;
                let r = t.max_abs_exponent() as u32;
                p.max(l + r)
            }
            TrajectorySpec::Power(k) => k.unsigned_abs() as u32,
        }
    }
}

impl fmt::Display for TrajectorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrajectorySpec::Word(t) => write!(f, "{t}"),
            TrajectorySpec::Power(k) => write!(f, "U{k}"),
        }
    }
}

/// Per-stage trace magnitudes of one tracked word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    pub spec: String,
    pub enrollment_stage: u32,
    pub magnitudes: Vec<f64>,
}

fn check_indices(spec: &TrajectorySpec, len: usize) -> Result<(), DiagonalError> {
    if let TrajectorySpec::Word(t) = spec {
        if let Some(max) = t.max_y_index() {
            if max >= len {
                return Err(DiagonalError::TrajectoryIndex { index: max, len });
            }
        }
    }
    Ok(())
}

/// Trace magnitudes of the tracked word along a group sequence; exactly 0
/// or 1 at every stage.
pub fn group_trajectory(
    sequence: &GroupSequence,
    spec: &TrajectorySpec,
) -> Result<MomentSequence, DiagonalError> {
    check_indices(spec, sequence.enumeration.len())?;
    let p = &sequence.presentation;
    let magnitudes = match spec {
        TrajectorySpec::Word(template) => {
            // An enumerated identity centers to zero and kills the product.
            let has_zero_ingredient = template.slots().iter().any(|s| {
                matches!(s, Slot::Y(i) if sequence.enumeration[*i].is_identity())
            });
            sequence
                .witnesses
                .iter()
                .map(|u| {
                    if has_zero_ingredient {
                        return Ok(0.0);
                    }
                    let w = instantiate_word(template, &sequence.enumeration, u, p)?;
                    Ok(if w.is_identity() { 1.0 } else { 0.0 })
                })
                .collect::<Result<Vec<f64>, DiagonalError>>()?
        }
        TrajectorySpec::Power(k) => sequence
            .witnesses
            .iter()
            .map(|u| {
                let w = p.power(u, &BigInt::from(*k))?;
                Ok(if w.is_identity() { 1.0 } else { 0.0 })
            })
            .collect::<Result<Vec<f64>, DiagonalError>>()?,
    };
    Ok(MomentSequence {
        spec: spec.to_string(),
        enrollment_stage: spec.enrollment_stage(),
        magnitudes,
    })
}

/// Trace magnitudes of the tracked word along a matrix sequence.
pub fn matrix_trajectory(
    sequence: &MatrixSequence,
    spec: &TrajectorySpec,
) -> Result<MomentSequence, DiagonalError> {
    check_indices(spec, sequence.enumeration.len())?;
    let space = &sequence.space;
    let id = space.identity();
    let centered: Vec<_> = sequence
        .enumeration
        .iter()
        .map(|x| x.matrix() - &id * space.trace(x.matrix()))
        .collect();
    let magnitudes = sequence
        .witnesses
        .iter()
        .map(|u| {
            let value = match spec {
                TrajectorySpec::Word(template) => {
                    let mut acc = id.clone();
                    for slot in template.slots() {
                        match slot {
                            Slot::Y(i) => acc *= &centered[*i],
                            Slot::U(e) => {
                                let base = if *e < 0 {
                                    u.matrix().adjoint()
                                } else {
                                    u.matrix().clone()
                                };
                                for _ in 0..e.unsigned_abs() {
                                    acc *= &base;
                                }
                            }
                        }
                    }
                    space.trace(&acc)
                }
                TrajectorySpec::Power(k) => {
                    let base = if *k < 0 {
                        u.matrix().adjoint()
                    } else {
                        u.matrix().clone()
                    };
                    let mut acc = id.clone();
                    for _ in 0..k.unsigned_abs() {
                        acc *= &base;
                    }
                    space.trace(&acc)
                }
            };
            value.norm()
        })
        .collect();
    Ok(MomentSequence {
        spec: spec.to_string(),
        enrollment_stage: spec.enrollment_stage(),
        magnitudes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::ExponentExpr;

    fn f2() -> GroupPresentation {
        GroupPresentation::free_group(2).unwrap()
    }

    fn conjugated_family(p: &GroupPresentation, n_max: i64) -> AxialCandidate {
        let a = p.factor_index("a").unwrap();
        let b = p.factor_index("b").unwrap();
        AxialCandidate::new(
            vec![
                (a, ExponentExpr::linear(1)),
                (b, ExponentExpr::constant(1)),
                (a, ExponentExpr::linear(1)),
            ],
            1,
            n_max,
        )
        .unwrap()
    }

    #[test]
    fn small_group_sequence_completes_exactly() {
        let p = f2();
        let enumeration = vec![
            p.word(&[("a", 1)]).unwrap(),
            p.word(&[("b", 1)]).unwrap(),
            p.word(&[("a", 1), ("b", 1)]).unwrap(),
        ];
        let seq =
            build_group_sequence(&p, &enumeration, 3, &conjugated_family(&p, 30), false).unwrap();
        assert!(seq.completed());
        assert_eq!(seq.stages.len(), 3);
        let mut last_n = 0;
        for (i, stage) in seq.stages.iter().enumerate() {
            let m = (i + 1) as u32;
            assert_eq!(stage.stage, m);
            assert_eq!(stage.params.n, m);
            assert!((stage.params.epsilon - 1.0 / m as f64).abs() < 1e-15);
            assert_eq!(stage.report.max_violation, 0.0);
            assert!(stage.report.passed);
            assert_eq!(stage.enrollment.elements_enrolled, m as usize);
            match &stage.witness {
                StageWitness::GroupWord { n, .. } => {
                    assert!(*n >= last_n, "witness indices are nondecreasing");
                    last_n = *n;
                }
                other => panic!("unexpected witness {other:?}"),
            }
        }
    }

    #[test]
    fn identity_first_element_is_vacuous_at_stage_one() {
        let p = f2();
        let enumeration = vec![ReducedWord::identity()];
        let family = AxialCandidate::new(vec![(0, ExponentExpr::linear(1))], 1, 5).unwrap();
        let seq = build_group_sequence(&p, &enumeration, 1, &family, false).unwrap();
        assert!(seq.completed());
        assert_eq!(seq.stages[0].report.templates_checked, 0);
    }

    #[test]
    fn enumeration_too_short_is_rejected() {
        let p = f2();
        let enumeration = vec![p.word(&[("a", 1)]).unwrap()];
        let err = build_group_sequence(&p, &enumeration, 2, &conjugated_family(&p, 5), false)
            .unwrap_err();
        assert!(matches!(
            err,
            DiagonalError::EnumerationTooShort { needed: 2, available: 1 }
        ));
    }

    #[test]
    fn commutative_enumeration_fails_loudly() {
        let p = GroupPresentation::free_group(1).unwrap();
        let enumeration = vec![
            p.word(&[("a", 2)]).unwrap(),
            p.word(&[("a", -2)]).unwrap(),
            p.word(&[("a", 3)]).unwrap(),
            p.word(&[("a", 1)]).unwrap(),
        ];
        let family = AxialCandidate::new(vec![(0, ExponentExpr::linear(1))], 1, 12).unwrap();
        let seq = build_group_sequence(&p, &enumeration, 4, &family, false).unwrap();
        let failure = seq.failure.expect("commutative collapse must surface");
        // Early stages dodge cancellation by growing n, but the four-factor
        // word a^2 u^k a^-2 u^-k collapses for every n once N reaches 4.
        assert_eq!(failure.stage, 4);
        assert_eq!(failure.best_violation, Some(1.0));
        assert_eq!(seq.stages.len(), 3);
    }

    #[test]
    fn group_trajectories_vanish_from_enrollment() {
        let p = f2();
        let enumeration = vec![
            p.word(&[("a", 1)]).unwrap(),
            p.word(&[("b", 1)]).unwrap(),
            p.word(&[("a", 1), ("b", 1)]).unwrap(),
            p.word(&[("a", 2), ("b", -1)]).unwrap(),
        ];
        let seq =
            build_group_sequence(&p, &enumeration, 4, &conjugated_family(&p, 40), false).unwrap();
        assert!(seq.completed());

        let word = TrajectorySpec::parse("Y0 U1").unwrap();
        let traj = group_trajectory(&seq, &word).unwrap();
        assert_eq!(traj.enrollment_stage, 3); // max(p=1, L=2 + R=1)
        for (i, magnitude) in traj.magnitudes.iter().enumerate() {
            if (i + 1) as u32 >= traj.enrollment_stage {
                assert_eq!(*magnitude, 0.0);
            }
        }

        let power = TrajectorySpec::parse("U2").unwrap();
        let traj = group_trajectory(&seq, &power).unwrap();
        assert_eq!(traj.enrollment_stage, 2);
        assert!(traj.magnitudes.iter().all(|m| *m == 0.0));
    }

    #[test]
    fn trajectory_with_identity_ingredient_is_zero() {
        let p = f2();
        let enumeration = vec![ReducedWord::identity(), p.word(&[("b", 1)]).unwrap()];
        let family = conjugated_family(&p, 20);
        let seq = build_group_sequence(&p, &enumeration, 2, &family, false).unwrap();
        let spec = TrajectorySpec::parse("Y0 U1").unwrap();
        let traj = group_trajectory(&seq, &spec).unwrap();
        assert!(traj.magnitudes.iter().all(|m| *m == 0.0));
    }

    #[test]
    fn one_dimensional_matrix_stage_fails_at_the_boundary() {
        // epsilon_1 = 1 and |trace(u)| = 1 for every 1x1 unitary: the strict
        // inequality 1 < 1 fails, so stage 1 reports no witness.
        let space = MatrixSpace::new(1).unwrap();
        let enumeration = vec![MatrixElement::new(space.identity()).unwrap()];
        let seq = build_matrix_sequence(&space, &enumeration, 1, 16, 9, false).unwrap();
        let failure = seq.failure.expect("1x1 space cannot pass stage 1");
        assert_eq!(failure.stage, 1);
        let best = failure.best_violation.unwrap();
        assert!((best - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_sequence_completes_in_moderate_dimension() {
        let space = MatrixSpace::new(16).unwrap();
        let enumeration: Vec<MatrixElement> = (0..2)
            .map(|j| haar_unitary(16, &mut sample_rng(1000 + j, 0)).unwrap())
            .collect();
        let seq = build_matrix_sequence(&space, &enumeration, 2, 60, 4, false).unwrap();
        assert!(seq.completed(), "failure: {:?}", seq.failure);
        for stage in &seq.stages {
            assert!(stage.report.max_violation < 1.0 / stage.stage as f64);
        }
        let spec = TrajectorySpec::parse("Y0 U1").unwrap();
        let traj = matrix_trajectory(&seq, &spec).unwrap();
        assert_eq!(traj.magnitudes.len(), 2);
    }

    #[test]
    fn trajectory_index_bounds_are_checked() {
        let p = f2();
        let enumeration = vec![p.word(&[("a", 1)]).unwrap()];
        let family = conjugated_family(&p, 10);
        let seq = build_group_sequence(&p, &enumeration, 1, &family, false).unwrap();
        let spec = TrajectorySpec::parse("Y3 U1").unwrap();
        assert!(matches!(
            group_trajectory(&seq, &spec),
            Err(DiagonalError::TrajectoryIndex { index: 3, len: 1 })
        ));
    }
}

//! Dispatch a run configuration to the library and shape the JSON payload.

use crate::config::RunConfig;
use crate::syntax::{parse_family, parse_presentation, parse_word, SyntaxError};
use selfless::checker::{axial_search, check_freeness, check_group, AxialOutcome, CheckError};
use selfless::diagonal::{
    build_group_sequence, build_matrix_sequence, group_trajectory, matrix_trajectory,
    DiagonalError, MomentSequence, StageFailure, StageReport, TrajectorySpec,
};
use selfless::numeric::{
    check_matrix, default_f_generator, delta_for, dimension_sweep, haar_unitary, sample_rng,
    search_unitary, verify_estimate, MatrixElement, MatrixSpace, NumericError,
};
use selfless::templates::{count_templates, enumerate_templates, CheckParams, ParamsError};
use selfless::words::{GroupPresentation, ReducedWord};
use selfless::CheckReport;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Diagonal(#[from] DiagonalError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Syntax(_) => "syntax",
            CliError::Params(_) => "params",
            CliError::Check(_) => "check",
            CliError::Numeric(_) => "numeric",
            CliError::Diagonal(_) => "diagonal",
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io",
        }
    }
}

/// Result payload plus the pass/fail verdict driving the exit status.
pub struct RunOutput {
    pub result: Value,
    pub passed: bool,
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("payloads are plain data")
}

fn params_for(n: u32, epsilon: f64, strict: bool) -> Result<CheckParams, CliError> {
    let params = CheckParams::new(n, epsilon)?;
    Ok(if strict { params.strict() } else { params })
}

fn parse_words(
    texts: &[String],
    presentation: &GroupPresentation,
) -> Result<Vec<ReducedWord>, CliError> {
    texts
        .iter()
        .filter(|t| !t.trim().is_empty())
        .map(|t| Ok(parse_word(t, presentation)?))
        .collect()
}

fn probe_set(k: usize, f_gen: &str) -> Result<Vec<MatrixElement>, CliError> {
    match f_gen {
        "diag" => Ok(default_f_generator(k)?),
        "none" => Ok(Vec::new()),
        other => Err(CliError::Usage(format!(
            "unknown probe set `{other}`; expected `diag` or `none`"
        ))),
    }
}

const ENUMERATE_CAP: u128 = 100_000;

pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    match config {
        RunConfig::Enumerate { p, n, strict_exponents } => {
            let count = count_templates(*p, *n, *strict_exponents);
            if count > ENUMERATE_CAP {
                return Err(CliError::Usage(format!(
                    "{count} templates would be listed; reduce p or N (cap {ENUMERATE_CAP})"
                )));
            }
            let templates: Vec<String> = enumerate_templates(*p, *n, *strict_exponents)
                .iter()
                .map(|t| t.to_string())
                .collect();
            Ok(RunOutput {
                result: json!({ "count": count.to_string(), "templates": templates }),
                passed: true,
            })
        }

        RunConfig::Check { group, f, u, n, epsilon, strict_exponents } => {
            let presentation = parse_presentation(group)?;
            let f = parse_words(f, &presentation)?;
            let u = parse_word(u, &presentation)?;
            let params = params_for(*n, *epsilon, *strict_exponents)?;
            let report = check_group(&presentation, &f, &u, &params)?;
            let passed = report.passed;
            Ok(RunOutput { result: to_value(&report), passed })
        }

        RunConfig::AxialSearch { group, f, family, n_min, n_max, n, epsilon, strict_exponents } => {
            let presentation = parse_presentation(group)?;
            let f = parse_words(f, &presentation)?;
            let candidate = parse_family(family, &presentation, *n_min, *n_max)?;
            let params = params_for(*n, *epsilon, *strict_exponents)?;
            let outcome = axial_search(&presentation, &f, &candidate, &params)?;
            let passed = matches!(outcome, AxialOutcome::Found { .. });
            let result = match &outcome {
                AxialOutcome::Found { n, report } => {
                    let word = candidate.eval(&presentation, *n).expect("found index is in range");
                    json!({
                        "outcome": "found",
                        "n": n,
                        "witness_word": presentation.format_word(&word),
                        "report": to_value(report),
                    })
                }
                AxialOutcome::NotFound { .. } => to_value(&outcome),
            };
            Ok(RunOutput { result, passed })
        }

        RunConfig::FreeProductCheck { group, f, n, epsilon, strict_exponents } => {
            let presentation = parse_presentation(group)?;
            let f = parse_words(f, &presentation)?;
            let params = params_for(*n, *epsilon, *strict_exponents)?;
            let report = check_freeness(&presentation, &f, &params)?;
            let passed = report.report.passed;
            Ok(RunOutput { result: to_value(&report), passed })
        }

        RunConfig::MatrixCheck { k, n, epsilon, samples, seed, f_gen, strict_exponents } => {
            if *samples == 0 {
                return Err(CliError::Usage("samples must be at least 1".into()));
            }
            let space = MatrixSpace::new(*k)?;
            let f = probe_set(*k, f_gen)?;
            let params = params_for(*n, *epsilon, *strict_exponents)?;
            let mut reports: Vec<(usize, CheckReport)> = Vec::with_capacity(*samples);
            for i in 0..*samples {
                let u = haar_unitary(*k, &mut sample_rng(*seed, i as u64))?;
                reports.push((i, check_matrix(&space, &f, &u, &params)?));
            }
            let best = reports
                .iter()
                .min_by(|a, b| a.1.max_violation.total_cmp(&b.1.max_violation).then(a.0.cmp(&b.0)))
                .expect("samples >= 1");
            let any_passed = reports.iter().any(|(_, r)| r.passed);
            let result = json!({
                "best_index": best.0,
                "best_violation": best.1.max_violation,
                "any_passed": any_passed,
                "samples": reports
                    .iter()
                    .map(|(i, r)| json!({ "sample_index": i, "report": to_value(r) }))
                    .collect::<Vec<_>>(),
            });
            Ok(RunOutput { result, passed: any_passed })
        }

        RunConfig::SearchUnitary { k, n, epsilon, samples, seed, f_gen, strict_exponents } => {
            let space = MatrixSpace::new(*k)?;
            let f = probe_set(*k, f_gen)?;
            let params = params_for(*n, *epsilon, *strict_exponents)?;
            let outcome = search_unitary(&space, &f, &params, *samples, *seed)?;
            let passed = outcome.report.passed;
            Ok(RunOutput { result: to_value(&outcome), passed })
        }

        RunConfig::Sweep { k_list, n, epsilon, samples, seed, csv, strict_exponents } => {
            let params = params_for(*n, *epsilon, *strict_exponents)?;
            let result = dimension_sweep(k_list, default_f_generator, &params, *samples, *seed)?;
            if let Some(path) = csv {
                std::fs::write(path, result.to_csv())?;
            }
            Ok(RunOutput { result: to_value(&result), passed: true })
        }

        RunConfig::Delta { epsilon, n, m, norm } => {
            if norm != "operator" && norm != "l1" {
                return Err(CliError::Usage(format!(
                    "unknown norm label `{norm}`; expected `operator` or `l1`"
                )));
            }
            let delta = delta_for(*epsilon, *n, *m)?;
            let product_bound = 2.0 * *n as f64 * delta * m.powi(*n as i32 - 1);
            let result = json!({
                "epsilon": epsilon,
                "n": n,
                "m": m,
                "norm": norm,
                "delta": delta,
                "cap_active": delta == 1.0,
                "product_bound": product_bound,
            });
            Ok(RunOutput { result, passed: true })
        }

        RunConfig::VerifyEstimate { k, p, trials, seed } => {
            let space = MatrixSpace::new(*k)?;
            let report = verify_estimate(&space, *p, *trials, *seed)?;
            let passed = report.passed;
            Ok(RunOutput { result: to_value(&report), passed })
        }

        RunConfig::Diagonal {
            group,
            enumeration,
            family,
            n_min,
            n_max,
            k,
            m_max,
            samples,
            seed,
            trajectories,
            strict_exponents,
        } => {
            let specs: Vec<TrajectorySpec> = trajectories
                .iter()
                .map(|t| Ok(TrajectorySpec::parse(t)?))
                .collect::<Result<_, CliError>>()?;
            match (group, k) {
                (Some(group), None) => {
                    let presentation = parse_presentation(group)?;
                    let words = parse_words(enumeration, &presentation)?;
                    let family = family.as_deref().ok_or_else(|| {
                        CliError::Usage("group mode needs --family".into())
                    })?;
                    let candidate = parse_family(family, &presentation, *n_min, *n_max)?;
                    let sequence = build_group_sequence(
                        &presentation,
                        &words,
                        *m_max,
                        &candidate,
                        *strict_exponents,
                    )?;
                    let moments: Vec<MomentSequence> = specs
                        .iter()
                        .map(|s| Ok(group_trajectory(&sequence, s)?))
                        .collect::<Result<_, CliError>>()?;
                    Ok(diagonal_output("group", &sequence.stages, &sequence.failure, &moments))
                }
                (None, Some(k)) => {
                    let space = MatrixSpace::new(*k)?;
                    let mut elements = Vec::with_capacity(*m_max as usize);
                    for j in 0..*m_max as u64 {
                        // enumeration streams live far from the stage streams
                        elements.push(haar_unitary(*k, &mut sample_rng(*seed, (1 << 32) + j))?);
                    }
                    let sequence = build_matrix_sequence(
                        &space,
                        &elements,
                        *m_max,
                        *samples,
                        *seed,
                        *strict_exponents,
                    )?;
                    let moments: Vec<MomentSequence> = specs
                        .iter()
                        .map(|s| Ok(matrix_trajectory(&sequence, s)?))
                        .collect::<Result<_, CliError>>()?;
                    Ok(diagonal_output("matrix", &sequence.stages, &sequence.failure, &moments))
                }
                _ => Err(CliError::Usage(
                    "diagonal needs exactly one of --group (with --enum/--family) or --k".into(),
                )),
            }
        }
    }
}

fn diagonal_output(
    mode: &str,
    stages: &[StageReport],
    failure: &Option<StageFailure>,
    trajectories: &[MomentSequence],
) -> RunOutput {
    RunOutput {
        result: json!({
            "mode": mode,
            "stages": to_value(&stages),
            "failure": to_value(failure),
            "trajectories": to_value(&trajectories),
        }),
        passed: failure.is_none(),
    }
}

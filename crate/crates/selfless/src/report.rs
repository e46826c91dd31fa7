//! Check reports shared by the exact and the numeric checkers.

use crate::templates::{AlternatingTemplate, CheckParams};
use serde::{Deserialize, Serialize};

/// How the violations in a report were computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    /// Exact rational arithmetic; reported magnitudes are exact.
    Exact,
    /// Double-precision arithmetic.
    Numeric,
}

/// `|trace(u^k)|` for one power of the unitary. Only `k >= 1` is stored
/// because `|trace(u^-k)| = |trace(u^k)|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HaarViolation {
    pub k: u32,
    pub magnitude: f64,
}

/// `|trace(w)|` for one instantiated template.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordViolation {
    pub template: AlternatingTemplate,
    pub magnitude: f64,
}

/// The worst offender of a failed check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    HaarPower { k: u32 },
    Word { template: AlternatingTemplate },
}

/// Outcome of one check of the two moment conditions.
///
/// `haar_violations` covers every `k` with `1 <= k <= N`. `word_violations`
/// lists the templates with nonzero trace magnitude, sorted by magnitude
/// descending (ties in template order); when more than [`WITNESS_CAP`]
/// violating templates exist the list is truncated and `truncated` is set,
/// in which case `violation_count` is a lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub params: CheckParams,
    pub mode: CheckMode,
    pub haar_violations: Vec<HaarViolation>,
    pub word_violations: Vec<WordViolation>,
    /// Total number of templates covered by the check (exact count, may
    /// exceed the number of violations listed).
    #[serde(with = "u128_as_string")]
    pub templates_checked: u128,
    pub violation_count: u64,
    pub truncated: bool,
    pub max_violation: f64,
    pub passed: bool,
    pub witness: Option<Witness>,
}

/// Cap on materialized word violations per report.
pub const WITNESS_CAP: usize = 10_000;

impl CheckReport {
    /// Assemble a report from raw magnitudes, applying the pass rule:
    /// `max < epsilon` when `epsilon > 0`, exact vanishing when `epsilon == 0`.
    pub fn assemble(
        params: CheckParams,
        mode: CheckMode,
        haar_violations: Vec<HaarViolation>,
        mut word_violations: Vec<WordViolation>,
        templates_checked: u128,
        violation_count: u64,
        truncated: bool,
    ) -> Self {
        word_violations.sort_by(|a, b| {
            b.magnitude
                .total_cmp(&a.magnitude)
                .then_with(|| a.template.cmp(&b.template))
        });
        let worst_haar = haar_violations
            .iter()
            .filter(|v| v.magnitude > 0.0)
            .max_by(|a, b| a.magnitude.total_cmp(&b.magnitude))
            .copied();
        let worst_word = word_violations.first().cloned();
        let max_violation = worst_haar
            .map(|v| v.magnitude)
            .unwrap_or(0.0)
            .max(worst_word.as_ref().map(|v| v.magnitude).unwrap_or(0.0));
        let passed = if params.epsilon == 0.0 {
            max_violation == 0.0
        } else {
            max_violation < params.epsilon
        };
        let witness = if passed {
            None
        } else {
            // prefer the worst word witness; fall back to the worst power
            match (&worst_word, &worst_haar) {
                (Some(w), Some(h)) if h.magnitude > w.magnitude => {
                    Some(Witness::HaarPower { k: h.k })
                }
                (Some(w), _) => Some(Witness::Word {
                    template: w.template.clone(),
                }),
                (None, Some(h)) => Some(Witness::HaarPower { k: h.k }),
                (None, None) => None,
            }
        };
        CheckReport {
            params,
            mode,
            haar_violations,
            word_violations,
            templates_checked,
            violation_count,
            truncated,
            max_violation,
            passed,
            witness,
        }
    }
}

mod u128_as_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &u128, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&value.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<u128, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

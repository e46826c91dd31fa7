//! Exact verification of the two moment conditions for group unitaries.
//!
//! For a group word `u` and a finite set `F` of group words, the check asks
//! two things: every power `u^k` with `1 <= k <= N` must miss the identity
//! (condition (i)), and every alternating word built from the centered set of
//! `F` and powers of `u` with at most `N` factors must miss the identity
//! (condition (ii)). Traces of group words are 0 or 1, so both conditions
//! are decided exactly.
//!
//! Condition (ii) is decided without enumerating the full template space:
//! a word of a fixed shape equals the identity exactly when the product of
//! its first half equals the inverse of the product of its second half, so
//! the checker enumerates the two halves independently and joins them on the
//! normal form (hash prefilter, then exact verification). The template space
//! grows like `(p (2N))^(N/2)` per half instead of `(p (2N))^N`, which is
//! what makes diagonal-stage checks at N around 8 feasible.

use crate::report::{CheckMode, CheckReport, HaarViolation, WordViolation, WITNESS_CAP};
use crate::templates::{
    count_templates, instantiate_word, kind_sequence, pattern_lengths, AlternatingTemplate, CheckParams, Slot,
    TemplateError, PATTERNS,
};
use crate::words::{GroupPresentation, ReducedWord, WordError};
use num::bigint::BigInt;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CheckError {
    #[error("the distinguished unitary must not be the identity")]
    IdentityUnitary,
    #[error("template half-space has {0} fillings, past the tractable limit; reduce N or |F|")]
    TooManyTemplates(u128),
    #[error("axial search range is empty")]
    EmptyRange,
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Template(#[from] TemplateError),
}

/// Largest number of half-fillings the checker will enumerate per shape.
const HALF_CAP: u128 = 1 << 24;

/// Verification budget for identity candidates before a report is truncated.
const VERIFY_CAP: u64 = 2_000_000;

/// The centered companion of a set of group words: identities dropped,
/// inverses adjoined, duplicates removed, insertion order kept.
///
/// This is the word-level shadow of centering in the group algebra: for a
/// group word `g` with `g != 1` the centered element is `g` itself and its
/// adjoint is `g^-1`.
pub fn centered_words(
    presentation: &GroupPresentation,
    f: &[ReducedWord],
) -> Result<Vec<ReducedWord>, WordError> {
    let mut out: Vec<ReducedWord> = Vec::new();
    for g in f {
        presentation.validate(g)?;
        if g.is_identity() {
            continue;
        }
        for w in [g.clone(), presentation.invert(g)?] {
            if !out.contains(&w) {
                out.push(w);
            }
        }
    }
    Ok(out)
}

fn hash_word(word: &ReducedWord) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    word.hash(&mut h);
    h.finish()
}

struct HalfEntry {
    slots: Vec<Slot>,
    budget: i64,
}

struct HalfContext<'a> {
    presentation: &'a GroupPresentation,
    centered: &'a [ReducedWord],
    // power index e in -n..=n maps to slot n+e; the e = 0 slot is unused
    u_powers: Vec<ReducedWord>,
    n: i64,
    strict: bool,
}

impl<'a> HalfContext<'a> {
    fn new(
        presentation: &'a GroupPresentation,
        centered: &'a [ReducedWord],
        u: &ReducedWord,
        n: i64,
        strict: bool,
    ) -> Result<Self, WordError> {
        let mut u_powers = Vec::with_capacity(2 * n as usize + 1);
        for e in -n..=n {
            u_powers.push(presentation.power(u, &BigInt::from(e))?);
        }
        Ok(HalfContext {
            presentation,
            centered,
            u_powers,
            n,
            strict,
        })
    }

    fn u_power(&self, e: i64) -> &ReducedWord {
        &self.u_powers[(e + self.n) as usize]
    }

    /// Depth-first enumeration of all fillings of `kinds`, calling `leaf`
    /// with the reduced product, the slots, and the exponent budget used.
    /// Products are built incrementally, one multiplication per node.
    /// Returns `false` if `leaf` requested a stop.
    fn enumerate(
        &self,
        kinds: &[bool],
        leaf: &mut impl FnMut(&ReducedWord, &[Slot], i64) -> bool,
    ) -> Result<bool, WordError> {
        let mut slots: Vec<Slot> = Vec::with_capacity(kinds.len());
        self.enumerate_inner(kinds, &ReducedWord::identity(), &mut slots, 0, leaf)
    }

    fn enumerate_inner(
        &self,
        kinds: &[bool],
        acc: &ReducedWord,
        slots: &mut Vec<Slot>,
        budget: i64,
        leaf: &mut impl FnMut(&ReducedWord, &[Slot], i64) -> bool,
    ) -> Result<bool, WordError> {
        if slots.len() == kinds.len() {
            return Ok(leaf(acc, slots, budget));
        }
        if kinds[slots.len()] {
            for (i, w) in self.centered.iter().enumerate() {
                let next = self.presentation.multiply(acc, w)?;
                slots.push(Slot::Y(i));
                let keep = self.enumerate_inner(kinds, &next, slots, budget, leaf)?;
                slots.pop();
                if !keep {
                    return Ok(false);
                }
            }
        } else {
            for e in -self.n..=self.n {
                if e == 0 {
                    continue;
                }
                if self.strict && budget + e.abs() > self.n {
                    continue;
                }
                let next = self.presentation.multiply(acc, self.u_power(e))?;
                slots.push(Slot::U(e));
                let keep = self.enumerate_inner(kinds, &next, slots, budget + e.abs(), leaf)?;
                slots.pop();
                if !keep {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn half_fillings(kinds: &[bool], p: usize, n: u32) -> u128 {
    kinds
        .iter()
        .map(|is_y| if *is_y { p as u128 } else { 2 * n as u128 })
        .product()
}

/// All templates whose instantiation reduces to the identity, up to the
/// witness cap. Returns `(templates, count, truncated)`.
fn find_vanishing(
    presentation: &GroupPresentation,
    centered: &[ReducedWord],
    u: &ReducedWord,
    params: &CheckParams,
) -> Result<(Vec<AlternatingTemplate>, u64, bool), CheckError> {
    let mut found: Vec<AlternatingTemplate> = Vec::new();
    let mut truncated = false;
    if centered.is_empty() || params.n < 2 {
        return Ok((found, 0, truncated));
    }
    let n = params.n;
    let ctx = HalfContext::new(presentation, centered, u, n as i64, params.strict_exponents)?;
    let mut verified: u64 = 0;

    'shapes: for pattern in PATTERNS {
        for len in pattern_lengths(pattern, n) {
            let kinds = kind_sequence(pattern, len).expect("length was filtered");
            let split = kinds.len() / 2;
            let (pre_kinds, suf_kinds) = kinds.split_at(split);
            for half in [pre_kinds, suf_kinds] {
                let fillings = half_fillings(half, centered.len(), n);
                if fillings > HALF_CAP {
                    return Err(CheckError::TooManyTemplates(fillings));
                }
            }

            let mut prefix_map: HashMap<u64, Vec<HalfEntry>> = HashMap::new();
            ctx.enumerate(pre_kinds, &mut |word, slots, budget| {
                prefix_map.entry(hash_word(word)).or_default().push(HalfEntry {
                    slots: slots.to_vec(),
                    budget,
                });
                true
            })?;

            let mut err: Option<CheckError> = None;
            let finished = ctx.enumerate(suf_kinds, &mut |word, slots, budget| {
                let inverse = presentation
                    .invert(word)
                    .expect("products of valid words are valid");
                let Some(entries) = prefix_map.get(&hash_word(&inverse)) else {
                    return true;
                };
                for entry in entries {
                    if params.strict_exponents && entry.budget + budget > n as i64 {
                        continue;
                    }
                    verified += 1;
                    if verified > VERIFY_CAP {
                        truncated = true;
                        return false;
                    }
                    let full: Vec<Slot> =
                        entry.slots.iter().chain(slots.iter()).copied().collect();
                    let template = AlternatingTemplate::new(full)
                        .expect("halves of an alternating shape alternate");
                    match instantiate_word(&template, centered, u, presentation) {
                        Ok(w) if w.is_identity() => {
                            if found.len() < WITNESS_CAP {
                                found.push(template);
                            } else {
                                truncated = true;
                                return false;
                            }
                        }
                        Ok(_) => {} // hash prefilter false positive
                        Err(e) => {
                            err = Some(e.into());
                            return false;
                        }
                    }
                }
                true
            })?;
            if let Some(e) = err {
                return Err(e);
            }
            if !finished {
                break 'shapes;
            }
        }
    }
    let count = found.len() as u64;
    Ok((found, count, truncated))
}

/// Exact check of conditions (i) and (ii) for a group unitary.
///
/// Every violation magnitude is exactly 0 or 1: a group word traces to 1
/// exactly when it is the identity. `f` may be empty, in which case only
/// condition (i) is checked.
pub fn check_group(
    presentation: &GroupPresentation,
    f: &[ReducedWord],
    u: &ReducedWord,
    params: &CheckParams,
) -> Result<CheckReport, CheckError> {
    presentation.validate(u)?;
    if u.is_identity() {
        return Err(CheckError::IdentityUnitary);
    }
    let centered = centered_words(presentation, f)?;

    let mut haar = Vec::with_capacity(params.n as usize);
    for k in 1..=params.n {
        let power = presentation.power(u, &BigInt::from(k))?;
        haar.push(HaarViolation {
            k,
            magnitude: if power.is_identity() { 1.0 } else { 0.0 },
        });
    }

    let templates_checked = count_templates(centered.len(), params.n, params.strict_exponents);
    let (vanishing, count, truncated) = find_vanishing(presentation, &centered, u, params)?;
    let word_violations = vanishing
        .into_iter()
        .map(|template| WordViolation {
            template,
            magnitude: 1.0,
        })
        .collect();

    Ok(CheckReport::assemble(
        *params,
        CheckMode::Exact,
        haar,
        word_violations,
        templates_checked,
        count,
        truncated,
    ))
}

/// Exponent of one syllable of an axial family: `coeff_n * n + constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentExpr {
    pub coeff_n: BigInt,
    pub constant: BigInt,
}

impl ExponentExpr {
    pub fn constant(c: i64) -> Self {
        ExponentExpr {
            coeff_n: BigInt::from(0),
            constant: BigInt::from(c),
        }
    }

    pub fn linear(coeff: i64) -> Self {
        ExponentExpr {
            coeff_n: BigInt::from(coeff),
            constant: BigInt::from(0),
        }
    }

    pub fn eval(&self, n: i64) -> BigInt {
        &self.coeff_n * BigInt::from(n) + &self.constant
    }
}

/// A candidate family `n -> z_n` given by a word whose exponents may depend
/// linearly on `n`, together with the search range.
#[derive(Debug, Clone, PartialEq)]
pub struct AxialCandidate {
    syllables: Vec<(usize, ExponentExpr)>,
    n_min: i64,
    n_max: i64,
}

impl AxialCandidate {
    pub fn new(
        syllables: Vec<(usize, ExponentExpr)>,
        n_min: i64,
        n_max: i64,
    ) -> Result<Self, CheckError> {
        if n_min > n_max {
            return Err(CheckError::EmptyRange);
        }
        Ok(AxialCandidate {
            syllables,
            n_min,
            n_max,
        })
    }

    pub fn range(&self) -> (i64, i64) {
        (self.n_min, self.n_max)
    }

    pub fn with_range(&self, n_min: i64, n_max: i64) -> Result<Self, CheckError> {
        AxialCandidate::new(self.syllables.clone(), n_min, n_max)
    }

    /// The family member at index `n`, in normal form.
    pub fn eval(&self, presentation: &GroupPresentation, n: i64) -> Result<ReducedWord, WordError> {
        let raw: Vec<(usize, BigInt)> = self
            .syllables
            .iter()
            .map(|(factor, e)| (*factor, e.eval(n)))
            .collect();
        presentation.reduce(&raw)
    }
}

/// Result of an axial search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum AxialOutcome {
    /// The smallest index in range whose member passes with violation
    /// exactly zero.
    Found { n: i64, report: CheckReport },
    /// No member passed; `best` is the report with the smallest violation
    /// (ties to the smallest index) for diagnosis.
    NotFound {
        best_n: Option<i64>,
        best: Option<Box<CheckReport>>,
    },
}

/// Scan the candidate family for the smallest index whose member satisfies
/// both conditions with violation exactly zero. Members that degenerate to
/// the identity are skipped.
pub fn axial_search(
    presentation: &GroupPresentation,
    f: &[ReducedWord],
    candidate: &AxialCandidate,
    params: &CheckParams,
) -> Result<AxialOutcome, CheckError> {
    let mut best: Option<(i64, CheckReport)> = None;
    for n in candidate.n_min..=candidate.n_max {
        let z = candidate.eval(presentation, n)?;
        if z.is_identity() {
            continue;
        }
        let report = check_group(presentation, f, &z, params)?;
        if report.max_violation == 0.0 {
            return Ok(AxialOutcome::Found { n, report });
        }
        let better = match &best {
            Some((_, current)) => report.max_violation < current.max_violation,
            None => true,
        };
        if better {
            best = Some((n, report));
        }
    }
    let (best_n, best) = match best {
        Some((n, report)) => (Some(n), Some(Box::new(report))),
        None => (None, None),
    };
    Ok(AxialOutcome::NotFound { best_n, best })
}

/// Report of a free-product freeness check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreenessReport {
    /// Name of the adjoined free generator playing the Haar unitary.
    pub haar_generator: String,
    pub report: CheckReport,
}

/// Check the moment conditions inside `base * Z` with the adjoined free
/// generator as the unitary.
///
/// Alternating words there interleave nontrivial words of the base group
/// with nonzero powers of a fresh generator, so they are reduced as written
/// and never the identity: the check passes with violation exactly zero for
/// every `f`. This is the executable form of the statement that vanishing
/// alternating moments characterize freeness.
pub fn check_freeness(
    base: &GroupPresentation,
    f: &[ReducedWord],
    params: &CheckParams,
) -> Result<FreenessReport, CheckError> {
    for w in f {
        base.validate(w)?;
    }
    let (extension, z_index) = base.extended_with_haar();
    let u = extension.generator(z_index)?;
    let report = check_group(&extension, f, &u, params)?;
    Ok(FreenessReport {
        haar_generator: extension
            .generator_name(z_index)
            .expect("the adjoined factor exists")
            .to_string(),
        report,
    })
}

//! Alternating word templates and their enumeration.
//!
//! A template is an abstract alternating word: a sequence of slots, each
//! either `Y(i)` (the `i`-th element of a centered set) or `U(n)` (the `n`-th
//! power of a distinguished unitary), with no two consecutive slots of the
//! same kind and at least one slot of each kind. Four boundary patterns are
//! possible, named by whether the word starts and ends with a `Y` or a `U`
//! slot. For a bound `N`, the total number of slots is at most `N` and every
//! exponent satisfies `1 <= |n| <= N`; strict mode additionally bounds the
//! sum of the absolute exponents by `N`.

use crate::algebra::{AlgebraElement, AlgebraError, CenteredSet};
use crate::words::{GroupPresentation, ReducedWord, WordError};
use num::bigint::BigInt;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// One factor of an alternating word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    /// Index into a centered set.
    Y(usize),
    /// Nonzero power of the distinguished unitary.
    U(i64),
}

impl Slot {
    pub fn is_y(self) -> bool {
        matches!(self, Slot::Y(_))
    }
}

/// Boundary pattern of an alternating word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pattern {
    /// Starts with `Y`, ends with `U`.
    W1,
    /// Starts with `U`, ends with `Y`.
    W2,
    /// Starts and ends with `Y`.
    W3,
    /// Starts and ends with `U`.
    W4,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemplateError {
    #[error("template must alternate between Y and U slots")]
    NotAlternating,
    #[error("template needs at least one Y slot and one U slot")]
    MissingKind,
    #[error("exponent must be nonzero")]
    ZeroExponent,
    #[error("Y index {index} out of range for centered set of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("cannot parse `{0}` as a template slot")]
    BadSlot(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// An alternating word template. See the module docs for the invariants.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AlternatingTemplate {
    slots: Vec<Slot>,
}

impl AlternatingTemplate {
    pub fn new(slots: Vec<Slot>) -> Result<Self, TemplateError> {
        if slots.windows(2).any(|w| w[0].is_y() == w[1].is_y()) {
            return Err(TemplateError::NotAlternating);
        }
        let ys = slots.iter().filter(|s| s.is_y()).count();
        if ys == 0 || ys == slots.len() {
            return Err(TemplateError::MissingKind);
        }
        if slots.iter().any(|s| matches!(s, Slot::U(0))) {
            return Err(TemplateError::ZeroExponent);
        }
        Ok(AlternatingTemplate { slots })
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn pattern(&self) -> Pattern {
        let first = self.slots.first().expect("templates are nonempty").is_y();
        let last = self.slots.last().expect("templates are nonempty").is_y();
        match (first, last) {
            (true, false) => Pattern::W1,
            (false, true) => Pattern::W2,
            (true, true) => Pattern::W3,
            (false, false) => Pattern::W4,
        }
    }

    pub fn y_count(&self) -> usize {
        self.slots.iter().filter(|s| s.is_y()).count()
    }

    pub fn u_count(&self) -> usize {
        self.slots.len() - self.y_count()
    }

    pub fn max_abs_exponent(&self) -> i64 {
        self.slots
            .iter()
            .filter_map(|s| match s {
                Slot::U(n) => Some(n.abs()),
                Slot::Y(_) => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Sum of the absolute exponents over all `U` slots.
    pub fn exponent_budget(&self) -> i64 {
        self.slots
            .iter()
            .map(|s| match s {
                Slot::U(n) => n.abs(),
                Slot::Y(_) => 0,
            })
            .sum()
    }

    pub fn max_y_index(&self) -> Option<usize> {
        self.slots
            .iter()
            .filter_map(|s| match s {
                Slot::Y(i) => Some(*i),
                Slot::U(_) => None,
            })
            .max()
    }
}

impl fmt::Display for AlternatingTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .slots
            .iter()
            .map(|s| match s {
                Slot::Y(i) => format!("Y{i}"),
                Slot::U(n) => format!("U{n}"),
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Parse a single `Y<idx>` / `U<exp>` token.
pub fn parse_slot(token: &str) -> Result<Slot, TemplateError> {
    let bad = || TemplateError::BadSlot(token.to_string());
    if let Some(rest) = token.strip_prefix('Y') {
        return rest.parse::<usize>().map(Slot::Y).map_err(|_| bad());
    }
    if let Some(rest) = token.strip_prefix('U') {
        let n = rest.parse::<i64>().map_err(|_| bad())?;
        if n == 0 {
            return Err(TemplateError::ZeroExponent);
        }
        return Ok(Slot::U(n));
    }
    Err(bad())
}

impl FromStr for AlternatingTemplate {
    type Err = TemplateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let slots = s
            .split_whitespace()
            .map(parse_slot)
            .collect::<Result<Vec<_>, _>>()?;
        AlternatingTemplate::new(slots)
    }
}

impl Serialize for AlternatingTemplate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AlternatingTemplate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Parameters of one check: the length/exponent bound `N` and the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    /// Bound on the total factor count and on each exponent.
    pub n: u32,
    /// Tolerance; zero is allowed and demands exact vanishing.
    pub epsilon: f64,
    /// When set, the sum of absolute exponents is also bounded by `n`.
    #[serde(default)]
    pub strict_exponents: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamsError {
    #[error("the bound N must be at least 1")]
    ZeroBound,
    #[error("epsilon must be finite and nonnegative")]
    BadEpsilon,
}

impl CheckParams {
    pub fn new(n: u32, epsilon: f64) -> Result<Self, ParamsError> {
        if n == 0 {
            return Err(ParamsError::ZeroBound);
        }
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(ParamsError::BadEpsilon);
        }
        Ok(CheckParams {
            n,
            epsilon,
            strict_exponents: false,
        })
    }

    pub fn strict(mut self) -> Self {
        self.strict_exponents = true;
        self
    }
}

/// Kind sequence (Y/U as booleans, `true` = Y) for a pattern and length.
/// Lengths incompatible with the pattern yield `None`.
pub(crate) fn kind_sequence(pattern: Pattern, len: usize) -> Option<Vec<bool>> {
    if len < 2 {
        return None;
    }
    let starts_y = matches!(pattern, Pattern::W1 | Pattern::W3);
    let ends_y = matches!(pattern, Pattern::W2 | Pattern::W3);
    // Alternation fixes every kind from the first; the end parity must match.
    let last = if len % 2 == 1 { starts_y } else { !starts_y };
    if last != ends_y {
        return None;
    }
    Some((0..len).map(|i| starts_y == (i % 2 == 0)).collect())
}

pub(crate) fn pattern_lengths(pattern: Pattern, n: u32) -> Vec<usize> {
    (2..=n as usize)
        .filter(|len| kind_sequence(pattern, *len).is_some())
        .collect()
}

pub const PATTERNS: [Pattern; 4] = [Pattern::W1, Pattern::W2, Pattern::W3, Pattern::W4];

/// Every template over a centered set of size `p` with bound `n`, each
/// exactly once, ordered by pattern, then length, then slot-lexicographic.
pub fn enumerate_templates(p: usize, n: u32, strict: bool) -> Vec<AlternatingTemplate> {
    let mut out = Vec::new();
    if p == 0 || n < 2 {
        return out;
    }
    for pattern in PATTERNS {
        for len in pattern_lengths(pattern, n) {
            let kinds = kind_sequence(pattern, len).expect("length was filtered");
            let mut slots: Vec<Slot> = Vec::with_capacity(len);
            fill(&kinds, p, n as i64, strict, &mut slots, &mut |t| {
                out.push(AlternatingTemplate { slots: t.to_vec() })
            });
        }
    }
    out
}

/// Depth-first fill of a kind sequence in lexicographic slot order.
fn fill(
    kinds: &[bool],
    p: usize,
    n: i64,
    strict: bool,
    slots: &mut Vec<Slot>,
    emit: &mut impl FnMut(&[Slot]),
) {
    if slots.len() == kinds.len() {
        emit(slots);
        return;
    }
    let budget_used: i64 = if strict {
        slots
            .iter()
            .map(|s| match s {
                Slot::U(e) => e.abs(),
                Slot::Y(_) => 0,
            })
            .sum()
    } else {
        0
    };
    if kinds[slots.len()] {
        for i in 0..p {
            slots.push(Slot::Y(i));
            fill(kinds, p, n, strict, slots, emit);
            slots.pop();
        }
    } else {
        for e in -n..=n {
            if e == 0 {
                continue;
            }
            if strict && budget_used + e.abs() > n {
                continue;
            }
            slots.push(Slot::U(e));
            fill(kinds, p, n, strict, slots, emit);
            slots.pop();
        }
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Closed-form template count matching [`enumerate_templates`].
///
/// For each pattern and length there is a unique kind sequence with `y` Y
/// slots and `q` U slots; it admits `p^y * (2N)^q` fillings, or
/// `p^y * 2^q * C(N, q)` in strict mode (signed exponent tuples with
/// `sum |e_i| <= N` correspond to sign patterns times compositions).
pub fn count_templates(p: usize, n: u32, strict: bool) -> u128 {
    if p == 0 || n < 2 {
        return 0;
    }
    let mut total: u128 = 0;
    for pattern in PATTERNS {
        for len in pattern_lengths(pattern, n) {
            let kinds = kind_sequence(pattern, len).expect("length was filtered");
            let y = kinds.iter().filter(|k| **k).count() as u32;
            let q = (len as u32) - y;
            let fillings = if strict {
                2u128.pow(q) * binomial(n as u64, q as u64)
            } else {
                (2 * n as u128).pow(q)
            };
            total += (p as u128).pow(y) * fillings;
        }
    }
    total
}

/// Realize a template in the group algebra: `Y(i)` becomes the `i`-th
/// centered element and `U(n)` the `n`-th power of `u`.
pub fn instantiate(
    template: &AlternatingTemplate,
    centered: &CenteredSet,
    u: &AlgebraElement,
) -> Result<AlgebraElement, TemplateError> {
    let mut acc = AlgebraElement::one(u.presentation());
    for slot in template.slots() {
        let factor = match slot {
            Slot::Y(i) => centered
                .centered()
                .get(*i)
                .ok_or(TemplateError::IndexOutOfRange {
                    index: *i,
                    size: centered.len(),
                })?
                .clone(),
            Slot::U(e) => u.unitary_power(*e)?,
        };
        acc = acc.multiply(&factor)?;
    }
    Ok(acc)
}

/// Word-level instantiation for the case where both the centered elements
/// and the unitary are group words; the result is the exact product word.
pub fn instantiate_word(
    template: &AlternatingTemplate,
    centered: &[ReducedWord],
    u: &ReducedWord,
    presentation: &GroupPresentation,
) -> Result<ReducedWord, TemplateError> {
    let mut acc = ReducedWord::identity();
    for slot in template.slots() {
        let factor = match slot {
            Slot::Y(i) => centered
                .get(*i)
                .ok_or(TemplateError::IndexOutOfRange {
                    index: *i,
                    size: centered.len(),
                })?
                .clone(),
            Slot::U(e) => presentation.power(u, &BigInt::from(*e))?,
        };
        acc = presentation.multiply(&acc, &factor)?;
    }
    Ok(acc)
}

//! Normal-form arithmetic in free products of cyclic groups.
//!
//! A presentation is an ordered list of cyclic factors, each either infinite
//! (a copy of the integers) or finite of order `m >= 2`. Elements are kept in
//! syllable normal form: adjacent syllables come from distinct factors, every
//! exponent is nonzero, and exponents of a finite factor of order `m` lie in
//! `1..m`. Two words are equal in the group exactly when their normal forms
//! are identical, which is what makes the exact trace computations downstream
//! decidable.

use num::bigint::BigInt;
use num::{Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Order of one cyclic factor of a free product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FactorOrder {
    /// An infinite cyclic factor.
    Infinite,
    /// A finite cyclic factor of the given order (at least 2).
    Finite(u64),
}

impl FactorOrder {
    pub fn is_finite(self) -> bool {
        matches!(self, FactorOrder::Finite(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("factor index {index} out of range for presentation with {factor_count} factors")]
    InvalidFactorIndex { index: usize, factor_count: usize },
    #[error("exponent {exponent} invalid for factor {index} of order {order}")]
    InvalidExponent {
        index: usize,
        order: u64,
        exponent: String,
    },
    #[error("presentation must have at least one factor")]
    EmptyPresentation,
    #[error("finite factor order must be at least 2, got {0}")]
    OrderTooSmall(u64),
    #[error("generator names must be distinct and nonempty")]
    BadNames,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("word is not valid over the expected presentation")]
    PresentationMismatch,
}

/// A free product of cyclic groups with named generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupPresentation {
    factors: Vec<FactorOrder>,
    names: Vec<String>,
}

/// A group element in syllable normal form.
///
/// The empty syllable list is the identity. Construct values through
/// [`GroupPresentation::reduce`] (or the word builders); the invariants are
/// never violated by the arithmetic in this module.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ReducedWord {
    syllables: Vec<(usize, BigInt)>,
}

impl ReducedWord {
    pub fn identity() -> Self {
        ReducedWord::default()
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllables(&self) -> &[(usize, BigInt)] {
        &self.syllables
    }

    pub fn syllable_count(&self) -> usize {
        self.syllables.len()
    }

    /// Total letter length: the sum of the absolute values of all exponents.
    pub fn letter_length(&self) -> BigInt {
        self.syllables.iter().map(|(_, e)| e.abs()).sum()
    }
}

impl GroupPresentation {
    /// Build a presentation from `(name, order)` pairs.
    pub fn new<I, S>(factors: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = (S, FactorOrder)>,
        S: Into<String>,
    {
        let mut names = Vec::new();
        let mut orders = Vec::new();
        for (name, order) in factors {
            let name = name.into();
            if name.is_empty() {
                return Err(WordError::BadNames);
            }
            if let FactorOrder::Finite(m) = order {
                if m < 2 {
                    return Err(WordError::OrderTooSmall(m));
                }
            }
            names.push(name);
            orders.push(order);
        }
        if orders.is_empty() {
            return Err(WordError::EmptyPresentation);
        }
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(WordError::BadNames);
        }
        Ok(GroupPresentation {
            factors: orders,
            names,
        })
    }

    /// The free group of the given rank, generators named `a`, `b`, `c`, ...
    pub fn free_group(rank: usize) -> Result<Self, WordError> {
        if rank == 0 || rank > 26 {
            return Err(WordError::EmptyPresentation);
        }
        GroupPresentation::new((0..rank).map(|i| {
            let name = ((b'a' + i as u8) as char).to_string();
            (name, FactorOrder::Infinite)
        }))
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn factor_order(&self, index: usize) -> Option<FactorOrder> {
        self.factors.get(index).copied()
    }

    pub fn generator_name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(|s| s.as_str())
    }

    pub fn factor_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// The generator of the given factor as a reduced word.
    pub fn generator(&self, index: usize) -> Result<ReducedWord, WordError> {
        self.reduce(&[(index, BigInt::one())])
    }

    /// Convenience builder from `(generator name, exponent)` pairs.
    pub fn word(&self, syllables: &[(&str, i64)]) -> Result<ReducedWord, WordError> {
        let raw: Vec<(usize, BigInt)> = syllables
            .iter()
            .map(|(name, e)| {
                let idx = self
                    .factor_index(name)
                    .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
                Ok((idx, BigInt::from(*e)))
            })
            .collect::<Result<_, WordError>>()?;
        self.reduce(&raw)
    }

    fn normalize_exponent(&self, index: usize, exponent: &BigInt) -> BigInt {
        match self.factors[index] {
            FactorOrder::Infinite => exponent.clone(),
            FactorOrder::Finite(m) => exponent.mod_floor(&BigInt::from(m)),
        }
    }

    /// Check that a word respects this presentation's invariants.
    pub fn validate(&self, word: &ReducedWord) -> Result<(), WordError> {
        let mut last: Option<usize> = None;
        for (index, exponent) in &word.syllables {
            if *index >= self.factors.len() {
                return Err(WordError::InvalidFactorIndex {
                    index: *index,
                    factor_count: self.factors.len(),
                });
            }
            if last == Some(*index) || exponent.is_zero() {
                return Err(WordError::PresentationMismatch);
            }
            if let FactorOrder::Finite(m) = self.factors[*index] {
                if exponent.is_negative() || *exponent >= BigInt::from(m) {
                    return Err(WordError::PresentationMismatch);
                }
            }
            last = Some(*index);
        }
        Ok(())
    }

    /// Reduce a raw syllable list to normal form.
    ///
    /// Single left-to-right pass with a stack: exponents are normalized per
    /// factor (mod order for finite factors), adjacent same-factor syllables
    /// merge, and zero exponents are deleted. Merging may expose a new stack
    /// top, which the next incoming syllable is compared against, so the
    /// result is fully reduced after one pass.
    pub fn reduce(&self, syllables: &[(usize, BigInt)]) -> Result<ReducedWord, WordError> {
        let mut stack: Vec<(usize, BigInt)> = Vec::with_capacity(syllables.len());
        for (index, exponent) in syllables {
            if *index >= self.factors.len() {
                return Err(WordError::InvalidFactorIndex {
                    index: *index,
                    factor_count: self.factors.len(),
                });
            }
            let exponent = self.normalize_exponent(*index, exponent);
            if exponent.is_zero() {
                continue;
            }
            match stack.last_mut() {
                Some((top, e)) if *top == *index => {
                    let merged = self.normalize_exponent(*index, &(&*e + &exponent));
                    if merged.is_zero() {
                        stack.pop();
                    } else {
                        *e = merged;
                    }
                }
                _ => stack.push((*index, exponent)),
            }
        }
        Ok(ReducedWord { syllables: stack })
    }

    /// Product of two reduced words, in normal form.
    pub fn multiply(&self, x: &ReducedWord, y: &ReducedWord) -> Result<ReducedWord, WordError> {
        self.validate(x)?;
        self.validate(y)?;
        let mut raw = Vec::with_capacity(x.syllables.len() + y.syllables.len());
        raw.extend_from_slice(&x.syllables);
        raw.extend_from_slice(&y.syllables);
        self.reduce(&raw)
    }

    /// Inverse of a reduced word.
    pub fn invert(&self, x: &ReducedWord) -> Result<ReducedWord, WordError> {
        self.validate(x)?;
        let syllables = x
            .syllables
            .iter()
            .rev()
            .map(|(index, e)| {
                let inv = match self.factors[*index] {
                    FactorOrder::Infinite => -e,
                    FactorOrder::Finite(m) => BigInt::from(m) - e,
                };
                (*index, inv)
            })
            .collect();
        // Reversal preserves the adjacency invariant; exponents stay in range.
        Ok(ReducedWord { syllables })
    }

    /// Integer power of a reduced word (square-and-multiply).
    pub fn power(&self, x: &ReducedWord, exponent: &BigInt) -> Result<ReducedWord, WordError> {
        self.validate(x)?;
        if exponent.is_zero() || x.is_identity() {
            return Ok(ReducedWord::identity());
        }
        // Single-syllable words exponentiate directly.
        if x.syllables.len() == 1 {
            let (index, e) = &x.syllables[0];
            return self.reduce(&[(*index, e * exponent)]);
        }
        let base = if exponent.is_negative() {
            self.invert(x)?
        } else {
            x.clone()
        };
        let mut remaining = exponent.abs();
        let mut acc = ReducedWord::identity();
        let mut sq = base;
        let two = BigInt::from(2);
        while !remaining.is_zero() {
            if remaining.is_odd() {
                acc = self.multiply(&acc, &sq)?;
            }
            remaining /= &two;
            if !remaining.is_zero() {
                sq = self.multiply(&sq, &sq)?;
            }
        }
        Ok(acc)
    }

    /// Render a word in the `gen^exp` text syntax; the identity prints as `e`.
    pub fn format_word(&self, word: &ReducedWord) -> String {
        if word.is_identity() {
            return "e".to_string();
        }
        word.syllables
            .iter()
            .map(|(index, e)| {
                let name = self.names.get(*index).map(|s| s.as_str()).unwrap_or("?");
                if e.is_one() {
                    name.to_string()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Extend by one fresh infinite-order generator; returns the extension and
    /// the new factor's index. Used to model an adjoined Haar unitary.
    pub fn extended_with_haar(&self) -> (GroupPresentation, usize) {
        let mut name = "z".to_string();
        let mut counter = 0u32;
        while self.names.iter().any(|n| *n == name) {
            name = format!("z{counter}");
            counter += 1;
        }
        let mut factors = self.factors.clone();
        let mut names = self.names.clone();
        factors.push(FactorOrder::Infinite);
        names.push(name);
        let index = factors.len() - 1;
        (GroupPresentation { factors, names }, index)
    }

    /// True when `self` is `base` extended by exactly one extra infinite factor.
    pub fn is_haar_extension_of(&self, base: &GroupPresentation) -> bool {
        self.factors.len() == base.factors.len() + 1
            && self.factors[..base.factors.len()] == base.factors[..]
            && self.names[..base.names.len()] == base.names[..]
            && self.factors.last() == Some(&FactorOrder::Infinite)
    }
}

/// Image of `word` under the homomorphism that fixes `base` and sends the
/// adjoined generator of `extension` to `target`.
///
/// `word` must live over `extension = base * <z>` and `target` over `base`.
/// The map is multiplicative, so the image is computed syllable by syllable
/// and reduced.
pub fn substitute(
    extension: &GroupPresentation,
    base: &GroupPresentation,
    word: &ReducedWord,
    target: &ReducedWord,
) -> Result<ReducedWord, WordError> {
    if !extension.is_haar_extension_of(base) {
        return Err(WordError::PresentationMismatch);
    }
    extension.validate(word)?;
    base.validate(target)?;
    let z_index = base.factor_count();
    let mut acc = ReducedWord::identity();
    for (index, e) in &word.syllables {
        let piece = if *index == z_index {
            base.power(target, e)?
        } else {
            base.reduce(&[(*index, e.clone())])?
        };
        acc = base.multiply(&acc, &piece)?;
    }
    Ok(acc)
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .zip(&self.names)
            .map(|(order, name)| match order {
                FactorOrder::Infinite => format!("Z<{name}>"),
                FactorOrder::Finite(m) => format!("Z{m}<{name}>"),
            })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f2() -> GroupPresentation {
        GroupPresentation::free_group(2).unwrap()
    }

    fn z2z3() -> GroupPresentation {
        GroupPresentation::new([("s", FactorOrder::Finite(2)), ("t", FactorOrder::Finite(3))])
            .unwrap()
    }

    #[test]
    fn cancellation_to_identity() {
        let p = f2();
        let w = p.word(&[("a", 1), ("a", -1)]).unwrap();
        assert!(w.is_identity());
    }

    #[test]
    fn already_reduced_in_torsion_product() {
        let p = z2z3();
        let w = p.word(&[("s", 1), ("t", 1), ("s", 1), ("t", 2)]).unwrap();
        assert_eq!(w.syllable_count(), 4);
        assert_eq!(p.format_word(&w), "s t s t^2");
    }

    #[test]
    fn exponent_wraps_mod_order() {
        let p = z2z3();
        let w = p.word(&[("t", 5)]).unwrap();
        assert_eq!(p.format_word(&w), "t^2");
    }

    #[test]
    fn invalid_factor_index_rejected() {
        let p = f2();
        let err = p.reduce(&[(7, BigInt::one())]).unwrap_err();
        assert!(matches!(err, WordError::InvalidFactorIndex { index: 7, .. }));
    }

    #[test]
    fn multiply_examples() {
        let p = f2();
        let ab = p.word(&[("a", 1), ("b", 1)]).unwrap();
        let ba_inv = p.word(&[("b", -1), ("a", -1)]).unwrap();
        assert!(p.multiply(&ab, &ba_inv).unwrap().is_identity());

        let one_gen = GroupPresentation::free_group(1).unwrap();
        let a2 = one_gen.word(&[("a", 2)]).unwrap();
        let a3 = one_gen.word(&[("a", 3)]).unwrap();
        let a5 = one_gen.word(&[("a", 5)]).unwrap();
        assert_eq!(one_gen.multiply(&a2, &a3).unwrap(), a5);
    }

    #[test]
    fn power_merges_inner_runs() {
        // (a^n b a^n)^k has inner a^n * a^n merges; cross-check the oracle.
        let p = f2();
        for n in [1i64, 2, 5] {
            let base = p.word(&[("a", n), ("b", 1), ("a", n)]).unwrap();
            for k in [2i64, 3, 4] {
                let pow = p.power(&base, &BigInt::from(k)).unwrap();
                let mut raw = Vec::new();
                for _ in 0..k {
                    raw.extend_from_slice(base.syllables());
                }
                assert_eq!(pow.syllables(), oracle::normal_form(&p, &raw));
                assert_eq!(pow.syllable_count() as i64, 2 * k + 1);
            }
        }
    }

    #[test]
    fn invert_examples() {
        let p = f2();
        assert!(p.invert(&ReducedWord::identity()).unwrap().is_identity());
        let w = p.word(&[("a", 1), ("b", -1)]).unwrap();
        let expected = p.word(&[("b", 1), ("a", -1)]).unwrap();
        assert_eq!(p.invert(&w).unwrap(), expected);

        let q = z2z3();
        let t = q.word(&[("t", 1)]).unwrap();
        let t2 = q.word(&[("t", 2)]).unwrap();
        assert_eq!(q.invert(&t).unwrap(), t2);
    }

    #[test]
    fn substitute_examples() {
        let gamma = f2();
        let (ext, z) = gamma.extended_with_haar();
        let a5 = gamma.word(&[("a", 5)]).unwrap();

        let w = ext.reduce(&[(z, BigInt::one())]).unwrap();
        assert_eq!(substitute(&ext, &gamma, &w, &a5).unwrap(), a5);

        let b_zinv = ext
            .reduce(&[(1, BigInt::one()), (z, BigInt::from(-1))])
            .unwrap();
        let a = gamma.word(&[("a", 1)]).unwrap();
        let expected = gamma.word(&[("b", 1), ("a", -1)]).unwrap();
        assert_eq!(substitute(&ext, &gamma, &b_zinv, &a).unwrap(), expected);
    }

    #[test]
    fn substitute_conjugation_word() {
        // w = a z a z^-1 with z -> a^3 b a^3 reduces to a^4 b a b^-1 a^-3,
        // which in particular is not the identity.
        let gamma = f2();
        let (ext, z) = gamma.extended_with_haar();
        let w = ext
            .reduce(&[
                (0, BigInt::one()),
                (z, BigInt::one()),
                (0, BigInt::one()),
                (z, BigInt::from(-1)),
            ])
            .unwrap();
        let target = gamma.word(&[("a", 3), ("b", 1), ("a", 3)]).unwrap();
        let image = substitute(&ext, &gamma, &w, &target).unwrap();

        let mut raw: Vec<(usize, BigInt)> = vec![(0, BigInt::one())];
        raw.extend_from_slice(target.syllables());
        raw.push((0, BigInt::one()));
        raw.extend_from_slice(gamma.invert(&target).unwrap().syllables());
        assert_eq!(image.syllables(), oracle::normal_form(&gamma, &raw));

        let expected = gamma
            .word(&[("a", 4), ("b", 1), ("a", 1), ("b", -1), ("a", -3)])
            .unwrap();
        assert_eq!(image, expected);
        assert!(!image.is_identity());
    }

    #[test]
    fn haar_extension_picks_fresh_name() {
        let p = GroupPresentation::new([
            ("a", FactorOrder::Infinite),
            ("z", FactorOrder::Infinite),
        ])
        .unwrap();
        let (ext, idx) = p.extended_with_haar();
        assert_eq!(ext.generator_name(idx), Some("z0"));
        assert!(ext.is_haar_extension_of(&p));
    }

    #[test]
    fn format_identity_and_powers() {
        let p = f2();
        assert_eq!(p.format_word(&ReducedWord::identity()), "e");
        let w = p.word(&[("a", 3), ("b", -1), ("a", 1)]).unwrap();
        assert_eq!(p.format_word(&w), "a^3 b^-1 a");
    }

    fn presentations() -> Vec<GroupPresentation> {
        vec![
            GroupPresentation::free_group(1).unwrap(),
            f2(),
            GroupPresentation::free_group(3).unwrap(),
            z2z3(),
            GroupPresentation::new([
                ("s", FactorOrder::Finite(4)),
                ("a", FactorOrder::Infinite),
            ])
            .unwrap(),
        ]
    }

    fn raw_syllables(
        factor_count: usize,
        max_len: usize,
    ) -> impl Strategy<Value = Vec<(usize, BigInt)>> {
        proptest::collection::vec((0..factor_count, -6i64..=6), 0..=max_len)
            .prop_map(|v| v.into_iter().map(|(f, e)| (f, BigInt::from(e))).collect())
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent(which in 0usize..5, raw in raw_syllables(2, 24)) {
            let p = &presentations()[which];
            let raw: Vec<_> = raw
                .into_iter()
                .filter(|(f, _)| *f < p.factor_count())
                .collect();
            let once = p.reduce(&raw).unwrap();
            let twice = p.reduce(once.syllables()).unwrap();
            prop_assert_eq!(&once, &twice);
            p.validate(&once).unwrap();
        }

        #[test]
        fn reduce_agrees_with_letter_oracle(which in 0usize..5, raw in raw_syllables(2, 12)) {
            let p = &presentations()[which];
            let raw: Vec<_> = raw
                .into_iter()
                .filter(|(f, _)| *f < p.factor_count())
                .collect();
            let reduced = p.reduce(&raw).unwrap();
            prop_assert_eq!(reduced.syllables(), oracle::normal_form(p, &raw));
        }

        #[test]
        fn group_axioms(
            which in 0usize..5,
            xr in raw_syllables(2, 50),
            yr in raw_syllables(2, 50),
            zr in raw_syllables(2, 50),
        ) {
            let p = &presentations()[which];
            let keep = |v: Vec<(usize, BigInt)>| -> Vec<(usize, BigInt)> {
                v.into_iter().filter(|(f, _)| *f < p.factor_count()).collect()
            };
            let x = p.reduce(&keep(xr)).unwrap();
            let y = p.reduce(&keep(yr)).unwrap();
            let z = p.reduce(&keep(zr)).unwrap();

            let xy_z = p.multiply(&p.multiply(&x, &y).unwrap(), &z).unwrap();
            let x_yz = p.multiply(&x, &p.multiply(&y, &z).unwrap()).unwrap();
            prop_assert_eq!(xy_z, x_yz);

            let inv = p.invert(&x).unwrap();
            prop_assert!(p.multiply(&x, &inv).unwrap().is_identity());
            prop_assert_eq!(p.invert(&inv).unwrap(), x);
        }

        #[test]
        fn substitute_is_multiplicative(
            wr1 in raw_syllables(3, 10),
            wr2 in raw_syllables(3, 10),
            tr in raw_syllables(2, 6),
        ) {
            let gamma = f2();
            let (ext, _) = gamma.extended_with_haar();
            let w1 = ext.reduce(&wr1).unwrap();
            let w2 = ext.reduce(&wr2).unwrap();
            let target = gamma.reduce(&tr).unwrap();

            let lhs = substitute(&ext, &gamma, &ext.multiply(&w1, &w2).unwrap(), &target).unwrap();
            let rhs = gamma
                .multiply(
                    &substitute(&ext, &gamma, &w1, &target).unwrap(),
                    &substitute(&ext, &gamma, &w2, &target).unwrap(),
                )
                .unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn power_matches_repeated_multiplication(
            raw in raw_syllables(2, 6),
            k in -8i64..=8,
        ) {
            let p = f2();
            let x = p.reduce(&raw).unwrap();
            let pow = p.power(&x, &BigInt::from(k)).unwrap();
            let base = if k < 0 { p.invert(&x).unwrap() } else { x };
            let mut acc = ReducedWord::identity();
            for _ in 0..k.abs() {
                acc = p.multiply(&acc, &base).unwrap();
            }
            prop_assert_eq!(pow, acc);
        }
    }
}

//! The group algebra of a presentation with its canonical trace.
//!
//! Elements are finite linear combinations of reduced words with exact
//! Gaussian-rational coefficients, so every trace computed here is an exact
//! rational number and "the violation is zero" is a literal equality. The
//! trace sends a group word to 1 if it is the identity and to 0 otherwise;
//! group words are orthonormal in the induced 2-norm.

use crate::words::{GroupPresentation, ReducedWord, WordError};
use num::complex::Complex;
use num::{BigRational, FromPrimitive, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Exact scalar: a complex number with rational real and imaginary parts.
pub type Exact = Complex<BigRational>;

/// `n` as an exact scalar.
pub fn exact_int(n: i64) -> Exact {
    Complex::new(BigRational::from_i64(n).unwrap(), BigRational::zero())
}

/// `num/den` as an exact scalar. Panics when `den == 0`.
pub fn exact_ratio(num: i64, den: i64) -> Exact {
    assert!(den != 0, "zero denominator");
    Complex::new(
        BigRational::new(num.into(), den.into()),
        BigRational::zero(),
    )
}

/// `(re.0/re.1) + (im.0/im.1) i` as an exact scalar.
pub fn exact_complex(re: (i64, i64), im: (i64, i64)) -> Exact {
    assert!(re.1 != 0 && im.1 != 0, "zero denominator");
    Complex::new(
        BigRational::new(re.0.into(), re.1.into()),
        BigRational::new(im.0.into(), im.1.into()),
    )
}

/// |c|^2 as an exact rational.
pub fn exact_norm_sqr(c: &Exact) -> BigRational {
    &c.re * &c.re + &c.im * &c.im
}

/// |c| as a float (used only for report magnitudes).
pub fn exact_abs(c: &Exact) -> f64 {
    exact_norm_sqr(c).to_f64().unwrap_or(f64::NAN).sqrt()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("elements live over different presentations")]
    PresentationMismatch,
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A finite formal linear combination of reduced words.
///
/// Zero coefficients are never stored, and the support is kept in a sorted
/// map, so structural equality coincides with equality in the group algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraElement {
    presentation: GroupPresentation,
    terms: BTreeMap<ReducedWord, Exact>,
}

impl AlgebraElement {
    pub fn zero(presentation: &GroupPresentation) -> Self {
        AlgebraElement {
            presentation: presentation.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(presentation: &GroupPresentation) -> Self {
        AlgebraElement::from_word(presentation, ReducedWord::identity())
            .expect("identity word is always valid")
    }

    /// The word `w` with coefficient 1.
    pub fn from_word(
        presentation: &GroupPresentation,
        word: ReducedWord,
    ) -> Result<Self, AlgebraError> {
        presentation.validate(&word)?;
        let mut terms = BTreeMap::new();
        terms.insert(word, exact_int(1));
        Ok(AlgebraElement {
            presentation: presentation.clone(),
            terms,
        })
    }

    pub fn from_terms<I>(presentation: &GroupPresentation, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (ReducedWord, Exact)>,
    {
        let mut map: BTreeMap<ReducedWord, Exact> = BTreeMap::new();
        for (word, coeff) in terms {
            presentation.validate(&word)?;
            let entry = map.entry(word).or_insert_with(|| exact_int(0));
            *entry = entry.clone() + coeff;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(AlgebraElement {
            presentation: presentation.clone(),
            terms: map,
        })
    }

    pub fn presentation(&self) -> &GroupPresentation {
        &self.presentation
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ReducedWord, &Exact)> {
        self.terms.iter()
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, word: &ReducedWord) -> Exact {
        self.terms.get(word).cloned().unwrap_or_else(|| exact_int(0))
    }

    fn check_compatible(&self, other: &AlgebraElement) -> Result<(), AlgebraError> {
        if self.presentation == other.presentation {
            Ok(())
        } else {
            Err(AlgebraError::PresentationMismatch)
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.check_compatible(other)?;
        let mut terms = self.terms.clone();
        for (word, coeff) in &other.terms {
            let entry = terms.entry(word.clone()).or_insert_with(|| exact_int(0));
            *entry = entry.clone() + coeff.clone();
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(AlgebraElement {
            presentation: self.presentation.clone(),
            terms,
        })
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.add(&other.scale(&exact_int(-1)))
    }

    pub fn scale(&self, scalar: &Exact) -> AlgebraElement {
        if scalar.is_zero() {
            return AlgebraElement::zero(&self.presentation);
        }
        AlgebraElement {
            presentation: self.presentation.clone(),
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c * scalar))
                .collect(),
        }
    }

    /// Convolution product.
    pub fn multiply(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        self.check_compatible(other)?;
        let mut terms: BTreeMap<ReducedWord, Exact> = BTreeMap::new();
        for (wx, cx) in &self.terms {
            for (wy, cy) in &other.terms {
                let word = self.presentation.multiply(wx, wy)?;
                let entry = terms.entry(word).or_insert_with(|| exact_int(0));
                *entry = entry.clone() + cx * cy;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(AlgebraElement {
            presentation: self.presentation.clone(),
            terms,
        })
    }

    /// Adjoint: coefficients conjugated, words inverted.
    pub fn adjoint(&self) -> AlgebraElement {
        AlgebraElement {
            presentation: self.presentation.clone(),
            terms: self
                .terms
                .iter()
                .map(|(w, c)| {
                    let inv = self
                        .presentation
                        .invert(w)
                        .expect("stored words are valid");
                    (inv, c.conj())
                })
                .collect(),
        }
    }

    /// The canonical trace: the coefficient of the identity word.
    pub fn trace(&self) -> Exact {
        self.coefficient(&ReducedWord::identity())
    }

    /// `x - trace(x) 1`, which always has trace zero.
    pub fn center(&self) -> AlgebraElement {
        let t = self.trace();
        if t.is_zero() {
            return self.clone();
        }
        self.sub(&AlgebraElement::one(&self.presentation).scale(&t))
            .expect("same presentation")
    }

    /// `n`-th power of a unitary: negative exponents go through the adjoint.
    pub fn unitary_power(&self, n: i64) -> Result<AlgebraElement, AlgebraError> {
        let base = if n < 0 { self.adjoint() } else { self.clone() };
        let mut acc = AlgebraElement::one(&self.presentation);
        for _ in 0..n.unsigned_abs() {
            acc = acc.multiply(&base)?;
        }
        Ok(acc)
    }

    /// Exact value of `trace(x* x)`, which equals the squared 2-norm.
    pub fn two_norm_squared(&self) -> BigRational {
        // Group words are orthonormal, so this is the coefficient l2 norm.
        self.terms.values().map(exact_norm_sqr).sum()
    }

    pub fn two_norm(&self) -> f64 {
        self.two_norm_squared().to_f64().unwrap_or(f64::NAN).sqrt()
    }

    /// The l1 coefficient norm, an upper bound for the reduced C*-norm.
    pub fn norm_upper(&self) -> f64 {
        self.terms.values().map(exact_abs).sum()
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                format!(
                    "({}) {}",
                    format_exact(c),
                    self.presentation.format_word(w)
                )
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Canonical text form of an exact scalar, e.g. `2`, `-1/3`, `1/2+3i`, `-i`.
pub fn format_exact(c: &Exact) -> String {
    fn rational(r: &BigRational) -> String {
        r.to_string()
    }
    if c.is_zero() {
        return "0".to_string();
    }
    if c.im.is_zero() {
        return rational(&c.re);
    }
    let im = if c.im == BigRational::from_i64(1).unwrap() {
        "i".to_string()
    } else if c.im == BigRational::from_i64(-1).unwrap() {
        "-i".to_string()
    } else {
        format!("{}i", rational(&c.im))
    };
    if c.re.is_zero() {
        im
    } else if c.im.is_negative() {
        format!("{}{}", rational(&c.re), im)
    } else {
        format!("{}+{}", rational(&c.re), im)
    }
}

/// A finite set together with its centered, adjoint-closed companion.
#[derive(Debug, Clone)]
pub struct CenteredSet {
    originals: Vec<AlgebraElement>,
    centered: Vec<AlgebraElement>,
}

impl CenteredSet {
    pub fn originals(&self) -> &[AlgebraElement] {
        &self.originals
    }

    pub fn centered(&self) -> &[AlgebraElement] {
        &self.centered
    }

    pub fn len(&self) -> usize {
        self.centered.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centered.is_empty()
    }
}

/// Center every element of `set` and close under adjoints.
///
/// For each `x` the list receives `x - trace(x) 1` and its adjoint
/// `x* - conj(trace(x)) 1`, deduplicated by normal-form equality and with
/// zero elements dropped. Every member has trace exactly zero and the result
/// is closed under the adjoint.
pub fn centered_set(set: &[AlgebraElement]) -> Result<CenteredSet, AlgebraError> {
    if let Some(first) = set.first() {
        for x in &set[1..] {
            first.check_compatible(x)?;
        }
    }
    let mut centered: Vec<AlgebraElement> = Vec::new();
    for x in set {
        for candidate in [x.center(), x.adjoint().center()] {
            if !candidate.is_zero() && !centered.contains(&candidate) {
                centered.push(candidate);
            }
        }
    }
    Ok(CenteredSet {
        originals: set.to_vec(),
        centered,
    })
}

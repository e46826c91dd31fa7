//! Text syntax for presentations, words, algebra elements, and axial
//! families.
//!
//! Words are whitespace-separated `gen^exp` tokens with the exponent
//! defaulting to 1 and the identity spelled `e`, e.g. `a^3 b^-1 a`.
//! Presentations are `F2`-style free groups or `*`-joined cyclic factors
//! like `Z2*Z3`. Elements are `coeff * word` terms joined by `+`/`-`, with
//! Gaussian-rational coefficients written without inner spaces
//! (`3/4`, `-2i`, `1/2+1/3i`). Family words may use exponents linear in the
//! family index, e.g. `a^n b a^n` or `a^-2n`.

use num::bigint::BigInt;
use num::{BigRational, Zero};
use selfless::algebra::{format_exact, AlgebraElement, Exact};
use selfless::checker::{AxialCandidate, CheckError, ExponentExpr};
use selfless::words::{FactorOrder, GroupPresentation, ReducedWord};
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SyntaxError {
    #[error("cannot parse presentation `{0}`; expected F<r> or Z<m> factors joined by `*`")]
    BadPresentation(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed exponent in `{0}`")]
    BadExponent(String),
    #[error("empty word; write `e` for the identity")]
    EmptyWord,
    #[error("cannot parse scalar `{0}`")]
    BadScalar(String),
    #[error("malformed element near `{0}`")]
    BadElement(String),
    #[error(transparent)]
    Word(#[from] selfless::words::WordError),
    #[error(transparent)]
    Algebra(#[from] selfless::algebra::AlgebraError),
}

/// Generator names for `*`-joined cyclic factor syntax.
const STAR_NAMES: [&str; 8] = ["s", "t", "u", "v", "w", "x", "y", "z"];

/// Parse `F2`, `F3`, ... or `Z2*Z3*Z`-style presentation strings.
pub fn parse_presentation(text: &str) -> Result<GroupPresentation, SyntaxError> {
    let text = text.trim();
    let bad = || SyntaxError::BadPresentation(text.to_string());
    if let Some(rank) = text.strip_prefix('F') {
        let rank: usize = rank.parse().map_err(|_| bad())?;
        return GroupPresentation::free_group(rank).map_err(|_| bad());
    }
    let factors = text
        .split('*')
        .map(|tok| {
            let tok = tok.trim();
            if tok == "Z" {
                return Ok(FactorOrder::Infinite);
            }
            if let Some(m) = tok.strip_prefix('Z') {
                let m: u64 = m.parse().map_err(|_| bad())?;
                if m < 2 {
                    return Err(bad());
                }
                return Ok(FactorOrder::Finite(m));
            }
            Err(bad())
        })
        .collect::<Result<Vec<_>, _>>()?;
    if factors.is_empty() || factors.len() > STAR_NAMES.len() {
        return Err(bad());
    }
    GroupPresentation::new(
        factors
            .into_iter()
            .enumerate()
            .map(|(i, order)| (STAR_NAMES[i], order)),
    )
    .map_err(|_| bad())
}

fn split_token(token: &str) -> (&str, Option<&str>) {
    match token.split_once('^') {
        Some((name, exp)) => (name, Some(exp)),
        None => (token, None),
    }
}

/// Parse a word in the `gen^exp` syntax over the given presentation.
/// The result is reduced; `parse_word(format_word(w)) == w`.
pub fn parse_word(
    text: &str,
    presentation: &GroupPresentation,
) -> Result<ReducedWord, SyntaxError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(SyntaxError::EmptyWord);
    }
    if text == "e" {
        return Ok(ReducedWord::identity());
    }
    let mut raw: Vec<(usize, BigInt)> = Vec::new();
    for token in text.split_whitespace() {
        let (name, exp) = split_token(token);
        let index = presentation
            .factor_index(name)
            .ok_or_else(|| SyntaxError::UnknownGenerator(name.to_string()))?;
        let exponent = match exp {
            None => BigInt::from(1),
            Some(e) => {
                BigInt::from_str(e).map_err(|_| SyntaxError::BadExponent(token.to_string()))?
            }
        };
        raw.push((index, exponent));
    }
    Ok(presentation.reduce(&raw)?)
}

/// Parse a family word whose exponents may be linear in `n`, and wrap it
/// with a search range.
pub fn parse_family(
    text: &str,
    presentation: &GroupPresentation,
    n_min: i64,
    n_max: i64,
) -> Result<AxialCandidate, SyntaxError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(SyntaxError::EmptyWord);
    }
    let mut syllables: Vec<(usize, ExponentExpr)> = Vec::new();
    for token in text.split_whitespace() {
        let (name, exp) = split_token(token);
        let index = presentation
            .factor_index(name)
            .ok_or_else(|| SyntaxError::UnknownGenerator(name.to_string()))?;
        let expr = match exp {
            None => ExponentExpr::constant(1),
            Some(e) => parse_exponent_expr(e)
                .ok_or_else(|| SyntaxError::BadExponent(token.to_string()))?,
        };
        syllables.push((index, expr));
    }
    AxialCandidate::new(syllables, n_min, n_max).map_err(|e| match e {
        CheckError::EmptyRange => SyntaxError::BadElement("empty search range".into()),
        other => SyntaxError::BadElement(other.to_string()),
    })
}

fn parse_exponent_expr(text: &str) -> Option<ExponentExpr> {
    if let Some(coeff) = text.strip_suffix('n') {
        let coeff = match coeff {
            "" => 1,
            "-" => -1,
            c => c.parse::<i64>().ok()?,
        };
        return Some(ExponentExpr::linear(coeff));
    }
    text.parse::<i64>().ok().map(ExponentExpr::constant)
}

fn parse_rational(text: &str) -> Option<BigRational> {
    match text.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p).ok()?;
            let q = BigInt::from_str(q).ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(BigInt::from_str(text).ok()?)),
    }
}

/// Parse a Gaussian-rational scalar written without inner whitespace:
/// `5`, `-1/3`, `i`, `-i`, `2/3i`, `1/2+1/3i`, `2-i`.
pub fn parse_scalar(text: &str) -> Result<Exact, SyntaxError> {
    let bad = || SyntaxError::BadScalar(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(bad());
    }
    if !s.ends_with('i') {
        return Ok(Exact::new(parse_rational(s).ok_or_else(bad)?, BigRational::zero()));
    }
    let body = &s[..s.len() - 1];
    // Split off a trailing signed rational for the imaginary part: the sign
    // must follow a digit, otherwise it belongs to the imaginary part itself.
    let split = body
        .char_indices()
        .skip(1)
        .filter(|(i, c)| {
            (*c == '+' || *c == '-')
                && body[..*i].chars().last().is_some_and(|p| p.is_ascii_digit())
        })
        .map(|(i, _)| i)
        .last();
    let (re_str, im_str) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("", body),
    };
    let im = match im_str {
        "" | "+" => BigRational::from_integer(1.into()),
        "-" => BigRational::from_integer(BigInt::from(-1)),
        other => {
            let stripped = other.strip_prefix('+').unwrap_or(other);
            parse_rational(stripped).ok_or_else(bad)?
        }
    };
    let re = if re_str.is_empty() {
        BigRational::zero()
    } else {
        parse_rational(re_str).ok_or_else(bad)?
    };
    Ok(Exact::new(re, im))
}

/// Parse an element: `coeff * word` terms joined by standalone `+`/`-`.
pub fn parse_element(
    text: &str,
    presentation: &GroupPresentation,
) -> Result<AlgebraElement, SyntaxError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(SyntaxError::BadElement(text.to_string()));
    }
    let mut terms: Vec<(ReducedWord, Exact)> = Vec::new();
    let mut i = 0;
    let mut negate = false;
    loop {
        // optional leading sign token for this term
        while i < tokens.len() && (tokens[i] == "+" || tokens[i] == "-") {
            if tokens[i] == "-" {
                negate = !negate;
            }
            i += 1;
        }
        if i >= tokens.len() {
            return Err(SyntaxError::BadElement(text.to_string()));
        }
        // term: [coeff *] word-tokens, up to the next standalone sign
        let mut end = i;
        while end < tokens.len() && tokens[end] != "+" && tokens[end] != "-" {
            end += 1;
        }
        let term = &tokens[i..end];
        let (coeff, word_tokens) = if term.len() >= 2 && term[1] == "*" {
            (parse_scalar(term[0])?, &term[2..])
        } else {
            (
                Exact::new(BigRational::from_integer(1.into()), BigRational::zero()),
                term,
            )
        };
        if word_tokens.is_empty() {
            return Err(SyntaxError::BadElement(term.join(" ")));
        }
        let word = parse_word(&word_tokens.join(" "), presentation)?;
        let coeff = if negate {
            coeff * Exact::new(BigRational::from_integer(BigInt::from(-1)), BigRational::zero())
        } else {
            coeff
        };
        terms.push((word, coeff));
        negate = false;
        if end == tokens.len() {
            break;
        }
        i = end;
    }
    Ok(AlgebraElement::from_terms(presentation, terms)?)
}

/// Canonical text form of an element; `parse_element(format_element(x)) == x`.
pub fn format_element(element: &AlgebraElement) -> String {
    if element.is_zero() {
        return "0 * e".to_string();
    }
    element
        .terms()
        .map(|(word, coeff)| {
            format!(
                "{} * {}",
                format_exact(coeff),
                element.presentation().format_word(word)
            )
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

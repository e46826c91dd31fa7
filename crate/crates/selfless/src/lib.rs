//! Verification toolkit for approximate-Haar and alternating-word moment
//! conditions in tracial probability spaces.
//!
//! The moment conditions come in pairs: a unitary `u` is an approximate Haar
//! unitary when `|tau(u^k)|` is small for all `1 <= |k| <= N`, and it is
//! approximately free from a finite set `F` when every alternating word in
//! centered elements of `F` and powers of `u` with at most `N` factors has
//! small trace. Asking for both for every `(F, N, epsilon)` is a finitary
//! criterion for a unitary that is free from the algebra in a suitable
//! limit, which is how selflessness of a tracial C*-algebra is certified.
//!
//! Two engines evaluate the conditions:
//!
//! * [`checker`] works in the group algebra of a free product of cyclic
//!   groups with exact arithmetic; traces of group words are 0 or 1, so a
//!   passing report means the violations are exactly zero.
//! * [`numeric`] works in matrix spaces with the normalized trace, supports
//!   Haar-random search and dimension sweeps, and validates the perturbation
//!   estimate used to reduce checks to dense generating sets.
//!
//! [`diagonal`] chains checks with growing sets, growing bounds and
//! shrinking tolerances into per-stage witnesses.
//!
//! ```
//! use selfless::templates::CheckParams;
//! use selfless::words::GroupPresentation;
//! use selfless::checker::check_group;
//!
//! let p = GroupPresentation::free_group(2)?;
//! let f = vec![p.word(&[("b", 1)])?, p.word(&[("b", 2)])?];
//! let u = p.word(&[("a", 1)])?;
//! let report = check_group(&p, &f, &u, &CheckParams::new(4, 0.0)?)?;
//! assert!(report.passed);
//! assert_eq!(report.max_violation, 0.0);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod algebra;
pub mod checker;
pub mod diagonal;
pub mod numeric;
pub mod report;
pub mod templates;
pub mod words;

pub use algebra::{centered_set, AlgebraElement, AlgebraError, CenteredSet, Exact};
pub use checker::{
    axial_search, check_freeness, check_group, AxialCandidate, AxialOutcome, CheckError,
    ExponentExpr, FreenessReport,
};
pub use report::{CheckMode, CheckReport, HaarViolation, Witness, WordViolation};
pub use templates::{
    count_templates, enumerate_templates, instantiate, AlternatingTemplate, CheckParams, Pattern,
    Slot,
};
pub use words::{FactorOrder, GroupPresentation, ReducedWord, WordError};

// The guide chapters double as doc-tests so their code stays compilable.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(presentations_and_words, "../../../book/src/presentations-and-words.md");
    chapter!(group_algebra, "../../../book/src/group-algebra.md");
    chapter!(alternating_words, "../../../book/src/alternating-words.md");
    chapter!(exact_checking, "../../../book/src/exact-checking.md");
    chapter!(matrix_models, "../../../book/src/matrix-models.md");
    chapter!(diagonal_sequences, "../../../book/src/diagonal-sequences.md");
    chapter!(cli_reference, "../../../book/src/cli-reference.md");
}

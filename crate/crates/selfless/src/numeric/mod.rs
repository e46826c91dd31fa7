//! Numeric checks in matrix probability spaces.
//!
//! The space is `k x k` complex matrices with the normalized trace. Checks
//! here are floating point: they cannot certify exact vanishing, but they
//! probe how the moment conditions behave as the dimension grows, and they
//! validate the perturbation estimates used to reduce checks to dense
//! generating sets.

mod check;
mod haar;
mod perturbation;
mod sweep;

pub use check::{check_matrix, search_unitary, SearchOutcome};
pub use haar::{ginibre, haar_unitary, haar_unitary_seeded};
pub use perturbation::{
    delta_for, perturbation_bound, verify_estimate, EstimateReport, NormKind, ESTIMATE_SLACK,
};
pub use sweep::{default_f_generator, dimension_sweep, SweepResult, SweepRow};

use nalgebra::{Complex, DMatrix};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type C64 = Complex<f64>;

/// Max-entry tolerance for the unitarity residual `U* U - I`.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("matrix is {found}x{found} but the space has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the distinguished element is not unitary within tolerance")]
    NotUnitary,
    #[error("norm lists have mismatched lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// A matrix probability space: `k x k` matrices with the normalized trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatrixSpace {
    k: usize,
}

impl MatrixSpace {
    pub fn new(k: usize) -> Result<Self, NumericError> {
        if k == 0 {
            return Err(NumericError::ZeroDimension);
        }
        Ok(MatrixSpace { k })
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    /// Normalized trace: the matrix trace divided by the dimension.
    pub fn trace(&self, m: &DMatrix<C64>) -> C64 {
        m.trace() / C64::new(self.k as f64, 0.0)
    }

    pub fn identity(&self) -> DMatrix<C64> {
        DMatrix::identity(self.k, self.k)
    }
}

/// A matrix with a unitarity tag checked at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixElement {
    mat: DMatrix<C64>,
    unitary: bool,
}

impl MatrixElement {
    /// Wrap a square matrix, probing unitarity within [`UNITARY_TOL`].
    pub fn new(mat: DMatrix<C64>) -> Result<Self, NumericError> {
        if mat.nrows() == 0 || mat.nrows() != mat.ncols() {
            return Err(NumericError::ZeroDimension);
        }
        let k = mat.nrows();
        let residual = mat.adjoint() * &mat - DMatrix::<C64>::identity(k, k);
        let unitary = residual.iter().all(|c| c.norm() <= UNITARY_TOL);
        Ok(MatrixElement { mat, unitary })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn dimension(&self) -> usize {
        self.mat.nrows()
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn adjoint(&self) -> MatrixElement {
        MatrixElement {
            mat: self.mat.adjoint(),
            unitary: self.unitary,
        }
    }

    /// Operator norm, computed as the largest singular value.
    pub fn op_norm(&self) -> f64 {
        op_norm(&self.mat)
    }
}

/// Operator norm of a raw matrix: its largest singular value.
pub fn op_norm(m: &DMatrix<C64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |acc, s| acc.max(*s))
}

/// Centered, adjoint-closed companion of a matrix set: for each `x` both
/// `x - tr(x) I` and `x* - conj(tr(x)) I` are included, exact duplicates are
/// dropped, and exactly-zero matrices are omitted.
pub fn centered_matrices(space: &MatrixSpace, f: &[MatrixElement]) -> Vec<DMatrix<C64>> {
    let mut out: Vec<DMatrix<C64>> = Vec::new();
    let id = space.identity();
    for x in f {
        let t = space.trace(x.matrix());
        let centered = x.matrix() - &id * t;
        let centered_adj = x.matrix().adjoint() - &id * t.conj();
        for c in [centered, centered_adj] {
            if c.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                continue;
            }
            if !out.contains(&c) {
                out.push(c);
            }
        }
    }
    out
}

/// Per-trial generator: deterministic in `(master seed, trial index)` and
/// independent of evaluation order.
pub fn sample_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

//! Haar-distributed unitary sampling.

use super::{sample_rng, MatrixElement, NumericError, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// A complex Ginibre matrix: i.i.d. entries with standard complex Gaussian
/// distribution (real and imaginary parts `N(0, 1/2)`).
pub fn ginibre(k: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    DMatrix::from_fn(k, k, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re / 2f64.sqrt(), im / 2f64.sqrt())
    })
}

/// Draw a Haar-distributed `k x k` unitary.
///
/// QR-factorize a Ginibre matrix and rescale the columns of `Q` by the
/// phases of the diagonal of `R`. Without the phase correction the
/// distribution of `Q` depends on the QR convention and is not Haar.
pub fn haar_unitary(k: usize, rng: &mut impl Rng) -> Result<MatrixElement, NumericError> {
    if k == 0 {
        return Err(NumericError::ZeroDimension);
    }
    let g = ginibre(k, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for i in 0..k {
        let d = r[(i, i)];
        let phase = if d.norm() > 0.0 {
            d / C64::new(d.norm(), 0.0)
        } else {
            C64::new(1.0, 0.0)
        };
        for row in 0..k {
            q[(row, i)] *= phase;
        }
    }
    MatrixElement::new(q)
}

/// Deterministic draw from a bare seed.
pub fn haar_unitary_seeded(k: usize, seed: u64) -> Result<MatrixElement, NumericError> {
    haar_unitary(k, &mut sample_rng(seed, 0))
}

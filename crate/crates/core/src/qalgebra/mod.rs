//! Dense linear algebra and quantum-information primitives on chains of
//! qutrits: density matrices, state vectors, Kronecker products, partial
//! traces and entropies (all logarithms base 2).
//!
//! Site 0 is the leftmost tensor factor, i.e. the slowest-varying digit of
//! the base-3 product index.

mod entropy;

pub(crate) mod ops;
mod state;

pub use entropy::{
    hermitian_eigen, relative_entropy, shannon_entropy, spectrum_entropy, von_neumann_entropy,
};
pub use ops::{partial_trace, partial_trace_matrix, tensor_product};
pub use state::{DensityMatrix, StateVector};

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Local Hilbert-space dimension of a spin-1 site.
pub const LOCAL_DIM: usize = 3;

/// Elementwise Hermiticity tolerance for density matrices.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues below `-NEGATIVE_EIG_TOL` are a positivity violation.
pub const NEGATIVE_EIG_TOL: f64 = 1e-10;
/// Eigenvalues (or probabilities) below this contribute nothing to entropies.
pub const ZERO_EIG: f64 = 1e-12;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// `3^n`.
pub fn pow3(n: usize) -> usize {
    LOCAL_DIM.pow(n as u32)
}

/// Number of qutrit sites for a Hilbert space of dimension `dim`, if it is a power of three.
pub fn sites_for_dim(dim: usize) -> Option<usize> {
    let mut d = 1;
    let mut k = 0;
    while d < dim {
        d *= LOCAL_DIM;
        k += 1;
    }
    (d == dim).then_some(k)
}

/// Largest elementwise deviation `max |m - m†|`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

use nalgebra::SymmetricEigen;

use super::{CMatrix, DensityMatrix, C64, NEGATIVE_EIG_TOL, ZERO_EIG};
use crate::error::{Error, Result};

/// Eigenvalues (ascending) and eigenvectors (as columns) of a Hermitian matrix.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// `-Σ p log2 p` over a probability vector; entries below 1e-12 contribute 0.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p >= ZERO_EIG)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Entropy of an eigenvalue spectrum, rejecting eigenvalues below `-1e-10`.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> Result<f64> {
    if let Some(&bad) = eigenvalues.iter().find(|&&l| l < -NEGATIVE_EIG_TOL) {
        return Err(Error::NotPositive(bad));
    }
    Ok(shannon_entropy(eigenvalues))
}

/// `S(rho) = -Tr[rho log2 rho]` via full eigendecomposition.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let (vals, _) = hermitian_eigen(rho.data());
    spectrum_entropy(&vals)
}

/// `S(rho||sigma) = Tr[rho log2 rho] - Tr[rho log2 sigma]`.
///
/// Returns [`Error::InfiniteRelativeEntropy`] when `rho` has weight (above
/// 1e-10) on the kernel of `sigma`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension(format!(
            "relative_entropy: {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let neg_s_rho = -von_neumann_entropy(rho)?;
    let (svals, svecs) = hermitian_eigen(sigma.data());
    if let Some(&bad) = svals.iter().find(|&&l| l < -NEGATIVE_EIG_TOL) {
        return Err(Error::NotPositive(bad));
    }
    let mut cross = 0.0;
    for (k, &s) in svals.iter().enumerate() {
        let v = svecs.column(k);
        let weight: C64 = (v.adjoint() * rho.data() * v)[(0, 0)];
        let w = weight.re;
        if s < ZERO_EIG {
            if w > NEGATIVE_EIG_TOL {
                return Err(Error::InfiniteRelativeEntropy);
            }
            continue;
        }
        cross += w * s.log2();
    }
    Ok(neg_s_rho - cross)
}

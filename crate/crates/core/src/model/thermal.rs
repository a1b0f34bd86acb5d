use nalgebra::{DMatrix, SymmetricEigen};

use super::{Sector, SparseHamiltonian};
use crate::error::{Error, Result};
use crate::qalgebra::ops::{site_offsets, validate_keep};
use crate::qalgebra::{shannon_entropy, CMatrix, DensityMatrix, C64};

/// Largest chain handled by dense diagonalisation (`3^8 = 6561`).
pub const MAX_DENSE_SITES: usize = 8;

/// Full spectrum of a chain Hamiltonian, reusable across temperatures.
#[derive(Clone, Debug)]
pub struct ThermalSpectrum {
    sites: usize,
    energies: Vec<f64>,
    /// Eigenvectors as columns, ordered like `energies`.
    vectors: DMatrix<f64>,
}

impl ThermalSpectrum {
    pub fn new(h: &SparseHamiltonian) -> Result<Self> {
        if h.sector() != Sector::Full {
            return Err(Error::InvalidArgument("thermal states need the full Hilbert space".into()));
        }
        if h.sites() > MAX_DENSE_SITES {
            return Err(Error::TooLarge { what: "thermal_state", max: MAX_DENSE_SITES, got: h.sites() });
        }
        let eig = SymmetricEigen::new(h.to_dense());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(h.dim(), h.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Self { sites: h.sites(), energies, vectors })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// Boltzmann weights `e^{-E_k/T}/Z` (k_B = 1), shifted by the ground energy for stability.
    pub fn weights(&self, temperature: f64) -> Result<Vec<f64>> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::InvalidArgument(format!("temperature must be > 0, got {temperature}")));
        }
        let e0 = self.energies[0];
        let raw: Vec<f64> = self.energies.iter().map(|e| (-(e - e0) / temperature).exp()).collect();
        let z: f64 = raw.iter().sum();
        Ok(raw.into_iter().map(|w| w / z).collect())
    }

    /// Gibbs state at `temperature`.
    pub fn state(&self, temperature: f64) -> Result<DensityMatrix> {
        let w = self.weights(temperature)?;
        let keep: Vec<usize> = (0..w.len()).filter(|&k| w[k] > 0.0).collect();
        let d = self.vectors.nrows();
        let mut scaled = DMatrix::<f64>::zeros(d, keep.len());
        for (c, &k) in keep.iter().enumerate() {
            let sw = w[k].sqrt();
            for r in 0..d {
                scaled[(r, c)] = self.vectors[(r, k)] * sw;
            }
        }
        let rho = &scaled * scaled.transpose();
        let data = CMatrix::from_fn(d, d, |r, c| C64::from(rho[(r, c)]));
        DensityMatrix::new(data)
    }

    /// Reduced Gibbs state on `keep`, accumulated eigenvector by eigenvector
    /// without forming the full density matrix. Weights below `1e-16` are skipped.
    pub fn reduced_state(&self, temperature: f64, keep: &[usize]) -> Result<DensityMatrix> {
        let w = self.weights(temperature)?;
        let kept = validate_keep(keep, self.sites)?;
        let traced: Vec<usize> = (0..self.sites).filter(|s| !kept.contains(s)).collect();
        let keep_off = site_offsets(&kept, self.sites);
        let trace_off = site_offsets(&traced, self.sites);
        let dk = keep_off.len();
        let mut acc = DMatrix::<f64>::zeros(dk, dk);
        for (k, &wk) in w.iter().enumerate() {
            if wk <= 1e-16 {
                continue;
            }
            let v = self.vectors.column(k);
            for r in 0..dk {
                for c in r..dk {
                    let x: f64 = trace_off.iter().map(|&t| v[keep_off[r] + t] * v[keep_off[c] + t]).sum();
                    acc[(r, c)] += wk * x;
                }
            }
        }
        let tr = acc.trace();
        let data = CMatrix::from_fn(dk, dk, |r, c| C64::from(if r <= c { acc[(r, c)] } else { acc[(c, r)] } / tr));
        Ok(DensityMatrix::from_parts(data, kept.len()))
    }

    /// Von Neumann entropy of the Gibbs state, from the weights alone.
    pub fn entropy(&self, temperature: f64) -> Result<f64> {
        Ok(shannon_entropy(&self.weights(temperature)?))
    }
}

/// `e^{-H/T} / Tr e^{-H/T}` by dense diagonalisation.
pub fn thermal_state(h: &SparseHamiltonian, temperature: f64) -> Result<DensityMatrix> {
    if !(temperature > 0.0) {
        return Err(Error::InvalidArgument(format!("temperature must be > 0, got {temperature}")));
    }
    ThermalSpectrum::new(h)?.state(temperature)
}

//! Spin-1 Heisenberg chain with uniaxial anisotropy:
//! `H = Σ_i S_i·S_{i+1} + U Σ_i (S^z_i)^2`.
//!
//! Hamiltonians are assembled as real CSR matrices in the product `S^z`
//! basis (local order m = +1, 0, -1), optionally restricted to a sector of
//! fixed total magnetisation. Ground states come from a restarted Lanczos
//! solver with full reorthogonalisation, thermal states from dense
//! diagonalisation.

mod hamiltonian;
mod lanczos;
mod reduced;
mod spin;
mod thermal;

pub use hamiltonian::{build_hamiltonian, build_hamiltonian_in_sector, Boundary, Sector, SparseHamiltonian};
pub use lanczos::{lowest_eigenpairs, Eigenpair, LanczosConfig, LinearOperator};
pub use reduced::{reduced_pair_state, reduced_state_pure, ChainState};
pub use spin::{Mat3, SpinOperators, SPIN1};
pub use thermal::{thermal_state, ThermalSpectrum, MAX_DENSE_SITES};

use crate::error::{Error, Result};
use crate::qalgebra::{StateVector, C64};
use nalgebra::DVector;

/// Largest chain handled by the sparse ground-state path.
pub const MAX_SPARSE_SITES: usize = 16;

/// Two levels closer than this are reported as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-9;

/// Lowest eigenpair of a chain Hamiltonian.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    /// Embedded in the full `3^L` product space.
    pub state: StateVector,
    /// Gap to the next level below [`DEGENERACY_GAP`].
    pub degenerate: bool,
    pub residual: f64,
    /// Magnetisation sector the state was found in, if sector-restricted.
    pub magnetization: Option<i32>,
}

/// `k` lowest levels of a Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumSlice {
    pub energies: Vec<f64>,
    /// `degenerate[n]`: gap from level `n` to level `n + 1` is below 1e-9.
    /// The last entry compares against the next (not returned) level.
    pub degenerate: Vec<bool>,
}

/// Lowest eigenpair of `h`. Sets `degenerate` when a second level lies within 1e-9.
pub fn ground_state(h: &SparseHamiltonian, cfg: &LanczosConfig) -> Result<GroundState> {
    if h.sites() > MAX_SPARSE_SITES {
        return Err(Error::TooLarge { what: "ground_state", max: MAX_SPARSE_SITES, got: h.sites() });
    }
    let first = lanczos::lowest_eigenpair(h, &[], cfg, None)?;
    let degenerate = if h.dim() > 1 {
        let locked = [first.vector.clone()];
        let second_cfg = LanczosConfig { seed: cfg.seed.wrapping_add(1), ..cfg.clone() };
        let second = lanczos::lowest_eigenpair(h, &locked, &second_cfg, Some(first.value + DEGENERACY_GAP))?;
        second.value - first.value < DEGENERACY_GAP
    } else {
        false
    };
    let state = embed(h, &first.vector)?;
    Ok(GroundState {
        energy: first.value,
        state,
        degenerate,
        residual: first.residual,
        magnetization: h.sector().magnetization(),
    })
}

/// `k` lowest eigenvalues of `h` (with multiplicity), ascending.
pub fn low_spectrum(h: &SparseHamiltonian, k: usize, cfg: &LanczosConfig) -> Result<SpectrumSlice> {
    if k == 0 || k >= h.dim() {
        return Err(Error::InvalidArgument(format!(
            "low_spectrum needs 1 <= k < dim = {}, got k = {k}",
            h.dim()
        )));
    }
    let pairs = lowest_eigenpairs(h, k + 1, cfg)?;
    let mut energies: Vec<f64> = pairs.iter().map(|p| p.value).collect();
    energies.sort_by(f64::total_cmp);
    let degenerate = (0..k).map(|n| energies[n + 1] - energies[n] < DEGENERACY_GAP).collect();
    energies.truncate(k);
    Ok(SpectrumSlice { energies, degenerate })
}

/// Ground state of a chain, searched in the magnetisation sectors `M = 0` and
/// `M = ±1` only.
///
/// For even `L` the `M = 0` sector is used directly. For odd `L` the lowest
/// `M = 0` and `M = +1` states are compared; an `M = +1` ground state is
/// always degenerate with its `M = -1` mirror and is flagged as such.
pub fn chain_ground_state(
    sites: usize,
    anisotropy: f64,
    boundary: Boundary,
    cfg: &LanczosConfig,
) -> Result<GroundState> {
    let h0 = build_hamiltonian_in_sector(sites, anisotropy, boundary, Sector::Magnetization(0))?;
    let g0 = ground_state(&h0, cfg)?;
    if sites % 2 == 0 {
        return Ok(g0);
    }
    let h1 = build_hamiltonian_in_sector(sites, anisotropy, boundary, Sector::Magnetization(1))?;
    let g1 = ground_state(&h1, cfg)?;
    if g1.energy < g0.energy - DEGENERACY_GAP {
        Ok(GroundState { degenerate: true, ..g1 })
    } else if g1.energy < g0.energy + DEGENERACY_GAP {
        Ok(GroundState { degenerate: true, ..g0 })
    } else {
        Ok(g0)
    }
}

fn embed(h: &SparseHamiltonian, v: &[f64]) -> Result<StateVector> {
    let full = crate::qalgebra::pow3(h.sites());
    let mut amps = DVector::from_element(full, C64::from(0.0));
    match h.basis() {
        None => amps.iter_mut().zip(v).for_each(|(a, &x)| *a = C64::from(x)),
        Some(basis) => {
            for (&idx, &x) in basis.iter().zip(v) {
                amps[idx as usize] = C64::from(x);
            }
        }
    }
    StateVector::normalized(amps)
}

#[cfg(test)]
mod tests;

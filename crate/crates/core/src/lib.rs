//! Quantum discord and global quantum discord of spin-1 Heisenberg chains
//! with uniaxial anisotropy, plus the finite-size-scaling tools used to
//! locate the Néel–Haldane and Haldane–large-D transitions from them.
//!
//! Module map:
//! - [`qalgebra`]: density matrices, partial traces, entropies.
//! - [`model`]: Hamiltonian, Lanczos ground states, spectra, thermal states.
//! - [`measure`]: spin-1 projective measurement bases and dephasing.
//! - [`discord`]: mutual information, one-way classical information and
//!   the asymmetric, symmetric and global discords with their optimiser.
//! - [`crit`]: derivatives, peaks, extrapolation, crossings, data collapse.

pub mod crit;
pub mod discord;
pub mod error;
pub mod measure;
pub mod model;
pub mod qalgebra;

pub use crit::{Curve, ScalingFit};
pub use discord::{DiscordResult, Mode, OptimizerConfig};
pub use error::{Error, Result};
pub use measure::{MeasurementAngles, ProjectiveBasis};
pub use model::{Boundary, GroundState, SparseHamiltonian, SpectrumSlice};
pub use qalgebra::{DensityMatrix, StateVector};

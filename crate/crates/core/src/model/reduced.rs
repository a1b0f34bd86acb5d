use crate::error::{Error, Result};
use crate::qalgebra::ops::{site_offsets, validate_keep};
use crate::qalgebra::{partial_trace, CMatrix, DensityMatrix, StateVector, C64};

/// A chain state, pure or mixed.
#[derive(Clone, Copy, Debug)]
pub enum ChainState<'a> {
    Pure(&'a StateVector),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a StateVector> for ChainState<'a> {
    fn from(s: &'a StateVector) -> Self {
        ChainState::Pure(s)
    }
}

impl<'a> From<&'a DensityMatrix> for ChainState<'a> {
    fn from(r: &'a DensityMatrix) -> Self {
        ChainState::Mixed(r)
    }
}

impl ChainState<'_> {
    pub fn sites(&self) -> usize {
        match self {
            ChainState::Pure(s) => s.sites(),
            ChainState::Mixed(r) => r.sites(),
        }
    }

    /// Reduced state on `keep` (ascending site order).
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        match self {
            ChainState::Pure(s) => reduced_state_pure(s, keep),
            ChainState::Mixed(r) => partial_trace(r, keep),
        }
    }
}

/// Reduced density matrix of a pure state by direct contraction of the
/// amplitude tensor, without forming `|psi><psi|`.
pub fn reduced_state_pure(psi: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let sites = psi.sites();
    let kept = validate_keep(keep, sites)?;
    let traced: Vec<usize> = (0..sites).filter(|s| !kept.contains(s)).collect();
    let keep_off = site_offsets(&kept, sites);
    let trace_off = site_offsets(&traced, sites);
    let a = psi.amplitudes();
    let dk = keep_off.len();
    let mut out = CMatrix::zeros(dk, dk);
    for r in 0..dk {
        for c in r..dk {
            let mut acc = C64::from(0.0);
            for &t in &trace_off {
                acc += a[keep_off[r] + t] * a[keep_off[c] + t].conj();
            }
            out[(r, c)] = acc;
            out[(c, r)] = acc.conj();
        }
    }
    // renormalise away accumulated roundoff in the trace
    let tr = out.trace().re;
    Ok(DensityMatrix::from_parts(out / C64::from(tr), kept.len()))
}

/// Two-site reduced state on sites `i < j`, site `i` leading.
pub fn reduced_pair_state<'a>(state: impl Into<ChainState<'a>>, i: usize, j: usize) -> Result<DensityMatrix> {
    let state = state.into();
    if i >= j || j >= state.sites() {
        return Err(Error::Sites(format!(
            "pair ({i}, {j}) invalid for {} sites; need i < j < L",
            state.sites()
        )));
    }
    state.reduce(&[i, j])
}

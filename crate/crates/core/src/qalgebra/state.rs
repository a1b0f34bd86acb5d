use super::{
    hermiticity_defect, pow3, sites_for_dim, CMatrix, CVector, C64, HERMITIAN_TOL, TRACE_TOL,
};
use crate::error::{Error, Result};

/// Normalised pure state of a chain of `sites` qutrits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
    sites: usize,
}

impl StateVector {
    /// Wraps `amplitudes`, which must have length `3^L` and unit norm (to 1e-12).
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let sites = sites_for_dim(amplitudes.len()).ok_or_else(|| {
            Error::Dimension(format!("state length {} is not a power of 3", amplitudes.len()))
        })?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("state norm is {norm}, expected 1")));
        }
        Ok(Self { amplitudes, sites })
    }

    /// Normalises `amplitudes` before wrapping them.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalise a zero vector".into()));
        }
        Self::new(amplitudes / C64::from(norm))
    }

    /// Product state with site `s` in local basis index `digits[s]`.
    pub fn product(digits: &[usize]) -> Result<Self> {
        let mut index = 0;
        for &d in digits {
            if d >= 3 {
                return Err(Error::InvalidArgument(format!("local index {d} out of range")));
            }
            index = index * 3 + d;
        }
        let mut v = CVector::zeros(pow3(digits.len()));
        v[index] = C64::from(1.0);
        Self::new(v)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Multiplies by the phase that makes the largest-modulus amplitude real and positive.
    pub fn fix_global_phase(&mut self) {
        let mut pivot = C64::from(0.0);
        for a in self.amplitudes.iter() {
            if a.norm() > pivot.norm() {
                pivot = *a;
            }
        }
        if pivot.norm() > 0.0 {
            let phase = pivot.conj() / C64::from(pivot.norm());
            self.amplitudes.iter_mut().for_each(|a| *a *= phase);
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix over `3^k` dimensions.
///
/// Hermiticity and trace are checked on construction; positivity is checked
/// lazily by the entropy routines, which diagonalise anyway.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    data: CMatrix,
    sites: usize,
}

impl DensityMatrix {
    pub fn new(data: CMatrix) -> Result<Self> {
        if !data.is_square() {
            return Err(Error::Dimension(format!(
                "density matrix must be square, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        let sites = sites_for_dim(data.nrows()).ok_or_else(|| {
            Error::Dimension(format!("dimension {} is not a power of 3", data.nrows()))
        })?;
        let defect = hermiticity_defect(&data);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = data.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Trace(tr.re));
        }
        Ok(Self { data, sites })
    }

    /// Skips validation; callers guarantee the invariants by construction.
    pub(crate) fn from_parts(data: CMatrix, sites: usize) -> Self {
        debug_assert_eq!(data.nrows(), pow3(sites));
        Self { data, sites }
    }

    /// `|psi><psi|`.
    pub fn from_pure(psi: &StateVector) -> Self {
        let a = psi.amplitudes();
        Self::from_parts(a * a.adjoint(), psi.sites())
    }

    /// Diagonal state with the given probabilities.
    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            probs.len(),
            probs.iter().map(|&p| C64::from(p)),
        ));
        Self::new(m)
    }

    /// `I / 3^k`.
    pub fn maximally_mixed(sites: usize) -> Self {
        let d = pow3(sites);
        Self::from_parts(CMatrix::identity(d, d) / C64::from(d as f64), sites)
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_inner(self) -> CMatrix {
        self.data
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Kronecker product with `self` on the leading sites.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_parts(self.data.kronecker(&other.data), self.sites + other.sites)
    }

    /// Errors if an eigenvalue lies below `-1e-10`.
    pub fn check_positive(&self) -> Result<()> {
        let (vals, _) = super::hermitian_eigen(&self.data);
        match vals.iter().cloned().fold(f64::INFINITY, f64::min) {
            m if m < -super::NEGATIVE_EIG_TOL => Err(Error::NotPositive(m)),
            _ => Ok(()),
        }
    }
}

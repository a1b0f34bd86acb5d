use serde::{Deserialize, Serialize};

use super::lanczos::LinearOperator;
use super::MAX_SPARSE_SITES;
use crate::error::{Error, Result};
use crate::qalgebra::pow3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(Boundary::Open),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(Error::InvalidArgument(format!("unknown boundary '{other}'"))),
        }
    }
}

/// Subspace the Hamiltonian is represented on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sector {
    Full,
    /// Fixed total `Σ_i S^z_i`.
    Magnetization(i32),
}

impl Sector {
    pub fn magnetization(self) -> Option<i32> {
        match self {
            Sector::Full => None,
            Sector::Magnetization(m) => Some(m),
        }
    }
}

/// Real-symmetric CSR matrix of the chain Hamiltonian.
#[derive(Clone, Debug)]
pub struct SparseHamiltonian {
    sites: usize,
    anisotropy: f64,
    boundary: Boundary,
    sector: Sector,
    /// Full product index of each sector basis state (ascending); `None` for the full space.
    basis: Option<Vec<u32>>,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
    norm_estimate: f64,
}

/// Hamiltonian on the full `3^L` product space.
pub fn build_hamiltonian(sites: usize, anisotropy: f64, boundary: Boundary) -> Result<SparseHamiltonian> {
    build_hamiltonian_in_sector(sites, anisotropy, boundary, Sector::Full)
}

pub fn build_hamiltonian_in_sector(
    sites: usize,
    anisotropy: f64,
    boundary: Boundary,
    sector: Sector,
) -> Result<SparseHamiltonian> {
    if sites < 2 {
        return Err(Error::InvalidArgument(format!("chain needs L >= 2, got {sites}")));
    }
    if boundary == Boundary::Periodic && sites == 2 {
        return Err(Error::InvalidArgument(
            "periodic boundary with L = 2 double-counts the single bond; use open".into(),
        ));
    }
    if sites > MAX_SPARSE_SITES {
        return Err(Error::TooLarge { what: "build_hamiltonian", max: MAX_SPARSE_SITES, got: sites });
    }
    if !anisotropy.is_finite() {
        return Err(Error::InvalidArgument("anisotropy must be finite".into()));
    }

    let strides: Vec<usize> = (0..sites).map(|s| pow3(sites - 1 - s)).collect();
    let mut bonds: Vec<(usize, usize)> = (0..sites - 1).map(|i| (i, i + 1)).collect();
    if boundary == Boundary::Periodic {
        bonds.push((sites - 1, 0));
    }

    let basis: Option<Vec<u32>> = match sector {
        Sector::Full => None,
        Sector::Magnetization(m) => {
            let states: Vec<u32> = (0..pow3(sites))
                .filter(|&n| magnetization_of(n, sites) == m)
                .map(|n| n as u32)
                .collect();
            if states.is_empty() {
                return Err(Error::InvalidArgument(format!("empty magnetisation sector M = {m}")));
            }
            Some(states)
        }
    };
    let dim = basis.as_ref().map_or(pow3(sites), Vec::len);
    let lookup = |full: usize| -> usize {
        match &basis {
            None => full,
            Some(b) => b.binary_search(&(full as u32)).expect("flip term leaves the sector"),
        }
    };

    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut digits = vec![0usize; sites];
    let mut row: Vec<(u32, f64)> = Vec::new();
    let mut norm_estimate: f64 = 0.0;
    row_ptr.push(0);
    for r in 0..dim {
        let full = basis.as_ref().map_or(r, |b| b[r] as usize);
        decode(full, &mut digits);
        // local index 0, 1, 2 <-> m = +1, 0, -1
        let m = |s: usize| 1 - digits[s] as i32;
        let mut diag = 0.0;
        for s in 0..sites {
            diag += anisotropy * f64::from(m(s) * m(s));
        }
        row.clear();
        for &(i, j) in &bonds {
            diag += f64::from(m(i) * m(j));
            // (S+_i S-_j + S-_i S+_j)/2: each allowed flip has matrix element 1
            if digits[i] > 0 && digits[j] < 2 {
                let target = full - strides[i] + strides[j];
                row.push((lookup(target) as u32, 1.0));
            }
            if digits[i] < 2 && digits[j] > 0 {
                let target = full + strides[i] - strides[j];
                row.push((lookup(target) as u32, 1.0));
            }
        }
        if diag != 0.0 {
            row.push((r as u32, diag));
        }
        row.sort_by_key(|&(c, _)| c);
        norm_estimate = norm_estimate.max(row.iter().map(|(_, v)| v.abs()).sum());
        for &(c, v) in &row {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }

    Ok(SparseHamiltonian {
        sites,
        anisotropy,
        boundary,
        sector,
        basis,
        row_ptr,
        cols,
        vals,
        norm_estimate: norm_estimate.max(f64::MIN_POSITIVE),
    })
}

fn decode(mut n: usize, digits: &mut [usize]) {
    for d in digits.iter_mut().rev() {
        *d = n % 3;
        n /= 3;
    }
}

fn magnetization_of(mut n: usize, sites: usize) -> i32 {
    let mut m = 0;
    for _ in 0..sites {
        m += 1 - (n % 3) as i32;
        n /= 3;
    }
    m
}

impl SparseHamiltonian {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn anisotropy(&self) -> f64 {
        self.anisotropy
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn basis(&self) -> Option<&[u32]> {
        self.basis.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Number of two-site bond terms.
    pub fn bond_count(&self) -> usize {
        match self.boundary {
            Boundary::Open => self.sites - 1,
            Boundary::Periodic => self.sites,
        }
    }

    /// Maximum absolute row sum, an upper bound on the spectral radius.
    pub fn norm_estimate(&self) -> f64 {
        self.norm_estimate
    }

    /// Matrix element `<r|H|c>` in the (sector) basis.
    pub fn element(&self, r: usize, c: usize) -> f64 {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[range.clone()]
            .binary_search(&(c as u32))
            .map(|k| self.vals[range.start + k])
            .unwrap_or(0.0)
    }

    /// Dense copy; intended for small systems and oracles.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let n = self.dim();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for r in 0..n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k] as usize)] = self.vals[k];
            }
        }
        m
    }

    fn apply_rows(&self, x: &[f64], y: &mut [f64], first_row: usize) {
        for (offset, out) in y.iter_mut().enumerate() {
            let r = first_row + offset;
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            *out = acc;
        }
    }
}

impl LinearOperator for SparseHamiltonian {
    fn dim(&self) -> usize {
        SparseHamiltonian::dim(self)
    }

    fn norm_estimate(&self) -> f64 {
        self.norm_estimate
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        use rayon::prelude::*;
        const CHUNK: usize = 4096;
        if y.len() <= CHUNK {
            self.apply_rows(x, y, 0);
        } else {
            y.par_chunks_mut(CHUNK)
                .enumerate()
                .for_each(|(c, block)| self.apply_rows(x, block, c * CHUNK));
        }
    }
}

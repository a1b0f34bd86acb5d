//! Spin-1 projective measurements.
//!
//! A measurement basis is `|m_A> = A|m>` with
//!
//! ```text
//! A = e^{-iψSx} e^{-iθSy} e^{-iφSz}
//!     · exp[i(γ(Sz)² - γ - φ0 Sz)]
//!     · exp[-iα(SxSy + SySx)]
//!     · exp[(iβ/√2)(Sy + SySz + SzSy)]
//! ```
//!
//! The quadrupolar factors make the basis states squeezed rather than spin
//! coherent states in general. Every exponential is evaluated from the exact
//! eigendecomposition of its 3x3 generator.

use std::f64::consts::{PI, TAU};
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Mat3, SPIN1};
use crate::qalgebra::{c, pow3, CMatrix, CVector, DensityMatrix, C64};

/// Angles of a spin-1 measurement basis, in radians.
///
/// The map to bases is 2π-periodic in every angle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasurementAngles {
    pub theta: f64,
    pub phi: f64,
    pub psi: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi0: f64,
}

impl MeasurementAngles {
    /// Real-basis family: `γ = ψ = φ = φ0 = 0`.
    pub fn real(theta: f64, alpha: f64, beta: f64) -> Self {
        Self { theta, alpha, beta, ..Self::default() }
    }

    /// Angles in tie-break order `(θ, α, β, γ, ψ, φ, φ0)`.
    pub fn to_ordered(&self) -> [f64; 7] {
        [self.theta, self.alpha, self.beta, self.gamma, self.psi, self.phi, self.phi0]
    }

    pub fn from_ordered(a: &[f64]) -> Self {
        Self {
            theta: a[0],
            alpha: a[1],
            beta: a[2],
            gamma: a[3],
            psi: a[4],
            phi: a[5],
            phi0: a[6],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_ordered().iter().all(|x| x.is_finite())
    }

    pub fn is_real_family(&self) -> bool {
        self.gamma == 0.0 && self.psi == 0.0 && self.phi == 0.0 && self.phi0 == 0.0
    }

    /// Every angle reduced into `[0, 2π)`; values within 1e-9 of 2π wrap to 0.
    pub fn canonical(&self) -> Self {
        let wrap = |x: f64| {
            let r = x.rem_euclid(TAU);
            if TAU - r < 1e-9 || r < 1e-12 {
                0.0
            } else {
                r
            }
        };
        let a = self.to_ordered().map(wrap);
        Self::from_ordered(&a)
    }

    /// Lexicographic comparison on `(θ, α, β, γ, ψ, φ, φ0)`.
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        let (a, b) = (self.to_ordered(), other.to_ordered());
        for k in 0..7 {
            match a[k].total_cmp(&b[k]) {
                std::cmp::Ordering::Equal => continue,
                o => return o,
            }
        }
        std::cmp::Ordering::Equal
    }
}

/// Three orthonormal spin-1 states; column `k` of the unitary is the state
/// for `m = +1, 0, -1` (k = 0, 1, 2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectiveBasis {
    unitary: Mat3,
}

impl ProjectiveBasis {
    /// Wraps a unitary; columns must be orthonormal to 1e-10.
    pub fn from_unitary(unitary: Mat3) -> Result<Self> {
        let b = Self { unitary };
        let defect = b.gram_defect();
        if defect > 1e-10 {
            return Err(Error::InvalidArgument(format!("basis is not orthonormal (defect {defect:.3e})")));
        }
        Ok(b)
    }

    /// The `S^z` eigenbasis.
    pub fn canonical() -> Self {
        Self { unitary: Mat3::identity() }
    }

    pub fn unitary(&self) -> &Mat3 {
        &self.unitary
    }

    pub fn vector(&self, k: usize) -> [C64; 3] {
        [self.unitary[(0, k)], self.unitary[(1, k)], self.unitary[(2, k)]]
    }

    pub fn projector(&self, k: usize) -> Mat3 {
        let v = self.unitary.column(k);
        v * v.adjoint()
    }

    /// `max |<m|m'> - δ|`.
    pub fn gram_defect(&self) -> f64 {
        let g = self.unitary.adjoint() * self.unitary;
        (g - Mat3::identity()).iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// `max |Σ_m |m><m| - I|`.
    pub fn completeness_defect(&self) -> f64 {
        let s = self.projector(0) + self.projector(1) + self.projector(2);
        (s - Mat3::identity()).iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn max_imaginary(&self) -> f64 {
        self.unitary.iter().map(|x| x.im.abs()).fold(0.0, f64::max)
    }

    /// Same set of projectors, in any order, to `tol` (max elementwise).
    pub fn same_measurement(&self, other: &Self, tol: f64) -> bool {
        let mine: Vec<Mat3> = (0..3).map(|k| self.projector(k)).collect();
        let mut used = [false; 3];
        'outer: for k in 0..3 {
            let p = other.projector(k);
            for (i, q) in mine.iter().enumerate() {
                if !used[i] && (p - q).iter().all(|x| x.norm() <= tol) {
                    used[i] = true;
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }

    /// `<S> = (<Sx>, <Sy>, <Sz>)` for basis state `k`.
    pub fn bloch_vector(&self, k: usize) -> [f64; 3] {
        let v = self.unitary.column(k);
        let ev = |op: &Mat3| (v.adjoint() * op * v)[(0, 0)].re;
        [ev(&SPIN1.sx), ev(&SPIN1.sy), ev(&SPIN1.sz)]
    }
}

/// Cached eigendecomposition of a Hermitian generator.
struct Generator {
    values: [f64; 3],
    vectors: Mat3,
}

impl Generator {
    fn new(h: Mat3) -> Self {
        let eig = h.symmetric_eigen();
        Self { values: [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]], vectors: eig.eigenvectors }
    }

    /// `exp(i t G)`.
    fn exp_i(&self, t: f64) -> Mat3 {
        let d = Mat3::from_diagonal(&nalgebra::Vector3::from_fn(|k, _| {
            let (s, co) = (t * self.values[k]).sin_cos();
            c(co, s)
        }));
        self.vectors * d * self.vectors.adjoint()
    }
}

struct Generators {
    sx: Generator,
    sy: Generator,
    sz: Generator,
    quad_xy: Generator,
    squeeze: Generator,
}

static GENERATORS: LazyLock<Generators> = LazyLock::new(|| {
    let s = &*SPIN1;
    let quad_xy = s.sx * s.sy + s.sy * s.sx;
    let squeeze = (s.sy + s.sy * s.sz + s.sz * s.sy) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Generators {
        sx: Generator::new(s.sx),
        sy: Generator::new(s.sy),
        sz: Generator::new(s.sz),
        quad_xy: Generator::new(quad_xy),
        squeeze: Generator::new(squeeze),
    }
});

/// The six unitary factors of the basis map, in application order from left to right.
pub fn basis_factors(a: &MeasurementAngles) -> [Mat3; 6] {
    let g = &*GENERATORS;
    // exp[i(γ Sz² - γ - φ0 Sz)] is diagonal: phase γ m² - γ - φ0 m on |m>
    let phase = Mat3::from_diagonal(&nalgebra::Vector3::from_fn(|k, _| {
        let m = 1.0 - k as f64;
        let (s, co) = (a.gamma * m * m - a.gamma - a.phi0 * m).sin_cos();
        c(co, s)
    }));
    [
        g.sx.exp_i(-a.psi),
        g.sy.exp_i(-a.theta),
        g.sz.exp_i(-a.phi),
        phase,
        g.quad_xy.exp_i(-a.alpha),
        g.squeeze.exp_i(a.beta),
    ]
}

pub fn basis_from_angles(a: &MeasurementAngles) -> Result<ProjectiveBasis> {
    if !a.is_finite() {
        return Err(Error::InvalidArgument("measurement angles must be finite".into()));
    }
    let f = basis_factors(a);
    Ok(ProjectiveBasis { unitary: f[0] * f[1] * f[2] * f[3] * f[4] * f[5] })
}

/// Basis of the real family; imaginary parts (roundoff only) are zeroed.
pub fn real_basis_from_angles(theta: f64, alpha: f64, beta: f64) -> Result<ProjectiveBasis> {
    let b = basis_from_angles(&MeasurementAngles::real(theta, alpha, beta))?;
    debug_assert!(b.max_imaginary() < 1e-12);
    Ok(ProjectiveBasis { unitary: b.unitary.map(|z| c(z.re, 0.0)) })
}

/// Applies the 3x3 `op` to site `site` of every length-`3^sites` vector
/// stored contiguously in `data`.
pub(crate) fn apply_site_op(data: &mut [C64], sites: usize, site: usize, op: &Mat3) {
    let stride = pow3(sites - 1 - site);
    let block = 3 * stride;
    for chunk in data.chunks_mut(block) {
        for off in 0..stride {
            let (a, b, d) = (chunk[off], chunk[off + stride], chunk[off + 2 * stride]);
            chunk[off] = op[(0, 0)] * a + op[(0, 1)] * b + op[(0, 2)] * d;
            chunk[off + stride] = op[(1, 0)] * a + op[(1, 1)] * b + op[(1, 2)] * d;
            chunk[off + 2 * stride] = op[(2, 0)] * a + op[(2, 1)] * b + op[(2, 2)] * d;
        }
    }
}

/// `(⊗_s U_s)† M` for a column-major square matrix `M`.
fn rotate_left_adjoint(m: &mut CMatrix, sites: usize, bases: &[ProjectiveBasis]) {
    let n = m.nrows();
    let adj: Vec<Mat3> = bases.iter().map(|b| b.unitary.adjoint()).collect();
    for col in m.as_mut_slice().chunks_mut(n) {
        for (s, op) in adj.iter().enumerate() {
            apply_site_op(col, sites, s, op);
        }
    }
}

fn rotate_left(m: &mut CMatrix, sites: usize, bases: &[ProjectiveBasis]) {
    let n = m.nrows();
    for col in m.as_mut_slice().chunks_mut(n) {
        for (s, b) in bases.iter().enumerate() {
            apply_site_op(col, sites, s, &b.unitary);
        }
    }
}

fn check_bases(sites: usize, bases: &[ProjectiveBasis]) -> Result<()> {
    if bases.len() != sites {
        return Err(Error::Dimension(format!("{} bases for {sites} sites", bases.len())));
    }
    Ok(())
}

/// Outcome probabilities of the product measurement `⊗_s bases[s]` on `rho`,
/// i.e. the diagonal of `U† rho U`.
pub fn measurement_probabilities(rho: &DensityMatrix, bases: &[ProjectiveBasis]) -> Result<Vec<f64>> {
    check_bases(rho.sites(), bases)?;
    let mut x = rho.data().clone();
    rotate_left_adjoint(&mut x, rho.sites(), bases);
    let mut y = x.adjoint();
    rotate_left_adjoint(&mut y, rho.sites(), bases);
    Ok((0..y.nrows()).map(|k| y[(k, k)].re).collect())
}

/// Outcome probabilities of a product measurement on the mixture
/// `Σ_k w_k |v_k><v_k|`; every `v_k` has length `3^sites`.
pub fn ensemble_probabilities(
    vectors: &[CVector],
    weights: &[f64],
    sites: usize,
    bases: &[ProjectiveBasis],
) -> Result<Vec<f64>> {
    check_bases(sites, bases)?;
    let adj: Vec<Mat3> = bases.iter().map(|b| b.unitary.adjoint()).collect();
    let mut probs = vec![0.0; pow3(sites)];
    let mut work = vec![C64::from(0.0); pow3(sites)];
    for (v, &w) in vectors.iter().zip(weights) {
        work.copy_from_slice(v.as_slice());
        for (s, op) in adj.iter().enumerate() {
            apply_site_op(&mut work, sites, s, op);
        }
        for (p, a) in probs.iter_mut().zip(&work) {
            *p += w * a.norm_sqr();
        }
    }
    Ok(probs)
}

/// Dephasing map `Π(ρ) = Σ_m P_m ρ P_m` for the product basis `⊗_s bases[s]`.
///
/// Rotates into the measurement basis, drops the off-diagonal part and
/// rotates back.
pub fn dephase(rho: &DensityMatrix, bases: &[ProjectiveBasis]) -> Result<DensityMatrix> {
    let sites = rho.sites();
    let probs = measurement_probabilities(rho, bases)?;
    let d = probs.len();
    let mut m = CMatrix::from_diagonal(&CVector::from_iterator(d, probs.iter().map(|&p| C64::from(p))));
    rotate_left(&mut m, sites, bases);
    let mut back = m.adjoint();
    rotate_left(&mut back, sites, bases);
    // exact Hermitian symmetrisation of roundoff
    let herm = (&back + back.adjoint()) * C64::from(0.5);
    Ok(DensityMatrix::from_parts(herm, sites))
}

/// The θ range is `[0, π]`; all other angles span `[0, 2π)`.
pub const THETA_RANGE: f64 = PI;

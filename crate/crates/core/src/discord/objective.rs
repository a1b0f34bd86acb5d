use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::measure::{ensemble_probabilities, ProjectiveBasis};
use crate::model::{ChainState, Mat3};
use crate::qalgebra::{
    hermitian_eigen, shannon_entropy, spectrum_entropy, CVector, DensityMatrix, C64, NEGATIVE_EIG_TOL,
};

/// Objective of a discord minimisation, evaluated on one basis per site.
pub(crate) trait Objective: Sync {
    fn eval(&self, bases: &[ProjectiveBasis]) -> f64;
}

/// Eigen-weights below this are dropped from the mixture representation.
const ENSEMBLE_CUTOFF: f64 = 1e-15;

/// `[S(Π(ρ)) - S(ρ)] - Σ_s [S(Π_s(ρ_s)) - S(ρ_s)]`, the relative-entropy
/// discord objective written through `S(ρ||Π(ρ)) = S(Π(ρ)) - S(ρ)`.
///
/// The state is stored as a mixture `Σ_k w_k |v_k><v_k|` (a single vector
/// for pure states), so only the diagonal of the rotated state is formed.
pub(crate) struct RelativeEntropyObjective {
    sites: usize,
    vectors: Vec<CVector>,
    weights: Vec<f64>,
    entropy: f64,
    locals: Vec<Mat3>,
    local_entropies: Vec<f64>,
}

impl RelativeEntropyObjective {
    pub fn new(state: ChainState<'_>) -> Result<Self> {
        let sites = state.sites();
        let (vectors, weights, entropy) = match state {
            ChainState::Pure(psi) => (vec![psi.amplitudes().clone()], vec![1.0], 0.0),
            ChainState::Mixed(rho) => {
                let (vals, vecs) = hermitian_eigen(rho.data());
                let entropy = spectrum_entropy(&vals)?;
                let mut vectors = Vec::new();
                let mut weights = Vec::new();
                for (k, &w) in vals.iter().enumerate() {
                    if w > ENSEMBLE_CUTOFF {
                        vectors.push(vecs.column(k).into_owned());
                        weights.push(w);
                    }
                }
                (vectors, weights, entropy)
            }
        };
        let mut locals = Vec::with_capacity(sites);
        let mut local_entropies = Vec::with_capacity(sites);
        for s in 0..sites {
            let r = state.reduce(&[s])?;
            let (vals, _) = hermitian_eigen(r.data());
            local_entropies.push(spectrum_entropy(&vals)?);
            locals.push(Matrix3::from_fn(|i, j| r.data()[(i, j)]));
        }
        Ok(Self { sites, vectors, weights, entropy, locals, local_entropies })
    }

    /// `S(Π_s(ρ_s)) - S(ρ_s)` for one site.
    pub fn local_term(&self, site: usize, basis: &ProjectiveBasis) -> f64 {
        let u = basis.unitary();
        let rotated = u.adjoint() * self.locals[site] * u;
        let p = [rotated[(0, 0)].re, rotated[(1, 1)].re, rotated[(2, 2)].re];
        shannon_entropy(&p) - self.local_entropies[site]
    }
}

impl Objective for RelativeEntropyObjective {
    fn eval(&self, bases: &[ProjectiveBasis]) -> f64 {
        let probs = ensemble_probabilities(&self.vectors, &self.weights, self.sites, bases)
            .expect("one basis per site");
        let global = shannon_entropy(&probs) - self.entropy;
        let local: f64 = bases.iter().enumerate().map(|(s, b)| self.local_term(s, b)).sum();
        global - local
    }
}

/// `I(ρ_AB) - J(ρ_AB | basis on B)` for a two-qutrit state; the measured
/// site is the second one.
pub(crate) struct OneWayObjective {
    rho: [[C64; 9]; 9],
    entropy_ab: f64,
    entropy_a: f64,
    entropy_b: f64,
}

impl OneWayObjective {
    pub fn new(rho: &DensityMatrix) -> Result<Self> {
        require_pair(rho)?;
        let entropy_ab = spectrum_entropy(&hermitian_eigen(rho.data()).0)?;
        let ra = crate::qalgebra::partial_trace(rho, &[0])?;
        let rb = crate::qalgebra::partial_trace(rho, &[1])?;
        let entropy_a = spectrum_entropy(&hermitian_eigen(ra.data()).0)?;
        let entropy_b = spectrum_entropy(&hermitian_eigen(rb.data()).0)?;
        let mut m = [[C64::from(0.0); 9]; 9];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = rho.data()[(i, j)];
            }
        }
        Ok(Self { rho: m, entropy_ab, entropy_a, entropy_b })
    }

    pub fn mutual_information(&self) -> f64 {
        self.entropy_a + self.entropy_b - self.entropy_ab
    }

    /// `(p_j, S(ρ_{A|j}))` for the three outcomes of `basis` on B.
    pub fn conditional(&self, basis: &ProjectiveBasis) -> [(f64, f64); 3] {
        let mut out = [(0.0, 0.0); 3];
        for (j, slot) in out.iter_mut().enumerate() {
            let v = basis.vector(j);
            // (ρ_{A|j})_{a a'} p_j = Σ_{b b'} conj(v_b) ρ_{(a b),(a' b')} v_{b'}
            let mut m = Mat3::zeros();
            for a in 0..3 {
                for ap in 0..3 {
                    let mut acc = C64::from(0.0);
                    for b in 0..3 {
                        for bp in 0..3 {
                            acc += v[b].conj() * self.rho[3 * a + b][3 * ap + bp] * v[bp];
                        }
                    }
                    m[(a, ap)] = acc;
                }
            }
            let p = m.trace().re;
            if p < crate::qalgebra::ZERO_EIG {
                *slot = (p.max(0.0), 0.0);
                continue;
            }
            let eig = (m / C64::from(p)).symmetric_eigen();
            let vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
            *slot = (p, shannon_entropy(&vals));
        }
        out
    }

    /// `J = S(ρ_A) - Σ_j p_j S(ρ_{A|j})`.
    pub fn classical_information(&self, basis: &ProjectiveBasis) -> f64 {
        self.entropy_a - self.conditional(basis).iter().map(|(p, s)| p * s).sum::<f64>()
    }
}

impl Objective for OneWayObjective {
    fn eval(&self, bases: &[ProjectiveBasis]) -> f64 {
        self.mutual_information() - self.classical_information(&bases[0])
    }
}

pub(crate) fn require_pair(rho: &DensityMatrix) -> Result<()> {
    if rho.sites() != 2 {
        return Err(Error::Dimension(format!("expected a two-site (9x9) state, got {} sites", rho.sites())));
    }
    let (vals, _) = hermitian_eigen(rho.data());
    if let Some(&bad) = vals.iter().find(|&&v| v < -NEGATIVE_EIG_TOL) {
        return Err(Error::NotPositive(bad));
    }
    Ok(())
}

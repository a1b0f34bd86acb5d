use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A real symmetric operator applied matrix-free.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    /// Upper bound on the spectral radius; residual tolerances are relative to it.
    fn norm_estimate(&self) -> f64;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Clone, Debug, PartialEq)]
pub struct LanczosConfig {
    /// Converged when `||Hv - Ev|| <= tolerance * norm_estimate`.
    pub tolerance: f64,
    /// Krylov vectors kept per restart cycle.
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Seed of the random real start vector.
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self { tolerance: 1e-10, krylov_dim: 60, max_restarts: 400, seed: 0x5EED }
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// `k` lowest eigenpairs, one at a time, each orthogonalised against the
/// previously converged vectors so degenerate levels appear with multiplicity.
pub fn lowest_eigenpairs<O: LinearOperator>(op: &O, k: usize, cfg: &LanczosConfig) -> Result<Vec<Eigenpair>> {
    if k > op.dim() {
        return Err(Error::InvalidArgument(format!("requested {k} levels of a {}-dim operator", op.dim())));
    }
    let mut found: Vec<Eigenpair> = Vec::with_capacity(k);
    for level in 0..k {
        let locked: Vec<Vec<f64>> = found.iter().map(|p| p.vector.clone()).collect();
        let level_cfg = LanczosConfig { seed: cfg.seed.wrapping_add(level as u64), ..cfg.clone() };
        found.push(lowest_eigenpair(op, &locked, &level_cfg, None)?);
    }
    Ok(found)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn orthogonalize(w: &mut [f64], against: &[Vec<f64>]) {
    for _ in 0..2 {
        for u in against {
            let p = dot(w, u);
            axpy(-p, u, w);
        }
    }
}

/// Lowest Ritz pair of the tridiagonal `(alpha, beta)`.
fn lowest_ritz(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (idx, &val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty tridiagonal");
    (val, eig.eigenvectors.column(idx).iter().cloned().collect())
}

/// Restarted Lanczos for the lowest eigenpair in the complement of `locked`.
///
/// With `stop_below = Some(e)` the run ends as soon as a Ritz value drops
/// below `e`; the returned pair is then an unconverged upper bound, which
/// is all a degeneracy test needs.
pub(crate) fn lowest_eigenpair<O: LinearOperator>(
    op: &O,
    locked: &[Vec<f64>],
    cfg: &LanczosConfig,
    stop_below: Option<f64>,
) -> Result<Eigenpair> {
    let n = op.dim();
    if locked.len() >= n {
        return Err(Error::InvalidArgument("no directions left after deflation".into()));
    }
    let scale = op.norm_estimate();
    let target = cfg.tolerance * scale;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let m_max = cfg.krylov_dim.max(2).min(n);
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let mut w = vec![0.0; n];

    for _cycle in 0..=cfg.max_restarts {
        orthogonalize(&mut start, locked);
        let s = norm(&start);
        if s < 1e-300 {
            return Err(Error::InvalidArgument("start vector vanished after deflation".into()));
        }
        start.iter_mut().for_each(|x| *x /= s);

        let mut basis: Vec<Vec<f64>> = vec![std::mem::take(&mut start)];
        let mut alpha: Vec<f64> = Vec::with_capacity(m_max);
        let mut beta: Vec<f64> = Vec::with_capacity(m_max);
        let ritz = loop {
            let j = basis.len() - 1;
            op.apply(&basis[j], &mut w);
            iterations += 1;
            let a = dot(&w, &basis[j]);
            axpy(-a, &basis[j], &mut w);
            if j > 0 {
                axpy(-beta[j - 1], &basis[j - 1], &mut w);
            }
            orthogonalize(&mut w, locked);
            orthogonalize(&mut w, &basis);
            alpha.push(a);
            let b = norm(&w);
            let exhausted = b <= 1e-13 * scale || basis.len() == n - locked.len();
            let full = basis.len() == m_max;
            if exhausted || full || j % 4 == 3 {
                let ritz = lowest_ritz(&alpha, &beta);
                let estimate = b * ritz.1.last().unwrap().abs();
                if let Some(limit) = stop_below {
                    if ritz.0 < limit {
                        let vector = combine(&basis, &ritz.1);
                        return Ok(Eigenpair { value: ritz.0, vector, residual: estimate, iterations });
                    }
                }
                if exhausted || full || estimate <= 0.1 * target {
                    break ritz;
                }
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        };

        let mut x = combine(&basis, &ritz.1);
        orthogonalize(&mut x, locked);
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v /= nx);
        op.apply(&x, &mut w);
        let value = dot(&x, &w);
        axpy(-value, &x, &mut w);
        residual = norm(&w);
        if residual <= target {
            return Ok(Eigenpair { value, vector: x, residual, iterations });
        }
        if let Some(limit) = stop_below {
            if value < limit {
                return Ok(Eigenpair { value, vector: x, residual, iterations });
            }
        }
        start = x;
    }
    Err(Error::NotConverged { iterations, residual })
}

fn combine(basis: &[Vec<f64>], coeffs: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; basis[0].len()];
    for (v, &c) in basis.iter().zip(coeffs) {
        axpy(c, v, &mut x);
    }
    x
}

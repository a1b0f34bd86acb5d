use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Abscissae closer than this (relative) are merged into one weighted knot.
const TIE_TOL: f64 = 1e-12;

/// Cubic smoothing spline fitted at its knots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingSpline {
    /// Distinct knots, ascending.
    pub xs: Vec<f64>,
    pub fitted: Vec<f64>,
    /// Penalty weight multiplying `∫ g''²`.
    pub lambda: f64,
    /// Residual sum of squares over all input points (ties included).
    pub rss: f64,
    /// Generalised cross-validation score at `lambda`.
    pub gcv: f64,
    /// Trace of the smoother matrix.
    pub dof: f64,
}

/// Fits `min Σ (y - g(x))² + λ ∫ g''²` with `λ` chosen by generalised
/// cross-validation (Reinsch form, smoother diagonalised once).
pub fn smoothing_spline(xs: &[f64], ys: &[f64]) -> Result<SmoothingSpline> {
    if xs.len() != ys.len() {
        return Err(Error::Dimension(format!("{} xs for {} ys", xs.len(), ys.len())));
    }
    let mut pts: Vec<(f64, f64)> = xs.iter().cloned().zip(ys.iter().cloned()).collect();
    if pts.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidArgument("spline data must be finite".into()));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));

    // merge ties into weighted knots
    let mut kx: Vec<f64> = Vec::new();
    let mut ky: Vec<f64> = Vec::new();
    let mut kw: Vec<f64> = Vec::new();
    let mut tie_ss = 0.0;
    let mut group: Vec<f64> = Vec::new();
    let mut flush = |group: &mut Vec<f64>, x: f64, kx: &mut Vec<f64>, ky: &mut Vec<f64>, kw: &mut Vec<f64>| {
        let m = group.iter().sum::<f64>() / group.len() as f64;
        tie_ss += group.iter().map(|y| (y - m).powi(2)).sum::<f64>();
        kx.push(x);
        ky.push(m);
        kw.push(group.len() as f64);
        group.clear();
    };
    let mut gx = pts[0].0;
    for &(x, y) in &pts {
        if (x - gx).abs() > TIE_TOL * (1.0 + gx.abs()) && !group.is_empty() {
            flush(&mut group, gx, &mut kx, &mut ky, &mut kw);
            gx = x;
        }
        group.push(y);
    }
    flush(&mut group, gx, &mut kx, &mut ky, &mut kw);

    let n = kx.len();
    if n < 3 {
        return Err(Error::NotEnoughData(format!("smoothing spline needs 3 distinct abscissae, got {n}")));
    }
    let h: Vec<f64> = kx.windows(2).map(|w| w[1] - w[0]).collect();
    let m = n - 2;
    let mut q = DMatrix::<f64>::zeros(n, m);
    let mut r = DMatrix::<f64>::zeros(m, m);
    for j in 0..m {
        q[(j, j)] = 1.0 / h[j];
        q[(j + 1, j)] = -1.0 / h[j] - 1.0 / h[j + 1];
        q[(j + 2, j)] = 1.0 / h[j + 1];
        r[(j, j)] = (h[j] + h[j + 1]) / 3.0;
        if j + 1 < m {
            r[(j, j + 1)] = h[j + 1] / 6.0;
            r[(j + 1, j)] = h[j + 1] / 6.0;
        }
    }
    let chol = r.cholesky().ok_or_else(|| Error::InvalidArgument("spline band matrix not positive".into()))?;
    let rinv_qt = chol.solve(&q.transpose());
    let k = &q * rinv_qt;
    let sw: Vec<f64> = kw.iter().map(|w| w.sqrt()).collect();
    let kt = DMatrix::from_fn(n, n, |i, j| 0.5 * (k[(i, j)] + k[(j, i)]) / (sw[i] * sw[j]));
    let eig = kt.symmetric_eigen();
    let evals: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    let yt = DVector::from_iterator(n, ky.iter().zip(&sw).map(|(y, s)| y * s));
    let a = eig.eigenvectors.transpose() * &yt;

    let score = |lambda: f64| -> (f64, f64, f64) {
        let mut rss = 0.0;
        let mut tr = 0.0;
        for i in 0..n {
            let s = 1.0 / (1.0 + lambda * evals[i]);
            rss += ((1.0 - s) * a[i]).powi(2);
            tr += s;
        }
        let denom = (n as f64 - tr).max(1e-300);
        (n as f64 * rss / (denom * denom), rss, tr)
    };

    let kmean = evals.iter().sum::<f64>() / n as f64;
    let base = if kmean > 0.0 { 1.0 / kmean } else { 1.0 };
    let (lo_t, hi_t, steps) = (-12.0, 8.0, 200);
    let at = |t: f64| score(base * 10f64.powf(t)).0;
    let mut best_t = lo_t;
    let mut best = f64::INFINITY;
    for s in 0..=steps {
        let t = lo_t + (hi_t - lo_t) * s as f64 / steps as f64;
        let g = at(t);
        if g < best {
            best = g;
            best_t = t;
        }
    }
    // golden-section refinement in log λ
    let dt = (hi_t - lo_t) / steps as f64;
    let (mut a_t, mut b_t) = ((best_t - dt).max(lo_t), (best_t + dt).min(hi_t));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c_t = b_t - phi * (b_t - a_t);
    let mut d_t = a_t + phi * (b_t - a_t);
    for _ in 0..60 {
        if at(c_t) < at(d_t) {
            b_t = d_t;
        } else {
            a_t = c_t;
        }
        c_t = b_t - phi * (b_t - a_t);
        d_t = a_t + phi * (b_t - a_t);
    }
    let t = 0.5 * (a_t + b_t);
    let t = if at(t) <= best { t } else { best_t };
    let lambda = base * 10f64.powf(t);
    let (gcv, rss, dof) = score(lambda);

    let shrink = DVector::from_iterator(n, (0..n).map(|i| a[i] / (1.0 + lambda * evals[i])));
    let gt = &eig.eigenvectors * shrink;
    let fitted = (0..n).map(|i| gt[i] / sw[i]).collect();
    Ok(SmoothingSpline { xs: kx, fitted, lambda, rss: rss + tie_ss, gcv, dof })
}

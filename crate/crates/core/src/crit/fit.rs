use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::Curve;
use crate::error::{Error, Result};

/// Least-squares polynomial coefficients `c[0] + c[1] t + ...` with
/// `t = x - center`.
pub fn least_squares_poly(xs: &[f64], ys: &[f64], degree: usize, center: f64) -> Result<Vec<f64>> {
    if xs.len() != ys.len() {
        return Err(Error::Dimension(format!("{} xs for {} ys", xs.len(), ys.len())));
    }
    if xs.len() <= degree {
        return Err(Error::NotEnoughData(format!(
            "degree-{degree} fit needs {} points, got {}",
            degree + 1,
            xs.len()
        )));
    }
    let a = DMatrix::from_fn(xs.len(), degree + 1, |i, k| (xs[i] - center).powi(k as i32));
    let b = DVector::from_column_slice(ys);
    let svd = a.svd(true, true);
    let c = svd.solve(&b, 1e-14).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(c.iter().cloned().collect())
}

/// Result of the linear extrapolation `x_peak(L) = u_c + slope / L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub u_c: f64,
    pub slope: f64,
    /// Root-mean-square deviation of the retained peaks from the line.
    pub fit_residual: f64,
    /// Sizes entering the fit, ascending.
    pub sizes: Vec<usize>,
}

/// Fits peak positions linearly in `1/L` after discarding sizes below `drop_below`.
pub fn extrapolate_critical(sizes: &[usize], peaks: &[f64], drop_below: usize) -> Result<Extrapolation> {
    if sizes.len() != peaks.len() {
        return Err(Error::Dimension(format!("{} sizes for {} peaks", sizes.len(), peaks.len())));
    }
    let mut pts: Vec<(usize, f64)> =
        sizes.iter().cloned().zip(peaks.iter().cloned()).filter(|(l, _)| *l >= drop_below).collect();
    pts.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    if pts.len() < 3 {
        return Err(Error::NotEnoughData(format!("{} sizes retained, need 3", pts.len())));
    }
    if pts.iter().any(|(l, p)| *l == 0 || !p.is_finite()) {
        return Err(Error::InvalidArgument("sizes must be positive and peaks finite".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|(l, _)| 1.0 / *l as f64).collect();
    let ys: Vec<f64> = pts.iter().map(|(_, p)| *p).collect();
    let c = least_squares_poly(&xs, &ys, 1, 0.0)?;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - c[0] - c[1] * x).powi(2)).sum();
    Ok(Extrapolation {
        u_c: c[0],
        slope: c[1],
        fit_residual: (ss / xs.len() as f64).sqrt(),
        sizes: pts.iter().map(|(l, _)| *l).collect(),
    })
}

/// Common crossing of several curves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Mean of the pairwise crossings.
    pub u_star: f64,
    /// Largest minus smallest pairwise crossing.
    pub spread: f64,
    /// `(i, j, x)` for every curve pair `i < j`.
    pub pairs: Vec<(usize, usize, f64)>,
}

/// Intersects quadratic least-squares fits of every curve pair inside `window`.
///
/// When a pair has two roots in the window the one nearer the window centre
/// is used.
pub fn crossing_point(curves: &[Curve], window: (f64, f64)) -> Result<Crossing> {
    if curves.len() < 2 {
        return Err(Error::NotEnoughData(format!("crossing needs 2 curves, got {}", curves.len())));
    }
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::InvalidArgument(format!("empty window [{lo}, {hi}]")));
    }
    let center = 0.5 * (lo + hi);
    let fits: Vec<Vec<f64>> = curves
        .iter()
        .map(|c| {
            let w = c.window(lo, hi);
            least_squares_poly(&w.xs, &w.ys, 2, center)
        })
        .collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for i in 0..fits.len() {
        for j in i + 1..fits.len() {
            let d: Vec<f64> = (0..3).map(|k| fits[i][k] - fits[j][k]).collect();
            let roots = quadratic_roots(d[2], d[1], d[0]);
            let best = roots
                .into_iter()
                .map(|t| t + center)
                .filter(|x| *x >= lo && *x <= hi)
                .min_by(|a, b| (a - center).abs().total_cmp(&(b - center).abs()));
            match best {
                Some(x) => pairs.push((i, j, x)),
                None => return Err(Error::NoCrossing(i, j)),
            }
        }
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.2).collect();
    let u_star = xs.iter().sum::<f64>() / xs.len() as f64;
    let spread = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - xs.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(Crossing { u_star, spread, pairs })
}

/// Real roots of `a t² + b t + c`, using the cancellation-free form.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.abs() <= 1e-14 * scale {
        if b.abs() <= 1e-14 * scale {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

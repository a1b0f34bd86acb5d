use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spline::smoothing_spline;
use super::Curve;
use crate::error::{Error, Result};

/// Candidate exponents in the coarse ν scan.
const NU_SCAN_POINTS: usize = 121;

/// Outcome of the ν scan in [`fss_collapse`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub u_c: f64,
    pub nu: f64,
    /// `sqrt(2 c_min / c'')`: the shift in ν that doubles the collapse cost.
    pub nu_err: f64,
    /// Collapse cost at `nu` (see [`collapse_cost`]).
    pub residual: f64,
    /// Minimum on the scan boundary, non-positive curvature, or `nu_err`
    /// wider than the scan range.
    pub unreliable: bool,
    /// `(ν, cost)` pairs of the coarse scan.
    pub scan: Vec<(f64, f64)>,
}

/// Deviation of the rescaled points `((x - u_c) L^{1/ν}, y)` of all curves
/// from one smoothing-spline master curve, measured by the generalised
/// cross-validation score `n RSS / (n - dof)²`.
///
/// Plain RSS is not used: for some ν the cross-validated spline interpolates
/// the pooled points and the RSS collapses to zero away from the true ν.
pub fn collapse_cost(curves: &[Curve], u_c: f64, nu: f64) -> Result<f64> {
    if !(nu > 0.0) || !u_c.is_finite() {
        return Err(Error::InvalidArgument(format!("collapse needs nu > 0 and finite u_c (nu={nu}, u_c={u_c})")));
    }
    let mut zs = Vec::new();
    let mut ys = Vec::new();
    for c in curves {
        let scale = (c.sites as f64).powf(1.0 / nu);
        zs.extend(c.xs.iter().map(|x| (x - u_c) * scale));
        ys.extend_from_slice(&c.ys);
    }
    let fit = smoothing_spline(&zs, &ys)?;
    let n = zs.len() as f64;
    Ok(n * fit.rss / (n - fit.dof).powi(2))
}

/// Scans `ν` over `nu_range` for the best collapse of `curves` about `u_c`.
///
/// The coarse scan is refined by golden-section search between the
/// neighbours of the best scan point; ties go to the smaller `ν`.
pub fn fss_collapse(curves: &[Curve], u_c: f64, nu_range: (f64, f64)) -> Result<ScalingFit> {
    if curves.len() < 3 {
        return Err(Error::NotEnoughData(format!("collapse needs 3 curves, got {}", curves.len())));
    }
    let (lo, hi) = nu_range;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidArgument(format!("nu range [{lo}, {hi}] must satisfy 0 < lo < hi")));
    }
    if curves.iter().any(|c| c.sites == 0) {
        return Err(Error::InvalidArgument("curve with zero chain length".into()));
    }
    let step = (hi - lo) / (NU_SCAN_POINTS - 1) as f64;
    let nus: Vec<f64> = (0..NU_SCAN_POINTS).map(|i| lo + step * i as f64).collect();
    let costs: Vec<f64> = nus.par_iter().map(|&nu| collapse_cost(curves, u_c, nu)).collect::<Result<_>>()?;
    let scan: Vec<(f64, f64)> = nus.iter().cloned().zip(costs.iter().cloned()).collect();

    let mut k = 0;
    for i in 1..costs.len() {
        if costs[i] < costs[k] {
            k = i;
        }
    }
    let edge = k == 0 || k == costs.len() - 1;
    let cost = |nu: f64| collapse_cost(curves, u_c, nu);

    let (mut a, mut b) = (nus[k.saturating_sub(1)], nus[(k + 1).min(nus.len() - 1)]);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (cost(c)?, cost(d)?);
    for _ in 0..40 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = cost(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = cost(d)?;
        }
    }
    let (mut nu, mut residual) = if fc <= fd { (c, fc) } else { (d, fd) };
    if costs[k] < residual {
        nu = nus[k];
        residual = costs[k];
    }

    let delta = (0.5 * step).min(0.5 * nu);
    let curvature = (cost(nu + delta)? - 2.0 * residual + cost(nu - delta)?) / (delta * delta);
    let width = hi - lo;
    let nu_err = if curvature > 0.0 { (2.0 * residual / curvature).sqrt() } else { f64::INFINITY };
    // identical costs everywhere carry no information about ν
    let n_pts: usize = curves.iter().map(|c| c.len()).sum();
    let mean = curves.iter().flat_map(|c| &c.ys).sum::<f64>() / n_pts as f64;
    let variance = curves.iter().flat_map(|c| &c.ys).map(|y| (y - mean).powi(2)).sum::<f64>() / n_pts as f64;
    let (cmin, cmax) = costs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &c| (a.min(c), b.max(c)));
    let flat = cmax - cmin <= 1e-10 * variance || variance <= 1e-20 * mean * mean;
    let unreliable = flat || edge || !(curvature > 0.0) || nu_err > width;
    Ok(ScalingFit { u_c, nu, nu_err, residual, unreliable, scan })
}

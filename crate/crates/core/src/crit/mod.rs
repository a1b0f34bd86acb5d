//! Finite-size analysis of discord curves.
//!
//! Curves are sampled on uniform grids. [`derivative`] uses second-order
//! stencils, [`peak_location`] interpolates a parabola through the largest
//! sample, [`extrapolate_critical`] fits peak positions linearly in `1/L`,
//! [`crossing_point`] intersects quadratic fits of several sizes and
//! [`fss_collapse`] scans `ν` for the best data collapse onto one
//! smoothing-spline master curve.

mod collapse;
mod fit;
mod spline;

use serde::{Deserialize, Serialize};

use crate::discord::Mode;
use crate::error::{Error, Result};
use crate::model::Boundary;

pub use collapse::{collapse_cost, fss_collapse, ScalingFit};
pub use fit::{crossing_point, extrapolate_critical, least_squares_poly, Crossing, Extrapolation};
pub use spline::{smoothing_spline, SmoothingSpline};

/// Absolute tolerance on grid spacing deviations.
pub const UNIFORM_TOL: f64 = 1e-12;

/// Provenance of a curve; every field is optional.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CurveMeta {
    pub boundary: Option<Boundary>,
    pub pair: Option<(usize, usize)>,
    pub mode: Option<Mode>,
}

/// Samples `ys[i] = y(xs[i])` of a quantity for chain length `sites`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub sites: usize,
    #[serde(default)]
    pub meta: CurveMeta,
}

impl Curve {
    /// Requires equal lengths, finite values and strictly ascending `xs`.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, sites: usize) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Dimension(format!("{} xs for {} ys", xs.len(), ys.len())));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("curve contains non-finite values".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("curve xs must be strictly ascending".into()));
        }
        Ok(Self { xs, ys, sites, meta: CurveMeta::default() })
    }

    pub fn with_meta(mut self, meta: CurveMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Grid step, or `NonUniformGrid` if spacings differ by more than [`UNIFORM_TOL`].
    pub fn step(&self) -> Result<f64> {
        if self.xs.len() < 2 {
            return Err(Error::NotEnoughData("a grid step needs two points".into()));
        }
        let n = self.xs.len();
        let h = (self.xs[n - 1] - self.xs[0]) / (n - 1) as f64;
        for (i, w) in self.xs.windows(2).enumerate() {
            if ((w[1] - w[0]) - h).abs() > UNIFORM_TOL {
                return Err(Error::NonUniformGrid(format!("spacing {} at index {i}, mean {h}", w[1] - w[0])));
            }
        }
        Ok(h)
    }

    /// Points with `lo <= x <= hi`.
    pub fn window(&self, lo: f64, hi: f64) -> Curve {
        let (xs, ys) = self.xs.iter().zip(&self.ys).filter(|(x, _)| **x >= lo && **x <= hi).unzip();
        Curve { xs, ys, sites: self.sites, meta: self.meta.clone() }
    }
}

/// First or second derivative with second-order accuracy everywhere.
///
/// Interior points use central differences; the ends use the one-sided
/// stencils `(-3y0 + 4y1 - y2)/2h` and `(2y0 - 5y1 + 4y2 - y3)/h²`.
pub fn derivative(curve: &Curve, order: u8) -> Result<Curve> {
    if !matches!(order, 1 | 2) {
        return Err(Error::InvalidArgument(format!("derivative order {order} (expected 1 or 2)")));
    }
    let n = curve.len();
    if n < order as usize + 2 {
        return Err(Error::NotEnoughData(format!("order-{order} derivative needs {} points, got {n}", order + 2)));
    }
    let h = curve.step()?;
    let y = &curve.ys;
    let mut d = vec![0.0; n];
    if order == 1 {
        for i in 1..n - 1 {
            d[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
        }
        d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h);
        d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h);
    } else {
        let h2 = h * h;
        for i in 1..n - 1 {
            d[i] = (y[i + 1] - 2.0 * y[i] + y[i - 1]) / h2;
        }
        d[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / h2;
        d[n - 1] = (2.0 * y[n - 1] - 5.0 * y[n - 2] + 4.0 * y[n - 3] - y[n - 4]) / h2;
    }
    Ok(Curve { xs: curve.xs.clone(), ys: d, sites: curve.sites, meta: curve.meta.clone() })
}

/// Maximum of a curve within a window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    pub x: f64,
    pub y: f64,
    /// The largest sample sits on the window boundary; `x`, `y` are that sample.
    pub at_edge: bool,
}

/// Parabolic interpolation through the largest sample in `[lo, hi]` and its neighbours.
pub fn peak_location(curve: &Curve, window: (f64, f64)) -> Result<Peak> {
    let w = curve.window(window.0, window.1);
    if w.len() < 3 {
        return Err(Error::NotEnoughData(format!("peak window holds {} points, need 3", w.len())));
    }
    let mut k = 0;
    for i in 1..w.len() {
        if w.ys[i] > w.ys[k] {
            k = i;
        }
    }
    if k == 0 || k == w.len() - 1 {
        return Ok(Peak { x: w.xs[k], y: w.ys[k], at_edge: true });
    }
    let (x0, x1, x2) = (w.xs[k - 1], w.xs[k], w.xs[k + 1]);
    let (y0, y1, y2) = (w.ys[k - 1], w.ys[k], w.ys[k + 1]);
    // vertex of the interpolating parabola (general spacing)
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if a >= 0.0 {
        return Ok(Peak { x: x1, y: y1, at_edge: false });
    }
    let b = d01 - a * (x0 + x1);
    let x = -b / (2.0 * a);
    let y = y1 + (x - x1) * (d01 + a * (x - x0));
    Ok(Peak { x, y, at_edge: false })
}

/// Slope discontinuity of a sampled curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Kink {
    /// Intersection of the straight-line continuations from either side.
    pub x: f64,
    /// Right slope minus left slope.
    pub slope_jump: f64,
}

/// Locates slope discontinuities such as ground-level crossings in `E0(U)`.
///
/// A kink is reported where the second difference has a local extremum larger
/// than `spike_ratio` times the median second difference and the slopes of the
/// two-point lines on either side differ by more than `min_jump`.
pub fn find_kinks(curve: &Curve, min_jump: f64, spike_ratio: f64) -> Result<Vec<Kink>> {
    let n = curve.len();
    if n < 7 {
        return Err(Error::NotEnoughData(format!("kink search needs 7 points, got {n}")));
    }
    let h = curve.step()?;
    let (x, y) = (&curve.xs, &curve.ys);
    let d2: Vec<f64> = (1..n - 1).map(|i| (y[i + 1] - 2.0 * y[i] + y[i - 1]).abs()).collect();
    let mut sorted = d2.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let threshold = (spike_ratio * median).max(1e-3 * min_jump * h);

    let mut kinks: Vec<(usize, Kink)> = Vec::new();
    // d2[j] belongs to grid index j + 1
    for j in 0..d2.len() {
        let i = j + 1;
        let local_max = (j == 0 || d2[j] >= d2[j - 1]) && (j + 1 == d2.len() || d2[j] > d2[j + 1]);
        if !local_max || d2[j] <= threshold || i < 3 || i + 3 >= n {
            continue;
        }
        let sl = (y[i - 1] - y[i - 2]) / h;
        let sr = (y[i + 3] - y[i + 2]) / h;
        let jump = sr - sl;
        if jump.abs() <= min_jump {
            continue;
        }
        // left line through i-2, right line through i+2
        let xk = (y[i + 2] - sr * x[i + 2] - y[i - 2] + sl * x[i - 2]) / (sl - sr);
        if let Some(last) = kinks.last() {
            if i - last.0 <= 2 {
                continue;
            }
        }
        kinks.push((i, Kink { x: xk, slope_jump: jump }));
    }
    Ok(kinks.into_iter().map(|(_, k)| k).collect())
}

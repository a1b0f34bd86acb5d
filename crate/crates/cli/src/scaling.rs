//! The `scaling` command: peak extrapolation, crossing and data collapse of
//! sweep output.

use std::collections::BTreeMap;
use std::path::PathBuf;

use qdisc_core::crit::{
    crossing_point, derivative, extrapolate_critical, fss_collapse, peak_location, Crossing, CurveMeta, Extrapolation,
    Peak,
};
use qdisc_core::{Curve, ScalingFit};
use serde::Serialize;

use crate::config::ScalingOptions;
use crate::error::{CliError, CliResult};
use crate::record::{read_records, ResultRecord};

/// Largest size below which extrapolated couplings are flagged as
/// small-system estimates.
const SMALL_SYSTEM: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeakRow {
    #[serde(rename = "L")]
    pub sites: usize,
    #[serde(flatten)]
    pub peak: Peak,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingReport {
    pub sizes: Vec<usize>,
    /// First-derivative peaks, empty for second-derivative input.
    pub peaks: Vec<PeakRow>,
    pub extrapolation: Option<Extrapolation>,
    pub crossing: Option<Crossing>,
    pub collapse: Option<ScalingFit>,
    pub warnings: Vec<String>,
}

/// Groups zero-temperature discord rows by chain length into curves over U.
pub fn curves_from_records(records: &[(PathBuf, ResultRecord)]) -> CliResult<Vec<Curve>> {
    let mut by_size: BTreeMap<usize, Vec<&(PathBuf, ResultRecord)>> = BTreeMap::new();
    for entry in records {
        let r = &entry.1;
        if r.t.is_some() || r.kind.starts_with("level") {
            continue;
        }
        by_size.entry(r.sites).or_default().push(entry);
    }
    let mut curves = Vec::new();
    for (sites, mut rows) in by_size {
        let (path, first) = rows[0];
        let signature = |r: &ResultRecord| (r.boundary, r.kind.clone(), r.mode, r.pair);
        if let Some((p, r)) = rows.iter().map(|e| (&e.0, &e.1)).find(|(_, r)| signature(r) != signature(first)) {
            return Err(CliError::Input {
                path: p.clone(),
                message: format!(
                    "L={sites} mixes series ({} {} {:?} vs {} {} {:?}); analyse one series per size",
                    first.boundary.as_str(),
                    first.kind,
                    first.pair,
                    r.boundary.as_str(),
                    r.kind,
                    r.pair
                ),
            });
        }
        rows.sort_by(|a, b| a.1.u.total_cmp(&b.1.u));
        if let Some(w) = rows.windows(2).find(|w| w[0].1.u == w[1].1.u) {
            return Err(CliError::Input {
                path: w[1].0.clone(),
                message: format!("L={sites}: U={} appears twice", w[1].1.u),
            });
        }
        let xs = rows.iter().map(|e| e.1.u).collect();
        let ys = rows.iter().map(|e| e.1.value).collect();
        let meta = CurveMeta { boundary: Some(first.boundary), pair: first.pair, mode: first.mode };
        let curve = Curve::new(xs, ys, sites)
            .map_err(|e| CliError::Input { path: path.clone(), message: e.to_string() })?
            .with_meta(meta);
        curves.push(curve);
    }
    if let Some(first) = curves.first() {
        for c in &curves[1..] {
            if c.xs != first.xs {
                return Err(CliError::Config(format!(
                    "grid mismatch: L={} and L={} are sampled on different U grids",
                    first.sites, c.sites
                )));
            }
        }
    }
    Ok(curves)
}

/// Derivative of `curve` evaluated on `[lo, hi]`, using one extra grid point
/// on each side when available so the window ends get central stencils.
fn windowed_derivative(curve: &Curve, order: u8, lo: f64, hi: f64) -> CliResult<Curve> {
    let inside: Vec<usize> = (0..curve.len()).filter(|&i| curve.xs[i] >= lo && curve.xs[i] <= hi).collect();
    let (Some(&a), Some(&b)) = (inside.first(), inside.last()) else {
        return Err(CliError::Config(format!("L={}: no samples in [{lo}, {hi}]", curve.sites)));
    };
    let a = a.saturating_sub(1);
    let b = (b + 1).min(curve.len() - 1);
    let sub = curve.window(curve.xs[a], curve.xs[b]);
    let d = derivative(&sub, order).map_err(|e| CliError::Config(format!("L={}: {e}", curve.sites)))?;
    Ok(d.window(lo, hi))
}

/// Runs the analysis on already grouped curves.
pub fn analyse(curves: &[Curve], opts: &ScalingOptions) -> CliResult<ScalingReport> {
    let mut warnings = Vec::new();
    let sizes: Vec<usize> = curves.iter().map(|c| c.sites).collect();
    if sizes.len() < 3 {
        warnings.push(format!("only {} sizes; extrapolation and collapse need 3", sizes.len()));
    }

    let mut peaks = Vec::new();
    let mut extrapolation = None;
    if !opts.second_derivative_input {
        match peak_table(curves, opts.peak_window) {
            Ok(table) => peaks = table,
            Err(e) => warnings.push(format!("peaks skipped: {e}")),
        }
        for p in peaks.iter().filter(|p| p.peak.at_edge) {
            warnings.push(format!("L={}: derivative maximum on the peak-window edge at U={}", p.sites, p.peak.x));
        }
        if !peaks.is_empty() {
            let xs: Vec<f64> = peaks.iter().map(|p| p.peak.x).collect();
            match extrapolate_critical(&sizes, &xs, opts.drop_below) {
                Ok(e) => {
                    if e.sizes.last().is_some_and(|&l| l < SMALL_SYSTEM) {
                        warnings.push(format!(
                            "extrapolation uses small exact-diagonalisation sizes only (L <= {}); \
                             finite-size corrections to u_c can be large",
                            e.sizes.last().unwrap()
                        ));
                    }
                    extrapolation = Some(e);
                }
                Err(e) => warnings.push(format!("extrapolation skipped: {e}")),
            }
        }
    }

    let (lo, hi) = opts.cross_window;
    let second: CliResult<Vec<Curve>> = curves
        .iter()
        .map(|c| if opts.second_derivative_input { Ok(c.window(lo, hi)) } else { windowed_derivative(c, 2, lo, hi) })
        .collect();
    let (second, crossing) = match second {
        Ok(second) => match crossing_point(&second, (lo, hi)) {
            Ok(c) => (second, Some(c)),
            Err(e) => {
                warnings.push(format!("crossing skipped: {e}"));
                (second, None)
            }
        },
        Err(e) => {
            warnings.push(format!("crossing skipped: {e}"));
            (Vec::new(), None)
        }
    };
    let u_c = opts.u_c.or(crossing.as_ref().map(|c| c.u_star));
    let collapse = match u_c {
        Some(_) if second.is_empty() => {
            warnings.push("collapse skipped: no second-derivative data in the crossing window".into());
            None
        }
        Some(u_c) => match fss_collapse(&second, u_c, opts.nu_range) {
            Ok(fit) => {
                if fit.unreliable {
                    warnings.push(format!("collapse unreliable: nu={} nu_err={}", fit.nu, fit.nu_err));
                }
                Some(fit)
            }
            Err(e) => {
                warnings.push(format!("collapse skipped: {e}"));
                None
            }
        },
        None => {
            warnings.push("collapse skipped: no crossing and no --uc".into());
            None
        }
    };
    if peaks.is_empty() && crossing.is_none() && collapse.is_none() {
        return Err(CliError::Config(format!("inputs: nothing could be analysed ({})", warnings.join("; "))));
    }
    Ok(ScalingReport { sizes, peaks, extrapolation, crossing, collapse, warnings })
}

fn peak_table(curves: &[Curve], (lo, hi): (f64, f64)) -> CliResult<Vec<PeakRow>> {
    curves
        .iter()
        .map(|c| {
            let d1 = windowed_derivative(c, 1, lo, hi)?;
            let peak = peak_location(&d1, (lo, hi)).map_err(|e| CliError::Config(format!("L={}: {e}", c.sites)))?;
            Ok(PeakRow { sites: c.sites, peak })
        })
        .collect()
}

/// Reads the input CSVs, analyses them and writes the JSON report to `out` (or stdout).
pub fn run_scaling(opts: &ScalingOptions, out: Option<&std::path::Path>) -> CliResult<ScalingReport> {
    let mut records = Vec::new();
    for path in &opts.inputs {
        records.extend(read_records(path)?.into_iter().map(|r| (path.clone(), r)));
    }
    let curves = curves_from_records(&records)?;
    if curves.is_empty() {
        return Err(CliError::Config("inputs: no zero-temperature discord rows found".into()));
    }
    let report = analyse(&curves, opts)?;
    let json = serde_json::to_string_pretty(&report).expect("report serialises");
    match out {
        Some(path) => std::fs::write(path, json + "\n").map_err(CliError::io(path))?,
        None => println!("{json}"),
    }
    Ok(report)
}

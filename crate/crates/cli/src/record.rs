//! One CSV row per computed quantity.

use qdisc_core::{Boundary, MeasurementAngles, Mode};

use crate::error::{CliError, CliResult};

pub const HEADER: [&str; 19] = [
    "L", "boundary", "U", "T", "pair_i", "pair_j", "kind", "mode", "value", "theta", "alpha", "beta", "gamma", "psi",
    "phi", "phi0", "degenerate", "gs_energy", "seconds",
];

/// Bit set in [`ResultRecord::degenerate`] when the ground level is degenerate.
pub const DEGENERATE_LEVEL: u8 = 1;
/// Bit set when distinct measurements reach the discord minimum.
pub const DEGENERATE_MINIMUM: u8 = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRecord {
    pub sites: usize,
    pub boundary: Boundary,
    pub u: f64,
    pub t: Option<f64>,
    pub pair: Option<(usize, usize)>,
    /// `asym`, `sym`, `global`, or `levelN` for spectrum rows.
    pub kind: String,
    pub mode: Option<Mode>,
    pub value: f64,
    /// Optimising angles of the first measured site.
    pub angles: Option<MeasurementAngles>,
    /// Bit mask of [`DEGENERATE_LEVEL`] and [`DEGENERATE_MINIMUM`].
    pub degenerate: u8,
    pub gs_energy: Option<f64>,
    pub seconds: Option<f64>,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl ResultRecord {
    pub fn to_fields(&self) -> Vec<String> {
        let a = self.angles;
        let angle = |f: fn(&MeasurementAngles) -> f64| opt(a.as_ref().map(f));
        vec![
            self.sites.to_string(),
            self.boundary.as_str().to_string(),
            num(self.u),
            opt(self.t),
            self.pair.map(|p| p.0.to_string()).unwrap_or_default(),
            self.pair.map(|p| p.1.to_string()).unwrap_or_default(),
            self.kind.clone(),
            self.mode.map(|m| m.as_str().to_string()).unwrap_or_default(),
            num(self.value),
            angle(|a| a.theta),
            angle(|a| a.alpha),
            angle(|a| a.beta),
            angle(|a| a.gamma),
            angle(|a| a.psi),
            angle(|a| a.phi),
            angle(|a| a.phi0),
            self.degenerate.to_string(),
            opt(self.gs_energy),
            opt(self.seconds),
        ]
    }

    pub fn from_fields(fields: &[&str]) -> CliResult<Self> {
        if fields.len() != HEADER.len() {
            return Err(CliError::Config(format!("row has {} fields, expected {}", fields.len(), HEADER.len())));
        }
        let bad = |i: usize| CliError::Config(format!("column {}: cannot parse '{}'", HEADER[i], fields[i]));
        let f64_at = |i: usize| fields[i].parse::<f64>().map_err(|_| bad(i));
        let opt_f64 = |i: usize| if fields[i].is_empty() { Ok(None) } else { f64_at(i).map(Some) };
        let usize_at = |i: usize| fields[i].parse::<usize>().map_err(|_| bad(i));
        let pair = match (fields[4].is_empty(), fields[5].is_empty()) {
            (true, true) => None,
            (false, false) => Some((usize_at(4)?, usize_at(5)?)),
            _ => return Err(bad(4)),
        };
        let angle_vals: Vec<Option<f64>> = (9..16).map(opt_f64).collect::<CliResult<_>>()?;
        let angles = if angle_vals.iter().all(Option::is_none) {
            None
        } else if angle_vals.iter().all(Option::is_some) {
            let v: Vec<f64> = angle_vals.into_iter().flatten().collect();
            // CSV order θ, α, β, γ, ψ, φ, φ0 matches the canonical order
            Some(MeasurementAngles::from_ordered(&v))
        } else {
            return Err(bad(9));
        };
        Ok(ResultRecord {
            sites: usize_at(0)?,
            boundary: fields[1].parse().map_err(|_| bad(1))?,
            u: f64_at(2)?,
            t: opt_f64(3)?,
            pair,
            kind: fields[6].to_string(),
            mode: if fields[7].is_empty() { None } else { Some(fields[7].parse().map_err(|_| bad(7))?) },
            value: f64_at(8)?,
            angles,
            degenerate: fields[16].parse().map_err(|_| bad(16))?,
            gs_energy: opt_f64(17)?,
            seconds: opt_f64(18)?,
        })
    }

    /// Row identity used when resuming: everything except the computed outputs.
    pub fn key(&self) -> (usize, Boundary, u64, Option<u64>, Option<(usize, usize)>, &str) {
        (self.sites, self.boundary, self.u.to_bits(), self.t.map(f64::to_bits), self.pair, &self.kind)
    }
}

/// Reads every record of a CSV file written by this tool.
pub fn read_records(path: &std::path::Path) -> CliResult<Vec<ResultRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| CliError::Input { path: path.to_path_buf(), message: e.to_string() })?;
    let header = rdr.headers().map_err(|e| CliError::Input { path: path.to_path_buf(), message: e.to_string() })?;
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(CliError::Input { path: path.to_path_buf(), message: "unexpected CSV header".into() });
    }
    let mut out = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| CliError::Input { path: path.to_path_buf(), message: e.to_string() })?;
        let fields: Vec<&str> = row.iter().collect();
        out.push(ResultRecord::from_fields(&fields).map_err(|e| CliError::Input {
            path: path.to_path_buf(),
            message: format!("row {}: {e}", line + 2),
        })?);
    }
    Ok(out)
}

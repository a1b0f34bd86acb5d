//! Parsing of numeric grids, size lists, windows and pair selections.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Grid values are rounded to this many decimals so that points produced by
/// different segments coincide exactly.
const GRID_DECIMALS: f64 = 1e12;

fn round_grid(x: f64) -> f64 {
    let r = (x * GRID_DECIMALS).round() / GRID_DECIMALS;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn number(s: &str, field: &str) -> CliResult<f64> {
    let v: f64 = s.trim().parse().map_err(|_| CliError::Config(format!("{field}: '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::Config(format!("{field}: '{s}' is not finite")));
    }
    Ok(v)
}

/// Parses `min:max:step` ranges and single values, comma separated, into a
/// sorted grid without duplicates.
pub fn parse_grid(spec: &str, field: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(round_grid(number(v, field)?)),
            [lo, hi, step] => {
                let (lo, hi, step) = (number(lo, field)?, number(hi, field)?, number(step, field)?);
                if !(step > 0.0) {
                    return Err(CliError::Config(format!("{field}: step must be > 0 in '{item}'")));
                }
                if hi < lo {
                    return Err(CliError::Config(format!("{field}: max < min in '{item}'")));
                }
                let n = ((hi - lo) / step + 1e-9).floor() as usize;
                out.extend((0..=n).map(|i| round_grid(lo + step * i as f64)));
            }
            _ => return Err(CliError::Config(format!("{field}: expected 'min:max:step' or a value, got '{item}'"))),
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    if out.is_empty() {
        return Err(CliError::Config(format!("{field}: empty grid")));
    }
    Ok(out)
}

/// Comma-separated list of chain lengths.
pub fn parse_sizes(spec: &str) -> CliResult<Vec<usize>> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let l: usize = item.parse().map_err(|_| CliError::Config(format!("L: '{item}' is not a chain length")))?;
        out.push(l);
    }
    if out.is_empty() {
        return Err(CliError::Config("L: empty list".into()));
    }
    Ok(out)
}

/// `lo:hi` interval.
pub fn parse_window(spec: &str, field: &str) -> CliResult<(f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if let [lo, hi] = parts.as_slice() {
        let (lo, hi) = (number(lo, field)?, number(hi, field)?);
        if lo < hi {
            return Ok((lo, hi));
        }
    }
    Err(CliError::Config(format!("{field}: expected 'lo:hi' with lo < hi, got '{spec}'")))
}

/// Which pair of sites a two-site quantity refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairSpec {
    /// Sites `L/2 - 1` and `L/2`.
    Central,
    Indices(usize, usize),
    /// Sites `i` and `i + k` with `i = (L - 1 - k) / 2`, centred in the chain.
    Offset(usize),
}

impl PairSpec {
    pub fn parse(s: &str) -> CliResult<Self> {
        let s = s.trim();
        if s == "central" {
            return Ok(PairSpec::Central);
        }
        let bad = || CliError::Config(format!("pair: expected central, i:j or offset:k, got '{s}'"));
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["offset", k] => {
                let k: usize = k.parse().map_err(|_| bad())?;
                if k == 0 {
                    return Err(CliError::Config("pair: offset must be >= 1".into()));
                }
                Ok(PairSpec::Offset(k))
            }
            [i, j] => {
                let (i, j): (usize, usize) = (i.parse().map_err(|_| bad())?, j.parse().map_err(|_| bad())?);
                if i >= j {
                    return Err(CliError::Config(format!("pair: need i < j, got {i}:{j}")));
                }
                Ok(PairSpec::Indices(i, j))
            }
            _ => Err(bad()),
        }
    }

    pub fn parse_list(s: &str) -> CliResult<Vec<Self>> {
        let v: Vec<Self> = s.split(',').filter(|p| !p.trim().is_empty()).map(Self::parse).collect::<CliResult<_>>()?;
        if v.is_empty() {
            return Err(CliError::Config("pair: empty list".into()));
        }
        Ok(v)
    }

    /// Site indices for a chain of `sites`.
    pub fn resolve(&self, sites: usize) -> CliResult<(usize, usize)> {
        let (i, j) = match *self {
            PairSpec::Central => (sites / 2 - 1, sites / 2),
            PairSpec::Indices(i, j) => (i, j),
            PairSpec::Offset(k) => {
                if k >= sites {
                    return Err(CliError::Config(format!("pair: offset {k} does not fit L={sites}")));
                }
                let i = (sites - 1 - k) / 2;
                (i, i + k)
            }
        };
        if j >= sites {
            return Err(CliError::Config(format!("pair: site {j} out of range for L={sites}")));
        }
        Ok((i, j))
    }
}

impl fmt::Display for PairSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairSpec::Central => write!(f, "central"),
            PairSpec::Indices(i, j) => write!(f, "{i}:{j}"),
            PairSpec::Offset(k) => write!(f, "offset:{k}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_grid("0:1:0.25", "U").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("-2,0,2", "U").unwrap(), vec![-2.0, 0.0, 2.0]);
        let g = parse_grid("-2:1.5:0.01", "U").unwrap();
        assert_eq!(g.len(), 351);
        assert_eq!(*g.last().unwrap(), 1.5);
        // overlapping segments merge
        let g = parse_grid("-0.5:0:0.1,-0.4:-0.2:0.05", "U").unwrap();
        assert_eq!(g, vec![-0.5, -0.4, -0.35, -0.3, -0.25, -0.2, -0.1, 0.0]);
        assert!(parse_grid("1:0:0.1", "U").is_err());
        assert!(parse_grid("0:1:0", "U").is_err());
        assert!(parse_grid("a", "U").is_err());
        assert!(parse_grid("", "U").is_err());
    }

    #[test]
    fn pairs() {
        assert_eq!(PairSpec::parse("central").unwrap().resolve(8).unwrap(), (3, 4));
        assert_eq!(PairSpec::parse("offset:1").unwrap().resolve(8).unwrap(), (3, 4));
        assert_eq!(PairSpec::parse("offset:2").unwrap().resolve(6).unwrap(), (1, 3));
        assert_eq!(PairSpec::parse("0:5").unwrap().resolve(6).unwrap(), (0, 5));
        assert!(PairSpec::parse("0:6").unwrap().resolve(6).is_err());
        assert!(PairSpec::parse("3:1").is_err());
        assert!(PairSpec::parse("offset:0").is_err());
        assert_eq!(PairSpec::parse_list("offset:1,offset:2").unwrap().len(), 2);
        for s in ["central", "2:4", "offset:3"] {
            assert_eq!(PairSpec::parse(s).unwrap().to_string(), s);
        }
    }
}

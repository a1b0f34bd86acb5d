//! Execution of the `sweep`, `thermal` and `spectrum` commands.

use std::time::Instant;

use qdisc_core::discord::{asymmetric_discord, global_discord_in_mode, symmetric_discord};
use qdisc_core::model::{
    build_hamiltonian, chain_ground_state, low_spectrum, reduced_pair_state, ThermalSpectrum, DEGENERACY_GAP,
};
use qdisc_core::{Boundary, DensityMatrix, DiscordResult, Mode};
use rayon::prelude::*;

use crate::config::{Command, Kind, RunConfig};
use crate::error::{CliError, CliResult};
use crate::record::{ResultRecord, DEGENERATE_LEVEL, DEGENERATE_MINIMUM};
use crate::sink::Sink;

/// One `(L, U)` grid point; all rows it produces are computed from one
/// eigensolve or one full diagonalisation.
#[derive(Clone, Debug)]
struct Item {
    sites: usize,
    u: f64,
    /// Boundary actually used (periodic `L = 2` runs as open).
    boundary: Boundary,
}

type RowKey = (usize, Boundary, u64, Option<u64>, Option<(usize, usize)>, String);

/// Boundary used for a chain: a periodic two-site chain would count its
/// single bond twice, so it is computed with open boundaries.
pub fn effective_boundary(sites: usize, boundary: Boundary) -> Boundary {
    if sites == 2 {
        Boundary::Open
    } else {
        boundary
    }
}

fn plan(cfg: &RunConfig) -> Vec<Item> {
    let mut items = Vec::new();
    for &sites in &cfg.sizes {
        for &u in &cfg.u_grid {
            items.push(Item { sites, u, boundary: effective_boundary(sites, cfg.boundary) });
        }
    }
    items
}

fn pairs_for(cfg: &RunConfig, sites: usize) -> CliResult<Vec<Option<(usize, usize)>>> {
    if cfg.kind == Kind::Global {
        return Ok(vec![None]);
    }
    cfg.pairs.iter().map(|p| p.resolve(sites).map(Some)).collect()
}

fn expected_keys(cfg: &RunConfig, item: &Item) -> CliResult<Vec<RowKey>> {
    let key = |t: Option<f64>, pair, kind: String| (item.sites, item.boundary, item.u.to_bits(), t.map(f64::to_bits), pair, kind);
    let mut keys = Vec::new();
    match cfg.command {
        Command::Spectrum => {
            for n in 0..cfg.levels {
                keys.push(key(None, None, format!("level{n}")));
            }
        }
        Command::Sweep => {
            for pair in pairs_for(cfg, item.sites)? {
                keys.push(key(None, pair, cfg.kind.as_str().to_string()));
            }
        }
        Command::Thermal => {
            for &t in &cfg.t_grid {
                for pair in pairs_for(cfg, item.sites)? {
                    keys.push(key(Some(t), pair, cfg.kind.as_str().to_string()));
                }
            }
        }
        Command::Scaling => unreachable!("scaling has no grid items"),
    }
    Ok(keys)
}

fn record_mode(cfg: &RunConfig) -> Mode {
    match cfg.kind {
        Kind::Asym => Mode::Full,
        _ => cfg.mode,
    }
}

fn discord_of(cfg: &RunConfig, rho: &DensityMatrix) -> CliResult<DiscordResult> {
    Ok(match cfg.kind {
        Kind::Asym => asymmetric_discord(rho, &cfg.optimizer)?,
        Kind::Sym => symmetric_discord(rho, cfg.mode, &cfg.optimizer)?,
        Kind::Global => global_discord_in_mode(rho, cfg.shared, cfg.mode, &cfg.optimizer)?,
    })
}

#[allow(clippy::too_many_arguments)]
fn discord_record(
    cfg: &RunConfig,
    item: &Item,
    t: Option<f64>,
    pair: Option<(usize, usize)>,
    result: &DiscordResult,
    level_degenerate: bool,
    gs_energy: f64,
    started: Instant,
) -> ResultRecord {
    let mut degenerate = 0;
    if level_degenerate {
        degenerate |= DEGENERATE_LEVEL;
    }
    if result.degenerate_minimum {
        degenerate |= DEGENERATE_MINIMUM;
    }
    ResultRecord {
        sites: item.sites,
        boundary: item.boundary,
        u: item.u,
        t,
        pair,
        kind: cfg.kind.as_str().to_string(),
        mode: Some(record_mode(cfg)),
        value: result.value,
        angles: result.angles.first().copied(),
        degenerate,
        gs_energy: Some(gs_energy),
        seconds: cfg.timing.then(|| started.elapsed().as_secs_f64()),
    }
}

fn compute(cfg: &RunConfig, item: &Item) -> CliResult<Vec<ResultRecord>> {
    let started = Instant::now();
    match cfg.command {
        Command::Sweep => {
            let gs = chain_ground_state(item.sites, item.u, item.boundary, &cfg.lanczos)?;
            let mut rows = Vec::new();
            for pair in pairs_for(cfg, item.sites)? {
                let result = match pair {
                    Some((i, j)) => discord_of(cfg, &reduced_pair_state(&gs.state, i, j)?)?,
                    None => global_discord_in_mode(&gs.state, cfg.shared, cfg.mode, &cfg.optimizer)?,
                };
                rows.push(discord_record(cfg, item, None, pair, &result, gs.degenerate, gs.energy, started));
            }
            Ok(rows)
        }
        Command::Thermal => {
            let h = build_hamiltonian(item.sites, item.u, item.boundary)?;
            let spectrum = ThermalSpectrum::new(&h)?;
            let e = spectrum.energies();
            let level_degenerate = e.len() > 1 && e[1] - e[0] < DEGENERACY_GAP;
            let pairs = pairs_for(cfg, item.sites)?;
            let per_t: Vec<CliResult<Vec<ResultRecord>>> = cfg
                .t_grid
                .par_iter()
                .map(|&t| {
                    let mut rows = Vec::new();
                    for &pair in &pairs {
                        let rho = match pair {
                            Some((i, j)) => spectrum.reduced_state(t, &[i, j])?,
                            None => spectrum.state(t)?,
                        };
                        let result = discord_of(cfg, &rho)?;
                        rows.push(discord_record(cfg, item, Some(t), pair, &result, level_degenerate, e[0], started));
                    }
                    Ok(rows)
                })
                .collect();
            let mut rows = Vec::new();
            for r in per_t {
                rows.extend(r?);
            }
            Ok(rows)
        }
        Command::Spectrum => {
            let h = build_hamiltonian(item.sites, item.u, item.boundary)?;
            let slice = low_spectrum(&h, cfg.levels, &cfg.lanczos)?;
            Ok(slice
                .energies
                .iter()
                .enumerate()
                .map(|(n, &e)| ResultRecord {
                    sites: item.sites,
                    boundary: item.boundary,
                    u: item.u,
                    t: None,
                    pair: None,
                    kind: format!("level{n}"),
                    mode: None,
                    value: e,
                    angles: None,
                    degenerate: if slice.degenerate[n] { DEGENERATE_LEVEL } else { 0 },
                    gs_energy: Some(slice.energies[0]),
                    seconds: cfg.timing.then(|| started.elapsed().as_secs_f64()),
                })
                .collect())
        }
        Command::Scaling => unreachable!("scaling has no grid items"),
    }
}

/// Runs a grid command, writing rows in plan order to `cfg.out` (or stdout).
///
/// Items are processed in batches of `cfg.workers`; each finished batch is
/// written and flushed before the next starts, so an interrupted run can be
/// resumed from its last complete item. On failure the rows of the items
/// before the failing one are kept.
pub fn run_grid(cfg: &RunConfig) -> CliResult<()> {
    let items = plan(cfg);
    let keys: Vec<Vec<RowKey>> = items.iter().map(|it| expected_keys(cfg, it)).collect::<CliResult<_>>()?;
    if cfg.sizes.contains(&2) && cfg.boundary == Boundary::Periodic {
        eprintln!("warning: L=2 periodic is computed with open boundaries (single bond); rows report boundary=open");
    }

    let (mut sink, done_items) = match (&cfg.out, cfg.resume) {
        (Some(path), true) => {
            let mut done = 0;
            let resumed = Sink::resume(path, |rows| {
                let mut matched = 0;
                for (k, item_keys) in keys.iter().enumerate() {
                    if matched + item_keys.len() > rows.len() {
                        break;
                    }
                    for (off, key) in item_keys.iter().enumerate() {
                        let r = &rows[matched + off];
                        let (l, b, u, t, p, kind) = r.key();
                        if (l, b, u, t, p, kind) != (key.0, key.1, key.2, key.3, key.4, key.5.as_str()) {
                            return Err(CliError::Config(format!(
                                "resume: row {} does not match the configured grid",
                                matched + off + 2
                            )));
                        }
                    }
                    matched += item_keys.len();
                    done = k + 1;
                }
                Ok(matched)
            })?;
            (resumed.sink, done)
        }
        (Some(path), false) => (Sink::create(path)?, 0),
        (None, _) => (Sink::stdout()?, 0),
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Config(format!("workers: {e}")))?;
    pool.install(|| {
        for batch in items[done_items..].chunks(cfg.workers) {
            let results: Vec<CliResult<Vec<ResultRecord>>> = batch.par_iter().map(|it| compute(cfg, it)).collect();
            for r in results {
                match r {
                    Ok(rows) => sink.write(&rows)?,
                    Err(e) => {
                        sink.flush()?;
                        return Err(e);
                    }
                }
            }
            sink.flush()?;
        }
        Ok(())
    })
}

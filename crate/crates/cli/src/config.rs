//! Run configuration: command-line flags layered over an optional JSON file.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use qdisc_core::model::{LanczosConfig, MAX_DENSE_SITES, MAX_SPARSE_SITES};
use qdisc_core::{Boundary, Mode, OptimizerConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::grid::{parse_grid, parse_sizes, parse_window, PairSpec};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "QDISC_WORKERS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Ground-state discord over a U grid.
    Sweep,
    /// Gibbs-state discord over U and T grids.
    Thermal,
    /// Lowest energy levels over a U grid.
    Spectrum,
    /// Peak extrapolation, crossing and data collapse of sweep output.
    Scaling,
}

/// Discord measure written to the `kind` column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Asym,
    Sym,
    Global,
}

impl Kind {
    pub fn parse(s: &str) -> CliResult<Self> {
        match s {
            "asym" | "asymmetric" => Ok(Kind::Asym),
            "sym" | "symmetric" => Ok(Kind::Sym),
            "global" => Ok(Kind::Global),
            other => Err(CliError::Config(format!("kind: expected asym, sym or global, got '{other}'"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Asym => "asym",
            Kind::Sym => "sym",
            Kind::Global => "global",
        }
    }
}

/// Command-line flags. Every flag is optional so that a JSON config file can
/// supply it instead; flags win over the file.
#[derive(Clone, Debug, Default, Parser)]
#[command(name = "qdisc", version, about = "Quantum discord of spin-1 anisotropic Heisenberg chains")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Chain lengths, comma separated.
    #[arg(long = "L", value_name = "LIST")]
    pub sizes: Option<String>,
    #[arg(long)]
    pub boundary: Option<Boundary>,
    /// Anisotropy grid: `min:max:step` segments and values, comma separated.
    #[arg(long = "U", value_name = "GRID", allow_hyphen_values = true)]
    pub u: Option<String>,
    /// Temperature grid (thermal), same syntax as `--U`.
    #[arg(long = "T", value_name = "GRID")]
    pub t: Option<String>,
    /// `central`, `i:j` or `offset:k`; comma separated for several pairs.
    #[arg(long)]
    pub pair: Option<String>,
    /// `asym`, `sym` or `global`.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Optimise every site independently in global discord (default: shared angles).
    #[arg(long)]
    pub per_site: bool,
    /// Optimise global discord at every L instead of using fixed angles for L >= 7.
    #[arg(long)]
    pub optimize_all: bool,
    /// Number of energy levels (spectrum).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub grid_points: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: $QDISC_WORKERS, else all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Continue an interrupted run from the rows already in `--out`.
    #[arg(long)]
    pub resume: bool,
    /// Fill the `seconds` column (makes output timing dependent).
    #[arg(long)]
    pub timing: bool,
    /// Scaling: sweep CSV files to analyse.
    #[arg(long, num_args = 1.., value_name = "CSV")]
    pub inputs: Vec<PathBuf>,
    /// Scaling: window for the first-derivative peak, `lo:hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub peak_window: Option<String>,
    /// Scaling: discard sizes below this in the extrapolation.
    #[arg(long)]
    pub drop_below: Option<usize>,
    /// Scaling: window for the quadratic crossing fits and the collapse, `lo:hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub cross_window: Option<String>,
    /// Scaling: ν scan interval, `lo:hi`.
    #[arg(long)]
    pub nu_range: Option<String>,
    /// Scaling: collapse about this coupling instead of the fitted crossing.
    #[arg(long, allow_hyphen_values = true)]
    pub uc: Option<f64>,
    /// Scaling: the input values are already second derivatives.
    #[arg(long)]
    pub second_derivative_input: bool,
}

/// The same fields as [`Args`], read from a JSON file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    command: Option<Command>,
    #[serde(rename = "L")]
    sizes: Option<String>,
    boundary: Option<Boundary>,
    #[serde(rename = "U")]
    u: Option<String>,
    #[serde(rename = "T")]
    t: Option<String>,
    pair: Option<String>,
    kind: Option<String>,
    mode: Option<Mode>,
    per_site: Option<bool>,
    optimize_all: Option<bool>,
    k: Option<usize>,
    grid_points: Option<usize>,
    restarts: Option<usize>,
    seed: Option<u64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
    resume: Option<bool>,
    timing: Option<bool>,
    inputs: Option<Vec<PathBuf>>,
    peak_window: Option<String>,
    drop_below: Option<usize>,
    cross_window: Option<String>,
    nu_range: Option<String>,
    uc: Option<f64>,
    second_derivative_input: Option<bool>,
}

/// Settings of the `scaling` command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingOptions {
    pub inputs: Vec<PathBuf>,
    pub peak_window: (f64, f64),
    pub drop_below: usize,
    pub cross_window: (f64, f64),
    pub nu_range: (f64, f64),
    pub u_c: Option<f64>,
    pub second_derivative_input: bool,
}

/// Fully resolved and validated run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub sizes: Vec<usize>,
    pub boundary: Boundary,
    pub u_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub pairs: Vec<PairSpec>,
    pub kind: Kind,
    pub mode: Mode,
    /// Global discord with one angle set for all sites.
    pub shared: bool,
    pub levels: usize,
    pub optimizer: OptimizerConfig,
    pub lanczos: LanczosConfig,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub resume: bool,
    pub timing: bool,
    pub scaling: ScalingOptions,
}

/// Default U grid: step 0.01 on [-2, 2], refined to 0.002 inside the two
/// critical windows.
pub const DEFAULT_U_GRID: &str = "-2:2:0.01,-0.4:-0.2:0.002,0.9:1.05:0.002";

impl RunConfig {
    /// Merges `args` over the JSON file named by `args.config` (if any) and validates.
    pub fn from_args(args: Args) -> CliResult<Self> {
        let file = match &args.config {
            Some(path) => read_file_config(path)?,
            None => FileConfig::default(),
        };
        let command = args
            .command
            .or(file.command)
            .ok_or_else(|| CliError::Config("command: one of sweep, thermal, spectrum, scaling is required".into()))?;
        let sizes = match args.sizes.or(file.sizes) {
            Some(s) => parse_sizes(&s)?,
            None if command == Command::Scaling => Vec::new(),
            None => return Err(CliError::Config("L: chain lengths are required".into())),
        };
        let u_grid = parse_grid(args.u.or(file.u).as_deref().unwrap_or(DEFAULT_U_GRID), "U")?;
        let t_grid = match args.t.or(file.t) {
            Some(s) => parse_grid(&s, "T")?,
            None if command == Command::Thermal => {
                return Err(CliError::Config("T: a temperature grid is required for thermal".into()))
            }
            None => Vec::new(),
        };
        let pairs = PairSpec::parse_list(args.pair.or(file.pair).as_deref().unwrap_or("central"))?;
        let kind = Kind::parse(args.kind.or(file.kind).as_deref().unwrap_or("sym"))?;
        let mode = args.mode.or(file.mode).unwrap_or(if kind == Kind::Global { Mode::Real } else { Mode::Full });
        let shared = !(args.per_site || file.per_site.unwrap_or(false));
        let optimize_all = args.optimize_all || file.optimize_all.unwrap_or(false);
        let levels = args.k.or(file.k).unwrap_or(3);
        let seed = args.seed.or(file.seed).unwrap_or(0);

        let mut optimizer = OptimizerConfig { seed, ..OptimizerConfig::default() };
        if let Some(g) = args.grid_points.or(file.grid_points) {
            optimizer.grid_points = g;
        }
        if let Some(r) = args.restarts.or(file.restarts) {
            optimizer.restarts = r;
        }
        if optimize_all {
            optimizer.fixed_angles_from = None;
        }
        let lanczos = LanczosConfig { seed: LanczosConfig::default().seed ^ seed, ..LanczosConfig::default() };

        let workers = match args.workers.or(file.workers) {
            Some(w) => w,
            None => default_workers()?,
        };
        let window = |flag: Option<String>, file: Option<String>, default: &str, name: &str| {
            parse_window(flag.or(file).as_deref().unwrap_or(default), name)
        };
        let scaling = ScalingOptions {
            inputs: if args.inputs.is_empty() { file.inputs.unwrap_or_default() } else { args.inputs },
            peak_window: window(args.peak_window, file.peak_window, "-0.6:0.0", "peak-window")?,
            drop_below: args.drop_below.or(file.drop_below).unwrap_or(0),
            cross_window: window(args.cross_window, file.cross_window, "0.93:1.0", "cross-window")?,
            nu_range: window(args.nu_range, file.nu_range, "1.0:2.5", "nu-range")?,
            u_c: args.uc.or(file.uc),
            second_derivative_input: args.second_derivative_input || file.second_derivative_input.unwrap_or(false),
        };

        let cfg = RunConfig {
            command,
            sizes,
            boundary: args.boundary.or(file.boundary).unwrap_or(Boundary::Open),
            u_grid,
            t_grid,
            pairs,
            kind,
            mode,
            shared,
            levels,
            optimizer,
            lanczos,
            workers,
            out: args.out.or(file.out),
            resume: args.resume || file.resume.unwrap_or(false),
            timing: args.timing || file.timing.unwrap_or(false),
            scaling,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks grids, sizes against the per-command caps, and optimiser settings.
    pub fn validate(&self) -> CliResult<()> {
        self.optimizer.validate().map_err(|e| CliError::Config(format!("optimizer: {e}")))?;
        if self.workers == 0 {
            return Err(CliError::Config("workers: must be >= 1".into()));
        }
        if self.resume && self.out.is_none() {
            return Err(CliError::Config("resume: requires --out".into()));
        }
        if self.command == Command::Scaling {
            if self.scaling.inputs.is_empty() {
                return Err(CliError::Config("inputs: scaling needs at least one CSV file".into()));
            }
            if self.scaling.nu_range.0 <= 0.0 {
                return Err(CliError::Config("nu-range: lower bound must be > 0".into()));
            }
            return Ok(());
        }
        if self.t_grid.iter().any(|t| *t <= 0.0) {
            return Err(CliError::Config("T: temperatures must be > 0".into()));
        }
        if self.command == Command::Spectrum && self.levels == 0 {
            return Err(CliError::Config("k: at least one level".into()));
        }
        for &l in &self.sizes {
            if l < 2 {
                return Err(CliError::Config(format!("L: chains need at least 2 sites, got {l}")));
            }
            let (cap, what) = match (self.command, self.kind) {
                (Command::Thermal, _) => (MAX_DENSE_SITES, "thermal"),
                (Command::Sweep, Kind::Global) => (MAX_DENSE_SITES, "global discord"),
                _ => (MAX_SPARSE_SITES, "sparse ground state"),
            };
            if l > cap {
                return Err(CliError::Cap(format!("{what} supports L <= {cap}, got L = {l}")));
            }
            if self.command != Command::Spectrum && self.kind != Kind::Global {
                for p in &self.pairs {
                    p.resolve(l)?;
                }
            }
        }
        Ok(())
    }
}

fn read_file_config(path: &Path) -> CliResult<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input { path: path.to_path_buf(), message: format!("cannot read config: {e}") })?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn default_workers() -> CliResult<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{WORKERS_ENV}: '{v}' is not a worker count"))),
        Err(_) => Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)),
    }
}

//! Quantum discord measures of spin-1 states.
//!
//! - [`mutual_information`], [`one_way_classical`]: the two correlation
//!   quantities whose difference, minimised over measurements on B, is the
//!   asymmetric discord [`asymmetric_discord`].
//! - [`symmetric_discord`]: relative-entropy discord of a pair under bi-local
//!   measurements.
//! - [`global_discord`]: its multipartite extension over product measurements
//!   on every site of a chain.
//!
//! The relative-entropy measures are evaluated through the dephasing identity
//! `S(ρ||Π(ρ)) = S(Π(ρ)) - S(ρ)`, which needs only the diagonal of the
//! rotated state.

mod objective;
mod optimize;
mod simplex;

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{real_basis_from_angles, MeasurementAngles, ProjectiveBasis};
use crate::model::{ChainState, MAX_DENSE_SITES};
use crate::qalgebra::DensityMatrix;
use objective::{require_pair, Objective, OneWayObjective, RelativeEntropyObjective};
use optimize::{minimize, Layout, TIE_TOL};

/// Parameter family searched by the optimiser.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// All seven angles per site.
    Full,
    /// `(θ, α, β)` per site; the basis vectors are real.
    Real,
}

impl Mode {
    pub fn params_per_site(self) -> usize {
        match self {
            Mode::Full => 7,
            Mode::Real => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::Real => "real",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Mode::Full),
            "real" => Ok(Mode::Real),
            other => Err(Error::InvalidArgument(format!("unknown mode '{other}'"))),
        }
    }
}

/// Minimised discord value with the optimising measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscordResult {
    /// In bits.
    pub value: f64,
    /// One entry per measured site.
    pub angles: Vec<MeasurementAngles>,
    pub optimizer_evals: usize,
    pub converged: bool,
    /// Distinct measurements reach the minimum within 1e-8.
    pub degenerate_minimum: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    /// Grid points per angle in the coarse stage.
    pub grid_points: usize,
    /// Coarse nodes refined by Nelder–Mead.
    pub restarts: usize,
    /// Simplex objective spread at which refinement stops.
    pub refine_tolerance: f64,
    /// Objective evaluations allowed per refinement pass.
    pub max_refine_iters: usize,
    pub seed: u64,
    /// Largest exhaustive per-site grid; beyond it the shared-angle grid is used.
    pub grid_budget: usize,
    /// Extra random grid nodes in full mode or when the per-site grid is too large.
    pub random_samples: usize,
    /// Global discord of chains at least this long is evaluated at the fixed
    /// angles `θ = 0` and `θ = π/2` (α = β = 0) instead of optimised. `None`
    /// always optimises.
    pub fixed_angles_from: Option<usize>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_points: 9,
            restarts: 4,
            refine_tolerance: 1e-8,
            max_refine_iters: 4000,
            seed: 0,
            grid_budget: 600_000,
            random_samples: 512,
            fixed_angles_from: Some(7),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 2 {
            return Err(Error::InvalidArgument("grid_points must be >= 2".into()));
        }
        if !(self.refine_tolerance > 0.0) {
            return Err(Error::InvalidArgument("refine_tolerance must be > 0".into()));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be >= 1".into()));
        }
        Ok(())
    }
}

/// `I(ρ_AB) = S(ρ_A) + S(ρ_B) - S(ρ_AB)`.
pub fn mutual_information(rho_ab: &DensityMatrix) -> Result<f64> {
    Ok(OneWayObjective::new(rho_ab)?.mutual_information())
}

/// `J = S(ρ_A) - Σ_j p_j S(ρ_{A|j})` for a measurement of site B in `basis_b`.
/// Outcomes with `p_j < 1e-12` are dropped.
pub fn one_way_classical(rho_ab: &DensityMatrix, basis_b: &ProjectiveBasis) -> Result<f64> {
    if basis_b.gram_defect() > 1e-10 {
        return Err(Error::InvalidArgument("measurement basis is not orthonormal".into()));
    }
    Ok(OneWayObjective::new(rho_ab)?.classical_information(basis_b))
}

/// `D^{B→A} = min_{Π_B} [I - J]` over all seven measurement angles on B.
pub fn asymmetric_discord(rho_ab: &DensityMatrix, cfg: &OptimizerConfig) -> Result<DiscordResult> {
    let obj = OneWayObjective::new(rho_ab)?;
    minimize(&obj, Layout { mode: Mode::Full, sites: 1, shared: false }, cfg)
}

/// Symmetric discord of a pair, minimised over bi-local measurements.
pub fn symmetric_discord(rho_ab: &DensityMatrix, mode: Mode, cfg: &OptimizerConfig) -> Result<DiscordResult> {
    require_pair(rho_ab)?;
    let obj = RelativeEntropyObjective::new(ChainState::Mixed(rho_ab))?;
    minimize(&obj, Layout { mode, sites: 2, shared: false }, cfg)
}

/// Symmetric-discord objective at fixed bases `[basis_a, basis_b]`.
pub fn symmetric_discord_at(rho_ab: &DensityMatrix, bases: &[ProjectiveBasis; 2]) -> Result<f64> {
    require_pair(rho_ab)?;
    Ok(RelativeEntropyObjective::new(ChainState::Mixed(rho_ab))?.eval(bases))
}

/// `S(ρ||Π(ρ)) - Σ_s S(ρ_s||Π_s(ρ_s))` evaluated directly from relative
/// entropies (no dephasing identity); a cross-check of the fast path.
pub fn relative_entropy_objective_direct(rho: &DensityMatrix, bases: &[ProjectiveBasis]) -> Result<f64> {
    use crate::measure::dephase;
    use crate::qalgebra::{partial_trace, relative_entropy};
    let mut value = relative_entropy(rho, &dephase(rho, bases)?)?;
    for (s, b) in bases.iter().enumerate() {
        let local = partial_trace(rho, &[s])?;
        value -= relative_entropy(&local, &dephase(&local, std::slice::from_ref(b))?)?;
    }
    Ok(value)
}

/// Global discord of a chain state with real-family measurements.
///
/// `shared = true` uses one angle set for every site. Chains at least
/// `cfg.fixed_angles_from` long are evaluated at the fixed shared angles
/// `θ ∈ {0, π/2}`, `α = β = 0` (the smaller value is reported).
pub fn global_discord<'a>(
    state: impl Into<ChainState<'a>>,
    shared: bool,
    cfg: &OptimizerConfig,
) -> Result<DiscordResult> {
    global_discord_in_mode(state, shared, Mode::Real, cfg)
}

/// [`global_discord`] with an explicit parameter family.
pub fn global_discord_in_mode<'a>(
    state: impl Into<ChainState<'a>>,
    shared: bool,
    mode: Mode,
    cfg: &OptimizerConfig,
) -> Result<DiscordResult> {
    let state = state.into();
    let sites = state.sites();
    if matches!(state, ChainState::Mixed(_)) && sites > MAX_DENSE_SITES {
        return Err(Error::TooLarge { what: "global_discord", max: MAX_DENSE_SITES, got: sites });
    }
    let obj = RelativeEntropyObjective::new(state)?;
    if cfg.fixed_angles_from.is_some_and(|l| sites >= l) {
        return Ok(fixed_angle_global(&obj, sites));
    }
    minimize(&obj, Layout { mode, sites, shared }, cfg)
}

fn fixed_angle_global(obj: &RelativeEntropyObjective, sites: usize) -> DiscordResult {
    let candidates = [MeasurementAngles::real(0.0, 0.0, 0.0), MeasurementAngles::real(FRAC_PI_2, 0.0, 0.0)];
    let values: Vec<f64> = candidates
        .iter()
        .map(|a| {
            let b = real_basis_from_angles(a.theta, a.alpha, a.beta).expect("finite angles");
            obj.eval(&vec![b; sites])
        })
        .collect();
    let pick = if values[1] < values[0] - TIE_TOL { 1 } else { 0 };
    DiscordResult {
        value: values[0].min(values[1]),
        angles: vec![candidates[pick]; sites],
        optimizer_evals: 2,
        converged: true,
        degenerate_minimum: (values[0] - values[1]).abs() <= TIE_TOL,
    }
}

/// Global-discord objective at fixed per-site angles (real or full).
pub fn global_discord_at<'a>(state: impl Into<ChainState<'a>>, angles: &[MeasurementAngles]) -> Result<f64> {
    let state = state.into();
    if angles.len() != state.sites() {
        return Err(Error::Dimension(format!("{} angle sets for {} sites", angles.len(), state.sites())));
    }
    let bases: Vec<ProjectiveBasis> =
        angles.iter().map(crate::measure::basis_from_angles).collect::<Result<_>>()?;
    Ok(RelativeEntropyObjective::new(state)?.eval(&bases))
}

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::objective::Objective;
use super::simplex::nelder_mead;
use super::{DiscordResult, Mode, OptimizerConfig};
use crate::error::Result;
use crate::measure::{basis_from_angles, real_basis_from_angles, MeasurementAngles, ProjectiveBasis};

/// Two candidate minima closer than this are tied.
pub(crate) const TIE_TOL: f64 = 1e-8;
/// Projector tolerance when deciding whether tied minima are distinct measurements.
/// Values tied to 1e-8 leave the angles uncertain at the 1e-4 level.
const SAME_MEASUREMENT_TOL: f64 = 1e-3;
/// Tied candidates beyond this many (sparsest first) are not classified.
const MAX_TIED_CLASSIFIED: usize = 256;
/// Canonical angles below this count as zero in the sparsity order.
const ZERO_ANGLE: f64 = 1e-9;

/// How angle blocks map onto sites.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Layout {
    pub mode: Mode,
    pub sites: usize,
    /// One angle block shared by every site.
    pub shared: bool,
}

impl Layout {
    fn blocks(&self) -> usize {
        if self.shared {
            1
        } else {
            self.sites
        }
    }

    fn params(&self) -> usize {
        self.mode.params_per_site()
    }

    fn angles(&self, x: &[f64]) -> Vec<MeasurementAngles> {
        let k = self.params();
        x.chunks(k)
            .map(|p| match self.mode {
                Mode::Real => MeasurementAngles::real(p[0], p[1], p[2]),
                Mode::Full => MeasurementAngles::from_ordered(p),
            })
            .collect()
    }

    fn expand(&self, block_bases: Vec<ProjectiveBasis>) -> Vec<ProjectiveBasis> {
        if self.shared {
            vec![block_bases[0]; self.sites]
        } else {
            block_bases
        }
    }

    fn bases(&self, x: &[f64]) -> Vec<ProjectiveBasis> {
        let block: Vec<ProjectiveBasis> = self
            .angles(x)
            .iter()
            .map(|a| match self.mode {
                Mode::Real => real_basis_from_angles(a.theta, a.alpha, a.beta),
                Mode::Full => basis_from_angles(a),
            })
            .collect::<Result<_>>()
            .unwrap_or_else(|_| vec![ProjectiveBasis::canonical(); self.blocks()]);
        self.expand(block)
    }
}

/// Grid values: θ spans `[0, π]` inclusive, every other angle `[0, 2π)`.
struct Grid {
    theta: Vec<f64>,
    angle: Vec<f64>,
}

impl Grid {
    fn new(points: usize) -> Self {
        let theta = (0..points).map(|i| PI * i as f64 / (points - 1) as f64).collect();
        let angle = (0..points).map(|i| TAU * i as f64 / points as f64).collect();
        Self { theta, angle }
    }

    fn value(&self, coord: usize, i: usize) -> f64 {
        if coord == 0 {
            self.theta[i]
        } else {
            self.angle[i]
        }
    }

    fn steps(&self, layout: &Layout) -> Vec<f64> {
        let g = self.theta.len() as f64;
        let per: Vec<f64> = (0..layout.params())
            .map(|c| if c == 0 { 0.5 * PI / (g - 1.0) } else { 0.5 * TAU / g })
            .collect();
        per.iter().cycle().take(per.len() * layout.blocks()).cloned().collect()
    }
}

/// A coarse-stage point: a parameter vector and its objective value.
struct Node {
    x: Vec<f64>,
    value: f64,
}

/// Multi-start minimisation: coarse grid, then Nelder–Mead refinement of the
/// best `restarts` grid nodes.
///
/// Coarse stage: if the per-site real grid (θ, α, β per site) has at most
/// `grid_budget` nodes it is enumerated completely; otherwise the real grid
/// shared by all sites is enumerated. In full mode, or when the shared
/// fallback was used, `random_samples` further grid nodes are drawn from the
/// complete parameter space with the configured seed.
pub(crate) fn minimize(obj: &dyn Objective, layout: Layout, cfg: &OptimizerConfig) -> Result<DiscordResult> {
    cfg.validate()?;
    let g = cfg.grid_points;
    let grid = Grid::new(g);
    let k = layout.params();
    let blocks = layout.blocks();

    // cached real-family bases for every (θ, α, β) grid triple
    let triples = g * g * g;
    let triple_angles = |t: usize| [grid.theta[t / (g * g)], grid.angle[(t / g) % g], grid.angle[t % g]];
    let triple_bases: Vec<ProjectiveBasis> = (0..triples)
        .map(|t| {
            let a = triple_angles(t);
            real_basis_from_angles(a[0], a[1], a[2])
        })
        .collect::<Result<_>>()?;

    let per_site_nodes = (triples as f64).powi(blocks as i32);
    let exhaustive = per_site_nodes <= cfg.grid_budget as f64;
    let tensor_count = if exhaustive { triples.pow(blocks as u32) } else { triples };
    let triple_of = |n: usize, b: usize| -> usize {
        if exhaustive {
            (n / triples.pow((blocks - 1 - b) as u32)) % triples
        } else {
            n
        }
    };
    let tensor_x = |n: usize| -> Vec<f64> {
        let mut x = vec![0.0; k * blocks];
        for b in 0..blocks {
            let a = triple_angles(triple_of(n, b));
            x[b * k..b * k + 3].copy_from_slice(&a);
        }
        x
    };
    let tensor_values: Vec<f64> = (0..tensor_count)
        .into_par_iter()
        .map(|n| {
            let block: Vec<ProjectiveBasis> = (0..blocks).map(|b| triple_bases[triple_of(n, b)]).collect();
            obj.eval(&layout.expand(block))
        })
        .collect();

    let mut random_nodes: Vec<Node> = Vec::new();
    if layout.mode == Mode::Full || !exhaustive {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let xs: Vec<Vec<f64>> = (0..cfg.random_samples)
            .map(|_| (0..k * blocks).map(|i| grid.value(i % k, rng.random_range(0..g))).collect())
            .collect();
        random_nodes = xs
            .into_par_iter()
            .map(|x| {
                let value = obj.eval(&layout.bases(&x));
                Node { x, value }
            })
            .collect();
    }
    let mut evals = tensor_count + random_nodes.len();

    // starting points: best values first, ties broken by parameter order
    let mut ranked: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut order: Vec<usize> = (0..tensor_count).collect();
    order.sort_by(|&a, &b| tensor_values[a].total_cmp(&tensor_values[b]).then(a.cmp(&b)));
    ranked.extend(order.iter().take(cfg.restarts).map(|&n| (tensor_values[n], tensor_x(n))));
    ranked.extend(random_nodes.iter().map(|n| (n.value, n.x.clone())));
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| lex(&a.1, &b.1)));
    ranked.dedup_by(|a, b| a.1 == b.1);
    ranked.truncate(cfg.restarts);

    let steps = grid.steps(&layout);
    let refined: Vec<_> = ranked
        .par_iter()
        .map(|(_, x0)| {
            let f = |x: &[f64]| obj.eval(&layout.bases(x));
            let first = nelder_mead(f, x0, &steps, cfg.refine_tolerance, cfg.max_refine_iters);
            // a second pass from the converged vertex guards against premature collapse
            let small: Vec<f64> = steps.iter().map(|s| s * 0.1).collect();
            let second = nelder_mead(f, &first.point, &small, cfg.refine_tolerance, cfg.max_refine_iters);
            let evals = first.evals + second.evals;
            if second.value <= first.value {
                (second, evals)
            } else {
                (first, evals)
            }
        })
        .collect();
    evals += refined.iter().map(|(_, e)| e).sum::<usize>();

    let best_refined = refined
        .iter()
        .min_by(|a, b| a.0.value.total_cmp(&b.0.value))
        .map(|(r, _)| r.clone());
    let coarse_best = tensor_values
        .iter()
        .cloned()
        .chain(random_nodes.iter().map(|n| n.value))
        .fold(f64::INFINITY, f64::min);
    let best = best_refined.as_ref().map_or(coarse_best, |r| r.value.min(coarse_best));
    let converged = best_refined.as_ref().is_some_and(|r| r.converged);

    // Tied candidates are grouped into distinct measurements. Each group is
    // represented by its sparsest angle set (fewest non-zero angles, then
    // lexicographic), and the lexicographically smallest representative wins.
    let mut tied: Vec<Vec<MeasurementAngles>> = Vec::new();
    for (n, &v) in tensor_values.iter().enumerate() {
        if v <= best + TIE_TOL {
            tied.push(canonical(&layout, &tensor_x(n)));
        }
    }
    for node in &random_nodes {
        if node.value <= best + TIE_TOL {
            tied.push(canonical(&layout, &node.x));
        }
    }
    for (r, _) in &refined {
        if r.value <= best + TIE_TOL {
            tied.push(canonical(&layout, &r.point));
        }
    }
    tied.sort_by(|a, b| sparsity(a).cmp(&sparsity(b)).then_with(|| lex_angles(a, b)));
    tied.truncate(MAX_TIED_CLASSIFIED);
    let mut classes: Vec<(Vec<MeasurementAngles>, Vec<ProjectiveBasis>)> = Vec::new();
    for t in tied {
        let bases = bases_of(&layout, &t);
        let known = classes.iter().any(|(_, cb)| {
            cb.iter().zip(&bases).all(|(a, b)| a.same_measurement(b, SAME_MEASUREMENT_TOL))
        });
        if !known {
            classes.push((t, bases));
        }
    }
    let degenerate = classes.len() > 1;
    let chosen = classes
        .into_iter()
        .map(|(t, _)| t)
        .min_by(|a, b| lex_angles(a, b))
        .unwrap_or_else(|| canonical(&layout, &ranked[0].1));

    let angles = if layout.shared { vec![chosen[0]; layout.sites] } else { chosen };
    Ok(DiscordResult { value: best, angles, optimizer_evals: evals, converged, degenerate_minimum: degenerate })
}

fn canonical(layout: &Layout, x: &[f64]) -> Vec<MeasurementAngles> {
    layout.angles(x).iter().map(MeasurementAngles::canonical).collect()
}

fn bases_of(layout: &Layout, angles: &[MeasurementAngles]) -> Vec<ProjectiveBasis> {
    let block = angles
        .iter()
        .map(|a| basis_from_angles(a).unwrap_or_else(|_| ProjectiveBasis::canonical()))
        .collect();
    layout.expand(block)
}

fn sparsity(angles: &[MeasurementAngles]) -> usize {
    angles.iter().flat_map(|a| a.to_ordered()).filter(|x| x.abs() > ZERO_ANGLE).count()
}

fn lex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

fn lex_angles(a: &[MeasurementAngles], b: &[MeasurementAngles]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.lex_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

//! Replicated runs, accuracy aggregation, and the three preset sweeps.
//!
//! Run `r` of a world `(sigma_r2, sigma_c2, m)` draws from
//! `derive_substream(master_seed, cell_tag ^ r)`. The tag ignores the
//! indicator, so every indicator of a world is scored on the same simulated
//! outcomes (common random numbers), and it ignores every other world, so
//! adding cells to a sweep leaves existing cells unchanged.

use rayon::prelude::*;

use crate::distributions::{derive_substream, RngState};
use crate::error::{Error, Result};
use crate::metrics::{AccuracySpec, HighValueSet, Indicator};
use crate::simulation::{run_simulation_with, ModelParams};

pub const DEFAULT_N: usize = 2000;
pub const DEFAULT_M: usize = 20;
pub const DEFAULT_RUNS: usize = 1000;
pub const DEFAULT_ALPHA: f64 = 0.1;
pub const DEFAULT_TOTAL_LOG_VARIANCE: f64 = 1.3;
pub const DEFAULT_MASTER_SEED: u64 = 20_160_301;
pub const DEFAULT_SIGMA_C2_STEP: f64 = 0.05;

/// Which preset grid a sweep starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Figure1,
    Figure2,
    Figure3,
    Custom,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Figure1 => "fig1",
            Preset::Figure2 => "fig2",
            Preset::Figure3 => "fig3",
            Preset::Custom => "custom",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "fig1" => Preset::Figure1,
            "fig2" => Preset::Figure2,
            "fig3" => Preset::Figure3,
            "custom" => Preset::Custom,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub sigma_r2_list: Vec<f64>,
    pub sigma_c2_grid: Vec<f64>,
    pub m_list: Vec<usize>,
    pub weight_if_list: Vec<f64>,
    pub runs: usize,
    pub n: usize,
    pub alpha: f64,
    pub total_log_variance: f64,
    pub master_seed: u64,
}

/// `0, step, 2*step, ...` up to and including `max` (within rounding).
pub fn sigma_c2_grid(max: f64, step: f64) -> Vec<f64> {
    let count = (max / step + 1e-9).floor() as usize;
    // Scaled integers keep grid points like 0.15 correctly rounded.
    let scale = (1.0 / step).round();
    (0..=count)
        .map(|i| {
            if (scale * step - 1.0).abs() < 1e-12 {
                i as f64 / scale
            } else {
                i as f64 * step
            }
        })
        .collect()
}

impl SweepSpec {
    pub fn preset(preset: Preset) -> Self {
        let base = SweepSpec {
            sigma_r2_list: vec![0.0, 0.4, 0.8, 1.6],
            sigma_c2_grid: sigma_c2_grid(DEFAULT_TOTAL_LOG_VARIANCE, DEFAULT_SIGMA_C2_STEP),
            m_list: vec![DEFAULT_M],
            weight_if_list: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            runs: DEFAULT_RUNS,
            n: DEFAULT_N,
            alpha: DEFAULT_ALPHA,
            total_log_variance: DEFAULT_TOTAL_LOG_VARIANCE,
            master_seed: DEFAULT_MASTER_SEED,
        };
        match preset {
            Preset::Figure1 | Preset::Custom => base,
            Preset::Figure2 => SweepSpec {
                sigma_r2_list: vec![0.4],
                m_list: vec![10, 40],
                ..base
            },
            Preset::Figure3 => SweepSpec {
                sigma_r2_list: vec![0.4],
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::param("runs", "need at least one run"));
        }
        if self.n == 0 {
            return Err(Error::param("n", "need at least one article"));
        }
        AccuracySpec::new(self.alpha)?.selected_count(self.n)?;
        if !self.total_log_variance.is_finite() || self.total_log_variance < 0.0 {
            return Err(Error::param(
                "total_log_variance",
                format!("must be finite and >= 0, got {}", self.total_log_variance),
            ));
        }
        for (name, empty) in [
            ("sigma_r2_list", self.sigma_r2_list.is_empty()),
            ("sigma_c2_grid", self.sigma_c2_grid.is_empty()),
            ("m_list", self.m_list.is_empty()),
        ] {
            if empty {
                return Err(Error::param(name, "must not be empty"));
            }
        }
        for &r2 in &self.sigma_r2_list {
            if !r2.is_finite() || r2 < 0.0 {
                return Err(Error::param(
                    "sigma_r2_list",
                    format!("must be >= 0, got {r2}"),
                ));
            }
        }
        for &c2 in &self.sigma_c2_grid {
            if !(0.0..=self.total_log_variance).contains(&c2) {
                return Err(Error::param(
                    "sigma_c2_grid",
                    format!(
                        "{c2} outside [0, {}] (sigma_v2 would be negative)",
                        self.total_log_variance
                    ),
                ));
            }
        }
        for &m in &self.m_list {
            if m == 0 || !self.n.is_multiple_of(m) {
                return Err(Error::param(
                    "m_list",
                    format!("journal count {m} must divide article count {}", self.n),
                ));
            }
        }
        for &w in &self.weight_if_list {
            Indicator::hybrid(w)?;
        }
        Ok(())
    }

    pub fn accuracy_spec(&self) -> Result<AccuracySpec> {
        AccuracySpec::new(self.alpha)
    }

    /// Worlds in sweep order: sigma_r2, then m, then sigma_c2.
    pub fn worlds(&self) -> Vec<World> {
        let mut out = Vec::new();
        for &sigma_r2 in &self.sigma_r2_list {
            for &m in &self.m_list {
                for &sigma_c2 in &self.sigma_c2_grid {
                    out.push(World {
                        sigma_r2,
                        sigma_c2,
                        m,
                    });
                }
            }
        }
        out
    }

    pub fn params_for(&self, world: &World) -> ModelParams {
        ModelParams {
            n: self.n,
            m: world.m,
            // Clamped so a grid point equal to the total cannot go -0.0 or
            // negative through rounding.
            sigma_v2: (self.total_log_variance - world.sigma_c2).max(0.0),
            sigma_c2: world.sigma_c2,
            sigma_r2: world.sigma_r2,
            seed: self.master_seed,
        }
    }

    pub fn hybrid_indicators(&self) -> Vec<Indicator> {
        self.weight_if_list
            .iter()
            .map(|&weight_if| Indicator::Hybrid { weight_if })
            .collect()
    }
}

/// The simulation-relevant coordinates of a sweep cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct World {
    pub sigma_r2: f64,
    pub sigma_c2: f64,
    pub m: usize,
}

impl World {
    pub fn of(params: &ModelParams) -> Self {
        World {
            sigma_r2: params.sigma_r2,
            sigma_c2: params.sigma_c2,
            m: params.m,
        }
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn canonical_bits(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}

/// Stable hash of `(sigma_r2, sigma_c2, m)`.
pub fn cell_tag(world: &World) -> u64 {
    let h = mix64(canonical_bits(world.sigma_r2));
    let h = mix64(h ^ canonical_bits(world.sigma_c2));
    mix64(h ^ world.m as u64)
}

/// Generator for run `run_index` of `world`.
pub fn run_stream(master_seed: u64, world: &World, run_index: usize) -> RngState {
    derive_substream(master_seed, cell_tag(world) ^ run_index as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub sigma_r2: f64,
    pub sigma_c2: f64,
    pub sigma_v2: f64,
    pub m: usize,
    pub n: usize,
    pub alpha: f64,
    pub indicator: Indicator,
    pub runs: usize,
    pub accuracy_mean: f64,
    pub accuracy_stderr: f64,
    pub master_seed: u64,
}

impl SweepCell {
    pub fn weight_if(&self) -> f64 {
        self.indicator.weight_if()
    }
}

/// Mean and standard error (sample standard deviation over `sqrt(len)`),
/// accumulated in slice order. A single sample has zero standard error.
pub fn mean_and_stderr(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, (ss / (n - 1.0) / n).sqrt())
}

/// Per-run accuracies of several indicators over one world's replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct WorldRuns {
    pub world: World,
    pub params: ModelParams,
    pub alpha: f64,
    pub master_seed: u64,
    pub indicators: Vec<Indicator>,
    /// `accuracies[i][r]`: indicator `i` on run `r`.
    pub accuracies: Vec<Vec<f64>>,
}

impl WorldRuns {
    pub fn runs(&self) -> usize {
        self.accuracies.first().map_or(0, Vec::len)
    }

    pub fn position(&self, indicator: &Indicator) -> Option<usize> {
        self.indicators.iter().position(|i| i == indicator)
    }

    pub fn accuracies_of(&self, indicator: &Indicator) -> &[f64] {
        let i = self
            .position(indicator)
            .unwrap_or_else(|| panic!("indicator {indicator} not evaluated"));
        &self.accuracies[i]
    }

    pub fn mean(&self, indicator: &Indicator) -> f64 {
        mean_and_stderr(self.accuracies_of(indicator)).0
    }

    pub fn stderr(&self, indicator: &Indicator) -> f64 {
        mean_and_stderr(self.accuracies_of(indicator)).1
    }

    /// Mean of `a - b` over runs, with the standard error of that mean.
    pub fn paired_difference(&self, a: &Indicator, b: &Indicator) -> (f64, f64) {
        let diffs: Vec<f64> = self
            .accuracies_of(a)
            .iter()
            .zip(self.accuracies_of(b))
            .map(|(x, y)| x - y)
            .collect();
        mean_and_stderr(&diffs)
    }

    pub fn cells(&self) -> Vec<SweepCell> {
        self.indicators
            .iter()
            .zip(&self.accuracies)
            .map(|(&indicator, acc)| {
                let (accuracy_mean, accuracy_stderr) = mean_and_stderr(acc);
                SweepCell {
                    sigma_r2: self.world.sigma_r2,
                    sigma_c2: self.world.sigma_c2,
                    sigma_v2: self.params.sigma_v2,
                    m: self.params.m,
                    n: self.params.n,
                    alpha: self.alpha,
                    indicator,
                    runs: acc.len(),
                    accuracy_mean,
                    accuracy_stderr,
                    master_seed: self.master_seed,
                }
            })
            .collect()
    }
}

/// Simulates one world from `rng` and scores every indicator on it.
pub fn evaluate_run(
    params: &ModelParams,
    indicators: &[Indicator],
    spec: &AccuracySpec,
    rng: &mut RngState,
) -> Result<Vec<f64>> {
    let outcome = run_simulation_with(params, rng)?;
    let values: Vec<f64> = outcome.articles.iter().map(|a| a.value).collect();
    let high = HighValueSet::new(&values, spec)?;
    indicators
        .iter()
        .map(|ind| high.accuracy_of(&ind.scores(&outcome)?))
        .collect()
}

/// Runs work units either inline (`workers == 1`) or on a dedicated pool.
/// Results always come back in input order.
#[derive(Debug)]
pub struct Executor {
    pool: Option<rayon::ThreadPool>,
}

impl Executor {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::param("workers", "need at least one worker"));
        }
        if workers == 1 {
            return Ok(Executor { pool: None });
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?;
        Ok(Executor { pool: Some(pool) })
    }

    pub fn serial() -> Self {
        Executor { pool: None }
    }

    fn map<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match &self.pool {
            None => items.iter().map(f).collect(),
            Some(pool) => pool.install(|| items.par_iter().map(f).collect()),
        }
    }
}

/// Replicates every world `runs` times and scores all `indicators` on each run.
pub fn run_worlds(
    worlds: &[(World, ModelParams)],
    indicators: &[Indicator],
    runs: usize,
    alpha: f64,
    master_seed: u64,
    executor: &Executor,
) -> Result<Vec<WorldRuns>> {
    if runs == 0 {
        return Err(Error::param("runs", "need at least one run"));
    }
    let spec = AccuracySpec::new(alpha)?;
    for (_, params) in worlds {
        params.validate()?;
        spec.selected_count(params.n)?;
    }

    let units: Vec<(usize, usize)> = (0..worlds.len())
        .flat_map(|w| (0..runs).map(move |r| (w, r)))
        .collect();
    let results = executor.map(&units, |&(w, r)| {
        let (world, params) = &worlds[w];
        evaluate_run(
            params,
            indicators,
            &spec,
            &mut run_stream(master_seed, world, r),
        )
    });

    let mut results = results.into_iter();
    let mut out = Vec::with_capacity(worlds.len());
    for (world, params) in worlds {
        let mut accuracies = vec![Vec::with_capacity(runs); indicators.len()];
        for run in results.by_ref().take(runs) {
            for (slot, acc) in accuracies.iter_mut().zip(run?) {
                slot.push(acc);
            }
        }
        out.push(WorldRuns {
            world: *world,
            params: *params,
            alpha,
            master_seed,
            indicators: indicators.to_vec(),
            accuracies,
        });
    }
    Ok(out)
}

/// Mean and standard error of one indicator over `runs` replicates of
/// `params` (its `seed` field is ignored in favour of `master_seed`).
pub fn run_replicated(
    params: &ModelParams,
    runs: usize,
    indicator: Indicator,
    alpha: f64,
    master_seed: u64,
) -> Result<SweepCell> {
    let worlds = [(World::of(params), *params)];
    let mut world_runs = run_worlds(
        &worlds,
        &[indicator],
        runs,
        alpha,
        master_seed,
        &Executor::serial(),
    )?;
    Ok(world_runs.remove(0).cells().remove(0))
}

/// Replicated runs for every world of `spec`, scoring `indicators`.
pub fn sweep_world_runs(
    spec: &SweepSpec,
    indicators: &[Indicator],
    executor: &Executor,
) -> Result<Vec<WorldRuns>> {
    spec.validate()?;
    let worlds: Vec<(World, ModelParams)> = spec
        .worlds()
        .into_iter()
        .map(|w| (w, spec.params_for(&w)))
        .collect();
    run_worlds(
        &worlds,
        indicators,
        spec.runs,
        spec.alpha,
        spec.master_seed,
        executor,
    )
}

pub fn sweep(
    spec: &SweepSpec,
    indicators: &[Indicator],
    executor: &Executor,
) -> Result<Vec<SweepCell>> {
    Ok(sweep_world_runs(spec, indicators, executor)?
        .iter()
        .flat_map(WorldRuns::cells)
        .collect())
}

pub const PURE_INDICATORS: [Indicator; 2] = [Indicator::Citations, Indicator::ImpactFactor];

/// IF versus citations over `sigma_r2_list x m_list x sigma_c2_grid`.
pub fn sweep_figure1(spec: &SweepSpec, executor: &Executor) -> Result<Vec<SweepCell>> {
    sweep(spec, &PURE_INDICATORS, executor)
}

/// Same comparison, intended for a varying `m_list` at fixed review noise.
pub fn sweep_figure2(spec: &SweepSpec, executor: &Executor) -> Result<Vec<SweepCell>> {
    sweep(spec, &PURE_INDICATORS, executor)
}

/// Hybrid indicators for each weight in `weight_if_list`.
pub fn sweep_figure3(spec: &SweepSpec, executor: &Executor) -> Result<Vec<SweepCell>> {
    spec.validate()?;
    sweep(spec, &spec.hybrid_indicators(), executor)
}

/// Both pure indicators plus every hybrid weight.
pub fn sweep_custom(spec: &SweepSpec, executor: &Executor) -> Result<Vec<SweepCell>> {
    spec.validate()?;
    let mut indicators = PURE_INDICATORS.to_vec();
    indicators.extend(spec.hybrid_indicators());
    sweep(spec, &indicators, executor)
}

pub fn run_preset(preset: Preset, spec: &SweepSpec, executor: &Executor) -> Result<Vec<SweepCell>> {
    match preset {
        Preset::Figure1 => sweep_figure1(spec, executor),
        Preset::Figure2 => sweep_figure2(spec, executor),
        Preset::Figure3 => sweep_figure3(spec, executor),
        Preset::Custom => sweep_custom(spec, executor),
    }
}

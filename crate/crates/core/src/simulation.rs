//! One run of the publishing model: latent values, the prestige-ordered
//! review cascade, citations, and same-cohort impact factors.
//!
//! Draw order is fixed: `n` value draws in id order, then review noise for
//! journals `1..m-1` (within a journal, received articles in id order), then
//! `n` citation-noise draws in id order. Journal `m` accepts whatever reaches
//! it without drawing.

use std::cmp::Ordering;

use crate::distributions::{RngState, UnitMeanLogNormal};
use crate::error::{Error, Result};
use crate::rank::{by_rank, kth_best};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Number of articles.
    pub n: usize,
    /// Number of journals; must divide `n`.
    pub m: usize,
    /// Log-variance of article values.
    pub sigma_v2: f64,
    /// Log-variance of citation noise.
    pub sigma_c2: f64,
    /// Log-variance of peer-review noise.
    pub sigma_r2: f64,
    pub seed: u64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            n: 2000,
            m: 20,
            sigma_v2: 0.65,
            sigma_c2: 0.65,
            sigma_r2: 0.4,
            seed: 0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("n", "need at least one article"));
        }
        if self.m == 0 {
            return Err(Error::param("m", "need at least one journal"));
        }
        if !self.n.is_multiple_of(self.m) {
            return Err(Error::param(
                "m",
                format!(
                    "journal count {} must divide article count {} exactly",
                    self.m, self.n
                ),
            ));
        }
        for (name, v) in [
            ("sigma_v2", self.sigma_v2),
            ("sigma_c2", self.sigma_c2),
            ("sigma_r2", self.sigma_r2),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::param(
                    name,
                    format!("must be finite and >= 0, got {v}"),
                ));
            }
        }
        Ok(())
    }

    pub fn journal_size(&self) -> usize {
        self.n / self.m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Article {
    pub id: usize,
    pub value: f64,
    pub citations: f64,
    /// 1-based; journal 1 is the most prestigious.
    pub journal: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutcome {
    /// Stored in id order.
    pub articles: Vec<Article>,
    /// `impact_factors[k - 1]` belongs to journal `k`.
    pub impact_factors: Vec<f64>,
}

impl SimulationOutcome {
    pub fn journal_count(&self) -> usize {
        self.impact_factors.len()
    }

    pub fn impact_factor_of(&self, journal: usize) -> f64 {
        self.impact_factors[journal - 1]
    }
}

pub fn sample_values(params: &ModelParams, rng: &mut RngState) -> Result<Vec<f64>> {
    params.validate()?;
    let dist = UnitMeanLogNormal::new(params.sigma_v2)?;
    Ok((0..params.n).map(|_| dist.sample(rng)).collect())
}

/// Runs the submission cascade and returns the 1-based journal of each article.
///
/// Every article still unplaced is re-estimated with fresh noise at each
/// journal it reaches. Journal `k` keeps the `n/m` best estimates; equal
/// estimates go to the lower id.
pub fn assign_journals(
    values: &[f64],
    params: &ModelParams,
    rng: &mut RngState,
) -> Result<Vec<usize>> {
    params.validate()?;
    if values.len() != params.n {
        return Err(Error::param(
            "values",
            format!("expected {} values, got {}", params.n, values.len()),
        ));
    }
    let noise = UnitMeanLogNormal::new(params.sigma_r2)?;
    let per_journal = params.journal_size();

    let mut journal = vec![0usize; params.n];
    let mut remaining: Vec<usize> = (0..params.n).collect();
    let mut estimates: Vec<f64> = Vec::with_capacity(params.n);
    let mut scratch: Vec<(f64, usize)> = Vec::with_capacity(params.n);

    for k in 1..params.m {
        estimates.clear();
        estimates.extend(remaining.iter().map(|&i| values[i] * noise.sample(rng)));

        scratch.clear();
        scratch.extend(estimates.iter().copied().zip(remaining.iter().copied()));
        let cutoff = kth_best(&mut scratch, per_journal);

        let mut rejected = Vec::with_capacity(remaining.len() - per_journal);
        for (&estimate, &i) in estimates.iter().zip(&remaining) {
            if by_rank(&(estimate, i), &cutoff) != Ordering::Greater {
                journal[i] = k;
            } else {
                rejected.push(i);
            }
        }
        remaining = rejected;
    }
    debug_assert_eq!(remaining.len(), per_journal);
    for i in remaining {
        journal[i] = params.m;
    }
    Ok(journal)
}

pub fn sample_citations(
    values: &[f64],
    params: &ModelParams,
    rng: &mut RngState,
) -> Result<Vec<f64>> {
    let noise = UnitMeanLogNormal::new(params.sigma_c2)?;
    Ok(values.iter().map(|v| v * noise.sample(rng)).collect())
}

/// Mean citations per journal, summed in ascending article id.
pub fn compute_impact_factors(articles: &[Article], journal_count: usize) -> Result<Vec<f64>> {
    let mut order: Vec<&Article> = articles.iter().collect();
    order.sort_by_key(|a| a.id);

    let mut sums = vec![0.0; journal_count];
    let mut counts = vec![0usize; journal_count];
    for a in order {
        if a.journal == 0 || a.journal > journal_count {
            return Err(Error::Invariant(format!(
                "article {} has journal {} outside 1..={journal_count}",
                a.id, a.journal
            )));
        }
        sums[a.journal - 1] += a.citations;
        counts[a.journal - 1] += 1;
    }
    sums.iter()
        .zip(&counts)
        .enumerate()
        .map(|(k, (&sum, &count))| {
            if count == 0 {
                Err(Error::Invariant(format!("journal {} is empty", k + 1)))
            } else {
                Ok(sum / count as f64)
            }
        })
        .collect()
}

/// Full run from a stream seeded by `params.seed`.
pub fn run_simulation(params: &ModelParams) -> Result<SimulationOutcome> {
    run_simulation_with(params, &mut RngState::from_seed(params.seed))
}

/// Full run drawing from a caller-supplied stream; `params.seed` is ignored.
pub fn run_simulation_with(params: &ModelParams, rng: &mut RngState) -> Result<SimulationOutcome> {
    let values = sample_values(params, rng)?;
    let journals = assign_journals(&values, params, rng)?;
    let citations = sample_citations(&values, params, rng)?;
    let articles: Vec<Article> = values
        .iter()
        .zip(&citations)
        .zip(&journals)
        .enumerate()
        .map(|(id, ((&value, &citations), &journal))| Article {
            id,
            value,
            citations,
            journal,
        })
        .collect();
    let impact_factors = compute_impact_factors(&articles, params.m)?;
    Ok(SimulationOutcome {
        articles,
        impact_factors,
    })
}

//! Top-alpha selection accuracy and the per-article scoring rules.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::rank::{by_rank, kth_best};
use crate::simulation::SimulationOutcome;

/// Share of articles counted as high value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracySpec {
    alpha: f64,
}

impl AccuracySpec {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::param(
                "alpha",
                format!("must lie in (0, 1), got {alpha}"),
            ));
        }
        Ok(AccuracySpec { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `round(alpha * n)`, halves rounded up. Zero is an error.
    pub fn selected_count(&self, n: usize) -> Result<usize> {
        let k = (self.alpha * n as f64 + 0.5).floor() as usize;
        if k == 0 {
            return Err(Error::param(
                "alpha",
                format!("alpha {} selects no articles out of {n}", self.alpha),
            ));
        }
        Ok(k.min(n))
    }
}

fn check_scores(scores: &[f64]) -> Result<()> {
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::param("scores", format!("non-finite score {bad}")));
    }
    Ok(())
}

/// Membership mask of the `k` best-scoring ids (ties to the lower id).
pub fn top_k_mask(scores: &[f64], k: usize) -> Result<Vec<bool>> {
    if k == 0 || k > scores.len() {
        return Err(Error::param(
            "k",
            format!("must lie in 1..={}, got {k}", scores.len()),
        ));
    }
    check_scores(scores)?;
    let mut scratch: Vec<(f64, usize)> = scores.iter().copied().zip(0..).collect();
    let cutoff = kth_best(&mut scratch, k);
    Ok(scores
        .iter()
        .copied()
        .zip(0..)
        .map(|pair| by_rank(&pair, &cutoff) != Ordering::Greater)
        .collect())
}

/// Ids of the `k` best scores, ascending.
pub fn top_k_indices(scores: &[f64], k: usize) -> Result<Vec<usize>> {
    Ok(top_k_mask(scores, k)?
        .into_iter()
        .enumerate()
        .filter_map(|(i, selected)| selected.then_some(i))
        .collect())
}

pub fn high_value_set(values: &[f64], spec: &AccuracySpec) -> Result<Vec<usize>> {
    top_k_indices(values, spec.selected_count(values.len())?)
}

/// The high-value articles of one world, reusable across indicators.
#[derive(Debug, Clone)]
pub struct HighValueSet {
    mask: Vec<bool>,
    size: usize,
}

impl HighValueSet {
    pub fn new(values: &[f64], spec: &AccuracySpec) -> Result<Self> {
        let size = spec.selected_count(values.len())?;
        Ok(HighValueSet {
            mask: top_k_mask(values, size)?,
            size,
        })
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn contains(&self, id: usize) -> bool {
        self.mask.get(id).copied().unwrap_or(false)
    }

    /// Percentage of the top-scoring articles that are high value.
    pub fn accuracy_of(&self, scores: &[f64]) -> Result<f64> {
        if scores.len() != self.mask.len() {
            return Err(Error::param(
                "scores",
                format!("expected {} scores, got {}", self.mask.len(), scores.len()),
            ));
        }
        let hits = top_k_mask(scores, self.size)?
            .iter()
            .zip(&self.mask)
            .filter(|&(&picked, &high)| picked && high)
            .count();
        Ok(100.0 * hits as f64 / self.size as f64)
    }
}

pub fn selection_accuracy(scores: &[f64], values: &[f64], spec: &AccuracySpec) -> Result<f64> {
    if scores.len() != values.len() {
        return Err(Error::param(
            "scores",
            format!("{} scores for {} values", scores.len(), values.len()),
        ));
    }
    HighValueSet::new(values, spec)?.accuracy_of(scores)
}

/// Scores indexed by article id.
fn scores_by_id(outcome: &SimulationOutcome, score: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; outcome.articles.len()];
    for a in &outcome.articles {
        out[a.id] = score(outcome.impact_factor_of(a.journal), a.citations);
    }
    out
}

pub fn citation_scores(outcome: &SimulationOutcome) -> Vec<f64> {
    scores_by_id(outcome, |_, c| c)
}

pub fn if_scores(outcome: &SimulationOutcome) -> Vec<f64> {
    scores_by_id(outcome, |impact, _| impact)
}

/// `weight_if * IF + (1 - weight_if) * citations`; both are unit-mean already.
pub fn hybrid_scores(outcome: &SimulationOutcome, weight_if: f64) -> Result<Vec<f64>> {
    check_weight(weight_if)?;
    Ok(scores_by_id(outcome, |impact, c| {
        weight_if * impact + (1.0 - weight_if) * c
    }))
}

fn check_weight(weight_if: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&weight_if) {
        return Err(Error::param(
            "weight_if",
            format!("must lie in [0, 1], got {weight_if}"),
        ));
    }
    Ok(())
}

/// An article-level indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Indicator {
    Citations,
    ImpactFactor,
    Hybrid { weight_if: f64 },
}

impl Indicator {
    pub fn hybrid(weight_if: f64) -> Result<Self> {
        check_weight(weight_if)?;
        Ok(Indicator::Hybrid { weight_if })
    }

    pub fn scores(&self, outcome: &SimulationOutcome) -> Result<Vec<f64>> {
        match *self {
            Indicator::Citations => Ok(citation_scores(outcome)),
            Indicator::ImpactFactor => Ok(if_scores(outcome)),
            Indicator::Hybrid { weight_if } => hybrid_scores(outcome, weight_if),
        }
    }

    /// Weight on the IF term: 0 for citations, 1 for the IF.
    pub fn weight_if(&self) -> f64 {
        match *self {
            Indicator::Citations => 0.0,
            Indicator::ImpactFactor => 1.0,
            Indicator::Hybrid { weight_if } => weight_if,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Indicator::Citations => "citations",
            Indicator::ImpactFactor => "impact_factor",
            Indicator::Hybrid { .. } => "hybrid",
        }
    }

    /// Position in report ordering.
    pub fn kind_rank(&self) -> u8 {
        match self {
            Indicator::Citations => 0,
            Indicator::ImpactFactor => 1,
            Indicator::Hybrid { .. } => 2,
        }
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Indicator::Hybrid { weight_if } => write!(f, "hybrid({weight_if})"),
            other => f.write_str(other.name()),
        }
    }
}

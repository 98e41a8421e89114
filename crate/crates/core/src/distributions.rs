//! Seeded random streams and the unit-mean lognormal sampler.
//!
//! Every stream is a ChaCha8 generator keyed by `seed_from_u64(master_seed)`
//! (rand_core's PCG32 key expansion) with the ChaCha stream id set to the run
//! index, so substreams under one master seed never overlap and each is a pure
//! function of `(master_seed, run_index)`.
//!
//! Normals use the polar-free Box-Muller transform. One call that finds no
//! cached value consumes exactly two `u64` words and caches the sine branch;
//! the next call returns the cached value and consumes nothing.

use std::f64::consts::TAU;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

const TWO_POW_MINUS_53: f64 = 1.0 / (1u64 << 53) as f64;

/// Deterministic generator state. Single owner; never shared between runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngState {
    inner: ChaCha8Rng,
    // Raw bits of the cached Box-Muller sine value, kept as bits so the state
    // stays `Eq`.
    spare: Option<u64>,
}

impl RngState {
    /// Stream 0 under `seed`; identical to `derive_substream(seed, 0)`.
    pub fn from_seed(seed: u64) -> Self {
        derive_substream(seed, 0)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * TWO_POW_MINUS_53
    }

    /// Uniform on `(0, 1]`, safe to take the log of.
    fn next_open_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * TWO_POW_MINUS_53
    }
}

/// Independent stream for run `run_index` under `master_seed`.
pub fn derive_substream(master_seed: u64, run_index: u64) -> RngState {
    let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
    inner.set_stream(run_index);
    RngState { inner, spare: None }
}

/// One N(0, 1) draw via Box-Muller (see module docs for the consumption rule).
pub fn sample_standard_normal(rng: &mut RngState) -> f64 {
    if let Some(bits) = rng.spare.take() {
        return f64::from_bits(bits);
    }
    let u1 = rng.next_open_f64();
    let u2 = rng.next_f64();
    let radius = (-2.0 * u1.ln()).sqrt();
    let (sin, cos) = (TAU * u2).sin_cos();
    rng.spare = Some((radius * sin).to_bits());
    radius * cos
}

/// Lognormal whose underlying normal is N(-sigma2/2, sigma2), so its mean is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitMeanLogNormal {
    mu: f64,
    sigma: f64,
}

impl UnitMeanLogNormal {
    pub fn new(sigma2: f64) -> Result<Self> {
        if !sigma2.is_finite() || sigma2 < 0.0 {
            return Err(Error::param(
                "sigma2",
                format!("log-variance must be finite and >= 0, got {sigma2}"),
            ));
        }
        Ok(UnitMeanLogNormal {
            mu: -0.5 * sigma2,
            sigma: sigma2.sqrt(),
        })
    }

    pub fn log_variance(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// Always consumes one normal, even when the log-variance is zero; the
    /// result is then exactly 1.
    #[inline]
    pub fn sample(&self, rng: &mut RngState) -> f64 {
        let z = sample_standard_normal(rng);
        (self.mu + self.sigma * z).exp()
    }
}

pub fn sample_lognormal_unit_mean(sigma2: f64, rng: &mut RngState) -> Result<f64> {
    Ok(UnitMeanLogNormal::new(sigma2)?.sample(rng))
}

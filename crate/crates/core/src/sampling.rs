//! Seed-deterministic Monte Carlo plumbing.
//!
//! Sample `i` of a run with seed `s` always draws from the ChaCha8 stream
//! `(s, i)`, so estimates do not depend on how samples are spread across
//! worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Smallest sample count accepted by the density estimators.
pub const MIN_SAMPLES: usize = 100;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Thread configuration for sampling. `workers == 0` uses the global rayon pool.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Parallelism {
    pub workers: usize,
}

impl Parallelism {
    pub fn sequential() -> Self {
        Parallelism { workers: 1 }
    }

    pub fn with_workers(workers: usize) -> Self {
        Parallelism { workers }
    }
}

pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Evaluates `f(index, rng)` for every sample index and returns results in index order.
pub fn map_samples<T, F>(n: usize, seed: u64, par: Parallelism, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync + Send,
{
    let run = || {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = sample_rng(seed, i as u64);
                f(i, &mut rng)
            })
            .collect::<Vec<T>>()
    };
    match par.workers {
        0 => run(),
        w => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .expect("thread pool")
            .install(run),
    }
}

pub fn check_sample_count(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::precondition(format!(
            "sample count {n} is below the minimum of {MIN_SAMPLES}"
        )));
    }
    Ok(())
}

/// Wilson score interval at 95% for `hits` successes out of `n`.
pub fn wilson_interval(hits: usize, n: usize) -> [f64; 2] {
    if n == 0 {
        return [0.0, 1.0];
    }
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    let lo = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if hits == n { 1.0 } else { (center + half).min(1.0) };
    [lo, hi]
}

/// Sampler description echoed into density reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerSpec {
    /// Standard deviation of the Gaussian on translation coordinates.
    pub translation_scale: f64,
    /// Always `"haar_uniform"`: torus coordinates uniform on `[0,1)^r`.
    pub torus: &'static str,
    /// Components are drawn uniformly when present.
    pub components: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub local: Option<LocalWindow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalWindow {
    pub radius: f64,
    pub center_translation: Vec<f64>,
    pub center_torus: Vec<f64>,
    pub component: Option<usize>,
}

impl SamplerSpec {
    pub fn global(translation_scale: f64) -> Self {
        SamplerSpec {
            translation_scale,
            torus: "haar_uniform",
            components: "uniform",
            local: None,
        }
    }
}

impl Default for SamplerSpec {
    fn default() -> Self {
        SamplerSpec::global(1.0)
    }
}

/// Result of a Monte Carlo density estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub fraction: f64,
    pub ci95: [f64; 2],
    pub n: usize,
    pub hits: usize,
    pub undetermined: usize,
    pub seed: u64,
    pub sampler: SamplerSpec,
}

impl DensityReport {
    /// `hits` counts positive verdicts; undetermined samples are excluded from
    /// both buckets but still count towards `n`.
    pub fn new(hits: usize, undetermined: usize, n: usize, seed: u64, sampler: SamplerSpec) -> Self {
        DensityReport {
            fraction: hits as f64 / n as f64,
            ci95: wilson_interval(hits, n),
            n,
            hits,
            undetermined,
            seed,
            sampler,
        }
    }
}

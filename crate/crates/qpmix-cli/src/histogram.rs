//! Bootstrap resampling of weighted-sample arrays into expectation-value
//! histograms.

use anyhow::bail;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::config::HistogramSpec;

/// Binned batch-mean counts over `bins` equal-width bins spanning the
/// observed batch-mean range.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Mean of the batch means (the histogram's center of mass).
    pub center: f64,
    /// Width of one bin.
    pub bin_width: f64,
}

impl Histogram {
    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }
}

/// Draw `spec.n_resamples` batches of `spec.resample_size` samples with
/// replacement, average each batch, and bin the batch means.
pub fn resample_histogram(
    weighted_samples: &[f64],
    spec: &HistogramSpec,
    rng: &mut ChaCha12Rng,
) -> anyhow::Result<Histogram> {
    if weighted_samples.len() < spec.resample_size {
        bail!(
            "need at least resample_size = {} samples, got {}",
            spec.resample_size,
            weighted_samples.len()
        );
    }
    let n = weighted_samples.len() as u64;
    let mut means = Vec::with_capacity(spec.n_resamples);
    for _ in 0..spec.n_resamples {
        let mut sum = 0.0;
        for _ in 0..spec.resample_size {
            // Rejection-free multiply-shift index; bias is < 2^-64·n.
            let idx = ((rng.next_u64() as u128 * n as u128) >> 64) as usize;
            sum += weighted_samples[idx];
        }
        means.push(sum / spec.resample_size as f64);
    }

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &m in &means {
        lo = lo.min(m);
        hi = hi.max(m);
    }
    // Degenerate case: all batch means identical.
    if hi <= lo {
        hi = lo + 1e-12 * lo.abs().max(1.0);
    }
    let bins = spec.bins;
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &m in &means {
        let idx = (((m - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let center = means.iter().sum::<f64>() / means.len() as f64;
    let bin_edges = (0..=bins).map(|i| lo + i as f64 * width).collect();
    Ok(Histogram {
        bin_edges,
        counts,
        center,
        bin_width: width,
    })
}

/// Deterministic resampler stream for an arm: high stream ids stay clear of
/// the estimator's instance substreams.
pub fn histogram_rng(seed: u64, arm_index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream((1 << 62) + arm_index);
    rng
}

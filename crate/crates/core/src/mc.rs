//! Direct Monte-Carlo estimation of outage, rate and harvested-power
//! statistics from the physical model.
//!
//! Trials are independent streams keyed by `(seed, trial)`, grouped into
//! fixed-size chunks. The chunk functions are public so a parallel driver
//! can fan chunks out to workers; as long as chunk results are merged in
//! index order, the totals are bitwise identical to a sequential pass no
//! matter how many workers ran.

use crate::channel::{sample_channel_draw, sample_x1};
use crate::harvest::{harvested_power, EhParams};
use crate::link::{compute_sinrs, thresholds, Thresholds};
use crate::params::SystemParams;
use crate::rng::TrialRng;

/// Fixed trial-partitioning granularity; part of the determinism contract.
pub const CHUNK_TRIALS: u64 = 1 << 16;

/// Which downlink device a metric refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Device {
    D1,
    D2,
}

/// A Monte-Carlo point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_trials: u64,
}

impl MetricEstimate {
    /// Too few trials for the standard error to mean anything.
    pub fn low_sample(&self) -> bool {
        self.n_trials < 2
    }
}

/// Kahan-compensated first/second-moment accumulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentAccumulator {
    pub n: u64,
    sum: f64,
    sum_c: f64,
    sumsq: f64,
    sumsq_c: f64,
}

#[inline]
fn kahan_add(sum: &mut f64, c: &mut f64, v: f64) {
    let y = v - *c;
    let t = *sum + y;
    *c = (t - *sum) - y;
    *sum = t;
}

impl MomentAccumulator {
    pub fn new() -> Self {
        MomentAccumulator { n: 0, sum: 0.0, sum_c: 0.0, sumsq: 0.0, sumsq_c: 0.0 }
    }

    #[inline]
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        kahan_add(&mut self.sum, &mut self.sum_c, v);
        kahan_add(&mut self.sumsq, &mut self.sumsq_c, v * v);
    }

    /// Fold `other` into `self`. Merging chunk accumulators in index order
    /// reproduces the sequential result exactly.
    pub fn merge(&mut self, other: &MomentAccumulator) {
        self.n += other.n;
        kahan_add(&mut self.sum, &mut self.sum_c, other.sum);
        kahan_add(&mut self.sumsq, &mut self.sumsq_c, other.sumsq);
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.sum / self.n as f64
    }

    /// Unbiased sample variance; 0 below two samples.
    pub fn sample_variance(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let var = (self.sumsq - self.sum * self.sum / n) / (n - 1.0);
        if var > 0.0 {
            var
        } else {
            0.0
        }
    }

    pub fn mean_estimate(&self) -> MetricEstimate {
        let stderr = if self.n < 2 {
            0.0
        } else {
            libm::sqrt(self.sample_variance() / self.n as f64)
        };
        MetricEstimate { mean: self.mean(), stderr, n_trials: self.n }
    }
}

impl Default for MomentAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

/// Half-open chunk ranges `[start, end)` covering `0..n`.
pub fn chunk_bounds(n: u64) -> impl Iterator<Item = (u64, u64)> {
    let chunks = n.div_ceil(CHUNK_TRIALS);
    (0..chunks).map(move |i| {
        let start = i * CHUNK_TRIALS;
        (start, (start + CHUNK_TRIALS).min(n))
    })
}

/// Harvested power of one draw: the EH split of the received pilot power.
#[inline]
fn trial_ph(p: &SystemParams, eh: &EhParams, x1: f64) -> f64 {
    harvested_power(eh, p.rho * p.pt_w() * p.beta_ss * p.beta_s1 * x1 * x1)
}

/// Whether the device is in outage for one fading realization.
#[inline]
fn trial_outage(
    p: &SystemParams,
    eh: &EhParams,
    t: &Thresholds,
    device: Device,
    rng: &mut TrialRng,
) -> bool {
    let d = sample_channel_draw(p, rng);
    let ph = trial_ph(p, eh, d.x1);
    let s = compute_sinrs(p, &d, ph);
    match device {
        Device::D1 => !(s.d1_x2 >= t.gamma_th2 && s.d1_x1 >= t.gamma_th),
        Device::D2 => {
            if s.d1_x2 >= t.gamma_th2 {
                // D1 decoded the cell-edge stream and relays it; D2 combines.
                s.d2_mrc < t.gamma_th2
            } else {
                s.d2_direct < t.gamma_th2
            }
        }
    }
}

/// Count outage events over trials `[start, end)`.
pub fn outage_chunk(
    p: &SystemParams,
    eh: &EhParams,
    device: Device,
    start: u64,
    end: u64,
    seed: u64,
) -> u64 {
    let t = thresholds(p);
    let mut count = 0;
    for trial in start..end {
        let mut rng = TrialRng::new(seed, trial);
        if trial_outage(p, eh, &t, device, &mut rng) {
            count += 1;
        }
    }
    count
}

/// Accumulate the achievable rate over trials `[start, end)`.
pub fn rate_chunk(
    p: &SystemParams,
    eh: &EhParams,
    device: Device,
    start: u64,
    end: u64,
    seed: u64,
) -> MomentAccumulator {
    let mut acc = MomentAccumulator::new();
    for trial in start..end {
        let mut rng = TrialRng::new(seed, trial);
        let d = sample_channel_draw(p, &mut rng);
        let ph = trial_ph(p, eh, d.x1);
        let s = compute_sinrs(p, &d, ph);
        let sinr = match device {
            Device::D1 => s.d1_x1,
            Device::D2 => s.d2_mrc,
        };
        acc.push(libm::log2(1.0 + sinr));
    }
    acc
}

/// Accumulate the harvested power over trials `[start, end)`.
pub fn harvest_chunk(
    p: &SystemParams,
    eh: &EhParams,
    start: u64,
    end: u64,
    seed: u64,
) -> MomentAccumulator {
    let mut acc = MomentAccumulator::new();
    for trial in start..end {
        let mut rng = TrialRng::new(seed, trial);
        let x1 = sample_x1(p, &mut rng);
        acc.push(trial_ph(p, eh, x1));
    }
    acc
}

/// Outage probability of `device` over `n` trials.
pub fn estimate_outage(
    p: &SystemParams,
    eh: &EhParams,
    device: Device,
    n: u64,
    seed: u64,
) -> MetricEstimate {
    let mut count = 0u64;
    for (start, end) in chunk_bounds(n) {
        count += outage_chunk(p, eh, device, start, end, seed);
    }
    outage_estimate_from_count(count, n)
}

/// Bernoulli estimate from an outage count.
pub fn outage_estimate_from_count(count: u64, n: u64) -> MetricEstimate {
    let mean = if n == 0 { 0.0 } else { count as f64 / n as f64 };
    let stderr = if n == 0 { 0.0 } else { libm::sqrt(mean * (1.0 - mean) / n as f64) };
    MetricEstimate { mean, stderr, n_trials: n }
}

/// Ergodic rate of `device` over `n` trials.
pub fn estimate_rate(
    p: &SystemParams,
    eh: &EhParams,
    device: Device,
    n: u64,
    seed: u64,
) -> MetricEstimate {
    let mut acc = MomentAccumulator::new();
    for (start, end) in chunk_bounds(n) {
        acc.merge(&rate_chunk(p, eh, device, start, end, seed));
    }
    acc.mean_estimate()
}

/// Mean and variance of the harvested power over `n` trials.
///
/// The variance estimate's standard error uses the Gaussian large-sample
/// approximation `var * sqrt(2 / (n - 1))`.
pub fn estimate_harvest_stats(
    p: &SystemParams,
    eh: &EhParams,
    n: u64,
    seed: u64,
) -> (MetricEstimate, MetricEstimate) {
    let mut acc = MomentAccumulator::new();
    for (start, end) in chunk_bounds(n) {
        acc.merge(&harvest_chunk(p, eh, start, end, seed));
    }
    harvest_estimates_from_acc(&acc)
}

/// Split a harvest accumulator into (mean, variance) estimates.
pub fn harvest_estimates_from_acc(
    acc: &MomentAccumulator,
) -> (MetricEstimate, MetricEstimate) {
    let mean = acc.mean_estimate();
    let var = acc.sample_variance();
    let var_stderr = if acc.n < 2 {
        0.0
    } else {
        var * libm::sqrt(2.0 / (acc.n as f64 - 1.0))
    };
    (mean, MetricEstimate { mean: var, stderr: var_stderr, n_trials: acc.n })
}

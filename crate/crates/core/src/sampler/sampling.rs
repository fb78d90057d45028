//! Monte Carlo sampling of a lossy interferometer.
//!
//! Uniform loss commutes with passive linear optics, so each input photon
//! is kept with probability `gamma_eff` before the interferometer and the
//! survivors are scattered by the exact lossless distribution.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

use super::distribution::{check_instance, lossless_distribution, Distribution};
use super::fock::FockConfig;

/// Trials drawn from one RNG stream.
pub const CHUNK_TRIALS: u64 = 4096;

/// Outcome of one trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SamplingResult {
    pub trial: u64,
    /// Photons seen at the output.
    pub detected: FockConfig,
    pub photons_detected: usize,
    /// All `n` photons arrived.
    pub success: bool,
}

impl SamplingResult {
    /// The output configuration, or `None` for a failed trial.
    pub fn outcome(&self) -> Option<&FockConfig> {
        self.success.then_some(&self.detected)
    }
}

/// Cumulative table over the outputs of one sub-input.
struct Table {
    outcomes: Vec<FockConfig>,
    cumulative: Vec<f64>,
}

impl Table {
    fn new(dist: &Distribution) -> Self {
        let mut outcomes = Vec::with_capacity(dist.len());
        let mut cumulative = Vec::with_capacity(dist.len());
        let mut acc = 0.0;
        for (c, p) in dist.iter() {
            acc += p;
            outcomes.push(c.clone());
            cumulative.push(acc);
        }
        Self { outcomes, cumulative }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> &FockConfig {
        let total = *self.cumulative.last().expect("non-empty table");
        let x = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= x);
        &self.outcomes[idx.min(self.outcomes.len() - 1)]
    }
}

/// Lossy sampler with exact output tables for every subset of surviving
/// photons.
pub struct LossySampler {
    m: usize,
    n: usize,
    gamma_eff: f64,
    tables: Vec<Table>,
}

impl LossySampler {
    pub fn new(u: &CMatrix, input: &FockConfig, gamma_eff: f64) -> Result<Self> {
        let n = check_instance(u, input)?;
        if !(0.0..=1.0).contains(&gamma_eff) {
            return Err(Error::InvalidEfficiency(gamma_eff));
        }
        let m = u.nrows();
        let modes = input.photon_modes();
        let mut tables = Vec::with_capacity(1 << n);
        for mask in 0u32..(1 << n) {
            let kept: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| modes[i]).collect();
            let sub = FockConfig::from_modes(&kept, m)?;
            tables.push(Table::new(&lossless_distribution(u, &sub)?));
        }
        Ok(Self {
            m,
            n,
            gamma_eff,
            tables,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma_eff(&self) -> f64 {
        self.gamma_eff
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, trial: u64) -> SamplingResult {
        let mut mask = 0usize;
        for i in 0..self.n {
            if rng.random::<f64>() < self.gamma_eff {
                mask |= 1 << i;
            }
        }
        let photons_detected = mask.count_ones() as usize;
        let detected = self.tables[mask].draw(rng).clone();
        SamplingResult {
            trial,
            detected,
            photons_detected,
            success: photons_detected == self.n,
        }
    }

    /// Runs `trials` trials. Trial `t` uses stream `t / CHUNK_TRIALS` of a
    /// ChaCha8 generator seeded with `seed`, so the result does not depend
    /// on how chunks are scheduled across threads.
    pub fn run(&self, trials: u64, seed: u64) -> TrialSummary {
        let chunks = trials.div_ceil(CHUNK_TRIALS);
        let run_chunk = |chunk: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let start = chunk * CHUNK_TRIALS;
            let end = (start + CHUNK_TRIALS).min(trials);
            let mut summary = TrialSummary::empty(self.m, self.n);
            for t in start..end {
                summary.record(&self.sample(&mut rng, t));
            }
            summary
        };
        #[cfg(feature = "parallel")]
        let parts: Vec<TrialSummary> = {
            use rayon::prelude::*;
            (0..chunks).into_par_iter().map(run_chunk).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let parts: Vec<TrialSummary> = (0..chunks).map(run_chunk).collect();

        let mut total = TrialSummary::empty(self.m, self.n);
        for part in parts {
            total.merge(part);
        }
        total
    }
}

/// One trial drawn with a fresh sampler.
pub fn lossy_sample<R: Rng + ?Sized>(
    u: &CMatrix,
    input: &FockConfig,
    gamma_eff: f64,
    rng: &mut R,
) -> Result<SamplingResult> {
    Ok(LossySampler::new(u, input, gamma_eff)?.sample(rng, 0))
}

/// Aggregated statistics of a batch of trials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialSummary {
    pub m: usize,
    pub n: usize,
    pub trials: u64,
    pub successes: u64,
    /// `detected_histogram[j]` counts trials with `j` photons detected.
    pub detected_histogram: Vec<u64>,
    /// Output configurations of successful trials.
    #[serde(skip)]
    pub success_counts: BTreeMap<FockConfig, u64>,
}

impl TrialSummary {
    fn empty(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            trials: 0,
            successes: 0,
            detected_histogram: vec![0; n + 1],
            success_counts: BTreeMap::new(),
        }
    }

    fn record(&mut self, result: &SamplingResult) {
        self.trials += 1;
        self.detected_histogram[result.photons_detected] += 1;
        if let Some(occ) = result.outcome() {
            self.successes += 1;
            *self.success_counts.entry(occ.clone()).or_insert(0) += 1;
        }
    }

    fn merge(&mut self, other: TrialSummary) {
        self.trials += other.trials;
        self.successes += other.successes;
        for (a, b) in self.detected_histogram.iter_mut().zip(other.detected_histogram) {
            *a += b;
        }
        for (occ, count) in other.success_counts {
            *self.success_counts.entry(occ).or_insert(0) += count;
        }
    }

    pub fn failures(&self) -> u64 {
        self.trials - self.successes
    }

    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    /// Empirical distribution of successful trials.
    pub fn postselected(&self) -> Distribution {
        Distribution::empirical(self.m, self.n, &self.success_counts)
    }
}

//! Random-channel campaigns binned by the strength gauges `(γ, λ)`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evaluate_scenario, random_bases, random_env_dim, ScenarioRecord};
use crate::channels::{gamma_strength, lambda_strength, random_channel, KrausMap};
use crate::error::{Error, Result};
use crate::optimizer::OptimizerSettings;
use crate::protocol::CLASSICAL_THRESHOLD;
use crate::rng::Seed;

/// Maximum number of candidate channels drawn per noise per scenario.
pub const REJECTION_CAP: usize = 100_000;

pub const PRESET_GAMMAS: [f64; 3] = [0.25, 0.4, 0.5];
pub const PRESET_LAMBDAS: [f64; 3] = [0.225, 0.375, 0.475];

/// The nine preset `(γ, λ)` bin centers, γ-major.
pub fn preset_bins() -> Vec<(f64, f64)> {
    PRESET_GAMMAS.iter().flat_map(|&g| PRESET_LAMBDAS.iter().map(move |&l| (g, l))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub gamma_bin_center: f64,
    pub lambda_bin_center: f64,
    pub bin_width: f64,
    /// Scenarios in the bin.
    pub count: usize,
    pub afy_basis_samples: usize,
    pub optimizer: OptimizerSettings,
    pub master_seed: u64,
}

impl BatchConfig {
    pub fn new(gamma_bin_center: f64, lambda_bin_center: f64, count: usize, master_seed: u64) -> Self {
        BatchConfig {
            gamma_bin_center,
            lambda_bin_center,
            bin_width: 0.01,
            count,
            afy_basis_samples: 20,
            optimizer: OptimizerSettings::default(),
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return Err(Error::InvalidParameter(format!("bin width must be positive, got {}", self.bin_width)));
        }
        if self.count == 0 {
            return Err(Error::InvalidParameter("count must be at least 1".into()));
        }
        for (name, c) in [("gamma", self.gamma_bin_center), ("lambda", self.lambda_bin_center)] {
            if !(0.0..=1.0).contains(&c) {
                return Err(Error::InvalidParameter(format!("{name} bin center {c} outside [0, 1]")));
            }
        }
        self.optimizer.validate()
    }
}

#[derive(Debug, Clone, Default)]
pub struct BatchOutcome {
    /// Completed scenarios in id order.
    pub records: Vec<ScenarioRecord>,
    /// Scenarios whose channels could not be placed in their bin.
    pub exhausted: Vec<(u64, String)>,
}

#[derive(Debug, Clone, Copy)]
enum Gauge {
    Gamma,
    Lambda,
}

fn sample_in_bin(gauge: Gauge, center: f64, width: f64, seed: Seed) -> Result<KrausMap> {
    let mut rng = seed.rng();
    for attempt in 0..REJECTION_CAP {
        let env = random_env_dim(&mut rng);
        let candidate = random_channel(2, env, seed.split(attempt as u64))?;
        let value = match gauge {
            Gauge::Gamma => gamma_strength(&candidate)?,
            Gauge::Lambda => lambda_strength(&candidate)?,
        };
        if (value - center).abs() <= width / 2.0 {
            return Ok(candidate);
        }
    }
    Err(Error::SamplingExhausted { attempts: REJECTION_CAP })
}

struct Job {
    id: u64,
    gamma: f64,
    lambda: f64,
}

fn run_jobs(
    jobs: Vec<Job>,
    bin_width: f64,
    afy_basis_samples: usize,
    optimizer: &OptimizerSettings,
    master_seed: u64,
) -> BatchOutcome {
    let results: Vec<(u64, Result<ScenarioRecord>)> = jobs
        .into_par_iter()
        .map(|job| {
            let seed = master_seed ^ job.id;
            let root = Seed(seed);
            let run = || -> Result<ScenarioRecord> {
                let channel = sample_in_bin(Gauge::Gamma, job.gamma, bin_width, root.split(1))?;
                let source = sample_in_bin(Gauge::Lambda, job.lambda, bin_width, root.split(2))?;
                let bases = random_bases(afy_basis_samples, root.split(3));
                evaluate_scenario(job.id, &source, &channel, &bases, optimizer, seed)
            };
            (job.id, run())
        })
        .collect();
    let mut outcome = BatchOutcome::default();
    for (id, r) in results {
        match r {
            Ok(rec) => outcome.records.push(rec),
            Err(e) => outcome.exhausted.push((id, e.to_string())),
        }
    }
    outcome
}

/// `count` scenarios in one `(γ, λ)` bin, ids `0..count`.
pub fn run_batch(config: &BatchConfig) -> Result<BatchOutcome> {
    config.validate()?;
    let jobs = (0..config.count as u64)
        .map(|id| Job { id, gamma: config.gamma_bin_center, lambda: config.lambda_bin_center })
        .collect();
    Ok(run_jobs(jobs, config.bin_width, config.afy_basis_samples, &config.optimizer, config.master_seed))
}

/// `total` scenarios spread round-robin over the preset bins (scenario `i` goes
/// to bin `i mod 9`).
pub fn run_campaign(
    total: usize,
    bin_width: f64,
    afy_basis_samples: usize,
    optimizer: &OptimizerSettings,
    master_seed: u64,
) -> Result<BatchOutcome> {
    let probe = BatchConfig { bin_width, count: total, afy_basis_samples, optimizer: *optimizer, ..BatchConfig::new(0.0, 0.0, 1, master_seed) };
    probe.validate()?;
    let bins = preset_bins();
    let jobs = (0..total)
        .map(|i| {
            let (gamma, lambda) = bins[i % bins.len()];
            Job { id: i as u64, gamma, lambda }
        })
        .collect();
    Ok(run_jobs(jobs, bin_width, afy_basis_samples, optimizer, master_seed))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchSummary {
    pub scenarios: usize,
    pub realistic_below_threshold: usize,
    pub afy_mean_below_threshold: usize,
    pub mean_rel_gain: f64,
}

impl BatchSummary {
    pub fn realistic_fraction(&self) -> f64 {
        self.realistic_below_threshold as f64 / self.scenarios.max(1) as f64
    }

    pub fn afy_fraction(&self) -> f64 {
        self.afy_mean_below_threshold as f64 / self.scenarios.max(1) as f64
    }
}

impl fmt::Display for BatchSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenarios: {}", self.scenarios)?;
        writeln!(
            f,
            "realistic below 2/3: {} ({:.2}%)",
            self.realistic_below_threshold,
            100.0 * self.realistic_fraction()
        )?;
        writeln!(f, "AFY mean below 2/3: {} ({:.2}%)", self.afy_mean_below_threshold, 100.0 * self.afy_fraction())?;
        write!(f, "mean relative gain: {:.4}%", self.mean_rel_gain)
    }
}

pub fn summarize(records: &[ScenarioRecord]) -> BatchSummary {
    let n = records.len();
    BatchSummary {
        scenarios: n,
        realistic_below_threshold: records.iter().filter(|r| r.f_realistic < CLASSICAL_THRESHOLD).count(),
        afy_mean_below_threshold: records.iter().filter(|r| r.f_afy_mean < CLASSICAL_THRESHOLD).count(),
        mean_rel_gain: if n == 0 { 0.0 } else { records.iter().map(|r| r.rel_gain_mean).sum::<f64>() / n as f64 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinMean {
    pub gamma_center: f64,
    pub lambda_center: f64,
    pub count: usize,
    pub mean_rel_gain: f64,
}

/// Mean `rel_gain_mean` of the records falling in each bin.
pub fn mean_gain_by_bin(records: &[ScenarioRecord], bins: &[(f64, f64)], bin_width: f64) -> Vec<BinMean> {
    let half = bin_width / 2.0 + 1e-12;
    bins.iter()
        .map(|&(g, l)| {
            let gains: Vec<f64> = records
                .iter()
                .filter(|r| (r.gamma - g).abs() <= half && (r.lambda - l).abs() <= half)
                .map(|r| r.rel_gain_mean)
                .collect();
            let mean = if gains.is_empty() { f64::NAN } else { gains.iter().sum::<f64>() / gains.len() as f64 };
            BinMean { gamma_center: g, lambda_center: l, count: gains.len(), mean_rel_gain: mean }
        })
        .collect()
}

//! Identical bit-flip noise on the source and on both resource qubits.
//!
//! Alice's resource flip is moved to Bob's side (`(σ_x ⊗ I)|φ⟩ = (I ⊗ σ_x)|φ⟩`),
//! so the resource noise is `bit_flip(p) ∘ bit_flip(p)` on Bob's qubit.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{evaluate_scenario, random_bases, ScenarioRecord};
use crate::channels::{compose, named_channel, ChannelKind, KrausMap};
use crate::error::{Error, Result};
use crate::optimizer::OptimizerSettings;
use crate::rng::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub p_min: f64,
    pub p_max: f64,
    pub steps: usize,
    pub afy_basis_samples: usize,
    pub optimizer: OptimizerSettings,
    pub master_seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.p_min && self.p_min <= self.p_max && self.p_max <= 0.5) {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= p_min <= p_max <= 0.5, got [{}, {}]",
                self.p_min, self.p_max
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidParameter("steps must be positive".into()));
        }
        self.optimizer.validate()
    }

    pub fn grid(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.p_min];
        }
        let h = (self.p_max - self.p_min) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| if i + 1 == self.steps { self.p_max } else { self.p_min + h * i as f64 }).collect()
    }
}

/// `(source noise, resource noise)` for flip probability `p`.
pub fn bitflip_scenario(p: f64) -> Result<(KrausMap, KrausMap)> {
    let flip = named_channel(ChannelKind::BitFlip, &[p])?;
    let resource = compose(&flip, &flip)?;
    Ok((flip, resource))
}

/// One record per grid point. Every row uses the same random AFY bases so the
/// rows differ only through the noise strength.
pub fn sweep_bitflip(config: &SweepConfig) -> Result<Vec<ScenarioRecord>> {
    config.validate()?;
    let bases = random_bases(config.afy_basis_samples, Seed(config.master_seed).split(0xAF));
    config
        .grid()
        .into_par_iter()
        .enumerate()
        .map(|(i, p)| {
            let (src, chan) = bitflip_scenario(p)?;
            let seed = config.master_seed ^ i as u64;
            evaluate_scenario(i as u64, &src, &chan, &bases, &config.optimizer, seed)
        })
        .collect()
}

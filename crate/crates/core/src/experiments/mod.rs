//! Numerical experiments: per-scenario comparison of the realistic protocol
//! against AFY and the standard protocol, bit-flip sweeps and random batches.

mod batch;
mod sweep;
mod table;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

pub use batch::{
    mean_gain_by_bin, preset_bins, run_batch, run_campaign, summarize, BatchConfig, BatchOutcome, BatchSummary,
    BinMean, PRESET_GAMMAS, PRESET_LAMBDAS, REJECTION_CAP,
};
pub use sweep::{bitflip_scenario, sweep_bitflip, SweepConfig};
pub use table::{format_float, parse_csv, read_records, records_to_csv, write_records, CSV_HEADER};

use crate::channels::{ChannelStrength, KrausMap};
use crate::error::Result;
use crate::optimizer::{basis_from_params, optimize_realistic_seeded, params_from_su2, OptimizerSettings};
use crate::protocol::{afy_spec, avg_fidelity_from_f, evaluate_relative_gain, febf_objective, stp_spec};
use crate::qcore::haar_random_unitary_with;
use crate::rng::Seed;

/// One row of an experiment. Fidelities are average fidelities; gains are percents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRecord {
    pub scenario_id: u64,
    pub gamma: f64,
    pub lambda: f64,
    pub f_realistic: f64,
    pub f_afy_best: f64,
    pub f_afy_worst: f64,
    pub f_afy_mean: f64,
    pub f_stp: f64,
    pub rel_gain_mean: f64,
    pub rel_gain_best: f64,
    pub rel_gain_worst: f64,
    pub seed: u64,
}

/// Basis angles `(w, v)` with `W`, `V` Haar-distributed.
pub fn random_bases(count: usize, seed: Seed) -> Vec<([f64; 3], [f64; 3])> {
    let mut rng = seed.rng();
    (0..count)
        .map(|_| {
            let w = params_from_su2(&haar_random_unitary_with(2, &mut rng)).expect("Haar sample is unitary");
            let v = params_from_su2(&haar_random_unitary_with(2, &mut rng)).expect("Haar sample is unitary");
            (w, v)
        })
        .collect()
}

/// Settings for the per-outcome AFY correction searches. Each is a smooth
/// three-angle problem, so a small fixed budget is enough.
pub fn afy_settings(seed: Seed) -> OptimizerSettings {
    OptimizerSettings::quick(seed.0)
}

/// Scores the realistic protocol, AFY over `afy_bases`, and the standard
/// protocol on one pair of noises. The AFY bases are also handed to the
/// realistic search as starting points.
pub fn evaluate_scenario(
    scenario_id: u64,
    source_noise: &KrausMap,
    channel_noise: &KrausMap,
    afy_bases: &[([f64; 3], [f64; 3])],
    optimizer: &OptimizerSettings,
    seed: u64,
) -> Result<ScenarioRecord> {
    let strength = ChannelStrength::of(channel_noise, source_noise)?;
    let avg = |f: f64| avg_fidelity_from_f(f, 2);

    let mut afy = Vec::with_capacity(afy_bases.len());
    for (k, (w, v)) in afy_bases.iter().enumerate() {
        let basis = basis_from_params(*w, *v);
        let spec = afy_spec(&basis, channel_noise, &afy_settings(Seed(seed).split(100 + k as u64)))?;
        afy.push(avg(febf_objective(&spec, source_noise, channel_noise)?)?);
    }
    let f_stp = avg(febf_objective(&stp_spec(2)?, source_noise, channel_noise)?)?;
    let realistic = optimize_realistic_seeded(source_noise, channel_noise, &optimizer.for_stream(seed), afy_bases)?;
    let f_realistic = avg(realistic.f_max)?;

    let (f_afy_best, f_afy_worst, f_afy_mean) = if afy.is_empty() {
        (f_stp, f_stp, f_stp)
    } else {
        let best = afy.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let worst = afy.iter().copied().fold(f64::INFINITY, f64::min);
        (best, worst, afy.iter().sum::<f64>() / afy.len() as f64)
    };
    Ok(ScenarioRecord {
        scenario_id,
        gamma: strength.gamma,
        lambda: strength.lambda,
        f_realistic,
        f_afy_best,
        f_afy_worst,
        f_afy_mean,
        f_stp,
        rel_gain_mean: evaluate_relative_gain(f_realistic, f_afy_mean)?,
        rel_gain_best: evaluate_relative_gain(f_realistic, f_afy_best)?,
        rel_gain_worst: evaluate_relative_gain(f_realistic, f_afy_worst)?,
        seed,
    })
}

/// Draws an environment dimension uniformly from {2, 3, 4}.
pub(crate) fn random_env_dim(rng: &mut crate::rng::Rng) -> usize {
    rng.random_range(2..=4)
}

//! Brute-force simulation of the three-qubit teleportation circuit, used to
//! cross-check the closed-form objective.

use crate::channels::{apply, choi_state, KrausMap};
use crate::error::{Error, Result};
use crate::protocol::ProtocolSpec;
use crate::qcore::{me_vector, random_pure_state_with, tensor, ComplexMatrix, DensityMatrix, StateVector, C64, ONE, ZERO};
use crate::rng::Seed;

#[derive(Debug, Clone)]
pub struct CircuitOutcome {
    /// Bob's state after correction, summed over the measurement branches.
    pub rho_out: DensityMatrix,
    pub outcome_probs: [f64; 4],
}

/// Teleports `psi` (first degraded by `source_noise`) through the Choi state
/// of `channel_noise`. Alice projects her two qubits onto `|φ_{U_α}⟩`, Bob
/// applies `T_α`; every branch is kept with its weight.
pub fn circuit_teleport(
    psi: &StateVector,
    p: &ProtocolSpec,
    source_noise: &KrausMap,
    channel_noise: &KrausMap,
) -> Result<CircuitOutcome> {
    let n = p.n();
    if n != 2 {
        return Err(Error::Dimension { expected: 2, found: n });
    }
    if psi.dim() != n {
        return Err(Error::Dimension { expected: n, found: psi.dim() });
    }
    let rho_in = apply(source_noise, &psi.projector())?;
    let chi = choi_state(channel_noise)?;
    if rho_in.dim() != n || chi.dim() != n * n {
        return Err(Error::Dimension { expected: n, found: rho_in.dim() });
    }
    // qubit order: source, Alice's half, Bob's half
    let total = tensor(rho_in.matrix(), chi.matrix());
    let mut out = ComplexMatrix::zeros(n, n);
    let mut probs = [0.0; 4];
    for (alpha, (u, t)) in p.pairs().enumerate() {
        let v = me_vector(u, n)?;
        // (⟨v| ⊗ I_B) as an n × n³ matrix
        let mut k = ComplexMatrix::zeros(n, n * n * n);
        for (ia, amp) in v.amplitudes().iter().enumerate() {
            for b in 0..n {
                k[(b, ia * n + b)] = amp.conj();
            }
        }
        let branch = &(&k * &total) * &k.adjoint();
        probs[alpha] = branch.trace().re;
        out = &out + &branch.conjugate_by(t)?;
    }
    Ok(CircuitOutcome { rho_out: DensityMatrix::new(out)?, outcome_probs: probs })
}

/// The six eigenstates of σ_x, σ_y, σ_z.
pub fn pauli_eigenstates() -> [StateVector; 6] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = |a: C64, b: C64| StateVector::new(vec![a, b]).expect("normalized");
    [
        s(ONE, ZERO),
        s(ZERO, ONE),
        s(C64::new(h, 0.0), C64::new(h, 0.0)),
        s(C64::new(h, 0.0), C64::new(-h, 0.0)),
        s(C64::new(h, 0.0), C64::new(0.0, h)),
        s(C64::new(h, 0.0), C64::new(0.0, -h)),
    ]
}

fn fidelity(psi: &StateVector, p: &ProtocolSpec, source_noise: &KrausMap, channel_noise: &KrausMap) -> Result<f64> {
    circuit_teleport(psi, p, source_noise, channel_noise)?.rho_out.fidelity_with_pure(psi)
}

/// Exact Haar-average fidelity: the fidelity is quadratic in `|ψ⟩⟨ψ|`, so the
/// equal-weight mean over a state 2-design reproduces the integral.
pub fn avg_fidelity_2design(p: &ProtocolSpec, source_noise: &KrausMap, channel_noise: &KrausMap) -> Result<f64> {
    let states = pauli_eigenstates();
    let mut sum = 0.0;
    for psi in &states {
        sum += fidelity(psi, p, source_noise, channel_noise)?;
    }
    Ok(sum / states.len() as f64)
}

/// Haar-sampled average fidelity, returned as `(mean, standard error)`.
pub fn avg_fidelity_monte_carlo(
    p: &ProtocolSpec,
    source_noise: &KrausMap,
    channel_noise: &KrausMap,
    samples: usize,
    seed: Seed,
) -> Result<(f64, f64)> {
    if samples < 100 {
        return Err(Error::InvalidParameter(format!("need at least 100 samples, got {samples}")));
    }
    let mut rng = seed.rng();
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let psi = random_pure_state_with(p.n(), &mut rng);
        values.push(fidelity(&psi, p, source_noise, channel_noise)?);
    }
    let m = samples as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    Ok((mean, (var / m).sqrt()))
}

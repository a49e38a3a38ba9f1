use serde::{Deserialize, Serialize};

use super::{choi_state, trace_weight, KrausMap};
use crate::error::{Error, Result};
use crate::qcore::{hermitian_eigenvalues, partial_transpose, DensityMatrix};

/// Strength of a (resource, source) noise pair: `gamma` is the entanglement
/// lost by the resource, `lambda` the average fidelity lost by the source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelStrength {
    pub gamma: f64,
    pub lambda: f64,
}

impl ChannelStrength {
    pub fn of(channel_noise: &KrausMap, source_noise: &KrausMap) -> Result<Self> {
        Ok(ChannelStrength { gamma: gamma_strength(channel_noise)?, lambda: lambda_strength(source_noise)? })
    }
}

/// `‖ρ^{T_B}‖₁ − 1`, i.e. twice the magnitude of the negative spectrum of the
/// partial transpose. A two-qubit Bell state scores 1.
pub fn negativity(rho: &DensityMatrix, dims: [usize; 2]) -> Result<f64> {
    let pt = partial_transpose(rho.matrix(), dims, 1)?;
    let negative: f64 = hermitian_eigenvalues(&pt)?.into_iter().filter(|&v| v < 0.0).sum();
    Ok(-2.0 * negative)
}

/// `1 − Neg((I⊗Γ)[|φ⟩⟨φ|]) / (n − 1)`; for qubits simply one minus the Choi-state negativity.
/// Rounding noise is clamped into `[0, 1]`.
pub fn gamma_strength(g: &KrausMap) -> Result<f64> {
    let n = g.square_dim()?;
    let neg = negativity(&choi_state(g)?, [n, n])?;
    Ok((1.0 - neg / (n as f64 - 1.0)).clamp(0.0, 1.0))
}

/// `⟨φ|(I⊗m)[|φ⟩⟨φ|]|φ⟩ = Σ_k |Tr K_k / n|²`.
pub fn entanglement_fidelity(m: &KrausMap) -> Result<f64> {
    let n = m.square_dim()? as f64;
    Ok(trace_weight(m) / (n * n))
}

/// Average fidelity loss over Haar-random pure inputs, `1 − (n F_e + 1)/(n + 1)`.
pub fn lambda_strength(m: &KrausMap) -> Result<f64> {
    let n = m.square_dim()?;
    if n < 2 {
        return Err(Error::InvalidParameter("lambda needs n >= 2".into()));
    }
    let fe = entanglement_fidelity(m)?;
    let nf = n as f64;
    Ok((1.0 - (nf * fe + 1.0) / (nf + 1.0)).clamp(0.0, 1.0))
}

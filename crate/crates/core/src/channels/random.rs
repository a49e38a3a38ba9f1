use super::KrausMap;
use crate::error::{Error, Result};
use crate::qcore::{haar_random_unitary, ComplexMatrix};
use crate::rng::Seed;

/// Random qubit/qudit channel through a Stinespring dilation.
///
/// A Haar-random unitary acts on system ⊗ environment (environment index
/// least significant), the environment starts in `|0⟩` and is traced out,
/// leaving `env_dim` Kraus operators `K_e[s', s] = U[(s', e), (s, 0)]`.
pub fn random_channel(n: usize, env_dim: usize, seed: Seed) -> Result<KrausMap> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("channel dimension must be >= 2, got {n}")));
    }
    if env_dim == 0 || env_dim > n * n {
        return Err(Error::InvalidParameter(format!("environment dimension {env_dim} outside [1, {}]", n * n)));
    }
    let u = haar_random_unitary(n * env_dim, seed);
    let kraus = (0..env_dim)
        .map(|e| {
            let mut k = ComplexMatrix::zeros(n, n);
            for out in 0..n {
                for inp in 0..n {
                    k[(out, inp)] = u[(out * env_dim + e, inp * env_dim)];
                }
            }
            k
        })
        .collect();
    KrausMap::new(kraus, format!("random(n={n},env={env_dim},seed={})", seed.0))
}

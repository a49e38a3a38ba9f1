use rand::Rng as _;
use rand_distr::StandardNormal;

use super::matrix::{ComplexMatrix, C64};
use super::state::{DensityMatrix, StateVector};
use crate::rng::{Rng, Seed};

fn gaussian(rng: &mut Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the diagonal of
/// `R` made real positive (Gram-Schmidt yields exactly that normalization).
pub fn haar_random_unitary(n: usize, seed: Seed) -> ComplexMatrix {
    haar_random_unitary_with(n, &mut seed.rng())
}

pub fn haar_random_unitary_with(n: usize, rng: &mut Rng) -> ComplexMatrix {
    assert!(n >= 1, "unitary dimension must be positive");
    // columns of the Ginibre matrix
    let mut cols: Vec<Vec<C64>> = (0..n).map(|_| (0..n).map(|_| gaussian(rng)).collect()).collect();
    for k in 0..n {
        // two passes of modified Gram-Schmidt keep orthogonality near machine precision
        for _ in 0..2 {
            for j in 0..k {
                let (done, rest) = cols.split_at_mut(k);
                let q = &done[j];
                let proj: C64 = q.iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
                for (x, qi) in rest[0].iter_mut().zip(q) {
                    *x -= proj * qi;
                }
            }
        }
        let norm = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[k].iter_mut() {
            *x /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            u[(i, j)] = *v;
        }
    }
    u
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn random_pure_state_with(n: usize, rng: &mut Rng) -> StateVector {
    loop {
        let v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
        if let Ok(s) = StateVector::normalized(v) {
            return s;
        }
    }
}

pub fn random_pure_state(n: usize, seed: Seed) -> StateVector {
    random_pure_state_with(n, &mut seed.rng())
}

/// Random full-rank mixed state `G G† / Tr(G G†)` from a Ginibre matrix `G`.
pub fn random_density_matrix(n: usize, seed: Seed) -> DensityMatrix {
    let mut rng = seed.rng();
    let g = ComplexMatrix::from_vec(n, n, (0..n * n).map(|_| gaussian(&mut rng)).collect())
        .expect("shape is consistent");
    let ggd = &g * &g.adjoint();
    let tr = ggd.trace().re;
    let mut m = ggd.scale_real(1.0 / tr);
    // enforce exact Hermiticity against rounding
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = v;
            m[(j, i)] = v.conj();
        }
    }
    DensityMatrix::from_trusted(m)
}

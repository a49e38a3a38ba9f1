use super::eigen::hermitian_eigenvalues;
use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-10;

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty state vector".into()));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm {norm} differs from 1")));
        }
        Ok(StateVector { amplitudes })
    }

    /// Normalizes `amplitudes`; fails only for the zero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(StateVector { amplitudes: amplitudes.into_iter().map(|z| z / norm).collect() })
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut a = vec![ZERO; dim];
        a[index] = C64::new(1.0, 0.0);
        StateVector { amplitudes: a }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix(ComplexMatrix::outer(&self.amplitudes, &self.amplitudes))
    }

    /// `⟨self| m |self⟩`
    pub fn expectation(&self, m: &ComplexMatrix) -> Result<C64> {
        let mv = m.mul_vec(&self.amplitudes)?;
        Ok(self.amplitudes.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum())
    }
}

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        m.require_square()?;
        let deviation = m.hermiticity_error();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&m)?[0];
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(DensityMatrix(m))
    }

    /// Wraps a matrix produced by a structure-preserving operation on valid
    /// inputs (CPTP maps, partial traces, convex mixtures).
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        debug_assert!(m.is_square());
        DensityMatrix(m)
    }

    pub fn maximally_mixed(n: usize) -> Self {
        DensityMatrix(ComplexMatrix::identity(n).scale_real(1.0 / n as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// `⟨ψ|ρ|ψ⟩`, real part.
    pub fn fidelity_with_pure(&self, psi: &StateVector) -> Result<f64> {
        Ok(psi.expectation(&self.0)?.re)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix(super::matrix::tensor(&self.0, &other.0))
    }
}

fn check_dims(total: usize, dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidParameter("subsystem dimensions must be positive".into()));
    }
    let product: usize = dims.iter().product();
    if product != total {
        return Err(Error::Dimension { expected: total, found: product });
    }
    Ok(())
}

/// Splits a flat index into per-subsystem digits (most significant first).
fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = index % d;
        index /= d;
    }
}

/// Reduced operator on the subsystems listed in `keep` (kept in their original order).
///
/// Works on any square operator; [`partial_trace`] is the density-matrix wrapper.
pub fn partial_trace_matrix(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let n = m.require_square()?;
    check_dims(n, dims)?;
    if keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::InvalidParameter(format!("keep index out of range for {} subsystems", dims.len())));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let mut out = ComplexMatrix::zeros(out_dim, out_dim);

    let mut di = vec![0usize; dims.len()];
    let mut dj = vec![0usize; dims.len()];
    for i in 0..n {
        digits(i, dims, &mut di);
        for j in 0..n {
            digits(j, dims, &mut dj);
            let traced_match =
                (0..dims.len()).filter(|s| !keep.contains(s)).all(|s| di[s] == dj[s]);
            if !traced_match {
                continue;
            }
            let (mut r, mut c) = (0usize, 0usize);
            for &s in &keep {
                r = r * dims[s] + di[s];
                c = c * dims[s] + dj[s];
            }
            out[(r, c)] += m[(i, j)];
        }
    }
    Ok(out)
}

pub fn partial_trace(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_trusted(partial_trace_matrix(rho.matrix(), dims, keep)?))
}

/// Transpose on factor `which` (0 or 1) of a bipartite operator with dimensions `dims`.
pub fn partial_transpose(m: &ComplexMatrix, dims: [usize; 2], which: usize) -> Result<ComplexMatrix> {
    let n = m.require_square()?;
    check_dims(n, &dims)?;
    if which > 1 {
        return Err(Error::InvalidParameter(format!("subsystem index {which} out of range")));
    }
    let [da, db] = dims;
    let mut out = ComplexMatrix::zeros(n, n);
    for ia in 0..da {
        for ib in 0..db {
            for ja in 0..da {
                for jb in 0..db {
                    let v = m[(ia * db + ib, ja * db + jb)];
                    let (r, c) = if which == 0 {
                        (ja * db + ib, ia * db + jb)
                    } else {
                        (ia * db + jb, ja * db + ib)
                    };
                    out[(r, c)] = v;
                }
            }
        }
    }
    Ok(out)
}

/// `|φ⟩ = Σ_i |ii⟩ / √n`
pub fn max_entangled_state(n: usize) -> Result<StateVector> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("maximally entangled state needs n >= 2, got {n}")));
    }
    let mut a = vec![ZERO; n * n];
    let amp = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    for i in 0..n {
        a[i * n + i] = amp;
    }
    Ok(StateVector { amplitudes: a })
}

/// `(U† ⊗ I)|φ⟩` for an n×n unitary `u`.
pub fn me_vector(u: &ComplexMatrix, n: usize) -> Result<StateVector> {
    if u.rows() != n || u.cols() != n {
        return Err(Error::Dimension { expected: n, found: u.rows() });
    }
    u.require_unitary(1e-10)?;
    // Component (i, j) of (U†⊗I)|φ⟩ is conj(U_{j i}) / √n.
    let amp = 1.0 / (n as f64).sqrt();
    let mut a = vec![ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = u[(j, i)].conj() * amp;
        }
    }
    Ok(StateVector { amplitudes: a })
}

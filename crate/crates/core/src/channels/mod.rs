//! Completely positive trace-preserving maps in Kraus form, named noise
//! models, random channels, Choi states and the two channel-strength gauges.

mod gauges;
mod named;
mod random;
mod spec;

pub use gauges::{entanglement_fidelity, gamma_strength, lambda_strength, negativity, ChannelStrength};
pub use named::{named_channel, ChannelKind, NamedChannel};
pub use random::random_channel;
pub use spec::{decode_matrix, encode_matrix, ChannelSpec, MatrixJson, ParamValue};

use crate::error::{Error, Result};
use crate::qcore::{hermitian_eigen, max_entangled_state, tensor, ComplexMatrix, DensityMatrix, C64, STRUCTURAL_TOL};

/// Kraus operators whose Frobenius norm falls below this are dropped.
const NEGLIGIBLE_KRAUS: f64 = 1e-14;

/// A CPTP map `ρ ↦ Σ_k K_k ρ K_k†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix>,
    label: String,
}

impl KrausMap {
    /// Validates shapes and completeness `Σ K†K = I` (within 1e-10). Zero
    /// operators are dropped, and the list is reduced to a minimal Kraus set
    /// when it is longer than `dim_in · dim_out`.
    pub fn new(kraus: Vec<ComplexMatrix>, label: impl Into<String>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::InvalidParameter("empty Kraus list".into()))?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        for k in &kraus {
            if k.rows() != dim_out {
                return Err(Error::Dimension { expected: dim_out, found: k.rows() });
            }
            if k.cols() != dim_in {
                return Err(Error::Dimension { expected: dim_in, found: k.cols() });
            }
        }
        let deviation = completeness_error(&kraus, dim_in);
        if deviation > STRUCTURAL_TOL {
            return Err(Error::NotTracePreserving { deviation });
        }
        let mut kraus: Vec<ComplexMatrix> =
            kraus.into_iter().filter(|k| k.frobenius_norm() > NEGLIGIBLE_KRAUS).collect();
        if kraus.is_empty() {
            return Err(Error::InvalidParameter("all Kraus operators vanish".into()));
        }
        if kraus.len() > dim_in * dim_out {
            kraus = minimal_kraus(&kraus, dim_in, dim_out)?;
        }
        Ok(KrausMap { dim_in, dim_out, kraus, label: label.into() })
    }

    pub fn identity(n: usize) -> Self {
        KrausMap { dim_in: n, dim_out: n, kraus: vec![ComplexMatrix::identity(n)], label: "identity".into() }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Square dimension, or an error for maps between different spaces.
    pub fn square_dim(&self) -> Result<usize> {
        if self.dim_in == self.dim_out {
            Ok(self.dim_in)
        } else {
            Err(Error::NotSquare { rows: self.dim_out, cols: self.dim_in })
        }
    }

    pub fn completeness_error(&self) -> f64 {
        completeness_error(&self.kraus, self.dim_in)
    }

    /// Kraus-wise transpose in the computational basis, `{K_k^T}`.
    /// For square maps this is again trace preserving only when the map is unital,
    /// so it is returned as a bare operator list.
    pub fn transposed_kraus(&self) -> Vec<ComplexMatrix> {
        self.kraus.iter().map(ComplexMatrix::transpose).collect()
    }

    pub fn apply_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != self.dim_in || m.cols() != self.dim_in {
            return Err(Error::Dimension { expected: self.dim_in, found: m.rows() });
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = &out + &(&(k * m) * &k.adjoint());
        }
        Ok(out)
    }
}

fn completeness_error(kraus: &[ComplexMatrix], dim_in: usize) -> f64 {
    let mut sum = ComplexMatrix::zeros(dim_in, dim_in);
    for k in kraus {
        sum = &sum + &(&k.adjoint() * k);
    }
    sum.max_abs_diff(&ComplexMatrix::identity(dim_in))
}

/// Minimal Kraus set from the eigen-decomposition of the (unnormalized) Choi matrix.
fn minimal_kraus(kraus: &[ComplexMatrix], dim_in: usize, dim_out: usize) -> Result<Vec<ComplexMatrix>> {
    let d = dim_in * dim_out;
    // C[(i,a),(j,b)] = Σ_k K_{a i} conj(K_{b j})
    let mut choi = ComplexMatrix::zeros(d, d);
    for k in kraus {
        for i in 0..dim_in {
            for a in 0..dim_out {
                let x = k[(a, i)];
                for j in 0..dim_in {
                    for b in 0..dim_out {
                        choi[(i * dim_out + a, j * dim_out + b)] += x * k[(b, j)].conj();
                    }
                }
            }
        }
    }
    let eig = hermitian_eigen(&choi)?;
    let mut out = Vec::new();
    for (idx, &val) in eig.values.iter().enumerate().rev() {
        if val <= 1e-13 {
            continue;
        }
        let s = val.sqrt();
        let mut k = ComplexMatrix::zeros(dim_out, dim_in);
        for i in 0..dim_in {
            for a in 0..dim_out {
                k[(a, i)] = eig.vectors[(i * dim_out + a, idx)] * s;
            }
        }
        out.push(k);
    }
    Ok(out)
}

/// `Σ_k K_k ρ K_k†`
pub fn apply(map: &KrausMap, rho: &DensityMatrix) -> Result<DensityMatrix> {
    Ok(DensityMatrix::from_trusted(map.apply_matrix(rho.matrix())?))
}

/// `(I ⊗ map)[|φ⟩⟨φ|]`, the state-side image of the map.
pub fn choi_state(map: &KrausMap) -> Result<DensityMatrix> {
    let n = map.square_dim()?;
    let phi = max_entangled_state(n)?.projector();
    let id = ComplexMatrix::identity(n);
    let mut out = ComplexMatrix::zeros(n * n, n * n);
    for k in map.kraus() {
        let op = tensor(&id, k);
        out = &out + &(&(&op * phi.matrix()) * &op.adjoint());
    }
    Ok(DensityMatrix::from_trusted(out))
}

/// `f ∘ g` (apply `g` first), Kraus operators `{F_i G_j}`.
pub fn compose(f: &KrausMap, g: &KrausMap) -> Result<KrausMap> {
    if g.dim_out != f.dim_in {
        return Err(Error::Dimension { expected: f.dim_in, found: g.dim_out });
    }
    let mut kraus = Vec::with_capacity(f.kraus.len() * g.kraus.len());
    for fk in &f.kraus {
        for gk in &g.kraus {
            kraus.push(fk * gk);
        }
    }
    KrausMap::new(kraus, format!("{}∘{}", f.label, g.label))
}

/// `Σ_k |Tr(K_k)|²`, the quantity behind the entanglement fidelity.
pub(crate) fn trace_weight(map: &KrausMap) -> f64 {
    map.kraus.iter().map(|k| k.trace().norm_sqr()).sum()
}

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

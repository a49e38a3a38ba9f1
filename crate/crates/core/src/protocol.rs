//! Closed-form fidelities for the restricted teleportation class: Alice
//! measures in a maximally entangled basis `{(U_α† ⊗ I)|φ⟩}` and Bob applies a
//! unitary `T_α` for outcome `α`.
//!
//! For such a protocol the singlet-fraction objective is
//!
//! ```text
//! F = 1/n² Σ_{α,k,l} |⟨φ| Λ_k^T ⊗ T_α Γ_l U_α |φ⟩|²
//! ```
//!
//! with `Λ_k` the source-noise Kraus operators and `Γ_l` those of the noise on
//! Bob's half of the resource. The average fidelity over pure inputs is
//! `(n F + 1)/(n + 1)`.

use serde::{Deserialize, Serialize};

use crate::channels::{apply, decode_matrix, encode_matrix, KrausMap, MatrixJson};
use crate::error::{Error, Result};
use crate::optimizer::{optimize_single_unitary, OptimizerSettings};
use crate::qcore::{
    max_entangled_state, me_vector, paulis, tensor, ComplexMatrix, DensityMatrix, StateVector, STRUCTURAL_TOL,
};

/// Average fidelity reachable without entanglement (measure and resend), qubits.
pub const CLASSICAL_THRESHOLD: f64 = 2.0 / 3.0;

const ORTHOGONALITY_TOL: f64 = 1e-8;

/// `n²` unitaries with `Tr(U_α† U_β) = n δ_αβ`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryBasis {
    n: usize,
    elements: Vec<ComplexMatrix>,
}

impl UnitaryBasis {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let n = elements.first().ok_or_else(|| Error::InvalidBasis("empty basis".into()))?.rows();
        if elements.len() != n * n {
            return Err(Error::InvalidBasis(format!("expected {} elements, got {}", n * n, elements.len())));
        }
        for (a, u) in elements.iter().enumerate() {
            if u.rows() != n || u.cols() != n {
                return Err(Error::Dimension { expected: n, found: u.rows().max(u.cols()) });
            }
            u.require_unitary(STRUCTURAL_TOL).map_err(|e| Error::InvalidBasis(format!("element {a}: {e}")))?;
        }
        for a in 0..elements.len() {
            for b in a + 1..elements.len() {
                let overlap = elements[a].adjoint().trace_product(&elements[b]).norm();
                if overlap > ORTHOGONALITY_TOL {
                    return Err(Error::InvalidBasis(format!(
                        "elements {a} and {b} are not orthogonal (|Tr(U†V)| = {overlap:.3e})"
                    )));
                }
            }
        }
        Ok(UnitaryBasis { n, elements })
    }

    /// `{I, σ_x, σ_y, σ_z}`
    pub fn pauli() -> Self {
        UnitaryBasis { n: 2, elements: paulis().to_vec() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// The measurement vectors `(U_α† ⊗ I)|φ⟩`.
    pub fn measurement_vectors(&self) -> Result<Vec<StateVector>> {
        self.elements.iter().map(|u| me_vector(u, self.n)).collect()
    }
}

/// Bob's per-outcome unitaries, index-aligned with a [`UnitaryBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionSet(Vec<ComplexMatrix>);

impl CorrectionSet {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        for (a, t) in elements.iter().enumerate() {
            t.require_square()?;
            t.require_unitary(STRUCTURAL_TOL).map_err(|e| Error::InvalidParameter(format!("correction {a}: {e}")))?;
        }
        Ok(CorrectionSet(elements))
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolSpec {
    basis: UnitaryBasis,
    corrections: CorrectionSet,
}

impl ProtocolSpec {
    pub fn new(basis: UnitaryBasis, corrections: CorrectionSet) -> Result<Self> {
        if corrections.len() != basis.elements.len() {
            return Err(Error::Dimension { expected: basis.elements.len(), found: corrections.len() });
        }
        if let Some(t) = corrections.0.iter().find(|t| t.rows() != basis.n) {
            return Err(Error::Dimension { expected: basis.n, found: t.rows() });
        }
        Ok(ProtocolSpec { basis, corrections })
    }

    pub fn basis(&self) -> &UnitaryBasis {
        &self.basis
    }

    pub fn corrections(&self) -> &CorrectionSet {
        &self.corrections
    }

    pub fn n(&self) -> usize {
        self.basis.n
    }

    /// `(U_α, T_α)` pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (&ComplexMatrix, &ComplexMatrix)> {
        self.basis.elements.iter().zip(&self.corrections.0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ProtocolJson::from(self)).expect("protocol specs always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ProtocolJson = serde_json::from_str(text)?;
        raw.build()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProtocolJson {
    n: usize,
    basis: Vec<MatrixJson>,
    corrections: Vec<MatrixJson>,
}

impl From<&ProtocolSpec> for ProtocolJson {
    fn from(p: &ProtocolSpec) -> Self {
        ProtocolJson {
            n: p.n(),
            basis: p.basis.elements.iter().map(encode_matrix).collect(),
            corrections: p.corrections.0.iter().map(encode_matrix).collect(),
        }
    }
}

impl ProtocolJson {
    fn build(&self) -> Result<ProtocolSpec> {
        let decode = |ms: &[MatrixJson]| ms.iter().map(|m| decode_matrix(self.n, m)).collect::<Result<Vec<_>>>();
        ProtocolSpec::new(UnitaryBasis::new(decode(&self.basis)?)?, CorrectionSet::new(decode(&self.corrections)?)?)
    }
}

fn check_noise(map: &KrausMap, n: usize) -> Result<()> {
    let d = map.square_dim()?;
    if d != n {
        return Err(Error::Dimension { expected: n, found: d });
    }
    Ok(())
}

/// Singlet-fraction objective of a fixed protocol (no maximization).
///
/// Uses `⟨φ|A ⊗ B|φ⟩ = Tr(Aᵀ B)/n`, so each term is `|Tr(Λ_k T_α Γ_l U_α)|² / n²`.
pub fn febf_objective(p: &ProtocolSpec, source_noise: &KrausMap, channel_noise: &KrausMap) -> Result<f64> {
    let n = p.n();
    check_noise(source_noise, n)?;
    check_noise(channel_noise, n)?;
    let nf = n as f64;
    let mut total = 0.0;
    for (u, t) in p.pairs() {
        for g in channel_noise.kraus() {
            let m = &(t * g) * u;
            for l in source_noise.kraus() {
                total += l.trace_product(&m).norm_sqr();
            }
        }
    }
    Ok(total / (nf * nf * nf * nf))
}

/// `f̄ = n F/(n+1) + 1/(n+1)`.
pub fn avg_fidelity_from_f(f: f64, n: usize) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&f) || n == 0 {
        return Err(Error::InvalidParameter(format!("singlet fraction {f} outside [0, 1]")));
    }
    let nf = n as f64;
    Ok((nf * f + 1.0) / (nf + 1.0))
}

/// Inverse of [`avg_fidelity_from_f`].
pub fn f_from_avg_fidelity(avg: f64, n: usize) -> f64 {
    let nf = n as f64;
    (avg * (nf + 1.0) - 1.0) / nf
}

/// Standard protocol: Pauli basis with `T_α = U_α†`.
pub fn stp_spec(n: usize) -> Result<ProtocolSpec> {
    if n != 2 {
        return Err(Error::InvalidParameter(format!("the standard protocol is implemented for qubits only, got n={n}")));
    }
    let basis = UnitaryBasis::pauli();
    let corrections = CorrectionSet(basis.elements.iter().map(ComplexMatrix::adjoint).collect());
    ProtocolSpec::new(basis, corrections)
}

fn check_two_qudit(rho: &DensityMatrix, n: usize) -> Result<()> {
    if rho.dim() != n * n {
        return Err(Error::Dimension { expected: n * n, found: rho.dim() });
    }
    Ok(())
}

/// `Ω_STP[ρ] = 1/n² Σ_α (U_αᵀ ⊗ U_α†) ρ (U_αᵀ ⊗ U_α†)†` over the Pauli basis.
pub fn stp_twirl(rho: &DensityMatrix, n: usize) -> Result<DensityMatrix> {
    if n != 2 {
        return Err(Error::InvalidParameter(format!("twirl implemented for qubits only, got n={n}")));
    }
    check_two_qudit(rho, n)?;
    let mut out = ComplexMatrix::zeros(4, 4);
    for u in paulis() {
        let k = tensor(&u.transpose(), &u.adjoint());
        out = &out + &rho.matrix().conjugate_by(&k)?;
    }
    Ok(DensityMatrix::from_trusted(out.scale_real(0.25)))
}

/// `⟨φ|ρ|φ⟩`
pub fn singlet_fraction(rho: &DensityMatrix, n: usize) -> Result<f64> {
    check_two_qudit(rho, n)?;
    Ok(max_entangled_state(n)?.expectation(rho.matrix())?.re)
}

/// `|⟨φ|Ω_STP∘(I⊗Λ)[ρ]|φ⟩ − ⟨φ|(I⊗Λ)∘Ω_STP[ρ]|φ⟩|`: how far the source noise
/// fails to commute with the standard protocol on a given two-qubit state.
pub fn noncommutation_witness(source_noise: &KrausMap, rho: &DensityMatrix) -> Result<f64> {
    check_noise(source_noise, 2)?;
    check_two_qudit(rho, 2)?;
    let local = local_on_second(source_noise)?;
    let noise_then_twirl = stp_twirl(&apply(&local, rho)?, 2)?;
    let twirl_then_noise = apply(&local, &stp_twirl(rho, 2)?)?;
    Ok((singlet_fraction(&noise_then_twirl, 2)? - singlet_fraction(&twirl_then_noise, 2)?).abs())
}

/// `I ⊗ m` as a map on the two-qudit space.
fn local_on_second(m: &KrausMap) -> Result<KrausMap> {
    let n = m.square_dim()?;
    let id = ComplexMatrix::identity(n);
    KrausMap::new(m.kraus().iter().map(|k| tensor(&id, k)).collect(), format!("I⊗{}", m.label()))
}

/// Per-outcome objective of the source-agnostic protocol:
/// `Σ_l |⟨φ| I ⊗ T Γ_l U |φ⟩|² = Σ_l |Tr(T Γ_l U)|² / n²`.
pub fn afy_term(t: &ComplexMatrix, u: &ComplexMatrix, channel_noise: &KrausMap) -> f64 {
    let n2 = (u.rows() * u.rows()) as f64;
    channel_noise.kraus().iter().map(|g| (&(t * g) * u).trace().norm_sqr()).sum::<f64>() / n2
}

/// Keeps Alice's basis and chooses each correction as if the source were
/// noiseless. The result is meant to be evaluated under the true source noise
/// with [`febf_objective`].
pub fn afy_spec(basis: &UnitaryBasis, channel_noise: &KrausMap, opt: &OptimizerSettings) -> Result<ProtocolSpec> {
    if basis.n != 2 {
        return Err(Error::InvalidParameter("correction search is implemented for qubits only".into()));
    }
    check_noise(channel_noise, basis.n)?;
    let mut corrections = Vec::with_capacity(basis.elements.len());
    for (a, u) in basis.elements.iter().enumerate() {
        let settings = opt.for_stream(a as u64);
        let found = optimize_single_unitary(|t| afy_term(t, u, channel_noise), &settings)?;
        // T = U† is always available; never return something worse.
        let fallback = u.adjoint();
        let fallback_value = afy_term(&fallback, u, channel_noise);
        corrections.push(if found.value + 1e-13 >= fallback_value { found.unitary } else { fallback });
    }
    ProtocolSpec::new(basis.clone(), CorrectionSet::new(corrections)?)
}

/// `100 (f_real − f_afy) / f_real`
pub fn evaluate_relative_gain(f_real: f64, f_afy: f64) -> Result<f64> {
    if f_real <= 0.0 || !f_real.is_finite() {
        return Err(Error::InvalidParameter(format!("relative gain needs a positive reference, got {f_real}")));
    }
    Ok(100.0 * (f_real - f_afy) / f_real)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{choi_state, compose, named_channel, random_channel, ChannelKind};
    use crate::qcore::{haar_random_unitary, random_density_matrix, sigma_x, C64};
    use crate::rng::Seed;
    use proptest::prelude::*;

    fn named(kind: ChannelKind, p: f64) -> KrausMap {
        named_channel(kind, &[p]).unwrap()
    }

    /// Literal evaluation through the tensor-product form, independent of the trace shortcut.
    fn febf_literal(p: &ProtocolSpec, src: &KrausMap, ch: &KrausMap) -> f64 {
        let phi = max_entangled_state(2).unwrap();
        let mut total = 0.0;
        for (u, t) in p.pairs() {
            for l in src.kraus() {
                for g in ch.kraus() {
                    let op = tensor(&l.transpose(), &(&(t * g) * u));
                    total += phi.expectation(&op).unwrap().norm_sqr();
                }
            }
        }
        total / 4.0
    }

    fn random_spec(seed: Seed) -> ProtocolSpec {
        let w = haar_random_unitary(2, seed.split(0));
        let v = haar_random_unitary(2, seed.split(1));
        let basis =
            UnitaryBasis::new(paulis().iter().map(|s| &(&w * s) * &v).collect()).unwrap();
        let corr = CorrectionSet::new((0..4).map(|a| haar_random_unitary(2, seed.split(10 + a))).collect()).unwrap();
        ProtocolSpec::new(basis, corr).unwrap()
    }

    #[test]
    fn stp_noiseless_is_perfect() {
        let id = KrausMap::identity(2);
        let f = febf_objective(&stp_spec(2).unwrap(), &id, &id).unwrap();
        assert!((f - 1.0).abs() < 1e-15);
    }

    #[test]
    fn stp_full_depolarizing_resource() {
        let full = named(ChannelKind::Depolarizing, 1.0);
        let f = febf_objective(&stp_spec(2).unwrap(), &KrausMap::identity(2), &full).unwrap();
        assert!((f - 0.25).abs() < 1e-15);
    }

    #[test]
    fn trace_form_matches_tensor_form() {
        for s in 0..30 {
            let p = random_spec(Seed(s));
            let src = random_channel(2, 1 + (s % 4) as usize, Seed(100 + s)).unwrap();
            let ch = random_channel(2, 1 + ((s + 1) % 4) as usize, Seed(200 + s)).unwrap();
            let a = febf_objective(&p, &src, &ch).unwrap();
            assert!((a - febf_literal(&p, &src, &ch)).abs() < 1e-13);
            assert!((0.0..=1.0).contains(&a));
        }
    }

    #[test]
    fn objective_dimension_errors() {
        let p = stp_spec(2).unwrap();
        let three = KrausMap::identity(3);
        assert!(febf_objective(&p, &three, &KrausMap::identity(2)).is_err());
        assert!(febf_objective(&p, &KrausMap::identity(2), &three).is_err());
    }

    #[test]
    fn fidelity_conversion() {
        assert!((avg_fidelity_from_f(1.0, 2).unwrap() - 1.0).abs() < 1e-16);
        assert_eq!(avg_fidelity_from_f(0.5, 2).unwrap(), 2.0 / 3.0);
        assert!((avg_fidelity_from_f(0.25, 2).unwrap() - 0.5).abs() < 1e-16);
        assert!(avg_fidelity_from_f(1.2, 2).is_err());
        assert!(avg_fidelity_from_f(-0.1, 2).is_err());
        assert!((f_from_avg_fidelity(2.0 / 3.0, 2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn stp_basis_properties() {
        let p = stp_spec(2).unwrap();
        assert!(UnitaryBasis::new(p.basis().elements().to_vec()).is_ok());
        for (u, t) in p.pairs() {
            assert!((t * u).approx_eq(&ComplexMatrix::identity(2), 1e-15));
        }
        assert!(stp_spec(3).is_err());
    }

    #[test]
    fn invalid_bases_rejected() {
        let mut els = paulis().to_vec();
        els[3] = sigma_x();
        assert!(matches!(UnitaryBasis::new(els), Err(Error::InvalidBasis(_))));
        assert!(UnitaryBasis::new(paulis()[..3].to_vec()).is_err());
        let mut els = paulis().to_vec();
        els[0] = els[0].scale_real(2.0);
        assert!(UnitaryBasis::new(els).is_err());
        let short = CorrectionSet::new(vec![ComplexMatrix::identity(2)]).unwrap();
        assert!(ProtocolSpec::new(UnitaryBasis::pauli(), short).is_err());
    }

    #[test]
    fn measurement_vectors_orthonormal() {
        let p = random_spec(Seed(9));
        let vs = p.basis().measurement_vectors().unwrap();
        for (i, a) in vs.iter().enumerate() {
            for (j, b) in vs.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b) - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn twirl_fixed_points() {
        let phi = max_entangled_state(2).unwrap().projector();
        assert!(stp_twirl(&phi, 2).unwrap().matrix().approx_eq(phi.matrix(), 1e-15));
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!(stp_twirl(&mixed, 2).unwrap().matrix().approx_eq(mixed.matrix(), 1e-15));
        assert!(stp_twirl(&DensityMatrix::maximally_mixed(2), 2).is_err());
    }

    #[test]
    fn singlet_fraction_cases() {
        let phi = max_entangled_state(2).unwrap().projector();
        assert!((singlet_fraction(&phi, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!((singlet_fraction(&DensityMatrix::maximally_mixed(4), 2).unwrap() - 0.25).abs() < 1e-15);
        let choi = choi_state(&named(ChannelKind::BitFlip, 0.2)).unwrap();
        assert!((singlet_fraction(&choi, 2).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn witness_vanishes_for_covariant_noise() {
        for s in 0..20 {
            let rho = random_density_matrix(4, Seed(s));
            assert!(noncommutation_witness(&KrausMap::identity(2), &rho).unwrap() < 1e-15);
            let dep = named(ChannelKind::Depolarizing, 0.3);
            assert!(noncommutation_witness(&dep, &rho).unwrap() < 1e-12);
        }
    }

    /// Bell-basis bookkeeping for `I⊗AD_μ` acting on `ρ`: the witness equals
    /// `|Tr(O (ρ − Ω(ρ)))|` with `O = (I⊗AD_μ†)[|φ⟩⟨φ|]`, and only the Φ+/Φ− and
    /// Ψ+/Ψ− coherences of `ρ` contribute, each weighted by `μ/4`.
    fn witness_closed_form(mu: f64, rho: &DensityMatrix) -> f64 {
        let m = rho.matrix();
        let d_phi = (m[(0, 0)] - m[(3, 3)]).re; // 2 Re⟨Φ−|ρ|Φ+⟩
        let d_psi = (m[(1, 1)] - m[(2, 2)]).re; // 2 Re⟨Ψ+|ρ|Ψ−⟩
        (0.5 * (d_phi * mu / 2.0 + d_psi * mu / 2.0)).abs()
    }

    #[test]
    fn witness_for_amplitude_damping() {
        let ad = named(ChannelKind::AmplitudeDamping, 0.5);
        // A Choi state of a damping channel has balanced populations, and the two
        // coherence contributions cancel exactly.
        let rho = choi_state(&named(ChannelKind::AmplitudeDamping, 0.3)).unwrap();
        let w = noncommutation_witness(&ad, &rho).unwrap();
        assert!((w - witness_closed_form(0.5, &rho)).abs() < 1e-15);
        assert!(w < 1e-15, "witness {w}");
        // |00⟩⟨00| keeps the Φ+/Φ− coherence alone: witness = μ/4.
        let zero = StateVector::basis(4, 0).projector();
        let w = noncommutation_witness(&ad, &zero).unwrap();
        assert!((w - 0.125).abs() < 1e-15, "witness {w}");
        assert!((w - witness_closed_form(0.5, &zero)).abs() < 1e-15);
    }

    #[test]
    fn witness_positive_for_generic_states() {
        let ad = named(ChannelKind::AmplitudeDamping, 0.5);
        let positive = (0..20).filter(|&s| noncommutation_witness(&ad, &random_density_matrix(4, Seed(s))).unwrap() > 1e-3);
        assert!(positive.count() >= 10);
    }

    #[test]
    fn afy_with_perfect_resource() {
        let basis = random_spec(Seed(4)).basis().clone();
        let spec = afy_spec(&basis, &KrausMap::identity(2), &OptimizerSettings::quick(3)).unwrap();
        for (u, t) in spec.pairs() {
            assert!(((t * u).trace().norm() - 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn afy_bit_flip_picks_adjoint() {
        let g = named(ChannelKind::BitFlip, 0.2);
        let basis = UnitaryBasis::pauli();
        let spec = afy_spec(&basis, &g, &OptimizerSettings::quick(5)).unwrap();
        for (u, t) in spec.pairs() {
            let found = afy_term(t, u, &g);
            let adjoint = afy_term(&u.adjoint(), u, &g);
            assert!((found - adjoint).abs() < 1e-9, "{found} vs {adjoint}");
        }
    }

    #[test]
    fn afy_term_ignores_global_phase() {
        let g = random_channel(2, 3, Seed(12)).unwrap();
        let u = haar_random_unitary(2, Seed(1));
        let t = haar_random_unitary(2, Seed(2));
        let phased = t.scale(C64::from_polar(1.0, 0.83));
        assert!((afy_term(&t, &u, &g) - afy_term(&phased, &u, &g)).abs() < 1e-15);
    }

    #[test]
    fn relative_gain_arithmetic() {
        assert_eq!(evaluate_relative_gain(0.8, 0.8).unwrap(), 0.0);
        assert!((evaluate_relative_gain(0.70, 2.0 / 3.0).unwrap() - 4.761904761904762).abs() < 1e-12);
        assert!(evaluate_relative_gain(0.0, 0.5).is_err());
    }

    #[test]
    fn extra_depolarizing_never_helps() {
        for s in 0..30 {
            let p = random_spec(Seed(s));
            let src = random_channel(2, 2, Seed(300 + s)).unwrap();
            let ch = random_channel(2, 2, Seed(400 + s)).unwrap();
            let f0 = avg_fidelity_from_f(febf_objective(&p, &src, &ch).unwrap(), 2).unwrap();
            if f0 <= 0.5 {
                continue;
            }
            for q in [0.1, 0.5, 1.0] {
                let noisier = compose(&named(ChannelKind::Depolarizing, q), &ch).unwrap();
                let f1 = avg_fidelity_from_f(febf_objective(&p, &src, &noisier).unwrap(), 2).unwrap();
                assert!(f1 <= f0 + 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn objective_symmetries(seed in any::<u64>(), perm in Just([2usize, 0, 3, 1]), phase in 0.0..std::f64::consts::TAU) {
            let p = random_spec(Seed(seed));
            let src = random_channel(2, 2, Seed(seed).split(50)).unwrap();
            let ch = random_channel(2, 3, Seed(seed).split(51)).unwrap();
            let base = febf_objective(&p, &src, &ch).unwrap();

            let us: Vec<_> = perm.iter().map(|&i| p.basis().elements()[i].clone()).collect();
            let ts: Vec<_> = perm.iter().map(|&i| p.corrections().elements()[i].clone()).collect();
            let permuted = ProtocolSpec::new(UnitaryBasis::new(us).unwrap(), CorrectionSet::new(ts).unwrap()).unwrap();
            prop_assert!((febf_objective(&permuted, &src, &ch).unwrap() - base).abs() < 1e-12);

            let z = C64::from_polar(1.0, phase);
            let mut us = p.basis().elements().to_vec();
            us[1] = us[1].scale(z);
            let mut ts = p.corrections().elements().to_vec();
            ts[2] = ts[2].scale(z.conj());
            let phased = ProtocolSpec::new(UnitaryBasis::new(us).unwrap(), CorrectionSet::new(ts).unwrap()).unwrap();
            prop_assert!((febf_objective(&phased, &src, &ch).unwrap() - base).abs() < 1e-12);
        }

        #[test]
        fn twirl_preserves_singlet_fraction(seed in any::<u64>()) {
            let rho = random_density_matrix(4, Seed(seed));
            let tw = stp_twirl(&rho, 2).unwrap();
            prop_assert!((singlet_fraction(&tw, 2).unwrap() - singlet_fraction(&rho, 2).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn protocol_json_round_trip() {
        let p = random_spec(Seed(77));
        let text = p.to_json();
        let back = ProtocolSpec::from_json(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_json(), text);
        assert!(ProtocolSpec::from_json(r#"{"n":2,"basis":[],"corrections":[]}"#).is_err());
    }
}

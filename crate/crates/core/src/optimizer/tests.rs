use proptest::prelude::*;
use rand::Rng as _;
use rand_distr::StandardNormal;

use super::*;
use crate::channels::{named_channel, random_channel, ChannelKind};
use crate::protocol::{afy_term, stp_spec};
use crate::qcore::{haar_random_unitary, haar_random_unitary_with, me_vector, sigma_x, sigma_y};

/// `|Tr(A† B)| / 2`, equal to 1 exactly when `A` and `B` agree up to a phase.
fn phase_overlap(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.adjoint().trace_product(b).norm() / 2.0
}

#[test]
fn su2_identity_and_sigma_y() {
    assert!(su2_from_params(0.0, 0.0, 0.0).approx_eq(&ComplexMatrix::identity(2), 1e-15));
    let u = su2_from_params(0.0, std::f64::consts::PI, 0.0);
    assert!((phase_overlap(&sigma_y(), &u) - 1.0).abs() < 1e-12);
}

#[test]
fn su2_is_special_unitary() {
    let mut rng = Seed(11).rng();
    for _ in 0..1000 {
        let p: [f64; 3] = std::array::from_fn(|_| rng.random_range(-10.0..10.0));
        let u = su2_from_params(p[0], p[1], p[2]);
        assert!(u.unitarity_error() < 1e-12);
        let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
        assert!((det - C64::new(1.0, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn euler_angles_round_trip() {
    let mut cases: Vec<ComplexMatrix> = (0..300).map(|s| haar_random_unitary(2, Seed(s))).collect();
    for m in paulis() {
        cases.push(m.clone());
        cases.push(m.scale(C64::from_polar(1.0, 0.7)));
    }
    cases.push(ComplexMatrix::diag(&[C64::from_polar(1.0, 1.2), C64::from_polar(1.0, -2.9)]));
    for u in &cases {
        let p = params_from_su2(u).unwrap();
        assert!(p.iter().all(|x| (-std::f64::consts::PI..std::f64::consts::PI).contains(x)));
        let back = su2_from_params(p[0], p[1], p[2]);
        assert!((phase_overlap(u, &back) - 1.0).abs() < 1e-12, "{u:?} -> {p:?}");
    }
}

#[test]
fn identity_params_give_pauli_basis() {
    let b = basis_from_params([0.0; 3], [0.0; 3]);
    for (x, y) in b.elements().iter().zip(paulis().iter()) {
        assert!(x.approx_eq(y, 1e-15));
    }
}

#[test]
fn measurement_vectors_orthonormal_for_any_basis() {
    let mut rng = Seed(5).rng();
    for _ in 0..50 {
        let w: [f64; 3] = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
        let b = basis_from_params(w, v);
        let vecs: Vec<_> = b.elements().iter().map(|u| me_vector(u, 2).unwrap()).collect();
        for (i, a) in vecs.iter().enumerate() {
            for (j, c) in vecs.iter().enumerate() {
                let g = a.inner(c);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - C64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn param_vector_wraps_and_rejects_nan() {
    let mut vals = [0.0; 18];
    vals[0] = 7.0;
    let p = ParamVector::new(vals).unwrap();
    assert!((p.w()[0] - (7.0 - 2.0 * std::f64::consts::PI)).abs() < 1e-12);
    vals[3] = f64::NAN;
    assert!(ParamVector::new(vals).is_err());
}

#[test]
fn settings_validation() {
    assert!(OptimizerSettings::default().validate().is_ok());
    let bad = OptimizerSettings { population: 2, ..Default::default() };
    assert!(bad.validate().is_err());
    let bad = OptimizerSettings { tolerance: 0.0, ..Default::default() };
    assert!(bad.validate().is_err());
    let bad = OptimizerSettings { restarts: 0, ..Default::default() };
    assert!(optimize_single_unitary(|t| t.trace().norm_sqr(), &bad).is_err());
}

#[test]
fn single_unitary_trace_objectives() {
    let s = OptimizerSettings::quick(1);
    let r = optimize_single_unitary(|t| t.trace().norm_sqr() / 4.0, &s).unwrap();
    assert!((r.value - 1.0).abs() < 1e-9);
    assert!((phase_overlap(&r.unitary, &ComplexMatrix::identity(2)) - 1.0).abs() < 1e-6);
    let x = sigma_x();
    let r = optimize_single_unitary(|t| (t * &x).trace().norm_sqr() / 4.0, &s).unwrap();
    assert!((r.value - 1.0).abs() < 1e-9);
    assert!((phase_overlap(&r.unitary, &x) - 1.0).abs() < 1e-6);
}

/// Uniform point on SU(2) from a normalized Gaussian quaternion.
fn random_su2(rng: &mut crate::rng::Rng) -> [f64; 4] {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    q.map(|x| x / n)
}

#[test]
fn single_unitary_matches_random_search() {
    // objective Σ_k |Tr(A_k T)|² with random A_k
    let mut rng = Seed(77).rng();
    let a: Vec<ComplexMatrix> = (0..3).map(|_| haar_random_unitary_with(2, &mut rng).scale_real(0.5)).collect();
    let f = |t: &ComplexMatrix| a.iter().map(|ak| ak.trace_product(t).norm_sqr()).sum::<f64>() / 3.0;
    let best = optimize_single_unitary(f, &OptimizerSettings::quick(9)).unwrap();

    // dense random search
    let frame = quaternion_frame();
    let eval_q = |q: &[f64; 4]| {
        let t = from_quaternion(q);
        f(&t)
    };
    let mut search = f64::NEG_INFINITY;
    let mut srng = Seed(78).rng();
    for _ in 0..1_000_000 {
        search = search.max(eval_q(&random_su2(&mut srng)));
    }
    assert!(best.value >= search - 1e-12);
    assert!(best.value - search < 1e-4, "optimizer {} search {}", best.value, search);

    // closed form: largest eigenvalue of the quaternion quadratic form
    let mut m = [[0.0; 4]; 4];
    for ak in &a {
        let ak = to_m2(ak);
        let c: Vec<C64> = frame
            .iter()
            .map(|q| {
                let p = mul2(&ak, q);
                p[0][0] + p[1][1]
            })
            .collect();
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] += (c[i].conj() * c[j]).re / 3.0;
            }
        }
    }
    let (lam, _) = sym4_top_eigen(&m);
    assert!((best.value - lam).abs() < 1e-9);
}

#[test]
fn profile_matrix_matches_direct_traces() {
    let src = random_channel(2, 3, Seed(1)).unwrap();
    let chan = random_channel(2, 2, Seed(2)).unwrap();
    let profile = CorrectionProfile::new(&src, &chan);
    let frame = quaternion_frame();
    let u = haar_random_unitary(2, Seed(3));
    let m = profile.matrix(&to_m2(&u));
    // direct: c_j = Tr(Λ_k Q_j Γ_l U) for every Kraus pair
    let mut want = [[0.0; 4]; 4];
    for lam in src.kraus() {
        for gam in chan.kraus() {
            let c: Vec<C64> = frame
                .iter()
                .map(|q| {
                    let q = ComplexMatrix::from_rows(q);
                    (&(&(lam * &q) * gam) * &u).trace()
                })
                .collect();
            for i in 0..4 {
                for j in 0..4 {
                    want[i][j] += (c[i].conj() * c[j]).re;
                }
            }
        }
    }
    for i in 0..4 {
        for j in 0..4 {
            assert!((m[i][j] - want[i][j]).abs() < 1e-12);
        }
    }
}

#[test]
fn profile_value_is_attained_and_optimal() {
    let src = random_channel(2, 4, Seed(10)).unwrap();
    let chan = random_channel(2, 3, Seed(11)).unwrap();
    let profile = CorrectionProfile::new(&src, &chan);
    let (w, v) = ([0.3, -1.1, 2.0], [1.4, 0.2, -0.7]);
    let (value, qs) = profile.solve(&w, &v);
    let basis = basis_from_params(w, v);
    let corrections: Vec<_> = qs.iter().map(from_quaternion).collect();
    let spec = ProtocolSpec::new(basis.clone(), CorrectionSet::new(corrections).unwrap()).unwrap();
    assert!((febf_objective(&spec, &src, &chan).unwrap() - value).abs() < 1e-12);

    // each correction solved on its own by the generic search gives the same total
    let mut decoupled = 0.0;
    for (a, u) in basis.elements().iter().enumerate() {
        let term = |t: &ComplexMatrix| {
            let mut s = 0.0;
            for lam in src.kraus() {
                for gam in chan.kraus() {
                    s += (&(&(lam * t) * gam) * u).trace().norm_sqr();
                }
            }
            s / 16.0
        };
        decoupled += optimize_single_unitary(term, &OptimizerSettings::quick(a as u64)).unwrap().value;
    }
    assert!((decoupled - value).abs() < 1e-6, "{decoupled} vs {value}");
}

#[test]
fn noiseless_gives_perfect_protocol() {
    let id = KrausMap::identity(2);
    let r = optimize_realistic(&id, &id, &OptimizerSettings::quick(4)).unwrap();
    assert!((r.f_max - 1.0).abs() < 1e-9);
    for (u, t) in r.spec.pairs() {
        assert!((phase_overlap(&(t * u), &ComplexMatrix::identity(2)) - 1.0).abs() < 1e-9);
    }
}

#[test]
fn bit_flip_optimum_is_standard_protocol() {
    let bf = named_channel(ChannelKind::BitFlip, &[0.25]).unwrap();
    let r = optimize_realistic(&bf, &bf, &OptimizerSettings::quick(8)).unwrap();
    let f_stp = febf_objective(&stp_spec(2).unwrap(), &bf, &bf).unwrap();
    assert!((r.f_max - f_stp).abs() < 1e-6, "{} vs {}", r.f_max, f_stp);
}

#[test]
fn weak_noise_corrections_invert_basis() {
    let dep = named_channel(ChannelKind::Depolarizing, &[1e-3]).unwrap();
    let r = optimize_realistic(&dep, &dep, &OptimizerSettings::quick(2)).unwrap();
    for (u, t) in r.spec.pairs() {
        let tu = t * u;
        let phase = tu[(0, 0)] / tu[(0, 0)].norm();
        assert!(tu.max_abs_diff(&ComplexMatrix::identity(2).scale(phase)) < 1e-2);
    }
}

#[test]
fn realistic_is_reproducible() {
    let src = random_channel(2, 3, Seed(20)).unwrap();
    let chan = random_channel(2, 2, Seed(21)).unwrap();
    let s = OptimizerSettings::quick(123);
    let a = optimize_realistic(&src, &chan, &s).unwrap();
    let b = optimize_realistic(&src, &chan, &s).unwrap();
    assert_eq!(a.f_max.to_bits(), b.f_max.to_bits());
    assert_eq!(a.params, b.params);
    assert_eq!(a.generations_used, b.generations_used);
}

#[test]
fn params_reproduce_reported_value() {
    let src = random_channel(2, 4, Seed(30)).unwrap();
    let chan = named_channel(ChannelKind::AmplitudeDamping, &[0.4]).unwrap();
    let r = optimize_realistic(&src, &chan, &OptimizerSettings::quick(5)).unwrap();
    let again = febf_objective(&r.params.to_spec(), &src, &chan).unwrap();
    assert!((again - r.f_max).abs() < 1e-12);
}

#[test]
fn covariant_channel_seed_independent() {
    let id = KrausMap::identity(2);
    for chan in [
        named_channel(ChannelKind::Depolarizing, &[0.3]).unwrap(),
        named_channel(ChannelKind::AmplitudeDamping, &[0.5]).unwrap(),
    ] {
        let a = optimize_realistic(&id, &chan, &OptimizerSettings::quick(1)).unwrap();
        let b = optimize_realistic(&id, &chan, &OptimizerSettings::quick(2)).unwrap();
        assert!((a.f_max - b.f_max).abs() < 1e-6);
    }
}

#[test]
fn seeded_basis_is_dominated() {
    let src = random_channel(2, 2, Seed(40)).unwrap();
    let chan = random_channel(2, 4, Seed(41)).unwrap();
    let w = params_from_su2(&haar_random_unitary(2, Seed(42))).unwrap();
    let v = params_from_su2(&haar_random_unitary(2, Seed(43))).unwrap();
    let basis = basis_from_params(w, v);
    // the AFY-style corrections for that basis, scored under the true source noise
    let corrections: Vec<_> = basis
        .elements()
        .iter()
        .map(|u| {
            optimize_single_unitary(|t| afy_term(t, u, &chan), &OptimizerSettings::quick(0)).unwrap().unitary
        })
        .collect();
    let afy = ProtocolSpec::new(basis, CorrectionSet::new(corrections).unwrap()).unwrap();
    let f_afy = febf_objective(&afy, &src, &chan).unwrap();
    let tiny = OptimizerSettings { population: 4, generations: 1, restarts: 1, tolerance: 1e-8, seed: 0 };
    let r = optimize_realistic_seeded(&src, &chan, &tiny, &[(w, v)]).unwrap();
    assert!(r.f_max >= f_afy - 1e-12);
    let f_stp = febf_objective(&stp_spec(2).unwrap(), &src, &chan).unwrap();
    assert!(r.f_max >= f_stp - 1e-12);
}

#[test]
fn mismatched_pauli_noise_beats_standard_protocol() {
    // Λ = bit flip, Γ = phase flip. Rotating the basis by a Hadamard turns the
    // resource's Z error into an X error, so the two flips can cancel:
    // F = 1 - p1 - p2 + 2 p1 p2 instead of (1 - p1)(1 - p2).
    let (p1, p2) = (0.1, 0.3);
    let src = named_channel(ChannelKind::BitFlip, &[p1]).unwrap();
    let chan = named_channel(ChannelKind::PhaseFlip, &[p2]).unwrap();
    let h = (&sigma_x() + &crate::qcore::sigma_z()).scale_real(std::f64::consts::FRAC_1_SQRT_2);
    let basis = basis_from_params([0.0; 3], params_from_su2(&h).unwrap());
    let corrections = basis.elements().iter().map(ComplexMatrix::adjoint).collect();
    let rotated = ProtocolSpec::new(basis, CorrectionSet::new(corrections).unwrap()).unwrap();

    let f = febf_objective(&rotated, &src, &chan).unwrap();
    assert!((f - (1.0 - p1 - p2 + 2.0 * p1 * p2)).abs() < 1e-12);
    let circuit = crate::oracle::avg_fidelity_2design(&rotated, &src, &chan).unwrap();
    assert!((circuit - (2.0 * f + 1.0) / 3.0).abs() < 1e-12);
    let f_stp = febf_objective(&stp_spec(2).unwrap(), &src, &chan).unwrap();
    assert!((f_stp - (1.0 - p1) * (1.0 - p2)).abs() < 1e-12);

    let r = optimize_realistic(&src, &chan, &OptimizerSettings::quick(6)).unwrap();
    assert!(r.f_max >= f - 1e-9);
}

#[test]
fn rejects_qutrit_noise() {
    let q = KrausMap::identity(3);
    assert!(optimize_realistic(&q, &q, &OptimizerSettings::quick(0)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn never_below_standard_protocol(s1 in 0u64..10_000, s2 in 0u64..10_000, e1 in 1usize..5, e2 in 1usize..5) {
        let src = random_channel(2, e1, Seed(s1)).unwrap();
        let chan = random_channel(2, e2, Seed(s2)).unwrap();
        let tiny = OptimizerSettings { population: 8, generations: 5, restarts: 1, tolerance: 1e-8, seed: s1 ^ s2 };
        let r = optimize_realistic(&src, &chan, &tiny).unwrap();
        let f_stp = febf_objective(&stp_spec(2).unwrap(), &src, &chan).unwrap();
        prop_assert!(r.f_max >= f_stp - 1e-12);
        prop_assert!(r.f_max <= 1.0 + 1e-12);
    }
}

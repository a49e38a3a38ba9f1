//! Search over qubit protocols.
//!
//! The basis is parametrized as `U_α = W σ_α V` with `W`, `V` in SU(2) given by
//! ZYZ Euler angles, and each correction `T_α` by its own three angles. For a
//! fixed basis the objective splits into four independent terms, each a
//! quadratic form in the unit quaternion of `T_α`, so the corrections are
//! solved exactly (top eigenvector of a real symmetric 4×4 matrix) and the
//! global search only runs over the six basis angles.

mod de;

use serde::{Deserialize, Serialize};

pub use de::wrap_angle;

use crate::channels::KrausMap;
use crate::error::{Error, Result};
use crate::protocol::{febf_objective, stp_spec, CorrectionSet, ProtocolSpec, UnitaryBasis};
use crate::qcore::{paulis, sym4_top_eigen, ComplexMatrix, C64, I, ZERO};
use crate::rng::Seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    pub population: usize,
    pub generations: usize,
    pub restarts: usize,
    /// Minimum improvement of the best value over the stagnation window.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings { population: 64, generations: 400, restarts: 8, tolerance: 1e-8, seed: 0 }
    }
}

impl OptimizerSettings {
    pub fn with_seed(seed: u64) -> Self {
        OptimizerSettings { seed, ..Default::default() }
    }

    /// Small budget for tests and inner loops.
    pub fn quick(seed: u64) -> Self {
        OptimizerSettings { population: 24, generations: 150, restarts: 2, tolerance: 1e-10, seed }
    }

    pub fn seed(&self) -> Seed {
        Seed(self.seed)
    }

    /// Same budget, independent random stream.
    pub fn for_stream(&self, label: u64) -> Self {
        OptimizerSettings { seed: self.seed().split(label).0, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 4 {
            return Err(Error::InvalidParameter(format!("population must be at least 4, got {}", self.population)));
        }
        if self.generations == 0 || self.restarts == 0 {
            return Err(Error::InvalidParameter("generations and restarts must be positive".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }
}

/// ZYZ Euler angles: `exp(i a σ_z/2) · exp(i b σ_y/2) · exp(i c σ_z/2)`.
pub fn su2_from_params(a: f64, b: f64, c: f64) -> ComplexMatrix {
    let m = su2_array(a, b, c);
    ComplexMatrix::from_rows(&m)
}

fn su2_array(a: f64, b: f64, c: f64) -> [[C64; 2]; 2] {
    let (s, co) = (b / 2.0).sin_cos();
    let plus = C64::from_polar(1.0, (a + c) / 2.0);
    let minus = C64::from_polar(1.0, (a - c) / 2.0);
    [[plus * co, minus * s], [-minus.conj() * s, plus.conj() * co]]
}

/// Euler angles of a 2×2 unitary, ignoring its global phase. Angles wrapped to `[-π, π)`.
pub fn params_from_su2(u: &ComplexMatrix) -> Result<[f64; 3]> {
    if u.rows() != 2 || u.cols() != 2 {
        return Err(Error::Dimension { expected: 2, found: u.rows() });
    }
    u.require_unitary(1e-8)?;
    let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
    let b = 2.0 * u01.norm().atan2(u00.norm());
    let phase = if u00.norm() >= u01.norm() {
        (u00.arg() + u11.arg()) / 2.0
    } else {
        (u01.arg() + (-u10).arg()) / 2.0
    };
    let rot = C64::from_polar(1.0, -phase);
    let tiny = 1e-14;
    let half_sum = if u00.norm() > tiny { (u00 * rot).arg() } else { 0.0 };
    let half_diff = if u01.norm() > tiny { (u01 * rot).arg() } else { 0.0 };
    Ok([wrap_angle(half_sum + half_diff), wrap_angle(b), wrap_angle(half_sum - half_diff)])
}

/// `U_α = W σ_α V`.
pub fn basis_from_params(w: [f64; 3], v: [f64; 3]) -> UnitaryBasis {
    let wm = su2_from_params(w[0], w[1], w[2]);
    let vm = su2_from_params(v[0], v[1], v[2]);
    let elements = paulis().iter().map(|s| &(&wm * s) * &vm).collect();
    UnitaryBasis::new(elements).expect("a sandwiched Pauli basis is orthogonal")
}

/// Coordinates of a full qubit protocol: `W` (3), `V` (3), then `T_0..T_3` (3 each).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamVector([f64; 18]);

impl ParamVector {
    pub const LEN: usize = 18;

    pub fn new(values: [f64; 18]) -> Result<Self> {
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("protocol angles must be finite".into()));
        }
        Ok(ParamVector(values.map(wrap_angle)))
    }

    pub fn values(&self) -> &[f64; 18] {
        &self.0
    }

    pub fn w(&self) -> [f64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    pub fn v(&self) -> [f64; 3] {
        [self.0[3], self.0[4], self.0[5]]
    }

    pub fn correction(&self, alpha: usize) -> [f64; 3] {
        let o = 6 + 3 * alpha;
        [self.0[o], self.0[o + 1], self.0[o + 2]]
    }

    pub fn to_spec(&self) -> ProtocolSpec {
        let basis = basis_from_params(self.w(), self.v());
        let corrections = (0..4)
            .map(|a| {
                let p = self.correction(a);
                su2_from_params(p[0], p[1], p[2])
            })
            .collect();
        ProtocolSpec::new(basis, CorrectionSet::new(corrections).expect("four corrections"))
            .expect("sizes agree")
    }
}

#[derive(Debug, Clone)]
pub struct SingleUnitaryOptimum {
    pub unitary: ComplexMatrix,
    pub params: [f64; 3],
    pub value: f64,
    pub generations_used: usize,
    pub stagnated: bool,
}

/// Maximizes a real function over SU(2).
pub fn optimize_single_unitary<F>(objective: F, settings: &OptimizerSettings) -> Result<SingleUnitaryOptimum>
where
    F: Fn(&ComplexMatrix) -> f64 + Sync,
{
    settings.validate()?;
    let f = |x: &[f64]| objective(&su2_from_params(x[0], x[1], x[2]));
    let out = de::maximize(&f, 3, settings, &[vec![0.0; 3]]);
    let params = [out.best[0], out.best[1], out.best[2]];
    Ok(SingleUnitaryOptimum {
        unitary: su2_from_params(params[0], params[1], params[2]),
        params,
        value: out.value,
        generations_used: out.generations,
        stagnated: out.stagnated,
    })
}

#[derive(Debug, Clone)]
pub struct RealisticOptimum {
    pub spec: ProtocolSpec,
    pub f_max: f64,
    pub params: ParamVector,
    pub generations_used: usize,
    pub stagnated: bool,
}

type M2 = [[C64; 2]; 2];

fn to_m2(m: &ComplexMatrix) -> M2 {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

fn mul2(a: &M2, b: &M2) -> M2 {
    let mut r = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

/// Quaternion frame `Q_j ∈ {I, iσ_x, iσ_y, iσ_z}`: `T = Σ q_j Q_j` is in SU(2) for unit real `q`.
fn quaternion_frame() -> [M2; 4] {
    let p = paulis();
    [to_m2(&p[0]), to_m2(&p[1].scale(I)), to_m2(&p[2].scale(I)), to_m2(&p[3].scale(I))]
}

fn from_quaternion(q: &[f64; 4]) -> ComplexMatrix {
    let frame = quaternion_frame();
    let mut t = ComplexMatrix::zeros(2, 2);
    for (qj, f) in q.iter().zip(frame.iter()) {
        for r in 0..2 {
            for c in 0..2 {
                t[(r, c)] += f[r][c] * *qj;
            }
        }
    }
    t
}

/// For a fixed `U`, `Σ_{k,l} |Tr(Λ_k T Γ_l U)|² = qᵀ M(U) q`. `M` is quadratic in
/// the entries of `U`, so it is precomputed as a tensor `G` over those entries.
struct CorrectionProfile {
    // g[i][j][a][b] = Σ_kl conj(B^{kl}_i[a]) B^{kl}_j[b], with c_j = Σ_a B_j[a] vec(U)[a]
    g: Box<[[[[C64; 4]; 4]; 4]; 4]>,
    sigmas: [M2; 4],
}

impl CorrectionProfile {
    fn new(source_noise: &KrausMap, channel_noise: &KrausMap) -> Self {
        let frame = quaternion_frame();
        let mut g = Box::new([[[[ZERO; 4]; 4]; 4]; 4]);
        for lam in source_noise.kraus() {
            let lam = to_m2(lam);
            for gam in channel_noise.kraus() {
                let gam = to_m2(gam);
                let mut b = [[ZERO; 4]; 4];
                for (j, q) in frame.iter().enumerate() {
                    let p = mul2(&mul2(&lam, q), &gam);
                    for r in 0..2 {
                        for c in 0..2 {
                            // Tr(P U) = Σ P[c][r] U[r][c]
                            b[j][2 * r + c] = p[c][r];
                        }
                    }
                }
                for i in 0..4 {
                    for j in 0..4 {
                        for a in 0..4 {
                            let bi = b[i][a].conj();
                            for bb in 0..4 {
                                g[i][j][a][bb] += bi * b[j][bb];
                            }
                        }
                    }
                }
            }
        }
        let p = paulis();
        CorrectionProfile { g, sigmas: [to_m2(&p[0]), to_m2(&p[1]), to_m2(&p[2]), to_m2(&p[3])] }
    }

    fn matrix(&self, u: &M2) -> [[f64; 4]; 4] {
        let v = [u[0][0], u[0][1], u[1][0], u[1][1]];
        let mut m = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in i..4 {
                let mut s = ZERO;
                for a in 0..4 {
                    let mut row = ZERO;
                    for b in 0..4 {
                        row += self.g[i][j][a][b] * v[b];
                    }
                    s += v[a].conj() * row;
                }
                m[i][j] = s.re;
                m[j][i] = s.re;
            }
        }
        m
    }

    /// Best achievable objective for the basis `(w, v)` and the optimal quaternions.
    fn solve(&self, w: &[f64], v: &[f64]) -> (f64, [[f64; 4]; 4]) {
        let wm = su2_array(w[0], w[1], w[2]);
        let vm = su2_array(v[0], v[1], v[2]);
        let mut total = 0.0;
        let mut qs = [[0.0; 4]; 4];
        for (alpha, s) in self.sigmas.iter().enumerate() {
            let u = mul2(&mul2(&wm, s), &vm);
            let (lam, q) = sym4_top_eigen(&self.matrix(&u));
            total += lam;
            qs[alpha] = q;
        }
        (total / 16.0, qs)
    }
}

/// Maximizes the singlet-fraction objective over qubit bases and corrections.
/// The standard protocol is always one of the initial candidates.
pub fn optimize_realistic(
    source_noise: &KrausMap,
    channel_noise: &KrausMap,
    settings: &OptimizerSettings,
) -> Result<RealisticOptimum> {
    optimize_realistic_seeded(source_noise, channel_noise, settings, &[])
}

/// As [`optimize_realistic`], with extra bases `(w, v)` injected into the
/// initial population (for example the basis used by a competing protocol).
pub fn optimize_realistic_seeded(
    source_noise: &KrausMap,
    channel_noise: &KrausMap,
    settings: &OptimizerSettings,
    extra_bases: &[([f64; 3], [f64; 3])],
) -> Result<RealisticOptimum> {
    settings.validate()?;
    for map in [source_noise, channel_noise] {
        let d = map.square_dim()?;
        if d != 2 {
            return Err(Error::Dimension { expected: 2, found: d });
        }
    }
    let profile = CorrectionProfile::new(source_noise, channel_noise);
    let objective = |x: &[f64]| profile.solve(&x[..3], &x[3..6]).0;
    let mut initial = vec![vec![0.0; 6]];
    for (w, v) in extra_bases {
        initial.push(w.iter().chain(v.iter()).copied().collect());
    }
    let out = de::maximize(&objective, 6, settings, &initial);

    let (_, qs) = profile.solve(&out.best[..3], &out.best[3..6]);
    let mut values = [0.0; 18];
    values[..6].copy_from_slice(&out.best);
    for (alpha, q) in qs.iter().enumerate() {
        let t = params_from_su2(&from_quaternion(q))?;
        values[6 + 3 * alpha..9 + 3 * alpha].copy_from_slice(&t);
    }
    let params = ParamVector::new(values)?;
    let spec = params.to_spec();
    let mut f_max = febf_objective(&spec, source_noise, channel_noise)?;
    let mut spec = spec;
    // Guard against rounding in the angle round trip: the standard protocol is a valid answer.
    let stp = stp_spec(2)?;
    let f_stp = febf_objective(&stp, source_noise, channel_noise)?;
    let mut params = params;
    if f_stp > f_max {
        let mut values = [0.0; 18];
        for (alpha, t) in stp.corrections().elements().iter().enumerate() {
            values[6 + 3 * alpha..9 + 3 * alpha].copy_from_slice(&params_from_su2(t)?);
        }
        params = ParamVector::new(values)?;
        spec = stp;
        f_max = f_stp;
    }
    Ok(RealisticOptimum { spec, f_max, params, generations_used: out.generations, stagnated: out.stagnated })
}

#[cfg(test)]
mod tests;

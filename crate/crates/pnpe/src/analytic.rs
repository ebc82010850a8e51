//! Closed-form track: heralded states, lossy no-click POVMs, Q-functions,
//! CHSH/CH, log-negativity and the exact loss analysis of the correlated
//! (|φ⟩ ∝ c₀|0,0⟩ + c₁|1,1⟩) and anticorrelated (|ψ⟩ ∝ c₀|0,1⟩ + c₁|1,0⟩)
//! qubit path-state families.
//!
//! The heralded-family Q-functions deliberately omit the ε-noise
//! |1,0⟩⟨1,0| admixture (the closed forms are derived in the η_H → 1
//! limit); the circuit simulator includes it, and the gap is what the
//! loss-resilience tests quantify.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Source-side physical knobs. `lambda = tanh g` is maintained by
/// construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceParams {
    lambda: f64,
    g: f64,
    pub t_b: f64,
    pub t_c: f64,
    pub phi_a: f64,
    pub phi_b: f64,
    pub eta_s: f64,
}

impl SourceParams {
    pub fn new(g: f64, t_b: f64, t_c: f64, phi_a: f64, phi_b: f64, eta_s: f64) -> Result<Self> {
        if g < 0.0 {
            return Err(Error::InvalidParameter(format!("g {g} negative")));
        }
        for (x, name) in [(t_b, "t_b"), (t_c, "t_c"), (eta_s, "eta_s")] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidParameter(format!("{name} {x} outside [0,1]")));
            }
        }
        Ok(Self {
            lambda: g.tanh(),
            g,
            t_b,
            t_c,
            phi_a,
            phi_b,
            eta_s,
        })
    }

    /// Balanced-Charlie, zero-phase, ideal-herald source.
    pub fn simple(g: f64, t_b: f64) -> Result<Self> {
        Self::new(g, t_b, 0.5, 0.0, 0.0, 1.0)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Combined state phase φ_a + φ_b.
    pub fn phi(&self) -> f64 {
        self.phi_a + self.phi_b
    }
}

/// Loss budget. In symmetric mode `eta_a2 = eta_b2 = eta_h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParams {
    pub eta_a2: f64,
    pub eta_b2: f64,
    pub eta_h: f64,
    pub eta_d: f64,
    pub eta_c: f64,
}

impl LossParams {
    pub fn new(eta_a2: f64, eta_b2: f64, eta_d: f64, eta_c: f64) -> Result<Self> {
        for (x, name) in [
            (eta_a2, "eta_a2"),
            (eta_b2, "eta_b2"),
            (eta_d, "eta_d"),
            (eta_c, "eta_c"),
        ] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::InvalidParameter(format!("{name} {x} outside [0,1]")));
            }
        }
        Ok(Self {
            eta_a2,
            eta_b2,
            eta_h: (eta_a2 * eta_b2).sqrt(),
            eta_d,
            eta_c,
        })
    }

    /// Symmetric heralding efficiency on both transmitted modes.
    pub fn symmetric(eta_h: f64, eta_d: f64) -> Result<Self> {
        let mut p = Self::new(eta_h, eta_h, eta_d, 1.0)?;
        p.eta_h = eta_h;
        Ok(p)
    }

    /// Ideal channels, detection efficiency only.
    pub fn detection_only(eta_d: f64) -> Result<Self> {
        Self::symmetric(1.0, eta_d)
    }

    /// Channel transmittance from fiber attenuation: η_C = 10^(−γL/10).
    pub fn eta_c_from_fiber(gamma_db_per_km: f64, length_km: f64) -> f64 {
        10f64.powf(-gamma_db_per_km * length_km / 10.0)
    }
}

/// The four displacement amplitudes of a CHSH run. Amplitudes are signed
/// reals (a negative value is a π phase); `phi_alpha`/`phi_beta` are shared
/// measurement phases and `phi` the state phase φ_a + φ_b entering the
/// interference term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSettings {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub phi_alpha: f64,
    pub phi_beta: f64,
    pub phi: f64,
}

impl MeasurementSettings {
    pub fn new(alpha1: f64, alpha2: f64, beta1: f64, beta2: f64) -> Result<Self> {
        for a in [alpha1, alpha2, beta1, beta2] {
            if a.abs() > 2.0 {
                return Err(Error::InvalidParameter(format!(
                    "|amplitude| {} exceeds 2",
                    a.abs()
                )));
            }
        }
        Ok(Self {
            alpha1,
            alpha2,
            beta1,
            beta2,
            phi_alpha: 0.0,
            phi_beta: 0.0,
            phi: 0.0,
        })
    }

    pub fn alphas(&self) -> [f64; 2] {
        [self.alpha1, self.alpha2]
    }

    pub fn betas(&self) -> [f64; 2] {
        [self.beta1, self.beta2]
    }
}

/// Where a [`ChshReport`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Simulated,
}

/// CHSH evaluation with all intermediate click probabilities, for
/// auditability of optimizer output.
#[derive(Debug, Clone)]
pub struct ChshReport {
    pub s: f64,
    /// E(α_i, β_j) in the order (1,1), (1,2), (2,1), (2,2).
    pub e: [f64; 4],
    /// Joint no-click probabilities in the same setting order.
    pub q_ab: [f64; 4],
    /// Marginal no-click probabilities for Alice's two settings.
    pub q_a: [f64; 2],
    /// Marginal no-click probabilities for Bob's two settings.
    pub q_b: [f64; 2],
    pub provenance: Provenance,
}

/// Two-qubit density matrix in the basis {|0,0⟩, |0,1⟩, |1,0⟩, |1,1⟩}.
#[derive(Debug, Clone)]
pub struct QubitPairState {
    pub matrix: Matrix4<C64>,
    pub normalized: bool,
}

impl QubitPairState {
    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.matrix[(i, i)].re).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= 0.0 {
            return Err(Error::DegenerateHerald("zero-trace qubit state".into()));
        }
        Ok(Self {
            matrix: self.matrix / C64::new(tr, 0.0),
            normalized: true,
        })
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

/// Which of Charlie's detectors fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Lossless heralded state for qubit-truncated sources with amplitudes
/// (a₀, a₁) and (b₀, b₁):
/// `+`: a₀b₀√(1−t_c)|0,0⟩ + a₁b₁√t_c|1,1⟩;
/// `−`: a₀b₀√t_c|0,0⟩ − a₁b₁√(1−t_c)|1,1⟩ (unnormalized pure).
pub fn ideal_heralded_state(
    a0: f64,
    a1: f64,
    b0: f64,
    b1: f64,
    t_c: f64,
    sign: Sign,
) -> Result<QubitPairState> {
    for (n2, name) in [(a0 * a0 + a1 * a1, "a"), (b0 * b0 + b1 * b1, "b")] {
        if (n2 - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "{name}-amplitudes not normalized (norm² = {n2})"
            )));
        }
    }
    let (c00, c11) = match sign {
        Sign::Plus => (a0 * b0 * (1.0 - t_c).sqrt(), a1 * b1 * t_c.sqrt()),
        Sign::Minus => (a0 * b0 * t_c.sqrt(), -(a1 * b1 * (1.0 - t_c).sqrt())),
    };
    let v = Vector4::new(
        C64::new(c00, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(c11, 0.0),
    );
    Ok(QubitPairState {
        matrix: v * v.adjoint(),
        normalized: false,
    })
}

/// General heralded state with asymmetric transmitted-mode loss, normalized:
/// diagonal {t_b η_b₂, 0, λ²t_b(η_a₂+η_b₂−2η_a₂η_b₂), λ²(1−t_b)η_a₂}/𝒩 with
/// coherence ±λ√(η_a₂η_b₂ t_b(1−t_b)) e^{±i(φ_a+φ_b)}/𝒩 between |0,0⟩ and
/// |1,1⟩.
pub fn heralded_state_general(
    src: &SourceParams,
    eta_a2: f64,
    eta_b2: f64,
    sign: Sign,
) -> Result<QubitPairState> {
    let l2 = src.lambda() * src.lambda();
    let t_b = src.t_b;
    let d00 = t_b * eta_b2;
    let d10 = l2 * t_b * (eta_a2 + eta_b2 - 2.0 * eta_a2 * eta_b2);
    let d11 = l2 * (1.0 - t_b) * eta_a2;
    let norm = d00 + d10 + d11;
    if norm <= 0.0 {
        return Err(Error::DegenerateHerald(
            "heralded state has zero trace".into(),
        ));
    }
    let coh_mag = src.lambda() * (eta_a2 * eta_b2 * t_b * (1.0 - t_b)).sqrt();
    // |0,0⟩⟨1,1| carries e^{−i(φ_a+φ_b)}: the |1,1⟩ ket holds the phase.
    let coh = C64::from_polar(coh_mag, -src.phi()) * sign.factor();
    let mut m = Matrix4::zeros();
    m[(0, 0)] = C64::new(d00 / norm, 0.0);
    m[(2, 2)] = C64::new(d10 / norm, 0.0);
    m[(3, 3)] = C64::new(d11 / norm, 0.0);
    m[(0, 3)] = coh / norm;
    m[(3, 0)] = coh.conj() / norm;
    Ok(QubitPairState {
        matrix: m,
        normalized: true,
    })
}

/// No-click POVM element of a displacement-based click/no-click measurement
/// with displacement `alpha` and detection efficiency `eta`, on the
/// {|0⟩, |1⟩} subspace: e^{−η|α|²} [[1, −ηα*], [−ηα, 1−η+η²|α|²]].
pub fn noclick_povm(alpha: C64, eta: f64) -> Matrix2<C64> {
    let a2 = alpha.norm_sqr();
    let scale = C64::new((-eta * a2).exp(), 0.0);
    Matrix2::new(
        scale,
        scale * (-eta) * alpha.conj(),
        scale * (-eta) * alpha,
        scale * (1.0 - eta + eta * eta * a2),
    )
}

fn heralded_norm(src: &SourceParams) -> f64 {
    src.t_b + src.lambda() * src.lambda() * (1.0 - src.t_b)
}

/// Joint no-click probability Q_ab(α, β) of the heralded family (η_H → 1
/// closed form), including the cos(φ_a+φ_b−φ_α−φ_β) interference term.
pub fn q_joint(src: &SourceParams, eta_d: f64, settings: &MeasurementSettings, alpha: f64, beta: f64) -> f64 {
    let l = src.lambda();
    let l2 = l * l;
    let t_b = src.t_b;
    let n = heralded_norm(src);
    let fa = 1.0 - eta_d + eta_d * eta_d * alpha * alpha;
    let fb = 1.0 - eta_d + eta_d * eta_d * beta * beta;
    let cosarg = (settings.phi - settings.phi_alpha - settings.phi_beta).cos();
    let num = t_b
        + l2 * (1.0 - t_b) * fa * fb
        + 2.0 * l * (t_b * (1.0 - t_b)).sqrt() * alpha * beta * eta_d * eta_d * cosarg;
    (-(alpha * alpha + beta * beta) * eta_d).exp() * num / n
}

/// Alice's marginal no-click probability Q_a(α).
pub fn q_marginal_a(src: &SourceParams, eta_d: f64, alpha: f64) -> f64 {
    let l2 = src.lambda() * src.lambda();
    let n = heralded_norm(src);
    (src.t_b + l2 * (1.0 - src.t_b) * (1.0 - eta_d + alpha * alpha * eta_d * eta_d)) / n
        * (-alpha * alpha * eta_d).exp()
}

/// Bob's marginal no-click probability Q_b(β); identical functional form by
/// the |0,0⟩/|1,1⟩ symmetry of the heralded state.
pub fn q_marginal_b(src: &SourceParams, eta_d: f64, beta: f64) -> f64 {
    q_marginal_a(src, eta_d, beta)
}

/// Click/no-click correlation coefficient E = 1 − 2Q_a − 2Q_b + 4Q_ab.
pub fn correlation_coefficient(q_ab: f64, q_a: f64, q_b: f64) -> f64 {
    1.0 - 2.0 * q_a - 2.0 * q_b + 4.0 * q_ab
}

fn check_consistency(q_ab: f64, q_a: f64, q_b: f64) -> Result<()> {
    let tol = 1e-9;
    if q_ab > q_a.min(q_b) + tol || !(0.0..=1.0 + tol).contains(&q_ab) {
        return Err(Error::InconsistentProbabilities(format!(
            "Q_ab = {q_ab} vs marginals ({q_a}, {q_b})"
        )));
    }
    Ok(())
}

/// Analytic CHSH value
/// S = 2 + 4[Q_ab(α₁,β₁) + Q_ab(α₁,β₂) + Q_ab(α₂,β₁) − Q_ab(α₂,β₂)
///        − Q_a(α₁) − Q_b(β₁)].
pub fn chsh(src: &SourceParams, eta_d: f64, settings: &MeasurementSettings) -> Result<ChshReport> {
    let al = settings.alphas();
    let be = settings.betas();
    let q_a = [
        q_marginal_a(src, eta_d, al[0]),
        q_marginal_a(src, eta_d, al[1]),
    ];
    let q_b = [
        q_marginal_b(src, eta_d, be[0]),
        q_marginal_b(src, eta_d, be[1]),
    ];
    let mut q_ab = [0.0; 4];
    let mut e = [0.0; 4];
    for i in 0..2 {
        for j in 0..2 {
            let q = q_joint(src, eta_d, settings, al[i], be[j]);
            check_consistency(q, q_a[i], q_b[j])?;
            q_ab[i * 2 + j] = q;
            e[i * 2 + j] = correlation_coefficient(q, q_a[i], q_b[j]);
        }
    }
    let s = 2.0 + 4.0 * (q_ab[0] + q_ab[1] + q_ab[2] - q_ab[3] - q_a[0] - q_b[0]);
    Ok(ChshReport {
        s,
        e,
        q_ab,
        q_a,
        q_b,
        provenance: Provenance::Analytic,
    })
}

/// CH parameter from S: CH = (S − 2)/4.
pub fn ch_from_chsh(s: f64) -> f64 {
    (s - 2.0) / 4.0
}

/// Log-negativity of the low-gain heralded state:
/// E_N = log₂(1 + 2λ√(t_b(1−t_b)) / (λ²(1−t_b) + t_b)).
pub fn log_negativity(lambda: f64, t_b: f64) -> Result<f64> {
    let den = lambda * lambda * (1.0 - t_b) + t_b;
    if den <= 0.0 {
        return Err(Error::InvalidParameter(
            "lambda and t_b cannot both be zero".into(),
        ));
    }
    Ok((1.0 + 2.0 * lambda * (t_b * (1.0 - t_b)).sqrt() / den).log2())
}

/// The two pure qubit path-state families of the loss analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathStateKind {
    /// |φ⟩ = c₀|0,0⟩ + c₁ e^{iφ}|1,1⟩ — loss affects only the c₁ sector.
    Correlated,
    /// |ψ⟩ = c₀|0,1⟩ + c₁ e^{iφ}|1,0⟩.
    AntiCorrelated,
}

/// A normalized member of either family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericQubitPathState {
    pub c0: f64,
    pub c1: f64,
    pub phi: f64,
    pub kind: PathStateKind,
}

impl GenericQubitPathState {
    pub fn new(c0: f64, c1: f64, phi: f64, kind: PathStateKind) -> Result<Self> {
        if (c0 * c0 + c1 * c1 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "c0²+c1² = {} != 1",
                c0 * c0 + c1 * c1
            )));
        }
        Ok(Self { c0, c1, phi, kind })
    }

    /// Balanced-from-angle constructor: c₀ = cos θ, c₁ = sin θ.
    pub fn from_angle(theta: f64, phi: f64, kind: PathStateKind) -> Self {
        Self {
            c0: theta.cos(),
            c1: theta.sin(),
            phi,
            kind,
        }
    }

    fn vector(&self) -> Vector4<C64> {
        let c0 = C64::new(self.c0, 0.0);
        let c1 = C64::from_polar(self.c1, self.phi);
        match self.kind {
            PathStateKind::Correlated => Vector4::new(c0, C64::new(0.0, 0.0), C64::new(0.0, 0.0), c1),
            PathStateKind::AntiCorrelated => {
                Vector4::new(C64::new(0.0, 0.0), c0, c1, C64::new(0.0, 0.0))
            }
        }
    }
}

/// Exact lossy no-click probabilities (Q_ab, Q_a, Q_b) for a generic path
/// state with complex displacements `alpha`, `beta` and symmetric
/// efficiency `eta`, built on [`noclick_povm`].
pub fn generic_state_q_functions(
    state: &GenericQubitPathState,
    eta: f64,
    alpha: C64,
    beta: C64,
) -> (f64, f64, f64) {
    let v = state.vector();
    let ea = noclick_povm(alpha, eta);
    let eb = noclick_povm(beta, eta);
    let id = Matrix2::identity();
    let expect = |ma: &Matrix2<C64>, mb: &Matrix2<C64>| -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for (ia, ib, i) in [(0usize, 0usize, 0usize), (0, 1, 1), (1, 0, 2), (1, 1, 3)] {
            for (ja, jb, j) in [(0usize, 0usize, 0usize), (0, 1, 1), (1, 0, 2), (1, 1, 3)] {
                acc += v[i].conj() * ma[(ia, ja)] * mb[(ib, jb)] * v[j];
            }
        }
        acc.re
    };
    (expect(&ea, &eb), expect(&ea, &id), expect(&id, &eb))
}

/// Complex displacement settings for the generic-family CHSH. The
/// anticorrelated family needs genuinely per-setting phases near its
/// threshold, which the signed-real [`MeasurementSettings`] cannot express.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericSettings {
    pub alpha: [C64; 2],
    pub beta: [C64; 2],
}

/// CHSH value of a generic path state under displacement click/no-click
/// measurements, fixed arrangement E₁₁ + E₁₂ + E₂₁ − E₂₂ (other sign
/// arrangements are reachable by relabeling settings).
pub fn generic_state_chsh(state: &GenericQubitPathState, eta: f64, settings: &GenericSettings) -> f64 {
    let mut e = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let (q_ab, q_a, q_b) =
                generic_state_q_functions(state, eta, settings.alpha[i], settings.beta[j]);
            e[i][j] = correlation_coefficient(q_ab, q_a, q_b);
        }
    }
    e[0][0] + e[0][1] + e[1][0] - e[1][1]
}

/// Bob's heralded-preparation success probability P_s = η_s λ²/(1+λ²).
pub fn bob_prep_probability(lambda: f64, eta_s: f64) -> f64 {
    eta_s * lambda * lambda / (1.0 + lambda * lambda)
}

//! Circuit-level simulation of the full optical layout on the truncated
//! Fock space: source preparation, channel loss, Charlie's central
//! beamsplitter and exactly-one-photon heralding, then displacement-based
//! click/no-click measurement.
//!
//! This is the independent oracle for the analytic module. Mixed states are
//! carried as ensembles of unnormalized pure branches (Bob's heralded
//! mixture × loss Kraus branches), which keeps the 4-mode stage at vector
//! cost instead of dense 2401×2401 density matrices.
//!
//! Mode order of the 4-mode stage: (a₁, a₂, b₁, b₂); a₂ and b₂ travel to
//! Charlie.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::analytic::{
    correlation_coefficient, ChshReport, LossParams, Provenance, Sign, SourceParams,
};
use crate::error::{Error, Result};
use crate::fock::{
    self, beamsplitter_matrix, displacement_matrix, encode_occupation, loss_kraus, make_tmsv,
    FockDensityOperator, FockStateVector,
};

/// Charlie's detector model. Only the exactly-one-photon PNR projector is
/// implemented; threshold-click variants are a documented non-goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectorModel {
    PnrExactlyOne,
}

/// All physical knobs of one protocol instance.
#[derive(Debug, Clone, Copy)]
pub struct ProtocolParams {
    pub src: SourceParams,
    pub loss: LossParams,
    pub cutoff: usize,
    pub charlie_sign: Sign,
    pub detector_model: DetectorModel,
}

impl ProtocolParams {
    pub fn new(src: SourceParams, loss: LossParams, cutoff: usize) -> Result<Self> {
        if src.g() > 0.0 && cutoff < 2 {
            return Err(Error::InvalidParameter(
                "cutoff must be >= 2 when g > 0 (two-pair events)".into(),
            ));
        }
        if cutoff == 0 {
            return Err(Error::InvalidParameter("cutoff must be positive".into()));
        }
        Ok(Self {
            src,
            loss,
            cutoff,
            charlie_sign: Sign::Plus,
            detector_model: DetectorModel::PnrExactlyOne,
        })
    }

    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.charlie_sign = sign;
        self
    }
}

/// Result of Charlie's heralding projection.
#[derive(Debug, Clone)]
pub struct HeraldOutcome {
    /// Normalized two-mode state on (a₁, b₁).
    pub state: FockDensityOperator,
    /// Pre-normalization trace of the heralded branch: Bob's preparation
    /// weight times the probability of the chosen detector firing on
    /// exactly one photon.
    pub success_probability: f64,
    pub detector: Sign,
}

/// Joint click/no-click outcome probabilities for Alice × Bob.
#[derive(Debug, Clone, Copy)]
pub struct ClickStatistics {
    /// Neither detector clicks.
    pub p00: f64,
    /// Alice silent, Bob clicks.
    pub p0n: f64,
    /// Alice clicks, Bob silent.
    pub pn0: f64,
    /// Both click.
    pub pnn: f64,
}

impl ClickStatistics {
    pub fn sum(&self) -> f64 {
        self.p00 + self.p0n + self.pn0 + self.pnn
    }
}

/// One unnormalized pure branch of Bob's source on (b₁, b₂); the squared
/// norm is the branch probability.
fn bob_branch_vector(
    n: usize,
    weight: f64,
    t_b: f64,
    phi_b: f64,
    cutoff: usize,
) -> FockStateVector {
    let d = cutoff + 1;
    let mut amps: DVector<C64> = DVector::zeros(d * d);
    let scale = weight.sqrt();
    for j in 0..=n.min(cutoff) {
        if n - j > cutoff {
            continue;
        }
        let mag = fock::binomial(n, j)
            * (1.0 - t_b).sqrt().powi(j as i32)
            * t_b.sqrt().powi((n - j) as i32)
            * (fock::factorial(j) * fock::factorial(n - j) / fock::factorial(n)).sqrt();
        amps[encode_occupation(&[j, n - j], cutoff)] =
            C64::from_polar(scale * mag, phi_b * j as f64);
    }
    FockStateVector::new_unchecked(2, cutoff, amps)
}

/// Bob's source branches, split by herald outcome. Each branch carries the
/// joint probability of (n signal photons emitted, k idler photons
/// detected); `k = 1` heralds success.
fn bob_branches(src: &SourceParams, cutoff: usize) -> (Vec<FockStateVector>, Vec<FockStateVector>) {
    let l = src.lambda();
    let l2 = l * l;
    let mut success = Vec::new();
    let mut failure = Vec::new();
    for n in 0..=cutoff {
        let pn = (1.0 - l2) * l2.powi(n as i32);
        for k in 0..=n {
            let w = pn
                * fock::binomial(n, k)
                * src.eta_s.powi(k as i32)
                * (1.0 - src.eta_s).powi((n - k) as i32);
            if w < 1e-300 {
                continue;
            }
            let branch = bob_branch_vector(n, w, src.t_b, src.phi_b, cutoff);
            if k == 1 {
                success.push(branch);
            } else {
                failure.push(branch);
            }
        }
    }
    (success, failure)
}

/// Product of Alice's TMSV and Bob's heralded (possibly mixed) state on
/// (a₁, a₂, b₁, b₂). Bob's branch weight equals his preparation
/// probability, so the overall trace is below 1.
pub fn prepare_sources(params: &ProtocolParams) -> Result<FockDensityOperator> {
    let alice = make_tmsv(params.src.lambda(), params.cutoff)?;
    let (success, _) = bob_branches(&params.src, params.cutoff);
    if success.is_empty() {
        return Err(Error::DegenerateHerald(
            "zero-weight herald (lambda = 0?)".into(),
        ));
    }
    let dim = alice.dim() * success[0].dim();
    let mut m: DMatrix<C64> = DMatrix::zeros(dim, dim);
    for b in &success {
        let v = alice.tensor(b)?;
        m += v.amplitudes() * v.amplitudes().adjoint();
    }
    Ok(FockDensityOperator::new_unchecked(4, params.cutoff, m))
}

/// Expand a set of pure branches through a loss channel on one mode.
fn expand_loss(branches: Vec<FockStateVector>, eta: f64, mode: usize, cutoff: usize) -> Vec<FockStateVector> {
    if eta == 1.0 {
        return branches;
    }
    let kraus = loss_kraus(eta, cutoff);
    let mut out = Vec::with_capacity(branches.len() * kraus.len());
    for b in branches {
        for k in &kraus {
            let v = b.apply_one_mode(k, mode);
            if v.norm_squared() > 1e-30 {
                out.push(v);
            }
        }
    }
    out
}

/// Collapse a 4-mode pure branch onto photon numbers (n_a2, n_b2) of modes
/// (1, 3), returning the unnormalized 2-mode remainder on (a₁, b₁).
fn collapse_charlie(v: &FockStateVector, n_a2: usize, n_b2: usize, cutoff: usize) -> DVector<C64> {
    let d = cutoff + 1;
    let mut out = DVector::zeros(d * d);
    let amps = v.amplitudes();
    for i0 in 0..d {
        for i2 in 0..d {
            let idx = ((i0 * d + n_a2) * d + i2) * d + n_b2;
            out[i0 * d + i2] = amps[idx];
        }
    }
    out
}

fn detector_pattern(sign: Sign) -> (usize, usize) {
    // "+" detector sits on the a₂ output of Charlie's splitter.
    match sign {
        Sign::Plus => (1, 0),
        Sign::Minus => (0, 1),
    }
}

/// All pure branches arriving at Charlie's splitter output, given Bob's
/// source branches.
fn propagate_to_charlie(
    params: &ProtocolParams,
    bob: Vec<FockStateVector>,
    eta_a2: f64,
    eta_b2: f64,
) -> Result<Vec<FockStateVector>> {
    let alice = make_tmsv(params.src.lambda(), params.cutoff)?;
    let mut branches: Vec<FockStateVector> =
        bob.iter().map(|b| alice.tensor(b)).collect::<Result<_>>()?;
    branches = expand_loss(branches, eta_a2, 1, params.cutoff);
    branches = expand_loss(branches, eta_b2, 3, params.cutoff);
    let bs = beamsplitter_matrix(params.src.t_c, params.cutoff);
    Ok(branches
        .into_iter()
        .map(|v| v.apply_two_mode(&bs, 1, 3))
        .collect())
}

/// Charlie's heralding: loss on the transmitted modes, central
/// beamsplitter, exactly-one-photon projection for the chosen detector,
/// trace-out of (a₂, b₂).
pub fn herald(params: &ProtocolParams) -> Result<HeraldOutcome> {
    let (success, _) = bob_branches(&params.src, params.cutoff);
    if success.is_empty() {
        return Err(Error::DegenerateHerald(
            "zero-weight herald (lambda = 0?)".into(),
        ));
    }
    let branches = propagate_to_charlie(params, success, params.loss.eta_a2, params.loss.eta_b2)?;
    let (n_a2, n_b2) = detector_pattern(params.charlie_sign);
    let d = params.cutoff + 1;
    let mut rho: DMatrix<C64> = DMatrix::zeros(d * d, d * d);
    let mut prob = 0.0;
    for v in &branches {
        let sub = collapse_charlie(v, n_a2, n_b2, params.cutoff);
        prob += sub.norm_squared();
        rho += &sub * sub.adjoint();
    }
    if prob <= 1e-30 {
        return Err(Error::DegenerateHerald(format!(
            "herald branch probability {prob} is numerically zero"
        )));
    }
    let state = FockDensityOperator::new_unchecked(2, params.cutoff, rho / C64::new(prob, 0.0));
    Ok(HeraldOutcome {
        state,
        success_probability: prob,
        detector: params.charlie_sign,
    })
}

/// Click/no-click statistics of displacement measurements D(−α), D(−β)
/// with per-mode detection efficiency `eta_d` on a normalized two-mode
/// state.
pub fn click_statistics(
    state: &FockDensityOperator,
    alpha: C64,
    beta: C64,
    eta_d: f64,
) -> Result<ClickStatistics> {
    let cutoff = state.cutoff();
    let d = cutoff + 1;
    let da = displacement_matrix(-alpha, cutoff);
    let db = displacement_matrix(-beta, cutoff);
    let m = apply_conj_two(&da, &db, state.matrix(), d);
    let mut rho = FockDensityOperator::new_unchecked(2, cutoff, m);
    for mode in 0..2 {
        rho = rho.apply_loss(&fock::LossChannel::new(eta_d, mode)?)?;
    }
    let m = rho.matrix();
    let mut q_ab = 0.0;
    let mut q_a = 0.0;
    let mut q_b = 0.0;
    for idx in 0..d * d {
        let (na, nb) = (idx / d, idx % d);
        let p = m[(idx, idx)].re;
        if na == 0 {
            q_a += p;
        }
        if nb == 0 {
            q_b += p;
        }
        if na == 0 && nb == 0 {
            q_ab += p;
        }
    }
    let stats = ClickStatistics {
        p00: q_ab,
        p0n: q_a - q_ab,
        pn0: q_b - q_ab,
        pnn: 1.0 - q_a - q_b + q_ab,
    };
    if (stats.sum() - 1.0).abs() > 1e-8 {
        return Err(Error::InconsistentProbabilities(format!(
            "click statistics sum to {}",
            stats.sum()
        )));
    }
    Ok(stats)
}

fn apply_conj_two(da: &DMatrix<C64>, db: &DMatrix<C64>, m: &DMatrix<C64>, d: usize) -> DMatrix<C64> {
    // (D_a ⊗ D_b) m (D_a ⊗ D_b)† on a two-mode matrix of dimension d².
    let mut full = DMatrix::zeros(d * d, d * d);
    for i0 in 0..d {
        for j0 in 0..d {
            let f = da[(i0, j0)];
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for i1 in 0..d {
                for j1 in 0..d {
                    full[(i0 * d + i1, j0 * d + j1)] = f * db[(i1, j1)];
                }
            }
        }
    }
    &full * m * full.adjoint()
}

/// Simulated CHSH run: herald, then the four displacement settings.
pub fn measure_chsh_sim(
    params: &ProtocolParams,
    settings: &crate::analytic::MeasurementSettings,
    eta_d: f64,
) -> Result<ChshReport> {
    let outcome = herald(params)?;
    chsh_from_heralded(&outcome.state, settings, eta_d)
}

/// CHSH from an already-heralded normalized two-mode state.
pub fn chsh_from_heralded(
    state: &FockDensityOperator,
    settings: &crate::analytic::MeasurementSettings,
    eta_d: f64,
) -> Result<ChshReport> {
    let al = settings.alphas();
    let be = settings.betas();
    let mut q_ab = [0.0; 4];
    let mut q_a = [0.0; 2];
    let mut q_b = [0.0; 2];
    let mut e = [0.0; 4];
    for i in 0..2 {
        for j in 0..2 {
            let stats = click_statistics(
                state,
                C64::from_polar(al[i].abs(), if al[i] < 0.0 { std::f64::consts::PI } else { 0.0 } + settings.phi_alpha),
                C64::from_polar(be[j].abs(), if be[j] < 0.0 { std::f64::consts::PI } else { 0.0 } + settings.phi_beta),
                eta_d,
            )?;
            let (qab, qa, qb) = (stats.p00, stats.p00 + stats.p0n, stats.p00 + stats.pn0);
            if qab > qa.min(qb) + 1e-9 {
                return Err(Error::InconsistentProbabilities(format!(
                    "Q_ab = {qab} exceeds a marginal"
                )));
            }
            q_ab[i * 2 + j] = qab;
            q_a[i] = qa;
            q_b[j] = qb;
            e[i * 2 + j] = correlation_coefficient(qab, qa, qb);
        }
    }
    let s = e[0] + e[1] + e[2] - e[3];
    Ok(ChshReport {
        s,
        e,
        q_ab,
        q_a,
        q_b,
        provenance: Provenance::Simulated,
    })
}

/// Per-pulse probability of a successful Bell-state measurement at Charlie:
/// exactly one photon detected across his two detectors, with per-arm
/// transmission √η_C, computed from the full circuit (Bob's source entering
/// unconditioned, i.e. herald-success and herald-failure branches alike).
///
/// Agrees with the closed form √η_C(P_A+P_B) − 2η_C P_A P_B up to O(λ⁴)
/// multi-photon corrections.
pub fn success_probability_sim(params: &ProtocolParams) -> Result<f64> {
    let eta_c = params.loss.eta_c;
    if eta_c == 0.0 {
        return Ok(0.0);
    }
    let arm = eta_c.sqrt();
    let (mut bob, mut fail) = bob_branches(&params.src, params.cutoff);
    bob.append(&mut fail);
    if bob.is_empty() {
        return Ok(0.0);
    }
    let branches = propagate_to_charlie(params, bob, arm, arm)?;
    let mut total = 0.0;
    for v in &branches {
        for (n_a2, n_b2) in [(1, 0), (0, 1)] {
            total += collapse_charlie(v, n_a2, n_b2, params.cutoff).norm_squared();
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{self, MeasurementSettings};
    use crate::fock::make_sppe;
    use approx::assert_abs_diff_eq;

    fn simple_params(g: f64, t_b: f64, eta_h: f64, eta_d: f64) -> ProtocolParams {
        let src = SourceParams::simple(g, t_b).unwrap();
        let loss = LossParams::symmetric(eta_h, eta_d).unwrap();
        ProtocolParams::new(src, loss, 6).unwrap()
    }

    #[test]
    fn prepared_bob_state_is_split_single_photon_at_perfect_heralding() {
        // With η_s = 1 the success herald tags exactly one pair, so Bob's
        // reduced state is the pure split single photon with weight
        // P_s = (1−λ²)λ².
        let params = simple_params(0.3, 0.28, 1.0, 1.0);
        let rho = prepare_sources(&params).unwrap();
        let l2 = params.src.lambda() * params.src.lambda();
        let p_s = (1.0 - l2) * l2;
        // Alice's TMSV carries the λ^14 truncation deficit.
        assert_abs_diff_eq!(rho.trace(), p_s, epsilon = 1e-8);
        let bob = rho.partial_trace(&[2, 3]).unwrap();
        let sppe = make_sppe(0.28, 0.0, 6).unwrap().to_density();
        for i in 0..bob.dim() {
            for j in 0..bob.dim() {
                assert_abs_diff_eq!(
                    (bob.matrix()[(i, j)] / C64::new(p_s, 0.0) - sppe.matrix()[(i, j)]).norm(),
                    0.0,
                    epsilon = 1e-7
                );
            }
        }
        // Alice's two-pair weight sits where it should.
        let alice = rho.partial_trace(&[0, 1]).unwrap();
        let idx = encode_occupation(&[1, 1], 6);
        assert_abs_diff_eq!(
            alice.matrix()[(idx, idx)].re / p_s,
            (1.0 - l2) * l2,
            epsilon = 1e-7
        );
    }

    #[test]
    fn herald_matches_closed_form_qubit_block() {
        // The (a₁, b₁) qubit block of the simulated heralded state matches
        // the closed-form construction at low gain, for both detectors and
        // with heralding loss.
        for (g, t_b, eta_h, sign) in [
            (0.2, 0.28, 1.0, Sign::Plus),
            (0.2, 0.28, 1.0, Sign::Minus),
            (0.25, 0.5, 0.85, Sign::Plus),
        ] {
            let params = simple_params(g, t_b, eta_h, 1.0).with_sign(sign);
            let out = herald(&params).unwrap();
            let reference =
                analytic::heralded_state_general(&params.src, eta_h, eta_h, sign).unwrap();
            let d = 7;
            let block = |na: usize, nb: usize, ma: usize, mb: usize| {
                out.state.matrix()[(na * d + nb, ma * d + mb)]
            };
            // Renormalize the simulated block to the qubit sector: higher
            // pair emissions contribute O(λ⁴).
            let qubit_trace = block(0, 0, 0, 0).re + block(0, 1, 0, 1).re
                + block(1, 0, 1, 0).re + block(1, 1, 1, 1).re;
            let l2 = params.src.lambda() * params.src.lambda();
            let tol = 6.0 * l2 * l2;
            for (i, (na, nb)) in [(0usize, (0usize, 0usize)), (1, (0, 1)), (2, (1, 0)), (3, (1, 1))]
            {
                for (j, (ma, mb)) in
                    [(0usize, (0usize, 0usize)), (1, (0, 1)), (2, (1, 0)), (3, (1, 1))]
                {
                    assert_abs_diff_eq!(
                        (block(na, nb, ma, mb) / C64::new(qubit_trace, 0.0)
                            - reference.matrix[(i, j)])
                        .norm(),
                        0.0,
                        epsilon = tol
                    );
                }
            }
        }
    }

    #[test]
    fn herald_success_probability_semantics() {
        // The reported probability is the pre-normalization branch trace:
        // Bob's preparation weight times the detector-pattern weight.
        let params = simple_params(0.3, 0.28, 1.0, 1.0);
        let out = herald(&params).unwrap();
        assert!(out.success_probability > 0.0 && out.success_probability < 1.0);
        assert_abs_diff_eq!(out.state.trace(), 1.0, epsilon = 1e-10);
        assert_eq!(out.detector, Sign::Plus);
        // Both detector patterns together carry the full exactly-one-photon
        // weight: P_s (1−λ²)(t_b + λ²(1−t_b)) at the qubit level (photon
        // from Bob with t_b, or one Alice pair with its twin retained).
        let minus = herald(&params.with_sign(Sign::Minus)).unwrap();
        let l2 = params.src.lambda() * params.src.lambda();
        let p_s = (1.0 - l2) * l2;
        let t_b = params.src.t_b;
        let expect = p_s * (1.0 - l2) * (t_b + l2 * (1.0 - t_b));
        let both = out.success_probability + minus.success_probability;
        assert!(
            (both - expect).abs() / expect < 6.0 * l2,
            "sum {both} vs qubit-level {expect}"
        );
    }

    #[test]
    fn herald_rejects_zero_gain() {
        let src = SourceParams::simple(0.0, 0.28).unwrap();
        let loss = LossParams::detection_only(1.0).unwrap();
        let params = ProtocolParams::new(src, loss, 6).unwrap();
        assert!(matches!(herald(&params), Err(Error::DegenerateHerald(_))));
    }

    #[test]
    fn click_statistics_are_a_distribution() {
        let params = simple_params(0.3, 0.28, 0.9, 1.0);
        let out = herald(&params).unwrap();
        for &(a, b, eta) in &[(0.165, -0.56, 1.0), (0.0, 0.0, 0.75), (0.4, 0.4, 0.5)] {
            let stats =
                click_statistics(&out.state, C64::new(a, 0.0), C64::new(b, 0.0), eta).unwrap();
            assert_abs_diff_eq!(stats.sum(), 1.0, epsilon = 1e-8);
            for p in [stats.p00, stats.p0n, stats.pn0, stats.pnn] {
                assert!(p >= -1e-10, "negative probability {p}");
            }
        }
    }

    #[test]
    fn simulated_chsh_matches_analytic_at_ideal_heralding() {
        let params = simple_params(0.3, 0.28, 1.0, 1.0);
        let settings = MeasurementSettings::new(0.165, -0.56, -0.165, 0.56).unwrap();
        let sim = measure_chsh_sim(&params, &settings, 1.0).unwrap();
        let ana = analytic::chsh(&params.src, 1.0, &settings).unwrap();
        assert!((sim.s - ana.s).abs() < 5e-3, "sim {} ana {}", sim.s, ana.s);
        for k in 0..4 {
            assert!((sim.q_ab[k] - ana.q_ab[k]).abs() < 1e-3);
        }
        assert_eq!(sim.provenance, Provenance::Simulated);
    }

    #[test]
    fn zero_detection_efficiency_gives_classical_boundary() {
        let params = simple_params(0.3, 0.28, 1.0, 1.0);
        let settings = MeasurementSettings::new(0.165, -0.56, -0.165, 0.56).unwrap();
        let rep = measure_chsh_sim(&params, &settings, 0.0).unwrap();
        assert_abs_diff_eq!(rep.s, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn success_probability_sim_tracks_closed_form() {
        // Closed form √η_C(P_A+P_B) − 2η_C P_A P_B; the circuit includes
        // O(λ⁴) multi-photon events the closed form drops.
        let closed = |l2: f64, t_b: f64, eta_c: f64| {
            let pa = l2 / (1.0 + l2);
            let pb = t_b * l2 / (1.0 + l2);
            eta_c.sqrt() * (pa + pb) - 2.0 * eta_c * pa * pb
        };
        // Frozen closed-form values at g = 0.33, t_b = 0.8.
        let l2 = 0.33f64.tanh().powi(2);
        assert_abs_diff_eq!(closed(l2, 0.8, 1.0), 0.152223771385, epsilon = 1e-12);
        assert_abs_diff_eq!(closed(l2, 0.8, 0.01), 0.016444119570, epsilon = 1e-12);

        let mut params = simple_params(0.33, 0.8, 1.0, 1.0);
        params.loss.eta_c = 1.0;
        let sim = success_probability_sim(&params).unwrap();
        let reference = closed(l2, 0.8, 1.0);
        assert!(
            (sim - reference).abs() / reference < 5e-3,
            "sim {sim} vs {reference}"
        );
        // The discrepancy is bounded by an O(λ⁴) envelope across η_C.
        for eta_c in [1.0, 0.25, 0.01] {
            params.loss.eta_c = eta_c;
            let sim = success_probability_sim(&params).unwrap();
            assert!(
                (sim - closed(l2, 0.8, eta_c)).abs() <= 5.0 * l2 * l2,
                "eta_c {eta_c}: gap {}",
                (sim - closed(l2, 0.8, eta_c)).abs()
            );
        }
        // At low gain the relative agreement tightens well under 2%.
        let mut low = simple_params(0.1, 0.8, 1.0, 1.0);
        low.loss.eta_c = 0.01;
        let l2 = 0.1f64.tanh().powi(2);
        let sim = success_probability_sim(&low).unwrap();
        let reference = closed(l2, 0.8, 0.01);
        assert!((sim - reference).abs() / reference < 0.02);

        // η_C = 0 short-circuits.
        params.loss.eta_c = 0.0;
        assert_eq!(success_probability_sim(&params).unwrap(), 0.0);
    }

    #[test]
    fn cutoff_validation() {
        let src = SourceParams::simple(0.3, 0.28).unwrap();
        let loss = LossParams::detection_only(1.0).unwrap();
        assert!(ProtocolParams::new(src, loss, 1).is_err());
        let zero_gain = SourceParams::simple(0.0, 0.28).unwrap();
        assert!(ProtocolParams::new(zero_gain, loss, 1).is_ok());
    }
}

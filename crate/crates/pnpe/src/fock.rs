//! Truncated multimode Fock-space linear algebra: states, channels and
//! measurements underlying every circuit-level computation.
//!
//! Basis ordering contract (frozen): a multimode occupation `(n_0, …, n_k)`
//! maps to the flat index `((n_0·d + n_1)·d + …)·d + n_k` with
//! `d = cutoff + 1`, i.e. mode 0 is the most significant digit. All index
//! math flows through [`encode_occupation`] / [`decode_occupation`].
//!
//! Beamsplitter sign convention (frozen, documented once here): a splitter
//! of transmittance `t` maps creation operators as
//!
//! ```text
//! a† -> √t a† + √(1−t) b†
//! b† -> √(1−t) a† − √t b†
//! ```
//!
//! which is an involution (applying the same splitter twice is the
//! identity). Every sign-sensitive test references this convention.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Factorial as f64; exact for the photon numbers used here (n ≤ 20).
pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Binomial coefficient as f64.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Generalized Laguerre polynomial L_n^{(k)}(x) by its finite sum.
pub fn laguerre(n: usize, k: usize, x: f64) -> f64 {
    let mut sum = 0.0;
    let mut sign = 1.0;
    for i in 0..=n {
        sum += sign * binomial(n + k, n - i) * x.powi(i as i32) / factorial(i);
        sign = -sign;
    }
    sum
}

/// Flat index of an occupation-number tuple (mode 0 most significant).
pub fn encode_occupation(occ: &[usize], cutoff: usize) -> usize {
    let d = cutoff + 1;
    occ.iter().fold(0, |acc, &n| {
        debug_assert!(n <= cutoff);
        acc * d + n
    })
}

/// Occupation-number tuple of a flat index.
pub fn decode_occupation(index: usize, mode_count: usize, cutoff: usize) -> Vec<usize> {
    let d = cutoff + 1;
    let mut occ = vec![0; mode_count];
    let mut rem = index;
    for m in (0..mode_count).rev() {
        occ[m] = rem % d;
        rem /= d;
    }
    occ
}

/// Exact single-mode displacement matrix ⟨m|D(α)|n⟩ on the truncated basis,
/// built from the analytic Laguerre-polynomial matrix elements
/// ⟨m|D(α)|n⟩ = √(n!/m!) α^{m−n} e^{−|α|²/2} L_n^{(m−n)}(|α|²) for m ≥ n.
pub fn displacement_matrix(alpha: C64, cutoff: usize) -> DMatrix<C64> {
    let d = cutoff + 1;
    let a2 = alpha.norm_sqr();
    let gauss = (-a2 / 2.0).exp();
    let mut m = DMatrix::zeros(d, d);
    for row in 0..d {
        for col in 0..d {
            m[(row, col)] = if row >= col {
                (factorial(col) / factorial(row)).sqrt()
                    * alpha.powu((row - col) as u32)
                    * gauss
                    * laguerre(col, row - col, a2)
            } else {
                (factorial(row) / factorial(col)).sqrt()
                    * (-alpha.conj()).powu((col - row) as u32)
                    * gauss
                    * laguerre(row, col - row, a2)
            };
        }
    }
    m
}

/// Two-mode beamsplitter matrix of transmittance `t` on the pair index
/// `p·d + q` (photon numbers of the two coupled modes). Components that
/// would overflow the per-mode cutoff are dropped; the caller can detect the
/// loss as a norm deficit.
pub fn beamsplitter_matrix(t: f64, cutoff: usize) -> DMatrix<C64> {
    let d = cutoff + 1;
    let rt = t.sqrt();
    let rr = (1.0 - t).sqrt();
    let mut bs = DMatrix::zeros(d * d, d * d);
    for m in 0..d {
        for n in 0..d {
            // |m,n⟩ -> (√t a† + √(1−t) b†)^m (√(1−t) a† − √t b†)^n |0,0⟩ / √(m! n!)
            for j in 0..=m {
                for k in 0..=n {
                    let p = j + k;
                    let q = (m - j) + (n - k);
                    if p >= d || q >= d {
                        continue;
                    }
                    let mut amp = binomial(m, j)
                        * rt.powi(j as i32)
                        * rr.powi((m - j) as i32)
                        * binomial(n, k)
                        * rr.powi(k as i32)
                        * (-rt).powi((n - k) as i32);
                    amp *= (factorial(p) * factorial(q)).sqrt()
                        / (factorial(m) * factorial(n)).sqrt();
                    bs[(p * d + q, m * d + n)] += C64::new(amp, 0.0);
                }
            }
        }
    }
    bs
}

/// Photon-loss channel of transmittance `eta` acting on one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossChannel {
    pub eta: f64,
    pub mode: usize,
}

impl LossChannel {
    pub fn new(eta: f64, mode: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter(format!(
                "loss transmittance eta={eta} outside [0,1]"
            )));
        }
        Ok(Self { eta, mode })
    }

    /// Kraus family K_k with ⟨n−k|K_k|n⟩ = √C(n,k) √(η^{n−k} (1−η)^k).
    pub fn kraus_operators(&self, cutoff: usize) -> Vec<DMatrix<C64>> {
        loss_kraus(self.eta, cutoff)
    }
}

/// Kraus operators of the photon-loss channel on the truncated basis.
pub fn loss_kraus(eta: f64, cutoff: usize) -> Vec<DMatrix<C64>> {
    let d = cutoff + 1;
    (0..d)
        .map(|k| {
            let mut op = DMatrix::zeros(d, d);
            for n in k..d {
                let amp =
                    binomial(n, k).sqrt() * (eta.powi((n - k) as i32) * (1.0 - eta).powi(k as i32)).sqrt();
                op[(n - k, n)] = C64::new(amp, 0.0);
            }
            op
        })
        .collect()
}

/// Pure multimode state on the truncated Fock basis.
///
/// Sub-unit norms are meaningful: they represent heralded branches whose
/// squared norm is the branch probability.
#[derive(Debug, Clone)]
pub struct FockStateVector {
    mode_count: usize,
    cutoff: usize,
    amplitudes: DVector<C64>,
}

impl FockStateVector {
    pub fn new(mode_count: usize, cutoff: usize, amplitudes: DVector<C64>) -> Result<Self> {
        if mode_count == 0 || cutoff == 0 {
            return Err(Error::InvalidParameter(
                "mode_count and cutoff must be positive".into(),
            ));
        }
        let dim = (cutoff + 1).pow(mode_count as u32);
        if amplitudes.len() != dim {
            return Err(Error::InvalidParameter(format!(
                "amplitude length {} != (cutoff+1)^mode_count = {dim}",
                amplitudes.len()
            )));
        }
        let n2 = amplitudes.norm_squared();
        if n2 <= 0.0 || n2 > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "squared norm {n2} outside (0, 1+1e-12]"
            )));
        }
        Ok(Self {
            mode_count,
            cutoff,
            amplitudes,
        })
    }

    /// Same as [`Self::new`] but without the norm-window check, for internal
    /// intermediate branches (e.g. Kraus branches of near-zero weight).
    pub(crate) fn new_unchecked(mode_count: usize, cutoff: usize, amplitudes: DVector<C64>) -> Self {
        Self {
            mode_count,
            cutoff,
            amplitudes,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Amplitude at a given occupation tuple.
    pub fn amplitude(&self, occ: &[usize]) -> C64 {
        self.amplitudes[encode_occupation(occ, self.cutoff)]
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// Tensor product `self ⊗ other` (self's modes become most significant).
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.cutoff != other.cutoff {
            return Err(Error::InvalidParameter("cutoff mismatch in tensor".into()));
        }
        let mut amps = DVector::zeros(self.dim() * other.dim());
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for (j, b) in other.amplitudes.iter().enumerate() {
                amps[i * other.dim() + j] = a * b;
            }
        }
        Ok(Self::new_unchecked(
            self.mode_count + other.mode_count,
            self.cutoff,
            amps,
        ))
    }

    /// Apply a single-mode operator (d×d matrix) to `mode`.
    pub fn apply_one_mode(&self, op: &DMatrix<C64>, mode: usize) -> Self {
        let d = self.cutoff + 1;
        debug_assert_eq!(op.nrows(), d);
        let stride = d.pow((self.mode_count - 1 - mode) as u32);
        let block = stride * d;
        let dim = self.dim();
        let mut out = DVector::zeros(dim);
        let mut base = 0;
        while base < dim {
            for inner in 0..stride {
                let off = base + inner;
                for m in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for n in 0..d {
                        let x = self.amplitudes[off + n * stride];
                        if x.norm_sqr() != 0.0 {
                            acc += op[(m, n)] * x;
                        }
                    }
                    out[off + m * stride] = acc;
                }
            }
            base += block;
        }
        Self::new_unchecked(self.mode_count, self.cutoff, out)
    }

    /// Apply a two-mode operator (d²×d² matrix on the pair index
    /// `n_i·d + n_j`) to modes `(mode_i, mode_j)`.
    pub fn apply_two_mode(&self, op: &DMatrix<C64>, mode_i: usize, mode_j: usize) -> Self {
        let d = self.cutoff + 1;
        let si = d.pow((self.mode_count - 1 - mode_i) as u32);
        let sj = d.pow((self.mode_count - 1 - mode_j) as u32);
        let dim = self.dim();
        let mut out = DVector::zeros(dim);
        for t in 0..dim {
            let ni = (t / si) % d;
            let nj = (t / sj) % d;
            if ni != 0 || nj != 0 {
                continue;
            }
            // `t` indexes a fixed configuration of the spectator modes.
            for mi in 0..d {
                for mj in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for ni_in in 0..d {
                        for nj_in in 0..d {
                            let x = self.amplitudes[t + ni_in * si + nj_in * sj];
                            if x.norm_sqr() != 0.0 {
                                acc += op[(mi * d + mj, ni_in * d + nj_in)] * x;
                            }
                        }
                    }
                    out[t + mi * si + mj * sj] = acc;
                }
            }
        }
        Self::new_unchecked(self.mode_count, self.cutoff, out)
    }

    /// Beamsplitter of transmittance `t_c` between two modes, using the
    /// module-level sign convention.
    pub fn apply_beamsplitter(&self, mode_i: usize, mode_j: usize, t_c: f64) -> Result<Self> {
        check_modes(self.mode_count, mode_i, mode_j)?;
        check_unit_interval(t_c, "beamsplitter transmittance")?;
        Ok(self.apply_two_mode(&beamsplitter_matrix(t_c, self.cutoff), mode_i, mode_j))
    }

    /// Displacement D(alpha) on one mode.
    pub fn apply_displacement(&self, mode: usize, alpha: C64) -> Result<Self> {
        check_displacement(alpha)?;
        Ok(self.apply_one_mode(&displacement_matrix(alpha, self.cutoff), mode))
    }

    /// Density operator |self⟩⟨self| (weight = squared norm).
    pub fn to_density(&self) -> FockDensityOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        FockDensityOperator {
            mode_count: self.mode_count,
            cutoff: self.cutoff,
            matrix: m,
        }
    }
}

/// Dense multimode density operator. The trace ("weight") is the probability
/// of the branch that produced this state, so it may be below 1.
#[derive(Debug, Clone)]
pub struct FockDensityOperator {
    mode_count: usize,
    cutoff: usize,
    matrix: DMatrix<C64>,
}

impl FockDensityOperator {
    pub fn new(mode_count: usize, cutoff: usize, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = (cutoff + 1).pow(mode_count as u32);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidParameter(format!(
                "matrix dimension {}x{} != {dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let out = Self {
            mode_count,
            cutoff,
            matrix,
        };
        if out.hermiticity_defect() > 1e-10 {
            return Err(Error::InvalidParameter(
                "matrix not Hermitian within 1e-10".into(),
            ));
        }
        let tr = out.trace();
        if tr <= 0.0 || tr > 1.0 + 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "trace {tr} outside (0, 1+1e-10]"
            )));
        }
        Ok(out)
    }

    pub(crate) fn new_unchecked(mode_count: usize, cutoff: usize, matrix: DMatrix<C64>) -> Self {
        Self {
            mode_count,
            cutoff,
            matrix,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|c| c.re).sum()
    }

    /// Branch probability carried by this operator (= trace).
    pub fn weight(&self) -> f64 {
        self.trace()
    }

    /// Max elementwise |M − M†|.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in i..self.dim() {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Minimum eigenvalue (Hermitian part). O(dim³); intended for
    /// validation on small mode counts.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(herm);
        eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Rescale to unit trace.
    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if tr <= 0.0 {
            return Err(Error::DegenerateHerald("zero-trace state".into()));
        }
        Ok(Self::new_unchecked(
            self.mode_count,
            self.cutoff,
            &self.matrix / C64::new(tr, 0.0),
        ))
    }

    fn conjugate_by_one_mode(&self, op: &DMatrix<C64>, mode: usize) -> DMatrix<C64> {
        // (A ρ A†) via two mode-local row applications.
        let half = left_apply_one_mode(op, &self.matrix, mode, self.mode_count, self.cutoff);
        let conj = op.conjugate();
        left_apply_one_mode(&conj, &half.transpose(), mode, self.mode_count, self.cutoff)
            .transpose()
    }

    fn conjugate_by_two_mode(&self, op: &DMatrix<C64>, mode_i: usize, mode_j: usize) -> DMatrix<C64> {
        let half = left_apply_two_mode(op, &self.matrix, mode_i, mode_j, self.mode_count, self.cutoff);
        let conj = op.conjugate();
        left_apply_two_mode(
            &conj,
            &half.transpose(),
            mode_i,
            mode_j,
            self.mode_count,
            self.cutoff,
        )
        .transpose()
    }

    /// Beamsplitter of transmittance `t_c` between two modes.
    pub fn apply_beamsplitter(&self, mode_i: usize, mode_j: usize, t_c: f64) -> Result<Self> {
        check_modes(self.mode_count, mode_i, mode_j)?;
        check_unit_interval(t_c, "beamsplitter transmittance")?;
        let m = self.conjugate_by_two_mode(&beamsplitter_matrix(t_c, self.cutoff), mode_i, mode_j);
        Ok(Self::new_unchecked(self.mode_count, self.cutoff, m))
    }

    /// Displacement D(alpha) on one mode.
    pub fn apply_displacement(&self, mode: usize, alpha: C64) -> Result<Self> {
        check_displacement(alpha)?;
        let m = self.conjugate_by_one_mode(&displacement_matrix(alpha, self.cutoff), mode);
        Ok(Self::new_unchecked(self.mode_count, self.cutoff, m))
    }

    /// Photon-loss channel Σ_k K_k ρ K_k† on one mode.
    pub fn apply_loss(&self, channel: &LossChannel) -> Result<Self> {
        if channel.mode >= self.mode_count {
            return Err(Error::InvalidParameter("loss mode out of range".into()));
        }
        if channel.eta == 1.0 {
            return Ok(self.clone());
        }
        let mut acc: DMatrix<C64> = DMatrix::zeros(self.dim(), self.dim());
        for k in channel.kraus_operators(self.cutoff) {
            acc += self.conjugate_by_one_mode(&k, channel.mode);
        }
        Ok(Self::new_unchecked(self.mode_count, self.cutoff, acc))
    }

    /// Partial trace keeping the listed modes (in the given order).
    pub fn partial_trace(&self, keep_modes: &[usize]) -> Result<Self> {
        if keep_modes.is_empty() {
            return Err(Error::InvalidParameter("empty keep list".into()));
        }
        for &m in keep_modes {
            if m >= self.mode_count {
                return Err(Error::InvalidParameter("keep mode out of range".into()));
            }
        }
        let d = self.cutoff + 1;
        let traced: Vec<usize> = (0..self.mode_count)
            .filter(|m| !keep_modes.contains(m))
            .collect();
        let out_dim = d.pow(keep_modes.len() as u32);
        let mut out = DMatrix::zeros(out_dim, out_dim);
        let dim = self.dim();
        for row in 0..dim {
            let occ_r = decode_occupation(row, self.mode_count, self.cutoff);
            for col in 0..dim {
                let v = self.matrix[(row, col)];
                if v.norm_sqr() == 0.0 {
                    continue;
                }
                let occ_c = decode_occupation(col, self.mode_count, self.cutoff);
                if traced.iter().any(|&m| occ_r[m] != occ_c[m]) {
                    continue;
                }
                let sub_r: Vec<usize> = keep_modes.iter().map(|&m| occ_r[m]).collect();
                let sub_c: Vec<usize> = keep_modes.iter().map(|&m| occ_c[m]).collect();
                out[(
                    encode_occupation(&sub_r, self.cutoff),
                    encode_occupation(&sub_c, self.cutoff),
                )] += v;
            }
        }
        Ok(Self::new_unchecked(keep_modes.len(), self.cutoff, out))
    }

    /// Project one mode onto photon number `n` (unnormalized result; its
    /// weight is the branch probability).
    pub fn project_fock(&self, mode: usize, n: usize) -> Result<Self> {
        if mode >= self.mode_count || n > self.cutoff {
            return Err(Error::InvalidParameter("projection out of range".into()));
        }
        let d = self.cutoff + 1;
        let stride = d.pow((self.mode_count - 1 - mode) as u32);
        let dim = self.dim();
        let mut out = self.matrix.clone();
        for row in 0..dim {
            let keep_row = (row / stride) % d == n;
            for col in 0..dim {
                if !keep_row || (col / stride) % d != n {
                    out[(row, col)] = C64::new(0.0, 0.0);
                }
            }
        }
        Ok(Self::new_unchecked(self.mode_count, self.cutoff, out))
    }

    /// Outcome probabilities tr(ρ E_i) of a POVM given as full-dimension
    /// elements. Elements must be PSD and sum to the identity within 1e-8.
    pub fn measure_povm(&self, elements: &[DMatrix<C64>]) -> Result<Vec<f64>> {
        let dim = self.dim();
        let mut sum: DMatrix<C64> = DMatrix::zeros(dim, dim);
        for e in elements {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::InvalidPovm("element dimension mismatch".into()));
            }
            let herm = (e + e.adjoint()) * C64::new(0.5, 0.0);
            let min_eig = nalgebra::SymmetricEigen::new(herm)
                .eigenvalues
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            if min_eig < -1e-9 {
                return Err(Error::InvalidPovm(format!(
                    "element not PSD (min eigenvalue {min_eig})"
                )));
            }
            sum += e;
        }
        let mut defect = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((sum[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        if defect > 1e-8 {
            return Err(Error::InvalidPovm(format!(
                "elements do not sum to identity (defect {defect})"
            )));
        }
        Ok(elements
            .iter()
            .map(|e| (e * &self.matrix).diagonal().iter().map(|c| c.re).sum())
            .collect())
    }
}

fn left_apply_one_mode(
    op: &DMatrix<C64>,
    m: &DMatrix<C64>,
    mode: usize,
    mode_count: usize,
    cutoff: usize,
) -> DMatrix<C64> {
    let d = cutoff + 1;
    let stride = d.pow((mode_count - 1 - mode) as u32);
    let block = stride * d;
    let dim = m.nrows();
    let mut out = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut base = 0;
        while base < dim {
            for inner in 0..stride {
                let off = base + inner;
                for row_out in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for row_in in 0..d {
                        let x = m[(off + row_in * stride, col)];
                        if x.norm_sqr() != 0.0 {
                            acc += op[(row_out, row_in)] * x;
                        }
                    }
                    out[(off + row_out * stride, col)] = acc;
                }
            }
            base += block;
        }
    }
    out
}

fn left_apply_two_mode(
    op: &DMatrix<C64>,
    m: &DMatrix<C64>,
    mode_i: usize,
    mode_j: usize,
    mode_count: usize,
    cutoff: usize,
) -> DMatrix<C64> {
    let d = cutoff + 1;
    let si = d.pow((mode_count - 1 - mode_i) as u32);
    let sj = d.pow((mode_count - 1 - mode_j) as u32);
    let dim = m.nrows();
    let mut out = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        for t in 0..dim {
            let ni = (t / si) % d;
            let nj = (t / sj) % d;
            if ni != 0 || nj != 0 {
                continue;
            }
            for mi in 0..d {
                for mj in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for ni_in in 0..d {
                        for nj_in in 0..d {
                            let x = m[(t + ni_in * si + nj_in * sj, col)];
                            if x.norm_sqr() != 0.0 {
                                acc += op[(mi * d + mj, ni_in * d + nj_in)] * x;
                            }
                        }
                    }
                    out[(t + mi * si + mj * sj, col)] = acc;
                }
            }
        }
    }
    out
}

fn check_modes(mode_count: usize, i: usize, j: usize) -> Result<()> {
    if i == j || i >= mode_count || j >= mode_count {
        return Err(Error::InvalidParameter(format!(
            "invalid mode pair ({i}, {j}) for {mode_count} modes"
        )));
    }
    Ok(())
}

fn check_unit_interval(x: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!("{what} {x} outside [0,1]")));
    }
    Ok(())
}

fn check_displacement(alpha: C64) -> Result<()> {
    if alpha.norm() > 2.0 {
        return Err(Error::InvalidParameter(format!(
            "|alpha| = {} exceeds the guardrail 2",
            alpha.norm()
        )));
    }
    Ok(())
}

/// Two-mode squeezed vacuum √(1−λ²) Σ_{n≤cutoff} λⁿ |n,n⟩ with λ = tanh g.
pub fn make_tmsv(lambda: f64, cutoff: usize) -> Result<FockStateVector> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "lambda {lambda} outside [0,1)"
        )));
    }
    if cutoff == 0 {
        return Err(Error::InvalidParameter(
            "cutoff 0 cannot represent single-photon terms".into(),
        ));
    }
    let d = cutoff + 1;
    let norm = (1.0 - lambda * lambda).sqrt();
    let mut amps = DVector::zeros(d * d);
    for n in 0..d {
        amps[encode_occupation(&[n, n], cutoff)] = C64::new(norm * lambda.powi(n as i32), 0.0);
    }
    FockStateVector::new(2, cutoff, amps)
}

/// Single-photon path-entangled state √t_b |0,1⟩ + √(1−t_b) e^{iφ_b} |1,0⟩.
pub fn make_sppe(t_b: f64, phi_b: f64, cutoff: usize) -> Result<FockStateVector> {
    check_unit_interval(t_b, "splitter transmittance t_b")?;
    if cutoff == 0 {
        return Err(Error::InvalidParameter("cutoff must be positive".into()));
    }
    let d = cutoff + 1;
    let mut amps = DVector::zeros(d * d);
    amps[encode_occupation(&[0, 1], cutoff)] = C64::new(t_b.sqrt(), 0.0);
    amps[encode_occupation(&[1, 0], cutoff)] =
        C64::from_polar((1.0 - t_b).sqrt(), phi_b);
    FockStateVector::new(2, cutoff, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn occupation_roundtrip() {
        let occ = [3, 0, 6, 1];
        let idx = encode_occupation(&occ, 6);
        assert_eq!(decode_occupation(idx, 4, 6), occ.to_vec());
    }

    #[test]
    fn tmsv_zero_squeezing_is_vacuum() {
        let v = make_tmsv(0.0, 6).unwrap();
        assert_eq!(v.amplitude(&[0, 0]), c(1.0));
        assert_abs_diff_eq!(v.norm_squared(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn tmsv_schmidt_amplitudes() {
        let lam = 0.3f64.tanh();
        let v = make_tmsv(lam, 6).unwrap();
        for n in 0..=6usize {
            let expect = (1.0 - lam * lam).sqrt() * lam.powi(n as i32);
            assert_abs_diff_eq!(v.amplitude(&[n, n]).re, expect, epsilon = 1e-15);
        }
        assert_eq!(v.amplitude(&[1, 2]), c(0.0));
    }

    #[test]
    fn tmsv_truncation_deficit_follows_geometric_law() {
        // Deficit at cutoff c is exactly lambda^(2(c+1)).
        for lam in [0.3, 0.45, 0.5f64.tanh()] {
            let v = make_tmsv(lam, 6).unwrap();
            let deficit = 1.0 - v.norm_squared();
            assert_abs_diff_eq!(deficit, lam.powi(14), epsilon = 1e-15);
        }
        // Worst case over the supported squeezing range g <= 0.5.
        let worst = 1.0 - make_tmsv(0.5f64.tanh(), 6).unwrap().norm_squared();
        assert!(worst <= 2.1e-5, "deficit {worst}");
    }

    #[test]
    fn tmsv_rejects_bad_inputs() {
        assert!(make_tmsv(1.0, 6).is_err());
        assert!(make_tmsv(0.2, 0).is_err());
    }

    #[test]
    fn sppe_examples() {
        let v = make_sppe(1.0, 0.0, 6).unwrap();
        assert_eq!(v.amplitude(&[0, 1]), c(1.0));

        let v = make_sppe(0.5, 0.0, 6).unwrap();
        assert_abs_diff_eq!(v.amplitude(&[0, 1]).re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(v.amplitude(&[1, 0]).re, 0.5f64.sqrt(), epsilon = 1e-15);

        let v = make_sppe(0.8, std::f64::consts::PI, 6).unwrap();
        assert_abs_diff_eq!(v.amplitude(&[0, 1]).re, 0.8f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(v.amplitude(&[1, 0]).re, -(0.2f64.sqrt()), epsilon = 1e-15);
        assert_abs_diff_eq!(v.norm_squared(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn beamsplitter_single_photon() {
        let d = 7;
        let mut amps = DVector::zeros(d * d);
        amps[encode_occupation(&[1, 0], 6)] = c(1.0);
        let v = FockStateVector::new(2, 6, amps).unwrap();
        let out = v.apply_beamsplitter(0, 1, 0.5).unwrap();
        assert_abs_diff_eq!(out.amplitude(&[1, 0]).re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitude(&[0, 1]).re, 0.5f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn beamsplitter_t1_is_identity_up_to_mode_j_sign() {
        let d = 7;
        let mut amps = DVector::zeros(d * d);
        amps[encode_occupation(&[1, 1], 6)] = c(0.6);
        amps[encode_occupation(&[0, 1], 6)] = c(0.8);
        let v = FockStateVector::new(2, 6, amps).unwrap();
        let out = v.apply_beamsplitter(0, 1, 1.0).unwrap();
        // b† -> −b†: one photon in mode j flips sign.
        assert_abs_diff_eq!(out.amplitude(&[1, 1]).re, -0.6, epsilon = 1e-15);
        assert_abs_diff_eq!(out.amplitude(&[0, 1]).re, -0.8, epsilon = 1e-15);
    }

    #[test]
    fn beamsplitter_two_photon_expansion() {
        // |1,1⟩ -> √(2t(1−t)) |2,0⟩ + (1−2t) |1,1⟩ − √(2t(1−t)) |0,2⟩.
        let t = 0.3;
        let d = 7;
        let mut amps = DVector::zeros(d * d);
        amps[encode_occupation(&[1, 1], 6)] = c(1.0);
        let v = FockStateVector::new(2, 6, amps).unwrap();
        let out = v.apply_beamsplitter(0, 1, t).unwrap();
        let x = (2.0 * t * (1.0 - t)).sqrt();
        assert_abs_diff_eq!(out.amplitude(&[2, 0]).re, x, epsilon = 1e-14);
        assert_abs_diff_eq!(out.amplitude(&[1, 1]).re, 1.0 - 2.0 * t, epsilon = 1e-14);
        assert_abs_diff_eq!(out.amplitude(&[0, 2]).re, -x, epsilon = 1e-14);
    }

    #[test]
    fn beamsplitter_heralding_branch_pattern() {
        // Qubit product input (a₀|0⟩+a₁|1⟩)ᵃ(b₀|0⟩+b₁|1⟩)ᵇ: after the
        // central splitter the single-photon branches carry
        // |1,0⟩: a₁b₀√t + a₀b₁√(1−t), |0,1⟩: a₁b₀√(1−t) − a₀b₁√t.
        let (a0, a1) = (0.8, 0.6);
        let (b0, b1) = (0.6, 0.8);
        let t = 0.7;
        let d = 7;
        let mut amps = DVector::zeros(d * d);
        amps[encode_occupation(&[0, 0], 6)] = c(a0 * b0);
        amps[encode_occupation(&[0, 1], 6)] = c(a0 * b1);
        amps[encode_occupation(&[1, 0], 6)] = c(a1 * b0);
        amps[encode_occupation(&[1, 1], 6)] = c(a1 * b1);
        let v = FockStateVector::new(2, 6, amps).unwrap();
        let out = v.apply_beamsplitter(0, 1, t).unwrap();
        assert_abs_diff_eq!(
            out.amplitude(&[1, 0]).re,
            a1 * b0 * t.sqrt() + a0 * b1 * (1.0 - t).sqrt(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            out.amplitude(&[0, 1]).re,
            a1 * b0 * (1.0 - t).sqrt() - a0 * b1 * t.sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn beamsplitter_is_involution_within_cutoff() {
        let lam = 0.4;
        let v = make_tmsv(lam, 6).unwrap();
        let twice = v
            .apply_beamsplitter(0, 1, 0.37)
            .unwrap()
            .apply_beamsplitter(0, 1, 0.37)
            .unwrap();
        // Photon sums above the cutoff are truncated, so compare on the
        // preserved sector n_a + n_b <= 6.
        for na in 0..=6usize {
            for nb in 0..=(6 - na) {
                assert_abs_diff_eq!(
                    (twice.amplitude(&[na, nb]) - v.amplitude(&[na, nb])).norm(),
                    0.0,
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn displacement_identity_and_coherent_expansion() {
        let id = displacement_matrix(c(0.0), 6);
        assert_abs_diff_eq!((id[(3, 3)] - c(1.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(id[(2, 5)].norm(), 0.0, epsilon = 1e-15);

        let d = displacement_matrix(c(0.5), 6);
        for n in 0..=6usize {
            let expect = (-0.125f64).exp() * 0.5f64.powi(n as i32) / factorial(n).sqrt();
            assert_abs_diff_eq!(d[(n, 0)].re, expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn displacement_compose_and_unitarity_defects() {
        let alpha = c(0.6);
        let d = displacement_matrix(alpha, 6);
        let dm = displacement_matrix(-alpha, 6);
        let comp = &dm * &d;
        // Truncation limits the round trip on vacuum to ~1.1e-7 at cutoff 6.
        assert!((comp[(0, 0)] - c(1.0)).norm() < 5e-7);

        let prod = d.adjoint() * &d;
        let defect = |limit: usize| -> f64 {
            let mut worst = 0.0f64;
            for i in 0..=limit {
                for j in 0..=limit {
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((prod[(i, j)] - c(target)).norm());
                }
            }
            worst
        };
        // Leakage past the cutoff grows quickly with photon number: the
        // matrix is unitary to 5e-7 on vacuum and to 2e-5 on {|0⟩,|1⟩}.
        assert!(defect(0) < 5e-7, "defect {}", defect(0));
        assert!(defect(1) < 2e-5, "defect {}", defect(1));
    }

    #[test]
    fn displacement_guardrail() {
        let v = make_tmsv(0.2, 6).unwrap();
        assert!(v.apply_displacement(0, c(2.5)).is_err());
    }

    #[test]
    fn loss_examples() {
        let d = 7;
        // Single photon: η|1⟩⟨1| + (1−η)|0⟩⟨0|.
        let mut amps = DVector::zeros(d);
        amps[1] = c(1.0);
        let rho = FockStateVector::new(1, 6, amps).unwrap().to_density();
        let eta = 0.37;
        let out = rho.apply_loss(&LossChannel::new(eta, 0).unwrap()).unwrap();
        assert_abs_diff_eq!(out.matrix()[(1, 1)].re, eta, epsilon = 1e-15);
        assert_abs_diff_eq!(out.matrix()[(0, 0)].re, 1.0 - eta, epsilon = 1e-15);
        assert_abs_diff_eq!(out.trace(), 1.0, epsilon = 1e-12);

        // |1,1⟩ through 0.8 loss on each mode: binomial weights.
        let mut amps = DVector::zeros(d * d);
        amps[encode_occupation(&[1, 1], 6)] = c(1.0);
        let rho = FockStateVector::new(2, 6, amps).unwrap().to_density();
        let out = rho
            .apply_loss(&LossChannel::new(0.8, 0).unwrap())
            .unwrap()
            .apply_loss(&LossChannel::new(0.8, 1).unwrap())
            .unwrap();
        let p = |occ: &[usize]| out.matrix()[(encode_occupation(occ, 6), encode_occupation(occ, 6))].re;
        assert_abs_diff_eq!(p(&[1, 1]), 0.64, epsilon = 1e-12);
        assert_abs_diff_eq!(p(&[1, 0]), 0.16, epsilon = 1e-12);
        assert_abs_diff_eq!(p(&[0, 1]), 0.16, epsilon = 1e-12);
        assert_abs_diff_eq!(p(&[0, 0]), 0.04, epsilon = 1e-12);
    }

    #[test]
    fn loss_kraus_completeness() {
        let kraus = loss_kraus(0.55, 6);
        let mut sum: DMatrix<C64> = DMatrix::zeros(7, 7);
        for k in &kraus {
            sum += k.adjoint() * k;
        }
        for i in 0..7 {
            for j in 0..7 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!((sum[(i, j)] - c(target)).norm(), 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn loss_composition_law() {
        let v = make_tmsv(0.35, 6).unwrap();
        let rho = v.to_density();
        let a = rho
            .apply_loss(&LossChannel::new(0.8, 1).unwrap())
            .unwrap()
            .apply_loss(&LossChannel::new(0.7, 1).unwrap())
            .unwrap();
        let b = rho.apply_loss(&LossChannel::new(0.56, 1).unwrap()).unwrap();
        let mut worst = 0.0f64;
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                worst = worst.max((a.matrix()[(i, j)] - b.matrix()[(i, j)]).norm());
            }
        }
        assert!(worst < 1e-10, "composition defect {worst}");
    }

    #[test]
    fn partial_trace_examples() {
        // Product state: tracing one factor leaves the other.
        let v = make_sppe(0.7, 0.3, 6).unwrap();
        let rho = v.to_density();
        let kept = rho.partial_trace(&[0]).unwrap();
        assert_abs_diff_eq!(kept.matrix()[(0, 0)].re, 0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(kept.matrix()[(1, 1)].re, 0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(kept.trace(), rho.trace(), epsilon = 1e-12);

        // Bell-like state: either marginal is maximally mixed.
        let d = 7;
        let mut amps = DVector::zeros(d * d);
        amps[encode_occupation(&[0, 0], 6)] = c(0.5f64.sqrt());
        amps[encode_occupation(&[1, 1], 6)] = c(0.5f64.sqrt());
        let bell = FockStateVector::new(2, 6, amps).unwrap().to_density();
        for keep in [[0usize], [1]] {
            let m = bell.partial_trace(&keep).unwrap();
            assert_abs_diff_eq!(m.matrix()[(0, 0)].re, 0.5, epsilon = 1e-14);
            assert_abs_diff_eq!(m.matrix()[(1, 1)].re, 0.5, epsilon = 1e-14);
            assert_abs_diff_eq!(m.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-14);
        }

        assert!(bell.partial_trace(&[]).is_err());
    }

    #[test]
    fn project_fock_weight() {
        let d = 7;
        let mut amps = DVector::zeros(d);
        amps[1] = c(1.0);
        let rho = FockStateVector::new(1, 6, amps).unwrap().to_density();
        let proj = rho.project_fock(0, 1).unwrap();
        assert_abs_diff_eq!(proj.weight(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.project_fock(0, 0).unwrap().weight(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn povm_noclick_on_coherent_state() {
        // Coherent |α=0.5⟩ = D(0.5)|0⟩; vacuum projector fires with e^{−0.25}.
        let d = 7;
        let mut amps = DVector::zeros(d);
        amps[0] = c(1.0);
        let coh = FockStateVector::new(1, 6, amps)
            .unwrap()
            .apply_displacement(0, c(0.5))
            .unwrap()
            .to_density();
        let mut pi0: DMatrix<C64> = DMatrix::zeros(d, d);
        pi0[(0, 0)] = c(1.0);
        let pin = DMatrix::identity(d, d) - &pi0;
        let probs = coh.measure_povm(&[pi0, pin]).unwrap();
        assert_abs_diff_eq!(probs[0], (-0.25f64).exp(), epsilon = 1e-7);
        assert_abs_diff_eq!(probs[0] + probs[1], 1.0, epsilon = 1e-7);
    }

    #[test]
    fn povm_rejects_bad_elements() {
        let d = 7;
        let rho = {
            let mut amps = DVector::zeros(d);
            amps[0] = c(1.0);
            FockStateVector::new(1, 6, amps).unwrap().to_density()
        };
        // Not PSD.
        let mut neg: DMatrix<C64> = DMatrix::zeros(d, d);
        neg[(0, 0)] = c(-0.5);
        let complement = DMatrix::identity(d, d) - &neg;
        assert!(rho.measure_povm(&[neg, complement]).is_err());
        // Doesn't sum to identity.
        let half: DMatrix<C64> = DMatrix::identity(d, d) * c(0.5);
        assert!(rho.measure_povm(&[half.clone(), half * c(0.5)]).is_err());
    }

    #[test]
    fn density_validation() {
        let v = make_tmsv(0.3, 6).unwrap();
        let rho = v.to_density();
        let checked = FockDensityOperator::new(2, 6, rho.matrix().clone()).unwrap();
        assert!(checked.hermiticity_defect() <= 1e-10);
        assert!(checked.min_eigenvalue() >= -1e-9);
        // Non-Hermitian rejected.
        let mut bad = rho.matrix().clone();
        bad[(0, 1)] = c(0.3);
        assert!(FockDensityOperator::new(2, 6, bad).is_err());
    }
}

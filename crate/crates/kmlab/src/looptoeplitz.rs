//! Loops as Fourier data.
//!
//! A loop g: S¹ → gl(N) is stored by its coefficients ĝ(k), |k| ≤ K. The
//! Toeplitz block A_M has (i, j) block ĝ(i − j) for 0 ≤ i, j < M and the
//! Hankel block C_M, the H₊ → H₋ corner of multiplication by g, has
//! (p, q) block ĝ(−1 − p − q). For unitary g, A*A + C*C = I on H₊.
//!
//! Also here: the det₂ weights of ν_{β,k}, the abelian Szegő and partition
//! identities, the kernel I_n(δ), the Gaussian translation lemma, the SU(2)
//! heat kernel and a truncated Birkhoff factorization.

use crate::cfunc::{partition_product_truncated, partition_z};
use crate::diagdist::Z_PASS;
use crate::ensembles::{abelian_loop_sample, complex_normal};
use crate::linalg::{ComplexMatrix, LinalgError, C64};
use crate::mc::{run_chunked, RealAccum, StreamKey, WeightedAccum};
use crate::special::{gamma_real, integrate, integrate_panels};
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LoopError {
    #[error("eigenvalue {0} of C*C exceeds 1 (loop not unitary)")]
    ClampViolation(f64),
    #[error("Toeplitz block pivot {0} singular: loop off the top Birkhoff stratum")]
    OffStratum(usize),
    #[error("unitarity defect {0:e} on the test grid")]
    NotUnitary(f64),
    #[error("dimension: {0}")]
    Dimension(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

type Result<T> = std::result::Result<T, LoopError>;

/// Points of the grid used to certify unitarity.
pub const UNITARY_GRID: usize = 512;
/// Largest tolerated ‖g*g − I‖ on that grid for a loop flagged unitary.
pub const UNITARY_TOL: f64 = 1e-6;
/// Eigenvalues of C*C in (1, 1 + CLAMP_ALARM] are clamped to 1.
pub const CLAMP_ALARM: f64 = 1e-6;


#[derive(Clone, Debug)]
pub struct LoopFourier {
    n: usize,
    k: usize,
    coeffs: Vec<ComplexMatrix>,
    unitary: bool,
}

impl LoopFourier {
    /// `coeffs[k + K]` is ĝ(k).
    pub fn new(n: usize, k: usize, coeffs: Vec<ComplexMatrix>) -> Result<Self> {
        if coeffs.len() != 2 * k + 1 {
            return Err(LoopError::Dimension(format!("{} coefficients for cutoff {k}", coeffs.len())));
        }
        if coeffs.iter().any(|c| c.rows() != n || c.cols() != n) {
            return Err(LoopError::Dimension(format!("coefficient blocks must be {n}x{n}")));
        }
        Ok(Self { n, k, coeffs, unitary: false })
    }

    /// Blocks given sparsely as (frequency, ĝ(frequency)).
    pub fn from_blocks(n: usize, blocks: &[(i64, ComplexMatrix)]) -> Result<Self> {
        let k = blocks.iter().map(|(f, _)| f.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![ComplexMatrix::zeros(n, n); 2 * k + 1];
        for (f, b) in blocks {
            if b.rows() != n || b.cols() != n {
                return Err(LoopError::Dimension(format!("coefficient blocks must be {n}x{n}")));
            }
            let slot = &mut coeffs[(*f + k as i64) as usize];
            *slot = &*slot + b;
        }
        Self::new(n, k, coeffs)
    }

    pub fn scalar(terms: &[(i64, C64)]) -> Self {
        let blocks: Vec<_> = terms.iter().map(|&(f, c)| (f, ComplexMatrix::from_diag(&[c]))).collect();
        Self::from_blocks(1, &blocks).expect("1x1 blocks")
    }

    /// Coefficients |k| ≤ K by the discrete Fourier transform of `f` on
    /// `grid` equispaced points. Exact for trigonometric polynomials of
    /// degree ≤ K when grid > 2K.
    pub fn from_fn(n: usize, k: usize, grid: usize, f: impl Fn(f64) -> ComplexMatrix) -> Result<Self> {
        let samples: Vec<ComplexMatrix> = (0..grid).map(|j| f(2.0 * PI * j as f64 / grid as f64)).collect();
        Self::from_samples(n, k, &samples)
    }

    /// As [`LoopFourier::from_fn`] from values on the equispaced grid.
    pub fn from_samples(n: usize, k: usize, samples: &[ComplexMatrix]) -> Result<Self> {
        let l = samples.len();
        if l <= 2 * k {
            return Err(LoopError::Dimension(format!("grid {l} too coarse for cutoff {k}")));
        }
        let mut coeffs = Vec::with_capacity(2 * k + 1);
        for f in -(k as i64)..=(k as i64) {
            let mut c = ComplexMatrix::zeros(n, n);
            for (j, s) in samples.iter().enumerate() {
                // Reduce the phase index mod l to keep the angle small.
                let idx = (f * j as i64).rem_euclid(l as i64);
                let e = C64::from_polar(1.0 / l as f64, -2.0 * PI * idx as f64 / l as f64);
                for a in 0..n {
                    for b in 0..n {
                        c[(a, b)] += s[(a, b)] * e;
                    }
                }
            }
            coeffs.push(c);
        }
        Self::new(n, k, coeffs)
    }

    /// e^{ix(θ)} for the real abelian loop x(θ) = Σ (x_n e^{inθ} + c.c.).
    pub fn exp_i_abelian(x: &[C64], k: usize) -> Self {
        let grid = (4 * k).max(64);
        let g = Self::from_fn(1, k, grid, |t| {
            let v = crate::ensembles::abelian_loop_eval(x, t).re;
            ComplexMatrix::from_diag(&[C64::from_polar(1.0, v)])
        })
        .expect("grid > 2K");
        g.into_unitary().unwrap_or_else(|e| panic!("e^(ix) with cutoff {k}: {e}"))
    }

    pub fn block_size(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> usize {
        self.k
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    /// ĝ(f), zero beyond the cutoff.
    pub fn coeff(&self, f: i64) -> ComplexMatrix {
        if f.unsigned_abs() as usize > self.k {
            ComplexMatrix::zeros(self.n, self.n)
        } else {
            self.coeffs[(f + self.k as i64) as usize].clone()
        }
    }

    fn coeff_ref(&self, f: i64) -> Option<&ComplexMatrix> {
        if f.unsigned_abs() as usize > self.k {
            None
        } else {
            Some(&self.coeffs[(f + self.k as i64) as usize])
        }
    }

    /// ‖ĝ(f)‖²_HS.
    pub fn coeff_hs2(&self, f: i64) -> f64 {
        self.coeff_ref(f).map_or(0.0, |c| c.frobenius_norm().powi(2))
    }

    pub fn eval(&self, theta: f64) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.n, self.n);
        for (i, c) in self.coeffs.iter().enumerate() {
            let e = C64::from_polar(1.0, (i as i64 - self.k as i64) as f64 * theta);
            for a in 0..self.n {
                for b in 0..self.n {
                    out[(a, b)] += c[(a, b)] * e;
                }
            }
        }
        out
    }

    /// max over the 512-point grid of max|g*g − I|.
    pub fn unitarity_defect(&self) -> f64 {
        let id = ComplexMatrix::identity(self.n);
        (0..UNITARY_GRID)
            .map(|j| {
                let g = self.eval(2.0 * PI * j as f64 / UNITARY_GRID as f64);
                (&(&g.adjoint() * &g) - &id).max_abs()
            })
            .fold(0.0, f64::max)
    }

    /// Certifies unitarity on the grid and sets the flag.
    pub fn into_unitary(mut self) -> Result<Self> {
        let d = self.unitarity_defect();
        if d >= UNITARY_TOL {
            return Err(LoopError::NotUnitary(d));
        }
        self.unitary = true;
        Ok(self)
    }

    /// Pointwise product, exact on coefficients (cutoff K₁ + K₂).
    pub fn mul(&self, o: &LoopFourier) -> Result<LoopFourier> {
        if self.n != o.n {
            return Err(LoopError::Dimension("block sizes differ".into()));
        }
        let k = self.k + o.k;
        let mut coeffs = vec![ComplexMatrix::zeros(self.n, self.n); 2 * k + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                let slot = &mut coeffs[i + j];
                *slot = &*slot + &(a * b);
            }
        }
        LoopFourier::new(self.n, k, coeffs)
    }
}

/// Finite section of the block Toeplitz operator.
#[derive(Clone, Debug)]
pub struct ToeplitzTruncation {
    pub m: usize,
    pub a: ComplexMatrix,
}

pub fn toeplitz_truncate(g: &LoopFourier, m: usize) -> ToeplitzTruncation {
    assert!(m >= 1);
    let n = g.n;
    let mut a = ComplexMatrix::zeros(n * m, n * m);
    for i in 0..m {
        for j in 0..m {
            if let Some(c) = g.coeff_ref(i as i64 - j as i64) {
                a.set_block(i * n, j * n, c);
            }
        }
    }
    ToeplitzTruncation { m, a }
}

/// C_M with (p, q) block ĝ(−1 − p − q).
pub fn hankel_block(g: &LoopFourier, m: usize) -> ComplexMatrix {
    assert!(m >= 1);
    let n = g.n;
    let mut c = ComplexMatrix::zeros(n * m, n * m);
    for p in 0..m {
        for q in 0..m {
            if let Some(b) = g.coeff_ref(-1 - (p + q) as i64) {
                c.set_block(p * n, q * n, b);
            }
        }
    }
    c
}

#[derive(Clone, Debug, Serialize)]
pub struct HankelTraceReport {
    /// tr C_M*C_M.
    pub trace: f64,
    /// Σ_{n>0} n‖ĝ(−n)‖², the implemented orientation.
    pub sum_negative: f64,
    /// Σ_{n>0} n‖ĝ(n)‖², the printed orientation.
    pub sum_positive: f64,
    pub gap: f64,
    pub pass: bool,
}

/// tr|C_M|² against Σ n‖ĝ(−n)‖²; requires M ≥ K so no coefficient is cut.
pub fn hankel_trace_identity_check(g: &LoopFourier, m: usize) -> Result<HankelTraceReport> {
    if m < g.k {
        return Err(LoopError::Dimension(format!("M = {m} below cutoff {}", g.k)));
    }
    let c = hankel_block(g, m);
    let trace = c.frobenius_norm().powi(2);
    let weighted = |sign: i64| (1..=g.k as i64).map(|f| f as f64 * g.coeff_hs2(sign * f)).sum::<f64>();
    let sum_negative = weighted(-1);
    let sum_positive = weighted(1);
    let gap = (trace - sum_negative).abs();
    Ok(HankelTraceReport { trace, sum_negative, sum_positive, gap, pass: gap < 1e-10 * (1.0 + sum_negative) })
}

/// Eigenvalues of C*C clamped to [0, 1].
pub fn hankel_gram_eigenvalues(c: &ComplexMatrix) -> Result<Vec<f64>> {
    let ev = (&c.adjoint() * c).hermitian_eigenvalues();
    ev.into_iter()
        .map(|mu| {
            if mu > 1.0 + CLAMP_ALARM {
                Err(LoopError::ClampViolation(mu))
            } else {
                Ok(mu.clamp(0.0, 1.0))
            }
        })
        .collect()
}

/// log det((1 − C*C) e^{C*C}) from clamped eigenvalues.
pub fn log_det2(c: &ComplexMatrix) -> Result<f64> {
    Ok(hankel_gram_eigenvalues(c)?.into_iter().map(|mu| (-mu).ln_1p() + mu).sum())
}

/// det((1 − |C_M|²) e^{|C_M|²})^s, in [0, 1].
pub fn det2_weight(g: &LoopFourier, m: usize, s: f64) -> Result<f64> {
    assert!(s >= 0.0);
    if !g.unitary {
        return Err(LoopError::NotUnitary(g.unitarity_defect()));
    }
    if s == 0.0 {
        return Ok(1.0);
    }
    Ok((s * log_det2(&hankel_block(g, m))?).exp())
}

/// Σ_{n=1}^{M} n(‖ĝ(n)‖² − centering[n−1]).
pub fn regularized_energy(g: &LoopFourier, centering: &[f64], m: usize) -> Result<f64> {
    if centering.len() < m {
        return Err(LoopError::Dimension(format!("{} centering terms for M = {m}", centering.len())));
    }
    Ok((1..=m).map(|n| n as f64 * (g.coeff_hs2(n as i64) - centering[n - 1])).sum())
}

/// −s·regularized_energy + s·log det₂ with s = k/m. β enters only through
/// the centering.
pub fn nu_beta_k_logweight(g: &LoopFourier, k: f64, dynkin: f64, centering: &[f64], m: usize) -> Result<f64> {
    let s = k / dynkin;
    assert!(s >= 0.0);
    if s == 0.0 {
        return Ok(0.0);
    }
    if !g.unitary {
        return Err(LoopError::NotUnitary(g.unitarity_defect()));
    }
    let e = regularized_energy(g, centering, m)?;
    Ok(-s * e + s * log_det2(&hankel_block(g, m))?)
}

#[derive(Clone, Debug, Serialize)]
pub struct TiltCheck {
    pub mode: usize,
    pub estimate: f64,
    pub stderr: f64,
    pub reference: f64,
    pub z: f64,
    pub pass: bool,
}

/// Abelian ν_{β,k}: reweights ν_β draws of e^{ix} by the ν_{β,k} weight and
/// compares E|x_n|² with the tilted variance 1/(βn² + kn). Self-normalized,
/// so the centering is irrelevant and set to zero.
pub fn abelian_tilt_check(beta: f64, k: f64, modes: usize, m: usize, draws: u64, key: StreamKey) -> Result<Vec<TiltCheck>> {
    let zeros = vec![0.0; m];
    let acc = run_chunked(
        key,
        draws,
        || (vec![WeightedAccum::default(); modes], None::<LoopError>),
        |(accs, err), rng, _| {
            let x = abelian_loop_sample(beta, modes, rng);
            let g = LoopFourier::exp_i_abelian(&x, m);
            match nu_beta_k_logweight(&g, k, 1.0, &zeros, m) {
                Ok(lw) => {
                    let w = lw.exp();
                    for (a, xn) in accs.iter_mut().zip(&x) {
                        a.push(w, C64::new(xn.norm_sqr(), 0.0));
                    }
                }
                Err(e) => *err = Some(e),
            }
        },
        |(a, e), (b, f)| {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
            if e.is_none() {
                *e = f;
            }
        },
    );
    if let Some(e) = acc.1 {
        return Err(e);
    }
    Ok(acc
        .0
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let n = (i + 1) as f64;
            let reference = 1.0 / (beta * n * n + k * n);
            let estimate = a.mean().re;
            let stderr = a.stderr();
            let z = (estimate - reference).abs() / stderr;
            TiltCheck { mode: i + 1, estimate, stderr, reference, z, pass: z <= Z_PASS }
        })
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct SzegoRow {
    pub m: usize,
    /// det(1 − C_M*C_M)^k.
    pub value: f64,
    /// exp(−kΣn|x_n|²).
    pub reference: f64,
    pub gap: f64,
    /// |det A_M|^{2k}.
    pub toeplitz_value: f64,
    /// exp(−2kΣn|x_n|²), the limit of |det A_M|^{2k}.
    pub toeplitz_reference: f64,
    pub toeplitz_gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SzegoReport {
    pub k: f64,
    pub energy: f64,
    pub rows: Vec<SzegoRow>,
    /// Gaps non-increasing along the ladder up to a 1e-13 roundoff floor.
    pub monotone: bool,
}

impl SzegoReport {
    pub fn gap_at(&self, m: usize) -> Option<f64> {
        self.rows.iter().find(|r| r.m == m).map(|r| r.gap)
    }
}

pub const MONOTONE_FLOOR: f64 = 1e-13;

/// Abelian Szegő identity for g = e^{ix} along a ladder of truncations.
pub fn szego_check(x: &[C64], k: f64, ladder: &[usize]) -> Result<SzegoReport> {
    let energy: f64 = x.iter().enumerate().map(|(i, xn)| (i + 1) as f64 * xn.norm_sqr()).sum();
    let m_max = ladder.iter().copied().max().unwrap_or(1);
    let g = LoopFourier::exp_i_abelian(x, 2 * m_max);
    let mut rows = Vec::with_capacity(ladder.len());
    for &m in ladder {
        let c = hankel_block(&g, m);
        let one_minus = &ComplexMatrix::identity(m) - &(&c.adjoint() * &c);
        let logdet = one_minus.logdet_hpd()?;
        let value = (k * logdet).exp();
        let reference = (-k * energy).exp();
        let a = toeplitz_truncate(&g, m).a;
        let toeplitz_value = a.det().norm().powf(2.0 * k);
        let toeplitz_reference = (-2.0 * k * energy).exp();
        rows.push(SzegoRow {
            m,
            value,
            reference,
            gap: (value - reference).abs(),
            toeplitz_value,
            toeplitz_reference,
            toeplitz_gap: (toeplitz_value - toeplitz_reference).abs(),
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].gap <= w[0].gap + MONOTONE_FLOOR);
    Ok(SzegoReport { k, energy, rows, monotone })
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionMc {
    pub estimate: f64,
    pub stderr: f64,
    /// Π_{n≤K}(1 + k/(βn))⁻¹e^{k/(βn)}.
    pub truncated_product: f64,
    /// Γ(1 + k/β)e^{γk/β}.
    pub limit: f64,
    pub z: f64,
    pub pass: bool,
}

/// E exp(−kΣ_{n≤K} n(|x_n|² − 1/(βn²))) under ν_β.
pub fn partition_constant_mc(beta: f64, k: f64, modes: usize, draws: u64, key: StreamKey) -> PartitionMc {
    assert!(beta > 0.0);
    let acc = run_chunked(
        key,
        draws,
        RealAccum::default,
        |a, rng, _| {
            let x = abelian_loop_sample(beta, modes, rng);
            let e: f64 = x
                .iter()
                .enumerate()
                .map(|(i, xn)| {
                    let n = (i + 1) as f64;
                    n * (xn.norm_sqr() - 1.0 / (beta * n * n))
                })
                .sum();
            a.push((-k * e).exp());
        },
        |a, b| a.merge(b),
    );
    let truncated_product = partition_product_truncated(beta, k, modes);
    let stderr = acc.stderr();
    let z = if stderr > 0.0 { (acc.mean() - truncated_product).abs() / stderr } else { 0.0 };
    PartitionMc {
        estimate: acc.mean(),
        stderr,
        truncated_product,
        limit: partition_z(beta, k),
        z,
        pass: z <= Z_PASS || (stderr == 0.0 && (acc.mean() - truncated_product).abs() < 1e-15),
    }
}

/// The Fejér ratio |e^{inθ} − 1|²/|e^{iθ} − 1|² = (sin(nθ/2)/sin(θ/2))².
fn fejer(n: usize, theta: f64) -> f64 {
    let d = (0.5 * theta).sin();
    if d.abs() < 1e-300 {
        return (n * n) as f64;
    }
    let r = (0.5 * n as f64 * theta).sin() / d;
    r * r
}

/// I_n(δ) = (2πn)⁻¹ ∫_δ^{2π−δ} |e^{inθ} − 1|²/|e^{iθ} − 1|² dθ.
pub fn in_kernel(n: usize, delta: f64) -> f64 {
    assert!(n >= 1 && delta > 0.0 && delta < PI);
    // Symmetric about π; break at the zeros 2πj/n of the numerator.
    let mut breaks = vec![delta];
    breaks.extend((1..=n / 2).map(|j| 2.0 * PI * j as f64 / n as f64).filter(|&b| b > delta && b < PI));
    breaks.push(PI);
    let r = integrate_panels(&|t| fejer(n, t), &breaks, 1e-13, 1e-13);
    2.0 * r.value / (2.0 * PI * n as f64)
}

/// The difference I_n − I_{n+1} as printed: 2/(n(n+1))·(cos(δ/2) − cos(δ/2 + nδ))/sin(δ/2).
pub fn in_difference_printed(n: usize, delta: f64) -> f64 {
    let nf = n as f64;
    2.0 / (nf * (nf + 1.0)) * ((0.5 * delta).cos() - (0.5 * delta + nf * delta).cos()) / (0.5 * delta).sin()
}

/// I_n − I_{n+1} in closed form: the printed expression divided by 2π.
pub fn in_difference(n: usize, delta: f64) -> f64 {
    in_difference_printed(n, delta) / (2.0 * PI)
}

/// Σ_{n≤n_max} |I_n(δ) − I_{n+1}(δ)| from quadrature values.
pub fn in_telescoping_sum(delta: f64, n_max: usize) -> f64 {
    let vals: Vec<f64> = (1..=n_max + 1).map(|n| in_kernel(n, delta)).collect();
    vals.windows(2).map(|w| (w[0] - w[1]).abs()).sum()
}

/// log|1 − e^X| without overflow.
fn log_abs_one_minus_exp(x: f64) -> f64 {
    if x.abs() < 1.0 {
        x.exp_m1().abs().ln()
    } else if x > 0.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// ∫ |1 − exp(−s²/2 + st)|^p φ(t) dt over the standard normal φ.
pub fn gaussian_shift_lp(s: f64, p: f64) -> f64 {
    assert!(s >= 0.0 && p >= 1.0);
    if s == 0.0 {
        return 0.0;
    }
    let log_norm = -0.5 * (2.0 * PI).ln();
    let f = |t: f64| {
        let l = log_abs_one_minus_exp(s * t - 0.5 * s * s);
        if l == f64::NEG_INFINITY {
            0.0
        } else {
            (p * l - 0.5 * t * t + log_norm).exp()
        }
    };
    // The integrand vanishes at t = s/2 and peaks near t = ps for large s.
    let mut breaks = vec![-40.0, 0.5 * s, p * s, p * s + 40.0];
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    integrate_panels(&f, &breaks, 0.0, 1e-12).value
}

/// E|t|^p for the standard normal.
pub fn normal_abs_moment(p: f64) -> f64 {
    2f64.powf(0.5 * p) * gamma_real(0.5 * (p + 1.0)) / PI.sqrt()
}

/// The printed constant 2Γ((p+1)/2).
pub fn gaussian_shift_printed_constant(p: f64) -> f64 {
    2.0 * gamma_real(0.5 * (p + 1.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct GaussianShiftReport {
    pub p: f64,
    pub small_s: f64,
    /// value/s^p at `small_s`.
    pub small_s_ratio: f64,
    pub normal_moment: f64,
    pub printed_constant: f64,
    /// sup of value/s^p over the grid and where it is attained.
    pub grid_sup: f64,
    pub grid_argsup: f64,
    pub grid: Vec<(f64, f64)>,
}

/// value/s^p on a log grid of `points` values in [s_min, s_max].
pub fn gaussian_shift_report(p: f64, s_min: f64, s_max: f64, points: usize) -> GaussianShiftReport {
    assert!(points >= 2 && s_min > 0.0 && s_max > s_min);
    let step = (s_max / s_min).ln() / (points - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..points)
        .map(|i| {
            let s = s_min * (step * i as f64).exp();
            (s, gaussian_shift_lp(s, p) / s.powf(p))
        })
        .collect();
    let (grid_argsup, grid_sup) = grid.iter().copied().fold((s_min, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    GaussianShiftReport {
        p,
        small_s: s_min,
        small_s_ratio: grid[0].1,
        normal_moment: normal_abs_moment(p),
        printed_constant: gaussian_shift_printed_constant(p),
        grid_sup,
        grid_argsup,
        grid,
    }
}

/// Casimir constant of the SU(2) heat kernel: Brownian motion with
/// generator Δ/2 for the metric −tr(XY) gives e^{−(n²−1)t/4} on the
/// n-dimensional character.
pub const HEAT_C: f64 = 0.25;

/// p_t at the conjugacy class with eigenvalues e^{±iθ}, as a density
/// against Haar measure: Σ_{n≥1} n e^{−c(n²−1)t} sin(nθ)/sin θ.
pub fn heat_kernel_su2(t: f64, theta: f64) -> f64 {
    assert!(t > 0.0);
    let s = theta.sin();
    let c = theta.cos();
    let mut total = 0.0;
    for n in 1.. {
        let nf = n as f64;
        let decay = (-HEAT_C * (nf * nf - 1.0) * t).exp();
        let chi = if s.abs() < 1e-7 {
            // sin(nθ)/sin θ → n·(±1)^{n−1} at θ = 0, π.
            if c > 0.0 || n % 2 == 1 {
                nf
            } else {
                -nf
            }
        } else {
            (nf * theta).sin() / s
        };
        total += nf * decay * chi;
        if n > 1 && nf * nf * decay < 1e-14 {
            break;
        }
    }
    total
}

/// ∫ p_t dm with the class measure (2/π) sin²θ dθ on [0, π].
pub fn heat_kernel_normalization(t: f64) -> f64 {
    integrate(|th| heat_kernel_su2(t, th) * (2.0 / PI) * th.sin().powi(2), 0.0, PI, 1e-13, 1e-13).value
}

/// (p_s * p_t)(θ) by two-dimensional quadrature over SU(2): h has class
/// angle φ and axis with z-component u, and h⁻¹g has half-trace
/// cos φ cos θ + u sin φ sin θ.
pub fn heat_kernel_convolution(s: f64, t: f64, theta: f64) -> f64 {
    let outer = |phi: f64| {
        let inner = |u: f64| {
            let c = (phi.cos() * theta.cos() + u * phi.sin() * theta.sin()).clamp(-1.0, 1.0);
            heat_kernel_su2(t, c.acos())
        };
        let iu = integrate(inner, -1.0, 1.0, 1e-12, 1e-12).value * 0.5;
        (2.0 / PI) * phi.sin().powi(2) * heat_kernel_su2(s, phi) * iu
    };
    integrate(outer, 0.0, PI, 1e-11, 1e-11).value
}

/// g ≈ g₋ g₀ g₊ read from a finite section.
#[derive(Clone, Debug)]
pub struct BirkhoffFactors {
    pub m: usize,
    /// g_minus[j] is the coefficient of e^{−ijθ}; g_minus[0] = I.
    pub g_minus: Vec<ComplexMatrix>,
    pub g0: ComplexMatrix,
    /// g_plus[i] is the coefficient of e^{iiθ}; g_plus[0] = I.
    pub g_plus: Vec<ComplexMatrix>,
}

impl BirkhoffFactors {
    pub fn eval_minus(&self, theta: f64) -> ComplexMatrix {
        eval_series(&self.g_minus, -theta)
    }

    pub fn eval_plus(&self, theta: f64) -> ComplexMatrix {
        eval_series(&self.g_plus, theta)
    }

    pub fn eval(&self, theta: f64) -> ComplexMatrix {
        &(&self.eval_minus(theta) * &self.g0) * &self.eval_plus(theta)
    }

    /// max over a grid of max|g − g₋g₀g₊|.
    pub fn reconstruction_residual(&self, g: &LoopFourier, grid: usize) -> f64 {
        (0..grid)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / grid as f64;
                (&g.eval(th) - &self.eval(th)).max_abs()
            })
            .fold(0.0, f64::max)
    }
}

fn eval_series(c: &[ComplexMatrix], theta: f64) -> ComplexMatrix {
    let n = c[0].rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (j, b) in c.iter().enumerate() {
        let e = C64::from_polar(1.0, j as f64 * theta);
        for a in 0..n {
            for bb in 0..n {
                out[(a, bb)] += b[(a, bb)] * e;
            }
        }
    }
    out
}

/// Birkhoff factors from the block UL factorization A_M = Ũ·D·L̃ (the
/// Toeplitz operator of g₋g₀g₊ is upper times lower). The section is
/// exact far from the bottom-right corner, so g₋ is read from block row 0
/// of Ũ, g₀ = D₀, and ĝ₊(i) = g₀⁻¹D_iL̃_{i0} from block column 0. Only the
/// first ⌈M/2⌉ coefficients of each factor are kept.
pub fn birkhoff_factor(g: &LoopFourier, m: usize) -> Result<BirkhoffFactors> {
    let n = g.n;
    let mut w = toeplitz_truncate(g, m).a;
    let scale = w.norm_inf().max(f64::MIN_POSITIVE);
    let mut row0 = vec![ComplexMatrix::zeros(n, n); m];
    let mut col0 = vec![ComplexMatrix::zeros(n, n); m];
    let mut d0 = ComplexMatrix::identity(n);
    for k in (0..m).rev() {
        let p = w.block(k * n, k * n, n, n);
        let det = p.det();
        if !det.is_finite() || det.norm() < 1e-12 * scale.powi(n as i32) {
            return Err(LoopError::OffStratum(k));
        }
        let pinv = p.inverse()?;
        if k == 0 {
            d0 = p;
            row0[0] = ComplexMatrix::identity(n);
            col0[0] = ComplexMatrix::identity(n);
            break;
        }
        let kn = k * n;
        let wcol = w.block(0, kn, kn, n);
        let wrow = w.block(kn, 0, n, kn);
        let x = &wcol * &pinv;
        row0[k] = x.block(0, 0, n, n);
        // D_k L̃_{k0} = W_{k0}.
        col0[k] = wrow.block(0, 0, n, n);
        let upd = &x * &wrow;
        let tl = &w.block(0, 0, kn, kn) - &upd;
        w.set_block(0, 0, &tl);
    }
    let g0inv = d0.inverse()?;
    let keep = m.div_ceil(2);
    let g_minus = row0.into_iter().take(keep).collect();
    let g_plus = col0
        .into_iter()
        .enumerate()
        .take(keep)
        .map(|(i, c)| if i == 0 { c } else { &g0inv * &c })
        .collect();
    Ok(BirkhoffFactors { m, g_minus, g0: d0, g_plus })
}

/// Numerical rank: singular values above `rel` times the largest.
pub fn numerical_rank(a: &ComplexMatrix, rel: f64) -> usize {
    let ev = (&a.adjoint() * a).hermitian_eigenvalues();
    let top = ev.last().copied().unwrap_or(0.0).max(0.0);
    if top == 0.0 {
        return 0;
    }
    ev.iter().filter(|&&e| e > rel * rel * top).count()
}

/// A_M(gh) − A_M(g)A_M(h).
pub fn multiplicativity_defect(g: &LoopFourier, h: &LoopFourier, m: usize) -> Result<ComplexMatrix> {
    let gh = g.mul(h)?;
    Ok(&toeplitz_truncate(&gh, m).a - &(&toeplitz_truncate(g, m).a * &toeplitz_truncate(h, m).a))
}

// ---- SU(2) loop sampler and the g₀ probe (exploratory) ----

/// exp(Σ v_k iσ_k/√2) in closed form.
pub fn su2_exp(v: [f64; 3]) -> ComplexMatrix {
    let w = [v[0] / 2f64.sqrt(), v[1] / 2f64.sqrt(), v[2] / 2f64.sqrt()];
    let r = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    let (c, sr) = if r < 1e-12 { (1.0, 1.0 - r * r / 6.0) } else { (r.cos(), r.sin() / r) };
    // cos r + i (sin r / r) w·σ
    let i = C64::new(0.0, 1.0);
    ComplexMatrix::new(
        2,
        2,
        vec![
            c + i * sr * w[2],
            i * sr * C64::new(w[0], -w[1]),
            i * sr * C64::new(w[0], w[1]),
            c - i * sr * w[2],
        ],
    )
    .expect("2x2")
}

/// Discretized ν_β on based SU(2) loops. Each coordinate of the algebra
/// path (orthonormal basis iσ_k/√2 for −tr(XY)) is an independent copy of
/// the abelian law: x(θ) = Σ_{n≤L/2} (x_n e^{inθ} + c.c.) − x(0) with
/// E|x_n|² = 1/(βn²). The loop is the development g_{j+1} = g_j exp(Δx_j)
/// on `steps` grid points, closed by g_j exp(−(j/L) log g_L). In a
/// commuting direction the development is exactly exp(x − x(0)); in
/// general this is an approximation of the Wiener measure.
pub fn su2_loop_sample<R: Rng + ?Sized>(beta: f64, steps: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    let modes = steps / 2;
    let mut path = vec![[0.0f64; 3]; steps];
    for comp in 0..3 {
        let x: Vec<C64> = (1..=modes).map(|n| complex_normal(rng, 1.0 / (beta * (n * n) as f64))).collect();
        for (j, p) in path.iter_mut().enumerate() {
            let mut v = 0.0;
            for (i, xn) in x.iter().enumerate() {
                let idx = ((i + 1) * j) % steps;
                let th = 2.0 * PI * idx as f64 / steps as f64;
                v += 2.0 * (xn.re * th.cos() - xn.im * th.sin());
            }
            p[comp] = v;
        }
        let x0 = path[0][comp];
        for p in path.iter_mut() {
            p[comp] -= x0;
        }
    }
    let mut g = Vec::with_capacity(steps + 1);
    let mut cur = ComplexMatrix::identity(2);
    g.push(cur.clone());
    for j in 0..steps {
        let next = &path[(j + 1) % steps];
        let dx = [next[0] - path[j][0], next[1] - path[j][1], next[2] - path[j][2]];
        cur = &cur * &su2_exp(dx);
        g.push(cur.clone());
    }
    let close = su2_log(&g[steps]);
    (0..steps)
        .map(|j| {
            let f = -(j as f64) / steps as f64;
            &g[j] * &su2_exp([close[0] * f, close[1] * f, close[2] * f])
        })
        .collect()
}

/// Coordinates v with su2_exp(v) = g, principal branch.
pub fn su2_log(g: &ComplexMatrix) -> [f64; 3] {
    let c = (0.5 * g.trace().re).clamp(-1.0, 1.0);
    let r = c.acos();
    let s = r.sin();
    let f = if s.abs() < 1e-12 { 1.0 } else { r / s };
    // (g − g*)/2 = i (sin r / r) w·σ.
    let a = (g - &g.adjoint()).scale_re(0.5);
    let w = [a[(1, 0)].im * f, -a[(1, 0)].re * f, a[(0, 0)].im * f];
    [w[0] * 2f64.sqrt(), w[1] * 2f64.sqrt(), w[2] * 2f64.sqrt()]
}

/// C for the discrete model on L grid points: multiplication by the
/// samples is unitary on ℓ²(ℤ_L), and C is its corner from frequencies
/// {0..L/2} to {−L/2..−1}, so 0 ≤ C*C ≤ I holds exactly.
pub fn hankel_discrete(samples: &[ComplexMatrix]) -> ComplexMatrix {
    let l = samples.len();
    let n = samples[0].rows();
    let half = l / 2;
    let coeff = |f: i64| -> ComplexMatrix {
        let mut c = ComplexMatrix::zeros(n, n);
        for (j, s) in samples.iter().enumerate() {
            let idx = (f * j as i64).rem_euclid(l as i64);
            let e = C64::from_polar(1.0 / l as f64, -2.0 * PI * idx as f64 / l as f64);
            for a in 0..n {
                for b in 0..n {
                    c[(a, b)] += s[(a, b)] * e;
                }
            }
        }
        c
    };
    let hat: Vec<ComplexMatrix> = (0..l as i64).map(coeff).collect();
    let mut c = ComplexMatrix::zeros(n * half, n * half);
    for p in 0..half {
        for q in 0..half {
            let f = (-1 - (p + q) as i64).rem_euclid(l as i64) as usize;
            c.set_block(p * n, q * n, &hat[f]);
        }
    }
    c
}

/// E‖ĝ(n)‖² for n = 1..=m by a Monte-Carlo pre-pass over `sampler`.
pub fn mc_centering<F>(sampler: F, m: usize, draws: u64, key: StreamKey) -> Vec<f64>
where
    F: Fn(&mut crate::mc::Rng64) -> LoopFourier + Sync,
{
    let accs = run_chunked(
        key,
        draws,
        || vec![RealAccum::default(); m],
        |a, rng, _| {
            let g = sampler(rng);
            for (n, acc) in a.iter_mut().enumerate() {
                acc.push(g.coeff_hs2(n as i64 + 1));
            }
        },
        |a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        },
    );
    accs.iter().map(|a| a.mean()).collect()
}

/// Density of T = tr(g₀*g₀) on [2, ∞) induced by (tr g₀*g₀)^{−3} dm(g₀)
/// on SL(2, ℂ): (8/π)·√(T² − 4)/T³.
pub fn g0_conjectured_density(t: f64) -> f64 {
    if t <= 2.0 {
        0.0
    } else {
        8.0 / PI * (t * t - 4.0).sqrt() / (t * t * t)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct G0Histogram {
    pub beta: f64,
    pub k: f64,
    /// Bin edges; the last bin also collects everything above its edge.
    pub edges: Vec<f64>,
    pub mass: Vec<f64>,
    pub conjectured_mass: Vec<f64>,
    pub ess: f64,
    pub n_off_stratum: u64,
    pub median: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct G0Probe {
    pub histograms: Vec<G0Histogram>,
    /// Total variation between the two smallest β on the ladder.
    pub tv_smallest_pair: f64,
}

pub struct G0ProbeSpec {
    pub betas: Vec<f64>,
    pub k: f64,
    pub steps: usize,
    /// Grid used for the Fourier data and the discrete det₂ weight.
    pub grid: usize,
    pub m: usize,
    pub edges: Vec<f64>,
}

impl Default for G0ProbeSpec {
    fn default() -> Self {
        Self {
            betas: vec![8.0, 4.0, 2.0, 1.0],
            k: 1.0,
            steps: 1024,
            grid: 64,
            m: 48,
            edges: vec![2.0, 2.05, 2.1, 2.2, 2.4, 2.7, 3.0, 4.0, 6.0],
        }
    }
}

/// Weighted histograms of tr(g₀*g₀)/|det g₀| under ν_{β,k} weights det(1 − C*C)^s,
/// s = k (defining representation of SU(2), Dynkin index 1). The
/// centering term of the regularized weight is a constant per β and
/// cancels under self-normalization.
pub fn g0_law_probe(spec: &G0ProbeSpec, draws: u64, key: StreamKey) -> G0Probe {
    let nb = spec.edges.len();
    let bin = |t: f64| spec.edges.iter().rposition(|&e| t >= e).unwrap_or(0);
    let conj: Vec<f64> = (0..nb)
        .map(|b| {
            let lo = spec.edges[b];
            if b + 1 < nb {
                integrate(g0_conjectured_density, lo, spec.edges[b + 1], 1e-12, 1e-12).value
            } else {
                1.0 - integrate(g0_conjectured_density, 2.0, lo, 1e-12, 1e-12).value
            }
        })
        .collect();
    let histograms: Vec<G0Histogram> = spec
        .betas
        .iter()
        .enumerate()
        .map(|(bi, &beta)| {
            let stride = spec.steps / spec.grid;
            let vals = crate::mc::collect(key.child(bi as u64), draws, |rng, _| {
                let full = su2_loop_sample(beta, spec.steps, rng);
                let samples: Vec<ComplexMatrix> = full.iter().step_by(stride).cloned().collect();
                let c = hankel_discrete(&samples);
                let lw = match hankel_gram_eigenvalues(&c) {
                    Ok(ev) => spec.k * ev.iter().map(|&mu| (-mu).ln_1p()).sum::<f64>(),
                    Err(_) => return None,
                };
                let g = LoopFourier::from_samples(2, spec.grid / 2 - 1, &samples).ok()?;
                let f = birkhoff_factor(&g, spec.m).ok()?;
                // The exact g₀ has det 1; the section only approximately.
                let t = f.g0.frobenius_norm().powi(2) / f.g0.det().norm();
                Some((lw, t))
            });
            let ok: Vec<(f64, f64)> = vals.iter().flatten().copied().collect();
            let n_off_stratum = (vals.len() - ok.len()) as u64;
            let lmax = ok.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
            let mut mass = vec![0.0; nb];
            let mut sw = 0.0;
            let mut sw2 = 0.0;
            let mut weighted: Vec<(f64, f64)> = Vec::with_capacity(ok.len());
            for &(lw, t) in &ok {
                let w = (lw - lmax).exp();
                mass[bin(t)] += w;
                sw += w;
                sw2 += w * w;
                weighted.push((t, w));
            }
            for m in mass.iter_mut() {
                *m /= sw;
            }
            weighted.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut cum = 0.0;
            let mut median = f64::NAN;
            for (t, w) in &weighted {
                cum += w;
                if cum >= 0.5 * sw {
                    median = *t;
                    break;
                }
            }
            G0Histogram {
                beta,
                k: spec.k,
                edges: spec.edges.clone(),
                mass,
                conjectured_mass: conj.clone(),
                ess: sw * sw / sw2,
                n_off_stratum,
                median,
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..histograms.len()).collect();
    order.sort_by(|&a, &b| histograms[a].beta.total_cmp(&histograms[b].beta));
    let tv_smallest_pair = if order.len() >= 2 {
        let (a, b) = (&histograms[order[0]], &histograms[order[1]]);
        0.5 * a.mass.iter().zip(&b.mass).map(|(x, y)| (x - y).abs()).sum::<f64>()
    } else {
        0.0
    };
    G0Probe { histograms, tv_smallest_pair }
}

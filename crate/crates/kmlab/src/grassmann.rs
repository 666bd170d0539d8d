//! Graph-coordinate measures on Gr(M, ℂ^{2M}) and the Schur projections of
//! the μ_s^{(n)} family on GL(2n).
//!
//! A plane is the graph {(x, Zx)} of an M×M matrix Z. The block matrix
//! g = [[a, b], [c, d]] carries it to the graph of (c + dZ)(a + bZ)⁻¹.
//!
//! GL(2n) matrices are indexed by −n..n−1 (matrix position p is index
//! p − n). A^{(r)}(g) is the block of indices ≤ r, i.e. positions 0..=n+r.

use crate::diagdist::Z_PASS;
use crate::ensembles::{gaussian_matrix, haar_unitary};
use crate::linalg::{ComplexMatrix, LinalgError, C64};
use crate::mc::{diff_z, run_chunked, RealAccum, Rng64, StreamKey, WeightedAccum};
use crate::special::{ks_critical_1pct, ks_critical_two_sample_1pct, ks_two_sample, ks_uniform};
use rand::Rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GrassmannError {
    #[error("image graph not transverse (a + bZ singular)")]
    Transversality,
    #[error("singular block in Schur projection")]
    SingularBlock,
    #[error("dimension: {0}")]
    Dimension(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

type Result<T> = std::result::Result<T, GrassmannError>;

const MAX_RETRIES: usize = 16;

fn one_plus_gram(z: &ComplexMatrix) -> ComplexMatrix {
    &ComplexMatrix::identity(z.cols()) + &(&z.adjoint() * z)
}

/// log det(1 + Z*Z) by Cholesky.
pub fn log_det_one_plus_gram(z: &ComplexMatrix) -> f64 {
    one_plus_gram(z).logdet_hpd().expect("1 + Z*Z is positive definite")
}

/// −(2M + s) log det(1 + Z*Z), M = size of Z.
pub fn grassmann_logdensity(z: &ComplexMatrix, s: f64) -> f64 {
    -(2.0 * z.rows() as f64 + s) * log_det_one_plus_gram(z)
}

/// Z = X Y⁻¹ with X, Y independent unit-variance Ginibre: the
/// U(2M)-invariant law in the graph chart.
pub fn sample_grassmann_invariant<R: Rng + ?Sized>(m: usize, rng: &mut R) -> ComplexMatrix {
    for _ in 0..MAX_RETRIES {
        let x = gaussian_matrix(m, m, 1.0, rng);
        let y = gaussian_matrix(m, m, 1.0, rng);
        if let Ok(yi) = y.inverse() {
            return &x * &yi;
        }
    }
    panic!("Ginibre matrix singular {MAX_RETRIES} times in a row")
}

/// Exact scalar sampler for μ_s at M = 1: |z|²/(1+|z|²) ~ Beta(1, 1+s),
/// phase uniform.
pub fn sample_mu_s_scalar<R: Rng + ?Sized>(s: f64, rng: &mut R) -> C64 {
    assert!(s > -1.0);
    let v: f64 = rng.random();
    let u = 1.0 - v.powf(1.0 / (1.0 + s));
    let r = (u / (1.0 - u)).sqrt();
    C64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
}

/// Upper-left m×m block.
pub fn project_corner(z: &ComplexMatrix, m: usize) -> Result<ComplexMatrix> {
    if m == 0 || m >= z.rows() {
        return Err(GrassmannError::Dimension(format!("corner {m} of {}", z.rows())));
    }
    Ok(z.block(0, 0, m, m))
}

fn split(g: &ComplexMatrix, m: usize) -> Result<[ComplexMatrix; 4]> {
    if g.rows() != 2 * m || g.cols() != 2 * m {
        return Err(GrassmannError::Dimension(format!("g is {}x{}, Z is {m}x{m}", g.rows(), g.cols())));
    }
    Ok([g.block(0, 0, m, m), g.block(0, m, m, m), g.block(m, 0, m, m), g.block(m, m, m, m)])
}

/// Image of graph(Z) under g, with J(g, Z) = log|det(a + bZ)|.
#[derive(Clone, Debug)]
pub struct MoebiusImage {
    pub z: ComplexMatrix,
    pub log_cocycle: f64,
}

/// Z' = (c + dZ)(a + bZ)⁻¹. J satisfies J(gh, Z) = J(g, hZ) + J(h, Z).
pub fn moebius(g: &ComplexMatrix, z: &ComplexMatrix) -> Result<MoebiusImage> {
    let m = z.rows();
    let [a, b, c, d] = split(g, m)?;
    let top = &a + &(&b * z);
    let bot = &c + &(&d * z);
    let inv = top.inverse().map_err(|_| GrassmannError::Transversality)?;
    Ok(MoebiusImage { z: &bot * &inv, log_cocycle: top.det().norm().ln() })
}

/// log|det(a(g⁻¹) + b(g⁻¹)W)|: g_*(μ_s) = e^{2s·this} μ_s at W.
pub fn pushforward_log_factor(g: &ComplexMatrix, w: &ComplexMatrix) -> Result<f64> {
    let m = w.rows();
    let gi = g.inverse()?;
    let [a, b, _, _] = split(&gi, m)?;
    Ok((&a + &(&b * w)).det().norm().ln())
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MuSDensitySpec {
    /// Matrices live in GL(2n).
    pub n: usize,
    /// Pivot index, |r| < n.
    pub r: i64,
    /// Exponent, s > −1.
    pub s: f64,
}

/// A^{(r)}(g): the block of indices −n..=r.
pub fn a_r_block(g: &ComplexMatrix, n: usize, r: i64) -> Result<ComplexMatrix> {
    if g.rows() != 2 * n || r.unsigned_abs() as usize >= n {
        return Err(GrassmannError::Dimension(format!("n={n} r={r} g {}x{}", g.rows(), g.cols())));
    }
    let k = (n as i64 + r + 1) as usize;
    Ok(g.block(0, 0, k, k))
}

/// 2s log|det A^{(r)}(g)| − (4n + s) log det(1 + g*g). −∞ when the minor
/// vanishes and s > 0.
pub fn mu_s_logdensity(g: &ComplexMatrix, spec: &MuSDensitySpec) -> Result<f64> {
    assert!(spec.s > -1.0, "s must exceed −1");
    let a = a_r_block(g, spec.n, spec.r)?;
    let minor = if spec.s == 0.0 { 0.0 } else { 2.0 * spec.s * a.det().norm().ln() };
    Ok(minor - (4.0 * spec.n as f64 + spec.s) * log_det_one_plus_gram(g))
}

fn check_chain(g: &ComplexMatrix, big_n: usize, n: usize) -> Result<usize> {
    if n == 0 || n >= big_n || g.rows() != 2 * big_n || !g.is_square() {
        return Err(GrassmannError::Dimension(format!("N={big_n} n={n} g {}x{}", g.rows(), g.cols())));
    }
    Ok(big_n - n)
}

/// a₂₂ − a₂₁ a₁₁⁻¹ a₁₂ for the split of GL(2N) into blocks m, 2n, m with
/// m = N − n.
pub fn schur_chain(g: &ComplexMatrix, big_n: usize, n: usize) -> Result<ComplexMatrix> {
    let m = check_chain(g, big_n, n)?;
    let k = 2 * n;
    let a11 = g.block(0, 0, m, m);
    let a12 = g.block(0, m, m, k);
    let a21 = g.block(m, 0, k, m);
    let a22 = g.block(m, m, k, k);
    let x = a11.solve(&a12).map_err(|_| GrassmannError::SingularBlock)?;
    Ok(&a22 - &(&a21 * &x))
}

/// The same projection as four maps: corner, inversion, corner, inversion.
pub fn schur_chain_four_maps(g: &ComplexMatrix, big_n: usize, n: usize) -> Result<ComplexMatrix> {
    let m = check_chain(g, big_n, n)?;
    let h = g.block(0, 0, m + 2 * n, m + 2 * n);
    let k = h.inverse().map_err(|_| GrassmannError::SingularBlock)?;
    let b22 = k.block(m, m, 2 * n, 2 * n);
    b22.inverse().map_err(|_| GrassmannError::SingularBlock)
}

/// Names of [`bounded_stats`], in order.
pub const STAT_NAMES: [&str; 8] = [
    "1/(1+|z11|^2)",
    "tr(1+Z*Z)^-1/M",
    "1/det(1+Z*Z)",
    "|det Z|^2/det(1+Z*Z)",
    "|tr Z|^2/(1+|tr Z|^2)",
    "exp(-|z11-zMM|^2)",
    "Re z11/(1+|z11|^2)",
    "Im(z11 conj zM1)/(1+|z11|^2+|zM1|^2)",
];

/// Eight bounded statistics of an M×M graph coordinate.
pub fn bounded_stats(z: &ComplexMatrix) -> [f64; 8] {
    let m = z.rows();
    let p = one_plus_gram(z);
    let ld = p.logdet_hpd().expect("positive definite");
    let pinv = p.inverse().expect("positive definite");
    let z11 = z[(0, 0)];
    let zmm = z[(m - 1, m - 1)];
    let zm1 = z[(m - 1, 0)];
    let tr = z.trace();
    [
        1.0 / (1.0 + z11.norm_sqr()),
        pinv.trace().re / m as f64,
        (-ld).exp(),
        (2.0 * z.det().norm().ln() - ld).exp(),
        tr.norm_sqr() / (1.0 + tr.norm_sqr()),
        (-(z11 - zmm).norm_sqr()).exp(),
        z11.re / (1.0 + z11.norm_sqr()),
        (z11 * zm1.conj()).im / (1.0 + z11.norm_sqr() + zm1.norm_sqr()),
    ]
}

/// One statistic compared between two estimates.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct StatComparison {
    pub name: String,
    pub left: f64,
    pub right: f64,
    pub stderr: f64,
    pub z: f64,
    pub pass: bool,
}

impl StatComparison {
    fn from_diff(name: &str, left: f64, right: f64, se: f64) -> Self {
        let z = if se > 0.0 { (left - right).abs() / se } else if left == right { 0.0 } else { f64::INFINITY };
        StatComparison { name: name.into(), left, right, stderr: se, z, pass: z <= Z_PASS }
    }
}

#[derive(Clone, Default)]
struct StatAccums(Vec<RealAccum>);

impl StatAccums {
    fn new(k: usize) -> Self {
        StatAccums(vec![RealAccum::default(); k])
    }
    fn push(&mut self, xs: &[f64]) {
        for (a, &x) in self.0.iter_mut().zip(xs) {
            a.push(x);
        }
    }
    fn merge(&mut self, o: StatAccums) {
        for (a, b) in self.0.iter_mut().zip(o.0) {
            a.merge(b);
        }
    }
}

fn two_sample<FA, FB>(k: usize, draws: u64, ka: StreamKey, kb: StreamKey, fa: FA, fb: FB) -> Vec<StatComparison>
where
    FA: Fn(&mut Rng64) -> Option<ComplexMatrix> + Sync,
    FB: Fn(&mut Rng64) -> Option<ComplexMatrix> + Sync,
{
    let run = |key, f: &(dyn Fn(&mut Rng64) -> Option<ComplexMatrix> + Sync)| {
        run_chunked(
            key,
            draws,
            || StatAccums::new(k),
            |a, rng, _| {
                if let Some(z) = f(rng) {
                    a.push(&bounded_stats(&z)[..k]);
                }
            },
            |a, b| a.merge(b),
        )
    };
    let a = run(ka, &fa);
    let b = run(kb, &fb);
    a.0.iter()
        .zip(&b.0)
        .enumerate()
        .map(|(i, (x, y))| {
            let (_, se) = diff_z(x, y);
            StatComparison::from_diff(STAT_NAMES[i], x.mean(), y.mean(), se)
        })
        .collect()
}

/// KS statistic and 1% critical value for |z|²/(1+|z|²) ~ U(0, 1) at M = 1.
pub fn ks_scalar_uniformity(draws: u64, key: StreamKey) -> (f64, f64) {
    let xs = crate::mc::collect(key, draws, |rng, _| {
        let z = sample_grassmann_invariant(1, rng)[(0, 0)];
        z.norm_sqr() / (1.0 + z.norm_sqr())
    });
    (ks_uniform(xs), ks_critical_1pct(draws as usize))
}

/// KS for the corner z₁₁ of the M = `big_m` invariant law against U(0, 1).
pub fn ks_projection_coherence(big_m: usize, draws: u64, key: StreamKey) -> (f64, f64) {
    let xs = crate::mc::collect(key, draws, |rng, _| {
        let z = sample_grassmann_invariant(big_m, rng)[(0, 0)];
        z.norm_sqr() / (1.0 + z.norm_sqr())
    });
    (ks_uniform(xs), ks_critical_1pct(draws as usize))
}

/// Two-sample KS of |z₁₁|²/(1+|z₁₁|²) between Z and Z⁻¹ (independent streams).
pub fn ks_inversion_invariance(m: usize, draws: u64, key: StreamKey) -> (f64, f64) {
    let stat = |inv: bool| {
        move |rng: &mut Rng64, _| {
            let z = sample_grassmann_invariant(m, rng);
            let z = if inv { z.inverse().expect("invertible a.s.") } else { z };
            z[(0, 0)].norm_sqr() / (1.0 + z[(0, 0)].norm_sqr())
        }
    };
    let a = crate::mc::collect(key.child(0), draws, stat(false));
    let b = crate::mc::collect(key.child(1), draws, stat(true));
    let n = draws as usize;
    (ks_two_sample(a, b), ks_critical_two_sample_1pct(n, n))
}

/// E[tr(Z*Z(1+Z*Z)⁻¹)] against M/2.
pub fn trace_symmetry_check(m: usize, draws: u64, key: StreamKey) -> StatComparison {
    let acc = run_chunked(
        key,
        draws,
        RealAccum::default,
        |a, rng, _| {
            let z = sample_grassmann_invariant(m, rng);
            let p = one_plus_gram(&z).inverse().expect("positive definite");
            a.push(m as f64 - p.trace().re);
        },
        |a, b| a.merge(b),
    );
    StatComparison::from_diff("tr(Z*Z(1+Z*Z)^-1)", acc.mean(), m as f64 / 2.0, acc.stderr())
}

/// Law of u·Z against Z for a fixed u ∈ U(2M), on the eight statistics.
pub fn unitary_invariance_check(m: usize, draws: u64, key: StreamKey) -> Vec<StatComparison> {
    let u = haar_unitary(2 * m, &mut key.child(99).rng(0));
    two_sample(
        8,
        draws,
        key.child(0),
        key.child(1),
        |rng| moebius(&u, &sample_grassmann_invariant(m, rng)).ok().map(|r| r.z),
        |rng| Some(sample_grassmann_invariant(m, rng)),
    )
}

/// Change of variables for μ_s under a fixed unitary g:
/// E_{μ_s}[f(gZ)] = E_{μ_s}[f(Z) |det(a(g⁻¹) + b(g⁻¹)Z)|^{2s}], on five
/// bounded f. μ_s is reached from μ₀ by the weight det(1+Z*Z)^{−s}; both
/// sides share the draws and the paired difference is estimated.
pub fn cocycle_change_of_variables(m: usize, s: f64, draws: u64, key: StreamKey) -> Vec<StatComparison> {
    cocycle_change_of_variables_with(m, s, s, draws, key)
}

/// As [`cocycle_change_of_variables`], with the cocycle raised to 2·`s_factor`
/// instead of 2s (negative controls).
pub fn cocycle_change_of_variables_with(m: usize, s: f64, s_factor: f64, draws: u64, key: StreamKey) -> Vec<StatComparison> {
    const K: usize = 5;
    let g = haar_unitary(2 * m, &mut key.child(99).rng(0));
    let gi = g.inverse().expect("unitary");
    type Acc = (Vec<WeightedAccum>, Vec<WeightedAccum>, Vec<WeightedAccum>);
    let acc: Acc = run_chunked(
        key,
        draws,
        || (vec![WeightedAccum::default(); K], vec![WeightedAccum::default(); K], vec![WeightedAccum::default(); K]),
        |a, rng, _| {
            let z = if m == 1 {
                ComplexMatrix::from_fn(1, 1, |_, _| sample_mu_s_scalar(s, rng))
            } else {
                sample_grassmann_invariant(m, rng)
            };
            let w = if m == 1 { 1.0 } else { (-s * log_det_one_plus_gram(&z)).exp() };
            let Ok(img) = moebius(&g, &z) else { return };
            // log|det(a(g⁻¹) + b(g⁻¹)Z)| without a second inverse.
            let Ok(back) = moebius(&gi, &z) else { return };
            let c = (2.0 * s_factor * back.log_cocycle).exp();
            let fl = bounded_stats(&img.z);
            let fr = bounded_stats(&z);
            for i in 0..K {
                a.0[i].push(w, C64::new(fl[i], 0.0));
                a.1[i].push(w, C64::new(fr[i] * c, 0.0));
                a.2[i].push(w, C64::new(fl[i] - fr[i] * c, 0.0));
            }
        },
        |a, b| {
            for i in 0..K {
                a.0[i].merge(b.0[i]);
                a.1[i].merge(b.1[i]);
                a.2[i].merge(b.2[i]);
            }
        },
    );
    (0..K)
        .map(|i| StatComparison::from_diff(STAT_NAMES[i], acc.0[i].mean().re, acc.1[i].mean().re, acc.2[i].stderr()))
        .collect()
}

/// μ₀^{(N)} samples (M = 2N) pushed through [`schur_chain`] against direct
/// μ₀^{(n)} samples, six statistics.
pub fn schur_pushforward_check(big_n: usize, n: usize, draws: u64, key: StreamKey) -> Vec<StatComparison> {
    two_sample(
        6,
        draws,
        key.child(0),
        key.child(1),
        |rng| schur_chain(&sample_grassmann_invariant(2 * big_n, rng), big_n, n).ok(),
        |rng| Some(sample_grassmann_invariant(2 * n, rng)),
    )
}

/// N^{−1/2}(a₂₂ − a₂₁a₁₁⁻¹a₁₂) over unit-variance Gaussian g ∈ GL(2N)
/// against direct μ₀^{(n)} samples. `scaled = false` drops the N^{−1/2}
/// (negative control).
pub fn gaussian_schur_limit_check(n: usize, big_n: usize, draws: u64, key: StreamKey, scaled: bool) -> Vec<StatComparison> {
    assert!(big_n > n, "N must exceed n");
    let m = big_n - n;
    let f = if scaled { 1.0 / (big_n as f64).sqrt() } else { 1.0 };
    two_sample(
        6,
        draws,
        key.child(0),
        key.child(1),
        |rng| {
            // Only the leading (m + 2n) block enters the projection.
            let h = gaussian_matrix(m + 2 * n, m + 2 * n, 1.0, rng);
            let mut g = ComplexMatrix::identity(2 * big_n);
            g.set_block(0, 0, &h);
            schur_chain(&g, big_n, n).ok().map(|s| s.scale_re(f))
        },
        |rng| Some(sample_grassmann_invariant(2 * n, rng)),
    )
}

/// Integrability of |det A^{(r)}|^{2s} under μ₀^{(n)}: the weight
/// w = |det A^{(r)}|^{2s} det(1+g*g)^{−s} has a power tail of index 1/|s|
/// for s < 0, so E w < ∞ exactly when s > −1.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct TailProbe {
    pub s: f64,
    pub mean_weight: f64,
    pub stderr: f64,
    pub hill_alpha: f64,
    /// 1/|s| for s < 0, ∞ otherwise.
    pub expected_alpha: f64,
}

pub fn mu_s_tail_probe(spec: &MuSDensitySpec, draws: u64, key: StreamKey) -> TailProbe {
    let n = spec.n;
    let ws = crate::mc::collect(key, draws, |rng, _| {
        let g = sample_grassmann_invariant(2 * n, rng);
        let a = a_r_block(&g, n, spec.r).expect("valid spec");
        (2.0 * spec.s * a.det().norm().ln() - spec.s * log_det_one_plus_gram(&g)).exp()
    });
    let mut acc = RealAccum::default();
    ws.iter().for_each(|&w| acc.push(w));
    TailProbe {
        s: spec.s,
        mean_weight: acc.mean(),
        stderr: acc.stderr(),
        hill_alpha: hill_estimator(ws, (draws as f64).sqrt() as usize),
        expected_alpha: if spec.s < 0.0 { 1.0 / spec.s.abs() } else { f64::INFINITY },
    }
}

/// Hill tail-index estimate from the top k order statistics.
pub fn hill_estimator(mut xs: Vec<f64>, k: usize) -> f64 {
    xs.sort_by(|a, b| b.total_cmp(a));
    let k = k.clamp(1, xs.len() - 1);
    let base = xs[k].ln();
    let mean: f64 = xs[..k].iter().map(|x| x.ln() - base).sum::<f64>() / k as f64;
    1.0 / mean
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::integrate_to_inf;
    use std::f64::consts::PI;

    fn key(s: u64) -> StreamKey {
        StreamKey::new(77, s)
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random(m: usize, seed: u64) -> ComplexMatrix {
        gaussian_matrix(m, m, 1.0, &mut key(seed).rng(0))
    }

    #[test]
    fn logdensity_values() {
        assert_eq!(grassmann_logdensity(&ComplexMatrix::zeros(3, 3), 0.7), 0.0);
        let z = ComplexMatrix::from_fn(1, 1, |_, _| C64::from_polar(1.0, 0.4));
        assert!((grassmann_logdensity(&z, 0.0) + 2.0 * 2f64.ln()).abs() < 1e-15);
        // ∫_ℂ (1+|z|²)^{−2} = π, in polar form 2π ∫ r(1+r²)^{−2} dr.
        let r = integrate_to_inf(
            |r| {
                let z = ComplexMatrix::from_fn(1, 1, |_, _| c(r, 0.0));
                2.0 * PI * r * grassmann_logdensity(&z, 0.0).exp()
            },
            0.0,
            1e-12,
            1e-12,
        );
        assert!((r.value - PI).abs() < 1e-8);
    }

    #[test]
    fn moebius_identity_and_flip() {
        let z = random(2, 1);
        let id = moebius(&ComplexMatrix::identity(4), &z).unwrap();
        assert!((&id.z - &z).max_abs() < 1e-14 && id.log_cocycle.abs() < 1e-14);
        let w = c(0.3, -1.1);
        let flip = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let img = moebius(&flip, &ComplexMatrix::from_fn(1, 1, |_, _| w)).unwrap();
        assert!((img.z[(0, 0)] + 1.0 / w).norm() < 1e-14);
    }

    #[test]
    fn cocycle_chain_rule() {
        for seed in 0..5 {
            let g = haar_unitary(4, &mut key(10 + seed).rng(0));
            let h = haar_unitary(4, &mut key(20 + seed).rng(0));
            let z = random(2, 30 + seed);
            let gh = moebius(&(&g * &h), &z).unwrap();
            let hz = moebius(&h, &z).unwrap();
            let ghz = moebius(&g, &hz.z).unwrap();
            assert!((gh.log_cocycle - ghz.log_cocycle - hz.log_cocycle).abs() < 1e-9);
            assert!((&gh.z - &ghz.z).max_abs() < 1e-9);
            let back = pushforward_log_factor(&g, &gh.z).unwrap();
            assert!(back.is_finite());
        }
    }

    #[test]
    fn unitary_moves_density_by_cocycle() {
        // det(1 + Z'*Z') = det(1 + Z*Z)/|det(a + bZ)|² for unitary g.
        let g = haar_unitary(6, &mut key(3).rng(0));
        let z = random(3, 4);
        let img = moebius(&g, &z).unwrap();
        let lhs = log_det_one_plus_gram(&img.z);
        assert!((lhs - log_det_one_plus_gram(&z) + 2.0 * img.log_cocycle).abs() < 1e-10);
        assert!((pushforward_log_factor(&g, &img.z).unwrap() + img.log_cocycle).abs() < 1e-10);
    }

    #[test]
    fn corner_projection() {
        let z = random(3, 5);
        assert!(project_corner(&z, 3).is_err());
        assert_eq!(project_corner(&z, 2).unwrap(), z.block(0, 0, 2, 2));
        let mut bd = ComplexMatrix::zeros(3, 3);
        bd.set_block(0, 0, &random(2, 6));
        bd[(2, 2)] = c(4.0, 0.0);
        assert_eq!(project_corner(&bd, 2).unwrap(), bd.block(0, 0, 2, 2));
    }

    #[test]
    fn mu_s_density_reductions() {
        let g = random(4, 7);
        let spec = MuSDensitySpec { n: 2, r: 0, s: 0.0 };
        assert!((mu_s_logdensity(&g, &spec).unwrap() - grassmann_logdensity(&g, 0.0)).abs() < 1e-12);
        assert_eq!(mu_s_logdensity(&ComplexMatrix::zeros(4, 4), &spec).unwrap(), 0.0);
        assert_eq!(a_r_block(&g, 2, -1).unwrap().rows(), 2);
        assert_eq!(a_r_block(&g, 2, 1).unwrap().rows(), 4);
        assert!(a_r_block(&g, 2, 2).is_err());
        // s = 0 is unchanged by unitary conjugation.
        let u = haar_unitary(4, &mut key(8).rng(0));
        let v = haar_unitary(4, &mut key(9).rng(0));
        let moved = &(&u * &g) * &v;
        assert!((mu_s_logdensity(&moved, &spec).unwrap() - mu_s_logdensity(&g, &spec).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn schur_paths_agree() {
        let g = random(6, 11);
        let a = schur_chain(&g, 3, 1).unwrap();
        let b = schur_chain_four_maps(&g, 3, 1).unwrap();
        assert!((&a - &b).max_abs() < 1e-9 * a.max_abs().max(1.0));
        let mut bd = ComplexMatrix::identity(6);
        let centre = random(2, 12);
        bd.set_block(2, 2, &centre);
        assert!((&schur_chain(&bd, 3, 1).unwrap() - &centre).max_abs() < 1e-15);
        assert!(schur_chain(&g, 3, 3).is_err());
    }

    #[test]
    fn scalar_law_and_symmetry() {
        let (d, crit) = ks_scalar_uniformity(20_000, key(13));
        assert!(d < crit);
        let (d, crit) = ks_projection_coherence(2, 20_000, key(14));
        assert!(d < crit);
        assert!(trace_symmetry_check(2, 20_000, key(15)).pass);
    }

    #[test]
    fn scalar_mu_s_sampler_matches_density() {
        // E[1/(1+|z|²)] under (1+|z|²)^{−2−s}: E[1−u] with u ~ Beta(1, 1+s).
        let s = 0.5;
        let acc = run_chunked(
            key(16),
            50_000,
            RealAccum::default,
            |a, rng, _| a.push(1.0 / (1.0 + sample_mu_s_scalar(s, rng).norm_sqr())),
            |a, b| a.merge(b),
        );
        assert!((acc.mean() - (1.0 + s) / (2.0 + s)).abs() < 4.0 * acc.stderr());
    }

    #[test]
    fn hill_recovers_pareto_index() {
        let xs = crate::mc::collect(key(17), 100_000, |rng, _| rng.random::<f64>().powf(-1.0 / 1.5));
        let a = hill_estimator(xs, 300);
        assert!((a - 1.5).abs() < 0.3, "{a}");
    }
}

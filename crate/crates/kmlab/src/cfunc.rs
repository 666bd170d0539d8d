//! Closed-form c-function products, the Selberg Gamma ratio and the abelian
//! partition constant.
//!
//! Index conventions (frozen, see tests):
//!
//! * type A: factor (1 − i(λ_j − λ_k)/(2(k − j)))⁻¹ for j < k, i.e. roots
//!   e_j − e_k with ⟨ρ, e_j − e_k⟩ = 2(k − j);
//! * types B/C/D: roots e_k − e_j (k > j), e_p + e_q (p < q), plus 2e_p (C)
//!   or e_r (B), with ρ_j = 2(j−1), 2j, 2j−1 for D, C, B.
//!
//! Every finite product is Π_{α>0} (1 − i⟨λ,α⟩/⟨ρ,α⟩)⁻¹; the weighted ones
//! replace ⟨ρ,α⟩ by ⟨ρ + 2sΛ, α⟩.

use crate::ensembles::Family;
use crate::special::{hurwitz_zeta, ln_gamma, weierstrass_tail, EULER_GAMMA};
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CfuncError {
    #[error("pole: factor vanishes at {0}")]
    PoleHit(String),
    #[error("support of λ exceeds rank: {0}")]
    Support(String),
}

type Result<T> = std::result::Result<T, CfuncError>;

const POLE_EPS: f64 = 1e-14;

/// Finitely supported real frequency vector, 1-based indices.
#[derive(Clone, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpectralParam {
    pub values: Vec<(usize, f64)>,
}

impl SpectralParam {
    pub fn from_dense(v: &[f64]) -> Self {
        Self { values: v.iter().enumerate().filter(|(_, x)| **x != 0.0).map(|(i, &x)| (i + 1, x)).collect() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Largest index carrying a nonzero value (0 for λ = 0).
    pub fn support_max(&self) -> usize {
        self.values.iter().filter(|(_, x)| *x != 0.0).map(|(j, _)| *j).max().unwrap_or(0)
    }

    pub fn get(&self, j: usize) -> f64 {
        self.values.iter().filter(|(i, _)| *i == j).map(|(_, x)| x).sum()
    }

    pub fn dense(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|j| self.get(j)).collect()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().map(|(_, x)| x).sum()
    }

    pub fn neg(&self) -> Self {
        Self { values: self.values.iter().map(|&(j, x)| (j, -x)).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct RootSystemSpec {
    pub family: Family,
    pub rank: usize,
}

impl RootSystemSpec {
    pub fn new(family: Family, rank: usize) -> Self {
        Self { family, rank }
    }

    /// ρ_j (sum of positive roots) for types B/C/D, j = 1..l.
    pub fn rho(&self, j: usize) -> f64 {
        let j = j as f64;
        match self.family {
            Family::D => 2.0 * (j - 1.0),
            Family::C => 2.0 * j,
            Family::B => 2.0 * j - 1.0,
            Family::A => panic!("type A uses the index-pair form"),
        }
    }

    /// Positive roots as coefficient vectors in e_1..e_l.
    pub fn positive_roots(&self) -> Vec<Vec<f64>> {
        let l = self.rank;
        let mut out = Vec::new();
        let unit = |i: usize| {
            let mut v = vec![0.0; l];
            v[i] = 1.0;
            v
        };
        for j in 0..l {
            for k in j + 1..l {
                let mut v = unit(k);
                v[j] -= 1.0;
                out.push(v);
                let mut w = unit(k);
                w[j] += 1.0;
                out.push(w);
            }
        }
        match self.family {
            Family::C => (0..l).for_each(|p| out.push(unit(p).iter().map(|x| 2.0 * x).collect())),
            Family::B => (0..l).for_each(|r| out.push(unit(r))),
            _ => {}
        }
        out
    }

    pub fn rho_vec(&self) -> Vec<f64> {
        (1..=self.rank).map(|j| self.rho(j)).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// (1 − i x/den)⁻¹ with a pole check.
fn inv_factor(x: f64, den: f64, what: impl FnOnce() -> String) -> Result<C64> {
    let f = C64::new(1.0, -x / den);
    if !den.is_finite() || den == 0.0 || f.norm() < POLE_EPS {
        return Err(CfuncError::PoleHit(what()));
    }
    Ok(1.0 / f)
}

/// Π_{1≤j<k≤n} (1 + (i/2)(λ_j − λ_k)/(j − k))⁻¹, the SU(n) pivot law.
pub fn c_finite_a(n: usize, lam: &SpectralParam) -> Result<C64> {
    if lam.support_max() > n {
        return Err(CfuncError::Support(format!("{} > {n}", lam.support_max())));
    }
    let l = lam.dense(n);
    let mut acc = C64::new(1.0, 0.0);
    for j in 0..n {
        for k in j + 1..n {
            acc *= inv_factor(l[j] - l[k], 2.0 * (k - j) as f64, || format!("A pair ({},{})", j + 1, k + 1))?;
        }
    }
    Ok(acc)
}

/// Σ_{d≥d0}[log(1+w/d) − w/d], the partners of row j beyond the support.
fn row_tail(w: C64, d0: usize, cutoff: usize, analytic_tail: bool) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for d in d0..=cutoff.max(d0 - 1) {
        let df = d as f64;
        acc += (1.0 + w / df).ln() - w / df;
    }
    if analytic_tail {
        acc += weierstrass_tail(w, cutoff.max(d0 - 1));
    }
    acc
}

fn c_limit_a_impl(lam: &SpectralParam, cutoff: usize, analytic_tail: bool) -> Result<C64> {
    let m = lam.support_max();
    if m == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let l = lam.dense(m);
    let i = C64::new(0.0, 1.0);
    let mut log = i * (0.5 * EULER_GAMMA * lam.sum());
    for j in 0..m {
        for k in j + 1..m {
            let d = (k - j) as f64;
            let f = C64::new(1.0, -(l[j] - l[k]) / (2.0 * d));
            if f.norm() < POLE_EPS {
                return Err(CfuncError::PoleHit(format!("limit pair ({},{})", j + 1, k + 1)));
            }
            // exponent −(i/2)λ_j/(j−k) = +(i/2)λ_j/d
            log -= f.ln() + i * (0.5 * l[j] / d);
        }
        // Partners k > m, at distances d = k − j ≥ m − j.
        let w = -i * (0.5 * l[j]);
        let d0 = m - j;
        let end = cutoff.saturating_sub(j + 1).max(d0 - 1);
        log -= row_tail(w, d0, end, analytic_tail);
    }
    Ok(log.exp())
}

/// Regularized N → ∞ limit of the type-A pivot law,
/// exp((i/2)γΣλ_j) Π_{j<k} [(1 + (i/2)(λ_j−λ_k)/(j−k)) e^{−(i/2)λ_j/(j−k)}]⁻¹,
/// with every row's tail summed analytically beyond the cutoff.
pub fn c_limit_a(lam: &SpectralParam) -> Result<C64> {
    let cutoff = 1000usize.max(lam.support_max() * 4).max(lam.values.iter().map(|(_, x)| (40.0 * x.abs()) as usize).max().unwrap_or(0));
    c_limit_a_impl(lam, cutoff, true)
}

/// Product truncated at column index `cutoff` plus the analytic tail.
pub fn c_limit_a_corrected(lam: &SpectralParam, cutoff: usize) -> Result<C64> {
    c_limit_a_impl(lam, cutoff, true)
}

/// Product truncated at column index `cutoff`, no tail correction.
pub fn c_limit_a_truncated(lam: &SpectralParam, cutoff: usize) -> Result<C64> {
    c_limit_a_impl(lam, cutoff, false)
}

/// exp(−(i/2) log n Σλ) · c_finite_A(n, λ): the pivot law of √n·U, U Haar
/// on SU(n). Converges to [`c_limit_a`] at rate O(1/n).
pub fn c_scaled_finite_a(n: usize, lam: &SpectralParam) -> Result<C64> {
    let m = lam.support_max();
    if m > n {
        return Err(CfuncError::Support(format!("{m} > {n}")));
    }
    let l = lam.dense(m.max(1));
    let i = C64::new(0.0, 1.0);
    let mut log = -i * (0.5 * (n as f64).ln() * lam.sum());
    // Only rows inside the support contribute.
    for j in 0..m {
        for k in j + 1..n {
            let lk = if k < m { l[k] } else { 0.0 };
            let f = C64::new(1.0, -(l[j] - lk) / (2.0 * (k - j) as f64));
            log -= f.ln();
        }
    }
    Ok(log.exp())
}

/// Finite form on the index window −N < j < k ≤ M of
/// Π (1 + (i/2)(λ_k − λ_j)/(k − j))⁻¹, λ indexed by ℤ.
pub fn c_window_finite(lam: &[(i64, f64)], n: i64, m: i64) -> Result<C64> {
    if lam.iter().any(|(j, x)| *x != 0.0 && (*j <= -n || *j > m)) {
        return Err(CfuncError::Support("λ outside the window".into()));
    }
    let val = |j: i64| lam.iter().filter(|(i, _)| *i == j).map(|(_, x)| x).sum::<f64>();
    let support: Vec<i64> = lam.iter().filter(|(_, x)| *x != 0.0).map(|(j, _)| *j).collect();
    let mut log = C64::new(0.0, 0.0);
    let mut pairs = std::collections::BTreeSet::new();
    for &s in &support {
        for t in (-n + 1)..=m {
            if t != s {
                pairs.insert((s.min(t), s.max(t)));
            }
        }
    }
    for (j, k) in pairs {
        let x = val(k) - val(j);
        let f = C64::new(1.0, 0.5 * x / (k - j) as f64);
        if f.norm() < POLE_EPS {
            return Err(CfuncError::PoleHit(format!("window pair ({j},{k})")));
        }
        log -= f.ln();
    }
    Ok(log.exp())
}

/// The window form with the scaling prefactor exp(+(i/2) log(N/M) Σλ),
/// which removes the asymmetric harmonic drift when N ≠ M.
pub fn c_window_scaled(lam: &[(i64, f64)], n: i64, m: i64) -> Result<C64> {
    let sum: f64 = lam.iter().map(|(_, x)| x).sum();
    let pre = C64::new(0.0, 0.5 * (n as f64 / m as f64).ln() * sum).exp();
    Ok(pre * c_window_finite(lam, n, m)?)
}

/// Doubly infinite limit of [`c_window_finite`] as N = M → ∞.
///
/// Each support point s with value λ pairs its outside partners at
/// distance d on the left and right: Π_d (1 + λ²/(4d²))⁻¹ = (πλ/2)/sinh(πλ/2),
/// corrected for partners that fall inside the support.
pub fn c_limit_doubly_infinite(lam: &[(i64, f64)]) -> Result<C64> {
    let mut pts = std::collections::BTreeMap::new();
    for &(j, x) in lam {
        *pts.entry(j).or_insert(0.0) += x;
    }
    pts.retain(|_, x| *x != 0.0);
    let mut log = C64::new(0.0, 0.0);
    for (&s, &l) in &pts {
        let h = 0.5 * std::f64::consts::PI * l;
        log += C64::new((h / h.sinh()).ln(), 0.0);
        for &t in pts.keys().filter(|&&t| t != s) {
            // Undo the outside-partner factor for a partner inside the support.
            let d = (t - s).abs() as f64;
            let outside = if t > s { C64::new(1.0, -0.5 * l / d) } else { C64::new(1.0, 0.5 * l / d) };
            log += outside.ln();
        }
    }
    let keys: Vec<i64> = pts.keys().copied().collect();
    for a in 0..keys.len() {
        for b in a + 1..keys.len() {
            let (j, k) = (keys[a], keys[b]);
            let f = C64::new(1.0, 0.5 * (pts[&k] - pts[&j]) / (k - j) as f64);
            if f.norm() < POLE_EPS {
                return Err(CfuncError::PoleHit(format!("pair ({j},{k})")));
            }
            log -= f.ln();
        }
    }
    Ok(log.exp())
}

/// Shared B/C/D product with shift: Π_α (1 − i⟨λ,α⟩/(⟨ρ,α⟩ + 2s⟨Λ,α⟩))⁻¹,
/// Λ = (1,…,1).
fn c_bcd_shifted(spec: &RootSystemSpec, lam: &SpectralParam, s: f64) -> Result<C64> {
    if spec.family == Family::A {
        return Err(CfuncError::Support("type A has its own evaluator".into()));
    }
    if lam.support_max() > spec.rank {
        return Err(CfuncError::Support(format!("{} > {}", lam.support_max(), spec.rank)));
    }
    let l = lam.dense(spec.rank);
    let rho = spec.rho_vec();
    let big = vec![1.0; spec.rank];
    let mut acc = C64::new(1.0, 0.0);
    for a in spec.positive_roots() {
        let den = dot(&rho, &a) + 2.0 * s * dot(&big, &a);
        acc *= inv_factor(dot(&l, &a), den, || format!("root {a:?}"))?;
    }
    Ok(acc)
}

/// Pivot-law products for SO(2l+1), Sp(l), SO(2l).
///
/// D uses denominators p+q−2 on the e_p + e_q roots (the value that follows
/// from ρ_j = 2(j−1); Monte Carlo on SO(4) and SO(6) agrees with it).
pub fn c_finite_bcd(spec: &RootSystemSpec, lam: &SpectralParam) -> Result<C64> {
    c_bcd_shifted(spec, lam, 0.0)
}

/// Weighted laws. B/C/D: weight |det A|^{2s} on the leading l×l block, i.e.
/// ⟨ρ,α⟩ → ⟨ρ + 2sΛ, α⟩ with Λ = (1,…,1). Type A: weight |σ_r|^{2s}, with
/// Λ the first r coordinates.
pub fn c_weighted(family: Family, rank: usize, lam: &SpectralParam, s: f64, r: usize) -> Result<C64> {
    match family {
        Family::A => {
            let n = rank + 1;
            if lam.support_max() > n {
                return Err(CfuncError::Support(format!("{} > {n}", lam.support_max())));
            }
            let l = lam.dense(n);
            let mut acc = C64::new(1.0, 0.0);
            for j in 0..n {
                for k in j + 1..n {
                    let big = (j < r) as i32 as f64 - (k < r) as i32 as f64;
                    let den = 2.0 * (k - j) as f64 + 2.0 * s * big;
                    acc *= inv_factor(l[j] - l[k], den, || format!("weighted A ({},{})", j + 1, k + 1))?;
                }
            }
            Ok(acc)
        }
        _ => c_bcd_shifted(&RootSystemSpec::new(family, rank), lam, s),
    }
}

/// Π_{j=1}^n Γ(j − is)/Γ(j).
pub fn selberg_gamma_ratio(n: usize, s: f64) -> C64 {
    let mut log = C64::new(0.0, 0.0);
    for j in 1..=n {
        let jf = j as f64;
        log += ln_gamma(C64::new(jf, -s)) - ln_gamma(C64::new(jf, 0.0));
    }
    log.exp()
}

/// π(ρ)/π(μ), π(x) = Π_{α>0} ⟨x, α⟩.
pub fn harish_c_rational(positive_roots: &[Vec<f64>], rho: &[f64], mu: &[C64]) -> Result<C64> {
    let mut acc = C64::new(1.0, 0.0);
    for a in positive_roots {
        let num = dot(rho, a);
        let den: C64 = mu.iter().zip(a).map(|(m, x)| m * x).sum();
        if den.norm() < POLE_EPS {
            return Err(CfuncError::PoleHit(format!("⟨μ,{a:?}⟩ = 0")));
        }
        acc *= num / den;
    }
    Ok(acc)
}

/// Partition constant Π_{n>0}(1 + k/(βn))⁻¹ e^{k/(βn)} = Γ(1 + k/β) e^{+γk/β}.
pub fn partition_z(beta: f64, k: f64) -> f64 {
    let z = k / beta;
    (ln_gamma(C64::new(1.0 + z, 0.0)).re + EULER_GAMMA * z).exp()
}

/// The closed form as printed, Γ(1 + k/β) e^{−γk/β}. Kept for comparison
/// only; it is not the value of the product.
pub fn partition_z_printed(beta: f64, k: f64) -> f64 {
    let z = k / beta;
    (ln_gamma(C64::new(1.0 + z, 0.0)).re - EULER_GAMMA * z).exp()
}

/// The product truncated at `cutoff` factors.
pub fn partition_product_truncated(beta: f64, k: f64, cutoff: usize) -> f64 {
    let z = k / beta;
    let mut log = 0.0;
    for n in 1..=cutoff {
        let x = z / n as f64;
        log += x - x.ln_1p();
    }
    log.exp()
}

/// Truncated product plus the analytic remainder Σ_{n>K}[z/n − log(1+z/n)].
pub fn partition_product_corrected(beta: f64, k: f64, cutoff: usize) -> f64 {
    let z = k / beta;
    let tail = -weierstrass_tail(C64::new(z, 0.0), cutoff).re;
    partition_product_truncated(beta, k, cutoff) * tail.exp()
}

/// Leading-order remainder of the truncated product, z²/(2K).
pub fn partition_tail_estimate(beta: f64, k: f64, cutoff: usize) -> f64 {
    let z = k / beta;
    0.5 * z * z * hurwitz_zeta(2, cutoff as f64 + 1.0)
}

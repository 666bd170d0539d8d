//! Empirical diagonal distributions: pivot coordinates of Haar samples,
//! their characteristic functions, and z-score comparison with c-functions.

use crate::cfunc::{selberg_gamma_ratio, SpectralParam};
use crate::ensembles::{ginibre, haar_compact, Family, GroupSpec};
use crate::linalg::{ldu, ComplexMatrix, LinalgError, C64};
use crate::mc::{run_chunked, ComplexAccum, RealAccum, StreamKey, WeightedAccum};

/// z-threshold for every Monte-Carlo comparison.
pub const Z_PASS: f64 = 4.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiagError {
    #[error("sample off the top stratum (minor {0})")]
    OffStratum(usize),
    #[error("λ supported beyond {0} coordinates")]
    Support(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Pivot coordinates a_j = |z_j| of one group element.
#[derive(Clone, Debug, PartialEq)]
pub struct ACoordinates {
    pub a: Vec<f64>,
    pub group: GroupSpec,
}

impl ACoordinates {
    /// Σ λ_j log a_j.
    pub fn pairing(&self, lam: &SpectralParam) -> f64 {
        lam.values.iter().filter(|(_, x)| *x != 0.0).map(|&(j, x)| x * self.a[j - 1].ln()).sum()
    }
}

/// Number of pivot coordinates: n for SU(n) (the last is 1/|σ_{n−1}|), l
/// for the rank-l orthogonal and symplectic groups.
pub fn n_coordinates(spec: &GroupSpec) -> usize {
    match spec.family {
        Family::A => spec.rank + 1,
        _ => spec.rank,
    }
}

/// Type A: a_j = |d_j| = |σ_j/σ_{j−1}|. Types B/C/D (quadratic-form basis):
/// a_j = |d| at the basis index −j (−j+½ for C), i.e. matrix position l−j.
pub fn a_coordinates(g: &ComplexMatrix, spec: &GroupSpec) -> Result<ACoordinates, DiagError> {
    let f = ldu(g).map_err(|e| match e {
        LinalgError::SingularMinor(j) => DiagError::OffStratum(j),
        other => DiagError::Linalg(other),
    })?;
    let a = match spec.family {
        Family::A => f.d.iter().map(|d| d.norm()).collect(),
        _ => (1..=spec.rank).map(|j| f.d[spec.rank - j].norm()).collect(),
    };
    Ok(ACoordinates { a, group: *spec })
}

/// log a-coordinates of many samples, stored row-major.
#[derive(Clone, Debug)]
pub struct PivotBatch {
    pub spec: GroupSpec,
    pub stride: usize,
    pub log_a: Vec<f64>,
    pub n_rejected: u64,
}

impl PivotBatch {
    pub fn len(&self) -> usize {
        self.log_a.len() / self.stride
    }

    pub fn is_empty(&self) -> bool {
        self.log_a.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.log_a[i * self.stride..(i + 1) * self.stride]
    }

    pub fn rejection_rate(&self) -> f64 {
        let total = self.len() as u64 + self.n_rejected;
        self.n_rejected as f64 / total.max(1) as f64
    }

    /// Builds a batch from explicit matrices.
    pub fn from_matrices(spec: &GroupSpec, gs: &[ComplexMatrix]) -> Self {
        let stride = n_coordinates(spec);
        let mut b = PivotBatch { spec: *spec, stride, log_a: Vec::new(), n_rejected: 0 };
        for g in gs {
            b.push(a_coordinates(g, spec));
        }
        b
    }

    fn push(&mut self, r: Result<ACoordinates, DiagError>) {
        match r {
            Ok(c) => self.log_a.extend(c.a.iter().map(|x| x.ln())),
            Err(_) => self.n_rejected += 1,
        }
    }

    fn check(&self, lam: &SpectralParam) -> Result<(), DiagError> {
        if lam.support_max() > self.stride {
            Err(DiagError::Support(self.stride))
        } else {
            Ok(())
        }
    }
}

/// Haar samples of `spec` reduced to pivot coordinates.
pub fn sample_pivots(spec: &GroupSpec, draws: u64, key: StreamKey) -> PivotBatch {
    sample_pivots_with(spec, draws, key, |g| g)
}

/// As [`sample_pivots`], with every sample first passed through `map`
/// (left translation in the invariance tests).
pub fn sample_pivots_with<F>(spec: &GroupSpec, draws: u64, key: StreamKey, map: F) -> PivotBatch
where
    F: Fn(ComplexMatrix) -> ComplexMatrix + Sync,
{
    let stride = n_coordinates(spec);
    let empty = || PivotBatch { spec: *spec, stride, log_a: Vec::new(), n_rejected: 0 };
    run_chunked(
        key,
        draws,
        empty,
        |b, rng, _| {
            let g = map(haar_compact(spec, rng));
            b.push(a_coordinates(&g, spec));
        },
        |a, mut b| {
            a.log_a.append(&mut b.log_a);
            a.n_rejected += b.n_rejected;
        },
    )
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct EmpiricalCF {
    pub value: C64,
    pub stderr: f64,
    pub n_samples: u64,
    pub n_rejected: u64,
    /// Kish effective sample size; equals n_samples when unweighted.
    pub ess: f64,
    pub reliable: bool,
}

/// Mean of exp(−i Σ λ_j log a_j) over the batch.
pub fn empirical_cf(batch: &PivotBatch, lam: &SpectralParam) -> Result<EmpiricalCF, DiagError> {
    batch.check(lam)?;
    let mut acc = ComplexAccum::default();
    for i in 0..batch.len() {
        let x = pair(batch.row(i), lam);
        acc.push(C64::from_polar(1.0, -x));
    }
    let n = acc.n;
    Ok(EmpiricalCF {
        value: acc.mean(),
        stderr: acc.stderr(),
        n_samples: n,
        n_rejected: batch.n_rejected,
        ess: n as f64,
        reliable: batch.rejection_rate() < 0.01,
    })
}

/// Indices j (1-based) whose log a_j enter the weight. Type A with r:
/// |σ_r| = a_1⋯a_r. B/C/D: |det A| of the leading l×l block = a_1⋯a_l.
fn weight_support(spec: &GroupSpec, r: usize) -> std::ops::RangeInclusive<usize> {
    match spec.family {
        Family::A => 1..=r,
        _ => 1..=spec.rank,
    }
}

/// Self-normalized importance estimate of E[a^{−iλ} w]/E[w] with
/// w = |σ_r|^{2s} (type A) or |det A|^{2s} (B/C/D, `r` ignored).
pub fn empirical_cf_weighted(batch: &PivotBatch, lam: &SpectralParam, s: f64, r: usize) -> Result<EmpiricalCF, DiagError> {
    batch.check(lam)?;
    let ws = weight_support(&batch.spec, r);
    if *ws.end() > batch.stride {
        return Err(DiagError::Support(batch.stride));
    }
    let logw: Vec<f64> = (0..batch.len())
        .map(|i| {
            let row = batch.row(i);
            2.0 * s * ws.clone().map(|j| row[j - 1]).sum::<f64>()
        })
        .collect();
    let top = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut acc = WeightedAccum::default();
    for (i, lw) in logw.iter().enumerate() {
        let x = pair(batch.row(i), lam);
        acc.push((lw - top).exp(), C64::from_polar(1.0, -x));
    }
    let n = acc.n;
    let ess = acc.ess();
    Ok(EmpiricalCF {
        value: acc.mean(),
        stderr: acc.stderr(),
        n_samples: n,
        n_rejected: batch.n_rejected,
        ess,
        reliable: batch.rejection_rate() < 0.01 && ess >= 0.01 * n as f64,
    })
}

fn pair(log_a: &[f64], lam: &SpectralParam) -> f64 {
    lam.values.iter().filter(|(_, x)| *x != 0.0).map(|&(j, x)| x * log_a[j - 1]).sum()
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ComparisonVerdict {
    pub value: C64,
    pub reference: C64,
    pub stderr: f64,
    pub z: f64,
    pub pass: bool,
}

/// z = |value − reference|/stderr; pass iff z ≤ 4 and the estimate is
/// reliable. With zero stderr an exact match (to 1e-12) is required.
pub fn compare(e: &EmpiricalCF, reference: C64) -> ComparisonVerdict {
    compare_raw(e.value, e.stderr, reference, e.reliable)
}

pub fn compare_raw(value: C64, stderr: f64, reference: C64, reliable: bool) -> ComparisonVerdict {
    let d = (value - reference).norm();
    let (z, ok) = if stderr > 0.0 { (d / stderr, d / stderr <= Z_PASS) } else { (if d < 1e-12 { 0.0 } else { f64::INFINITY }, d < 1e-12) };
    ComparisonVerdict { value, reference, stderr, z, pass: ok && reliable }
}

pub fn all_pass(vs: &[ComparisonVerdict]) -> bool {
    vs.iter().all(|v| v.pass)
}

/// A real Monte-Carlo mean against a reference value.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct MeanCheck {
    pub estimate: f64,
    pub stderr: f64,
    pub reference: f64,
    pub z: f64,
    pub pass: bool,
}

impl MeanCheck {
    pub fn new(acc: &RealAccum, reference: f64) -> Self {
        let se = acc.stderr();
        let z = (acc.mean() - reference).abs() / se;
        MeanCheck { estimate: acc.mean(), stderr: se, reference, z, pass: z <= Z_PASS }
    }
}

fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// E|σ_r|² on SU(n) against 1/dim Λ^r ℂⁿ = 1/C(n, r). For r = 1 this is
/// E|g₁₁|² = 1/n.
pub fn weyl_dimension_check(n: usize, r: usize, draws: u64, key: StreamKey) -> MeanCheck {
    assert!(r >= 1 && r < n);
    let acc = run_chunked(
        key,
        draws,
        RealAccum::default,
        |a, rng, _| {
            let g = haar_compact(&GroupSpec::su(n), rng);
            a.push(g.block(0, 0, r, r).det().norm_sqr());
        },
        |a, b| a.merge(b),
    );
    MeanCheck::new(&acc, 1.0 / binomial(n, r))
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SelbergReport {
    pub n: usize,
    pub s: f64,
    pub verdict: ComparisonVerdict,
    pub note: &'static str,
}

/// Convention note carried by every Selberg report.
pub const SELBERG_NOTE: &str = "unit-variance Ginibre (E|g_ij|^2 = 1); under the variance-2 measure nu_1 \
    the same expectation acquires the factor 2^(-i n s)";

/// E[det(g*g)^{−is}] over unit-variance Ginibre against Π Γ(j − is)/Γ(j).
/// The integrand has modulus one, so the plain mean is used; ESS = draws.
pub fn selberg_mc_check(n: usize, s: f64, draws: u64, key: StreamKey) -> SelbergReport {
    let acc = run_chunked(
        key,
        draws,
        ComplexAccum::default,
        |a, rng, _| {
            let g = ginibre(n, 2.0, rng);
            let ld = (&g.adjoint() * &g).logdet_hpd().unwrap_or(f64::NAN);
            if ld.is_finite() {
                a.push(C64::from_polar(1.0, -s * ld));
            }
        },
        |a, b| a.merge(b),
    );
    let reliable = acc.n as f64 >= 0.99 * draws as f64;
    SelbergReport {
        n,
        s,
        verdict: compare_raw(acc.mean(), acc.stderr(), selberg_gamma_ratio(n, s), reliable),
        note: SELBERG_NOTE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfunc::{c_finite_a, c_finite_bcd, c_weighted, RootSystemSpec};
    use crate::ensembles::{haar_special_unitary, orthogonal_change_of_basis};

    fn key(s: u64) -> StreamKey {
        StreamKey::new(2024, s)
    }

    #[test]
    fn identity_has_unit_coordinates() {
        for spec in [GroupSpec::su(3), GroupSpec::qf(Family::B, 2), GroupSpec::qf(Family::C, 2), GroupSpec::qf(Family::D, 2)] {
            let a = a_coordinates(&ComplexMatrix::identity(spec.dim()), &spec).unwrap();
            assert!(a.a.iter().all(|x| (x - 1.0).abs() < 1e-15));
        }
    }

    #[test]
    fn su2_first_coordinate_is_g11() {
        let mut rng = key(0).rng(0);
        let g = haar_special_unitary(2, &mut rng);
        let a = a_coordinates(&g, &GroupSpec::su(2)).unwrap();
        assert!((a.a[0] - g[(0, 0)].norm()).abs() < 1e-14);
        assert!((a.a[1] * a.a[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn so2_rotation_has_unit_pivot() {
        // In the form basis a rotation is diag(e^{±iθ}); by hand, d₀ = e^{iθ}.
        let c = orthogonal_change_of_basis(Family::D, 1);
        for &t in &[0.3f64, 1.2, 2.9] {
            let r = ComplexMatrix::from_real_rows(&[&[t.cos(), -t.sin()], &[t.sin(), t.cos()]]);
            let g = &(&c * &r) * &c.adjoint();
            let a = a_coordinates(&g, &GroupSpec::qf(Family::D, 1)).unwrap();
            assert!((a.a[0] - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn off_stratum_is_rejected() {
        let g = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert_eq!(a_coordinates(&g, &GroupSpec::su(2)), Err(DiagError::OffStratum(1)));
        let b = PivotBatch::from_matrices(&GroupSpec::su(2), &[g, ComplexMatrix::identity(2)]);
        assert_eq!(b.n_rejected, 1);
        assert_eq!(b.len(), 1);
    }

    #[test]
    fn zero_lambda_is_exact() {
        let b = sample_pivots(&GroupSpec::su(3), 500, key(1));
        let e = empirical_cf(&b, &SpectralParam::zero()).unwrap();
        assert_eq!(e.value, C64::new(1.0, 0.0));
        assert_eq!(e.stderr, 0.0);
        assert!(compare(&e, C64::new(1.0, 0.0)).pass);
    }

    #[test]
    fn su2_and_su3_match_c_function() {
        let b2 = sample_pivots(&GroupSpec::su(2), 200_000, key(2));
        let lam = SpectralParam::from_dense(&[2.0, 0.0]);
        let e = empirical_cf(&b2, &lam).unwrap();
        assert!(compare(&e, C64::new(1.0, 0.0) / C64::new(1.0, -1.0)).pass);
        let b3 = sample_pivots(&GroupSpec::su(3), 200_000, key(3));
        let lam = SpectralParam::from_dense(&[1.0, 0.0, 0.0]);
        let e = empirical_cf(&b3, &lam).unwrap();
        assert!(compare(&e, c_finite_a(3, &lam).unwrap()).pass, "{e:?}");
    }

    #[test]
    fn bcd_match_c_function() {
        for fam in [Family::B, Family::C, Family::D] {
            let spec = GroupSpec::qf(fam, 2);
            let b = sample_pivots(&spec, 100_000, key(4));
            assert!(b.rejection_rate() < 1e-3);
            let lam = SpectralParam::from_dense(&[0.8, -0.5]);
            let e = empirical_cf(&b, &lam).unwrap();
            let r = c_finite_bcd(&RootSystemSpec::new(fam, 2), &lam).unwrap();
            assert!(compare(&e, r).pass, "{fam:?} {e:?} {r}");
        }
    }

    #[test]
    fn weighted_su2_closed_form_and_s0() {
        let b = sample_pivots(&GroupSpec::su(2), 200_000, key(5));
        let lam = SpectralParam::from_dense(&[2.0, 0.0]);
        let plain = empirical_cf(&b, &lam).unwrap();
        let w0 = empirical_cf_weighted(&b, &lam, 0.0, 1).unwrap();
        assert!((plain.value - w0.value).norm() < 1e-12);
        let e = empirical_cf_weighted(&b, &lam, 1.0, 1).unwrap();
        let r = c_weighted(Family::A, 1, &lam, 1.0, 1).unwrap();
        assert!((r - C64::new(2.0, 0.0) / C64::new(2.0, -1.0)).norm() < 1e-15);
        assert!(compare(&e, r).pass, "{e:?}");
        assert!(e.ess < e.n_samples as f64);
    }

    #[test]
    fn conjugate_symmetry_and_bound() {
        let b = sample_pivots(&GroupSpec::qf(Family::C, 2), 20_000, key(6));
        let lam = SpectralParam::from_dense(&[1.3, 0.4]);
        let p = empirical_cf(&b, &lam).unwrap();
        let m = empirical_cf(&b, &lam.neg()).unwrap();
        assert!((p.value - m.value.conj()).norm() < 1e-12);
        assert!(p.value.norm() <= 1.0 + 4.0 * p.stderr);
    }

    #[test]
    fn compare_thresholds() {
        let e = EmpiricalCF { value: C64::new(0.5, 0.0), stderr: 0.01, n_samples: 10, n_rejected: 0, ess: 10.0, reliable: true };
        assert_eq!(compare(&e, C64::new(0.5, 0.0)).z, 0.0);
        assert!(!compare(&e, C64::new(0.55, 0.0)).pass);
        let v = [compare(&e, C64::new(0.5, 0.0)), compare(&e, C64::new(0.55, 0.0))];
        assert!(!all_pass(&v));
        assert!(all_pass(&v[..1]));
        let bad = EmpiricalCF { reliable: false, ..e };
        assert!(!compare(&bad, e.value).pass);
    }

    #[test]
    fn weyl_and_selberg_small() {
        assert!(weyl_dimension_check(2, 1, 50_000, key(7)).pass);
        assert!(weyl_dimension_check(3, 2, 50_000, key(8)).pass);
        let r = selberg_mc_check(1, 0.0, 1000, key(9));
        assert!(r.verdict.pass && r.verdict.z == 0.0);
        assert!(selberg_mc_check(2, 0.5, 100_000, key(10)).verdict.pass);
    }
}

//! Rank-one spherical analysis on SL(2, ℂ): the sech law of the diagonal
//! coordinate, its residue-series and quadrature inversions, and the
//! affine c-function product (a conjecture, evaluated only as a probe).
//!
//! Radial coordinate: a > 0, u = log a, and K-biinvariant densities are
//! normalized against sinh²(2u) du on u ≥ 0.

use crate::linalg::C64;
use crate::special::{integrate, integrate_panels, integrate_to_inf};
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SphericalError {
    #[error("residue series not converged after {0} terms")]
    DivergenceAlarm(usize),
    #[error("a = {0} outside the contour-closing range a > 1")]
    Domain(f64),
    #[error("target transform does not decay: |H(λ)|λ² = {0:e} at the tail grid")]
    TailDivergence(f64),
    #[error("factor {0} of the product vanishes")]
    PoleHit(String),
}

type Result<T> = std::result::Result<T, SphericalError>;

/// sech(πλ/2).
pub fn sech_cf(lam: f64) -> f64 {
    1.0 / (0.5 * PI * lam).cosh()
}

/// Π_{n≤N} (1 + (λ/(2n−1))²)⁻¹, summed in log form.
pub fn sech_partial_product(lam: f64, n: usize) -> f64 {
    (1..=n).map(|k| -(lam / (2 * k - 1) as f64).powi(2).ln_1p()).sum::<f64>().exp()
}

/// (2/π)/(a² + a⁻²), the printed density against da/a. Its mass against
/// da/a is 1/2; it is a probability density against 2da/a = d(2 log a).
pub fn sech_density(a: f64) -> f64 {
    assert!(a > 0.0);
    sech_density_log(a.ln())
}

/// sech_density at a = e^u, i.e. (1/π) sech(2u), safe for large |u|.
pub fn sech_density_log(u: f64) -> f64 {
    1.0 / (PI * (2.0 * u).cosh())
}

/// ∫ sech_density da/a.
pub fn sech_density_mass() -> f64 {
    // In u = log a the integrand is (1/π) sech(2u).
    2.0 * integrate_to_inf(sech_density_log, 0.0, 1e-14, 1e-14).value
}

/// ∫ sech_density(e^{v/2}) e^{−iλv} dv, v = 2 log a.
pub fn sech_density_transform(lam: f64) -> f64 {
    let f = |v: f64| sech_density_log(0.5 * v) * (lam * v).cos();
    let breaks: Vec<f64> = (0..=80).map(|i| i as f64).collect();
    2.0 * integrate_panels(&f, &breaks, 1e-14, 1e-14).value
}

/// (1/2π) ∫ sech(πλ/2) e^{iλv} dλ at v = 2 log a.
pub fn sech_cf_inverse(a: f64) -> f64 {
    let v = 2.0 * a.ln();
    let f = |l: f64| sech_cf(l) * (l * v).cos();
    let breaks: Vec<f64> = (0..=60).map(|i| i as f64).collect();
    2.0 * integrate_panels(&f, &breaks, 1e-14, 1e-14).value / (2.0 * PI)
}

/// Densities of a > 0 tabulated on a grid, with the mass against da/a.
#[derive(Clone, Debug, Serialize)]
pub struct RadialDensity {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Mass of the density against da/a; divide by it to normalize.
    pub normalization: f64,
}

impl RadialDensity {
    /// `f_log(u)` is the density at a = e^u.
    pub fn tabulate(f_log: impl Fn(f64) -> f64, grid: &[f64]) -> Self {
        let mass = integrate_to_inf(&f_log, 0.0, 1e-14, 1e-14).value + integrate_to_inf(|u| f_log(-u), 0.0, 1e-14, 1e-14).value;
        let f = |a: f64| f_log(a.ln());
        Self { grid: grid.to_vec(), values: grid.iter().map(|&a| f(a)).collect(), normalization: mass }
    }
}

/// The residue family at λ = 2ni for the a^{2iλ} integral, as printed:
/// −4i a⁻⁴ Σ_{n≤N} 2n(2n−1)(a⁻²)^{2n−2}(−1)^{n−1}.
pub fn residue_series_first(a: f64, terms: usize) -> C64 {
    let x = a.powi(-2);
    let s: f64 = (1..=terms)
        .map(|n| {
            let nf = n as f64;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            sign * 2.0 * nf * (2.0 * nf - 1.0) * x.powi(2 * n as i32 - 2)
        })
        .sum();
    C64::new(0.0, -4.0 * a.powi(-4) * s)
}

/// −4i a⁻⁴ (2 − 6a⁻⁴)/(1 + a⁻⁴)³.
pub fn residue_closed_first(a: f64) -> C64 {
    let y = a.powi(-4);
    C64::new(0.0, -4.0 * y * (2.0 - 6.0 * y) / (1.0 + y).powi(3))
}

/// The residue family at λ = −2ni for the a^{−2iλ} integral, as printed:
/// −4i a⁻² Σ_{n≤N} 2n(2n+1)(a⁻²)^{2n−1}(−1)^n.
pub fn residue_series_second(a: f64, terms: usize) -> C64 {
    let x = a.powi(-2);
    let s: f64 = (1..=terms)
        .map(|n| {
            let nf = n as f64;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign * 2.0 * nf * (2.0 * nf + 1.0) * x.powi(2 * n as i32 - 1)
        })
        .sum();
    C64::new(0.0, -4.0 * a.powi(-2) * s)
}

/// −8i a⁻² (a⁻⁶ − 3a⁻²)/(1 + a⁻⁴)³, the second printed closed form read
/// with prefactor −4i·2.
pub fn residue_closed_second(a: f64) -> C64 {
    let x = a.powi(-2);
    C64::new(0.0, -8.0 * x * (x.powi(3) - 3.0 * x) / (1.0 + x * x).powi(3))
}

/// The inversion integral of (4.4.15) for Hφ(λ) = (λ − i)/sinh(πλ/2),
/// from the residue series. The printed residue sums are the negatives of
/// the real-line integrals, so the sign is restored here; the result is
/// 32/(a² + a⁻²)³.
pub fn residue_phi(a: f64, terms: usize) -> Result<f64> {
    if a <= 1.0 {
        return Err(SphericalError::Domain(a));
    }
    let x = a.powi(-2);
    // Next-term bound for both alternating families: 2N(2N+1)x^{2N}·4a⁻⁴.
    let nf = (terms + 1) as f64;
    let next = 4.0 * 2.0 * nf * (2.0 * nf + 1.0) * x.powi(2 * terms as i32);
    let i1 = -residue_series_first(a, terms);
    let i2 = -residue_series_second(a, terms);
    let u = a.ln();
    let v = (i1 - i2) / C64::new(0.0, 2.0 * (2.0 * u).sinh());
    if !v.re.is_finite() || next > 1e-13 * v.re.abs().max(1e-300) {
        return Err(SphericalError::DivergenceAlarm(terms));
    }
    Ok(v.re)
}

/// 1/(a² + a⁻²)³.
pub fn phi_closed(a: f64) -> f64 {
    assert!(a > 0.0);
    (a * a + 1.0 / (a * a)).powi(-3)
}

/// ∫₀^∞ phi_closed(e^u) sinh²(2u) du = π/64.
pub const PHI_CLOSED_MASS: f64 = PI / 64.0;

/// Hφ for the sech family: −i(λ − i)/cos(i(π/2)(λ − i)) = (λ − i)/sinh(πλ/2).
pub fn sech_family_transform(lam: f64) -> C64 {
    if lam == 0.0 {
        // Simple pole in the imaginary part; the inversion pairs ±λ so
        // this value is never used.
        return C64::new(2.0 / PI, -f64::INFINITY);
    }
    C64::new(lam, -1.0) / (0.5 * PI * lam).sinh()
}

/// λ·sin(2λu)/sinh(2u), the rank-one kernel times λ², with its u → 0 limit.
fn inversion_kernel(lam: f64, u: f64) -> f64 {
    if u.abs() < 1e-8 {
        lam * lam
    } else {
        lam * (2.0 * lam * u).sin() / (2.0 * u).sinh()
    }
}

const TAIL_GRID: [f64; 5] = [20.0, 40.0, 80.0, 160.0, 320.0];

/// Unnormalized ∫ H(λ)(a^{2iλ} − a^{−2iλ})/(2iλ sinh(2 log a)) λ² dλ by
/// panel quadrature over [−Λ, Λ]. Λ is the first value on a doubling grid
/// beyond which |H(λ)|λ² stays below `tol`.
pub fn harish_inverse_raw(target: impl Fn(f64) -> C64, a: f64, tol: f64) -> Result<f64> {
    assert!(a > 0.0);
    let u = a.ln();
    let mut cut = None;
    for &l in &TAIL_GRID {
        let tail = (0..=32)
            .map(|j| l * (1.0 + j as f64 / 32.0))
            .map(|x| (target(x).norm().max(target(-x).norm())) * x * x)
            .fold(0.0, f64::max);
        if tail < tol {
            cut = Some(l);
            break;
        }
    }
    let big = match cut {
        Some(l) => l,
        None => {
            let l = *TAIL_GRID.last().expect("grid");
            return Err(SphericalError::TailDivergence(target(l).norm() * l * l));
        }
    };
    // The kernel vanishes at λ = 0, where H may have a simple pole; pair
    // ±λ so that only H(λ)k(λ) + H(−λ)k(−λ) is evaluated away from 0.
    let f = |l: f64| {
        if l == 0.0 {
            return 0.0;
        }
        let k = inversion_kernel(l, u);
        (target(l) * k + target(-l) * k).re
    };
    let step = (PI / (2.0 * u.abs().max(1e-3))).min(1.0);
    let n = (big / step).ceil() as usize;
    let breaks: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(big)).collect();
    Ok(integrate_panels(&f, &breaks, tol, 1e-12).value)
}

/// [`harish_inverse_raw`] divided by ∫₀^∞ raw(e^u) sinh²(2u) du, so the
/// K-biinvariant density has unit mass.
pub fn harish_inverse_quadrature(target: impl Fn(f64) -> C64 + Copy, a: f64, tol: f64) -> Result<f64> {
    Ok(harish_inverse_raw(target, a, tol)? / harish_inverse_mass(target, tol)?)
}

/// Upper end of the direct part of the mass integral. Beyond it raw(e^u)
/// is a cancellation-limited oscillatory integral, so the tail is taken
/// from the local exponential decay rate instead.
pub const MASS_SPLIT: f64 = 4.0;

/// ∫₀^∞ raw(e^u) sinh²(2u) du: quadrature on [0, MASS_SPLIT] plus the tail
/// f(U)/r of an exponential fitted at U − ½ and U.
pub fn harish_inverse_mass(target: impl Fn(f64) -> C64 + Copy, tol: f64) -> Result<f64> {
    let err = std::cell::RefCell::new(None);
    let f = |u: f64| match harish_inverse_raw(target, u.exp(), tol) {
        Ok(v) => v * (2.0 * u).sinh().powi(2),
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let breaks: Vec<f64> = (0..=8).map(|i| MASS_SPLIT * i as f64 / 8.0).collect();
    let body = integrate_panels(&f, &breaks, 1e-10, 1e-10).value;
    let (f0, f1) = (f(MASS_SPLIT - 0.5), f(MASS_SPLIT));
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    let rate = (f0 / f1).ln() / 0.5;
    if !(rate.is_finite() && rate > 0.0) {
        return Err(SphericalError::TailDivergence(f1));
    }
    Ok(body + f1 / rate)
}

/// Pairings of one positive root α with the data of the probe.
#[derive(Clone, Debug, Serialize)]
pub struct RootPairing {
    /// ⟨λ, α⟩.
    pub lam: f64,
    /// ⟨ρ, α⟩.
    pub rho: f64,
    /// ⟨Λ, α⟩.
    pub weight: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AffineProbeSpec {
    pub positive_roots: Vec<RootPairing>,
    /// The dual Coxeter number ġ.
    pub dual_coxeter: f64,
    pub s: f64,
    pub k: f64,
}

impl AffineProbeSpec {
    /// sl₂ with λ ∈ ℝ identified with λα: ⟨λ, α⟩ = 2λ, ⟨ρ, α⟩ = 2, ġ = 2,
    /// the scale at which the s = 0 product reduces to sech(πλ/2).
    pub fn sl2(lam: f64, s: f64, k: f64) -> Self {
        Self { positive_roots: vec![RootPairing { lam: 2.0 * lam, rho: 2.0, weight: k }], dual_coxeter: 2.0, s, k }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AffineProbe {
    pub value: C64,
    pub value_doubled_cutoff: C64,
    /// |P(N) − P(2N)|.
    pub doubling_gap: f64,
    /// 2P(2N) − P(N), removing the O(1/N) tail.
    pub extrapolated: C64,
    pub cutoff: usize,
    pub label: &'static str,
}

fn affine_product(spec: &AffineProbeSpec, cutoff: usize) -> Result<C64> {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let two_s = 2.0 * spec.s;
    let mut log = C64::new(0.0, 0.0);
    // c(ρ + 2sΛ − iλ) = Π ⟨ρ,α⟩/⟨ρ + 2sΛ − iλ, α⟩.
    for r in &spec.positive_roots {
        let den = C64::new(r.rho + two_s * r.weight, -r.lam);
        if den.norm() < 1e-14 {
            return Err(SphericalError::PoleHit(format!("finite factor, root pairing {r:?}")));
        }
        log += (C64::new(r.rho, 0.0) / den).ln();
    }
    for n in 1..=cutoff {
        let nf = n as f64;
        for r in &spec.positive_roots {
            for sign in [1.0, -1.0] {
                let lam = sign * r.lam;
                let wt = sign * r.weight;
                let rho = sign * r.rho;
                let d = rho + 2.0 * spec.dual_coxeter * nf;
                let num = one - i * (C64::new(lam, two_s * wt) + i * (two_s * spec.k * nf)) / d;
                let den = one - i * (i * (two_s * spec.k * nf)) / d;
                if num.norm() < 1e-14 || den.norm() < 1e-14 {
                    return Err(SphericalError::PoleHit(format!("n = {n}")));
                }
                log += den.ln() - num.ln();
            }
        }
    }
    Ok(log.exp())
}

/// The conjectural double product, evaluated at `cutoff` and `2·cutoff`.
pub fn affine_c_product_probe(spec: &AffineProbeSpec, cutoff: usize) -> Result<AffineProbe> {
    let v = affine_product(spec, cutoff)?;
    let v2 = affine_product(spec, 2 * cutoff)?;
    Ok(AffineProbe {
        value: v,
        value_doubled_cutoff: v2,
        doubling_gap: (v - v2).norm(),
        extrapolated: v2 * 2.0 - v,
        cutoff,
        label: "CONJECTURAL",
    })
}

/// Σ_u |raw(a)/phi_closed(a) − mean| over a grid, the shape test.
pub fn ratio_spread(values: &[(f64, f64)]) -> f64 {
    let ratios: Vec<f64> = values.iter().map(|&(a, v)| v / phi_closed(a)).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    ratios.iter().map(|r| (r - mean).abs() / mean.abs()).fold(0.0, f64::max)
}

/// Integrates `f` against sinh²(2u) du on [0, ∞) for closed-form checks.
pub fn radial_mass(f: impl Fn(f64) -> f64) -> f64 {
    integrate(|u| f(u.exp()) * (2.0 * u).sinh().powi(2), 0.0, 30.0, 1e-14, 1e-13).value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sech_cf_and_product() {
        assert_eq!(sech_cf(0.0), 1.0);
        assert!((sech_partial_product(1.0, 100_000) - sech_cf(1.0)).abs() < 1e-4);
        assert!(sech_cf(10.0) < 1e-6);
        // The tail of the log product is ≈ λ²/(4N).
        let gap = (sech_partial_product(2.0, 1000) / sech_cf(2.0)).ln();
        assert!((gap - 4.0 / 4000.0).abs() < 1e-6, "{gap}");
    }

    #[test]
    fn sech_density_normalization_and_pair() {
        assert!((sech_density(1.0) - 1.0 / PI).abs() < 1e-16);
        // Mass 1/2 against da/a, i.e. 1 against 2da/a.
        assert!((sech_density_mass() - 0.5).abs() < 1e-10);
        let r = RadialDensity::tabulate(sech_density_log, &[0.5, 1.0, 2.0]);
        assert!((2.0 * r.normalization - 1.0).abs() < 1e-8);
        for lam in [0.0, 0.5, 1.0, 3.0, 7.0, 10.0] {
            assert!((sech_density_transform(lam) - sech_cf(lam)).abs() < 1e-6, "{lam}");
        }
        for a in [0.3, 1.0, 1.7, 4.0] {
            assert!((sech_cf_inverse(a) - sech_density(a)).abs() < 1e-6, "{a}");
        }
    }

    #[test]
    fn residue_series_closed_forms() {
        let a = 2.0;
        assert!((residue_series_first(a, 60) - residue_closed_first(a)).norm() < 1e-10);
        assert!((residue_series_second(a, 60) - residue_closed_second(a)).norm() < 1e-10);
    }

    /// Real-line oracle: ∫ (λ − i)λ/sinh(πλ/2) a^{±2iλ} dλ by quadrature.
    fn real_line(a: f64, sign: f64) -> C64 {
        let u = a.ln();
        let f = |l: f64| {
            let h = if l == 0.0 { C64::new(0.0, -2.0 / PI) } else { C64::new(l, -1.0) * l / (0.5 * PI * l).sinh() };
            h * C64::from_polar(1.0, sign * 2.0 * l * u)
        };
        let breaks: Vec<f64> = (-80..=80).map(|i| i as f64 * 0.5).collect();
        integrate_panels(&f, &breaks, 1e-14, 1e-14).value
    }

    #[test]
    fn printed_residue_sums_have_flipped_sign() {
        for a in [1.5, 2.0, 3.0] {
            assert!((real_line(a, 1.0) + residue_closed_first(a)).norm() < 1e-9);
            assert!((real_line(a, -1.0) + residue_closed_second(a)).norm() < 1e-9);
        }
    }

    #[test]
    fn residue_phi_is_proportional_to_closed_form() {
        let grid = [1.5, 2.0, 3.0, 5.0];
        let vals: Vec<(f64, f64)> = grid.iter().map(|&a| (a, residue_phi(a, 200).unwrap())).collect();
        assert!(ratio_spread(&vals) < 1e-8);
        assert!((vals[1].1 / phi_closed(2.0) - 32.0).abs() < 1e-8);
        assert!(matches!(residue_phi(0.9, 10), Err(SphericalError::Domain(_))));
        assert!(matches!(residue_phi(1.05, 5), Err(SphericalError::DivergenceAlarm(5))));
    }

    #[test]
    fn phi_closed_values() {
        assert!((phi_closed(1.0) - 0.125).abs() < 1e-16);
        for a in [0.2, 0.7, 3.0] {
            assert!((phi_closed(a) - phi_closed(1.0 / a)).abs() < 1e-15);
        }
        assert!((radial_mass(phi_closed) - PHI_CLOSED_MASS).abs() < 1e-12);
    }

    #[test]
    fn quadrature_inversion_matches_shape() {
        let grid = [1.5, 2.0, 3.0];
        let vals: Vec<(f64, f64)> = grid.iter().map(|&a| (a, harish_inverse_raw(sech_family_transform, a, 1e-13).unwrap())).collect();
        assert!(ratio_spread(&vals) < 1e-6, "{vals:?}");
        for &(a, v) in &vals {
            assert!((v - 32.0 * phi_closed(a)).abs() < 1e-8);
        }
        let at1 = harish_inverse_raw(sech_family_transform, 1.0, 1e-13).unwrap();
        assert!((at1 - 32.0 * phi_closed(1.0)).abs() < 1e-8);
        // Weyl symmetry.
        let inv = harish_inverse_raw(sech_family_transform, 0.5, 1e-13).unwrap();
        assert!((inv - vals[1].1).abs() < 1e-9);
        // Linearity.
        let twice = harish_inverse_raw(|l| sech_family_transform(l) * 2.0, 2.0, 1e-13).unwrap();
        assert!((twice - 2.0 * vals[1].1).abs() < 1e-12);
    }

    #[test]
    fn quadrature_inversion_normalized() {
        let m = harish_inverse_mass(sech_family_transform, 1e-13).unwrap();
        assert!((m - 32.0 * PHI_CLOSED_MASS).abs() < 1e-6, "{m}");
        let v = harish_inverse_quadrature(sech_family_transform, 2.0, 1e-13).unwrap();
        let target = phi_closed(2.0) / PHI_CLOSED_MASS;
        assert!(((v - target) / target).abs() < 1e-6, "{v} {target}");
    }

    #[test]
    fn tail_divergence_detected() {
        let r = harish_inverse_raw(|_| C64::new(1.0, 0.0), 2.0, 1e-12);
        assert!(matches!(r, Err(SphericalError::TailDivergence(_))));
    }

    #[test]
    fn affine_probe_reduces_to_sech() {
        let p = affine_c_product_probe(&AffineProbeSpec::sl2(0.0, 0.0, 1.0), 100).unwrap();
        assert!((p.value - C64::new(1.0, 0.0)).norm() < 1e-15);
        for lam in [0.5, 1.0, 2.0] {
            let spec = AffineProbeSpec::sl2(lam, 0.0, 1.0);
            let p = affine_c_product_probe(&spec, 10_000).unwrap();
            // The +α factors run over odd m ≤ 2N + 1, the −α factors over
            // odd m ≤ 2N − 1; one unpaired factor separates P(N) from the
            // sech partial product.
            let unpaired = C64::new(1.0, -lam / 20_001.0);
            assert!((p.value * unpaired - sech_partial_product(lam, 10_000)).norm() < 1e-12);
            assert!((p.extrapolated.re - sech_cf(lam)).abs() < 1e-7, "{lam}");
            assert_eq!(p.label, "CONJECTURAL");
        }
        let pole = AffineProbeSpec { positive_roots: vec![RootPairing { lam: 0.0, rho: 0.0, weight: 0.0 }], dual_coxeter: 2.0, s: 0.0, k: 1.0 };
        assert!(matches!(affine_c_product_probe(&pole, 10), Err(SphericalError::PoleHit(_))));
    }
}

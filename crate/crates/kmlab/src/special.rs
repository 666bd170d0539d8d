//! Special functions and numerical integration.
//!
//! Complex log-Gamma (Lanczos, g = 7), Hurwitz zeta at integer arguments for
//! product tails, adaptive Gauss–Kronrod quadrature and Kolmogorov–Smirnov
//! statistics.

use num_complex::Complex64 as C64;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Principal branch of log Γ(z) off the non-positive real axis.
///
/// The imaginary part is continuous in z away from the negative axis (it is
/// the sum of the log terms, not reduced mod 2π).
pub fn ln_gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        // Reflection: Γ(z)Γ(1−z) = π / sin(πz).
        let s = (C64::new(PI, 0.0) * z).sin();
        return C64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(C64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    C64::new(0.5 * (2.0 * PI).ln(), 0.0) + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn gamma(z: C64) -> C64 {
    ln_gamma(z).exp()
}

/// Real Γ for x > 0.
pub fn gamma_real(x: f64) -> f64 {
    ln_gamma(C64::new(x, 0.0)).re.exp()
}

/// Hurwitz zeta ζ(p, a) = Σ_{k≥0} (a+k)^{−p} for integer p ≥ 2 and a > 0,
/// by Euler–Maclaurin after shifting the argument past 20.
pub fn hurwitz_zeta(p: u32, a: f64) -> f64 {
    assert!(p >= 2 && a > 0.0);
    const B2J: [f64; 8] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
    ];
    let pf = p as f64;
    let shift = if a < 20.0 { (20.0 - a).ceil() as usize } else { 0 };
    let mut head = 0.0;
    for k in 0..shift {
        head += (a + k as f64).powf(-pf);
    }
    let x = a + shift as f64;
    let mut s = x.powf(1.0 - pf) / (pf - 1.0) + 0.5 * x.powf(-pf);
    // Rising factorial p(p+1)…(p+2j−2) over (2j)!.
    let mut rising = pf;
    let mut fact = 2.0;
    let mut xpow = x.powf(-pf - 1.0);
    for (j, b) in B2J.iter().enumerate() {
        let jj = (j + 1) as f64;
        let term = b / fact * rising * xpow;
        s += term;
        if term.abs() < 1e-18 * s.abs() {
            break;
        }
        rising *= (pf + 2.0 * jj - 1.0) * (pf + 2.0 * jj);
        fact *= (2.0 * jj + 1.0) * (2.0 * jj + 2.0);
        xpow /= x * x;
    }
    head + s
}

/// Σ_{d>D} [log(1 + w/d) − w/d], the tail of a Weierstrass product, via
/// Σ_{p≥2} (−1)^{p+1} w^p ζ(p, D+1)/p. Requires |w| < D/2 for fast
/// convergence.
pub fn weierstrass_tail(w: C64, big_d: usize) -> C64 {
    let a = big_d as f64 + 1.0;
    assert!(w.norm() < 0.5 * a, "tail expansion needs |w| well inside the cutoff");
    let mut acc = C64::new(0.0, 0.0);
    let mut wp = w;
    for p in 2..200u32 {
        wp *= w;
        let sign = if p % 2 == 0 { -1.0 } else { 1.0 };
        let term = wp * (sign * hurwitz_zeta(p, a) / p as f64);
        acc += term;
        if term.norm() < 1e-20 {
            break;
        }
    }
    acc
}

/// Values that adaptive quadrature can integrate.
pub trait QuadValue:
    Copy + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self> + std::ops::Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: QuadValue>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    ((k * h), ((k - g) * h).magnitude())
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    pub converged: bool,
}

struct Panel<T> {
    a: f64,
    b: f64,
    val: T,
    err: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive G7K15 on [a, b]: bisects the panel with the largest
/// error estimate until the total is below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<T: QuadValue>(f: impl Fn(f64) -> T, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> QuadResult<T> {
    integrate_panels(&f, &[a, b], abs_tol, rel_tol)
}

/// As [`integrate`] but starting from the given breakpoints.
pub fn integrate_panels<T: QuadValue>(
    f: &impl Fn(f64) -> T,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> QuadResult<T> {
    const MAX_PANELS: usize = 20_000;
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut err = 0.0;
    for w in breaks.windows(2) {
        let (v, e) = gk15(f, w[0], w[1]);
        total = total + v;
        err += e;
        heap.push(Panel { a: w[0], b: w[1], val: v, err: e });
    }
    while err > abs_tol.max(rel_tol * total.magnitude()) && heap.len() < MAX_PANELS {
        let p = heap.pop().expect("non-empty");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let (v1, e1) = gk15(f, p.a, m);
        let (v2, e2) = gk15(f, m, p.b);
        total = total - p.val + v1 + v2;
        err += e1 + e2 - p.err;
        heap.push(Panel { a: p.a, b: m, val: v1, err: e1 });
        heap.push(Panel { a: m, b: p.b, val: v2, err: e2 });
    }
    // Re-sum to shed accumulated cancellation from the running updates.
    let mut value = T::zero();
    let mut e = 0.0;
    for p in heap.iter() {
        value = value + p.val;
        e += p.err;
    }
    QuadResult { value, error: e, converged: e <= abs_tol.max(rel_tol * value.magnitude()) }
}

/// ∫_a^∞ f by the map x = a + t/(1−t).
pub fn integrate_to_inf<T: QuadValue>(f: impl Fn(f64) -> T, a: f64, abs_tol: f64, rel_tol: f64) -> QuadResult<T> {
    let g = |t: f64| {
        if t >= 1.0 {
            return T::zero();
        }
        let u = 1.0 - t;
        f(a + t / u) * (1.0 / (u * u))
    };
    integrate(g, 0.0, 1.0, abs_tol, rel_tol)
}

/// ∫_ℝ f as two half-lines.
pub fn integrate_real_line<T: QuadValue>(f: impl Fn(f64) -> T, abs_tol: f64, rel_tol: f64) -> QuadResult<T> {
    let r = integrate_to_inf(&f, 0.0, 0.5 * abs_tol, rel_tol);
    let l = integrate_to_inf(|x| f(-x), 0.0, 0.5 * abs_tol, rel_tol);
    QuadResult { value: r.value + l.value, error: r.error + l.error, converged: r.converged && l.converged }
}

/// One-sample KS statistic against U(0,1).
pub fn ks_uniform(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max)
}

/// Two-sample KS statistic sup |F₁ − F₂|.
pub fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// 1% critical value 1.63/√N for the one-sample test.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// 1% critical value for the two-sample test with sizes n, m.
pub fn ks_critical_two_sample_1pct(n: usize, m: usize) -> f64 {
    1.63 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: Stirling series after shifting Re z past 15.
    fn ln_gamma_stirling(z: C64) -> C64 {
        let mut shift = C64::new(0.0, 0.0);
        let mut w = z;
        while w.re < 15.0 {
            shift += w.ln();
            w += 1.0;
        }
        let inv = 1.0 / w;
        let inv2 = inv * inv;
        let series = inv
            * (1.0 / 12.0
                + inv2 * (-1.0 / 360.0 + inv2 * (1.0 / 1260.0 + inv2 * (-1.0 / 1680.0 + inv2 * (1.0 / 1188.0)))));
        (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
    }

    #[test]
    fn ln_gamma_against_stirling() {
        for &(re, im) in &[(1.0, -0.5), (1.0, -1.0), (2.0, -1.0), (3.0, -0.5), (0.3, 2.0), (5.5, 7.0), (1.0, 0.0)] {
            let z = C64::new(re, im);
            let a = ln_gamma(z);
            let b = ln_gamma_stirling(z);
            // Compare Γ values so that branch offsets of 2πi do not matter.
            let rel = (a.exp() - b.exp()).norm() / b.exp().norm();
            assert!(rel < 1e-12, "z={z} rel={rel}");
        }
    }

    #[test]
    fn gamma_known_values() {
        assert!((gamma_real(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma_real(0.5) - PI.sqrt()).abs() < 1e-14);
        // Γ(1−i) = 0.49801566811835604 + 0.15494982830181068 i
        let g = gamma(C64::new(1.0, -1.0));
        assert!((g - C64::new(0.498_015_668_118_356, 0.154_949_828_301_810_7)).norm() < 1e-14);
        // Reflection branch.
        let z = C64::new(-0.3, 0.7);
        let lhs = gamma(z) * gamma(C64::new(1.0, 0.0) - z);
        let rhs = PI / (PI * z).sin();
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn hurwitz_against_direct_sum() {
        for &(p, a) in &[(2u32, 1.0), (3, 2.5), (2, 1001.0), (5, 7.0)] {
            let direct: f64 = (0..2_000_000).rev().map(|k| (a + k as f64).powi(-(p as i32))).sum::<f64>();
            let x = a + 2e6f64;
            let tail = x.powi(1 - p as i32) / (p as f64 - 1.0) + 0.5 * x.powi(-(p as i32));
            assert!((hurwitz_zeta(p, a) - direct - tail).abs() < 1e-12, "p={p} a={a}");
        }
        assert!((hurwitz_zeta(2, 1.0) - PI * PI / 6.0).abs() < 1e-14);
    }

    #[test]
    fn weierstrass_tail_matches_direct() {
        let w = C64::new(0.3, -0.8);
        let direct: C64 = (101..2_000_000).map(|d| (1.0 + w / d as f64).ln() - w / d as f64).sum();
        let rest = weierstrass_tail(w, 1_999_999);
        assert!((weierstrass_tail(w, 100) - direct - rest).norm() < 1e-13);
    }

    #[test]
    fn quadrature_basic() {
        let r = integrate(|x: f64| x.sin(), 0.0, PI, 1e-13, 1e-13);
        assert!((r.value - 2.0).abs() < 1e-13);
        let g = integrate_real_line(|x: f64| (-x * x / 2.0).exp(), 1e-13, 1e-13);
        assert!((g.value - (2.0 * PI).sqrt()).abs() < 1e-12);
        let c = integrate(|x: f64| C64::new(0.0, x).exp(), 0.0, 2.0 * PI, 1e-13, 1e-13);
        assert!(c.value.norm() < 1e-12);
    }

    #[test]
    fn ks_statistics() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        assert!((ks_uniform(xs.clone()) - 0.5 / n as f64).abs() < 1e-12);
        assert_eq!(ks_two_sample(xs.clone(), xs), 0.0);
        assert!((ks_two_sample(vec![0.0, 1.0], vec![2.0, 3.0]) - 1.0).abs() < 1e-15);
    }
}

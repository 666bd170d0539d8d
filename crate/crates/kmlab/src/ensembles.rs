//! Samplers for Ginibre, Haar and product ensembles.
//!
//! Every sampler takes the generator explicitly; [`StreamKey::rng`] supplies
//! a replayable one per draw index.
//!
//! Quadratic-form bases. Index the basis by `−l..l` (type D, size 2l),
//! `−l..=l` (type B, size 2l+1) or `−l+½..l−½` (type C), in increasing order
//! along the matrix positions, and pair index `i` with `−i`. Then position
//! `p` pairs with `n−1−p`.
//!
//! * Orthogonal: the form is the antidiagonal `J`. A real Haar element `g`
//!   of SO(n) is carried to `C g C*` with the fixed unitary `C` whose columns
//!   are `(e_neg + e_pos)/√2` and `i(e_neg − e_pos)/√2` for each pair
//!   (`neg = l−j`, `pos = n−1−(l−j)`, `j = 1..l`), plus `e_l` for type B.
//!   `CᵀJC = I`, so the image preserves `J`.
//! * Symplectic: `Ω[p][n−1−p] = sign(index p)`. Columns come in pairs
//!   `(v, −Ω_{p,p'} Ω v̄)` from Gram–Schmidt of Gaussian vectors, which makes
//!   the result unitary with `gᵀΩg = Ω`.
//!
//! In both cases the upper-triangular elements form a Borel subgroup, so the
//! diagonal of an unpivoted LDU carries the pivot coordinates.

use crate::linalg::{qr_unitary, ComplexMatrix, C64};
use crate::mc::StreamKey;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Family {
    /// SU(rank+1)
    A,
    /// SO(2·rank+1)
    B,
    /// Sp(rank), compact, inside U(2·rank)
    C,
    /// SO(2·rank)
    D,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Basis {
    Standard,
    QuadraticForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct GroupSpec {
    pub family: Family,
    pub rank: usize,
    pub basis: Basis,
}

impl GroupSpec {
    pub fn su(n: usize) -> Self {
        Self { family: Family::A, rank: n - 1, basis: Basis::Standard }
    }

    pub fn qf(family: Family, rank: usize) -> Self {
        Self { family, rank, basis: Basis::QuadraticForm }
    }

    /// Matrix size of the defining representation.
    pub fn dim(&self) -> usize {
        match self.family {
            Family::A => self.rank + 1,
            Family::B => 2 * self.rank + 1,
            Family::C | Family::D => 2 * self.rank,
        }
    }

    /// Bilinear form preserved by the group (identity for standard SO).
    pub fn form(&self) -> ComplexMatrix {
        let n = self.dim();
        let l = self.rank;
        match (self.family, self.basis) {
            (Family::A, _) => ComplexMatrix::identity(n),
            (Family::B | Family::D, Basis::Standard) => ComplexMatrix::identity(n),
            (Family::B | Family::D, Basis::QuadraticForm) => {
                ComplexMatrix::from_fn(n, n, |i, j| if i + j == n - 1 { one() } else { zero() })
            }
            (Family::C, Basis::QuadraticForm) => ComplexMatrix::from_fn(n, n, |i, j| {
                if i + j == n - 1 {
                    if i < l {
                        -one()
                    } else {
                        one()
                    }
                } else {
                    zero()
                }
            }),
            (Family::C, Basis::Standard) => ComplexMatrix::from_fn(n, n, |i, j| {
                if j == i + l {
                    one()
                } else if i == j + l {
                    -one()
                } else {
                    zero()
                }
            }),
        }
    }

    /// The form transpose `x ↦ F⁻¹ xᵀ F` for the preserved form `F`.
    pub fn form_transpose(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let f = self.form();
        let finv = f.inverse().expect("forms are invertible");
        &(&finv * &x.transpose()) * &f
    }
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Complex Gaussian with E|z|² = var.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, var: f64) -> C64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

/// Rectangular complex Gaussian matrix with entry variance `var`.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, var: f64, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng, var))
}

/// ν_β: iid complex Gaussian entries with E|g_ij|² = 2/β, so that
/// E exp(−i Re tr(x*g)) = exp(−tr(x*x)/(2β)).
pub fn ginibre<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> ComplexMatrix {
    assert!(beta > 0.0);
    gaussian_matrix(n, n, 2.0 / beta, rng)
}

pub fn ginibre_keyed(n: usize, beta: f64, key: StreamKey, index: u64) -> ComplexMatrix {
    ginibre(n, beta, &mut key.rng(index))
}

/// Haar on U(n) via QR of a Ginibre matrix with positive diag(R).
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let g = gaussian_matrix(n, n, 1.0, rng);
        if let Ok((q, _)) = qr_unitary(&g) {
            return q;
        }
    }
}

/// Haar on SU(n): a U(n) sample divided by the principal n-th root of its
/// determinant.
pub fn haar_special_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let u = haar_unitary(n, rng);
    let det = u.det();
    let root = C64::from_polar(1.0, det.arg() / n as f64);
    u.scale(root.conj())
}

fn haar_special_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let g = ComplexMatrix::from_fn(n, n, |_, _| C64::new(rng.sample(StandardNormal), 0.0));
        if let Ok((mut q, _)) = qr_unitary(&g) {
            if q.det().re < 0.0 {
                for i in 0..n {
                    q[(i, 0)] = -q[(i, 0)];
                }
            }
            return q;
        }
    }
}

/// The unitary `C` with `CᵀJC = I` taking the standard real form to the
/// antidiagonal one.
pub fn orthogonal_change_of_basis(family: Family, l: usize) -> ComplexMatrix {
    let n = if family == Family::B { 2 * l + 1 } else { 2 * l };
    let mut c = ComplexMatrix::zeros(n, n);
    let h = FRAC_1_SQRT_2;
    for j in 1..=l {
        let neg = l - j;
        let pos = n - 1 - neg;
        c[(neg, 2 * (j - 1))] = C64::new(h, 0.0);
        c[(pos, 2 * (j - 1))] = C64::new(h, 0.0);
        c[(neg, 2 * j - 1)] = C64::new(0.0, h);
        c[(pos, 2 * j - 1)] = C64::new(0.0, -h);
    }
    if family == Family::B {
        c[(l, 2 * l)] = one();
    }
    c
}

/// Compact symplectic Haar sample preserving `omega` (real, Ω² = −I, with a
/// single ±1 per row at the partner position).
fn haar_symplectic<R: Rng + ?Sized>(l: usize, omega: &ComplexMatrix, rng: &mut R) -> ComplexMatrix {
    let n = 2 * l;
    let partner = |p: usize| (0..n).find(|&q| omega[(p, q)] != zero()).expect("each row pairs");
    // First member of each pair, in position order.
    let firsts: Vec<usize> = (0..n).filter(|&p| p < partner(p)).collect();
    'retry: loop {
        let mut g = ComplexMatrix::zeros(n, n);
        let mut accepted: Vec<Vec<C64>> = Vec::with_capacity(n);
        for &p in &firsts {
            let mut v: Vec<C64> = (0..n).map(|_| complex_normal(rng, 1.0)).collect();
            for _ in 0..2 {
                for w in &accepted {
                    let dot: C64 = w.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (vi, wi) in v.iter_mut().zip(w) {
                        *vi -= dot * wi;
                    }
                }
            }
            let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm < 1e-8 {
                continue 'retry;
            }
            for z in v.iter_mut() {
                *z /= nrm;
            }
            let q = partner(p);
            let s = -omega[(p, q)].re;
            let w: Vec<C64> = (0..n).map(|i| omega[(i, partner(i))] * v[partner(i)].conj() * s).collect();
            for i in 0..n {
                g[(i, p)] = v[i];
                g[(i, q)] = w[i];
            }
            accepted.push(v);
            accepted.push(w);
        }
        return g;
    }
}

/// Haar sample on the compact group named by `spec`.
pub fn haar_compact<R: Rng + ?Sized>(spec: &GroupSpec, rng: &mut R) -> ComplexMatrix {
    let n = spec.dim();
    match (spec.family, spec.basis) {
        (Family::A, _) => haar_special_unitary(n, rng),
        (Family::B | Family::D, Basis::Standard) => haar_special_orthogonal(n, rng),
        (Family::B | Family::D, Basis::QuadraticForm) => {
            let g = haar_special_orthogonal(n, rng);
            let c = orthogonal_change_of_basis(spec.family, spec.rank);
            &(&c * &g) * &c.adjoint()
        }
        (Family::C, _) => haar_symplectic(spec.rank, &spec.form(), rng),
    }
}

/// (n/β)^{1/2} times a Haar SU(n) sample.
pub fn scaled_su<R: Rng + ?Sized>(n: usize, beta: f64, rng: &mut R) -> ComplexMatrix {
    haar_special_unitary(n, rng).scale_re((n as f64 / beta).sqrt())
}

/// Upper-left `m x m` corner of [`scaled_su`], generated from the first `m`
/// Haar columns only. The SU phase correction is omitted: it multiplies the
/// corner by a unimodular scalar, which leaves every |pivot| unchanged.
pub fn scaled_su_corner<R: Rng + ?Sized>(n: usize, m: usize, beta: f64, rng: &mut R) -> ComplexMatrix {
    assert!(m <= n);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(m);
    while cols.len() < m {
        let mut v: Vec<C64> = (0..n).map(|_| complex_normal(rng, 1.0)).collect();
        for _ in 0..2 {
            for w in &cols {
                let dot: C64 = w.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, wi) in v.iter_mut().zip(w) {
                    *vi -= dot * wi;
                }
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / nrm).collect());
    }
    let s = (n as f64 / beta).sqrt();
    ComplexMatrix::from_fn(m, m, |i, j| cols[j][i] * s)
}

/// X·diag(d)·Y restricted to its upper-left `n x n` corner, with X (n×L)
/// and Y (L×n) drawn from ν₁ (E|x|² = 2), L = len(d). With this variance
/// the scalar case has characteristic function Π(1 + d_j²u²)^{−1}.
pub fn product_measure_sample<R: Rng + ?Sized>(d: &[f64], n: usize, rng: &mut R) -> ComplexMatrix {
    let l = d.len();
    let x = gaussian_matrix(n, l, 2.0, rng);
    let y = gaussian_matrix(l, n, 2.0, rng);
    let xd = ComplexMatrix::from_fn(n, l, |i, j| x[(i, j)] * d[j]);
    &xd * &y
}

/// Abelian loop Fourier coefficients x_1..x_K with E|x_n|² = 1/(βn²).
pub fn abelian_loop_sample<R: Rng + ?Sized>(beta: f64, k: usize, rng: &mut R) -> Vec<C64> {
    assert!(beta > 0.0 && k >= 1);
    (1..=k).map(|n| complex_normal(rng, 1.0 / (beta * (n * n) as f64))).collect()
}

/// x(θ) = Σ_{n≥1} (x_n e^{inθ} + conj(x_n) e^{−inθ}), returned as complex so
/// that the vanishing imaginary part can be checked.
pub fn abelian_loop_eval(x: &[C64], theta: f64) -> C64 {
    x.iter()
        .enumerate()
        .map(|(i, &xn)| {
            let e = C64::from_polar(1.0, (i + 1) as f64 * theta);
            xn * e + xn.conj() * e.conj()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::{run_chunked, ComplexAccum, RealAccum};

    fn key() -> StreamKey {
        StreamKey::new(2024, 0)
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let u = haar_unitary(6, &mut key().rng(0));
        assert!((&(&u.adjoint() * &u) - &ComplexMatrix::identity(6)).max_abs() < 1e-10);
        let s = haar_special_unitary(5, &mut key().rng(1));
        assert!((s.det() - one()).norm() < 1e-10);
    }

    #[test]
    fn ginibre_scalar_variance_and_cf() {
        let acc = run_chunked(
            key(),
            100_000,
            || (RealAccum::default(), ComplexAccum::default()),
            |a, r, _| {
                let g = ginibre(1, 2.0, r)[(0, 0)];
                a.0.push(g.norm_sqr());
                let h = ginibre(1, 1.0, r)[(0, 0)];
                a.1.push(C64::from_polar(1.0, -h.re));
            },
            |a, b| {
                a.0.merge(b.0);
                a.1.merge(b.1);
            },
        );
        assert!((acc.0.mean() - 1.0).abs() < 4.0 * acc.0.stderr());
        assert!((acc.1.mean() - C64::new((-0.5f64).exp(), 0.0)).norm() < 4.0 * acc.1.stderr());
    }

    #[test]
    fn orthogonal_forms_preserved() {
        for (fam, l) in [(Family::D, 1), (Family::D, 2), (Family::B, 2), (Family::C, 1), (Family::C, 2), (Family::D, 3)] {
            for basis in [Basis::Standard, Basis::QuadraticForm] {
                let spec = GroupSpec { family: fam, rank: l, basis };
                let g = haar_compact(&spec, &mut key().rng(l as u64));
                let n = spec.dim();
                let id = ComplexMatrix::identity(n);
                assert!((&(&g.adjoint() * &g) - &id).max_abs() < 1e-10, "{spec:?} not unitary");
                let gt = spec.form_transpose(&g);
                assert!((&(&gt * &g) - &id).max_abs() < 1e-10, "{spec:?} form not preserved");
                assert!((g.det() - one()).norm() < 1e-10, "{spec:?} det");
            }
        }
    }

    #[test]
    fn change_of_basis_identity() {
        for fam in [Family::B, Family::D] {
            let c = orthogonal_change_of_basis(fam, 3);
            let spec = GroupSpec::qf(fam, 3);
            let lhs = &(&c.transpose() * &spec.form()) * &c;
            assert!((&lhs - &ComplexMatrix::identity(spec.dim())).max_abs() < 1e-15);
        }
    }

    #[test]
    fn so2_in_form_basis_is_diagonal() {
        let g = haar_compact(&GroupSpec::qf(Family::D, 1), &mut key().rng(5));
        assert!(g[(0, 1)].norm() < 1e-12 && g[(1, 0)].norm() < 1e-12);
        assert!((g[(0, 0)] * g[(1, 1)] - one()).norm() < 1e-12);
    }

    #[test]
    fn product_measure_zero_weights() {
        let s = product_measure_sample(&[0.0, 0.0], 2, &mut key().rng(3));
        assert_eq!(s.max_abs(), 0.0);
    }

    #[test]
    fn abelian_loop_is_real() {
        let x = abelian_loop_sample(1.0, 8, &mut key().rng(9));
        for k in 0..16 {
            assert!(abelian_loop_eval(&x, 0.4 * k as f64).im.abs() < 1e-12);
        }
    }

    #[test]
    fn corner_sampler_matches_full() {
        let k = key();
        let (a, b) = run_chunked(
            k,
            40_000,
            || (RealAccum::default(), RealAccum::default()),
            |acc, r, i| {
                if i % 2 == 0 {
                    acc.0.push(scaled_su_corner(6, 2, 1.0, r)[(0, 0)].norm_sqr());
                } else {
                    acc.1.push(scaled_su(6, 1.0, r)[(0, 0)].norm_sqr());
                }
            },
            |x, y| {
                x.0.merge(y.0);
                x.1.merge(y.1);
            },
        );
        let (d, se) = crate::mc::diff_z(&a, &b);
        assert!(d.abs() < 4.0 * se);
        assert!((a.mean() - 1.0).abs() < 4.0 * a.stderr());
    }
}

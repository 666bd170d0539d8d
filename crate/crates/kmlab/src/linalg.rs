//! Dense complex matrices and the unpivoted factorizations the rest of the
//! crate is built on.
//!
//! Pivoting is deliberately absent from [`ldu`]: the pivots of an unpivoted
//! elimination are ratios of leading principal minors, which is the whole
//! point. General inverses and determinants go through nalgebra's
//! partial-pivot LU instead.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

pub type C64 = Complex64;

/// Relative threshold under which an unpivoted pivot is treated as zero.
pub const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("leading minor {0} vanishes (element lies off the top Bruhat stratum)")]
    SingularMinor(usize),
    #[error("leading block is not invertible")]
    SingularBlock,
    #[error("Householder pivot underflow at column {0}")]
    RankDeficient(usize),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Build from row-major entries, rejecting NaN/Inf.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if rows * cols != data.len() {
            return Err(LinalgError::Dimension(format!(
                "{rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Unchecked constructor for internal hot paths.
    pub(crate) fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_vec(rows, cols, vec![C64::new(0.0, 0.0); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::from_vec(rows, cols, data)
    }

    /// Real matrix from nested rows (test and example convenience).
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &z) in d.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn diag(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self::from_vec(self.rows, self.cols, self.data.iter().map(|z| z.conj()).collect())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_vec(self.rows, self.cols, self.data.iter().map(|z| z * s).collect())
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self::from_vec(self.rows, self.cols, self.data.iter().map(|z| z * s).collect())
    }

    pub fn trace(&self) -> C64 {
        self.diag().into_iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Max absolute row sum; the scale used by the pivot tolerance.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Copy of the `nr x nc` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &ComplexMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    /// Inverse via partial-pivot LU; fails when a pivot is below tolerance.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::Dimension("inverse of non-square".into()));
        }
        let scale = self.norm_inf().max(f64::MIN_POSITIVE);
        let lu = self.to_nalgebra().lu();
        let u = lu.u();
        if (0..self.rows).any(|i| u[(i, i)].norm() < PIVOT_TOL * scale) {
            return Err(LinalgError::SingularBlock);
        }
        lu.try_inverse()
            .map(|m| Self::from_nalgebra(&m))
            .ok_or(LinalgError::SingularBlock)
    }

    /// Solve `self * X = rhs`.
    pub fn solve(&self, rhs: &ComplexMatrix) -> Result<Self, LinalgError> {
        let scale = self.norm_inf().max(f64::MIN_POSITIVE);
        let lu = self.to_nalgebra().lu();
        let u = lu.u();
        if (0..self.rows).any(|i| u[(i, i)].norm() < PIVOT_TOL * scale) {
            return Err(LinalgError::SingularBlock);
        }
        lu.solve(&rhs.to_nalgebra())
            .map(|m| Self::from_nalgebra(&m))
            .ok_or(LinalgError::SingularBlock)
    }

    /// Determinant via partial-pivot LU.
    pub fn det(&self) -> C64 {
        if self.rows == 0 {
            return C64::new(1.0, 0.0);
        }
        self.to_nalgebra().lu().determinant()
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let m = self.to_nalgebra();
        let h = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// log det of a Hermitian positive definite matrix by Cholesky.
    pub fn logdet_hpd(&self) -> Result<f64, LinalgError> {
        let n = self.rows;
        let mut l = vec![C64::new(0.0, 0.0); n * n];
        let mut acc = 0.0;
        for j in 0..n {
            let mut s = self[(j, j)].re;
            for k in 0..j {
                s -= l[j * n + k].norm_sqr();
            }
            if s <= 0.0 {
                return Err(LinalgError::SingularBlock);
            }
            let ljj = s.sqrt();
            l[j * n + j] = C64::new(ljj, 0.0);
            acc += 2.0 * ljj.ln();
            for i in j + 1..n {
                let mut z = self[(i, j)];
                for k in 0..j {
                    z -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = z / ljj;
            }
        }
        Ok(acc)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix::from_vec(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        )
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix::from_vec(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        )
    }
}

/// g = l · diag(d) · u with unit-triangular l and u.
#[derive(Clone, Debug)]
pub struct LduFactorization {
    pub l: ComplexMatrix,
    pub d: Vec<C64>,
    pub u: ComplexMatrix,
    /// σ_j = d_1 ⋯ d_j, the leading principal minors.
    pub pivots: Vec<C64>,
}

impl LduFactorization {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let ld = ComplexMatrix::from_fn(self.l.rows(), self.l.cols(), |i, j| self.l[(i, j)] * self.d[j]);
        &ld * &self.u
    }
}

/// Unpivoted LDU. Fails with `SingularMinor(j)` (1-based) when the j-th
/// pivot falls below `PIVOT_TOL` times the row-norm scale of the input.
pub fn ldu(m: &ComplexMatrix) -> Result<LduFactorization, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::Dimension("ldu of non-square".into()));
    }
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = m.rows();
    let scale = m.norm_inf().max(f64::MIN_POSITIVE);
    let mut w = m.data.clone();
    let mut l = ComplexMatrix::identity(n);
    let mut u = ComplexMatrix::identity(n);
    let mut d = Vec::with_capacity(n);
    let mut pivots = Vec::with_capacity(n);
    let mut sigma = C64::new(1.0, 0.0);
    for k in 0..n {
        let piv = w[k * n + k];
        if piv.norm() < PIVOT_TOL * scale {
            return Err(LinalgError::SingularMinor(k + 1));
        }
        for i in k + 1..n {
            let f = w[i * n + k] / piv;
            l[(i, k)] = f;
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let t = w[k * n + j];
                w[i * n + j] -= f * t;
            }
        }
        for j in k + 1..n {
            u[(k, j)] = w[k * n + j] / piv;
        }
        d.push(piv);
        sigma *= piv;
        pivots.push(sigma);
    }
    Ok(LduFactorization { l, d, u, pivots })
}

/// Leading principal minors σ_1..σ_n; zero minors are returned as values.
pub fn leading_minors(m: &ComplexMatrix) -> Vec<C64> {
    match ldu(m) {
        Ok(f) => f.pivots,
        Err(_) => (1..=m.rows()).map(|j| m.block(0, 0, j, j).det()).collect(),
    }
}

/// a₂₂ − a₂₁ a₁₁⁻¹ a₁₂ for the split with an `m x m` leading block.
pub fn schur_complement(g: &ComplexMatrix, m: usize) -> Result<ComplexMatrix, LinalgError> {
    if !g.is_square() || m >= g.rows() {
        return Err(LinalgError::Dimension(format!(
            "split {m} of {}x{}",
            g.rows(),
            g.cols()
        )));
    }
    let n = g.rows() - m;
    let a11 = g.block(0, 0, m, m);
    let a12 = g.block(0, m, m, n);
    let a21 = g.block(m, 0, n, m);
    let a22 = g.block(m, m, n, n);
    if m == 0 {
        return Ok(a22);
    }
    let x = a11.solve(&a12)?;
    Ok(&a22 - &(&a21 * &x))
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the [13/13] Padé approximant is accurate to
/// unit roundoff without scaling.
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a [13/13] Padé kernel.
pub fn expm(m: &ComplexMatrix) -> ComplexMatrix {
    assert!(m.is_square());
    let n = m.rows();
    let norm = m.norm_one();
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = m.scale_re(0.5f64.powi(s));
    let id = ComplexMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;
    let lin = |c6: f64, c4: f64, c2: f64, c0: f64| {
        let mut t = a6.scale_re(c6);
        t = &t + &a4.scale_re(c4);
        t = &t + &a2.scale_re(c2);
        &t + &id.scale_re(c0)
    };
    let inner_u = &a6 * &(&(&a6.scale_re(b[13]) + &a4.scale_re(b[11])) + &a2.scale_re(b[9]));
    let u = &a * &(&inner_u + &lin(b[7], b[5], b[3], b[1]));
    let inner_v = &a6 * &(&(&a6.scale_re(b[12]) + &a4.scale_re(b[10])) + &a2.scale_re(b[8]));
    let v = &inner_v + &lin(b[6], b[4], b[2], b[0]);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.solve(&p).expect("Pade denominator is well conditioned after scaling");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Householder QR with the phase of R's diagonal moved into Q, so that
/// diag(R) is real and positive.
pub fn qr_unitary(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix), LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::Dimension("qr of non-square".into()));
    }
    let n = m.rows();
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    let mut r = m.clone();
    let mut q = ComplexMatrix::identity(n);
    let mut v = vec![C64::new(0.0, 0.0); n];
    for k in 0..n {
        let xnorm = (k..n).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if xnorm < 1e-14 * scale {
            return Err(LinalgError::RankDeficient(k));
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        for i in k..n {
            v[i] = r[(i, k)];
        }
        v[k] -= alpha;
        let vnorm = (k..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vi in v.iter_mut().take(n).skip(k) {
            *vi /= vnorm;
        }
        // R <- (I - 2vv*) R on rows k.., Q <- Q (I - 2vv*) on cols k..
        for j in k..n {
            let mut dot = C64::new(0.0, 0.0);
            for i in k..n {
                dot += v[i].conj() * r[(i, j)];
            }
            for i in k..n {
                let t = v[i] * dot * 2.0;
                r[(i, j)] -= t;
            }
        }
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for j in k..n {
                dot += q[(i, j)] * v[j];
            }
            for j in k..n {
                let t = dot * v[j].conj() * 2.0;
                q[(i, j)] -= t;
            }
        }
        for i in k + 1..n {
            r[(i, k)] = C64::new(0.0, 0.0);
        }
    }
    for k in 0..n {
        let rkk = r[(k, k)];
        let ph = rkk / rkk.norm();
        for i in 0..n {
            q[(i, k)] *= ph;
        }
        for j in 0..n {
            r[(k, j)] *= ph.conj();
        }
        r[(k, k)] = C64::new(r[(k, k)].re, 0.0);
    }
    Ok((q, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cofactor_det(m: &ComplexMatrix) -> C64 {
        let n = m.rows();
        if n == 0 {
            return c(1.0, 0.0);
        }
        if n == 1 {
            return m[(0, 0)];
        }
        let mut acc = c(0.0, 0.0);
        for j in 0..n {
            let minor = ComplexMatrix::from_fn(n - 1, n - 1, |a, b| m[(a + 1, if b < j { b } else { b + 1 })]);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += m[(0, j)] * cofactor_det(&minor) * sign;
        }
        acc
    }

    fn pseudo_random(n: usize, seed: u64) -> ComplexMatrix {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        ComplexMatrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    #[test]
    fn ldu_identity() {
        let f = ldu(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(f.l, ComplexMatrix::identity(3));
        assert_eq!(f.u, ComplexMatrix::identity(3));
        assert!(f.d.iter().all(|&z| z == c(1.0, 0.0)));
        assert!(f.pivots.iter().all(|&z| z == c(1.0, 0.0)));
    }

    #[test]
    fn ldu_swap_is_singular() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(ldu(&m).unwrap_err(), LinalgError::SingularMinor(1));
    }

    #[test]
    fn ldu_two_by_two() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let f = ldu(&m).unwrap();
        assert_eq!(f.l, ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[3.0, 1.0]]));
        assert_eq!(f.u, ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]));
        assert_eq!(f.d, vec![c(1.0, 0.0), c(-2.0, 0.0)]);
        assert_eq!(f.pivots, vec![c(1.0, 0.0), c(-2.0, 0.0)]);
        assert!((&f.reconstruct() - &m).max_abs() < 1e-14);
    }

    #[test]
    fn minors_match_cofactors() {
        for n in 1..=6 {
            let m = pseudo_random(n, n as u64 + 11);
            let mins = leading_minors(&m);
            for j in 1..=n {
                let oracle = cofactor_det(&m.block(0, 0, j, j));
                assert!((mins[j - 1] - oracle).norm() < 1e-10 * (1.0 + oracle.norm()), "n={n} j={j}");
            }
            let f = ldu(&m).unwrap();
            let rel = (&f.reconstruct() - &m).max_abs() / m.max_abs();
            assert!(rel < 1e-10);
        }
    }

    #[test]
    fn minors_trivial_cases() {
        let d = ComplexMatrix::from_diag(&[c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        assert_eq!(leading_minors(&d), vec![c(2.0, 0.0), c(6.0, 0.0), c(24.0, 0.0)]);
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let mins = leading_minors(&m);
        assert!(mins[0].norm() < 1e-15);
        assert!((mins[1] + c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn det_agrees_with_qr() {
        let m = pseudo_random(5, 3);
        let f = ldu(&m).unwrap();
        let prod: C64 = f.d.iter().product();
        let (q, r) = qr_unitary(&m).unwrap();
        let qr_det = q.det() * r.diag().iter().product::<C64>();
        assert!((prod - qr_det).norm() < 1e-9 * prod.norm());
    }

    #[test]
    fn schur_block_diagonal() {
        let mut g = ComplexMatrix::zeros(3, 3);
        g[(0, 0)] = c(2.0, 0.0);
        let a22 = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 5.0]]);
        g.set_block(1, 1, &a22);
        assert_eq!(schur_complement(&g, 1).unwrap(), a22);
    }

    #[test]
    fn schur_all_identity_blocks() {
        // [[I, I], [I, I]] has Schur complement I - I I^{-1} I = 0.
        let g = ComplexMatrix::from_fn(4, 4, |i, j| if i % 2 == j % 2 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let s = schur_complement(&g, 2).unwrap();
        assert!(s.max_abs() < 1e-15);
    }

    #[test]
    fn schur_matches_inverse_block() {
        let m = &pseudo_random(6, 9) + &ComplexMatrix::identity(6).scale_re(3.0);
        let s = schur_complement(&m, 2).unwrap();
        let inv = m.inverse().unwrap();
        let corner = inv.block(2, 2, 4, 4).inverse().unwrap();
        assert!((&s - &corner).max_abs() < 1e-9);
    }

    #[test]
    fn schur_singular_leading_block() {
        let g = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(schur_complement(&g, 1).unwrap_err(), LinalgError::SingularBlock);
    }

    #[test]
    fn expm_trivial() {
        assert!((&expm(&ComplexMatrix::zeros(3, 3)) - &ComplexMatrix::identity(3)).max_abs() < 1e-15);
        let x = [c(0.3, 0.0), c(-1.2, 0.5), c(2.0, -1.0)];
        let e = expm(&ComplexMatrix::from_diag(&x));
        for (i, z) in x.iter().enumerate() {
            assert!((e[(i, i)] - z.exp()).norm() < 1e-13 * z.exp().norm());
        }
    }

    #[test]
    fn expm_matches_power_series() {
        let t = 0.7;
        let m = ComplexMatrix::from_real_rows(&[&[0.0, t], &[t, 0.0]]);
        // Power series oracle.
        let mut term = ComplexMatrix::identity(2);
        let mut acc = ComplexMatrix::identity(2);
        for k in 1..40 {
            term = (&term * &m).scale_re(1.0 / k as f64);
            acc = &acc + &term;
        }
        let e = expm(&m);
        assert!((&e - &acc).max_abs() < 1e-14);
        assert!((e[(0, 0)].re - t.cosh()).abs() < 1e-14);
        assert!((e[(0, 1)].re - t.sinh()).abs() < 1e-14);
    }

    #[test]
    fn expm_large_norm_commuting_sum() {
        let a = ComplexMatrix::from_diag(&[c(1.5, 2.0), c(-3.0, 0.1), c(0.5, -4.0)]);
        let b = ComplexMatrix::identity(3).scale(c(2.5, 1.0));
        let lhs = expm(&(&a + &b));
        let rhs = &expm(&a) * &expm(&b);
        assert!((&lhs - &rhs).max_abs() / lhs.max_abs() < 1e-11);
    }

    #[test]
    fn qr_identity_and_unitary() {
        let (q, r) = qr_unitary(&ComplexMatrix::identity(4)).unwrap();
        assert!((&q - &ComplexMatrix::identity(4)).max_abs() < 1e-15);
        assert!((&r - &ComplexMatrix::identity(4)).max_abs() < 1e-15);
        let (u, _) = qr_unitary(&pseudo_random(4, 5)).unwrap();
        let (q2, r2) = qr_unitary(&u).unwrap();
        assert!((&q2 - &u).max_abs() < 1e-12);
        assert!((&r2 - &ComplexMatrix::identity(4)).max_abs() < 1e-12);
    }

    #[test]
    fn qr_residuals() {
        let m = pseudo_random(5, 17);
        let (q, r) = qr_unitary(&m).unwrap();
        assert!((&(&q * &r) - &m).max_abs() / m.max_abs() < 1e-10);
        assert!((&(&q.adjoint() * &q) - &ComplexMatrix::identity(5)).max_abs() < 1e-10);
        for k in 0..5 {
            assert!(r[(k, k)].re > 0.0 && r[(k, k)].im == 0.0);
            for i in k + 1..5 {
                assert_eq!(r[(i, k)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn qr_rank_deficient() {
        let m = ComplexMatrix::zeros(3, 3);
        assert!(matches!(qr_unitary(&m), Err(LinalgError::RankDeficient(0))));
    }

    #[test]
    fn construction_rejects_nan() {
        assert_eq!(
            ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).unwrap_err(),
            LinalgError::NonFinite
        );
        assert!(ComplexMatrix::new(2, 2, vec![c(0.0, 0.0); 3]).is_err());
    }

    #[test]
    fn logdet_hpd_matches_det() {
        let a = pseudo_random(4, 2);
        let h = &(&a.adjoint() * &a) + &ComplexMatrix::identity(4);
        let ld = h.logdet_hpd().unwrap();
        assert!((ld - h.det().re.ln()).abs() < 1e-12);
    }
}

//! Complex Kostant–Toda flow x' = [x, proj_{n⁻} x] on ε + b⁻ in reduced
//! coordinates x = ε + Σ (a_j h_j + b_j f_j):
//!
//!   a_j' = b_j,   b_j' = −b_j Σ_i a_i a_ij.
//!
//! For sl(n) the matrix realization is h_j = E_jj − E_{j+1,j+1},
//! f_j = E_{j+1,j}, ε = Σ E_{j,j+1}, and the flow is solved exactly by
//! factoring e^{t x₀} = l·diag·u and conjugating x₀ by l.

use crate::linalg::{expm, ldu, ComplexMatrix, LinalgError, C64};

/// ‖(a, b)‖∞ beyond which a trajectory is declared blown up.
pub const BLOWUP: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TodaError {
    #[error("invalid Cartan matrix: {0}")]
    Cartan(String),
    #[error("blow-up after t = {last_good}")]
    BlowUp { last_good: C64 },
    #[error("step size underflow at t = {0}")]
    StepUnderflow(C64),
    #[error("e^(t x0) left the top stratum at t = {0}")]
    StratumExit(C64),
    #[error("tolerance {0} outside [1e-12, 1e-6]")]
    Tolerance(f64),
    #[error("x0 is not in epsilon + b-: {0}")]
    NotTridiagonal(String),
}

type Result<T> = std::result::Result<T, TodaError>;

/// Symmetrizable generalized Cartan matrix with A·diag(d) symmetric.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GeneralizedCartanMatrix {
    pub a: Vec<Vec<i64>>,
    pub d: Vec<f64>,
}

impl GeneralizedCartanMatrix {
    pub fn new(a: Vec<Vec<i64>>, d: Vec<f64>) -> Result<Self> {
        let n = a.len();
        if d.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(TodaError::Cartan("shape".into()));
        }
        for i in 0..n {
            if a[i][i] != 2 {
                return Err(TodaError::Cartan(format!("a[{i}][{i}] != 2")));
            }
            if d[i] <= 0.0 {
                return Err(TodaError::Cartan(format!("d[{i}] <= 0")));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if a[i][j] > 0 || ((a[i][j] == 0) != (a[j][i] == 0)) {
                    return Err(TodaError::Cartan(format!("entry ({i},{j})")));
                }
                let (x, y) = (a[i][j] as f64 * d[j], a[j][i] as f64 * d[i]);
                if (x - y).abs() > 1e-12 * (1.0 + x.abs()) {
                    return Err(TodaError::Cartan(format!("A·diag(d) not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self { a, d })
    }

    /// Finds d by propagating d_j = d_i a_ji / a_ij along the Dynkin graph.
    pub fn with_auto_symmetrizer(a: Vec<Vec<i64>>) -> Result<Self> {
        let n = a.len();
        let mut d = vec![0.0; n];
        for root in 0..n {
            if d[root] != 0.0 {
                continue;
            }
            d[root] = 1.0;
            let mut stack = vec![root];
            while let Some(i) = stack.pop() {
                for j in 0..n {
                    if j != i && a[i][j] != 0 && d[j] == 0.0 {
                        d[j] = d[i] * a[j][i] as f64 / a[i][j] as f64;
                        stack.push(j);
                    }
                }
            }
        }
        Self::new(a, d)
    }

    /// Cartan matrix of sl(n).
    pub fn sl(n: usize) -> Self {
        let r = n - 1;
        let a = (0..r)
            .map(|i| (0..r).map(|j| if i == j { 2 } else if i.abs_diff(j) == 1 { -1 } else { 0 }).collect())
            .collect();
        Self { a, d: vec![1.0; r] }
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    /// Sylvester test on the symmetrized matrix.
    pub fn is_finite_type(&self) -> bool {
        let n = self.rank();
        let s = ComplexMatrix::from_fn(n, n, |i, j| C64::new(self.a[i][j] as f64 * self.d[j], 0.0));
        (1..=n).all(|k| s.block(0, 0, k, k).det().re > 1e-12)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TodaState {
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    pub t: C64,
}

impl TodaState {
    pub fn new(a: Vec<C64>, b: Vec<C64>) -> Self {
        assert_eq!(a.len(), b.len());
        Self { a, b, t: C64::new(0.0, 0.0) }
    }

    pub fn norm_inf(&self) -> f64 {
        self.a.iter().chain(&self.b).map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max over components of |self − other|.
    pub fn distance(&self, o: &TodaState) -> f64 {
        self.a.iter().zip(&o.a).chain(self.b.iter().zip(&o.b)).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn to_vec(&self) -> Vec<C64> {
        self.a.iter().chain(&self.b).copied().collect()
    }

    fn from_vec(v: &[C64], t: C64) -> Self {
        let n = v.len() / 2;
        Self { a: v[..n].to_vec(), b: v[n..].to_vec(), t }
    }
}

/// (a', b') at the given state.
pub fn toda_rhs(state: &TodaState, cm: &GeneralizedCartanMatrix) -> (Vec<C64>, Vec<C64>) {
    let n = cm.rank();
    let da = state.b.clone();
    let db = (0..n)
        .map(|j| {
            let s: C64 = (0..n).map(|i| state.a[i] * cm.a[i][j] as f64).sum();
            -state.b[j] * s
        })
        .collect();
    (da, db)
}

/// Σ_ij a_ij d_j a_i a_j + 2 Σ_j d_j b_j.
pub fn hamiltonian_reduced(state: &TodaState, cm: &GeneralizedCartanMatrix) -> C64 {
    let n = cm.rank();
    let mut h = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            h += state.a[i] * state.a[j] * (cm.a[i][j] as f64 * cm.d[j]);
        }
        h += state.b[i] * (2.0 * cm.d[i]);
    }
    h
}

fn rhs_vec(y: &[C64], cm: &GeneralizedCartanMatrix, scale: C64) -> Vec<C64> {
    let (da, db) = toda_rhs(&TodaState::from_vec(y, C64::new(0.0, 0.0)), cm);
    da.into_iter().chain(db).map(|z| z * scale).collect()
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// Accepted steps of one integration.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub states: Vec<TodaState>,
    /// max_t |H(t) − H(0)|.
    pub h_drift: f64,
    pub h0: C64,
}

impl Trajectory {
    pub fn last(&self) -> &TodaState {
        self.states.last().expect("trajectory has the initial state")
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if (1e-12..=1e-6).contains(&tol) {
        Ok(())
    } else {
        Err(TodaError::Tolerance(tol))
    }
}

/// Adaptive DP5(4) along the straight segment from `state0.t` to `t_end`.
/// Each accepted step has local error ≤ tol·(1 + |y|) componentwise.
pub fn integrate(state0: &TodaState, cm: &GeneralizedCartanMatrix, t_end: C64, tol: f64) -> Result<Trajectory> {
    integrate_path(state0, cm, &[t_end], tol)
}

/// Integrates along the polygon state0.t → waypoints[0] → waypoints[1] → ….
pub fn integrate_path(state0: &TodaState, cm: &GeneralizedCartanMatrix, waypoints: &[C64], tol: f64) -> Result<Trajectory> {
    check_tol(tol)?;
    let h0 = hamiltonian_reduced(state0, cm);
    let mut states = vec![state0.clone()];
    let mut drift = 0.0f64;
    let mut y = state0.to_vec();
    let mut t = state0.t;
    for &w in waypoints {
        let dir = w - t;
        let len = dir.norm();
        if len == 0.0 {
            continue;
        }
        let scale = dir / len;
        let mut s = 0.0f64;
        let mut h = (len / 16.0).min(0.05);
        let t_seg = t;
        while s < len {
            let h_try = h.min(len - s);
            let mut k: Vec<Vec<C64>> = Vec::with_capacity(7);
            for stage in 0..7 {
                let yi: Vec<C64> = (0..y.len())
                    .map(|c| y[c] + (0..stage).map(|p| k[p][c] * (A[stage][p] * h_try)).sum::<C64>())
                    .collect();
                k.push(rhs_vec(&yi, cm, scale));
            }
            let y5: Vec<C64> = (0..y.len()).map(|c| y[c] + (0..7).map(|p| k[p][c] * (B5[p] * h_try)).sum::<C64>()).collect();
            let err = (0..y.len())
                .map(|c| {
                    let e: C64 = (0..7).map(|p| k[p][c] * ((B5[p] - B4[p]) * h_try)).sum();
                    e.norm() / (1.0 + y[c].norm().max(y5[c].norm()))
                })
                .fold(0.0f64, f64::max);
            let finite = y5.iter().all(|z| z.re.is_finite() && z.im.is_finite());
            if finite && err <= tol {
                s += h_try;
                y = y5;
                let tn = t_seg + scale * s;
                let st = TodaState::from_vec(&y, tn);
                if st.norm_inf() > BLOWUP {
                    return Err(TodaError::BlowUp { last_good: states.last().unwrap().t });
                }
                drift = drift.max((hamiltonian_reduced(&st, cm) - h0).norm());
                states.push(st);
            }
            if len - s <= 1e-13 * len {
                break;
            }
            let fac = if finite && err > 0.0 { 0.9 * (tol / err).powf(0.2) } else if finite { 5.0 } else { 0.1 };
            let accepted_clipped = finite && err <= tol && h_try < h;
            h = if accepted_clipped { h.max(h_try * fac.clamp(0.1, 5.0)) } else { h_try * fac.clamp(0.1, 5.0) };
            if h < 1e-14 * (1.0 + len) {
                let last = states.last().unwrap();
                if last.norm_inf() > BLOWUP.sqrt() {
                    return Err(TodaError::BlowUp { last_good: last.t });
                }
                return Err(TodaError::StepUnderflow(t_seg + scale * s));
            }
        }
        t = w;
    }
    Ok(Trajectory { states, h_drift: drift, h0 })
}

/// Reduced coordinates of a trace-zero tridiagonal x₀ = ε + Σ(a_j h_j + b_j f_j).
pub fn state_from_matrix(x: &ComplexMatrix) -> Result<TodaState> {
    let n = x.rows();
    let defect = height_defect(x);
    if defect > 1e-10 || x.trace().norm() > 1e-10 * (1.0 + x.max_abs()) {
        return Err(TodaError::NotTridiagonal(format!("defect {defect:e}, trace {}", x.trace())));
    }
    let mut a = Vec::with_capacity(n - 1);
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n - 1 {
        acc += x[(j, j)];
        a.push(acc);
    }
    let b = (0..n - 1).map(|j| x[(j + 1, j)]).collect();
    Ok(TodaState::new(a, b))
}

/// The sl(n) matrix ε + Σ(a_j h_j + b_j f_j).
pub fn matrix_from_state(s: &TodaState) -> ComplexMatrix {
    let n = s.a.len() + 1;
    let mut x = ComplexMatrix::zeros(n, n);
    for j in 0..n - 1 {
        x[(j, j + 1)] = C64::new(1.0, 0.0);
        x[(j + 1, j)] = s.b[j];
        x[(j, j)] += s.a[j];
        x[(j + 1, j + 1)] -= s.a[j];
    }
    x
}

/// Distance from ε + (tridiagonal lower part): entries outside the three
/// central diagonals and deviation of the superdiagonal from 1.
pub fn height_defect(x: &ComplexMatrix) -> f64 {
    let n = x.rows();
    let mut d = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let v = if j == i + 1 { (x[(i, j)] - 1.0).norm() } else if i.abs_diff(j) > 1 { x[(i, j)].norm() } else { 0.0 };
            d = d.max(v);
        }
    }
    d
}

/// x(t) = l⁻¹ x₀ l where e^{t x₀} = l·diag·u.
pub fn solve_by_factorization(x0: &ComplexMatrix, t: C64) -> Result<ComplexMatrix> {
    if height_defect(x0) > 1e-10 {
        return Err(TodaError::NotTridiagonal(format!("{:e}", height_defect(x0))));
    }
    let e = expm(&x0.scale(t));
    let f = ldu(&e).map_err(|err| match err {
        LinalgError::SingularMinor(_) => TodaError::StratumExit(t),
        _ => TodaError::StratumExit(t),
    })?;
    let linv = f.l.inverse().map_err(|_| TodaError::StratumExit(t))?;
    Ok(&(&linv * x0) * &f.l)
}

/// Blow-up times found along t = τ·dir, τ ∈ [0, t_max].
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Singularity {
    pub t: C64,
    pub uncertainty: f64,
}

/// Local pole location from the state near a blow-up. For a component
/// y ~ c(t* − t)^{−p}, q₁ = y/y′ and q₂ = y′/y″ give t* − t = q₁q₂/(q₁ − q₂)
/// whatever the order p.
pub fn pole_extrapolation(state: &TodaState, cm: &GeneralizedCartanMatrix) -> C64 {
    let n = cm.rank();
    let aa = |v: &[C64], j: usize| -> C64 { (0..n).map(|i| v[i] * cm.a[i][j] as f64).sum() };
    let (da, db) = toda_rhs(state, cm);
    let dda = db.clone();
    let ddb: Vec<C64> = (0..n).map(|j| -db[j] * aa(&state.a, j) - state.b[j] * aa(&state.b, j)).collect();
    let comps: Vec<(C64, C64, C64)> =
        (0..n).map(|j| (state.a[j], da[j], dda[j])).chain((0..n).map(|j| (state.b[j], db[j], ddb[j]))).collect();
    let (y, d1, d2) = comps.into_iter().max_by(|x, y| x.0.norm().total_cmp(&y.0.norm())).expect("rank ≥ 1");
    let q1 = y / d1;
    let q2 = d1 / d2;
    state.t + q1 * q2 / (q1 - q2)
}

/// Scans the ray from `state0.t` in direction `dir`. Each blow-up is
/// bracketed by bisection on "integration reaches τ" to 1e-6, located by
/// [`pole_extrapolation`] from the last reachable state, then passed by a
/// half-circle detour.
pub fn singularity_scan(
    state0: &TodaState,
    cm: &GeneralizedCartanMatrix,
    dir: C64,
    t_max: f64,
    tol: f64,
) -> Vec<Singularity> {
    const DETOUR: f64 = 0.05;
    let u = dir / dir.norm();
    let origin = state0.t;
    let mut out = Vec::new();
    let mut start = state0.clone();
    let mut tau0 = 0.0;
    while tau0 < t_max && out.len() < 32 {
        let target = origin + u * t_max;
        match integrate(&start, cm, target, tol) {
            Ok(_) => break,
            Err(TodaError::BlowUp { last_good }) | Err(TodaError::StepUnderflow(last_good)) => {
                let reaches = |tau: f64| integrate(&start, cm, origin + u * tau, tol).is_ok();
                let mut lo = ((last_good - origin) * u.conj()).re.max(tau0);
                while !reaches(lo) && lo > tau0 + 1e-9 {
                    lo = tau0 + 0.5 * (lo - tau0);
                }
                let mut hi = (lo + 2.0 * DETOUR).min(t_max);
                if reaches(hi) {
                    break;
                }
                while hi - lo > 1e-6 {
                    let mid = 0.5 * (lo + hi);
                    if reaches(mid) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let Ok(tr) = integrate(&start, cm, origin + u * lo, tol) else { break };
                let k = tr.states.len();
                let t1 = pole_extrapolation(&tr.states[k - 1], cm);
                let t2 = pole_extrapolation(&tr.states[k.saturating_sub(3)], cm);
                out.push(Singularity { t: t1, uncertainty: (t1 - t2).norm() });
                // Half circle around the ray point nearest t*.
                let tstar = ((t1 - origin) * u.conj()).re.max(lo);
                let mut wp = vec![origin + u * (tstar - DETOUR)];
                for j in 1..=16 {
                    let th = std::f64::consts::PI * (1.0 - j as f64 / 16.0);
                    wp.push(origin + u * (tstar + DETOUR * C64::from_polar(1.0, th)));
                }
                let Ok(tr) = integrate_path(&start, cm, &wp, tol) else { break };
                start = tr.last().clone();
                tau0 = tstar + DETOUR;
            }
            Err(_) => break,
        }
    }
    out
}

/// ‖state after one loop − state before‖ for the circle of `radius` about
/// `center`, approached along the straight segment from `state0.t`.
pub fn monodromy_probe(state0: &TodaState, cm: &GeneralizedCartanMatrix, center: C64, radius: f64, tol: f64) -> Result<f64> {
    const SIDES: usize = 64;
    let p0 = center + radius;
    let s0 = integrate(state0, cm, p0, tol)?.last().clone();
    let wp: Vec<C64> =
        (1..=SIDES).map(|k| center + C64::from_polar(radius, std::f64::consts::TAU * k as f64 / SIDES as f64)).collect();
    let s1 = integrate_path(&s0, cm, &wp, tol)?.last().clone();
    Ok(s0.distance(&s1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mc::StreamKey;
    use crate::ensembles::complex_normal;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sl2_start() -> TodaState {
        TodaState::new(vec![c(0.0, 0.0)], vec![c(1.0, 0.0)])
    }

    pub(crate) fn random_tridiagonal(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = StreamKey::new(5, seed).rng(0);
        let mut x = ComplexMatrix::zeros(n, n);
        let mut tr = c(0.0, 0.0);
        for i in 0..n {
            x[(i, i)] = complex_normal(&mut rng, 0.5);
            tr += x[(i, i)];
        }
        for i in 0..n {
            x[(i, i)] -= tr / n as f64;
        }
        for i in 0..n - 1 {
            x[(i, i + 1)] = c(1.0, 0.0);
            x[(i + 1, i)] = complex_normal(&mut rng, 0.5);
        }
        x
    }

    #[test]
    fn cartan_validation() {
        assert!(GeneralizedCartanMatrix::new(vec![vec![2, -1], vec![-1, 2]], vec![1.0, 1.0]).is_ok());
        assert!(GeneralizedCartanMatrix::new(vec![vec![2, 1], vec![-1, 2]], vec![1.0, 1.0]).is_err());
        assert!(GeneralizedCartanMatrix::new(vec![vec![2, -1], vec![0, 2]], vec![1.0, 1.0]).is_err());
        // a12 = −2, a21 = −1: a12 d2 = a21 d1 gives d = (1, 1/2).
        let b2 = GeneralizedCartanMatrix::with_auto_symmetrizer(vec![vec![2, -2], vec![-1, 2]]).unwrap();
        assert_eq!(b2.d, vec![1.0, 0.5]);
        assert!(b2.is_finite_type());
        let hyp = GeneralizedCartanMatrix::with_auto_symmetrizer(vec![vec![2, -3], vec![-3, 2]]).unwrap();
        assert!(!hyp.is_finite_type());
        assert!(GeneralizedCartanMatrix::sl(4).is_finite_type());
    }

    #[test]
    fn rhs_examples() {
        let cm = GeneralizedCartanMatrix::sl(2);
        let (da, db) = toda_rhs(&sl2_start(), &cm);
        assert_eq!((da[0], db[0]), (c(1.0, 0.0), c(0.0, 0.0)));
        let fixed = TodaState::new(vec![c(0.3, 1.0)], vec![c(0.0, 0.0)]);
        let (da, db) = toda_rhs(&fixed, &cm);
        assert_eq!((da[0], db[0]), (c(0.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn sl2_closed_form() {
        let cm = GeneralizedCartanMatrix::sl(2);
        let tr = integrate(&sl2_start(), &cm, c(1.0, 0.0), 1e-12).unwrap();
        let s = tr.last();
        assert!((s.a[0] - 1f64.tanh()).norm() < 1e-9);
        assert!((s.b[0] - 1.0 / 1f64.cosh().powi(2)).norm() < 1e-9);
        assert!(tr.h_drift < 1e-9);
        assert!((tr.h0 - 2.0).norm() < 1e-15);
        let x0 = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        for &t in &[0.3, 1.0, 2.5] {
            let x = solve_by_factorization(&x0, c(t, 0.0)).unwrap();
            let ex = ComplexMatrix::from_real_rows(&[&[t.tanh(), 1.0], &[1.0 / t.cosh().powi(2), -t.tanh()]]);
            assert!((&x - &ex).max_abs() < 1e-12);
        }
        assert_eq!(solve_by_factorization(&x0, c(0.0, 0.0)).unwrap(), x0);
    }

    #[test]
    fn fixed_points_and_reversal() {
        let cm = GeneralizedCartanMatrix::sl(3);
        let s = TodaState::new(vec![c(0.2, 0.1), c(-0.4, 0.0)], vec![c(0.0, 0.0); 2]);
        let tr = integrate(&s, &cm, c(1.0, 0.5), 1e-10).unwrap();
        assert_eq!(tr.last().a, s.a);
        assert_eq!(tr.last().b, s.b);
        let x = state_from_matrix(&random_tridiagonal(3, 1)).unwrap();
        let fwd = integrate(&x, &cm, c(0.8, 0.2), 1e-10).unwrap();
        let back = integrate(fwd.last(), &cm, c(0.0, 0.0), 1e-10).unwrap();
        assert!(back.last().distance(&x) < 1e-8);
    }

    #[test]
    fn decoupled_blocks_evolve_independently() {
        let a2 = GeneralizedCartanMatrix::new(vec![vec![2, 0], vec![0, 2]], vec![1.0, 1.0]).unwrap();
        let sl2 = GeneralizedCartanMatrix::sl(2);
        let s = TodaState::new(vec![c(0.1, 0.0), c(0.0, 0.3)], vec![c(1.0, 0.0), c(0.5, -0.2)]);
        let t = c(0.7, 0.0);
        let both = integrate(&s, &a2, t, 1e-11).unwrap();
        for k in 0..2 {
            let one = integrate(&TodaState::new(vec![s.a[k]], vec![s.b[k]]), &sl2, t, 1e-11).unwrap();
            assert!((both.last().a[k] - one.last().a[0]).norm() < 1e-9);
        }
    }

    #[test]
    fn factorization_matches_ode_and_trace() {
        for n in [3usize, 4] {
            let cm = GeneralizedCartanMatrix::sl(n);
            let x0 = random_tridiagonal(n, n as u64);
            let s0 = state_from_matrix(&x0).unwrap();
            assert!((&matrix_from_state(&s0) - &x0).max_abs() < 1e-14);
            let mut cur = s0.clone();
            for k in 1..=10 {
                let t = c(k as f64 / 10.0, 0.0);
                cur = integrate(&cur, &cm, t, 1e-11).unwrap().last().clone();
                let x = solve_by_factorization(&x0, t).unwrap();
                assert!(height_defect(&x) < 1e-10);
                assert!((&matrix_from_state(&cur) - &x).max_abs() < 1e-6);
                let tr2 = (&x * &x).trace();
                assert!((hamiltonian_reduced(&cur, &cm) - tr2).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn imaginary_axis_pole() {
        let cm = GeneralizedCartanMatrix::sl(2);
        assert!(singularity_scan(&sl2_start(), &cm, c(1.0, 0.0), 3.0, 1e-10).is_empty());
        let sing = singularity_scan(&sl2_start(), &cm, c(0.0, 1.0), 2.0, 1e-10);
        assert_eq!(sing.len(), 1, "{sing:?}");
        assert!((sing[0].t - c(0.0, std::f64::consts::FRAC_PI_2)).norm() < 1e-6, "{sing:?}");
        let two = singularity_scan(&sl2_start(), &cm, c(0.0, 1.0), 5.0, 1e-10);
        assert_eq!(two.len(), 2, "{two:?}");
        assert!((two[1].t - c(0.0, 1.5 * std::f64::consts::PI)).norm() < 1e-6, "{two:?}");
        // a(it) = i tan t
        let tr = integrate(&sl2_start(), &cm, c(0.0, 1.0), 1e-11).unwrap();
        assert!((tr.last().a[0] - c(0.0, 1f64.tan())).norm() < 1e-9);
    }

    #[test]
    fn monodromy_trivial_for_finite_type() {
        let cm = GeneralizedCartanMatrix::sl(2);
        let m = monodromy_probe(&sl2_start(), &cm, c(0.5, 0.3), 0.3, 1e-11).unwrap();
        assert!(m < 1e-8, "{m}");
        // Circle around the pole at iπ/2: residue-free for the state, still single valued.
        let m = monodromy_probe(&sl2_start(), &cm, c(0.0, 1.5707963267948966), 0.4, 1e-11).unwrap();
        assert!(m < 1e-7, "{m}");
    }
}

//! Kostant-Toda flow on sl3 by ODE integration and by factorization of
//! exp(t x0), then the complex-time pole of the sl2 solution.

use kmlab::linalg::ComplexMatrix;
use kmlab::toda::*;
use num_complex::Complex64 as C64;

fn main() {
    let c = |re: f64, im: f64| C64::new(re, im);
    let x0 = ComplexMatrix::from_real_rows(&[&[0.3, 1.0, 0.0], &[0.5, -0.1, 1.0], &[0.0, 0.8, -0.2]]);
    let cm = GeneralizedCartanMatrix::sl(3);
    let s0 = state_from_matrix(&x0).unwrap();
    for t in [0.25, 0.5, 1.0] {
        let ode = integrate(&s0, &cm, c(t, 0.0), 1e-11).unwrap();
        let fac = solve_by_factorization(&x0, c(t, 0.0)).unwrap();
        let gap = (&matrix_from_state(ode.last()) - &fac).max_abs();
        println!("t={t}: |ODE - factorization| = {gap:.2e}, H drift {:.2e}", ode.h_drift);
    }
    let sl2 = GeneralizedCartanMatrix::sl(2);
    let start = TodaState::new(vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]);
    for s in singularity_scan(&start, &sl2, c(0.0, 1.0), 5.0, 1e-10) {
        println!("sl2 pole at {:.8} (+- {:.1e}); expected i pi/2 + k i pi", s.t, s.uncertainty);
    }
}

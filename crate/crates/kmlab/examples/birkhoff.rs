//! Truncated Birkhoff factorization g = g- g0 g+ of a scalar loop with known
//! factors, then a short run of the g0-law probe.

use kmlab::linalg::ComplexMatrix;
use kmlab::looptoeplitz::{birkhoff_factor, g0_law_probe, G0ProbeSpec, LoopFourier};
use kmlab::mc::StreamKey;
use num_complex::Complex64 as C64;

fn main() {
    let (a, b) = (C64::new(0.4, -0.2), C64::new(-0.3, 0.5));
    let g = LoopFourier::from_fn(1, 40, 128, |t| {
        ComplexMatrix::from_diag(&[(a * C64::from_polar(1.0, -t) + b * C64::from_polar(1.0, t)).exp()])
    })
    .unwrap();
    for m in [8, 16, 32] {
        let f = birkhoff_factor(&g, m).unwrap();
        println!(
            "M={m:>2}: g-(-1) {:.6} (exact {:.6}), g+(1) {:.6} (exact {:.6}), residual {:.2e}",
            f.g_minus[1][(0, 0)],
            a,
            f.g_plus[1][(0, 0)],
            b,
            f.reconstruction_residual(&g, 64)
        );
    }
    let spec = G0ProbeSpec { betas: vec![8.0, 2.0], steps: 512, ..Default::default() };
    let probe = g0_law_probe(&spec, 200, StreamKey::new(6, 0));
    for h in &probe.histograms {
        println!("beta={}: median tr g0*g0 {:.3}, ess {:.0}", h.beta, h.median, h.ess);
    }
}

//! The I_n(delta) kernel, the Gaussian translation lemma and the SU(2) heat
//! kernel.

use kmlab::looptoeplitz::*;

fn main() {
    let d = 1e-3;
    for n in [1, 10, 15, 16, 50] {
        println!("I_{n}({d}) = {:.8}  (1 - n d/pi = {:.8})", in_kernel(n, d), 1.0 - n as f64 * d / std::f64::consts::PI);
    }
    println!("sum_(n<=200) |I_n - I_(n+1)| at delta=0.1: {:.6}", in_telescoping_sum(0.1, 200));
    for p in [1.0, 2.0, 4.0] {
        let r = gaussian_shift_report(p, 1e-3, 10.0, 100);
        println!(
            "p={p}: ratio at s=1e-3 {:.6}, E|t|^p {:.6}, grid sup {:.4e} at s={:.3}, printed constant {:.4}",
            r.small_s_ratio, r.normal_moment, r.grid_sup, r.grid_argsup, r.printed_constant
        );
    }
    println!("heat kernel mass at t=0.5: {:.10}", heat_kernel_normalization(0.5));
    println!("p_0.4 * p_0.6 at theta=1.2: {:.10}, p_1.0: {:.10}", heat_kernel_convolution(0.4, 0.6, 1.2), heat_kernel_su2(1.0, 1.2));
}

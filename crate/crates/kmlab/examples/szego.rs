//! Abelian loops: det(1 - C*C) against exp(-sum n|x_n|^2) on a dyadic
//! ladder, and the partition constant.

use kmlab::cfunc::{partition_product_corrected, partition_z};
use kmlab::looptoeplitz::{partition_constant_mc, szego_check};
use kmlab::mc::StreamKey;
use num_complex::Complex64 as C64;

fn main() {
    let x = [C64::new(0.2, 0.0), C64::new(0.0, 0.1), C64::new(-0.05, 0.03)];
    let r = szego_check(&x, 1.0, &[4, 8, 16, 32, 64]).unwrap();
    println!("sum n|x_n|^2 = {:.6}", r.energy);
    for row in &r.rows {
        println!("M={:>3}  det2 gap {:.2e}  |det A_M|^2 gap {:.2e}", row.m, row.gap, row.toeplitz_gap);
    }
    for (beta, k) in [(1.0, 1.0), (2.0, 1.0)] {
        let mc = partition_constant_mc(beta, k, 64, 50_000, StreamKey::new(5, 0));
        println!(
            "beta={beta} k={k}: Gamma form {:.8}  product(1e6) {:.8}  MC(K=64) {:.4} +- {:.4} vs {:.4}",
            partition_z(beta, k),
            partition_product_corrected(beta, k, 1_000_000),
            mc.estimate,
            mc.stderr,
            mc.truncated_product
        );
    }
}

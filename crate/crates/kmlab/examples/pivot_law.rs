//! Pivot law of Haar SU(n) against the finite c-function product.
//!
//!     cargo run --release --example pivot_law -- 3 200000

use kmlab::cfunc::{c_finite_a, SpectralParam};
use kmlab::diagdist::{compare, empirical_cf, sample_pivots};
use kmlab::ensembles::GroupSpec;
use kmlab::mc::StreamKey;

fn main() {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let draws: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(200_000);

    let batch = sample_pivots(&GroupSpec::su(n), draws, StreamKey::new(1, 0));
    println!("SU({n}), {draws} draws, off-stratum rate {:.1e}", batch.rejection_rate());
    println!("{:>24}  {:>22}  {:>22}  {:>6}", "lambda", "empirical", "c_A", "z");
    for t in [0.5, 1.0, 2.0, 4.0] {
        let mut lam = vec![0.0; n];
        lam[0] = t;
        lam[n - 1] = -0.5 * t;
        let sp = SpectralParam::from_dense(&lam);
        let e = empirical_cf(&batch, &sp).unwrap();
        let c = c_finite_a(n, &sp).unwrap();
        let v = compare(&e, c);
        println!("{:>24}  {:>22.6}  {:>22.6}  {:>6.2}", format!("{lam:?}"), e.value, c, v.z);
    }
}

//! E det(g*g)^{-is} over unit-variance Ginibre against the Gamma ratio.

use kmlab::diagdist::{selberg_mc_check, SELBERG_NOTE};
use kmlab::mc::StreamKey;

fn main() {
    println!("{SELBERG_NOTE}");
    for n in 1..=4 {
        for s in [0.5, 1.0] {
            let r = selberg_mc_check(n, s, 100_000, StreamKey::new(3, (n * 10) as u64 + s as u64));
            let v = r.verdict;
            println!("n={n} s={s}: MC {:.5}  Gamma ratio {:.5}  z {:.2}", v.value, v.reference, v.z);
        }
    }
}

//! Invariant measure on the Grassmannian in graph coordinates: the scalar
//! uniform law, projection coherence and the Schur projection chain.

use kmlab::grassmann::{ks_projection_coherence, ks_scalar_uniformity, schur_pushforward_check};
use kmlab::mc::StreamKey;

fn main() {
    let key = StreamKey::new(4, 0);
    let (d, crit) = ks_scalar_uniformity(100_000, key.child(0));
    println!("M=1, |z|^2/(1+|z|^2) ~ U(0,1): KS {d:.4} (1% critical {crit:.4})");
    let (d, crit) = ks_projection_coherence(3, 50_000, key.child(1));
    println!("M=3 corner against U(0,1):     KS {d:.4} (1% critical {crit:.4})");
    for c in schur_pushforward_check(2, 1, 50_000, key.child(2)) {
        println!("Schur 2->1 {:<28} pushed {:.4}  direct {:.4}  z {:.2}", c.name, c.left, c.right, c.z);
    }
}

//! Pivot laws of SO(5), Sp(2) and SO(4) in the quadratic-form basis, plain
//! and with the |det A|^{2s} weight.

use kmlab::cfunc::{c_finite_bcd, c_weighted, RootSystemSpec, SpectralParam};
use kmlab::diagdist::{compare, empirical_cf, empirical_cf_weighted, sample_pivots};
use kmlab::ensembles::{Family, GroupSpec};
use kmlab::mc::StreamKey;

fn main() {
    let lam = SpectralParam::from_dense(&[0.8, -0.5]);
    for (fam, name) in [(Family::B, "SO(5)"), (Family::C, "Sp(2)"), (Family::D, "SO(4)")] {
        let b = sample_pivots(&GroupSpec::qf(fam, 2), 200_000, StreamKey::new(2, fam as u64));
        let e = empirical_cf(&b, &lam).unwrap();
        let r = c_finite_bcd(&RootSystemSpec::new(fam, 2), &lam).unwrap();
        println!("{name}: empirical {:.5}  product {:.5}  z {:.2}", e.value, r, compare(&e, r).z);
        if fam == Family::D {
            let e = empirical_cf_weighted(&b, &lam, 1.0, 0).unwrap();
            let r = c_weighted(fam, 2, &lam, 1.0, 0).unwrap();
            println!("{name}, s = 1: empirical {:.5}  product {:.5}  z {:.2}  ess {:.0}", e.value, r, compare(&e, r).z, e.ess);
        }
    }
}

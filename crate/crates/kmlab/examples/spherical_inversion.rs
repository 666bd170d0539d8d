//! The sech law: Fourier pair, residue-series inversion and quadrature
//! inversion of the rank-one spherical transform.

use kmlab::spherical::*;

fn main() {
    for lam in [0.5, 1.0, 3.0] {
        println!("lambda={lam}: transform {:.10}  sech {:.10}", sech_density_transform(lam), sech_cf(lam));
    }
    for a in [1.5, 2.0, 3.0] {
        let res = residue_phi(a, 400).unwrap();
        let quad = harish_inverse_quadrature(sech_family_transform, a, 1e-13).unwrap();
        println!(
            "a={a}: residue series / closed {:.10}  quadrature {:.10}  closed (normalized) {:.10}",
            res / phi_closed(a),
            quad,
            phi_closed(a) / PHI_CLOSED_MASS
        );
    }
    let p = affine_c_product_probe(&AffineProbeSpec::sl2(1.0, 0.0, 1.0), 4096).unwrap();
    println!("affine sl2 product ({}): {:.8}, sech {:.8}", p.label, p.extrapolated, sech_cf(1.0));
}

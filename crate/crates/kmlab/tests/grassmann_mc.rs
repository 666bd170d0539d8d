use kmlab::grassmann::*;
use kmlab::mc::StreamKey;

fn key(s: u64) -> StreamKey {
    StreamKey::new(31, s)
}

fn show(vs: &[StatComparison]) -> String {
    vs.iter().map(|v| format!("{} z={:.2}", v.name, v.z)).collect::<Vec<_>>().join("; ")
}

#[test]
fn unitary_invariance_holds() {
    for m in [1, 2] {
        let v = unitary_invariance_check(m, 40_000, key(m as u64));
        assert!(v.iter().all(|c| c.pass), "M={m}: {}", show(&v));
    }
}

#[test]
fn cocycle_change_of_variables_holds() {
    for (m, s) in [(1, 1.0), (2, 0.5)] {
        let v = cocycle_change_of_variables(m, s, 40_000, key(10 + m as u64));
        assert_eq!(v.len(), 5);
        assert!(v.iter().all(|c| c.pass), "M={m}: {}", show(&v));
    }
}

#[test]
fn cocycle_test_detects_missing_factor() {
    let v = cocycle_change_of_variables_with(1, 1.0, 0.0, 40_000, key(20));
    assert!(v.iter().any(|c| !c.pass), "{}", show(&v));
}

#[test]
fn schur_pushforward_matches_direct() {
    let v = schur_pushforward_check(2, 1, 40_000, key(30));
    assert_eq!(v.len(), 6);
    assert!(v.iter().all(|c| c.pass), "{}", show(&v));
}

#[test]
fn gaussian_schur_limit_and_control() {
    let v = gaussian_schur_limit_check(1, 32, 10_000, key(40), true);
    assert!(v.iter().all(|c| c.pass), "{}", show(&v));
    let bad = gaussian_schur_limit_check(1, 32, 10_000, key(41), false);
    assert!(bad.iter().any(|c| !c.pass));
}

#[test]
fn inversion_invariance_ks() {
    let (d, crit) = ks_inversion_invariance(2, 20_000, key(50));
    assert!(d < crit, "{d} {crit}");
}

#[test]
fn tail_probe_separates_sides_of_boundary() {
    let spec = MuSDensitySpec { n: 1, r: 0, s: 1.0 };
    let p = mu_s_tail_probe(&spec, 50_000, key(60));
    assert!(p.mean_weight > 0.0 && p.mean_weight <= 1.0);
    let q = mu_s_tail_probe(&MuSDensitySpec { s: -0.5, ..spec }, 200_000, key(61));
    assert!((q.hill_alpha - 2.0).abs() < 0.5, "{q:?}");
}

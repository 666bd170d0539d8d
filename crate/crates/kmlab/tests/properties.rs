use kmlab::cfunc::*;
use kmlab::diagdist::{empirical_cf, sample_pivots};
use kmlab::ensembles::*;
use kmlab::grassmann::{moebius, mu_s_logdensity, MuSDensitySpec};
use kmlab::linalg::*;
use kmlab::looptoeplitz as lt;
use kmlab::mc::{run_chunked, ComplexAccum, StreamKey};
use kmlab::report::{CheckRecord, SuiteReport};
use kmlab::spherical as sph;
use kmlab::toda::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, ..ProptestConfig::default() }
}

fn gauss(n: usize, seed: u64) -> ComplexMatrix {
    gaussian_matrix(n, n, 1.0, &mut StreamKey::new(seed, 1).rng(0))
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn ldu_reconstructs_and_matches_det(n in 1usize..=6, seed in any::<u64>()) {
        let g = gauss(n, seed);
        let f = ldu(&g).unwrap();
        let rel = (&f.reconstruct() - &g).max_abs() / g.max_abs();
        prop_assert!(rel < 1e-10);
        let prod: C64 = f.d.iter().product();
        prop_assert!((prod - g.det()).norm() < 1e-9 * g.det().norm().max(1.0));
        for j in 1..=n {
            let minor = g.block(0, 0, j, j).det();
            prop_assert!((f.pivots[j - 1] - minor).norm() < 1e-9 * minor.norm().max(1.0));
        }
    }

    #[test]
    fn schur_complement_is_inverse_corner(n in 2usize..=6, m in 1usize..=5, seed in any::<u64>()) {
        prop_assume!(m < n);
        let g = &gauss(n, seed) + &ComplexMatrix::identity(n).scale_re(3.0);
        let s = schur_complement(&g, m).unwrap();
        let k = n - m;
        let corner = g.inverse().unwrap().block(m, m, k, k).inverse().unwrap();
        prop_assert!((&s - &corner).max_abs() < 1e-9);
    }

    #[test]
    fn expm_commuting_pair(d in prop::collection::vec(-1.0f64..1.0, 3), c in -1.0f64..1.0) {
        let a = ComplexMatrix::from_diag(&d.iter().map(|x| C64::new(*x, 0.5 * x)).collect::<Vec<_>>());
        let b = ComplexMatrix::identity(3).scale(C64::new(c, -c));
        let lhs = expm(&(&a + &b));
        let rhs = &expm(&a) * &expm(&b);
        prop_assert!((&lhs - &rhs).max_abs() < 1e-11);
    }

    #[test]
    fn replay_is_bit_identical(seed in any::<u64>(), stream in any::<u64>(), index in 0u64..1_000_000) {
        let k = StreamKey::new(seed, stream);
        let a = haar_unitary(3, &mut k.rng(index));
        let b = haar_unitary(3, &mut k.rng(index));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn finite_c_functions_conjugate_and_bounded(l in prop::collection::vec(-5.0f64..5.0, 4)) {
        let lam = SpectralParam::from_dense(&l);
        let f = c_finite_a(4, &lam).unwrap();
        let g = c_finite_a(4, &lam.neg()).unwrap();
        prop_assert!((f - g.conj()).norm() < 1e-12);
        prop_assert!(f.norm() <= 1.0 + 1e-12);
        for fam in [Family::B, Family::C, Family::D] {
            let lam2 = SpectralParam::from_dense(&l[..2]);
            let r = RootSystemSpec::new(fam, 2);
            let f = c_finite_bcd(&r, &lam2).unwrap();
            prop_assert!((f - c_finite_bcd(&r, &lam2.neg()).unwrap().conj()).norm() < 1e-12);
            prop_assert!(f.norm() <= 1.0 + 1e-12);
        }
        let lim = c_limit_a(&lam).unwrap();
        prop_assert!((lim - c_limit_a(&lam.neg()).unwrap().conj()).norm() < 1e-12);
    }

    #[test]
    fn selberg_ratio_modulus(n in 1usize..=5, s in -3.0f64..3.0) {
        let p = selberg_gamma_ratio(n, s) * selberg_gamma_ratio(n, -s);
        prop_assert!(p.im.abs() < 1e-12 && p.re > 0.0);
        prop_assert!((p.re - selberg_gamma_ratio(n, s).norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn moebius_cocycle_chain_rule(seed in any::<u64>()) {
        let mut rng = StreamKey::new(seed, 2).rng(0);
        let g = haar_unitary(4, &mut rng);
        let h = haar_unitary(4, &mut rng);
        let z = gaussian_matrix(2, 2, 1.0, &mut rng);
        let (Ok(hz), Ok(ghz)) = (moebius(&h, &z), moebius(&(&g * &h), &z)) else { return Ok(()) };
        let Ok(g_hz) = moebius(&g, &hz.z) else { return Ok(()) };
        prop_assert!((ghz.log_cocycle - g_hz.log_cocycle - hz.log_cocycle).abs() < 1e-9);
    }

    #[test]
    fn mu0_density_unitarily_invariant(seed in any::<u64>()) {
        let mut rng = StreamKey::new(seed, 3).rng(0);
        let g = gaussian_matrix(4, 4, 1.0, &mut rng);
        let (u, v) = (haar_unitary(4, &mut rng), haar_unitary(4, &mut rng));
        let spec = MuSDensitySpec { n: 2, r: 0, s: 0.0 };
        let a = mu_s_logdensity(&g, &spec).unwrap();
        let b = mu_s_logdensity(&(&(&u * &g) * &v), &spec).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn toda_fixed_points_exact(a in prop::collection::vec(-1.0f64..1.0, 3), t in 0.0f64..2.0) {
        let cm = GeneralizedCartanMatrix::sl(4);
        let s = TodaState::new(a.iter().map(|x| C64::new(*x, 0.0)).collect(), vec![C64::new(0.0, 0.0); 3]);
        let tr = integrate(&s, &cm, C64::new(t, 0.0), 1e-9).unwrap();
        prop_assert_eq!(&tr.last().a, &s.a);
        prop_assert_eq!(&tr.last().b, &s.b);
    }

    #[test]
    fn det2_weight_in_unit_interval(x in prop::collection::vec((-0.4f64..0.4, -0.4f64..0.4), 1..4), m in 4usize..24) {
        let xs: Vec<C64> = x.iter().map(|(a, b)| C64::new(*a, *b)).collect();
        let g = lt::LoopFourier::exp_i_abelian(&xs, 24);
        let w = lt::det2_weight(&g, m, 1.0).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&w));
    }

    #[test]
    fn telescoping_sum_uniformly_bounded(d in 0.01f64..std::f64::consts::FRAC_PI_2) {
        prop_assert!(lt::in_telescoping_sum(d, 200) <= 1.0 + 1e-12);
    }

    #[test]
    fn csv_round_trip(re in any::<f64>(), im in -1e300f64..1e300, se in 0.0f64..1e10) {
        prop_assume!(re.is_finite());
        let c = CheckRecord::z("x", serde_json::json!({"v": re}), C64::new(re, im), C64::new(0.0, 0.0), se, 4.0);
        let r = SuiteReport::new("p", 1, serde_json::json!({}), vec![], vec![c], 0.0);
        let csv = r.to_csv();
        let mut rd = csv::Reader::from_reader(csv.as_bytes());
        let row = rd.records().next().unwrap().unwrap();
        prop_assert_eq!(row[3].parse::<f64>().unwrap(), re);
        prop_assert_eq!(row[4].parse::<f64>().unwrap(), im);
        prop_assert_eq!(row[7].parse::<f64>().unwrap(), se);
    }
}

proptest! {
    #![proptest_config(cases(8))]

    #[test]
    fn quadratic_form_samples_preserve_form(seed in any::<u64>(), fam in 0usize..3, l in 1usize..=3) {
        let fam = [Family::B, Family::C, Family::D][fam];
        let spec = GroupSpec::qf(fam, l);
        let g = haar_compact(&spec, &mut StreamKey::new(seed, 4).rng(0));
        let gt = spec.form_transpose(&g);
        prop_assert!((&(&gt * &g) - &ComplexMatrix::identity(spec.dim())).max_abs() < 1e-10);
    }

    #[test]
    fn empirical_cf_conjugate_and_bounded(seed in any::<u64>(), l in prop::collection::vec(-3.0f64..3.0, 3)) {
        let b = sample_pivots(&GroupSpec::su(3), 4096, StreamKey::new(seed, 5));
        prop_assert!(b.rejection_rate() < 1e-3);
        let lam = SpectralParam::from_dense(&l);
        let p = empirical_cf(&b, &lam).unwrap();
        let m = empirical_cf(&b, &lam.neg()).unwrap();
        prop_assert!((p.value - m.value.conj()).norm() < 1e-12);
        prop_assert!(p.value.norm() <= 1.0 + 4.0 * p.stderr);
    }

    #[test]
    fn multiplicativity_defect_rank(seed in any::<u64>(), k in 1usize..=2) {
        let mut rng = StreamKey::new(seed, 6).rng(0);
        let mut poly = || {
            let c = (0..2 * k + 1).map(|_| ComplexMatrix::from_fn(2, 2, |_, _| complex_normal(&mut rng, 1.0))).collect();
            lt::LoopFourier::new(2, k, c).unwrap()
        };
        let (g, h) = (poly(), poly());
        let d = lt::multiplicativity_defect(&g, &h, 12).unwrap();
        prop_assert!(lt::numerical_rank(&d, 1e-6) <= 2 * 2 * k);
    }

    #[test]
    fn residue_phi_ratio_constant(a in 1.2f64..4.0) {
        let v = sph::residue_phi(a, 400).unwrap();
        prop_assert!((v / sph::phi_closed(a) - 32.0).abs() < 1e-8 * 32.0);
    }

    #[test]
    fn quadrature_inversion_weyl_symmetric(a in 1.1f64..3.0) {
        let f = |x| sph::harish_inverse_raw(sph::sech_family_transform, x, 1e-13).unwrap();
        prop_assert!((f(a) - f(1.0 / a)).abs() < 1e-6);
    }

    #[test]
    fn thread_count_does_not_change_results(seed in any::<u64>()) {
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                run_chunked(StreamKey::new(seed, 7), 10_000, ComplexAccum::default, |a, r, _| {
                    a.push(haar_unitary(2, r)[(0, 0)]);
                }, |a, b| a.merge(b))
            })
        };
        let (a, b) = (run(1), run(3));
        prop_assert_eq!(a.mean(), b.mean());
        prop_assert_eq!(a.stderr(), b.stderr());
    }
}

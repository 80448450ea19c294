use onewave::factorization::*;
use onewave::forward::*;
use onewave::geometry::Curve;
use onewave::linalg::{ComplexMatrix, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_row_major(n, n, (0..n * n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()).unwrap()
}

mod common;
use common::brute_force_sharp_spectrum;

#[test]
fn sharp_matches_dense_brute_force_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let f = random_matrix(&mut rng, 8);
        let s = sharp(&f).unwrap();
        let expected = brute_force_sharp_spectrum(&f);
        for (a, b) in s.eigenvalues().iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-12 * expected[0].max(1.0), "{a} vs {b}");
        }
    }
}

#[test]
fn sharp_is_positive_and_reconstructs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = random_matrix(&mut rng, 12);
    let s = sharp(&f).unwrap();
    assert!(s.eigenvalues().iter().all(|&l| l >= 0.0));
    assert!(s.eigenvalues().windows(2).all(|w| w[0] >= w[1]));
    let rebuilt = s.eigensystem.reconstruct();
    assert!(rebuilt.hermitian_defect() < 1e-13);
}

#[test]
fn picard_scaling_and_cutoff_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_matrix(&mut rng, 10);
    let g: Vec<C64> = (0..10).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let s = sharp(&f).unwrap();
    let c = C64::new(0.3, -2.0);
    let scaled: Vec<C64> = g.iter().map(|x| x * c).collect();
    let (a, b) = (picard(&s, &g).unwrap(), picard(&s, &scaled).unwrap());
    assert!((b - a / c.norm_sqr()).abs() <= 1e-14 * a);
    let mut last = f64::INFINITY;
    for keep in 0..=10 {
        let mut t = s.clone();
        t.cutoff_index = keep;
        let v = picard(&t, &g).unwrap();
        assert!(v <= last);
        last = v;
    }
}

#[test]
fn zero_operator_gives_degenerate_image() {
    let traces = TestTraces::new(TraceKind::Classical, 1.0, 5.0, 16, &Resolution::default()).unwrap();
    let grid = Grid::square(2.0, 1.0).unwrap();
    let out = indicator_field(&ComplexMatrix::zeros(16, 16), &traces, &grid, DEFAULT_CUTOFF).unwrap();
    assert!(out.mask.iter().all(|m| !m));
    assert!(out.note.unwrap().contains("DegenerateOperator"));
}

#[test]
fn single_member_family_and_hull_rules() {
    let r = IndicatorResult::new(vec![3.0], vec![true], (1, 1));
    assert_eq!(r.argmax, Some(0));
    assert_eq!(r.extrema, Some((3.0, 3.0)));

    let disks: Vec<Curve> = [1.0, 1.5, 2.0, 2.5].iter().map(|&a| Curve::circle([0.0, 0.0], a).unwrap()).collect();
    let values = IndicatorResult::new(vec![1.0, 2.0, 3.0, 4.0], vec![true; 4], (1, 4));
    let grid = Grid::square(3.0, 0.25).unwrap();
    let all = convex_hull_estimate(&disks, &values, 0.0, &grid).unwrap();
    for (i, &inside) in all.iter().enumerate() {
        let z = grid.point(i);
        let rho = z[0].hypot(z[1]);
        if (rho - 1.0).abs() > 1e-9 {
            assert_eq!(inside, rho < 1.0, "{z:?}");
        }
    }
    // the median rule keeps the two largest disks
    let half = convex_hull_estimate(&disks, &values, 0.5, &grid).unwrap();
    assert!(half.iter().zip(grid.points()).all(|(&m, z)| m == (z[0].hypot(z[1]) <= 2.0)));
    assert!(matches!(convex_hull_estimate(&disks, &values, 1.0, &grid), Err(FactorizationError::NoAcceptedDomains)));
}

fn empty_data(k: f64) -> CauchyData {
    let f = BoundaryFunction::from_knot_values(&[1.0, 0.0, 2.0, 0.0], 32, 5.0);
    let s = Scenario::new(5.0, C64::new(k, 0.0), Object::Empty).unwrap();
    synthesize_cauchy_data(&s, 1.0, &f, &Resolution { boundary: 256, interior: 128, ..Resolution::default() }, 2).unwrap()
}

fn probe_domain() -> TestDomain {
    TestDomain::new(ProbeKind::Impedance, Curve::circle([0.0, 0.0], 4.0).unwrap(), Curve::circle([-0.5, 0.0], 0.25).unwrap())
}

#[test]
fn empty_disk_data_peaks_at_true_coefficients() {
    let data = empty_data(2.0);
    let res = Resolution { boundary: 256, interior: 128, ..Resolution::default() };
    let taus = [0.9, 0.95, 1.0, 1.05, 1.1];
    let kappas = [1.9, 1.95, 2.0, 2.05, 2.1];
    let out = coefficient_scan(&data, &probe_domain(), &taus, &kappas, Variant::Classical, &res, DEFAULT_CUTOFF).unwrap();
    let best = out.argmax.unwrap();
    assert_eq!(best, 2 * 5 + 2);
    let top = out.values[best];
    for (i, &v) in out.values.iter().enumerate() {
        if i != best {
            assert!(top >= 1e2 * v, "{i}: {v:e} vs {top:e}");
        }
    }

    // scaling the data divides every value by |c|² and keeps the argmax
    let c = C64::new(0.0, 3.0);
    let scaled = coefficient_scan(&data.scaled(c), &probe_domain(), &taus, &kappas, Variant::Classical, &res, DEFAULT_CUTOFF).unwrap();
    assert_eq!(scaled.argmax, out.argmax);
    for (i, (a, b)) in out.values.iter().zip(&scaled.values).enumerate() {
        // the true node's residual is roundoff, which does not scale exactly
        let tol = if i == best { 1e-2 } else { 1e-9 };
        assert!((b * 9.0 - a).abs() <= tol * a, "{a} {b}");
    }
}

#[test]
fn residual_is_affine_in_tau_for_empty_disk() {
    // at the true κ the classical residual is (σ − τ) A₀ f, so I scales as 1/(σ−τ)²
    let data = empty_data(2.0);
    let res = Resolution { boundary: 256, interior: 128, ..Resolution::default() };
    let out = coefficient_scan(&data, &probe_domain(), &[0.5, 0.75], &[2.0], Variant::Classical, &res, DEFAULT_CUTOFF).unwrap();
    let ratio = out.values[1] / out.values[0];
    assert!((ratio - 4.0).abs() < 1e-6, "{ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sharp_is_adjoint_and_unitarily_invariant(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_matrix(&mut rng, 8);
        let a = sharp(&f).unwrap();
        let b = sharp(&f.adjoint()).unwrap();
        // a unitary from the eigenvectors of a random Hermitian matrix
        let h = random_matrix(&mut rng, 8).hermitian_part();
        let u = onewave::linalg::hermitian_eig(&h).unwrap().eigenvectors;
        let c = sharp(&u.matmul(&f).matmul(&u.adjoint())).unwrap();
        for i in 0..8 {
            prop_assert!((a.eigenvalues()[i] - b.eigenvalues()[i]).abs() < 1e-12);
            prop_assert!((a.eigenvalues()[i] - c.eigenvalues()[i]).abs() < 1e-12);
        }
        // picard under a common change of basis
        let g: Vec<C64> = (0..8).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let ug = u.matvec(&g);
        let (p, q) = (picard(&a, &g).unwrap(), picard(&c, &ug).unwrap());
        prop_assert!((p - q).abs() <= 1e-9 * p);
    }

    #[test]
    fn rgb_colors_stay_in_the_unit_cube(values in proptest::collection::vec(1e-6f64..1e6, 2..40), log in any::<bool>()) {
        let n = values.len();
        let r = IndicatorResult::new(values, vec![true; n], (1, n));
        match rgb_map(&r, log) {
            Ok(colors) => {
                for c in colors.into_iter().flatten() {
                    prop_assert!(c.iter().all(|x| (0.0..=1.0).contains(x)));
                    prop_assert!((c.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                }
            }
            Err(e) => prop_assert!(matches!(e, FactorizationError::DegenerateRange)),
        }
    }
}

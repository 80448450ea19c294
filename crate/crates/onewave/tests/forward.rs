use onewave::forward::*;
use onewave::geometry::{Curve, Point};
use onewave::linalg::{ComplexMatrix, C64};
use onewave::specfun::bessel_jy;
use proptest::prelude::*;
use std::f64::consts::TAU;

mod common;
use common::{annulus_dtn, diag_error, paper_polygon, real, res, transmission_dtn, R};

#[test]
fn empty_disk_entry_example() {
    let m = dtn_empty_disk(1.0, R, 128).unwrap();
    let v = m.entries[(64, 64)];
    assert!((v.re - (-1.844510)).abs() < 1e-6, "{v}");
    let j0 = bessel_jy(0, 5.0).unwrap();
    assert!((v.re + j0.jp.abs() * 0.0 - j0.jp / j0.j).abs() < 1e-13);
    for n in 1..64 {
        assert_eq!(m.entries[(64 + n, 64 + n)], m.entries[(64 - n, 64 - n)]);
    }
}

#[test]
fn empty_disk_bie_matches_diagonal_and_is_mode_local() {
    let k = 1.0;
    let exact = dtn_empty_disk(k, R, 64).unwrap();
    let s = Scenario::new(R, real(k), Object::Empty).unwrap();
    let m = assemble_dtn(&s, 64, &res(256, 64)).unwrap();
    let diag_max = (0..64).map(|i| exact.entries[(i, i)].norm()).fold(0.0, f64::max);
    for i in 0..64 {
        for j in 0..64 {
            let err = (m.entries[(i, j)] - exact.entries[(i, j)]).norm();
            assert!(err < 1e-8 * diag_max.max(1.0), "({i},{j}) {err:e}");
        }
    }
}

#[test]
fn dirichlet_annulus_oracle() {
    let (k, a) = (1.0, 1.0);
    let curve = Curve::circle([0.0, 0.0], a).unwrap();
    let s = Scenario::new(R, real(k), Object::Dirichlet { curve }).unwrap();
    let m = assemble_dtn(&s, 64, &res(256, 128)).unwrap();
    let err = diag_error(&m, |n| {
        let p = bessel_jy(n, k * a).unwrap();
        real(annulus_dtn(n, k, (p.j, p.y)))
    });
    assert!(err < 1e-8, "{err:e}");
}

#[test]
fn impedance_and_neumann_annulus_oracles() {
    let (k, a) = (2.0, 0.8);
    for eta in [C64::new(0.0, 0.0), C64::new(0.0, -2.0), C64::new(0.0, 2.0)] {
        let curve = Curve::circle([0.0, 0.0], a).unwrap();
        let object = if eta.norm() == 0.0 { Object::Neumann { curve } } else { Object::Impedance { curve, eta } };
        let s = Scenario::new(R, real(k), object).unwrap();
        let m = assemble_dtn(&s, 64, &res(256, 128)).unwrap();
        // ∂_r u + η u = 0 at r = a, with complex η: solve in complex arithmetic
        let err = diag_error(&m, |n| {
            let p = bessel_jy(n, k * a).unwrap();
            let q = bessel_jy(n, k * R).unwrap();
            let ca = k * p.jp + eta * p.j;
            let cb = k * p.yp + eta * p.y;
            let det = q.j * cb - q.y * ca;
            let alpha = cb / det;
            let beta = -ca / det;
            (alpha * q.jp + beta * q.yp) * k
        });
        assert!(err < 1e-8, "eta={eta}: {err:e}");
    }
}

#[test]
fn penetrable_disk_oracle() {
    let (k, a) = (1.0, 1.0);
    for index in [C64::new(4.0, 0.0), C64::new(0.25, 0.0), C64::new(3.0, 4.0)] {
        let curve = Curve::circle([0.0, 0.0], a).unwrap();
        let s = Scenario::new(R, real(k), Object::Medium { curve, index }).unwrap();
        let m = assemble_dtn(&s, 64, &res(256, 128)).unwrap();
        let err = diag_error(&m, |n| transmission_dtn(n, k, a, index));
        assert!(err < 1e-7, "n={index}: {err:e}");
    }
}

#[test]
fn polygon_dtn_reciprocity_and_realness() {
    let k = 2.0;
    let s = Scenario::new(R, real(k), Object::Dirichlet { curve: paper_polygon() }).unwrap();
    // synthesis resolution: polygon maps are only built to generate data
    let m = assemble_dtn(&s, 128, &Resolution::default().refined(2)).unwrap();
    let a0 = dtn_empty_disk(k, R, 128).unwrap();
    let diff = m.entries.sub(&a0.entries);
    let defect = DtnMatrix::reciprocity_defect(&diff);
    assert!(defect <= 1e-6 * diff.max_abs(), "{defect:e} vs {:e}", diff.max_abs());
    // in a real basis (node values) the map is real
    let e = synthesis_matrix(128, 128, R);
    let p = projection_matrix(128, 128, R);
    let nodal = e.matmul(&m.entries).matmul(&p);
    let im = nodal.as_slice().iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    assert!(im <= 1e-6 * nodal.max_abs(), "{im:e}");
}

#[test]
fn knot_values_constant_and_half_step() {
    let f = BoundaryFunction::from_knot_values(&[1.0], 16, R);
    assert!((f.coefficient(0) - C64::new((TAU * R).sqrt(), 0.0)).norm() < 1e-14);
    assert!((1..8).all(|n| f.coefficient(n).norm() < 1e-15 && f.coefficient(-n).norm() < 1e-15));
    let h = BoundaryFunction::from_knot_values(&[1.0, 0.0], 64, R);
    let s = (TAU * R).sqrt();
    assert!((h.coefficient(0).re / s - 0.5).abs() < 1e-15);
    for n in 1..32i64 {
        let c = h.coefficient(n) / s;
        if n % 2 == 0 {
            assert!(c.norm() < 1e-15);
        } else {
            // (1/2π)∫_0^π e^{−inθ} dθ = 1/(iπn) for odd n
            assert!((c - C64::new(0.0, -1.0 / (std::f64::consts::PI * n as f64))).norm() < 1e-15);
        }
    }
}

#[test]
fn sampling_round_trip_is_identity_on_band_limited_data() {
    let f = BoundaryFunction::from_knot_values(&[1.0, 0.0, 2.0, 0.0], 32, R);
    let back = BoundaryFunction::from_samples(&f.sample(64), 32, R);
    assert!(f.sub(&back).norm() < 1e-12 * f.norm());
    let theta: f64 = 0.7;
    let direct = f.evaluate(theta);
    let via_nodes = f.sample(64)[0];
    assert!((f.evaluate(0.0) - via_nodes).norm() < 1e-12 && direct.is_finite());
}

#[test]
fn disk_eigenvalue_detection() {
    let zero = 2.404825557695773;
    assert!(detect_disk_eigenvalue(zero / R, R, 128).unwrap().flagged);
    let r = detect_disk_eigenvalue(1.0, R, 128).unwrap();
    assert!(!r.flagged && r.min_ratio > 1e-3);
    assert!(matches!(dtn_empty_disk(zero / R, R, 128), Err(ForwardError::NearDiskEigenvalue { order: 0 })));
    assert!(matches!(psi_test_trace([0.0, 0.0], zero / R, R, 128), Err(ForwardError::NearDiskEigenvalue { .. })));
}

#[test]
fn classical_trace_at_origin() {
    let t = psi_test_trace([0.0, 0.0], 1.0, R, 64).unwrap();
    let raw = t.coefficient(0) / (TAU * R).sqrt();
    // −1/(2πR J_0(5)) from mpmath
    assert!((raw - C64::new(0.179231797868891, 0.0)).norm() < 1e-13, "{raw}");
    assert!((1..32).all(|n| t.coefficient(n).norm() < 1e-15 && t.coefficient(-n).norm() < 1e-15));
}

#[test]
fn classical_trace_matches_numerical_disk_green_function() {
    // ψ solves the empty-disk problem with data −Φ(·, z); ∂_ν Ψ = ∂_ν Φ + ∂_ν ψ
    let k = 1.3;
    let z: Point = [0.8, -1.1];
    let s = Scenario::new(R, real(k), Object::Empty).unwrap();
    let sys = ForwardSystem::new(&s, &res(256, 64)).unwrap();
    let q = sys.outer_quadrature();
    let phi = |x: Point| {
        let r = (x[0] - z[0]).hypot(x[1] - z[1]);
        let (h0, h1) = onewave::specfun::hankel1_orders01(real(k * r)).unwrap();
        (C64::new(0.0, 0.25) * h0, h1, r)
    };
    let f: Vec<C64> = q.points.iter().map(|x| -phi(*x).0).collect();
    let dens = sys.solve_densities(&ComplexMatrix::column(&f), None).unwrap();
    let mut dn = sys.neumann_at_nodes(&dens).col(0);
    for (i, x) in q.points.iter().enumerate() {
        let (_, h1, r) = phi(*x);
        let d = [x[0] - z[0], x[1] - z[1]];
        dn[i] += -C64::new(0.0, 0.25) * k * h1 * (d[0] * q.normals[i][0] + d[1] * q.normals[i][1]) / r;
    }
    let numeric = BoundaryFunction::from_samples(&dn, 64, R);
    let closed = psi_test_trace(z, k, R, 64).unwrap();
    assert!(numeric.sub(&closed).norm() < 1e-8 * closed.norm(), "{:e}", numeric.sub(&closed).norm());
}

#[test]
fn classical_trace_pairing_reproduces_interior_solution() {
    // u₀(z) = −∫ f ∂_νΨ(·,z) ds = −Σ f̂_n ĥ_{−n}
    let k = 1.0;
    let f = BoundaryFunction::from_knot_values(&[1.0, 0.0, 2.0, 0.0], 128, R);
    for z in [[0.3, 0.4], [-2.0, 1.0], [3.5, -2.5]] {
        let h = psi_test_trace(z, k, R, 128).unwrap();
        let pairing: C64 = (-63..64).map(|n: i64| f.coefficient(n) * h.coefficient(-n)).sum::<C64>() * -1.0;
        let rz = (z[0] as f64).hypot(z[1]);
        let th = (z[1] as f64).atan2(z[0]);
        let series: C64 = (-63..64)
            .map(|n: i64| {
                let a = n.unsigned_abs() as usize;
                let ratio = bessel_jy(a, k * rz).unwrap().j / bessel_jy(a, k * R).unwrap().j;
                f.coefficient(n) / (TAU * R).sqrt() * ratio * C64::from_polar(1.0, n as f64 * th)
            })
            .sum();
        assert!((pairing - series).norm() < 1e-9, "{pairing} vs {series}");
    }
}

#[test]
fn tilde_trace_matches_concentric_annulus_series() {
    let (k, b) = (1.0, 0.5);
    let t = TestTraces::new(TraceKind::Tilde { center: [0.0, 0.0], radius: b }, k, R, 64, &res(256, 64)).unwrap();
    let z: Point = [1.2, 0.9];
    let rz = z[0].hypot(z[1]);
    let th = z[1].atan2(z[0]);
    let tr = t.trace(z).unwrap();
    for n in -20i64..20 {
        let a = n.unsigned_abs() as usize;
        let (pz, pb, pr) = (bessel_jy(a, k * rz).unwrap(), bessel_jy(a, k * b).unwrap(), bessel_jy(a, k * R).unwrap());
        let ratio = (pz.j * pb.y - pz.y * pb.j) / (pr.j * pb.y - pr.y * pb.j);
        let expected = C64::from_polar(-ratio / (TAU * R).sqrt(), -(n as f64) * th);
        assert!((tr.coefficient(n) - expected).norm() < 1e-7, "n={n}: {} vs {expected}", tr.coefficient(n));
    }
}

#[test]
fn tilde_prime_trace_reduces_to_classical_without_contrast() {
    let k = 1.0;
    let kind = TraceKind::TildePrime { center: [0.4, 0.1], radius: 0.25, index: 1.0 + 1e-9 };
    let t = TestTraces::new(kind, k, R, 64, &res(256, 64)).unwrap();
    for z in [[1.0, 1.0], [-2.0, -0.5]] {
        let a = t.trace(z).unwrap();
        let b = psi_test_trace(z, k, R, 64).unwrap();
        assert!(a.sub(&b).norm() < 1e-6 * b.norm());
    }
}

fn pairs() -> Vec<(Point, Point)> {
    vec![
        ([0.5, 1.5], [-1.0, -2.0]),
        ([2.5, -0.5], [0.0, 3.0]),
        ([-3.0, 0.5], [1.5, 1.5]),
    ]
}

#[test]
fn green_functions_are_real_and_symmetric() {
    let k = 2.0;
    let kinds = [
        TraceKind::Classical,
        TraceKind::Tilde { center: [0.5, -0.3], radius: 0.25 },
        TraceKind::TildePrime { center: [0.5, -0.3], radius: 0.25, index: 2.0 },
    ];
    for kind in kinds {
        let t = TestTraces::new(kind.clone(), k, R, 128, &res(256, 64)).unwrap();
        for (x, y) in pairs() {
            let a = t.green(x, y).unwrap();
            let b = t.green(y, x).unwrap();
            assert!(a.im.abs() < 1e-7 && (a - b).norm() < 1e-7, "{kind:?}: {a} {b}");
        }
    }
}

#[test]
fn classical_green_series_matches_boundary_integral() {
    // Ψ(x, y) = Φ(x, y) + ψ(x, y), with ψ(·, y) solving the empty-disk problem for −Φ(·, y)
    let k = 1.7;
    let t = TestTraces::new(TraceKind::Classical, k, R, 128, &res(256, 64)).unwrap();
    let s = Scenario::new(R, real(k), Object::Empty).unwrap();
    let sys = ForwardSystem::new(&s, &res(256, 64)).unwrap();
    let q = sys.outer_quadrature();
    let phi = |x: Point, y: Point| {
        let r = (x[0] - y[0]).hypot(x[1] - y[1]);
        C64::new(0.0, 0.25) * onewave::specfun::hankel1_orders01(real(k * r)).unwrap().0
    };
    for (x, y) in pairs() {
        let data: Vec<C64> = q.points.iter().map(|p| -phi(*p, y)).collect();
        let dens = sys.solve_densities(&ComplexMatrix::column(&data), None).unwrap();
        let numeric = sys.field(&dens.col(0), &[x]).unwrap()[0] + phi(x, y);
        let series = t.green(x, y).unwrap();
        assert!((numeric - series).norm() < 1e-9, "{numeric} {series}");
    }
}

#[test]
fn hat_reference_differs_from_empty_disk() {
    let kappa = 2.0;
    let f = BoundaryFunction::from_knot_values(&[1.0, 0.0, 2.0, 0.0], 64, R);
    let empty = u0_reference_trace(&ReferenceKind::EmptyDisk { kappa }, &f, &res(256, 64)).unwrap();
    let hat = u0_reference_trace(
        &ReferenceKind::ImpedanceHat { kappa, curve: Curve::circle([-0.5, 0.0], 0.25).unwrap(), eta: C64::new(0.0, -kappa) },
        &f,
        &res(256, 64),
    )
    .unwrap();
    let d = hat.sub(&empty).norm();
    assert!(d > 1e-6 * empty.norm() && d < 0.5 * empty.norm(), "{d:e}");
}

#[test]
fn synthesis_of_empty_disk_and_sigma_linearity() {
    let k = 2.0;
    let f = BoundaryFunction::from_knot_values(&[1.0, 0.0, 2.0, 0.0], 32, R);
    let s = Scenario::new(R, real(k), Object::Empty).unwrap();
    let d1 = synthesize_cauchy_data(&s, 1.0, &f, &res(128, 64), 2).unwrap();
    let a0 = dtn_empty_disk(k, R, 32).unwrap().apply(&f);
    assert!(d1.g.sub(&a0).norm() < 1e-8 * a0.norm());
    let d2 = synthesize_cauchy_data(&s, 2.0, &f, &res(128, 64), 2).unwrap();
    assert!(d2.g.sub(&d1.g.scale(real(2.0))).norm() <= 1e-14 * d2.g.norm());
}

#[test]
fn scenario_validation() {
    let big = Curve::circle([0.0, 0.0], 4.9995).unwrap();
    assert!(Scenario::new(R, real(1.0), Object::Dirichlet { curve: big }).is_err());
    let kite = Curve::kite([0.0, 0.0], 1.0).unwrap();
    assert!(Scenario::new(R, real(1.0), Object::Medium { curve: kite, index: real(4.0) }).is_err());
    assert!(Scenario::new(R, C64::new(1.0, -0.1), Object::Empty).is_err());
}

#[test]
fn file_formats_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let f = BoundaryFunction::from_knot_values(&[1.0, 0.0, 2.0, 0.0], 16, R);
    let data = CauchyData::new(
        f.clone(),
        f.scale(C64::new(0.5, -1.5)),
        CauchyMeta { scenario_hash: "abc".into(), refinement: 2, description: String::new() },
    )
    .unwrap();
    let p = dir.path().join("d.json");
    write_cauchy_json(&data, &p).unwrap();
    assert_eq!(read_cauchy_json(&p).unwrap(), data);
    let m = dtn_empty_disk(1.0, R, 16).unwrap();
    let q = dir.path().join("m.bin");
    write_dtn_binary(&m, &q).unwrap();
    let back = read_dtn_binary(&q).unwrap();
    assert_eq!(back.entries, m.entries);
    assert_eq!(std::fs::read(&q).unwrap().len(), 8 * (8 + 2 * 16 * 16));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn trace_rotation_covariance(r in 0.0f64..4.5, t in 0.0f64..TAU, alpha in 0.0f64..TAU) {
        let k = 1.0;
        let a = psi_test_trace([r * t.cos(), r * t.sin()], k, R, 32).unwrap();
        let b = psi_test_trace([r * (t + alpha).cos(), r * (t + alpha).sin()], k, R, 32).unwrap();
        for n in -16i64..16 {
            let rotated = a.coefficient(n) * C64::from_polar(1.0, -(n as f64) * alpha);
            prop_assert!((b.coefficient(n) - rotated).norm() < 1e-12);
        }
    }

    #[test]
    fn parseval_inner_product(values in proptest::collection::vec(-2.0f64..2.0, 2..9)) {
        let f = BoundaryFunction::from_knot_values(&values, 64, R);
        // band-limited L² norm by fine trapezoidal sampling
        let m = 512;
        let samples = f.sample(m);
        let l2: f64 = samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * TAU * R / m as f64;
        prop_assert!((l2 - f.inner(&f).re).abs() < 1e-10 * (1.0 + l2));
    }

    #[test]
    fn eigenvalue_flag_persists_with_more_modes(k in 0.2f64..3.0) {
        let small = detect_disk_eigenvalue(k, R, 16).unwrap();
        let large = detect_disk_eigenvalue(k, R, 128).unwrap();
        prop_assert!(!small.flagged || large.flagged);
        prop_assert!(large.min_ratio <= small.min_ratio + 1e-12);
    }
}

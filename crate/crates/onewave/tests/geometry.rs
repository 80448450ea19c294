use onewave::geometry::{
    contains_point, graded_parameter_derivatives, graded_parameter_map, sample_curve, Curve, Location,
};
use proptest::prelude::*;
use std::f64::consts::{PI, TAU};

fn paper_polygon() -> Curve {
    Curve::polygon(vec![[0.25, -0.75], [1.5, -0.5], [1.5, 0.5], [0.5, 0.5]]).unwrap()
}

#[test]
fn circle_weights_sum_to_circumference() {
    let q = sample_curve(&Curve::circle([0.0, 0.0], 5.0).unwrap(), 256, None).unwrap();
    assert!((q.perimeter() - 10.0 * PI).abs() < 1e-10);
}

#[test]
fn polygon_weights_sum_to_side_lengths() {
    let exact = 2.0 * 1.625f64.sqrt() + 2.0;
    let curve = paper_polygon();
    assert!((curve.exact_perimeter().unwrap() - exact).abs() < 1e-14);
    // the midpoint rule on a p = 4 graded panel is fourth order: 1.6e-8 at 512
    let q = sample_curve(&curve, 1024, Some(4.0)).unwrap();
    assert!((q.perimeter() - exact).abs() < 1e-8, "{}", q.perimeter() - exact);
}

#[test]
fn polygon_nodes_avoid_corners() {
    let curve = paper_polygon();
    let q = sample_curve(&curve, 128, None).unwrap();
    if let Curve::Polygon { vertices } = &curve {
        for p in &q.points {
            for v in vertices {
                assert!((p[0] - v[0]).hypot(p[1] - v[1]) > 0.0);
            }
        }
    }
    assert!(q.weights.iter().all(|w| *w > 0.0));
}

#[test]
fn kite_is_closed() {
    let kite = Curve::kite([0.0, 0.0], 1.0).unwrap();
    let a = kite.point_at(0.0);
    let b = kite.point_at(TAU);
    assert!((a[0] - b[0]).abs() < 1e-15 && (a[1] - b[1]).abs() < 1e-15);
    assert_eq!(sample_curve(&kite, 128, None).unwrap().len(), 128);
}

#[test]
fn graded_map_derivative_vanishes_at_the_ends() {
    // one-sided difference quotient of w over a step h
    let h = 1e-3;
    let w = graded_parameter_map(h, 4.0).unwrap();
    let slope = w / h;
    assert!(slope <= 10.0 * h.powi(3), "slope {slope}");
    let (_, w1, _) = graded_parameter_derivatives(h, 4.0).unwrap();
    assert!(w1 <= 10.0 * h.powi(3));
}

#[test]
fn analytic_graded_derivatives_match_differences() {
    for &p in &[2.0, 4.0, 7.5] {
        for i in 1..40 {
            let s = TAU * i as f64 / 40.0;
            let e = 1e-5;
            let (_, w1, w2) = graded_parameter_derivatives(s, p).unwrap();
            let a = graded_parameter_derivatives(s + e, p).unwrap();
            let b = graded_parameter_derivatives(s - e, p).unwrap();
            assert!((w1 - (a.0 - b.0) / (2.0 * e)).abs() < 1e-7 * (1.0 + w1.abs()), "p={p} s={s}");
            assert!((w2 - (a.1 - b.1) / (2.0 * e)).abs() < 1e-6 * (1.0 + w2.abs()), "p={p} s={s}");
        }
    }
}

#[test]
fn polygon_location_examples() {
    let poly = paper_polygon();
    assert_eq!(contains_point(&poly, [1.0, 0.0]), Location::Inside);
    assert_eq!(contains_point(&poly, [0.0, 0.0]), Location::Outside);
    assert_eq!(contains_point(&poly, [1.5, 0.0]), Location::Boundary);
    let c = Curve::circle([0.0, 0.0], 4.0).unwrap();
    assert_eq!(contains_point(&c, [0.0, 0.0]), Location::Inside);
    assert_eq!(contains_point(&c, [4.0, 0.0]), Location::Boundary);
}

#[test]
fn smooth_perimeter_converges_at_high_order() {
    // reference from a much finer rule; the trapezoidal rule is spectral here
    for curve in [Curve::kite([0.0, 0.0], 1.0).unwrap(), Curve::peanut([0.0, 0.0], 1.5).unwrap()] {
        let reference = sample_curve(&curve, 4096, None).unwrap().perimeter();
        let e32 = (sample_curve(&curve, 32, None).unwrap().perimeter() - reference).abs();
        let e64 = (sample_curve(&curve, 64, None).unwrap().perimeter() - reference).abs();
        assert!(e64 < e32 / 16.0 || e64 < 1e-13, "{e32:e} {e64:e}");
    }
    // graded polygon: algebraic, but still at least fourth order
    let poly = paper_polygon();
    let exact = poly.exact_perimeter().unwrap();
    let e1 = (sample_curve(&poly, 64, None).unwrap().perimeter() - exact).abs();
    let e2 = (sample_curve(&poly, 128, None).unwrap().perimeter() - exact).abs();
    assert!((e1 / e2).log2() >= 3.9, "slope {}", (e1 / e2).log2());
}

#[test]
fn peanut_is_not_convex() {
    let q = sample_curve(&Curve::peanut([0.0, 0.0], 1.5).unwrap(), 256, None).unwrap();
    let concave = (0..q.len()).any(|i| {
        let t = q.tangents[i];
        let a = q.accelerations[i];
        t[0] * a[1] - t[1] * a[0] < 0.0
    });
    assert!(concave);
}

fn convex_curves() -> Vec<Curve> {
    vec![
        Curve::circle([0.3, -0.4], 1.7).unwrap(),
        Curve::kite([0.0, 0.0], 1.0).unwrap(),
        paper_polygon(),
    ]
}

proptest! {
    #[test]
    fn graded_map_is_increasing_and_symmetric(a in 0.0f64..TAU, b in 0.0f64..TAU, p in 2.0f64..10.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-9);
        let wl = graded_parameter_map(lo, p).unwrap();
        let wh = graded_parameter_map(hi, p).unwrap();
        prop_assert!(wl <= wh);
        let mirrored = graded_parameter_map(TAU - a, p).unwrap();
        prop_assert!((mirrored - (TAU - graded_parameter_map(a, p).unwrap())).abs() < 1e-12);
    }

    #[test]
    fn normals_are_unit_and_outward(idx in 0usize..3, half in 8usize..64) {
        let curves = convex_curves();
        let curve = &curves[idx];
        let q = sample_curve(curve, 8 * half, None).unwrap();
        // centroid of the nodes; the kite is convex only in a weak sense, so
        // the check uses the kite center which it is star-shaped about
        let c = curve.center();
        for i in 0..q.len() {
            let n = q.normals[i];
            prop_assert!((n[0].hypot(n[1]) - 1.0).abs() < 1e-12);
            let d = [q.points[i][0] - c[0], q.points[i][1] - c[1]];
            prop_assert!(d[0] * n[0] + d[1] * n[1] > 0.0);
        }
    }

    #[test]
    fn points_far_inside_and_outside_circle(r in 0.0f64..3.9, t in 0.0f64..TAU) {
        let c = Curve::circle([0.0, 0.0], 4.0).unwrap();
        prop_assert_eq!(contains_point(&c, [r * t.cos(), r * t.sin()]), Location::Inside);
        prop_assert_eq!(contains_point(&c, [(r + 4.1) * t.cos(), (r + 4.1) * t.sin()]), Location::Outside);
    }
}

#[test]
fn corner_separations_keep_relative_precision() {
    let square = Curve::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
    let q = sample_curve(&square, 4096, Some(8.0)).unwrap();
    let n = q.len();
    // last node of the last side and first node of the first side flank (0, 0)
    let d = q.separation(n - 1, 0);
    let (a, b) = (q.offsets[n - 1], q.offsets[0]);
    assert!(d[0].hypot(d[1]) > 0.0);
    assert!(((d[0] - (a[0] - b[0])).abs() + (d[1] - (a[1] - b[1])).abs()) <= 1e-15 * d[0].hypot(d[1]));
    for i in 0..n {
        let p = [q.anchors[i][0] + q.offsets[i][0], q.anchors[i][1] + q.offsets[i][1]];
        assert!((p[0] - q.points[i][0]).abs() < 1e-15 && (p[1] - q.points[i][1]).abs() < 1e-15);
    }
    assert!(sample_curve(&square, 36, None).is_err());
}

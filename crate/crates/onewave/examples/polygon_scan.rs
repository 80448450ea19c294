//! Radial family of disks about the origin for the polygon at k = 2, the
//! color of each member, and the hull estimate from the accepted members.
//!
//! cargo run --release --example polygon_scan

use onewave::factorization::{convex_hull_estimate, domain_scan, rgb_map, Grid, ProbeKind, TestDomain, Variant, DEFAULT_CUTOFF};
use onewave::forward::{synthesize_cauchy_data, BoundaryFunction, Object, Resolution, Scenario};
use onewave::geometry::Curve;
use onewave::linalg::C64;

fn main() {
    let r = 5.0;
    let polygon = Curve::polygon(vec![[0.25, -0.75], [1.5, -0.5], [1.5, 0.5], [0.5, 0.5]]).unwrap();
    let s = Scenario::new(r, C64::new(2.0, 0.0), Object::Dirichlet { curve: polygon }).unwrap();
    let f = BoundaryFunction::from_knot_values(&[1.0, 0.0, 2.0, 0.0], 128, r);
    let data = synthesize_cauchy_data(&s, 1.0, &f, &Resolution::default(), 2).unwrap();

    let radii: Vec<f64> = (5..=30).step_by(3).map(|l| l as f64 / 10.0).collect();
    let family: Vec<TestDomain> = radii
        .iter()
        .map(|&rho| TestDomain::new(ProbeKind::Impedance, Curve::circle([0.0, 0.0], rho).unwrap(), Curve::circle([0.0, 0.0], rho / 2.0).unwrap()))
        .collect();
    let scan = domain_scan(&data, &family, 1.0, 4.0, Variant::Classical, &Resolution::default(), DEFAULT_CUTOFF).unwrap();
    let colors = rgb_map(&scan, true).unwrap();
    for ((rho, v), c) in radii.iter().zip(&scan.values).zip(&colors) {
        let [red, green, blue] = c.unwrap();
        println!("radius {rho:.1}: I = {v:.3e}  rgb ({red:.2}, {green:.2}, {blue:.2})");
    }
    let curves: Vec<Curve> = family.iter().map(|d| d.domain.clone()).collect();
    let grid = Grid::square(2.5, 0.1).unwrap();
    let hull = convex_hull_estimate(&curves, &scan, 0.5, &grid).unwrap();
    let area = hull.iter().filter(|&&m| m).count() as f64 * 0.01;
    println!("hull estimate: area {area:.2}; the farthest corner lies at radius 1.58");
}

//! Recovering (sigma, k) from one Cauchy pair on a coarse (tau, kappa) grid.
//!
//! cargo run --release --example coefficients

use onewave::factorization::{coefficient_scan, ProbeKind, TestDomain, Variant, DEFAULT_CUTOFF};
use onewave::forward::{synthesize_cauchy_data, BoundaryFunction, Object, Resolution, Scenario};
use onewave::geometry::Curve;
use onewave::linalg::C64;

fn main() {
    let r = 5.0;
    let polygon = Curve::polygon(vec![[0.25, -0.75], [1.5, -0.5], [1.5, 0.5], [0.5, 0.5]]).unwrap();
    let s = Scenario::new(r, C64::new(2.0, 0.0), Object::Dirichlet { curve: polygon }).unwrap();
    let f = BoundaryFunction::from_knot_values(&[1.0, 0.0, 2.0, 0.0], 128, r);
    let data = synthesize_cauchy_data(&s, 1.0, &f, &Resolution::default(), 2).unwrap();

    let domain = TestDomain::new(ProbeKind::Impedance, Curve::circle([0.0, 0.0], 4.0).unwrap(), Curve::circle([-0.5, 0.0], 0.25).unwrap());
    let taus: Vec<f64> = (0..5).map(|j| 0.8 + 0.1 * j as f64).collect();
    let kappas: Vec<f64> = (0..5).map(|l| 1.8 + 0.1 * l as f64).collect();
    let scan = coefficient_scan(&data, &domain, &taus, &kappas, Variant::Tilde, &Resolution::default(), DEFAULT_CUTOFF).unwrap();
    print!("kappa\\tau");
    for t in &taus {
        print!("{t:>10.2}");
    }
    println!();
    for (l, kappa) in kappas.iter().enumerate() {
        print!("{kappa:>9.2}");
        for j in 0..taus.len() {
            print!("{:>10.2e}", scan.values[l * taus.len() + j]);
        }
        println!();
    }
    let a = scan.argmax.unwrap();
    println!("argmax: tau = {:.2}, kappa = {:.2}", taus[a % taus.len()], kappas[a / taus.len()]);
}

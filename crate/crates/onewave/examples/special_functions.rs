//! Bessel and Hankel values with their Wronskian checks.
//!
//! cargo run --release --example special_functions

use onewave::linalg::C64;
use onewave::specfun::{bessel_jy_upto, hankel1_orders01};

fn main() {
    let x = 5.0;
    let table = bessel_jy_upto(8, x).unwrap();
    println!("  n            J_n(5)              Y_n(5)    Wronskian residual");
    for (n, p) in table.iter().enumerate() {
        println!("{n:>3} {:>19.15} {:>19.15} {:>12.1e}", p.j, p.y, p.wronskian_residual(x));
    }
    for z in [C64::new(1.0, 0.0), C64::new(3.0, 2.0), C64::new(50.0, 0.0)] {
        let (h0, h1) = hankel1_orders01(z).unwrap();
        println!("H0({z}) = {h0:.15}, H1({z}) = {h1:.15}");
    }
}

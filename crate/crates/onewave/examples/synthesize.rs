//! One Cauchy pair for the polygon with sigma = 1, q = 4, written as JSON.
//!
//! cargo run --release --example synthesize -- [OUT.json]

use onewave::forward::{synthesize_cauchy_data, write_cauchy_json, BoundaryFunction, Object, Resolution, Scenario};
use onewave::geometry::Curve;
use onewave::linalg::C64;

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "polygon-k2.json".into());
    let polygon = Curve::polygon(vec![[0.25, -0.75], [1.5, -0.5], [1.5, 0.5], [0.5, 0.5]]).unwrap();
    let s = Scenario::new(5.0, C64::new(2.0, 0.0), Object::Dirichlet { curve: polygon }).unwrap();
    let f = BoundaryFunction::from_knot_values(&[1.0, 0.0, 2.0, 0.0], 128, 5.0);
    let data = synthesize_cauchy_data(&s, 1.0, &f, &Resolution::default(), 2).unwrap();
    for n in [-2i64, -1, 0, 1, 2] {
        println!("n={n:>2}: f_n = {:.6}, g_n = {:.6}", data.f.coefficient(n), data.g.coefficient(n));
    }
    write_cauchy_json(&data, std::path::Path::new(&out)).unwrap();
    println!("wrote {out} (scenario {})", data.meta.scenario_hash);
}

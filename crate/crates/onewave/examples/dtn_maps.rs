//! Dirichlet-to-Neumann maps on the measurement circle: the empty disk by
//! the boundary integral solver against the closed form, and the convex
//! polygon with its reciprocity defect.
//!
//! cargo run --release --example dtn_maps

use onewave::forward::{assemble_dtn, dtn_empty_disk, DtnMatrix, Object, Resolution, Scenario};
use onewave::geometry::Curve;
use onewave::linalg::C64;
use std::time::Instant;

fn main() {
    let (r, modes) = (5.0, 128);
    for k in [1.0, 2.0, 8.0] {
        let t = Instant::now();
        let s = Scenario::new(r, C64::new(k, 0.0), Object::Empty).unwrap();
        let bie = assemble_dtn(&s, modes, &Resolution::default()).unwrap();
        let exact = dtn_empty_disk(k, r, modes).unwrap();
        let err = bie.entries.sub(&exact.entries).max_abs();
        println!("empty disk k={k}: max entry error {err:.2e} ({:.1}s)", t.elapsed().as_secs_f64());
    }

    let polygon = Curve::polygon(vec![[0.25, -0.75], [1.5, -0.5], [1.5, 0.5], [0.5, 0.5]]).unwrap();
    let s = Scenario::new(r, C64::new(2.0, 0.0), Object::Dirichlet { curve: polygon }).unwrap();
    let t = Instant::now();
    let a = assemble_dtn(&s, modes, &Resolution::default().refined(2)).unwrap();
    let diff = a.entries.sub(&dtn_empty_disk(2.0, r, modes).unwrap().entries);
    let scale = diff.max_abs();
    println!(
        "polygon k=2: |A - A0|_max = {scale:.3e}, relative reciprocity defect {:.2e} ({:.1}s)",
        DtnMatrix::reciprocity_defect(&diff) / scale,
        t.elapsed().as_secs_f64()
    );
}

//! Test traces of the three Green functions that vanish on the circle, and
//! their symmetry.
//!
//! cargo run --release --example green_traces

use onewave::forward::{Resolution, TestTraces, TraceKind};

fn main() {
    let (k, r) = (2.0, 5.0);
    let kinds = [
        TraceKind::Classical,
        TraceKind::Tilde { center: [0.5, -0.3], radius: 0.25 },
        TraceKind::TildePrime { center: [0.5, -0.3], radius: 0.25, index: 2.0 },
    ];
    let (x, y) = ([1.0, 2.0], [-2.5, 0.5]);
    for kind in kinds {
        let t = TestTraces::new(kind.clone(), k, r, 128, &Resolution::default()).unwrap();
        let (a, b) = (t.green(x, y).unwrap(), t.green(y, x).unwrap());
        let trace = t.trace([0.0, 0.0]).unwrap();
        println!("{kind:?}\n  G(x,y) = {a:.10}, G(y,x) = {b:.10}, |trace at 0| = {:.6}", trace.norm());
    }
}

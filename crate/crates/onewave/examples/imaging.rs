//! Indicator image of a sound-soft kite at k = 1, printed as a coarse
//! character map (the tilde variant with an impedance disk inside).
//!
//! cargo run --release --example imaging

use onewave::factorization::{indicator_field, Grid, DEFAULT_CUTOFF};
use onewave::forward::{assemble_dtn, Object, Resolution, Scenario, TestTraces, TraceKind};
use onewave::geometry::Curve;
use onewave::linalg::C64;

fn main() {
    let (k, r, modes) = (1.0, 5.0, 128);
    let kite = Curve::kite([0.0, 0.0], 1.0).unwrap();
    let s = Scenario::new(r, C64::new(k, 0.0), Object::Dirichlet { curve: kite }).unwrap();
    let a = assemble_dtn(&s, modes, &Resolution::default().refined(2)).unwrap();
    let inner = Object::Impedance { curve: Curve::circle([0.0, 0.0], 0.25).unwrap(), eta: C64::new(0.0, -k) };
    let at = assemble_dtn(&Scenario::new(r, C64::new(k, 0.0), inner).unwrap(), modes, &Resolution::default()).unwrap();
    let traces = TestTraces::new(TraceKind::Tilde { center: [0.0, 0.0], radius: 0.125 }, k, r, modes, &Resolution::default()).unwrap();
    let grid = Grid::square(3.0, 0.25).unwrap();
    let image = indicator_field(&a.entries.sub(&at.entries), &traces, &grid, DEFAULT_CUTOFF).unwrap();
    let (lo, hi) = image.extrema.unwrap();
    let shades = [' ', '.', ':', '+', '#'];
    for row in (0..grid.ny).rev() {
        let line: String = (0..grid.nx)
            .map(|c| {
                let i = row * grid.nx + c;
                if !image.mask[i] {
                    return 'o';
                }
                let t = (image.values[i].ln() - lo.ln()) / (hi.ln() - lo.ln());
                shades[((t * 4.0).round() as usize).min(4)]
            })
            .collect();
        println!("{line}");
    }
    println!("ln-scaled; 'o' marks points masked around the artificial disk");
}

//! PPM rasters, SVG overlays and CSV tables.

use crate::geometry::{Curve, Point};
use std::fmt::Write as _;

/// Masked or missing cells.
pub const NEUTRAL_GRAY: [f64; 3] = [0.5, 0.5, 0.5];

/// A regular lattice of cell centres, row-major with `y` increasing by row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Raster {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub dx: f64,
    pub y0: f64,
    pub dy: f64,
}

impl Raster {
    pub fn from_axes(xs: &[f64], ys: &[f64]) -> Self {
        let step = |v: &[f64]| if v.len() > 1 { v[1] - v[0] } else { 1.0 };
        Raster { nx: xs.len(), ny: ys.len(), x0: xs[0], dx: step(xs), y0: ys[0], dy: step(ys) }
    }

    fn extent(&self) -> (f64, f64, f64, f64) {
        let x = self.x0 - 0.5 * self.dx;
        let y = self.y0 - 0.5 * self.dy;
        (x, y, self.dx * self.nx as f64, self.dy * self.ny as f64)
    }
}

fn byte(c: f64) -> u8 {
    (c.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn hex(c: [f64; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", byte(c[0]), byte(c[1]), byte(c[2]))
}

/// Binary PPM with `cell × cell` pixels per entry and the last row on top.
pub fn ppm(colors: &[Option<[f64; 3]>], nx: usize, ny: usize, cell: usize) -> Vec<u8> {
    assert_eq!(colors.len(), nx * ny);
    let (w, h) = (nx * cell, ny * cell);
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.reserve(3 * w * h);
    for py in 0..h {
        let row = ny - 1 - py / cell;
        for px in 0..w {
            let c = colors[row * nx + px / cell].unwrap_or(NEUTRAL_GRAY);
            out.extend(c.map(byte));
        }
    }
    out
}

/// Accepted cells black, the rest white.
pub fn mask_ppm(mask: &[bool], nx: usize, ny: usize, cell: usize) -> Vec<u8> {
    let colors: Vec<Option<[f64; 3]>> =
        mask.iter().map(|&m| Some(if m { [0.0; 3] } else { [1.0; 3] })).collect();
    ppm(&colors, nx, ny, cell)
}

fn polyline(curve: &Curve, samples: usize) -> String {
    let mut s = String::new();
    for i in 0..samples {
        let p = curve.point_at(2.0 * std::f64::consts::PI * i as f64 / samples as f64);
        let _ = write!(s, "{}{:.4},{:.4}", if i == 0 { "" } else { " " }, p[0], p[1]);
    }
    s
}

fn svg_open(x: f64, y: f64, w: f64, h: f64) -> String {
    // world coordinates, y flipped inside the group
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.4} {:.4} {:.4} {:.4}" width="600" height="{:.0}">"#,
        x,
        -(y + h),
        w,
        h,
        600.0 * h / w
    );
    let _ = writeln!(s, r#"<g transform="scale(1,-1)">"#);
    s
}

fn svg_close(mut s: String) -> String {
    s.push_str("</g>\n</svg>\n");
    s
}

/// Outline drawn over a plot.
#[derive(Debug, Clone)]
pub enum Overlay {
    Curve { curve: Curve, color: &'static str },
    Dot { at: Point, radius: f64 },
}

fn overlays(s: &mut String, items: &[Overlay], stroke: f64) {
    for o in items {
        match o {
            Overlay::Curve { curve, color } => {
                let _ = writeln!(
                    s,
                    r#"<polygon points="{}" fill="none" stroke="{color}" stroke-width="{stroke:.4}"/>"#,
                    polyline(curve, 400)
                );
            }
            Overlay::Dot { at, radius } => {
                let _ = writeln!(s, r#"<circle cx="{:.4}" cy="{:.4}" r="{radius:.4}" fill="black"/>"#, at[0], at[1]);
            }
        }
    }
}

/// One rectangle per cell plus overlays.
pub fn heatmap_svg(colors: &[Option<[f64; 3]>], raster: &Raster, items: &[Overlay]) -> String {
    let (x, y, w, h) = raster.extent();
    let mut s = svg_open(x, y, w, h);
    for r in 0..raster.ny {
        for c in 0..raster.nx {
            let color = colors[r * raster.nx + c].unwrap_or(NEUTRAL_GRAY);
            let _ = writeln!(
                s,
                r#"<rect x="{:.4}" y="{:.4}" width="{:.4}" height="{:.4}" fill="{}"/>"#,
                x + c as f64 * raster.dx,
                y + r as f64 * raster.dy,
                raster.dx,
                raster.dy,
                hex(color)
            );
        }
    }
    overlays(&mut s, items, 0.01 * w.max(h));
    svg_close(s)
}

/// Family members as circles in their colors, inside the window `[-half, half]²`.
pub fn circles_svg(disks: &[(Point, f64)], colors: &[Option<[f64; 3]>], half: f64, items: &[Overlay]) -> String {
    let mut s = svg_open(-half, -half, 2.0 * half, 2.0 * half);
    let _ = writeln!(s, r#"<rect x="{:.4}" y="{:.4}" width="{:.4}" height="{:.4}" fill="white"/>"#, -half, -half, 2.0 * half, 2.0 * half);
    for ((c, r), color) in disks.iter().zip(colors) {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.4}" cy="{:.4}" r="{r:.4}" fill="none" stroke="{}" stroke-width="{:.4}"/>"#,
            c[0],
            c[1],
            hex(color.unwrap_or(NEUTRAL_GRAY)),
            0.004 * half
        );
    }
    overlays(&mut s, items, 0.006 * half);
    svg_close(s)
}

/// CSV bytes from a header and rows of already formatted fields.
pub fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Shortest round-trip representation.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_puts_the_last_row_on_top() {
        let colors = vec![Some([1.0, 0.0, 0.0]), None];
        let img = ppm(&colors, 1, 2, 1);
        let header = b"P6\n1 2\n255\n";
        assert_eq!(&img[..header.len()], header);
        assert_eq!(&img[header.len()..], &[128, 128, 128, 255, 0, 0]);
    }

    #[test]
    fn csv_quotes_only_when_needed() {
        let b = csv_bytes(&["a", "b"], [vec!["1e0".into(), "x,y".into()]]);
        assert_eq!(String::from_utf8(b).unwrap(), "a,b\n1e0,\"x,y\"\n");
    }
}

//! Cauchy data as JSON and DtN matrices as little-endian binary.

use super::boundary::BoundaryFunction;
use super::system::DtnMatrix;
use super::{CauchyData, CauchyMeta, ForwardError, Result};
use crate::linalg::{ComplexMatrix, C64};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// First header value of a DtN matrix file.
pub const DTN_MAGIC: f64 = 20_251_015.0;
const DTN_VERSION: f64 = 1.0;

#[derive(Serialize, Deserialize)]
struct CauchyFile {
    radius: f64,
    n_modes: usize,
    f_re: Vec<f64>,
    f_im: Vec<f64>,
    g_re: Vec<f64>,
    g_im: Vec<f64>,
    meta: CauchyMeta,
}

fn io(e: std::io::Error) -> ForwardError {
    ForwardError::Io(e.to_string())
}

/// Pretty-printed JSON; identical data gives identical bytes.
pub fn write_cauchy_json(data: &CauchyData, path: &Path) -> Result<()> {
    let file = CauchyFile {
        radius: data.radius(),
        n_modes: data.modes(),
        f_re: data.f.coefficients.iter().map(|c| c.re).collect(),
        f_im: data.f.coefficients.iter().map(|c| c.im).collect(),
        g_re: data.g.coefficients.iter().map(|c| c.re).collect(),
        g_im: data.g.coefficients.iter().map(|c| c.im).collect(),
        meta: data.meta.clone(),
    };
    let text = serde_json::to_string_pretty(&file).map_err(|e| ForwardError::Format(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(io)
}

pub fn read_cauchy_json(path: &Path) -> Result<CauchyData> {
    let text = std::fs::read_to_string(path).map_err(io)?;
    let file: CauchyFile = serde_json::from_str(&text).map_err(|e| ForwardError::Format(e.to_string()))?;
    let n = file.n_modes;
    if [file.f_re.len(), file.f_im.len(), file.g_re.len(), file.g_im.len()].iter().any(|&l| l != n) {
        return Err(ForwardError::Format(format!("coefficient arrays must all have n_modes = {n} entries")));
    }
    if !(file.radius > 0.0) || n == 0 || n % 2 == 1 {
        return Err(ForwardError::Format("radius must be positive and n_modes even".into()));
    }
    let join = |re: &[f64], im: &[f64]| re.iter().zip(im).map(|(a, b)| C64::new(*a, *b)).collect();
    CauchyData::new(
        BoundaryFunction::new(join(&file.f_re, &file.f_im), file.radius),
        BoundaryFunction::new(join(&file.g_re, &file.g_im), file.radius),
        file.meta,
    )
}

/// Header `(magic, version, rows, cols, R, Re k, Im k, 0)` then the entries
/// row by row as interleaved `(re, im)` pairs.
pub fn write_dtn_binary(m: &DtnMatrix, path: &Path) -> Result<()> {
    let e = &m.entries;
    let header = [
        DTN_MAGIC,
        DTN_VERSION,
        e.rows() as f64,
        e.cols() as f64,
        m.radius,
        m.wavenumber.re,
        m.wavenumber.im,
        0.0,
    ];
    let mut bytes = Vec::with_capacity(8 * (8 + 2 * e.as_slice().len()));
    for v in header.iter().copied().chain(e.as_slice().iter().flat_map(|c| [c.re, c.im])) {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, bytes).map_err(io)
}

pub fn read_dtn_binary(path: &Path) -> Result<DtnMatrix> {
    let bytes = std::fs::read(path).map_err(io)?;
    if bytes.len() % 8 != 0 || bytes.len() < 64 {
        return Err(ForwardError::Format("truncated matrix file".into()));
    }
    let values: Vec<f64> = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    if values[0] != DTN_MAGIC || values[1] != DTN_VERSION {
        return Err(ForwardError::Format("not a DtN matrix file".into()));
    }
    let (rows, cols) = (values[2] as usize, values[3] as usize);
    if values.len() != 8 + 2 * rows * cols {
        return Err(ForwardError::Format(format!("expected {rows}x{cols} entries")));
    }
    let data = values[8..].chunks_exact(2).map(|p| C64::new(p[0], p[1])).collect();
    Ok(DtnMatrix {
        entries: ComplexMatrix::from_row_major(rows, cols, data)?,
        radius: values[4],
        wavenumber: C64::new(values[5], values[6]),
        scenario_hash: String::new(),
    })
}

//! Dense complex linear algebra: row-major matrices, LU with partial
//! pivoting, a 1-norm condition estimate and a cyclic Jacobi solver for
//! Hermitian eigenproblems.

use num_complex::Complex64;
use rayon::prelude::*;
use std::ops::{Index, IndexMut};

pub type C64 = Complex64;

/// Relative pivot threshold used by [`lu_factor`].
pub const PIVOT_TOLERANCE: f64 = 1e-13;

/// Tolerance on `‖A − A*‖_max / ‖A‖_max` accepted by [`hermitian_eig`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

const PAR_THRESHOLD: usize = 96;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is singular to working precision at pivot {pivot}")]
    SingularMatrix { pivot: usize },
    #[error("matrix is not Hermitian (relative defect {defect:.3e})")]
    NotHermitian { defect: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,
}

/// Dense complex matrix stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64 + Sync) -> Self {
        let mut data = vec![C64::new(0.0, 0.0); rows * cols];
        if rows * cols >= PAR_THRESHOLD * PAR_THRESHOLD {
            data.par_chunks_mut(cols.max(1)).enumerate().for_each(|(i, row)| {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = f(i, j);
                }
            });
        } else {
            for i in 0..rows {
                for j in 0..cols {
                    data[i * cols + j] = f(i, j);
                }
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Column matrix from a vector.
    pub fn column(v: &[C64]) -> Self {
        ComplexMatrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        assert_eq!(v.len(), self.rows);
        for (i, x) in v.iter().enumerate() {
            self.data[i * self.cols + j] = *x;
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let mut sums = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (j, s) in sums.iter_mut().enumerate() {
                *s += self.data[i * self.cols + j].norm();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn transpose(&self) -> Self {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        ComplexMatrix { rows: self.rows, cols: self.cols, data }
    }

    /// Matrix product, parallel over rows of the result.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let (n, p) = (self.rows, other.cols);
        let mut out = vec![C64::new(0.0, 0.0); n * p];
        let kernel = |i: usize, row: &mut [C64]| {
            let a = self.row(i);
            for (k, aik) in a.iter().enumerate() {
                if aik.re == 0.0 && aik.im == 0.0 {
                    continue;
                }
                let b = other.row(k);
                for (r, bkj) in row.iter_mut().zip(b) {
                    *r += aik * bkj;
                }
            }
        };
        if n * p * self.cols >= 1 << 18 {
            out.par_chunks_mut(p.max(1)).enumerate().for_each(|(i, row)| kernel(i, row));
        } else {
            for (i, row) in out.chunks_mut(p.max(1)).enumerate() {
                kernel(i, row);
            }
        }
        ComplexMatrix { rows: n, cols: p, data: out }
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        let dot = |i: usize| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum::<C64>();
        if self.rows * self.cols >= 1 << 16 {
            (0..self.rows).into_par_iter().map(dot).collect()
        } else {
            (0..self.rows).map(dot).collect()
        }
    }

    /// Copy of the rectangular block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        ComplexMatrix::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            let dst = &mut self.data[(r0 + i) * self.cols + c0..(r0 + i) * self.cols + c0 + b.cols];
            dst.copy_from_slice(b.row(i));
        }
    }

    /// Hermitian defect `‖A − A*‖_max`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    /// `(A + A*)/2`.
    pub fn hermitian_part(&self) -> Self {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// `(A − A*)/(2i)`.
    pub fn skew_hermitian_part(&self) -> Self {
        let minus_half_i = C64::new(0.0, -0.5);
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] - self[(j, i)].conj()) * minus_half_i)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// LU factors `PA = LU` packed in one matrix.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    norm_one: f64,
}

/// Factor a square matrix with partial pivoting.
pub fn lu_factor(a: &ComplexMatrix) -> Result<LuFactors, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::DimensionMismatch(format!("LU of a {}x{} matrix", a.rows, a.cols)));
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = a.rows;
    let tol = PIVOT_TOLERANCE * a.max_abs();
    let norm_one = a.norm_one();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut p = k;
        let mut best = lu[(k, k)].norm();
        for i in k + 1..n {
            let v = lu[(i, k)].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= tol || best == 0.0 {
            return Err(LinalgError::SingularMatrix { pivot: k });
        }
        if p != k {
            perm.swap(p, k);
            for j in 0..n {
                lu.data.swap(k * n + j, p * n + j);
            }
        }
        let (head, tail) = lu.data.split_at_mut((k + 1) * n);
        let pivot_row = &head[k * n..(k + 1) * n];
        let inv = C64::new(1.0, 0.0) / pivot_row[k];
        let update = |row: &mut [C64]| {
            let l = row[k] * inv;
            row[k] = l;
            if l.re != 0.0 || l.im != 0.0 {
                for (r, u) in row[k + 1..].iter_mut().zip(&pivot_row[k + 1..]) {
                    *r -= l * u;
                }
            }
        };
        if (n - k) >= PAR_THRESHOLD {
            tail.par_chunks_mut(n).for_each(update);
        } else {
            tail.chunks_mut(n).for_each(update);
        }
    }
    Ok(LuFactors { lu, perm, norm_one })
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    /// Solve `AX = B` for a block of right-hand sides.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        let n = self.dim();
        if b.rows != n {
            return Err(LinalgError::DimensionMismatch(format!("rhs has {} rows, system has {}", b.rows, n)));
        }
        let r = b.cols;
        let mut x = ComplexMatrix::zeros(n, r);
        for (i, &p) in self.perm.iter().enumerate() {
            x.row_mut(i).copy_from_slice(b.row(p));
        }
        if r == 0 {
            return Ok(x);
        }
        // forward substitution with unit lower factor
        for k in 0..n {
            let (head, tail) = x.data.split_at_mut((k + 1) * r);
            let xk = &head[k * r..];
            let lu = &self.lu;
            let update = |(off, row): (usize, &mut [C64])| {
                let l = lu[(k + 1 + off, k)];
                if l.re != 0.0 || l.im != 0.0 {
                    for (a, b) in row.iter_mut().zip(xk) {
                        *a -= l * b;
                    }
                }
            };
            if (n - k) * r >= 1 << 14 {
                tail.par_chunks_mut(r).enumerate().for_each(update);
            } else {
                tail.chunks_mut(r).enumerate().for_each(update);
            }
        }
        // back substitution
        for k in (0..n).rev() {
            let inv = C64::new(1.0, 0.0) / self.lu[(k, k)];
            let (head, tail) = x.data.split_at_mut(k * r);
            let xk = &mut tail[..r];
            for v in xk.iter_mut() {
                *v *= inv;
            }
            let xk = &*xk;
            let lu = &self.lu;
            let update = |(i, row): (usize, &mut [C64])| {
                let u = lu[(i, k)];
                if u.re != 0.0 || u.im != 0.0 {
                    for (a, b) in row.iter_mut().zip(xk) {
                        *a -= u * b;
                    }
                }
            };
            if k * r >= 1 << 14 {
                head.par_chunks_mut(r).enumerate().for_each(update);
            } else {
                head.chunks_mut(r).enumerate().for_each(update);
            }
        }
        Ok(x)
    }

    pub fn solve_vec(&self, b: &[C64]) -> Result<Vec<C64>, LinalgError> {
        Ok(self.solve(&ComplexMatrix::column(b))?.into_vec())
    }

    /// Solve `A* x = b`.
    pub fn solve_adjoint_vec(&self, b: &[C64]) -> Result<Vec<C64>, LinalgError> {
        let n = self.dim();
        if b.len() != n {
            return Err(LinalgError::DimensionMismatch("adjoint rhs length".into()));
        }
        // A = P^T L U, so A* = U* L* P
        let mut y = b.to_vec();
        for k in 0..n {
            let mut s = y[k];
            for i in 0..k {
                s -= self.lu[(i, k)].conj() * y[i];
            }
            y[k] = s / self.lu[(k, k)].conj();
        }
        for k in (0..n).rev() {
            let mut s = y[k];
            for i in k + 1..n {
                s -= self.lu[(i, k)].conj() * y[i];
            }
            y[k] = s;
        }
        let mut x = vec![C64::new(0.0, 0.0); n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        Ok(x)
    }

    /// Estimate of the 1-norm condition number (Hager–Higham).
    pub fn condition_estimate(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 1.0;
        }
        let mut x = vec![C64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = match self.solve_vec(&x) {
                Ok(y) => y,
                Err(_) => return f64::INFINITY,
            };
            let ny: f64 = y.iter().map(|z| z.norm()).sum();
            if !ny.is_finite() {
                return f64::INFINITY;
            }
            if ny <= est {
                break;
            }
            est = ny;
            let xi: Vec<C64> =
                y.iter().map(|z| if z.norm() > 0.0 { z / z.norm() } else { C64::new(1.0, 0.0) }).collect();
            let z = match self.solve_adjoint_vec(&xi) {
                Ok(z) => z,
                Err(_) => return f64::INFINITY,
            };
            let (jmax, zmax) =
                z.iter().enumerate().fold((0, 0.0), |(bj, bv), (j, v)| if v.norm() > bv { (j, v.norm()) } else { (bj, bv) });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx {
                break;
            }
            x = vec![C64::new(0.0, 0.0); n];
            x[jmax] = C64::new(1.0, 0.0);
        }
        est * self.norm_one
    }
}

/// Solve `AX = B` by LU with partial pivoting.
pub fn lu_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    lu_factor(a)?.solve(b)
}

/// Eigenvalues in descending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigensystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigensystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, n: usize) -> Vec<C64> {
        self.eigenvectors.col(n)
    }

    /// `V diag(λ) V*`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = self.dim();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)].conj()).sum()
        })
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigensystem, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::DimensionMismatch(format!("eigenproblem for a {}x{} matrix", a.rows, a.cols)));
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let scale = a.max_abs();
    let defect = a.hermitian_defect();
    if defect > HERMITIAN_TOLERANCE * scale {
        return Err(LinalgError::NotHermitian { defect: defect / scale.max(f64::MIN_POSITIVE) });
    }
    let n = a.rows;
    let mut m = a.hermitian_part();
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    if scale == 0.0 {
        return Ok(HermitianEigensystem { eigenvalues: vec![0.0; n], eigenvectors: v });
    }
    let total = m.frobenius_norm();
    for _sweep in 0..60 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-16 * total {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let phase = apq / g;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = [[c, s], [-s conj(phase), c conj(phase)]] acting on columns p, q
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = -phase.conj() * s;
                let gqq = phase.conj() * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = akp * gpp + akq * gqp;
                    m[(k, q)] = akp * gpq + akq * gqq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
                    m[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                m[(p, q)] = C64::new(0.0, 0.0);
                m[(q, p)] = C64::new(0.0, 0.0);
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * gpp + vkq * gqp;
                    v[(k, q)] = vkp * gpq + vkq * gqq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigensystem { eigenvalues, eigenvectors })
}

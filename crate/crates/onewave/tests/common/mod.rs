//! Independent oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use nalgebra::DMatrix;
use onewave::forward::{interior_wavenumber, order_of, DtnMatrix, Resolution};
use onewave::geometry::Curve;
use onewave::linalg::{ComplexMatrix, C64};
use onewave::specfun::{bessel_jy, bessel_log_derivative};

pub const R: f64 = 5.0;

pub fn res(boundary: usize, interior: usize) -> Resolution {
    Resolution { boundary, interior, ..Resolution::default() }
}

pub fn real(k: f64) -> C64 {
    C64::new(k, 0.0)
}

pub fn paper_polygon() -> Curve {
    Curve::polygon(vec![[0.25, -0.75], [1.5, -0.5], [1.5, 0.5], [0.5, 0.5]]).unwrap()
}

/// Solves the 2x2 system for `u_n = αJ_n(kr) + βY_n(kr)` with `u_n(R) = 1`
/// and the row `(c_J, c_Y)·(α, β) = 0` at the inner radius; returns the DtN
/// value `k u_n'(R)`.
pub fn annulus_dtn(n: usize, k: f64, inner_row: (f64, f64)) -> f64 {
    let p = bessel_jy(n, k * R).unwrap();
    let (a, b) = inner_row;
    // α J(R) + β Y(R) = 1, α a + β b = 0
    let det = p.j * b - p.y * a;
    let alpha = b / det;
    let beta = -a / det;
    k * (alpha * p.jp + beta * p.yp)
}

/// Sound-soft disk of radius `a` at the centre.
pub fn dirichlet_annulus_dtn(n: usize, k: f64, a: f64) -> C64 {
    let p = bessel_jy(n, k * a).unwrap();
    real(annulus_dtn(n, k, (p.j, p.y)))
}

/// Transmission oracle for a concentric disk of radius `a` and index `n`.
pub fn transmission_dtn(order: usize, k: f64, a: f64, index: C64) -> C64 {
    let k_in = interior_wavenumber(real(k), index);
    let lam = k_in * bessel_log_derivative(order, k_in * a)[order];
    let p = bessel_jy(order, k * a).unwrap();
    let q = bessel_jy(order, k * R).unwrap();
    // k(αJ'+βY')(ka) = λ (αJ+βY)(ka)
    let ca = k * p.jp - lam * p.j;
    let cb = k * p.yp - lam * p.y;
    let det = q.j * cb - q.y * ca;
    (cb / det * q.jp - ca / det * q.yp) * k
}

/// Largest deviation of the diagonal from `expected(|n|)`.
pub fn diag_error(m: &DtnMatrix, expected: impl Fn(usize) -> C64) -> f64 {
    (0..m.modes())
        .map(|i| (m.entries[(i, i)] - expected(order_of(i, m.modes()).unsigned_abs() as usize)).norm())
        .fold(0.0, f64::max)
}

fn to_na(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// |H| = H sign(H), the sign from the scaled Newton iteration
/// X <- (mu X + (mu X)^-1) / 2. Uses only LU inverses; nalgebra's complex
/// Hermitian eigenvectors carry residuals near 1e-12, too loose here.
fn na_abs(h: &DMatrix<C64>) -> DMatrix<C64> {
    let n = h.nrows() as f64;
    let mut x = h.clone();
    for _ in 0..100 {
        let mu = x.clone().determinant().norm().powf(-1.0 / n);
        let y = &x * C64::new(mu, 0.0);
        let inv = y.clone().try_inverse().expect("singular Hermitian part");
        let next = (&y + inv) * C64::new(0.5, 0.0);
        let step = (&next - &x).norm();
        x = next;
        if step <= 1e-15 * x.norm() {
            break;
        }
    }
    let a = h * x;
    (&a + a.adjoint()) * C64::new(0.5, 0.0)
}

/// Spectrum of `|Re F| + |Im F|`, descending, by dense nalgebra algebra
/// (eigenvalues only).
pub fn brute_force_sharp_spectrum(f: &ComplexMatrix) -> Vec<f64> {
    let a = to_na(f);
    let re = (&a + a.adjoint()) * C64::new(0.5, 0.0);
    let im = (&a - a.adjoint()) * C64::new(0.0, -0.5);
    let s = na_abs(&re) + na_abs(&im);
    let mut l: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
    l.sort_by(|a, b| b.total_cmp(a));
    l
}

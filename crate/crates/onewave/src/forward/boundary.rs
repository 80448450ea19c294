//! Functions on the measurement circle in the orthonormal Fourier basis
//! `e_n(θ) = e^{inθ}/√(2πR)`, `n = −N/2 … N/2−1`.

use crate::linalg::{ComplexMatrix, C64};
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    pub radius: f64,
    /// Entry `i` holds the coefficient of order `n = i − N/2`.
    pub coefficients: Vec<C64>,
}

/// Order `n` stored at index `i` for `N` modes.
pub fn order_of(i: usize, modes: usize) -> i64 {
    i as i64 - (modes / 2) as i64
}

/// Storage index of order `n`, if it is resolved by `N` modes.
pub fn index_of(n: i64, modes: usize) -> Option<usize> {
    let i = n + (modes / 2) as i64;
    (0..modes as i64).contains(&i).then_some(i as usize)
}

impl BoundaryFunction {
    pub fn zeros(modes: usize, radius: f64) -> Self {
        BoundaryFunction { radius, coefficients: vec![C64::new(0.0, 0.0); modes] }
    }

    pub fn new(coefficients: Vec<C64>, radius: f64) -> Self {
        BoundaryFunction { radius, coefficients }
    }

    /// The basis function `e_n`.
    pub fn basis(n: i64, modes: usize, radius: f64) -> Option<Self> {
        let mut f = Self::zeros(modes, radius);
        f.coefficients[index_of(n, modes)?] = C64::new(1.0, 0.0);
        Some(f)
    }

    pub fn modes(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficient(&self, n: i64) -> C64 {
        index_of(n, self.modes()).map_or(C64::new(0.0, 0.0), |i| self.coefficients[i])
    }

    /// `L²(∂B)` inner product `(g, h) = Σ ĝ_n conj(ĥ_n)`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coefficients.iter().map(|c| c * s).collect(), self.radius)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a + b).collect(), self.radius)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a - b).collect(), self.radius)
    }

    /// Keeps the orders resolved by `modes`, zero-filling new ones.
    pub fn resized(&self, modes: usize) -> Self {
        let mut out = Self::zeros(modes, self.radius);
        for (i, c) in self.coefficients.iter().enumerate() {
            if let Some(j) = index_of(order_of(i, self.modes()), modes) {
                out.coefficients[j] = *c;
            }
        }
        out
    }

    /// Point value at polar angle `θ`.
    pub fn evaluate(&self, theta: f64) -> C64 {
        let norm = (TAU * self.radius).sqrt();
        let n = self.modes();
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| c * C64::from_polar(1.0, order_of(i, n) as f64 * theta))
            .sum::<C64>()
            / norm
    }

    /// Values at `θ_i = 2πi/m`.
    pub fn sample(&self, m: usize) -> Vec<C64> {
        synthesis_matrix(self.modes(), m, self.radius).matvec(&self.coefficients)
    }

    /// Trapezoidal projection of values at `θ_i = 2πi/m`.
    pub fn from_samples(values: &[C64], modes: usize, radius: f64) -> Self {
        Self::new(projection_matrix(modes, values.len(), radius).matvec(values), radius)
    }

    /// Exact Fourier coefficients of a function that is constant on each of
    /// `L` equal arcs `[2πj/L, 2π(j+1)/L)`, truncated to `modes`.
    pub fn from_knot_values(values: &[f64], modes: usize, radius: f64) -> Self {
        let l = values.len();
        let norm = (TAU * radius).sqrt();
        let mut out = Self::zeros(modes, radius);
        for (i, c) in out.coefficients.iter_mut().enumerate() {
            let n = order_of(i, modes);
            let mut raw = C64::new(0.0, 0.0);
            if n == 0 {
                raw = C64::new(values.iter().sum::<f64>() / l as f64, 0.0);
            } else {
                let nf = n as f64;
                for (j, v) in values.iter().enumerate() {
                    let a = TAU * j as f64 / l as f64;
                    let b = TAU * (j + 1) as f64 / l as f64;
                    raw += (C64::from_polar(1.0, -nf * a) - C64::from_polar(1.0, -nf * b)) * *v
                        / C64::new(0.0, TAU * nf);
                }
            }
            *c = raw * norm;
        }
        out
    }
}

/// `E[i, idx] = e_n(θ_i)` for `m` nodes and `modes` orders.
pub fn synthesis_matrix(modes: usize, m: usize, radius: f64) -> ComplexMatrix {
    let norm = (TAU * radius).sqrt();
    ComplexMatrix::from_fn(m, modes, |i, j| {
        C64::from_polar(1.0 / norm, order_of(j, modes) as f64 * TAU * i as f64 / m as f64)
    })
}

/// Trapezoidal `L²(∂B)` projection onto `e_n` from `m` equispaced nodes.
pub fn projection_matrix(modes: usize, m: usize, radius: f64) -> ComplexMatrix {
    let scale = (TAU * radius).sqrt() / m as f64;
    ComplexMatrix::from_fn(modes, m, |j, i| {
        C64::from_polar(scale, -(order_of(j, modes) as f64) * TAU * i as f64 / m as f64)
    })
}

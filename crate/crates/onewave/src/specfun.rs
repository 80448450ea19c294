//! Bessel functions of integer order at real argument and Hankel functions
//! of orders 0 and 1 at complex argument.

use crate::linalg::C64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Highest order accepted by [`bessel_jy`].
pub const MAX_ORDER: usize = 256;

/// Radius below which complex arguments use the power series.
const SERIES_RADIUS: f64 = 12.0;
/// Above this imaginary part small arguments use the Macdonald integral.
const SERIES_MAX_IMAG: f64 = 2.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecfunError {
    #[error("argument outside the supported domain: {0}")]
    DomainError(String),
}

/// `J_n(x)`, `Y_n(x)` and their derivatives at one order and argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselPair {
    pub j: f64,
    pub y: f64,
    pub jp: f64,
    pub yp: f64,
}

impl BesselPair {
    /// `j·yp − jp·y − 2/(πx)`.
    pub fn wronskian_residual(&self, x: f64) -> f64 {
        self.j * self.yp - self.jp * self.y - 2.0 / (PI * x)
    }
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct CompensatedC {
    re: Compensated,
    im: Compensated,
}

impl CompensatedC {
    fn add(&mut self, v: C64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    fn value(&self) -> C64 {
        C64::new(self.re.value(), self.im.value())
    }
}

fn check_real_argument(n: usize, x: f64) -> Result<(), SpecfunError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecfunError::DomainError(format!("Bessel argument must be positive, got {x}")));
    }
    if n > MAX_ORDER {
        return Err(SpecfunError::DomainError(format!("order {n} exceeds {MAX_ORDER}")));
    }
    Ok(())
}

/// `J_n(x)` for `n = 0..=nmax` by normalized backward recurrence, together
/// with the full tail needed by the Neumann series for `Y_0`, `Y_1`.
fn miller_tail(nmax: usize, x: f64) -> Vec<f64> {
    let top = nmax.max(x.ceil() as usize);
    let mut start = top + 24 + (40.0 * top as f64).sqrt() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut b = vec![0.0; start + 2];
    b[start] = 1e-250;
    let two_over_x = 2.0 / x;
    for k in (1..=start).rev() {
        let v = k as f64 * two_over_x * b[k] - b[k + 1];
        b[k - 1] = v;
        if v.abs() > 1e200 {
            for item in b[k - 1..].iter_mut() {
                *item *= 1e-200;
            }
        }
    }
    let mut s = Compensated::default();
    s.add(b[0]);
    let mut k = 2;
    while k <= start {
        s.add(2.0 * b[k]);
        k += 2;
    }
    let norm = s.value();
    for v in b.iter_mut() {
        *v /= norm;
    }
    b
}

/// `Y_0` and `Y_1` from the Neumann series in normalized `J_k` values.
fn neumann_y01(j: &[f64], x: f64) -> (f64, f64) {
    let lx = (0.5 * x).ln();
    let mut s0 = Compensated::default();
    let mut s1 = Compensated::default();
    let mut k = 1;
    while 2 * k + 1 < j.len() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0.add(sign * j[2 * k] / k as f64);
        s1.add(sign * (2 * k + 1) as f64 * j[2 * k + 1] / (k * (k + 1)) as f64);
        k += 1;
    }
    let y0 = (2.0 / PI) * (lx + EULER_GAMMA) * j[0] - (4.0 / PI) * s0.value();
    let y1 = -(2.0 / (PI * x)) * j[0] + (2.0 / PI) * (lx - 1.0 + EULER_GAMMA) * j[1] - (2.0 / PI) * s1.value();
    (y0, y1)
}

/// `J_n`, `Y_n`, `J'_n`, `Y'_n` for every order `0..=nmax` at `x > 0`.
pub fn bessel_jy_upto(nmax: usize, x: f64) -> Result<Vec<BesselPair>, SpecfunError> {
    check_real_argument(nmax, x)?;
    let j = miller_tail(nmax + 1, x);
    let (y0, y1) = neumann_y01(&j, x);
    let mut y = Vec::with_capacity(nmax + 2);
    y.push(y0);
    y.push(y1);
    for k in 1..=nmax {
        let next = (2.0 * k as f64 / x) * y[k] - y[k - 1];
        y.push(next);
    }
    let mut out = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        let (jp, yp) = if n == 0 {
            (-j[1], -y[1])
        } else {
            let nx = n as f64 / x;
            (j[n - 1] - nx * j[n], y[n - 1] - nx * y[n])
        };
        out.push(BesselPair { j: j[n], y: y[n], jp, yp });
    }
    Ok(out)
}

/// `J_n(x)`, `Y_n(x)` and derivatives for a single order.
pub fn bessel_jy(n: usize, x: f64) -> Result<BesselPair, SpecfunError> {
    Ok(bessel_jy_upto(n, x)?[n])
}

/// `J_n(x)` for `n = 0..=nmax` without the `Y` branch.
pub fn bessel_j_upto(nmax: usize, x: f64) -> Result<Vec<f64>, SpecfunError> {
    if x == 0.0 {
        let mut v = vec![0.0; nmax + 1];
        v[0] = 1.0;
        return Ok(v);
    }
    check_real_argument(nmax, x.abs())?;
    let mut j = miller_tail(nmax, x.abs());
    j.truncate(nmax + 1);
    if x < 0.0 {
        for (n, v) in j.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
    }
    Ok(j)
}

/// Orders 0 and 1 of `J`, `Y` and `H^{(1)}` at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bessel01 {
    pub j0: C64,
    pub j1: C64,
    pub h0: C64,
    pub h1: C64,
}

fn series01(z: C64) -> (C64, C64, C64, C64) {
    let q = z * z * 0.25;
    let half = z * 0.5;
    let mut term0 = C64::new(1.0, 0.0); // (-q)^m/(m!)^2
    let mut term1 = C64::new(1.0, 0.0); // (-q)^m/(m!(m+1)!)
    let mut j0 = CompensatedC::default();
    let mut j1 = CompensatedC::default();
    let mut y0s = CompensatedC::default();
    let mut y1s = CompensatedC::default();
    let mut harmonic = 0.0; // H_m
    let mut m = 0usize;
    loop {
        j0.add(term0);
        j1.add(term1);
        if m > 0 {
            y0s.add(term0 * harmonic);
        }
        // psi(m+1) + psi(m+2) = 2 H_m + 1/(m+1) - 2 gamma
        let psi_sum = 2.0 * harmonic + 1.0 / (m as f64 + 1.0) - 2.0 * EULER_GAMMA;
        y1s.add(term1 * psi_sum);
        m += 1;
        harmonic += 1.0 / m as f64;
        term0 = term0 * (-q) / (m * m) as f64;
        term1 = term1 * (-q) / (m * (m + 1)) as f64;
        let scale = j0.value().norm().max(1e-300);
        if m > 4 && term0.norm() < 1e-18 * scale && term1.norm() < 1e-18 * scale.max(j1.value().norm()) {
            break;
        }
        if m > 400 {
            break;
        }
    }
    let j0 = j0.value();
    let j1 = j1.value() * half;
    let lz = half.ln();
    let y0 = (lz + EULER_GAMMA) * j0 * (2.0 / PI) - y0s.value() * (2.0 / PI);
    let y1 = -C64::new(2.0 / PI, 0.0) / z + lz * j1 * (2.0 / PI) - half * y1s.value() / PI;
    (j0, j1, y0, y1)
}

/// Leading Hankel asymptotic sum for `H^{(1)}_ν(z)`, `ν ∈ {0, 1}`.
fn hankel1_asymptotic(nu: u32, z: C64) -> C64 {
    let mu = 4.0 * (nu * nu) as f64;
    let i = C64::new(0.0, 1.0);
    let mut sum = CompensatedC::default();
    let mut term = C64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    sum.add(term);
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term = term * i * (mu - odd * odd) / (8.0 * k as f64) / z;
        let t = term.norm();
        if t > last || t == 0.0 {
            break;
        }
        sum.add(term);
        last = t;
        if t < 1e-18 {
            break;
        }
    }
    let phase = z - C64::new(nu as f64 * FRAC_PI_2 + FRAC_PI_4, 0.0);
    (C64::new(2.0 / PI, 0.0) / z).sqrt() * (i * phase).exp() * sum.value()
}

/// `K_0(w)`, `K_1(w)` for `Re w > 0` by the trapezoidal rule on
/// `∫_0^∞ e^{−w cosh t} cosh(νt) dt`, relative to `e^{−w}`.
fn macdonald01(w: C64) -> (C64, C64) {
    let a = w.re;
    let tmax = (1.0 + 45.0 / a).acosh();
    let freq = w.im.abs() * tmax.sinh() + a * tmax.sinh();
    let h = (0.25 / (1.0 + freq / 8.0)).min(0.05);
    let n = (tmax / h).ceil() as usize;
    let h = tmax / n as f64;
    let mut k0 = CompensatedC::default();
    let mut k1 = CompensatedC::default();
    for i in 0..=n {
        let t = i as f64 * h;
        let weight = if i == 0 { 0.5 } else { 1.0 };
        let e = (-w * (t.cosh() - 1.0)).exp() * weight;
        k0.add(e);
        k1.add(e * t.cosh());
    }
    let scale = (-w).exp() * h;
    (k0.value() * scale, k1.value() * scale)
}

fn real_bessel01(x: f64) -> Bessel01 {
    if x <= 8.0 {
        let (j0, j1, y0, y1) = series01(C64::new(x, 0.0));
        let (j0, j1, y0, y1) = (j0.re, j1.re, y0.re, y1.re);
        Bessel01 { j0: j0.into(), j1: j1.into(), h0: C64::new(j0, y0), h1: C64::new(j1, y1) }
    } else if x <= 25.0 {
        let j = miller_tail(1, x);
        let (y0, y1) = neumann_y01(&j, x);
        Bessel01 { j0: j[0].into(), j1: j[1].into(), h0: C64::new(j[0], y0), h1: C64::new(j[1], y1) }
    } else {
        let z = C64::new(x, 0.0);
        let h0 = hankel1_asymptotic(0, z);
        let h1 = hankel1_asymptotic(1, z);
        Bessel01 { j0: h0.re.into(), j1: h1.re.into(), h0, h1 }
    }
}

/// `J_0, J_1, H_0^{(1)}, H_1^{(1)}` at `z` with `Im z ≥ 0`, `z ≠ 0`.
///
/// No domain checks beyond what keeps the branches finite; callers with
/// user input go through [`hankel1_orders01`].
pub fn bessel01(z: C64) -> Bessel01 {
    let i = C64::new(0.0, 1.0);
    if z.im == 0.0 && z.re > 0.0 {
        return real_bessel01(z.re);
    }
    let r = z.norm();
    if r > SERIES_RADIUS {
        let h0 = hankel1_asymptotic(0, z);
        let h1 = hankel1_asymptotic(1, z);
        // J from the first quadrant, where H^{(2)}(w) = conj(H^{(1)}(conj w))
        // stays away from the Stokes line of the expansion.
        let w = if z.re < 0.0 { -z.conj() } else { z };
        let j0 = (hankel1_asymptotic(0, w) + hankel1_asymptotic(0, w.conj()).conj()) * 0.5;
        let j1 = (hankel1_asymptotic(1, w) + hankel1_asymptotic(1, w.conj()).conj()) * 0.5;
        let (j0, j1) = if z.re < 0.0 { (j0.conj(), -j1.conj()) } else { (j0, j1) };
        return Bessel01 { j0, j1, h0, h1 };
    }
    let (j0, j1, y0, y1) = series01(z);
    if z.im <= SERIES_MAX_IMAG {
        Bessel01 { j0, j1, h0: j0 + i * y0, h1: j1 + i * y1 }
    } else {
        let (k0, k1) = macdonald01(-i * z);
        Bessel01 { j0, j1, h0: k0 * (2.0 / PI) / i, h1: -k1 * (2.0 / PI) }
    }
}

/// `(H_0^{(1)}(z), H_1^{(1)}(z))` for `Im z ≥ 0`, `1e−12 < |z| ≤ 200`.
pub fn hankel1_orders01(z: C64) -> Result<(C64, C64), SpecfunError> {
    let r = z.norm();
    if !(r > 1e-12) || r > 200.0 || !r.is_finite() {
        return Err(SpecfunError::DomainError(format!("|z| = {r} outside (1e-12, 200]")));
    }
    if z.im < 0.0 {
        return Err(SpecfunError::DomainError(format!("Im z = {} is negative", z.im)));
    }
    let b = bessel01(z);
    Ok((b.h0, b.h1))
}

/// `J'_n(z)/J_n(z)` for `n = 0..=nmax` by backward recurrence of the ratios
/// `J_{n+1}/J_n`; valid at complex `z ≠ 0`.
pub fn bessel_log_derivative(nmax: usize, z: C64) -> Vec<C64> {
    let start = nmax + z.norm().ceil() as usize + 64;
    let mut r = vec![C64::new(0.0, 0.0); start + 1];
    for n in (1..=start).rev() {
        r[n - 1] = C64::new(1.0, 0.0) / (C64::new(2.0 * n as f64, 0.0) / z - r[n]);
    }
    (0..=nmax).map(|n| C64::new(n as f64, 0.0) / z - r[n]).collect()
}

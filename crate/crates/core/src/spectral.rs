//! Truncated Fourier series of real 2π-periodic functions.
//!
//! A [`TrigPoly`] of bandwidth `K` stores the coefficients `û(k)` for
//! `0 ≤ k ≤ K`; negative wavenumbers are implied by Hermitian symmetry
//! `û(−k) = conj(û(k))`, so every value is real-valued by construction.
//!
//! Conventions:
//! - `u(x) = Σ_k û(k) e^{ikx}` on `x ∈ [−π, π)`; `û(0)` is the mean.
//! - Homogeneous norms (`Ȧ^α`, `Ḣ^s`) are pure coefficient sums and require
//!   a zero-mean argument.
//! - [`TrigPoly::l2_norm`] integrates against `dx`, so
//!   `‖u‖²_{L²} = 2π Σ_k |û(k)|²`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Tolerance used when validating Hermitian symmetry of user-supplied
/// coefficients.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("norm order must be a nonnegative real number, got {0}")]
    InvalidOrder(f64),
    #[error("homogeneous norm requires a zero-mean function, mean is {0:e}")]
    NonZeroMean(f64),
    #[error("coefficients violate Hermitian symmetry at k = {k} (residue {residue:e})")]
    NotHermitian { k: i64, residue: f64 },
    #[error("coefficient vector has length {got}, expected {expected}")]
    BadLength { got: usize, expected: usize },
    #[error("wavenumber {k} lies outside bandwidth {bandwidth}")]
    OutOfBand { k: i64, bandwidth: usize },
    #[error("grid of {points} points cannot resolve bandwidth {bandwidth}")]
    GridTooCoarse { points: usize, bandwidth: usize },
    #[error("mode k = {k} is listed twice with inconsistent values")]
    DuplicateMode { k: i64 },
}

/// Nonnegative exponent of a Wiener or Sobolev norm.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct NormOrder(f64);

impl NormOrder {
    pub fn new(value: f64) -> Result<Self, SpectralError> {
        if value.is_finite() && value >= 0.0 {
            Ok(Self(value))
        } else {
            Err(SpectralError::InvalidOrder(value))
        }
    }

    pub const fn int(n: u32) -> Self {
        Self(n as f64)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<u32> for NormOrder {
    fn from(n: u32) -> Self {
        Self::int(n)
    }
}

impl TryFrom<f64> for NormOrder {
    type Error = SpectralError;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

/// Real trigonometric polynomial `Σ_{|k|≤K} û(k) e^{ikx}`.
#[derive(Clone, Debug)]
pub struct TrigPoly {
    bandwidth: usize,
    /// `half[k] = û(k)` for `0 ≤ k ≤ K`; `half[0]` is real.
    half: Vec<Complex64>,
}

impl TrigPoly {
    pub fn zeros(bandwidth: usize) -> Self {
        Self {
            bandwidth,
            half: vec![Complex64::new(0.0, 0.0); bandwidth + 1],
        }
    }

    pub fn constant(bandwidth: usize, value: f64) -> Self {
        let mut u = Self::zeros(bandwidth);
        u.half[0] = Complex64::new(value, 0.0);
        u
    }

    /// `amplitude · cos(kx)`.
    pub fn cosine(bandwidth: usize, k: usize, amplitude: f64) -> Result<Self, SpectralError> {
        let mut u = Self::zeros(bandwidth);
        u.set_mode(k as i64, Complex64::new(amplitude, 0.0))?;
        if k != 0 {
            u.half[k] *= 0.5;
        }
        Ok(u)
    }

    /// `amplitude · sin(kx)`.
    pub fn sine(bandwidth: usize, k: usize, amplitude: f64) -> Result<Self, SpectralError> {
        let mut u = Self::zeros(bandwidth);
        if k != 0 {
            u.set_mode(k as i64, Complex64::new(0.0, -0.5 * amplitude))?;
        }
        Ok(u)
    }

    /// Builds a polynomial from the non-negative half spectrum. The imaginary
    /// part of `û(0)` must vanish (within [`HERMITIAN_TOL`]).
    pub fn from_half_spectrum(half: Vec<Complex64>) -> Result<Self, SpectralError> {
        if half.is_empty() {
            return Err(SpectralError::BadLength {
                got: 0,
                expected: 1,
            });
        }
        let scale = half.iter().map(|c| c.norm()).fold(1.0, f64::max);
        if half[0].im.abs() > HERMITIAN_TOL * scale {
            return Err(SpectralError::NotHermitian {
                k: 0,
                residue: half[0].im.abs(),
            });
        }
        let mut half = half;
        half[0].im = 0.0;
        Ok(Self {
            bandwidth: half.len() - 1,
            half,
        })
    }

    /// Builds a polynomial from the full coefficient vector indexed
    /// `k + K` for `k ∈ {−K..K}`. Hermitian symmetry is validated.
    pub fn from_coeffs(bandwidth: usize, coeffs: &[Complex64]) -> Result<Self, SpectralError> {
        let expected = 2 * bandwidth + 1;
        if coeffs.len() != expected {
            return Err(SpectralError::BadLength {
                got: coeffs.len(),
                expected,
            });
        }
        let scale = coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let kk = bandwidth as i64;
        for k in 0..=kk {
            let pos = coeffs[(k + kk) as usize];
            let neg = coeffs[(kk - k) as usize];
            let residue = (neg - pos.conj()).norm();
            if residue > HERMITIAN_TOL * scale {
                return Err(SpectralError::NotHermitian { k, residue });
            }
        }
        let mut half: Vec<Complex64> = (0..=bandwidth).map(|k| coeffs[k + bandwidth]).collect();
        half[0].im = 0.0;
        Ok(Self { bandwidth, half })
    }

    /// Builds a polynomial from an explicit list of `(k, re, im)` entries.
    /// Each entry also fixes the conjugate mode `−k`; listing both `k` and
    /// `−k` is accepted only when the two entries are conjugate.
    pub fn from_modes(bandwidth: usize, modes: &[(i64, f64, f64)]) -> Result<Self, SpectralError> {
        let mut u = Self::zeros(bandwidth);
        let mut seen = vec![false; bandwidth + 1];
        for &(k, re, im) in modes {
            let value = if k < 0 {
                Complex64::new(re, -im)
            } else {
                Complex64::new(re, im)
            };
            let idx = k.unsigned_abs() as usize;
            if idx > bandwidth {
                return Err(SpectralError::OutOfBand { k, bandwidth });
            }
            if k == 0 && im.abs() > HERMITIAN_TOL * re.abs().max(1.0) {
                return Err(SpectralError::NotHermitian {
                    k: 0,
                    residue: im.abs(),
                });
            }
            if seen[idx] {
                let prev = u.half[idx];
                if (prev - value).norm() > HERMITIAN_TOL * prev.norm().max(1.0) {
                    return Err(SpectralError::DuplicateMode { k });
                }
            }
            seen[idx] = true;
            u.half[idx] = if idx == 0 {
                Complex64::new(value.re, 0.0)
            } else {
                value
            };
        }
        Ok(u)
    }

    fn set_mode(&mut self, k: i64, value: Complex64) -> Result<(), SpectralError> {
        let idx = k.unsigned_abs() as usize;
        if idx > self.bandwidth {
            return Err(SpectralError::OutOfBand {
                k,
                bandwidth: self.bandwidth,
            });
        }
        self.half[idx] = if k < 0 { value.conj() } else { value };
        if idx == 0 {
            self.half[0].im = 0.0;
        }
        Ok(())
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// `û(k)`, zero outside the bandwidth.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let idx = k.unsigned_abs() as usize;
        match self.half.get(idx) {
            Some(c) if k < 0 => c.conj(),
            Some(c) => *c,
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Non-negative half of the spectrum, `û(0..=K)`.
    pub fn half_spectrum(&self) -> &[Complex64] {
        &self.half
    }

    /// Full coefficient vector indexed `k + K`.
    pub fn full_spectrum(&self) -> Vec<Complex64> {
        let kk = self.bandwidth as i64;
        (-kk..=kk).map(|k| self.coeff(k)).collect()
    }

    pub fn mean(&self) -> f64 {
        self.half[0].re
    }

    pub fn is_zero_mean(&self) -> bool {
        self.half[0].re == 0.0
    }

    pub fn without_mean(&self) -> Self {
        let mut u = self.clone();
        u.half[0] = Complex64::new(0.0, 0.0);
        u
    }

    pub fn is_zero(&self) -> bool {
        self.half.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Largest wavenumber carrying a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.half
            .iter()
            .rposition(|c| c.re != 0.0 || c.im != 0.0)
            .unwrap_or(0)
    }

    fn check_homogeneous(&self) -> Result<(), SpectralError> {
        if self.bandwidth > 0 && !self.is_zero_mean() {
            return Err(SpectralError::NonZeroMean(self.mean()));
        }
        Ok(())
    }

    /// `‖u‖_{Ȧ^α} = Σ_{k≠0} |k|^α |û(k)|`.
    pub fn wiener_norm(&self, order: impl Into<NormOrder>) -> Result<f64, SpectralError> {
        self.check_homogeneous()?;
        let alpha = order.into().value();
        let sum: f64 = self
            .half
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| (k as f64).powf(alpha) * c.norm())
            .sum();
        Ok(2.0 * sum)
    }

    /// `‖u‖_{Ḣ^s} = (Σ_{k≠0} |k|^{2s} |û(k)|²)^{1/2}`.
    pub fn sobolev_norm(&self, order: impl Into<NormOrder>) -> Result<f64, SpectralError> {
        self.check_homogeneous()?;
        let s = order.into().value();
        let sum: f64 = self
            .half
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| (k as f64).powf(2.0 * s) * c.norm_sqr())
            .sum();
        Ok((2.0 * sum).sqrt())
    }

    /// `(∫_𝕋 |u|² dx)^{1/2}`, mean included.
    pub fn l2_norm(&self) -> f64 {
        let sum: f64 = self.half[0].norm_sqr()
            + 2.0 * self.half.iter().skip(1).map(|c| c.norm_sqr()).sum::<f64>();
        (2.0 * PI * sum).sqrt()
    }

    /// `∂ₓⁿ u`, i.e. multiplication of `û(k)` by `(ik)ⁿ`.
    pub fn derivative(&self, n: u32) -> Self {
        if n == 0 {
            return self.clone();
        }
        let rot = match n % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        let half = self
            .half
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    rot * c * (k as f64).powi(n as i32)
                }
            })
            .collect();
        Self {
            bandwidth: self.bandwidth,
            half,
        }
    }

    /// Exact circular convolution `(uv)^(n) = Σ_m û(n−m) v̂(m)`, retained for
    /// `|n| ≤ k_out`. The mean of the product is kept.
    pub fn product(&self, other: &TrigPoly, k_out: usize) -> Self {
        let ka = self.bandwidth as i64;
        let kb = other.bandwidth as i64;
        // Reversed copy of `self` so that the inner loop walks both arrays forward.
        let rev: Vec<Complex64> = (-ka..=ka).rev().map(|k| self.coeff(k)).collect();
        let b = other.full_spectrum();
        let mut half = vec![Complex64::new(0.0, 0.0); k_out + 1];
        for (n, slot) in half.iter_mut().enumerate() {
            let n = n as i64;
            let lo = (-kb).max(n - ka);
            let hi = kb.min(n + ka);
            if lo > hi {
                continue;
            }
            // rev[j] = û(ka − j), so û(n − m) = rev[ka − n + m].
            let ra = (ka - n + lo) as usize;
            let rb = (lo + kb) as usize;
            let len = (hi - lo + 1) as usize;
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, y) in rev[ra..ra + len].iter().zip(&b[rb..rb + len]) {
                acc += x * y;
            }
            *slot = acc;
        }
        half[0].im = 0.0;
        Self {
            bandwidth: k_out,
            half,
        }
    }

    /// Galerkin projection onto `|k| ≤ k_max`. The result carries bandwidth
    /// `k_max`, padding with zeros when `k_max` exceeds the current bandwidth.
    pub fn project(&self, k_max: usize) -> Self {
        let mut half = vec![Complex64::new(0.0, 0.0); k_max + 1];
        for (dst, src) in half.iter_mut().zip(&self.half) {
            *dst = *src;
        }
        Self {
            bandwidth: k_max,
            half,
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            bandwidth: self.bandwidth,
            half: self.half.iter().map(|c| c * factor).collect(),
        }
    }

    /// `self + factor · other`, on the larger of the two bandwidths.
    pub fn axpy(&self, factor: f64, other: &TrigPoly) -> Self {
        let bandwidth = self.bandwidth.max(other.bandwidth);
        let half = (0..=bandwidth as i64)
            .map(|k| self.coeff(k) + other.coeff(k) * factor)
            .collect();
        Self { bandwidth, half }
    }

    /// Coefficient-wise map over the non-negative half spectrum. `f` must
    /// keep `û(0)` real; the imaginary part of mode 0 is discarded.
    pub fn map_modes(&self, mut f: impl FnMut(usize, Complex64) -> Complex64) -> Self {
        let mut half: Vec<Complex64> = self.half.iter().enumerate().map(|(k, c)| f(k, *c)).collect();
        half[0].im = 0.0;
        Self {
            bandwidth: self.bandwidth,
            half,
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.half.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.half.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Point evaluation by direct summation.
    pub fn eval(&self, x: f64) -> f64 {
        let step = Complex64::new(x.cos(), x.sin());
        let mut phase = Complex64::new(1.0, 0.0);
        let mut acc = self.half[0].re;
        for c in self.half.iter().skip(1) {
            phase *= step;
            acc += 2.0 * (c * phase).re;
        }
        acc
    }

    /// Samples `u(x_j)` at `x_j = −π + 2πj/M`, `j = 0..M`.
    pub fn grid_values(&self, points: usize) -> Result<Vec<f64>, SpectralError> {
        if points < 2 * self.bandwidth + 1 {
            return Err(SpectralError::GridTooCoarse {
                points,
                bandwidth: self.bandwidth,
            });
        }
        if self.half[0].im.abs() > HERMITIAN_TOL * self.max_abs_coeff().max(1.0) {
            return Err(SpectralError::NotHermitian {
                k: 0,
                residue: self.half[0].im.abs(),
            });
        }
        Ok(synthesize(&self.half, points))
    }

    /// Largest value of `u` over the torus: grid search on at least `8K+1`
    /// points followed by golden-section refinement around the grid
    /// candidates. Always a lower bound of the true maximum.
    pub fn max_value(&self) -> f64 {
        let m = sup_grid_size(self.bandwidth);
        let grid = synthesize(&self.half, m);
        refine_max(self, &grid, 1.0)
    }

    pub fn min_value(&self) -> f64 {
        let m = sup_grid_size(self.bandwidth);
        let grid = synthesize(&self.half, m);
        -refine_max(self, &grid, -1.0)
    }

    /// `‖u‖_{L∞}` (see [`TrigPoly::max_value`] for the evaluation strategy).
    pub fn sup_norm(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let m = sup_grid_size(self.bandwidth);
        let grid = synthesize(&self.half, m);
        refine_max(self, &grid, 1.0).max(refine_max(self, &grid, -1.0))
    }

    /// `‖∂ₓⁿu‖_{L∞}`.
    pub fn sup_norm_deriv(&self, n: u32) -> f64 {
        self.derivative(n).sup_norm()
    }
}

/// Two polynomials are equal when they describe the same function, whatever
/// their bandwidths.
impl PartialEq for TrigPoly {
    fn eq(&self, other: &Self) -> bool {
        let kmax = self.bandwidth.max(other.bandwidth) as i64;
        (0..=kmax).all(|k| self.coeff(k) == other.coeff(k))
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;

    fn add(self, rhs: &TrigPoly) -> TrigPoly {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &TrigPoly {
    type Output = TrigPoly;

    fn sub(self, rhs: &TrigPoly) -> TrigPoly {
        self.axpy(-1.0, rhs)
    }
}

impl Neg for &TrigPoly {
    type Output = TrigPoly;

    fn neg(self) -> TrigPoly {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &TrigPoly {
    type Output = TrigPoly;

    fn mul(self, rhs: f64) -> TrigPoly {
        self.scale(rhs)
    }
}

fn sup_grid_size(bandwidth: usize) -> usize {
    (8 * bandwidth + 1).max(17)
}

/// Uniform grid point `x_j = −π + 2πj/M`.
pub fn grid_point(j: usize, points: usize) -> f64 {
    -PI + 2.0 * PI * j as f64 / points as f64
}

/// Real-form synthesis `û(0) + 2 Re Σ_{k≥1} û(k) e^{ikx_j}` using a table of
/// roots of unity, so `e^{ikx_j} = (−1)^k ω^{kj mod M}`.
fn synthesize(half: &[Complex64], points: usize) -> Vec<f64> {
    let table: Vec<Complex64> = (0..points)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / points as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect();
    (0..points)
        .map(|j| {
            let mut acc = half[0].re;
            let mut idx = 0usize;
            for (k, c) in half.iter().enumerate().skip(1) {
                idx += j;
                if idx >= points {
                    idx %= points;
                }
                let w = table[idx];
                let term = 2.0 * (c.re * w.re - c.im * w.im);
                if k % 2 == 1 {
                    acc -= term;
                } else {
                    acc += term;
                }
            }
            acc
        })
        .collect()
}

fn refine_max(u: &TrigPoly, grid: &[f64], sign: f64) -> f64 {
    let m = grid.len();
    let best = grid.iter().map(|v| sign * v).fold(f64::NEG_INFINITY, f64::max);
    if u.bandwidth == 0 {
        return best;
    }
    let h = 2.0 * PI / m as f64;
    // Deviation of a bandwidth-K polynomial between grid points is bounded by
    // (h/2)²K²/2 times its sup norm; peaks below this band cannot win.
    let slack = 0.5 * (0.5 * h * u.bandwidth as f64).powi(2);
    let scale = grid.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let threshold = best - 2.0 * slack * scale;
    let mut result = best;
    for j in 0..m {
        let here = sign * grid[j];
        let left = sign * grid[(j + m - 1) % m];
        let right = sign * grid[(j + 1) % m];
        if here < threshold || here < left || here < right {
            continue;
        }
        let x0 = grid_point(j, m);
        let peak = golden_max(|x| sign * u.eval(x), x0 - h, x0 + h);
        result = result.max(peak);
    }
    result
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..64 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-14 {
            break;
        }
    }
    fc.max(fd)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cos(k: usize, a: f64) -> TrigPoly {
        TrigPoly::cosine(8, k, a).unwrap()
    }

    fn sin(k: usize, a: f64) -> TrigPoly {
        TrigPoly::sine(8, k, a).unwrap()
    }

    fn close(a: &TrigPoly, b: &TrigPoly, tol: f64) -> bool {
        let kmax = a.bandwidth().max(b.bandwidth()) as i64;
        (0..=kmax).all(|k| (a.coeff(k) - b.coeff(k)).norm() <= tol)
    }

    #[test]
    fn wiener_norm_examples() {
        assert_eq!(TrigPoly::zeros(4).wiener_norm(0).unwrap(), 0.0);
        assert!((cos(1, 1.0).wiener_norm(0).unwrap() - 1.0).abs() < 1e-15);
        assert!((cos(1, 1.0).wiener_norm(4).unwrap() - 1.0).abs() < 1e-15);
        assert!((cos(2, 1.0).wiener_norm(4).unwrap() - 16.0).abs() < 1e-13);
    }

    #[test]
    fn sobolev_norm_examples() {
        assert_eq!(TrigPoly::zeros(4).sobolev_norm(1).unwrap(), 0.0);
        let half_root2 = 0.5 * 2f64.sqrt();
        assert!((cos(1, 1.0).sobolev_norm(0).unwrap() - half_root2).abs() < 1e-15);
        assert!((sin(3, 1.0).sobolev_norm(2).unwrap() - 9.0 * half_root2).abs() < 1e-13);
    }

    #[test]
    fn homogeneous_norms_reject_nonzero_mean() {
        let u = TrigPoly::constant(3, 1.0);
        assert_eq!(u.wiener_norm(0), Err(SpectralError::NonZeroMean(1.0)));
        assert!(u.sobolev_norm(2).is_err());
        // Constant functions at bandwidth zero are accepted and have zero norm.
        assert_eq!(TrigPoly::constant(0, 3.0).wiener_norm(2).unwrap(), 0.0);
    }

    #[test]
    fn norm_order_validation() {
        assert!(NormOrder::new(-1.0).is_err());
        assert!(NormOrder::new(f64::NAN).is_err());
        assert_eq!(NormOrder::new(1.5).unwrap().value(), 1.5);
    }

    #[test]
    fn sup_norm_examples() {
        assert_eq!(TrigPoly::zeros(5).sup_norm_deriv(3), 0.0);
        assert!((cos(1, 1.0).sup_norm_deriv(1) - 1.0).abs() < 1e-6);
        assert!((cos(2, 1.0).sup_norm_deriv(2) - 4.0).abs() < 1e-6);
        let u = &cos(1, 0.3) + &sin(5, 0.7);
        let fine = u
            .grid_values(20_000)
            .unwrap()
            .into_iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(u.sup_norm() >= fine - 1e-9);
        assert!(u.sup_norm() <= fine + 1e-6);
    }

    #[test]
    fn derivative_examples() {
        assert!(close(&cos(1, 1.0).derivative(1), &sin(1, -1.0), 1e-15));
        assert!(close(&sin(2, 1.0).derivative(3), &cos(2, -8.0), 1e-14));
        assert!(TrigPoly::zeros(3).derivative(5).is_zero());
        assert_eq!(TrigPoly::constant(2, 4.0).derivative(1).mean(), 0.0);
    }

    #[test]
    fn product_examples() {
        let c = cos(1, 1.0);
        let expected = &TrigPoly::constant(2, 0.5) + &TrigPoly::cosine(2, 2, 0.5).unwrap();
        assert!(close(&c.product(&c, 2), &expected, 1e-15));
        assert!(c.product(&TrigPoly::zeros(8), 8).is_zero());
        let s = sin(1, 1.0);
        assert!(close(&c.product(&s, 4), &TrigPoly::sine(4, 2, 0.5).unwrap(), 1e-15));
    }

    #[test]
    fn product_truncates_to_requested_bandwidth() {
        let u = &cos(3, 1.0) + &cos(1, 1.0);
        let p = u.product(&u, 2);
        assert_eq!(p.bandwidth(), 2);
        // cos²x + 2cos x cos 3x + cos² 3x: modes 2 carry 1/4 + 1/2.
        assert!((p.coeff(2).re - 0.75).abs() < 1e-15);
        assert!((p.mean() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn project_examples() {
        let u = &cos(1, 1.0) + &cos(5, 1.0);
        assert_eq!(u.project(2), cos(1, 1.0));
        assert_eq!(u.project(8), u);
        assert!(TrigPoly::zeros(4).project(1).is_zero());
        assert_eq!(u.project(3).project(3), u.project(3));
    }

    #[test]
    fn grid_values_examples() {
        let v = TrigPoly::cosine(1, 1, 1.0).unwrap().grid_values(4).unwrap();
        let expected = [-1.0, 0.0, 1.0, 0.0];
        for (a, b) in v.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{v:?}");
        }
        assert!(TrigPoly::zeros(3).grid_values(7).unwrap().iter().all(|x| *x == 0.0));
        let u = &sin(3, 0.2) + &cos(7, -1.1);
        let g = u.grid_values(64).unwrap();
        assert!((g.iter().sum::<f64>() / 64.0).abs() < 1e-12);
        assert!(matches!(
            u.grid_values(10),
            Err(SpectralError::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn from_coeffs_rejects_non_hermitian() {
        let c = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(2.0, 0.0),
        ];
        assert!(matches!(
            TrigPoly::from_coeffs(1, &c),
            Err(SpectralError::NotHermitian { .. })
        ));
        let ok = vec![
            Complex64::new(1.0, 0.5),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, -0.5),
        ];
        let u = TrigPoly::from_coeffs(1, &ok).unwrap();
        assert_eq!(u.full_spectrum(), ok);
    }

    #[test]
    fn from_modes_symmetrizes() {
        let u = TrigPoly::from_modes(3, &[(2, 0.1, 0.2), (-1, 0.3, 0.4)]).unwrap();
        assert_eq!(u.coeff(-2), Complex64::new(0.1, -0.2));
        assert_eq!(u.coeff(1), Complex64::new(0.3, -0.4));
        assert!(TrigPoly::from_modes(3, &[(4, 1.0, 0.0)]).is_err());
        assert!(TrigPoly::from_modes(3, &[(1, 1.0, 0.0), (-1, 2.0, 0.0)]).is_err());
        assert!(TrigPoly::from_modes(3, &[(1, 1.0, 1.0), (-1, 1.0, -1.0)]).is_ok());
    }

    #[test]
    fn l2_norm_matches_quadrature() {
        let u = &(&cos(2, 0.4) + &sin(5, -0.9)) + &TrigPoly::constant(8, 0.25);
        let g = u.grid_values(64).unwrap();
        let quad = (2.0 * PI / 64.0 * g.iter().map(|v| v * v).sum::<f64>()).sqrt();
        assert!((u.l2_norm() - quad).abs() < 1e-12);
    }

    #[test]
    fn min_and_max_values() {
        let u = &TrigPoly::constant(4, 1.0) + &TrigPoly::cosine(4, 1, -0.5).unwrap();
        assert!((u.min_value() - 0.5).abs() < 1e-9);
        assert!((u.max_value() - 1.5).abs() < 1e-9);
    }
}

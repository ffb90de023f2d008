//! Dense 2×2 real matrices for the per-wavenumber linear operators.

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl std::ops::Add for Mat2 {
    type Output = Mat2;

    fn add(self, other: Mat2) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        let [[e, f], [g, h]] = other.0;
        Mat2([[a + e, b + f], [c + g, d + h]])
    }
}

impl std::ops::Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, other: Mat2) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        let [[e, f], [g, h]] = other.0;
        Mat2([[a * e + b * g, a * f + b * h], [c * e + d * g, c * f + d * h]])
    }
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);
    pub const ZERO: Mat2 = Mat2([[0.0, 0.0], [0.0, 0.0]]);

    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Mat2([[a11, a12], [a21, a22]])
    }

    pub fn scale(self, s: f64) -> Self {
        let [[a, b], [c, d]] = self.0;
        Mat2([[s * a, s * b], [s * c, s * d]])
    }

    pub fn det(self) -> f64 {
        let [[a, b], [c, d]] = self.0;
        a * d - b * c
    }

    pub fn trace(self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn inverse(self) -> Option<Mat2> {
        let det = self.det();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let [[a, b], [c, d]] = self.0;
        Some(Mat2([[d / det, -b / det], [-c / det, a / det]]))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(self) -> f64 {
        self.0
            .iter()
            .map(|row| row[0].abs() + row[1].abs())
            .fold(0.0, f64::max)
    }

    /// Condition number in the ∞-norm; infinite for singular matrices.
    pub fn condition(self) -> f64 {
        match self.inverse() {
            Some(inv) => self.norm_inf() * inv.norm_inf(),
            None => f64::INFINITY,
        }
    }

    pub fn apply(self, x: [Complex64; 2]) -> [Complex64; 2] {
        let [[a, b], [c, d]] = self.0;
        [x[0] * a + x[1] * b, x[0] * c + x[1] * d]
    }

    /// Solves `self · y = x` by Gaussian elimination with partial pivoting.
    pub fn solve(self, x: [Complex64; 2]) -> Option<[Complex64; 2]> {
        let [[a, b], [c, d]] = self.0;
        let (r0, r1, x0, x1) = if a.abs() >= c.abs() {
            ([a, b], [c, d], x[0], x[1])
        } else {
            ([c, d], [a, b], x[1], x[0])
        };
        if r0[0] == 0.0 {
            return None;
        }
        let m = r1[0] / r0[0];
        let u22 = r1[1] - m * r0[1];
        if u22 == 0.0 {
            return None;
        }
        let y1 = (x1 - x0 * m) / u22;
        let y0 = (x0 - y1 * r0[1]) / r0[0];
        Some([y0, y1])
    }
}

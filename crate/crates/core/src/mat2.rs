//! Closed-form 2×2 real matrix algebra.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Dense 2×2 matrix in row-major order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat2<T> {
    pub m: [[T; 2]; 2],
}

impl<T: Scalar> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Self {
        Mat2 { m: [[a, b], [c, d]] }
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one())
    }

    pub fn diag(a: T, d: T) -> Self {
        Self::new(a, T::zero(), T::zero(), d)
    }

    /// Counter-clockwise rotation by `angle`.
    pub fn rotation(angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c, -s, s, c)
    }

    /// The symplectic form `[[0, 1], [-1, 0]]`.
    pub fn symplectic_form() -> Self {
        Self::new(T::zero(), T::one(), -T::one(), T::zero())
    }

    pub fn det(&self) -> T {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> T {
        self.m[0][0] + self.m[1][1]
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    /// Inverse via the adjugate; `None` when the determinant vanishes.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        Some(Self::new(self.m[1][1] / det, -self.m[0][1] / det, -self.m[1][0] / det, self.m[0][0] / det))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(
            self.m[0][0] + o.m[0][0],
            self.m[0][1] + o.m[0][1],
            self.m[1][0] + o.m[1][0],
            self.m[1][1] + o.m[1][1],
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(
            self.m[0][0] - o.m[0][0],
            self.m[0][1] - o.m[0][1],
            self.m[1][0] - o.m[1][0],
            self.m[1][1] - o.m[1][1],
        )
    }

    pub fn scale(&self, k: T) -> Self {
        Self::new(self.m[0][0] * k, self.m[0][1] * k, self.m[1][0] * k, self.m[1][1] * k)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let a = &self.m;
        let b = &o.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }

    pub fn mul_vec(&self, v: [T; 2]) -> [T; 2] {
        [self.m[0][0] * v[0] + self.m[0][1] * v[1], self.m[1][0] * v[0] + self.m[1][1] * v[1]]
    }

    /// `self * x * selfᵀ`.
    pub fn congruence(&self, x: &Self) -> Self {
        self.mul(x).mul(&self.transpose())
    }

    /// `vᵀ · self · v`.
    pub fn quad_form(&self, v: [T; 2]) -> T {
        let w = self.mul_vec(v);
        v[0] * w[0] + v[1] * w[1]
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.m.iter().flatten().fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    /// Eigenvalues `(λ_max, λ_min)` of a symmetric matrix.
    pub fn sym_eigenvalues(&self) -> (T, T) {
        let half = T::lit(0.5);
        let mid = half * (self.m[0][0] + self.m[1][1]);
        let rad = (half * (self.m[0][0] - self.m[1][1])).hypot(self.m[0][1]);
        (mid + rad, mid - rad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjugate_inverse() {
        let a = Mat2::new(2.0, 0.5, 0.5, 3.0);
        let inv = a.inverse().unwrap();
        let id = a.mul(&inv);
        assert!(id.sub(&Mat2::identity()).max_abs() < 1e-15);
        assert!(Mat2::new(1.0, 2.0, 2.0, 4.0).inverse().is_none());
    }

    #[test]
    fn symmetric_eigenvalues() {
        let r = Mat2::rotation(0.7);
        let a = r.congruence(&Mat2::diag(5.0f64, 0.2));
        let (hi, lo) = a.sym_eigenvalues();
        assert!((hi - 5.0).abs() < 1e-14);
        assert!((lo - 0.2).abs() < 1e-14);
    }
}

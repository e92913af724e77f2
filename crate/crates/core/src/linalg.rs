//! Minimal fixed-size vectors and matrices. Hand-rolled on purpose: the
//! crate needs exactly `Vec3`/`Mat3` with deterministic arithmetic, nothing
//! from a general linear-algebra stack.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Real;

/// Point or vector in the contact chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3<R> {
    pub x: R,
    pub y: R,
    pub z: R,
}

impl<R: Real> Vec3<R> {
    #[inline]
    pub fn new(x: R, y: R, z: R) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(R::zero(), R::zero(), R::zero())
    }

    #[inline]
    pub fn dot(self, o: Self) -> R {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_sq(self) -> R {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> R {
        self.norm_sq().sqrt()
    }

    /// Planar radius √(x² + y²).
    #[inline]
    pub fn radius(self) -> R {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    /// Tangential part (x, y, 0).
    #[inline]
    pub fn tangential(self) -> Self {
        Self::new(self.x, self.y, R::zero())
    }

    #[inline]
    pub fn get(self, i: usize) -> R {
        match i {
            0 => self.x,
            1 => self.y,
            2 => self.z,
            _ => panic!("Vec3 index out of range: {i}"),
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: R) {
        match i {
            0 => self.x = v,
            1 => self.y = v,
            2 => self.z = v,
            _ => panic!("Vec3 index out of range: {i}"),
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl<R: Real> Add for Vec3<R> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<R: Real> Sub for Vec3<R> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<R: Real> Neg for Vec3<R> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<R: Real> Mul<R> for Vec3<R> {
    type Output = Self;
    #[inline]
    fn mul(self, s: R) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Row-major 3×3 matrix; `m[i][j]` is row i, column j.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3<R> {
    pub rows: [[R; 3]; 3],
}

impl<R: Real> Mat3<R> {
    #[inline]
    pub fn zero() -> Self {
        Self {
            rows: [[R::zero(); 3]; 3],
        }
    }

    #[inline]
    pub fn from_rows(r0: [R; 3], r1: [R; 3], r2: [R; 3]) -> Self {
        Self { rows: [r0, r1, r2] }
    }

    #[inline]
    pub fn get(self, i: usize, j: usize) -> R {
        self.rows[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.rows[i][j] = v;
    }

    /// Gradient of the rigid field x ↦ ω × x: the antisymmetric matrix with
    /// (∇u)_{ij} = ∂u_i/∂x_j.
    pub fn antisymmetric_from_omega(w: Vec3<R>) -> Self {
        Self::from_rows(
            [R::zero(), -w.z, w.y],
            [w.z, R::zero(), -w.x],
            [-w.y, w.x, R::zero()],
        )
    }

    #[inline]
    pub fn frobenius_sq(self) -> R {
        let mut s = R::zero();
        for row in self.rows {
            for v in row {
                s = s + v * v;
            }
        }
        s
    }

    #[inline]
    pub fn frobenius(self) -> R {
        self.frobenius_sq().sqrt()
    }

    /// Trace, i.e. the divergence when the matrix is a velocity gradient.
    #[inline]
    pub fn trace(self) -> R {
        self.rows[0][0] + self.rows[1][1] + self.rows[2][2]
    }

    pub fn mul_vec(self, v: Vec3<R>) -> Vec3<R> {
        Vec3::new(
            self.rows[0][0] * v.x + self.rows[0][1] * v.y + self.rows[0][2] * v.z,
            self.rows[1][0] * v.x + self.rows[1][1] * v.y + self.rows[1][2] * v.z,
            self.rows[2][0] * v.x + self.rows[2][1] * v.y + self.rows[2][2] * v.z,
        )
    }

    pub fn is_finite(self) -> bool {
        self.rows.iter().flatten().all(|v| v.is_finite())
    }
}

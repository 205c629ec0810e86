//! Scalar abstraction shared by plain complex values and Wirtinger jets.
//!
//! All tensor and form algebra in this crate is written once against
//! [`Scalar`]; instantiating it with [`Jet1`](crate::jets::Jet1) carries
//! first derivatives through the same code path.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

pub type C64 = Complex64;

/// Imaginary unit.
pub const I: C64 = C64::new(0.0, 1.0);

/// Wirtinger direction index: 0 = ∂/∂z¹, 1 = ∂/∂z², 2 = ∂/∂z̄¹, 3 = ∂/∂z̄².
pub const DIRS: usize = 4;

/// Direction obtained by complex conjugation (z ↔ z̄).
#[inline]
pub const fn conj_dir(a: usize) -> usize {
    (a + 2) % 4
}

pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    fn constant(c: C64) -> Self;
    fn value(&self) -> C64;
    fn conj(&self) -> Self;
    fn recip(&self) -> Self;
    fn scale(&self, c: C64) -> Self;

    #[inline]
    fn zero() -> Self {
        Self::constant(C64::new(0.0, 0.0))
    }

    /// Exact zero in every component (value and derivatives).
    #[inline]
    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    #[inline]
    fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    #[inline]
    fn real(x: f64) -> Self {
        Self::constant(C64::new(x, 0.0))
    }
}

/// Scalars whose Wirtinger partials are themselves scalars of one order lower.
pub trait Differentiable: Scalar {
    type Lower: Scalar;
    fn partial(&self, dir: usize) -> Self::Lower;
}

impl Scalar for C64 {
    #[inline]
    fn constant(c: C64) -> Self {
        c
    }
    #[inline]
    fn value(&self) -> C64 {
        *self
    }
    #[inline]
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    #[inline]
    fn recip(&self) -> Self {
        self.inv()
    }
    #[inline]
    fn scale(&self, c: C64) -> Self {
        self * c
    }
}

/// Determinant and inverse of a 2×2 matrix over any scalar.
pub fn det2<S: Scalar>(m: &[[S; 2]; 2]) -> S {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn inv2<S: Scalar>(m: &[[S; 2]; 2]) -> [[S; 2]; 2] {
    let r = det2(m).recip();
    [
        [m[1][1] * r, -(m[0][1] * r)],
        [-(m[1][0] * r), m[0][0] * r],
    ]
}

/// Inverse metric in the `h^{k l̄}` convention: `Σ_l h^{k l̄} h_{j l̄} = δ_kj`.
pub fn metric_inverse<S: Scalar>(h: &[[S; 2]; 2]) -> [[S; 2]; 2] {
    let inv = inv2(h);
    [[inv[0][0], inv[1][0]], [inv[0][1], inv[1][1]]]
}

/// Value part of a 2×2 array of scalars.
pub fn values2<S: Scalar>(m: &[[S; 2]; 2]) -> [[C64; 2]; 2] {
    [
        [m[0][0].value(), m[0][1].value()],
        [m[1][0].value(), m[1][1].value()],
    ]
}

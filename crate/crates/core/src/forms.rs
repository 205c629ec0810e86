//! Exterior algebra of complex forms on a surface.
//!
//! A form stores one coefficient per increasing multi-index, encoded as a
//! bitmask over the basis `dz¹, dz², dz̄¹, dz̄²` (bits 0..3). The coefficient of
//! `e^I` multiplies the wedge of the basis one-forms of `I` in increasing bit
//! order, which is equivalent to the `1/(p!q!)` full-array convention.
//!
//! The star operator is complex-linear and satisfies
//! `a ∧ star(conj b) = ⟨a, b⟩ vol` with `vol = ω²/2`.

use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{conj_dir, Differentiable, Scalar, C64, I};

pub const TOP: usize = 0b1111;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Form<S> {
    pub c: [S; 16],
}

pub type FormValue = Form<C64>;

#[inline]
fn popcount(i: usize) -> usize {
    (i as u32).count_ones() as usize
}

/// `(p, q)` of the basis element `e^I`.
#[inline]
pub fn bidegree_of(i: usize) -> (usize, usize) {
    (popcount(i & 0b0011), popcount(i & 0b1100))
}

const fn wedge_sign_const(i: usize, j: usize) -> i8 {
    if i & j != 0 {
        return 0;
    }
    let mut inversions = 0;
    let mut a = 0;
    while a < 4 {
        if i & (1 << a) != 0 {
            inversions += (j & ((1 << a) - 1)).count_ones();
        }
        a += 1;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

const WEDGE_SIGN: [[i8; 16]; 16] = {
    let mut t = [[0i8; 16]; 16];
    let mut i = 0;
    while i < 16 {
        let mut j = 0;
        while j < 16 {
            t[i][j] = wedge_sign_const(i, j);
            j += 1;
        }
        i += 1;
    }
    t
};

const fn bidegree_const(i: usize) -> (u32, u32) {
    ((i & 0b0011).count_ones(), (i & 0b1100).count_ones())
}

/// Number of pairs `(K, I)` with swapped bidegrees.
const N_PAIRS: usize = {
    let mut n = 0;
    let mut k = 0;
    while k < 16 {
        let mut i = 0;
        while i < 16 {
            let (p, q) = bidegree_const(k);
            let (p2, q2) = bidegree_const(i);
            if p == q2 && q == p2 {
                n += 1;
            }
            i += 1;
        }
        k += 1;
    }
    n
};

/// All `(K, I)` for which `B(e^K, e^I)` can be nonzero.
const PAIRS: [(usize, usize); N_PAIRS] = {
    let mut t = [(0, 0); N_PAIRS];
    let mut n = 0;
    let mut k = 0;
    while k < 16 {
        let mut i = 0;
        while i < 16 {
            let (p, q) = bidegree_const(k);
            let (p2, q2) = bidegree_const(i);
            if p == q2 && q == p2 {
                t[n] = (k, i);
                n += 1;
            }
            i += 1;
        }
        k += 1;
    }
    t
};

/// Sign of `e^I ∧ e^J` relative to `e^{I∪J}` (zero when they overlap).
#[inline]
pub fn wedge_sign(i: usize, j: usize) -> i32 {
    WEDGE_SIGN[i][j] as i32
}

/// `conj(e^I) = sign · e^{σ(I)}`.
fn conj_basis(i: usize) -> (usize, i32) {
    let mut acc = 0usize;
    let mut sign = 1;
    for a in 0..4 {
        if i & (1 << a) != 0 {
            let b = 1 << conj_dir(a);
            sign *= wedge_sign(acc, b);
            acc |= b;
        }
    }
    (acc, sign)
}

impl<S: Scalar> Form<S> {
    pub fn zero() -> Self {
        Self { c: [S::zero(); 16] }
    }

    pub fn basis(i: usize, coeff: S) -> Self {
        let mut f = Self::zero();
        f.c[i] = coeff;
        f
    }

    pub fn scalar(s: S) -> Self {
        Self::basis(0, s)
    }

    /// `Σ_a coeffs[a] e^a` for a one-form.
    pub fn one_form(coeffs: [S; 4]) -> Self {
        let mut f = Self::zero();
        for (a, c) in coeffs.into_iter().enumerate() {
            f.c[1 << a] = c;
        }
        f
    }

    /// `Σ coeffs[i][j] dz^i ∧ dz̄^j`.
    pub fn from_11(m: &[[S; 2]; 2]) -> Self {
        let mut f = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                f.c[(1 << i) | (1 << (2 + j))] = m[i][j];
            }
        }
        f
    }

    /// Coefficients of `dz^i ∧ dz̄^j`.
    pub fn to_11(&self) -> [[S; 2]; 2] {
        let mut m = [[S::zero(); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = self.c[(1 << i) | (1 << (2 + j))];
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut f = *self;
        for x in f.c.iter_mut() {
            *x = x.scale(s);
        }
        f
    }

    pub fn mul_scalar(&self, s: S) -> Self {
        let mut f = *self;
        for x in f.c.iter_mut() {
            *x = *x * s;
        }
        f
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..16 {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..16 {
                let s = WEDGE_SIGN[i][j];
                if s != 0 && !other.c[j].is_zero() {
                    let t = self.c[i] * other.c[j];
                    if s > 0 {
                        out.c[i | j] += t;
                    } else {
                        out.c[i | j] -= t;
                    }
                }
            }
        }
        out
    }

    pub fn conj_form(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..16 {
            let (j, s) = conj_basis(i);
            let v = self.c[i].conj();
            out.c[j] = if s > 0 { v } else { -v };
        }
        out
    }

    /// Component of bidegree `(p, q)`.
    pub fn component(&self, p: usize, q: usize) -> Self {
        let mut out = Self::zero();
        for i in 0..16 {
            if bidegree_of(i) == (p, q) {
                out.c[i] = self.c[i];
            }
        }
        out
    }

    /// Bidegrees with a nonzero coefficient value.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = (0..16)
            .filter(|&i| self.c[i].value().norm() > 0.0)
            .map(bidegree_of)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn values(&self) -> Form<C64> {
        Form { c: self.c.map(|x| x.value()) }
    }
}

impl Form<C64> {
    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, x| m.max(x.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }
}

impl<S: Scalar> Add for Form<S> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for (a, b) in self.c.iter_mut().zip(o.c) {
            *a += b;
        }
        self
    }
}

impl<S: Scalar> Sub for Form<S> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        for (a, b) in self.c.iter_mut().zip(o.c) {
            *a -= b;
        }
        self
    }
}

impl<S: Scalar> Neg for Form<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { c: self.c.map(|x| -x) }
    }
}

fn det<S: Scalar>(m: &[[S; 4]; 4], n: usize) -> S {
    match n {
        0 => S::one(),
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => {
            let mut s = S::zero();
            for col in 0..n {
                let mut minor = [[S::zero(); 4]; 4];
                for r in 1..n {
                    let mut cc = 0;
                    for c in 0..n {
                        if c != col {
                            minor[r - 1][cc] = m[r][c];
                            cc += 1;
                        }
                    }
                }
                let t = m[0][col] * det(&minor, n - 1);
                if col % 2 == 0 {
                    s += t;
                } else {
                    s -= t;
                }
            }
            s
        }
    }
}

fn bits(i: usize) -> ([usize; 4], usize) {
    let mut out = [0; 4];
    let mut n = 0;
    for a in 0..4 {
        if i & (1 << a) != 0 {
            out[n] = a;
            n += 1;
        }
    }
    (out, n)
}

/// Metric data needed by the star, inner product and Λ at one point.
#[derive(Debug, Clone, Copy)]
pub struct FormMetric<S> {
    pub hinv: [[S; 2]; 2],
    /// `B(e^K, e^I)` for the structurally nonzero pairs, in the order of
    /// the pair table; see [`FormMetric::gram`].
    pub gram_pairs: [S; N_PAIRS],
    pub omega: Form<S>,
    /// Coefficient of `e^{0123}` in `ω²/2`.
    pub vol: S,
    /// Bit `k` set when the degree-`k` block of `gram` was computed.
    pub degrees: u8,
}

pub const ALL_DEGREES: u8 = 0b11111;

impl<S: Scalar> FormMetric<S> {
    pub fn new(h: &[[S; 2]; 2], hinv: &[[S; 2]; 2]) -> Self {
        Self::with_degrees(h, hinv, ALL_DEGREES)
    }

    /// Builds only the Gram blocks of the degrees in the bitmask `degrees`.
    pub fn with_degrees(h: &[[S; 2]; 2], hinv: &[[S; 2]; 2], degrees: u8) -> Self {
        let z = S::zero();
        let mut ginv = [[z; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                ginv[i][2 + j] = hinv[i][j];
                ginv[2 + j][i] = hinv[i][j];
            }
        }
        let mut gram_pairs = [z; N_PAIRS];
        for (slot, &(k, i)) in gram_pairs.iter_mut().zip(PAIRS.iter()) {
            let (kb, n) = bits(k);
            if degrees & (1 << n) == 0 {
                continue;
            }
            let (ib, _) = bits(i);
            let mut m = [[z; 4]; 4];
            for r in 0..n {
                for c in 0..n {
                    m[r][c] = ginv[kb[r]][ib[c]];
                }
            }
            *slot = det(&m, n);
        }
        let omega = Form::from_11(h).scale(I);
        let vol = omega.wedge(&omega).c[TOP].scale(C64::new(0.5, 0.0));
        Self { hinv: *hinv, gram_pairs, omega, vol, degrees }
    }

    /// `B(e^K, e^I)`.
    pub fn gram(&self, k: usize, i: usize) -> S {
        PAIRS
            .iter()
            .position(|&p| p == (k, i))
            .map_or(S::zero(), |n| self.gram_pairs[n])
    }

    /// Complex-bilinear pairing `B(a, b)`.
    pub fn bilinear(&self, a: &Form<S>, b: &Form<S>) -> S {
        let mut s = S::zero();
        for (g, &(k, i)) in self.gram_pairs.iter().zip(PAIRS.iter()) {
            if !a.c[k].is_zero() && !b.c[i].is_zero() {
                debug_assert!(self.degrees & (1 << popcount(k)) != 0, "missing Gram block");
                s += a.c[k] * b.c[i] * *g;
            }
        }
        s
    }

    /// Hermitian pointwise inner product `⟨a, b⟩`.
    pub fn inner(&self, a: &Form<S>, b: &Form<S>) -> S {
        self.bilinear(a, &b.conj_form())
    }

    pub fn norm_sq(&self, a: &Form<S>) -> S {
        self.inner(a, a)
    }

    pub fn vol_form(&self) -> Form<S> {
        Form::basis(TOP, self.vol)
    }

    pub fn star(&self, a: &Form<S>) -> Form<S> {
        let mut out = Form::zero();
        for (g, &(k, i)) in self.gram_pairs.iter().zip(PAIRS.iter()) {
            if a.c[i].is_zero() {
                continue;
            }
            debug_assert!(self.degrees & (1 << popcount(i)) != 0, "missing Gram block");
            let kc = TOP & !k;
            let t = a.c[i] * *g * self.vol;
            if WEDGE_SIGN[k][kc] > 0 {
                out.c[kc] += t;
            } else {
                out.c[kc] -= t;
            }
        }
        out
    }

    /// Adjoint of `L = ω ∧ ·`, computed as `(−1)^k star(ω ∧ star α)` on the
    /// degree-`k` part.
    pub fn lambda(&self, a: &Form<S>) -> Form<S> {
        let mut out = Form::zero();
        for k in 0..=4 {
            let mut part = Form::zero();
            let mut empty = true;
            for i in 0..16 {
                if popcount(i) == k && !a.c[i].is_zero() {
                    part.c[i] = a.c[i];
                    empty = false;
                }
            }
            if empty {
                continue;
            }
            let r = self.star(&self.omega.wedge(&self.star(&part)));
            out = out + if k % 2 == 0 { r } else { -r };
        }
        out
    }

    /// `⟨a, b⟩` for forms of one common bidegree.
    pub fn inner_checked(&self, a: &Form<S>, b: &Form<S>) -> Result<S> {
        let (sa, sb) = (a.support(), b.support());
        if sa.len() > 1 || sb.len() > 1 || (!sa.is_empty() && !sb.is_empty() && sa != sb) {
            return Err(Error::Contract(format!("inner product of bidegrees {sa:?} and {sb:?}")));
        }
        Ok(self.inner(a, b))
    }

    /// Λ restricted to the bidegrees where it is used.
    pub fn lambda_checked(&self, a: &Form<S>) -> Result<Form<S>> {
        let ok = [(1, 1), (2, 1), (1, 2), (2, 2)];
        if let Some(bad) = a.support().into_iter().find(|b| !ok.contains(b)) {
            return Err(Error::Contract(format!("Λ is not defined here on bidegree {bad:?}")));
        }
        Ok(self.lambda(a))
    }
}

fn apply_d<S: Differentiable>(f: &Form<S>, dirs: std::ops::Range<usize>) -> Form<S::Lower> {
    let mut out = Form::<S::Lower>::zero();
    for i in 0..16 {
        for a in dirs.clone() {
            let bit = 1 << a;
            if i & bit != 0 {
                continue;
            }
            let d = f.c[i].partial(a);
            if wedge_sign(bit, i) > 0 {
                out.c[i | bit] += d;
            } else {
                out.c[i | bit] -= d;
            }
        }
    }
    out
}

/// `∂` on a form whose coefficients carry derivatives.
pub fn del<S: Differentiable>(f: &Form<S>) -> Form<S::Lower> {
    apply_d(f, 0..2)
}

/// `∂̄` on a form whose coefficients carry derivatives.
pub fn dbar<S: Differentiable>(f: &Form<S>) -> Form<S::Lower> {
    apply_d(f, 2..4)
}

/// `∂* = −star ∂̄ star`. `lower` is the metric at the order of the result.
pub fn del_star<S: Differentiable>(
    f: &Form<S>,
    metric: &FormMetric<S>,
    lower: &FormMetric<S::Lower>,
) -> Form<S::Lower> {
    -lower.star(&dbar(&metric.star(f)))
}

/// `∂̄* = −star ∂ star`.
pub fn dbar_star<S: Differentiable>(
    f: &Form<S>,
    metric: &FormMetric<S>,
    lower: &FormMetric<S::Lower>,
) -> Form<S::Lower> {
    -lower.star(&del(&metric.star(f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{Chart, Point};
    use crate::metrics::MetricField;
    use crate::scalar::metric_inverse;

    fn flat() -> FormMetric<C64> {
        let one = C64::new(1.0, 0.0);
        let z = C64::new(0.0, 0.0);
        let h = [[one, z], [z, one]];
        FormMetric::new(&h, &metric_inverse(&h))
    }

    fn generic() -> FormMetric<C64> {
        let h = [[C64::new(1.3, 0.0), C64::new(0.2, -0.4)], [C64::new(0.2, 0.4), C64::new(0.8, 0.0)]];
        FormMetric::new(&h, &metric_inverse(&h))
    }

    #[test]
    fn ordered_wedge_of_basis() {
        let e = |a: usize| Form::<C64>::basis(1 << a, C64::new(1.0, 0.0));
        // dz¹ ∧ dz̄¹ ∧ dz² ∧ dz̄² = −dz¹ ∧ dz² ∧ dz̄¹ ∧ dz̄²
        let w = e(0).wedge(&e(2)).wedge(&e(1)).wedge(&e(3));
        assert_eq!(w.c[TOP], C64::new(-1.0, 0.0));
        assert_eq!(e(0).wedge(&e(1)).wedge(&e(2)).wedge(&e(3)).c[TOP], C64::new(1.0, 0.0));
    }

    #[test]
    fn flat_volume_density_and_anchors() {
        let m = flat();
        // dz¹dz²dz̄¹dz̄² = 4 dx¹dx³dx²dx⁴, so the Lebesgue density is 4·vol.
        assert!((m.vol - 1.0).norm() < 1e-15);
        assert!((generic().vol - (1.3 * 0.8 - 0.2)).norm() < 1e-14);
        assert!((m.norm_sq(&m.omega) - 2.0).norm() < 1e-15);
        assert!((m.lambda(&m.omega).c[0] - 2.0).norm() < 1e-15);
        assert!(m.star(&m.omega).max_abs_diff(&m.omega) < 1e-15);
        assert!(m.star(&Form::scalar(C64::new(1.0, 0.0))).max_abs_diff(&m.vol_form()) < 1e-15);
        assert!((m.star(&m.vol_form()).c[0] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn anchors_on_generic_metric() {
        let m = generic();
        assert!((m.norm_sq(&m.omega) - 2.0).norm() < 1e-14);
        assert!((m.lambda(&m.omega).c[0] - 2.0).norm() < 1e-14);
        assert!(m.star(&m.omega).max_abs_diff(&m.omega) < 1e-14);
        assert!((m.norm_sq(&m.vol_form()) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn lambda_of_zero_is_zero() {
        assert_eq!(generic().lambda(&Form::zero()).max_abs(), 0.0);
    }

    #[test]
    fn bidegree_checks() {
        let m = generic();
        let a = Form::basis(0b0001, C64::new(1.0, 0.0));
        let b = Form::basis(0b0100, C64::new(1.0, 0.0));
        assert!(m.inner_checked(&a, &b).is_err());
        assert!(m.lambda_checked(&a).is_err());
        assert!(m.lambda_checked(&m.omega).is_ok());
    }

    #[test]
    fn torsion_form_from_lambda_of_del_omega() {
        // √−1 Λ(∂ω) = −√−1 dz¹ at (1,0) on the standard Hopf metric.
        let mf = MetricField::hopf_standard();
        let p = Point::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), Chart::Hopf);
        let mj = mf.metric_jet(&p).unwrap();
        let omega = Form::from_11(&mj.h).scale(I);
        let d_omega = del(&omega).values();
        let fm = FormMetric::new(&mj.h_value(), &mj.hinv_value());
        let r = fm.lambda(&d_omega).scale(I);
        let want = Form::basis(0b0001, C64::new(0.0, -1.0));
        assert!(r.max_abs_diff(&want) < 1e-14, "{r:?}");
    }

    #[test]
    fn d_squared_vanishes() {
        let mf = MetricField::torus_perturbed(0.3).unwrap();
        let p = Point::from_real([0.1, 0.7, 0.3, 0.55], Chart::Torus);
        let mj = mf.metric_jet(&p).unwrap();
        let omega = Form::from_11(&mj.h).scale(I);
        assert!(del(&del(&omega)).max_abs() < 1e-14);
        assert!(dbar(&dbar(&omega)).max_abs() < 1e-14);
        let a = del(&dbar(&omega));
        let b = dbar(&del(&omega));
        assert!((a + b).max_abs() < 1e-14);
    }
}

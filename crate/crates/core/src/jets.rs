//! Second-order Wirtinger jets on C² and a finite-difference fallback.
//!
//! Directions are ordered `z¹, z², z̄¹, z̄²`. Real coordinates follow
//! `z¹ = x¹ + i x³`, `z² = x² + i x⁴` and are stored as `[x¹, x², x³, x⁴]`.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{conj_dir, Differentiable, Scalar, C64, DIRS, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    Torus,
    Hopf,
    Cp2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub z1: C64,
    pub z2: C64,
    pub chart: Chart,
}

impl Point {
    pub fn new(z1: C64, z2: C64, chart: Chart) -> Self {
        Self { z1, z2, chart }
    }

    pub fn from_real(x: [f64; 4], chart: Chart) -> Self {
        Self::new(C64::new(x[0], x[2]), C64::new(x[1], x[3]), chart)
    }

    pub fn real(&self) -> [f64; 4] {
        [self.z1.re, self.z2.re, self.z1.im, self.z2.im]
    }

    /// `|z¹|² + |z²|²`.
    pub fn rho(&self) -> f64 {
        self.z1.norm_sqr() + self.z2.norm_sqr()
    }

    /// Checks the chart invariant of the model this point belongs to.
    pub fn validate(&self) -> Result<()> {
        let finite = self.real().iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Contract(format!("non-finite point {self}")));
        }
        if self.chart == Chart::Hopf {
            let r = self.rho();
            // Quadrature nodes sit on the closed shell, so allow a rounding margin.
            if !(1.0 - 1e-12..=4.0 + 1e-12).contains(&r) {
                return Err(Error::Contract(format!(
                    "hopf point outside fundamental shell 1 <= rho < 4: rho = {r}"
                )));
            }
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.z1 * s, self.z2 * s, self.chart)
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({:.6}{:+.6}i, {:.6}{:+.6}i)",
            self.z1.re, self.z1.im, self.z2.re, self.z2.im
        )
    }
}

/// Value and first Wirtinger partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet1 {
    pub value: C64,
    pub d: [C64; DIRS],
}

/// Value, first and second Wirtinger partials. `dd` is stored as a full
/// symmetric 4×4 array (partials commute).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: C64,
    pub d: [C64; DIRS],
    pub dd: [[C64; DIRS]; DIRS],
}

const Z: C64 = C64::new(0.0, 0.0);

impl Jet1 {
    pub fn constant(c: C64) -> Self {
        Self { value: c, d: [Z; DIRS] }
    }

    /// `f(g)` for holomorphic `f` given `f(g₀)` and `f'(g₀)`.
    pub fn compose(&self, f0: C64, f1: C64) -> Self {
        let mut d = [Z; DIRS];
        for a in 0..DIRS {
            d[a] = f1 * self.d[a];
        }
        Self { value: f0, d }
    }
}

impl Jet2 {
    pub fn constant(c: C64) -> Self {
        Self { value: c, d: [Z; DIRS], dd: [[Z; DIRS]; DIRS] }
    }

    /// Jet of the coordinate function for direction `a` (z¹, z², z̄¹ or z̄²).
    pub fn coordinate(p: &Point, a: usize) -> Self {
        let value = match a {
            0 => p.z1,
            1 => p.z2,
            2 => p.z1.conj(),
            3 => p.z2.conj(),
            _ => panic!("direction index out of range: {a}"),
        };
        let mut j = Self::constant(value);
        j.d[a] = C64::new(1.0, 0.0);
        j
    }

    /// Jet of the real coordinate `x^m` (m = 0..4 for x¹, x², x³, x⁴).
    pub fn real_coordinate(p: &Point, m: usize) -> Self {
        let k = m % 2;
        let z = Self::coordinate(p, k);
        let zb = Self::coordinate(p, k + 2);
        if m < 2 {
            (z + zb).scale(C64::new(0.5, 0.0))
        } else {
            (z - zb).scale(-I * 0.5)
        }
    }

    /// `f(g)` for holomorphic `f` given `f(g₀)`, `f'(g₀)`, `f''(g₀)`.
    pub fn compose(&self, f0: C64, f1: C64, f2: C64) -> Self {
        let mut out = Self::constant(f0);
        for a in 0..DIRS {
            out.d[a] = f1 * self.d[a];
            for b in 0..DIRS {
                out.dd[a][b] = f2 * self.d[a] * self.d[b] + f1 * self.dd[a][b];
            }
        }
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    pub fn ln(&self) -> Self {
        let v = self.value;
        self.compose(v.ln(), v.inv(), -(v * v).inv())
    }

    pub fn cos(&self) -> Self {
        let v = self.value;
        self.compose(v.cos(), -v.sin(), -v.cos())
    }

    pub fn sin(&self) -> Self {
        let v = self.value;
        self.compose(v.sin(), v.cos(), -v.sin())
    }

    pub fn try_recip(&self) -> Result<Self> {
        if self.value.norm() == 0.0 {
            return Err(Error::SingularInput("reciprocal of a jet with zero value".into()));
        }
        Ok(self.recip())
    }

    /// First-order jet of the value (drops second partials).
    pub fn value_jet(&self) -> Jet1 {
        Jet1 { value: self.value, d: self.d }
    }

    /// First-order jet of the partial in direction `a`.
    pub fn partial_jet(&self, a: usize) -> Jet1 {
        Jet1 { value: self.d[a], d: self.dd[a] }
    }

    /// Largest deviation from symmetry of the second partials.
    pub fn symmetry_defect(&self) -> f64 {
        let mut m: f64 = 0.0;
        for a in 0..DIRS {
            for b in 0..DIRS {
                m = m.max((self.dd[a][b] - self.dd[b][a]).norm());
            }
        }
        m
    }

    /// Largest deviation from the conjugation relations obeyed by the jet of
    /// a real-valued function.
    pub fn reality_defect(&self) -> f64 {
        let mut m = self.value.im.abs();
        for a in 0..DIRS {
            m = m.max((self.d[conj_dir(a)] - self.d[a].conj()).norm());
            for b in 0..DIRS {
                m = m.max((self.dd[conj_dir(a)][conj_dir(b)] - self.dd[a][b].conj()).norm());
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = (self.value - other.value).norm();
        for a in 0..DIRS {
            m = m.max((self.d[a] - other.d[a]).norm());
            for b in 0..DIRS {
                m = m.max((self.dd[a][b] - other.dd[a][b]).norm());
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&Self::constant(Z))
    }
}

impl Add for Jet1 {
    type Output = Self;
    #[inline]
    fn add(mut self, o: Self) -> Self {
        self += o;
        self
    }
}
impl AddAssign for Jet1 {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        self.value += o.value;
        for a in 0..DIRS {
            self.d[a] += o.d[a];
        }
    }
}
impl Sub for Jet1 {
    type Output = Self;
    #[inline]
    fn sub(mut self, o: Self) -> Self {
        self -= o;
        self
    }
}
impl SubAssign for Jet1 {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        self.value -= o.value;
        for a in 0..DIRS {
            self.d[a] -= o.d[a];
        }
    }
}
impl Neg for Jet1 {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self { value: -self.value, d: self.d.map(|x| -x) }
    }
}
impl Mul for Jet1 {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        let mut d = [Z; DIRS];
        for a in 0..DIRS {
            d[a] = self.d[a] * o.value + self.value * o.d[a];
        }
        Self { value: self.value * o.value, d }
    }
}

impl Scalar for Jet1 {
    #[inline]
    fn constant(c: C64) -> Self {
        Jet1::constant(c)
    }
    #[inline]
    fn value(&self) -> C64 {
        self.value
    }
    #[inline]
    fn conj(&self) -> Self {
        let mut d = [Z; DIRS];
        for a in 0..DIRS {
            d[a] = self.d[conj_dir(a)].conj();
        }
        Self { value: self.value.conj(), d }
    }
    #[inline]
    fn recip(&self) -> Self {
        let r = self.value.inv();
        self.compose(r, -r * r)
    }
    #[inline]
    fn scale(&self, c: C64) -> Self {
        Self { value: self.value * c, d: self.d.map(|x| x * c) }
    }
}

impl Differentiable for Jet1 {
    type Lower = C64;
    #[inline]
    fn partial(&self, dir: usize) -> C64 {
        self.d[dir]
    }
}

impl Add for Jet2 {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self += o;
        self
    }
}
impl AddAssign for Jet2 {
    fn add_assign(&mut self, o: Self) {
        self.value += o.value;
        for a in 0..DIRS {
            self.d[a] += o.d[a];
            for b in 0..DIRS {
                self.dd[a][b] += o.dd[a][b];
            }
        }
    }
}
impl Sub for Jet2 {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        self -= o;
        self
    }
}
impl SubAssign for Jet2 {
    fn sub_assign(&mut self, o: Self) {
        self.value -= o.value;
        for a in 0..DIRS {
            self.d[a] -= o.d[a];
            for b in 0..DIRS {
                self.dd[a][b] -= o.dd[a][b];
            }
        }
    }
}
impl Neg for Jet2 {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }
}
impl Mul for Jet2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Self::constant(self.value * o.value);
        for a in 0..DIRS {
            out.d[a] = self.d[a] * o.value + self.value * o.d[a];
            for b in 0..DIRS {
                out.dd[a][b] = self.dd[a][b] * o.value
                    + self.d[a] * o.d[b]
                    + self.d[b] * o.d[a]
                    + self.value * o.dd[a][b];
            }
        }
        out
    }
}

impl Scalar for Jet2 {
    fn constant(c: C64) -> Self {
        Jet2::constant(c)
    }
    fn value(&self) -> C64 {
        self.value
    }
    fn conj(&self) -> Self {
        let mut out = Self::constant(self.value.conj());
        for a in 0..DIRS {
            out.d[a] = self.d[conj_dir(a)].conj();
            for b in 0..DIRS {
                out.dd[a][b] = self.dd[conj_dir(a)][conj_dir(b)].conj();
            }
        }
        out
    }
    fn recip(&self) -> Self {
        let r = self.value.inv();
        self.compose(r, -r * r, 2.0 * r * r * r)
    }
    fn scale(&self, c: C64) -> Self {
        let mut out = *self;
        out.value *= c;
        for a in 0..DIRS {
            out.d[a] *= c;
            for b in 0..DIRS {
                out.dd[a][b] *= c;
            }
        }
        out
    }
}

impl Differentiable for Jet2 {
    type Lower = Jet1;
    fn partial(&self, dir: usize) -> Jet1 {
        self.partial_jet(dir)
    }
}

pub fn jet_add(a: &Jet2, b: &Jet2) -> Jet2 {
    *a + *b
}

pub fn jet_mul(a: &Jet2, b: &Jet2) -> Jet2 {
    *a * *b
}

pub fn jet_scalar_inv(a: &Jet2) -> Result<Jet2> {
    a.try_recip()
}

/// Default finite-difference step at `p`.
pub fn default_step(p: &Point) -> f64 {
    1e-4 * (1.0 + p.rho().sqrt())
}

/// Coefficients mapping real partials `∂/∂x^m` to Wirtinger partials.
fn wirtinger_matrix() -> [[C64; 4]; DIRS] {
    let h = C64::new(0.5, 0.0);
    let ih = C64::new(0.0, 0.5);
    let mut w = [[Z; 4]; DIRS];
    for k in 0..2 {
        w[k][k] = h;
        w[k][k + 2] = -ih;
        w[k + 2][k] = h;
        w[k + 2][k + 2] = ih;
    }
    w
}

fn central_differences<F>(f: &F, x: [f64; 4], s: f64) -> (C64, [C64; 4], [[C64; 4]; 4])
where
    F: Fn([f64; 4]) -> C64,
{
    let at = |da: &[(usize, f64)]| {
        let mut y = x;
        for &(m, t) in da {
            y[m] += t;
        }
        f(y)
    };
    let f0 = f(x);
    let mut g = [Z; 4];
    let mut hess = [[Z; 4]; 4];
    for m in 0..4 {
        let fp = at(&[(m, s)]);
        let fm = at(&[(m, -s)]);
        g[m] = (fp - fm) / (2.0 * s);
        hess[m][m] = (fp - 2.0 * f0 + fm) / (s * s);
        for n in (m + 1)..4 {
            let v = (at(&[(m, s), (n, s)]) - at(&[(m, s), (n, -s)]) - at(&[(m, -s), (n, s)])
                + at(&[(m, -s), (n, -s)]))
                / (4.0 * s * s);
            hess[m][n] = v;
            hess[n][m] = v;
        }
    }
    (f0, g, hess)
}

/// Finite-difference 2-jet of a scalar field given on real coordinates,
/// Richardson-extrapolated over steps `step` and `step/2`.
pub fn fd_jet2<F>(f: F, p: &Point, step: f64) -> Jet2
where
    F: Fn([f64; 4]) -> C64,
{
    let x = p.real();
    let (f0, g1, h1) = central_differences(&f, x, step);
    let (_, g2, h2) = central_differences(&f, x, step * 0.5);
    let rich = |a: C64, b: C64| (4.0 * b - a) / 3.0;
    let w = wirtinger_matrix();
    let mut out = Jet2::constant(f0);
    for a in 0..DIRS {
        let mut d = Z;
        for m in 0..4 {
            d += w[a][m] * rich(g1[m], g2[m]);
        }
        out.d[a] = d;
        for b in 0..DIRS {
            let mut dd = Z;
            for m in 0..4 {
                for n in 0..4 {
                    dd += w[a][m] * w[b][n] * rich(h1[m][n], h2[m][n]);
                }
            }
            out.dd[a][b] = dd;
        }
    }
    out
}

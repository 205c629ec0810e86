//! Tensor-product quadrature on the three compact models and deterministic
//! integration against `ω²/2 = 4 det h · dLebesgue`.
//!
//! Nodes are evaluated in fixed-size chunks (in parallel when rayon has more
//! than one worker); each chunk is reduced with Neumaier compensation and the
//! chunk sums are combined in chunk order, so results do not depend on the
//! number of workers.

use std::f64::consts::{FRAC_PI_2, LN_2, PI, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::forms::FormValue;
use crate::geometry::{term, Densities, PointGeometry};
use crate::jets::{Chart, Point};
use crate::metrics::{MetricField, MetricJet};
use crate::sampling::{cp2_point, hopf_point};
use crate::scalar::C64;

pub const MIN_RESOLUTION: usize = 4;
const CHUNK: usize = 4096;

/// Gauss-Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    for k in 0..n {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = ((4 * k + 3) as f64 * PI / (4 * n + 2) as f64).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 0 { 0.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((mid - half * x, half * w));
    }
    out
}

#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub chart: Chart,
    pub n: usize,
    pub nodes: Vec<Point>,
    /// Quadrature weight times the Lebesgue-to-chart Jacobian.
    pub weights: Vec<f64>,
    /// Shift of the `log r` window on the Hopf model, in units of `ln 2`.
    pub hopf_window: f64,
}

impl QuadratureGrid {
    pub fn build(chart: Chart, n: usize) -> Result<Self> {
        Self::build_with_window(chart, n, 0.0)
    }

    /// Hopf grids may be placed on a shifted fundamental domain
    /// `e^{w ln 2} ≤ |z| < e^{(w+1) ln 2}`; other models ignore `window`.
    pub fn build_with_window(chart: Chart, n: usize, window: f64) -> Result<Self> {
        if n < MIN_RESOLUTION {
            return Err(Error::Resolution(n));
        }
        let mut nodes = Vec::with_capacity(n.pow(4));
        let mut weights = Vec::with_capacity(n.pow(4));
        let uniform = |k: usize| TAU * k as f64 / n as f64;
        match chart {
            Chart::Torus => {
                let w = 1.0 / (n.pow(4) as f64);
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            for d in 0..n {
                                let x = [a, b, c, d].map(|k| k as f64 / n as f64);
                                nodes.push(Point::from_real(x, Chart::Torus));
                                weights.push(w);
                            }
                        }
                    }
                }
            }
            Chart::Hopf => {
                let s0 = window * LN_2;
                let radial = gauss_legendre(n, s0, s0 + LN_2);
                let polar = gauss_legendre(n, 0.0, FRAC_PI_2);
                let dphi = TAU / n as f64;
                for &(s, ws) in &radial {
                    for &(al, wa) in &polar {
                        // dLebesgue = r³ dr · sinα cosα dα dβ dγ with dr = r ds
                        let jac = (4.0 * s).exp() * al.sin() * al.cos();
                        for b in 0..n {
                            for c in 0..n {
                                nodes.push(hopf_point(s, al, uniform(b), uniform(c)));
                                weights.push(ws * wa * dphi * dphi * jac);
                            }
                        }
                    }
                }
            }
            Chart::Cp2 => {
                let radial = gauss_legendre(n, 0.0, FRAC_PI_2);
                let polar = gauss_legendre(n, 0.0, FRAC_PI_2);
                let dphi = TAU / n as f64;
                for &(th, wt) in &radial {
                    let r = th.tan();
                    let sec2 = 1.0 / th.cos().powi(2);
                    for &(al, wa) in &polar {
                        let jac = r.powi(3) * sec2 * al.sin() * al.cos();
                        for b in 0..n {
                            for c in 0..n {
                                nodes.push(cp2_point(th, al, uniform(b), uniform(c)));
                                weights.push(wt * wa * dphi * dphi * jac);
                            }
                        }
                    }
                }
            }
        }
        Ok(Self { chart, n, nodes, weights, hopf_window: window })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub(crate) fn metric_jet(&self, m: &MetricField, p: &Point) -> Result<MetricJet> {
        if self.chart != m.model() {
            return Err(Error::Contract(format!(
                "grid model {:?} does not match metric model {:?}",
                self.chart,
                m.model()
            )));
        }
        if self.hopf_window != 0.0 {
            // Shifted windows leave the reference shell; the metric formulas
            // are defined on all of C² \ {0}.
            MetricJet::from_h(m.h_jets(p), p)
        } else {
            m.metric_jet(p)
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Integrates `width` complex integrands at once:
/// `Σ w · f(node) · 4 det h(node)`.
pub fn integrate_many<F>(
    grid: &QuadratureGrid,
    m: &MetricField,
    width: usize,
    f: F,
) -> Result<Vec<C64>>
where
    F: Fn(&MetricJet) -> Result<Vec<C64>> + Sync,
{
    let n_chunks = grid.len().div_ceil(CHUNK);
    let chunk_sums: Vec<Result<Vec<(CompensatedSum, CompensatedSum)>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![(CompensatedSum::default(), CompensatedSum::default()); width];
            let end = ((c + 1) * CHUNK).min(grid.len());
            for idx in c * CHUNK..end {
                let p = &grid.nodes[idx];
                let mj = grid.metric_jet(m, p)?;
                let vals = f(&mj)?;
                let w = grid.weights[idx] * 4.0 * mj.det.value.re;
                for (k, v) in vals.iter().enumerate() {
                    if !(v.re.is_finite() && v.im.is_finite()) || !w.is_finite() {
                        return Err(Error::NonFinite { node: idx, location: p.to_string() });
                    }
                    acc[k].0.add(w * v.re);
                    acc[k].1.add(w * v.im);
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![(CompensatedSum::default(), CompensatedSum::default()); width];
    for chunk in chunk_sums {
        for (t, c) in total.iter_mut().zip(chunk?) {
            t.0.add(c.0.value());
            t.1.add(c.1.value());
        }
    }
    Ok(total.iter().map(|(re, im)| C64::new(re.value(), im.value())).collect())
}

/// A quadrature value with its two-resolution error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: C64,
    pub error: f64,
    pub n: usize,
    /// Resolution of the comparison run.
    pub n_ref: usize,
}

/// The comparison resolution for the error estimate: `N/2` when that is
/// still a valid grid, otherwise `2N`.
pub fn reference_resolution(n: usize) -> usize {
    if n / 2 >= MIN_RESOLUTION {
        n / 2
    } else {
        2 * n
    }
}

pub fn integrate<F>(m: &MetricField, n: usize, f: F) -> Result<Integral>
where
    F: Fn(&MetricJet) -> Result<C64> + Sync,
{
    let one = |mj: &MetricJet| f(mj).map(|v| vec![v]);
    let g = QuadratureGrid::build(m.model(), n)?;
    let value = integrate_many(&g, m, 1, one)?[0];
    let n_ref = reference_resolution(n);
    let g2 = QuadratureGrid::build(m.model(), n_ref)?;
    let coarse = integrate_many(&g2, m, 1, one)?[0];
    Ok(Integral { value, error: (value - coarse).norm(), n, n_ref })
}

pub fn volume(m: &MetricField, n: usize) -> Result<Integral> {
    integrate(m, n, |_| Ok(C64::new(1.0, 0.0)))
}

/// Integrals of every entry of [`Densities`] on one grid.
pub fn integrate_densities(grid: &QuadratureGrid, m: &MetricField) -> Result<Densities> {
    let v = integrate_many(grid, m, term::COUNT, |mj| {
        Ok(PointGeometry::from_jet(*mj).densities().v.to_vec())
    })?;
    let mut out = Densities { v: [C64::new(0.0, 0.0); term::COUNT] };
    out.v.copy_from_slice(&v);
    Ok(out)
}

/// Integrated densities at `N` and at the reference resolution.
#[derive(Debug, Clone, Copy)]
pub struct DensityIntegrals {
    pub fine: Densities,
    pub coarse: Densities,
    pub n: usize,
    pub n_ref: usize,
}

impl DensityIntegrals {
    pub fn compute(m: &MetricField, n: usize) -> Result<Self> {
        let fine = integrate_densities(&QuadratureGrid::build(m.model(), n)?, m)?;
        let n_ref = reference_resolution(n);
        let coarse = integrate_densities(&QuadratureGrid::build(m.model(), n_ref)?, m)?;
        Ok(Self { fine, coarse, n, n_ref })
    }
}

/// `(A, B) = ∫ ⟨A, B⟩ ω²/2` for two form fields of one common bidegree.
pub fn l2_pairing<A, B>(grid: &QuadratureGrid, m: &MetricField, a: A, b: B) -> Result<C64>
where
    A: Fn(&PointGeometry) -> FormValue + Sync,
    B: Fn(&PointGeometry) -> FormValue + Sync,
{
    let v = integrate_many(grid, m, 1, |mj| {
        let g = PointGeometry::from_jet(*mj);
        let (fa, fb) = (a(&g), b(&g));
        Ok(vec![g.fm.inner_checked(&fa, &fb)?])
    })?;
    Ok(v[0])
}

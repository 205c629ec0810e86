//! Chart parameterisations and seeded point sampling.
//!
//! Every model is parameterised by the unit cube `[0,1)^4`. Sampling draws
//! cube coordinates from ChaCha8 seeded with the user seed, so a recorded seed
//! reproduces the exact point stream.

use std::f64::consts::{FRAC_PI_2, LN_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::jets::{Chart, Point};
use crate::scalar::C64;

/// Name of the generator used by [`sample_points`], recorded in reports.
pub const PRNG_NAME: &str = "ChaCha8";

/// Largest polar angle used when sampling the CP² chart (keeps |z| below ~13).
const CP2_THETA_MAX: f64 = 0.95 * FRAC_PI_2;

/// Hopf coordinates: `z¹ = r sin α e^{iβ}`, `z² = r cos α e^{iγ}`, `r = e^s`.
pub fn hopf_point(s: f64, alpha: f64, beta: f64, gamma: f64) -> Point {
    let r = s.exp();
    Point::new(
        C64::from_polar(r * alpha.sin(), beta),
        C64::from_polar(r * alpha.cos(), gamma),
        Chart::Hopf,
    )
}

/// CP² affine chart with `|z| = tan θ`.
pub fn cp2_point(theta: f64, alpha: f64, beta: f64, gamma: f64) -> Point {
    let r = theta.tan();
    Point::new(
        C64::from_polar(r * alpha.sin(), beta),
        C64::from_polar(r * alpha.cos(), gamma),
        Chart::Cp2,
    )
}

/// Maps unit-cube coordinates onto the chart of `chart`.
pub fn point_from_unit(chart: Chart, u: [f64; 4]) -> Point {
    match chart {
        Chart::Torus => Point::from_real(u, Chart::Torus),
        Chart::Hopf => hopf_point(u[0] * LN_2, u[1] * FRAC_PI_2, u[2] * TAU, u[3] * TAU),
        Chart::Cp2 => cp2_point(u[0] * CP2_THETA_MAX, u[1] * FRAC_PI_2, u[2] * TAU, u[3] * TAU),
    }
}

pub fn sample_points(chart: Chart, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u: [f64; 4] = [rng.gen(), rng.gen(), rng.gen(), rng.gen()];
            point_from_unit(chart, u)
        })
        .collect()
}

/// Uniform `n⁴` lattice of cell centres in the unit cube, mapped to the chart.
pub fn lattice_points(chart: Chart, n: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(n.pow(4));
    let c = |i: usize| (i as f64 + 0.5) / n as f64;
    for a in 0..n {
        for b in 0..n {
            for c2 in 0..n {
                for d in 0..n {
                    out.push(point_from_unit(chart, [c(a), c(b), c(c2), c(d)]));
                }
            }
        }
    }
    out
}

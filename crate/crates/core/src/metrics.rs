//! Builtin Hermitian metrics on the torus, Hopf surface and CP².
//!
//! `h[i][j]` stores `h_{i j̄}`. The inverse follows the contraction convention
//! of [`metric_inverse`]: `Σ_l hinv[k][l] h[j][l] = δ_kj`.

use std::f64::consts::{LN_2, TAU};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::jets::{fd_jet2, default_step, Chart, Jet1, Jet2, Point};
use crate::sampling::lattice_points;
use crate::scalar::{metric_inverse, Scalar, C64, I};

pub const TORUS_EPS_MAX: f64 = 0.4;
pub const CONFORMAL_EPS_MAX: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    TorusFlat,
    /// `phase` shifts the four trigonometric arguments; zero unless a nonzero
    /// seed was given.
    TorusPerturbed { eps: f64, seed: u64, phase: [f64; 4] },
    HopfStandard,
    HopfConformal { eps: f64 },
    FubiniStudy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetMode {
    Analytic,
    Fd,
}

impl JetMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "fd" => Ok(Self::Fd),
            _ => Err(Error::Usage(format!("unknown jet mode `{s}` (expected analytic or fd)"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Analytic => "analytic",
            Self::Fd => "fd",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricField {
    pub family: Family,
}

/// Names accepted by [`MetricField::parse`], with the keys each one takes.
pub const BUILTIN: &[(&str, &str, &str)] = &[
    ("torus-flat", "", "flat metric h = δ on the unit torus"),
    (
        "torus-perturbed",
        "eps (0..=0.4), seed",
        "trigonometric perturbation of the flat torus; non-Kähler, pluriclosed",
    ),
    ("hopf-standard", "", "h = δ/ρ on (C²∖0)/(z ~ 2z); SB-flat"),
    (
        "hopf-conformal",
        "eps (|eps| <= 1)",
        "exp(eps cos(2π log ρ / log 4)) δ/ρ on the Hopf surface",
    ),
    ("fubini-study", "", "Fubini-Study metric on CP² in the affine chart"),
];

fn spec_err(token: &str, reason: impl Into<String>) -> Error {
    Error::MetricSpec { token: token.to_string(), reason: reason.into() }
}

fn parse_f64(token: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| spec_err(token, "expected a finite number"))
}

impl MetricField {
    pub fn new(family: Family) -> Result<Self> {
        match family {
            Family::TorusPerturbed { eps, .. } if !(0.0..=TORUS_EPS_MAX).contains(&eps) => {
                Err(spec_err(&format!("eps={eps}"), format!("eps must lie in [0, {TORUS_EPS_MAX}]")))
            }
            Family::HopfConformal { eps } if eps.abs() > CONFORMAL_EPS_MAX || !eps.is_finite() => {
                Err(spec_err(&format!("eps={eps}"), format!("|eps| must be at most {CONFORMAL_EPS_MAX}")))
            }
            _ => Ok(Self { family }),
        }
    }

    pub fn torus_flat() -> Self {
        Self { family: Family::TorusFlat }
    }

    pub fn torus_perturbed(eps: f64) -> Result<Self> {
        Self::new(Family::TorusPerturbed { eps, seed: 0, phase: [0.0; 4] })
    }

    pub fn hopf_standard() -> Self {
        Self { family: Family::HopfStandard }
    }

    pub fn hopf_conformal(eps: f64) -> Result<Self> {
        Self::new(Family::HopfConformal { eps })
    }

    pub fn fubini_study() -> Self {
        Self { family: Family::FubiniStudy }
    }

    /// Parses `name[:key=value[,key=value]]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, rest) = match spec.split_once(':') {
            Some((n, r)) => (n.trim(), Some(r)),
            None => (spec.trim(), None),
        };
        let mut kv = Vec::new();
        if let Some(rest) = rest {
            for tok in rest.split(',') {
                let (k, v) = tok
                    .split_once('=')
                    .ok_or_else(|| spec_err(tok, "expected key=value"))?;
                kv.push((tok, k.trim(), v.trim()));
            }
        }
        let reject_all = |kv: &[(&str, &str, &str)]| match kv.first() {
            Some((tok, k, _)) => Err(spec_err(tok, format!("`{name}` takes no key `{k}`"))),
            None => Ok(()),
        };
        match name {
            "torus-flat" => {
                reject_all(&kv)?;
                Ok(Self::torus_flat())
            }
            "hopf-standard" => {
                reject_all(&kv)?;
                Ok(Self::hopf_standard())
            }
            "fubini-study" => {
                reject_all(&kv)?;
                Ok(Self::fubini_study())
            }
            "torus-perturbed" => {
                let mut eps = 0.1;
                let mut seed = 0u64;
                for (tok, k, v) in kv {
                    match k {
                        "eps" => {
                            eps = parse_f64(tok, v)?;
                            if !(0.0..=TORUS_EPS_MAX).contains(&eps) {
                                return Err(spec_err(tok, format!("eps must lie in [0, {TORUS_EPS_MAX}]")));
                            }
                        }
                        "seed" => seed = v.parse().map_err(|_| spec_err(tok, "expected an unsigned integer"))?,
                        _ => return Err(spec_err(tok, format!("unknown key `{k}`"))),
                    }
                }
                let phase = if seed == 0 {
                    [0.0; 4]
                } else {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    [rng.gen(), rng.gen(), rng.gen(), rng.gen()]
                };
                Self::new(Family::TorusPerturbed { eps, seed, phase })
            }
            "hopf-conformal" => {
                let mut eps = 0.05;
                for (tok, k, v) in kv {
                    match k {
                        "eps" => {
                            eps = parse_f64(tok, v)?;
                            if eps.abs() > CONFORMAL_EPS_MAX {
                                return Err(spec_err(tok, format!("|eps| must be at most {CONFORMAL_EPS_MAX}")));
                            }
                        }
                        _ => return Err(spec_err(tok, format!("unknown key `{k}`"))),
                    }
                }
                Self::new(Family::HopfConformal { eps })
            }
            _ => Err(spec_err(name, "unknown metric family (see list-metrics)")),
        }
    }

    pub fn model(&self) -> Chart {
        match self.family {
            Family::TorusFlat | Family::TorusPerturbed { .. } => Chart::Torus,
            Family::HopfStandard | Family::HopfConformal { .. } => Chart::Hopf,
            Family::FubiniStudy => Chart::Cp2,
        }
    }

    /// Canonical textual descriptor, parseable by [`MetricField::parse`].
    pub fn descriptor(&self) -> String {
        match self.family {
            Family::TorusFlat => "torus-flat".into(),
            Family::TorusPerturbed { eps, seed: 0, .. } => format!("torus-perturbed:eps={eps}"),
            Family::TorusPerturbed { eps, seed, .. } => format!("torus-perturbed:eps={eps},seed={seed}"),
            Family::HopfStandard => "hopf-standard".into(),
            Family::HopfConformal { eps } => format!("hopf-conformal:eps={eps}"),
            Family::FubiniStudy => "fubini-study".into(),
        }
    }

    /// True when the metric is Kähler by construction.
    pub fn is_kahler_by_construction(&self) -> bool {
        matches!(
            self.family,
            Family::TorusFlat | Family::FubiniStudy | Family::TorusPerturbed { eps: 0.0, .. }
        )
    }

    /// Analytic 2-jets of the components `h_{i j̄}` at `p`.
    pub fn h_jets(&self, p: &Point) -> [[Jet2; 2]; 2] {
        let one = Jet2::one();
        let zero = Jet2::zero();
        match self.family {
            Family::TorusFlat => [[one, zero], [zero, one]],
            Family::TorusPerturbed { eps, phase, .. } => {
                let trig = |m: usize| {
                    Jet2::real_coordinate(p, m).scale(C64::new(TAU, 0.0)) + Jet2::real(TAU * phase[m])
                };
                let e = C64::new(eps, 0.0);
                let h11 = one + trig(0).cos().scale(e);
                let h22 = one + trig(1).cos().scale(e);
                let h12 = (trig(2).cos() + trig(3).sin().scale(I)).scale(e * 0.5);
                [[h11, h12], [h12.conj(), h22]]
            }
            Family::HopfStandard => {
                let inv = rho(p).recip();
                [[inv, zero], [zero, inv]]
            }
            Family::HopfConformal { eps } => {
                let r = rho(p);
                let arg = r.ln().scale(C64::new(TAU / (2.0 * LN_2), 0.0));
                let f = arg.cos().scale(C64::new(eps, 0.0)).exp() * r.recip();
                [[f, zero], [zero, f]]
            }
            Family::FubiniStudy => {
                let s = one + rho(p);
                let inv2 = (s * s).recip();
                let mut h = [[zero; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        // The diagonal is written as 1 + |z_k|², k ≠ i, to avoid
                        // cancelling (1 + ρ) against |z_i|² far out in the chart.
                        h[i][j] = if i == j {
                            let k = 1 - i;
                            (one + Jet2::coordinate(p, 2 + k) * Jet2::coordinate(p, k)) * inv2
                        } else {
                            -(Jet2::coordinate(p, 2 + i) * Jet2::coordinate(p, j)) * inv2
                        };
                    }
                }
                h
            }
        }
    }

    /// Value of `h_{i j̄}` at a point given by real coordinates.
    pub fn h_value(&self, x: [f64; 4], i: usize, j: usize) -> C64 {
        self.h_jets(&Point::from_real(x, self.model()))[i][j].value
    }

    /// Finite-difference 2-jets of the components, one stencil per component.
    pub fn h_jets_fd(&self, p: &Point) -> [[Jet2; 2]; 2] {
        let step = default_step(p);
        let mut out = [[Jet2::zero(); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = fd_jet2(|x| self.h_value(x, i, j), p, step);
            }
        }
        out
    }

    pub fn metric_jet(&self, p: &Point) -> Result<MetricJet> {
        self.metric_jet_mode(p, JetMode::Analytic)
    }

    pub fn metric_jet_mode(&self, p: &Point, mode: JetMode) -> Result<MetricJet> {
        p.validate()?;
        if p.chart != self.model() {
            return Err(Error::Contract(format!(
                "point chart {:?} does not match metric model {:?}",
                p.chart,
                self.model()
            )));
        }
        let h = match mode {
            JetMode::Analytic => self.h_jets(p),
            JetMode::Fd => self.h_jets_fd(p),
        };
        MetricJet::from_h(h, p)
    }

    /// Smallest eigenvalue of `h` over an `n⁴` lattice in the chart box.
    pub fn positivity_scan(&self, n: usize) -> PositivityReport {
        let mut best = PositivityReport { min_eigenvalue: f64::INFINITY, location: None };
        for p in lattice_points(self.model(), n) {
            let h = self.h_jets(&p);
            let e = hermitian_eigenvalues(&[[h[0][0].value, h[0][1].value], [h[1][0].value, h[1][1].value]]);
            if e[0] < best.min_eigenvalue {
                best = PositivityReport { min_eigenvalue: e[0], location: Some(p) };
            }
        }
        best
    }
}

impl fmt::Display for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

fn rho(p: &Point) -> Jet2 {
    let z1 = Jet2::coordinate(p, 0);
    let z2 = Jet2::coordinate(p, 1);
    z1 * z1.conj() + z2 * z2.conj()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityReport {
    pub min_eigenvalue: f64,
    pub location: Option<Point>,
}

/// Eigenvalues (ascending) of a 2×2 Hermitian matrix.
pub fn hermitian_eigenvalues(m: &[[C64; 2]; 2]) -> [f64; 2] {
    let a = m[0][0].re;
    let d = m[1][1].re;
    let mid = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + m[0][1].norm_sqr()).sqrt();
    [mid - rad, mid + rad]
}

/// Metric 2-jet at one point together with inverse and determinant data.
#[derive(Debug, Clone, Copy)]
pub struct MetricJet {
    pub point: Point,
    pub h: [[Jet2; 2]; 2],
    /// First-order jets of `h^{k l̄}`.
    pub hinv: [[Jet1; 2]; 2],
    pub det: Jet2,
    /// `∂_i ∂̄_j log det h`.
    pub logdet_second: [[C64; 2]; 2],
}

impl MetricJet {
    // The negated comparisons also reject NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn from_h(h: [[Jet2; 2]; 2], p: &Point) -> Result<Self> {
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let lead = h[0][0].value;
        if !(lead.re > 0.0) || !(det.value.re > 0.0) || !det.value.re.is_finite() {
            return Err(Error::DegenerateMetric {
                location: p.to_string(),
                detail: format!("h11 = {lead}, det h = {}", det.value),
            });
        }
        let h1 = [[h[0][0].value_jet(), h[0][1].value_jet()], [h[1][0].value_jet(), h[1][1].value_jet()]];
        let hinv = metric_inverse(&h1);
        let ld = det.ln();
        let mut logdet_second = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                logdet_second[i][j] = ld.dd[i][2 + j];
            }
        }
        Ok(Self { point: *p, h, hinv, det, logdet_second })
    }

    pub fn h_value(&self) -> [[C64; 2]; 2] {
        [[self.h[0][0].value, self.h[0][1].value], [self.h[1][0].value, self.h[1][1].value]]
    }

    pub fn hinv_value(&self) -> [[C64; 2]; 2] {
        [[self.hinv[0][0].value, self.hinv[0][1].value], [self.hinv[1][0].value, self.hinv[1][1].value]]
    }

    /// First-order jets of `h_{i j̄}`.
    pub fn h1(&self) -> [[Jet1; 2]; 2] {
        [[self.h[0][0].value_jet(), self.h[0][1].value_jet()], [self.h[1][0].value_jet(), self.h[1][1].value_jet()]]
    }

    /// First-order jets of `∂_a h_{i j̄}`.
    pub fn dh1(&self, a: usize) -> [[Jet1; 2]; 2] {
        [
            [self.h[0][0].partial_jet(a), self.h[0][1].partial_jet(a)],
            [self.h[1][0].partial_jet(a), self.h[1][1].partial_jet(a)],
        ]
    }

    /// Largest entry of `h · hinv − I` over value and first partials.
    pub fn inverse_residual(&self) -> f64 {
        let h = self.h1();
        let mut worst: f64 = 0.0;
        for k in 0..2 {
            for j in 0..2 {
                let mut s = Jet1::constant(C64::new(if k == j { -1.0 } else { 0.0 }, 0.0));
                for l in 0..2 {
                    s += self.hinv[k][l] * h[j][l];
                }
                worst = worst.max(s.value.norm());
                for a in 0..4 {
                    worst = worst.max(s.d[a].norm());
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::sample_points;

    fn p10() -> Point {
        Point::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), Chart::Hopf)
    }

    #[test]
    fn flat_torus_is_identity_with_zero_derivatives() {
        let p = Point::from_real([0.3, 0.1, 0.7, 0.2], Chart::Torus);
        let mj = MetricField::torus_flat().metric_jet(&p).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(mj.h[i][j].value, C64::new(want, 0.0));
                assert_eq!(mj.h[i][j].max_abs_diff(&Jet2::constant(C64::new(want, 0.0))), 0.0);
            }
        }
    }

    #[test]
    fn hopf_standard_at_unit_point() {
        let mj = MetricField::hopf_standard().metric_jet(&p10()).unwrap();
        for j in 0..2 {
            for l in 0..2 {
                let d = if j == l { 1.0 } else { 0.0 };
                assert!((mj.h[j][l].value - d).norm() < 1e-15);
                assert!((mj.h[j][l].d[0] + d).norm() < 1e-15);
                assert!((mj.h[j][l].d[2] + d).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn fubini_study_at_origin() {
        let p = Point::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0), Chart::Cp2);
        let mj = MetricField::fubini_study().metric_jet(&p).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let d = if i == j { 1.0 } else { 0.0 };
                assert!((mj.h[i][j].value - d).norm() < 1e-15);
                for a in 0..4 {
                    assert!(mj.h[i][j].d[a].norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn hermitian_and_inverse_consistent() {
        let fams = [
            MetricField::torus_perturbed(0.3).unwrap(),
            MetricField::hopf_conformal(0.5).unwrap(),
            MetricField::fubini_study(),
        ];
        for m in fams {
            for p in sample_points(m.model(), 20, 11) {
                let mj = m.metric_jet(&p).unwrap();
                assert!(mj.inverse_residual() < 1e-12);
                let h = mj.h_value();
                assert!((h[0][1].conj() - h[1][0]).norm() < 1e-15);
                assert!(h[0][0].im.abs() < 1e-15 && h[1][1].im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn perturbed_torus_positivity_bound() {
        let rep = MetricField::torus_perturbed(0.1).unwrap().positivity_scan(8);
        assert!(rep.min_eigenvalue >= 0.8, "{}", rep.min_eigenvalue);
        assert_eq!(MetricField::torus_flat().positivity_scan(4).min_eigenvalue, 1.0);
    }

    #[test]
    fn eps_cap_enforced() {
        assert!(matches!(MetricField::torus_perturbed(0.6), Err(Error::MetricSpec { .. })));
        assert!(MetricField::parse("torus-perturbed:eps=9").is_err());
        let e = MetricField::parse("torus-perturbed:epsilon=0.1").unwrap_err();
        assert!(e.to_string().contains("epsilon=0.1"));
        assert!(MetricField::parse("hopf-standard:eps=1").is_err());
        assert!(MetricField::parse("klein-bottle").is_err());
    }

    #[test]
    fn descriptors_round_trip() {
        for s in [
            "torus-flat",
            "torus-perturbed:eps=0.1",
            "torus-perturbed:eps=0.05,seed=3",
            "hopf-standard",
            "hopf-conformal:eps=0.05",
            "fubini-study",
        ] {
            let m = MetricField::parse(s).unwrap();
            assert_eq!(m.descriptor(), s);
            assert_eq!(MetricField::parse(&m.descriptor()).unwrap(), m);
        }
    }

    #[test]
    fn hopf_pullback_under_doubling() {
        for m in [MetricField::hopf_standard(), MetricField::hopf_conformal(0.3).unwrap()] {
            let p = Point::new(C64::new(0.5, 0.3), C64::new(-0.2, 0.4), Chart::Hopf);
            let q = p.scaled(2.0);
            let a = m.h_jets(&p);
            let b = m.h_jets(&q);
            for i in 0..2 {
                for j in 0..2 {
                    assert!((a[i][j].value - 4.0 * b[i][j].value).norm() < 1e-13);
                    for x in 0..4 {
                        assert!((a[i][j].d[x] - 8.0 * b[i][j].d[x]).norm() < 1e-12);
                        for y in 0..4 {
                            assert!((a[i][j].dd[x][y] - 16.0 * b[i][j].dd[x][y]).norm() < 1e-11);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn fd_agrees_with_analytic_jets() {
        let fams = [
            MetricField::torus_flat(),
            MetricField::torus_perturbed(0.1).unwrap(),
            MetricField::hopf_standard(),
            MetricField::hopf_conformal(0.05).unwrap(),
            MetricField::fubini_study(),
        ];
        for m in fams {
            for p in sample_points(m.model(), 100, 5) {
                let a = m.h_jets(&p);
                let f = m.h_jets_fd(&p);
                for i in 0..2 {
                    for j in 0..2 {
                        let scale = a[i][j].max_abs().max(1e-3);
                        let rel = a[i][j].max_abs_diff(&f[i][j]) / scale;
                        assert!(rel < 1e-6, "{m} at {p}: {rel}");
                    }
                }
            }
        }
    }
}

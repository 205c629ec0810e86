//! The identity catalogue.
//!
//! Every identity is an LHS/RHS pair of sums. Each side is kept as a list of
//! its individual terms so the relative residual can be measured against the
//! largest single term, which keeps identities that mix O(1) and O(ε²) terms
//! on a fair footing.


use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{norm20_sq, Mat2};
use crate::error::{Error, Result};
use crate::forms::{dbar_star, del_star, FormValue};
use crate::geometry::{term, Densities, PointGeometry, StarRoutes};
use crate::jets::Point;
use crate::metrics::{JetMode, MetricField};
use crate::quadrature::{integrate_densities, DensityIntegrals, QuadratureGrid};
use crate::sampling::{lattice_points, sample_points, PRNG_NAME};
use crate::scalar::{C64, I};

pub const POINTWISE_TOL: f64 = 1e-8;
pub const POINTWISE_FD_TOL: f64 = 1e-5;
pub const INTEGRAL_TOL: f64 = 1e-4;
/// Lower bound on the scale used for relative residuals.
pub const SCALE_FLOOR: f64 = 1e-12;
/// A metric counts as Gauduchon when `max |∂∂̄ω|` over the scan is below this.
pub const GAUDUCHON_TOL: f64 = 1e-9;
/// Threshold for hypotheses of the form "X = 0" or "X ≤ 0" in theorem reports.
pub const HYPOTHESIS_TOL: f64 = 1e-9;
/// Lattice resolution added to the seeded points when deciding applicability.
const APPLICABILITY_LATTICE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    PointwiseScalar,
    PointwiseForm,
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Applicability {
    Unconditional,
    GauduchonOnly,
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityDescriptor {
    pub id: &'static str,
    pub kind: Kind,
    pub applicability: Applicability,
    /// The identity in LaTeX.
    pub formula: &'static str,
    pub summary: &'static str,
}

const fn pw(id: &'static str, kind: Kind, formula: &'static str, summary: &'static str) -> IdentityDescriptor {
    IdentityDescriptor { id, kind, applicability: Applicability::Unconditional, formula, summary }
}

const fn int(id: &'static str, formula: &'static str, summary: &'static str) -> IdentityDescriptor {
    IdentityDescriptor { id, kind: Kind::Integral, applicability: Applicability::Unconditional, formula, summary }
}

use Kind::{PointwiseForm as F, PointwiseScalar as S};

pub const POINTWISE: [IdentityDescriptor; 23] = [
    pw("PW-01", F, r"Ric^{SB(1)}=\Theta^{(1)}-(\partial\partial^*\omega+\bar{\partial}\bar{\partial}^*\omega)", "first SB-Ricci form from the Chern-Ricci form"),
    pw("PW-02", F, r"Ric^{SB(2)}=\Theta^{(1)}-(\Lambda\bar{\partial}\bar{\partial}^*\omega+|\bar{\partial}^*\omega|^2)\omega+2\sqrt{-1}\bar{\partial}^*\omega\wedge\partial^*\omega", "second SB-Ricci form"),
    pw("PW-03", F, r"Ric^{SB(3)}=\Theta^{(1)}-\bar{\partial}\bar{\partial}^*\omega+(\Lambda\bar{\partial}\bar{\partial}^*\omega-2|\bar{\partial}^*\omega|^2)\omega+\sqrt{-1}\bar{\partial}^*\omega\wedge\partial^*\omega", "third SB-Ricci form"),
    pw("PW-04", F, r"Ric^{SB(4)}=\Theta^{(1)}-\partial\partial^*\omega+(\Lambda\bar{\partial}\bar{\partial}^*\omega-2|\bar{\partial}^*\omega|^2)\omega+\sqrt{-1}\bar{\partial}^*\omega\wedge\partial^*\omega", "fourth SB-Ricci form"),
    pw("PW-05", S, r"S_{SB(1)}=S_{C(1)}-2\Lambda\bar{\partial}\bar{\partial}^*\omega", "first SB scalar curvature"),
    pw("PW-06", S, r"S_{SB(2)}=S_{C(1)}+\Lambda\bar{\partial}\bar{\partial}^*\omega-3|\bar{\partial}^*\omega|^2", "second SB scalar curvature"),
    pw("PW-07", F, r"R^{SB,\mathbb{C}}_{kij\bar{l}}={^{SB}}\nabla_{\frac{\partial}{\partial z^j}}{^{SB}}T_{ik\bar{l}}+{^{SB}}T^p_{kj}{^{SB}}T_{pi\bar{l}}-{^{SB}}T^p_{ij}{^{SB}}T_{pk\bar{l}}", "SB curvature with two holomorphic slots from the torsion derivative"),
    pw("PW-08", F, r"\mathcal{R}^{SB,\mathbb{C}}_{ij}=-{^{SB}}\nabla_{\frac{\partial}{\partial z^j}}{T_i}+T_iT_j", "(2,0) complexified Ricci from the torsion one-form"),
    pw("PW-09", F, r"{^{SB}}T_{kj}^p{^{SB}}T_{pi}^k=T_iT_j,\quad {^{SB}}T_{ij}^kT_k=0", "quadratic torsion identities"),
    pw("PW-10", F, r"\bar{\partial}^*\omega=\sqrt{-1}\Lambda(\partial\omega)=\sqrt{-1}T_idz^i", "codifferential of omega by torsion, contraction and Hodge star"),
    pw("PW-11", S, r"\Lambda\partial\partial^*\omega=\Lambda\bar{\partial}\bar{\partial}^*\omega=|\bar{\partial}^*\omega|^2-\sqrt{-1}\partial^*\bar{\partial}^*\omega", "contractions of the two second-order torsion forms"),
    pw("PW-12", F, r"\partial^*\partial\omega+\bar{\partial}\bar{\partial}^*\omega=(\Lambda\bar{\partial}\bar{\partial}^*\omega)\omega", "second-order codifferentials of omega"),
    pw("PW-13", F, r"\Theta^{(2)}=\Theta^{(1)}-(\partial\partial^*\omega+\bar{\partial}\bar{\partial}^*\omega)+(\Lambda\bar{\partial}\bar{\partial}^*\omega)\omega", "second Chern-Ricci form"),
    pw("PW-14", F, r"\mathcal{R}ic^{SB,\mathbb{C}}\ \text{(double contraction)} = \text{(SB-Ricci assembly)}", "complexified real Ricci by two routes"),
    pw("PW-15", F, r"R_{i\bar{j}}^{SB(3)}=\overline{R_{j\bar{i}}^{SB(4)}}", "conjugation relations of the Ricci family"),
    pw("PW-16", F, r"Ric^{SB(3)}-Ric^{SB(4)}=\partial\partial^*\omega-\bar{\partial}\bar{\partial}^*\omega", "difference of third and fourth SB-Ricci"),
    pw("PW-17", F, r"\mathcal{R}ic^{SB,\mathbb{C}(1,1)}+\overline{\mathcal{R}ic^{SB,\mathbb{C}(1,1)}}=Ric^{SB(3)}+Ric^{SB(4)}", "Hermitian part of the complexified (1,1) Ricci"),
    pw("PW-18", F, r"\mathfrak{R}_{ij}=\frac{1}{2}(\mathcal{R}_{ij}^{SB,\mathbb{C}}+\mathcal{R}_{ji}^{SB,\mathbb{C}}-3T_iT_j)", "(2,0) Riemannian Ricci from the SB Ricci"),
    pw("PW-19", F, r"\mathfrak{R}ic^{(1,1)}=Ric^{SB(2)}+2(\Lambda\bar{\partial}\bar{\partial}^*\omega)\omega-\frac{3}{2}\tau-\frac{1}{2}(\partial\partial^*\omega+\bar{\partial}\bar{\partial}^*\omega)=Ric^{SB(3)}+|\bar{\partial}^*\omega|^2\omega+\frac{1}{2}(\bar{\partial}\bar{\partial}^*\omega-\partial\partial^*\omega)-\frac{1}{2}\tau", "(1,1) Riemannian Ricci, both expressions"),
    pw("PW-20", S, r"|\partial\omega|^2=|*\partial*\omega|^2=|\bar{\partial}^*\omega|^2", "norm of the torsion three-form"),
    pw("PW-21", S, r"(\partial^*\bar{\partial}^*+\bar{\partial}^*\partial^*)\omega=0", "anticommutator of the codifferentials"),
    IdentityDescriptor {
        id: "PW-22",
        kind: S,
        applicability: Applicability::GauduchonOnly,
        formula: r"\Lambda\bar{\partial}\bar{\partial}^*\omega=|\bar{\partial}^*\omega|^2",
        summary: "Gauduchon contraction identity",
    },
    pw("PW-23", S, r"\Lambda\partial^*\partial\omega=\Lambda\bar{\partial}\bar{\partial}^*\omega=\Lambda\partial\partial^*\omega=\Lambda\bar{\partial}^*\bar{\partial}\omega", "contractions of the four second-order forms"),
];

pub const INTEGRAL: [IdentityDescriptor; 17] = [
    int("IN-01", r"(\partial\partial^*\omega-\bar{\partial}\bar{\partial}^*\omega,\tau)=(\mathcal{R}ic^{(2,0)},\bar{\partial}^*\omega\otimes\bar{\partial}^*\omega)-(\mathcal{R}ic^{(0,2)},\partial^*\omega\otimes\partial^*\omega)", "difference of torsion pairings"),
    int("IN-02", r"(\partial\partial^*\omega+\bar{\partial}\bar{\partial}^*\omega,\tau)=-2(\Lambda\bar{\partial}\bar{\partial}^*\omega,|\bar{\partial}^*\omega|^2)+\frac{3}{2}(|\bar{\partial}^*\omega|^4,1)+\frac12\|\mathcal{R}_{ij}+\mathcal{R}_{ji}-3T_iT_j\|^2-\frac12\|\mathcal{R}_{ij}+\mathcal{R}_{ji}-2T_iT_j\|^2", "sum of torsion pairings"),
    int("IN-03", r"(Ric^{SB(2)},\frac{1}{2}(\partial^*\partial\omega+\bar{\partial}^*\bar{\partial}\omega))", "second SB-Ricci against the codifferential Laplacian"),
    int("IN-04", r"(Ric^{SB(3)},\frac{1}{2}(\partial^*\partial\omega+\bar{\partial}^*\bar{\partial}\omega))=(Ric^{SB(4)},\cdot)=(\mathcal{R}ic^{SB,\mathbb{C}(1,1)},\cdot)", "third and fourth SB-Ricci against the codifferential Laplacian"),
    int("IN-05", r"\|\bar{\partial}\bar{\partial}^*\omega\|^2+\|\Lambda\bar{\partial}\bar{\partial}^*\omega\|^2=2(Ric^{SB(2)},\tau)+6(\Lambda\bar{\partial}\bar{\partial}^*\omega,|\bar{\partial}^*\omega|^2)-4(|\bar{\partial}^*\omega|^4,1)+\frac12\|\mathcal{R}_{ij}+\mathcal{R}_{ji}-2T_iT_j\|^2", "integral formula with the second SB-Ricci"),
    int("IN-06", r"\|\bar{\partial}\bar{\partial}^*\omega\|^2+\|\Lambda\bar{\partial}\bar{\partial}^*\omega\|^2=2(Ric^{SB(3)},\tau)+\frac{3}{2}(|\bar{\partial}^*\omega|^4,1)+\dots", "integral formula with the third SB-Ricci"),
    int("IN-07", r"\|\bar{\partial}\bar{\partial}^*\omega\|^2+\|\Lambda\bar{\partial}\bar{\partial}^*\omega\|^2=2(Ric^{SB(4)},\tau)+\dots", "integral formula with the fourth SB-Ricci"),
    int("IN-08", r"(\bar{\partial}\bar{\partial}^*\omega,\partial^*\partial\omega)=-\|\partial\bar{\partial}^*\omega\|^2", "mixed codifferential pairing"),
    int("IN-09", r"(\partial\partial^*\omega,\bar{\partial}\bar{\partial}^*\omega)=\|\Lambda\bar{\partial}\bar{\partial}^*\omega\|^2", "pairing of the two second-order torsion forms"),
    int("IN-10", r"\|\bar{\partial}\bar{\partial}^*\omega\|^2=\|\Lambda\bar{\partial}\bar{\partial}^*\omega\|^2+\|\partial\bar{\partial}^*\omega\|^2", "norm splitting"),
    int("IN-11", r"\|\bar{\partial}\bar{\partial}^*\omega\|^2+\|\Lambda\bar{\partial}\bar{\partial}^*\omega\|^2=2(\mathfrak{R}ic^{(1,1)},\tau)+2\|\mathfrak{R}ic^{(2,0)}\|^2+\frac12(|\bar{\partial}^*\omega|^4,1)", "integral formula with the Riemannian Ricci"),
    int("IN-12", r"4\pi^2c_1^2(M)=\|S_{SB(1)}\|^2-\|Ric^{SB(1)}\|^2+2\|\partial\bar{\partial}^*\omega\|^2", "first-Chern-number formula with the first SB-Ricci"),
    int("IN-13", r"4\pi^2c_1^2(M)=\|S_{SB(1)}\|^2-\|Ric^{SB(2)}\|^2-2(S_{SB(1)},\Lambda\bar{\partial}\bar{\partial}^*\omega+|\bar{\partial}^*\omega|^2)+\dots", "first-Chern-number formula with the second SB-Ricci"),
    int("IN-14", r"4\pi^2c_1^2(M)=\|S_{SB(2)}\|^2-\|Ric^{SB(3)}\|^2+2\|\partial\bar{\partial}^*\omega\|^2+\dots,\quad\|Ric^{SB(3)}\|^2=\|Ric^{SB(4)}\|^2", "first-Chern-number formula with the third SB-Ricci"),
    int("IN-15", r"4\pi^2c_1^2(M)=\int(S_{C(1)}^2-|\Theta^{(1)}|^2)\frac{\omega^2}{2}", "Chern-Weil formula"),
    int("IN-16", r"\text{the four first-Chern-number formulas agree}", "cross-formula agreement"),
    int("IN-17", r"\|\Theta^{(2)}\|^2=\|Ric^{SB(1)}\|^2+2(S_{SB(1)},\Lambda\bar{\partial}\bar{\partial}^*\omega)+2\|\Lambda\bar{\partial}\bar{\partial}^*\omega\|^2", "norm of the second Chern-Ricci form"),
];

pub fn catalogue() -> impl Iterator<Item = &'static IdentityDescriptor> {
    POINTWISE.iter().chain(INTEGRAL.iter())
}

pub fn descriptor(id: &str) -> Result<&'static IdentityDescriptor> {
    catalogue().find(|d| d.id == id).ok_or_else(|| Error::UnknownIdentity(id.to_string()))
}

// ---------------------------------------------------------------------------
// Residual bookkeeping

/// One side of an identity: a sum of terms, each a vector of components.
#[derive(Debug, Clone, Default)]
struct Side {
    terms: Vec<Vec<C64>>,
}

trait Components {
    fn components(&self) -> Vec<C64>;
}

impl Components for C64 {
    fn components(&self) -> Vec<C64> {
        vec![*self]
    }
}

impl Components for f64 {
    fn components(&self) -> Vec<C64> {
        vec![C64::new(*self, 0.0)]
    }
}

impl Components for FormValue {
    fn components(&self) -> Vec<C64> {
        self.c.to_vec()
    }
}

impl<const N: usize> Components for [[C64; N]; N] {
    fn components(&self) -> Vec<C64> {
        self.iter().flatten().copied().collect()
    }
}

impl Components for Vec<C64> {
    fn components(&self) -> Vec<C64> {
        self.clone()
    }
}

impl Side {
    fn new() -> Self {
        Self::default()
    }

    fn of(x: &impl Components) -> Self {
        Self::new().plus(1.0, x)
    }

    fn plus(self, coef: f64, x: &impl Components) -> Self {
        self.plus_c(C64::new(coef, 0.0), x)
    }

    fn plus_c(mut self, coef: C64, x: &impl Components) -> Self {
        self.terms.push(x.components().into_iter().map(|v| coef * v).collect());
        self
    }

    fn width(&self) -> usize {
        self.terms.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn total(&self, width: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); width];
        for t in &self.terms {
            for (o, v) in out.iter_mut().zip(t) {
                *o += v;
            }
        }
        out
    }

    fn largest_term(&self) -> f64 {
        self.terms.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
struct Comparison {
    lhs: Side,
    rhs: Side,
}

#[derive(Debug, Clone, Copy, Default)]
struct Outcome {
    lhs: C64,
    rhs: C64,
    abs: f64,
    rel: f64,
}

impl Outcome {
    fn worse(self, other: Self) -> Self {
        if other.rel > self.rel || (other.rel == self.rel && other.abs > self.abs) {
            other
        } else {
            self
        }
    }
}

impl Comparison {
    fn new(lhs: Side, rhs: Side) -> Self {
        Self { lhs, rhs }
    }

    /// `reference` is a natural magnitude for the compared quantity; the
    /// residual is measured against the larger of it and the largest term.
    fn outcome_with(&self, reference: f64) -> Outcome {
        let w = self.lhs.width().max(self.rhs.width());
        let (l, r) = (self.lhs.total(w), self.rhs.total(w));
        let mut k_max = 0;
        let mut abs: f64 = 0.0;
        for k in 0..w {
            let d = (l[k] - r[k]).norm();
            if d > abs {
                abs = d;
                k_max = k;
            }
        }
        let scale = self.lhs.largest_term().max(self.rhs.largest_term()).max(reference).max(SCALE_FLOOR);
        let pick = |v: &[C64]| v.get(k_max).copied().unwrap_or_default();
        Outcome { lhs: pick(&l), rhs: pick(&r), abs, rel: abs / scale }
    }
}

/// `a = b = c = …` as consecutive comparisons.
fn chain(sides: Vec<Side>) -> Vec<Comparison> {
    sides.windows(2).map(|w| Comparison::new(w[0].clone(), w[1].clone())).collect()
}

fn worst(cmps: &[Comparison], reference: f64) -> Outcome {
    cmps.iter().map(|c| c.outcome_with(reference)).fold(Outcome::default(), Outcome::worse)
}

// ---------------------------------------------------------------------------
// Pointwise catalogue

fn mat_conj(m: &Mat2) -> Mat2 {
    m.map(|r| r.map(|x| x.conj()))
}

fn mat_conj_transpose(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

/// Derivative order and number of lower indices of the compared quantity.
fn units(id: &str) -> (i32, i32) {
    match id {
        "PW-05" | "PW-06" | "PW-11" | "PW-20" | "PW-21" | "PW-22" | "PW-23" => (2, 0),
        "PW-07" => (2, 4),
        "PW-10" => (1, 1),
        _ => (2, 2),
    }
}

/// Roundoff in an identity whose terms all vanish is set by the size of the
/// geometry the terms were computed from, not by the terms themselves. With
/// `κ` the largest curvature-level invariant at the point and `|h|` the
/// largest metric component, a quantity of derivative order `w` with `k`
/// lower indices has natural magnitude `κ^{w/2} |h|^{k/2}`.
fn reference_scale(id: &str, g: &PointGeometry) -> f64 {
    let kappa = [
        g.s_c1().abs(),
        g.fm.norm_sq(&g.theta1).re.abs().sqrt(),
        g.fm.norm_sq(&g.theta2).re.abs().sqrt(),
        g.t_norm2.abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let hmax = g.mj.h_value().iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
    let (w, k) = units(id);
    kappa.powf(w as f64 / 2.0) * hmax.powf(k as f64 / 2.0)
}

fn pointwise_checks(id: &str, g: &PointGeometry) -> Result<Vec<Comparison>> {
    let om = &g.omega;
    let lam = g.lam;
    let t2 = g.t_norm2;
    let ric = &g.ric_forms;
    let fm = &g.fm;
    let out = match id {
        "PW-01" => vec![Comparison::new(
            Side::of(&ric[0]),
            Side::of(&g.theta1).plus(-1.0, &g.dd_star).plus(-1.0, &g.dbar_dbar_star),
        )],
        "PW-02" => vec![Comparison::new(
            Side::of(&ric[1]),
            Side::of(&g.theta1)
                .plus_c(-lam, om)
                .plus(-t2, om)
                .plus(2.0, &g.tau),
        )],
        "PW-03" => vec![Comparison::new(
            Side::of(&ric[2]),
            Side::of(&g.theta1)
                .plus(-1.0, &g.dbar_dbar_star)
                .plus_c(lam, om)
                .plus(-2.0 * t2, om)
                .plus(1.0, &g.tau),
        )],
        "PW-04" => vec![Comparison::new(
            Side::of(&ric[3]),
            Side::of(&g.theta1)
                .plus(-1.0, &g.dd_star)
                .plus_c(lam, om)
                .plus(-2.0 * t2, om)
                .plus(1.0, &g.tau),
        )],
        "PW-05" => vec![Comparison::new(
            Side::of(&g.ric.s_sb1),
            Side::of(&g.s_c1()).plus(-2.0, &lam),
        )],
        "PW-06" => vec![Comparison::new(
            Side::of(&g.ric.s_sb2),
            Side::of(&g.s_c1()).plus(1.0, &lam).plus(-3.0, &t2),
        )],
        "PW-07" => {
            let st = &g.ct.sb_torsion;
            let td = &g.td;
            let (mut lhs, mut d, mut a, mut b) = (vec![], vec![], vec![], vec![]);
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        for l in 0..2 {
                            lhs.push(g.sb.lowered[k][i][j][2 + l]);
                            d.push(td.lowered_d[j][i][k][l]);
                            let (mut sa, mut sb) = (C64::default(), C64::default());
                            for p in 0..2 {
                                sa += st[k][j][p] * td.lowered[p][i][l];
                                sb -= st[i][j][p] * td.lowered[p][k][l];
                            }
                            a.push(sa);
                            b.push(sb);
                        }
                    }
                }
            }
            vec![Comparison::new(Side::of(&lhs), Side::of(&d).plus(1.0, &a).plus(1.0, &b))]
        }
        "PW-08" => {
            let t = g.ct.t;
            let tt = [[t[0] * t[0], t[0] * t[1]], [t[1] * t[0], t[1] * t[1]]];
            let d = g.td.contracted_d;
            let minus_d = [[-d[0][0], -d[1][0]], [-d[0][1], -d[1][1]]];
            vec![Comparison::new(Side::of(&g.r20()), Side::of(&minus_d).plus(1.0, &tt))]
        }
        "PW-09" => {
            let st = &g.ct.sb_torsion;
            let t = g.ct.t;
            let mut quad = Side::new();
            let mut contr = Side::new();
            for k in 0..2 {
                for p in 0..2 {
                    let mut m = [[C64::default(); 2]; 2];
                    for i in 0..2 {
                        for j in 0..2 {
                            m[i][j] = st[k][j][p] * st[p][i][k];
                        }
                    }
                    quad = quad.plus(1.0, &m);
                }
                let mut m = [[C64::default(); 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        m[i][j] = st[i][j][k] * t[k];
                    }
                }
                contr = contr.plus(1.0, &m);
            }
            let tt = [[t[0] * t[0], t[0] * t[1]], [t[1] * t[0], t[1] * t[1]]];
            vec![
                Comparison::new(quad, Side::of(&tt)),
                Comparison::new(contr, Side::of(&[[C64::default(); 2]; 2])),
            ]
        }
        "PW-10" => {
            let s = StarRoutes::new(g);
            let mut c = chain(vec![
                Side::of(&g.dbar_star_omega.values()),
                Side::of(&s.lambda_d_omega),
                Side::of(&s.dbar_star_omega),
            ]);
            c.extend(chain(vec![
                Side::of(&g.del_star_omega.values()),
                Side::of(&s.lambda_dbar_omega),
                Side::of(&s.del_star_omega),
            ]));
            c
        }
        "PW-11" => chain(vec![
            Side::of(&fm.lambda(&g.dd_star).c[0]),
            Side::of(&lam),
            Side::of(&t2).plus_c(-I, &g.del_star_dbar_star()),
        ]),
        "PW-12" => vec![Comparison::new(
            Side::of(&g.del_star_del).plus(1.0, &g.dbar_dbar_star),
            Side::new().plus_c(lam, om),
        )],
        "PW-13" => vec![Comparison::new(
            Side::of(&g.theta2),
            Side::of(&g.theta1)
                .plus(-1.0, &g.dd_star)
                .plus(-1.0, &g.dbar_dbar_star)
                .plus_c(lam, om),
        )],
        "PW-14" => vec![Comparison::new(Side::of(&g.cric.route_a), Side::of(&g.cric.route_b))],
        "PW-15" => {
            let r = &g.ric.ric;
            vec![
                Comparison::new(Side::of(&r[2]), Side::of(&mat_conj_transpose(&r[3]))),
                Comparison::new(Side::of(&g.cric.r11()), Side::of(&mat_conj(&g.cric.r11_bar()))),
                Comparison::new(Side::of(&g.cric.r02()), Side::of(&mat_conj(&g.r20()))),
            ]
        }
        "PW-16" => vec![Comparison::new(
            Side::of(&ric[2]).plus(-1.0, &ric[3]),
            Side::of(&g.dd_star).plus(-1.0, &g.dbar_dbar_star),
        )],
        "PW-17" => vec![Comparison::new(
            Side::of(&g.cric11).plus(1.0, &g.cric11.conj_form()),
            Side::of(&ric[2]).plus(1.0, &ric[3]),
        )],
        "PW-18" => {
            let r = g.r20();
            let t = g.ct.t;
            let tt = [[t[0] * t[0], t[0] * t[1]], [t[1] * t[0], t[1] * t[1]]];
            let rt = [[r[0][0], r[1][0]], [r[0][1], r[1][1]]];
            vec![Comparison::new(
                Side::of(&g.riem20),
                Side::new().plus(0.5, &r).plus(0.5, &rt).plus(-1.5, &tt),
            )]
        }
        "PW-19" => vec![
            Comparison::new(
                Side::of(&g.riem11),
                Side::of(&ric[1])
                    .plus_c(2.0 * lam, om)
                    .plus(-1.5, &g.tau)
                    .plus(-0.5, &g.dd_star)
                    .plus(-0.5, &g.dbar_dbar_star),
            ),
            Comparison::new(
                Side::of(&g.riem11),
                Side::of(&ric[2])
                    .plus(t2, om)
                    .plus(0.5, &g.dbar_dbar_star)
                    .plus(-0.5, &g.dd_star)
                    .plus(-0.5, &g.tau),
            ),
        ],
        "PW-20" => {
            let s = StarRoutes::new(g);
            chain(vec![
                Side::of(&fm.norm_sq(&g.d_omega.values())),
                Side::of(&s.star_d_star_norm2),
                Side::of(&t2),
            ])
        }
        "PW-21" => {
            let a = del_star(&g.dbar_star_omega, &g.fm1, fm).c[0];
            let b = dbar_star(&g.del_star_omega, &g.fm1, fm).c[0];
            vec![Comparison::new(Side::of(&a).plus(1.0, &b), Side::of(&0.0))]
        }
        "PW-22" => vec![Comparison::new(Side::of(&lam), Side::of(&t2))],
        "PW-23" => chain(vec![
            Side::of(&fm.lambda(&g.del_star_del).c[0]),
            Side::of(&lam),
            Side::of(&fm.lambda(&g.dd_star).c[0]),
            Side::of(&fm.lambda(&g.dbar_star_dbar).c[0]),
        ]),
        _ => return Err(Error::UnknownIdentity(id.to_string())),
    };
    Ok(out)
}

// ---------------------------------------------------------------------------
// Integral catalogue

fn d(x: &Densities, k: usize) -> C64 {
    x.v[k]
}

/// Builds an integral side from `(coefficient, term index)` pairs.
fn terms(x: &Densities, spec: &[(f64, usize)]) -> Side {
    spec.iter().fold(Side::new(), |s, &(c, k)| s.plus(c, &d(x, k)))
}

use term::*;

fn chern_rhs(formula: ChernFormula, x: &Densities) -> Side {
    match formula {
        ChernFormula::FirstSbRicci => {
            terms(x, &[(1.0, S_SB1_SQ), (-1.0, RIC_NORM), (2.0, DEL_DBAR2)])
        }
        ChernFormula::SecondSbRicci => terms(
            x,
            &[
                (1.0, S_SB1_SQ),
                (-1.0, RIC_NORM + 1),
                (-2.0, S_SB1_LAM),
                (-2.0, S_SB1_T2),
                (-2.0, LAM2),
                (12.0, LAM_T2),
                (2.0, DEL_DBAR2),
                (-6.0, T4),
                (-4.0, SHIFT3),
                (3.0, SHIFT2),
            ],
        ),
        ChernFormula::ThirdSbRicci => terms(
            x,
            &[
                (1.0, S_SB2_SQ),
                (-1.0, RIC_NORM + 2),
                (2.0, DEL_DBAR2),
                (4.0, LAM2),
                (2.5, T4),
                (2.0, S_SB2_T2),
                (-2.0, S_SB2_LAM),
                (-6.0, LAM_T2),
                (-0.5, SHIFT3),
            ],
        ),
        ChernFormula::ChernWeil => terms(x, &[(1.0, S_C1_SQ), (-1.0, THETA1_NORM)]),
    }
}

/// Every integral identity is quartic in derivatives of the metric; the
/// largest quartic norm on the grid sets the roundoff scale.
fn integral_reference(x: &Densities) -> f64 {
    [S_C1_SQ, THETA1_NORM, THETA2_NORM, T4, RIC_NORM, RIC_NORM + 1, RIC_NORM + 2]
        .iter()
        .map(|&k| x.v[k].norm())
        .fold(0.0, f64::max)
}

fn integral_checks(id: &str, x: &Densities) -> Result<Vec<Comparison>> {
    let lam_side = || terms(x, &[(1.0, DDBAR2), (1.0, LAM2)]);
    let wedge = || terms(x, &[(1.0, THETA_WEDGE)]);
    let out = match id {
        "IN-01" => vec![Comparison::new(
            terms(x, &[(1.0, DD_TAU), (-1.0, DBDB_TAU)]),
            terms(x, &[(1.0, P20), (-1.0, P02)]),
        )],
        "IN-02" => vec![Comparison::new(
            terms(x, &[(1.0, DD_TAU), (1.0, DBDB_TAU)]),
            terms(x, &[(-2.0, LAM_T2), (1.5, T4), (0.5, SHIFT3), (-0.5, SHIFT2)]),
        )],
        "IN-03" => vec![Comparison::new(
            terms(x, &[(1.0, RIC_HALF + 1)]),
            terms(x, &[(-1.0, LAM2), (3.0, LAM_T2), (-1.5, T4), (-0.5, SHIFT3), (0.5, SHIFT2)]),
        )],
        "IN-04" => chain(vec![
            terms(x, &[(1.0, RIC_HALF + 2)]),
            terms(x, &[(1.0, RIC_HALF + 3)]),
            terms(x, &[(1.0, CRIC_HALF)]),
            terms(
                x,
                &[(0.5, DDBAR2), (0.5, LAM2), (-0.75, T4), (-0.25, SHIFT3), (0.25, SHIFT2)],
            ),
        ]),
        "IN-05" => vec![Comparison::new(
            lam_side(),
            terms(x, &[(2.0, RIC_TAU + 1), (6.0, LAM_T2), (-4.0, T4), (0.5, SHIFT2)]),
        )],
        "IN-06" => vec![Comparison::new(
            lam_side(),
            terms(x, &[(2.0, RIC_TAU + 2), (1.5, T4), (0.5, SHIFT3), (-1.0, P20), (1.0, P02)]),
        )],
        "IN-07" => vec![Comparison::new(
            lam_side(),
            terms(x, &[(2.0, RIC_TAU + 3), (1.5, T4), (0.5, SHIFT3), (1.0, P20), (-1.0, P02)]),
        )],
        "IN-08" => vec![Comparison::new(
            terms(x, &[(1.0, DBDB_DSD)]),
            terms(x, &[(-1.0, DEL_DBAR2)]),
        )],
        "IN-09" => vec![Comparison::new(terms(x, &[(1.0, DD_DBDB)]), terms(x, &[(1.0, LAM2)]))],
        "IN-10" => vec![Comparison::new(
            terms(x, &[(1.0, DDBAR2)]),
            terms(x, &[(1.0, LAM2), (1.0, DEL_DBAR2)]),
        )],
        "IN-11" => vec![Comparison::new(
            lam_side(),
            terms(x, &[(2.0, RIEM11_TAU), (2.0, RIEM20_NORM), (0.5, T4)]),
        )],
        "IN-12" => vec![Comparison::new(wedge(), chern_rhs(ChernFormula::FirstSbRicci, x))],
        "IN-13" => vec![Comparison::new(wedge(), chern_rhs(ChernFormula::SecondSbRicci, x))],
        "IN-14" => {
            let mut c = vec![Comparison::new(wedge(), chern_rhs(ChernFormula::ThirdSbRicci, x))];
            c.extend(chain(vec![
                terms(x, &[(1.0, RIC_NORM + 2)]),
                terms(x, &[(1.0, RIC_NORM + 3)]),
                terms(x, &[(1.0, CRIC_NORM)]),
            ]));
            c
        }
        "IN-15" => vec![Comparison::new(wedge(), chern_rhs(ChernFormula::ChernWeil, x))],
        "IN-16" => chain(ChernFormula::ALL.iter().map(|f| chern_rhs(*f, x)).collect()),
        "IN-17" => vec![Comparison::new(
            terms(x, &[(1.0, THETA2_NORM)]),
            terms(x, &[(1.0, RIC_NORM), (2.0, S_SB1_LAM), (2.0, LAM2)]),
        )],
        _ => return Err(Error::UnknownIdentity(id.to_string())),
    };
    Ok(out)
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Sampling {
    Points { count: usize, seed: u64, prng: String, jet_mode: String },
    Grid { n: usize, nodes: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: String,
    pub kind: Kind,
    pub metric: String,
    pub sampling: Sampling,
    /// Real and imaginary part of each side at the worst component.
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tolerance: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub skip_reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub runtime_ms: Option<f64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    fn from_outcome(
        desc: &IdentityDescriptor,
        m: &MetricField,
        sampling: Sampling,
        o: Outcome,
        tol: f64,
        runtime_ms: f64,
    ) -> Self {
        let finite = o.abs.is_finite() && o.rel.is_finite();
        Self {
            id: desc.id.to_string(),
            kind: desc.kind,
            metric: m.descriptor(),
            sampling,
            lhs: [o.lhs.re, o.lhs.im],
            rhs: [o.rhs.re, o.rhs.im],
            abs_residual: o.abs,
            rel_residual: o.rel,
            tolerance: tol,
            status: if finite && o.rel < tol { Status::Pass } else { Status::Fail },
            skip_reason: None,
            runtime_ms: Some(runtime_ms),
        }
    }

    fn skipped(desc: &IdentityDescriptor, m: &MetricField, sampling: Sampling, tol: f64, why: String) -> Self {
        Self {
            id: desc.id.to_string(),
            kind: desc.kind,
            metric: m.descriptor(),
            sampling,
            lhs: [0.0; 2],
            rhs: [0.0; 2],
            abs_residual: 0.0,
            rel_residual: 0.0,
            tolerance: tol,
            status: Status::Skipped,
            skip_reason: Some(why),
            runtime_ms: None,
        }
    }
}

/// Wall-clock timer for report runtimes. The browser target has no clock
/// in `std`, so runtimes read zero there.
struct Stopwatch {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Self {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    #[cfg(not(target_arch = "wasm32"))]
    fn secs(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    #[cfg(target_arch = "wasm32")]
    fn secs(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseConfig {
    pub n_points: usize,
    pub seed: u64,
    pub tol: f64,
    pub mode: JetMode,
}

impl PointwiseConfig {
    pub fn new(n_points: usize, seed: u64) -> Self {
        Self { n_points, seed, tol: POINTWISE_TOL, mode: JetMode::Analytic }
    }
}

/// Largest `|∂∂̄ω|` over the seeded points and a coarse lattice.
pub fn gauduchon_scan(m: &MetricField, points: &[Point], mode: JetMode) -> Result<f64> {
    let lattice = lattice_points(m.model(), APPLICABILITY_LATTICE);
    let all: Vec<&Point> = points.iter().chain(lattice.iter()).collect();
    let r: Result<Vec<f64>> = all
        .par_iter()
        .map(|p| PointGeometry::new(m, p, mode).map(|g| g.gauduchon_residual()))
        .collect();
    Ok(r?.into_iter().fold(0.0, f64::max))
}

pub fn verify_pointwise(id: &str, m: &MetricField, cfg: &PointwiseConfig) -> Result<VerificationReport> {
    descriptor(id).and_then(|d| {
        if d.kind == Kind::Integral {
            Err(Error::Usage(format!("`{id}` is an integral identity")))
        } else {
            Ok(())
        }
    })?;
    Ok(verify_pointwise_suite(&[id], m, cfg)?.remove(0))
}

/// Evaluates several pointwise identities on one shared set of points.
pub fn verify_pointwise_suite(ids: &[&str], m: &MetricField, cfg: &PointwiseConfig) -> Result<Vec<VerificationReport>> {
    let descs: Vec<&IdentityDescriptor> = ids.iter().map(|id| descriptor(id)).collect::<Result<_>>()?;
    if let Some(d) = descs.iter().find(|d| d.kind == Kind::Integral) {
        return Err(Error::Usage(format!("`{}` is an integral identity", d.id)));
    }
    let points = sample_points(m.model(), cfg.n_points, cfg.seed);
    let sampling = Sampling::Points {
        count: cfg.n_points,
        seed: cfg.seed,
        prng: PRNG_NAME.to_string(),
        jet_mode: cfg.mode.as_str().to_string(),
    };
    let needs_gauduchon = descs.iter().any(|d| d.applicability == Applicability::GauduchonOnly);
    // Applicability is a property of the metric, so it is decided with exact jets.
    let gauduchon = if needs_gauduchon { Some(gauduchon_scan(m, &points, JetMode::Analytic)?) } else { None };

    let active: Vec<bool> = descs
        .iter()
        .map(|d| d.applicability == Applicability::Unconditional || gauduchon.is_some_and(|r| r < GAUDUCHON_TOL))
        .collect();

    // Per point: (outcome, seconds) for every identity.
    let per_point: Vec<Vec<(Outcome, f64)>> = points
        .par_iter()
        .map(|p| {
            let g = PointGeometry::new(m, p, cfg.mode)?;
            descs
                .iter()
                .zip(&active)
                .map(|(d, &on)| {
                    if !on {
                        return Ok((Outcome::default(), 0.0));
                    }
                    let t = Stopwatch::start();
                    let o = worst(&pointwise_checks(d.id, &g)?, reference_scale(d.id, &g));
                    Ok((o, t.secs()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    Ok(descs
        .iter()
        .enumerate()
        .map(|(k, d)| {
            if !active[k] {
                let why = format!(
                    "inapplicable: Gauduchon only, max |ddbar omega| = {:.3e}",
                    gauduchon.unwrap_or(f64::NAN)
                );
                return VerificationReport::skipped(d, m, sampling.clone(), cfg.tol, why);
            }
            let (o, secs) = per_point
                .iter()
                .map(|row| row[k])
                .fold((Outcome::default(), 0.0), |(o, s), (o2, s2)| (o.worse(o2), s + s2));
            VerificationReport::from_outcome(d, m, sampling.clone(), o, cfg.tol, secs * 1e3)
        })
        .collect())
}

pub fn verify_integral(id: &str, m: &MetricField, grid: &QuadratureGrid, tol: f64) -> Result<VerificationReport> {
    let d = descriptor(id)?;
    if d.kind != Kind::Integral {
        return Err(Error::Usage(format!("`{id}` is a pointwise identity")));
    }
    Ok(verify_integral_suite(&[id], m, grid, tol)?.remove(0))
}

pub fn verify_integral_suite(
    ids: &[&str],
    m: &MetricField,
    grid: &QuadratureGrid,
    tol: f64,
) -> Result<Vec<VerificationReport>> {
    let descs: Vec<&IdentityDescriptor> = ids.iter().map(|id| descriptor(id)).collect::<Result<_>>()?;
    if let Some(d) = descs.iter().find(|d| d.kind != Kind::Integral) {
        return Err(Error::Usage(format!("`{}` is a pointwise identity", d.id)));
    }
    let t = Stopwatch::start();
    let x = integrate_densities(grid, m)?;
    let shared = t.secs() / descs.len().max(1) as f64;
    integral_reports(&descs, m, grid, &x, tol, shared)
}

/// Reports for already-integrated densities.
pub fn integral_reports_from(
    ids: &[&str],
    m: &MetricField,
    grid: &QuadratureGrid,
    x: &Densities,
    tol: f64,
) -> Result<Vec<VerificationReport>> {
    let descs: Vec<&IdentityDescriptor> = ids.iter().map(|id| descriptor(id)).collect::<Result<_>>()?;
    integral_reports(&descs, m, grid, x, tol, 0.0)
}

fn integral_reports(
    descs: &[&IdentityDescriptor],
    m: &MetricField,
    grid: &QuadratureGrid,
    x: &Densities,
    tol: f64,
    shared_secs: f64,
) -> Result<Vec<VerificationReport>> {
    let sampling = Sampling::Grid { n: grid.n, nodes: grid.len() };
    descs
        .iter()
        .map(|d| {
            let t = Stopwatch::start();
            let o = worst(&integral_checks(d.id, x)?, integral_reference(x));
            let ms = (t.secs() + shared_secs) * 1e3;
            Ok(VerificationReport::from_outcome(d, m, sampling.clone(), o, tol, ms))
        })
        .collect()
}

pub fn pointwise_ids() -> Vec<&'static str> {
    POINTWISE.iter().map(|d| d.id).collect()
}

pub fn integral_ids() -> Vec<&'static str> {
    INTEGRAL.iter().map(|d| d.id).collect()
}

// ---------------------------------------------------------------------------
// First Chern number

/// The four integral expressions of `4π²c₁²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChernFormula {
    /// `‖S_{SB(1)}‖² − ‖Ric^{SB(1)}‖² + 2‖∂∂̄*ω‖²`.
    #[serde(rename = "sb1")]
    FirstSbRicci,
    /// The expression built on `Ric^{SB(2)}`.
    #[serde(rename = "sb2")]
    SecondSbRicci,
    /// The expression built on `Ric^{SB(3)}`.
    #[serde(rename = "sb3")]
    ThirdSbRicci,
    /// `∫(S_{C(1)}² − |Θ^{(1)}|²) ω²/2`.
    #[serde(rename = "chern-weil")]
    ChernWeil,
}

impl ChernFormula {
    pub const ALL: [ChernFormula; 4] =
        [Self::FirstSbRicci, Self::SecondSbRicci, Self::ThirdSbRicci, Self::ChernWeil];

    const NAMES: [(&'static str, &'static str, ChernFormula); 4] = [
        ("sb1", "3.23", Self::FirstSbRicci),
        ("sb2", "4.1", Self::SecondSbRicci),
        ("sb3", "4.9", Self::ThirdSbRicci),
        ("chern-weil", "4.17", Self::ChernWeil),
    ];

    pub fn parse(s: &str) -> Result<Self> {
        Self::NAMES
            .iter()
            .find(|(a, b, _)| *a == s || *b == s)
            .map(|x| x.2)
            .ok_or_else(|| Error::Usage(format!("unknown formula `{s}` (expected sb1, sb2, sb3 or chern-weil)")))
    }

    pub fn name(&self) -> &'static str {
        Self::NAMES.iter().find(|x| x.2 == *self).map(|x| x.0).unwrap_or("?")
    }

    /// The registry identity whose right-hand side this formula is.
    pub fn identity(&self) -> &'static str {
        match self {
            Self::FirstSbRicci => "IN-12",
            Self::SecondSbRicci => "IN-13",
            Self::ThirdSbRicci => "IN-14",
            Self::ChernWeil => "IN-15",
        }
    }

    pub fn evaluate(&self, x: &Densities) -> f64 {
        let w = chern_rhs(*self, x);
        w.total(1)[0].re
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernValue {
    pub formula: ChernFormula,
    /// The quadrature value of `4π²c₁²`.
    pub value: f64,
    /// `|I(N) − I(N_ref)|`.
    pub error: f64,
    pub n: usize,
    pub n_ref: usize,
}

impl ChernValue {
    pub fn c1_squared(&self) -> f64 {
        self.value / (4.0 * std::f64::consts::PI * std::f64::consts::PI)
    }
}

fn chern_from(x: &DensityIntegrals, f: ChernFormula) -> ChernValue {
    let v = f.evaluate(&x.fine);
    ChernValue { formula: f, value: v, error: (v - f.evaluate(&x.coarse)).abs(), n: x.n, n_ref: x.n_ref }
}

pub fn chern_number(m: &MetricField, n: usize, formula: ChernFormula) -> Result<ChernValue> {
    Ok(chern_from(&DensityIntegrals::compute(m, n)?, formula))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChernSummary {
    pub values: [ChernValue; 4],
    /// Largest minus smallest of the four values.
    pub spread: f64,
    /// Sum of the four error estimates.
    pub combined_error: f64,
}

pub fn chern_summary_from(x: &DensityIntegrals) -> ChernSummary {
    let values = ChernFormula::ALL.map(|f| chern_from(x, f));
    let hi = values.iter().map(|v| v.value).fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().map(|v| v.value).fold(f64::INFINITY, f64::min);
    ChernSummary { values, spread: hi - lo, combined_error: values.iter().map(|v| v.error).sum() }
}

pub fn chern_numbers(m: &MetricField, n: usize) -> Result<ChernSummary> {
    Ok(chern_summary_from(&DensityIntegrals::compute(m, n)?))
}

// ---------------------------------------------------------------------------
// The constant in the torsion bound

/// Below this the torsion integral counts as zero.
pub const TORSION_FLOOR: f64 = 1e-12;

/// `‖𝓡_{ij} + 𝓡_{ji} − 3T_iT_j‖² / (|∂̄*ω|⁴, 1)`, or 0 when the denominator vanishes.
pub fn estimate_a_from(x: &Densities) -> f64 {
    let den = x.v[T4].re;
    if den.abs() < TORSION_FLOOR {
        0.0
    } else {
        x.v[SHIFT3].re / den
    }
}

pub fn estimate_a(m: &MetricField, grid: &QuadratureGrid) -> Result<f64> {
    Ok(estimate_a_from(&integrate_densities(grid, m)?))
}

// ---------------------------------------------------------------------------
// Theorem diagnostics

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    /// `𝓡ic^{(2,0)} = 0` and `Ric^{SB(2)} + 7/2 τ ≤ 0`.
    #[serde(rename = "ric2")]
    SecondRicci,
    /// `𝓡ic^{(2,0)} = 0` and `Ric^{SB(3)} + Ric^{SB(4)} + 6τ ≤ 0` (or the complexified form).
    #[serde(rename = "ric34")]
    ThirdFourthRicci,
    /// Gauduchon, `𝓡ic^{(2,0)} = 0` and `Ric^{SB(2)} + 3/2 τ ≤ 0`.
    #[serde(rename = "ric2-gauduchon")]
    SecondRicciGauduchon,
    /// Gauduchon, `𝓡ic^{(2,0)} = 0` and the third/fourth combination with `5τ`.
    #[serde(rename = "ric34-gauduchon")]
    ThirdFourthRicciGauduchon,
    /// Parallel SB torsion and one semi-definite Ricci curvature.
    #[serde(rename = "parallel-torsion")]
    ParallelTorsion,
    /// `𝓡ic^{(1,1)} + conj + (a+3)/2 τ ≤ 0`.
    #[serde(rename = "complex-ricci")]
    ComplexRicci,
    /// Gauduchon and `𝓡ic^{(1,1)} + conj + (a+1)/2 τ ≤ 0`.
    #[serde(rename = "complex-ricci-gauduchon")]
    ComplexRicciGauduchon,
}

impl Theorem {
    pub const ALL: [Theorem; 7] = [
        Self::SecondRicci,
        Self::ThirdFourthRicci,
        Self::SecondRicciGauduchon,
        Self::ThirdFourthRicciGauduchon,
        Self::ParallelTorsion,
        Self::ComplexRicci,
        Self::ComplexRicciGauduchon,
    ];

    const NAMES: [(&'static str, &'static str, Theorem); 7] = [
        ("ric2", "1.2", Self::SecondRicci),
        ("ric34", "1.3", Self::ThirdFourthRicci),
        ("ric2-gauduchon", "1.4x", Self::SecondRicciGauduchon),
        ("ric34-gauduchon", "1.4", Self::ThirdFourthRicciGauduchon),
        ("parallel-torsion", "1.5", Self::ParallelTorsion),
        ("complex-ricci", "6.1", Self::ComplexRicci),
        ("complex-ricci-gauduchon", "6.2", Self::ComplexRicciGauduchon),
    ];

    pub fn parse(s: &str) -> Result<Self> {
        Self::NAMES
            .iter()
            .find(|(a, b, _)| *a == s || *b == s)
            .map(|x| x.2)
            .ok_or_else(|| {
                let names: Vec<&str> = Self::NAMES.iter().map(|x| x.0).collect();
                Error::Usage(format!("unknown theorem `{s}` (expected one of {})", names.join(", ")))
            })
    }

    pub fn name(&self) -> &'static str {
        Self::NAMES.iter().find(|x| x.2 == *self).map(|x| x.0).unwrap_or("?")
    }

    /// Whether the conclusion is that the metric is Kähler.
    pub fn concludes_kahler(&self) -> bool {
        *self != Self::ParallelTorsion
    }

    fn needs_r20_zero(&self) -> bool {
        matches!(
            self,
            Self::SecondRicci | Self::ThirdFourthRicci | Self::SecondRicciGauduchon | Self::ThirdFourthRicciGauduchon
        )
    }

    fn needs_gauduchon(&self) -> bool {
        matches!(self, Self::SecondRicciGauduchon | Self::ThirdFourthRicciGauduchon | Self::ComplexRicciGauduchon)
    }

    fn needs_a(&self) -> bool {
        matches!(self, Self::ComplexRicci | Self::ComplexRicciGauduchon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    NonPositive,
    /// Either `≥ 0` or `≤ 0`.
    SemiDefinite,
}

#[derive(Debug, Clone, Copy)]
enum Combo {
    /// `Ric^{SB(k)} + c τ`.
    Ric(usize, f64),
    /// `Ric^{SB(3)} + Ric^{SB(4)} + c τ`.
    Ric34(f64),
    /// `𝓡ic^{(1,1)} + conj + c τ`.
    Complex(f64),
}

impl Combo {
    fn label(&self) -> String {
        match self {
            Combo::Ric(k, c) => format!("Ric_SB{} + {c} tau", k + 1),
            Combo::Ric34(c) => format!("Ric_SB3 + Ric_SB4 + {c} tau"),
            Combo::Complex(c) => format!("cRic11 + conj(cRic11) + {c} tau"),
        }
    }

    /// Hermitian coefficient matrix `M` of the real `(1,1)`-form `√−1 M`.
    fn matrix(&self, g: &PointGeometry) -> Mat2 {
        let t = g.ct.t;
        let tau = [[t[0] * t[0].conj(), t[0] * t[1].conj()], [t[1] * t[0].conj(), t[1] * t[1].conj()]];
        let add = |a: &Mat2, b: &Mat2, c: f64| {
            let mut out = *a;
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] += c * b[i][j];
                }
            }
            out
        };
        let r = &g.ric.ric;
        match *self {
            Combo::Ric(k, c) => add(&r[k], &tau, c),
            Combo::Ric34(c) => add(&add(&r[2], &r[3], 1.0), &tau, c),
            Combo::Complex(c) => {
                let r11 = g.cric.r11();
                add(&add(&r11, &mat_conj_transpose(&r11), 1.0), &tau, c)
            }
        }
    }
}

/// Eigenvalues of a Hermitian form relative to the metric, i.e. the roots of
/// `det(A − λh) = 0`.
pub fn relative_eigenvalues(a: &Mat2, h: &Mat2) -> [f64; 2] {
    let qa = (h[0][0] * h[1][1] - h[0][1] * h[1][0]).re;
    let qb = -(a[0][0] * h[1][1] + a[1][1] * h[0][0] - a[0][1] * h[1][0] - a[1][0] * h[0][1]).re;
    let qc = (a[0][0] * a[1][1] - a[0][1] * a[1][0]).re;
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
    let (l1, l2) = ((-qb - disc) / (2.0 * qa), (-qb + disc) / (2.0 * qa));
    [l1.min(l2), l1.max(l2)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationReport {
    pub label: String,
    pub required: Sign,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub value: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: Theorem,
    pub metric: String,
    pub grid_n: usize,
    /// Largest pointwise norm of `𝓡ic^{(2,0)}`.
    pub r20_residual: f64,
    /// Largest `|∂∂̄ω|`.
    pub gauduchon_residual: f64,
    /// Largest `|∇T|` for the SB connection.
    pub parallel_torsion_residual: f64,
    /// `‖∂ω‖²`.
    pub kahler_defect: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub a: Option<f64>,
    pub combinations: Vec<CombinationReport>,
    pub hypotheses: Vec<HypothesisCheck>,
    pub hypotheses_hold: bool,
    /// Every curvature combination vanishes identically on the grid.
    pub degenerate: bool,
    pub verdict: String,
}

impl TheoremReport {
    /// A theorem concluding Kählerness must have a failing hypothesis on a
    /// metric with positive Kähler defect.
    pub fn is_consistent(&self) -> bool {
        !(self.theorem.concludes_kahler() && self.kahler_defect > HYPOTHESIS_TOL && self.hypotheses_hold)
    }
}

#[derive(Debug, Clone, Copy)]
struct ScanStats {
    r20: f64,
    gauduchon: f64,
    parallel: f64,
    eig: [[f64; 2]; 4],
}

impl ScanStats {
    fn empty() -> Self {
        Self { r20: 0.0, gauduchon: 0.0, parallel: 0.0, eig: [[f64::INFINITY, f64::NEG_INFINITY]; 4] }
    }

    fn merge(mut self, o: &Self) -> Self {
        self.r20 = self.r20.max(o.r20);
        self.gauduchon = self.gauduchon.max(o.gauduchon);
        self.parallel = self.parallel.max(o.parallel);
        for k in 0..4 {
            self.eig[k][0] = self.eig[k][0].min(o.eig[k][0]);
            self.eig[k][1] = self.eig[k][1].max(o.eig[k][1]);
        }
        self
    }
}

fn combos(th: Theorem, a: f64) -> Vec<(Combo, Sign)> {
    use Sign::*;
    match th {
        Theorem::SecondRicci => vec![(Combo::Ric(1, 3.5), NonPositive)],
        Theorem::ThirdFourthRicci => vec![(Combo::Ric34(6.0), NonPositive), (Combo::Complex(6.0), NonPositive)],
        Theorem::SecondRicciGauduchon => vec![(Combo::Ric(1, 1.5), NonPositive)],
        Theorem::ThirdFourthRicciGauduchon => {
            vec![(Combo::Ric34(5.0), NonPositive), (Combo::Complex(5.0), NonPositive)]
        }
        Theorem::ParallelTorsion => vec![
            (Combo::Ric(0, 0.0), SemiDefinite),
            (Combo::Ric(1, 0.0), SemiDefinite),
            (Combo::Ric34(0.0), SemiDefinite),
            (Combo::Complex(0.0), SemiDefinite),
        ],
        Theorem::ComplexRicci => vec![(Combo::Complex((a + 3.0) / 2.0), NonPositive)],
        Theorem::ComplexRicciGauduchon => vec![(Combo::Complex((a + 1.0) / 2.0), NonPositive)],
    }
}

/// Evaluates the hypotheses of `th` on every node of `grid`. Never makes a
/// claim about the conclusion.
pub fn theorem_report(m: &MetricField, grid: &QuadratureGrid, th: Theorem) -> Result<TheoremReport> {
    let x = integrate_densities(grid, m)?;
    let a = estimate_a_from(&x);
    let kahler_defect = x.v[D_OMEGA2].re;
    let list = combos(th, a);

    const CHUNK: usize = 2048;
    let chunks: Vec<Result<ScanStats>> = grid
        .nodes
        .par_chunks(CHUNK)
        .map(|nodes| {
            let mut s = ScanStats::empty();
            for p in nodes {
                let g = PointGeometry::from_jet(grid.metric_jet(m, p)?);
                let h = g.mj.h_value();
                let mut node = ScanStats {
                    r20: norm20_sq(&g.r20(), &g.hinv()).max(0.0).sqrt(),
                    gauduchon: g.gauduchon_residual(),
                    parallel: g.td.parallel_residual,
                    eig: [[f64::INFINITY, f64::NEG_INFINITY]; 4],
                };
                for (k, (c, _)) in list.iter().enumerate() {
                    node.eig[k] = relative_eigenvalues(&c.matrix(&g), &h);
                }
                s = s.merge(&node);
            }
            Ok(s)
        })
        .collect();
    let mut stats = ScanStats::empty();
    for c in chunks {
        stats = stats.merge(&c?);
    }

    let combinations: Vec<CombinationReport> = list
        .iter()
        .enumerate()
        .map(|(k, (c, sign))| {
            let [lo, hi] = stats.eig[k];
            let satisfied = match sign {
                Sign::NonPositive => hi <= HYPOTHESIS_TOL,
                Sign::SemiDefinite => hi <= HYPOTHESIS_TOL || lo >= -HYPOTHESIS_TOL,
            };
            CombinationReport { label: c.label(), required: *sign, min_eigenvalue: lo, max_eigenvalue: hi, satisfied }
        })
        .collect();
    let degenerate = combinations
        .iter()
        .all(|c| c.min_eigenvalue.abs() <= HYPOTHESIS_TOL && c.max_eigenvalue.abs() <= HYPOTHESIS_TOL);

    let mut hypotheses = Vec::new();
    if th.needs_r20_zero() {
        hypotheses.push(HypothesisCheck {
            name: "cRic20 = 0".into(),
            value: stats.r20,
            holds: stats.r20 < HYPOTHESIS_TOL,
        });
    }
    if th.needs_gauduchon() {
        hypotheses.push(HypothesisCheck {
            name: "Gauduchon".into(),
            value: stats.gauduchon,
            holds: stats.gauduchon < GAUDUCHON_TOL,
        });
    }
    if th == Theorem::ParallelTorsion {
        hypotheses.push(HypothesisCheck {
            name: "parallel SB torsion".into(),
            value: stats.parallel,
            holds: stats.parallel < HYPOTHESIS_TOL,
        });
    }
    let any_combo = combinations.iter().any(|c| c.satisfied);
    hypotheses.push(HypothesisCheck {
        name: if combinations.len() > 1 { "one curvature condition".into() } else { "curvature condition".into() },
        value: combinations
            .iter()
            .map(|c| match c.required {
                Sign::NonPositive => c.max_eigenvalue,
                Sign::SemiDefinite => c.max_eigenvalue.min(-c.min_eigenvalue),
            })
            .fold(f64::INFINITY, f64::min),
        holds: any_combo,
    });
    let hold = hypotheses.iter().all(|h| h.holds);
    let mut verdict = if hold { "hypotheses hold".to_string() } else { "hypotheses fail".to_string() };
    if degenerate {
        verdict.push_str(" (degenerate: all Ricci zero)");
    }
    Ok(TheoremReport {
        theorem: th,
        metric: m.descriptor(),
        grid_n: grid.n,
        r20_residual: stats.r20,
        gauduchon_residual: stats.gauduchon,
        parallel_torsion_residual: stats.parallel,
        kahler_defect,
        a: th.needs_a().then_some(a),
        combinations,
        hypotheses,
        hypotheses_hold: hold,
        degenerate,
        verdict,
    })
}

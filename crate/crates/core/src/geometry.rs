//! Every derived quantity at one point, assembled once and shared by the
//! pointwise identities and by the integrands of the integral identities.

use crate::connection::{
    build_connections, sb_nabla_torsion, torsion_norm_sq, ConnectionTorsion, TorsionDerivatives,
};
use crate::curvature::{
    chern_curvature, complexified_ricci, norm20_sq, pair02, pair20, riemannian_ric20, sb_curvature,
    sb_ricci_family, symmetrized_r20_shift, ChernCurvature, ComplexRicci, Mat2, SbCurvature, SbRicci,
};
use crate::error::Result;
use crate::forms::{dbar, dbar_star, del, del_star, Form, FormMetric, FormValue, TOP};
use crate::jets::{Jet1, Point};
use crate::metrics::{JetMode, MetricField, MetricJet};
use crate::scalar::{metric_inverse, Scalar, C64, I};

/// `√−1 M_{i j̄} dz^i ∧ dz̄^j`.
pub fn form11(m: &Mat2) -> FormValue {
    Form::from_11(m).scale(I)
}

#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub mj: MetricJet,
    pub ct: ConnectionTorsion,
    pub td: TorsionDerivatives,
    pub chern: ChernCurvature,
    pub sb: SbCurvature,
    pub ric: SbRicci,
    pub cric: ComplexRicci,
    pub fm: FormMetric<C64>,
    pub fm1: FormMetric<Jet1>,
    pub omega: FormValue,
    /// `∂ω` and `∂̄ω` with first jets of their coefficients.
    pub d_omega: Form<Jet1>,
    pub dbar_omega: Form<Jet1>,
    /// `∂̄*ω = √−1 T_i dz^i` (torsion route).
    pub dbar_star_omega: Form<Jet1>,
    /// `∂*ω`, the conjugate of `∂̄*ω`.
    pub del_star_omega: Form<Jet1>,
    pub t_norm2: f64,
    /// `∂∂*ω`.
    pub dd_star: FormValue,
    /// `∂̄∂̄*ω`.
    pub dbar_dbar_star: FormValue,
    /// `∂∂̄*ω`, a `(2,0)`-form.
    pub del_dbar_star: FormValue,
    /// `∂*∂ω` and `∂̄*∂̄ω` through the star operator.
    pub del_star_del: FormValue,
    pub dbar_star_dbar: FormValue,
    /// `Λ∂̄∂̄*ω`.
    pub lam: C64,
    /// `√−1 ∂̄*ω ∧ ∂*ω`.
    pub tau: FormValue,
    pub theta1: FormValue,
    pub theta2: FormValue,
    pub ric_forms: [FormValue; 4],
    /// `√−1 𝓡_{i j̄} dz^i ∧ dz̄^j` from the direct double contraction.
    pub cric11: FormValue,
    /// `(1,1)`-part of the complexified Riemannian Ricci tensor, assembled
    /// from the Chern-Ricci form and the torsion forms.
    pub riem11: FormValue,
    /// `(2,0)`-part of the complexified Riemannian Ricci tensor from the
    /// Chern derivative of the torsion one-form.
    pub riem20: Mat2,
    /// `∂∂̄ω`.
    pub ddbar_omega: FormValue,
}

impl PointGeometry {
    pub fn new(m: &MetricField, p: &Point, mode: JetMode) -> Result<Self> {
        Ok(Self::from_jet(m.metric_jet_mode(p, mode)?))
    }

    pub fn from_jet(mj: MetricJet) -> Self {
        let ct = build_connections(&mj);
        let td = sb_nabla_torsion(&ct, &mj);
        let chern = chern_curvature(&mj);
        let sb = sb_curvature(&mj, &ct);
        let hinv = mj.hinv_value();
        let ric = sb_ricci_family(&sb, &hinv);
        let cric = complexified_ricci(&sb, &ric, &hinv);
        let fm = FormMetric::new(&mj.h_value(), &hinv);
        // First-order Gram blocks are only needed to star one-forms and three-forms.
        let fm1 = FormMetric::with_degrees(&mj.h1(), &mj.hinv, 0b01010);

        let omega2 = Form::from_11(&mj.h).scale(I);
        let omega = omega2.values();
        let d_omega = del(&omega2);
        let dbar_omega = dbar(&omega2);
        let ddbar_omega = del(&dbar_omega);

        let z = Jet1::zero();
        let dbar_star_omega =
            Form::one_form([ct.jet.t[0].scale(I), ct.jet.t[1].scale(I), z, z]);
        let del_star_omega = dbar_star_omega.conj_form();
        let t_norm2 = torsion_norm_sq(&ct.t, &hinv);

        let dd_star = del(&del_star_omega);
        let dbar_dbar_star = dbar(&dbar_star_omega);
        let del_dbar_star = del(&dbar_star_omega);
        let del_star_del = del_star(&d_omega, &fm1, &fm);
        let dbar_star_dbar = dbar_star(&dbar_omega, &fm1, &fm);
        let lam = fm.lambda(&dbar_dbar_star).c[0];
        let tau = dbar_star_omega.values().wedge(&del_star_omega.values()).scale(I);

        let theta1 = form11(&chern.theta1);
        let theta2 = form11(&chern.theta2);
        let ric_forms = ric.ric.map(|r| form11(&r));
        let cric11 = form11(&cric.r11());
        let riem11 = theta1 - (dd_star + dbar_dbar_star).scale(C64::new(0.5, 0.0))
            + tau.scale(C64::new(0.5, 0.0))
            + omega.scale(lam - t_norm2);
        let riem20 = riemannian_ric20(&ct, &td);

        Self {
            mj,
            ct,
            td,
            chern,
            sb,
            ric,
            cric,
            fm,
            fm1,
            omega,
            d_omega,
            dbar_omega,
            dbar_star_omega,
            del_star_omega,
            t_norm2,
            dd_star,
            dbar_dbar_star,
            del_dbar_star,
            del_star_del,
            dbar_star_dbar,
            lam,
            tau,
            theta1,
            theta2,
            ric_forms,
            cric11,
            riem11,
            riem20,
            ddbar_omega,
        }
    }

    pub fn point(&self) -> &Point {
        &self.mj.point
    }

    pub fn hinv(&self) -> Mat2 {
        self.fm.hinv
    }

    pub fn s_c1(&self) -> f64 {
        self.chern.s_c1
    }

    /// `𝓡_{ij}` of the complexified SB Ricci tensor.
    pub fn r20(&self) -> Mat2 {
        self.cric.r20()
    }

    /// `𝓡_{ij} + 𝓡_{ji} − c T_i T_j`.
    pub fn shifted(&self, c: f64) -> Mat2 {
        symmetrized_r20_shift(&self.r20(), &self.ct.t, c)
    }

    /// `∂̄*ω ⊗ ∂̄*ω` as the tensor `−T_i T_j`.
    pub fn torsion_square20(&self) -> Mat2 {
        let t = self.ct.t;
        [[-t[0] * t[0], -t[0] * t[1]], [-t[1] * t[0], -t[1] * t[1]]]
    }

    /// `∂*ω ⊗ ∂*ω` as the tensor `−T̄_i T̄_j`.
    pub fn torsion_square02(&self) -> Mat2 {
        let t = self.ct.t.map(|x| x.conj());
        [[-t[0] * t[0], -t[0] * t[1]], [-t[1] * t[0], -t[1] * t[1]]]
    }

    /// `∂*∂̄*ω + ∂̄*∂*ω`, a function.
    pub fn codifferential_anticommutator(&self) -> C64 {
        let a = del_star(&self.dbar_star_omega, &self.fm1, &self.fm);
        let b = dbar_star(&self.del_star_omega, &self.fm1, &self.fm);
        (a + b).c[0]
    }

    /// `∂*∂̄*ω`.
    pub fn del_star_dbar_star(&self) -> C64 {
        del_star(&self.dbar_star_omega, &self.fm1, &self.fm).c[0]
    }

    /// Density of `Θ^{(1)} ∧ Θ^{(1)}` against `ω²/2`.
    pub fn theta_wedge_density(&self) -> C64 {
        self.theta1.wedge(&self.theta1).c[TOP] / self.fm.vol
    }

    pub fn gauduchon_residual(&self) -> f64 {
        self.ddbar_omega.max_abs()
    }

    pub fn densities(&self) -> Densities {
        use term::*;
        let fm = &self.fm;
        let inner = |a: &FormValue, b: &FormValue| fm.inner(a, b);
        let hinv = self.hinv();
        let t2 = C64::new(self.t_norm2, 0.0);
        let lam = self.lam;
        let half_codiff = (self.del_star_del + self.dbar_star_dbar).scale(C64::new(0.5, 0.0));
        let s_sb1 = C64::new(self.ric.s_sb1, 0.0);
        let s_sb2 = C64::new(self.ric.s_sb2, 0.0);
        let s_c1 = C64::new(self.s_c1(), 0.0);

        let mut v = [C64::new(0.0, 0.0); COUNT];
        v[ONE] = C64::new(1.0, 0.0);
        v[T2] = t2;
        v[T4] = t2 * t2;
        v[LAM] = lam;
        v[LAM2] = lam * lam.conj();
        v[LAM_T2] = lam * t2;
        v[DDBAR2] = inner(&self.dbar_dbar_star, &self.dbar_dbar_star);
        v[DEL_DBAR2] = inner(&self.del_dbar_star, &self.del_dbar_star);
        v[D_OMEGA2] = fm.norm_sq(&self.d_omega.values());
        v[DD_TAU] = inner(&self.dd_star, &self.tau);
        v[DBDB_TAU] = inner(&self.dbar_dbar_star, &self.tau);
        for k in 0..4 {
            v[RIC_TAU + k] = inner(&self.ric_forms[k], &self.tau);
            v[RIC_HALF + k] = inner(&self.ric_forms[k], &half_codiff);
            v[RIC_NORM + k] = inner(&self.ric_forms[k], &self.ric_forms[k]);
        }
        v[CRIC_HALF] = inner(&self.cric11, &half_codiff);
        v[CRIC_NORM] = inner(&self.cric11, &self.cric11);
        v[SHIFT3] = C64::new(norm20_sq(&self.shifted(3.0), &hinv), 0.0);
        v[SHIFT2] = C64::new(norm20_sq(&self.shifted(2.0), &hinv), 0.0);
        v[P20] = pair20(&self.r20(), &self.torsion_square20(), &hinv);
        v[P02] = pair02(&self.cric.r02(), &self.torsion_square02(), &hinv);
        v[DBDB_DSD] = inner(&self.dbar_dbar_star, &self.del_star_del);
        v[DD_DBDB] = inner(&self.dd_star, &self.dbar_dbar_star);
        v[RIEM11_TAU] = inner(&self.riem11, &self.tau);
        v[RIEM20_NORM] = C64::new(norm20_sq(&self.riem20, &hinv), 0.0);
        v[S_SB1_SQ] = s_sb1 * s_sb1;
        v[S_SB1_LAM] = s_sb1 * lam.conj();
        v[S_SB1_T2] = s_sb1 * t2;
        v[S_SB2_SQ] = s_sb2 * s_sb2;
        v[S_SB2_LAM] = s_sb2 * lam.conj();
        v[S_SB2_T2] = s_sb2 * t2;
        v[S_C1_SQ] = s_c1 * s_c1;
        v[THETA1_NORM] = inner(&self.theta1, &self.theta1);
        v[THETA2_NORM] = inner(&self.theta2, &self.theta2);
        v[THETA_WEDGE] = self.theta_wedge_density();
        Densities { v }
    }
}

/// Indices into [`Densities`]. Each entry is a pointwise scalar whose
/// integral against `ω²/2` is one term of an integral identity.
pub mod term {
    pub const ONE: usize = 0;
    /// `|∂̄*ω|²`
    pub const T2: usize = 1;
    /// `|∂̄*ω|⁴`
    pub const T4: usize = 2;
    /// `Λ∂̄∂̄*ω`
    pub const LAM: usize = 3;
    /// `|Λ∂̄∂̄*ω|²`
    pub const LAM2: usize = 4;
    /// `Λ∂̄∂̄*ω · |∂̄*ω|²`
    pub const LAM_T2: usize = 5;
    /// `|∂̄∂̄*ω|²`
    pub const DDBAR2: usize = 6;
    /// `|∂∂̄*ω|²`
    pub const DEL_DBAR2: usize = 7;
    /// `|∂ω|²`
    pub const D_OMEGA2: usize = 8;
    /// `⟨∂∂*ω, τ⟩` with `τ = √−1 ∂̄*ω ∧ ∂*ω`
    pub const DD_TAU: usize = 9;
    /// `⟨∂̄∂̄*ω, τ⟩`
    pub const DBDB_TAU: usize = 10;
    /// `⟨Ric^{SB(k)}, τ⟩`, four entries
    pub const RIC_TAU: usize = 11;
    /// `⟨Ric^{SB(k)}, ½(∂*∂ω + ∂̄*∂̄ω)⟩`, four entries
    pub const RIC_HALF: usize = 15;
    /// `|Ric^{SB(k)}|²`, four entries
    pub const RIC_NORM: usize = 19;
    pub const CRIC_HALF: usize = 23;
    pub const CRIC_NORM: usize = 24;
    /// `|𝓡_{ij} + 𝓡_{ji} − 3T_iT_j|²`
    pub const SHIFT3: usize = 25;
    /// `|𝓡_{ij} + 𝓡_{ji} − 2T_iT_j|²`
    pub const SHIFT2: usize = 26;
    /// `⟨𝓡ic^{(2,0)}, ∂̄*ω ⊗ ∂̄*ω⟩`
    pub const P20: usize = 27;
    /// `⟨𝓡ic^{(0,2)}, ∂*ω ⊗ ∂*ω⟩`
    pub const P02: usize = 28;
    /// `⟨∂̄∂̄*ω, ∂*∂ω⟩`
    pub const DBDB_DSD: usize = 29;
    /// `⟨∂∂*ω, ∂̄∂̄*ω⟩`
    pub const DD_DBDB: usize = 30;
    pub const RIEM11_TAU: usize = 31;
    pub const RIEM20_NORM: usize = 32;
    pub const S_SB1_SQ: usize = 33;
    pub const S_SB1_LAM: usize = 34;
    pub const S_SB1_T2: usize = 35;
    pub const S_SB2_SQ: usize = 36;
    pub const S_SB2_LAM: usize = 37;
    pub const S_SB2_T2: usize = 38;
    pub const S_C1_SQ: usize = 39;
    pub const THETA1_NORM: usize = 40;
    pub const THETA2_NORM: usize = 41;
    /// `Θ^{(1)} ∧ Θ^{(1)} / (ω²/2)`
    pub const THETA_WEDGE: usize = 42;
    pub const COUNT: usize = 43;
}

#[derive(Debug, Clone, Copy)]
pub struct Densities {
    pub v: [C64; term::COUNT],
}

impl Densities {
    pub fn is_finite(&self) -> bool {
        self.v.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }
}

/// Cross-checks that need the metric at second order inside the star
/// operator. Only used pointwise.
#[derive(Debug, Clone)]
pub struct StarRoutes {
    /// `−star ∂ star ω`.
    pub dbar_star_omega: FormValue,
    /// `−star ∂̄ star ω`.
    pub del_star_omega: FormValue,
    /// `√−1 Λ(∂ω)` and `−√−1 Λ(∂̄ω)`.
    pub lambda_d_omega: FormValue,
    pub lambda_dbar_omega: FormValue,
    /// `|star ∂ star ω|²`.
    pub star_d_star_norm2: f64,
}

impl StarRoutes {
    pub fn new(g: &PointGeometry) -> Self {
        let mj = &g.mj;
        let hinv2 = metric_inverse(&mj.h);
        let fm2 = FormMetric::new(&mj.h, &hinv2);
        let omega2 = Form::from_11(&mj.h).scale(I);
        let star_omega = fm2.star(&omega2);
        let dbar_star_omega = -g.fm1.star(&del(&star_omega)).values();
        let del_star_omega = -g.fm1.star(&dbar(&star_omega)).values();
        let sds = g.fm.star(&del(&star_omega).values());
        let lambda_d_omega = g.fm.lambda(&g.d_omega.values()).scale(I);
        let lambda_dbar_omega = g.fm.lambda(&g.dbar_omega.values()).scale(-I);
        Self {
            dbar_star_omega,
            del_star_omega,
            lambda_d_omega,
            lambda_dbar_omega,
            star_d_star_norm2: g.fm.norm_sq(&sds).re,
        }
    }
}

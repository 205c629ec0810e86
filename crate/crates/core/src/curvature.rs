//! Chern and Strominger-Bismut curvature, the four SB-Ricci contractions and
//! the complexified real Ricci tensor.
//!
//! Four-index tensors use the direction layout of [`crate::scalar::DIRS`]:
//! `R(A,B,C,D) = h(R(e_A,e_B)e_C, e_D)` with `e_0..e_3 = ∂₁, ∂₂, ∂̄₁, ∂̄₂`.

use crate::connection::{ConnectionTorsion, TorsionDerivatives};
use crate::metrics::MetricJet;
use crate::scalar::{conj_dir, C64};

pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];
pub type Tensor4 = [[[[C64; 4]; 4]; 4]; 4];

const Z: C64 = C64::new(0.0, 0.0);

/// `tr_ω A = h^{i j̄} A_{i j̄}`.
pub fn trace(a: &Mat2, hinv: &Mat2) -> C64 {
    let mut s = Z;
    for i in 0..2 {
        for j in 0..2 {
            s += hinv[i][j] * a[i][j];
        }
    }
    s
}

#[derive(Debug, Clone, Copy)]
pub struct ChernCurvature {
    /// `theta[i][j][k][l] = Θ_{i j̄ k l̄}`.
    pub theta: [[[[C64; 2]; 2]; 2]; 2],
    /// `h^{k l̄} Θ_{i j̄ k l̄}`.
    pub theta1: Mat2,
    /// `−∂_i∂̄_j log det h`.
    pub theta1_logdet: Mat2,
    /// `h^{k l̄} Θ_{k l̄ i j̄}`.
    pub theta2: Mat2,
    pub s_c1: f64,
}

pub fn chern_curvature(mj: &MetricJet) -> ChernCurvature {
    let hinv = mj.hinv_value();
    let mut theta = [[[[Z; 2]; 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let mut s = -mj.h[k][l].dd[i][2 + j];
                    for p in 0..2 {
                        for q in 0..2 {
                            s += hinv[p][q] * mj.h[p][l].d[2 + j] * mj.h[k][q].d[i];
                        }
                    }
                    theta[i][j][k][l] = s;
                }
            }
        }
    }
    let mut theta1 = [[Z; 2]; 2];
    let mut theta2 = [[Z; 2]; 2];
    let mut theta1_logdet = [[Z; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    theta1[i][j] += hinv[k][l] * theta[i][j][k][l];
                    theta2[i][j] += hinv[k][l] * theta[k][l][i][j];
                }
            }
            theta1_logdet[i][j] = -mj.logdet_second[i][j];
        }
    }
    let s_c1 = trace(&theta1, &hinv).re;
    ChernCurvature { theta, theta1, theta1_logdet, theta2, s_c1 }
}

#[derive(Debug, Clone, Copy)]
pub struct SbCurvature {
    /// `raw[A][B][j][k]`: coefficient of `∂_k` in `R(e_A, e_B)∂_j`.
    pub raw: [[[[C64; 2]; 2]; 4]; 4],
    /// `R(A,B,C,D)` for all sixteen direction pairs in each slot pair.
    pub lowered: Tensor4,
}

pub fn sb_curvature(mj: &MetricJet, ct: &ConnectionTorsion) -> SbCurvature {
    let g = &ct.sb_gamma;
    let gj = &ct.jet.sb_gamma;
    let mut raw = [[[[Z; 2]; 2]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for j in 0..2 {
                for k in 0..2 {
                    let mut s = gj[b][j][k].d[a] - gj[a][j][k].d[b];
                    for p in 0..2 {
                        s += g[b][j][p] * g[a][p][k] - g[a][j][p] * g[b][p][k];
                    }
                    raw[a][b][j][k] = s;
                }
            }
        }
    }
    let h = mj.h_value();
    let mut lowered = [[[[Z; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..2 {
                for d in 0..2 {
                    let mut hol = Z;
                    let mut anti = Z;
                    for k in 0..2 {
                        hol += raw[a][b][c][k] * h[k][d];
                        anti += raw[conj_dir(a)][conj_dir(b)][c][k].conj() * h[d][k];
                    }
                    lowered[a][b][c][2 + d] = hol;
                    lowered[a][b][2 + c][d] = anti;
                }
            }
        }
    }
    SbCurvature { raw, lowered }
}

impl SbCurvature {
    pub fn max_abs(&self) -> f64 {
        self.lowered.iter().flatten().flatten().flatten().fold(0.0, |m, x| m.max(x.norm()))
    }

    /// Largest violation of antisymmetry in the first and in the last slot pair.
    pub fn antisymmetry_defect(&self) -> f64 {
        let r = &self.lowered;
        let mut m: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        m = m.max((r[a][b][c][d] + r[b][a][c][d]).norm());
                        m = m.max((r[a][b][c][d] + r[a][b][d][c]).norm());
                    }
                }
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SbRicci {
    /// `ric[n]` is the `(n+1)`-th SB-Ricci matrix `R^{SB(n+1)}_{i j̄}`.
    pub ric: [Mat2; 4],
    pub s_sb1: f64,
    pub s_sb2: f64,
    /// `tr_ω` of the second and fourth matrices (must match the first and third).
    pub s_sb1_alt: f64,
    pub s_sb2_alt: f64,
}

pub fn sb_ricci_family(sb: &SbCurvature, hinv: &Mat2) -> SbRicci {
    let r = &sb.lowered;
    let mut ric = [[[Z; 2]; 2]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let w = hinv[k][l];
                    ric[0][i][j] += w * r[i][2 + j][k][2 + l];
                    ric[1][i][j] += w * r[k][2 + l][i][2 + j];
                    ric[2][i][j] += w * r[i][2 + l][k][2 + j];
                    ric[3][i][j] += w * r[k][2 + j][i][2 + l];
                }
            }
        }
    }
    SbRicci {
        s_sb1: trace(&ric[0], hinv).re,
        s_sb1_alt: trace(&ric[1], hinv).re,
        s_sb2: trace(&ric[2], hinv).re,
        s_sb2_alt: trace(&ric[3], hinv).re,
        ric,
    }
}

/// Complexified real Ricci tensor, `[X][Y]` over the four directions.
#[derive(Debug, Clone, Copy)]
pub struct ComplexRicci {
    /// Direct double contraction over both index types.
    pub route_a: Mat4,
    /// Assembled from the SB-Ricci matrices and the single contractions.
    pub route_b: Mat4,
}

impl ComplexRicci {
    /// `𝓡_{ij}` (holomorphic block of route A).
    pub fn r20(&self) -> Mat2 {
        [[self.route_a[0][0], self.route_a[0][1]], [self.route_a[1][0], self.route_a[1][1]]]
    }

    /// `𝓡_{ī j̄}`.
    pub fn r02(&self) -> Mat2 {
        [[self.route_a[2][2], self.route_a[2][3]], [self.route_a[3][2], self.route_a[3][3]]]
    }

    /// `𝓡_{i j̄}`.
    pub fn r11(&self) -> Mat2 {
        [[self.route_a[0][2], self.route_a[0][3]], [self.route_a[1][2], self.route_a[1][3]]]
    }

    /// `𝓡_{ī j}`.
    pub fn r11_bar(&self) -> Mat2 {
        [[self.route_a[2][0], self.route_a[2][1]], [self.route_a[3][0], self.route_a[3][1]]]
    }
}

pub fn complexified_ricci(sb: &SbCurvature, ric: &SbRicci, hinv: &Mat2) -> ComplexRicci {
    let r = &sb.lowered;
    let mut route_a = [[Z; 4]; 4];
    for x in 0..4 {
        for y in 0..4 {
            let mut s = Z;
            for i in 0..2 {
                for l in 0..2 {
                    s += hinv[i][l] * r[i][x][y][2 + l];
                    s += hinv[l][i] * r[2 + i][x][y][l];
                }
            }
            route_a[x][y] = s;
        }
    }
    let mut route_b = [[Z; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            route_b[i][2 + j] = ric.ric[2][i][j];
            route_b[2 + i][j] = ric.ric[3][j][i];
            let mut hol = Z;
            let mut anti = Z;
            for k in 0..2 {
                for l in 0..2 {
                    hol += hinv[k][l] * r[k][i][j][2 + l];
                    anti += hinv[k][l] * r[2 + l][2 + i][2 + j][k];
                }
            }
            route_b[i][j] = hol;
            route_b[2 + i][2 + j] = anti;
        }
    }
    ComplexRicci { route_a, route_b }
}

/// `𝕽_{ij} = −½(ᶜ∇_j T_i + ᶜ∇_i T_j + T_i T_j)`.
pub fn riemannian_ric20(ct: &ConnectionTorsion, td: &TorsionDerivatives) -> Mat2 {
    let mut out = [[Z; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = -0.5 * (td.chern_nabla_t[j][i] + td.chern_nabla_t[i][j] + ct.t[i] * ct.t[j]);
        }
    }
    out
}

/// `𝓡_{ij} + 𝓡_{ji} − c·T_i T_j`.
pub fn symmetrized_r20_shift(r20: &Mat2, t: &[C64; 2], c: f64) -> Mat2 {
    let mut out = [[Z; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = r20[i][j] + r20[j][i] - c * t[i] * t[j];
        }
    }
    out
}

/// Pointwise squared norm of a `(2,0)`-tensor, `h^{i l̄} h^{k j̄} A_{ik} conj(A_{lj})`.
pub fn norm20_sq(a: &Mat2, hinv: &Mat2) -> f64 {
    pair20(a, a, hinv).re
}

/// Pointwise pairing of `(2,0)`-tensors, `h^{i l̄} h^{k j̄} A_{ik} conj(B_{lj})`.
pub fn pair20(a: &Mat2, b: &Mat2, hinv: &Mat2) -> C64 {
    let mut s = Z;
    for i in 0..2 {
        for k in 0..2 {
            for l in 0..2 {
                for j in 0..2 {
                    s += hinv[i][l] * hinv[k][j] * a[i][k] * b[l][j].conj();
                }
            }
        }
    }
    s
}

/// Pointwise pairing of `(0,2)`-tensors `A_{ī k̄}`, `B_{l̄ j̄}`:
/// `h^{l ī} h^{j k̄} A_{ī k̄} conj(B_{l̄ j̄})`.
pub fn pair02(a: &Mat2, b: &Mat2, hinv: &Mat2) -> C64 {
    let mut s = Z;
    for i in 0..2 {
        for k in 0..2 {
            for l in 0..2 {
                for j in 0..2 {
                    s += hinv[l][i] * hinv[j][k] * a[i][k] * b[l][j].conj();
                }
            }
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{build_connections, sb_nabla_torsion};
    use crate::jets::{Chart, Point};
    use crate::metrics::MetricField;
    use crate::sampling::sample_points;

    struct Bundle {
        mj: MetricJet,
        chern: ChernCurvature,
        sb: SbCurvature,
        ric: SbRicci,
        cr: ComplexRicci,
    }

    fn at(m: &MetricField, p: &Point) -> Bundle {
        let mj = m.metric_jet(p).unwrap();
        let ct = build_connections(&mj);
        let chern = chern_curvature(&mj);
        let sb = sb_curvature(&mj, &ct);
        let ric = sb_ricci_family(&sb, &mj.hinv_value());
        let cr = complexified_ricci(&sb, &ric, &mj.hinv_value());
        Bundle { mj, chern, sb, ric, cr }
    }

    fn close(a: &Mat2, b: &Mat2, tol: f64) -> bool {
        (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).norm() < tol))
    }

    fn diag(a: f64, b: f64) -> Mat2 {
        [[C64::new(a, 0.0), Z], [Z, C64::new(b, 0.0)]]
    }

    #[test]
    fn hopf_chern_ricci_at_unit_point() {
        let b = at(&MetricField::hopf_standard(), &Point::new(C64::new(1.0, 0.0), Z, Chart::Hopf));
        assert!(close(&b.chern.theta1, &diag(0.0, 2.0), 1e-13));
        assert!((b.chern.s_c1 - 2.0).abs() < 1e-13);
    }

    #[test]
    fn fubini_study_at_origin() {
        let b = at(&MetricField::fubini_study(), &Point::new(Z, Z, Chart::Cp2));
        assert!(close(&b.chern.theta1, &diag(3.0, 3.0), 1e-13));
        assert!((b.chern.s_c1 - 6.0).abs() < 1e-13);
        for r in &b.ric.ric {
            assert!(close(r, &diag(3.0, 3.0), 1e-13));
        }
        assert!((b.ric.s_sb1 - 6.0).abs() < 1e-13 && (b.ric.s_sb2 - 6.0).abs() < 1e-13);
        // torsion-free: SB curvature is the Chern curvature
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let d = b.sb.lowered[i][2 + j][k][2 + l] - b.chern.theta[i][j][k][l];
                        assert!(d.norm() < 1e-13);
                    }
                }
            }
        }
    }

    #[test]
    fn hopf_is_sb_flat() {
        for p in sample_points(Chart::Hopf, 40, 12) {
            let b = at(&MetricField::hopf_standard(), &p);
            assert!(b.sb.max_abs() < 1e-12, "{}", b.sb.max_abs());
            assert!((b.chern.s_c1 - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_torus_is_flat() {
        let b = at(&MetricField::torus_flat(), &Point::from_real([0.2, 0.4, 0.6, 0.8], Chart::Torus));
        assert_eq!(b.sb.max_abs(), 0.0);
        assert!(b.cr.route_a.iter().flatten().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn symmetries_and_dual_routes() {
        let ms = [
            MetricField::torus_perturbed(0.1).unwrap(),
            MetricField::torus_perturbed(0.35).unwrap(),
            MetricField::hopf_conformal(0.05).unwrap(),
            MetricField::hopf_conformal(0.7).unwrap(),
            MetricField::fubini_study(),
        ];
        for m in ms {
            for p in sample_points(m.model(), 25, 21) {
                let b = at(&m, &p);
                let hinv = b.mj.hinv_value();
                assert!(b.sb.antisymmetry_defect() < 1e-11, "{m}");
                assert!(close(&b.chern.theta1, &b.chern.theta1_logdet, 1e-10), "{m}");
                assert!((b.ric.s_sb1 - b.ric.s_sb1_alt).abs() < 1e-10);
                assert!((b.ric.s_sb2 - b.ric.s_sb2_alt).abs() < 1e-10);
                let route_gap = b
                    .cr
                    .route_a
                    .iter()
                    .flatten()
                    .zip(b.cr.route_b.iter().flatten())
                    .fold(0.0f64, |acc, (x, y)| acc.max((x - y).norm()));
                assert!(route_gap < 1e-10, "{m}: {route_gap}");
                for i in 0..2 {
                    for j in 0..2 {
                        let r3 = b.ric.ric[2][i][j];
                        let r4 = b.ric.ric[3][j][i];
                        assert!((r3 - r4.conj()).norm() < 1e-10);
                        assert!((b.cr.r11()[i][j] - b.cr.r11_bar()[i][j].conj()).norm() < 1e-10);
                        assert!((b.cr.r02()[i][j] - b.cr.r20()[i][j].conj()).norm() < 1e-10);
                        for n in [0, 1] {
                            assert!((b.ric.ric[n][i][j] - b.ric.ric[n][j][i].conj()).norm() < 1e-10);
                        }
                        assert!((b.chern.theta1[i][j] - b.chern.theta1[j][i].conj()).norm() < 1e-10);
                    }
                }
                let _ = hinv;
            }
        }
    }

    #[test]
    fn hopf_ric20_bridge_at_unit_point() {
        let m = MetricField::hopf_standard();
        let p = Point::new(C64::new(1.0, 0.0), Z, Chart::Hopf);
        let mj = m.metric_jet(&p).unwrap();
        let ct = build_connections(&mj);
        let td = sb_nabla_torsion(&ct, &mj);
        let r = riemannian_ric20(&ct, &td);
        // Riemannian Ricci of the round factor: −½ T₁T₁ = −½.
        assert!((r[0][0] + 0.5).norm() < 1e-13);
        assert!(r[0][1].norm() < 1e-13 && r[1][1].norm() < 1e-13);
    }
}

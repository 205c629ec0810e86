//! Chern and Strominger-Bismut connection coefficients and their torsion.
//!
//! Index layout: `chern_gamma[i][j][k] = ᶜΓ^k_{ij}` (coefficient of
//! `∇_{∂_i}∂_j`), `sb_gamma[A][j][k]` is the coefficient of `∂_k` in
//! `∇_{e_A}∂_j` for the four directions `A`, and `sb_torsion[i][j][k] =
//! T^k_{ij}`.

use crate::jets::Jet1;
use crate::metrics::MetricJet;
use crate::scalar::{Scalar, C64};

pub type Tensor3<S> = [[[S; 2]; 2]; 2];

#[derive(Debug, Clone, Copy)]
pub struct Connection<S> {
    pub chern_gamma: Tensor3<S>,
    pub sb_gamma: [[[S; 2]; 2]; 4],
    pub chern_torsion: Tensor3<S>,
    pub sb_torsion: Tensor3<S>,
    pub t: [S; 2],
}

impl<S: Scalar> Connection<S> {
    /// `dh[a][i][j] = ∂_a h_{i j̄}`.
    pub fn from_parts(dh: &[[[S; 2]; 2]; 4], hinv: &[[S; 2]; 2]) -> Self {
        let z = S::zero();
        let mut chern_gamma = [[[z; 2]; 2]; 2];
        let mut sb_gamma = [[[z; 2]; 2]; 4];
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let mut c = z;
                    let mut s = z;
                    for l in 0..2 {
                        c += hinv[k][l] * dh[i][j][l];
                        s += hinv[k][l] * dh[j][i][l];
                    }
                    chern_gamma[i][j][k] = c;
                    sb_gamma[i][j][k] = s;
                    let mut a = z;
                    for l in 0..2 {
                        a += hinv[k][l] * (dh[2 + i][j][l] - dh[2 + l][j][i]);
                    }
                    sb_gamma[2 + i][j][k] = a;
                }
            }
        }
        let mut chern_torsion = [[[z; 2]; 2]; 2];
        let mut sb_torsion = [[[z; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    chern_torsion[i][j][k] = chern_gamma[i][j][k] - chern_gamma[j][i][k];
                    sb_torsion[i][j][k] = sb_gamma[i][j][k] - sb_gamma[j][i][k];
                }
            }
        }
        let mut t = [z; 2];
        for (i, ti) in t.iter_mut().enumerate() {
            for k in 0..2 {
                *ti += sb_torsion[k][i][k];
            }
        }
        Self { chern_gamma, sb_gamma, chern_torsion, sb_torsion, t }
    }
}

fn map3<A: Copy, B: Copy + Default>(x: &Tensor3<A>, f: impl Fn(A) -> B) -> Tensor3<B> {
    let mut out = [[[B::default(); 2]; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                out[i][j][k] = f(x[i][j][k]);
            }
        }
    }
    out
}

/// Connection data at one point: coefficient values plus their first jets.
#[derive(Debug, Clone, Copy)]
pub struct ConnectionTorsion {
    pub jet: Connection<Jet1>,
    pub chern_gamma: Tensor3<C64>,
    pub sb_gamma: [[[C64; 2]; 2]; 4],
    pub sb_torsion: Tensor3<C64>,
    pub chern_torsion: Tensor3<C64>,
    pub t: [C64; 2],
    /// `dt[a][i] = ∂_a T_i`.
    pub dt: [[C64; 2]; 4],
}

pub fn build_connections(mj: &MetricJet) -> ConnectionTorsion {
    let dh = [mj.dh1(0), mj.dh1(1), mj.dh1(2), mj.dh1(3)];
    let jet = Connection::from_parts(&dh, &mj.hinv);
    let v = |x: Jet1| x.value;
    let mut sb_gamma = [[[C64::default(); 2]; 2]; 4];
    for (a, g) in sb_gamma.iter_mut().enumerate() {
        for j in 0..2 {
            for k in 0..2 {
                g[j][k] = jet.sb_gamma[a][j][k].value;
            }
        }
    }
    let mut dt = [[C64::default(); 2]; 4];
    for (a, row) in dt.iter_mut().enumerate() {
        for i in 0..2 {
            row[i] = jet.t[i].d[a];
        }
    }
    ConnectionTorsion {
        chern_gamma: map3(&jet.chern_gamma, v),
        sb_gamma,
        sb_torsion: map3(&jet.sb_torsion, v),
        chern_torsion: map3(&jet.chern_torsion, v),
        t: [jet.t[0].value, jet.t[1].value],
        dt,
        jet,
    }
}

/// `|∂̄*ω|² = h^{i j̄} T_i T̄_j`.
pub fn torsion_norm_sq(t: &[C64; 2], hinv: &[[C64; 2]; 2]) -> f64 {
    let mut s = C64::default();
    for i in 0..2 {
        for j in 0..2 {
            s += hinv[i][j] * t[i] * t[j].conj();
        }
    }
    s.re
}

/// Residuals of the two quadratic torsion identities used on surfaces:
/// `T^p_{kj} T^k_{pi} − T_i T_j` and `T^k_{ij} T_k`.
pub fn torsion_quadratic_residuals(ct: &ConnectionTorsion) -> ([[C64; 2]; 2], [[C64; 2]; 2]) {
    let t = &ct.sb_torsion;
    let mut a = [[C64::default(); 2]; 2];
    let mut b = [[C64::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let mut s = -ct.t[i] * ct.t[j];
            for k in 0..2 {
                for p in 0..2 {
                    s += t[k][j][p] * t[p][i][k];
                }
                b[i][j] += t[i][j][k] * ct.t[k];
            }
            a[i][j] = s;
        }
    }
    (a, b)
}

/// Covariant derivatives of the torsion.
#[derive(Debug, Clone, Copy)]
pub struct TorsionDerivatives {
    /// `[A][i]`: `∇_A T_i = ∂_A T_i − Γ^p_{A i} T_p` (connection on the one slot).
    pub nabla_t: [[C64; 2]; 4],
    /// `[A][i][j][k]`: `∇_A T^k_{ij}` with the connection acting on every slot.
    pub nabla_torsion: [[[[C64; 2]; 2]; 2]; 4],
    /// `[j][i][k][l]`: `∂_j T_{ik l̄} − Γ^p_{ji} T_{pk l̄} − Γ^p_{jk} T_{ip l̄}`,
    /// the derivative of the lowered torsion acting on its holomorphic slots only.
    pub lowered_d: [[[[C64; 2]; 2]; 2]; 2],
    /// `[j][i]`: `−h^{k l̄}` contraction of `lowered_d`.
    pub contracted_d: [[C64; 2]; 2],
    /// `[j][i]`: `ᶜ∇_j T_i = ∂_j T_i − ᶜΓ^p_{ji} T_p`.
    pub chern_nabla_t: [[C64; 2]; 2],
    /// Largest `|∇_A T^k_{ij}|`.
    pub parallel_residual: f64,
    /// `[i][k][l]`: `T_{ik l̄} = h_{p l̄} T^p_{ik}`.
    pub lowered: Tensor3<C64>,
}

pub fn sb_nabla_torsion(ct: &ConnectionTorsion, mj: &MetricJet) -> TorsionDerivatives {
    let g = &ct.sb_gamma;
    let t = &ct.sb_torsion;
    let z = C64::default();

    let mut nabla_t = [[z; 2]; 4];
    for a in 0..4 {
        for i in 0..2 {
            let mut s = ct.dt[a][i];
            for p in 0..2 {
                s -= g[a][i][p] * ct.t[p];
            }
            nabla_t[a][i] = s;
        }
    }

    let mut nabla_torsion = [[[[z; 2]; 2]; 2]; 4];
    let mut parallel_residual: f64 = 0.0;
    for a in 0..4 {
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let mut s = ct.jet.sb_torsion[i][j][k].d[a];
                    for p in 0..2 {
                        s -= g[a][i][p] * t[p][j][k];
                        s -= g[a][j][p] * t[i][p][k];
                        s += g[a][p][k] * t[i][j][p];
                    }
                    nabla_torsion[a][i][j][k] = s;
                    parallel_residual = parallel_residual.max(s.norm());
                }
            }
        }
    }

    let h1 = mj.h1();
    let mut lowered_jet = [[[Jet1::zero(); 2]; 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            for l in 0..2 {
                let mut s = Jet1::zero();
                for p in 0..2 {
                    s += h1[p][l] * ct.jet.sb_torsion[i][k][p];
                }
                lowered_jet[i][k][l] = s;
            }
        }
    }
    let lowered = map3(&lowered_jet, |x| x.value);
    let mut lowered_d = [[[[z; 2]; 2]; 2]; 2];
    for j in 0..2 {
        for i in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    let mut s = lowered_jet[i][k][l].d[j];
                    for p in 0..2 {
                        s -= g[j][i][p] * lowered[p][k][l];
                        s -= g[j][k][p] * lowered[i][p][l];
                    }
                    lowered_d[j][i][k][l] = s;
                }
            }
        }
    }
    let hinv = mj.hinv_value();
    let mut contracted_d = [[z; 2]; 2];
    let mut chern_nabla_t = [[z; 2]; 2];
    for j in 0..2 {
        for i in 0..2 {
            let mut s = z;
            for k in 0..2 {
                for l in 0..2 {
                    s -= hinv[k][l] * lowered_d[j][i][k][l];
                }
            }
            contracted_d[j][i] = s;
            let mut c = ct.dt[j][i];
            for p in 0..2 {
                c -= ct.chern_gamma[j][i][p] * ct.t[p];
            }
            chern_nabla_t[j][i] = c;
        }
    }

    TorsionDerivatives {
        nabla_t,
        nabla_torsion,
        lowered_d,
        contracted_d,
        chern_nabla_t,
        parallel_residual,
        lowered,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::{Chart, Point};
    use crate::metrics::MetricField;
    use crate::sampling::sample_points;

    fn at(m: &MetricField, p: &Point) -> (MetricJet, ConnectionTorsion) {
        let mj = m.metric_jet(p).unwrap();
        let ct = build_connections(&mj);
        (mj, ct)
    }

    fn p10() -> Point {
        Point::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), Chart::Hopf)
    }

    #[test]
    fn flat_torus_has_no_connection() {
        let (mj, ct) = at(&MetricField::torus_flat(), &Point::from_real([0.1, 0.2, 0.3, 0.4], Chart::Torus));
        let d = sb_nabla_torsion(&ct, &mj);
        let mut all = ct.chern_gamma.iter().flatten().flatten().chain(ct.sb_gamma.iter().flatten().flatten());
        assert!(all.all(|x| x.norm() == 0.0));
        assert_eq!(ct.t, [C64::default(); 2]);
        assert_eq!(d.parallel_residual, 0.0);
    }

    #[test]
    fn hopf_torsion_at_unit_point() {
        let (mj, ct) = at(&MetricField::hopf_standard(), &p10());
        assert!((ct.chern_torsion[0][1][1] + 1.0).norm() < 1e-14);
        assert!((ct.sb_torsion[0][1][1] - 1.0).norm() < 1e-14);
        assert!((ct.t[0] + 1.0).norm() < 1e-14);
        assert!(ct.t[1].norm() < 1e-14);
        assert!((torsion_norm_sq(&ct.t, &mj.hinv_value()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hopf_torsion_norm_is_constant() {
        let m = MetricField::hopf_standard();
        for p in sample_points(Chart::Hopf, 50, 2) {
            let (mj, ct) = at(&m, &p);
            // T_i = -z̄_i / ρ
            for i in 0..2 {
                let zb = if i == 0 { p.z1.conj() } else { p.z2.conj() };
                assert!((ct.t[i] + zb / p.rho()).norm() < 1e-13);
            }
            assert!((torsion_norm_sq(&ct.t, &mj.hinv_value()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fubini_study_is_torsion_free() {
        let m = MetricField::fubini_study();
        for p in sample_points(Chart::Cp2, 20, 4) {
            let (_, ct) = at(&m, &p);
            assert!(ct.sb_torsion.iter().flatten().flatten().all(|x| x.norm() < 1e-13));
        }
    }

    #[test]
    fn torsion_algebra_on_generic_metric() {
        let m = MetricField::torus_perturbed(0.3).unwrap();
        for p in sample_points(Chart::Torus, 30, 9) {
            let (_, ct) = at(&m, &p);
            let mut t_alt = [C64::default(); 2];
            for i in 0..2 {
                for k in 0..2 {
                    t_alt[i] -= ct.sb_torsion[i][k][k];
                }
            }
            for i in 0..2 {
                assert!((t_alt[i] - ct.t[i]).norm() < 1e-14);
                for j in 0..2 {
                    for k in 0..2 {
                        assert_eq!(ct.sb_torsion[i][j][k], -ct.sb_torsion[j][i][k]);
                        assert!((ct.sb_torsion[i][j][k] - ct.chern_torsion[j][i][k]).norm() < 1e-15);
                        assert_eq!(ct.sb_torsion[i][j][k], ct.sb_gamma[i][j][k] - ct.sb_gamma[j][i][k]);
                    }
                }
            }
            let (a, b) = torsion_quadratic_residuals(&ct);
            assert!(a.iter().flatten().chain(b.iter().flatten()).all(|x| x.norm() < 1e-12));
        }
    }

    #[test]
    fn hopf_torsion_is_parallel() {
        let m = MetricField::hopf_standard();
        for p in sample_points(Chart::Hopf, 30, 6) {
            let (mj, ct) = at(&m, &p);
            let d = sb_nabla_torsion(&ct, &mj);
            assert!(d.parallel_residual < 1e-12, "{}", d.parallel_residual);
            assert!(d.nabla_t.iter().flatten().all(|x| x.norm() < 1e-12));
        }
    }

    #[test]
    fn perturbed_torus_torsion_not_parallel() {
        let m = MetricField::torus_perturbed(0.1).unwrap();
        let p = sample_points(Chart::Torus, 1, 1)[0];
        let (mj, ct) = at(&m, &p);
        assert!(sb_nabla_torsion(&ct, &mj).parallel_residual > 1e-3);
    }

    #[test]
    fn contracted_derivative_shifts_by_torsion_square() {
        // The contraction of the holomorphic-slot derivative of the lowered
        // torsion differs from the one-form derivative by T_i T_j.
        for m in [MetricField::torus_perturbed(0.2).unwrap(), MetricField::hopf_conformal(0.4).unwrap()] {
            for p in sample_points(m.model(), 20, 3) {
                let (mj, ct) = at(&m, &p);
                let d = sb_nabla_torsion(&ct, &mj);
                for i in 0..2 {
                    for j in 0..2 {
                        let want = d.nabla_t[j][i] + ct.t[i] * ct.t[j];
                        assert!((d.contracted_d[j][i] - want).norm() < 1e-11);
                    }
                }
            }
        }
    }
}

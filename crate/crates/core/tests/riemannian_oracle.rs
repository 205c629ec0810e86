//! Independent check of the complexified Riemannian Ricci tensor: the real
//! metric `g = Re(h_{ij̄} dz^i dz̄^j)` is differentiated by nested central
//! differences and its Ricci tensor compared with the engine's `(1,1)` and
//! `(2,0)` parts.

#![allow(clippy::needless_range_loop)]

use sbsurf_core::geometry::PointGeometry;
use sbsurf_core::jets::Point;
use sbsurf_core::metrics::{JetMode, MetricField};
use sbsurf_core::sampling::sample_points;
use sbsurf_core::scalar::{C64, I};

type M4 = [[f64; 4]; 4];

/// `dz^i` evaluated on the real coordinate vectors `∂x¹, ∂x², ∂x³, ∂x⁴`.
fn dz(i: usize, a: usize) -> C64 {
    if a == i {
        C64::new(1.0, 0.0)
    } else if a == i + 2 {
        I
    } else {
        C64::new(0.0, 0.0)
    }
}

fn real_metric(m: &MetricField, x: [f64; 4]) -> M4 {
    let mut g = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut s = C64::new(0.0, 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    s += m.h_value(x, i, j) * dz(i, a) * dz(j, b).conj();
                }
            }
            g[a][b] = s.re;
        }
    }
    g
}

fn inverse4(m: &M4) -> M4 {
    let mut a = *m;
    let mut inv = [[0.0; 4]; 4];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for c in 0..4 {
        let p = (c..4).max_by(|&r, &s| a[r][c].abs().total_cmp(&a[s][c].abs())).unwrap();
        a.swap(c, p);
        inv.swap(c, p);
        let d = a[c][c];
        for k in 0..4 {
            a[c][k] /= d;
            inv[c][k] /= d;
        }
        for r in 0..4 {
            if r != c {
                let f = a[r][c];
                for k in 0..4 {
                    a[r][k] -= f * a[c][k];
                    inv[r][k] -= f * inv[c][k];
                }
            }
        }
    }
    inv
}

fn shifted(x: [f64; 4], e: usize, t: f64) -> [f64; 4] {
    let mut y = x;
    y[e] += t;
    y
}

/// Fourth-order central difference of a vector-valued function along `e`.
fn diff<const K: usize>(f: impl Fn([f64; 4]) -> [f64; K], x: [f64; 4], e: usize, h: f64) -> [f64; K] {
    let (p1, m1) = (f(shifted(x, e, h)), f(shifted(x, e, -h)));
    let (p2, m2) = (f(shifted(x, e, 2.0 * h)), f(shifted(x, e, -2.0 * h)));
    let mut out = [0.0; K];
    for k in 0..K {
        out[k] = (8.0 * (p1[k] - m1[k]) - (p2[k] - m2[k])) / (12.0 * h);
    }
    out
}

fn flat16(m: &M4) -> [f64; 16] {
    let mut o = [0.0; 16];
    for a in 0..4 {
        for b in 0..4 {
            o[4 * a + b] = m[a][b];
        }
    }
    o
}

/// `Γ^c_{ab}` flattened as `16 c + 4 a + b`.
fn christoffel(m: &MetricField, x: [f64; 4]) -> [f64; 64] {
    let g = real_metric(m, x);
    let gi = inverse4(&g);
    let dg: Vec<[f64; 16]> = (0..4).map(|e| diff(|y| flat16(&real_metric(m, y)), x, e, 1e-4)).collect();
    let mut out = [0.0; 64];
    for c in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                let mut s = 0.0;
                for d in 0..4 {
                    s += 0.5 * gi[c][d] * (dg[a][4 * d + b] + dg[b][4 * d + a] - dg[d][4 * a + b]);
                }
                out[16 * c + 4 * a + b] = s;
            }
        }
    }
    out
}

fn ricci(m: &MetricField, x: [f64; 4]) -> M4 {
    let gam = christoffel(m, x);
    let dgam: Vec<[f64; 64]> = (0..4).map(|e| diff(|y| christoffel(m, y), x, e, 2e-3)).collect();
    let g = |c: usize, a: usize, b: usize| gam[16 * c + 4 * a + b];
    let mut r = [[0.0; 4]; 4];
    for c in 0..4 {
        for b in 0..4 {
            let mut s = 0.0;
            for a in 0..4 {
                s += dgam[a][16 * a + 4 * b + c] - dgam[b][16 * a + 4 * a + c];
                for e in 0..4 {
                    s += g(a, a, e) * g(e, b, c) - g(a, b, e) * g(e, a, c);
                }
            }
            r[c][b] = s;
        }
    }
    r
}

/// Coefficients of `∂_{z^i}` (or `∂_{z̄^i}` when `bar`) on the real frame.
fn frame(i: usize, bar: bool, a: usize) -> C64 {
    let s = if bar { 0.5 } else { -0.5 };
    if a == i {
        C64::new(0.5, 0.0)
    } else if a == i + 2 {
        C64::new(0.0, s)
    } else {
        C64::new(0.0, 0.0)
    }
}

fn complexified(r: &M4, i: usize, ibar: bool, j: usize, jbar: bool) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for a in 0..4 {
        for b in 0..4 {
            s += frame(i, ibar, a) * frame(j, jbar, b) * r[a][b];
        }
    }
    s
}

struct Compared {
    err11: f64,
    err20: f64,
    scale: f64,
}

fn compare(m: &MetricField, p: &Point) -> Compared {
    let g = PointGeometry::new(m, p, JetMode::Analytic).unwrap();
    let r = ricci(m, p.real());
    let (mut err11, mut err20, mut scale) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..2 {
        for j in 0..2 {
            let want11 = complexified(&r, i, false, j, true);
            let got11 = g.riem11.c[(1 << i) | (1 << (2 + j))] / I;
            err11 = err11.max((want11 - got11).norm());
            let want20 = complexified(&r, i, false, j, false);
            err20 = err20.max((want20 - g.riem20[i][j]).norm());
            scale = scale.max(want11.norm()).max(want20.norm());
        }
    }
    Compared { err11, err20, scale }
}

fn check_metric(spec: &str) {
    let m = MetricField::parse(spec).unwrap();
    for p in sample_points(m.model(), 4, 11) {
        let c = compare(&m, &p);
        let tol = 1e-6 * c.scale.max(1.0);
        assert!(c.err11 < tol && c.err20 < tol, "{spec} at {p}: (1,1) err {:.2e}, (2,0) err {:.2e}", c.err11, c.err20);
    }
}

#[test]
fn kahler_ricci_matches_fubini_study() {
    check_metric("fubini-study");
}

#[test]
fn riemannian_ricci_matches_on_hopf() {
    check_metric("hopf-standard");
}

#[test]
fn riemannian_ricci_matches_on_conformal_hopf() {
    check_metric("hopf-conformal:eps=0.3");
}

#[test]
fn riemannian_ricci_matches_on_perturbed_torus() {
    check_metric("torus-perturbed:eps=0.3");
}

#[test]
fn hopf_real_ricci_is_round_sphere_times_line() {
    // |dz|²/|z|² is the product of the unit three-sphere with a line, whose
    // Ricci tensor is 2g on the sphere directions and zero radially.
    let m = MetricField::hopf_standard();
    for p in sample_points(m.model(), 3, 5) {
        let x = p.real();
        let r = ricci(&m, x);
        let g = real_metric(&m, x);
        let radial = [x[0], x[1], x[2], x[3]];
        let mut rr = 0.0;
        let mut trace = 0.0;
        let gi = inverse4(&g);
        for a in 0..4 {
            for b in 0..4 {
                rr += radial[a] * r[a][b] * radial[b];
                trace += gi[a][b] * r[a][b];
            }
        }
        assert!(rr.abs() < 1e-6, "radial Ricci {rr}");
        assert!((trace - 6.0).abs() < 1e-5, "scalar curvature {trace}");
    }
}

#[test]
fn symmetrized_sb_ricci_shift_is_not_the_riemannian_ricci_on_hopf() {
    // SB-flat, so 𝓡_{ij} = 0 and ½(𝓡_{ij} + 𝓡_{ji} − 3T_iT_j) = −(3/2)T_iT_j,
    // whereas the real Ricci tensor has (2,0) part −½T_iT_j.
    let m = MetricField::hopf_standard();
    let p = sample_points(m.model(), 1, 2)[0];
    let g = PointGeometry::new(&m, &p, JetMode::Analytic).unwrap();
    let r = ricci(&m, p.real());
    let t = g.ct.t;
    for i in 0..2 {
        for j in 0..2 {
            let truth = complexified(&r, i, false, j, false);
            assert!((truth + 0.5 * t[i] * t[j]).norm() < 1e-6);
            let shifted = 0.5 * g.shifted(3.0)[i][j];
            assert!((shifted + 1.5 * t[i] * t[j]).norm() < 1e-12);
        }
    }
    assert!(g.ct.t.iter().any(|x| x.norm() > 0.1));
}

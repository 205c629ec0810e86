#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use sbsurf_core::forms::{bidegree_of, Form, FormMetric, FormValue, TOP};
use sbsurf_core::scalar::{metric_inverse, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `h = A A^† + I/2`, Hermitian and uniformly positive.
fn metric() -> impl Strategy<Value = FormMetric<C64>> {
    prop::array::uniform8(-1.0f64..1.0).prop_map(|a| {
        let m = [[c(a[0], a[1]), c(a[2], a[3])], [c(a[4], a[5]), c(a[6], a[7])]];
        let mut h = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    h[i][j] += m[i][k] * m[j][k].conj();
                }
            }
            h[i][i] += 0.5;
        }
        FormMetric::new(&h, &metric_inverse(&h))
    })
}

fn form() -> impl Strategy<Value = FormValue> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16).prop_map(|v| {
        let mut f = Form::zero();
        for (k, (re, im)) in v.into_iter().enumerate() {
            f.c[k] = c(re, im);
        }
        f
    })
}

fn degree_part(a: &FormValue, deg: usize) -> FormValue {
    let mut out = Form::zero();
    for k in 0..16 {
        let (p, q) = bidegree_of(k);
        if p + q == deg {
            out.c[k] = a.c[k];
        }
    }
    out
}

fn bidegree_part(a: &FormValue, p: usize, q: usize) -> FormValue {
    a.component(p, q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn star_squared_is_degree_sign(fm in metric(), a in form(), deg in 0usize..5) {
        let a = degree_part(&a, deg);
        let ss = fm.star(&fm.star(&a));
        let sign = if deg % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(ss.max_abs_diff(&a.scale(C64::new(sign, 0.0))) < 1e-10 * (1.0 + a.max_abs()));
    }

    #[test]
    fn wedge_with_star_of_conjugate_is_norm_times_volume(
        fm in metric(), a in form(), p in 0usize..3, q in 0usize..3,
    ) {
        let a = bidegree_part(&a, p, q);
        let lhs = a.wedge(&fm.star(&a.conj_form()));
        let rhs = fm.vol_form().scale(fm.norm_sq(&a));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10 * (1.0 + rhs.max_abs()));
        prop_assert!(fm.norm_sq(&a).re >= -1e-12);
        prop_assert!(fm.norm_sq(&a).im.abs() < 1e-12 * (1.0 + fm.norm_sq(&a).re));
    }

    #[test]
    fn wedge_is_graded_commutative(a in form(), b in form(), da in 0usize..5, db in 0usize..5) {
        let (a, b) = (degree_part(&a, da), degree_part(&b, db));
        let sign = if (da * db) % 2 == 0 { 1.0 } else { -1.0 };
        let ab = a.wedge(&b);
        let ba = b.wedge(&a).scale(C64::new(sign, 0.0));
        prop_assert!(ab.max_abs_diff(&ba) < 1e-12);
    }

    #[test]
    fn wedge_is_associative(a in form(), b in form(), d in form()) {
        let l = a.wedge(&b).wedge(&d);
        let r = a.wedge(&b.wedge(&d));
        prop_assert!(l.max_abs_diff(&r) < 1e-11);
    }

    #[test]
    fn lambda_is_adjoint_of_lefschetz(fm in metric(), a in form(), b in form(), deg in 0usize..3) {
        let a = degree_part(&a, deg);
        let b = degree_part(&b, deg + 2);
        let la = fm.omega.wedge(&a);
        let lhs = fm.inner(&la, &b);
        let rhs = fm.inner(&a, &fm.lambda(&b));
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + lhs.norm()));
    }

    #[test]
    fn omega_squared_over_two_is_the_volume(fm in metric()) {
        let w2 = fm.omega.wedge(&fm.omega);
        prop_assert!((w2.c[TOP] * 0.5 - fm.vol).norm() < 1e-12);
        prop_assert!((fm.norm_sq(&fm.omega).re - 2.0).abs() < 1e-10);
        prop_assert!((fm.lambda(&fm.omega).c[0].re - 2.0).abs() < 1e-10);
    }
}

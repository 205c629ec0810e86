#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;
use sbsurf_core::connection::torsion_quadratic_residuals;
use sbsurf_core::geometry::PointGeometry;
use sbsurf_core::metrics::{JetMode, MetricField};
use sbsurf_core::registry::{
    pointwise_ids, verify_pointwise, verify_pointwise_suite, PointwiseConfig, Status,
};
use sbsurf_core::sampling::point_from_unit;

fn builtin(k: usize, eps: f64) -> MetricField {
    match k {
        0 => MetricField::torus_flat(),
        1 => MetricField::torus_perturbed(0.4 * eps).unwrap(),
        2 => MetricField::hopf_standard(),
        3 => MetricField::hopf_conformal(eps).unwrap(),
        _ => MetricField::fubini_study(),
    }
}

fn unit() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(0.0f64..1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadratic_torsion_identities_hold(k in 0usize..5, eps in 0.0f64..1.0, u in unit()) {
        let m = builtin(k, eps);
        let g = PointGeometry::new(&m, &point_from_unit(m.model(), u), JetMode::Analytic).unwrap();
        let (a, b) = torsion_quadratic_residuals(&g.ct);
        let scale = 1.0 + g.t_norm2 * g.mj.h_value().iter().flatten().fold(0.0f64, |s, x| s.max(x.norm()));
        for r in a.iter().chain(b.iter()).flatten() {
            prop_assert!(r.norm() < 1e-10 * scale, "{m}: {r}");
        }
    }

    #[test]
    fn sb_torsion_is_the_antisymmetric_part_of_the_connection(k in 0usize..5, eps in 0.0f64..1.0, u in unit()) {
        let m = builtin(k, eps);
        let g = PointGeometry::new(&m, &point_from_unit(m.model(), u), JetMode::Analytic).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                for l in 0..2 {
                    prop_assert_eq!(g.ct.sb_gamma[i][j][l] - g.ct.sb_gamma[j][i][l], g.ct.sb_torsion[i][j][l]);
                }
            }
        }
    }

    #[test]
    fn kahler_metrics_have_equal_ricci_family(k in prop::sample::select(vec![0usize, 4]), u in unit()) {
        let m = builtin(k, 0.0);
        let g = PointGeometry::new(&m, &point_from_unit(m.model(), u), JetMode::Analytic).unwrap();
        for r in &g.ric.ric {
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((r[i][j] - g.chern.theta1[i][j]).norm() < 1e-9);
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    // Every identity except the one built on the symmetrized SB-Ricci shift
    // holds on every metric; that one holds only on Kähler metrics.
    #[test]
    fn pointwise_catalogue_holds_for_any_seed(seed in any::<u64>(), k in 0usize..5, eps in 0.05f64..1.0) {
        let m = builtin(k, eps);
        let reports = verify_pointwise_suite(&pointwise_ids(), &m, &PointwiseConfig::new(4, seed)).unwrap();
        prop_assert_eq!(reports.len(), 23);
        for r in &reports {
            if r.id == "PW-18" && !m.is_kahler_by_construction() {
                prop_assert_eq!(r.status, Status::Fail);
            } else if r.status != Status::Skipped {
                prop_assert!(r.passed(), "{} on {m}: rel {:e}", r.id, r.rel_residual);
            }
        }
    }

    #[test]
    fn gauduchon_identity_is_never_passed_off_on_conformal_hopf(eps in 0.05f64..1.0, seed in any::<u64>()) {
        let m = MetricField::hopf_conformal(eps).unwrap();
        let r = verify_pointwise("PW-22", &m, &PointwiseConfig::new(4, seed)).unwrap();
        prop_assert_eq!(r.status, Status::Skipped);
        prop_assert!(!r.passed());
        prop_assert!(r.skip_reason.is_some());
    }
}

#[test]
fn pointwise_reports_are_deterministic() {
    let m = MetricField::parse("hopf-conformal:eps=0.3").unwrap();
    let cfg = PointwiseConfig::new(16, 99);
    let strip = |mut v: Vec<sbsurf_core::registry::VerificationReport>| {
        for r in &mut v {
            r.runtime_ms = None;
        }
        serde_json::to_string(&v).unwrap()
    };
    let a = strip(verify_pointwise_suite(&pointwise_ids(), &m, &cfg).unwrap());
    let b = strip(verify_pointwise_suite(&pointwise_ids(), &m, &cfg).unwrap());
    assert_eq!(a, b);
}

#[test]
fn finite_difference_jets_meet_their_tolerance() {
    for spec in ["torus-perturbed:eps=0.1", "hopf-standard", "hopf-conformal:eps=0.05", "fubini-study"] {
        let m = MetricField::parse(spec).unwrap();
        let mut cfg = PointwiseConfig::new(8, 3);
        cfg.mode = JetMode::Fd;
        cfg.tol = sbsurf_core::registry::POINTWISE_FD_TOL;
        for r in verify_pointwise_suite(&pointwise_ids(), &m, &cfg).unwrap() {
            if r.id != "PW-18" || m.is_kahler_by_construction() {
                assert!(r.status != Status::Fail, "{} on {spec}: {:e}", r.id, r.rel_residual);
            }
        }
    }
}

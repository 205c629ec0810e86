//! Browser bindings. Each export takes plain arguments and returns a JSON
//! string, so the page needs no generated type glue beyond strings.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use sbsurf_core::geometry::PointGeometry;
use sbsurf_core::metrics::{JetMode, MetricField};
use sbsurf_core::quadrature::DensityIntegrals;
use sbsurf_core::registry::{chern_summary_from, pointwise_ids, verify_pointwise_suite, PointwiseConfig, Status};
use sbsurf_core::sampling::point_from_unit;

/// Largest quadrature resolution offered in the page; one browser thread
/// handles N = 12 in a few seconds.
pub const MAX_BROWSER_GRID: u32 = 12;
pub const MAX_BROWSER_POINTS: u32 = 256;

#[derive(Serialize)]
struct Row {
    id: String,
    status: Status,
    rel_residual: f64,
    tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    skip_reason: Option<String>,
}

#[derive(Serialize)]
struct ChernRow {
    formula: &'static str,
    value: f64,
    error: f64,
    c1_squared: f64,
}

#[derive(Serialize)]
struct ScalarChain {
    z1: [f64; 2],
    z2: [f64; 2],
    s_c1: f64,
    torsion_norm2: f64,
    lambda_dbar_dbar_star_omega: f64,
    s_sb1: f64,
    s_sb2: f64,
    gauduchon_residual: f64,
}

fn metric(spec: &str) -> Result<MetricField, String> {
    MetricField::parse(spec).map_err(|e| e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// Runs the 23 pointwise identities at `points` seeded points.
#[wasm_bindgen]
pub fn pointwise_summary(spec: &str, points: u32, seed: u32) -> Result<String, String> {
    let m = metric(spec)?;
    if points == 0 || points > MAX_BROWSER_POINTS {
        return Err(format!("points must lie in [1, {MAX_BROWSER_POINTS}]"));
    }
    let cfg = PointwiseConfig::new(points as usize, u64::from(seed));
    let rows: Vec<Row> = verify_pointwise_suite(&pointwise_ids(), &m, &cfg)
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|r| Row {
            id: r.id,
            status: r.status,
            rel_residual: r.rel_residual,
            tolerance: r.tolerance,
            skip_reason: r.skip_reason,
        })
        .collect();
    to_json(&rows)
}

/// `4π²c₁²` from the four formulas at resolution `n`.
#[wasm_bindgen]
pub fn chern_numbers(spec: &str, n: u32) -> Result<String, String> {
    let m = metric(spec)?;
    if !(4..=MAX_BROWSER_GRID).contains(&n) {
        return Err(format!("grid must lie in [4, {MAX_BROWSER_GRID}]"));
    }
    let x = DensityIntegrals::compute(&m, n as usize).map_err(|e| e.to_string())?;
    let rows: Vec<ChernRow> = chern_summary_from(&x)
        .values
        .iter()
        .map(|c| ChernRow { formula: c.formula.name(), value: c.value, error: c.error, c1_squared: c.c1_squared() })
        .collect();
    to_json(&rows)
}

/// Curvature scalars at the chart point with unit-cube coordinates `u`.
#[wasm_bindgen]
pub fn scalar_chain(spec: &str, u0: f64, u1: f64, u2: f64, u3: f64) -> Result<String, String> {
    let m = metric(spec)?;
    let u = [u0, u1, u2, u3];
    if u.iter().any(|x| !(0.0..1.0).contains(x)) {
        return Err("coordinates must lie in [0, 1)".into());
    }
    let p = point_from_unit(m.model(), u);
    let g = PointGeometry::new(&m, &p, JetMode::Analytic).map_err(|e| e.to_string())?;
    to_json(&ScalarChain {
        z1: [p.z1.re, p.z1.im],
        z2: [p.z2.re, p.z2.im],
        s_c1: g.s_c1(),
        torsion_norm2: g.t_norm2,
        lambda_dbar_dbar_star_omega: g.lam.re,
        s_sb1: g.ric.s_sb1,
        s_sb2: g.ric.s_sb2,
        gauduchon_residual: g.gauduchon_residual(),
    })
}

//! Browser bindings. Every export takes JSON literals and returns JSON.
//!
//! The `*_json` functions carry the logic and run natively as well; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use rispaces::ideal_quotient::dist_oc;
use rispaces::literal::{parse_function, parse_space, FunctionLit};
use rispaces::measurable_fn::{Domain, Function};
use rispaces::rearrangement::{rearrange, Rearranged};
use rispaces::cesaro::cesaro_apply;
use rispaces::spaces::{norm, Config};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Right end of the plotted range.
fn horizon(f: &Function) -> f64 {
    match f {
        Function::Seq(s) => (s.head.len() + 8) as f64,
        Function::Piecewise(g) => match g.domain {
            Domain::Unit => 1.0,
            _ => {
                let last = g.breakpoints().last().map(rispaces::scalar::to_f64).unwrap_or(0.0);
                (1.5 * last).max(4.0)
            }
        },
    }
}

/// Sample points in `(0, end)`; integers `1..=end` on the naturals.
fn grid(f: &Function, samples: u32) -> Vec<f64> {
    let end = horizon(f);
    if f.domain() == Domain::Naturals {
        return (1..=end as u64).map(|n| n as f64).collect();
    }
    let n = samples.clamp(2, 4000);
    (1..=n).map(|i| end * i as f64 / (n as f64 + 1.0)).collect()
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Serialize)]
struct RearrangeOut {
    exact: bool,
    /// `(t, |f|(t), f*(t))`; on the naturals `t` is the index.
    points: Vec<(f64, Option<f64>, Option<f64>)>,
    rearrangement: Option<FunctionLit>,
}

pub fn rearrange_curve_json(function: &str, samples: u32) -> Result<String, String> {
    let f = parse_function(function).map_err(|e| e.to_string())?;
    let r = rearrange(&f, 1e-6).map_err(|e| e.to_string())?;
    let naturals = f.domain() == Domain::Naturals;
    let points = grid(&f, samples)
        .into_iter()
        .map(|t| {
            let star = r.eval(if naturals { t - 1.0 } else { t });
            (t, finite(f.eval(t).abs()), finite(star))
        })
        .collect();
    let out = RearrangeOut {
        exact: matches!(r, Rearranged::Exact(_)),
        points,
        rearrangement: r.exact().map(FunctionLit::from),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CesaroOut {
    /// `(t, |f|(t), C|f|(t))`.
    points: Vec<(f64, Option<f64>, Option<f64>)>,
    image: FunctionLit,
}

pub fn cesaro_curve_json(function: &str, samples: u32) -> Result<String, String> {
    let f = parse_function(function).map_err(|e| e.to_string())?;
    let image = cesaro_apply(&f).map_err(|e| e.to_string())?;
    let points = grid(&f, samples)
        .into_iter()
        .map(|t| (t, finite(f.eval(t).abs()), finite(image.eval(t))))
        .collect();
    let out = CesaroOut {
        points,
        image: FunctionLit::from(&image),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct DistOut {
    norm: Option<f64>,
    dist: Option<f64>,
    err_bound: f64,
    path: &'static str,
    /// `(n, s_n)` along the doubling schedule.
    schedule: Vec<(f64, Option<f64>)>,
}

pub fn dist_schedule_json(function: &str, space: &str) -> Result<String, String> {
    let f = parse_function(function).map_err(|e| e.to_string())?;
    let x = parse_space(space).map_err(|e| e.to_string())?;
    if f.domain() != x.domain {
        return Err(format!("function on {} but space on {}", f.domain(), x.domain));
    }
    let cfg = Config {
        tol: 1e-6,
        max_depth: 40,
    };
    let n = norm(&f, &x, &cfg).map_err(|e| e.to_string())?;
    let d = dist_oc(&f, &x, &cfg).map_err(|e| e.to_string())?;
    let out = DistOut {
        norm: finite(n.value),
        dist: finite(d.value),
        err_bound: d.err_bound,
        path: d.path.name(),
        schedule: d.schedule.iter().map(|(n, s)| (*n, finite(*s))).collect(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn rearrange_curve(function: &str, samples: u32) -> Result<String, JsError> {
    rearrange_curve_json(function, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn cesaro_curve(function: &str, samples: u32) -> Result<String, JsError> {
    cesaro_curve_json(function, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn dist_schedule(function: &str, space: &str) -> Result<String, JsError> {
    dist_schedule_json(function, space).map_err(|e| JsError::new(&e))
}

//! JSON rendering of core results. Non-finite numbers (empty products give
//! `-inf` logs) are emitted as `null`.

use serde_json::{json, Value};

use jsrkit_core::bounds::{LowerSource, UpperSource};
use jsrkit_core::graph::{Condensation, DependencyGraph, PeriodInfo};
use jsrkit_core::{BoundsReport64, TraceReport64};

pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn opt(x: impl Into<Option<f64>>) -> Value {
    x.into().map_or(Value::Null, num)
}

fn lower_source(s: &LowerSource) -> Value {
    match s {
        LowerSource::Diagonal { index, word } => json!({"kind": "diagonal", "index": index, "word": word}),
        LowerSource::Component { component } => json!({"kind": "component", "component": component}),
        LowerSource::Spectral { word } => json!({"kind": "spectral", "word": word}),
    }
}

fn upper_source(s: &UpperSource) -> Value {
    match s {
        UpperSource::Component { component } => json!({"kind": "component", "component": component}),
        UpperSource::Submultiplicative => json!({"kind": "submultiplicative"}),
        UpperSource::WeightedNorm => json!({"kind": "weighted_norm"}),
    }
}

pub fn bounds_json(r: &BoundsReport64) -> Value {
    let curves: Vec<Value> = r
        .curves
        .iter()
        .map(|c| {
            json!({
                "k": c.k,
                "exact": c.exact,
                "frontier_size": r.table.frontier_size(c.k),
                "log_norm": num(r.table.log_norm(c.k)),
                "diag_lower": num(c.diag_lower),
                "comp_lower": opt(c.comp_lower),
                "spectral_lower": opt(c.spectral_lower),
                "comp_upper": opt(c.comp_upper),
                "submult_upper": opt(c.submult_upper),
                "weighted_upper": opt(c.weighted_upper),
                "lower": num(c.lower()),
                "upper": opt(c.upper()),
            })
        })
        .collect();
    json!({
        "dim": r.dim,
        "horizon": r.horizon,
        "trivial_zero": r.trivial_zero,
        "best_lower": num(r.best_lower),
        "best_upper": opt(r.best_upper),
        "width": opt(r.width()),
        "lower_certificate": r.lower_certificate.as_ref().map(|c| json!({
            "k": c.k, "value": num(c.value), "source": lower_source(&c.source)
        })),
        "upper_certificate": r.upper_certificate.as_ref().map(|c| json!({
            "k": c.k, "value": num(c.value), "source": upper_source(&c.source)
        })),
        "m_indices": r.m_indices,
        "cycle_lower": opt(r.cycle_lower),
        "cycle_constants": r.cycle_constants.iter().map(|&c| opt(c)).collect::<Vec<_>>(),
        "lower_envelope": r.lower_envelope().into_iter().map(num).collect::<Vec<_>>(),
        "upper_envelope": r.upper_envelope().into_iter().map(opt).collect::<Vec<_>>(),
        "curves": curves,
    })
}

pub fn graph_json(g: &DependencyGraph, c: &Condensation, p: &PeriodInfo) -> Value {
    let nc = c.n_components();
    let delta: Vec<Vec<Value>> = (0..nc)
        .map(|a| {
            (0..nc)
                .map(|b| match c.component_distance(a, b).finite() {
                    Some(d) => json!(d),
                    None => json!("unreachable"),
                })
                .collect()
        })
        .collect();
    json!({
        "n_vertices": g.n_vertices(),
        "edges": g.edges().map(|(u, v)| [u, v]).collect::<Vec<_>>(),
        "components": c.components().iter().enumerate().map(|(id, vs)| json!({
            "id": id,
            "vertices": vs,
            "connected": c.is_connected(id),
        })).collect::<Vec<_>>(),
        "component_of": (0..g.n_vertices()).map(|v| c.component_of(v)).collect::<Vec<_>>(),
        "dag_edges": c.dag_edges().iter().map(|&(a, b)| [a, b]).collect::<Vec<_>>(),
        "component_distances": delta,
        "vertex_periods": p.vertex_periods,
        "global_period": p.global,
        "m_indices": jsrkit_core::bounds::m_indices(g, c),
        "trivial_zero": jsrkit_core::graph::is_radius_trivially_zero(c),
    })
}

pub fn trace_json(t: &TraceReport64) -> Value {
    let roots = |v: &[(usize, f64)]| v.iter().map(|&(k, r)| json!({"k": k, "root": num(r)})).collect::<Vec<_>>();
    json!({
        "vertex_periods": t.periods.vertex_periods,
        "global_period": t.periods.global,
        "log_max_trace": t.log_traces.iter().map(|&v| num(v)).collect::<Vec<_>>(),
        "trace_roots": roots(&t.trace_roots),
        "diag_roots": roots(&t.diag_roots),
        "sandwich_holds": t.sandwich_holds,
        "bracket": [num(t.bracket.0), opt(t.bracket.1)],
        "trace_converged": t.trace_converged,
        "diag_converged": t.diag_converged,
    })
}

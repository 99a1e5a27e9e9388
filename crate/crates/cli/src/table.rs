//! Plain-text aligned tables for `--format table`.

use std::fmt::Write;

use serde_json::Value;

use jsrkit_core::graph::{Condensation, DependencyGraph, PeriodInfo};
use jsrkit_core::{BoundsReport64, NormTable64, OracleEstimate, TraceReport64};

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.9}"),
        _ => "-".to_string(),
    }
}

fn fmt(x: f64) -> String {
    fmt_opt(Some(x))
}

/// Renders rows with right-aligned columns sized to their widest cell.
fn render(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(header.to_vec(), &mut out);
    for row in rows {
        line(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

pub fn bounds(r: &BoundsReport64) -> String {
    let rows: Vec<Vec<String>> = r
        .curves
        .iter()
        .map(|c| {
            vec![
                c.k.to_string(),
                if c.exact { "yes" } else { "no" }.to_string(),
                fmt(c.diag_lower),
                fmt_opt(c.comp_lower),
                fmt_opt(c.spectral_lower),
                fmt_opt(c.comp_upper),
                fmt_opt(c.submult_upper),
                fmt_opt(c.weighted_upper),
            ]
        })
        .collect();
    let mut out = render(
        &["k", "exact", "diag_lower", "comp_lower", "spectral", "comp_upper", "submult", "weighted"],
        &rows,
    );
    let _ = writeln!(out, "\nbracket: [{}, {}]", fmt(r.best_lower), fmt_opt(r.best_upper));
    if let Some(w) = r.width() {
        let _ = writeln!(out, "width: {}", fmt(w));
    }
    if r.trivial_zero {
        let _ = writeln!(out, "radius is zero: dependency graph is acyclic");
    }
    out
}

pub fn graph(g: &DependencyGraph, c: &Condensation, p: &PeriodInfo) -> String {
    let rows: Vec<Vec<String>> = (0..g.n_vertices())
        .map(|v| {
            let comp = c.component_of(v);
            vec![
                v.to_string(),
                comp.to_string(),
                if c.is_connected(comp) { "yes" } else { "no" }.to_string(),
                p.vertex_periods[v].to_string(),
            ]
        })
        .collect();
    let mut out = render(&["vertex", "component", "connected", "period"], &rows);
    let nc = c.n_components();
    let header: Vec<String> = std::iter::once("from\\to".to_string()).chain((0..nc).map(|b| b.to_string())).collect();
    let dist_rows: Vec<Vec<String>> = (0..nc)
        .map(|a| {
            std::iter::once(a.to_string())
                .chain((0..nc).map(|b| match c.component_distance(a, b).finite() {
                    Some(d) => d.to_string(),
                    None => "-".to_string(),
                }))
                .collect()
        })
        .collect();
    let _ = writeln!(out, "\ncomponent distances (- = unreachable):");
    out.push_str(&render(&header.iter().map(String::as_str).collect::<Vec<_>>(), &dist_rows));
    let _ = writeln!(out, "\nglobal period: {}", p.global);
    out
}

pub fn oracle(est: &OracleEstimate<f64>, brute: &NormTable64) -> String {
    let rows: Vec<Vec<String>> = est
        .per_length
        .iter()
        .enumerate()
        .map(|(i, &v)| vec![(i + 1).to_string(), fmt(v), fmt(brute.log_norm(i + 1))])
        .collect();
    let mut out = render(&["k", "spectral_root", "log_norm"], &rows);
    let _ = writeln!(out, "\ngeneralized lower: {} (word {:?})", fmt(est.value), est.achieving_word);
    out
}

pub fn trace(t: &TraceReport64) -> String {
    let rows: Vec<Vec<String>> = t
        .trace_roots
        .iter()
        .zip(&t.diag_roots)
        .map(|(&(k, tr), &(_, dr))| vec![k.to_string(), fmt(tr), fmt(dr), t.sandwich_holds[k - 1].to_string()])
        .collect();
    let mut out = render(&["k", "trace_root", "diag_root", "sandwich"], &rows);
    let _ = writeln!(out, "\nglobal period: {}", t.periods.global);
    let _ = writeln!(out, "bracket: [{}, {}]", fmt(t.bracket.0), fmt_opt(t.bracket.1));
    out
}

pub fn check(body: &Value) -> String {
    let mut rows = Vec::new();
    let empty = Vec::new();
    let fek = body["fekete"].as_array().unwrap_or(&empty);
    let rat = body["ratio_checks"].as_array().unwrap_or(&empty);
    for (f, r) in fek.iter().zip(rat) {
        let cell = |v: &Value| match v {
            Value::Null => "-".to_string(),
            Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), |x| if n.is_f64() { fmt(x) } else { n.to_string() }),
            other => other.to_string(),
        };
        rows.push(vec![
            cell(&f["index"]),
            cell(&f["supermultiplicative"]),
            if f["supermultiplicative"] == Value::Bool(true) { cell(&f["sup_root"]) } else { cell(&f["violation"]) },
            cell(&r["gap"]),
            cell(&r["max_ratio"]),
        ]);
    }
    let mut out = render(&["index", "supermult", "sup_root/violation", "gap", "max_ratio"], &rows);
    let fit = &body["growth_fit"];
    let _ = writeln!(out, "\ngrowth exponent: {}", fit["exponent"]);
    out
}

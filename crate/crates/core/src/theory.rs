//! Sequence-level checks: supermultiplicative sequences and their root
//! limits, bounded ratios of diagonal maxima, trace limits along multiples
//! of the global period, and the polynomial growth exponent.

use std::ops::RangeInclusive;

use num_integer::Integer;

use crate::bounds::{best_bracket, BoundsReport};
use crate::error::{Error, Result};
use crate::graph::{build_graph, condense, periods, PeriodInfo};
use crate::matset::MatrixSet;
use crate::products::NormTable;
use crate::scalar::{ln_or_neg_inf, log_le, root_of_log, Scalar};

/// Relative distance to the supremum within which a tail counts as converged.
pub const CONVERGENCE_RTOL: f64 = 1e-3;

/// Slack on bracket membership of trace roots.
pub const BRACKET_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceDiagnosis<T> {
    /// `sup_n a_n^(1/n)` over positive terms; 0 if there are none.
    pub sup_root: T,
    /// `(n, a_n^(1/n))` for every positive term, in order.
    pub tail_estimates: Vec<(usize, T)>,
    /// The last `max(5, N/10)` positive roots lie within
    /// [`CONVERGENCE_RTOL`] of `sup_root`.
    pub converged: bool,
    /// gcd of the indices with `a_n > 0`; 0 when there are none.
    pub support_period: u64,
    /// Last positive root. The limit is only approached asymptotically, so
    /// this is a horizon-limited estimate.
    pub last_positive: Option<(usize, T)>,
}

/// Checks `a_{m+n} >= a_m a_n` and diagnoses the positive root subsequence.
/// `values[0]` is `a_1`.
pub fn fekete_check<T: Scalar>(values: &[T]) -> Result<SequenceDiagnosis<T>> {
    if let Some(idx) = values.iter().position(|&x| !(x >= T::zero()) || !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("term {} is negative or not finite", idx + 1)));
    }
    let logs: Vec<T> = values.iter().map(|&x| ln_or_neg_inf(x)).collect();
    fekete_check_log(&logs)
}

/// [`fekete_check`] on log values (negative infinity for zero terms).
pub fn fekete_check_log<T: Scalar>(logs: &[T]) -> Result<SequenceDiagnosis<T>> {
    let n_terms = logs.len();
    let at = |n: usize| logs[n - 1];
    for total in 2..=n_terms {
        for m in 1..=total / 2 {
            let n = total - m;
            if !log_le(at(m) + at(n), at(total)) {
                return Err(Error::NotSupermultiplicative { m, n });
            }
        }
    }
    let tail_estimates: Vec<(usize, T)> = (1..=n_terms)
        .filter(|&n| at(n) > T::neg_infinity())
        .map(|n| (n, root_of_log(at(n), n)))
        .collect();
    let sup_root = tail_estimates.iter().map(|&(_, r)| r).fold(T::zero(), T::max);
    let window = 5.max(n_terms / 10);
    let rtol = T::of(CONVERGENCE_RTOL);
    let converged = tail_estimates.len() >= window
        && tail_estimates[tail_estimates.len() - window..]
            .iter()
            .all(|&(_, r)| (r - sup_root).abs() <= rtol * sup_root);
    let support_period = tail_estimates.iter().fold(0u64, |g, &(n, _)| g.gcd(&(n as u64)));
    Ok(SequenceDiagnosis {
        sup_root,
        last_positive: tail_estimates.last().copied(),
        tail_estimates,
        converged,
        support_period,
    })
}

/// The diagonal sequence `||S^k||_{ii}`, `k = 1..=N`, as log values.
pub fn diagonal_sequence<T: Scalar>(table: &NormTable<T>, i: usize) -> Vec<T> {
    (1..=table.horizon()).map(|k| table.log_entry(k, i, i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioCheck<T> {
    pub max_ratio: T,
    pub argmax: usize,
}

/// `max_n ||S^{n+gap}||_{ii} / ||S^n||_{ii}` over `n` in `window` where both
/// diagonals are positive and `n + gap` is within the horizon.
pub fn bounded_ratio_check<T: Scalar>(
    table: &NormTable<T>,
    i: usize,
    gap: usize,
    window: RangeInclusive<usize>,
) -> Option<RatioCheck<T>> {
    let n_max = table.horizon();
    let mut best: Option<RatioCheck<T>> = None;
    for n in window.filter(|&n| n >= 1 && n + gap <= n_max) {
        let (lo, hi) = (table.log_entry(n, i, i), table.log_entry(n + gap, i, i));
        if lo == T::neg_infinity() || hi == T::neg_infinity() {
            continue;
        }
        let ratio = (hi - lo).exp();
        if best.is_none_or(|b| ratio > b.max_ratio) {
            best = Some(RatioCheck { max_ratio: ratio, argmax: n });
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct TraceReport<T> {
    pub periods: PeriodInfo,
    /// ln of the maximal trace for `k = 1..=N`.
    pub log_traces: Vec<T>,
    /// `(k, t_k^(1/k))` for multiples `k` of the global period.
    pub trace_roots: Vec<(usize, T)>,
    /// `(k, max_i ||S^k||_{ii}^(1/k))` for multiples `k` of the global period.
    pub diag_roots: Vec<(usize, T)>,
    /// Per `k`: `max_i ||S^k||_{ii} <= t_k <= d max_i ||S^k||_{ii}`.
    pub sandwich_holds: Vec<bool>,
    /// Bracket the roots are compared against.
    pub bracket: (T, Option<T>),
    /// The last trace root lies in the bracket widened by [`BRACKET_SLACK`].
    pub trace_converged: bool,
    /// Same for the last diagonal root.
    pub diag_converged: bool,
}

/// Trace maxima and their roots along multiples of the global period.
pub fn trace_limit<T: Scalar>(set: &MatrixSet<T>, horizon: usize, cap: usize) -> Result<TraceReport<T>> {
    let g = build_graph(set);
    let info = periods(&g, &condense(&g))?;
    if (horizon as u64) < info.global {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} is shorter than the global period {}",
            info.global
        )));
    }
    let report = best_bracket(set, horizon, cap, false)?;
    Ok(trace_report(&report, info))
}

/// [`trace_limit`] on an existing bracket.
pub fn trace_report<T: Scalar>(report: &BoundsReport<T>, periods: PeriodInfo) -> TraceReport<T> {
    let table = &report.table;
    let n = table.horizon();
    let ln_d = T::of_usize(table.dim()).ln();
    let log_traces: Vec<T> = (1..=n).map(|k| table.log_max_trace(k)).collect();
    let sandwich_holds = (1..=n)
        .map(|k| {
            let diag = table.log_max_diag(k);
            let tr = table.log_max_trace(k);
            log_le(diag, tr) && log_le(tr, diag + ln_d)
        })
        .collect();
    let step = periods.global as usize;
    let multiples = (step..=n).step_by(step.max(1));
    let trace_roots: Vec<(usize, T)> =
        multiples.clone().map(|k| (k, root_of_log(table.log_max_trace(k), k))).collect();
    let diag_roots: Vec<(usize, T)> =
        multiples.map(|k| (k, root_of_log(table.log_max_diag(k), k))).collect();
    let (lo, hi) = (report.best_lower, report.best_upper);
    let slack = T::of(BRACKET_SLACK);
    let inside = |v: T| v >= lo - slack && hi.is_none_or(|h| v <= h + slack);
    let trace_converged = trace_roots.last().is_some_and(|&(_, r)| inside(r));
    let diag_converged = diag_roots.last().is_some_and(|&(_, r)| inside(r));
    TraceReport {
        periods,
        log_traces,
        trace_roots,
        diag_roots,
        sandwich_holds,
        bracket: (lo, hi),
        trace_converged,
        diag_converged,
    }
}

/// Least-squares slope of `(ln k, ln ||S^k|| - k ln rho_hat)` over `ks`,
/// an estimate of the polynomial degree in `||S^k|| ~ k^r rho^k`.
pub fn growth_fit<T: Scalar>(table: &NormTable<T>, rho_hat: T, ks: RangeInclusive<usize>) -> Result<T> {
    if !(rho_hat > T::zero()) || !rho_hat.is_finite() {
        return Err(Error::InvalidArgument(format!("rho_hat must be positive, got {rho_hat}")));
    }
    let ln_rho = rho_hat.ln();
    let mut pts: Vec<(T, T)> = Vec::new();
    for k in ks.filter(|&k| k >= 1 && k <= table.horizon()) {
        if !table.is_exact(k) {
            return Err(Error::RequiresExact(k));
        }
        let y = table.log_norm(k);
        if y > T::neg_infinity() {
            pts.push((T::of_usize(k).ln(), y - T::of_usize(k) * ln_rho));
        }
    }
    if pts.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: pts.len() });
    }
    let n = T::of_usize(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxy: T = pts.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: T = pts.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::products::{norm_table, DEFAULT_CAP};

    fn set(ms: Vec<Vec<Vec<f64>>>) -> MatrixSet<f64> {
        MatrixSet::from_nested(ms).unwrap()
    }

    fn cycle3() -> MatrixSet<f64> {
        set(vec![vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]]])
    }

    #[test]
    fn even_powers_of_two() {
        let a: Vec<f64> = (1..=40).map(|n| if n % 2 == 0 { 2f64.powi(n) } else { 0.0 }).collect();
        let diag = fekete_check(&a).unwrap();
        assert!((diag.sup_root - 2.0).abs() < 1e-12);
        assert!(diag.converged);
        assert_eq!(diag.support_period, 2);
        assert_eq!(diag.tail_estimates.len(), 20);
    }

    #[test]
    fn identity_sequence_is_rejected_with_pair() {
        let a: Vec<f64> = (1..=40).map(|n| n as f64).collect();
        assert_eq!(fekete_check(&a).unwrap_err(), Error::NotSupermultiplicative { m: 2, n: 3 });
    }

    #[test]
    fn constant_sequence() {
        let d = fekete_check(&[1.0f64; 30]).unwrap();
        assert_eq!(d.sup_root, 1.0);
        assert!(d.converged);
        assert_eq!(d.support_period, 1);
    }

    #[test]
    fn empty_support() {
        let d = fekete_check(&[0.0f64; 10]).unwrap();
        assert_eq!(d.sup_root, 0.0);
        assert!(!d.converged);
        assert_eq!(d.support_period, 0);
        assert!(d.last_positive.is_none());
        assert!(fekete_check(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn ratios_for_identity_and_cycle() {
        let id = set(vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]]);
        let t = norm_table(&id, 10, 10, false);
        let r = bounded_ratio_check(&t, 0, 1, 1..=9).unwrap();
        assert_eq!(r.max_ratio, 1.0);

        let t = norm_table(&cycle3(), 15, 10, false);
        let r = bounded_ratio_check(&t, 0, 3, 1..=12).unwrap();
        assert_eq!(r.max_ratio, 1.0);
        assert_eq!(r.argmax, 3);
        assert!(bounded_ratio_check(&t, 0, 1, 1..=14).is_none());
    }

    #[test]
    fn cycle_trace_limit() {
        let r = trace_limit(&cycle3(), 30, DEFAULT_CAP).unwrap();
        assert_eq!(r.periods.global, 3);
        for (k, &lt) in r.log_traces.iter().enumerate() {
            let k = k + 1;
            if k % 3 == 0 {
                assert!((lt - 3f64.ln()).abs() < 1e-14);
            } else {
                assert_eq!(lt, f64::NEG_INFINITY);
            }
        }
        assert!(r.sandwich_holds.iter().all(|&b| b));
        assert_eq!(r.diag_roots.last().unwrap(), &(30, 1.0));
        let (k, root) = *r.trace_roots.last().unwrap();
        assert_eq!(k, 30);
        assert!((root - 3f64.powf(1.0 / 30.0)).abs() < 1e-14);
        assert!(r.diag_converged);
    }

    #[test]
    fn identity_trace_limit() {
        let id = set(vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]]);
        let r = trace_limit(&id, 20, DEFAULT_CAP).unwrap();
        assert_eq!(r.periods.global, 1);
        assert!(r.log_traces.iter().all(|&t| (t - 2f64.ln()).abs() < 1e-15));
        assert!((r.trace_roots.last().unwrap().1 - 2f64.powf(1.0 / 20.0)).abs() < 1e-14);
    }

    #[test]
    fn horizon_below_period_rejected() {
        assert!(trace_limit(&cycle3(), 2, 10).is_err());
    }

    #[test]
    fn growth_fits() {
        let jordan = set(vec![vec![vec![1.0, 1.0], vec![0.0, 1.0]]]);
        let t = norm_table(&jordan, 256, 10, false);
        let r = growth_fit(&t, 1.0, 32..=256).unwrap();
        assert!((r - 1.0).abs() < 0.05, "{r}");

        let id = set(vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]]);
        let t = norm_table(&id, 64, 10, false);
        assert!(growth_fit(&t, 1.0, 32..=64).unwrap().abs() < 0.05);

        let c = set(vec![vec![vec![3.0, 0.0], vec![0.0, 3.0]]]);
        let t = norm_table(&c, 64, 10, false);
        assert!(growth_fit(&t, 3.0, 32..=64).unwrap().abs() < 0.05);

        assert!(matches!(growth_fit(&t, 3.0, 1..=2), Err(Error::TooFewPoints { .. })));
        assert!(growth_fit(&t, 0.0, 1..=10).is_err());
    }

    #[test]
    fn diagonal_sequences_are_supermultiplicative() {
        for seed in 0..20 {
            let s: MatrixSet<f64> = crate::matset::random_set(3, 2, 0.5, (0.1, 2.0), seed).unwrap();
            let t = norm_table(&s, 12, DEFAULT_CAP, false);
            for i in 0..3 {
                let d = fekete_check_log(&diagonal_sequence(&t, i)).unwrap();
                assert!(d.tail_estimates.iter().all(|&(_, r)| r <= d.sup_root));
            }
        }
    }
}

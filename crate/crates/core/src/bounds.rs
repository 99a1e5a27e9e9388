//! Lower and upper bounds on the joint spectral radius read off a
//! [`NormTable`], and the best bracket over all lengths.
//!
//! Lower bounds, valid at every length including capacity-pruned ones:
//!
//! * diagonal: `max_i ||S^k||_{ii}^(1/k)`. The supremum over `k` of this
//!   quantity is the radius itself.
//! * component: `((V / (U D))^D max_C ||S^k||_C)^(1/k)` with `U`, `V` the
//!   largest and smallest positive entries and `D` the dimension.
//! * spectral: `rho(P)^(1/k)` for the probed length-`k` products `P`, with
//!   `rho(P)` itself bounded from below through the diagonal of powers of
//!   `P`.
//!
//! Upper bounds, taken only at exact lengths:
//!
//! * component: `(D max_C ||S^k||_C)^(1/k)`.
//! * submultiplicative: `(d ||S^k||)^(1/k)`.
//! * weighted norm: `(max_P max_i (P x)_i / x_i)^(1/k)` for a fixed
//!   positive weight vector `x`.

use crate::error::{Error, Result};
use crate::graph::{build_graph, condense, is_radius_trivially_zero, shortest_cycle_lengths, Condensation, DependencyGraph};
use crate::matset::{entry_stats, EntryStats, MatrixSet};
use crate::products::{norm_table, NormTable};
use crate::scalar::{log_le, root_of_log, Scalar};

/// All bound curves at one length.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthBounds<T> {
    pub k: usize,
    pub exact: bool,
    pub diag_lower: T,
    /// Absent for the all-zero set.
    pub comp_lower: Option<T>,
    pub spectral_lower: Option<T>,
    /// Absent at capacity-pruned lengths.
    pub comp_upper: Option<T>,
    pub submult_upper: Option<T>,
    pub weighted_upper: Option<T>,
}

impl<T: Scalar> LengthBounds<T> {
    pub fn lower(&self) -> T {
        [self.comp_lower, self.spectral_lower]
            .into_iter()
            .flatten()
            .fold(self.diag_lower, T::max)
    }

    pub fn upper(&self) -> Option<T> {
        [self.comp_upper, self.submult_upper, self.weighted_upper]
            .into_iter()
            .flatten()
            .reduce(T::min)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LowerSource {
    Diagonal { index: usize, word: Option<Vec<usize>> },
    Component { component: usize },
    Spectral { word: Option<Vec<usize>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpperSource {
    Component { component: usize },
    Submultiplicative,
    WeightedNorm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerCertificate<T> {
    pub k: usize,
    pub value: T,
    pub source: LowerSource,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpperCertificate<T> {
    pub k: usize,
    pub value: T,
    pub source: UpperSource,
}

#[derive(Debug, Clone)]
pub struct BoundsReport<T> {
    pub dim: usize,
    pub horizon: usize,
    pub curves: Vec<LengthBounds<T>>,
    pub best_lower: T,
    pub best_upper: Option<T>,
    pub lower_certificate: Option<LowerCertificate<T>>,
    pub upper_certificate: Option<UpperCertificate<T>>,
    /// Length of the shortest closed walk through each index (1 if none).
    pub m_indices: Vec<usize>,
    /// `max_i ||S^{m_i}||_{ii}^(1/m_i)` over indices with `m_i` inside the
    /// horizon.
    pub cycle_lower: Option<T>,
    /// Measured constant `best_upper^{m_i} / ||S^{m_i}||_{ii}` per index;
    /// absent when the diagonal is zero or `m_i` exceeds the horizon.
    pub cycle_constants: Vec<Option<T>>,
    pub trivial_zero: bool,
    pub entry_stats: Option<EntryStats<T>>,
    pub condensation: Condensation,
    pub table: NormTable<T>,
}

impl<T: Scalar> BoundsReport<T> {
    pub fn width(&self) -> Option<T> {
        self.best_upper.map(|u| u - self.best_lower)
    }

    /// Running maximum of the per-length lower bounds.
    pub fn lower_envelope(&self) -> Vec<T> {
        let mut acc = T::zero();
        self.curves
            .iter()
            .map(|c| {
                acc = acc.max(c.lower());
                acc
            })
            .collect()
    }

    /// Running minimum of the per-length upper bounds; absent until the
    /// first exact length.
    pub fn upper_envelope(&self) -> Vec<Option<T>> {
        let mut acc: Option<T> = None;
        self.curves
            .iter()
            .map(|c| {
                if let Some(u) = c.upper() {
                    acc = Some(acc.map_or(u, |a| a.min(u)));
                }
                acc
            })
            .collect()
    }

    pub fn contains(&self, value: T) -> bool {
        self.best_lower <= value && self.best_upper.is_none_or(|u| value <= u)
    }

    /// Whether every per-length lower bound sits below every exact upper
    /// bound, up to rounding slack.
    pub fn is_consistent(&self) -> bool {
        match self.best_upper {
            Some(u) => log_le(self.best_lower.ln(), u.ln()) || self.best_lower <= u,
            None => true,
        }
    }
}

/// `max_i ||S^k||_{ii}^(1/k)`; 0 when every diagonal is zero.
pub fn diag_lower<T: Scalar>(table: &NormTable<T>, k: usize) -> T {
    root_of_log(table.log_max_diag(k), k)
}

fn comp_lower_log<T: Scalar>(table: &NormTable<T>, stats: &EntryStats<T>, k: usize) -> T {
    let d = T::of_usize(stats.dim);
    let factor = d * (stats.min_positive.ln() - stats.max_positive.ln() - d.ln());
    factor + table.log_max_comp_norm(k)
}

/// Component-norm bracket at length `k`. The upper side needs an exact
/// length.
pub fn component_sandwich<T: Scalar>(table: &NormTable<T>, stats: &EntryStats<T>, k: usize) -> Result<(T, T)> {
    if !table.is_exact(k) {
        return Err(Error::RequiresExact(k));
    }
    let upper = root_of_log(T::of_usize(stats.dim).ln() + table.log_max_comp_norm(k), k);
    Ok((root_of_log(comp_lower_log(table, stats, k), k), upper))
}

/// Shortest closed-walk length through each index, 1 when there is none.
pub fn m_indices(g: &DependencyGraph, _c: &Condensation) -> Vec<usize> {
    shortest_cycle_lengths(g)
}

fn length_bounds<T: Scalar>(table: &NormTable<T>, stats: Option<&EntryStats<T>>, k: usize) -> LengthBounds<T> {
    let exact = table.is_exact(k);
    let ln_d = T::of_usize(table.dim()).ln();
    let comp_lower = stats.map(|st| root_of_log(comp_lower_log(table, st, k), k));
    let upper = |log: T| exact.then(|| root_of_log(log, k));
    LengthBounds {
        k,
        exact,
        diag_lower: diag_lower(table, k),
        comp_lower,
        spectral_lower: table.log_spectral_lower(k).map(|l| root_of_log(l, k)),
        comp_upper: upper(ln_d + table.log_max_comp_norm(k)),
        submult_upper: upper(ln_d + table.log_norm(k)),
        weighted_upper: table.log_weighted_norm(k).and_then(upper),
    }
}

fn lower_certificate<T: Scalar>(table: &NormTable<T>, curves: &[LengthBounds<T>]) -> Option<LowerCertificate<T>> {
    let mut best: Option<LowerCertificate<T>> = None;
    for c in curves {
        let k = c.k;
        let diag_index = (0..table.dim()).find(|&i| root_of_log(table.log_entry(k, i, i), k) == c.diag_lower);
        let mut options: Vec<(T, LowerSource)> = Vec::new();
        if let Some(index) = diag_index.filter(|_| c.diag_lower > T::zero()) {
            let word = table.witness(k, index, index).map(<[usize]>::to_vec);
            options.push((c.diag_lower, LowerSource::Diagonal { index, word }));
        }
        if let Some(v) = c.comp_lower.filter(|&v| v > T::zero()) {
            let comp_log = table.log_max_comp_norm(k);
            let component = (0..table.components().len())
                .find(|&ci| table.log_comp_norm(k, ci) == comp_log)
                .unwrap_or(0);
            options.push((v, LowerSource::Component { component }));
        }
        if let Some(v) = c.spectral_lower.filter(|&v| v > T::zero()) {
            let word = table.spectral_witness(k).map(<[usize]>::to_vec);
            options.push((v, LowerSource::Spectral { word }));
        }
        for (value, source) in options {
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(LowerCertificate { k, value, source });
            }
        }
    }
    best
}

fn upper_certificate<T: Scalar>(table: &NormTable<T>, curves: &[LengthBounds<T>]) -> Option<UpperCertificate<T>> {
    let mut best: Option<UpperCertificate<T>> = None;
    for c in curves {
        let comp_log = table.log_max_comp_norm(c.k);
        let component = (0..table.components().len())
            .find(|&ci| table.log_comp_norm(c.k, ci) == comp_log)
            .unwrap_or(0);
        let options = [
            (c.comp_upper, UpperSource::Component { component }),
            (c.submult_upper, UpperSource::Submultiplicative),
            (c.weighted_upper, UpperSource::WeightedNorm),
        ];
        for (value, source) in options {
            let Some(value) = value else { continue };
            if best.as_ref().is_none_or(|b| value < b.value) {
                best = Some(UpperCertificate { k: c.k, value, source });
            }
        }
    }
    best
}

/// Builds the table up to `horizon` and assembles every curve, envelope
/// and certificate.
pub fn best_bracket<T: Scalar>(set: &MatrixSet<T>, horizon: usize, cap: usize, keep_witness: bool) -> Result<BoundsReport<T>> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    if cap == 0 {
        return Err(Error::InvalidArgument("cap must be at least 1".into()));
    }
    let graph = build_graph(set);
    let condensation = condense(&graph);
    let trivial_zero = is_radius_trivially_zero(&condensation);
    // an acyclic graph has no nonzero product longer than d - 1
    let table = norm_table(set, horizon, cap, keep_witness);
    let stats = entry_stats(set);
    let curves: Vec<LengthBounds<T>> = (1..=horizon).map(|k| length_bounds(&table, stats.as_ref(), k)).collect();
    let m = m_indices(&graph, &condensation);

    let (best_lower, best_upper, lower_cert, upper_cert) = if trivial_zero {
        (T::zero(), Some(T::zero()), None, None)
    } else {
        let lower_cert = lower_certificate(&table, &curves);
        let upper_cert = upper_certificate(&table, &curves);
        (
            lower_cert.as_ref().map_or(T::zero(), |c| c.value),
            upper_cert.as_ref().map(|c| c.value),
            lower_cert,
            upper_cert,
        )
    };

    let cycle_lower = (0..set.dim())
        .filter(|&i| m[i] <= horizon)
        .map(|i| root_of_log(table.log_entry(m[i], i, i), m[i]))
        .reduce(T::max);
    let cycle_constants = (0..set.dim())
        .map(|i| {
            let k = m[i];
            let upper = best_upper?;
            if k > horizon || trivial_zero {
                return None;
            }
            let diag = table.log_entry(k, i, i);
            (diag > T::neg_infinity()).then(|| (T::of_usize(k) * upper.ln() - diag).exp())
        })
        .collect();

    Ok(BoundsReport {
        dim: set.dim(),
        horizon,
        curves,
        best_lower,
        best_upper,
        lower_certificate: lower_cert,
        upper_certificate: upper_cert,
        m_indices: m,
        cycle_lower,
        cycle_constants,
        trivial_zero,
        entry_stats: stats,
        condensation,
        table,
    })
}

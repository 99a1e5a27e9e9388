//! Enumeration of all length-`k` products with elementwise-domination
//! pruning, and the per-length table of maximal entries it produces.
//!
//! Products are stored normalized: entries lie in `[0, 1]` with maximum
//! exactly 1, and the true value is `entries * exp(log_scale)`. Lengths in
//! the hundreds stay representable this way even when entries grow like
//! `2^k`.
//!
//! Pruning relies on nonnegativity. If `P <= Q` entrywise then
//! `P A <= Q A` for every nonnegative `A`, so a dominated product can never
//! produce a larger entry, norm or trace at any later length than the
//! product dominating it. Dropping it keeps the table exact. A frontier of
//! `{A, 0.5 A}` collapses to `{A}` after one step for this reason.
//!
//! Capacity pruning is different: once a frontier exceeds `cap` items only
//! the `cap` items with the largest scale survive, and every later length is
//! flagged inexact. Inexact values are maxima over a subset of words, which
//! keeps them valid lower bounds on the true maxima and nothing more.
//!
//! Extension multiplies on the right, so witness words read left to right
//! in product order. Among equal products the lexicographically smallest
//! word is kept.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{build_graph, condense};
use crate::matrix::{mul_into, SquareMatrix};
use crate::matset::MatrixSet;
use crate::perron::{max_row_sum, power_iteration};
use crate::scalar::{ln_or_neg_inf, log_le, Scalar};

/// Default frontier capacity.
pub const DEFAULT_CAP: usize = 100_000;

/// Limit on the number of words the brute-force routines will visit.
pub const BRUTE_FORCE_GUARD: f64 = 1e7;

/// Number of frontier items (largest scale first) probed for the spectral
/// lower bound at each length.
pub const SPECTRAL_PROBE_ITEMS: usize = 32;

/// Number of squarings used when bounding the spectral radius of a single
/// product from its diagonal.
const SPECTRAL_SQUARINGS: usize = 30;

/// A product of generators in normalized log-scaled form.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledProduct<T> {
    dim: usize,
    entries: Vec<T>,
    log_scale: T,
    log_values: Vec<T>,
    word: Vec<usize>,
}

impl<T: Scalar> ScaledProduct<T> {
    /// Normalizes raw row-major values. Returns `None` for the zero matrix.
    fn from_raw(dim: usize, mut raw: Vec<T>, log_scale: T, word: Vec<usize>) -> Option<Self> {
        let top = raw.iter().copied().fold(T::zero(), T::max);
        if !(top > T::zero()) {
            return None;
        }
        for x in raw.iter_mut() {
            *x = *x / top;
        }
        let log_scale = log_scale + top.ln();
        let log_values = raw.iter().map(|&e| ln_or_neg_inf(e) + log_scale).collect();
        Some(Self { dim, entries: raw, log_scale, log_values, word })
    }

    pub fn from_matrix(m: &SquareMatrix<T>, word: Vec<usize>) -> Option<Self> {
        Self::from_raw(m.dim(), m.as_slice().to_vec(), T::zero(), word)
    }

    /// `self * generator`, with `letter` appended to the word.
    pub fn times(&self, generator: &SquareMatrix<T>, letter: usize) -> Option<Self> {
        let raw = mul_into(self.dim, &self.entries, generator.as_slice());
        let mut word = Vec::with_capacity(self.word.len() + 1);
        word.extend_from_slice(&self.word);
        word.push(letter);
        Self::from_raw(self.dim, raw, self.log_scale, word)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Normalized entries; the largest is exactly 1.
    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn log_scale(&self) -> T {
        self.log_scale
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// ln of the true `(i, j)` entry, negative infinity for zero.
    pub fn log_entry(&self, i: usize, j: usize) -> T {
        self.log_values[i * self.dim + j]
    }

    pub fn log_trace(&self) -> T {
        let t: T = (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum();
        ln_or_neg_inf(t) + self.log_scale
    }

    /// Entrywise `self <= other` in true-value semantics, no tolerance.
    pub fn is_dominated_by(&self, other: &Self) -> bool {
        self.log_values.iter().zip(&other.log_values).all(|(a, b)| a <= b)
    }

    /// ln of `max_i (P x)_i / x_i` for a positive weight vector `x`.
    pub fn log_weighted_norm(&self, weights: &[T]) -> T {
        let d = self.dim;
        let best = (0..d)
            .map(|i| {
                let row = &self.entries[i * d..(i + 1) * d];
                row.iter().zip(weights).map(|(&p, &w)| p * w).sum::<T>() / weights[i]
            })
            .fold(T::zero(), T::max);
        ln_or_neg_inf(best) + self.log_scale
    }

    /// Lower bound on `ln rho(P)` from `rho(P) >= ((P^t)_ii)^(1/t)`,
    /// maximized over `t = p * 2^s` with `p <= d` and `s` up to a fixed
    /// number of squarings. Every irreducible block has period at most `d`,
    /// so some `p` hits a positive diagonal whenever `rho(P) > 0`.
    pub fn log_spectral_lower(&self) -> T {
        let d = self.dim;
        let mut best = T::neg_infinity();
        let mut power = self.entries.clone();
        let mut power_log = self.log_scale;
        for p in 1..=d {
            if p > 1 {
                let raw = mul_into(d, &power, &self.entries);
                match normalize(raw) {
                    Some((m, l)) => {
                        power = m;
                        power_log = power_log + l + self.log_scale;
                    }
                    None => return best,
                }
            }
            let mut sq = power.clone();
            let mut sq_log = power_log;
            let mut t = T::of_usize(p);
            for s in 0..=SPECTRAL_SQUARINGS {
                if s > 0 {
                    let raw = mul_into(d, &sq, &sq);
                    match normalize(raw) {
                        Some((m, l)) => {
                            sq = m;
                            sq_log = sq_log + sq_log + l;
                            t = t + t;
                        }
                        None => break,
                    }
                }
                let diag = (0..d).map(|i| sq[i * d + i]).fold(T::zero(), T::max);
                if diag > T::zero() {
                    best = best.max((diag.ln() + sq_log) / t);
                }
            }
        }
        best
    }

    /// Dense true-value matrix. Overflows for very long products.
    pub fn to_matrix(&self) -> SquareMatrix<T> {
        let s = self.log_scale.exp();
        SquareMatrix::from_row_major(self.dim, self.entries.iter().map(|&e| e * s).collect())
    }
}

fn normalize<T: Scalar>(mut raw: Vec<T>) -> Option<(Vec<T>, T)> {
    let top = raw.iter().copied().fold(T::zero(), T::max);
    if !(top > T::zero()) {
        return None;
    }
    for x in raw.iter_mut() {
        *x = *x / top;
    }
    Some((raw, top.ln()))
}

/// All maximal products of one length.
#[derive(Debug, Clone)]
pub struct Frontier<T> {
    length: usize,
    items: Vec<ScaledProduct<T>>,
    exact: bool,
}

impl<T: Scalar> Frontier<T> {
    /// The generators themselves, pruned.
    pub fn seed(set: &MatrixSet<T>, cap: usize) -> Self {
        let candidates = set
            .matrices()
            .iter()
            .enumerate()
            .filter_map(|(g, m)| ScaledProduct::from_matrix(m, vec![g]))
            .collect();
        let (items, truncated) = prune(candidates, cap);
        Self { length: 1, items, exact: !truncated }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn items(&self) -> &[ScaledProduct<T>] {
        &self.items
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn is_zero(&self) -> bool {
        self.items.is_empty()
    }

    /// Multiplies every item on the right by every generator and prunes.
    pub fn extend(&self, set: &MatrixSet<T>, cap: usize) -> Self {
        let gens = set.matrices();
        let candidates: Vec<ScaledProduct<T>> = self
            .items
            .par_iter()
            .flat_map_iter(|p| gens.iter().enumerate().filter_map(move |(g, a)| p.times(a, g)))
            .collect();
        let (items, truncated) = prune(candidates, cap);
        Self { length: self.length + 1, items, exact: self.exact && !truncated }
    }
}

fn by_scale_then_word<T: Scalar>(a: &ScaledProduct<T>, b: &ScaledProduct<T>) -> Ordering {
    b.log_scale
        .partial_cmp(&a.log_scale)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.word.cmp(&b.word))
}

/// Keeps the maximal elements under domination, then applies the capacity.
/// The result is sorted by decreasing scale, then by word, and does not
/// depend on the order of `candidates`.
fn prune<T: Scalar>(mut candidates: Vec<ScaledProduct<T>>, cap: usize) -> (Vec<ScaledProduct<T>>, bool) {
    candidates.sort_by(by_scale_then_word);
    let mut kept: Vec<ScaledProduct<T>> = Vec::new();
    for q in candidates {
        // Anything dominating q has at least q's scale, so it is already in
        // `kept` unless the scales tie.
        if kept.iter().any(|r| q.is_dominated_by(r)) {
            continue;
        }
        kept.retain(|r| !(r.log_scale == q.log_scale && r.is_dominated_by(&q)));
        kept.push(q);
    }
    let truncated = kept.len() > cap;
    kept.truncate(cap);
    (kept, truncated)
}

/// Per-length maxima of product entries, in the log domain.
#[derive(Debug, Clone)]
pub struct NormTable<T> {
    dim: usize,
    components: Vec<Vec<usize>>,
    rows: Vec<LengthRow<T>>,
}

#[derive(Debug, Clone)]
struct LengthRow<T> {
    log_entries: Vec<T>,
    log_norm: T,
    log_comp_norms: Vec<T>,
    log_max_trace: T,
    exact: bool,
    frontier_size: usize,
    witnesses: Option<Vec<Option<Vec<usize>>>>,
    probes: Option<Probes<T>>,
}

/// Extra per-length quantities that need whole products rather than
/// entrywise maxima. Only the pruned enumeration records them.
#[derive(Debug, Clone)]
struct Probes<T> {
    log_spectral_lower: T,
    spectral_word: Option<Vec<usize>>,
    log_weighted_norm: T,
}

impl<T: Scalar> NormTable<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn horizon(&self) -> usize {
        self.rows.len()
    }

    /// Components of the dependency graph used for `log_comp_norm`.
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    fn row(&self, k: usize) -> &LengthRow<T> {
        assert!(k >= 1 && k <= self.rows.len(), "length {k} outside 1..={}", self.rows.len());
        &self.rows[k - 1]
    }

    /// ln of the maximal `(i, j)` entry over length-`k` products.
    pub fn log_entry(&self, k: usize, i: usize, j: usize) -> T {
        self.row(k).log_entries[i * self.dim + j]
    }

    pub fn log_norm(&self, k: usize) -> T {
        self.row(k).log_norm
    }

    pub fn log_comp_norm(&self, k: usize, component: usize) -> T {
        self.row(k).log_comp_norms[component]
    }

    pub fn log_max_comp_norm(&self, k: usize) -> T {
        self.row(k).log_comp_norms.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn log_max_trace(&self, k: usize) -> T {
        self.row(k).log_max_trace
    }

    pub fn log_max_diag(&self, k: usize) -> T {
        (0..self.dim).map(|i| self.log_entry(k, i, i)).fold(T::neg_infinity(), T::max)
    }

    /// True iff no capacity pruning happened at any length up to `k`.
    pub fn is_exact(&self, k: usize) -> bool {
        self.row(k).exact
    }

    pub fn frontier_size(&self, k: usize) -> usize {
        self.row(k).frontier_size
    }

    pub fn witness(&self, k: usize, i: usize, j: usize) -> Option<&[usize]> {
        self.row(k).witnesses.as_ref()?[i * self.dim + j].as_deref()
    }

    /// Lower bound on `max_w ln rho(P_w)` over length-`k` words.
    pub fn log_spectral_lower(&self, k: usize) -> Option<T> {
        self.row(k).probes.as_ref().map(|p| p.log_spectral_lower)
    }

    /// Word of the product achieving [`Self::log_spectral_lower`].
    pub fn spectral_witness(&self, k: usize) -> Option<&[usize]> {
        self.row(k).probes.as_ref()?.spectral_word.as_deref()
    }

    /// ln of the maximal weighted max-row norm over length-`k` products.
    pub fn log_weighted_norm(&self, k: usize) -> Option<T> {
        self.row(k).probes.as_ref().map(|p| p.log_weighted_norm)
    }

    /// Checks the structural inequalities every table must satisfy, up to
    /// rounding slack. Returns a description of the first violation.
    pub fn verify_invariants(&self) -> std::result::Result<(), String> {
        let n = self.horizon();
        let d = self.dim;
        let ln_d = T::of_usize(d).ln();
        for k in 1..=n {
            let row = self.row(k);
            let max_entry = row.log_entries.iter().copied().fold(T::neg_infinity(), T::max);
            if max_entry != row.log_norm {
                return Err(format!("log_norm({k}) is not the max entry"));
            }
            for (c, comp) in self.components.iter().enumerate() {
                let m = comp
                    .iter()
                    .flat_map(|&i| comp.iter().map(move |&j| (i, j)))
                    .map(|(i, j)| self.log_entry(k, i, j))
                    .fold(T::neg_infinity(), T::max);
                if m != row.log_comp_norms[c] {
                    return Err(format!("log_comp_norm({k}, {c}) is not the component max"));
                }
            }
            let diag = self.log_max_diag(k);
            if !log_le(diag, row.log_max_trace) || !log_le(row.log_max_trace, diag + ln_d) {
                return Err(format!("trace sandwich fails at k={k}"));
            }
        }
        for a in 1..n {
            for b in 1..=(n - a) {
                if !self.is_exact(a + b) {
                    continue;
                }
                for i in 0..d {
                    let lhs = self.log_entry(a, i, i) + self.log_entry(b, i, i);
                    if !log_le(lhs, self.log_entry(a + b, i, i)) {
                        return Err(format!("diagonal supermultiplicativity fails at ({a}, {b}, {i})"));
                    }
                }
                if self.is_exact(a) && self.is_exact(b) {
                    let rhs = ln_d + self.log_norm(a) + self.log_norm(b);
                    if !log_le(self.log_norm(a + b), rhs) {
                        return Err(format!("d-submultiplicativity fails at ({a}, {b})"));
                    }
                }
                for i in 0..d {
                    for j in 0..d {
                        for m in 0..d {
                            let lhs = self.log_entry(a, i, m) + self.log_entry(b, m, j);
                            if !log_le(lhs, self.log_entry(a + b, i, j)) {
                                return Err(format!("mixed bound fails at ({a}, {b}, {i}, {m}, {j})"));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Accumulates one table row from a stream of products.
struct RowBuilder<'a, T> {
    dim: usize,
    components: &'a [Vec<usize>],
    log_entries: Vec<T>,
    log_max_trace: T,
    witnesses: Option<Vec<Option<Vec<usize>>>>,
}

impl<'a, T: Scalar> RowBuilder<'a, T> {
    fn new(dim: usize, components: &'a [Vec<usize>], keep_witness: bool) -> Self {
        Self {
            dim,
            components,
            log_entries: vec![T::neg_infinity(); dim * dim],
            log_max_trace: T::neg_infinity(),
            witnesses: keep_witness.then(|| vec![None; dim * dim]),
        }
    }

    fn push(&mut self, log_values: &[T], log_trace: T, word: &[usize]) {
        for (idx, &v) in log_values.iter().enumerate() {
            if v == T::neg_infinity() {
                continue;
            }
            let cur = self.log_entries[idx];
            let replace = match self.witnesses.as_ref().map(|w| &w[idx]) {
                Some(Some(best)) => v > cur || (v == cur && word < best.as_slice()),
                _ => v > cur,
            };
            if replace {
                self.log_entries[idx] = v;
                if let Some(w) = self.witnesses.as_mut() {
                    w[idx] = Some(word.to_vec());
                }
            }
        }
        self.log_max_trace = self.log_max_trace.max(log_trace);
    }

    fn finish(self, exact: bool, frontier_size: usize, probes: Option<Probes<T>>) -> LengthRow<T> {
        let d = self.dim;
        let log_norm = self.log_entries.iter().copied().fold(T::neg_infinity(), T::max);
        let log_comp_norms = self
            .components
            .iter()
            .map(|comp| {
                comp.iter()
                    .flat_map(|&i| comp.iter().map(move |&j| i * d + j))
                    .map(|idx| self.log_entries[idx])
                    .fold(T::neg_infinity(), T::max)
            })
            .collect();
        LengthRow {
            log_entries: self.log_entries,
            log_norm,
            log_comp_norms,
            log_max_trace: self.log_max_trace,
            exact,
            frontier_size,
            witnesses: self.witnesses,
            probes,
        }
    }
}

fn zero_row<T: Scalar>(dim: usize, components: &[Vec<usize>], exact: bool, keep_witness: bool) -> LengthRow<T> {
    RowBuilder::new(dim, components, keep_witness).finish(
        exact,
        0,
        Some(Probes {
            log_spectral_lower: T::neg_infinity(),
            spectral_word: None,
            log_weighted_norm: T::neg_infinity(),
        }),
    )
}

/// Positive weights for the weighted max-row norm: an approximate Perron
/// vector of the sum of the generators, floored away from zero. Any positive
/// vector gives a valid norm; a good one makes the norm nearly extremal.
pub fn norm_weights<T: Scalar>(set: &MatrixSet<T>) -> Vec<T> {
    let d = set.dim();
    let sum = set.matrices().iter().fold(SquareMatrix::zeros(d), |acc, m| {
        SquareMatrix::from_row_major(d, acc.as_slice().iter().zip(m.as_slice()).map(|(&a, &b)| a + b).collect())
    });
    let shift = max_row_sum(&sum) * T::of(0.5) + T::min_positive_value();
    let pi = power_iteration(&sum, shift, T::epsilon() * T::of(16.0), 2000);
    let floor = T::of(1e-6);
    pi.vector.into_iter().map(|x| x.max(floor)).collect()
}

/// Maximal entries, norms, component norms and traces for lengths `1..=horizon`.
pub fn norm_table<T: Scalar>(set: &MatrixSet<T>, horizon: usize, cap: usize, keep_witness: bool) -> NormTable<T> {
    let cap = cap.max(1);
    let cond = condense(&build_graph(set));
    let components = cond.components().to_vec();
    let weights = norm_weights(set);
    let d = set.dim();
    let mut rows = Vec::with_capacity(horizon);
    let mut frontier = Frontier::seed(set, cap);
    for k in 1..=horizon {
        if k > 1 {
            if frontier.is_zero() {
                rows.push(zero_row(d, &components, frontier.exact, keep_witness));
                continue;
            }
            frontier = frontier.extend(set, cap);
        }
        let mut builder = RowBuilder::new(d, &components, keep_witness);
        for p in frontier.items() {
            builder.push(&p.log_values, p.log_trace(), p.word());
        }
        let spectral: Vec<T> = frontier
            .items()
            .par_iter()
            .take(SPECTRAL_PROBE_ITEMS)
            .map(ScaledProduct::log_spectral_lower)
            .collect();
        // first maximum in frontier order; ties resolved by smallest word
        let best = spectral.iter().enumerate().fold(None, |acc: Option<usize>, (idx, &v)| match acc {
            Some(b) if spectral[b] > v => Some(b),
            Some(b) if spectral[b] == v && frontier.items()[b].word() <= frontier.items()[idx].word() => Some(b),
            _ if v == T::neg_infinity() => acc,
            _ => Some(idx),
        });
        let log_spectral_lower = best.map_or(T::neg_infinity(), |b| spectral[b]);
        let spectral_word = best.map(|b| frontier.items()[b].word().to_vec());
        let log_weighted_norm = frontier
            .items()
            .iter()
            .map(|p| p.log_weighted_norm(&weights))
            .fold(T::neg_infinity(), T::max);
        let probes = Probes { log_spectral_lower, spectral_word, log_weighted_norm };
        rows.push(builder.finish(frontier.exact, frontier.items.len(), Some(probes)));
    }
    let table = NormTable { dim: d, components, rows };
    debug_assert!(table.verify_invariants().is_ok(), "{:?}", table.verify_invariants());
    table
}

/// The frontier reached after `length` steps, for inspection.
pub fn frontier_at<T: Scalar>(set: &MatrixSet<T>, length: usize, cap: usize) -> Frontier<T> {
    let cap = cap.max(1);
    let mut f = Frontier::seed(set, cap);
    while f.length < length.max(1) {
        f = f.extend(set, cap);
    }
    f
}

pub(crate) fn check_guard(m: usize, n: usize) -> Result<()> {
    let words = (m as f64).powi(n.min(i32::MAX as usize) as i32);
    if words > BRUTE_FORCE_GUARD {
        return Err(Error::GuardExceeded { words, limit: BRUTE_FORCE_GUARD });
    }
    Ok(())
}

/// Literal maximum over all `m^k` words for each `k <= horizon`, no pruning.
pub fn brute_norm_table<T: Scalar>(set: &MatrixSet<T>, horizon: usize) -> Result<NormTable<T>> {
    check_guard(set.len(), horizon)?;
    let d = set.dim();
    let components = condense(&build_graph(set)).components().to_vec();
    let mut builders: Vec<RowBuilder<T>> =
        (0..horizon).map(|_| RowBuilder::new(d, &components, true)).collect();
    let mut sizes = vec![0usize; horizon];

    // Depth-first over words in lexicographic order; each stack frame holds
    // the prefix product as (normalized entries, log scale).
    let mut word: Vec<usize> = Vec::with_capacity(horizon);
    let mut stack: Vec<(Vec<T>, T)> = vec![(SquareMatrix::<T>::identity(d).as_slice().to_vec(), T::zero())];
    let mut next_letter: Vec<usize> = vec![0];
    while let Some(letter) = next_letter.last().copied() {
        if letter == set.len() || word.len() == horizon {
            next_letter.pop();
            stack.pop();
            word.pop();
            continue;
        }
        *next_letter.last_mut().unwrap() += 1;
        let (prefix, prefix_log) = stack.last().unwrap();
        let raw = mul_into(d, prefix, set.matrices()[letter].as_slice());
        word.push(letter);
        let k = word.len();
        let top = raw.iter().copied().fold(T::zero(), T::max);
        let (entries, log_scale) = if top > T::zero() {
            (raw.iter().map(|&x| x / top).collect::<Vec<T>>(), *prefix_log + top.ln())
        } else {
            (raw, T::zero())
        };
        let log_values: Vec<T> = entries.iter().map(|&e| ln_or_neg_inf(e) + log_scale).collect();
        let trace: T = (0..d).map(|i| entries[i * d + i]).sum();
        builders[k - 1].push(&log_values, ln_or_neg_inf(trace) + log_scale, &word);
        sizes[k - 1] += 1;
        stack.push((entries, log_scale));
        next_letter.push(0);
    }
    let rows = builders
        .into_iter()
        .zip(sizes)
        .map(|(b, n)| b.finish(true, n, None))
        .collect();
    Ok(NormTable { dim: d, components, rows })
}

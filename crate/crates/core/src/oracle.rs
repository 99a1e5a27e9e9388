//! Brute-force references used to cross-check the main pipeline on small
//! instances: the spectral radius of one matrix and the generalized
//! spectral radius `max_w rho(P_w)^(1/|w|)` over all words up to a length.
//!
//! Word enumeration is plain depth-first search in lexicographic order with
//! no pruning, so ties resolve to the lexicographically smallest word.

use crate::error::{Error, Result};
use crate::matrix::{mul_into, SquareMatrix};
use crate::matset::MatrixSet;
use crate::perron::{max_row_sum, power_iteration};
use crate::products::check_guard;
use crate::scalar::Scalar;

/// Default relative tolerance of the power iteration.
pub const DEFAULT_TOL: f64 = 1e-13;
pub const DEFAULT_MAX_ITER: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralRadius<T> {
    pub value: T,
    pub iterations: usize,
    /// `max_{t <= 4d} max_i ((A^t)_ii)^(1/t)`, a lower bound on the radius.
    pub diagonal_estimate: T,
    /// Set when the diagonal estimate exceeded the power-iteration value by
    /// more than `10 * tol` relative; `value` is then the larger of the two.
    pub disagreement: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleEstimate<T> {
    pub value: T,
    pub horizon: usize,
    pub achieving_word: Vec<usize>,
    /// `max_{|w| = n} rho(P_w)^(1/n)` for `n = 1..=horizon`.
    pub per_length: Vec<T>,
}

/// Perron root of a nonnegative matrix by shifted power iteration.
pub fn single_spectral_radius<T: Scalar>(a: &SquareMatrix<T>, tol: T, max_iter: usize) -> Result<SpectralRadius<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if a.as_slice().iter().any(|&x| x < T::zero() || !x.is_finite()) {
        return Err(Error::InvalidArgument("matrix must be finite and nonnegative".into()));
    }
    let epsilon = T::of(1e-12) * (T::one() + a.max_entry());
    let shift = epsilon + max_row_sum(a) * T::of(0.5);
    let pi = power_iteration(a, shift, tol, max_iter);
    if !pi.converged {
        return Err(Error::NoConvergence { iterations: pi.iterations, best: pi.value.as_f64() });
    }
    let diagonal_estimate = diagonal_estimate(a, 4 * a.dim());
    let disagreement = diagonal_estimate > pi.value * (T::one() + T::of(10.0) * tol);
    Ok(SpectralRadius {
        value: pi.value.max(diagonal_estimate),
        iterations: pi.iterations,
        diagonal_estimate,
        disagreement,
    })
}

/// `max_{t <= max_power} max_i ((A^t)_ii)^(1/t)`, computed with normalized
/// powers.
pub fn diagonal_estimate<T: Scalar>(a: &SquareMatrix<T>, max_power: usize) -> T {
    let d = a.dim();
    let top = a.max_entry();
    if !(top > T::zero()) {
        return T::zero();
    }
    let base: Vec<T> = a.as_slice().iter().map(|&x| x / top).collect();
    let log_top = top.ln();
    let mut power = base.clone();
    let mut log_scale = log_top;
    let mut best = T::neg_infinity();
    for t in 1..=max_power {
        if t > 1 {
            let raw = mul_into(d, &power, &base);
            let m = raw.iter().copied().fold(T::zero(), T::max);
            if !(m > T::zero()) {
                break;
            }
            power = raw.into_iter().map(|x| x / m).collect();
            log_scale = log_scale + log_top + m.ln();
        }
        let diag = (0..d).map(|i| power[i * d + i]).fold(T::zero(), T::max);
        if diag > T::zero() {
            best = best.max((diag.ln() + log_scale) / T::of_usize(t));
        }
    }
    if best == T::neg_infinity() {
        T::zero()
    } else {
        best.exp()
    }
}

/// Exhaustive `max_w rho(P_w)^(1/|w|)` over words of length `1..=horizon`.
pub fn generalized_lower<T: Scalar>(set: &MatrixSet<T>, horizon: usize) -> Result<OracleEstimate<T>> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    check_guard(set.len(), horizon)?;
    let d = set.dim();
    let tol = T::of(DEFAULT_TOL).max(T::epsilon() * T::of(64.0));
    let mut per_length = vec![T::zero(); horizon];
    let mut best_value = T::zero();
    let mut best_word: Vec<usize> = Vec::new();

    let mut word: Vec<usize> = Vec::with_capacity(horizon);
    let mut stack: Vec<(Vec<T>, T)> = vec![(SquareMatrix::<T>::identity(d).as_slice().to_vec(), T::zero())];
    let mut next_letter = vec![0usize];
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
        let top = raw.iter().copied().fold(T::zero(), T::max);
        let (entries, log_scale) = if top > T::zero() {
            (raw.iter().map(|&x| x / top).collect::<Vec<T>>(), *prefix_log + top.ln())
        } else {
            (raw, T::zero())
        };
        let value = if top > T::zero() {
            let m = SquareMatrix::from_row_major(d, entries.clone());
            let rho = match single_spectral_radius(&m, tol, DEFAULT_MAX_ITER) {
                Ok(r) => r.value,
                Err(Error::NoConvergence { best, .. }) => T::of(best),
                Err(e) => return Err(e),
            };
            if rho > T::zero() {
                ((rho.ln() + log_scale) / T::of_usize(word.len())).exp()
            } else {
                T::zero()
            }
        } else {
            T::zero()
        };
        let k = word.len();
        per_length[k - 1] = per_length[k - 1].max(value);
        let near_tie = value <= best_value * (T::one() + T::of(1e-12));
        if value > T::zero() && !near_tie {
            best_value = value;
            best_word = word.clone();
        }
        stack.push((entries, log_scale));
        next_letter.push(0);
    }
    if best_word.is_empty() {
        best_word.push(0);
    }
    Ok(OracleEstimate { value: best_value, horizon, achieving_word: best_word, per_length })
}

//! Shifted power iteration shared by the oracle and the weighted-norm probe.

use crate::matrix::SquareMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub(crate) struct PowerIteration<T> {
    /// Estimate of the Perron root of the unshifted matrix.
    pub value: T,
    /// Positive iterate, max-normalized.
    pub vector: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
}

/// Largest row sum: an upper bound on the Perron root.
pub(crate) fn max_row_sum<T: Scalar>(a: &SquareMatrix<T>) -> T {
    a.rows().map(|r| r.iter().copied().sum::<T>()).fold(T::zero(), T::max)
}

/// Power iteration on `a + shift * I`, started from the all-ones vector.
///
/// The iterate stays strictly positive, so the Collatz-Wielandt ratios
/// `(a x)_i / x_i` are defined at every step. The returned value is their
/// maximum, which never falls below the Perron root. Convergence is declared
/// when that maximum moves by less than `tol` relative between steps and the
/// iterate itself has settled.
pub(crate) fn power_iteration<T: Scalar>(
    a: &SquareMatrix<T>,
    shift: T,
    tol: T,
    max_iter: usize,
) -> PowerIteration<T> {
    let d = a.dim();
    let mut x = vec![T::one(); d];
    let mut prev = T::infinity();
    let mut value = T::zero();
    for it in 1..=max_iter {
        let ax = mat_vec(a, &x);
        value = x
            .iter()
            .zip(&ax)
            .map(|(&xi, &yi)| yi / xi)
            .fold(T::zero(), T::max);
        let mut next: Vec<T> = ax.iter().zip(&x).map(|(&y, &xi)| y + shift * xi).collect();
        let top = next.iter().copied().fold(T::zero(), T::max);
        if !(top > T::zero()) {
            return PowerIteration { value: T::zero(), vector: x, iterations: it, converged: true };
        }
        for v in next.iter_mut() {
            *v = *v / top;
        }
        let moved = next
            .iter()
            .zip(&x)
            .map(|(&p, &q)| (p - q).abs())
            .fold(T::zero(), T::max);
        x = next;
        let settled = (value - prev).abs() <= tol * value.max(T::min_positive_value());
        if settled && moved <= tol.sqrt() {
            return PowerIteration { value, vector: x, iterations: it, converged: true };
        }
        prev = value;
    }
    PowerIteration { value, vector: x, iterations: max_iter, converged: false }
}

pub(crate) fn mat_vec<T: Scalar>(a: &SquareMatrix<T>, x: &[T]) -> Vec<T> {
    a.rows().map(|r| r.iter().zip(x).map(|(&aij, &xj)| aij * xj).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converges_on_symmetric_positive() {
        let a = SquareMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let pi = power_iteration(&a, 0.0, 1e-14, 10_000);
        assert!(pi.converged);
        assert!((pi.value - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn shift_breaks_periodicity() {
        let a = SquareMatrix::<f64>::from_rows(&[vec![0.0, 2.0], vec![0.5, 0.0]]).unwrap();
        let pi = power_iteration(&a, 1.0, 1e-14, 10_000);
        assert!(pi.converged);
        assert!((pi.value - 1.0).abs() < 1e-10);
    }
}

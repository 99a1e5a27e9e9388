//! The input set of nonnegative matrices: validation, file formats, scaling
//! and seeded random instances.
//!
//! Two on-disk formats are accepted. The canonical one is json:
//!
//! ```json
//! {"dim": 2, "matrices": [[[0, 1], [1, 0]]], "name": "swap"}
//! ```
//!
//! The csv alternative starts with a `d m` header line followed by `m`
//! blocks of `d` lines, each holding `d` comma-separated numbers. Blank
//! lines between blocks are ignored.
//!
//! Structural zeros are exact `0.0`. Nothing is thresholded, so the
//! dependency graph seen by [`crate::graph`] is exactly the support pattern
//! of the input.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;
use crate::scalar::Scalar;

/// Generator used by [`random_set`]. Changing it invalidates fixtures.
pub const PRNG_NAME: &str = "rand_chacha::ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// A finite, ordered set of `d x d` nonnegative matrices.
///
/// Matrix order is significant: indices into [`MatrixSet::matrices`] are the
/// letters of every witness word reported by the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSet<T> {
    dim: usize,
    matrices: Vec<SquareMatrix<T>>,
    name: Option<String>,
}

/// Largest and smallest positive entries over the whole set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryStats<T> {
    pub max_positive: T,
    pub min_positive: T,
    pub dim: usize,
}

#[derive(Deserialize, Serialize)]
struct JsonSet {
    dim: usize,
    matrices: Vec<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

impl<T: Scalar> MatrixSet<T> {
    /// Validates and wraps a list of matrices.
    pub fn new(dim: usize, matrices: Vec<SquareMatrix<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ShapeMismatch("dimension must be at least 1".into()));
        }
        if matrices.is_empty() {
            return Err(Error::EmptySet);
        }
        for (idx, m) in matrices.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "matrix {idx} is {0}x{0}, expected {dim}x{dim}",
                    m.dim()
                )));
            }
            for (row, r) in m.rows().enumerate() {
                for (col, &x) in r.iter().enumerate() {
                    if !x.is_finite() {
                        return Err(Error::NonFiniteEntry { matrix: idx, row, col });
                    }
                    if x < T::zero() {
                        return Err(Error::NegativeEntry { matrix: idx, row, col });
                    }
                }
            }
        }
        Ok(Self { dim, matrices, name: None })
    }

    /// Builds a set from nested `[matrix][row][col]` vectors.
    pub fn from_nested(matrices: Vec<Vec<Vec<T>>>) -> Result<Self> {
        let dim = matrices.first().map_or(0, Vec::len);
        if matrices.is_empty() {
            return Err(Error::EmptySet);
        }
        Self::from_nested_with_dim(dim, matrices)
    }

    fn from_nested_with_dim(dim: usize, matrices: Vec<Vec<Vec<T>>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ShapeMismatch("dimension must be at least 1".into()));
        }
        let mut out = Vec::with_capacity(matrices.len());
        for (idx, rows) in matrices.iter().enumerate() {
            if rows.len() != dim {
                return Err(Error::ShapeMismatch(format!(
                    "matrix {idx} has {} rows, expected {dim}",
                    rows.len()
                )));
            }
            if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != dim) {
                return Err(Error::ShapeMismatch(format!(
                    "matrix {idx} row {r} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            out.push(SquareMatrix::from_rows(rows).expect("shape checked"));
        }
        Self::new(dim, out)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[SquareMatrix<T>] {
        &self.matrices
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Product of the matrices named by `word`, left to right. The empty
    /// word gives the identity.
    pub fn product(&self, word: &[usize]) -> SquareMatrix<T> {
        word.iter()
            .fold(SquareMatrix::identity(self.dim), |acc, &w| acc.mul(&self.matrices[w]))
    }

    /// Simultaneous relabeling of indices: entry (i, j) moves to (p[i], p[j]).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            dim: self.dim,
            matrices: self.matrices.iter().map(|m| m.permuted(perm)).collect(),
            name: self.name.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let js = JsonSet {
            dim: self.dim,
            matrices: self
                .matrices
                .iter()
                .map(|m| m.rows().map(|r| r.iter().map(|x| x.as_f64()).collect()).collect())
                .collect(),
            name: self.name.clone(),
        };
        serde_json::to_string(&js).expect("finite values always serialize")
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{} {}\n", self.dim, self.matrices.len());
        for m in &self.matrices {
            for r in m.rows() {
                let cells: Vec<String> = r.iter().map(|x| format!("{}", x.as_f64())).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        out
    }
}

/// Parses and validates a matrix set.
pub fn load<T: Scalar>(source: &[u8], format: Format) -> Result<MatrixSet<T>> {
    let text = std::str::from_utf8(source).map_err(|e| Error::Parse(e.to_string()))?;
    match format {
        Format::Json => load_json(text),
        Format::Csv => load_csv(text),
    }
}

fn load_json<T: Scalar>(text: &str) -> Result<MatrixSet<T>> {
    let js: JsonSet = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if js.matrices.is_empty() {
        return Err(Error::EmptySet);
    }
    let nested = js
        .matrices
        .into_iter()
        .map(|m| m.into_iter().map(|r| r.into_iter().map(T::of).collect()).collect())
        .collect();
    let set = MatrixSet::from_nested_with_dim(js.dim, nested)?;
    Ok(match js.name {
        Some(n) => set.with_name(n),
        None => set,
    })
}

fn load_csv<T: Scalar>(text: &str) -> Result<MatrixSet<T>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
    let hdr: Vec<&str> = header.split_whitespace().collect();
    if hdr.len() != 2 {
        return Err(Error::Parse(format!("header must be `d m`, got `{header}`")));
    }
    let parse_count = |s: &str| {
        s.parse::<usize>().map_err(|e| Error::Parse(format!("bad header field `{s}`: {e}")))
    };
    let dim = parse_count(hdr[0])?;
    let count = parse_count(hdr[1])?;
    if count == 0 {
        return Err(Error::EmptySet);
    }
    let mut matrices = Vec::with_capacity(count);
    for idx in 0..count {
        let mut rows = Vec::with_capacity(dim);
        for r in 0..dim {
            let line = lines.next().ok_or_else(|| {
                Error::ShapeMismatch(format!("matrix {idx} ends after {r} rows, expected {dim}"))
            })?;
            let row = line
                .split(',')
                .map(|cell| {
                    let cell = cell.trim();
                    cell.parse::<f64>()
                        .map(T::of)
                        .map_err(|e| Error::Parse(format!("bad number `{cell}`: {e}")))
                })
                .collect::<Result<Vec<T>>>()?;
            rows.push(row);
        }
        matrices.push(rows);
    }
    if lines.next().is_some() {
        return Err(Error::ShapeMismatch(format!("trailing rows after {count} matrices")));
    }
    MatrixSet::from_nested_with_dim(dim, matrices)
}

/// Largest and smallest positive entries; `None` for an all-zero set.
pub fn entry_stats<T: Scalar>(set: &MatrixSet<T>) -> Option<EntryStats<T>> {
    let positives = set.matrices.iter().flat_map(|m| m.as_slice()).filter(|&&x| x > T::zero());
    let (lo, hi) = positives.fold((None, None), |(lo, hi): (Option<T>, Option<T>), &x| {
        (Some(lo.map_or(x, |l| l.min(x))), Some(hi.map_or(x, |h| h.max(x))))
    });
    Some(EntryStats { max_positive: hi?, min_positive: lo?, dim: set.dim })
}

/// Multiplies every entry by `factor`.
pub fn scale<T: Scalar>(set: &MatrixSet<T>, factor: T) -> Result<MatrixSet<T>> {
    if !(factor > T::zero()) || !factor.is_finite() {
        return Err(Error::InvalidArgument(format!("scale factor must be positive and finite, got {factor}")));
    }
    Ok(MatrixSet {
        dim: set.dim,
        matrices: set.matrices.iter().map(|m| m.map(|x| x * factor)).collect(),
        name: set.name.clone(),
    })
}

/// Random instance: each entry is nonzero with probability `density`, and
/// nonzero values are uniform on `[lo, hi]`. Pure in its arguments.
pub fn random_set<T: Scalar>(
    dim: usize,
    count: usize,
    density: f64,
    (lo, hi): (f64, f64),
    seed: u64,
) -> Result<MatrixSet<T>> {
    if dim == 0 || count == 0 {
        return Err(Error::InvalidArgument("dimension and count must be at least 1".into()));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidArgument(format!("density must lie in (0, 1], got {density}")));
    }
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("value range must satisfy 0 < lo <= hi < inf, got ({lo}, {hi})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let matrices = (0..count)
        .map(|_| {
            let data = (0..dim * dim)
                .map(|_| {
                    let keep = rng.gen::<f64>() < density;
                    let u = rng.gen::<f64>();
                    if keep {
                        T::of(lo + (hi - lo) * u)
                    } else {
                        T::zero()
                    }
                })
                .collect();
            SquareMatrix::from_row_major(dim, data)
        })
        .collect();
    MatrixSet::new(dim, matrices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(ms: &[&[&[f64]]]) -> MatrixSet<f64> {
        MatrixSet::from_nested(ms.iter().map(|m| m.iter().map(|r| r.to_vec()).collect()).collect())
            .unwrap()
    }

    #[test]
    fn minimal_json() {
        let s: MatrixSet<f64> = load(br#"{"dim":2,"matrices":[[[0,1],[1,0]]]}"#, Format::Json).unwrap();
        assert_eq!((s.dim(), s.len()), (2, 1));
        assert_eq!(s.matrices()[0][(0, 1)], 1.0);
    }

    #[test]
    fn negative_entry_is_located() {
        let e = load::<f64>(br#"{"dim":2,"matrices":[[[0,-1],[1,0]]]}"#, Format::Json).unwrap_err();
        assert_eq!(e, Error::NegativeEntry { matrix: 0, row: 0, col: 1 });
    }

    #[test]
    fn too_many_rows_is_shape_mismatch() {
        let e = load::<f64>(br#"{"dim":2,"matrices":[[[0,1],[1,0],[1,1]]]}"#, Format::Json).unwrap_err();
        assert!(matches!(e, Error::ShapeMismatch(_)), "{e:?}");
    }

    #[test]
    fn ragged_row_and_empty_set() {
        let e = load::<f64>(br#"{"dim":2,"matrices":[[[0,1],[1]]]}"#, Format::Json).unwrap_err();
        assert!(matches!(e, Error::ShapeMismatch(_)));
        let e = load::<f64>(br#"{"dim":2,"matrices":[]}"#, Format::Json).unwrap_err();
        assert_eq!(e, Error::EmptySet);
        let e = load::<f64>(b"{not json", Format::Json).unwrap_err();
        assert!(matches!(e, Error::Parse(_)));
    }

    #[test]
    fn non_finite_after_narrowing() {
        let e = load::<f32>(br#"{"dim":1,"matrices":[[[1e300]]]}"#, Format::Json).unwrap_err();
        assert_eq!(e, Error::NonFiniteEntry { matrix: 0, row: 0, col: 0 });
    }

    #[test]
    fn csv_with_exponents_and_blank_lines() {
        let text = "2 2\n0,1e0\n1,0\n\n2.5E-1, 0\n0,3\n";
        let s: MatrixSet<f64> = load(text.as_bytes(), Format::Csv).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.matrices()[1][(0, 0)], 0.25);
        assert!(load::<f64>(b"2 1\n0,1\n", Format::Csv).is_err());
        assert!(load::<f64>(b"2 1\n0,1\n1,0\n1,1\n", Format::Csv).is_err());
        assert_eq!(load::<f64>(b"2 0\n", Format::Csv).unwrap_err(), Error::EmptySet);
    }

    #[test]
    fn stats() {
        let st = entry_stats(&set(&[&[&[0.0, 1.0], &[1.0, 0.0]]])).unwrap();
        assert_eq!((st.max_positive, st.min_positive, st.dim), (1.0, 1.0, 2));
        let st = entry_stats(&set(&[&[&[0.0, 2.0], &[0.5, 0.0]]])).unwrap();
        assert_eq!((st.max_positive, st.min_positive), (2.0, 0.5));
        assert!(entry_stats(&set(&[&[&[0.0, 0.0], &[0.0, 0.0]]])).is_none());
    }

    #[test]
    fn scaling() {
        let id = set(&[&[&[1.0, 0.0], &[0.0, 1.0]]]);
        assert_eq!(scale(&id, 3.0).unwrap().matrices()[0].as_slice(), &[3.0, 0.0, 0.0, 3.0]);
        let s = set(&[&[&[0.3, 0.7], &[0.0, 1.1]]]);
        assert_eq!(scale(&s, 1.0).unwrap(), s);
        let back = scale(&scale(&s, 2.0).unwrap(), 0.5).unwrap();
        assert_eq!(back, s);
        assert!(scale(&s, 0.0).is_err());
        assert!(scale(&s, -1.0).is_err());
        assert!(scale(&s, f64::INFINITY).is_err());
    }

    #[test]
    fn random_degenerate_range() {
        let s: MatrixSet<f64> = random_set(2, 1, 1.0, (1.0, 1.0), 0).unwrap();
        assert_eq!(s.matrices()[0].as_slice(), &[1.0; 4]);
    }

    #[test]
    fn random_is_deterministic() {
        let a: MatrixSet<f64> = random_set(3, 2, 0.5, (0.1, 2.0), 42).unwrap();
        let b: MatrixSet<f64> = random_set(3, 2, 0.5, (0.1, 2.0), 42).unwrap();
        assert_eq!(a, b);
        assert!(random_set::<f64>(3, 2, 0.0, (0.1, 2.0), 1).is_err());
        assert!(random_set::<f64>(3, 2, 0.5, (0.0, 2.0), 1).is_err());
        assert!(random_set::<f64>(3, 2, 0.5, (3.0, 2.0), 1).is_err());
        assert!(random_set::<f64>(0, 2, 0.5, (1.0, 2.0), 1).is_err());
    }

    proptest! {
        #[test]
        fn json_and_csv_round_trip(seed in any::<u64>(), d in 1usize..5, m in 1usize..4, dens in 0.1f64..1.0) {
            let s: MatrixSet<f64> = random_set(d, m, dens, (1e-3, 50.0), seed).unwrap();
            let j: MatrixSet<f64> = load(s.to_json().as_bytes(), Format::Json).unwrap();
            prop_assert_eq!(&j, &s);
            let c: MatrixSet<f64> = load(s.to_csv().as_bytes(), Format::Csv).unwrap();
            prop_assert_eq!(&c, &s);
        }

        #[test]
        fn stats_scale_linearly(seed in any::<u64>(), c in 0.01f64..100.0) {
            let s: MatrixSet<f64> = random_set(3, 2, 0.6, (0.5, 4.0), seed).unwrap();
            let a = entry_stats(&s).unwrap();
            let b = entry_stats(&scale(&s, c).unwrap()).unwrap();
            prop_assert_eq!(b.max_positive, a.max_positive * c);
            prop_assert_eq!(b.min_positive, a.min_positive * c);
            prop_assert_eq!(b.dim, a.dim);
        }
    }
}

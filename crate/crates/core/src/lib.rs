//! Certified bounds on the joint spectral radius of a finite set of
//! nonnegative matrices.
//!
//! The pipeline is: load a [`MatrixSet`], build its dependency graph and
//! condensation ([`graph`]), enumerate maximal products up to a horizon
//! ([`products`]), and read lower and upper bounds off the resulting table
//! ([`bounds`]). [`oracle`] holds unpruned reference computations and
//! [`theory`] the sequence-level checks (supermultiplicativity, bounded
//! ratios, trace limits, growth fits).
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the command-line
//! tool uses.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod graph;
pub mod matrix;
pub mod matset;
pub mod oracle;
mod perron;
pub mod products;
pub mod scalar;
pub mod theory;

pub use bounds::{best_bracket, BoundsReport, LengthBounds};
pub use error::{Error, Result};
pub use graph::{Condensation, DependencyGraph, Distance, PeriodInfo};
pub use matrix::SquareMatrix;
pub use matset::{EntryStats, Format, MatrixSet};
pub use oracle::{OracleEstimate, SpectralRadius};
pub use products::{Frontier, NormTable, ScaledProduct};
pub use scalar::Scalar;
pub use theory::{SequenceDiagnosis, TraceReport};

pub type MatrixSet64 = MatrixSet<f64>;
pub type Matrix64 = SquareMatrix<f64>;
pub type NormTable64 = NormTable<f64>;
pub type BoundsReport64 = BoundsReport<f64>;
pub type TraceReport64 = TraceReport<f64>;
pub type SequenceDiagnosis64 = SequenceDiagnosis<f64>;

pub type MatrixSet32 = MatrixSet<f32>;
pub type NormTable32 = NormTable<f32>;
pub type BoundsReport32 = BoundsReport<f32>;

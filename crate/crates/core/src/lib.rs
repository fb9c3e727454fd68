//! Colored Gaussian graphical models: CER classification, Block-Cholesky
//! spaces, Jordan frames and closed-form normalizing constants.
//!
//! Numeric types are generic over [`Scalar`] (`f64`, `f32`); graph
//! combinatorics and intersection numbers are exact.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayes;
pub mod catalog;
pub mod cer;
pub mod color_space;
pub mod colored_graph;
pub mod constants;
pub mod error;
pub mod frames;
pub mod linalg;
pub mod model;
pub mod normalizer;
pub mod oracle;
pub mod scalar;

pub use bayes::{DYPrior, ModelEntry, ScoreRow, SufficientStats};
pub use cer::{classify, CerVerdict, ColorOrdering, TwoPathTable};
pub use color_space::{BlockStructure, ColorSpace, SpaceSpec, Support};
pub use colored_graph::{
    ColoredGraph, Edge, GraphSpec, PermGroupGenerators, Permutation, RcopSpec,
};
pub use constants::{DeterminantFactors, HSpaceBasis, StructureConstants};
pub use error::{Error, Result};
pub use frames::{DiagonalBlockAlgebra, IntersectionData, JordanFrame};
pub use model::{BcModel, ModelOptions};
pub use normalizer::{CholeskyCoordinates, NormalizerResult, SrgParameters};
pub use oracle::{Comparison, McEstimate};
pub use scalar::Scalar;

pub type ColorSpace64 = ColorSpace<f64>;
pub type ColorSpace32 = ColorSpace<f32>;
pub type BcModel64 = BcModel<f64>;
pub type BcModel32 = BcModel<f32>;
pub type JordanFrame64 = JordanFrame<f64>;
pub type NormalizerResult64 = NormalizerResult<f64>;
pub type DYPrior64 = DYPrior<f64>;
pub type SufficientStats64 = SufficientStats<f64>;

//! Hierarchical B-spline de Rham spaces in 2D with multi-level tree-cotree gauging.

pub mod assembly;
pub mod bspline;
pub mod config;
pub mod eigen;
pub mod error;
pub mod gauging;
pub mod gradient;
pub mod greville;
pub mod hierarchy;
pub mod pipeline;
pub mod quadrature;
pub mod report;
pub mod sparse;
pub mod tensor;

pub use error::{Error, Result};

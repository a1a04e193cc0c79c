//! Spectral graph clustering with eigengap-dilating transforms.
//!
//! The bottom eigenvectors of a graph Laplacian `L` are recovered by running a
//! top-k eigensolver on `λ* I − f(L)`, where `f` is a monotone transform that
//! stretches the small end of the spectrum. Laplacian powers can be estimated
//! from random walks on the edge incidence graph.

pub mod bench;
pub mod error;
pub mod generators;
pub mod graph;
pub mod metrics;
pub mod rng;
pub mod solvers;
pub mod transforms;
pub mod walk;

pub use error::{Error, Result};

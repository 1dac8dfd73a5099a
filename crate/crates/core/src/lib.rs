//! Multidimensional scaling on metric measure spaces.
//!
//! - [`spaces`]: finite and analytic metric measure spaces, sampling.
//! - [`mds`]: the finite MDS pipeline and its Krein-space decomposition.
//! - [`sphere`]: kernel spectra on spheres and the snowflake identity.
//! - [`stability`]: couplings, Gromov-Kantorovich upper bounds, Procrustes
//!   alignment and convergence experiments.
//! - [`products`]: spectra and embeddings of product spaces and flat tori.
//! - [`table`]: deterministic CSV persistence.

pub mod error;
pub mod mds;
pub mod products;
pub mod quadrature;
pub mod spaces;
pub mod sphere;
pub mod stability;
pub mod table;

pub use error::{Error, Result};
pub use mds::{classical_mds, double_center, eigendecompose, strain, CenteredOperator, EmbeddingResult, KreinPoint};
pub use spaces::{sample, AnalyticSpace, FiniteSpace, SampleMode, SampleSpec};

//! Reconstruction of block-sparse smooth signals from compressed, noisy
//! measurements.
//!
//! Two penalized least-squares formulations are solved with ADMM:
//!
//! * **SGF-LASSO** (sparse group fused LASSO): element-wise ℓ₁, disjoint
//!   group ℓ₂ and fusion (first-difference ℓ₁) penalties.
//! * **LGF-LASSO** (latent group fused LASSO): overlapping group ℓ₂ and
//!   fusion penalties.
//!
//! The crate is organised as
//!
//! * [`model`]: signals, the difference operator, group structures,
//!   objectives and the MSE metric;
//! * [`prox`]: closed-form shrinkage operators;
//! * [`sensing`]: measurement matrices, synthetic test signals and noisy
//!   measurements;
//! * [`solvers`]: the two ADMM state machines and the classical LASSO
//!   variants expressed as penalty configurations;
//! * [`bench`]: configuration loading, the reconstruction and MSE sweep
//!   experiments, CSV and SVG output.

pub mod bench;
pub mod error;
pub mod model;
pub mod prox;
pub mod sensing;
pub mod solvers;

pub use error::{Error, Result};

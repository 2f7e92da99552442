//! Sparse binary random projections that preserve Euclidean distances.
//!
//! Two centered binary ensembles are provided: i.i.d. Bernoulli(`p`) entries
//! and rows with exactly `c` ones. Both subtract an implicit multiple of the
//! all-ones matrix so that `E‖η‖² = ‖x‖²`. Alongside them live the Gaussian,
//! Achlioptas, Ping and Bourgain baselines, closed-form moments for every
//! model, tail bounds with the projection dimensions they imply, and the
//! evaluation kernels behind the `sbproj` benchmark CLI.

pub mod bounds;
pub mod data;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod genmat;
pub mod moments;
pub mod norms;
pub mod projector;
pub mod rng;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use norms::{center_fixed, fixed_q, norm_profile, CenteredVector, NormProfile};
pub use projector::{Matrix, ModelFamily, ModelKind, ProjectionModel, Projector};

//! Pair-correlation statistics for dependent random sequences on the unit torus.
//!
//! The crate generates point sequences on `[0, 1)` (i.i.d. uniforms, jittered
//! samples in batch and sequential form, random walks with a configurable step
//! law, Kronecker sequences), evaluates the pair-correlation statistic
//! `R_alpha(s, N)` and the extreme discrepancy `D_N`, computes Fourier
//! coefficients and n-fold convolution profiles of step laws, and runs seeded
//! Monte Carlo experiments over all of these.
//!
//! Everything is deterministic in `(master_seed, stream_index)`. With the
//! default `parallel` feature, replicates and pair counting run on rayon; the
//! results are bit-identical to the sequential build.

pub mod cli;
pub mod discrepancy;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod paircorr;
pub mod par;
pub mod spectral;
pub mod torus;

pub use error::{Error, Result};
pub use generators::{GeneratorKind, GeneratorSpec, SeedSpec, StepDistribution};
pub use paircorr::{PairCorrParams, PairCorrResult};
pub use torus::{PointSet, TorusPoint};

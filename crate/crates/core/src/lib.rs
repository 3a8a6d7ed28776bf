//! Shrinking target sets for beta-transformations and integer matrix
//! endomorphisms of tori.
//!
//! The crate covers four layers:
//!
//! * [`beta`] and [`symbolic`]: β-expansions, admissible words, cylinders
//!   and full cylinders.
//! * [`targets`] and [`covering`]: target families, hit detection and the
//!   explicit covers and ball constructions behind the dimension bounds.
//! * [`dimension`] and [`matrix_torus`]: closed-form Hausdorff dimension
//!   evaluators, decay-rate summaries, and conjugation of integer matrices
//!   to diagonal form.
//! * [`estimator`]: Monte-Carlo measures and box-counting estimates that
//!   cross-check the closed forms at finite depth.

pub mod beta;
pub mod covering;
pub mod dimension;
pub mod estimator;
pub mod extreal;
pub mod matrix_torus;
pub mod symbolic;
pub mod targets;

mod error;

pub use beta::{BetaSystem, Expansion, Word};
pub use error::{Error, Result};
pub use symbolic::CylinderInterval;
pub use targets::{DiagonalSystem, LipschitzFamily, PsiSpec, ScalarMap, TorusPoint};

//! Constructive shallow ReLU approximation of functions with bounded mixed
//! derivatives on [-1, 1]^d, and classification with η-norm losses over the
//! resulting hypothesis spaces.
//!
//! The pipeline runs bottom-up: [`korobov`] supplies test functions and their
//! norms, [`fourier`] analyses their periodic extensions and smooths them with
//! a Jackson-type operator, and [`shallow`] turns the smoothed trigonometric
//! polynomial into a width-m network. [`classification`], [`distributions`]
//! and [`risk`] cover the learning side.

pub mod classification;
pub mod distributions;
pub mod error;
pub mod fourier;
pub mod korobov;
pub mod numerics;
pub mod risk;
pub mod shallow;

pub use classification::{erm_train, ErmResult, LossSpec, Sample, TrainBudget};
pub use distributions::{Distribution, Family};
pub use error::{Error, Result};
pub use fourier::{FourierCoefficients, JacksonSpec};
pub use korobov::{KorobovFunction, PeriodicFunction, TestFamily};
pub use numerics::{Estimate, QuadratureSpec};
pub use shallow::{HypothesisConstraints, ShallowNet};

//! Network calculus for feedforward and residual networks, and the
//! construction that materializes Monte Carlo Euler-Maruyama estimators for
//! Kolmogorov equations with constant diffusion as a single residual network.
//!
//! The crate is organized around immutable value types: networks are plain
//! parameter containers, every operation returns a fresh value, and all
//! randomness flows through keyed counter streams, so everything here is safe
//! to share across threads and reproducible from a seed.

pub mod activation;
pub mod bounds;
pub mod brownian;
pub mod builder;
pub mod error;
pub mod fnn;
pub mod grid;
pub mod linalg;
pub mod oracle;
pub mod problem;
pub mod resnet;
pub mod rng;
pub mod suite;

pub use activation::Activation;
pub use brownian::BrownianPath;
pub use error::{Error, Result};
pub use fnn::{Fnn, Layer};
pub use grid::TimeGrid;
pub use linalg::Matrix;
pub use resnet::{ResBlock, ResNet};
pub use rng::CounterRng;

//! Scalar activation functions, applied componentwise during realization.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A scalar activation function. `Custom` accepts any continuous scalar map;
/// the built-in kinds cover the common choices.
#[derive(Clone)]
pub enum Activation {
    Identity,
    Relu,
    Tanh,
    Swish,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Activation {
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Activation::Identity => x,
            Activation::Relu => x.max(0.0),
            Activation::Tanh => x.tanh(),
            Activation::Swish => x / (1.0 + (-x).exp()),
            Activation::Custom(f) => f(x),
        }
    }

    /// Applies the activation to every component in place.
    pub fn apply_slice(&self, v: &mut [f64]) {
        for x in v.iter_mut() {
            *x = self.apply(*x);
        }
    }

    /// Parses one of the built-in names: identity | relu | tanh | swish.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "identity" => Ok(Activation::Identity),
            "relu" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            "swish" => Ok(Activation::Swish),
            other => Err(Error::InvalidArgument(format!(
                "unknown activation '{other}' (expected identity|relu|tanh|swish)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Activation::Identity => "identity",
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
            Activation::Swish => "swish",
            Activation::Custom(_) => "custom",
        }
    }
}

impl fmt::Debug for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Squeezing of one two-mode squeezed pair, kept in all three equivalent
/// parametrizations: `lambda = tanh r` and `n_bar = sinh² r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeSpec {
    r: f64,
    lambda: f64,
    n_bar: f64,
}

impl SqueezeSpec {
    pub fn from_r(r: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "squeezing parameter r must be finite and >= 0, got {r}"
            )));
        }
        let lambda = r.tanh();
        if lambda >= 1.0 {
            return Err(Error::InvalidLambda(lambda));
        }
        Ok(SqueezeSpec {
            r,
            lambda,
            n_bar: r.sinh().powi(2),
        })
    }

    pub fn from_lambda(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && (0.0..1.0).contains(&lambda)) {
            return Err(Error::InvalidLambda(lambda));
        }
        let l2 = lambda * lambda;
        Ok(SqueezeSpec {
            r: lambda.atanh(),
            lambda,
            n_bar: l2 / (1.0 - l2),
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Mean photon number of a single mode.
    pub fn n_bar(&self) -> f64 {
        self.n_bar
    }

    pub fn cosh2(&self) -> f64 {
        1.0 + self.n_bar
    }

    pub fn sinh2(&self) -> f64 {
        self.n_bar
    }
}

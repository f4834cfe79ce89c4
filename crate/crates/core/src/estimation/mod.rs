//! ARIMA estimation.
//!
//! Sign conventions follow Box-Jenkins: the model for the d-times
//! differenced series `W_t` is
//!
//! ```text
//! W_t = c + φ_1 W_{t−1} + … + φ_p W_{t−p} + a_t − θ_1 a_{t−1} − … − θ_q a_{t−q}
//! ```
//!
//! so `φ(B) = 1 − Σ φ_j B^j` and `θ(B) = 1 − Σ θ_j B^j`.

mod filter;
mod fit;
mod ols;
pub mod roots;
pub mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

pub use filter::{filter_residuals, pi_weights, sigma2_hat, FilteredResiduals};
pub use fit::{fit_ar_ols, fit_arima, fit_arma_css, yule_walker};
pub use ols::{ols, OlsResult, RANK_TOLERANCE};

/// Largest supported differencing order.
pub const MAX_D: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaOrder {
    pub fn new(p: usize, d: usize, q: usize) -> Self {
        Self { p, d, q }
    }

    /// Orders accepted by the fitting routines.
    pub fn validate(&self) -> Result<()> {
        if self.p + self.q == 0 {
            return Err(Error::Config("ARIMA order needs p + q ≥ 1".into()));
        }
        if self.d > MAX_D {
            return Err(Error::Config(format!(
                "differencing order d = {} is above the supported maximum {MAX_D}",
                self.d
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for ArimaOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ARIMA({},{},{})", self.p, self.d, self.q)
    }
}

/// Parameter set of an ARIMA model, without any fit statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaModel {
    pub order: ArimaOrder,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    /// Constant `c` of the differenced-scale equation; `None` when suppressed.
    pub intercept: Option<f64>,
}

impl ArimaModel {
    pub fn new(order: ArimaOrder, phi: Vec<f64>, theta: Vec<f64>, intercept: Option<f64>) -> Result<Self> {
        if phi.len() != order.p {
            return Err(Error::Arity { expected: order.p, got: phi.len() });
        }
        if theta.len() != order.q {
            return Err(Error::Arity { expected: order.q, got: theta.len() });
        }
        if phi.iter().chain(&theta).chain(intercept.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Domain("model parameters must be finite".into()));
        }
        Ok(Self { order, phi, theta, intercept })
    }

    /// Process mean of the differenced series, `c / (1 − Σφ)`.
    pub fn process_mean(&self) -> Result<f64> {
        let Some(c) = self.intercept else {
            return Ok(0.0);
        };
        let denom = 1.0 - self.phi.iter().sum::<f64>();
        if denom.abs() < 1e-12 {
            return Err(Error::Degenerate("AR polynomial has a unit root; the implied mean is undefined".into()));
        }
        Ok(c / denom)
    }

    pub fn is_stationary(&self) -> bool {
        roots::roots_outside_unit_circle(&self.phi)
    }

    pub fn is_invertible(&self) -> bool {
        roots::roots_outside_unit_circle(&self.theta)
    }

    pub fn warnings(&self) -> Vec<FitWarning> {
        let mut out = Vec::new();
        if !self.is_stationary() {
            out.push(FitWarning::NonStationary);
        }
        if !self.is_invertible() {
            out.push(FitWarning::NonInvertible);
        }
        out
    }

    /// Number of estimated coefficients, intercept included.
    pub fn n_params(&self) -> usize {
        self.order.p + self.order.q + usize::from(self.intercept.is_some())
    }
}

/// Boundary conditions found on a fitted model; reported, never fatal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitWarning {
    NonStationary,
    NonInvertible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimationMethod {
    Ols,
    ConditionalSumOfSquares,
}

/// A fitted ARIMA model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaFit {
    pub model: ArimaModel,
    pub method: EstimationMethod,
    /// Innovation variance `Σ ê² / n_eff`.
    pub sigma2: f64,
    /// Innovations `ê_t` over the effective sample, labelled on the
    /// original time axis.
    pub residuals: TimeSeries,
    /// Standard errors in the order φ, θ, intercept.
    pub coefficient_std_errors: Vec<f64>,
    pub sse: f64,
    /// `sse / (n_eff − n_params)`.
    pub mse: f64,
    pub warnings: Vec<FitWarning>,
}

impl ArimaFit {
    pub fn order(&self) -> ArimaOrder {
        self.model.order
    }

    pub fn phi(&self) -> &[f64] {
        &self.model.phi
    }

    pub fn theta(&self) -> &[f64] {
        &self.model.theta
    }

    pub fn intercept(&self) -> f64 {
        self.model.intercept.unwrap_or(0.0)
    }
}

/// π-weights `π_1..π_m` of `π(B) = φ(B)(1 − B)^d / θ(B) = 1 − Σ π_j B^j`.
/// `π_0 = 1` is implicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiWeights {
    weights: Vec<f64>,
}

impl PiWeights {
    pub fn new(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    /// π_j for j ≥ 1; zero past the truncation point.
    pub fn get(&self, j: usize) -> f64 {
        debug_assert!(j >= 1);
        self.weights.get(j - 1).copied().unwrap_or(0.0)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Truncation point m.
    pub fn truncation(&self) -> usize {
        self.weights.len()
    }
}

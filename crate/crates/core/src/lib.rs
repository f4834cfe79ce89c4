//! ARIMA modeling with iterative additive-outlier (AO) detection.
//!
//! The crate is organised around the usual Box-Jenkins workflow:
//!
//! - [`series`]: the [`TimeSeries`] container, differencing, Box-Cox and
//!   the ACF/PACF identification statistics.
//! - [`estimation`]: least squares, AR fits by OLS, ARMA fits by conditional
//!   sum of squares, π-weights and residual filtering.
//! - [`outlier`]: the AO magnitude estimator, its test statistic, the
//!   iterative detect/adjust loop, joint indicator regression and series
//!   correction.
//! - [`diagnostics`]: Ljung-Box, Kolmogorov-Smirnov, boxplot fences and the
//!   MSE comparison table.
//! - [`simgen`]: seeded ARMA simulation, AO injection and the bundled demo
//!   dataset.

pub mod diagnostics;
pub mod error;
pub mod estimation;
pub mod outlier;
pub mod series;
pub mod simgen;

pub use error::{Error, Result};
pub use estimation::{ArimaFit, ArimaOrder, OlsResult, PiWeights};
pub use outlier::{DetectionConfig, DetectionResult, OutlierRecord};
pub use series::TimeSeries;

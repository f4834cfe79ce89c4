//! Residual diagnostics: Ljung-Box, Kolmogorov-Smirnov normality, boxplot
//! fences and the MSE comparison table.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::estimation::{ArimaFit, OlsResult};
use crate::outlier::FinalModel;
use crate::series::{acf, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestName {
    LjungBox,
    KsNormal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub name: TestName,
    pub statistic: f64,
    pub p_value: f64,
    /// Degrees of freedom (Ljung-Box) or sample size (KS).
    pub df_or_n: usize,
    /// Lag h for Ljung-Box.
    pub lag: Option<usize>,
    /// The p-value ignores that parameters were estimated from the sample.
    pub approximate: bool,
}

/// Upper-tail probability of the χ² distribution.
pub fn chi_square_sf(x: f64, df: usize) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("χ² argument must be non-negative, got {x}")));
    }
    if df == 0 {
        return Err(Error::Domain("χ² needs at least one degree of freedom".into()));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(dist.sf(x).clamp(0.0, 1.0))
}

/// Ljung-Box `Q(h) = n(n+2) Σ_{k=1}^{h} ρ̂_k² / (n − k)` for each `h` in
/// `lags`, referred to χ² with `h − fitted_params` degrees of freedom.
pub fn ljung_box(residuals: &TimeSeries, lags: &[usize], fitted_params: usize) -> Result<Vec<TestResult>> {
    let n = residuals.len();
    let Some(&max_lag) = lags.iter().max() else {
        return Ok(Vec::new());
    };
    for &h in lags {
        if h <= fitted_params {
            return Err(Error::Domain(format!("Ljung-Box lag {h} must exceed the {fitted_params} fitted parameters")));
        }
        if h >= n {
            return Err(Error::Length(format!("Ljung-Box lag {h} needs more than {h} residuals, got {n}")));
        }
    }
    let rho = acf(residuals, max_lag)?;
    let nf = n as f64;
    let mut partial = Vec::with_capacity(max_lag + 1);
    partial.push(0.0);
    for k in 1..=max_lag {
        partial.push(partial[k - 1] + rho[k] * rho[k] / (nf - k as f64));
    }
    lags.iter()
        .map(|&h| {
            let q = nf * (nf + 2.0) * partial[h];
            let df = h - fitted_params;
            Ok(TestResult {
                name: TestName::LjungBox,
                statistic: q,
                p_value: chi_square_sf(q, df)?,
                df_or_n: df,
                lag: Some(h),
                approximate: false,
            })
        })
        .collect()
}

/// Asymptotic Kolmogorov tail `P(K > λ)`.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-theta form converges fast for small λ.
        let s: f64 = (1..=20)
            .map(|k| {
                let m = (2 * k - 1) as f64;
                (-(m * m) * std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda)).exp()
            })
            .sum();
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * s;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|k| {
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (k * k) as f64 * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

/// Kolmogorov-Smirnov test of normality with mean and standard deviation
/// estimated from the sample.
///
/// The p-value uses the asymptotic Kolmogorov distribution at
/// `(√n + 0.12 + 0.11/√n)·D`; it is marked approximate because estimating the
/// parameters makes the true null distribution tighter.
pub fn ks_normal(residuals: &TimeSeries) -> Result<TestResult> {
    let n = residuals.len();
    if n < 2 {
        return Err(Error::Degenerate("standard deviation undefined for fewer than 2 values".into()));
    }
    if n < 8 {
        return Err(Error::Length(format!("KS normality test needs n ≥ 8, got {n}")));
    }
    let mean = residuals.mean();
    let var = residuals.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var <= 0.0 {
        return Err(Error::Degenerate("residuals have zero variance".into()));
    }
    let sd = var.sqrt();
    let std_normal = Normal::standard();
    let mut sorted = residuals.values().to_vec();
    sorted.sort_by(f64::total_cmp);
    let nf = n as f64;
    let d = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = std_normal.cdf((x - mean) / sd);
            let above = (i + 1) as f64 / nf - f;
            let below = f - i as f64 / nf;
            above.max(below)
        })
        .fold(0.0f64, f64::max);
    let root = nf.sqrt();
    Ok(TestResult {
        name: TestName::KsNormal,
        statistic: d,
        p_value: kolmogorov_sf((root + 0.12 + 0.11 / root) * d),
        df_or_n: n,
        lag: None,
        approximate: true,
    })
}

/// Quantile by linear interpolation between order statistics
/// (`h = (n − 1)q`, the default of most statistics packages).
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Tukey fences `[Q1 − 1.5·IQR, Q3 + 1.5·IQR]`.
pub fn fences(values: &[f64]) -> Option<(f64, f64)> {
    if values.len() < 4 {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    Some((q1 - 1.5 * iqr, q3 + 1.5 * iqr))
}

/// Labels of values outside the Tukey fences; empty for fewer than 4 values.
pub fn boxplot_fences(values: &TimeSeries) -> Vec<i64> {
    let Some((lo, hi)) = fences(values.values()) else {
        return Vec::new();
    };
    values.iter().filter(|&(_, v)| v < lo || v > hi).map(|(t, _)| t).collect()
}

/// Anything with a regression MSE.
pub trait HasMse {
    fn mse(&self) -> f64;
}

impl HasMse for OlsResult {
    fn mse(&self) -> f64 {
        self.mse
    }
}

impl HasMse for ArimaFit {
    fn mse(&self) -> f64 {
        self.mse
    }
}

impl HasMse for FinalModel {
    fn mse(&self) -> f64 {
        FinalModel::mse(self)
    }
}

impl HasMse for f64 {
    fn mse(&self) -> f64 {
        *self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model_label: String,
    pub mse: f64,
    pub omega_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    /// `100 · (first_mse − last_mse) / first_mse`.
    pub improvement_pct: f64,
}

/// Build the model comparison table, rows in the given order.
pub fn comparison_table<'a, M, I>(rows: I) -> Result<ComparisonTable>
where
    M: HasMse + ?Sized + 'a,
    I: IntoIterator<Item = (String, &'a M, Vec<f64>)>,
{
    let rows: Vec<ComparisonRow> = rows
        .into_iter()
        .map(|(model_label, fit, omega_values)| ComparisonRow { model_label, mse: fit.mse(), omega_values })
        .collect();
    let (Some(first), Some(last)) = (rows.first(), rows.last()) else {
        return Err(Error::Length("comparison table needs at least one row".into()));
    };
    let improvement_pct = 100.0 * (first.mse - last.mse) / first.mse;
    Ok(ComparisonTable { rows, improvement_pct })
}

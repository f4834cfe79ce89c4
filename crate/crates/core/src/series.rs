//! Time-series container, stationarity transforms and identification statistics.
//!
//! Sample autocorrelations use the biased estimator: every lag shares the
//! single denominator `Σ (Z_t − Z̄)²`, which is the form the Ljung-Box
//! statistic assumes and which keeps the autocorrelation sequence positive
//! semi-definite.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default λ grid for [`select_box_cox`].
pub const DEFAULT_BOX_COX_GRID: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

/// Ordered, finite, real-valued observations labelled by consecutive integers.
///
/// Observation `i` (zero-based) carries the label `start + i`. Labels are what
/// the rest of the crate calls "time index" (`t`, `T`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    start: i64,
}

impl TimeSeries {
    /// Series starting at label 1.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_start(values, 1)
    }

    pub fn with_start(values: Vec<f64>, start: i64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Length("a time series needs at least one observation".into()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value {} at index {}", values[pos], start + pos as i64)));
        }
        Ok(Self { values, start })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Label of the first observation.
    pub fn start(&self) -> i64 {
        self.start
    }

    /// Label of the last observation.
    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn label(&self, pos: usize) -> i64 {
        self.start + pos as i64
    }

    /// Zero-based position of `label`, or an index error.
    pub fn position(&self, label: i64) -> Result<usize> {
        if label < self.start || label > self.end() {
            return Err(Error::Index { index: label, first: self.start, last: self.end() });
        }
        Ok((label - self.start) as usize)
    }

    pub fn get(&self, label: i64) -> Option<f64> {
        self.position(label).ok().map(|p| self.values[p])
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, &v)| (self.start + i as i64, v))
    }

    /// Same labels, new values. The caller guarantees equal length.
    pub(crate) fn map_values(&self, values: Vec<f64>) -> Result<Self> {
        debug_assert_eq!(values.len(), self.values.len());
        Self::with_start(values, self.start)
    }
}

/// Box-Cox power parameter λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxCoxParam(pub f64);

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// d-th order difference. The result starts `d` labels later.
pub fn difference(series: &TimeSeries, d: usize) -> Result<TimeSeries> {
    if series.len() <= d {
        return Err(Error::Length(format!("cannot difference {} observations {} times", series.len(), d)));
    }
    let mut values = series.values().to_vec();
    for _ in 0..d {
        values = values.windows(2).map(|w| w[1] - w[0]).collect();
    }
    TimeSeries::with_start(values, series.start() + d as i64)
}

/// Inverse of [`difference`].
///
/// `initial` holds the first `d` observations of the undifferenced series.
/// The result has `diffed.len() + d` observations and starts `d` labels
/// before `diffed`.
pub fn integrate(diffed: &TimeSeries, initial: &[f64], d: usize) -> Result<TimeSeries> {
    if initial.len() != d {
        return Err(Error::Arity { expected: d, got: initial.len() });
    }
    if d == 0 {
        return Ok(diffed.clone());
    }
    // Level k of the difference pyramid starts with the k-th difference of
    // `initial` evaluated at its last point.
    let mut seeds = Vec::with_capacity(d);
    let mut level = initial.to_vec();
    for _ in 0..d {
        seeds.push(*level.last().expect("non-empty level"));
        level = level.windows(2).map(|w| w[1] - w[0]).collect();
    }

    // Every level is rebuilt for the labels after the initial block only.
    let mut values = diffed.values().to_vec();
    for &seed in seeds.iter().rev() {
        let mut acc = seed;
        for v in values.iter_mut() {
            acc += *v;
            *v = acc;
        }
    }
    let mut full = initial.to_vec();
    full.extend(values);
    TimeSeries::with_start(full, diffed.start() - d as i64)
}

/// Box-Cox transform; `λ = 0` is the natural log.
pub fn box_cox(series: &TimeSeries, param: BoxCoxParam) -> Result<TimeSeries> {
    let lambda = param.0;
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("Box-Cox λ must be finite, got {lambda}")));
    }
    if let Some((t, v)) = series.iter().find(|&(_, v)| v <= 0.0) {
        return Err(Error::Domain(format!("Box-Cox needs strictly positive values; got {v} at index {t}")));
    }
    let values = series
        .values()
        .iter()
        .map(|&z| if lambda == 0.0 { z.ln() } else { (lambda * z.ln()).exp_m1() / lambda })
        .collect();
    series.map_values(values)
}

/// Pick λ from `grid` minimising the sum of squares of the transformed
/// series about its own mean. Returns `(λ, sse)`; ties keep the first λ.
pub fn select_box_cox(series: &TimeSeries, grid: &[f64]) -> Result<(BoxCoxParam, f64)> {
    let mut best: Option<(BoxCoxParam, f64)> = None;
    for &lambda in grid {
        let transformed = box_cox(series, BoxCoxParam(lambda))?;
        let m = transformed.mean();
        let sse: f64 = transformed.values().iter().map(|v| (v - m).powi(2)).sum();
        if best.is_none_or(|(_, s)| sse < s) {
            best = Some((BoxCoxParam(lambda), sse));
        }
    }
    best.ok_or_else(|| Error::Config("empty Box-Cox λ grid".into()))
}

/// Sample autocorrelations `ρ̂_0..=ρ̂_max_lag`.
pub fn acf(series: &TimeSeries, max_lag: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if max_lag >= n {
        return Err(Error::Length(format!("max_lag {max_lag} must be below n = {n}")));
    }
    let m = series.mean();
    let dev: Vec<f64> = series.values().iter().map(|v| v - m).collect();
    let denom: f64 = dev.iter().map(|v| v * v).sum();
    if denom <= 0.0 {
        return Err(Error::Degenerate("series has zero variance".into()));
    }
    Ok((0..=max_lag)
        .map(|k| if k == 0 { 1.0 } else { dev.iter().zip(&dev[k..]).map(|(a, b)| a * b).sum::<f64>() / denom })
        .collect())
}

/// Output of the Durbin-Levinson recursion.
#[derive(Debug, Clone)]
pub(crate) struct Levinson {
    /// Order-p AR coefficients φ_{p1}..φ_{pp}.
    pub coefficients: Vec<f64>,
    /// φ_{kk} for k = 1..=p.
    pub partials: Vec<f64>,
}

/// Solve the Yule-Walker system of order `order` from `rho[0..=order]`.
pub(crate) fn durbin_levinson(rho: &[f64], order: usize) -> Result<Levinson> {
    debug_assert!(rho.len() > order);
    let mut phi: Vec<f64> = Vec::with_capacity(order);
    let mut partials = Vec::with_capacity(order);
    // Normalised one-step prediction error variance.
    let mut v = rho[0];
    for k in 1..=order {
        if v <= 1e-12 {
            return Err(Error::Singular(format!(
                "Toeplitz system is singular at order {k} (prediction variance {v:e})"
            )));
        }
        let num = rho[k] - phi.iter().enumerate().map(|(j, p)| p * rho[k - 1 - j]).sum::<f64>();
        let kk = num / v;
        let prev = phi.clone();
        for j in 0..k - 1 {
            phi[j] = prev[j] - kk * prev[k - 2 - j];
        }
        phi.push(kk);
        partials.push(kk);
        v *= 1.0 - kk * kk;
    }
    Ok(Levinson { coefficients: phi, partials })
}

/// Sample partial autocorrelations; entry 0 is 1 and entry k is φ_{kk}.
pub fn pacf(series: &TimeSeries, max_lag: usize) -> Result<Vec<f64>> {
    let rho = acf(series, max_lag)?;
    let lev = durbin_levinson(&rho, max_lag)?;
    let mut out = Vec::with_capacity(max_lag + 1);
    out.push(1.0);
    out.extend(lev.partials);
    Ok(out)
}

//! Additive-outlier estimation, testing, iterative detection and correction.
//!
//! An additive outlier of size ω at time T turns the observed series into
//! `Y_t = Z_t + ω I_t^{(T)}`. Filtering with `π(B)` spreads it over the
//! residuals as `e_t = ω π(B) I_t^{(T)} + a_t`: the residual vector picks up
//! the signature `ω · [1, −π_1, −π_2, …]` starting at T. Everything in this
//! module is built from the least-squares projection onto that signature.
//!
//! All time arguments are labels on the residual series' own axis (see
//! [`TimeSeries`]), so outlier times line up with the observed series.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{
    filter_residuals, fit_arima, ols, pi_weights, sigma2_hat, ArimaFit, ArimaModel, OlsResult, PiWeights,
};
use crate::series::{difference, TimeSeries};

/// Recommended range for the critical value.
pub const CRITICAL_VALUE_RANGE: (f64, f64) = (2.0, 6.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    /// Threshold `c` on `|λ̂|`.
    pub critical_value: f64,
    /// Stop after this many distinct outliers.
    pub max_outliers: usize,
    /// Hard cap on scan iterations.
    pub max_iterations: usize,
    /// Re-estimate the ARIMA model after each detection instead of keeping
    /// the initial π̂(B) throughout.
    pub refit_each_iteration: bool,
    /// Positions excluded at the start of the residual series; `None` means
    /// `p`. Never fewer than the warm-up residuals.
    pub scan_margin: Option<usize>,
    /// Positions excluded at the end of the residual series.
    pub end_margin: usize,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            critical_value: 3.0,
            max_outliers: 10,
            max_iterations: 20,
            refit_each_iteration: false,
            scan_margin: None,
            end_margin: 0,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        let c = self.critical_value;
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::Config(format!("critical value must be positive and finite, got {c}")));
        }
        if !(CRITICAL_VALUE_RANGE.0..=CRITICAL_VALUE_RANGE.1).contains(&c) {
            log::warn!(
                "critical value {c} is outside the usual range [{}, {}]",
                CRITICAL_VALUE_RANGE.0,
                CRITICAL_VALUE_RANGE.1
            );
        }
        if self.max_outliers == 0 || self.max_iterations == 0 {
            return Err(Error::Config("max_outliers and max_iterations must be positive".into()));
        }
        if self.max_outliers > n / 5 {
            return Err(Error::Config(format!(
                "max_outliers = {} exceeds n / 5 = {} for a series of length {n}",
                self.max_outliers,
                n / 5
            )));
        }
        Ok(())
    }
}

/// One detected additive outlier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierRecord {
    /// Time index T.
    pub t: i64,
    /// Estimated magnitude ω̂ (series units).
    pub omega_hat: f64,
    /// Test statistic λ̂ at acceptance.
    pub lambda_hat: f64,
    /// Iteration that first found it (1-based).
    pub iteration: usize,
    /// τ² at T.
    pub tau2: f64,
    /// T is one of the last two residual positions, where τ² ≈ 1 and the
    /// test has little power to separate an AO from a large innovation.
    pub edge: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    NoCandidate,
    MaxOutliers,
    MaxIterations,
}

/// Model that closes the detection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FinalModel {
    /// `q = 0`: OLS on intercept, lags and one indicator per outlier.
    Joint(OlsResult),
    /// `q > 0`: ARIMA re-estimated on the corrected series.
    Refit(ArimaFit),
}

impl FinalModel {
    pub fn mse(&self) -> f64 {
        match self {
            FinalModel::Joint(r) => r.mse,
            FinalModel::Refit(f) => f.mse,
        }
    }
}

/// One rung of the MSE ladder: the model refitted with the first `k`
/// detected outliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderStep {
    pub outlier_times: Vec<i64>,
    pub mse: f64,
    /// Joint-regression coefficients (intercept?, φ…, ω…) or, for `q > 0`,
    /// the refitted φ, θ and intercept.
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    /// In detection order.
    pub outliers: Vec<OutlierRecord>,
    /// σ̂_a at the start of each iteration.
    pub sigma_trail: Vec<f64>,
    /// MSE of the refits with 0, 1, …, k outliers.
    pub mse_trail: Vec<f64>,
    pub ladder: Vec<LadderStep>,
    /// ẑ_t.
    pub corrected_series: TimeSeries,
    pub final_model: FinalModel,
    pub iterations_run: usize,
    pub terminated_by: Termination,
}

impl DetectionResult {
    pub fn outlier_times(&self) -> Vec<i64> {
        self.outliers.iter().map(|o| o.t).collect()
    }
}

/// Result of scanning residuals for the most likely AO position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanHit {
    pub t: i64,
    pub omega_hat: f64,
    pub lambda_hat: f64,
    pub tau2: f64,
}

/// Positions excluded at each end of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScanWindow {
    pub lead: usize,
    pub trail: usize,
}

impl ScanWindow {
    pub fn symmetric(margin: usize) -> Self {
        Self { lead: margin, trail: margin }
    }
}

/// `τ² = Σ_{j=0}^{n−T} π_j²` with `π_0 = 1`; `n` and `t` are 1-based
/// positions.
pub fn tau_squared(pi: &PiWeights, n: usize, t: usize) -> Result<f64> {
    if t == 0 || t > n {
        return Err(Error::Index { index: t as i64, first: 1, last: n as i64 });
    }
    let reach = (n - t).min(pi.truncation());
    Ok(1.0 + pi.weights()[..reach].iter().map(|w| w * w).sum::<f64>())
}

/// Least-squares AO magnitude at label `t`:
/// `ω̂ = (e_T − Σ_{j=1}^{n−T} π_j e_{T+j}) / τ²`.
pub fn omega_hat(e: &TimeSeries, pi: &PiWeights, t: i64) -> Result<f64> {
    let pos = e.position(t)?;
    Ok(omega_and_tau2(e.values(), pi, pos).0)
}

fn omega_and_tau2(e: &[f64], pi: &PiWeights, pos: usize) -> (f64, f64) {
    let reach = (e.len() - 1 - pos).min(pi.truncation());
    let w = &pi.weights()[..reach];
    let forward: f64 = w.iter().zip(&e[pos + 1..]).map(|(p, v)| p * v).sum();
    let tau2 = 1.0 + w.iter().map(|p| p * p).sum::<f64>();
    ((e[pos] - forward) / tau2, tau2)
}

/// `λ̂ = τ ω̂ / σ̂`.
pub fn lambda_stat(omega: f64, tau2: f64, sigma: f64) -> Result<f64> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::Domain(format!("σ̂ must be positive, got {sigma}")));
    }
    Ok(tau2.sqrt() * omega / sigma)
}

/// Position maximising `|λ̂|` inside `window`; ties go to the earliest.
pub fn scan(e: &TimeSeries, pi: &PiWeights, sigma: f64, window: ScanWindow) -> Result<ScanHit> {
    let n = e.len();
    if window.lead + window.trail >= n {
        return Err(Error::EmptyScan(format!(
            "margins {} + {} leave nothing of {n} residuals",
            window.lead, window.trail
        )));
    }
    let mut best: Option<ScanHit> = None;
    for pos in window.lead..n - window.trail {
        let (omega, tau2) = omega_and_tau2(e.values(), pi, pos);
        let lambda = lambda_stat(omega, tau2, sigma)?;
        if best.is_none_or(|b| lambda.abs() > b.lambda_hat.abs()) {
            best = Some(ScanHit { t: e.label(pos), omega_hat: omega, lambda_hat: lambda, tau2 });
        }
    }
    Ok(best.expect("window is non-empty"))
}

/// Remove the AO signature: `ẽ_t = ê_t − ω̂ π̂(B) I_t^{(T)}`.
pub fn adjust_residuals(e: &TimeSeries, omega: f64, pi: &PiWeights, t: i64) -> Result<TimeSeries> {
    let pos = e.position(t)?;
    let mut values = e.values().to_vec();
    adjust_in_place(&mut values, omega, pi, pos);
    e.map_values(values)
}

fn adjust_in_place(e: &mut [f64], omega: f64, pi: &PiWeights, pos: usize) {
    e[pos] -= omega;
    let reach = (e.len() - 1 - pos).min(pi.truncation());
    for (j, w) in pi.weights()[..reach].iter().enumerate() {
        e[pos + 1 + j] += omega * w;
    }
}

/// `ẑ_t = Y_t − Σ ω̂_j I_t^{(T_j)}`.
pub fn correct_series(series: &TimeSeries, outliers: &[OutlierRecord]) -> Result<TimeSeries> {
    let mut values = series.values().to_vec();
    let mut seen = std::collections::HashSet::new();
    for o in outliers {
        if !seen.insert(o.t) {
            return Err(Error::Domain(format!("outlier time {} listed twice", o.t)));
        }
        values[series.position(o.t)?] -= o.omega_hat;
    }
    series.map_values(values)
}

/// OLS of `W_t` on an intercept, `p` lags and one AO indicator per time in
/// `outlier_times`, `W` being the `d`-times differenced series.
///
/// With `d = 0` the indicator columns are pulses `1{t = T_j}`; for `d > 0`
/// they are the differenced pulses `(1 − B)^d 1{t = T_j}`, which is how an
/// additive outlier on the observed scale appears in `W`. The last
/// `outlier_times.len()` coefficients are the refined ω̂_j.
pub fn joint_refit(
    series: &TimeSeries,
    outlier_times: &[i64],
    p: usize,
    d: usize,
    with_intercept: bool,
) -> Result<OlsResult> {
    for &t in outlier_times {
        series.position(t)?;
    }
    let w = difference(series, d)?;
    let values = w.values();
    let k = outlier_times.len();
    let offset = usize::from(with_intercept);
    let cols = offset + p + k;
    let rows = values.len().saturating_sub(p);
    if rows <= cols {
        return Err(Error::Length(format!("{rows} usable observations cannot support {cols} regressors")));
    }
    // (1 − B)^d as a coefficient list.
    let mut diff_poly = vec![1.0];
    for _ in 0..d {
        let mut next = vec![0.0; diff_poly.len() + 1];
        for (i, c) in diff_poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c;
        }
        diff_poly = next;
    }
    let first_label = w.start() + p as i64;
    let x = DMatrix::from_fn(rows, cols, |r, c| {
        if c < offset {
            1.0
        } else if c < offset + p {
            values[r + p - (c - offset + 1)]
        } else {
            let lag = first_label + r as i64 - outlier_times[c - offset - p];
            usize::try_from(lag).ok().and_then(|l| diff_poly.get(l)).copied().unwrap_or(0.0)
        }
    });
    ols(&x, &values[p..]).map_err(|e| match e {
        Error::Rank(msg) => {
            Error::Rank(format!("{msg} (coinciding outlier times, or an outlier outside the regression rows)"))
        }
        other => other,
    })
}

/// Working state of one pass through the residual scan.
struct ScanState {
    pi: PiWeights,
    residuals: TimeSeries,
    warmup: usize,
}

impl ScanState {
    fn new(series: &TimeSeries, model: &ArimaModel) -> Result<Self> {
        let filtered = filter_residuals(series, model)?;
        let m = filtered.residuals.len().saturating_sub(1).max(1);
        Ok(Self { pi: pi_weights(model, m), residuals: filtered.residuals, warmup: filtered.warmup })
    }

    fn sigma(&self) -> f64 {
        sigma2_hat(&self.residuals.values()[self.warmup..]).sqrt()
    }
}

/// Iterative AO detection.
///
/// Each iteration filters the series with the fitted π̂(B), scans every
/// admissible T for the largest `|λ̂|`, and when it exceeds the critical
/// value records the outlier, removes its signature from the residuals and
/// recomputes σ̂ from the modified residuals. π̂(B) stays fixed unless
/// `refit_each_iteration` is set. A T found again has its ω̂ added to the
/// existing record.
///
/// Afterwards the series is corrected and refitted: by the joint indicator
/// regression when `q = 0`, by re-estimating the ARIMA model on the
/// corrected series otherwise.
pub fn detect_iterative(series: &TimeSeries, fit: &ArimaFit, config: &DetectionConfig) -> Result<DetectionResult> {
    config.validate(series.len())?;
    let order = fit.order();
    let with_intercept = fit.model.intercept.is_some();
    let mut state = ScanState::new(series, &fit.model)?;
    let window = ScanWindow { lead: config.scan_margin.unwrap_or(order.p).max(state.warmup), trail: config.end_margin };

    let mut outliers: Vec<OutlierRecord> = Vec::new();
    let mut sigma_trail = Vec::new();
    let mut iterations_run = 0;
    let mut terminated_by = Termination::MaxIterations;

    for iteration in 1..=config.max_iterations {
        iterations_run = iteration;
        let sigma = state.sigma();
        sigma_trail.push(sigma);
        if sigma <= 0.0 {
            terminated_by = Termination::NoCandidate;
            break;
        }
        let hit = scan(&state.residuals, &state.pi, sigma, window)?;
        if hit.lambda_hat.abs() <= config.critical_value {
            terminated_by = Termination::NoCandidate;
            break;
        }
        log::debug!("iteration {iteration}: AO at {} (ω̂ = {}, λ̂ = {})", hit.t, hit.omega_hat, hit.lambda_hat);

        match outliers.iter_mut().find(|o| o.t == hit.t) {
            Some(existing) => {
                existing.omega_hat += hit.omega_hat;
                existing.lambda_hat = hit.lambda_hat;
            }
            None => outliers.push(OutlierRecord {
                t: hit.t,
                omega_hat: hit.omega_hat,
                lambda_hat: hit.lambda_hat,
                iteration,
                tau2: hit.tau2,
                edge: hit.t >= state.residuals.end() - 1,
            }),
        }

        if config.refit_each_iteration {
            let corrected = correct_series(series, &outliers)?;
            let refit = fit_arima(&corrected, order, with_intercept)?;
            state = ScanState::new(&corrected, &refit.model)?;
        } else {
            let pos = state.residuals.position(hit.t)?;
            let mut values = state.residuals.values().to_vec();
            adjust_in_place(&mut values, hit.omega_hat, &state.pi, pos);
            state.residuals = state.residuals.map_values(values)?;
        }

        if outliers.len() >= config.max_outliers {
            terminated_by = Termination::MaxOutliers;
            break;
        }
    }
    let corrected_series = correct_series(series, &outliers)?;
    let times: Vec<i64> = outliers.iter().map(|o| o.t).collect();

    let (ladder, final_model) = if order.q == 0 {
        let mut ladder = Vec::with_capacity(times.len() + 1);
        let mut last = None;
        for k in 0..=times.len() {
            let reg = joint_refit(series, &times[..k], order.p, order.d, with_intercept)?;
            ladder.push(LadderStep {
                outlier_times: times[..k].to_vec(),
                mse: reg.mse,
                coefficients: reg.coefficients.clone(),
            });
            last = Some(reg);
        }
        (ladder, FinalModel::Joint(last.expect("at least one rung")))
    } else {
        let mut ladder = Vec::with_capacity(times.len() + 1);
        let mut last = None;
        for k in 0..=outliers.len() {
            let partial = correct_series(series, &outliers[..k])?;
            let refit = if k == 0 { fit.clone() } else { fit_arima(&partial, order, with_intercept)? };
            let mut coefficients = refit.phi().to_vec();
            coefficients.extend_from_slice(refit.theta());
            coefficients.extend(refit.model.intercept);
            ladder.push(LadderStep { outlier_times: times[..k].to_vec(), mse: refit.mse, coefficients });
            last = Some(refit);
        }
        (ladder, FinalModel::Refit(last.expect("at least one rung")))
    };

    Ok(DetectionResult {
        mse_trail: ladder.iter().map(|s| s.mse).collect(),
        ladder,
        outliers,
        sigma_trail,
        corrected_series,
        final_model,
        iterations_run,
        terminated_by,
    })
}

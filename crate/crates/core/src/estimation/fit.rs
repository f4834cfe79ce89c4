use nalgebra::DMatrix;

use super::ols::ols;
use super::simplex::{minimize, SimplexOptions};
use super::{ArimaFit, ArimaModel, ArimaOrder, EstimationMethod};
use crate::error::{Error, Result};
use crate::series::{acf, difference, durbin_levinson, TimeSeries};

/// Objective evaluations per free parameter in each simplex run.
const EVALS_PER_PARAM: usize = 500;

/// Lagged design `[1?, Z_{t−1}, …, Z_{t−p}]` for `t = p+1..n` with the
/// response `Z_t`.
pub(crate) fn lag_design(values: &[f64], p: usize, with_intercept: bool) -> (DMatrix<f64>, Vec<f64>) {
    let rows = values.len() - p;
    let offset = usize::from(with_intercept);
    let x = DMatrix::from_fn(rows, p + offset, |r, c| {
        if with_intercept && c == 0 {
            1.0
        } else {
            values[r + p - (c + 1 - offset)]
        }
    });
    (x, values[p..].to_vec())
}

/// AR(p) by ordinary least squares of `Z_t` on its first `p` lags.
pub fn fit_ar_ols(series: &TimeSeries, p: usize, with_intercept: bool) -> Result<ArimaFit> {
    if p == 0 {
        return Err(Error::Config("AR order must be positive".into()));
    }
    let n = series.len();
    if n <= 2 * p + 2 {
        return Err(Error::Length(format!("AR({p}) needs more than {} observations, got {n}", 2 * p + 2)));
    }
    let (x, y) = lag_design(series.values(), p, with_intercept);
    let reg = ols(&x, &y).map_err(|e| match e {
        Error::Rank(msg) => Error::Rank(format!("{msg}; a constant series cannot be regressed on its own lags")),
        other => other,
    })?;

    let (intercept, phi) = if with_intercept {
        (Some(reg.coefficients[0]), reg.coefficients[1..].to_vec())
    } else {
        (None, reg.coefficients.clone())
    };
    let mut std_errors = reg.std_errors.clone();
    if with_intercept {
        std_errors.rotate_left(1);
    }
    let model = ArimaModel::new(ArimaOrder::new(p, 0, 0), phi, vec![], intercept)?;
    let n_eff = y.len();
    Ok(ArimaFit {
        warnings: model.warnings(),
        model,
        method: EstimationMethod::Ols,
        sigma2: reg.sse / n_eff as f64,
        residuals: TimeSeries::with_start(reg.residuals, series.start() + p as i64)?,
        coefficient_std_errors: std_errors,
        sse: reg.sse,
        mse: reg.mse,
    })
}

/// Order-p Yule-Walker estimates from the sample autocorrelations.
pub fn yule_walker(series: &TimeSeries, p: usize) -> Result<Vec<f64>> {
    if p == 0 || p >= series.len() {
        return Err(Error::Length(format!("Yule-Walker order {p} needs 0 < p < n = {}", series.len())));
    }
    let rho = acf(series, p)?;
    Ok(durbin_levinson(&rho, p)?.coefficients)
}

/// Conditional innovations `a_{p+1}..a_n` for parameters laid out as
/// `[φ…, θ…, c?]`; pre-sample innovations are zero.
fn css_innovations(w: &[f64], order: ArimaOrder, with_intercept: bool, params: &[f64]) -> Vec<f64> {
    let (p, q) = (order.p, order.q);
    let phi = &params[..p];
    let theta = &params[p..p + q];
    let c = if with_intercept { params[p + q] } else { 0.0 };
    let mut a = vec![0.0; w.len()];
    for t in p..w.len() {
        let ar: f64 = phi.iter().enumerate().map(|(j, f)| f * w[t - 1 - j]).sum();
        let ma: f64 = theta.iter().enumerate().filter(|(j, _)| t > p + *j).map(|(j, th)| th * a[t - 1 - j]).sum();
        a[t] = w[t] - c - ar + ma;
    }
    a.split_off(p)
}

/// ARMA(p, q) on the d-times differenced series by conditional sum of squares.
pub fn fit_arma_css(series: &TimeSeries, order: ArimaOrder, with_intercept: bool) -> Result<ArimaFit> {
    order.validate()?;
    let w = difference(series, order.d)?;
    let (p, q) = (order.p, order.q);
    let n = w.len();
    if n <= 3 * (p + q) + 5 {
        return Err(Error::Length(format!(
            "{order} needs more than {} differenced observations, got {n}",
            3 * (p + q) + 5
        )));
    }
    let values = w.values();
    let mean = w.mean();
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    if sd == 0.0 && with_intercept {
        return Err(Error::Rank("constant series: intercept and lag terms are collinear".into()));
    }

    let ar_start = if p > 0 { yule_walker(&w, p)? } else { Vec::new() };
    let mut start = ar_start.clone();
    start.extend(std::iter::repeat_n(0.0, q));
    let mut steps = vec![0.1; p + q];
    if with_intercept {
        start.push(mean * (1.0 - ar_start.iter().sum::<f64>()));
        steps.push(0.1 * sd.max(mean.abs()).max(1e-3));
    }

    let objective =
        |x: &[f64]| -> f64 { css_innovations(values, order, with_intercept, x).iter().map(|a| a * a).sum() };
    let opts = SimplexOptions { max_evals: EVALS_PER_PARAM * start.len(), ..Default::default() };
    let outcome = minimize(objective, &start, &steps, &opts);
    if !outcome.f.is_finite() || (outcome.f >= outcome.f_start && !outcome.converged) {
        return Err(Error::Convergence(format!(
            "conditional sum of squares did not improve on its start ({} after {} evaluations)",
            outcome.f, outcome.evals
        )));
    }

    let params = outcome.x;
    let innovations = css_innovations(values, order, with_intercept, &params);
    let n_eff = innovations.len();
    let k = params.len();
    let sse: f64 = innovations.iter().map(|a| a * a).sum();
    let mse = sse / (n_eff - k) as f64;
    let std_errors = gauss_newton_std_errors(values, order, with_intercept, &params, mse);

    let model =
        ArimaModel::new(order, params[..p].to_vec(), params[p..p + q].to_vec(), with_intercept.then(|| params[p + q]))?;
    let warnings = model.warnings();
    if !warnings.is_empty() {
        log::warn!("{order} fit lies on or beyond the admissible region: {warnings:?}");
    }
    Ok(ArimaFit {
        model,
        method: EstimationMethod::ConditionalSumOfSquares,
        sigma2: sse / n_eff as f64,
        residuals: TimeSeries::with_start(innovations, w.start() + p as i64)?,
        coefficient_std_errors: std_errors,
        sse,
        mse,
        warnings,
    })
}

/// Standard errors from `mse · (JᵀJ)⁻¹`, J the central-difference Jacobian
/// of the innovations. NaN where the system is singular.
fn gauss_newton_std_errors(w: &[f64], order: ArimaOrder, with_intercept: bool, params: &[f64], mse: f64) -> Vec<f64> {
    let k = params.len();
    let rows = w.len() - order.p;
    let mut jac = DMatrix::zeros(rows, k);
    for i in 0..k {
        let h = 1e-6 * params[i].abs().max(1.0);
        let mut up = params.to_vec();
        let mut down = params.to_vec();
        up[i] += h;
        down[i] -= h;
        let a_up = css_innovations(w, order, with_intercept, &up);
        let a_down = css_innovations(w, order, with_intercept, &down);
        for r in 0..rows {
            jac[(r, i)] = (a_up[r] - a_down[r]) / (2.0 * h);
        }
    }
    let info = jac.transpose() * &jac;
    match info.try_inverse() {
        Some(inv) => (0..k).map(|i| (mse * inv[(i, i)]).sqrt()).collect(),
        None => vec![f64::NAN; k],
    }
}

/// Fit any supported order: OLS on the differenced series when `q = 0`,
/// conditional sum of squares otherwise.
pub fn fit_arima(series: &TimeSeries, order: ArimaOrder, with_intercept: bool) -> Result<ArimaFit> {
    order.validate()?;
    if order.q > 0 {
        return fit_arma_css(series, order, with_intercept);
    }
    let w = difference(series, order.d)?;
    let mut fit = fit_ar_ols(&w, order.p, with_intercept)?;
    fit.model.order.d = order.d;
    Ok(fit)
}

use serde::{Deserialize, Serialize};

use super::{ArimaModel, PiWeights};
use crate::error::Result;
use crate::series::{difference, TimeSeries};

/// Coefficients `g_1..` of `φ(B)(1 − B)^d = 1 − Σ g_k B^k`.
fn generalized_ar(phi: &[f64], d: usize) -> Vec<f64> {
    // Full polynomial with the leading 1.
    let mut poly: Vec<f64> = std::iter::once(1.0).chain(phi.iter().map(|v| -v)).collect();
    for _ in 0..d {
        let mut next = vec![0.0; poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c;
        }
        poly = next;
    }
    poly[1..].iter().map(|v| -v).collect()
}

/// First `m` π-weights of the model.
///
/// Uses `π_k = φ*_k − θ_k + Σ_{i=1}^{k−1} θ_i π_{k−i}` where `φ*` are the
/// coefficients of `φ(B)(1 − B)^d`.
pub fn pi_weights(model: &ArimaModel, m: usize) -> PiWeights {
    if !model.is_invertible() {
        log::warn!("MA polynomial is not invertible; π-weights will not decay");
    }
    let ar = generalized_ar(&model.phi, model.order.d);
    let theta = &model.theta;
    let mut pi: Vec<f64> = Vec::with_capacity(m);
    for k in 1..=m {
        let ar_k = ar.get(k - 1).copied().unwrap_or(0.0);
        let ma_k = theta.get(k - 1).copied().unwrap_or(0.0);
        let feedback: f64 = theta.iter().take(k - 1).enumerate().map(|(i, th)| th * pi[k - 2 - i]).sum();
        pi.push(ar_k - ma_k + feedback);
    }
    PiWeights::new(pi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilteredResiduals {
    /// `ê_t` on the differenced series' labels.
    pub residuals: TimeSeries,
    /// Leading conditioning values (`ê_1..ê_p` on the differenced scale),
    /// computed from the available lags only.
    pub warmup: usize,
}

impl FilteredResiduals {
    /// Residuals past the warm-up block.
    pub fn effective(&self) -> &[f64] {
        &self.residuals.values()[self.warmup.min(self.residuals.len())..]
    }
}

/// `ê_t = π̂(B) Y_t` with zero pre-sample values.
///
/// The series is differenced `order.d` times and centred on the model's
/// process mean; the ARMA filter then runs with every pre-sample value set to
/// zero, which equals the π-expansion truncated at the available lags.
pub fn filter_residuals(series: &TimeSeries, model: &ArimaModel) -> Result<FilteredResiduals> {
    let w = difference(series, model.order.d)?;
    let mu = model.process_mean()?;
    let centered: Vec<f64> = w.values().iter().map(|v| v - mu).collect();
    let (phi, theta) = (&model.phi, &model.theta);

    let mut e = vec![0.0; centered.len()];
    for t in 0..centered.len() {
        let ar: f64 = phi.iter().take(t).enumerate().map(|(j, f)| f * centered[t - 1 - j]).sum();
        let ma: f64 = theta.iter().take(t).enumerate().map(|(j, th)| th * e[t - 1 - j]).sum();
        e[t] = centered[t] - ar + ma;
    }
    Ok(FilteredResiduals { residuals: w.map_values(e)?, warmup: model.order.p.min(centered.len()) })
}

/// `σ̂² = Σ ê_t² / n`.
pub fn sigma2_hat(residuals: &[f64]) -> f64 {
    residuals.iter().map(|e| e * e).sum::<f64>() / residuals.len() as f64
}

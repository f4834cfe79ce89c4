//! Ordinary least squares via Householder QR.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pivots of R smaller than this fraction of the largest pivot mark the
/// design as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsResult {
    pub coefficients: Vec<f64>,
    pub sse: f64,
    /// `sse / df_residual`.
    pub mse: f64,
    pub std_errors: Vec<f64>,
    pub fitted: Vec<f64>,
    pub residuals: Vec<f64>,
    pub df_residual: usize,
}

/// Least-squares fit of `y` on the columns of `x`.
pub fn ols(x: &DMatrix<f64>, y: &[f64]) -> Result<OlsResult> {
    let (rows, cols) = x.shape();
    if y.len() != rows {
        return Err(Error::Arity { expected: rows, got: y.len() });
    }
    if rows <= cols {
        return Err(Error::Length(format!("least squares needs more rows than columns ({rows} × {cols})")));
    }
    if cols == 0 {
        return Err(Error::Rank("design matrix has no columns".into()));
    }

    let qr = x.clone().qr();
    let r = qr.r();
    let largest = r.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(col) = r.diagonal().iter().position(|v| v.abs() <= RANK_TOLERANCE * largest) {
        return Err(Error::Rank(format!("column {col} is (numerically) a combination of the preceding columns")));
    }

    let yv = DVector::from_column_slice(y);
    let qty = qr.q().transpose() * &yv;
    let beta = r.solve_upper_triangular(&qty).ok_or_else(|| Error::Rank("triangular solve failed".into()))?;

    let fitted = x * &beta;
    let residuals: Vec<f64> = yv.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    let sse: f64 = residuals.iter().map(|e| e * e).sum();
    let df_residual = rows - cols;
    let mse = sse / df_residual as f64;

    // (XᵀX)⁻¹ = R⁻¹ R⁻ᵀ, so its diagonal is the row sums of squares of R⁻¹.
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(cols, cols))
        .ok_or_else(|| Error::Rank("triangular inverse failed".into()))?;
    let std_errors = (0..cols).map(|i| (mse * r_inv.row(i).iter().map(|v| v * v).sum::<f64>()).sqrt()).collect();

    Ok(OlsResult {
        coefficients: beta.iter().copied().collect(),
        sse,
        mse,
        std_errors,
        fitted: fitted.iter().copied().collect(),
        residuals,
        df_residual,
    })
}

//! Independent oracles shared by the integration tests. Nothing here calls
//! into the implementation paths it is used to check.
#![allow(dead_code)]

use arima_ao::simgen::{simulate, SimSpec};
use arima_ao::TimeSeries;

pub const DEMO_AR: [f64; 2] = [0.2237, 0.4282];

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Normal-equations least squares for a row-major design.
pub fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let k = x[0].len();
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for (row, &yi) in x.iter().zip(y) {
        for i in 0..k {
            xty[i] += row[i] * yi;
            for j in 0..k {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    gauss_solve(xtx, xty)
}

/// Full lag polynomial `[1, −c_1, …, −c_k]`.
pub fn lag_poly(coefs: &[f64]) -> Vec<f64> {
    std::iter::once(1.0).chain(coefs.iter().map(|c| -c)).collect()
}

pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// π_1..π_m by power-series long division of `φ(B)(1 − B)^d` by `θ(B)`.
pub fn pi_by_long_division(phi: &[f64], d: usize, theta: &[f64], m: usize) -> Vec<f64> {
    let mut num = lag_poly(phi);
    for _ in 0..d {
        num = poly_mul(&num, &[1.0, -1.0]);
    }
    num.resize(m + 1, 0.0);
    let den = lag_poly(theta);
    // quotient q with q * den = num (den[0] = 1)
    let mut q = vec![0.0; m + 1];
    let mut rem = num;
    for k in 0..=m {
        q[k] = rem[k];
        for (j, dj) in den.iter().enumerate().skip(1) {
            if k + j <= m {
                rem[k + j] -= q[k] * dj;
            }
        }
    }
    q[1..].iter().map(|v| -v).collect()
}

pub fn ar_series(phi: &[f64], n: usize, seed: u64) -> TimeSeries {
    simulate(&SimSpec::arma(phi, &[], 1.0, n, seed)).unwrap()
}

pub fn ma_series(theta: &[f64], n: usize, seed: u64) -> TimeSeries {
    simulate(&SimSpec::arma(&[], theta, 1.0, n, seed)).unwrap()
}

pub fn white_noise(n: usize, sigma: f64, seed: u64) -> Vec<f64> {
    let mut s = arima_ao::simgen::NormalStream::new(seed);
    (0..n).map(|_| sigma * s.standard_normal()).collect()
}

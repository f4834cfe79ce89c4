//! Root checks for lag polynomials of the form `1 − c_1 B − … − c_k B^k`.

use nalgebra::DMatrix;

/// Roots within this distance of the unit circle count as "on" it.
pub const ROOT_TOLERANCE: f64 = 1e-8;

/// Roots `(re, im)` of `1 − c_1 z − … − c_k z^k`.
///
/// Computed as reciprocals of the companion-matrix eigenvalues; zero
/// eigenvalues (from trailing zero coefficients) are roots at infinity and
/// are dropped.
pub fn lag_polynomial_roots(coefficients: &[f64]) -> Vec<(f64, f64)> {
    let k = coefficients.len();
    if k == 0 {
        return Vec::new();
    }
    let companion = DMatrix::from_fn(k, k, |i, j| {
        if i == 0 {
            coefficients[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion
        .complex_eigenvalues()
        .iter()
        .filter(|ev| ev.norm() > 1e-300)
        .map(|ev| {
            let inv = ev.inv();
            (inv.re, inv.im)
        })
        .collect()
}

/// True when every root lies strictly outside the unit circle
/// (stationarity for AR, invertibility for MA).
pub fn roots_outside_unit_circle(coefficients: &[f64]) -> bool {
    lag_polynomial_roots(coefficients).iter().all(|&(re, im)| re.hypot(im) > 1.0 + ROOT_TOLERANCE)
}

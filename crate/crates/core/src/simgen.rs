//! Seeded ARMA simulation and additive-outlier injection.
//!
//! # Random stream
//!
//! Uniform and normal deviates are fully specified so fixtures are
//! bit-identical on every platform:
//!
//! - the generator is ChaCha8 (`rand_chacha::ChaCha8Rng`), seeded with
//!   `SeedableRng::seed_from_u64(seed)`;
//! - a uniform on `[0, 1)` is `(next_u64() >> 11) · 2⁻⁵³`;
//! - normals come from the Marsaglia polar method: draw `u, v = 2U − 1`
//!   until `0 < s = u² + v² < 1`, then emit `u·m` followed by `v·m` with
//!   `m = sqrt(−2 ln s / s)`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::roots::{lag_polynomial_roots, roots_outside_unit_circle};
use crate::estimation::ArimaOrder;
use crate::series::{integrate, TimeSeries};

/// Seed of the bundled demo dataset.
pub const DEMO_SEED: u64 = 20180101;
/// AR coefficients of the demo dataset.
pub const DEMO_PHI: [f64; 2] = [0.2237, 0.4282];
/// Length of the demo dataset.
pub const DEMO_N: usize = 200;
/// Planted outliers of the demo dataset as `(t, multiple of σ)`.
pub const DEMO_OUTLIERS: [(i64, f64); 3] = [(98, 8.0), (162, -8.0), (180, 6.0)];

/// Standard-normal stream over ChaCha8.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), spare: None }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let m = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * m);
                return u * m;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub order: ArimaOrder,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    /// Constant `c` of the differenced-scale equation.
    pub intercept: f64,
    /// Innovation standard deviation.
    pub sigma: f64,
    pub n: usize,
    pub seed: u64,
    /// Discarded leading draws; `None` means `100 + p + q`.
    pub burn_in: Option<usize>,
}

impl SimSpec {
    pub fn arma(phi: &[f64], theta: &[f64], sigma: f64, n: usize, seed: u64) -> Self {
        Self {
            order: ArimaOrder::new(phi.len(), 0, theta.len()),
            phi: phi.to_vec(),
            theta: theta.to_vec(),
            intercept: 0.0,
            sigma,
            n,
            seed,
            burn_in: None,
        }
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in.unwrap_or(100 + self.order.p + self.order.q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.phi.len() != self.order.p {
            return Err(Error::Arity { expected: self.order.p, got: self.phi.len() });
        }
        if self.theta.len() != self.order.q {
            return Err(Error::Arity { expected: self.order.q, got: self.theta.len() });
        }
        if self.order.d > crate::estimation::MAX_D {
            return Err(Error::Config(format!("d = {} is not supported", self.order.d)));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) || !self.intercept.is_finite() {
            return Err(Error::Domain("σ must be finite and non-negative, intercept finite".into()));
        }
        if self.n == 0 {
            return Err(Error::Length("n must be positive".into()));
        }
        if self.phi.iter().chain(&self.theta).any(|v| !v.is_finite()) {
            return Err(Error::Domain("coefficients must be finite".into()));
        }
        if !roots_outside_unit_circle(&self.phi) {
            return Err(Error::Stability { roots: lag_polynomial_roots(&self.phi) });
        }
        if !roots_outside_unit_circle(&self.theta) {
            return Err(Error::Domain(format!(
                "MA polynomial is not invertible; roots {:?}",
                lag_polynomial_roots(&self.theta)
            )));
        }
        Ok(())
    }
}

/// Draw a series from `spec`. Identical specs give bit-identical output.
///
/// Pre-sample values start at the process mean with zero innovations. For
/// `d > 0` the ARMA output is integrated from zeros and the `d` leading
/// zeros are dropped, so the result always has `spec.n` values.
pub fn simulate(spec: &SimSpec) -> Result<TimeSeries> {
    spec.validate()?;
    let (p, q) = (spec.order.p, spec.order.q);
    let burn = spec.burn_in();
    let total = burn + spec.n;
    let mean = spec.intercept / (1.0 - spec.phi.iter().sum::<f64>());

    let mut normals = NormalStream::new(spec.seed);
    let innovations: Vec<f64> = (0..total).map(|_| spec.sigma * normals.standard_normal()).collect();

    let mut x: Vec<f64> = Vec::with_capacity(total);
    for t in 0..total {
        let ar: f64 = (0..p).map(|j| spec.phi[j] * if t > j { x[t - 1 - j] } else { mean }).sum();
        let ma: f64 = (0..q).filter(|&j| t > j).map(|j| spec.theta[j] * innovations[t - 1 - j]).sum();
        x.push(spec.intercept + ar + innovations[t] - ma);
    }
    let w = x.split_off(burn);

    let d = spec.order.d;
    if d == 0 {
        return TimeSeries::new(w);
    }
    let diffed = TimeSeries::with_start(w, 1 + d as i64)?;
    let levels = integrate(&diffed, &vec![0.0; d], d)?;
    TimeSeries::new(levels.values()[d..].to_vec())
}

/// Additive outliers to plant: `(t, ω)` pairs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InjectionPlan(pub Vec<(i64, f64)>);

impl InjectionPlan {
    pub fn new(entries: Vec<(i64, f64)>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &[(i64, f64)] {
        &self.0
    }

    pub fn validate(&self, series: &TimeSeries) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for &(t, omega) in &self.0 {
            series.position(t)?;
            if !omega.is_finite() {
                return Err(Error::Domain(format!("outlier magnitude at {t} is not finite")));
            }
            if !seen.insert(t) {
                return Err(Error::Domain(format!("time index {t} appears twice in the plan")));
            }
        }
        Ok(())
    }
}

/// `Y_t = Z_t + Σ ω_j I_t^{(T_j)}`.
pub fn inject(series: &TimeSeries, plan: &InjectionPlan) -> Result<TimeSeries> {
    plan.validate(series)?;
    let mut values = series.values().to_vec();
    for &(t, omega) in plan.entries() {
        values[series.position(t)?] += omega;
    }
    series.map_values(values)
}

/// The bundled demo: AR(2) with φ = (0.2237, 0.4282), σ = 1, n = 200, and
/// additive outliers of +8σ, −8σ and +6σ at t = 98, 162 and 180.
///
/// Returns the contaminated series, the plan, and the clean-series spec.
pub fn demo_dataset() -> (TimeSeries, InjectionPlan, SimSpec) {
    let spec = SimSpec::arma(&DEMO_PHI, &[], 1.0, DEMO_N, DEMO_SEED);
    let clean = simulate(&spec).expect("demo spec is valid");
    let plan = InjectionPlan::new(DEMO_OUTLIERS.iter().map(|&(t, k)| (t, k * spec.sigma)).collect());
    let series = inject(&clean, &plan).expect("demo plan is valid");
    (series, plan, spec)
}

//! Report types and their text, JSON and CSV renderings.
//!
//! JSON reports carry `schema_version`; bump it on any breaking change to
//! field names or nesting.

use std::fmt::Write as _;

use arima_ao::diagnostics::{ComparisonTable, TestResult};
use arima_ao::estimation::{EstimationMethod, FitWarning};
use arima_ao::outlier::Termination;
use arima_ao::{ArimaOrder, DetectionConfig, OutlierRecord};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub ljung_box: Vec<TestResult>,
    pub ks_normal: Option<TestResult>,
    /// Residual time labels outside the boxplot fences.
    pub boxplot_flags: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema_version: u32,
    pub n_obs: usize,
    pub order: ArimaOrder,
    pub method: EstimationMethod,
    pub coefficients: Vec<Coefficient>,
    pub sigma2: f64,
    pub sse: f64,
    pub mse: f64,
    pub warnings: Vec<FitWarning>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalKind {
    JointRegression,
    Refit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalModelSummary {
    pub kind: FinalKind,
    pub coefficients: Vec<Coefficient>,
    pub mse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectReport {
    pub schema_version: u32,
    pub n_obs: usize,
    pub order: ArimaOrder,
    pub config: DetectionConfig,
    pub initial_fit: FitReport,
    pub outliers: Vec<OutlierRecord>,
    pub sigma_trail: Vec<f64>,
    pub comparison: ComparisonTable,
    pub iterations_run: usize,
    pub terminated_by: Termination,
    pub final_model: FinalModelSummary,
    pub final_diagnostics: Diagnostics,
}

pub fn to_json<T: Serialize>(report: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(report).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn order_label(order: ArimaOrder) -> String {
    format!("ARIMA({},{},{})", order.p, order.d, order.q)
}

fn method_label(method: &EstimationMethod) -> &'static str {
    match method {
        EstimationMethod::Ols => "least squares",
        EstimationMethod::ConditionalSumOfSquares => "conditional sum of squares",
    }
}

fn coefficient_table(out: &mut String, coefs: &[Coefficient]) {
    let _ = writeln!(out, "  {:<14} {:>12} {:>12}", "term", "estimate", "std.error");
    for c in coefs {
        let se = c.std_error.map_or_else(|| "-".to_string(), |s| format!("{s:.6}"));
        let _ = writeln!(out, "  {:<14} {:>12.6} {:>12}", c.name, c.estimate, se);
    }
}

fn diagnostics_text(out: &mut String, d: &Diagnostics) {
    if !d.ljung_box.is_empty() {
        let _ = writeln!(out, "Ljung-Box");
        let _ = writeln!(out, "  {:>5} {:>5} {:>12} {:>10}", "lag", "df", "Q", "p-value");
        for r in &d.ljung_box {
            let _ =
                writeln!(out, "  {:>5} {:>5} {:>12.4} {:>10.4}", r.lag.unwrap_or(0), r.df_or_n, r.statistic, r.p_value);
        }
    }
    if let Some(ks) = &d.ks_normal {
        let _ = writeln!(
            out,
            "Kolmogorov-Smirnov normality: D = {:.4}, p = {:.4} (n = {})",
            ks.statistic, ks.p_value, ks.df_or_n
        );
    }
    if !d.boxplot_flags.is_empty() {
        let flags: Vec<String> = d.boxplot_flags.iter().map(i64::to_string).collect();
        let _ = writeln!(out, "Residuals outside boxplot fences at t = {}", flags.join(", "));
    }
}

pub fn fit_text(r: &FitReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} fitted by {} on {} observations", order_label(r.order), method_label(&r.method), r.n_obs);
    let _ = writeln!(out);
    coefficient_table(&mut out, &r.coefficients);
    let _ = writeln!(out);
    let _ = writeln!(out, "sigma^2 = {:.6}   mse = {:.6}   sse = {:.6}", r.sigma2, r.mse, r.sse);
    for w in &r.warnings {
        let msg = match w {
            FitWarning::NonStationary => "AR polynomial has a root on or inside the unit circle",
            FitWarning::NonInvertible => "MA polynomial has a root on or inside the unit circle",
        };
        let _ = writeln!(out, "warning: {msg}");
    }
    let _ = writeln!(out);
    diagnostics_text(&mut out, &r.diagnostics);
    out
}

pub fn detect_text(r: &DetectReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Additive outlier search on {} observations, {}, critical value {}",
        r.n_obs,
        order_label(r.order),
        r.config.critical_value
    );
    let _ = writeln!(out);
    if r.outliers.is_empty() {
        let _ = writeln!(out, "No outliers detected.");
    } else {
        let _ = writeln!(out, "  {:>6} {:>12} {:>10} {:>9} {:>9}", "t", "omega", "lambda", "iteration", "tau^2");
        for o in &r.outliers {
            let _ = writeln!(
                out,
                "  {:>6} {:>12.6} {:>10.4} {:>9} {:>9.4}{}",
                o.t,
                o.omega_hat,
                o.lambda_hat,
                o.iteration,
                o.tau2,
                if o.edge { "  (series end)" } else { "" }
            );
        }
    }
    let _ = writeln!(
        out,
        "Stopped: {}",
        match r.terminated_by {
            Termination::NoCandidate => "no remaining candidate exceeds the critical value",
            Termination::MaxOutliers => "outlier limit reached",
            Termination::MaxIterations => "iteration limit reached",
        }
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "Model comparison");
    let _ = writeln!(out, "  {:<40} {:>10}", "model", "mse");
    for row in &r.comparison.rows {
        let _ = writeln!(out, "  {:<40} {:>10.6}", row.model_label, row.mse);
    }
    let _ = writeln!(out, "MSE improvement: {:.2}%", r.comparison.improvement_pct);
    let _ = writeln!(out);
    let kind = match r.final_model.kind {
        FinalKind::JointRegression => "joint regression with outlier indicators",
        FinalKind::Refit => "refit on the corrected series",
    };
    let _ = writeln!(out, "Final model ({kind})");
    coefficient_table(&mut out, &r.final_model.coefficients);
    let _ = writeln!(out);
    diagnostics_text(&mut out, &r.final_diagnostics);
    out
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let internal = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(header).map_err(internal)?;
    for row in rows {
        w.write_record(&row).map_err(internal)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn fit_csv(r: &FitReport) -> CliResult<String> {
    csv_string(
        &["term", "estimate", "std_error"],
        r.coefficients.iter().map(|c| vec![c.name.clone(), c.estimate.to_string(), opt(c.std_error)]),
    )
}

pub fn detect_csv(r: &DetectReport) -> CliResult<String> {
    csv_string(
        &["t", "omega_hat", "lambda_hat", "iteration", "tau2", "edge"],
        r.outliers.iter().map(|o| {
            vec![
                o.t.to_string(),
                o.omega_hat.to_string(),
                o.lambda_hat.to_string(),
                o.iteration.to_string(),
                o.tau2.to_string(),
                o.edge.to_string(),
            ]
        }),
    )
}

/// Two-column CSV `header0,header1`.
pub fn pairs_csv<A: ToString, B: ToString>(
    header: [&str; 2],
    rows: impl IntoIterator<Item = (A, B)>,
) -> CliResult<String> {
    csv_string(&header, rows.into_iter().map(|(a, b)| vec![a.to_string(), b.to_string()]))
}

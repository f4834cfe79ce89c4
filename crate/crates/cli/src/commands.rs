use std::path::{Path, PathBuf};

use arima_ao::diagnostics::{boxplot_fences, comparison_table, ks_normal, ljung_box};
use arima_ao::estimation::fit_arima;
use arima_ao::outlier::{detect_iterative, FinalModel};
use arima_ao::series::{acf, pacf};
use arima_ao::simgen::{demo_dataset, inject, simulate, InjectionPlan, SimSpec};
use arima_ao::{ArimaFit, ArimaOrder, DetectionConfig, TimeSeries};
use clap::Args;
use log::{info, warn};

use crate::error::{CliError, CliResult};
use crate::input::read_series;
use crate::output::write_atomic;
use crate::report::{
    detect_csv, detect_text, fit_csv, fit_text, pairs_csv, to_json, Coefficient, DetectReport, Diagnostics, FinalKind,
    FinalModelSummary, FitReport, Format, SCHEMA_VERSION,
};

fn parse_order(s: &str) -> Result<ArimaOrder, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("bad order component {p:?}")))
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        &[p, d, q] => Ok(ArimaOrder::new(p, d, q)),
        _ => Err("order must be three integers p,d,q".into()),
    }
}

fn parse_plan(s: &str) -> Result<InjectionPlan, String> {
    s.split(',')
        .filter(|e| !e.trim().is_empty())
        .map(|entry| {
            let (t, w) = entry.split_once(':').ok_or_else(|| format!("expected T:omega, found {entry:?}"))?;
            let t = t.trim().parse::<i64>().map_err(|_| format!("bad time index in {entry:?}"))?;
            let w = w.trim().parse::<f64>().map_err(|_| format!("bad magnitude in {entry:?}"))?;
            Ok((t, w))
        })
        .collect::<Result<Vec<_>, String>>()
        .map(InjectionPlan::new)
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Input CSV: a `value` column, or `t,value`.
    #[arg(short, long)]
    pub input: PathBuf,

    /// Model order as p,d,q.
    #[arg(long, value_parser = parse_order)]
    pub order: ArimaOrder,

    /// Fit without a constant term.
    #[arg(long)]
    pub no_intercept: bool,

    /// Ljung-Box lags.
    #[arg(long, value_delimiter = ',', default_value = "12,24,36")]
    pub lags: Vec<usize>,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Report destination; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,

    /// Directory for ACF, PACF and residual CSV files.
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Critical value for |lambda|.
    #[arg(long, default_value_t = 3.0)]
    pub critical: f64,

    #[arg(long, default_value_t = 10)]
    pub max_outliers: usize,

    #[arg(long, default_value_t = 20)]
    pub max_iterations: usize,

    /// Re-estimate the model after every detection.
    #[arg(long)]
    pub refit_each_iteration: bool,

    /// Residual positions skipped at the start of the scan (default: p).
    #[arg(long)]
    pub scan_margin: Option<usize>,

    /// Residual positions skipped at the end of the scan.
    #[arg(long, default_value_t = 0)]
    pub end_margin: usize,

    /// Write the outlier-corrected series here as `t,value` CSV.
    #[arg(long)]
    pub corrected: Option<PathBuf>,
}

impl DetectArgs {
    pub fn detection_config(&self) -> DetectionConfig {
        DetectionConfig {
            critical_value: self.critical,
            max_outliers: self.max_outliers,
            max_iterations: self.max_iterations,
            refit_each_iteration: self.refit_each_iteration,
            scan_margin: self.scan_margin,
            end_margin: self.end_margin,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Emit the bundled demo dataset and ignore the model flags.
    #[arg(long, conflicts_with_all = ["phi", "theta", "d", "intercept", "sigma", "n", "seed", "burn_in"])]
    pub demo: bool,

    /// AR coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub phi: Vec<f64>,

    /// MA coefficients (subtracted), comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub theta: Vec<f64>,

    #[arg(long, default_value_t = 0)]
    pub d: usize,

    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub intercept: f64,

    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,

    #[arg(long, default_value_t = 200)]
    pub n: usize,

    #[arg(long, required_unless_present = "demo")]
    pub seed: Option<u64>,

    #[arg(long)]
    pub burn_in: Option<usize>,

    /// Additive outliers as "T:omega,T:omega".
    #[arg(long, value_parser = parse_plan, allow_hyphen_values = true)]
    pub inject: Option<InjectionPlan>,

    /// Destination CSV; stdout when absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

impl SimulateArgs {
    pub fn spec(&self) -> SimSpec {
        SimSpec {
            order: ArimaOrder::new(self.phi.len(), self.d, self.theta.len()),
            phi: self.phi.clone(),
            theta: self.theta.clone(),
            intercept: self.intercept,
            sigma: self.sigma,
            n: self.n,
            seed: self.seed.unwrap_or_default(),
            burn_in: self.burn_in,
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn model_coefficients(fit: &ArimaFit) -> Vec<Coefficient> {
    let names = (1..=fit.phi().len())
        .map(|i| format!("phi{i}"))
        .chain((1..=fit.theta().len()).map(|i| format!("theta{i}")))
        .chain(fit.model.intercept.map(|_| "intercept".to_string()));
    let values = fit.phi().iter().chain(fit.theta()).copied().chain(fit.model.intercept);
    names
        .zip(values)
        .enumerate()
        .map(|(i, (name, estimate))| Coefficient {
            name,
            estimate,
            std_error: fit.coefficient_std_errors.get(i).copied(),
        })
        .collect()
}

fn diagnose(residuals: &TimeSeries, lags: &[usize], fitted_params: usize) -> CliResult<Diagnostics> {
    let usable: Vec<usize> = lags
        .iter()
        .copied()
        .filter(|&h| {
            let ok = h > fitted_params && h < residuals.len();
            if !ok {
                warn!("skipping Ljung-Box lag {h}: needs {fitted_params} < lag < {}", residuals.len());
            }
            ok
        })
        .collect();
    let ks = match ks_normal(residuals) {
        Ok(r) => Some(r),
        Err(e) => {
            warn!("skipping normality test: {e}");
            None
        }
    };
    Ok(Diagnostics {
        ljung_box: ljung_box(residuals, &usable, fitted_params)?,
        ks_normal: ks,
        boxplot_flags: boxplot_fences(residuals),
    })
}

fn write_plot_data(dir: &Path, residuals: &TimeSeries, max_lag: usize) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_owned(), source })?;
    let max_lag = max_lag.min(residuals.len().saturating_sub(1)).max(1);
    let r = acf(residuals, max_lag)?;
    write_atomic(&dir.join("acf.csv"), pairs_csv(["lag", "acf"], r.iter().enumerate())?.as_bytes())?;
    let p = pacf(residuals, max_lag)?;
    write_atomic(&dir.join("pacf.csv"), pairs_csv(["lag", "pacf"], p.iter().enumerate())?.as_bytes())?;
    write_atomic(&dir.join("residuals.csv"), pairs_csv(["t", "residual"], residuals.iter())?.as_bytes())?;
    info!("plot data written to {}", dir.display());
    Ok(())
}

fn fit_report(series: &TimeSeries, fit: &ArimaFit, lags: &[usize]) -> CliResult<FitReport> {
    let order = fit.order();
    Ok(FitReport {
        schema_version: SCHEMA_VERSION,
        n_obs: series.len(),
        order,
        method: fit.method.clone(),
        coefficients: model_coefficients(fit),
        sigma2: fit.sigma2,
        sse: fit.sse,
        mse: fit.mse,
        warnings: fit.warnings.clone(),
        diagnostics: diagnose(&fit.residuals, lags, order.p + order.q)?,
    })
}

/// Fit the model and build the report without writing anything.
pub fn build_fit(args: &ModelArgs, series: &TimeSeries) -> CliResult<(FitReport, ArimaFit)> {
    let fit = fit_arima(series, args.order, !args.no_intercept)?;
    for w in &fit.warnings {
        warn!("{w:?}");
    }
    Ok((fit_report(series, &fit, &args.lags)?, fit))
}

pub fn cmd_fit(args: &ModelArgs) -> CliResult<()> {
    let series = read_series(&args.input)?;
    let (report, fit) = build_fit(args, &series)?;
    if let Some(dir) = &args.plot_dir {
        write_plot_data(dir, &fit.residuals, args.lags.iter().copied().max().unwrap_or(36))?;
    }
    let text = match args.format {
        Format::Text => fit_text(&report),
        Format::Json => to_json(&report)?,
        Format::Csv => fit_csv(&report)?,
    };
    emit(args.output.as_deref(), &text)
}

/// Run the detection pipeline; returns the report, the corrected series and
/// the final-model residuals.
pub fn build_detect(args: &DetectArgs, series: &TimeSeries) -> CliResult<(DetectReport, TimeSeries, TimeSeries)> {
    let m = &args.model;
    let (initial_fit, fit) = build_fit(m, series)?;
    let config = args.detection_config();
    let result = detect_iterative(series, &fit, &config)?;
    let order = m.order;
    let with_intercept = !m.no_intercept;
    let base_label = format!("ARIMA({},{},{})", order.p, order.d, order.q);

    let omega_offset = usize::from(with_intercept) + order.p;
    let rows: Vec<(String, f64, Vec<f64>)> = result
        .ladder
        .iter()
        .enumerate()
        .map(|(k, step)| {
            let label = if step.outlier_times.is_empty() {
                base_label.clone()
            } else {
                let ts: Vec<String> = step.outlier_times.iter().map(i64::to_string).collect();
                format!("{base_label} + AO at {}", ts.join(", "))
            };
            let omegas = if order.q == 0 {
                step.coefficients[omega_offset..].to_vec()
            } else {
                result.outliers[..k].iter().map(|o| o.omega_hat).collect()
            };
            (label, step.mse, omegas)
        })
        .collect();
    let comparison = comparison_table(rows.iter().map(|(l, mse, w)| (l.clone(), mse, w.clone())))?;

    let times = result.outlier_times();
    let (final_model, residuals, fitted_params) = match &result.final_model {
        FinalModel::Joint(ols) => {
            let names = with_intercept
                .then(|| "intercept".to_string())
                .into_iter()
                .chain((1..=order.p).map(|i| format!("phi{i}")))
                .chain(times.iter().map(|t| format!("omega@{t}")));
            let coefficients = names
                .zip(ols.coefficients.iter().zip(&ols.std_errors))
                .map(|(name, (&estimate, &se))| Coefficient { name, estimate, std_error: Some(se) })
                .collect();
            let first = series.start() + (order.d + order.p) as i64;
            let residuals = TimeSeries::with_start(ols.residuals.clone(), first)?;
            (FinalModelSummary { kind: FinalKind::JointRegression, coefficients, mse: ols.mse }, residuals, order.p)
        }
        FinalModel::Refit(refit) => (
            FinalModelSummary { kind: FinalKind::Refit, coefficients: model_coefficients(refit), mse: refit.mse },
            refit.residuals.clone(),
            order.p + order.q,
        ),
    };
    let final_diagnostics = diagnose(&residuals, &m.lags, fitted_params)?;

    let report = DetectReport {
        schema_version: SCHEMA_VERSION,
        n_obs: series.len(),
        order,
        config,
        initial_fit,
        outliers: result.outliers.clone(),
        sigma_trail: result.sigma_trail.clone(),
        comparison,
        iterations_run: result.iterations_run,
        terminated_by: result.terminated_by,
        final_model,
        final_diagnostics,
    };
    Ok((report, result.corrected_series, residuals))
}

pub fn cmd_detect(args: &DetectArgs) -> CliResult<()> {
    let series = read_series(&args.model.input)?;
    let (report, corrected, residuals) = build_detect(args, &series)?;
    if let Some(path) = &args.corrected {
        write_atomic(path, pairs_csv(["t", "value"], corrected.iter())?.as_bytes())?;
    }
    if let Some(dir) = &args.model.plot_dir {
        write_plot_data(dir, &residuals, args.model.lags.iter().copied().max().unwrap_or(36))?;
        write_atomic(&dir.join("corrected.csv"), pairs_csv(["t", "value"], corrected.iter())?.as_bytes())?;
    }
    let text = match args.model.format {
        Format::Text => detect_text(&report),
        Format::Json => to_json(&report)?,
        Format::Csv => detect_csv(&report)?,
    };
    emit(args.model.output.as_deref(), &text)
}

pub fn build_simulation(args: &SimulateArgs) -> CliResult<TimeSeries> {
    let series = if args.demo { demo_dataset().0 } else { simulate(&args.spec())? };
    match &args.inject {
        Some(plan) => Ok(inject(&series, plan)?),
        None => Ok(series),
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let series = build_simulation(args)?;
    let mut text = String::from("value\n");
    for v in series.values() {
        text.push_str(&v.to_string());
        text.push('\n');
    }
    emit(args.output.as_deref(), &text)
}

//! Nelder-Mead simplex minimisation with deterministic restarts.

/// Reflection, expansion, contraction and shrink coefficients.
const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const RHO: f64 = 0.5;
const SIGMA: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    /// Objective evaluations allowed per run (initial run and each restart).
    pub max_evals: usize,
    /// Stop when `f_max − f_min ≤ rel_tol · |f_min|` across the simplex.
    pub rel_tol: f64,
    /// Restarts from the best point after the first run.
    pub restarts: usize,
    /// Relative perturbation applied to the restart point.
    pub restart_jitter: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { max_evals: 1000, rel_tol: 1e-10, restarts: 3, restart_jitter: 0.1 }
    }
}

#[derive(Debug, Clone)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub f_start: f64,
    pub evals: usize,
    /// Whether the last run met the tolerance before its budget ran out.
    pub converged: bool,
}

fn sanitize(f: f64) -> f64 {
    if f.is_nan() {
        f64::INFINITY
    } else {
        f
    }
}

/// Minimise `objective` from `start`; `steps[i]` sizes the initial simplex
/// along coordinate `i`.
pub fn minimize<F>(mut objective: F, start: &[f64], steps: &[f64], opts: &SimplexOptions) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let f_start = sanitize(objective(start));
    let mut best_x = start.to_vec();
    let mut best_f = f_start;
    let mut evals = 1;
    let mut converged = false;

    for run in 0..=opts.restarts {
        let origin: Vec<f64> = if run == 0 {
            start.to_vec()
        } else {
            // Alternate the sign pattern between restarts so successive
            // starts do not repeat.
            best_x
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let sign = if (i + run) % 2 == 0 { 1.0 } else { -1.0 };
                    v * (1.0 + sign * opts.restart_jitter)
                })
                .collect()
        };
        let (x, f, used, ok) = run_once(&mut objective, &origin, steps, opts);
        evals += used;
        converged = ok;
        if f < best_f {
            best_f = f;
            best_x = x;
        }
    }
    SimplexOutcome { x: best_x, f: best_f, f_start, evals, converged }
}

fn run_once<F>(objective: &mut F, origin: &[f64], steps: &[f64], opts: &SimplexOptions) -> (Vec<f64>, f64, usize, bool)
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = origin.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        sanitize(objective(x))
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((origin.to_vec(), eval(origin, &mut evals)));
    for i in 0..dim {
        let mut v = origin.to_vec();
        v[i] += steps[i];
        let f = eval(&v, &mut evals);
        simplex.push((v, f));
    }

    let mut converged = false;
    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let f_best = simplex[0].1;
        let f_worst = simplex[dim].1;
        if f_worst.is_finite() && (f_worst - f_best) <= opts.rel_tol * f_best.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }

        let centroid: Vec<f64> =
            (0..dim).map(|j| simplex[..dim].iter().map(|(x, _)| x[j]).sum::<f64>() / dim as f64).collect();
        let toward = |coef: f64, from: &[f64]| -> Vec<f64> {
            centroid.iter().zip(from).map(|(c, w)| c + coef * (w - c)).collect()
        };

        let worst = simplex[dim].0.clone();
        let reflected = toward(-ALPHA, &worst);
        let f_r = eval(&reflected, &mut evals);

        if f_r < f_best {
            let expanded = toward(-GAMMA, &worst);
            let f_e = eval(&expanded, &mut evals);
            simplex[dim] = if f_e < f_r { (expanded, f_e) } else { (reflected, f_r) };
        } else if f_r < simplex[dim - 1].1 {
            simplex[dim] = (reflected, f_r);
        } else {
            let (contracted, f_c) = if f_r < f_worst {
                let c = toward(-RHO, &worst);
                let f = eval(&c, &mut evals);
                (c, f)
            } else {
                let c = toward(RHO, &worst);
                let f = eval(&c, &mut evals);
                (c, f)
            };
            if f_c < f_worst.min(f_r) {
                simplex[dim] = (contracted, f_c);
            } else {
                let anchor = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let shrunk: Vec<f64> = anchor.iter().zip(&vertex.0).map(|(a, v)| a + SIGMA * (v - a)).collect();
                    let f = eval(&shrunk, &mut evals);
                    *vertex = (shrunk, f);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    (x, f, evals, converged)
}

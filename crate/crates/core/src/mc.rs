//! Monte Carlo driver: ordered per-path evaluation and deterministic
//! reductions.

use serde::Serialize;

/// Evaluates `f(path_id)` for `0..n_paths` and returns results in path order.
/// The output does not depend on `workers`.
pub fn map_paths<T, F>(n_paths: u64, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if workers > 1 {
        use rayon::prelude::*;
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            return pool.install(|| (0..n_paths).into_par_iter().map(&f).collect());
        }
    }
    let _ = workers;
    (0..n_paths).map(f).collect()
}

/// Neumaier-compensated sum, evaluated in slice order.
pub fn neumaier_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    /// Statistics over resolved (uncensored) values; `None` if all censored.
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    pub median: Option<f64>,
    pub censor_fraction: f64,
    pub n: usize,
}

impl MonteCarloSummary {
    /// `values[i] = None` marks a censored path.
    pub fn from_values(values: &[Option<f64>]) -> Self {
        let n = values.len();
        let mut resolved: Vec<f64> = values.iter().flatten().copied().collect();
        let censored = n - resolved.len();
        let censor_fraction = if n == 0 { 0.0 } else { censored as f64 / n as f64 };
        if resolved.is_empty() {
            return Self {
                mean: None,
                stderr: None,
                median: None,
                censor_fraction,
                n,
            };
        }
        let r = resolved.len() as f64;
        let mean = neumaier_sum(resolved.iter().copied()) / r;
        let stderr = if resolved.len() > 1 {
            let ss = neumaier_sum(resolved.iter().map(|x| (x - mean).powi(2)));
            (ss / (r - 1.0)).sqrt() / r.sqrt()
        } else {
            0.0
        };
        resolved.sort_by(f64::total_cmp);
        let mid = resolved.len() / 2;
        let median = if resolved.len() % 2 == 1 {
            resolved[mid]
        } else {
            0.5 * (resolved[mid - 1] + resolved[mid])
        };
        Self {
            mean: Some(mean),
            stderr: Some(stderr),
            median: Some(median),
            censor_fraction,
            n,
        }
    }
}

//! Reproducible discretized Brownian paths.
//!
//! Every path owns its generator, seeded from `(seed, path_id, component)`
//! through splitmix64, so a path never depends on which worker produced it
//! or in what order.

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimGrid {
    pub dt: f64,
    pub horizon: f64,
    pub n_steps: usize,
}

impl SimGrid {
    pub fn new(dt: f64, horizon: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        if !(horizon.is_finite() && horizon >= dt) {
            return Err(Error::InvalidParameter(format!(
                "horizon must be finite and at least dt, got {horizon}"
            )));
        }
        let ratio = horizon / dt;
        let rounded = ratio.round();
        // Treat horizon/dt within rounding noise of an integer as exact.
        let n_steps = if (ratio - rounded).abs() <= 1e-9 * rounded.max(1.0) {
            rounded as usize
        } else {
            ratio.ceil() as usize
        };
        Ok(Self { dt, horizon, n_steps })
    }

    /// Node `t_k`; the last node is pinned to the horizon.
    pub fn time(&self, k: usize) -> f64 {
        if k >= self.n_steps {
            self.horizon
        } else {
            (k as f64 * self.dt).min(self.horizon)
        }
    }

    /// Length of step `k` (from `t_{k−1}` to `t_k`), `k ≥ 1`.
    pub fn step(&self, k: usize) -> f64 {
        self.time(k) - self.time(k - 1)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_steps + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    pub grid: SimGrid,
    /// `values[j][k] = W_{j+1}(t_k)`.
    pub values: Vec<Vec<f64>>,
}

impl BrownianPath {
    pub fn dims(&self) -> usize {
        self.values.len()
    }

    pub fn component(&self, j: usize) -> &[f64] {
        &self.values[j]
    }

    /// Keeps every `factor`-th node, yielding the same path on a coarser grid.
    pub fn coarsen(&self, factor: usize) -> Result<BrownianPath> {
        if factor == 0 || self.grid.n_steps % factor != 0 {
            return Err(Error::InvalidParameter(format!(
                "coarsening factor {factor} must divide the {} steps",
                self.grid.n_steps
            )));
        }
        let dt = self.grid.dt * factor as f64;
        let grid = SimGrid {
            dt,
            horizon: self.grid.horizon,
            n_steps: self.grid.n_steps / factor,
        };
        let values = self
            .values
            .iter()
            .map(|w| w.iter().step_by(factor).copied().collect())
            .collect();
        Ok(BrownianPath { grid, values })
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn stream_seed(seed: u64, path_id: u64, component: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ path_id) ^ component.wrapping_add(1))
}

/// Generator for the per-path random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PathSource {
    pub seed: u64,
    pub zero_noise: bool,
}

impl PathSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            zero_noise: false,
        }
    }

    pub fn zero_noise(seed: u64) -> Self {
        Self {
            seed,
            zero_noise: true,
        }
    }

    pub fn path(&self, grid: &SimGrid, dims: usize, path_id: u64) -> BrownianPath {
        let values = (0..dims)
            .map(|j| {
                if self.zero_noise {
                    vec![0.0; grid.n_nodes()]
                } else {
                    brownian_component(grid, stream_seed(self.seed, path_id, j as u64))
                }
            })
            .collect();
        BrownianPath { grid: *grid, values }
    }
}

fn brownian_component(grid: &SimGrid, seed: u64) -> Vec<f64> {
    BrownianStream::new(*grid, seed).collect()
}

/// Node values `W(t_0), W(t_1), …` of one component, generated lazily.
/// Yields exactly the values stored by [`PathSource::path`].
#[derive(Debug, Clone)]
pub struct BrownianStream {
    grid: SimGrid,
    rng: Xoshiro256PlusPlus,
    k: usize,
    w: f64,
}

impl BrownianStream {
    fn new(grid: SimGrid, seed: u64) -> Self {
        Self {
            grid,
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            k: 0,
            w: 0.0,
        }
    }

    pub fn for_path(grid: &SimGrid, seed: u64, path_id: u64, component: usize) -> Self {
        Self::new(*grid, stream_seed(seed, path_id, component as u64))
    }
}

impl Iterator for BrownianStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if self.k > self.grid.n_steps {
            return None;
        }
        if self.k > 0 {
            let z: f64 = StandardNormal.sample(&mut self.rng);
            self.w += self.grid.step(self.k).sqrt() * z;
        }
        self.k += 1;
        Some(self.w)
    }
}

pub fn sample_path(grid: &SimGrid, dims: usize, seed: u64, path_id: u64) -> BrownianPath {
    PathSource::new(seed).path(grid, dims, path_id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_step_count() {
        let g = SimGrid::new(1e-3, 1.0).unwrap();
        assert_eq!(g.n_steps, 1000);
        assert_eq!(g.time(1000), 1.0);
        let g = SimGrid::new(0.3, 1.0).unwrap();
        assert_eq!(g.n_steps, 4);
        assert!((g.step(4) - 0.1).abs() < 1e-12);
        assert!(g.n_steps as f64 * g.dt >= g.horizon);
        assert!(SimGrid::new(0.0, 1.0).is_err());
        assert!(SimGrid::new(0.5, 0.1).is_err());
    }

    #[test]
    fn same_seed_and_id_gives_identical_paths() {
        let g = SimGrid::new(1e-2, 2.0).unwrap();
        let a = sample_path(&g, 2, 42, 7);
        let b = sample_path(&g, 2, 42, 7);
        assert_eq!(a, b);
        assert_ne!(a, sample_path(&g, 2, 42, 8));
        assert_ne!(a.values[0], a.values[1]);
        assert_eq!(a.values[0][0], 0.0);
    }

    #[test]
    fn stream_matches_stored_path() {
        let g = SimGrid::new(0.3, 1.0).unwrap();
        let p = sample_path(&g, 2, 8, 4);
        let s: Vec<f64> = BrownianStream::for_path(&g, 8, 4, 1).collect();
        assert_eq!(s, p.values[1]);
    }

    #[test]
    fn zero_noise_is_identically_zero() {
        let g = SimGrid::new(1e-2, 1.0).unwrap();
        let p = PathSource::zero_noise(1).path(&g, 1, 3);
        assert!(p.values[0].iter().all(|w| *w == 0.0));
    }

    #[test]
    fn coarsening_keeps_the_shared_nodes() {
        let g = SimGrid::new(0.01, 1.0).unwrap();
        let p = sample_path(&g, 1, 3, 0);
        let c = p.coarsen(4).unwrap();
        assert_eq!(c.grid.n_steps, 25);
        assert_eq!(c.values[0][25], p.values[0][100]);
        assert!(p.coarsen(3).is_err());
    }

    #[test]
    fn terminal_moments() {
        let n = 100_000;
        let g = SimGrid::new(1e-3, 1.0).unwrap();
        let finals: Vec<f64> = (0..n)
            .map(|i| *sample_path(&g, 1, 2024, i).values[0].last().unwrap())
            .collect();
        let mean = finals.iter().sum::<f64>() / n as f64;
        let var = finals.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn variance_grows_linearly() {
        let n = 10_000;
        let g = SimGrid::new(0.01, 1.0).unwrap();
        let mut sum = vec![0.0; g.n_nodes()];
        let mut sum_sq = vec![0.0; g.n_nodes()];
        for i in 0..n {
            let p = sample_path(&g, 1, 99, i);
            for (k, w) in p.values[0].iter().enumerate() {
                sum[k] += w;
                sum_sq[k] += w * w;
            }
        }
        let ts: Vec<f64> = (0..g.n_nodes()).map(|k| g.time(k)).collect();
        let vars: Vec<f64> = (0..g.n_nodes())
            .map(|k| {
                let m = sum[k] / n as f64;
                (sum_sq[k] - n as f64 * m * m) / (n - 1) as f64
            })
            .collect();
        let tm = ts.iter().sum::<f64>() / ts.len() as f64;
        let vm = vars.iter().sum::<f64>() / vars.len() as f64;
        let cov: f64 = ts.iter().zip(&vars).map(|(t, v)| (t - tm) * (v - vm)).sum();
        let var_t: f64 = ts.iter().map(|t| (t - tm).powi(2)).sum();
        let slope = cov / var_t;
        assert!((slope - 1.0).abs() < 0.03, "slope {slope}");
    }

    #[test]
    fn components_are_uncorrelated() {
        let n = 20_000u64;
        let g = SimGrid::new(0.01, 1.0).unwrap();
        let (mut sx, mut sy, mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            let p = sample_path(&g, 2, 5, i);
            let (x, y) = (p.values[0][100], p.values[1][100]);
            sx += x;
            sy += y;
            sxy += x * y;
            sxx += x * x;
            syy += y * y;
        }
        let nf = n as f64;
        let cov = sxy / nf - sx * sy / nf / nf;
        let corr = cov / ((sxx / nf - (sx / nf).powi(2)) * (syy / nf - (sy / nf).powi(2))).sqrt();
        assert!(corr.abs() < 4.0 / nf.sqrt(), "corr {corr}");
    }
}

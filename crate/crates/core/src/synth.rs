//! Seeded synthetic series with known coupling, for checking causal recovery.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two logistic maps where `c_yx` lets X drive Y and `c_xy` lets Y drive X,
/// each acting with a delay of `delay` steps:
///
/// ```text
/// x[t+1] = x[t] (r_x - r_x x[t] - c_xy y[t-d])
/// y[t+1] = y[t] (r_y - r_y y[t] - c_yx x[t-d])
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledMapConfig {
    pub r_x: f64,
    pub r_y: f64,
    pub c_xy: f64,
    pub c_yx: f64,
    pub delay: usize,
    pub len: usize,
    pub noise_sd: f64,
    pub seed: u64,
}

/// Steps discarded before recording.
pub const TRANSIENT: usize = 100;

impl Default for CoupledMapConfig {
    fn default() -> Self {
        CoupledMapConfig {
            r_x: 3.8,
            r_y: 3.5,
            c_xy: 0.0,
            c_yx: 0.1,
            delay: 0,
            len: 500,
            noise_sd: 0.0,
            seed: 0,
        }
    }
}

impl CoupledMapConfig {
    pub fn validate(&self) -> Result<()> {
        let rate_ok = |r: f64| r > 3.5 - 1e-12 && r < 4.0;
        if !rate_ok(self.r_x) || !rate_ok(self.r_y) {
            return Err(Error::Config("growth rates must lie in [3.5, 4.0)".into()));
        }
        if !(self.c_xy >= 0.0 && self.c_yx >= 0.0) {
            return Err(Error::Config("couplings must be nonnegative".into()));
        }
        if !(self.noise_sd >= 0.0) {
            return Err(Error::Config("noise sd must be nonnegative".into()));
        }
        if self.len == 0 {
            return Err(Error::Config("length must be positive".into()));
        }
        Ok(())
    }
}

/// Generates (X, Y); errors with the offending step if either map leaves (0, 1).
pub fn gen_coupled_logistic(cfg: &CoupledMapConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let total = TRANSIENT + cfg.len;
    let mut x = Vec::with_capacity(total);
    let mut y = Vec::with_capacity(total);
    x.push(rng.random_range(0.2..0.8));
    y.push(rng.random_range(0.2..0.8));
    for t in 0..total - 1 {
        let lagged = t.saturating_sub(cfg.delay);
        let xn = x[t] * (cfg.r_x - cfg.r_x * x[t] - cfg.c_xy * y[lagged]);
        let yn = y[t] * (cfg.r_y - cfg.r_y * y[t] - cfg.c_yx * x[lagged]);
        if !(xn > 0.0 && xn < 1.0 && yn > 0.0 && yn < 1.0) {
            return Err(Error::Diverged { step: t + 1 });
        }
        x.push(xn);
        y.push(yn);
    }
    let mut xs = x.split_off(TRANSIENT);
    let mut ys = y.split_off(TRANSIENT);
    if cfg.noise_sd > 0.0 {
        let noise = Normal::new(0.0, cfg.noise_sd).map_err(|e| Error::Config(e.to_string()))?;
        for v in xs.iter_mut().chain(ys.iter_mut()) {
            *v += noise.sample(&mut rng);
        }
    }
    Ok((xs, ys))
}

/// AR(1) with unit-variance Gaussian innovations, started from its
/// stationary distribution.
pub fn gen_ar1(phi: f64, len: usize, seed: u64) -> Result<Vec<f64>> {
    if !(phi.abs() < 1.0) {
        return Err(Error::Config("AR(1) coefficient must satisfy |phi| < 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(len);
    let z: f64 = StandardNormal.sample(&mut rng);
    let mut prev = z / (1.0 - phi * phi).sqrt();
    for _ in 0..len {
        let e: f64 = StandardNormal.sample(&mut rng);
        prev = phi * prev + e;
        out.push(prev);
    }
    Ok(out)
}

/// Lag-1 sample autocorrelation.
pub fn lag1_autocorrelation(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let denom: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    let num: f64 = x.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
    num / denom
}

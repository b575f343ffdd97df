//! Leaky echo state network with a ridge-regression readout.
//!
//! The reservoir matrix is drawn sparse-uniform and rescaled to a target
//! spectral radius. States follow
//!
//! ```text
//! u*_t = tanh(A u_{t-1} + W_in x_t)
//! u_t  = (1 - leak) u_{t-1} + leak u*_t
//! ```
//!
//! from `u_0 = 0`, and only the linear readout is trained.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector, Schur};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Matrices up to this size get a dense eigensolve for the spectral radius.
pub const DENSE_EIGEN_LIMIT: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReservoirConfig {
    /// Number of reservoir neurons.
    pub size: usize,
    /// Target spectral radius of the reservoir matrix, in (0, 1).
    pub spectral_radius: f64,
    /// Leak rate in (0, 1].
    pub leak: f64,
    /// Input weight scale.
    pub input_scale: f64,
    /// Probability that a weight is nonzero, in (0, 1].
    pub sparsity: f64,
    /// Ridge penalty on the readout.
    pub ridge: f64,
    pub seed: u64,
    #[serde(default)]
    pub washout: usize,
}

impl Default for ReservoirConfig {
    fn default() -> Self {
        ReservoirConfig::sentiment_to_activity()
    }
}

impl ReservoirConfig {
    /// Tuned values for predicting activity counts from sentiment.
    pub fn sentiment_to_activity() -> Self {
        ReservoirConfig {
            size: 150,
            spectral_radius: 0.1,
            leak: 0.5,
            input_scale: 0.9,
            sparsity: 0.1,
            ridge: 0.1,
            seed: 0,
            washout: 0,
        }
    }

    /// Tuned values for predicting sentiment from activity counts.
    pub fn activity_to_sentiment() -> Self {
        ReservoirConfig {
            size: 250,
            spectral_radius: 0.1,
            leak: 0.9,
            input_scale: 0.9,
            sparsity: 0.7,
            ridge: 100.0,
            seed: 0,
            washout: 0,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        ReservoirConfig { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.size == 0 {
            return bad("reservoir size must be positive");
        }
        if !(self.spectral_radius > 0.0 && self.spectral_radius < 1.0) {
            return bad("spectral radius must lie in (0, 1)");
        }
        if !(self.leak > 0.0 && self.leak <= 1.0) {
            return bad("leak must lie in (0, 1]");
        }
        if !(self.input_scale > 0.0 && self.input_scale.is_finite()) {
            return bad("input scale must be positive");
        }
        if !(self.sparsity > 0.0 && self.sparsity <= 1.0) {
            return bad("sparsity must lie in (0, 1]");
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return bad("ridge must be nonnegative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reservoir {
    /// N x N recurrent weights.
    pub weights: DMatrix<f64>,
    /// N input weights.
    pub input_weights: DVector<f64>,
    pub achieved_radius: f64,
}

impl Reservoir {
    pub fn size(&self) -> usize {
        self.input_weights.len()
    }
}

/// Largest eigenvalue magnitude. Dense Schur decomposition for small
/// matrices, subspace iteration otherwise or if Schur fails to converge.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.nrows() <= DENSE_EIGEN_LIMIT {
        if let Some(r) = dense_spectral_radius(m) {
            return r;
        }
    }
    power_spectral_radius(m)
}

pub fn dense_spectral_radius(m: &DMatrix<f64>) -> Option<f64> {
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)?;
    Some(
        schur
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max),
    )
}

/// Subspace iteration with Rayleigh-Ritz on a small block, so that a
/// dominant complex-conjugate pair is captured as well as a real eigenvalue.
pub fn power_spectral_radius(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let block = n.min(4);
    if n <= block {
        return dense_spectral_radius(m).unwrap_or(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut q = DMatrix::from_fn(n, block, |_, _| rng.random_range(-1.0..1.0));
    q = q.qr().q();
    let mut prev = f64::NAN;
    let mut stable = 0;
    for _ in 0..200_000 {
        let z = m * &q;
        if z.norm() == 0.0 {
            return 0.0;
        }
        let ritz = q.transpose() * &z;
        let estimate = dense_spectral_radius(&ritz).unwrap_or(0.0);
        q = z.qr().q();
        if (estimate - prev).abs() <= 1e-15 * estimate.max(f64::MIN_POSITIVE) {
            stable += 1;
            if stable >= 5 {
                return estimate;
            }
        } else {
            stable = 0;
        }
        prev = estimate;
    }
    prev
}

/// Draws the reservoir and input weights from the seeded generator, then
/// rescales the reservoir to the configured spectral radius.
pub fn build_reservoir(cfg: &ReservoirConfig) -> Result<Reservoir> {
    cfg.validate()?;
    let n = cfg.size;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut draw = |scale: f64| {
        let keep = rng.random_bool(cfg.sparsity);
        let v: f64 = rng.random_range(-1.0..=1.0);
        if keep {
            scale * v
        } else {
            0.0
        }
    };
    let raw = DMatrix::from_row_iterator(n, n, (0..n * n).map(|_| draw(1.0)).collect::<Vec<_>>());
    let input_weights = DVector::from_iterator(n, (0..n).map(|_| draw(cfg.input_scale)).collect::<Vec<_>>());
    let radius = spectral_radius(&raw);
    if !(radius > 1e-12) {
        return Err(Error::DegenerateReservoir);
    }
    let weights = raw * (cfg.spectral_radius / radius);
    let achieved_radius = spectral_radius(&weights);
    Ok(Reservoir {
        weights,
        input_weights,
        achieved_radius,
    })
}

/// Runs the leaky update from `initial` and returns the states column-wise
/// (N x T), excluding the initial state.
pub fn run_states_from(
    res: &Reservoir,
    leak: f64,
    inputs: &[f64],
    initial: &DVector<f64>,
) -> Result<DMatrix<f64>> {
    if let Some(i) = inputs.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteInput(i));
    }
    let n = res.size();
    let mut states = DMatrix::zeros(n, inputs.len());
    let mut u = initial.clone();
    let mut pre = DVector::zeros(n);
    for (t, &x) in inputs.iter().enumerate() {
        res.weights.mul_to(&u, &mut pre);
        pre.axpy(x, &res.input_weights, 1.0);
        for (ui, pi) in u.iter_mut().zip(pre.iter()) {
            *ui = (1.0 - leak) * *ui + leak * pi.tanh();
        }
        states.set_column(t, &u);
    }
    Ok(states)
}

/// States from the zero initial state.
pub fn run_states(res: &Reservoir, leak: f64, inputs: &[f64]) -> Result<DMatrix<f64>> {
    run_states_from(res, leak, inputs, &DVector::zeros(res.size()))
}

/// Solves `(U U^T + alpha I) w = U y` over the columns after `washout`.
pub fn train_readout(states: &DMatrix<f64>, targets: &[f64], alpha: f64, washout: usize) -> Result<DVector<f64>> {
    if states.ncols() != targets.len() {
        return Err(Error::LengthMismatch(states.ncols(), targets.len()));
    }
    let used = states.ncols().saturating_sub(washout);
    if used < states.nrows() {
        log::warn!(
            "readout trained on {used} samples for {} reservoir neurons",
            states.nrows()
        );
    }
    let u = states.columns(washout.min(states.ncols()), used);
    let y = DVector::from_column_slice(&targets[washout.min(targets.len())..]);
    let mut gram = &u * u.transpose();
    for i in 0..gram.nrows() {
        gram[(i, i)] += alpha;
    }
    let rhs = &u * y;
    solve_spd(gram, rhs, alpha)
}

pub(crate) fn solve_spd(gram: DMatrix<f64>, rhs: DVector<f64>, alpha: f64) -> Result<DVector<f64>> {
    let chol = gram.cholesky().ok_or(Error::SingularReadout)?;
    if alpha == 0.0 {
        let diag = chol.l_dirty().diagonal();
        let max = diag.iter().cloned().fold(0.0, f64::max);
        let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min > 1e-10 * max) {
            return Err(Error::SingularReadout);
        }
    }
    let w = chol.solve(&rhs);
    if w.iter().all(|v| v.is_finite()) {
        Ok(w)
    } else {
        Err(Error::SingularReadout)
    }
}

/// Mean and standard deviation used to z-score a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mean: f64,
    pub sd: f64,
}

impl Default for Normalization {
    fn default() -> Self {
        Normalization { mean: 0.0, sd: 1.0 }
    }
}

impl Normalization {
    /// Population statistics; a constant series gets `sd = 1`.
    pub fn fit(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        Normalization {
            mean,
            sd: if sd > 1e-12 { sd } else { 1.0 },
        }
    }

    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        values.iter().map(|v| (v - self.mean) / self.sd).collect()
    }

    pub fn invert(&self, v: f64) -> f64 {
        self.mean + self.sd * v
    }
}

/// A trained linear readout with an unpenalized intercept: predictions are
/// `target.mean + target.sd * w . (u - state_mean)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Readout {
    pub weights: DVector<f64>,
    pub state_mean: DVector<f64>,
    pub target: Normalization,
}

impl Readout {
    /// Ridge fit on state columns `states` (N x M) against `targets`; states
    /// and targets are centered first and the target is scaled to unit sd.
    pub fn fit(states: &DMatrix<f64>, targets: &[f64], alpha: f64) -> Result<Self> {
        if states.ncols() != targets.len() {
            return Err(Error::LengthMismatch(states.ncols(), targets.len()));
        }
        if targets.is_empty() {
            return Err(Error::LengthMismatch(0, 0));
        }
        let target = Normalization::fit(targets);
        let state_mean = states.column_mean();
        let mut centered = states.clone();
        for mut col in centered.column_iter_mut() {
            col -= &state_mean;
        }
        let z = DVector::from_iterator(targets.len(), targets.iter().map(|v| (v - target.mean) / target.sd));
        let mut gram = &centered * centered.transpose();
        for i in 0..gram.nrows() {
            gram[(i, i)] += alpha;
        }
        let rhs = &centered * z;
        Ok(Readout {
            weights: solve_spd(gram, rhs, alpha)?,
            state_mean,
            target,
        })
    }

    pub fn predict(&self, states: &DMatrix<f64>) -> Vec<f64> {
        let offset = self.weights.dot(&self.state_mean);
        (states.transpose() * &self.weights)
            .iter()
            .map(|v| self.target.invert(v - offset))
            .collect()
    }
}

/// A reservoir plus trained readout and the normalization of its input.
#[derive(Debug, Clone, PartialEq)]
pub struct EsnModel {
    pub config: ReservoirConfig,
    pub reservoir: Reservoir,
    pub readout: Option<Readout>,
    pub input_norm: Normalization,
}

impl EsnModel {
    pub fn new(config: ReservoirConfig) -> Result<Self> {
        Ok(EsnModel {
            reservoir: build_reservoir(&config)?,
            config,
            readout: None,
            input_norm: Normalization::default(),
        })
    }

    pub fn is_trained(&self) -> bool {
        self.readout.is_some()
    }

    /// Trains on one (input, target) pair of aligned series.
    pub fn fit(&mut self, inputs: &[f64], targets: &[f64]) -> Result<()> {
        self.fit_units(&[(inputs, targets)])
    }

    /// Trains on several units pooled together; the state is reset to zero
    /// at the start of each unit and the first `washout` steps of each unit
    /// are left out of the fit.
    pub fn fit_units(&mut self, units: &[(&[f64], &[f64])]) -> Result<()> {
        let mut all_inputs = Vec::new();
        for (x, y) in units {
            if x.len() != y.len() {
                return Err(Error::LengthMismatch(x.len(), y.len()));
            }
            all_inputs.extend_from_slice(x);
        }
        self.input_norm = Normalization::fit(&all_inputs);
        let washout = self.config.washout;
        let mut columns = Vec::new();
        let mut targets = Vec::new();
        for (x, y) in units {
            let states = run_states(&self.reservoir, self.config.leak, &self.input_norm.apply(x))?;
            for t in washout.min(y.len())..y.len() {
                columns.push(states.column(t).into_owned());
                targets.push(y[t]);
            }
        }
        if columns.is_empty() {
            return Err(Error::LengthMismatch(0, 0));
        }
        let pooled = DMatrix::from_columns(&columns);
        self.readout = Some(Readout::fit(&pooled, &targets, self.config.ridge)?);
        Ok(())
    }

    /// Predictions on the target scale, one per input.
    pub fn predict(&self, inputs: &[f64]) -> Result<Vec<f64>> {
        let readout = self.readout.as_ref().ok_or(Error::Untrained)?;
        let states = run_states(&self.reservoir, self.config.leak, &self.input_norm.apply(inputs))?;
        Ok(readout.predict(&states))
    }

    /// Writes the versioned text dump described in the README.
    pub fn write_to(&self, mut out: impl Write) -> std::io::Result<()> {
        let c = &self.config;
        let mut s = String::new();
        let _ = writeln!(s, "echocausal-esn 1");
        let _ = writeln!(s, "size={}", c.size);
        let _ = writeln!(s, "spectral_radius={}", c.spectral_radius);
        let _ = writeln!(s, "leak={}", c.leak);
        let _ = writeln!(s, "input_scale={}", c.input_scale);
        let _ = writeln!(s, "sparsity={}", c.sparsity);
        let _ = writeln!(s, "ridge={}", c.ridge);
        let _ = writeln!(s, "seed={}", c.seed);
        let _ = writeln!(s, "washout={}", c.washout);
        let _ = writeln!(s, "achieved_radius={}", self.reservoir.achieved_radius);
        let _ = writeln!(s, "input_mean={}", self.input_norm.mean);
        let _ = writeln!(s, "input_sd={}", self.input_norm.sd);
        let _ = writeln!(s, "trained={}", self.is_trained());
        if let Some(r) = &self.readout {
            let _ = writeln!(s, "target_mean={}", r.target.mean);
            let _ = writeln!(s, "target_sd={}", r.target.sd);
        }
        let _ = writeln!(s, "[weights]");
        for row in self.reservoir.weights.row_iter() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        let _ = writeln!(s, "[input_weights]");
        let line: Vec<String> = self.reservoir.input_weights.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{}", line.join(" "));
        if let Some(r) = &self.readout {
            for (name, v) in [("[readout]", &r.weights), ("[state_mean]", &r.state_mean)] {
                let _ = writeln!(s, "{name}");
                let line: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                let _ = writeln!(s, "{}", line.join(" "));
            }
        }
        out.write_all(s.as_bytes())
    }

    pub fn read_from(input: impl BufRead, source: &str) -> Result<Self> {
        let lines: Vec<String> = input
            .lines()
            .collect::<std::io::Result<_>>()
            .map_err(|e| Error::io(source, e))?;
        let perr = |line: usize, msg: &str| Error::parse(source, line, msg);
        if lines.first().map(String::as_str) != Some("echocausal-esn 1") {
            return Err(perr(1, "missing or unsupported header"));
        }
        let mut header = std::collections::HashMap::new();
        let mut idx = 1;
        while idx < lines.len() && !lines[idx].starts_with('[') {
            let (k, v) = lines[idx]
                .split_once('=')
                .ok_or_else(|| perr(idx + 1, "expected key=value"))?;
            header.insert(k.trim().to_string(), (idx + 1, v.trim().to_string()));
            idx += 1;
        }
        fn field<T: std::str::FromStr>(
            header: &std::collections::HashMap<String, (usize, String)>,
            key: &str,
            source: &str,
        ) -> Result<T> {
            let (line, v) = header
                .get(key)
                .ok_or_else(|| Error::parse(source, 1, format!("missing field {key}")))?;
            v.parse()
                .map_err(|_| Error::parse(source, *line, format!("bad value for {key}")))
        }
        let config = ReservoirConfig {
            size: field(&header, "size", source)?,
            spectral_radius: field(&header, "spectral_radius", source)?,
            leak: field(&header, "leak", source)?,
            input_scale: field(&header, "input_scale", source)?,
            sparsity: field(&header, "sparsity", source)?,
            ridge: field(&header, "ridge", source)?,
            seed: field(&header, "seed", source)?,
            washout: field(&header, "washout", source)?,
        };
        let n = config.size;
        let parse_row = |line: usize, text: &str, expect: usize| -> Result<Vec<f64>> {
            let row: Vec<f64> = text
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| perr(line, "bad number"))?;
            if row.len() != expect {
                return Err(perr(line, "wrong row length"));
            }
            Ok(row)
        };
        let mut section = |name: &str, rows: usize| -> Result<Vec<f64>> {
            if lines.get(idx).map(String::as_str) != Some(name) {
                return Err(perr(idx + 1, &format!("expected {name}")));
            }
            idx += 1;
            let mut out = Vec::with_capacity(rows * n);
            for _ in 0..rows {
                let text = lines.get(idx).ok_or_else(|| perr(idx + 1, "truncated"))?;
                out.extend(parse_row(idx + 1, text, n)?);
                idx += 1;
            }
            Ok(out)
        };
        let weights = DMatrix::from_row_slice(n, n, &section("[weights]", n)?);
        let input_weights = DVector::from_vec(section("[input_weights]", 1)?);
        let trained: bool = field(&header, "trained", source)?;
        let readout = if trained {
            Some(Readout {
                weights: DVector::from_vec(section("[readout]", 1)?),
                state_mean: DVector::from_vec(section("[state_mean]", 1)?),
                target: Normalization {
                    mean: field(&header, "target_mean", source)?,
                    sd: field(&header, "target_sd", source)?,
                },
            })
        } else {
            None
        };
        Ok(EsnModel {
            config,
            reservoir: Reservoir {
                weights,
                input_weights,
                achieved_radius: field(&header, "achieved_radius", source)?,
            },
            readout,
            input_norm: Normalization {
                mean: field(&header, "input_mean", source)?,
                sd: field(&header, "input_sd", source)?,
            },
        })
    }
}

/// Root-mean-squared error divided by the magnitude of the observed mean.
pub fn nrmse(pred: &[f64], obs: &[f64]) -> Result<f64> {
    if pred.len() != obs.len() {
        return Err(Error::LengthMismatch(pred.len(), obs.len()));
    }
    if obs.is_empty() {
        return Err(Error::LengthMismatch(0, 0));
    }
    let t = obs.len() as f64;
    let mean = obs.iter().sum::<f64>() / t;
    if mean.abs() < 1e-9 {
        return Err(Error::ZeroMeanTarget);
    }
    let mse = pred.iter().zip(obs).map(|(p, o)| (p - o).powi(2)).sum::<f64>() / t;
    Ok(mse.sqrt() / mean.abs())
}

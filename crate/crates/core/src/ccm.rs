//! Lag-scanned cross mapping with echo state networks.
//!
//! For each lag `tau` a readout is trained to map the reservoir state driven
//! by the input series at time `t` onto the target series at `t + tau`, and
//! the Pearson correlation between prediction and observation over the
//! aligned window gives `rho(tau)`. The lag positions of the two curves'
//! peaks (input X and input Y) determine the causal verdict.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::esn::{build_reservoir, nrmse, run_states, Normalization, Readout, Reservoir, ReservoirConfig};

/// Windows shorter than this are not fitted.
pub const MIN_WINDOW: usize = 10;

/// Peak correlations below this (in both directions) mark a weak relationship.
pub const WEAK_RHO: f64 = 0.2;

const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagGrid {
    pub min: i64,
    pub max: i64,
}

impl Default for LagGrid {
    fn default() -> Self {
        LagGrid { min: -30, max: 30 }
    }
}

impl LagGrid {
    pub fn new(min: i64, max: i64) -> Result<Self> {
        if !(min < 0 && max > 0) {
            return Err(Error::Config(format!("lag grid [{min}, {max}] must straddle zero")));
        }
        Ok(LagGrid { min, max })
    }

    pub fn lags(&self) -> impl Iterator<Item = i64> {
        self.min..=self.max
    }
}

/// Summation limits for one lag: `t` runs over `start..=end` (1-based) and
/// the target is read at `t + lag`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlignedWindow {
    pub lag: i64,
    pub start: usize,
    pub end: usize,
}

impl AlignedWindow {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }

    /// 0-based indices of the input/state positions.
    pub fn input_range(&self) -> std::ops::Range<usize> {
        self.start - 1..self.end
    }

    /// 0-based indices of the target positions.
    pub fn target_range(&self) -> std::ops::Range<usize> {
        let s = (self.start as i64 + self.lag - 1) as usize;
        s..s + self.len()
    }
}

/// `h(tau) = tau` for nonnegative lags, else 0; `t` runs from
/// `1 + |tau| - h(tau)` to `T - h(tau)`.
pub fn align_window(len: usize, lag: i64) -> Result<AlignedWindow> {
    if lag.unsigned_abs() as usize >= len {
        return Err(Error::LagOutOfRange { lag, len });
    }
    let h = lag.max(0) as usize;
    let abs = lag.unsigned_abs() as usize;
    Ok(AlignedWindow {
        lag,
        start: 1 + abs - h,
        end: len - h,
    })
}

/// Sample Pearson correlation, accumulated in a single pass with running
/// means and co-moments.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(Error::ConstantSeries);
    }
    let (mut ma, mut mb) = (0.0, 0.0);
    let (mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0);
    for (i, (&x, &y)) in a.iter().zip(b).enumerate() {
        let n = (i + 1) as f64;
        let dx = x - ma;
        let dy = y - mb;
        ma += dx / n;
        mb += dy / n;
        saa += dx * (x - ma);
        sbb += dy * (y - mb);
        sab += dx * (y - mb);
    }
    let scale_a = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let scale_b = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let tiny = 1e-24 * a.len() as f64;
    if saa <= tiny * scale_a * scale_a || sbb <= tiny * scale_b * scale_b {
        return Err(Error::ConstantSeries);
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagPoint {
    pub lag: i64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagCorrelationCurve {
    pub input_label: String,
    pub target_label: String,
    pub points: Vec<LagPoint>,
    /// Lags left out because the aligned window was too short or the fit failed.
    pub skipped: Vec<i64>,
    pub peak_lag: Option<i64>,
    pub peak_rho: Option<f64>,
}

impl LagCorrelationCurve {
    /// `"<input>-><target>"`.
    pub fn direction(&self) -> String {
        format!("{}->{}", self.input_label, self.target_label)
    }

    pub fn rho_at(&self, lag: i64) -> Option<f64> {
        self.points.iter().find(|p| p.lag == lag).map(|p| p.rho)
    }
}

/// Highest correlation; ties go to the smaller `|lag|`, then to the negative lag.
pub fn find_peak(points: &[LagPoint]) -> Option<LagPoint> {
    let mut best: Option<LagPoint> = None;
    for p in points {
        best = match best {
            None => Some(*p),
            Some(b) if p.rho > b.rho + TIE_EPS => Some(*p),
            Some(b) if (p.rho - b.rho).abs() <= TIE_EPS => {
                let key = |q: &LagPoint| (q.lag.unsigned_abs(), q.lag);
                if key(p) < key(&b) {
                    Some(*p)
                } else {
                    Some(b)
                }
            }
            keep => keep,
        };
    }
    best
}

/// One unit (e.g. a city) of aligned input and target series.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitSeries {
    pub name: String,
    pub input: Vec<f64>,
    pub target: Vec<f64>,
}

impl UnitSeries {
    pub fn new(name: impl Into<String>, input: Vec<f64>, target: Vec<f64>) -> Result<Self> {
        if input.len() != target.len() {
            return Err(Error::LengthMismatch(input.len(), target.len()));
        }
        Ok(UnitSeries {
            name: name.into(),
            input,
            target,
        })
    }
}

/// State columns and targets of every unit over the window for `lag`,
/// after dropping the first `washout` steps of each unit.
fn gather(states: &[DMatrix<f64>], targets: &[&[f64]], lag: i64, washout: usize) -> (Vec<DVector<f64>>, Vec<f64>) {
    let mut cols = Vec::new();
    let mut ys = Vec::new();
    for (s, y) in states.iter().zip(targets) {
        let Ok(w) = align_window(y.len(), lag) else {
            continue;
        };
        let first = w.start.max(washout + 1);
        if first > w.end || w.end + 1 - first < MIN_WINDOW {
            continue;
        }
        for t in first..=w.end {
            cols.push(s.column(t - 1).into_owned());
            ys.push(y[(t as i64 - 1 + lag) as usize]);
        }
    }
    (cols, ys)
}

fn unit_states(res: &Reservoir, leak: f64, norm: &Normalization, inputs: &[&[f64]]) -> Result<Vec<DMatrix<f64>>> {
    inputs
        .iter()
        .map(|x| run_states(res, leak, &norm.apply(x)))
        .collect()
}

/// Cross-map curve for a single pair of series.
pub fn cross_map_curve(
    input: &[f64],
    target: &[f64],
    cfg: &ReservoirConfig,
    grid: &LagGrid,
) -> Result<LagCorrelationCurve> {
    let unit = UnitSeries::new("unit", input.to_vec(), target.to_vec())?;
    cross_map_units(&[unit], cfg, grid, "X", "Y")
}

/// Cross-map curve with the units pooled: one reservoir, states reset per
/// unit, one readout per lag fitted on all units' aligned windows, and
/// `rho(tau)` computed over the pooled windows.
pub fn cross_map_units(
    units: &[UnitSeries],
    cfg: &ReservoirConfig,
    grid: &LagGrid,
    input_label: &str,
    target_label: &str,
) -> Result<LagCorrelationCurve> {
    let res = build_reservoir(cfg)?;
    let pooled: Vec<f64> = units.iter().flat_map(|u| u.input.iter().copied()).collect();
    let norm = Normalization::fit(&pooled);
    let inputs: Vec<&[f64]> = units.iter().map(|u| u.input.as_slice()).collect();
    let targets: Vec<&[f64]> = units.iter().map(|u| u.target.as_slice()).collect();
    let states = unit_states(&res, cfg.leak, &norm, &inputs)?;

    let lags: Vec<i64> = grid.lags().collect();
    let results: Vec<(i64, Option<f64>)> = lags
        .par_iter()
        .map(|&lag| {
            let (cols, ys) = gather(&states, &targets, lag, cfg.washout);
            if ys.len() < MIN_WINDOW {
                return (lag, None);
            }
            let u = DMatrix::from_columns(&cols);
            let rho = Readout::fit(&u, &ys, cfg.ridge)
                .and_then(|r| pearson(&r.predict(&u), &ys))
                .ok();
            (lag, rho)
        })
        .collect();

    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (lag, rho) in results {
        match rho {
            Some(rho) => points.push(LagPoint { lag, rho }),
            None => skipped.push(lag),
        }
    }
    if !skipped.is_empty() {
        log::warn!("{input_label}->{target_label}: skipped lags {skipped:?}");
    }
    let peak = find_peak(&points);
    Ok(LagCorrelationCurve {
        input_label: input_label.to_string(),
        target_label: target_label.to_string(),
        points,
        skipped,
        peak_lag: peak.map(|p| p.lag),
        peak_rho: peak.map(|p| p.rho),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    XCausesY,
    YCausesX,
    Bidirectional,
    InstantaneousBidirectional,
    DelayedCoupling,
    Inconclusive,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match self {
            Classification::XCausesY => "X_causes_Y",
            Classification::YCausesX => "Y_causes_X",
            Classification::Bidirectional => "bidirectional",
            Classification::InstantaneousBidirectional => "instantaneous_bidirectional",
            Classification::DelayedCoupling => "delayed_coupling",
            Classification::Inconclusive => "inconclusive",
        }
    }

    pub fn is_directional(self) -> bool {
        !matches!(self, Classification::Inconclusive)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalVerdict {
    pub classification: Classification,
    /// Peak of the curve with X as input and Y as target.
    pub peak_lag_xy: Option<i64>,
    pub peak_rho_xy: Option<f64>,
    /// Peak of the curve with Y as input and X as target.
    pub peak_lag_yx: Option<i64>,
    pub peak_rho_yx: Option<f64>,
    /// Both peak correlations below [`WEAK_RHO`].
    pub weak: bool,
}

impl CausalVerdict {
    /// A directional classification without the weak-relationship note.
    pub fn is_strong_directional(&self) -> bool {
        self.classification.is_directional() && !self.weak
    }

    pub fn summary(&self) -> String {
        let opt = |v: Option<f64>| v.map_or("NA".to_string(), |v| v.to_string());
        let lag = |v: Option<i64>| v.map_or("NA".to_string(), |v| v.to_string());
        let mut s = format!("classification={}\n", self.classification);
        s += &format!("peak_lag_xy={}\npeak_rho_xy={}\n", lag(self.peak_lag_xy), opt(self.peak_rho_xy));
        s += &format!("peak_lag_yx={}\npeak_rho_yx={}\n", lag(self.peak_lag_yx), opt(self.peak_rho_yx));
        s += &format!("weak_relationship={}\n", self.weak);
        s += "tie_rule=max rho, then smallest |lag|, then negative lag\n";
        s
    }
}

/// Verdict from the two peaks. `xy` is the curve with X as input predicting
/// Y at `t + tau`; `yx` the reverse.
///
/// | xy peak | yx peak | verdict |
/// |---|---|---|
/// | + | - | X causes Y |
/// | - | + | Y causes X |
/// | - | - | bidirectional |
/// | 0 | 0 | instantaneous bidirectional |
/// | + | + | delayed coupling |
/// | zero with nonzero | | inconclusive |
pub fn classify_peaks(lag_xy: i64, lag_yx: i64, rho_xy: f64, rho_yx: f64) -> CausalVerdict {
    use std::cmp::Ordering::*;
    let classification = match (lag_xy.cmp(&0), lag_yx.cmp(&0)) {
        (Greater, Less) => Classification::XCausesY,
        (Less, Greater) => Classification::YCausesX,
        (Less, Less) => Classification::Bidirectional,
        (Equal, Equal) => Classification::InstantaneousBidirectional,
        (Greater, Greater) => Classification::DelayedCoupling,
        _ => Classification::Inconclusive,
    };
    CausalVerdict {
        classification,
        peak_lag_xy: Some(lag_xy),
        peak_rho_xy: Some(rho_xy),
        peak_lag_yx: Some(lag_yx),
        peak_rho_yx: Some(rho_yx),
        weak: rho_xy.abs() < WEAK_RHO && rho_yx.abs() < WEAK_RHO,
    }
}

pub fn classify(curve_xy: &LagCorrelationCurve, curve_yx: &LagCorrelationCurve) -> CausalVerdict {
    match (curve_xy.peak_lag, curve_xy.peak_rho, curve_yx.peak_lag, curve_yx.peak_rho) {
        (Some(lx), Some(rx), Some(ly), Some(ry)) => classify_peaks(lx, ly, rx, ry),
        _ => CausalVerdict {
            classification: Classification::Inconclusive,
            peak_lag_xy: curve_xy.peak_lag,
            peak_rho_xy: curve_xy.peak_rho,
            peak_lag_yx: curve_yx.peak_lag,
            peak_rho_yx: curve_yx.peak_rho,
            weak: true,
        },
    }
}

/// Both curves for a pair and the verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossMapAnalysis {
    pub xy: LagCorrelationCurve,
    pub yx: LagCorrelationCurve,
    pub verdict: CausalVerdict,
}

/// Runs both directions over pooled units of (X, Y) and classifies.
/// `units[i].input` holds X and `units[i].target` holds Y.
pub fn analyze_pair(
    units: &[UnitSeries],
    cfg_xy: &ReservoirConfig,
    cfg_yx: &ReservoirConfig,
    grid: &LagGrid,
    x_label: &str,
    y_label: &str,
) -> Result<CrossMapAnalysis> {
    let swapped: Vec<UnitSeries> = units
        .iter()
        .map(|u| UnitSeries {
            name: u.name.clone(),
            input: u.target.clone(),
            target: u.input.clone(),
        })
        .collect();
    let xy = cross_map_units(units, cfg_xy, grid, x_label, y_label)?;
    let yx = cross_map_units(&swapped, cfg_yx, grid, y_label, x_label)?;
    let verdict = classify(&xy, &yx);
    Ok(CrossMapAnalysis { xy, yx, verdict })
}

/// Lists of values per hyperparameter; the grid is their Cartesian product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub spectral_radius: Vec<f64>,
    pub leak: Vec<f64>,
    pub size: Vec<usize>,
    pub sparsity: Vec<f64>,
    pub ridge: Vec<f64>,
    pub input_scale: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub washout: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            spectral_radius: vec![0.1, 0.5, 0.9],
            leak: vec![0.1, 0.5, 0.9],
            size: vec![50, 150, 250],
            sparsity: vec![0.1, 0.4, 0.7],
            ridge: vec![0.1, 1.0, 10.0, 100.0],
            input_scale: vec![0.3, 0.6, 0.9],
            seed: 0,
            washout: 0,
        }
    }
}

impl GridSpec {
    pub fn expand(&self) -> Vec<ReservoirConfig> {
        let mut out = Vec::new();
        for &spectral_radius in &self.spectral_radius {
            for &leak in &self.leak {
                for &size in &self.size {
                    for &sparsity in &self.sparsity {
                        for &ridge in &self.ridge {
                            for &input_scale in &self.input_scale {
                                out.push(ReservoirConfig {
                                    size,
                                    spectral_radius,
                                    leak,
                                    input_scale,
                                    sparsity,
                                    ridge,
                                    seed: self.seed,
                                    washout: self.washout,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvFold {
    pub config_index: usize,
    pub held_out: String,
    pub nrmse: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub configs: Vec<ReservoirConfig>,
    pub folds: Vec<CvFold>,
    /// Mean held-out NRMSE per config; `None` when any fold failed.
    pub scores: Vec<Option<f64>>,
    pub winner: Option<usize>,
}

impl CvReport {
    pub fn winner_config(&self) -> Option<&ReservoirConfig> {
        self.winner.map(|i| &self.configs[i])
    }
}

fn fold_nrmse(
    res: &Reservoir,
    cfg: &ReservoirConfig,
    train: &[&UnitSeries],
    test: &UnitSeries,
    lag: i64,
) -> Result<f64> {
    let pooled: Vec<f64> = train.iter().flat_map(|u| u.input.iter().copied()).collect();
    let norm = Normalization::fit(&pooled);
    let inputs: Vec<&[f64]> = train.iter().map(|u| u.input.as_slice()).collect();
    let targets: Vec<&[f64]> = train.iter().map(|u| u.target.as_slice()).collect();
    let states = unit_states(res, cfg.leak, &norm, &inputs)?;
    let (cols, ys) = gather(&states, &targets, lag, cfg.washout);
    if ys.len() < MIN_WINDOW {
        return Err(Error::Config(format!("training window too short at lag {lag}")));
    }
    let readout = Readout::fit(&DMatrix::from_columns(&cols), &ys, cfg.ridge)?;
    let test_states = unit_states(res, cfg.leak, &norm, &[test.input.as_slice()])?;
    let (cols, obs) = gather(&test_states, &[test.target.as_slice()], lag, cfg.washout);
    if obs.is_empty() {
        return Err(Error::Config(format!("held-out window too short at lag {lag}")));
    }
    let pred = readout.predict(&DMatrix::from_columns(&cols));
    nrmse(&pred, &obs)
}

/// Leave-one-unit-out grid search: every config is scored by its mean
/// held-out NRMSE, the winner is the lowest score with ties going to the
/// smaller reservoir, then the smaller ridge. Units are processed in name
/// order, so the result does not depend on the order they are passed in.
pub fn loo_cv_grid_search(units: &[UnitSeries], grid: &[ReservoirConfig], lag: i64) -> Result<CvReport> {
    if units.len() < 2 {
        return Err(Error::Config("leave-one-out needs at least 2 units".into()));
    }
    if grid.is_empty() {
        return Err(Error::Config("empty grid".into()));
    }
    let mut ordered: Vec<&UnitSeries> = units.iter().collect();
    ordered.sort_by(|a, b| a.name.cmp(&b.name));

    let per_config: Vec<Vec<CvFold>> = grid
        .par_iter()
        .enumerate()
        .map(|(ci, cfg)| {
            let res = match build_reservoir(cfg) {
                Ok(r) => r,
                Err(e) => {
                    return ordered
                        .iter()
                        .map(|u| CvFold {
                            config_index: ci,
                            held_out: u.name.clone(),
                            nrmse: None,
                            error: Some(e.to_string()),
                        })
                        .collect()
                }
            };
            (0..ordered.len())
                .map(|k| {
                    let train: Vec<&UnitSeries> = ordered
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != k)
                        .map(|(_, u)| *u)
                        .collect();
                    let result = fold_nrmse(&res, cfg, &train, ordered[k], lag);
                    CvFold {
                        config_index: ci,
                        held_out: ordered[k].name.clone(),
                        nrmse: result.as_ref().ok().copied(),
                        error: result.err().map(|e| e.to_string()),
                    }
                })
                .collect()
        })
        .collect();

    let scores: Vec<Option<f64>> = per_config
        .iter()
        .map(|folds| {
            let vals: Option<Vec<f64>> = folds.iter().map(|f| f.nrmse.filter(|v| v.is_finite())).collect();
            vals.map(|v| v.iter().sum::<f64>() / v.len() as f64)
        })
        .collect();

    let winner = scores
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.map(|s| (i, s)))
        .min_by(|(i, a), (j, b)| {
            a.total_cmp(b)
                .then(grid[*i].size.cmp(&grid[*j].size))
                .then(grid[*i].ridge.total_cmp(&grid[*j].ridge))
                .then(i.cmp(j))
        })
        .map(|(i, _)| i);

    Ok(CvReport {
        configs: grid.to_vec(),
        folds: per_config.into_iter().flatten().collect(),
        scores,
        winner,
    })
}

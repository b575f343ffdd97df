//! Python bindings: text scoring, synthetic series, echo state networks and
//! cross-mapping causality.

use echocausal::ccm::{self, LagGrid, UnitSeries};
use echocausal::esn::{self, EsnModel, ReservoirConfig};
use echocausal::lexicon::Emotion;
use echocausal::sentiment::{self, Analyzer};
use echocausal::synth::{self, CoupledMapConfig};
use echocausal::text;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: echocausal::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Reservoir hyperparameters.
#[pyclass(name = "ReservoirConfig", from_py_object)]
#[derive(Clone)]
struct PyReservoirConfig {
    inner: ReservoirConfig,
}

#[pymethods]
impl PyReservoirConfig {
    #[new]
    #[pyo3(signature = (size=150, spectral_radius=0.1, leak=0.5, input_scale=0.9, sparsity=0.1, ridge=0.1, seed=0, washout=0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        size: usize,
        spectral_radius: f64,
        leak: f64,
        input_scale: f64,
        sparsity: f64,
        ridge: f64,
        seed: u64,
        washout: usize,
    ) -> PyResult<Self> {
        let inner = ReservoirConfig {
            size,
            spectral_radius,
            leak,
            input_scale,
            sparsity,
            ridge,
            seed,
            washout,
        };
        inner.validate().map_err(err)?;
        Ok(PyReservoirConfig { inner })
    }

    /// N=150, lambda=0.1, psi=0.5, p_s=0.1, alpha=0.1, gamma=0.9.
    #[staticmethod]
    fn sentiment_to_activity() -> Self {
        PyReservoirConfig {
            inner: ReservoirConfig::sentiment_to_activity(),
        }
    }

    /// N=250, lambda=0.1, psi=0.9, p_s=0.7, alpha=100, gamma=0.9.
    #[staticmethod]
    fn activity_to_sentiment() -> Self {
        PyReservoirConfig {
            inner: ReservoirConfig::activity_to_sentiment(),
        }
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size
    }
    #[getter]
    fn spectral_radius(&self) -> f64 {
        self.inner.spectral_radius
    }
    #[getter]
    fn leak(&self) -> f64 {
        self.inner.leak
    }
    #[getter]
    fn input_scale(&self) -> f64 {
        self.inner.input_scale
    }
    #[getter]
    fn sparsity(&self) -> f64 {
        self.inner.sparsity
    }
    #[getter]
    fn ridge(&self) -> f64 {
        self.inner.ridge
    }
    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }
    #[getter]
    fn washout(&self) -> usize {
        self.inner.washout
    }

    fn with_seed(&self, seed: u64) -> Self {
        PyReservoirConfig {
            inner: self.inner.with_seed(seed),
        }
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "ReservoirConfig(size={}, spectral_radius={}, leak={}, input_scale={}, sparsity={}, ridge={}, seed={}, washout={})",
            c.size, c.spectral_radius, c.leak, c.input_scale, c.sparsity, c.ridge, c.seed, c.washout
        )
    }
}

/// Leaky echo state network with a ridge readout.
#[pyclass(name = "EchoStateNetwork")]
struct PyEsn {
    inner: EsnModel,
}

#[pymethods]
impl PyEsn {
    #[new]
    fn new(config: PyReservoirConfig) -> PyResult<Self> {
        Ok(PyEsn {
            inner: EsnModel::new(config.inner).map_err(err)?,
        })
    }

    #[getter]
    fn achieved_radius(&self) -> f64 {
        self.inner.reservoir.achieved_radius
    }

    #[getter]
    fn is_trained(&self) -> bool {
        self.inner.is_trained()
    }

    fn fit(&mut self, inputs: Vec<f64>, targets: Vec<f64>) -> PyResult<()> {
        self.inner.fit(&inputs, &targets).map_err(err)
    }

    fn predict(&self, inputs: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.predict(&inputs).map_err(err)
    }
}

/// Vader polarity and NRC emotion scoring with the bundled lexicons.
#[pyclass(name = "Analyzer")]
struct PyAnalyzer {
    inner: Analyzer,
}

#[pymethods]
impl PyAnalyzer {
    #[new]
    fn new() -> Self {
        PyAnalyzer {
            inner: Analyzer::bundled(),
        }
    }

    /// Tokens of artifact-stripped text, emoticons kept whole.
    fn tokenize(&self, text: &str) -> Vec<String> {
        self.inner
            .doc(&text::strip_artifacts(text), "")
            .tokens
            .into_iter()
            .map(|t| t.surface)
            .collect()
    }

    /// Dict with negative, neutral, positive, compound and `emotions`
    /// (frequency per emotion).
    fn score<'py>(&self, py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
        let (s, e) = self.inner.score_text(text);
        let d = PyDict::new(py);
        d.set_item("negative", s.negative)?;
        d.set_item("neutral", s.neutral)?;
        d.set_item("positive", s.positive)?;
        d.set_item("compound", s.compound)?;
        let emotions = PyDict::new(py);
        for em in Emotion::ALL {
            emotions.set_item(em.name(), e.frequency(em))?;
        }
        d.set_item("emotions", emotions)?;
        Ok(d)
    }
}

#[pyfunction]
fn strip_artifacts(text: &str) -> String {
    text::strip_artifacts(text)
}

#[pyfunction]
#[pyo3(signature = (sum, alpha=15.0))]
fn normalize(sum: f64, alpha: f64) -> f64 {
    sentiment::normalize(sum, alpha)
}

#[pyfunction]
fn pearson(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    if a.len() != b.len() {
        return Err(err(echocausal::Error::LengthMismatch(a.len(), b.len())));
    }
    ccm::pearson(&a, &b).map_err(err)
}

#[pyfunction]
fn nrmse(pred: Vec<f64>, obs: Vec<f64>) -> PyResult<f64> {
    esn::nrmse(&pred, &obs).map_err(err)
}

/// 1-based (start, end) of the summation window for lag `tau`.
#[pyfunction]
fn align_window(length: usize, tau: i64) -> PyResult<(usize, usize)> {
    let w = ccm::align_window(length, tau).map_err(err)?;
    Ok((w.start, w.end))
}

#[pyfunction]
#[pyo3(signature = (seed=0, length=500, c_yx=0.1, c_xy=0.0, delay=0, r_x=3.8, r_y=3.5, noise_sd=0.0))]
#[allow(clippy::too_many_arguments)]
fn coupled_logistic(
    seed: u64,
    length: usize,
    c_yx: f64,
    c_xy: f64,
    delay: usize,
    r_x: f64,
    r_y: f64,
    noise_sd: f64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    synth::gen_coupled_logistic(&CoupledMapConfig {
        r_x,
        r_y,
        c_xy,
        c_yx,
        delay,
        len: length,
        noise_sd,
        seed,
    })
    .map_err(err)
}

#[pyfunction]
fn ar1(phi: f64, length: usize, seed: u64) -> PyResult<Vec<f64>> {
    synth::gen_ar1(phi, length, seed).map_err(err)
}

fn verdict_dict<'py>(py: Python<'py>, v: &ccm::CausalVerdict) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("classification", v.classification.label())?;
    d.set_item("peak_lag_xy", v.peak_lag_xy)?;
    d.set_item("peak_rho_xy", v.peak_rho_xy)?;
    d.set_item("peak_lag_yx", v.peak_lag_yx)?;
    d.set_item("peak_rho_yx", v.peak_rho_yx)?;
    d.set_item("weak", v.weak)?;
    Ok(d)
}

#[pyfunction]
fn classify_peaks<'py>(
    py: Python<'py>,
    lag_xy: i64,
    lag_yx: i64,
    rho_xy: f64,
    rho_yx: f64,
) -> PyResult<Bound<'py, PyDict>> {
    verdict_dict(py, &ccm::classify_peaks(lag_xy, lag_yx, rho_xy, rho_yx))
}

/// Cross-maps X and Y both ways over `lag_min..=lag_max` and classifies.
/// Returns a dict with the verdict fields plus `curve_xy` and `curve_yx` as
/// lists of (tau, rho).
#[pyfunction]
#[pyo3(signature = (x, y, config=None, config_yx=None, lag_min=-30, lag_max=30))]
fn cross_map<'py>(
    py: Python<'py>,
    x: Vec<f64>,
    y: Vec<f64>,
    config: Option<PyReservoirConfig>,
    config_yx: Option<PyReservoirConfig>,
    lag_min: i64,
    lag_max: i64,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg_xy = config.map(|c| c.inner).unwrap_or_default();
    let cfg_yx = config_yx
        .map(|c| c.inner)
        .unwrap_or_else(|| cfg_xy.with_seed(cfg_xy.seed.wrapping_add(1)));
    let grid = LagGrid::new(lag_min, lag_max).map_err(err)?;
    let units = vec![UnitSeries::new("pair", x, y).map_err(err)?];
    let a = py
        .detach(|| ccm::analyze_pair(&units, &cfg_xy, &cfg_yx, &grid, "x", "y"))
        .map_err(err)?;
    let d = verdict_dict(py, &a.verdict)?;
    let curve = |c: &ccm::LagCorrelationCurve| c.points.iter().map(|p| (p.lag, p.rho)).collect::<Vec<_>>();
    d.set_item("curve_xy", curve(&a.xy))?;
    d.set_item("curve_yx", curve(&a.yx))?;
    Ok(d)
}

#[pymodule]
fn echocausal_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyReservoirConfig>()?;
    m.add_class::<PyEsn>()?;
    m.add_class::<PyAnalyzer>()?;
    m.add_function(wrap_pyfunction!(strip_artifacts, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(nrmse, m)?)?;
    m.add_function(wrap_pyfunction!(align_window, m)?)?;
    m.add_function(wrap_pyfunction!(coupled_logistic, m)?)?;
    m.add_function(wrap_pyfunction!(ar1, m)?)?;
    m.add_function(wrap_pyfunction!(classify_peaks, m)?)?;
    m.add_function(wrap_pyfunction!(cross_map, m)?)?;
    Ok(())
}

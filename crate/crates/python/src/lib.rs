//! Python bindings. Fields cross the boundary as flat row-major lists.

use pyo3::create_exception;
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use condgamma::gpe_single::check_eta_properties;
use condgamma::sharp::{self, TrendMode, TrendOptions};
use condgamma::{symmetry, tf, Error, GridSpec, InitKind};

create_exception!(condgamma, ConvergenceError, PyRuntimeError, "A solver hit its iteration cap.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::NonConvergence { .. } => ConvergenceError::new_err(e.to_string()),
        Error::Io(_) => PyIOError::new_err(e.to_string()),
        Error::MassRepair { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Params {
    inner: condgamma::Params,
}

#[pymethods]
impl Params {
    #[new]
    #[pyo3(signature = (eps, g_eps2=40.0, alpha1=0.5, n=256, tol=1e-8, max_iters=200_000, seed=0))]
    fn new(eps: f64, g_eps2: f64, alpha1: f64, n: usize, tol: f64, max_iters: usize, seed: u64) -> PyResult<Self> {
        let grid = GridSpec::with_default_box(n).map_err(to_py)?;
        let p = condgamma::Params::with_coupling(eps, g_eps2, alpha1, grid)
            .map_err(to_py)?
            .tol(tol)
            .max_iters(max_iters)
            .seed(seed);
        p.validate().map_err(to_py)?;
        Ok(Self { inner: p })
    }

    #[getter]
    fn eps(&self) -> f64 {
        self.inner.eps
    }

    #[getter]
    fn g(&self) -> f64 {
        self.inner.g
    }

    #[getter]
    fn g_eps2(&self) -> f64 {
        self.inner.coupling()
    }

    #[getter]
    fn alpha1(&self) -> f64 {
        self.inner.alpha1
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.grid.n
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.grid.h()
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "Params(eps={}, g_eps2={}, alpha1={}, n={}, tol={})",
            p.eps,
            p.coupling(),
            p.alpha1,
            p.grid.n,
            p.tol
        )
    }
}

#[pyclass(frozen)]
struct GroundState {
    inner: condgamma::GroundState,
}

#[pymethods]
impl GroundState {
    #[getter]
    fn eta(&self) -> Vec<f64> {
        self.inner.eta.values().to_vec()
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.inner.energy
    }

    #[getter]
    fn lambda_eps(&self) -> f64 {
        self.inner.lambda_eps
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    #[getter]
    fn iters(&self) -> usize {
        self.inner.iters
    }

    /// Comparison with the Thomas-Fermi profile.
    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = check_eta_properties(&self.inner);
        let d = PyDict::new(py);
        d.set_item("mass", r.mass)?;
        d.set_item("monotonicity_violations", r.monotonicity_violations)?;
        d.set_item("max_dev_sqrt_rho", r.max_dev_sqrt_rho)?;
        d.set_item("max_dev_density_core", r.max_dev_density_core)?;
        d.set_item("max_outside", r.max_outside)?;
        d.set_item("dist_to_lambda", r.dist_to_lambda)?;
        d.set_item("dist_to_lambda_sq", r.dist_to_lambda_sq)?;
        Ok(d)
    }
}

#[pyclass(frozen)]
struct CondensatePair {
    inner: condgamma::CondensatePair,
}

#[pymethods]
impl CondensatePair {
    #[getter]
    fn u1(&self) -> Vec<f64> {
        self.inner.u1.values().to_vec()
    }

    #[getter]
    fn u2(&self) -> Vec<f64> {
        self.inner.u2.values().to_vec()
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.inner.energy
    }

    #[getter]
    fn masses(&self) -> (f64, f64) {
        self.inner.masses
    }

    #[getter]
    fn overlap(&self) -> f64 {
        self.inner.overlap()
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    #[getter]
    fn iters(&self) -> usize {
        self.inner.iters
    }
}

fn parse_init(init: &str, radius: Option<f64>, seed: u64, alpha1: f64) -> PyResult<InitKind> {
    match init {
        "half_disk" => Ok(InitKind::HalfDisk),
        "disk_annulus" => Ok(InitKind::DiskAnnulus(match radius {
            Some(r) => r,
            None => tf::mass_radius(alpha1).map_err(to_py)?,
        })),
        "random" => Ok(InitKind::Random(seed)),
        other => Err(PyValueError::new_err(format!(
            "unknown init {other:?}; expected half_disk, disk_annulus or random"
        ))),
    }
}

#[pyfunction]
fn tf_lambda() -> f64 {
    tf::tf_lambda()
}

#[pyfunction]
fn mass_radius(alpha: f64) -> PyResult<f64> {
    tf::mass_radius(alpha).map_err(to_py)
}

/// `int rho^{3/2}` along a polyline.
#[pyfunction]
#[pyo3(signature = (points, closed=false))]
fn weighted_length(points: Vec<(f64, f64)>, closed: bool) -> PyResult<f64> {
    let c = condgamma::Curve::new(points.into_iter().map(|(x, y)| [x, y]).collect(), closed).map_err(to_py)?;
    Ok(tf::weighted_length(&c))
}

#[pyfunction]
fn solve_eta(py: Python<'_>, params: Params) -> PyResult<GroundState> {
    let inner = py.detach(|| condgamma::solve_eta(&params.inner)).map_err(to_py)?;
    Ok(GroundState { inner })
}

#[pyfunction]
#[pyo3(signature = (params, init="half_disk", radius=None))]
fn minimize_two(py: Python<'_>, params: Params, init: &str, radius: Option<f64>) -> PyResult<CondensatePair> {
    let kind = parse_init(init, radius, params.inner.seed, params.inner.alpha1)?;
    let inner = py
        .detach(|| condgamma::minimize_two(&params.inner, &kind))
        .map_err(to_py)?;
    Ok(CondensatePair { inner })
}

/// Energy breakdown of a pair against a ground state.
#[pyfunction]
fn decompose<'py>(
    py: Python<'py>,
    pair: &CondensatePair,
    ground: &GroundState,
    params: Params,
) -> PyResult<Bound<'py, PyDict>> {
    let b = condgamma::decompose(&pair.inner.u1, &pair.inner.u2, &ground.inner, &params.inner).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("total", b.total)?;
    d.set_item("base", b.base)?;
    d.set_item("f_eps", b.f_eps)?;
    d.set_item("g_eps", b.g_eps)?;
    d.set_item("scaled_excess", b.scaled_excess)?;
    d.set_item("split_residual", b.split_residual)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (n=4000, length=20.0, rho=1.0))]
fn cell_oracle(n: usize, length: f64, rho: f64) -> PyResult<f64> {
    Ok(sharp::cell_oracle_with(rho, n, length, Default::default())
        .map_err(to_py)?
        .sigma_eff)
}

#[pyfunction]
fn sigma_eff() -> f64 {
    sharp::sigma_eff()
}

#[pyfunction]
fn f_alpha(alpha: f64) -> f64 {
    symmetry::f_alpha(alpha)
}

#[pyfunction]
fn delta0() -> f64 {
    symmetry::delta0()
}

/// Best radial configuration; returns `(energy, betas, radial_beats_sector)`.
#[pyfunction]
#[pyo3(signature = (alpha1, n_max=3, steps=200))]
fn best_radial(alpha1: f64, n_max: usize, steps: usize) -> PyResult<(f64, Vec<f64>, bool)> {
    let v = symmetry::best_radial(alpha1, n_max, steps).map_err(to_py)?;
    Ok((v.best_radial, v.best_config.betas().to_vec(), v.radial_beats_sector))
}

/// Rows of the sharp-interface trend as dicts.
#[pyfunction]
#[pyo3(signature = (eps_list, params, mode="minimizer", init="half_disk", n_max=512))]
fn gamma_trend<'py>(
    py: Python<'py>,
    eps_list: Vec<f64>,
    params: Params,
    mode: &str,
    init: &str,
    n_max: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mode = match mode {
        "minimizer" => TrendMode::Minimizer,
        "recovery" => TrendMode::Recovery,
        m => return Err(PyValueError::new_err(format!("unknown mode {m:?}"))),
    };
    let kind = parse_init(init, None, params.inner.seed, params.inner.alpha1)?;
    let opts = TrendOptions {
        mode,
        n_max,
        ..TrendOptions::default()
    };
    let rows = py
        .detach(|| sharp::gamma_trend(&kind, &eps_list, &params.inner, &opts))
        .map_err(to_py)?;
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("eps", r.eps)?;
            d.set_item("g", r.g)?;
            d.set_item("excess", r.excess)?;
            d.set_item("prediction", r.prediction)?;
            d.set_item("ratio", r.ratio)?;
            d.set_item("interface_length", r.interface_length)?;
            d.set_item("min_v", r.min_v)?;
            d.set_item("n", r.n)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
#[pyo3(name = "condgamma")]
fn condgamma_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Params>()?;
    m.add_class::<GroundState>()?;
    m.add_class::<CondensatePair>()?;
    m.add("ConvergenceError", m.py().get_type::<ConvergenceError>())?;
    m.add_function(wrap_pyfunction!(tf_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(mass_radius, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_length, m)?)?;
    m.add_function(wrap_pyfunction!(solve_eta, m)?)?;
    m.add_function(wrap_pyfunction!(minimize_two, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(cell_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_eff, m)?)?;
    m.add_function(wrap_pyfunction!(f_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(delta0, m)?)?;
    m.add_function(wrap_pyfunction!(best_radial, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_trend, m)?)?;
    Ok(())
}

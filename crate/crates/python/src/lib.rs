//! Python bindings: levels from the three methods, the integral-equation
//! state, connection data and the relation checks.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use stokes_nlie::benchmark::TABLE;
use stokes_nlie::cli::{self, exit_code, Command, RunConfig};
use stokes_nlie::model::{Hamiltonian, ModelSpec, Parity, Sign};
use stokes_nlie::nlie::{self, AuxiliaryState};
use stokes_nlie::oracle::{self, IntegratorConfig};
use stokes_nlie::relations::{self, Connection};
use stokes_nlie::spectrum;
use stokes_nlie::wkb;
use stokes_nlie::Error;

fn err(e: Error) -> PyErr {
    match exit_code(&e) {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parity(p: i32) -> PyResult<Parity> {
    Parity::from_value(p).map_err(err)
}

fn sign(s: i32) -> PyResult<Sign> {
    Sign::from_value(s).map_err(err)
}

/// One computed level.
#[pyclass(name = "Level", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PyLevel {
    pub j: usize,
    pub eps: i32,
    pub parity: i32,
    pub energy: f64,
    pub theta: f64,
    pub method: String,
    pub residual: f64,
    pub err_est: f64,
}

impl From<&spectrum::Level> for PyLevel {
    fn from(l: &spectrum::Level) -> Self {
        Self {
            j: l.j,
            eps: l.sign.value() as i32,
            parity: l.parity.value() as i32,
            energy: l.energy,
            theta: l.theta,
            method: l.method.tag().into(),
            residual: l.residual,
            err_est: l.err_est,
        }
    }
}

#[pymethods]
impl PyLevel {
    fn __repr__(&self) -> String {
        format!(
            "Level(method={}, eps={}, parity={}, j={}, E={})",
            self.method, self.eps, self.parity, self.j, self.energy
        )
    }
}

/// Grid, contour shift and iteration settings of the integral equations.
#[pyclass(name = "SolverConfig", get_all, set_all, from_py_object)]
#[derive(Clone)]
pub struct PySolverConfig {
    pub theta_min: f64,
    pub theta_max: f64,
    pub grid_points: usize,
    pub delta: f64,
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

#[pymethods]
impl PySolverConfig {
    #[new]
    #[pyo3(signature = (theta_min=None, theta_max=None, grid_points=None, delta=None, damping=None, tol=None, max_iter=None))]
    fn new(
        theta_min: Option<f64>,
        theta_max: Option<f64>,
        grid_points: Option<usize>,
        delta: Option<f64>,
        damping: Option<f64>,
        tol: Option<f64>,
        max_iter: Option<usize>,
    ) -> Self {
        let d = nlie::SolverConfig::default();
        Self {
            theta_min: theta_min.unwrap_or(d.grid.theta_min),
            theta_max: theta_max.unwrap_or(d.grid.theta_max),
            grid_points: grid_points.unwrap_or(d.grid.n),
            delta: delta.unwrap_or(d.delta),
            damping: damping.unwrap_or(d.damping),
            tol: tol.unwrap_or(d.tol),
            max_iter: max_iter.unwrap_or(d.max_iter),
        }
    }
}

impl PySolverConfig {
    fn to_core(&self) -> nlie::SolverConfig {
        let mut c = nlie::SolverConfig::default().with_grid(self.theta_min, self.theta_max, self.grid_points);
        c.delta = self.delta;
        c.damping = self.damping;
        c.tol = self.tol;
        c.max_iter = self.max_iter;
        c
    }
}

/// Converged auxiliary functions of one parity sector.
#[pyclass(name = "NlieSolution", frozen)]
pub struct PyNlieSolution {
    state: AuxiliaryState,
}

#[pymethods]
impl PyNlieSolution {
    /// Level `j` of the sector for sign `eps`.
    fn level(&self, j: usize, eps: i32) -> PyResult<PyLevel> {
        let l = self.state.extract_level(j, sign(eps)?).map_err(err)?;
        Ok((&l).into())
    }

    /// Levels `0..=j_max` for both signs, sorted by energy.
    fn spectrum(&self, j_max: usize) -> PyResult<Vec<PyLevel>> {
        let s = self.state.spectrum(j_max).map_err(err)?;
        Ok(s.levels.iter().map(PyLevel::from).collect())
    }

    /// Rows `(θ, Re ln A+, Im ln A+, Re ln A-, Im ln A-)`.
    fn curves(&self) -> Vec<[f64; 5]> {
        self.state.export_ln_cap_a()
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.state.final_residual()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.state.iterations()
    }
}

/// Solves the integral equations for `(M, α ≥ 0, parity)`.
#[pyfunction]
#[pyo3(signature = (m, alpha, parity, config=None))]
fn solve_nlie(py: Python<'_>, m: f64, alpha: f64, parity: i32, config: Option<PySolverConfig>) -> PyResult<PyNlieSolution> {
    let spec = ModelSpec::new(m, alpha, Sign::Plus, self::parity(parity)?).map_err(err)?;
    let cfg = config.map(|c| c.to_core()).unwrap_or_default();
    let state = py
        .detach(|| {
            let k = cfg.kernels(m)?;
            nlie::solve(&spec, &cfg, &k)
        })
        .map_err(err)?;
    Ok(PyNlieSolution { state })
}

/// Level `j` of a parity sector by ODE shooting; `alpha` is the signed
/// coupling.
#[pyfunction]
fn shoot_eigenvalue(py: Python<'_>, m: f64, alpha: f64, parity: i32, j: usize) -> PyResult<PyLevel> {
    let spec = ModelSpec::from_signed(m, alpha, self::parity(parity)?).map_err(err)?;
    let l = py
        .detach(|| oracle::shoot_eigenvalue(&spec, j, &IntegratorConfig::default()))
        .map_err(err)?;
    Ok((&l).into())
}

/// The lowest `n_levels` levels of the signed Hamiltonian, both parities.
#[pyfunction]
fn spectrum_oracle(py: Python<'_>, m: f64, alpha: f64, n_levels: usize) -> PyResult<Vec<PyLevel>> {
    let s = if alpha < 0.0 { Sign::Minus } else { Sign::Plus };
    let sp = py
        .detach(|| oracle::spectrum_oracle(m, alpha.abs(), s, n_levels, &IntegratorConfig::default()))
        .map_err(err)?;
    Ok(sp.levels.iter().map(PyLevel::from).collect())
}

/// `(φ(0), φ'(0))` of the solution decaying on the positive axis.
#[pyfunction]
fn phi_at_origin(m: f64, coupling: f64, energy: Complex64) -> PyResult<(Complex64, Complex64)> {
    let h = Hamiltonian::new(m, coupling).map_err(err)?;
    let cp = oracle::phi_at_origin(&h, energy, &IntegratorConfig::default()).map_err(err)?;
    Ok((cp.value(), cp.derivative()))
}

/// WKB energy of overall level `n`; `None` with a `0*` or `◇` label for
/// degenerate cells.
#[pyfunction]
fn wkb_energy(m: f64, alpha: f64, n: usize) -> PyResult<(Option<f64>, String)> {
    let h = Hamiltonian::new(m, alpha).map_err(err)?;
    let w = wkb::wkb_energy(n, &h).map_err(err)?;
    Ok((w.energy, w.label()))
}

/// `∫ √(E - V) dx` between the turning points.
#[pyfunction]
fn wkb_action(m: f64, alpha: f64, energy: f64) -> PyResult<f64> {
    let h = Hamiltonian::new(m, alpha).map_err(err)?;
    wkb::wkb_action(energy, &h).map_err(err)
}

/// Stokes multiplier `τ_j^{(ε)}(E)` at coupling `α ≥ 0`.
#[pyfunction]
fn tau(m: f64, alpha: f64, j: i32, eps: i32, energy: Complex64) -> PyResult<Complex64> {
    let c = Connection::new(m, alpha, IntegratorConfig::default()).map_err(err)?;
    c.tau(j, sign(eps)?, energy).map_err(err)
}

/// `M_{0,2k}^{(ε)}(E)` as a nested list.
#[pyfunction]
fn fusion_matrix(m: f64, alpha: f64, k: usize, eps: i32, energy: Complex64) -> PyResult<[[Complex64; 2]; 2]> {
    let c = Connection::new(m, alpha, IntegratorConfig::default()).map_err(err)?;
    Ok(c.fusion_matrix(k, sign(eps)?, energy).map_err(err)?.entries)
}

/// `T₁,₁(E)` from Wronskians.
#[pyfunction]
fn t11(m: f64, alpha: f64, energy: Complex64) -> PyResult<Complex64> {
    let c = Connection::new(m, alpha, IntegratorConfig::default()).map_err(err)?;
    c.t11_wronskian(energy).map_err(err)
}

/// Relation checks as dicts with keys `check, param_json, value,
/// tolerance, pass`. `checks` names a subset of wronskian, tau, fused,
/// t11, bethe, duality.
#[pyfunction]
#[pyo3(signature = (m=3.0, alpha=1.0, checks=None, det_levels=60))]
fn verify<'py>(
    py: Python<'py>,
    m: f64,
    alpha: f64,
    checks: Option<Vec<String>>,
    det_levels: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut cfg = RunConfig::new(Command::Verify);
    cfg.m = m;
    cfg.alpha = alpha;
    cfg.det_levels = det_levels;
    if let Some(cs) = checks {
        cfg.set("check", &cs.join(",")).map_err(err)?;
    }
    cfg.validate().map_err(err)?;
    let rows = py.detach(|| cli::run_verify(&cfg)).map_err(err)?;
    rows.iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("check", &c.check)?;
            d.set_item("param_json", &c.param_json)?;
            d.set_item("value", c.value)?;
            d.set_item("tolerance", c.tolerance)?;
            d.set_item("pass", c.pass)?;
            Ok(d)
        })
        .collect()
}

/// Zero mode, paired spectra and factorization at `α = M`.
#[pyfunction]
#[pyo3(signature = (m=3.0, n_levels=5))]
fn duality_check<'py>(py: Python<'py>, m: f64, n_levels: usize) -> PyResult<Bound<'py, PyDict>> {
    let r = py
        .detach(|| relations::duality_check(m, n_levels, &IntegratorConfig::default()))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("plus", r.plus)?;
    d.set_item("minus", r.minus)?;
    d.set_item("max_rel_diff", r.max_rel_diff)?;
    d.set_item("zero_mode", r.zero_mode)?;
    d.set_item("zero_mode_residual", r.zero_mode_residual)?;
    d.set_item("factorized_level", r.factorized_level)?;
    d.set_item("rayleigh_quotient", r.rayleigh_quotient)?;
    Ok(d)
}

/// Printed benchmark rows `(alpha, reference, wkb labels, nlie)`.
#[pyfunction]
fn benchmark_table() -> Vec<(f64, [f64; 2], [String; 2], [f64; 2])> {
    TABLE
        .iter()
        .map(|r| (r.alpha, r.reference, [r.wkb[0].label(), r.wkb[1].label()], r.nlie))
        .collect()
}

#[pymodule]
pub fn stokes_nlie_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLevel>()?;
    m.add_class::<PySolverConfig>()?;
    m.add_class::<PyNlieSolution>()?;
    m.add_function(wrap_pyfunction!(solve_nlie, m)?)?;
    m.add_function(wrap_pyfunction!(shoot_eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(phi_at_origin, m)?)?;
    m.add_function(wrap_pyfunction!(wkb_energy, m)?)?;
    m.add_function(wrap_pyfunction!(wkb_action, m)?)?;
    m.add_function(wrap_pyfunction!(tau, m)?)?;
    m.add_function(wrap_pyfunction!(fusion_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(t11, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(duality_check, m)?)?;
    m.add_function(wrap_pyfunction!(benchmark_table, m)?)?;
    Ok(())
}

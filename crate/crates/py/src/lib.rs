//! Python bindings: states, grids, coherence functions, ruler checks.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ruler_core::analytic::{gamma_analytic, tau_c_analytic, AnalyticCase};
use ruler_core::cli::config::{ScenarioConfig, Suite};
use ruler_core::cli::spec::StateSpec;
use ruler_core::coherence::{self, GammaRoute};
use ruler_core::fock::{self, covariance_matrix};
use ruler_core::ruler::{self as core_ruler, completeness_check};
use ruler_core::{Error, FieldKind, FockVector, Grid2D, GridField, MixedState};

pyo3::create_exception!(quantum_ruler, NumericalError, PyRuntimeError);

fn err(e: Error) -> PyErr {
    if e.is_numerical() {
        NumericalError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for Result<T, Error> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(err)
    }
}

/// A (possibly mixed) state in a truncated Fock space.
#[pyclass(name = "State", module = "quantum_ruler", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyState {
    inner: MixedState,
}

#[pymethods]
impl PyState {
    #[staticmethod]
    #[pyo3(signature = (cutoff = ruler_core::DEFAULT_CUTOFF))]
    fn vacuum(cutoff: usize) -> PyResult<Self> {
        Self::pure(FockVector::vacuum(cutoff))
    }

    #[staticmethod]
    #[pyo3(signature = (n, cutoff = ruler_core::DEFAULT_CUTOFF))]
    fn number(n: usize, cutoff: usize) -> PyResult<Self> {
        Self::pure(fock::number_state(n, cutoff).py_err()?)
    }

    /// Squeezed vacuum with `Var X = lam/4`, `Var Y = 1/(4 lam)`.
    #[staticmethod]
    #[pyo3(signature = (lam, cutoff = ruler_core::DEFAULT_CUTOFF))]
    fn squeezed(lam: f64, cutoff: usize) -> PyResult<Self> {
        Self::pure(fock::squeezed_vacuum(lam, cutoff).py_err()?)
    }

    /// `vacuum | number:<n> | squeezed:<lam> | mix:<w1>*<spec1>,...`
    #[staticmethod]
    #[pyo3(signature = (spec, cutoff = ruler_core::DEFAULT_CUTOFF))]
    fn from_spec(spec: &str, cutoff: usize) -> PyResult<Self> {
        let s: StateSpec = spec.parse().py_err()?;
        Ok(Self {
            inner: s.state(cutoff).py_err()?,
        })
    }

    /// Normalized amplitudes over |0>..|len-1>, padded to `cutoff` if given.
    #[staticmethod]
    #[pyo3(signature = (amplitudes, cutoff = None))]
    fn from_amplitudes(amplitudes: Vec<Complex64>, cutoff: Option<usize>) -> PyResult<Self> {
        let v = FockVector::new(amplitudes).py_err()?;
        let v = match cutoff {
            Some(c) => v.with_cutoff(c),
            None => v,
        };
        Self::pure(v)
    }

    #[staticmethod]
    fn mixture(parts: Vec<(f64, PyRef<'_, PyState>)>) -> PyResult<Self> {
        let mut comps = Vec::new();
        for (w, s) in parts {
            for (p, v) in s.inner.components() {
                comps.push((w * p, v.clone()));
            }
        }
        Ok(Self {
            inner: MixedState::new(comps).py_err()?,
        })
    }

    #[getter]
    fn cutoff(&self) -> usize {
        self.inner.cutoff()
    }

    #[getter]
    fn is_pure(&self) -> bool {
        self.inner.is_pure()
    }

    /// `[(weight, amplitudes)]`
    fn components(&self) -> Vec<(f64, Vec<Complex64>)> {
        self.inner
            .components()
            .iter()
            .map(|(w, v)| (*w, v.amplitudes().iter().copied().collect()))
            .collect()
    }

    /// Symmetrically ordered quadrature covariance matrix (pure states).
    fn covariance(&self) -> PyResult<[[f64; 2]; 2]> {
        let v = self.single()?;
        let c = covariance_matrix(v).py_err()?;
        Ok([[c[(0, 0)], c[(0, 1)]], [c[(1, 0)], c[(1, 1)]]])
    }

    fn __repr__(&self) -> String {
        format!(
            "State(cutoff={}, components={})",
            self.inner.cutoff(),
            self.inner.components().len()
        )
    }
}

impl PyState {
    fn pure(v: FockVector) -> PyResult<Self> {
        Ok(Self {
            inner: MixedState::pure(v).py_err()?,
        })
    }

    fn single(&self) -> PyResult<&FockVector> {
        if !self.inner.is_pure() {
            return Err(PyValueError::new_err("operation needs a pure state"));
        }
        Ok(&self.inner.components()[0].1)
    }
}

/// FFT-aligned square grid over `[-extent, extent)^2`.
#[pyclass(name = "Grid", module = "quantum_ruler", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGrid {
    inner: Grid2D,
}

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (extent = 6.0, points = 128))]
    fn new(extent: f64, points: usize) -> PyResult<Self> {
        Ok(Self {
            inner: Grid2D::fft(extent, points).py_err()?,
        })
    }

    #[getter]
    fn extent(&self) -> f64 {
        self.inner.extent()
    }

    #[getter]
    fn points(&self) -> usize {
        self.inner.points()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.inner.spacing()
    }

    fn coords(&self) -> Vec<f64> {
        self.inner.coords()
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(extent={}, points={})",
            self.inner.extent(),
            self.inner.points()
        )
    }
}

/// Complex samples of a phase-space function, indexed `[ix][iy]`.
#[pyclass(name = "Field", module = "quantum_ruler", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyField {
    inner: GridField,
}

#[pymethods]
impl PyField {
    #[getter]
    fn kind(&self) -> &'static str {
        match self.inner.kind() {
            FieldKind::Wigner => "wigner",
            FieldKind::Characteristic => "characteristic",
            FieldKind::Gamma => "gamma",
            FieldKind::Probability => "probability",
        }
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid {
            inner: *self.inner.grid(),
        }
    }

    fn values(&self) -> Vec<Vec<Complex64>> {
        let m = self.inner.grid().points();
        self.inner
            .values()
            .chunks(m)
            .map(<[Complex64]>::to_vec)
            .collect()
    }

    fn at(&self, ix: usize, iy: usize) -> PyResult<Complex64> {
        let m = self.inner.grid().points();
        if ix >= m || iy >= m {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner.at(ix, iy))
    }

    fn at_origin(&self) -> PyResult<Complex64> {
        self.inner.at_origin().py_err()
    }

    fn integral(&self) -> Complex64 {
        self.inner.integral()
    }

    fn max_abs_diff(&self, other: &PyField) -> PyResult<f64> {
        self.inner.max_abs_diff(&other.inner).py_err()
    }

    fn conjugate_symmetry_deviation(&self) -> PyResult<f64> {
        self.inner.conjugate_symmetry_deviation().py_err()
    }

    fn __repr__(&self) -> String {
        format!(
            "Field(kind={}, points={})",
            self.kind(),
            self.inner.grid().points()
        )
    }
}

fn field(inner: GridField) -> PyField {
    PyField { inner }
}

fn parse_route(route: &str) -> PyResult<GammaRoute> {
    match route {
        "char" | "characteristic" => Ok(GammaRoute::Characteristic),
        "wigner" => Ok(GammaRoute::Wigner),
        _ => Err(PyValueError::new_err(format!(
            "unknown route `{route}`; use 'char' or 'wigner'"
        ))),
    }
}

/// Mutual coherence function of probe and tick.
#[pyfunction]
#[pyo3(signature = (probe, tick, grid, route = "char"))]
fn gamma(probe: &PyState, tick: &PyState, grid: &PyGrid, route: &str) -> PyResult<PyField> {
    let r = parse_route(route)?;
    coherence::gamma_mixed_with(&probe.inner, &tick.inner, &grid.inner, r)
        .map(field)
        .py_err()
}

/// Outcome statistics `p(mu)` from the direct formula.
#[pyfunction]
fn prob(probe: &PyState, tick: &PyState, grid: &PyGrid) -> PyResult<PyField> {
    coherence::prob_mixed(&probe.inner, &tick.inner, &grid.inner)
        .map(field)
        .py_err()
}

/// Outcome statistics as the symplectic Fourier transform of `gamma`.
#[pyfunction]
fn prob_from_gamma(gamma: &PyField) -> PyResult<PyField> {
    coherence::prob_from_gamma(&gamma.inner).map(field).py_err()
}

#[pyfunction]
fn wigner(state: &PyState, grid: &PyGrid) -> PyResult<PyField> {
    let v = state.single()?;
    ruler_core::phase_space::wigner_cross(v, v, &grid.inner)
        .map(field)
        .py_err()
}

#[pyfunction]
fn coherence_time(gamma: &PyField) -> PyResult<f64> {
    coherence::coherence_time(&gamma.inner).py_err()
}

#[pyfunction]
fn resolution(prob: &PyField) -> PyResult<f64> {
    coherence::resolution(&prob.inner).py_err()
}

/// `integral of (tau . n)^2 gamma`, returned as `(value, imaginary residue)`.
#[pyfunction]
fn directional_coherence(gamma: &PyField, n: [f64; 2]) -> PyResult<(f64, f64)> {
    let m = coherence::directional_coherence(&gamma.inner, n).py_err()?;
    Ok((m.value, m.imag_residue))
}

#[pyfunction]
fn marginal_gamma(gamma: &PyField) -> PyResult<Vec<Complex64>> {
    coherence::marginal_gamma(&gamma.inner).py_err()
}

/// Scalar functionals and route diagnostics as a dict.
#[pyfunction]
fn metrics<'py>(
    py: Python<'py>,
    probe: &PyState,
    tick: &PyState,
    grid: &PyGrid,
) -> PyResult<Bound<'py, PyDict>> {
    let r = coherence::coherence_report(
        &probe.inner,
        &tick.inner,
        &grid.inner,
        &coherence::default_directions(),
    )
    .py_err()?;
    let d = PyDict::new(py);
    d.set_item("tau_c", r.tau_c)?;
    d.set_item("tau_c_wigner", r.tau_c_wigner)?;
    d.set_item("delta_beta", r.delta_beta)?;
    d.set_item("product", r.product)?;
    d.set_item("parseval_residual", r.parseval_residual)?;
    d.set_item("gamma_route_gap", r.gamma_route_gap)?;
    d.set_item("theorem_gap", r.theorem_gap)?;
    d.set_item("proportionality_gap", r.proportionality_gap)?;
    d.set_item("normalization", r.normalization)?;
    d.set_item("covariance", r.covariance)?;
    let dirs: Vec<(f64, f64, Option<f64>)> = r
        .directional
        .iter()
        .map(|e| (e.n[0], e.moment, e.covariance_form))
        .collect();
    d.set_item("directional", dirs)?;
    Ok(d)
}

/// The reference POVM element `Pi0 = rho / pi`.
#[pyclass(name = "Tick", module = "quantum_ruler", frozen, skip_from_py_object)]
struct PyTick {
    inner: core_ruler::Tick,
}

#[pymethods]
impl PyTick {
    #[new]
    fn new(state: &PyState) -> PyResult<Self> {
        Ok(Self {
            inner: core_ruler::Tick::from_mixed(&state.inner).py_err()?,
        })
    }

    #[getter]
    fn trace(&self) -> f64 {
        self.inner.trace()
    }

    #[getter]
    fn min_eigenvalue(&self) -> f64 {
        self.inner.operator().min_eigenvalue()
    }

    /// Trace of the displaced element `D(alpha) Pi0 D(alpha)^dagger`.
    fn displaced_trace(&self, alpha: Complex64) -> PyResult<f64> {
        Ok(core_ruler::povm_element(&self.inner, alpha)
            .py_err()?
            .trace()
            .re)
    }

    /// Polar quadrature of the displaced ticks over a disk, on the first `subspace` levels.
    #[pyo3(signature = (radius = 6.0, resolution = 48, subspace = 5))]
    fn completeness<'py>(
        &self,
        py: Python<'py>,
        radius: f64,
        resolution: usize,
        subspace: usize,
    ) -> PyResult<Bound<'py, PyDict>> {
        let r = completeness_check(&self.inner, radius, resolution, subspace).py_err()?;
        let d = PyDict::new(py);
        d.set_item("max_deviation", r.max_deviation)?;
        d.set_item("trace_ratio", r.trace_ratio)?;
        d.set_item("warning", r.warning)?;
        Ok(d)
    }
}

/// `p(alpha | beta) = tr[D(beta) rho D(beta)^dagger Pi(alpha)]` by explicit traces.
#[pyfunction]
fn conditional_prob(
    probe: &PyState,
    tick: &PyTick,
    alpha: Complex64,
    beta: Complex64,
) -> PyResult<f64> {
    core_ruler::conditional_prob(&probe.inner, &tick.inner, alpha, beta).py_err()
}

#[pyfunction]
fn shift_invariance(
    probe: &PyState,
    tick: &PyTick,
    betas: Vec<Complex64>,
    grid: &PyGrid,
) -> PyResult<f64> {
    core_ruler::shift_invariance_check(probe.single()?, &tick.inner, &betas, &grid.inner).py_err()
}

fn analytic_case(spec: &str) -> PyResult<AnalyticCase> {
    let bad = || {
        PyValueError::new_err(format!(
            "expected squeezed:<l>, two_squeezed:<l>,<m> or number:<n>, got `{spec}`"
        ))
    };
    let (kind, rest) = spec.split_once(':').ok_or_else(bad)?;
    match kind {
        "squeezed" => rest.parse().map(AnalyticCase::Squeezed).map_err(|_| bad()),
        "number" => rest.parse().map(AnalyticCase::Number).map_err(|_| bad()),
        "two_squeezed" => {
            let (a, b) = rest.split_once(',').ok_or_else(bad)?;
            Ok(AnalyticCase::TwoSqueezed(
                a.parse().map_err(|_| bad())?,
                b.parse().map_err(|_| bad())?,
            ))
        }
        _ => Err(bad()),
    }
}

/// Closed-form `gamma(tau)` for `squeezed:<l>`, `two_squeezed:<l>,<m>`, `number:<n>`.
#[pyfunction]
fn analytic_gamma(case: &str, tau: Complex64) -> PyResult<f64> {
    gamma_analytic(&analytic_case(case)?, tau).py_err()
}

#[pyfunction]
fn analytic_tau_c(case: &str) -> PyResult<f64> {
    tau_c_analytic(&analytic_case(case)?).py_err()
}

/// Associated Laguerre polynomial `L_n^(k)(x)`.
#[pyfunction]
fn laguerre(n: usize, k: usize, x: f64) -> PyResult<f64> {
    fock::laguerre(n, k, x).py_err()
}

/// Runs a verification suite on default parameters; returns `(passed, [(name, value, bound, passed)])`.
#[pyfunction]
#[pyo3(signature = (suite = "all"))]
fn verify(suite: &str) -> PyResult<(bool, Vec<(String, f64, f64, bool)>)> {
    let s = match suite {
        "povm" => Suite::Povm,
        "theorem" => Suite::Theorem,
        "metrics" => Suite::Metrics,
        "examples" => Suite::Examples,
        "all" => Suite::All,
        _ => return Err(PyValueError::new_err(format!("unknown suite `{suite}`"))),
    };
    let rep = ruler_core::cli::verify::run_suite(s, &ScenarioConfig::default()).py_err()?;
    Ok((
        rep.passed,
        rep.checks
            .into_iter()
            .map(|c| (c.name, c.value, c.bound, c.passed))
            .collect(),
    ))
}

#[pymodule]
fn quantum_ruler(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_class::<PyState>()?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyTick>()?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(prob, m)?)?;
    m.add_function(wrap_pyfunction!(prob_from_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(wigner, m)?)?;
    m.add_function(wrap_pyfunction!(coherence_time, m)?)?;
    m.add_function(wrap_pyfunction!(resolution, m)?)?;
    m.add_function(wrap_pyfunction!(directional_coherence, m)?)?;
    m.add_function(wrap_pyfunction!(marginal_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(metrics, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_prob, m)?)?;
    m.add_function(wrap_pyfunction!(shift_invariance, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(analytic_tau_c, m)?)?;
    m.add_function(wrap_pyfunction!(laguerre, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

//! Python bindings. Matrices cross the boundary as nested lists of complex numbers, records
//! (classifications, solver results, verification reports) as dicts.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use qdynmaps::affine::{self, AffineMap};
use qdynmaps::constructions::{self, ThreeQubitParams, TwoQubitParams};
use qdynmaps::{harness, pauli, thermo, u1, BlochVector, ComplexMatrix, CorrelationMatrix, PauliString};

fn err(e: qdynmaps::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn matrix_from(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("expected a non-empty square matrix"));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn matrix_to(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn bloch(a: [f64; 3]) -> PyResult<BlochVector> {
    let v = BlochVector(a);
    v.check().map_err(err)?;
    Ok(v)
}

#[pyclass(name = "AffineMap", module = "qdynmaps", from_py_object)]
#[derive(Clone)]
struct PyAffineMap(AffineMap);

#[pymethods]
impl PyAffineMap {
    #[new]
    fn new(tau: [f64; 3], t: [[f64; 3]; 3]) -> Self {
        Self(AffineMap::from_rows(tau, t))
    }

    #[staticmethod]
    fn identity() -> Self {
        Self(AffineMap::identity())
    }

    #[staticmethod]
    #[pyo3(signature = (lam, lam_z, tau_z, phi = 0.0))]
    fn phase_covariant(lam: f64, lam_z: f64, tau_z: f64, phi: f64) -> Self {
        Self(AffineMap::phase_covariant(lam, lam_z, tau_z, phi))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text)
            .map(Self)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn tau(&self) -> [f64; 3] {
        [self.0.tau[0], self.0.tau[1], self.0.tau[2]]
    }

    #[getter(T)]
    fn t(&self) -> [[f64; 3]; 3] {
        self.0.rows()
    }

    /// `[[1, 0, 0, 0], [tau, T]]` as a list of rows.
    fn augmented(&self) -> Vec<Vec<f64>> {
        let a = self.0.augmented();
        (0..4).map(|i| (0..4).map(|j| a[(i, j)]).collect()).collect()
    }

    fn apply(&self, a: [f64; 3]) -> [f64; 3] {
        self.0.apply(&BlochVector(a)).0
    }

    /// `self ∘ first`: apply `first`, then `self`.
    fn compose(&self, first: &Self) -> Self {
        Self(affine::compose(&self.0, &first.0))
    }

    fn iterate(&self, a0: [f64; 3], n: usize) -> Vec<[f64; 3]> {
        affine::iterate(&self.0, &BlochVector(a0), n)
            .into_iter()
            .map(|b| b.0)
            .collect()
    }

    #[pyo3(signature = (tol = 1e-10))]
    fn is_cptp(&self, tol: f64) -> bool {
        affine::is_cptp(&self.0, tol)
    }

    fn choi_min_eigenvalue(&self) -> f64 {
        affine::choi_min_eigenvalue(&self.0)
    }

    fn choi_matrix(&self) -> Vec<Vec<Complex64>> {
        matrix_to(&affine::choi_matrix(&self.0))
    }

    #[pyo3(signature = (tol = 1e-10))]
    fn is_phase_covariant(&self, tol: f64) -> bool {
        affine::is_phase_covariant(&self.0, tol)
    }

    #[pyo3(signature = (r_g, tol = 1e-10))]
    fn is_gibbs_preserving(&self, r_g: f64, tol: f64) -> PyResult<bool> {
        affine::is_gibbs_preserving(&self.0, r_g, tol).map_err(err)
    }

    #[pyo3(signature = (tol = 1e-10))]
    fn is_unital(&self, tol: f64) -> bool {
        affine::is_unital(&self.0, tol)
    }

    fn fixed_point(&self) -> PyResult<[f64; 3]> {
        affine::fixed_points(&self.0).map(|fp| fp.bloch.0).map_err(err)
    }

    #[pyo3(signature = (tol = 1e-10, energy_preserving_origin = false))]
    fn classify<'py>(&self, py: Python<'py>, tol: f64, energy_preserving_origin: bool) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &affine::classify(&self.0, tol, energy_preserving_origin))
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    fn __repr__(&self) -> String {
        format!("AffineMap(tau={:?}, T={:?})", self.tau(), self.t())
    }
}

#[pyfunction]
fn phi_pc(j: f64, h: f64, b3: f64, t: f64) -> PyAffineMap {
    PyAffineMap(constructions::phi_pc(j, h, b3, t))
}

#[pyfunction]
fn phi_env_coherent(j: f64, h: f64, b: [f64; 3], t: f64) -> PyResult<PyAffineMap> {
    Ok(PyAffineMap(constructions::phi_env_coherent(j, h, &bloch(b)?, t)))
}

#[pyfunction]
#[allow(clippy::too_many_arguments)]
fn phi_correlated(j: f64, h: f64, b3: f64, c31: f64, c32: f64, c_asym: f64, t: f64) -> PyAffineMap {
    PyAffineMap(constructions::phi_correlated(j, h, b3, c31, c32, c_asym, t))
}

/// `chi` holds the correlation coefficients, first index on the system qubit.
#[pyfunction]
fn phi_e_general(j: f64, h1: f64, h2: f64, b: [f64; 3], chi: [[f64; 3]; 3], t: f64) -> PyResult<PyAffineMap> {
    let p = TwoQubitParams::new(j, h1, h2);
    constructions::phi_e_general(&p, &bloch(b)?, &CorrelationMatrix::from_rows(chi), t)
        .map(PyAffineMap)
        .map_err(err)
}

/// Returns the map and the correlation coefficients it requires.
#[pyfunction]
fn phi_gp_finetuned(j: f64, h: f64, b: [f64; 3], r_g: f64, t: f64) -> PyResult<(PyAffineMap, [[f64; 3]; 3])> {
    let (m, chi) = constructions::phi_gp_finetuned(j, h, &bloch(b)?, r_g, t).map_err(err)?;
    Ok((PyAffineMap(m), chi.to_rows()))
}

#[pyfunction]
#[pyo3(signature = (j, h, b3, f, t = 1.0))]
fn phi_gp_3qubit(j: f64, h: f64, b3: f64, f: [f64; 3], t: f64) -> PyResult<PyAffineMap> {
    let p = ThreeQubitParams::new(j, h, b3, f).map_err(err)?;
    constructions::phi_gp_3qubit(&p, t).map(PyAffineMap).map_err(err)
}

#[pyfunction]
fn phi_app_d_general(phi0: f64, phi1: f64, phi2: f64, alpha: f64, theta: f64, b: [f64; 3]) -> PyResult<PyAffineMap> {
    Ok(PyAffineMap(constructions::phi_app_d_general(
        phi0,
        phi1,
        phi2,
        alpha,
        theta,
        &bloch(b)?,
    )))
}

#[pyfunction]
fn solve_gp_constraints<'py>(py: Python<'py>, b3: f64, r_g: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &constructions::solve_gp_constraints(b3, r_g).map_err(err)?)
}

/// Map induced on `system_site` by `u` with the other qubits in `env_state`.
#[pyfunction]
#[pyo3(signature = (u, n, system_site, env_state, chi = None))]
fn extract_map(
    u: Vec<Vec<Complex64>>,
    n: usize,
    system_site: usize,
    env_state: Vec<Vec<Complex64>>,
    chi: Option<Vec<Vec<Complex64>>>,
) -> PyResult<PyAffineMap> {
    let u = matrix_from(u)?;
    let env = matrix_from(env_state)?;
    let chi = chi.map(matrix_from).transpose()?;
    affine::extract_map(&u, n, system_site, &env, chi.as_ref())
        .map(PyAffineMap)
        .map_err(err)
}

#[pyfunction]
fn random_u1_unitary(n: usize, seed: u64) -> PyResult<Vec<Vec<Complex64>>> {
    u1::random_u1_unitary(n, seed)
        .map(|u| matrix_to(&u.matrix))
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (u, tol = 1e-12))]
fn is_u1_symmetric(u: Vec<Vec<Complex64>>, tol: f64) -> PyResult<bool> {
    Ok(u1::is_u1_symmetric(&matrix_from(u)?, tol))
}

/// Density matrix of a product of single-qubit Bloch vectors, site 0 leftmost.
#[pyfunction]
fn product_state(sites: Vec<[f64; 3]>) -> PyResult<Vec<Vec<Complex64>>> {
    let sites: Vec<BlochVector> = sites.into_iter().map(BlochVector).collect();
    qdynmaps::state::product_state(&sites)
        .map(|m| matrix_to(&m))
        .map_err(err)
}

/// Nonzero Pauli coefficients as `(label, coefficient)` pairs in label order.
#[pyfunction]
fn pauli_decompose(m: Vec<Vec<Complex64>>) -> PyResult<Vec<(String, Complex64)>> {
    let d = pauli::decompose(&matrix_from(m)?).map_err(err)?;
    Ok(d.terms().iter().map(|(s, c)| (s.to_string(), *c)).collect())
}

#[pyfunction]
fn pauli_charge(label: &str) -> PyResult<i8> {
    label.parse::<PauliString>().map(|s| s.charge()).map_err(err)
}

#[pyfunction]
fn count_charge_conserving_strings(n: usize) -> PyResult<u64> {
    pauli::count_charge_conserving_strings(n).map_err(err)
}

/// `D(ρ(a) ‖ ρ(b))` in nats; `inf` when the support condition fails.
#[pyfunction]
fn relative_entropy(a: [f64; 3], b: [f64; 3]) -> PyResult<f64> {
    let (ra, rb) = (bloch(a)?.density().map_err(err)?, bloch(b)?.density().map_err(err)?);
    thermo::relative_entropy(&ra, &rb).map(|d| d.value()).map_err(err)
}

#[pyfunction]
fn delta_d(m: &PyAffineMap, a0: [f64; 3], r_g: f64) -> PyResult<f64> {
    thermo::delta_d(&m.0, &BlochVector(a0), r_g).map_err(err)
}

#[pyfunction]
fn l1_coherence(a: [f64; 3]) -> f64 {
    thermo::l1_coherence(&BlochVector(a))
}

#[pyfunction]
fn coherence_trajectory(m: &PyAffineMap, a0: [f64; 3], n: usize) -> Vec<f64> {
    thermo::coherence_trajectory(&m.0, &BlochVector(a0), n)
}

/// `(steps, converged)`.
#[pyfunction]
#[pyo3(signature = (m, a0, eps = 1e-8, n_max = 10_000))]
fn convergence_steps(m: &PyAffineMap, a0: [f64; 3], eps: f64, n_max: usize) -> PyResult<(usize, bool)> {
    thermo::convergence_steps(&m.0, &BlochVector(a0), eps, n_max)
        .map(|c| (c.steps, c.converged))
        .map_err(err)
}

/// One verification campaign as a dict.
#[pyfunction]
#[pyo3(signature = (claim_id, n = 2, trials = 200, seed = 0))]
fn verify<'py>(py: Python<'py>, claim_id: &str, n: usize, trials: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &harness::run_claim(claim_id, n, trials, seed).map_err(err)?)
}

#[pymodule]
#[pyo3(name = "qdynmaps")]
fn qdynmaps_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", qdynmaps::VERSION)?;
    m.add("CLAIM_IDS", harness::CLAIM_IDS.to_vec())?;
    m.add_class::<PyAffineMap>()?;
    m.add_function(wrap_pyfunction!(phi_pc, m)?)?;
    m.add_function(wrap_pyfunction!(phi_env_coherent, m)?)?;
    m.add_function(wrap_pyfunction!(phi_correlated, m)?)?;
    m.add_function(wrap_pyfunction!(phi_e_general, m)?)?;
    m.add_function(wrap_pyfunction!(phi_gp_finetuned, m)?)?;
    m.add_function(wrap_pyfunction!(phi_gp_3qubit, m)?)?;
    m.add_function(wrap_pyfunction!(phi_app_d_general, m)?)?;
    m.add_function(wrap_pyfunction!(solve_gp_constraints, m)?)?;
    m.add_function(wrap_pyfunction!(extract_map, m)?)?;
    m.add_function(wrap_pyfunction!(random_u1_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(is_u1_symmetric, m)?)?;
    m.add_function(wrap_pyfunction!(product_state, m)?)?;
    m.add_function(wrap_pyfunction!(pauli_decompose, m)?)?;
    m.add_function(wrap_pyfunction!(pauli_charge, m)?)?;
    m.add_function(wrap_pyfunction!(count_charge_conserving_strings, m)?)?;
    m.add_function(wrap_pyfunction!(relative_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(delta_d, m)?)?;
    m.add_function(wrap_pyfunction!(l1_coherence, m)?)?;
    m.add_function(wrap_pyfunction!(coherence_trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_steps, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}

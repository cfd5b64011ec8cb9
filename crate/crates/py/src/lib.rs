//! Python bindings: the comparison drifts, the 1D model spec with its
//! solvers, CC geometry on the built-in groups, and the Monte Carlo entry
//! points. Build with `cargo build -p subrad-py` and load the cdylib as
//! `subrad` (see python/smoke_test.py).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use subrad_core::drifts::{self, SasakianModelSpec};
use subrad_core::groups::{self, GroupPoint, GroupSpec};
use subrad_core::pde1d;
use subrad_core::sde::{self, SimConfig};
use subrad_core::spectral3d;
use subrad_core::stats;

fn py_err(e: subrad_core::Error) -> PyErr {
    PyValueError::new_err(format!("{e}"))
}

fn group_by_name(name: &str) -> PyResult<GroupSpec> {
    match name {
        "heisenberg" => Ok(GroupSpec::heisenberg()),
        "quaternionic" => Ok(GroupSpec::quaternionic_heisenberg()),
        other => Err(PyValueError::new_err(format!(
            "unknown group {other}; use heisenberg or quaternionic"
        ))),
    }
}

#[pyfunction]
fn f_rie(r: f64, k: f64) -> PyResult<f64> {
    drifts::f_rie(r, k).map_err(py_err)
}

#[pyfunction]
fn f_sas(r: f64, k: f64) -> PyResult<f64> {
    drifts::f_sas(r, k).map_err(py_err)
}

#[pyfunction]
fn bessel_zero(nu: f64) -> PyResult<f64> {
    pde1d::bessel_zero(nu).map_err(py_err)
}

#[pyfunction]
fn dkw_margin(n: usize, delta: f64) -> PyResult<f64> {
    stats::dkw_margin(n, delta).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (x, z, group = "heisenberg"))]
fn cc_distance(x: Vec<f64>, z: Vec<f64>, group: &str) -> PyResult<f64> {
    let spec = group_by_name(group)?;
    groups::cc_distance(&GroupPoint::new(x, z), &spec).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (radii, n_samples, seed, group = "heisenberg"))]
fn cc_ball_volume(radii: Vec<f64>, n_samples: usize, seed: u64, group: &str) -> PyResult<Vec<f64>> {
    let spec = group_by_name(group)?;
    groups::cc_ball_volume_mc(&spec, &radii, n_samples, seed).map_err(py_err)
}

/// Terminal CC radii of horizontal Brownian motion started at the identity,
/// absorbed at `absorb_at` (pass infinity for no absorption). Returns
/// `(terminal, hit_times)`, with `None` for paths that never reached the level.
#[pyfunction]
#[pyo3(signature = (dt, horizon, n_paths, seed, absorb_at = f64::INFINITY, group = "heisenberg"))]
fn simulate_group_radii(
    dt: f64,
    horizon: f64,
    n_paths: usize,
    seed: u64,
    absorb_at: f64,
    group: &str,
) -> PyResult<(Vec<f64>, Vec<Option<f64>>)> {
    let spec = group_by_name(group)?;
    let cfg = SimConfig::new(dt, horizon, n_paths, seed).map_err(py_err)?;
    let sim = sde::simulate_group_paths(&spec, &GroupPoint::identity(&spec), absorb_at, &cfg, false)
        .map_err(py_err)?;
    Ok((sim.batch.terminal_values, sim.batch.hit_times))
}

#[pyfunction]
#[pyo3(signature = (r, dt, horizon, n_paths, seed, group = "heisenberg"))]
fn mc_lambda1(
    r: f64,
    dt: f64,
    horizon: f64,
    n_paths: usize,
    seed: u64,
    group: &str,
) -> PyResult<(f64, f64)> {
    let spec = group_by_name(group)?;
    let cfg = SimConfig::new(dt, horizon, n_paths, seed).map_err(py_err)?;
    let est = spectral3d::mc_lambda1(&spec, r, &cfg).map_err(py_err)?;
    Ok((est.value, est.error_indicator))
}

/// The 1D comparison diffusion with generator
/// `(f_sas(r, k1) + (n-2) f_rie(r, k2)) d/dr + d^2/dr^2`.
#[pyclass]
struct Model {
    spec: SasakianModelSpec,
}

#[pymethods]
impl Model {
    #[new]
    fn new(n: usize, k1: f64, k2: f64) -> PyResult<Self> {
        Ok(Self { spec: SasakianModelSpec::sasakian(n, k1, k2).map_err(py_err)? })
    }

    #[staticmethod]
    fn htype(n: usize, m: usize) -> PyResult<Self> {
        Ok(Self { spec: SasakianModelSpec::htype(n, m).map_err(py_err)? })
    }

    fn drift(&self, r: f64) -> PyResult<f64> {
        self.spec.drift(r).map_err(py_err)
    }

    fn singular_coefficient(&self) -> f64 {
        self.spec.singular_coefficient()
    }

    fn domain_limit(&self) -> Option<f64> {
        self.spec.domain_limit()
    }

    /// Smallest Dirichlet eigenvalue on [0, R]; returns (value, indicator).
    #[pyo3(signature = (r_max, n_cells = 2048))]
    fn eigen(&self, r_max: f64, n_cells: usize) -> PyResult<(f64, f64)> {
        let est = pde1d::eigen_1d(&self.spec, r_max, n_cells).map_err(py_err)?;
        Ok((est.value, est.error_indicator))
    }

    fn mean_exit(&self, r_max: f64, r0: f64) -> PyResult<f64> {
        pde1d::mean_exit_1d(&self.spec, r_max, r0).map_err(py_err)
    }

    /// `P_{r0}(xi_t < s, t < tau_R)` by the divergence-form solver.
    #[pyo3(signature = (r_max, r0, t, s, n_cells = 2048))]
    fn survival_cdf(&self, r_max: f64, r0: f64, t: f64, s: f64, n_cells: usize) -> PyResult<f64> {
        pde1d::survival_cdf(&self.spec, r_max, r0, t, s, n_cells).map_err(py_err)
    }

    /// Euler-Maruyama sample of the radial law; returns (terminal, hit_times).
    #[pyo3(signature = (r0, absorb_at, dt, horizon, n_paths, seed, bridge_correction = false))]
    #[allow(clippy::too_many_arguments)]
    fn simulate(
        &self,
        r0: f64,
        absorb_at: f64,
        dt: f64,
        horizon: f64,
        n_paths: usize,
        seed: u64,
        bridge_correction: bool,
    ) -> PyResult<(Vec<f64>, Vec<Option<f64>>)> {
        let mut cfg = SimConfig::new(dt, horizon, n_paths, seed).map_err(py_err)?;
        cfg.bridge_correction = bridge_correction;
        let batch = sde::simulate_radial_paths(&self.spec, r0, absorb_at, &cfg).map_err(py_err)?;
        Ok((batch.terminal_values, batch.hit_times))
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(n={}, k1={}, k2={})",
            self.spec.n, self.spec.k1, self.spec.k2
        )
    }
}

#[pymodule]
fn subrad(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(f_rie, m)?)?;
    m.add_function(wrap_pyfunction!(f_sas, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_zero, m)?)?;
    m.add_function(wrap_pyfunction!(dkw_margin, m)?)?;
    m.add_function(wrap_pyfunction!(cc_distance, m)?)?;
    m.add_function(wrap_pyfunction!(cc_ball_volume, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_group_radii, m)?)?;
    m.add_function(wrap_pyfunction!(mc_lambda1, m)?)?;
    m.add_class::<Model>()?;
    Ok(())
}

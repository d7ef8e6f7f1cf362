use std::sync::Arc;

use covalg_core::algebra::{FdAlgebra, PartialAutomorphism};
use covalg_core::covalg::{realize_covariance, Realization as CoreRealization, RealizeOptions};
use covalg_core::description::{gallery as core_gallery, gallery_entry, SystemDescription};
use covalg_core::ktheory::{diagram_check, pv_verify, snf as core_snf, IntMatrix};
use covalg_core::report::Check;
use covalg_core::structure::{verify_structure_theorem, CircleAction, StructureOptions};
use covalg_core::suite::{realize_and_build, validate_suite, SuiteOptions};
use covalg_core::toeplitz::{verify_toeplitz, ToeplitzOptions};
use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn checks_to_py<'py>(py: Python<'py>, checks: Vec<Check>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut checks = checks;
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    checks
        .into_iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("name", c.name)?;
            d.set_item("passed", c.passed)?;
            d.set_item("residual", c.residual)?;
            d.set_item("certificate", c.certificate)?;
            Ok(d)
        })
        .collect()
}

/// A partial automorphism of a finite-dimensional C*-algebra.
#[pyclass(frozen, module = "covalg")]
struct System {
    inner: Arc<PartialAutomorphism>,
}

#[pymethods]
impl System {
    /// Parses a JSON system description.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let d = SystemDescription::parse(text).map_err(err)?;
        let inner = d.to_system(1e-9).map_err(err)?;
        Ok(System {
            inner: Arc::new(inner),
        })
    }

    /// A bundled system by name.
    #[staticmethod]
    fn from_gallery(name: &str) -> PyResult<Self> {
        let entry = gallery_entry(name).ok_or_else(|| PyKeyError::new_err(name.to_string()))?;
        System::from_json(entry.json)
    }

    /// The forward shift on `C^m`.
    #[staticmethod]
    fn shift(m: usize) -> Self {
        System {
            inner: Arc::new(PartialAutomorphism::shift(m)),
        }
    }

    /// A block map with identity unitaries.
    #[staticmethod]
    fn from_block_map(block_sizes: Vec<usize>, pairs: Vec<(usize, usize)>) -> PyResult<Self> {
        let alg = FdAlgebra::new(block_sizes).map_err(err)?;
        let inner = PartialAutomorphism::from_block_map(alg, &pairs).map_err(err)?;
        Ok(System {
            inner: Arc::new(inner),
        })
    }

    #[getter]
    fn block_sizes(&self) -> Vec<usize> {
        self.inner.algebra().block_sizes().to_vec()
    }

    #[getter]
    fn block_map(&self) -> Vec<(usize, usize)> {
        self.inner.block_map().iter().map(|(&i, &j)| (i, j)).collect()
    }

    /// Smallest `N` with `D_N = 0`, or `None` if the chain does not terminate.
    #[getter]
    fn chain_bound(&self) -> Option<usize> {
        self.inner.chain_bound().finite()
    }

    #[pyo3(signature = (seed = 0, samples = 50))]
    fn validate<'py>(&self, py: Python<'py>, seed: u64, samples: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let opts = SuiteOptions {
            seed,
            samples,
            ..Default::default()
        };
        checks_to_py(py, validate_suite(&self.inner, &opts))
    }

    #[pyo3(signature = (seed = 0, samples = 50))]
    fn build<'py>(&self, py: Python<'py>, seed: u64, samples: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let opts = SuiteOptions {
            seed,
            samples,
            ..Default::default()
        };
        checks_to_py(py, realize_and_build(&self.inner, &opts).1)
    }

    #[pyo3(signature = (seed = 0))]
    fn realize(&self, seed: u64) -> PyResult<Realization> {
        let opts = RealizeOptions {
            seed,
            ..Default::default()
        };
        let inner = realize_covariance(self.inner.clone(), &opts).map_err(err)?;
        Ok(Realization { inner })
    }

    /// Exactness of the K-theory sequence and commutativity of the square.
    #[pyo3(signature = (seed = 0))]
    fn pv<'py>(&self, py: Python<'py>, seed: u64) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let opts = RealizeOptions {
            seed,
            ..Default::default()
        };
        let mut checks = pv_verify(self.inner.clone(), &opts).map_err(err)?.checks;
        checks.extend(diagram_check(self.inner.clone(), &opts).map_err(err)?.checks);
        checks_to_py(py, checks)
    }

    #[pyo3(signature = (seed = 0, samples = 100))]
    fn toeplitz<'py>(&self, py: Python<'py>, seed: u64, samples: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let opts = ToeplitzOptions {
            realize: RealizeOptions {
                seed,
                ..Default::default()
            },
            samples,
        };
        checks_to_py(
            py,
            verify_toeplitz(self.inner.clone(), &opts).map_err(err)?.checks,
        )
    }

    fn __repr__(&self) -> String {
        format!(
            "System(block_sizes={:?}, block_map={:?})",
            self.block_sizes(),
            self.block_map()
        )
    }
}

/// The covariance algebra realized as a direct sum of matrix blocks.
#[pyclass(frozen, module = "covalg")]
struct Realization {
    inner: CoreRealization,
}

#[pymethods]
impl Realization {
    #[getter]
    fn blocks(&self) -> Vec<usize> {
        self.inner.algebra().block_sizes().to_vec()
    }

    #[getter]
    fn dual_weights(&self) -> Vec<Vec<i64>> {
        self.inner.dual_weights()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim_l()
    }

    /// Smallest singular value of the regular representation on `L`.
    fn faithfulness(&self) -> PyResult<f64> {
        self.inner.rep().faithfulness().map_err(err)
    }

    /// Runs the structure theorem on the dual action.
    #[pyo3(signature = (seed = 0))]
    fn dual_structure<'py>(&self, py: Python<'py>, seed: u64) -> PyResult<Vec<Bound<'py, PyDict>>> {
        structure(py, self.blocks(), self.dual_weights(), seed)
    }

    fn __repr__(&self) -> String {
        format!("Realization(blocks={:?}, dim={})", self.blocks(), self.dim())
    }
}

/// Verifies the structure theorem for the circle action with the given weights.
#[pyfunction]
#[pyo3(signature = (block_sizes, weights, seed = 0))]
fn structure<'py>(
    py: Python<'py>,
    block_sizes: Vec<usize>,
    weights: Vec<Vec<i64>>,
    seed: u64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let alg = FdAlgebra::new(block_sizes).map_err(err)?;
    let act = CircleAction::new(alg, weights).map_err(err)?;
    let opts = StructureOptions {
        seed,
        ..Default::default()
    };
    checks_to_py(py, verify_structure_theorem(&act, &opts).map_err(err)?.checks)
}

/// Elementary divisors of an integer matrix.
#[pyfunction]
fn smith_divisors(rows: Vec<Vec<i64>>) -> PyResult<Vec<String>> {
    if rows.iter().any(|r| r.len() != rows.first().map_or(0, Vec::len)) {
        return Err(PyValueError::new_err("rows have different lengths"));
    }
    let s = core_snf(&IntMatrix::from_rows(&rows));
    Ok(s.divisors().iter().map(|d| d.to_string()).collect())
}

/// Names of the bundled systems.
#[pyfunction]
fn gallery() -> Vec<&'static str> {
    core_gallery().iter().map(|e| e.name).collect()
}

#[pymodule]
#[pyo3(name = "covalg")]
fn covalg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<System>()?;
    m.add_class::<Realization>()?;
    m.add_function(wrap_pyfunction!(structure, m)?)?;
    m.add_function(wrap_pyfunction!(smith_divisors, m)?)?;
    m.add_function(wrap_pyfunction!(gallery, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

//! Python bindings: maps, coorientations, surfaces, twist words, monodromy
//! and the flat-torus oracle. Structured results come back as plain Python
//! dicts and lists.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use birkhoff_core::cohomology::{construct_coorientation, Cochain, Construction};
use birkhoff_core::coorient::{enumerate_eulerian, is_acyclic, representations, Coorientation};
use birkhoff_core::monodromy::{flip_connectivity, hurwitz_compare, monodromy, twist_word, CurveSystem};
use birkhoff_core::surface::SurfaceModel;
use birkhoff_core::torus::{verify_birkhoff, FlatMultiCurve};
use birkhoff_core::{Error, MultiCurveMap};

fn py_err(e: Error) -> PyErr {
    let msg = format!("{}: {e}", e.kind());
    if e.is_io() {
        PyIOError::new_err(msg)
    } else {
        PyValueError::new_err(msg)
    }
}

/// Converts a serializable value into Python objects through JSON.
fn to_py<'py, T: Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A 4-valent multi-curve map on a closed surface.
#[pyclass(name = "Map", frozen)]
struct PyMap {
    inner: MultiCurveMap,
}

impl PyMap {
    fn coorientation(&self, bits: Vec<u8>) -> PyResult<Coorientation> {
        Coorientation::new(&self.inner, bits.into_iter().map(|b| b != 0).collect()).map_err(py_err)
    }
}

#[pymethods]
impl PyMap {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyMap { inner: MultiCurveMap::from_json(text).map_err(py_err)? })
    }

    #[staticmethod]
    fn grid(p: usize, q: usize) -> PyResult<Self> {
        Ok(PyMap { inner: MultiCurveMap::grid(p, q).map_err(py_err)? })
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }
    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }
    #[getter]
    fn face_count(&self) -> usize {
        self.inner.face_count()
    }
    #[getter]
    fn genus(&self) -> i64 {
        self.inner.genus()
    }
    #[getter]
    fn strand_count(&self) -> usize {
        self.inner.strand_count()
    }

    /// Eulerian coorientations as bit lists.
    #[pyo3(signature = (acyclic_only = false))]
    fn eulerian(&self, acyclic_only: bool) -> PyResult<Vec<Vec<u8>>> {
        let mut out = Vec::new();
        for eta in enumerate_eulerian(&self.inner) {
            if !acyclic_only || is_acyclic(&self.inner, &eta).map_err(py_err)? {
                out.push(eta.bits().iter().map(|&b| b as u8).collect());
            }
        }
        Ok(out)
    }

    fn is_acyclic(&self, bits: Vec<u8>) -> PyResult<bool> {
        is_acyclic(&self.inner, &self.coorientation(bits)?).map_err(py_err)
    }

    /// Coorientation in the class of `weights`, or a certificate cycle.
    fn construct<'py>(&self, py: Python<'py>, weights: Vec<i64>) -> PyResult<Bound<'py, PyAny>> {
        let c = Cochain::new(&self.inner, weights).map_err(py_err)?;
        match construct_coorientation(&self.inner, &c).map_err(py_err)? {
            Construction::Realized { coorientation, height } => {
                to_py(py, &serde_json::json!({ "bits": coorientation, "heights": height.heights }))
            }
            Construction::Obstructed(cert) => to_py(py, &cert),
        }
    }

    /// Euler characteristic, boundary count, genus and homology rank.
    fn surface<'py>(&self, py: Python<'py>, bits: Vec<u8>) -> PyResult<Bound<'py, PyAny>> {
        let s = SurfaceModel::build(&self.inner, &self.coorientation(bits)?).map_err(py_err)?;
        to_py(
            py,
            &serde_json::json!({
                "chi": s.euler_characteristic(),
                "boundary": s.boundary_count(),
                "genus": s.genus(),
                "rank": s.rank(),
            }),
        )
    }

    /// Twist word of the first representation, one line per factor.
    fn word(&self, bits: Vec<u8>) -> PyResult<Vec<String>> {
        let eta = self.coorientation(bits)?;
        let sys = CurveSystem::build(&self.inner, &eta).map_err(py_err)?;
        let rep = first_representation(&self.inner, &eta)?;
        Ok(twist_word(&self.inner, &sys, &rep).map_err(py_err)?.lines())
    }

    /// Homological monodromy of the first representation.
    fn monodromy<'py>(&self, py: Python<'py>, bits: Vec<u8>) -> PyResult<Bound<'py, PyAny>> {
        let eta = self.coorientation(bits)?;
        let sys = CurveSystem::build(&self.inner, &eta).map_err(py_err)?;
        let rep = first_representation(&self.inner, &eta)?;
        let m = monodromy(&self.inner, &sys, &rep).map_err(py_err)?;
        to_py(
            py,
            &serde_json::json!({
                "rows": m.matrix.rows(),
                "char_poly": m.char_poly,
                "determinant": m.determinant,
                "spectral_radius": m.spectral_radius,
            }),
        )
    }

    /// Flip path and Hurwitz traces between two cohomologous coorientations.
    fn hurwitz_compare<'py>(&self, py: Python<'py>, first: Vec<u8>, second: Vec<u8>) -> PyResult<Bound<'py, PyAny>> {
        let (a, b) = (self.coorientation(first)?, self.coorientation(second)?);
        to_py(py, &hurwitz_compare(&self.inner, &a, &b).map_err(py_err)?)
    }

    /// Flip-graph components of the class of `weights`.
    fn flip_connectivity<'py>(&self, py: Python<'py>, weights: Vec<i64>) -> PyResult<Bound<'py, PyAny>> {
        let c = Cochain::new(&self.inner, weights).map_err(py_err)?;
        to_py(py, &flip_connectivity(&self.inner, &c).map_err(py_err)?)
    }
}

fn first_representation(map: &MultiCurveMap, eta: &Coorientation) -> PyResult<Vec<birkhoff_core::coorient::Node>> {
    representations(map, eta, 1).map_err(py_err)?.pop().ok_or_else(|| py_err(Error::NotAcyclic))
}

/// Samples the flow on the uniform `p x q` grid torus.
#[pyfunction]
#[pyo3(signature = (p, q, bits, samples = 1000, horizon = 100.0, seed = 0))]
fn verify_flat_birkhoff<'py>(
    py: Python<'py>,
    p: usize,
    q: usize,
    bits: Vec<u8>,
    samples: usize,
    horizon: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let model = FlatMultiCurve::uniform(p, q).map_err(py_err)?;
    let eta = Coorientation::new(model.map(), bits.into_iter().map(|b| b != 0).collect()).map_err(py_err)?;
    to_py(py, &verify_birkhoff(&model, &eta, samples, horizon, seed).map_err(py_err)?)
}

#[pymodule]
fn birkhoff(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMap>()?;
    m.add_function(wrap_pyfunction!(verify_flat_birkhoff, m)?)?;
    Ok(())
}

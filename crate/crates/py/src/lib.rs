//! Python bindings: surfaces, pointwise classification, strata and the formula
//! verifiers. Structured results come back as plain dicts and lists.

use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde::Serialize;
use serde_json::Value;

use frontidx::cli::{parse_config as parse_config_rs, run_scenario, StrataSummary};
use frontidx::indexcheck::{self, MapPair, TangentField, VerifyConfig};
use frontidx::morin::{self, FrontHomomorphism, GaussMapHomomorphism, Homomorphism, SphereMap, TorusMap, Tolerances};
use frontidx::strata::{analyze, StrataConfig};
use frontidx::surfaces::{
    gauss_kronecker, BlaschkeFront, BumpyBody, FrontField, ParallelFront, RotationalGamma,
    RoundSphere, StandardTorus, SwallowtailPatch,
};
use frontidx::ChartPoint;

create_exception!(pyfrontidx, FrontidxError, PyException);

fn err(e: frontidx::Error) -> PyErr {
    FrontidxError::new_err(e.to_string())
}

fn value_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_bound_py_any(py)?,
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_bound_py_any(py)?,
            None => n.as_f64().unwrap_or(f64::NAN).into_bound_py_any(py)?,
        },
        Value::String(s) => s.into_bound_py_any(py)?,
        Value::Array(a) => {
            let l = PyList::empty(py);
            for x in a {
                l.append(value_to_py(py, x)?)?;
            }
            l.into_any()
        }
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, value_to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn to_py<'py, T: Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| FrontidxError::new_err(e.to_string()))?;
    value_to_py(py, &v)
}

/// A co-oriented front (immersed surface or wave front) on a chart domain.
#[pyclass(frozen, skip_from_py_object, module = "pyfrontidx")]
#[derive(Clone)]
struct Surface {
    inner: Arc<dyn FrontField>,
}

#[pymethods]
impl Surface {
    #[staticmethod]
    #[pyo3(signature = (radius = 1.0))]
    fn sphere(radius: f64) -> Self {
        Surface { inner: Arc::new(RoundSphere::new(radius)) }
    }

    #[staticmethod]
    #[pyo3(signature = (major = 2.0, minor = 0.7))]
    fn torus(major: f64, minor: f64) -> Self {
        Surface { inner: Arc::new(StandardTorus::new(major, minor)) }
    }

    #[staticmethod]
    #[pyo3(signature = (seed = 1, amplitude = 0.03))]
    fn bumpy(seed: u64, amplitude: f64) -> Self {
        Surface { inner: Arc::new(BumpyBody::random(seed, amplitude)) }
    }

    #[staticmethod]
    fn rotational_gamma(epsilon: f64) -> PyResult<Self> {
        Ok(Surface { inner: Arc::new(RotationalGamma::new(epsilon).map_err(err)?) })
    }

    #[staticmethod]
    fn swallowtail() -> Self {
        Surface { inner: Arc::new(SwallowtailPatch) }
    }

    /// The parallel front `f + t ν̂`.
    fn parallel(&self, t: f64) -> Self {
        Surface { inner: Arc::new(ParallelFront::new(self.inner.clone(), t)) }
    }

    /// The Blaschke normal map of this (strictly convex) surface.
    fn blaschke(&self) -> PyResult<Self> {
        Ok(Surface { inner: Arc::new(BlaschkeFront::new(self.inner.clone()).map_err(err)?) })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label()
    }

    /// `(f, ν̂)` at a chart point.
    fn eval(&self, u: f64, v: f64) -> PyResult<([f64; 3], [f64; 3])> {
        let j = self.inner.eval(ChartPoint::new(u, v), 0).map_err(err)?;
        Ok((j.f.value(), j.nu.value()))
    }

    /// Oriented density `λ = det(f_u, f_v, ν̂)`.
    fn density(&self, u: f64, v: f64) -> PyResult<f64> {
        Ok(frontidx::surfaces::front_density(self.inner.as_ref(), ChartPoint::new(u, v), 0)
            .map_err(err)?
            .value())
    }

    fn curvature<'py>(&self, py: Python<'py>, u: f64, v: f64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &gauss_kronecker(self.inner.as_ref(), ChartPoint::new(u, v)).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("Surface({})", self.inner.label())
    }
}

fn homomorphism(surface: &Surface, source: &str) -> PyResult<Box<dyn Homomorphism>> {
    match source {
        "front" => Ok(Box::new(FrontHomomorphism::new(surface.inner.clone()))),
        "gauss_map" => Ok(Box::new(GaussMapHomomorphism::new(surface.inner.clone()))),
        other => Err(FrontidxError::new_err(format!("unknown source `{other}` (front, gauss_map)"))),
    }
}

/// Classifies a chart point of the front (or its Gauss map) as regular, A2, A3± or degenerate.
#[pyfunction]
#[pyo3(signature = (surface, u, v, source = "front"))]
fn classify_point<'py>(py: Python<'py>, surface: &Surface, u: f64, v: f64, source: &str) -> PyResult<Bound<'py, PyAny>> {
    let h = homomorphism(surface, source)?;
    let th = morin::field_thresholds(h.as_ref(), &Tolerances::default()).map_err(err)?;
    let c = py.detach(|| morin::classify_point(h.as_ref(), ChartPoint::new(u, v), &th)).map_err(err)?;
    to_py(py, &c)
}

/// `λ, λ̇, …, λ^(k)` along the normalised null field at a singular point.
#[pyfunction]
#[pyo3(signature = (surface, u, v, k = 2, flip = false))]
fn cascade(surface: &Surface, u: f64, v: f64, k: usize, flip: bool) -> PyResult<Vec<f64>> {
    let h = FrontHomomorphism::new(surface.inner.clone());
    let choice = morin::NullChoice { column: None, flip };
    let jets = morin::cascade_jets(&h, ChartPoint::new(u, v), k, choice, None).map_err(err)?;
    Ok(jets.iter().map(|j| j.value()).collect())
}

/// Singular curves, signed A3 points and the signed region complex.
#[pyfunction]
#[pyo3(signature = (surface, grid = 128, source = "front"))]
fn strata<'py>(py: Python<'py>, surface: &Surface, grid: usize, source: &str) -> PyResult<Bound<'py, PyAny>> {
    let h = homomorphism(surface, source)?;
    let s = py.detach(|| analyze(h.as_ref(), &StrataConfig::new(grid))).map_err(err)?;
    to_py(py, &StrataSummary::new(&h.label(), &s))
}

#[pyfunction]
#[pyo3(signature = (surface, grid = 256, oracle = false, seed = 0))]
fn gauss_degree<'py>(py: Python<'py>, surface: &Surface, grid: usize, oracle: bool, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let f = surface.inner.clone();
    let d = py
        .detach(|| {
            let mut d = indexcheck::gauss_degree(f.as_ref(), grid)?;
            if oracle {
                d.preimage_count = Some(indexcheck::gauss_preimage_count(f.as_ref(), seed)?);
            }
            Ok::<_, frontidx::Error>(d)
        })
        .map_err(err)?;
    to_py(py, &d)
}

fn verify_config(grid: usize, oracle: bool) -> VerifyConfig {
    let mut c = VerifyConfig::new(grid);
    c.oracle = oracle;
    c
}

/// Verifies an index identity. `theorem` is one of `front`, `gauss_map`, `parallel`
/// (needs `t`) or `blaschke`.
#[pyfunction]
#[pyo3(signature = (theorem, surface, grid = 128, t = None, oracle = false))]
fn verify<'py>(
    py: Python<'py>,
    theorem: &str,
    surface: &Surface,
    grid: usize,
    t: Option<f64>,
    oracle: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = verify_config(grid, oracle);
    let f = surface.inner.clone();
    let r = match theorem {
        "front" => py.detach(|| indexcheck::verify_front_formula(f, &cfg)),
        "gauss_map" => py.detach(|| indexcheck::verify_gauss_map_formula(f, &cfg)),
        "blaschke" => py.detach(|| indexcheck::verify_blaschke_formula(f, &cfg)),
        "parallel" => {
            let t = t.ok_or_else(|| FrontidxError::new_err("`parallel` needs t"))?;
            py.detach(|| indexcheck::verify_parallel_formula(f, t, &cfg))
        }
        other => return Err(FrontidxError::new_err(format!("unknown theorem `{other}`"))),
    }
    .map_err(err)?;
    to_py(py, &r)
}

/// Generalised Quine formula for `torus_fold`, `torus_cover`, `torus_graph` or `sphere_identity`.
#[pyfunction]
#[pyo3(signature = (family, grid = 128, amplitude = 1.5, k = 2, a = 1.5, b = 0.3, oracle = false))]
#[allow(clippy::too_many_arguments)]
fn verify_morin_map<'py>(
    py: Python<'py>,
    family: &str,
    grid: usize,
    amplitude: f64,
    k: i32,
    a: f64,
    b: f64,
    oracle: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let map = match family {
        "torus_fold" => MapPair::Torus(TorusMap::Fold { amplitude }),
        "torus_cover" => MapPair::Torus(TorusMap::Cover { k }),
        "torus_graph" => MapPair::Torus(TorusMap::Graph { a, b }),
        "sphere_identity" => MapPair::Sphere(SphereMap::Identity),
        other => return Err(FrontidxError::new_err(format!("unknown map family `{other}`"))),
    };
    let cfg = verify_config(grid, oracle);
    let r = py.detach(|| indexcheck::verify_morin_map_formula(&map, &cfg)).map_err(err)?;
    to_py(py, &r)
}

/// Zeros and indices of `torus_constant`, `sphere_height` or `torus_trig` (seeded).
#[pyfunction]
#[pyo3(signature = (family, seed = 0))]
fn poincare_hopf<'py>(py: Python<'py>, family: &str, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let field = match family {
        "torus_constant" => TangentField::constant_u(),
        "sphere_height" => TangentField::height_gradient(),
        "torus_trig" => TangentField::random_trig(seed),
        other => return Err(FrontidxError::new_err(format!("unknown field family `{other}`"))),
    };
    let r = py.detach(|| indexcheck::poincare_hopf(&field)).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
fn parse_config<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &parse_config_rs(text).map_err(err)?)
}

/// Parses and runs a scenario config; returns the JSON run report as a dict.
#[pyfunction]
fn run_config<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    let cfg = parse_config_rs(text).map_err(err)?;
    let out = py.detach(|| run_scenario(&cfg));
    to_py(py, &out.report)
}

#[pymodule]
fn pyfrontidx(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FrontidxError", m.py().get_type::<FrontidxError>())?;
    m.add_class::<Surface>()?;
    m.add_function(wrap_pyfunction!(classify_point, m)?)?;
    m.add_function(wrap_pyfunction!(cascade, m)?)?;
    m.add_function(wrap_pyfunction!(strata, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_degree, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_morin_map, m)?)?;
    m.add_function(wrap_pyfunction!(poincare_hopf, m)?)?;
    m.add_function(wrap_pyfunction!(parse_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}

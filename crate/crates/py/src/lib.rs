//! Python bindings. Structured results are the JSON documents the `fatou`
//! CLI prints, decoded into Python dicts; points at infinity are `None` in
//! plain return values and `"inf"` inside those dicts.

use std::fmt::Display;

use fatou_core::basins::{self, Bounds, Palette};
use fatou_core::catalog;
use fatou_core::lifting::{self, OrientedPolyCurve, SequenceOptions};
use fatou_core::orbits;
use fatou_core::rays::{self, RayAngle, RayOptions};
use fatou_core::report::{self, Report};
use fatou_core::verify::{self, Group, PaperMaps};
use fatou_core::{ComplexValue, Polynomial, RationalMap, SpherePoint};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyBytes;

fn value_error<E: Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn decode(py: Python<'_>, text: String) -> PyResult<Bound<'_, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

macro_rules! to_dict {
    ($py:expr, $kind:expr, $body:expr) => {
        decode($py, report::to_string(&Report::new($kind, $body)))
    };
}

fn sphere(z: Option<ComplexValue>) -> SpherePoint {
    z.map_or(SpherePoint::INFINITY, SpherePoint::finite)
}

/// A rational map `num(z) / den(z)`; coefficients in ascending order.
#[pyclass(name = "RationalMap", module = "fatou", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRationalMap {
    inner: RationalMap,
}

#[pymethods]
impl PyRationalMap {
    #[new]
    fn new(num: Vec<ComplexValue>, den: Vec<ComplexValue>) -> PyResult<Self> {
        let inner = RationalMap::normalize(Polynomial::new(num), Polynomial::new(den)).map_err(value_error)?;
        Ok(PyRationalMap { inner })
    }

    /// Catalog lookup: `paper-g`, `paper-degree4`, `pseudo-basilica:<d>`,
    /// `pseudo-rabbit:<d>:<root-index>`.
    #[staticmethod]
    fn from_name(name: &str) -> PyResult<Self> {
        let inner = catalog::by_name(name).map_err(value_error)?;
        Ok(PyRationalMap { inner })
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn num(&self) -> Vec<ComplexValue> {
        self.inner.num().coeffs().to_vec()
    }

    #[getter]
    fn den(&self) -> Vec<ComplexValue> {
        self.inner.den().coeffs().to_vec()
    }

    #[pyo3(signature = (z=None))]
    fn __call__(&self, z: Option<ComplexValue>) -> Option<ComplexValue> {
        self.inner.eval_sphere(&sphere(z)).to_finite()
    }

    fn __repr__(&self) -> String {
        format!("RationalMap(num={:?}, den={:?})", self.num(), self.den())
    }

    /// `[(point, local_degree)]`.
    fn critical_points(&self) -> PyResult<Vec<(Option<ComplexValue>, usize)>> {
        let crit = self.inner.critical_points().map_err(value_error)?;
        Ok(crit.iter().map(|c| (c.location.to_finite(), c.local_degree)).collect())
    }

    fn portrait<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let p = py.detach(|| orbits::critical_portrait(&self.inner)).map_err(value_error)?;
        to_dict!(py, "portrait", &p)
    }

    /// Solutions of `f^p(z) = z` as `[(point, multiplicity, minimal_period)]`.
    fn periodic_points(&self, py: Python<'_>, period: usize) -> PyResult<Vec<(Option<ComplexValue>, usize, usize)>> {
        if period == 0 {
            return Err(PyValueError::new_err("period must be at least 1"));
        }
        let pts = py.detach(|| orbits::periodic_points(&self.inner, period)).map_err(value_error)?;
        Ok(pts
            .iter()
            .map(|p| (p.point.to_finite(), p.multiplicity, p.minimal_period))
            .collect())
    }

    /// External ray of angle `"a/b"` in the basin of `basin` (None for
    /// infinity).
    #[pyo3(signature = (angle, basin=None, depth=RayOptions::default().depth, r0=RayOptions::default().r0, tol=RayOptions::default().landing_tol))]
    fn trace_ray<'py>(
        &self,
        py: Python<'py>,
        angle: &str,
        basin: Option<ComplexValue>,
        depth: usize,
        r0: f64,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let angle: RayAngle = angle.parse().map_err(value_error)?;
        let opts = RayOptions {
            depth,
            r0,
            landing_tol: tol,
            ..RayOptions::default()
        };
        let trace = py
            .detach(|| rays::trace_ray(&self.inner, &sphere(basin), angle, &opts))
            .map_err(value_error)?;
        to_dict!(py, "ray", &trace)
    }

    /// Lifts of a sampled circle, with signs taken relative to `omega`.
    #[pyo3(signature = (center, radius, vertices=256, omega=ComplexValue::new(1e6, 0.0), eps=lifting::DEFAULT_EPS, ccw=true))]
    #[allow(clippy::too_many_arguments)]
    fn lift_circle<'py>(
        &self,
        py: Python<'py>,
        center: ComplexValue,
        radius: f64,
        vertices: usize,
        omega: ComplexValue,
        eps: f64,
        ccw: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let gamma = OrientedPolyCurve::circle(center, radius, vertices, ccw).map_err(value_error)?;
        let set = py
            .detach(|| lifting::lift_curve(&self.inner, &gamma, omega, eps))
            .map_err(value_error)?;
        to_dict!(py, "lift", &set)
    }

    /// Signs of `steps` successive outermost lifts of a circle.
    #[pyo3(signature = (center, radius, steps, vertices=256, omega=ComplexValue::new(1e6, 0.0), ccw=true))]
    #[allow(clippy::too_many_arguments)]
    fn sign_sequence<'py>(
        &self,
        py: Python<'py>,
        center: ComplexValue,
        radius: f64,
        steps: usize,
        vertices: usize,
        omega: ComplexValue,
        ccw: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let gamma = OrientedPolyCurve::circle(center, radius, vertices, ccw).map_err(value_error)?;
        let seq = py
            .detach(|| lifting::sign_change_sequence(&self.inner, &gamma, omega, steps, &SequenceOptions::default()))
            .map_err(value_error)?;
        to_dict!(py, "sign-sequence", &seq)
    }

    /// Basin picture as binary PPM bytes over `(x_min, x_max, y_min, y_max)`.
    #[pyo3(signature = (bounds=(-3.0, 3.0, -3.0, 3.0), width=400, height=400, trap=basins::DEFAULT_TRAP_RADIUS, max_iter=basins::DEFAULT_MAX_ITER))]
    fn render<'py>(
        &self,
        py: Python<'py>,
        bounds: (f64, f64, f64, f64),
        width: usize,
        height: usize,
        trap: f64,
        max_iter: usize,
    ) -> PyResult<Bound<'py, PyBytes>> {
        let bounds = Bounds::new(bounds.0, bounds.1, bounds.2, bounds.3).map_err(value_error)?;
        let ppm = py
            .detach(|| -> Result<Vec<u8>, String> {
                let portrait = orbits::critical_portrait(&self.inner).map_err(|e| e.to_string())?;
                let grid = basins::classify_grid(&self.inner, &portrait, bounds, (width, height), trap, max_iter)
                    .map_err(|e| e.to_string())?;
                Ok(basins::render_ppm(&grid, &Palette::default()))
            })
            .map_err(PyValueError::new_err)?;
        Ok(PyBytes::new(py, &ppm))
    }
}

#[pyfunction]
fn catalog_names() -> Vec<String> {
    catalog::names()
}

#[pyfunction]
fn pseudo_basilica(d: usize) -> PyResult<PyRationalMap> {
    let inner = catalog::pseudo_basilica(d).map_err(value_error)?;
    Ok(PyRationalMap { inner })
}

#[pyfunction]
fn pseudo_rabbit(d: usize, r: ComplexValue) -> PyResult<PyRationalMap> {
    let inner = catalog::pseudo_rabbit(d, r).map_err(value_error)?;
    Ok(PyRationalMap { inner })
}

#[pyfunction]
fn pseudo_rabbit_roots(py: Python<'_>, d: usize) -> PyResult<Vec<ComplexValue>> {
    py.detach(|| catalog::pseudo_rabbit_roots(d)).map_err(value_error)
}

/// `(a, b, residuals)` for the pinch solution `(z-1)^2 (z+2) / (a z - b)`.
#[pyfunction]
fn pinch_params() -> PyResult<(ComplexValue, ComplexValue, [f64; 3])> {
    let sol = catalog::solve_pinch_params().map_err(value_error)?;
    let res = catalog::pinch_residuals(&sol.map);
    Ok((sol.a, sol.b, res))
}

/// Runs the numerical checks; `only` selects groups by name.
#[pyfunction]
#[pyo3(signature = (only=Vec::new()))]
fn run_checks<'py>(py: Python<'py>, only: Vec<String>) -> PyResult<Bound<'py, PyAny>> {
    let groups = only
        .iter()
        .map(|s| s.parse::<Group>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(PyValueError::new_err)?;
    let checks = py.detach(|| verify::run(&PaperMaps::default(), &groups));
    decode(py, report::to_string(&checks))
}

#[pymodule]
fn fatou(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRationalMap>()?;
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add_function(wrap_pyfunction!(pseudo_basilica, m)?)?;
    m.add_function(wrap_pyfunction!(pseudo_rabbit, m)?)?;
    m.add_function(wrap_pyfunction!(pseudo_rabbit_roots, m)?)?;
    m.add_function(wrap_pyfunction!(pinch_params, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}

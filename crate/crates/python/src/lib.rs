//! Python bindings: build model algebras, compute brackets and extremal data,
//! run recognition and the verification suites. Reports come back as JSON
//! strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use extremal::algebra::{psp3, sp, sp3};
use extremal::extremal::is_extremal;
use extremal::geometry::build_geometry;
use extremal::recognition::{product_gamma as core_product_gamma, recognize as core_recognize};
use extremal::suites::{run_suite, Suite, SuiteInput, SuiteOptions};
use extremal::{FieldSpec, Scalar, StructureLieAlgebra, Vector};

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn field_of(p: Option<u64>, rational: bool) -> PyResult<FieldSpec> {
    match (p, rational) {
        (_, true) => Ok(FieldSpec::Rational),
        (Some(p), false) => FieldSpec::prime(p).map_err(value_error),
        (None, false) => Err(PyValueError::new_err("give p or rational=True")),
    }
}

/// A scalar from Python: an integer, or a string such as `"1/2"` or `"1+2t"`.
#[derive(FromPyObject)]
enum ScalarIn {
    Int(i64),
    Str(String),
}

#[derive(IntoPyObject)]
enum ScalarOut {
    Int(u64),
    Str(String),
}

fn scalar_in(k: &FieldSpec, s: &ScalarIn) -> PyResult<Scalar> {
    match s {
        ScalarIn::Int(n) => Ok(k.from_i64(*n)),
        ScalarIn::Str(t) => k.parse_scalar(t).map_err(value_error),
    }
}

fn scalar_out(s: &Scalar) -> ScalarOut {
    match s.residue() {
        Some(r) => ScalarOut::Int(r),
        None => ScalarOut::Str(s.to_string()),
    }
}

#[pyclass(name = "Algebra", module = "extremal_py", frozen)]
struct PyAlgebra {
    inner: StructureLieAlgebra,
}

impl PyAlgebra {
    fn vector(&self, v: Vec<ScalarIn>) -> PyResult<Vector> {
        if v.len() != self.inner.dim() {
            return Err(PyValueError::new_err(format!("expected {} coordinates, got {}", self.inner.dim(), v.len())));
        }
        v.iter().map(|s| scalar_in(self.inner.field(), s)).collect()
    }
}

#[pymethods]
impl PyAlgebra {
    /// The symplectic Lie algebra on a space with `pairs` hyperbolic pairs.
    #[staticmethod]
    #[pyo3(signature = (pairs, p=None, rational=false))]
    fn sp(pairs: usize, p: Option<u64>, rational: bool) -> PyResult<Self> {
        Ok(PyAlgebra { inner: sp(&field_of(p, rational)?, pairs).map_err(value_error)? })
    }

    #[staticmethod]
    #[pyo3(signature = (p=None, rational=false))]
    fn sp3(p: Option<u64>, rational: bool) -> PyResult<Self> {
        Ok(PyAlgebra { inner: sp3(&field_of(p, rational)?).map_err(value_error)?.algebra })
    }

    #[staticmethod]
    #[pyo3(signature = (p=None, rational=false))]
    fn psp3(p: Option<u64>, rational: bool) -> PyResult<Self> {
        Ok(PyAlgebra { inner: psp3(&field_of(p, rational)?).map_err(value_error)?.algebra })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(value_error)?;
        Ok(PyAlgebra { inner: StructureLieAlgebra::from_json(&v).map_err(value_error)? })
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn field(&self) -> String {
        serde_json::to_string(self.inner.field()).unwrap()
    }

    fn extremal_generators(&self) -> Vec<Vec<ScalarOut>> {
        self.inner.extremal_generators().iter().map(|g| g.iter().map(scalar_out).collect()).collect()
    }

    fn bracket(&self, x: Vec<ScalarIn>, y: Vec<ScalarIn>) -> PyResult<Vec<ScalarOut>> {
        let (x, y) = (self.vector(x)?, self.vector(y)?);
        Ok(self.inner.bracket(&x, &y).iter().map(scalar_out).collect())
    }

    /// `(extremal, sandwich)`.
    fn is_extremal(&self, x: Vec<ScalarIn>) -> PyResult<(bool, bool)> {
        let t = is_extremal(&self.inner, &self.vector(x)?).map_err(value_error)?;
        Ok((t.extremal, t.sandwich))
    }

    fn g_value(&self, x: Vec<ScalarIn>, y: Vec<ScalarIn>) -> PyResult<ScalarOut> {
        let g = self.inner.g_value(&self.vector(x)?, &self.vector(y)?).map_err(value_error)?;
        Ok(scalar_out(&g))
    }

    fn satisfies_jacobi(&self) -> bool {
        self.inner.jacobi_violation().is_none()
    }

    fn center_dim(&self) -> usize {
        self.inner.center().dim()
    }

    fn extremal_form_radical_dim(&self) -> PyResult<usize> {
        Ok(self.inner.extremal_form().map_err(value_error)?.radical().dim())
    }

    /// A random change of basis, optionally with the bracket multiplied by `gamma`.
    #[pyo3(signature = (seed, gamma=None))]
    fn scramble(&self, seed: u64, gamma: Option<ScalarIn>) -> PyResult<Self> {
        let gamma = gamma.map(|g| scalar_in(self.inner.field(), &g)).transpose()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (inner, _) = self.inner.scramble(&mut rng, gamma.as_ref()).map_err(value_error)?;
        Ok(PyAlgebra { inner })
    }

    fn __repr__(&self) -> String {
        format!("Algebra(dim={}, field={})", self.inner.dim(), self.field())
    }
}

fn default_budget(l: &StructureLieAlgebra, budget: Option<usize>) -> usize {
    budget.unwrap_or(if l.field().is_finite() { 20_000 } else { 60 })
}

/// Recognition report as JSON; raises `ValueError` when the hypotheses fail.
#[pyfunction]
#[pyo3(signature = (algebra, budget=None))]
fn recognize(algebra: &PyAlgebra, budget: Option<usize>) -> PyResult<String> {
    let l = &algebra.inner;
    let r = core_recognize(l, default_budget(l, budget)).map_err(value_error)?;
    Ok(r.to_json().to_string())
}

/// Points and lines of the extremal geometry as JSON.
#[pyfunction]
#[pyo3(signature = (algebra, budget=None))]
fn geometry(algebra: &PyAlgebra, budget: Option<usize>) -> PyResult<String> {
    let l = &algebra.inner;
    let g = build_geometry(l, l.extremal_generators(), default_budget(l, budget)).map_err(value_error)?;
    Ok(g.to_json().to_string())
}

/// Runs a named verification suite and returns its report as JSON.
#[pyfunction]
#[pyo3(signature = (algebra, suite="all", seed=0x5eed, budget=None, samples=50))]
fn verify(algebra: &PyAlgebra, suite: &str, seed: u64, budget: Option<usize>, samples: usize) -> PyResult<String> {
    let suite = Suite::parse(suite).ok_or_else(|| PyValueError::new_err(format!("unknown suite {suite:?}")))?;
    let l = &algebra.inner;
    let opts = SuiteOptions { seed, budget: default_budget(l, budget), samples };
    let input = SuiteInput { algebra: l.clone(), space: None };
    Ok(run_suite(suite, &input, &opts).to_json().to_string())
}

/// The scalar relating two brackets on the same space.
#[pyfunction]
fn product_gamma(first: &PyAlgebra, second: &PyAlgebra) -> PyResult<ScalarOut> {
    let g = core_product_gamma(&first.inner, &second.inner, first.inner.extremal_generators()).map_err(value_error)?;
    Ok(scalar_out(&g))
}

#[pymodule]
pub fn extremal_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlgebra>()?;
    m.add_function(wrap_pyfunction!(recognize, m)?)?;
    m.add_function(wrap_pyfunction!(geometry, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(product_gamma, m)?)?;
    Ok(())
}

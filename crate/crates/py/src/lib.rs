//! Python bindings. Scalars cross the boundary as strings in the scalar
//! grammar, terms and polynomials as text in the module's variable names,
//! and polyhedra as lists of `(u, gamma)` rows meaning `<x, u> <= gamma`.

use std::cmp::Ordering;

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use valflag::filters::{farkas_certify, filter_member, halfspace_member, mindim_witness, FarkasOutcome};
use valflag::io::parse_rational;
use valflag::polyhedra::{flag_from_matrix, FlagKind, GammaPolyhedralSet, GammaPolyhedron};
use valflag::prime::{self, DefiningMatrix, EqualityVerdict};
use valflag::scalars::fmt_rational;
use valflag::tropical::{default_vars, Term, TropPolynomial};
use valflag::{Error, Scalar};

create_exception!(valflag, ValflagError, PyValueError);

fn py_err(e: Error) -> PyErr {
    ValflagError::new_err(e.to_string())
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for valflag::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

type Rows = Vec<(Vec<i64>, String)>;

fn polyhedron(n: usize, rows: &Rows) -> PyResult<GammaPolyhedron> {
    let mut p = GammaPolyhedron::full(n);
    for (u, gamma) in rows {
        p.push(u.clone(), parse_rational(gamma).py()?).py()?;
    }
    Ok(p)
}

fn rows_of(p: &GammaPolyhedron) -> Rows {
    p.rows().iter().map(|(u, g)| (u.clone(), fmt_rational(g))).collect()
}

fn strings(v: &[Scalar]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn ordering(o: Ordering) -> i8 {
    o as i8
}

/// An element of the multi-quadratic field, with exact sign.
#[pyclass(name = "Scalar", frozen, eq, hash, skip_from_py_object, module = "valflag")]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyScalar(Scalar);

#[pymethods]
impl PyScalar {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self(valflag::io::parse_scalar(text).py()?))
    }

    fn sign(&self) -> i8 {
        self.0.signum()
    }

    fn is_rational(&self) -> bool {
        self.0.is_rational()
    }

    #[pyo3(signature = (digits = 12))]
    fn decimal(&self, digits: usize) -> String {
        self.0.to_decimal(digits)
    }

    fn __float__(&self) -> f64 {
        self.0.to_f64()
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    fn __truediv__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self(self.0.checked_div(&other.0).py()?))
    }

    fn __neg__(&self) -> Self {
        Self(-&self.0)
    }

    /// Exact comparison: -1, 0 or 1.
    fn cmp(&self, other: &Self) -> i8 {
        (&self.0 - &other.0).signum()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Scalar('{}')", self.0)
    }
}

/// A prime, stored in canonical form.
#[pyclass(name = "Prime", frozen, module = "valflag")]
struct PyPrime {
    inner: prime::Prime,
    vars: Vec<String>,
}

impl PyPrime {
    fn poly(&self, text: &str) -> PyResult<TropPolynomial> {
        TropPolynomial::parse(text, &self.vars).py()
    }

    fn term(&self, text: &str) -> PyResult<Term> {
        Term::parse(text, &self.vars).py()
    }
}

#[pymethods]
impl PyPrime {
    /// `rows` are the defining matrix rows `(c, xi_1, ..., xi_n)` as strings.
    #[new]
    #[pyo3(signature = (rows, vars = None))]
    fn new(rows: Vec<Vec<String>>, vars: Option<Vec<String>>) -> PyResult<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| valflag::io::parse_scalar(s)).collect::<valflag::Result<Vec<_>>>())
            .collect::<valflag::Result<Vec<_>>>()
            .py()?;
        let n = match (&vars, parsed.first()) {
            (Some(v), _) => v.len(),
            (None, Some(r)) if !r.is_empty() => r.len() - 1,
            _ => return Err(ValflagError::new_err("cannot infer the number of variables")),
        };
        let m = DefiningMatrix::new(n, parsed).py()?;
        Ok(Self {
            inner: prime::canonicalize(&m).py()?,
            vars: vars.unwrap_or_else(|| default_vars(n)),
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn vars(&self) -> Vec<String> {
        self.vars.clone()
    }

    /// Rows of the canonical form.
    #[getter]
    fn rows(&self) -> Vec<Vec<String>> {
        self.inner.rows().iter().map(|r| strings(r)).collect()
    }

    fn classify(&self) -> &'static str {
        prime::classify(&self.inner).as_str()
    }

    fn is_order(&self) -> PyResult<bool> {
        prime::is_order(&self.inner).py()
    }

    fn height(&self) -> PyResult<usize> {
        prime::height(&self.inner).py()
    }

    fn min_filter_dim(&self) -> PyResult<usize> {
        prime::min_filter_dim(&self.inner).py()
    }

    /// -1, 0 or 1 as `f` is below, equivalent to or above `g`.
    fn compare(&self, f: &str, g: &str) -> PyResult<i8> {
        Ok(ordering(prime::compare(&self.inner, &self.poly(f)?, &self.poly(g)?).py()?))
    }

    /// `None` if both define the same prime, else a distinguishing term.
    fn distinguish(&self, other: &PyPrime) -> PyResult<Option<String>> {
        Ok(match prime::decide_equal(&self.inner, &other.inner).py()? {
            EqualityVerdict::Equal => None,
            EqualityVerdict::Distinguished(w) => Some(w.to_term().display_with(&self.vars)),
        })
    }

    fn __eq__(&self, other: &PyPrime) -> PyResult<bool> {
        Ok(self.distinguish(other)?.is_none())
    }

    /// `(base, dirs)` of the flag of polyhedra, or of cones.
    #[pyo3(signature = (cones = false))]
    fn flag(&self, cones: bool) -> PyResult<(Vec<String>, Vec<Vec<String>>)> {
        let kind = if cones { FlagKind::Cones } else { FlagKind::Polyhedra };
        let f = flag_from_matrix(&self.inner, kind).py()?;
        Ok((strings(f.base()), f.dirs().iter().map(|d| strings(d)).collect()))
    }

    /// Index of the first piece that is a filter member, or `None`.
    fn member(&self, pieces: Vec<Rows>) -> PyResult<Option<usize>> {
        let n = self.inner.n();
        let set = GammaPolyhedralSet::new(pieces.iter().map(|p| polyhedron(n, p)).collect::<PyResult<_>>()?).py()?;
        Ok(filter_member(&self.inner, &set).py()?.piece_index)
    }

    /// Whether `{ x : a(x) <= 0 }` is in the filter.
    fn halfspace_member(&self, a: &str) -> PyResult<bool> {
        halfspace_member(&self.inner, &self.term(a)?).py()
    }

    /// Rows of a filter member of minimum dimension.
    fn mindim(&self) -> PyResult<Rows> {
        Ok(rows_of(&mindim_witness(&self.inner).py()?))
    }

    fn __repr__(&self) -> String {
        format!("Prime({:?})", self.rows())
    }
}

/// Either `{"m", "m_l", "b"}` certifying the containment of half-spaces, or
/// `{"point"}` violating it.
#[pyfunction]
#[pyo3(signature = (target, hypotheses, vars = None))]
fn farkas<'py>(
    py: Python<'py>,
    target: &str,
    hypotheses: Vec<String>,
    vars: Option<Vec<String>>,
) -> PyResult<Bound<'py, PyDict>> {
    let vars = vars.unwrap_or_else(|| default_vars(2));
    let a = Term::parse(target, &vars).py()?;
    let a_l = hypotheses
        .iter()
        .map(|h| Term::parse(h, &vars))
        .collect::<valflag::Result<Vec<_>>>()
        .py()?;
    let out = PyDict::new(py);
    match farkas_certify(&a_l, &a).py()? {
        FarkasOutcome::Certificate(c) => {
            out.set_item("m", c.m)?;
            out.set_item("m_l", c.m_l)?;
            out.set_item("b", fmt_rational(&c.b))?;
        }
        FarkasOutcome::Counterexample(x) => out.set_item("point", strings(&x))?,
    }
    Ok(out)
}

#[pymodule]
#[pyo3(name = "valflag")]
fn valflag_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ValflagError", m.py().get_type::<ValflagError>())?;
    m.add_class::<PyScalar>()?;
    m.add_class::<PyPrime>()?;
    m.add_function(wrap_pyfunction!(farkas, m)?)?;
    Ok(())
}

//! Python bindings: groups, diagrams, series and the invariance checks.
//!
//! Diagrams are kept in canonical form, so move sites and arrow indices
//! always refer to the canonical rotation.

use gausspi::homology::{decompose, energy, torsion};
use gausspi::invariance::{certify_series, r3_empirical, Orbits};
use gausspi::invariants::{eval_arrow, eval_nu, gv_eval, whitney};
use gausspi::io::{
    format_abelian, format_diagram, format_move, format_q, format_series, inline, parse_diagram, parse_inline, parse_loop, parse_move,
    parse_q, parse_series,
};
use gausspi::linalg::Q;
use gausspi::moves::{apply, enumerate_moves, validate_site, MoveKind};
use gausspi::series::{gen_relations, i_inv, i_map, pairing, span_membership, Family, Series};
use gausspi::{abelianize, Diagram, Error, WeightedGroup};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(gausspi_py, DomainError, PyException);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Parse(s) => PyValueError::new_err(s),
        Error::Domain(s) => DomainError::new_err(s),
    }
}

trait OrRaise<T> {
    fn or_raise(self) -> PyResult<T>;
}

impl<T> OrRaise<T> for gausspi::Result<T> {
    fn or_raise(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

fn fraction<'py>(py: Python<'py>, x: &Q) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((format_q(x),))
}

fn rational(x: &Bound<'_, PyAny>) -> PyResult<Q> {
    parse_q(&x.str()?.to_cow()?).or_raise()
}

fn same_group(a: &Group, b: &Group) -> PyResult<()> {
    if a.grp != b.grp {
        return Err(DomainError::new_err(format!("the inputs live over different groups ({} and {})", a.spec, b.spec)));
    }
    Ok(())
}

/// A weighted group, given by a spec such as "Z/2 w -1" or "free 2".
#[pyclass(module = "gausspi_py", frozen, from_py_object)]
#[derive(Clone)]
struct Group {
    spec: String,
    grp: WeightedGroup,
}

#[pymethods]
impl Group {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Group { spec: spec.trim().to_string(), grp: WeightedGroup::parse_spec(spec).or_raise()? })
    }

    #[getter]
    fn spec(&self) -> &str {
        &self.spec
    }

    fn is_abelian(&self) -> bool {
        self.grp.is_abelian()
    }

    fn is_finite(&self) -> bool {
        self.grp.is_finite()
    }

    fn identity(&self) -> String {
        self.grp.format(&self.grp.identity())
    }

    fn mul(&self, a: &str, b: &str) -> PyResult<String> {
        let (a, b) = (self.grp.parse_elem(a).or_raise()?, self.grp.parse_elem(b).or_raise()?);
        Ok(self.grp.format(&self.grp.mul(&a, &b)))
    }

    fn inv(&self, a: &str) -> PyResult<String> {
        Ok(self.grp.format(&self.grp.inv(&self.grp.parse_elem(a).or_raise()?)))
    }

    fn weight(&self, a: &str) -> PyResult<i8> {
        Ok(self.grp.weight(&self.grp.parse_elem(a).or_raise()?))
    }

    fn conj_class(&self, a: &str) -> PyResult<String> {
        Ok(self.grp.format(&self.grp.conj_class(&self.grp.parse_elem(a).or_raise()?)))
    }

    /// Elements of word length at most `r`.
    fn ball(&self, r: usize) -> Vec<String> {
        self.grp.ball(r).iter().map(|g| self.grp.format(g)).collect()
    }

    fn __eq__(&self, o: &Group) -> bool {
        self.grp == o.grp
    }

    fn __repr__(&self) -> String {
        format!("Group({:?})", self.spec)
    }
}

#[pyclass(module = "gausspi_py", name = "Diagram", frozen, from_py_object)]
#[derive(Clone)]
struct PyDiagram {
    group: Group,
    d: Diagram,
}

impl PyDiagram {
    fn wrap(&self, d: Diagram) -> PyDiagram {
        PyDiagram { group: self.group.clone(), d: d.canonical(&self.group.grp) }
    }

    fn step(&self, mv: &str) -> gausspi::Result<Diagram> {
        let grp = &self.group.grp;
        let m = parse_move(grp, &self.d, mv)?;
        validate_site(grp, &self.d, &m, true)?;
        Ok(apply(grp, &self.d, &m)?.canonical(grp))
    }
}

#[pymethods]
impl PyDiagram {
    /// A diagram from its inline code, e.g. "degree 1 arrows 0->1:+ edges 0 1".
    #[new]
    fn new(group: Group, code: &str) -> PyResult<Self> {
        let d = parse_inline(&group.grp, code).or_raise()?.canonical(&group.grp);
        Ok(PyDiagram { group, d })
    }

    /// A diagram from the text of a .gd file.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let (grp, spec, d) = parse_diagram(text).or_raise()?;
        Ok(PyDiagram { group: Group { spec, grp }, d })
    }

    #[getter]
    fn group(&self) -> Group {
        self.group.clone()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.d.degree()
    }

    /// (tail, head, writhe) per arrow; writhe 0 on arrow diagrams.
    fn arrows(&self) -> Vec<(usize, usize, i8)> {
        self.d.arrows().iter().map(|a| (a.tail, a.head, a.writhe)).collect()
    }

    fn edges(&self) -> Vec<String> {
        self.d.edges().iter().map(|g| self.group.grp.format(g)).collect()
    }

    fn aut_order(&self) -> usize {
        self.d.aut_order()
    }

    fn sign(&self) -> i8 {
        self.d.sign()
    }

    fn is_arrow_diagram(&self) -> bool {
        self.d.is_arrow_diagram()
    }

    fn code(&self) -> String {
        inline(&self.group.grp, &self.d)
    }

    fn to_text(&self) -> String {
        format_diagram(&self.group.spec, &self.group.grp, &self.d)
    }

    /// Keep the arrows with the given indices.
    fn sub(&self, keep: Vec<usize>) -> PyResult<PyDiagram> {
        let mut mask = vec![false; self.d.degree()];
        for i in keep {
            *mask.get_mut(i).ok_or_else(|| DomainError::new_err(format!("no arrow {i}")))? = true;
        }
        Ok(self.wrap(self.d.remove_arrows(&self.group.grp, &mask)))
    }

    /// Available moves as move lines, with conjugators and splits from the ball of radius `ball`.
    #[pyo3(signature = (ball = 1, kinds = None))]
    fn moves(&self, ball: usize, kinds: Option<Vec<String>>) -> PyResult<Vec<String>> {
        let kinds = match kinds {
            None => MoveKind::ALL.to_vec(),
            Some(k) => k.iter().map(|n| MoveKind::parse(n)).collect::<gausspi::Result<_>>().or_raise()?,
        };
        Ok(enumerate_moves(&self.group.grp, &self.d, ball, &kinds).iter().map(|m| format_move(&self.group.grp, &self.d, m)).collect())
    }

    fn apply(&self, mv: &str) -> PyResult<PyDiagram> {
        Ok(self.wrap(self.step(mv).or_raise()?))
    }

    /// Apply move lines in turn; each refers to the canonical form of the previous result.
    fn replay(&self, moves: Vec<String>) -> PyResult<PyDiagram> {
        let mut cur = self.clone();
        for (i, mv) in moves.iter().enumerate() {
            let d = cur.step(mv).map_err(|e| match e {
                Error::Parse(s) => Error::Parse(format!("move {}: {s}", i + 1)),
                Error::Domain(s) => Error::Domain(format!("move {}: {s}", i + 1)),
            });
            cur = cur.wrap(d.or_raise()?);
        }
        Ok(cur)
    }

    fn abelianize(&self) -> PyResult<String> {
        Ok(format_abelian(&self.group.grp, &abelianize(&self.group.grp, &self.d).or_raise()?))
    }

    fn energy(&self, lp: &str) -> PyResult<i64> {
        energy(&self.d, &parse_loop(&self.d, lp).or_raise()?).or_raise()
    }

    fn torsion(&self, lp: &str) -> PyResult<i64> {
        torsion(&self.d, &parse_loop(&self.d, lp).or_raise()?).or_raise()
    }

    /// Coordinates of a loop in the fundamental basis: (arrow coefficients, K coefficient).
    fn decompose(&self, lp: &str) -> PyResult<(Vec<i64>, i64)> {
        decompose(&self.d, &parse_loop(&self.d, lp).or_raise()?).or_raise()
    }

    /// (v_l, v_r) of a Gauss diagram with a homologically trivial total class.
    fn whitney(&self) -> PyResult<(i64, i64)> {
        let w = whitney(&self.group.grp, &self.d).or_raise()?;
        Ok((w.v_l, w.v_r))
    }

    fn gv<'py>(&self, py: Python<'py>, n: usize, gamma: Vec<String>) -> PyResult<Bound<'py, PyAny>> {
        let grp = &self.group.grp;
        if gamma.len() != n + 1 {
            return Err(PyValueError::new_err(format!("gamma needs {} classes for n = {n}", n + 1)));
        }
        let gamma = gamma.iter().map(|w| grp.parse_elem(w)).collect::<gausspi::Result<Vec<_>>>().or_raise()?;
        fraction(py, &gv_eval(grp, &gamma, n, &self.d).or_raise()?)
    }

    fn __eq__(&self, o: &PyDiagram) -> bool {
        self.group.grp == o.group.grp && self.d == o.d
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.d.hash(&mut h);
        h.finish()
    }

    fn __repr__(&self) -> String {
        format!("Diagram({:?}, {:?})", self.group.spec, self.code())
    }
}

#[pyclass(module = "gausspi_py", name = "Series", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySeries {
    group: Group,
    x: Series<Diagram>,
}

#[pymethods]
impl PySeries {
    /// A series from (coefficient, diagram) pairs; coefficients may be ints,
    /// Fractions or strings such as "-1/2", diagrams may be inline codes.
    #[new]
    fn new(group: Group, terms: Vec<(Bound<'_, PyAny>, Bound<'_, PyAny>)>) -> PyResult<Self> {
        let mut x = Series::new();
        for (c, d) in terms {
            let d = match d.extract::<PyDiagram>() {
                Ok(d) => {
                    if d.group.grp != group.grp {
                        return Err(DomainError::new_err("diagram over another group"));
                    }
                    d.d
                }
                Err(_) => parse_inline(&group.grp, &d.extract::<String>()?).or_raise()?.canonical(&group.grp),
            };
            x.add_term(d, rational(&c)?);
        }
        Ok(PySeries { group, x })
    }

    /// A series from the text of a .series file.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let (grp, spec, x) = parse_series(text).or_raise()?;
        Ok(PySeries { group: Group { spec, grp }, x })
    }

    #[getter]
    fn group(&self) -> Group {
        self.group.clone()
    }

    fn terms<'py>(&self, py: Python<'py>) -> PyResult<Vec<(Bound<'py, PyAny>, PyDiagram)>> {
        self.x.iter().map(|(d, c)| Ok((fraction(py, c)?, PyDiagram { group: self.group.clone(), d: d.clone() }))).collect()
    }

    fn __len__(&self) -> usize {
        self.x.len()
    }

    fn to_text(&self) -> String {
        format_series(&self.group.spec, &self.group.grp, &self.x)
    }

    fn i_map(&self) -> PySeries {
        PySeries { group: self.group.clone(), x: i_map(&self.group.grp, &self.x) }
    }

    fn i_inv(&self) -> PySeries {
        PySeries { group: self.group.clone(), x: i_inv(&self.group.grp, &self.x) }
    }

    #[pyo3(signature = (other, normalized = false))]
    fn pair<'py>(&self, py: Python<'py>, other: &PySeries, normalized: bool) -> PyResult<Bound<'py, PyAny>> {
        same_group(&self.group, &other.group)?;
        fraction(py, &pairing(&self.x, &other.x, normalized))
    }

    /// Value on a Gauss diagram: arrow series pair with subdiagrams, other series with I of them.
    fn evaluate<'py>(&self, py: Python<'py>, d: &PyDiagram) -> PyResult<Bound<'py, PyAny>> {
        same_group(&self.group, &d.group)?;
        let grp = &self.group.grp;
        let v = if self.x.iter().all(|(k, _)| k.is_arrow_diagram()) { eval_arrow(grp, &self.x, &d.d) } else { eval_nu(grp, &self.x, &d.d) };
        fraction(py, &v)
    }

    /// Invariance certificate of an arrow series, as the key/value pairs of the report.
    #[pyo3(signature = (ball = 1, budget = 200, seed = 0))]
    fn check_invariance<'py>(&self, py: Python<'py>, ball: usize, budget: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
        if self.x.iter().any(|(d, _)| !d.is_arrow_diagram()) {
            return Err(DomainError::new_err("check_invariance takes an arrow series (no writhes)"));
        }
        let grp = &self.group.grp;
        let cert = certify_series(&Orbits::new(grp, ball), &self.x);
        let out = PyDict::new(py);
        for line in cert.report().lines().filter(|l| !l.starts_with('#')) {
            if let Some((k, v)) = line.split_once('=') {
                out.set_item(k, v)?;
            }
        }
        let sampled = r3_empirical(grp, &self.x, ball, budget, seed).is_none();
        out.set_item("r3_sampled", if sampled { "ok" } else { "fail" })?;
        out.set_item("diagnostics", cert.diagnostics.clone())?;
        Ok(out)
    }

    /// Whether the series lies in the span of a relation family.
    #[pyo3(signature = (family, ball = 1, degree = None))]
    fn in_span(&self, family: &str, ball: usize, degree: Option<usize>) -> PyResult<bool> {
        let f = Family::parse(family).or_raise()?;
        let n = degree.unwrap_or_else(|| self.x.max_degree().unwrap_or(0));
        Ok(span_membership(&self.x, &gen_relations(&self.group.grp, f, n, ball)).is_some())
    }

    fn __eq__(&self, o: &PySeries) -> bool {
        self.group.grp == o.group.grp && self.x == o.x
    }

    fn __repr__(&self) -> String {
        format!("Series({:?}, {} terms)", self.group.spec, self.x.len())
    }
}

/// Relators of a family in degree `degree`, with decorations from the ball of radius `ball`.
#[pyfunction]
#[pyo3(signature = (family, group, degree, ball = 1))]
fn relations(family: &str, group: Group, degree: usize, ball: usize) -> PyResult<Vec<PySeries>> {
    let f = Family::parse(family).or_raise()?;
    Ok(gen_relations(&group.grp, f, degree, ball).into_iter().map(|x| PySeries { group: group.clone(), x }).collect())
}

/// Run the built-in checks; returns (id, name, passed, report line) per check.
#[pyfunction]
#[pyo3(signature = (only = None, seed = 0))]
fn selftest(py: Python<'_>, only: Option<Vec<usize>>, seed: u64) -> Vec<(usize, String, bool, String)> {
    py.detach(|| {
        gausspi::selftest::CRITERIA
            .iter()
            .filter(|c| only.as_ref().is_none_or(|o| o.contains(&c.id)))
            .map(|c| {
                let r = (c.run)(seed);
                (c.id, c.name.to_string(), r.is_ok(), gausspi::selftest::line(c, &r))
            })
            .collect()
    })
}

#[pymodule]
fn gausspi_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Group>()?;
    m.add_class::<PyDiagram>()?;
    m.add_class::<PySeries>()?;
    m.add_function(wrap_pyfunction!(relations, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    m.add("DomainError", m.py().get_type::<DomainError>())?;
    Ok(())
}

//! Python bindings. Points are lists of element indices, e.g. `[3, 0]`.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};

use fqgeom::constructions::{furstenberg_image, SharpnessRecipe};
use fqgeom::incidence::{self, Theorem};
use fqgeom::lineworld;
use fqgeom::motions::{self, parse_motion};
use fqgeom::simplex;
use fqgeom::{AuditReport, Elem, Field, Guardrails, LabeledSimplex, MotionClass, PairSet, Point, RigidMotion, SimplexKey};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: fqgeom::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn guard() -> Guardrails {
    Guardrails::default()
}

fn coords(p: &Point) -> Vec<u32> {
    p.coords().iter().map(|e| e.index()).collect()
}

#[pyclass(name = "Field", frozen)]
pub struct PyField(Field);

impl PyField {
    fn pt(&self, idx: &[u32]) -> PyResult<Point> {
        self.0.point(idx).map_err(err)
    }

    fn pts(&self, idx: &[Vec<u32>]) -> PyResult<Vec<Point>> {
        idx.iter().map(|p| self.pt(p)).collect()
    }

    fn el(&self, i: u32) -> PyResult<Elem> {
        self.0.elem(i).map_err(err)
    }
}

#[pymethods]
impl PyField {
    #[new]
    fn new(q: u32) -> PyResult<Self> {
        Field::from_order(q, &guard()).map(PyField).map_err(err)
    }

    #[getter]
    fn p(&self) -> u32 {
        self.0.p()
    }

    #[getter]
    fn r(&self) -> u32 {
        self.0.r()
    }

    #[getter]
    fn q(&self) -> u32 {
        self.0.q()
    }

    fn elements(&self) -> Vec<u32> {
        self.0.elements().map(|e| e.index()).collect()
    }

    fn add(&self, a: u32, b: u32) -> PyResult<u32> {
        Ok(self.0.add(self.el(a)?, self.el(b)?).index())
    }

    fn mul(&self, a: u32, b: u32) -> PyResult<u32> {
        Ok(self.0.mul(self.el(a)?, self.el(b)?).index())
    }

    fn inv(&self, a: u32) -> PyResult<Option<u32>> {
        Ok(self.0.inv(self.el(a)?).map(|e| e.index()))
    }

    /// 1 for nonzero squares, -1 for non-squares, 0 at zero.
    fn quad_char(&self, a: u32) -> PyResult<i8> {
        Ok(self.0.quad_char(self.el(a)?))
    }

    fn norm(&self, x: Vec<u32>) -> PyResult<u32> {
        Ok(self.0.norm(&self.pt(&x)?).index())
    }

    fn points(&self, d: usize) -> Vec<Vec<u32>> {
        self.0.points(d).map(|p| coords(&p)).collect()
    }

    fn __repr__(&self) -> String {
        format!("Field(q={})", self.0.q())
    }
}

#[pyclass(name = "Motion", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyMotion(RigidMotion);

#[pymethods]
impl PyMotion {
    /// Parses `g=[[a,b],[c,d]];z=[e,f]`.
    #[staticmethod]
    fn parse(field: PyRef<'_, PyField>, text: &str) -> PyResult<Self> {
        parse_motion(&field.0, text).map(PyMotion).map_err(err)
    }

    fn apply(&self, field: PyRef<'_, PyField>, x: Vec<u32>) -> PyResult<Vec<u32>> {
        Ok(coords(&self.0.apply(&field.0, &field.pt(&x)?)))
    }

    fn classify(&self) -> String {
        format!("{:?}", self.0.classify())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Motion({})", self.0)
    }
}

fn unwrap_motions(m: &[PyRef<'_, PyMotion>]) -> Vec<RigidMotion> {
    m.iter().map(|x| x.0).collect()
}

#[pyclass(name = "AuditReport", frozen)]
pub struct PyReport(AuditReport);

#[pymethods]
impl PyReport {
    #[getter]
    fn theorem(&self) -> String {
        self.0.theorem.clone()
    }

    #[getter]
    fn lhs(&self) -> u128 {
        self.0.lhs
    }

    #[getter]
    fn main_term(&self) -> f64 {
        self.0.main_term
    }

    #[getter]
    fn error_term_unit(&self) -> f64 {
        self.0.error_term_unit
    }

    #[getter]
    fn c_star(&self) -> f64 {
        self.0.c_star
    }

    #[getter]
    fn verdict(&self) -> String {
        self.to_json_value("verdict")
    }

    #[getter]
    fn side_conditions(&self) -> Vec<(String, bool)> {
        self.0
            .side_conditions
            .iter()
            .map(|c| (c.name.clone(), c.holds))
            .collect()
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "AuditReport({} c_star={:.4} {})",
            self.0.theorem,
            self.0.c_star,
            self.verdict()
        )
    }
}

impl PyReport {
    fn to_json_value(&self, key: &str) -> String {
        let v: serde_json::Value = serde_json::from_str(&self.0.to_json()).expect("valid json");
        v[key].as_str().unwrap_or_default().to_string()
    }
}

#[pyclass(name = "SimplexKey", frozen)]
pub struct PyKey(SimplexKey);

#[pymethods]
impl PyKey {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        text.parse().map(PyKey).map_err(err)
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    #[getter]
    fn norms(&self) -> Vec<u32> {
        self.0.norms().iter().map(|e| e.index()).collect()
    }

    fn is_nondegenerate(&self, d: usize) -> bool {
        self.0.is_nondegenerate(d)
    }

    fn __eq__(&self, other: PyRef<'_, PyKey>) -> bool {
        self.0 == other.0
    }

    fn __hash__(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.0.hash(&mut h);
        h.finish()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("SimplexKey({})", self.0)
    }
}

/// Motions of a class: general, so2, translation, sf or sf-prime.
#[pyfunction]
#[pyo3(signature = (field, d = 2, class_name = "general"))]
fn motion_universe(field: PyRef<'_, PyField>, d: usize, class_name: &str) -> PyResult<Vec<PyMotion>> {
    let class: MotionClass = class_name.parse().map_err(err)?;
    let all = motions::motion_universe(&field.0, d, class, &guard()).map_err(err)?;
    Ok(all.into_iter().map(PyMotion).collect())
}

#[pyfunction]
fn orthogonal_order(field: PyRef<'_, PyField>, d: usize) -> PyResult<u64> {
    motions::orthogonal_order(&field.0, d).map_err(err)
}

fn pairs(field: &PyField, u: &[Vec<u32>], v: &[Vec<u32>]) -> PyResult<PairSet> {
    let u = field.pts(u)?;
    let v = field.pts(v)?;
    let d = u.first().or(v.first()).map(Point::dim).unwrap_or(2);
    PairSet::new(d, &u, &v).map_err(err)
}

/// `I(U x V, R)`.
#[pyfunction]
fn incidence_count(
    field: PyRef<'_, PyField>,
    u: Vec<Vec<u32>>,
    v: Vec<Vec<u32>>,
    motions: Vec<PyRef<'_, PyMotion>>,
) -> PyResult<u64> {
    let p = pairs(&field, &u, &v)?;
    incidence::incidence_count(&field.0, &p, &unwrap_motions(&motions)).map_err(err)
}

/// `{i(r): number of motions}` over the given motions.
#[pyfunction]
fn motion_spectrum(
    field: PyRef<'_, PyField>,
    u: Vec<Vec<u32>>,
    v: Vec<Vec<u32>>,
    motions: Vec<PyRef<'_, PyMotion>>,
) -> PyResult<BTreeMap<u64, u64>> {
    let p = pairs(&field, &u, &v)?;
    Ok(incidence::spectrum_of(&field.0, &p, &unwrap_motions(&motions))
        .map_err(err)?
        .histogram)
}

/// Audit of an incidence bound, e.g. `"T2.4"`.
#[pyfunction]
fn audit_bound(
    field: PyRef<'_, PyField>,
    theorem: &str,
    u: Vec<Vec<u32>>,
    v: Vec<Vec<u32>>,
    motions: Vec<PyRef<'_, PyMotion>>,
) -> PyResult<PyReport> {
    let t: Theorem = theorem.parse().map_err(err)?;
    let p = pairs(&field, &u, &v)?;
    incidence::audit_bound(&field.0, &p, &unwrap_motions(&motions), t)
        .map(PyReport)
        .map_err(err)
}

#[pyfunction]
fn classify(field: PyRef<'_, PyField>, vertices: Vec<Vec<u32>>) -> PyResult<PyKey> {
    let s = LabeledSimplex::new(&field.pts(&vertices)?).map_err(err)?;
    Ok(PyKey(simplex::classify(&field.0, &s)))
}

/// Class multiplicities over `A^(k+1)`, keyed by the key text.
#[pyfunction]
#[pyo3(signature = (field, a, k = 2))]
fn class_census(field: PyRef<'_, PyField>, a: Vec<Vec<u32>>, k: usize) -> PyResult<BTreeMap<String, u64>> {
    let a = field.pts(&a)?;
    let d = a.first().map(Point::dim).unwrap_or(2);
    let c = simplex::count_classes(&field.0, d, &vec![a; k + 1], &guard()).map_err(err)?;
    Ok(c.classes.iter().map(|(k, n)| (k.to_string(), *n)).collect())
}

#[pyfunction]
fn distance_count(field: PyRef<'_, PyField>, a: Vec<Vec<u32>>, b: Vec<Vec<u32>>, lam: u32) -> PyResult<u64> {
    Ok(simplex::distance_count(&field.0, &field.pts(&a)?, &field.pts(&b)?, field.el(lam)?))
}

/// `(witnesses, mu)` for the apexes over the segment `(x, y)`.
#[pyfunction]
fn extend_segment(
    field: PyRef<'_, PyField>,
    x: Vec<u32>,
    y: Vec<u32>,
    l2: u32,
    l3: u32,
) -> PyResult<(Vec<Vec<u32>>, u8)> {
    let e = simplex::extend_segment(&field.0, &field.pt(&x)?, &field.pt(&y)?, field.el(l2)?, field.el(l3)?)
        .map_err(err)?;
    Ok((e.witnesses.iter().map(coords).collect(), e.mu))
}

/// The line of `F_q^3` for the pair `(p, p2)`, as text.
#[pyfunction]
fn line_from_pair(field: PyRef<'_, PyField>, p: Vec<u32>, p2: Vec<u32>) -> PyResult<String> {
    lineworld::line_from_pair(&field.0, &field.pt(&p)?, &field.pt(&p2)?)
        .map(|l| l.to_string())
        .map_err(err)
}

/// `(motion side, line side)` counts for oriented motions.
#[pyfunction]
fn incidence_equivalence(
    field: PyRef<'_, PyField>,
    u: Vec<Vec<u32>>,
    v: Vec<Vec<u32>>,
    motions: Vec<PyRef<'_, PyMotion>>,
) -> PyResult<(u64, u64)> {
    let p = pairs(&field, &u, &v)?;
    lineworld::incidence_equivalence(&field.0, &p, &unwrap_motions(&motions)).map_err(err)
}

/// `(max lines in one plane, that plane, distinct lines)`.
#[pyfunction]
fn plane_audit(field: PyRef<'_, PyField>, u: Vec<Vec<u32>>) -> PyResult<(u64, Option<String>, u64)> {
    let a = lineworld::plane_audit(&field.0, &field.pts(&u)?, &guard()).map_err(err)?;
    Ok((a.max_lines, a.plane.map(|p| p.to_string()), a.line_count))
}

/// `(image, audits)` of the union of motion images of `a`.
#[pyfunction]
fn furstenberg(
    field: PyRef<'_, PyField>,
    a: Vec<Vec<u32>>,
    motions: Vec<PyRef<'_, PyMotion>>,
) -> PyResult<(Vec<Vec<u32>>, Vec<PyReport>)> {
    let a = field.pts(&a)?;
    let d = a.first().map(Point::dim).unwrap_or(2);
    let inst = furstenberg_image(&field.0, d, &a, &unwrap_motions(&motions)).map_err(err)?;
    Ok((
        inst.image.iter().map(coords).collect(),
        inst.audits.into_iter().map(PyReport).collect(),
    ))
}

/// Runs a recipe given as JSON (`{"kind": ..., "p": ..., ...}`) and returns
/// the report as JSON.
#[pyfunction]
fn sharpness(recipe: &str) -> PyResult<String> {
    let r: SharpnessRecipe =
        serde_json::from_str(recipe).map_err(|e| PyValueError::new_err(format!("recipe: {e}")))?;
    r.run(&guard()).map(|v| v.to_string()).map_err(err)
}

/// The frozen ceiling file.
#[pyfunction]
fn committed_ceilings() -> &'static str {
    fqgeom::calibrate::COMMITTED_CEILINGS
}

#[pymodule]
fn fqgeom_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PyMotion>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyKey>()?;
    m.add_function(wrap_pyfunction!(motion_universe, m)?)?;
    m.add_function(wrap_pyfunction!(orthogonal_order, m)?)?;
    m.add_function(wrap_pyfunction!(incidence_count, m)?)?;
    m.add_function(wrap_pyfunction!(motion_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(audit_bound, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(class_census, m)?)?;
    m.add_function(wrap_pyfunction!(distance_count, m)?)?;
    m.add_function(wrap_pyfunction!(extend_segment, m)?)?;
    m.add_function(wrap_pyfunction!(line_from_pair, m)?)?;
    m.add_function(wrap_pyfunction!(incidence_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(plane_audit, m)?)?;
    m.add_function(wrap_pyfunction!(furstenberg, m)?)?;
    m.add_function(wrap_pyfunction!(sharpness, m)?)?;
    m.add_function(wrap_pyfunction!(committed_ceilings, m)?)?;
    Ok(())
}

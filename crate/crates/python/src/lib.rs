//! Python access to Coxeter groups, deformed Fock spaces, pairing moments and
//! the scenario runner.

use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use coxfock::coxeter::{CoxeterSystem, ElementId};
use coxfock::fock::{self, DeformationTensor, FockScene, QSpec};
use coxfock::linalg::{CMat, CVec, PowerIteration};
use coxfock::opspace;
use coxfock::qmap::{self, OperatorFamily, QuasiMultiplicativeMap};
use coxfock::shell::{self, Format, GroupSpec, ScenarioSpec};
use coxfock::wick::MomentQuery;
use coxfock::{Certificate, Error, Tolerances};

/// Size limits become RuntimeError, file problems OSError, everything else
/// is a bad argument.
fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        Error::BudgetExceeded { .. } | Error::SizeBudget { .. } => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn matrix_from_rows(rows: Vec<Vec<Complex64>>) -> PyResult<CMat> {
    let n = rows.len();
    let cols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("ragged matrix rows"));
    }
    Ok(CMat::from_fn(n, cols, |r, c| rows[r][c]))
}

fn rows_of(m: &CMat) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect()).collect()
}

/// (label, value, passed) triples; enough for assertions on the Python side.
fn cert_tuple(c: &Certificate) -> (String, f64, bool) {
    (c.label.clone(), c.value, c.passed)
}

fn group_matrix(group: &Bound<'_, PyAny>) -> PyResult<coxfock::coxeter::CoxeterMatrix> {
    let spec = if let Ok(name) = group.extract::<String>() {
        GroupSpec::Named(name)
    } else {
        GroupSpec::Matrix(group.extract::<Vec<Vec<u32>>>()?)
    };
    spec.matrix().map_err(to_py)
}

/// A finite Coxeter group, given by name ("A3", "B4", "D4", "I2(5)") or by
/// its Coxeter matrix.
#[pyclass(module = "coxfock_py")]
struct CoxeterGroup {
    sys: CoxeterSystem,
}

impl CoxeterGroup {
    fn id(&self, word: &[usize]) -> PyResult<ElementId> {
        self.sys.element_of_word(word).map_err(to_py)
    }
}

#[pymethods]
impl CoxeterGroup {
    #[new]
    fn new(group: &Bound<'_, PyAny>) -> PyResult<Self> {
        let matrix = group_matrix(group)?;
        Ok(CoxeterGroup {
            sys: CoxeterSystem::build(&matrix).map_err(to_py)?,
        })
    }

    #[getter]
    fn order(&self) -> usize {
        self.sys.order()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.sys.rank()
    }

    /// Number of elements of each length.
    fn length_counts(&self) -> Vec<u64> {
        self.sys.length_counts()
    }

    /// Canonical reduced word of the longest element, 0-based letters.
    fn longest_word(&self) -> Vec<usize> {
        self.sys.elements()[self.sys.sigma0().0].word.0.clone()
    }

    /// Length of the element named by a word of 0-based generators.
    fn length(&self, word: Vec<usize>) -> PyResult<usize> {
        let a = self.id(&word)?;
        self.sys.length(a).map_err(to_py)
    }

    fn euler_solomon(&self, word: Vec<usize>) -> PyResult<i64> {
        let a = self.id(&word)?;
        self.sys.euler_solomon(a).map_err(to_py)
    }

    /// Smallest eigenvalue of P(W) for the scalar family q.
    fn scalar_positivity(&self, q: f64) -> PyResult<f64> {
        let family = OperatorFamily::scalar(self.sys.matrix().clone(), q);
        let map = QuasiMultiplicativeMap::new(&self.sys, &family).map_err(to_py)?;
        Ok(coxfock::linalg::min_eigenvalue(&map.p_w()))
    }

    /// Smallest eigenvalue of the scalar block-length kernel.
    fn blocklength_min_eig(&self, q: f64) -> PyResult<f64> {
        qmap::scalar_blocklength_min_eig(&self.sys, q).map_err(to_py)
    }

    /// Negative scalar below which the block-length kernel stops being PSD.
    #[pyo3(signature = (iterations = 50))]
    fn blocklength_threshold(&self, iterations: usize) -> PyResult<f64> {
        qmap::locate_blocklength_threshold(&self.sys, iterations).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("CoxeterGroup(rank={}, order={})", self.sys.rank(), self.sys.order())
    }
}

/// Truncated Fock space deformed by a Hermitian matrix q with |q_ij| <= 1.
#[pyclass(module = "coxfock_py")]
struct FockSpace {
    spec: QSpec,
    scene: FockScene,
}

#[pymethods]
impl FockSpace {
    #[new]
    #[pyo3(signature = (q, levels = 4))]
    fn new(q: Vec<Vec<Complex64>>, levels: usize) -> PyResult<Self> {
        let spec = QSpec::new(matrix_from_rows(q)?).map_err(to_py)?;
        let scene = FockScene::build(DeformationTensor::from_q(&spec), levels, &Tolerances::default()).map_err(to_py)?;
        Ok(FockSpace { spec, scene })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.scene.dim()
    }

    #[getter]
    fn levels(&self) -> usize {
        self.scene.cap()
    }

    fn quotient_dims(&self) -> Vec<usize> {
        self.scene.quotient_dims()
    }

    /// Gram matrix of the deformed inner product on the n-th tensor power.
    fn gram(&self, n: usize) -> PyResult<Vec<Vec<Complex64>>> {
        if n > self.scene.cap() {
            return Err(PyValueError::new_err(format!("level {n} above the cap {}", self.scene.cap())));
        }
        Ok(rows_of(self.scene.gram(n)))
    }

    /// Norm of the i-th annihilator in the deformed geometry.
    fn annihilator_norm(&self, i: usize) -> PyResult<f64> {
        if i >= self.scene.dim() {
            return Err(PyValueError::new_err(format!("index {i} out of range")));
        }
        Ok(self.scene.t_norm(&self.scene.annihilation_basis(i)))
    }

    /// Vacuum moment of G_{w_1} ... G_{w_m} by matrix products, 0-based letters.
    fn moment(&self, word: Vec<usize>) -> PyResult<Complex64> {
        coxfock::wick::moment_matrix(&word, &self.scene).map_err(to_py)
    }

    /// Identity checks as (label, value, passed); `f` defaults to e_1.
    #[pyo3(signature = (f = None))]
    fn checks(&self, f: Option<Vec<Complex64>>) -> PyResult<Vec<(String, f64, bool)>> {
        let f = match f {
            Some(v) if v.len() == self.scene.dim() => CVec::from_vec(v),
            Some(_) => return Err(PyValueError::new_err("vector length must equal dim")),
            None => self.scene.basis_vector(0),
        };
        let mut out = vec![
            fock::gram_recursion_residual(&self.scene).map_err(to_py)?,
            fock::adjointness_residual(&self.scene, &f).map_err(to_py)?,
            fock::vacuum_annihilation(&self.scene, &f).map_err(to_py)?,
        ];
        if self.scene.cap() >= 1 {
            out.push(fock::relation_residual_all(&self.scene).map_err(to_py)?);
            out.push(fock::sum_rule_residual(&self.scene));
        }
        out.extend(fock::norm_suite(&self.scene, &self.spec).map_err(to_py)?);
        Ok(out.iter().map(cert_tuple).collect())
    }

    /// Sandwich trials as (lower, middle, upper, passed).
    #[pyo3(signature = (seed = 0, trials = 10, terms = None, aux_dim = 2))]
    fn sandwich(
        &self,
        seed: u64,
        trials: usize,
        terms: Option<usize>,
        aux_dim: usize,
    ) -> PyResult<Vec<(f64, f64, f64, bool)>> {
        let terms = terms.unwrap_or(self.scene.dim());
        let reports = opspace::sandwich_check(seed, trials, terms, aux_dim, &self.scene).map_err(to_py)?;
        Ok(reports.iter().map(|r| (r.lower, r.middle, r.upper, r.passed)).collect())
    }

    /// Norm of sum_{i<m} G_i (x) conj(G_i) and its bound 4 sqrt(m)/(1-q).
    fn tensor_square_norm(&self, m: usize) -> PyResult<(f64, f64)> {
        let r = opspace::injectivity_witness(m, &self.scene, &PowerIteration::default()).map_err(to_py)?;
        Ok((r.norm, r.bound))
    }

    fn __repr__(&self) -> String {
        format!("FockSpace(dim={}, levels={})", self.scene.dim(), self.scene.cap())
    }
}

/// Vacuum moment of a word by the pairing formula, 0-based letters.
#[pyfunction]
fn wick_moment(word: Vec<usize>, q: Vec<Vec<Complex64>>) -> PyResult<Complex64> {
    let spec = QSpec::new(matrix_from_rows(q)?).map_err(to_py)?;
    MomentQuery::new(word, spec).and_then(|m| m.moment()).map_err(to_py)
}

/// Runs a TOML scenario; returns (passed, rendered report).
#[pyfunction]
#[pyo3(signature = (text, structured = false))]
fn run_scenario(text: &str, structured: bool) -> PyResult<(bool, String)> {
    let spec = ScenarioSpec::from_toml(text).map_err(to_py)?;
    let report = shell::run(&spec);
    let format = if structured { Format::Structured } else { Format::Text };
    Ok((report.passed(), report.render(format).map_err(to_py)?))
}

/// A reproducible random scenario of the given kind, as TOML.
#[pyfunction]
fn generate_scenario(kind: &str, seed: u64) -> PyResult<String> {
    let kind = kind.parse().map_err(to_py)?;
    let spec = shell::gen_random(kind, seed, &shell::GenParams::default()).map_err(to_py)?;
    spec.to_toml().map_err(to_py)
}

#[pymodule]
fn coxfock_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<CoxeterGroup>()?;
    m.add_class::<FockSpace>()?;
    m.add_function(wrap_pyfunction!(wick_moment, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(generate_scenario, m)?)?;
    m.add("__version__", shell::VERSION)?;
    Ok(())
}

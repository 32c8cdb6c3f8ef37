//! Python bindings: formulas, the sampler, the XOR-aware solver, geometry
//! reports, curve fitting, and the closed-form separation quantities.
//!
//! Build the module and import it from the `python/` directory:
//!
//! ```text
//! cargo build -p cnfxor-py --release
//! python3 python/smoke_test.py
//! ```

use std::time::Duration;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cnfxor::dimacs;
use cnfxor::experiments::fit;
use cnfxor::geometry;
use cnfxor::theory;
use cnfxor::{
    sample_formula, solve, Assignment, CnfXorFormula, ModelParams, SolverConfig, XorSystem,
};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn assignment_from_bits(bits: &[bool], n: u32) -> PyResult<Assignment> {
    if bits.len() as u32 != n {
        return Err(value_err(format!(
            "assignment has {} bits, formula has {} variables",
            bits.len(),
            n
        )));
    }
    Ok(Assignment::from_bools(bits))
}

/// A CNF-XOR formula over variables 1..=n.
#[pyclass(frozen)]
struct Formula {
    inner: CnfXorFormula,
}

#[pymethods]
impl Formula {
    /// Parse DIMACS-X text.
    #[staticmethod]
    fn from_dimacs(text: &str) -> PyResult<Formula> {
        Ok(Formula {
            inner: dimacs::parse_dimacs_x(text).map_err(value_err)?,
        })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    #[getter]
    fn cnf_count(&self) -> usize {
        self.inner.cnf().len()
    }

    #[getter]
    fn xor_count(&self) -> usize {
        self.inner.xors().len()
    }

    fn to_dimacs(&self) -> String {
        dimacs::emit_dimacs_x(&self.inner)
    }

    /// Evaluate the formula on a list of booleans (index i = variable i+1).
    fn evaluate(&self, bits: Vec<bool>) -> PyResult<bool> {
        let a = assignment_from_bits(&bits, self.inner.n())?;
        self.inner.evaluate(&a).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Formula(n={}, cnf={}, xors={})",
            self.inner.n(),
            self.inner.cnf().len(),
            self.inner.xors().len()
        )
    }
}

/// Sample a random k-CNF-XOR formula with ceil(r*n) CNF clauses and
/// ceil(s*n) XOR clauses.
#[pyfunction]
#[pyo3(signature = (k, n, r, s, p, seed=0))]
fn sample(k: u32, n: u32, r: f64, s: f64, p: f64, seed: u64) -> PyResult<Formula> {
    let params = ModelParams { k, n, r, s, p, seed };
    Ok(Formula {
        inner: sample_formula(&params).map_err(value_err)?,
    })
}

/// Solver outcome: status "SAT" | "UNSAT" | "TIMEOUT", the witness for SAT,
/// and search statistics.
#[pyclass(frozen, get_all)]
struct SolveOutcome {
    status: String,
    witness: Option<Vec<bool>>,
    decisions: u64,
    propagations: u64,
    wall_time_s: f64,
}

#[pymethods]
impl SolveOutcome {
    fn __repr__(&self) -> String {
        format!(
            "SolveOutcome(status={}, decisions={}, propagations={})",
            self.status, self.decisions, self.propagations
        )
    }
}

/// Decide satisfiability with the built-in DPLL + Gaussian elimination
/// solver.
#[pyfunction]
#[pyo3(signature = (formula, timeout_s=10.0, seed=0))]
fn solve_formula(formula: &Formula, timeout_s: f64, seed: u64) -> SolveOutcome {
    let result = solve(
        &formula.inner,
        &SolverConfig {
            timeout: Some(Duration::from_secs_f64(timeout_s)),
            seed,
        },
    );
    SolveOutcome {
        status: match result.status {
            cnfxor::SolveStatus::Sat => "SAT",
            cnfxor::SolveStatus::Unsat => "UNSAT",
            cnfxor::SolveStatus::Timeout => "TIMEOUT",
        }
        .to_string(),
        witness: result.witness.map(|w| w.to_bools()),
        decisions: result.stats.decisions,
        propagations: result.stats.propagations,
        wall_time_s: result.stats.wall_time_s,
    }
}

/// Hamming distance between two equal-length bit lists.
#[pyfunction]
fn hamming(a: Vec<bool>, b: Vec<bool>) -> PyResult<u32> {
    Assignment::from_bools(&a)
        .hamming(&Assignment::from_bools(&b))
        .map_err(value_err)
}

/// All satisfying assignments (lists of booleans), exhaustively enumerated.
#[pyfunction]
#[pyo3(signature = (formula, cap=4096))]
fn enumerate_solutions(formula: &Formula, cap: usize) -> PyResult<Vec<Vec<bool>>> {
    let sols = geometry::enumerate_solutions(&formula.inner, cap).map_err(value_err)?;
    if sols.is_truncated() {
        return Err(value_err(geometry::GeometryError::Truncated));
    }
    Ok(sols.solutions().iter().map(|a| a.to_bools()).collect())
}

/// Solution-space structure: count, separation, d-cluster counts, and the
/// XOR null-space cross-check for XOR-only formulas.
#[pyfunction]
#[pyo3(signature = (formula, cap=4096))]
fn separation_report<'py>(
    py: Python<'py>,
    formula: &Formula,
    cap: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let report = geometry::SeparationReport::for_formula(&formula.inner, cap).map_err(value_err)?;
    let dict = PyDict::new(py);
    dict.set_item("solution_count", report.solution_count)?;
    dict.set_item(
        "min_pairwise_distance",
        report.min_pairwise_distance.as_finite(),
    )?;
    dict.set_item(
        "clusters_at_d",
        report.clusters_at_d.into_iter().collect::<Vec<_>>(),
    )?;
    dict.set_item("kernel_rank", report.kernel_rank)?;
    dict.set_item(
        "kernel_min_weight",
        report.kernel_min_weight.map(|w| w.as_finite()),
    )?;
    Ok(dict)
}

/// GF(2) rank, consistency, and log2 solution count of a formula's XOR
/// subsystem.
#[pyfunction]
fn xor_system_summary<'py>(py: Python<'py>, formula: &Formula) -> PyResult<Bound<'py, PyDict>> {
    let sys = XorSystem::eliminate(formula.inner.xors(), formula.inner.n());
    let dict = PyDict::new(py);
    dict.set_item("rank", sys.rank())?;
    dict.set_item("consistent", sys.is_consistent())?;
    dict.set_item(
        "log2_solutions",
        sys.is_consistent().then(|| sys.null_space_dim()),
    )?;
    Ok(dict)
}

#[pyfunction]
fn parity_even_probability(p: f64, n: u32) -> PyResult<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(value_err("p must be a probability"));
    }
    Ok(theory::parity_even_probability(p, n))
}

#[pyfunction]
fn union_bound_sum(n: u32, s: f64, p: f64, w_max: u32) -> PyResult<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(value_err("p must be a probability"));
    }
    if w_max > n {
        return Err(value_err("w_max cannot exceed n"));
    }
    Ok(theory::union_bound_sum(n, s, p, w_max))
}

#[pyfunction]
fn entropy(x: f64) -> PyResult<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(value_err("x must lie in [0, 1]"));
    }
    Ok(theory::entropy(x))
}

#[pyfunction]
fn a_of_delta(delta: f64) -> PyResult<f64> {
    theory::a_of_delta(delta).map_err(value_err)
}

#[pyfunction]
fn lambda_star(s: f64, delta: f64) -> PyResult<f64> {
    theory::lambda_star(s, delta).map_err(value_err)
}

#[pyfunction]
fn separation_threshold(s: f64, rho: f64, n: u32) -> PyResult<f64> {
    Ok(theory::separation_threshold(s, rho, n)
        .map_err(value_err)?
        .value)
}

/// Returns (delta, fraction): the chosen slack and the certified linear
/// separation fraction lambda*/2.
#[pyfunction]
fn guaranteed_separation_fraction(s: f64, rho: f64) -> PyResult<(f64, f64)> {
    let cert = theory::guaranteed_separation_fraction(s, rho).map_err(value_err)?;
    Ok((cert.delta, cert.fraction))
}

/// Fit linear/quadratic/cubic/exponential models to (x, y) points; returns
/// a dict with per-model coefficients and MSE plus the selected model.
#[pyfunction]
fn fit_curves<'py>(py: Python<'py>, points: Vec<(f64, f64)>) -> PyResult<Bound<'py, PyDict>> {
    let report = fit::fit_curves(&points).map_err(value_err)?;
    let dict = PyDict::new(py);
    for (name, poly) in [
        ("linear", &report.linear),
        ("quadratic", &report.quadratic),
        ("cubic", &report.cubic),
    ] {
        let entry = PyDict::new(py);
        entry.set_item("coefficients", poly.coefficients.clone())?;
        entry.set_item("mse", poly.mse)?;
        dict.set_item(name, entry)?;
    }
    if let Some(e) = &report.exponential {
        let entry = PyDict::new(py);
        entry.set_item("alpha", e.alpha)?;
        entry.set_item("beta", e.beta)?;
        entry.set_item("mse", e.mse)?;
        dict.set_item("exponential", entry)?;
    } else {
        dict.set_item("exponential", py.None())?;
    }
    dict.set_item(
        "selected",
        match report.selected {
            fit::ModelKind::Linear => "linear",
            fit::ModelKind::Quadratic => "quadratic",
            fit::ModelKind::Cubic => "cubic",
            fit::ModelKind::Exponential => "exponential",
        },
    )?;
    dict.set_item("scaling_factor", report.scaling_factor)?;
    Ok(dict)
}

#[pymodule]
fn cnfxor_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Formula>()?;
    m.add_class::<SolveOutcome>()?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(solve_formula, m)?)?;
    m.add_function(wrap_pyfunction!(hamming, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_solutions, m)?)?;
    m.add_function(wrap_pyfunction!(separation_report, m)?)?;
    m.add_function(wrap_pyfunction!(xor_system_summary, m)?)?;
    m.add_function(wrap_pyfunction!(parity_even_probability, m)?)?;
    m.add_function(wrap_pyfunction!(union_bound_sum, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(a_of_delta, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_star, m)?)?;
    m.add_function(wrap_pyfunction!(separation_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(guaranteed_separation_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(fit_curves, m)?)?;
    Ok(())
}

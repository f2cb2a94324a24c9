//! Python bindings. Rationals cross the boundary as `"p/q"` strings so that
//! values stay exact; real-valued quantities are floats.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pfacap::capacity::{self, BracketOptions, DiscreteChannel, UpperCertificate};
use pfacap::gadgets::{self, SigmaCode};
use pfacap::pfa::{self, fixtures, SearchBudget};
use pfacap::rational::{format_rational, parse_rational, to_f64};
use pfacap::witness::{self, WitnessMode};
use pfacap::{Rational, Word};

fn err(e: pfacap::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(text: &str) -> PyResult<Rational> {
    parse_rational(text).map_err(err)
}

/// A probabilistic finite automaton with exact rational transitions.
#[pyclass(name = "Pfa", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPfa {
    inner: pfacap::Pfa,
}

#[pymethods]
impl PyPfa {
    /// Parse the TOML automaton format.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(PyPfa {
            inner: pfa::parse_pfa(text).map_err(err)?,
        })
    }

    /// One of the built-in automata, e.g. `"example1"`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        fixtures::by_name(name)
            .map(|inner| PyPfa { inner })
            .ok_or_else(|| {
                PyValueError::new_err(format!(
                    "unknown built-in `{name}`; known: {}",
                    fixtures::BUILTIN_NAMES.join(", ")
                ))
            })
    }

    fn to_toml(&self) -> String {
        pfa::write_pfa(&self.inner)
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.inner.states().to_vec()
    }

    #[getter]
    fn alphabet(&self) -> Vec<String> {
        self.inner.alphabet().to_vec()
    }

    /// Exact acceptance probability of a word, as `"p/q"`.
    fn value(&self, word: &str) -> PyResult<String> {
        let w = Word::parse(word, self.inner.alphabet()).map_err(err)?;
        Ok(format_rational(&self.inner.value(&w).map_err(err)?))
    }

    /// The automaton with freeze (`id`) and reset (`rt`) symbols added.
    fn gamma(&self) -> PyResult<Self> {
        Ok(PyPfa {
            inner: self.inner.gamma().map_err(err)?,
        })
    }

    /// Best word of length at most `max_len`: `(word, value)`.
    #[pyo3(signature = (max_len, max_words = 4_000_000))]
    fn brute_force(&self, max_len: usize, max_words: u128) -> PyResult<(String, String)> {
        let r = pfa::brute_force_value(&self.inner, max_len, SearchBudget::words(max_words))
            .map_err(err)?;
        Ok((r.best_word.to_string(), format_rational(&r.best_value)))
    }

    fn __repr__(&self) -> String {
        format!(
            "Pfa(states={}, alphabet={:?})",
            self.inner.num_states(),
            self.inner.alphabet()
        )
    }
}

#[pyfunction]
fn build_d_xy(x: &str, y: &str) -> PyResult<PyPfa> {
    Ok(PyPfa {
        inner: gadgets::build_d_xy(&rational(x)?, &rational(y)?).map_err(err)?,
    })
}

#[pyfunction]
fn build_d_ay(a: &PyPfa, y: &str) -> PyResult<PyPfa> {
    Ok(PyPfa {
        inner: gadgets::build_d_ay(&a.inner, &rational(y)?).map_err(err)?,
    })
}

#[pyfunction]
fn build_family_member(a: &PyPfa, lambda: &str) -> PyResult<PyPfa> {
    Ok(PyPfa {
        inner: gadgets::build_family_member(&a.inner, &rational(lambda)?).map_err(err)?,
    })
}

/// Prime-power code of positive rationals, as a decimal string.
#[pyfunction]
fn sigma_encode(values: Vec<String>) -> PyResult<String> {
    let rs = values.iter().map(|v| rational(v)).collect::<PyResult<Vec<_>>>()?;
    Ok(gadgets::sigma_encode(&rs).map_err(err)?.to_string())
}

#[pyfunction]
fn sigma_decode(code: &str, arity: usize) -> PyResult<Vec<String>> {
    let value = code
        .parse()
        .map_err(|_| PyValueError::new_err(format!("`{code}` is not a natural number")))?;
    let rs = gadgets::sigma_decode(&SigmaCode { value, arity }).map_err(err)?;
    Ok(rs.iter().map(format_rational).collect())
}

/// Witness word for `D_{x,1/2}`; returns a dict with the word and its value.
#[pyfunction]
fn synthesize_word<'py>(py: Python<'py>, x: &str, eps: &str, k: usize) -> PyResult<Bound<'py, PyDict>> {
    let mode = WitnessMode::Plain { x: rational(x)? };
    let r = witness::synthesize_word(&rational(eps)?, k, &mode).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("word", r.completed.to_string())?;
    d.set_item("lengths", r.lengths.clone())?;
    d.set_item("value", format_rational(&r.value))?;
    d.set_item("value_float", to_f64(&r.value))?;
    d.set_item("requirement1", r.requirement1_met)?;
    d.set_item("requirement2", r.requirement2_met)?;
    Ok(d)
}

/// Blahut-Arimoto on a row-stochastic matrix `rows[input][output]`.
#[pyfunction]
#[pyo3(signature = (rows, tol = 1e-9, max_iters = 100_000))]
fn blahut_arimoto<'py>(
    py: Python<'py>,
    rows: Vec<Vec<f64>>,
    tol: f64,
    max_iters: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let ch = DiscreteChannel::new(rows).map_err(err)?;
    let r = capacity::blahut_arimoto(&ch, tol, max_iters).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("capacity", r.capacity)?;
    d.set_item("lower", r.lower)?;
    d.set_item("upper", r.upper)?;
    d.set_item("input", r.input.clone())?;
    d.set_item("iterations", r.iterations)?;
    d.set_item("converged", r.converged)?;
    Ok(d)
}

/// Lower and upper capacity bounds of the channel built from `a`.
#[pyfunction]
#[pyo3(signature = (a, delta = 0.1, budget = 12, horizon = 6, certificate = None))]
fn capacity_bracket<'py>(
    py: Python<'py>,
    a: &PyPfa,
    delta: f64,
    budget: usize,
    horizon: usize,
    certificate: Option<(String, String)>,
) -> PyResult<Bound<'py, PyDict>> {
    let certificate = match certificate {
        Some((x, y)) => Some(UpperCertificate::Dxy {
            x: rational(&x)?,
            y: rational(&y)?,
        }),
        None => None,
    };
    let opts = BracketOptions {
        delta,
        budget,
        horizon,
        certificate,
        ..Default::default()
    };
    let b = capacity::capacity_bracket(&a.inner, &opts).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("lower", b.lower)?;
    d.set_item("upper", b.upper)?;
    d.set_item("upper_exact", format_rational(&b.upper_exact))?;
    d.set_item("upper_kind", b.upper_kind.to_string())?;
    d.set_item(
        "lower_word",
        b.lower_provenance.as_ref().map(|r| r.word.to_string()),
    )?;
    Ok(d)
}

/// Converse check with random product input laws.
#[pyfunction]
#[pyo3(signature = (a, n, trials = 100, seed = 0, horizon = None))]
fn converse_check<'py>(
    py: Python<'py>,
    a: &PyPfa,
    n: usize,
    trials: usize,
    seed: u64,
    horizon: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let r = capacity::converse_check(&a.inner, n, trials, seed, horizon).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("val_horizon", format_rational(&r.val_horizon))?;
    d.set_item("violations", r.violations)?;
    d.set_item("max_rate", r.max_rate())?;
    d.set_item("rates", r.trials.iter().map(|t| t.rate).collect::<Vec<_>>())?;
    Ok(d)
}

/// Stage lengths `m_t`, one per consecutive pair of block lengths.
#[pyfunction]
fn stability_schedule(val: f64, delta: f64, n_list: Vec<usize>) -> PyResult<Vec<u64>> {
    let s = capacity::stability_schedule(val, delta, &n_list).map_err(err)?;
    Ok(s.stages.iter().map(|st| st.m_t).collect())
}

#[pymodule]
fn pfacap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPfa>()?;
    m.add_function(wrap_pyfunction!(build_d_xy, m)?)?;
    m.add_function(wrap_pyfunction!(build_d_ay, m)?)?;
    m.add_function(wrap_pyfunction!(build_family_member, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_encode, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_decode, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize_word, m)?)?;
    m.add_function(wrap_pyfunction!(blahut_arimoto, m)?)?;
    m.add_function(wrap_pyfunction!(capacity_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(converse_check, m)?)?;
    m.add_function(wrap_pyfunction!(stability_schedule, m)?)?;
    Ok(())
}

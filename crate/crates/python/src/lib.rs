//! Python bindings. Composite results come back as plain Python objects
//! (dicts and lists) with exact numbers as `"num/den"` strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::Value;

use translucent_core::domination::{ir_prime, ir_relative, ir_set, minimax_dominates, nsd_fixpoint};
use translucent_core::json::{game_to_value, parse_game};
use translucent_core::kripke::{
    epsilon_closeness, load_structure, parse_structure, respects_unilateral_deviations,
    structure_to_value, validate_appropriate, validate_strongly_appropriate, CounterfactualStructure,
};
use translucent_core::logic::{parse_formula, Checker};
use translucent_core::oracle::oracle;
use translucent_core::rationalizability::rationalizable_set;
use translucent_core::witness::{
    build_ccbr_witness, build_ir_witness, build_kw_witness, lift_unilateral, TotalOrder,
};
use translucent_core::{builtin, Error, Profile, Rational, Restriction};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, value: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (value.to_string(),))
}

fn rational(text: &str) -> PyResult<Rational> {
    text.parse()
        .map_err(|e| PyValueError::new_err(format!("invalid rational {text:?}: {e}")))
}

#[pyclass(name = "Game", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGame {
    inner: translucent_core::Game,
}

impl PyGame {
    fn restriction(&self, sets: Option<Vec<Vec<usize>>>) -> PyResult<Restriction> {
        match sets {
            None => Ok(Restriction::full(&self.inner)),
            Some(sets) => Restriction::new(&self.inner, sets.into_iter().map(|s| s.into_iter().collect()).collect())
                .map_err(py_err),
        }
    }

    fn profile(&self, profile: Vec<usize>) -> PyResult<Profile> {
        let p = Profile(profile);
        self.inner.check_profile(&p).map_err(py_err)?;
        Ok(p)
    }
}

#[pymethods]
impl PyGame {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyGame {
            inner: parse_game(text).map_err(py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (r = "1", p = "2"))]
    fn pd(r: &str, p: &str) -> PyResult<Self> {
        Ok(PyGame {
            inner: builtin::pd(rational(r)?, rational(p)?).map_err(py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (k, p = "1/2"))]
    fn reverse_traveler(k: usize, p: &str) -> PyResult<Self> {
        Ok(PyGame {
            inner: builtin::reverse_traveler(k, rational(p)?).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn ex2() -> Self {
        PyGame { inner: builtin::ex2() }
    }

    fn to_json(&self) -> String {
        game_to_value(&self.inner).to_string()
    }

    #[getter]
    fn num_players(&self) -> usize {
        self.inner.num_players()
    }

    #[getter]
    fn strategy_names(&self) -> Vec<Vec<String>> {
        self.inner.strategy_names().to_vec()
    }

    /// Payoff as a `"num/den"` string.
    fn utility(&self, profile: Vec<usize>, player: usize) -> PyResult<String> {
        let p = Profile(profile);
        Ok(self.inner.utility(&p, player).map_err(py_err)?.to_string())
    }

    /// Deletion trace and survivors of iterated minimax domination.
    fn nsd<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &nsd_fixpoint(&self.inner).to_value())
    }

    fn survivors(&self) -> Vec<Vec<usize>> {
        nsd_fixpoint(&self.inner).final_restriction().to_vecs()
    }

    #[pyo3(signature = (player, dominator, dominated, opponents = None))]
    fn minimax_dominates(
        &self,
        player: usize,
        dominator: usize,
        dominated: usize,
        opponents: Option<Vec<Vec<usize>>>,
    ) -> PyResult<bool> {
        let z = self.restriction(opponents)?;
        minimax_dominates(&self.inner, player, dominator, dominated, &z).map_err(py_err)
    }

    /// IR profiles of the game, or of the subgame `z` (`prime` lets the
    /// guarantee use strategies outside it).
    #[pyo3(signature = (z = None, prime = false))]
    fn ir(&self, z: Option<Vec<Vec<usize>>>, prime: bool) -> PyResult<Vec<Vec<usize>>> {
        let profiles = match z {
            None => ir_set(&self.inner),
            Some(sets) => {
                let z = self.restriction(Some(sets))?;
                if prime {
                    ir_prime(&self.inner, &z).map_err(py_err)?
                } else {
                    ir_relative(&self.inner, &z).map_err(py_err)?
                }
            }
        };
        Ok(profiles.into_iter().map(|p| p.0).collect())
    }

    fn rationalizable<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &rationalizable_set(&self.inner).to_value())
    }

    fn oracle<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &oracle(&self.inner).to_value())
    }

    /// Builds a `ccbr`, `kw` or `ir` witness for `profile`; returns the
    /// structure and its designated state. `z` defaults to the survivors
    /// of deletion.
    #[pyo3(signature = (profile, kind = "ccbr", z = None, reversed = false))]
    fn witness(
        &self,
        profile: Vec<usize>,
        kind: &str,
        z: Option<Vec<Vec<usize>>>,
        reversed: bool,
    ) -> PyResult<(PyStructure, usize)> {
        let p = self.profile(profile)?;
        let order = if reversed {
            TotalOrder::Reversed
        } else {
            TotalOrder::Lexicographic
        };
        let z = match z {
            Some(sets) => self.restriction(Some(sets))?,
            None => nsd_fixpoint(&self.inner).final_restriction().clone(),
        };
        let w = match kind {
            "ccbr" => build_ccbr_witness(&self.inner, &p, &z, order),
            "kw" => build_kw_witness(&self.inner, &p, &z, order),
            "ir" => build_ir_witness(&self.inner, &p, order),
            other => return Err(PyValueError::new_err(format!("unknown witness kind {other:?}"))),
        }
        .map_err(py_err)?;
        Ok((PyStructure { inner: w.structure }, w.designated))
    }

    fn __repr__(&self) -> String {
        format!(
            "Game(players={}, strategies={:?})",
            self.inner.num_players(),
            self.inner.strategy_counts()
        )
    }
}

#[pyclass(name = "Structure", frozen)]
struct PyStructure {
    inner: CounterfactualStructure,
}

#[pymethods]
impl PyStructure {
    /// Parses a structure document. With `game`, the embedded game is
    /// ignored; otherwise it must be inline.
    #[staticmethod]
    #[pyo3(signature = (text, game = None))]
    fn from_json(text: &str, game: Option<&PyGame>) -> PyResult<Self> {
        let inner = match game {
            Some(g) => parse_structure(text, &g.inner),
            None => load_structure(text, None),
        }
        .map_err(py_err)?;
        Ok(PyStructure { inner })
    }

    fn to_json(&self) -> String {
        structure_to_value(&self.inner).to_string()
    }

    #[getter]
    fn num_states(&self) -> usize {
        self.inner.num_states()
    }

    #[getter]
    fn game(&self) -> PyGame {
        PyGame {
            inner: self.inner.game().clone(),
        }
    }

    fn strategies(&self, state: usize) -> PyResult<Vec<usize>> {
        if state >= self.inner.num_states() {
            return Err(PyValueError::new_err(format!("state {state} out of range")));
        }
        Ok(self.inner.strategies(state).0.clone())
    }

    /// Validation report as a dict with `ok` and `violations`.
    #[pyo3(signature = (strong = false))]
    fn validate<'py>(&self, py: Python<'py>, strong: bool) -> PyResult<Bound<'py, PyAny>> {
        let report = if strong {
            validate_strongly_appropriate(&self.inner)
        } else {
            validate_appropriate(&self.inner)
        };
        to_py(py, &report.to_value())
    }

    fn respects_unilateral_deviations(&self) -> bool {
        respects_unilateral_deviations(&self.inner)
    }

    fn epsilon(&self) -> String {
        epsilon_closeness(&self.inner).to_string()
    }

    fn holds(&self, state: usize, formula: &str) -> PyResult<bool> {
        if state >= self.inner.num_states() {
            return Err(PyValueError::new_err(format!("state {state} out of range")));
        }
        let f = parse_formula(formula, self.inner.game()).map_err(py_err)?;
        Checker::new(&self.inner).holds(state, &f).map_err(py_err)
    }

    fn extension(&self, formula: &str) -> PyResult<Vec<usize>> {
        let f = parse_formula(formula, self.inner.game()).map_err(py_err)?;
        Ok(Checker::new(&self.inner).extension(&f).map_err(py_err)?.states)
    }

    /// `(holds, k)`: CCBR at `state` and the level where the towers settle.
    fn ccbr(&self, state: usize) -> PyResult<(bool, usize)> {
        if state >= self.inner.num_states() {
            return Err(PyValueError::new_err(format!("state {state} out of range")));
        }
        Checker::new(&self.inner).ccbr(state).map_err(py_err)
    }

    /// Lifts the structure's beliefs (ignoring `f`) to one that respects
    /// unilateral deviations; returns it with the base-state map.
    fn lift(&self) -> PyResult<(PyStructure, Vec<usize>)> {
        let lift = lift_unilateral(&self.inner.to_probability_structure()).map_err(py_err)?;
        Ok((PyStructure { inner: lift.structure }, lift.state_map))
    }

    fn __repr__(&self) -> String {
        format!("Structure(states={})", self.inner.num_states())
    }
}

#[pymodule]
fn translucent(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGame>()?;
    m.add_class::<PyStructure>()?;
    Ok(())
}

//! Python bindings: an [`Engine`] holding a loaded program, answering
//! queries with rendered solution bindings.

use std::collections::HashMap;
use std::sync::Arc;

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;

use cube_core::engine::{eval, EvalConfig, Program};
use cube_core::outcome::Final;
use cube_core::setting::Setting;
use cube_core::stdlib::load_stdlib;
use cube_core::syntax::{
    parse_program, parse_prolog, parse_query, print_rational, print_term_named,
};
use cube_core::term::{Name, Term};

/// The answer to a query: each solution as a dict of query-variable
/// bindings, plus how the outcome ended.
#[pyclass]
struct Result {
    /// One dict per solution, mapping query variable names to printed terms.
    #[pyo3(get)]
    solutions: Vec<HashMap<String, String>>,
    /// `"fail"`, `"exception: <payload>"`, `"budget exhausted"`, or
    /// `"more"` when the solution limit was reached first.
    #[pyo3(get)]
    ending: String,
}

#[pymethods]
impl Result {
    fn __len__(&self) -> usize {
        self.solutions.len()
    }

    fn __repr__(&self) -> String {
        format!("Result(solutions={:?}, ending={:?})", self.solutions, self.ending)
    }
}

/// A loaded program plus evaluation settings.
#[pyclass]
struct Engine {
    program: Program,
    /// Evaluation step budget per query.
    #[pyo3(get, set)]
    fuel: u64,
}

#[pymethods]
impl Engine {
    /// Creates an engine, by default with the standard prelude and the
    /// Prolog interpreter loaded.
    #[new]
    #[pyo3(signature = (prelude = true, fuel = 1_000_000))]
    fn new(prelude: bool, fuel: u64) -> PyResult<Engine> {
        let mut program = Program::new();
        if prelude {
            load_stdlib(&mut program).map_err(|e| PyValueError::new_err(e.to_string()))?;
        }
        Ok(Engine { program, fuel })
    }

    /// Loads procedure definitions from source text.
    fn load(&mut self, source: &str) -> PyResult<()> {
        let procs = parse_program(source).map_err(|e| PyValueError::new_err(e.to_string()))?;
        self.program
            .load(&procs)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Loads Prolog clauses into the database read by `clause/2`; run
    /// them through `execute(goal)`.
    fn load_prolog(&mut self, source: &str) -> PyResult<()> {
        let clauses = parse_prolog(source).map_err(|e| PyValueError::new_err(e.to_string()))?;
        self.program
            .load_prolog(&clauses)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    /// Runs a query, collecting up to `limit` solutions.
    #[pyo3(signature = (query, limit = 64))]
    fn solve(&self, query: &str, limit: usize) -> PyResult<Result> {
        let (goal, vt) = parse_query(query).map_err(|e| PyValueError::new_err(e.to_string()))?;
        let cfg = EvalConfig {
            fuel: self.fuel,
            ..EvalConfig::default()
        };
        let out = eval(&goal, &Setting::new(0), &Arc::new(self.program.clone()), &cfg);
        let (sols, fin) = out.take(limit);
        let names: HashMap<_, _> = vt.names.iter().cloned().collect();
        let solutions = sols
            .iter()
            .map(|s| {
                vt.names
                    .iter()
                    .map(|(v, n)| (n.clone(), print_term_named(&Term::Var(*v), s, &names)))
                    .collect()
            })
            .collect();
        let ending = match fin {
            None => "more".to_string(),
            Some(Final::Fail) => "fail".to_string(),
            Some(Final::BudgetExhausted) => "budget exhausted".to_string(),
            Some(Final::Exception(p)) => format!("exception: {}", print_rational(&p, None)),
        };
        Ok(Result { solutions, ending })
    }

    /// The names of the loaded procedures.
    #[getter]
    fn procedures(&self) -> Vec<String> {
        let mut names: Vec<String> = self.program.procedures.keys().map(Name::to_string).collect();
        names.sort();
        names
    }

    /// The closed definition of a procedure, as an abstraction over the
    /// argument list (printed in a debugging notation).
    fn definition(&self, name: &str) -> PyResult<String> {
        let def = self
            .program
            .procedures
            .get(&Name::atom(name))
            .ok_or_else(|| PyKeyError::new_err(name.to_string()))?;
        Ok(cube_core::syntax::print_term(&def.closed, &Setting::new(0)))
    }
}

#[pymodule]
fn cube_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Engine>()?;
    m.add_class::<Result>()?;
    Ok(())
}

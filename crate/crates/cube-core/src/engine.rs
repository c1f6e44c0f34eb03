//! The denotation of terms as tasks: dispatch of the special forms to the
//! semantic operators, clause translation and composition into closed
//! definitions, procedure calls by β-application, and the builtin table.

use std::cell::Cell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::outcome::{catch_transform, product, prune, prune_fail, sum, Behaviour, Final, Outcome, Step};
use crate::setting::{RatNode, RationalTerm, Setting};
use crate::syntax::{ClauseKind, ClauseSrc, ProcedureSrc, PrologClause};
use crate::term::{beta_apply, subst_free, Name, Term, TermError, VarId};

/// A closed procedure definition: an abstraction over the argument list.
#[derive(Debug, Clone, PartialEq)]
pub struct Definition {
    pub closed: Term,
}

/// The builtin name/arity pairs. `system/1` answers membership in this set.
pub const BUILTINS: &[(&str, usize)] = &[
    ("true", 0),
    ("fail", 0),
    ("=", 2),
    ("is", 2),
    ("<", 2),
    (">", 2),
    ("=<", 2),
    (">=", 2),
    ("=:=", 2),
    ("=\\=", 2),
    ("throw", 1),
    ("catch", 3),
    ("clause", 2),
    ("system", 1),
];

/// Special-form constants with a fixed compositional interpretation.
const SPECIAL: &[&str] = &[";", ",", "->", "-;", "until", "unless"];

pub fn is_builtin(name: &Name, arity: usize) -> bool {
    match name.as_atom() {
        Some(a) => BUILTINS.iter().any(|&(n, k)| n == a && k == arity),
        None => false,
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoadError {
    #[error("redefinition of builtin or special form `{0}`")]
    BuiltinRedefinition(String),
    #[error("{0}")]
    Translate(#[from] TermError),
}

/// A program: constant → closed definition, plus the Prolog clause
/// database read by `clause/2`.
#[derive(Debug, Clone, Default)]
pub struct Program {
    pub procedures: HashMap<Name, Definition>,
    pub clause_db: Vec<PrologClause>,
}

impl Program {
    pub fn new() -> Program {
        Program::default()
    }

    /// Translates and installs procedures. Redefining a builtin, a special
    /// form, or an already-present procedure is an error.
    pub fn load(&mut self, procs: &[ProcedureSrc]) -> Result<(), LoadError> {
        for p in procs {
            let reserved = p
                .name
                .as_atom()
                .map(|a| {
                    SPECIAL.contains(&a) || BUILTINS.iter().any(|&(n, _)| n == a)
                })
                .unwrap_or(true);
            if reserved || self.procedures.contains_key(&p.name) {
                return Err(LoadError::BuiltinRedefinition(p.name.to_string()));
            }
            let def = define_procedure(&p.clauses)?;
            self.procedures.insert(p.name.clone(), def);
        }
        Ok(())
    }

    /// Appends Prolog clauses to the database. Heads that would shadow a
    /// builtin are rejected.
    pub fn load_prolog(&mut self, clauses: &[PrologClause]) -> Result<(), LoadError> {
        for c in clauses {
            if let Some((name, arity)) = c.head.root() {
                if is_builtin(name, arity) || name.as_atom() == Some("!") {
                    return Err(LoadError::BuiltinRedefinition(name.to_string()));
                }
            }
            self.clause_db.push(c.clone());
        }
        Ok(())
    }
}

/// Whether an unbound variable invoked as a task fails (the core reading)
/// or raises an instantiation exception.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FreeVarPolicy {
    #[default]
    FailMode,
    ErrorMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub fuel: u64,
    pub free_var_policy: FreeVarPolicy,
}

impl Default for EvalConfig {
    fn default() -> EvalConfig {
        EvalConfig {
            fuel: 1_000_000,
            free_var_policy: FreeVarPolicy::FailMode,
        }
    }
}

// --- clause translation and composition: clauses as abstractions ---

fn fresh_base(c: &ClauseSrc) -> u64 {
    c.locals.iter().map(|v| v.0 + 1).max().unwrap_or(0)
}

/// Translates one source clause into a partial definition: an abstraction
/// over the argument list and the continuation, with clause variables
/// abstracted in first-occurrence order. An inclusive clause becomes a
/// disjunction with the continuation, an exclusive clause an if-then-else
/// abstracted on the else branch. A trivially-true head condition or
/// inclusive body is elided.
pub fn translate_clause(c: &ClauseSrc) -> Term {
    let base = fresh_base(c);
    let arg_var = VarId(base);
    let cont_var = VarId(base + 1);
    let head_eq = Term::App(
        Name::atom("="),
        vec![Term::Var(arg_var), Term::list(c.head_args.clone())],
    );
    let inner = match &c.kind {
        ClauseKind::Inclusive(body) => {
            let case = if body.is_truth() {
                head_eq
            } else {
                Term::pair(head_eq, body.clone())
            };
            let wrapped = wrap_locals(&c.locals, case);
            Term::App(Name::atom(";"), vec![wrapped, Term::Var(cont_var)])
        }
        ClauseKind::Exclusive(cond, body) => {
            let test = if cond.is_truth() {
                head_eq
            } else {
                Term::pair(head_eq, cond.clone())
            };
            let ite = Term::App(
                Name::atom("-;"),
                vec![
                    Term::App(Name::atom("->"), vec![test, body.clone()]),
                    Term::Var(cont_var),
                ],
            );
            wrap_locals(&c.locals, ite)
        }
    };
    Term::abs(arg_var, Term::abs(cont_var, inner))
}

fn wrap_locals(locals: &[VarId], inner: Term) -> Term {
    locals.iter().rev().fold(inner, |acc, v| Term::abs(*v, acc))
}

/// `compose_after(p2, p1)` composes two partial definitions so that `p1`
/// is tried first and `p2` serves as its continuation.
pub fn compose_after(p2: &Term, p1: &Term) -> Result<Term, TermError> {
    let base = crate::term::max_var(p1)
        .max(crate::term::max_var(p2))
        .map(|v| v.0 + 1)
        .unwrap_or(0);
    let arg_var = VarId(base);
    let cont_var = VarId(base + 1);
    let tail = beta_apply(&beta_apply(p2, &Term::Var(arg_var))?, &Term::Var(cont_var))?;
    let body = beta_apply(&beta_apply(p1, &Term::Var(arg_var))?, &tail)?;
    Ok(Term::abs(arg_var, Term::abs(cont_var, body)))
}

/// Closes a partial definition by plugging `fail` as the final
/// continuation, leaving one outer abstraction on the argument list.
/// A trailing `; fail` or `-; fail` left by the plug is elided.
pub fn close_def(p: &Term) -> Result<Definition, TermError> {
    let base = crate::term::max_var(p).map(|v| v.0 + 1).unwrap_or(0);
    let arg_var = VarId(base);
    let closed = beta_apply(
        &beta_apply(p, &Term::Var(arg_var))?,
        &Term::atom("fail"),
    )?;
    Ok(Definition {
        closed: Term::abs(arg_var, elide_fail_cont(&closed)),
    })
}

/// Removes a `fail` plugged into the continuation spine of a closed
/// definition: the right arms of the `;`/`-;` chain and the bodies of
/// local-variable abstractions. Clause bodies are never entered.
fn elide_fail_cont(t: &Term) -> Term {
    let is_fail = |u: &Term| matches!(u, Term::App(n, a) if a.is_empty() && n.as_atom() == Some("fail"));
    match t {
        Term::App(n, args) if args.len() == 2 && n.as_atom() == Some(";") => {
            if is_fail(&args[1]) {
                args[0].clone()
            } else {
                Term::App(n.clone(), vec![args[0].clone(), elide_fail_cont(&args[1])])
            }
        }
        Term::App(n, args) if args.len() == 2 && n.as_atom() == Some("-;") => {
            if is_fail(&args[1]) {
                args[0].clone()
            } else {
                Term::App(n.clone(), vec![args[0].clone(), elide_fail_cont(&args[1])])
            }
        }
        Term::Abs(v, body) => Term::abs(*v, elide_fail_cont(body)),
        other => other.clone(),
    }
}

/// Clauses compose in textual order: the first clause is tried first.
pub fn define_procedure(clauses: &[ClauseSrc]) -> Result<Definition, TermError> {
    let mut acc = translate_clause(&clauses[0]);
    for c in &clauses[1..] {
        acc = compose_after(&translate_clause(c), &acc)?;
    }
    close_def(&acc)
}

// --- evaluation ---

#[derive(Clone)]
struct Ev {
    prog: Arc<Program>,
    fuel: Rc<Cell<u64>>,
    policy: FreeVarPolicy,
}

impl Ev {
    fn tick(&self) -> bool {
        let f = self.fuel.get();
        if f == 0 {
            false
        } else {
            self.fuel.set(f - 1);
            true
        }
    }

    fn behaviour(&self, t: Term) -> Behaviour {
        let ev = self.clone();
        Rc::new(move |s: &Setting| ev.eval(t.clone(), s.clone()))
    }

    fn exception(&self, s: &Setting, t: Term) -> Step {
        Step::End(Final::Exception(s.resolve(&t)))
    }

    fn eval(&self, t: Term, s: Setting) -> Outcome {
        let ev = self.clone();
        Outcome::from_fn(move || ev.step(&t, s))
    }

    fn step(&self, t: &Term, s: Setting) -> Step {
        if !self.tick() {
            return Step::End(Final::BudgetExhausted);
        }
        match t {
            // the idle successful outcome
            Term::Null => Step::Sol(s, Outcome::fail()),
            Term::Pair(a, b) => {
                let o = self.eval((**a).clone(), s);
                product(o, self.behaviour((**b).clone())).force()
            }
            Term::Var(_) => {
                let resolved = s.shallow_resolve(t);
                match resolved {
                    Term::Var(_) => match self.policy {
                        FreeVarPolicy::FailMode => Step::End(Final::Fail),
                        FreeVarPolicy::ErrorMode => {
                            self.exception(&s, Term::atom("instantiation_error"))
                        }
                    },
                    bound => self.eval(bound, s).force(),
                }
            }
            Term::Abs(v, body) => {
                let (w, s2) = s.fresh();
                let instantiated = subst_free(body, *v, &Term::Var(w));
                self.eval(instantiated, s2).force()
            }
            Term::App(name, args) => self.step_app(name, args, s),
        }
    }

    fn step_app(&self, name: &Name, args: &[Term], s: Setting) -> Step {
        let atom = match name {
            Name::Atom(a) => a.as_ref(),
            Name::Int(_) => {
                // an integer is not a task
                return self.exception(
                    &s,
                    Term::App(
                        Name::atom("type_error"),
                        vec![Term::App(name.clone(), args.to_vec())],
                    ),
                );
            }
        };
        match (atom, args) {
            (";", [a, b]) => {
                let ev = self.clone();
                let (b2, s2) = (b.clone(), s.clone());
                sum(
                    self.eval(a.clone(), s),
                    Box::new(move || ev.eval(b2, s2)),
                )
                .force()
            }
            (",", [a, b]) => {
                let o = self.eval(a.clone(), s);
                product(o, self.behaviour(b.clone())).force()
            }
            ("until", [a, b]) => {
                prune(self.eval(a.clone(), s), self.behaviour(b.clone())).force()
            }
            ("unless", [a, b]) => {
                prune_fail(self.eval(a.clone(), s), self.behaviour(b.clone())).force()
            }
            ("-;", [cond, els]) => match cond {
                Term::App(n, ite) if n.as_atom() == Some("->") && ite.len() == 2 => {
                    self.if_then_else(&ite[0], &ite[1], els, s)
                }
                _ => self.exception(
                    &s,
                    Term::App(
                        Name::atom("type_error"),
                        vec![Term::App(Name::atom("-;"), args.to_vec())],
                    ),
                ),
            },
            ("->", [cond, then]) => self.if_then_else(cond, then, &Term::atom("fail"), s),
            ("true", []) => Step::Sol(s, Outcome::fail()),
            ("fail", []) => Step::End(Final::Fail),
            ("=", [a, b]) => match s.unify(a, b) {
                Ok(Some(s2)) => Step::Sol(s2, Outcome::fail()),
                Ok(None) => Step::End(Final::Fail),
                Err(_) => self.exception(&s, Term::atom("abstraction_in_unification")),
            },
            ("is", [x, e]) => self.builtin_is(&s, x, e),
            ("<" | ">" | "=<" | ">=" | "=:=" | "=\\=", [a, b]) => {
                self.builtin_compare(&s, atom, a, b)
            }
            ("throw", [t]) => Step::End(Final::Exception(s.resolve(t))),
            ("catch", [task, pat, handler]) => {
                let (s2, pat2) = (s.clone(), pat.clone());
                let matcher = move |payload: &RationalTerm| -> Option<Setting> {
                    let (s3, pt) = s2.import_rational(payload);
                    s3.unify(&pat2, &pt).ok().flatten()
                };
                catch_transform(
                    self.eval(task.clone(), s),
                    Rc::new(matcher),
                    self.behaviour(handler.clone()),
                )
                .force()
            }
            ("clause", [g, b]) => self.builtin_clause(&s, g, b),
            ("system", [g]) => self.builtin_system(&s, g),
            _ => self.call(name, args, s),
        }
    }

    /// Only the first solution of the condition, if any, feeds the then
    /// branch; failure selects the else branch; finals absorb.
    fn if_then_else(&self, cond: &Term, then: &Term, els: &Term, s: Setting) -> Step {
        match self.eval(cond.clone(), s.clone()).force() {
            Step::End(Final::Fail) => self.eval(els.clone(), s).force(),
            Step::End(f) => Step::End(f),
            Step::Sol(s2, _) => self.eval(then.clone(), s2).force(),
        }
    }

    /// Procedure call: β-apply the closed definition to the argument list.
    fn call(&self, name: &Name, args: &[Term], s: Setting) -> Step {
        let def = match self.prog.procedures.get(name) {
            Some(d) => d.closed.clone(),
            None => {
                return self.exception(
                    &s,
                    Term::App(
                        Name::atom("existence_error"),
                        vec![Term::App(name.clone(), vec![])],
                    ),
                )
            }
        };
        let arg_list = Term::list(args.to_vec());
        match beta_apply(&def, &arg_list) {
            Ok(body) => self.eval(body, s).force(),
            Err(_) => self.exception(
                &s,
                Term::App(
                    Name::atom("type_error"),
                    vec![Term::App(name.clone(), vec![])],
                ),
            ),
        }
    }

    fn builtin_is(&self, s: &Setting, x: &Term, e: &Term) -> Step {
        match arith_eval(s, e) {
            Err(ArithStop::Fail) => Step::End(Final::Fail),
            Err(ArithStop::DivZero) => self.exception(s, Term::atom("division_by_zero")),
            Ok(n) => {
                let val = Term::App(Name::Int(n), vec![]);
                match s.unify(x, &val) {
                    Ok(Some(s2)) => Step::Sol(s2, Outcome::fail()),
                    Ok(None) => Step::End(Final::Fail),
                    Err(_) => self.exception(s, Term::atom("abstraction_in_unification")),
                }
            }
        }
    }

    fn builtin_compare(&self, s: &Setting, op: &str, a: &Term, b: &Term) -> Step {
        let (x, y) = match (arith_eval(s, a), arith_eval(s, b)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(ArithStop::DivZero), _) | (_, Err(ArithStop::DivZero)) => {
                return self.exception(s, Term::atom("division_by_zero"))
            }
            _ => return Step::End(Final::Fail),
        };
        let holds = match op {
            "<" => x < y,
            ">" => x > y,
            "=<" => x <= y,
            ">=" => x >= y,
            "=:=" => x == y,
            "=\\=" => x != y,
            _ => unreachable!(),
        };
        if holds {
            Step::Sol(s.clone(), Outcome::fail())
        } else {
            Step::End(Final::Fail)
        }
    }

    /// Enumerates database clauses in order whose renamed head unifies
    /// with `g`, unifying `b` with the renamed body.
    fn builtin_clause(&self, s: &Setting, g: &Term, b: &Term) -> Step {
        let target = s.shallow_resolve(g);
        if !matches!(target, Term::App(..)) {
            return self.exception(
                s,
                Term::App(Name::atom("type_error"), vec![Term::atom("callable")]),
            );
        }
        self.clause_alts(0, s.clone(), g.clone(), b.clone()).force()
    }

    fn clause_alts(&self, idx: usize, s: Setting, g: Term, b: Term) -> Outcome {
        let ev = self.clone();
        Outcome::from_fn(move || {
            for i in idx..ev.prog.clause_db.len() {
                let clause = &ev.prog.clause_db[i];
                let (_, s2) = s.fresh_many(clause.n_vars);
                let head = shift_vars(&clause.head, s.scope());
                let body = shift_vars(&clause.body, s.scope());
                let unified = match s2.unify(&head, &g) {
                    Ok(Some(su)) => su.unify(&body, &b),
                    other => other,
                };
                match unified {
                    Ok(Some(s3)) => {
                        return Step::Sol(s3, ev.clause_alts(i + 1, s, g, b));
                    }
                    Ok(None) => continue,
                    Err(_) => {
                        return Step::End(Final::Exception(
                            s.resolve(&Term::atom("abstraction_in_unification")),
                        ))
                    }
                }
            }
            Step::End(Final::Fail)
        })
    }

    /// Idle success iff the goal resolves to an application in the
    /// builtin set.
    fn builtin_system(&self, s: &Setting, g: &Term) -> Step {
        match s.shallow_resolve(g).root() {
            Some((name, arity)) if is_builtin(name, arity) => {
                Step::Sol(s.clone(), Outcome::fail())
            }
            _ => Step::End(Final::Fail),
        }
    }
}

/// Renames clause-local variables (numbered from 0) into fresh runtime
/// variables starting at `base`.
pub fn shift_vars(t: &Term, base: u64) -> Term {
    match t {
        Term::Null => Term::Null,
        Term::Var(v) => Term::Var(VarId(v.0 + base)),
        Term::Pair(a, b) => Term::pair(shift_vars(a, base), shift_vars(b, base)),
        Term::App(n, args) => Term::App(
            n.clone(),
            args.iter().map(|a| shift_vars(a, base)).collect(),
        ),
        Term::Abs(v, body) => Term::abs(VarId(v.0 + base), shift_vars(body, base)),
    }
}

enum ArithStop {
    Fail,
    DivZero,
}

/// Interprets a term under a setting as an integer arithmetic expression.
/// Unbound variables or non-numeric structure fail; cyclic terms cannot
/// be numbers and fail too.
fn arith_eval(s: &Setting, e: &Term) -> Result<BigInt, ArithStop> {
    let rt = s.resolve(e);
    if rt.is_cyclic() {
        return Err(ArithStop::Fail);
    }
    arith_node(&rt, rt.root)
}

fn arith_node(rt: &RationalTerm, i: usize) -> Result<BigInt, ArithStop> {
    match &rt.nodes[i] {
        RatNode::App(Name::Int(n), args) if args.is_empty() => Ok(n.clone()),
        RatNode::App(Name::Atom(op), args) => {
            match (op.as_ref(), args.as_slice()) {
                ("-", [a]) => Ok(-arith_node(rt, *a)?),
                ("+", [a, b]) => Ok(arith_node(rt, *a)? + arith_node(rt, *b)?),
                ("-", [a, b]) => Ok(arith_node(rt, *a)? - arith_node(rt, *b)?),
                ("*", [a, b]) => Ok(arith_node(rt, *a)? * arith_node(rt, *b)?),
                ("//", [a, b]) => {
                    let (x, y) = (arith_node(rt, *a)?, arith_node(rt, *b)?);
                    if y.is_zero() {
                        Err(ArithStop::DivZero)
                    } else {
                        Ok(x / y)
                    }
                }
                ("mod", [a, b]) => {
                    let (x, y) = (arith_node(rt, *a)?, arith_node(rt, *b)?);
                    if y.is_zero() {
                        Err(ArithStop::DivZero)
                    } else {
                        // result takes the sign of the divisor
                        let m = x % &y;
                        if m.is_zero() || m.sign() == y.sign() {
                            Ok(m)
                        } else {
                            Ok(m + y)
                        }
                    }
                }
                _ => Err(ArithStop::Fail),
            }
        }
        _ => Err(ArithStop::Fail),
    }
}

/// Evaluates a task in a setting against a program, with a fresh fuel
/// budget from the config.
pub fn eval(t: &Term, s: &Setting, prog: &Arc<Program>, cfg: &EvalConfig) -> Outcome {
    let ev = Ev {
        prog: prog.clone(),
        fuel: Rc::new(Cell::new(cfg.fuel)),
        policy: cfg.free_var_policy,
    };
    let scope = crate::term::free_vars(t)
        .iter()
        .map(|v| v.0 + 1)
        .max()
        .unwrap_or(0);
    ev.eval(t.clone(), s.cover(scope))
}

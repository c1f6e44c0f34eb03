//! Independent oracles and random-program generation for differential
//! verification of the engine and the Prolog interpreter.
//!
//! [`oracle_eval`] is a deliberately eager, depth-indexed transcription of
//! the semantic equations, sharing no stream plumbing with the engine.
//! [`sld_cut_eval`] is classical SLD resolution with cut-to-clause-scope
//! pruning, the ground truth for the cut-free Prolog interpreter.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::engine::{is_builtin, shift_vars, Program};
use crate::outcome::{final_equal, Final, Outcome};
use crate::setting::{rational_equal, Setting};
use crate::term::{beta_apply, subst_free, Name, Term, VarId};

/// A fully materialized outcome: the solution sequence plus how it ended.
#[derive(Debug, Clone, PartialEq)]
pub struct EagerOutcome {
    pub sols: Vec<Setting>,
    pub fin: Final,
}

impl EagerOutcome {
    fn fail() -> EagerOutcome {
        EagerOutcome {
            sols: vec![],
            fin: Final::Fail,
        }
    }

    fn idle(s: Setting) -> EagerOutcome {
        EagerOutcome {
            sols: vec![s],
            fin: Final::Fail,
        }
    }

    fn end(fin: Final) -> EagerOutcome {
        EagerOutcome { sols: vec![], fin }
    }
}

/// Eager depth-indexed evaluation: a direct recursive reading of the
/// semantic equations. Procedure-call unfolding beyond `depth` ends in
/// `BudgetExhausted`. Ground truth for the lazy engine.
pub fn oracle_eval(t: &Term, s: &Setting, prog: &Program, depth: u64) -> EagerOutcome {
    let scope = crate::term::free_vars(t)
        .iter()
        .map(|v| v.0 + 1)
        .max()
        .unwrap_or(0);
    o_eval(t, s.cover(scope), prog, depth)
}

fn o_eval(t: &Term, s: Setting, prog: &Program, depth: u64) -> EagerOutcome {
    match t {
        Term::Null => EagerOutcome::idle(s),
        Term::Pair(a, b) => o_product(&o_eval(a, s, prog, depth), b, prog, depth),
        Term::Var(_) => match s.shallow_resolve(t) {
            Term::Var(_) => EagerOutcome::fail(),
            bound => o_eval(&bound, s, prog, depth),
        },
        Term::Abs(v, body) => {
            let (w, s2) = s.fresh();
            o_eval(&subst_free(body, *v, &Term::Var(w)), s2, prog, depth)
        }
        Term::App(name, args) => o_app(name, args, s, prog, depth),
    }
}

/// o ⊗ b, eagerly: concatenate b at every solution, truncating at the
/// first abnormal end.
fn o_product(o: &EagerOutcome, b: &Term, prog: &Program, depth: u64) -> EagerOutcome {
    let mut sols = Vec::new();
    for s in &o.sols {
        let inner = o_eval(b, s.clone(), prog, depth);
        sols.extend(inner.sols);
        if inner.fin != Final::Fail {
            return EagerOutcome { sols, fin: inner.fin };
        }
    }
    EagerOutcome {
        sols,
        fin: o.fin.clone(),
    }
}

fn o_app(name: &Name, args: &[Term], s: Setting, prog: &Program, depth: u64) -> EagerOutcome {
    let atom = match name.as_atom() {
        Some(a) => a,
        None => {
            return EagerOutcome::end(Final::Exception(s.resolve(&Term::App(
                Name::atom("type_error"),
                vec![Term::App(name.clone(), args.to_vec())],
            ))))
        }
    };
    match (atom, args) {
        (";", [a, b]) => {
            let left = o_eval(a, s.clone(), prog, depth);
            if left.fin != Final::Fail {
                return left;
            }
            let right = o_eval(b, s, prog, depth);
            EagerOutcome {
                sols: left.sols.into_iter().chain(right.sols).collect(),
                fin: right.fin,
            }
        }
        (",", [a, b]) => o_product(&o_eval(a, s, prog, depth), b, prog, depth),
        ("until", [a, b]) => {
            let task = o_eval(a, s, prog, depth);
            let mut sols = Vec::new();
            for si in &task.sols {
                let stop = o_eval(b, si.clone(), prog, depth);
                match stop.sols.first() {
                    Some(s2) => {
                        sols.push(s2.clone());
                        return EagerOutcome {
                            sols,
                            fin: Final::Fail,
                        };
                    }
                    None => {
                        if stop.fin != Final::Fail {
                            return EagerOutcome { sols, fin: stop.fin };
                        }
                        sols.push(si.clone());
                    }
                }
            }
            EagerOutcome {
                sols,
                fin: task.fin,
            }
        }
        ("unless", [a, b]) => {
            let task = o_eval(a, s, prog, depth);
            let mut sols = Vec::new();
            for si in &task.sols {
                let stop = o_eval(b, si.clone(), prog, depth);
                if !stop.sols.is_empty() {
                    return EagerOutcome {
                        sols,
                        fin: Final::Fail,
                    };
                }
                if stop.fin != Final::Fail {
                    return EagerOutcome { sols, fin: stop.fin };
                }
                sols.push(si.clone());
            }
            EagerOutcome {
                sols,
                fin: task.fin,
            }
        }
        ("-;", [cond, els]) => match cond {
            Term::App(n, ite) if n.as_atom() == Some("->") && ite.len() == 2 => {
                o_ite(&ite[0], &ite[1], els, s, prog, depth)
            }
            _ => EagerOutcome::end(Final::Exception(s.resolve(&Term::App(
                Name::atom("type_error"),
                vec![Term::App(Name::atom("-;"), args.to_vec())],
            )))),
        },
        ("->", [cond, then]) => o_ite(cond, then, &Term::atom("fail"), s, prog, depth),
        ("true", []) => EagerOutcome::idle(s),
        ("fail", []) => EagerOutcome::fail(),
        ("=", [a, b]) => match s.unify(a, b) {
            Ok(Some(s2)) => EagerOutcome::idle(s2),
            Ok(None) => EagerOutcome::fail(),
            Err(_) => EagerOutcome::end(Final::Exception(
                s.resolve(&Term::atom("abstraction_in_unification")),
            )),
        },
        ("is", [x, e]) => match o_arith(&s, e) {
            Err(ArithStop::Fail) => EagerOutcome::fail(),
            Err(ArithStop::DivZero) => EagerOutcome::end(Final::Exception(
                s.resolve(&Term::atom("division_by_zero")),
            )),
            Ok(n) => match s.unify(x, &Term::App(Name::Int(n), vec![])) {
                Ok(Some(s2)) => EagerOutcome::idle(s2),
                _ => EagerOutcome::fail(),
            },
        },
        ("<" | ">" | "=<" | ">=" | "=:=" | "=\\=", [a, b]) => {
            match (o_arith(&s, a), o_arith(&s, b)) {
                (Ok(x), Ok(y)) => {
                    let holds = match atom {
                        "<" => x < y,
                        ">" => x > y,
                        "=<" => x <= y,
                        ">=" => x >= y,
                        "=:=" => x == y,
                        _ => x != y,
                    };
                    if holds {
                        EagerOutcome::idle(s)
                    } else {
                        EagerOutcome::fail()
                    }
                }
                (Err(ArithStop::DivZero), _) | (_, Err(ArithStop::DivZero)) => EagerOutcome::end(
                    Final::Exception(s.resolve(&Term::atom("division_by_zero"))),
                ),
                _ => EagerOutcome::fail(),
            }
        }
        ("throw", [t]) => EagerOutcome::end(Final::Exception(s.resolve(t))),
        ("catch", [task, pat, handler]) => {
            let inner = o_eval(task, s.clone(), prog, depth);
            match &inner.fin {
                Final::Exception(payload) => {
                    let (s2, pt) = s.import_rational(payload);
                    match s2.unify(pat, &pt) {
                        Ok(Some(s3)) => {
                            let handled = o_eval(handler, s3, prog, depth);
                            EagerOutcome {
                                sols: inner.sols.into_iter().chain(handled.sols).collect(),
                                fin: handled.fin,
                            }
                        }
                        _ => inner,
                    }
                }
                _ => inner,
            }
        }
        ("clause", [g, b]) => o_clause(g, b, s, prog),
        ("system", [g]) => match s.shallow_resolve(g).root() {
            Some((n, k)) if is_builtin(n, k) => EagerOutcome::idle(s),
            _ => EagerOutcome::fail(),
        },
        _ => {
            let def = match prog.procedures.get(name) {
                Some(d) => d.closed.clone(),
                None => {
                    return EagerOutcome::end(Final::Exception(s.resolve(&Term::App(
                        Name::atom("existence_error"),
                        vec![Term::App(name.clone(), vec![])],
                    ))))
                }
            };
            if depth == 0 {
                return EagerOutcome::end(Final::BudgetExhausted);
            }
            match beta_apply(&def, &Term::list(args.to_vec())) {
                Ok(body) => o_eval(&body, s, prog, depth - 1),
                Err(_) => EagerOutcome::end(Final::Exception(s.resolve(&Term::App(
                    Name::atom("type_error"),
                    vec![Term::App(name.clone(), vec![])],
                )))),
            }
        }
    }
}

fn o_ite(
    cond: &Term,
    then: &Term,
    els: &Term,
    s: Setting,
    prog: &Program,
    depth: u64,
) -> EagerOutcome {
    let c = o_eval(cond, s.clone(), prog, depth);
    match c.sols.first() {
        Some(s2) => o_eval(then, s2.clone(), prog, depth),
        None => {
            if c.fin != Final::Fail {
                EagerOutcome::end(c.fin)
            } else {
                o_eval(els, s, prog, depth)
            }
        }
    }
}

fn o_clause(g: &Term, b: &Term, s: Setting, prog: &Program) -> EagerOutcome {
    if !matches!(s.shallow_resolve(g), Term::App(..)) {
        return EagerOutcome::end(Final::Exception(s.resolve(&Term::App(
            Name::atom("type_error"),
            vec![Term::atom("callable")],
        ))));
    }
    let mut sols = Vec::new();
    for clause in &prog.clause_db {
        let (_, s2) = s.fresh_many(clause.n_vars);
        let head = shift_vars(&clause.head, s.scope());
        let body = shift_vars(&clause.body, s.scope());
        if let Ok(Some(su)) = s2.unify(&head, g) {
            if let Ok(Some(s3)) = su.unify(&body, b) {
                sols.push(s3);
            }
        }
    }
    EagerOutcome {
        sols,
        fin: Final::Fail,
    }
}

enum ArithStop {
    Fail,
    DivZero,
}

/// Independent integer evaluation over shallow dereferencing; cyclic
/// expressions are cut off by a structural depth that no finite numeric
/// expression in the test corpus exceeds.
fn o_arith(s: &Setting, e: &Term) -> Result<BigInt, ArithStop> {
    fn go(s: &Setting, e: &Term, d: u32) -> Result<BigInt, ArithStop> {
        if d == 0 {
            return Err(ArithStop::Fail);
        }
        match s.shallow_resolve(e) {
            Term::App(Name::Int(n), args) if args.is_empty() => Ok(n),
            Term::App(Name::Atom(op), args) => match (op.as_ref(), args.as_slice()) {
                ("-", [a]) => Ok(-go(s, a, d - 1)?),
                ("+", [a, b]) => Ok(go(s, a, d - 1)? + go(s, b, d - 1)?),
                ("-", [a, b]) => Ok(go(s, a, d - 1)? - go(s, b, d - 1)?),
                ("*", [a, b]) => Ok(go(s, a, d - 1)? * go(s, b, d - 1)?),
                ("//", [a, b]) => {
                    let (x, y) = (go(s, a, d - 1)?, go(s, b, d - 1)?);
                    if y.is_zero() {
                        Err(ArithStop::DivZero)
                    } else {
                        Ok(x / y)
                    }
                }
                ("mod", [a, b]) => {
                    let (x, y) = (go(s, a, d - 1)?, go(s, b, d - 1)?);
                    if y.is_zero() {
                        Err(ArithStop::DivZero)
                    } else {
                        let m = x % &y;
                        if m.is_zero() || m.sign() == y.sign() {
                            Ok(m)
                        } else {
                            Ok(m + y)
                        }
                    }
                }
                _ => Err(ArithStop::Fail),
            },
            _ => Err(ArithStop::Fail),
        }
    }
    go(s, e, 64)
}

// --- SLD resolution with cut ---

/// Result of exploring one goal: its solutions in order, whether a cut
/// inside it still prunes enclosing choice points, and an abnormal end.
struct SldRes {
    sols: Vec<Setting>,
    cut: bool,
    abnormal: Option<Final>,
}

impl SldRes {
    fn plain(sols: Vec<Setting>) -> SldRes {
        SldRes {
            sols,
            cut: false,
            abnormal: None,
        }
    }
}

/// Classical SLD resolution over `prog.clause_db` with clause order, goal
/// order, and cut pruning to the enclosing clause scope. `depth` bounds
/// clause-call nesting.
pub fn sld_cut_eval(prog: &Program, goal: &Term, depth: u64) -> EagerOutcome {
    let scope = crate::term::free_vars(goal)
        .iter()
        .map(|v| v.0 + 1)
        .max()
        .unwrap_or(0);
    let r = sld_goal(prog, goal, Setting::new(scope), depth);
    EagerOutcome {
        sols: r.sols,
        fin: r.abnormal.unwrap_or(Final::Fail),
    }
}

fn sld_goal(prog: &Program, goal: &Term, s: Setting, depth: u64) -> SldRes {
    let g = s.shallow_resolve(goal);
    let (name, args): (&str, &[Term]) = match &g {
        Term::Null => return SldRes::plain(vec![s]),
        Term::Pair(a, b) => {
            let conj = Term::App(Name::atom(","), vec![(**a).clone(), (**b).clone()]);
            return sld_conj(prog, &conj, s, depth);
        }
        Term::App(n, args) => match n.as_atom() {
            Some(a) => (a, args),
            None => return SldRes::plain(vec![]),
        },
        _ => return SldRes::plain(vec![]),
    };
    match (name, args) {
        ("true", []) => SldRes::plain(vec![s]),
        (",", [_, _]) => sld_conj(prog, &g, s, depth),
        ("fail", []) => SldRes::plain(vec![]),
        ("!", []) => SldRes {
            sols: vec![s],
            cut: true,
            abnormal: None,
        },
        (";", [a, b]) => {
            if let Term::App(n, ct) = a {
                if n.as_atom() == Some("->") && ct.len() == 2 {
                    return sld_ite(prog, &ct[0], &ct[1], Some(b), s, depth);
                }
            }
            let ra = sld_goal(prog, a, s.clone(), depth);
            if ra.cut || ra.abnormal.is_some() {
                return ra;
            }
            let rb = sld_goal(prog, b, s, depth);
            SldRes {
                sols: ra.sols.into_iter().chain(rb.sols).collect(),
                cut: rb.cut,
                abnormal: rb.abnormal,
            }
        }
        ("->", [c, t]) => sld_ite(prog, c, t, None, s, depth),
        ("=", [a, b]) => match s.unify(a, b) {
            Ok(Some(s2)) => SldRes::plain(vec![s2]),
            _ => SldRes::plain(vec![]),
        },
        ("is", [x, e]) => match o_arith(&s, e) {
            Ok(n) => match s.unify(x, &Term::App(Name::Int(n), vec![])) {
                Ok(Some(s2)) => SldRes::plain(vec![s2]),
                _ => SldRes::plain(vec![]),
            },
            Err(ArithStop::DivZero) => SldRes {
                sols: vec![],
                cut: false,
                abnormal: Some(Final::Exception(
                    s.resolve(&Term::atom("division_by_zero")),
                )),
            },
            Err(ArithStop::Fail) => SldRes::plain(vec![]),
        },
        ("<" | ">" | "=<" | ">=" | "=:=" | "=\\=", [a, b]) => {
            match (o_arith(&s, a), o_arith(&s, b)) {
                (Ok(x), Ok(y)) => {
                    let holds = match name {
                        "<" => x < y,
                        ">" => x > y,
                        "=<" => x <= y,
                        ">=" => x >= y,
                        "=:=" => x == y,
                        _ => x != y,
                    };
                    if holds {
                        SldRes::plain(vec![s])
                    } else {
                        SldRes::plain(vec![])
                    }
                }
                _ => SldRes::plain(vec![]),
            }
        }
        _ => {
            // user predicate: try database clauses in order
            if depth == 0 {
                return SldRes {
                    sols: vec![],
                    cut: false,
                    abnormal: Some(Final::BudgetExhausted),
                };
            }
            let mut sols = Vec::new();
            for clause in &prog.clause_db {
                let (_, s2) = s.fresh_many(clause.n_vars);
                let head = shift_vars(&clause.head, s.scope());
                let body = shift_vars(&clause.body, s.scope());
                let su = match s2.unify(&head, &g) {
                    Ok(Some(su)) => su,
                    _ => continue,
                };
                let rb = sld_goal(prog, &body, su, depth - 1);
                sols.extend(rb.sols);
                if let Some(f) = rb.abnormal {
                    return SldRes {
                        sols,
                        cut: false,
                        abnormal: Some(f),
                    };
                }
                if rb.cut {
                    // the cut's scope ends here: remaining clauses pruned
                    break;
                }
            }
            SldRes::plain(sols)
        }
    }
}

fn sld_conj(prog: &Program, conj: &Term, s: Setting, depth: u64) -> SldRes {
    let (a, b) = match conj {
        Term::App(_, args) if args.len() == 2 => (&args[0], &args[1]),
        _ => unreachable!("sld_conj called on non-conjunction"),
    };
    let ra = sld_goal(prog, a, s, depth);
    let mut sols = Vec::new();
    for si in ra.sols {
        let rb = sld_goal(prog, b, si, depth);
        sols.extend(rb.sols);
        if let Some(f) = rb.abnormal {
            return SldRes {
                sols,
                cut: false,
                abnormal: Some(f),
            };
        }
        if rb.cut {
            // backtracking into the cut prunes a's alternatives too
            return SldRes {
                sols,
                cut: true,
                abnormal: None,
            };
        }
    }
    SldRes {
        sols,
        cut: ra.cut,
        abnormal: ra.abnormal,
    }
}

fn sld_ite(
    prog: &Program,
    cond: &Term,
    then: &Term,
    els: Option<&Term>,
    s: Setting,
    depth: u64,
) -> SldRes {
    let rc = sld_goal(prog, cond, s.clone(), depth);
    if let Some(f) = rc.abnormal {
        return SldRes {
            sols: vec![],
            cut: false,
            abnormal: Some(f),
        };
    }
    match rc.sols.into_iter().next() {
        Some(s2) => sld_goal(prog, then, s2, depth),
        None => match els {
            Some(e) => sld_goal(prog, e, s, depth),
            None => SldRes::plain(vec![]),
        },
    }
}

// --- outcome comparison ---

/// Element-wise agreement of a lazy outcome with an eager one, comparing
/// resolved bindings of the given query variables via bisimulation rather
/// than raw binding stores. `BudgetExhausted` matches only itself.
pub fn outcomes_agree(
    lazy: &Outcome,
    eager: &EagerOutcome,
    query_vars: &[VarId],
    limit: usize,
) -> bool {
    let (sols, fin) = lazy.take(limit);
    if sols.len() != eager.sols.len().min(limit) {
        return false;
    }
    for (a, b) in sols.iter().zip(&eager.sols) {
        for v in query_vars {
            let t = Term::Var(*v);
            if !rational_equal(&a.resolve(&t), &b.resolve(&t)) {
                return false;
            }
        }
    }
    match fin {
        None => eager.sols.len() >= limit,
        Some(f) => eager.sols.len() < limit && final_equal(&f, &eager.fin),
    }
}

// --- random program generation ---

/// Deterministic generation parameters. The same seed always produces the
/// same program and queries.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub seed: u64,
    pub max_procs: usize,
    pub max_clauses: usize,
    pub max_body_depth: u32,
}

impl GenConfig {
    pub fn new(seed: u64) -> GenConfig {
        GenConfig {
            seed,
            max_procs: 4,
            max_clauses: 3,
            max_body_depth: 3,
        }
    }
}

const CONSTS: &[&str] = &["a", "b", "c"];

/// Generates Cube source for a small layered program (procedure `i` only
/// calls procedures `j > i`, so every run terminates) together with query
/// goals against it. Returns `(source, queries)`; queries use variables
/// `Q0`/`Q1`.
pub fn gen_program(cfg: &GenConfig) -> (String, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_procs = rng.gen_range(2..=cfg.max_procs);
    let arities: Vec<usize> = (0..n_procs).map(|_| rng.gen_range(1..=2)).collect();

    let mut src = String::new();
    for i in 0..n_procs {
        let n_clauses = rng.gen_range(1..=cfg.max_clauses);
        src.push_str(&format!("g{}\n", i));
        for c in 0..n_clauses {
            src.push_str(if c == 0 { "::  " } else { "..  " });
            let n_vars = rng.gen_range(0..=2usize);
            let head: Vec<String> = (0..arities[i])
                .map(|_| gen_arg(&mut rng, n_vars))
                .collect();
            src.push_str(&head.join(", "));
            let body = gen_body(&mut rng, cfg.max_body_depth, n_vars, i, n_procs, &arities);
            match rng.gen_range(0..3u8) {
                0 => src.push_str(&format!("  <-  {}", body)),
                1 => {
                    let cond = gen_body(&mut rng, 1, n_vars, i, n_procs, &arities);
                    src.push_str(&format!("  <-  {}  <>  {}", cond, body));
                }
                _ => src.push_str(&format!("  <>  {}", body)),
            }
            src.push('\n');
        }
        src.truncate(src.trim_end().len());
        src.push_str(".\n\n");
    }

    let n_queries = rng.gen_range(1..=3);
    let queries = (0..n_queries)
        .map(|_| {
            let p = rng.gen_range(0..n_procs);
            let args: Vec<String> = (0..arities[p])
                .map(|k| {
                    if rng.gen_bool(0.5) {
                        format!("Q{}", k)
                    } else {
                        gen_const(&mut rng)
                    }
                })
                .collect();
            format!("g{}({})", p, args.join(", "))
        })
        .collect();
    (src, queries)
}

/// Generates a program plus `n` standalone goals over the free variables
/// `Q0`/`Q1`, for construct-equivalence testing. Deterministic per seed.
pub fn gen_goals(cfg: &GenConfig, n: usize) -> (String, Vec<String>) {
    let (src, _) = gen_program(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9e37_79b9).wrapping_add(1));
    // recover the procedure shapes deterministically
    let mut probe = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_procs = probe.gen_range(2..=cfg.max_procs);
    let arities: Vec<usize> = (0..n_procs).map(|_| probe.gen_range(1..=2)).collect();
    let goals = (0..n)
        .map(|_| gen_goal(&mut rng, cfg.max_body_depth, n_procs, &arities))
        .collect();
    (src, goals)
}

fn gen_goal(rng: &mut ChaCha8Rng, depth: u32, n_procs: usize, arities: &[usize]) -> String {
    let q = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.5) {
            format!("Q{}", rng.gen_range(0..2))
        } else {
            gen_const(rng)
        }
    };
    if depth == 0 || rng.gen_bool(0.4) {
        return match rng.gen_range(0..5u8) {
            0 => "true".to_string(),
            1 => "fail".to_string(),
            2 => format!("{} = {}", q(rng), q(rng)),
            3 => {
                let j = rng.gen_range(0..n_procs);
                let args: Vec<String> = (0..arities[j]).map(|_| q(rng)).collect();
                format!("g{}({})", j, args.join(", "))
            }
            _ => format!(
                "{} {} {}",
                rng.gen_range(0..=3),
                ["<", ">", "=<", ">="].choose(rng).unwrap(),
                rng.gen_range(0..=3)
            ),
        };
    }
    let a = gen_goal(rng, depth - 1, n_procs, arities);
    let b = gen_goal(rng, depth - 1, n_procs, arities);
    match rng.gen_range(0..4u8) {
        0 => format!("( {}, {} )", a, b),
        1 => format!("( {} ; {} )", a, b),
        2 => format!("( {} until {} )", a, b),
        _ => format!("( {} unless {} )", a, b),
    }
}

fn gen_const(rng: &mut ChaCha8Rng) -> String {
    if rng.gen_bool(0.5) {
        CONSTS.choose(rng).unwrap().to_string()
    } else {
        rng.gen_range(0..=3).to_string()
    }
}

fn gen_arg(rng: &mut ChaCha8Rng, n_vars: usize) -> String {
    if n_vars > 0 && rng.gen_bool(0.4) {
        format!("V{}", rng.gen_range(0..n_vars))
    } else {
        gen_const(rng)
    }
}

fn gen_body(
    rng: &mut ChaCha8Rng,
    depth: u32,
    n_vars: usize,
    proc_idx: usize,
    n_procs: usize,
    arities: &[usize],
) -> String {
    if depth == 0 || rng.gen_bool(0.4) {
        // leaf goal
        return match rng.gen_range(0..6u8) {
            0 => "true".to_string(),
            1 => "fail".to_string(),
            2 => format!("{} = {}", gen_arg(rng, n_vars), gen_arg(rng, n_vars)),
            3 => format!(
                "{} {} {}",
                rng.gen_range(0..=3),
                ["<", ">", "=<", ">="].choose(rng).unwrap(),
                rng.gen_range(0..=3)
            ),
            4 if proc_idx + 1 < n_procs => {
                let j = rng.gen_range(proc_idx + 1..n_procs);
                let args: Vec<String> =
                    (0..arities[j]).map(|_| gen_arg(rng, n_vars)).collect();
                format!("g{}({})", j, args.join(", "))
            }
            _ => format!("{} = {}", gen_arg(rng, n_vars), gen_arg(rng, n_vars)),
        };
    }
    let a = gen_body(rng, depth - 1, n_vars, proc_idx, n_procs, arities);
    let b = gen_body(rng, depth - 1, n_vars, proc_idx, n_procs, arities);
    match rng.gen_range(0..6u8) {
        0 => format!("( {}, {} )", a, b),
        1 => format!("( {} ; {} )", a, b),
        2 => format!("( {} until {} )", a, b),
        3 => format!("( {} unless {} )", a, b),
        4 => {
            let c = gen_body(rng, depth - 1, n_vars, proc_idx, n_procs, arities);
            format!("( {} -> {} -; {} )", a, b, c)
        }
        _ => format!("( {}, {} )", a, b),
    }
}

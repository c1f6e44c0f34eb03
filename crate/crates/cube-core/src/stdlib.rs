//! The standard prelude (derived control constructs and list utilities)
//! and a Prolog interpreter, both written in Cube and loaded at startup.

use crate::engine::{LoadError, Program};
use crate::syntax::{parse_program, ProcedureSrc};

/// Derived control constructs and list utilities.
///
/// `once` keeps only the first solution; `not` is negation as failure;
/// `possible` asks whether a task could succeed without committing to its
/// bindings; `var` holds when its argument could still be bound either of
/// two incompatible ways, i.e. is unbound; `in` is a deterministic
/// membership check; `member` enumerates members; `has_member` checks
/// membership committing to the first match.
pub const PRELUDE: &str = "
once
::  X  <>  X until true.

not
::  X  <>  ( X -> fail -; true ).

possible
::  X  <>  not(not(X)).

var
::  X  <>  possible(X = pa), possible(X = pb).

in
::  X, X._  !
..  X, _.L  <>  X in L.

member
::  X._, X
..  _.L, X  <>  member( L,X ).

has_member
::  X._, X  !
..  _.L, X  <>  has_member( L,X ).
";

/// A Prolog interpreter over the `clause/2` database, recovering the
/// full pruning power of cut without any cut in the interpreter itself.
///
/// `exec(G,R)` may succeed with `R=succ` (a true success) or `R=fail`
/// (backtracking past a cut); the fake success propagates out of the
/// enclosing clause body, where the `unless` condition fires and calls
/// off all pending choices.
pub const PROLOG_META: &str = "
execute
::  G  <>  exec(G,R) unless R=fail.

exec
::  (A,B), R  <>  exec(A,RA), ( RA=fail, R=fail ; exec(B,R) )
..  (A;B), R  <>  exec(A,R) ; exec(B,R)
..  (!),   R  <>  R=succ ; R=fail
..  G,  succ  <-  system(G)
              <>  G
..  G,     R  <>  ( clause(G,B), exec(B,R) ) unless R=fail.
";

pub fn prelude() -> Vec<ProcedureSrc> {
    parse_program(PRELUDE).expect("prelude parses")
}

pub fn prolog_meta() -> Vec<ProcedureSrc> {
    parse_program(PROLOG_META).expect("interpreter parses")
}

/// Loads the prelude and the Prolog interpreter into a program.
pub fn load_stdlib(prog: &mut Program) -> Result<(), LoadError> {
    prog.load(&prelude())?;
    prog.load(&prolog_meta())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{eval, EvalConfig};
    use crate::outcome::Final;
    use crate::setting::Setting;
    use crate::syntax::{parse_prolog, parse_query, print_term};
    use crate::term::Term;
    use std::sync::Arc;

    fn std_program() -> Arc<Program> {
        let mut prog = Program::new();
        load_stdlib(&mut prog).unwrap();
        Arc::new(prog)
    }

    fn run(prog: &Arc<Program>, query: &str, limit: usize) -> (Vec<String>, Option<Final>) {
        let (goal, vt) = parse_query(query).unwrap();
        let o = eval(&goal, &Setting::new(0), prog, &EvalConfig::default());
        let (sols, fin) = o.take(limit);
        let rendered = sols
            .iter()
            .map(|s| {
                vt.names
                    .iter()
                    .map(|(v, n)| format!("{}={}", n, print_term(&Term::Var(*v), s)))
                    .collect::<Vec<_>>()
                    .join(", ")
            })
            .collect();
        (rendered, fin)
    }

    #[test]
    fn stdlib_loads() {
        std_program();
    }

    #[test]
    fn once_keeps_first_solution() {
        let prog = std_program();
        let (sols, fin) = run(&prog, "once(( X=1 ; X=2 ))", 10);
        assert_eq!(sols, vec!["X=1"]);
        assert_eq!(fin, Some(Final::Fail));
    }

    #[test]
    fn negation_as_failure() {
        let prog = std_program();
        assert_eq!(run(&prog, "not(fail)", 10).0.len(), 1);
        assert_eq!(run(&prog, "not(true)", 10).0.len(), 0);
        // possible does not commit to bindings
        let (sols, _) = run(&prog, "possible(X = a)", 10);
        assert_eq!(sols, vec!["X=_G0"]);
    }

    #[test]
    fn var_is_order_sensitive() {
        let prog = std_program();
        assert_eq!(run(&prog, "var(X), X=a", 10).0, vec!["X=a"]);
        assert_eq!(run(&prog, "X=a, var(X)", 10), (vec![], Some(Final::Fail)));
    }

    #[test]
    fn membership_constructs() {
        let prog = std_program();
        let (sols, fin) = run(&prog, "member([1,2,3], X)", 10);
        assert_eq!(sols, vec!["X=1", "X=2", "X=3"]);
        assert_eq!(fin, Some(Final::Fail));
        // committing check: a single solution even with repeats
        assert_eq!(run(&prog, "has_member([1,2,1], 1)", 10).0.len(), 1);
        assert_eq!(run(&prog, "2 in [1,2,2]", 10).0.len(), 1);
        assert_eq!(run(&prog, "4 in [1,2,3]", 10).0.len(), 0);
    }

    #[test]
    fn member_from_partial_list() {
        // member(1.X, Y) where X is already bound to [2]
        let prog = std_program();
        let (sols, fin) = run(&prog, "X=[2], member(1.X, Y)", 10);
        assert_eq!(sols, vec!["X=[2], Y=1", "X=[2], Y=2"]);
        assert_eq!(fin, Some(Final::Fail));
    }

    #[test]
    fn interpreter_honours_cut() {
        let mut prog = Program::new();
        load_stdlib(&mut prog).unwrap();
        prog.load_prolog(&parse_prolog("p(1) :- !. p(2).").unwrap())
            .unwrap();
        let prog = Arc::new(prog);
        let (sols, fin) = run(&prog, "execute(p(X))", 10);
        assert_eq!(sols, vec!["X=1"]);
        assert_eq!(fin, Some(Final::Fail));
    }

    #[test]
    fn interpreter_without_cut_enumerates() {
        let mut prog = Program::new();
        load_stdlib(&mut prog).unwrap();
        prog.load_prolog(&parse_prolog("q(1). q(2). q(3).").unwrap())
            .unwrap();
        let prog = Arc::new(prog);
        let (sols, fin) = run(&prog, "execute(q(X))", 10);
        assert_eq!(sols, vec!["X=1", "X=2", "X=3"]);
        assert_eq!(fin, Some(Final::Fail));
    }

    #[test]
    fn interpreter_cut_in_disjunction_in_conjunction() {
        // Solve until Stop :- Solve, ( Stop, ! ; true ).
        let mut prog = Program::new();
        load_stdlib(&mut prog).unwrap();
        prog.load_prolog(
            &parse_prolog(
                "until(Solve, Stop) :- Solve, ( Stop, ! ; true ).
                 n(1). n(2). n(3). n(4).",
            )
            .unwrap(),
        )
        .unwrap();
        let prog = Arc::new(prog);
        let (sols, fin) = run(&prog, "execute(until(n(X), X = 3))", 10);
        assert_eq!(sols, vec!["X=1", "X=2", "X=3"]);
        assert_eq!(fin, Some(Final::Fail));
    }

    #[test]
    fn interpreter_goal_with_no_clauses_fails() {
        let prog = std_program();
        assert_eq!(run(&prog, "execute(nothing(1))", 10), (vec![], Some(Final::Fail)));
    }

    #[test]
    fn duplicate_removal_program() {
        let mut prog = Program::new();
        load_stdlib(&mut prog).unwrap();
        prog.load(
            &crate::syntax::parse_program(
                "dre
                 ::  X.L,   D  <-  X in L
                               <>  dre( L, D )
                 ..  X.L, X.D  <>  dre( L, D )
                 ..  [],   []  !.",
            )
            .unwrap(),
        )
        .unwrap();
        let prog = Arc::new(prog);
        let (sols, fin) = run(&prog, "dre([1,2,1,3,2], D)", 10);
        assert_eq!(sols, vec!["D=[1,3,2]"]);
        assert_eq!(fin, Some(Final::Fail));
    }
}

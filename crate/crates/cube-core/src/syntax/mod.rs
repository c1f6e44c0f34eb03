//! Concrete syntax: reading Cube programs and queries, reading Prolog
//! clause databases, and printing terms and solutions (including cyclic
//! bindings in μ-notation).

mod lexer;
mod parser;
mod printer;

use thiserror::Error;

use crate::term::{Name, Term, VarId};

pub use lexer::Pos;
pub use parser::{
    parse_clause, parse_program, parse_prolog, parse_query, parse_term, VarTable,
};
pub use printer::{print_rational, print_term, print_term_named};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at {line}:{col}: {msg}")]
pub struct SyntaxError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

impl SyntaxError {
    fn new(pos: Pos, msg: &str) -> SyntaxError {
        SyntaxError {
            line: pos.line,
            col: pos.col,
            msg: msg.to_string(),
        }
    }
}

/// One source clause: head arguments plus an inclusive body or an
/// exclusive condition/body pair. `locals` lists every VarId occurring in
/// the clause, in first-occurrence order.
#[derive(Debug, Clone, PartialEq)]
pub struct ClauseSrc {
    pub head_args: Vec<Term>,
    pub kind: ClauseKind,
    pub locals: Vec<VarId>,
    pub var_names: Vec<(VarId, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClauseKind {
    Inclusive(Term),
    Exclusive(Term, Term),
}

/// All clauses grouped under one procedure name, in textual order.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcedureSrc {
    pub name: Name,
    pub clauses: Vec<ClauseSrc>,
}

/// A clause for the Prolog database: `head :- body`, body defaulting to
/// `true`. Clause variables are numbered 0..n_vars.
#[derive(Debug, Clone, PartialEq)]
pub struct PrologClause {
    pub head: Term,
    pub body: Term,
    pub n_vars: u64,
}

impl ClauseSrc {
    /// Structural equality ignoring variable identities (clauses parsed
    /// from different sources may number their variables differently).
    pub fn same_shape(&self, other: &ClauseSrc) -> bool {
        fn terms_eq(a: &[Term], b: &[Term], map: &mut Vec<(VarId, VarId)>) -> bool {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| term_eq(x, y, map))
        }
        fn term_eq(a: &Term, b: &Term, map: &mut Vec<(VarId, VarId)>) -> bool {
            match (a, b) {
                (Term::Null, Term::Null) => true,
                (Term::Var(x), Term::Var(y)) => {
                    for (mx, my) in map.iter() {
                        if mx == x || my == y {
                            return mx == x && my == y;
                        }
                    }
                    map.push((*x, *y));
                    true
                }
                (Term::Pair(a1, a2), Term::Pair(b1, b2)) => {
                    term_eq(a1, b1, map) && term_eq(a2, b2, map)
                }
                (Term::App(n1, as1), Term::App(n2, as2)) => {
                    n1 == n2 && terms_eq(as1, as2, map)
                }
                _ => false,
            }
        }
        let mut map = Vec::new();
        if !terms_eq(&self.head_args, &other.head_args, &mut map) {
            return false;
        }
        match (&self.kind, &other.kind) {
            (ClauseKind::Inclusive(a), ClauseKind::Inclusive(b)) => term_eq(a, b, &mut map),
            (ClauseKind::Exclusive(c1, b1), ClauseKind::Exclusive(c2, b2)) => {
                term_eq(c1, c2, &mut map) && term_eq(b1, b2, &mut map)
            }
            _ => false,
        }
    }
}

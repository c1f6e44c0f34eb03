//! Operator-precedence parser for Cube terms, Cube programs (grouped and
//! standalone clause forms) and Prolog clause databases.

use std::collections::HashMap;

use crate::term::{Name, Term, VarId};

use super::lexer::{Lexer, Pos, Sp, Tok};
use super::{ClauseKind, ClauseSrc, ProcedureSrc, PrologClause, SyntaxError};

/// Operator table. Lower priority binds tighter; `until`/`unless` bind
/// just tighter than the comma, so `a, b until s` groups as
/// `a, (b until s)`.
#[derive(Clone, Copy, PartialEq)]
enum Assoc {
    Xfx,
    Xfy,
    Yfx,
}

fn infix_op(name: &str) -> Option<(u32, Assoc)> {
    Some(match name {
        ";" | "-;" => (1100, Assoc::Xfy),
        "->" => (1050, Assoc::Xfy),
        "," => (1000, Assoc::Xfy),
        "until" | "unless" => (990, Assoc::Xfx),
        "=" | "is" | "in" | "<" | ">" | "=<" | ">=" | "=:=" | "=\\=" => (700, Assoc::Xfx),
        "+" | "-" => (500, Assoc::Yfx),
        "*" | "//" | "mod" => (400, Assoc::Yfx),
        "." => (350, Assoc::Xfy),
        _ => return None,
    })
}

pub(super) const ARG_PREC: u32 = 999;
pub(super) const TOP_PREC: u32 = 1200;

/// Per-clause variable naming: each named variable gets one VarId in
/// first-occurrence order; every `_` is a distinct fresh VarId.
#[derive(Default)]
pub struct VarTable {
    by_name: HashMap<String, VarId>,
    pub order: Vec<VarId>,
    pub names: Vec<(VarId, String)>,
    next: u64,
}

impl VarTable {
    fn get(&mut self, name: &str) -> VarId {
        if name == "_" {
            let v = VarId(self.next);
            self.next += 1;
            self.order.push(v);
            return v;
        }
        if let Some(&v) = self.by_name.get(name) {
            return v;
        }
        let v = VarId(self.next);
        self.next += 1;
        self.by_name.insert(name.to_string(), v);
        self.order.push(v);
        self.names.push((v, name.to_string()));
        v
    }

    pub fn len(&self) -> u64 {
        self.next
    }

    pub fn is_empty(&self) -> bool {
        self.next == 0
    }
}

pub struct Parser {
    toks: Vec<Sp>,
    i: usize,
    vars: VarTable,
}

impl Parser {
    pub fn new(text: &str) -> Result<Parser, SyntaxError> {
        Ok(Parser {
            toks: Lexer::new(text).tokenize()?,
            i: 0,
            vars: VarTable::default(),
        })
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn at_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), SyntaxError> {
        if self.at_punct(p) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", p)))
        }
    }

    fn expect_clause_end(&mut self) -> Result<(), SyntaxError> {
        if matches!(self.peek(), Tok::ClauseEnd) {
            self.bump();
            Ok(())
        } else {
            Err(self.err("expected `.` at end of clause"))
        }
    }

    fn err(&self, msg: &str) -> SyntaxError {
        SyntaxError::new(self.pos(), &format!("{}, found {:?}", msg, self.peek()))
    }

    fn take_vars(&mut self) -> VarTable {
        std::mem::take(&mut self.vars)
    }

    // --- terms ---

    fn primary(&mut self) -> Result<Term, SyntaxError> {
        match self.bump() {
            Tok::Int(i) => Ok(Term::App(Name::Int(i), vec![])),
            Tok::Var(name) => Ok(Term::Var(self.vars.get(&name))),
            Tok::Atom(name) => {
                if self.at_punct("(") {
                    self.bump();
                    let args = self.arg_list()?;
                    self.expect_punct(")")?;
                    Ok(Term::App(Name::atom(&name), args))
                } else {
                    Ok(Term::App(Name::atom(&name), vec![]))
                }
            }
            Tok::Punct("(") => {
                let t = self.expr(TOP_PREC)?;
                self.expect_punct(")")?;
                Ok(t)
            }
            Tok::Punct("[") => {
                if self.at_punct("]") {
                    self.bump();
                    return Ok(Term::Null);
                }
                let mut items = vec![self.expr(ARG_PREC)?];
                while self.at_punct(",") {
                    self.bump();
                    items.push(self.expr(ARG_PREC)?);
                }
                let tail = if self.at_punct("|") {
                    self.bump();
                    self.expr(ARG_PREC)?
                } else {
                    Term::Null
                };
                self.expect_punct("]")?;
                Ok(items
                    .into_iter()
                    .rev()
                    .fold(tail, |acc, t| Term::pair(t, acc)))
            }
            Tok::Punct("!") => Ok(Term::atom("!")),
            Tok::Punct("-") => {
                // negative integer literal
                match self.peek() {
                    Tok::Int(_) => {
                        if let Tok::Int(i) = self.bump() {
                            Ok(Term::App(Name::Int(-i), vec![]))
                        } else {
                            unreachable!()
                        }
                    }
                    _ => Err(self.err("expected integer after `-`")),
                }
            }
            other => Err(SyntaxError::new(
                self.toks[self.i.saturating_sub(1)].pos,
                &format!("expected a term, found {:?}", other),
            )),
        }
    }

    fn arg_list(&mut self) -> Result<Vec<Term>, SyntaxError> {
        let mut args = vec![self.expr(ARG_PREC)?];
        while self.at_punct(",") {
            self.bump();
            args.push(self.expr(ARG_PREC)?);
        }
        Ok(args)
    }

    fn peek_infix(&self) -> Option<(&'static str, u32, Assoc)> {
        let name: &str = match self.peek() {
            Tok::Punct(p) => p,
            Tok::Atom(a) => a.as_str(),
            _ => return None,
        };
        let (prec, assoc) = infix_op(name)?;
        // reuse the static str for punct; atoms are the alphabetic operators
        let stat: &'static str = match name {
            ";" => ";",
            "-;" => "-;",
            "->" => "->",
            "," => ",",
            "until" => "until",
            "unless" => "unless",
            "=" => "=",
            "is" => "is",
            "in" => "in",
            "<" => "<",
            ">" => ">",
            "=<" => "=<",
            ">=" => ">=",
            "=:=" => "=:=",
            "=\\=" => "=\\=",
            "+" => "+",
            "-" => "-",
            "*" => "*",
            "//" => "//",
            "mod" => "mod",
            "." => ".",
            _ => return None,
        };
        Some((stat, prec, assoc))
    }

    pub(super) fn expr(&mut self, max_prec: u32) -> Result<Term, SyntaxError> {
        let mut left = self.primary()?;
        let mut left_prec = 0u32;
        while let Some((op, prec, assoc)) = self.peek_infix() {
            if prec > max_prec {
                break;
            }
            let left_max = match assoc {
                Assoc::Yfx => prec,
                _ => prec - 1,
            };
            if left_prec > left_max {
                break;
            }
            self.bump();
            let right_max = match assoc {
                Assoc::Xfy => prec,
                _ => prec - 1,
            };
            let right = self.expr(right_max)?;
            left = match op {
                "," | "." => Term::pair(left, right),
                _ => Term::App(Name::atom(op), vec![left, right]),
            };
            left_prec = prec;
        }
        Ok(left)
    }

    // --- clauses and programs ---

    /// A clause in grouped form: `args [<- C] [<> B] [!]`, with the sugar
    /// `args` ≡ `args <- true`, trailing `!` ≡ `<- true <> true`, and
    /// `args <> B` ≡ `args <- true <> B`.
    fn clause_from_args(&mut self, head_args: Vec<Term>) -> Result<ClauseSrc, SyntaxError> {
        let mut cond: Option<Term> = None;
        let mut body: Option<Term> = None;
        let mut bang = false;
        if self.at_punct("<-") {
            self.bump();
            cond = Some(self.expr(TOP_PREC)?);
        }
        if self.at_punct("<>") {
            self.bump();
            body = Some(self.expr(TOP_PREC)?);
        } else if self.at_punct("!") {
            self.bump();
            bang = true;
        }
        let kind = match (cond, body, bang) {
            (None, None, false) => ClauseKind::Inclusive(Term::truth()),
            (Some(b), None, false) => ClauseKind::Inclusive(b),
            (None, None, true) => ClauseKind::Exclusive(Term::truth(), Term::truth()),
            (None, Some(b), false) => ClauseKind::Exclusive(Term::truth(), b),
            (Some(c), Some(b), false) => ClauseKind::Exclusive(c, b),
            (Some(_), None, true) => {
                return Err(self.err("a conditional clause cannot end in `!`"))
            }
            (_, Some(_), true) => return Err(self.err("unexpected `!` after clause body")),
        };
        let vars = self.take_vars();
        Ok(ClauseSrc {
            head_args,
            kind,
            locals: vars.order,
            var_names: vars.names,
        })
    }

    fn grouped_clause(&mut self) -> Result<ClauseSrc, SyntaxError> {
        let args = self.arg_list()?;
        self.clause_from_args(args)
    }

    /// Parses one bare clause of the form `args <- C <> B` (with sugar),
    /// ending at `.`. Used directly by clause-translation tests.
    pub fn parse_clause(text: &str) -> Result<ClauseSrc, SyntaxError> {
        let mut p = Parser::new(text)?;
        let c = p.grouped_clause()?;
        p.expect_clause_end()?;
        p.expect_eof()?;
        Ok(c)
    }

    fn expect_eof(&mut self) -> Result<(), SyntaxError> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            Err(self.err("expected end of input"))
        }
    }

    pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
        Ok(Self::parse_query(text)?.0)
    }

    /// Parses a single term, also returning its variable-name table.
    pub fn parse_query(text: &str) -> Result<(Term, VarTable), SyntaxError> {
        let mut p = Parser::new(text)?;
        let t = p.expr(TOP_PREC)?;
        if matches!(p.peek(), Tok::ClauseEnd) {
            p.bump();
        }
        p.expect_eof()?;
        Ok((t, p.take_vars()))
    }

    pub fn parse_program(text: &str) -> Result<Vec<ProcedureSrc>, SyntaxError> {
        let mut p = Parser::new(text)?;
        let mut procs: Vec<ProcedureSrc> = Vec::new();
        // whether the last pushed procedure came from standalone clauses and
        // may still absorb textually adjacent ones
        let mut open_standalone = false;
        while !matches!(p.peek(), Tok::Eof) {
            // grouped form: name :: clause .. clause ... .
            if matches!(p.peek(), Tok::Atom(_))
                && matches!(p.toks.get(p.i + 1).map(|s| &s.tok), Some(Tok::Punct("::")))
            {
                let name = match p.bump() {
                    Tok::Atom(a) => Name::atom(&a),
                    _ => unreachable!(),
                };
                p.bump(); // ::
                let mut clauses = vec![p.grouped_clause()?];
                while p.at_punct("..") {
                    p.bump();
                    clauses.push(p.grouped_clause()?);
                }
                p.expect_clause_end()?;
                push_proc(&mut procs, name, clauses, p.pos())?;
                open_standalone = false;
                continue;
            }
            // standalone clause: head [<- C] [<> B] [!] .
            let head = p.expr(ARG_PREC)?;
            let (name, args) = match &head {
                Term::App(n, args) => (n.clone(), args.clone()),
                _ => {
                    return Err(SyntaxError::new(
                        p.pos(),
                        "clause head must be an application term",
                    ))
                }
            };
            let clause = p.clause_from_args(args)?;
            p.expect_clause_end()?;
            // textual adjacency groups standalone clauses under one name
            match procs.last_mut() {
                Some(last) if open_standalone && last.name == name => {
                    last.clauses.push(clause);
                }
                _ => {
                    push_proc(&mut procs, name, vec![clause], p.pos())?;
                    open_standalone = true;
                }
            }
        }
        Ok(procs)
    }

    pub fn parse_prolog(text: &str) -> Result<Vec<PrologClause>, SyntaxError> {
        let mut p = Parser::new(text)?;
        let mut out = Vec::new();
        while !matches!(p.peek(), Tok::Eof) {
            let head = p.expr(ARG_PREC)?;
            if !matches!(head, Term::App(..)) {
                return Err(SyntaxError::new(p.pos(), "clause head must be an application"));
            }
            let body = if p.at_punct(":-") {
                p.bump();
                p.expr(TOP_PREC)?
            } else {
                Term::truth()
            };
            p.expect_clause_end()?;
            let vars = p.take_vars();
            out.push(PrologClause {
                head,
                body,
                n_vars: vars.len(),
            });
        }
        Ok(out)
    }
}

fn push_proc(
    procs: &mut Vec<ProcedureSrc>,
    name: Name,
    clauses: Vec<ClauseSrc>,
    pos: Pos,
) -> Result<(), SyntaxError> {
    if procs.iter().any(|p| p.name == name) {
        return Err(SyntaxError::new(
            pos,
            &format!("procedure `{}` defined in two non-adjacent groups", name),
        ));
    }
    procs.push(ProcedureSrc { name, clauses });
    Ok(())
}

/// Parse helpers re-exported at module level.
pub fn parse_term(text: &str) -> Result<Term, SyntaxError> {
    Parser::parse_term(text)
}

pub fn parse_query(text: &str) -> Result<(Term, VarTable), SyntaxError> {
    Parser::parse_query(text)
}

pub fn parse_clause(text: &str) -> Result<ClauseSrc, SyntaxError> {
    Parser::parse_clause(text)
}

pub fn parse_program(text: &str) -> Result<Vec<ProcedureSrc>, SyntaxError> {
    Parser::parse_program(text)
}

pub fn parse_prolog(text: &str) -> Result<Vec<PrologClause>, SyntaxError> {
    Parser::parse_prolog(text)
}

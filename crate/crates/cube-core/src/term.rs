//! Core term representation: variables, pairs, applications and abstractions,
//! with free-variable computation, capture-avoiding substitution and
//! β-application.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

/// A variable. Variables are naturals; source-level names live in a side
/// table owned by the parser and are used for printing only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u64);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_G{}", self.0)
    }
}

/// A constant name: an atom (lowercase identifier, quoted atom or operator
/// symbol) or an integer literal carrying its numeric value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Name {
    Atom(Arc<str>),
    Int(BigInt),
}

impl Name {
    pub fn atom(s: &str) -> Name {
        Name::Atom(Arc::from(s))
    }

    pub fn int(i: impl Into<BigInt>) -> Name {
        Name::Int(i.into())
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Name::Atom(s) => Some(s),
            Name::Int(_) => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Name::Int(i) => Some(i),
            Name::Atom(_) => None,
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Name::Atom(s) => write!(f, "{}", s),
            Name::Int(i) => write!(f, "{}", i),
        }
    }
}

/// Abstract syntax of terms. The null together with pairs provides lists;
/// an application is a constant applied to a proper argument list; an
/// abstraction scopes one variable.
///
/// Terms built by the parser contain no `Abs` nodes; those are produced
/// only by clause translation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Null,
    Var(VarId),
    Pair(Arc<Term>, Arc<Term>),
    App(Name, Vec<Term>),
    Abs(VarId, Arc<Term>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("not an abstraction: {0}")]
    NotAnAbstraction(String),
}

impl Term {
    pub fn atom(s: &str) -> Term {
        Term::App(Name::atom(s), Vec::new())
    }

    pub fn int(i: impl Into<BigInt>) -> Term {
        Term::App(Name::int(i), Vec::new())
    }

    pub fn var(id: u64) -> Term {
        Term::Var(VarId(id))
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(Name::atom(name), args)
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Arc::new(a), Arc::new(b))
    }

    pub fn abs(v: VarId, body: Term) -> Term {
        Term::Abs(v, Arc::new(body))
    }

    /// Builds the null-terminated list `[t1,...,tn]`.
    pub fn list(items: Vec<Term>) -> Term {
        items
            .into_iter()
            .rev()
            .fold(Term::Null, |acc, t| Term::pair(t, acc))
    }

    /// The concrete-syntax `true`, equated to the abstract null.
    pub fn truth() -> Term {
        Term::atom("true")
    }

    pub fn is_truth(&self) -> bool {
        matches!(self, Term::Null) || matches!(self, Term::App(Name::Atom(a), args) if args.is_empty() && &**a == "true")
    }

    /// The root constant of an application, if any.
    pub fn root(&self) -> Option<(&Name, usize)> {
        match self {
            Term::App(n, args) => Some((n, args.len())),
            _ => None,
        }
    }
}

/// The free variables of a term; an abstraction removes its bound variable.
pub fn free_vars(t: &Term) -> BTreeSet<VarId> {
    fn go(t: &Term, acc: &mut BTreeSet<VarId>, bound: &mut Vec<VarId>) {
        match t {
            Term::Null => {}
            Term::Var(v) => {
                if !bound.contains(v) {
                    acc.insert(*v);
                }
            }
            Term::Pair(a, b) => {
                go(a, acc, bound);
                go(b, acc, bound);
            }
            Term::App(_, args) => {
                for a in args {
                    go(a, acc, bound);
                }
            }
            Term::Abs(v, body) => {
                bound.push(*v);
                go(body, acc, bound);
                bound.pop();
            }
        }
    }
    let mut acc = BTreeSet::new();
    go(t, &mut acc, &mut Vec::new());
    acc
}

/// The largest VarId occurring anywhere in `t` (free or bound), if any.
pub fn max_var(t: &Term) -> Option<VarId> {
    match t {
        Term::Null => None,
        Term::Var(v) => Some(*v),
        Term::Pair(a, b) => max_var(a).max(max_var(b)),
        Term::App(_, args) => args.iter().filter_map(max_var).max(),
        Term::Abs(v, body) => Some(*v).max(max_var(body)),
    }
}

/// Replaces every free occurrence of `v` in `t` by `r`. Bound occurrences
/// are untouched; bound variables that would capture free variables of `r`
/// are renamed to fresh VarIds.
pub fn subst_free(t: &Term, v: VarId, r: &Term) -> Term {
    let mut fresh = max_var(t)
        .max(max_var(r))
        .map(|VarId(n)| n + 1)
        .unwrap_or(0);
    let r_free = free_vars(r);
    go(t, v, r, &r_free, &mut fresh)
}

fn go(t: &Term, v: VarId, r: &Term, r_free: &BTreeSet<VarId>, fresh: &mut u64) -> Term {
    match t {
        Term::Null => Term::Null,
        Term::Var(w) => {
            if *w == v {
                r.clone()
            } else {
                t.clone()
            }
        }
        Term::Pair(a, b) => Term::pair(go(a, v, r, r_free, fresh), go(b, v, r, r_free, fresh)),
        Term::App(n, args) => Term::App(
            n.clone(),
            args.iter().map(|a| go(a, v, r, r_free, fresh)).collect(),
        ),
        Term::Abs(w, body) => {
            if *w == v {
                t.clone()
            } else if r_free.contains(w) && free_vars(body).contains(&v) {
                // renaming w avoids capturing a free variable of r
                let w2 = VarId(*fresh);
                *fresh += 1;
                let renamed = go(body, *w, &Term::Var(w2), &BTreeSet::new(), fresh);
                Term::abs(w2, go(&renamed, v, r, r_free, fresh))
            } else {
                Term::abs(*w, go(body, v, r, r_free, fresh))
            }
        }
    }
}

/// β-application: `f` must be an abstraction; its bound variable is
/// replaced by `a` in the body.
pub fn beta_apply(f: &Term, a: &Term) -> Result<Term, TermError> {
    match f {
        Term::Abs(v, body) => Ok(subst_free(body, *v, a)),
        other => Err(TermError::NotAnAbstraction(format!("{:?}", other))),
    }
}

/// α-equivalence: structural equality up to renaming of bound variables.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, env: &mut Vec<(VarId, VarId)>) -> bool {
        match (a, b) {
            (Term::Null, Term::Null) => true,
            (Term::Var(x), Term::Var(y)) => {
                for (bx, by) in env.iter().rev() {
                    if bx == x || by == y {
                        return bx == x && by == y;
                    }
                }
                x == y
            }
            (Term::Pair(a1, a2), Term::Pair(b1, b2)) => go(a1, b1, env) && go(a2, b2, env),
            (Term::App(n1, as1), Term::App(n2, as2)) => {
                n1 == n2
                    && as1.len() == as2.len()
                    && as1.iter().zip(as2).all(|(x, y)| {
                        let mut e = env.clone();
                        go(x, y, &mut e)
                    })
            }
            (Term::Abs(x, t1), Term::Abs(y, t2)) => {
                env.push((*x, *y));
                let r = go(t1, t2, env);
                env.pop();
                r
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new())
}

//! Settings: a variable scope plus a binding store representing a
//! solved-form substitution over rational trees. Unification runs without
//! occurs-check; cyclic bindings are first-class and compared by
//! bisimulation.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::term::{Name, Term, VarId};

/// A variable scope `{0..n-1}` plus a persistent triangular binding map.
/// Bindings may reference other bound variables; the solved form is
/// recovered through [`Setting::resolve`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Setting {
    scope: u64,
    bindings: im::HashMap<VarId, Term>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnifyError {
    #[error("abstraction term encountered in unification")]
    AbstractionInUnification,
}

/// A finite rooted graph view of a term where cycles through bindings are
/// permitted. Equality is bisimulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalTerm {
    pub nodes: Vec<RatNode>,
    pub root: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RatNode {
    Null,
    Var(VarId),
    Pair(usize, usize),
    App(Name, Vec<usize>),
    /// Abstractions can reach resolution through metacalled bindings of
    /// closed definitions; they resolve opaquely (body untouched).
    Abs(VarId, Term),
}

impl Setting {
    pub fn new(scope: u64) -> Setting {
        Setting {
            scope,
            bindings: im::HashMap::new(),
        }
    }

    pub fn scope(&self) -> u64 {
        self.scope
    }

    pub fn lookup(&self, v: VarId) -> Option<&Term> {
        self.bindings.get(&v)
    }

    pub fn bound_vars(&self) -> impl Iterator<Item = VarId> + '_ {
        self.bindings.keys().copied()
    }

    /// Allocates the next variable: returns VarId `n` and the setting with
    /// scope `n+1`, bindings unchanged.
    pub fn fresh(&self) -> (VarId, Setting) {
        let v = VarId(self.scope);
        (
            v,
            Setting {
                scope: self.scope + 1,
                bindings: self.bindings.clone(),
            },
        )
    }

    /// Allocates `n` consecutive fresh variables.
    pub fn fresh_many(&self, n: u64) -> (Vec<VarId>, Setting) {
        let vs = (self.scope..self.scope + n).map(VarId).collect();
        (
            vs,
            Setting {
                scope: self.scope + n,
                bindings: self.bindings.clone(),
            },
        )
    }

    /// Grows the scope to cover at least `n` variables.
    pub fn cover(&self, n: u64) -> Setting {
        Setting {
            scope: self.scope.max(n),
            bindings: self.bindings.clone(),
        }
    }

    fn bind(&self, v: VarId, t: Term) -> Setting {
        Setting {
            scope: self.scope,
            bindings: self.bindings.update(v, t),
        }
    }

    /// Follows variable-to-variable binding chains. Stops at an unbound
    /// variable or the first non-variable term, returning the last variable
    /// traversed (if any) together with the final term.
    fn walk<'a>(&'a self, t: &'a Term) -> (Option<VarId>, &'a Term) {
        let mut last = None;
        let mut cur = t;
        while let Term::Var(v) = cur {
            match self.bindings.get(v) {
                Some(next) => {
                    last = Some(*v);
                    cur = next;
                }
                None => return (last, cur),
            }
        }
        (last, cur)
    }

    /// One-step dereference: follows variable bindings to an unbound
    /// variable or the first non-variable term.
    pub fn shallow_resolve(&self, t: &Term) -> Term {
        self.walk(t).1.clone()
    }

    /// Unification without occurs-check: `X = f(X)` succeeds with a cyclic
    /// binding. On success the result has the same scope, entails `self`,
    /// and resolves both terms to bisimilar rational trees. Free-variable
    /// pairs bind the larger to the smaller. Unification of already-cyclic
    /// terms terminates via visited-pair memoization.
    pub fn unify(&self, a: &Term, b: &Term) -> Result<Option<Setting>, UnifyError> {
        let mut s = self.clone();
        let mut visited = HashSet::new();
        if unify_rec(&mut s, a, b, &mut visited)? {
            Ok(Some(s))
        } else {
            Ok(None)
        }
    }

    /// Replaces bound variables by their bindings transitively, producing
    /// the (possibly cyclic) graph form. Unbound variables remain leaves.
    pub fn resolve(&self, t: &Term) -> RationalTerm {
        let mut nodes = Vec::new();
        let mut memo: HashMap<VarId, usize> = HashMap::new();
        let root = self.resolve_rec(t, &mut nodes, &mut memo);
        RationalTerm { nodes, root }
    }

    fn resolve_rec(
        &self,
        t: &Term,
        nodes: &mut Vec<RatNode>,
        memo: &mut HashMap<VarId, usize>,
    ) -> usize {
        let (last, cur) = self.walk(t);
        if let Some(v) = last {
            if let Some(&idx) = memo.get(&v) {
                return idx;
            }
            if !matches!(cur, Term::Var(_)) {
                let idx = nodes.len();
                nodes.push(RatNode::Null); // placeholder, patched below
                // every var on the chain reaches the same node
                memo.insert(v, idx);
                let node = self.resolve_node(cur, nodes, memo);
                nodes[idx] = node;
                return idx;
            }
        }
        let idx = nodes.len();
        nodes.push(RatNode::Null);
        let node = self.resolve_node(cur, nodes, memo);
        nodes[idx] = node;
        idx
    }

    fn resolve_node(
        &self,
        t: &Term,
        nodes: &mut Vec<RatNode>,
        memo: &mut HashMap<VarId, usize>,
    ) -> RatNode {
        match t {
            Term::Null => RatNode::Null,
            Term::Var(v) => RatNode::Var(*v), // unbound
            Term::Pair(x, y) => {
                let xi = self.resolve_rec(x, nodes, memo);
                let yi = self.resolve_rec(y, nodes, memo);
                RatNode::Pair(xi, yi)
            }
            Term::App(n, args) => {
                let idxs = args
                    .iter()
                    .map(|a| self.resolve_rec(a, nodes, memo))
                    .collect();
                RatNode::App(n.clone(), idxs)
            }
            Term::Abs(v, body) => RatNode::Abs(*v, (**body).clone()),
        }
    }

    /// `self` entails `s` when its scope covers `s` and applying `self` to
    /// each binding of `s` reproduces `self`'s view of the variable.
    pub fn entails(&self, s: &Setting) -> bool {
        if self.scope < s.scope {
            return false;
        }
        s.bindings.iter().all(|(v, t)| {
            rational_equal(&self.resolve(t), &self.resolve(&Term::Var(*v)))
        })
    }

    /// Rebuilds a rational term inside this setting: acyclic parts become
    /// plain terms, cyclic nodes become fresh variables bound to their
    /// structure. Returns the extended setting and a term resolving to
    /// the given graph.
    pub fn import_rational(&self, rt: &RationalTerm) -> (Setting, Term) {
        // nodes reachable from themselves need a variable to close the cycle
        let n = rt.nodes.len();
        let mut cyclic = vec![false; n];
        for i in 0..n {
            if reaches(rt, i, i) {
                cyclic[i] = true;
            }
        }
        let mut s = self.clone();
        let mut var_of: HashMap<usize, VarId> = HashMap::new();
        for (i, c) in cyclic.iter().enumerate() {
            if *c {
                let (v, s2) = s.fresh();
                s = s2;
                var_of.insert(i, v);
            }
        }
        fn build(
            rt: &RationalTerm,
            i: usize,
            var_of: &HashMap<usize, VarId>,
            under: &mut Vec<usize>,
        ) -> Term {
            if under.contains(&i) {
                return Term::Var(var_of[&i]);
            }
            let guarded = var_of.contains_key(&i);
            if guarded {
                under.push(i);
            }
            let t = match &rt.nodes[i] {
                RatNode::Null => Term::Null,
                RatNode::Var(v) => Term::Var(*v),
                RatNode::Pair(a, b) => Term::pair(
                    build(rt, *a, var_of, under),
                    build(rt, *b, var_of, under),
                ),
                RatNode::App(n, args) => Term::App(
                    n.clone(),
                    args.iter().map(|a| build(rt, *a, var_of, under)).collect(),
                ),
                RatNode::Abs(v, body) => Term::Abs(*v, Arc::new(body.clone())),
            };
            if guarded {
                under.pop();
            }
            t
        }
        let mut under = Vec::new();
        let t = build(rt, rt.root, &var_of, &mut under);
        // bind each cycle variable to its structure
        for (&i, &v) in &var_of {
            let mut u = vec![];
            // expand one level so the binding is not just Var(v) itself
            let body = match &rt.nodes[i] {
                RatNode::Pair(a, b) => {
                    u.push(i);
                    Term::pair(build(rt, *a, &var_of, &mut u), build(rt, *b, &var_of, &mut u))
                }
                RatNode::App(n, args) => {
                    u.push(i);
                    Term::App(
                        n.clone(),
                        args.iter().map(|a| build(rt, *a, &var_of, &mut u)).collect(),
                    )
                }
                other => match other {
                    RatNode::Null => Term::Null,
                    RatNode::Var(w) => Term::Var(*w),
                    RatNode::Abs(w, b) => Term::Abs(*w, Arc::new(b.clone())),
                    _ => unreachable!(),
                },
            };
            s = s.bind(v, body);
        }
        (s, t)
    }
}

fn reaches(rt: &RationalTerm, from: usize, target: usize) -> bool {
    // is target reachable from a strict child of `from`?
    let mut seen = HashSet::new();
    let mut stack: Vec<usize> = children(&rt.nodes[from]);
    while let Some(i) = stack.pop() {
        if i == target {
            return true;
        }
        if seen.insert(i) {
            stack.extend(children(&rt.nodes[i]));
        }
    }
    false
}

fn children(n: &RatNode) -> Vec<usize> {
    match n {
        RatNode::Null | RatNode::Var(_) | RatNode::Abs(..) => vec![],
        RatNode::Pair(a, b) => vec![*a, *b],
        RatNode::App(_, args) => args.clone(),
    }
}

// The unification memo records pairs of entry variables: the last bound
// variable walked through on each side before reaching a structure. Any
// cycle in a setting passes through a bound variable, and descent with an
// unwalked side strictly shrinks that side's finite term, so memoizing
// only both-walked pairs is enough for termination.

fn unify_rec(
    s: &mut Setting,
    a: &Term,
    b: &Term,
    visited: &mut HashSet<(VarId, VarId)>,
) -> Result<bool, UnifyError> {
    let (la, ta) = {
        let (l, t) = s.walk(a);
        (l, t.clone())
    };
    let (lb, tb) = {
        let (l, t) = s.walk(b);
        (l, t.clone())
    };
    match (&ta, &tb) {
        (Term::Abs(..), _) | (_, Term::Abs(..)) => Err(UnifyError::AbstractionInUnification),
        (Term::Var(x), Term::Var(y)) => {
            // both unbound
            if x == y {
                return Ok(true);
            }
            // bind the larger to the smaller
            let (hi, lo) = if x > y { (*x, *y) } else { (*y, *x) };
            *s = s.bind(hi, Term::Var(lo));
            Ok(true)
        }
        (Term::Var(x), _) => {
            let target = match lb {
                Some(w) if w < *x => Term::Var(w),
                _ => tb.clone(),
            };
            *s = s.bind(*x, target);
            Ok(true)
        }
        (_, Term::Var(y)) => {
            let target = match la {
                Some(w) if w < *y => Term::Var(w),
                _ => ta.clone(),
            };
            *s = s.bind(*y, target);
            Ok(true)
        }
        _ => {
            if let (Some(x), Some(y)) = (la, lb) {
                if !visited.insert((x, y)) {
                    return Ok(true);
                }
            }
            match (&ta, &tb) {
                (Term::Null, Term::Null) => Ok(true),
                (Term::Pair(a1, a2), Term::Pair(b1, b2)) => {
                    Ok(unify_rec(s, a1, b1, visited)? && unify_rec(s, a2, b2, visited)?)
                }
                (Term::App(n1, as1), Term::App(n2, as2)) => {
                    if n1 != n2 || as1.len() != as2.len() {
                        return Ok(false);
                    }
                    for (x, y) in as1.iter().zip(as2) {
                        if !unify_rec(s, x, y, visited)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                }
                _ => Ok(false),
            }
        }
    }
}

/// Bisimulation equality of rational terms (pair-memoized graph comparison).
pub fn rational_equal(a: &RationalTerm, b: &RationalTerm) -> bool {
    fn go(
        a: &RationalTerm,
        b: &RationalTerm,
        i: usize,
        j: usize,
        memo: &mut HashSet<(usize, usize)>,
    ) -> bool {
        if !memo.insert((i, j)) {
            return true;
        }
        match (&a.nodes[i], &b.nodes[j]) {
            (RatNode::Null, RatNode::Null) => true,
            (RatNode::Var(x), RatNode::Var(y)) => x == y,
            (RatNode::Pair(a1, a2), RatNode::Pair(b1, b2)) => {
                go(a, b, *a1, *b1, memo) && go(a, b, *a2, *b2, memo)
            }
            (RatNode::App(n1, as1), RatNode::App(n2, as2)) => {
                n1 == n2
                    && as1.len() == as2.len()
                    && as1.iter().zip(as2).all(|(x, y)| go(a, b, *x, *y, memo))
            }
            (RatNode::Abs(v1, t1), RatNode::Abs(v2, t2)) => {
                crate::term::alpha_eq(
                    &Term::Abs(*v1, Arc::new(t1.clone())),
                    &Term::Abs(*v2, Arc::new(t2.clone())),
                )
            }
            _ => false,
        }
    }
    go(a, b, a.root, b.root, &mut HashSet::new())
}

impl RationalTerm {
    /// True when some node is reachable from itself (an infinite tree).
    pub fn is_cyclic(&self) -> bool {
        (0..self.nodes.len()).any(|i| reaches(self, i, i))
    }

    /// The finite tree term, if the graph is acyclic.
    pub fn to_term(&self) -> Option<Term> {
        if self.is_cyclic() {
            return None;
        }
        fn build(rt: &RationalTerm, i: usize) -> Term {
            match &rt.nodes[i] {
                RatNode::Null => Term::Null,
                RatNode::Var(v) => Term::Var(*v),
                RatNode::Pair(a, b) => Term::pair(build(rt, *a), build(rt, *b)),
                RatNode::App(n, args) => {
                    Term::App(n.clone(), args.iter().map(|a| build(rt, *a)).collect())
                }
                RatNode::Abs(v, body) => Term::Abs(*v, Arc::new(body.clone())),
            }
        }
        Some(build(self, self.root))
    }
}

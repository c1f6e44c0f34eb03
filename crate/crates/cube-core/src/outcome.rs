//! Lazy outcome streams and the semantic operators: sum, product, pruning,
//! unless-pruning, the catch transformation and the prefix order.
//!
//! An outcome is a lazily produced sequence of solution settings ended by a
//! final marker. Streams are replayable: forcing a prefix never re-forces
//! or mutates earlier elements.

use std::cell::RefCell;
use std::rc::Rc;

use crate::setting::{rational_equal, RationalTerm, Setting};

/// Final markers of a terminated stream. `BudgetExhausted` plays the
/// finite-approximation role of semantic divergence.
#[derive(Debug, Clone, PartialEq)]
pub enum Final {
    Fail,
    Exception(RationalTerm),
    BudgetExhausted,
}

/// One forced element: a solution with the rest of the stream, or the end.
#[derive(Clone)]
pub enum Step {
    Sol(Setting, Outcome),
    End(Final),
}

enum Node {
    Forced(Step),
    Thunk(Box<dyn FnOnce() -> Step>),
    // transient state while the thunk runs
    Busy,
}

/// A memoized lazy stream of solutions. Cloning shares the memo; a forced
/// prefix is never recomputed.
#[derive(Clone)]
pub struct Outcome(Rc<RefCell<Node>>);

/// A behaviour: a function from settings to outcomes upon them.
pub type Behaviour = Rc<dyn Fn(&Setting) -> Outcome>;

/// A deferred outcome, not built until demanded.
pub type Susp = Box<dyn FnOnce() -> Outcome>;

impl Outcome {
    pub fn from_fn(f: impl FnOnce() -> Step + 'static) -> Outcome {
        Outcome(Rc::new(RefCell::new(Node::Thunk(Box::new(f)))))
    }

    pub fn done(f: Final) -> Outcome {
        Outcome(Rc::new(RefCell::new(Node::Forced(Step::End(f)))))
    }

    pub fn fail() -> Outcome {
        Outcome::done(Final::Fail)
    }

    /// The idle successful outcome: one solution, then failure.
    pub fn idle(s: Setting) -> Outcome {
        Outcome(Rc::new(RefCell::new(Node::Forced(Step::Sol(
            s,
            Outcome::fail(),
        )))))
    }

    pub fn force(&self) -> Step {
        {
            let node = self.0.borrow();
            if let Node::Forced(step) = &*node {
                return step.clone();
            }
        }
        let thunk = match std::mem::replace(&mut *self.0.borrow_mut(), Node::Busy) {
            Node::Thunk(t) => t,
            _ => unreachable!("re-entrant force of an outcome"),
        };
        let step = thunk();
        *self.0.borrow_mut() = Node::Forced(step.clone());
        step
    }

    /// Forces up to `limit` solutions; the final marker is `None` when the
    /// stream had not ended within the limit.
    pub fn take(&self, limit: usize) -> (Vec<Setting>, Option<Final>) {
        let mut sols = Vec::new();
        let mut cur = self.clone();
        while sols.len() < limit {
            match cur.force() {
                Step::Sol(s, rest) => {
                    sols.push(s);
                    cur = rest;
                }
                Step::End(f) => return (sols, Some(f)),
            }
        }
        (sols, None)
    }
}

/// Sum of outcomes (disjunction). Failure of the first hands over to the
/// second; exceptions and budget exhaustion absorb. The second outcome is
/// not built until the first ends.
pub fn sum(o1: Outcome, o2: Susp) -> Outcome {
    Outcome::from_fn(move || match o1.force() {
        Step::End(Final::Fail) => o2().force(),
        Step::End(f) => Step::End(f),
        Step::Sol(s, rest) => Step::Sol(s, sum(rest, o2)),
    })
}

/// Product of an outcome with a behaviour (conjunction): the behaviour runs
/// upon each solution; failure and finals of the left absorb.
pub fn product(o: Outcome, b: Behaviour) -> Outcome {
    Outcome::from_fn(move || match o.force() {
        Step::End(f) => Step::End(f),
        Step::Sol(s, rest) => {
            let b2 = b.clone();
            sum(b(&s), Box::new(move || product(rest, b2))).force()
        }
    })
}

/// Pruning (`until`): for each solution the stop condition runs; while it
/// fails solutions pass through; its first solution is yielded as the last
/// one. Finals from either side absorb.
pub fn prune(o: Outcome, b: Behaviour) -> Outcome {
    Outcome::from_fn(move || match o.force() {
        Step::End(f) => Step::End(f),
        Step::Sol(s, rest) => match b(&s).force() {
            Step::End(Final::Fail) => Step::Sol(s, prune(rest, b)),
            Step::End(f) => Step::End(f),
            Step::Sol(s2, _) => Step::Sol(s2, Outcome::fail()),
        },
    })
}

/// Unless-pruning: like [`prune`] but the stopping solution is discarded.
pub fn prune_fail(o: Outcome, b: Behaviour) -> Outcome {
    Outcome::from_fn(move || match o.force() {
        Step::End(f) => Step::End(f),
        Step::Sol(s, rest) => match b(&s).force() {
            Step::End(Final::Fail) => Step::Sol(s, prune_fail(rest, b)),
            Step::End(f) => Step::End(f),
            Step::Sol(_, _) => Step::End(Final::Fail),
        },
    })
}

/// Catch transformation: solutions pass through; on an exception whose
/// payload the matcher accepts, the handler continues from the matcher's
/// setting; otherwise the exception re-raises. Fail and budget exhaustion
/// pass through.
pub fn catch_transform(
    o: Outcome,
    matcher: Rc<dyn Fn(&RationalTerm) -> Option<Setting>>,
    handler: Behaviour,
) -> Outcome {
    Outcome::from_fn(move || match o.force() {
        Step::Sol(s, rest) => Step::Sol(s, catch_transform(rest, matcher, handler)),
        Step::End(Final::Exception(t)) => match matcher(&t) {
            Some(s2) => handler(&s2).force(),
            None => Step::End(Final::Exception(t)),
        },
        Step::End(f) => Step::End(f),
    })
}

/// The prefix order on outcomes, decided up to `bound` elements: equal up
/// to the bound, or the left ends in `BudgetExhausted` after a common
/// prefix of the right (budget exhaustion standing for divergence).
/// Solutions are compared as raw settings.
pub fn prefix_le(o1: &Outcome, o2: &Outcome, bound: usize) -> bool {
    let mut a = o1.clone();
    let mut b = o2.clone();
    for _ in 0..bound {
        match (a.force(), b.force()) {
            (Step::End(Final::BudgetExhausted), _) => return true,
            (Step::End(f1), Step::End(f2)) => return f1 == f2,
            (Step::Sol(s1, r1), Step::Sol(s2, r2)) => {
                if s1 != s2 {
                    return false;
                }
                a = r1;
                b = r2;
            }
            _ => return false,
        }
    }
    true
}

/// Element-wise equality of two finals, with exception payloads compared
/// by bisimulation.
pub fn final_equal(a: &Final, b: &Final) -> bool {
    match (a, b) {
        (Final::Fail, Final::Fail) => true,
        (Final::BudgetExhausted, Final::BudgetExhausted) => true,
        (Final::Exception(x), Final::Exception(y)) => rational_equal(x, y),
        _ => false,
    }
}

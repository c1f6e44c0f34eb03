//! Term printing: operators infix per the fixed table, bracket lists,
//! cyclic bindings in μ-notation (`@N=f(@N)` labels the cycle entry),
//! fresh variables as `_G<n>`.

use std::collections::HashMap;

use crate::setting::{RatNode, RationalTerm, Setting};
use crate::term::{Name, Term, VarId};

fn infix(name: &str) -> Option<(u32, u32, u32)> {
    // (prec, left max, right max)
    Some(match name {
        ";" | "-;" => (1100, 1099, 1100),
        "->" => (1050, 1049, 1050),
        "until" | "unless" => (990, 989, 989),
        "=" | "is" | "in" | "<" | ">" | "=<" | ">=" | "=:=" | "=\\=" => (700, 699, 699),
        "+" | "-" => (500, 500, 499),
        "*" | "//" | "mod" => (400, 400, 399),
        _ => return None,
    })
}

fn atom_needs_quotes(s: &str) -> bool {
    if s.is_empty() {
        return true;
    }
    let mut chars = s.chars();
    let first = chars.next().unwrap();
    if first.is_ascii_lowercase() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return false;
    }
    // operator symbols and ! print bare
    if infix(s).is_some() || matches!(s, "!" | "," | ".") {
        return false;
    }
    true
}

fn atom_text(s: &str) -> String {
    if atom_needs_quotes(s) {
        format!("'{}'", s.replace('\'', "''"))
    } else {
        s.to_string()
    }
}

struct Printer<'a> {
    rt: &'a RationalTerm,
    cyclic: Vec<bool>,
    labels: HashMap<usize, u32>,
    next_label: u32,
    names: Option<&'a HashMap<VarId, String>>,
    out: String,
}

impl<'a> Printer<'a> {
    fn var_text(&self, v: VarId) -> String {
        if let Some(names) = self.names {
            if let Some(n) = names.get(&v) {
                return n.clone();
            }
        }
        format!("_G{}", v.0)
    }

    fn print(&mut self, i: usize, max_prec: u32) {
        if self.cyclic[i] {
            if let Some(&l) = self.labels.get(&i) {
                self.out.push_str(&format!("@{}", l));
                return;
            }
            let l = self.next_label;
            self.next_label += 1;
            self.labels.insert(i, l);
            self.out.push_str(&format!("@{}=", l));
            self.node(i, 0);
            return;
        }
        self.node(i, max_prec);
    }

    fn node(&mut self, i: usize, max_prec: u32) {
        match &self.rt.nodes[i].clone() {
            RatNode::Null => self.out.push_str("[]"),
            RatNode::Var(v) => {
                let t = self.var_text(*v);
                self.out.push_str(&t);
            }
            RatNode::Pair(car, cdr) => self.list(*car, *cdr),
            RatNode::App(name, args) => match name {
                Name::Int(n) => {
                    if args.is_empty() {
                        self.out.push_str(&n.to_string());
                    } else {
                        self.out.push_str(&n.to_string());
                        self.args(args);
                    }
                }
                Name::Atom(a) => {
                    if args.len() == 2 {
                        if let Some((prec, lmax, rmax)) = infix(a) {
                            let paren = prec > max_prec;
                            if paren {
                                self.out.push('(');
                            }
                            self.print(args[0], lmax);
                            self.out.push_str(&format!(" {} ", a));
                            self.print(args[1], rmax);
                            if paren {
                                self.out.push(')');
                            }
                            return;
                        }
                    }
                    self.out.push_str(&atom_text(a));
                    if !args.is_empty() {
                        self.args(args);
                    }
                }
            },
            RatNode::Abs(v, body) => {
                // abstractions only reach printing through debugging paths
                self.out
                    .push_str(&format!("\\{}^({})", VarId(v.0), plain(body)));
                let _ = v;
            }
        }
    }

    fn args(&mut self, args: &[usize]) {
        self.out.push('(');
        for (k, a) in args.iter().enumerate() {
            if k > 0 {
                self.out.push_str(", ");
            }
            self.print(*a, 999);
        }
        self.out.push(')');
    }

    fn list(&mut self, car: usize, cdr: usize) {
        self.out.push('[');
        self.print(car, 999);
        let mut tail = cdr;
        loop {
            if self.cyclic[tail] {
                self.out.push('|');
                self.print(tail, 999);
                break;
            }
            match &self.rt.nodes[tail] {
                RatNode::Null => break,
                RatNode::Pair(a, b) => {
                    self.out.push(',');
                    let (a, b) = (*a, *b);
                    self.print(a, 999);
                    tail = b;
                }
                _ => {
                    self.out.push('|');
                    self.print(tail, 999);
                    break;
                }
            }
        }
        self.out.push(']');
    }
}

fn plain(t: &Term) -> String {
    print_rational(&Setting::new(0).resolve(t), None)
}

/// Prints a rational term graph, labelling cycle entries `@N`.
pub fn print_rational(rt: &RationalTerm, names: Option<&HashMap<VarId, String>>) -> String {
    let n = rt.nodes.len();
    let cyclic = (0..n).map(|i| node_on_cycle(rt, i)).collect();
    let mut p = Printer {
        rt,
        cyclic,
        labels: HashMap::new(),
        next_label: 1,
        names,
        out: String::new(),
    };
    p.print(rt.root, 1200);
    p.out
}

fn node_on_cycle(rt: &RationalTerm, i: usize) -> bool {
    // reachable from its own children
    let mut stack: Vec<usize> = kids(&rt.nodes[i]);
    let mut seen = vec![false; rt.nodes.len()];
    while let Some(j) = stack.pop() {
        if j == i {
            return true;
        }
        if !seen[j] {
            seen[j] = true;
            stack.extend(kids(&rt.nodes[j]));
        }
    }
    false
}

fn kids(n: &RatNode) -> Vec<usize> {
    match n {
        RatNode::Null | RatNode::Var(_) | RatNode::Abs(..) => vec![],
        RatNode::Pair(a, b) => vec![*a, *b],
        RatNode::App(_, args) => args.clone(),
    }
}

/// Resolves `t` through `s` and prints it.
pub fn print_term(t: &Term, s: &Setting) -> String {
    print_rational(&s.resolve(t), None)
}

/// Like [`print_term`] but with source names for variables.
pub fn print_term_named(t: &Term, s: &Setting, names: &HashMap<VarId, String>) -> String {
    print_rational(&s.resolve(t), Some(names))
}

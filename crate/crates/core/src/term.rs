//! Terms, positions and substitutions.
//!
//! Terms use a locally nameless representation: variables bound by an
//! abstraction or product are de Bruijn indices, free variables (rule
//! pattern variables, environment variables) are named. Alpha-equivalence
//! is therefore plain structural equality; binders keep a name hint that
//! is ignored by `Eq` and `Hash` and only used for printing.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::Serialize;

/// The two sorts of the calculus: `*` (types and propositions) and
/// `box` (kinds, the types of predicate types).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sort {
    Star,
    Box,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Star => write!(f, "*"),
            Sort::Box => write!(f, "box"),
        }
    }
}

/// Index of a declared symbol in its `Signature`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SymId(pub u32);

impl SymId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A binder node: abstraction or product. The body is scoped, index 0
/// refers to this binder.
#[derive(Clone, Debug)]
pub struct Binder {
    pub hint: String,
    pub dom: Box<Term>,
    pub body: Box<Term>,
}

#[derive(Clone, Debug)]
pub enum Term {
    Sort(Sort),
    /// Bound variable (de Bruijn index).
    Bound(usize),
    /// Free (named) variable.
    Var(String),
    Symb(SymId),
    Abs(Binder),
    App(Box<Term>, Box<Term>),
    Prod(Binder),
}

// Equality and hashing ignore binder name hints so that `==` is
// alpha-equivalence.
impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Term::Sort(a), Term::Sort(b)) => a == b,
            (Term::Bound(a), Term::Bound(b)) => a == b,
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::Symb(a), Term::Symb(b)) => a == b,
            (Term::Abs(a), Term::Abs(b)) | (Term::Prod(a), Term::Prod(b)) => {
                a.dom == b.dom && a.body == b.body
            }
            (Term::App(f, a), Term::App(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            Term::Sort(s) => s.hash(state),
            Term::Bound(i) => i.hash(state),
            Term::Var(x) => x.hash(state),
            Term::Symb(f) => f.hash(state),
            Term::Abs(b) | Term::Prod(b) => {
                b.dom.hash(state);
                b.body.hash(state);
            }
            Term::App(f, a) => {
                f.hash(state);
                a.hash(state);
            }
        }
    }
}

/// A path from the root of a term to a subterm, in Dewey notation with
/// 1-based child indices. `App`: 1 = function, 2 = argument; `Abs` and
/// `Prod`: 1 = domain, 2 = body.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct Position(pub Vec<u8>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: u8) -> Position {
        let mut path = self.0.clone();
        path.push(i);
        Position(path)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "root");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("position {0} is not valid for the term")]
    InvalidPosition(Position),
}

/// A finite map from free variables to terms. Application is
/// capture-avoiding (dangling indices in the image are shifted when the
/// image lands under a binder).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<String, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn singleton(var: impl Into<String>, t: Term) -> Substitution {
        let mut s = Substitution::new();
        s.insert(var.into(), t);
        s
    }

    pub fn insert(&mut self, var: String, t: Term) {
        self.map.insert(var, t);
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.map.get(var)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.map.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.map.iter()
    }
}

impl FromIterator<(String, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> Substitution {
        Substitution {
            map: iter.into_iter().collect(),
        }
    }
}

impl Term {
    pub fn star() -> Term {
        Term::Sort(Sort::Star)
    }

    pub fn boxed() -> Term {
        Term::Sort(Sort::Box)
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn abs(hint: impl Into<String>, dom: Term, body: Term) -> Term {
        Term::Abs(Binder {
            hint: hint.into(),
            dom: Box::new(dom),
            body: Box::new(body),
        })
    }

    pub fn prod(hint: impl Into<String>, dom: Term, body: Term) -> Term {
        Term::Prod(Binder {
            hint: hint.into(),
            dom: Box::new(dom),
            body: Box::new(body),
        })
    }

    /// Non-dependent product `a => b`: the body does not use index 0.
    pub fn arrow(dom: Term, cod: Term) -> Term {
        let body = cod.shifted(1, 0);
        Term::prod("_", dom, body)
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    /// `head t1 ... tn` as nested binary applications.
    pub fn apply(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    /// Spine view: strips nested applications into head and arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut head = self;
        let mut args = Vec::new();
        while let Term::App(f, a) = head {
            args.push(a.as_ref());
            head = f;
        }
        args.reverse();
        (head, args)
    }

    /// Head symbol of the spine, if the term is a symbol application.
    pub fn head_symbol(&self) -> Option<SymId> {
        match self.spine().0 {
            Term::Symb(f) => Some(*f),
            _ => None,
        }
    }

    /// Shift dangling indices >= `cutoff` up by `amount`.
    pub fn shifted(&self, amount: usize, cutoff: usize) -> Term {
        match self {
            Term::Bound(i) if *i >= cutoff => Term::Bound(i + amount),
            Term::Sort(_) | Term::Bound(_) | Term::Var(_) | Term::Symb(_) => self.clone(),
            Term::Abs(b) => Term::Abs(Binder {
                hint: b.hint.clone(),
                dom: Box::new(b.dom.shifted(amount, cutoff)),
                body: Box::new(b.body.shifted(amount, cutoff + 1)),
            }),
            Term::Prod(b) => Term::Prod(Binder {
                hint: b.hint.clone(),
                dom: Box::new(b.dom.shifted(amount, cutoff)),
                body: Box::new(b.body.shifted(amount, cutoff + 1)),
            }),
            Term::App(f, a) => Term::app(f.shifted(amount, cutoff), a.shifted(amount, cutoff)),
        }
    }

    fn subst_bound(&self, depth: usize, arg: &Term) -> Term {
        match self {
            Term::Bound(i) => {
                if *i == depth {
                    arg.shifted(depth, 0)
                } else if *i > depth {
                    Term::Bound(i - 1)
                } else {
                    self.clone()
                }
            }
            Term::Sort(_) | Term::Var(_) | Term::Symb(_) => self.clone(),
            Term::Abs(b) => Term::Abs(Binder {
                hint: b.hint.clone(),
                dom: Box::new(b.dom.subst_bound(depth, arg)),
                body: Box::new(b.body.subst_bound(depth + 1, arg)),
            }),
            Term::Prod(b) => Term::Prod(Binder {
                hint: b.hint.clone(),
                dom: Box::new(b.dom.subst_bound(depth, arg)),
                body: Box::new(b.body.subst_bound(depth + 1, arg)),
            }),
            Term::App(f, a) => Term::app(f.subst_bound(depth, arg), a.subst_bound(depth, arg)),
        }
    }

    /// Instantiate the body of a binder with `arg` (index 0 := arg).
    pub fn opened(&self, arg: &Term) -> Term {
        self.subst_bound(0, arg)
    }

    /// Abstract the free variable `name` as index 0. The term must not
    /// have dangling indices at the abstraction level.
    pub fn closed(&self, name: &str) -> Term {
        fn go(t: &Term, name: &str, depth: usize) -> Term {
            match t {
                Term::Var(x) if x == name => Term::Bound(depth),
                Term::Sort(_) | Term::Bound(_) | Term::Var(_) | Term::Symb(_) => t.clone(),
                Term::Abs(b) => Term::Abs(Binder {
                    hint: b.hint.clone(),
                    dom: Box::new(go(&b.dom, name, depth)),
                    body: Box::new(go(&b.body, name, depth + 1)),
                }),
                Term::Prod(b) => Term::Prod(Binder {
                    hint: b.hint.clone(),
                    dom: Box::new(go(&b.dom, name, depth)),
                    body: Box::new(go(&b.body, name, depth + 1)),
                }),
                Term::App(f, a) => Term::app(go(f, name, depth), go(a, name, depth)),
            }
        }
        go(self, name, 0)
    }

    /// Free (named) variables, in name order.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free_vars(&mut out);
        out
    }

    fn collect_free_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Sort(_) | Term::Bound(_) | Term::Symb(_) => {}
            Term::Abs(b) | Term::Prod(b) => {
                b.dom.collect_free_vars(out);
                b.body.collect_free_vars(out);
            }
            Term::App(f, a) => {
                f.collect_free_vars(out);
                a.collect_free_vars(out);
            }
        }
    }

    /// Occurrence count of every free variable.
    pub fn var_occurrences(&self) -> BTreeMap<String, usize> {
        fn go(t: &Term, out: &mut BTreeMap<String, usize>) {
            match t {
                Term::Var(x) => *out.entry(x.clone()).or_insert(0) += 1,
                Term::Sort(_) | Term::Bound(_) | Term::Symb(_) => {}
                Term::Abs(b) | Term::Prod(b) => {
                    go(&b.dom, out);
                    go(&b.body, out);
                }
                Term::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
            }
        }
        let mut out = BTreeMap::new();
        go(self, &mut out);
        out
    }

    /// True when every free variable occurs exactly once.
    pub fn linear(&self) -> bool {
        self.var_occurrences().values().all(|&n| n == 1)
    }

    /// True when the term contains a free occurrence of `name`.
    pub fn mentions_var(&self, name: &str) -> bool {
        match self {
            Term::Var(x) => x == name,
            Term::Sort(_) | Term::Bound(_) | Term::Symb(_) => false,
            Term::Abs(b) | Term::Prod(b) => b.dom.mentions_var(name) || b.body.mentions_var(name),
            Term::App(f, a) => f.mentions_var(name) || a.mentions_var(name),
        }
    }

    /// All symbols occurring anywhere in the term.
    pub fn symbols(&self) -> BTreeSet<SymId> {
        fn go(t: &Term, out: &mut BTreeSet<SymId>) {
            match t {
                Term::Symb(f) => {
                    out.insert(*f);
                }
                Term::Sort(_) | Term::Bound(_) | Term::Var(_) => {}
                Term::Abs(b) | Term::Prod(b) => {
                    go(&b.dom, out);
                    go(&b.body, out);
                }
                Term::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }

    /// Number of symbol occurrences (used by the size-preservation
    /// criterion for equations).
    pub fn symbol_count(&self) -> usize {
        match self {
            Term::Symb(_) => 1,
            Term::Sort(_) | Term::Bound(_) | Term::Var(_) => 0,
            Term::Abs(b) | Term::Prod(b) => b.dom.symbol_count() + b.body.symbol_count(),
            Term::App(f, a) => f.symbol_count() + a.symbol_count(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Sort(_) | Term::Bound(_) | Term::Var(_) | Term::Symb(_) => 1,
            Term::Abs(b) | Term::Prod(b) => 1 + b.dom.size() + b.body.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    /// Capture-avoiding simultaneous substitution of free variables.
    pub fn apply_subst(&self, subst: &Substitution) -> Term {
        fn go(t: &Term, subst: &Substitution, depth: usize) -> Term {
            match t {
                Term::Var(x) => match subst.get(x) {
                    Some(image) => image.shifted(depth, 0),
                    None => t.clone(),
                },
                Term::Sort(_) | Term::Bound(_) | Term::Symb(_) => t.clone(),
                Term::Abs(b) => Term::Abs(Binder {
                    hint: b.hint.clone(),
                    dom: Box::new(go(&b.dom, subst, depth)),
                    body: Box::new(go(&b.body, subst, depth + 1)),
                }),
                Term::Prod(b) => Term::Prod(Binder {
                    hint: b.hint.clone(),
                    dom: Box::new(go(&b.dom, subst, depth)),
                    body: Box::new(go(&b.body, subst, depth + 1)),
                }),
                Term::App(f, a) => Term::app(go(f, subst, depth), go(a, subst, depth)),
            }
        }
        go(self, subst, 0)
    }

    fn children(&self) -> Vec<&Term> {
        match self {
            Term::Sort(_) | Term::Bound(_) | Term::Var(_) | Term::Symb(_) => Vec::new(),
            Term::Abs(b) | Term::Prod(b) => vec![&b.dom, &b.body],
            Term::App(f, a) => vec![f, a],
        }
    }

    /// Every position of the term, in pre-order.
    pub fn positions(&self) -> Vec<Position> {
        fn go(t: &Term, here: Position, out: &mut Vec<Position>) {
            out.push(here.clone());
            for (i, c) in t.children().into_iter().enumerate() {
                go(c, here.child(i as u8 + 1), out);
            }
        }
        let mut out = Vec::new();
        go(self, Position::root(), &mut out);
        out
    }

    pub fn subterm_at(&self, pos: &Position) -> Result<&Term, TermError> {
        let mut here = self;
        for &i in &pos.0 {
            let children = here.children();
            here = children
                .get(i as usize - 1)
                .copied()
                .filter(|_| i >= 1)
                .ok_or_else(|| TermError::InvalidPosition(pos.clone()))?;
        }
        Ok(here)
    }

    pub fn replace_at(&self, pos: &Position, replacement: Term) -> Result<Term, TermError> {
        fn go(t: &Term, path: &[u8], replacement: Term, full: &Position) -> Result<Term, TermError> {
            let Some((&i, rest)) = path.split_first() else {
                return Ok(replacement);
            };
            let invalid = || TermError::InvalidPosition(full.clone());
            match (t, i) {
                (Term::App(f, a), 1) => Ok(Term::app(go(f, rest, replacement, full)?, (**a).clone())),
                (Term::App(f, a), 2) => Ok(Term::app((**f).clone(), go(a, rest, replacement, full)?)),
                (Term::Abs(b), 1) => Ok(Term::Abs(Binder {
                    hint: b.hint.clone(),
                    dom: Box::new(go(&b.dom, rest, replacement, full)?),
                    body: b.body.clone(),
                })),
                (Term::Abs(b), 2) => Ok(Term::Abs(Binder {
                    hint: b.hint.clone(),
                    dom: b.dom.clone(),
                    body: Box::new(go(&b.body, rest, replacement, full)?),
                })),
                (Term::Prod(b), 1) => Ok(Term::Prod(Binder {
                    hint: b.hint.clone(),
                    dom: Box::new(go(&b.dom, rest, replacement, full)?),
                    body: b.body.clone(),
                })),
                (Term::Prod(b), 2) => Ok(Term::Prod(Binder {
                    hint: b.hint.clone(),
                    dom: b.dom.clone(),
                    body: Box::new(go(&b.body, rest, replacement, full)?),
                })),
                _ => Err(invalid()),
            }
        }
        go(self, &pos.0, replacement, pos)
    }

    /// First-order syntactic matching: find `s` with `self s = subject`
    /// (alpha-equality), binding only free variables of the pattern.
    /// Patterns are expected to be algebraic; a pattern containing a
    /// binder or a sort never matches.
    pub fn match_against(&self, subject: &Term, subst: &mut Substitution) -> bool {
        match (self, subject) {
            (Term::Var(x), _) => match subst.get(x) {
                Some(prev) => prev == subject,
                None => {
                    subst.insert(x.clone(), subject.clone());
                    true
                }
            },
            (Term::Symb(f), Term::Symb(g)) => f == g,
            (Term::Bound(i), Term::Bound(j)) => i == j,
            (Term::App(f, a), Term::App(g, b)) => {
                self_match(f, g, subst) && self_match(a, b, subst)
            }
            _ => false,
        }
    }
}

fn self_match(pattern: &Term, subject: &Term, subst: &mut Substitution) -> bool {
    pattern.match_against(subject, subst)
}

/// Pick a name based on `hint` that avoids every name in `taken`.
pub fn fresh_name(hint: &str, taken: &BTreeSet<String>) -> String {
    let base = if hint.is_empty() || hint == "_" { "x" } else { hint };
    let mut candidate = base.to_string();
    while taken.contains(&candidate) {
        candidate.push('\'');
    }
    candidate
}

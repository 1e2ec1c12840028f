//! Symbol table, rewrite rules, equations and symbol classification.
//!
//! A signature is built once from a parsed input file and immutable
//! afterwards. Loading resolves names, validates rule and equation shape,
//! derives each symbol's sort by typing its declared type, infers the
//! precedence quasi-order from the dependency graph and caches the
//! first-order/higher-order classification.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use serde::Serialize;

use crate::limits::Limits;
use crate::syntax::{self, Ast, SpecFile, Statement, SyntaxError};
use crate::term::{fresh_name, Position, Sort, SymId, Substitution, Term};
use crate::typing::{self, TypingEnv};

/// Argument comparison policy for calls to a symbol of the same
/// precedence class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Mul,
    Lex,
}

/// User override for the first-order/higher-order classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DeclaredKind {
    FirstOrder,
    HigherOrder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolKind {
    FirstOrder,
    HigherOrder,
}

#[derive(Clone, Debug)]
pub struct SymbolDecl {
    pub name: String,
    /// Sort of the declared type: `Star` for function symbols, `Box` for
    /// predicate symbols.
    pub sort: Sort,
    /// Number of leading products of the declared type.
    pub arity: usize,
    /// Closed type of the symbol.
    pub ty: Term,
    pub status: Status,
    pub declared_kind: Option<DeclaredKind>,
    pub declared_constant: bool,
    pub line: usize,
    // caches, filled by finalize()
    kind: SymbolKind,
    rule_defined: bool,
    eq_headed: bool,
    primitive: bool,
}

#[derive(Clone, Debug)]
pub struct RewriteRule {
    pub head: SymId,
    pub lhs_args: Vec<Term>,
    pub rhs: Term,
    pub env: TypingEnv,
    pub rho: Substitution,
    pub line: usize,
    /// Printed form, kept for reports.
    pub text: String,
}

impl RewriteRule {
    pub fn lhs(&self) -> Term {
        Term::apply(Term::Symb(self.head), self.lhs_args.iter().cloned())
    }

    pub fn is_left_linear(&self) -> bool {
        self.lhs().linear()
    }

    /// No variable occurs more often in the right-hand side than in the
    /// left-hand side.
    pub fn is_non_duplicating(&self) -> bool {
        let lhs_occ = self.lhs().var_occurrences();
        self.rhs
            .var_occurrences()
            .iter()
            .all(|(x, n)| lhs_occ.get(x).copied().unwrap_or(0) >= *n)
    }
}

/// A well-formed equation, stored once and used symmetrically.
#[derive(Clone, Debug)]
pub struct Equation {
    pub lhs_head: SymId,
    pub lhs_args: Vec<Term>,
    pub rhs_head: SymId,
    pub rhs_args: Vec<Term>,
    pub env: TypingEnv,
    pub rho: Substitution,
    pub line: usize,
    pub text: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EqDirection {
    LeftToRight,
    RightToLeft,
}

impl EqDirection {
    pub const BOTH: [EqDirection; 2] = [EqDirection::LeftToRight, EqDirection::RightToLeft];

    pub fn flipped(self) -> EqDirection {
        match self {
            EqDirection::LeftToRight => EqDirection::RightToLeft,
            EqDirection::RightToLeft => EqDirection::LeftToRight,
        }
    }
}

impl Equation {
    pub fn lhs(&self) -> Term {
        Term::apply(Term::Symb(self.lhs_head), self.lhs_args.iter().cloned())
    }

    pub fn rhs(&self) -> Term {
        Term::apply(Term::Symb(self.rhs_head), self.rhs_args.iter().cloned())
    }

    /// The equation as an oriented rewrite pair.
    pub fn oriented(&self, dir: EqDirection) -> (Term, Term) {
        match dir {
            EqDirection::LeftToRight => (self.lhs(), self.rhs()),
            EqDirection::RightToLeft => (self.rhs(), self.lhs()),
        }
    }

    pub fn head(&self, dir: EqDirection) -> SymId {
        match dir {
            EqDirection::LeftToRight => self.lhs_head,
            EqDirection::RightToLeft => self.rhs_head,
        }
    }

    pub fn is_linear(&self) -> bool {
        self.lhs().linear() && self.rhs().linear()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationShapeViolation {
    LhsNotAlgebraic,
    RhsNotAlgebraic,
    LhsNotSymbolHeaded,
    RhsNotSymbolHeaded,
    VariableMismatch,
}

impl fmt::Display for EquationShapeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            EquationShapeViolation::LhsNotAlgebraic => "left-hand side is not algebraic",
            EquationShapeViolation::RhsNotAlgebraic => "right-hand side is not algebraic",
            EquationShapeViolation::LhsNotSymbolHeaded => "left-hand side is not headed by a symbol",
            EquationShapeViolation::RhsNotSymbolHeaded => "right-hand side is not headed by a symbol",
            EquationShapeViolation::VariableMismatch => {
                "left and right-hand sides have distinct sets of variables"
            }
        };
        write!(f, "{msg}")
    }
}

/// An equation that violates the shape conditions. It is excluded from
/// the active equation set but kept for reporting; its raw sides remain
/// available so the finite-class probe can still exercise it.
#[derive(Clone, Debug)]
pub struct MalformedEquation {
    pub lhs: Term,
    pub rhs: Term,
    pub env: TypingEnv,
    pub violations: Vec<EquationShapeViolation>,
    pub line: usize,
    pub text: String,
}

impl MalformedEquation {
    /// Usable for mechanical rewriting only when both sides bind the same
    /// variables (otherwise one direction would invent variables).
    pub fn mechanically_usable(&self) -> bool {
        self.lhs.free_vars() == self.rhs.free_vars()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("syntax errors:\n{}", .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))]
    Syntax(Vec<SyntaxError>),
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

fn invalid(line: usize, message: impl Into<String>) -> LoadError {
    LoadError::Invalid {
        line,
        message: message.into(),
    }
}

/// Precedence quasi-order on symbols: the reflexive-transitive closure of
/// the dependency graph, with strongly connected components as
/// equivalence classes.
#[derive(Clone, Debug, Default)]
pub struct Precedence {
    class_of: Vec<usize>,
    /// reach[a][b]: class a >= class b
    reach: Vec<Vec<bool>>,
}

impl Precedence {
    pub fn ge(&self, f: SymId, g: SymId) -> bool {
        self.reach[self.class_of[f.index()]][self.class_of[g.index()]]
    }

    pub fn gt(&self, f: SymId, g: SymId) -> bool {
        self.ge(f, g) && !self.ge(g, f)
    }

    pub fn equiv(&self, f: SymId, g: SymId) -> bool {
        self.ge(f, g) && self.ge(g, f)
    }

    pub fn class_of(&self, f: SymId) -> usize {
        self.class_of[f.index()]
    }
}

#[derive(Clone, Debug, Default)]
pub struct Signature {
    symbols: Vec<SymbolDecl>,
    by_name: HashMap<String, SymId>,
    pub rules: Vec<RewriteRule>,
    pub equations: Vec<Equation>,
    pub malformed_equations: Vec<MalformedEquation>,
    pub precedence: Precedence,
    user_precedence: Vec<(SymId, SymId)>,
    attested_fo_sn: bool,
}

impl Signature {
    pub fn from_source(source: &str) -> Result<Signature, LoadError> {
        Signature::from_source_with(source, &Limits::default())
    }

    pub fn from_source_with(source: &str, limits: &Limits) -> Result<Signature, LoadError> {
        let file = syntax::parse_file(source).map_err(LoadError::Syntax)?;
        Signature::from_file(&file, limits)
    }

    pub fn from_file(file: &SpecFile, limits: &Limits) -> Result<Signature, LoadError> {
        let mut sig = Signature::default();
        for st in &file.statements {
            sig.add_statement(st, limits)?;
        }
        sig.finalize(limits)?;
        Ok(sig)
    }

    pub fn lookup(&self, name: &str) -> Option<SymId> {
        self.by_name.get(name).copied()
    }

    pub fn decl(&self, id: SymId) -> &SymbolDecl {
        &self.symbols[id.index()]
    }

    pub fn name(&self, id: SymId) -> &str {
        &self.decl(id).name
    }

    pub fn arity(&self, id: SymId) -> usize {
        self.decl(id).arity
    }

    pub fn status(&self, id: SymId) -> Status {
        self.decl(id).status
    }

    pub fn symbol_count(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbol_ids(&self) -> impl Iterator<Item = SymId> {
        (0..self.symbols.len() as u32).map(SymId)
    }

    pub fn is_predicate(&self, id: SymId) -> bool {
        self.decl(id).sort == Sort::Box
    }

    pub fn is_function(&self, id: SymId) -> bool {
        self.decl(id).sort == Sort::Star
    }

    /// Has at least one rewrite rule with this head.
    pub fn is_rule_defined(&self, id: SymId) -> bool {
        self.decl(id).rule_defined
    }

    /// Heads at least one equation (either side).
    pub fn is_eq_headed(&self, id: SymId) -> bool {
        self.decl(id).eq_headed
    }

    /// Constant = heads neither a rule nor an equation. Equation heads
    /// count as defining: an equated symbol is rewritten at the root, so
    /// it is not reported as a free constant.
    pub fn is_constant(&self, id: SymId) -> bool {
        let d = self.decl(id);
        !d.rule_defined && !d.eq_headed
    }

    pub fn is_defined(&self, id: SymId) -> bool {
        !self.is_constant(id)
    }

    /// Constructors of a predicate symbol: function symbols without
    /// rewrite rules whose output type is headed by `c`. Symbols that only
    /// head equations still count (their terms are never rewritten away at
    /// the root by a rule), which is what accessibility relies on.
    pub fn constructors_of(&self, c: SymId) -> Vec<SymId> {
        self.symbol_ids()
            .filter(|&f| {
                self.is_function(f)
                    && !self.is_rule_defined(f)
                    && self.output_head(f) == Some(c)
            })
            .collect()
    }

    /// Head symbol of the output type (the type after the arity prefix).
    pub fn output_head(&self, f: SymId) -> Option<SymId> {
        let (_, output) = self.telescope(f);
        output.head_symbol()
    }

    /// Opens the arity-prefix of the declared type with fresh variables:
    /// returns the argument environment and the output type.
    pub fn telescope(&self, f: SymId) -> (TypingEnv, Term) {
        let d = self.decl(f);
        let mut env = TypingEnv::new();
        let mut ty = d.ty.clone();
        let mut taken: BTreeSet<String> = BTreeSet::new();
        for _ in 0..d.arity {
            match ty {
                Term::Prod(b) => {
                    let name = fresh_name(&b.hint, &taken);
                    taken.insert(name.clone());
                    env.push(name.clone(), (*b.dom).clone());
                    ty = b.body.opened(&Term::var(name));
                }
                other => {
                    // arity is the product prefix length, so this is
                    // unreachable for well-formed declarations
                    ty = other;
                    break;
                }
            }
        }
        (env, ty)
    }

    /// Primitive predicate: constant, not polymorphic, and no constructor
    /// takes a functional argument.
    pub fn is_primitive(&self, c: SymId) -> bool {
        self.decl(c).primitive
    }

    pub fn kind(&self, id: SymId) -> SymbolKind {
        self.decl(id).kind
    }

    pub fn is_first_order(&self, id: SymId) -> bool {
        self.kind(id) == SymbolKind::FirstOrder
    }

    pub fn attested_fo_sn(&self) -> bool {
        self.attested_fo_sn
    }

    pub fn rule_indices_headed_by(&self, f: SymId) -> Vec<usize> {
        self.rules
            .iter()
            .enumerate()
            .filter(|(_, r)| r.head == f)
            .map(|(i, _)| i)
            .collect()
    }

    /// Rules headed by a first-order symbol.
    pub fn first_order_rule_indices(&self) -> Vec<usize> {
        self.rules
            .iter()
            .enumerate()
            .filter(|(_, r)| self.is_first_order(r.head))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn higher_order_rule_indices(&self) -> Vec<usize> {
        self.rules
            .iter()
            .enumerate()
            .filter(|(_, r)| !self.is_first_order(r.head))
            .map(|(i, _)| i)
            .collect()
    }

    /// Equations whose (left) head is first-order.
    pub fn first_order_equation_indices(&self) -> Vec<usize> {
        self.equations
            .iter()
            .enumerate()
            .filter(|(_, e)| self.is_first_order(e.lhs_head))
            .map(|(i, _)| i)
            .collect()
    }

    /// Only variables and fully applied symbols.
    pub fn is_algebraic(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::Symb(_) | Term::App(_, _) => {
                let (head, args) = t.spine();
                match head {
                    Term::Symb(f) => {
                        args.len() == self.arity(*f) && args.iter().all(|a| self.is_algebraic(a))
                    }
                    _ => false,
                }
            }
            _ => false,
        }
    }

    /// First-order algebraic: algebraic and built only from first-order
    /// symbols.
    pub fn is_first_order_algebraic(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::Symb(_) | Term::App(_, _) => {
                let (head, args) = t.spine();
                match head {
                    Term::Symb(f) => {
                        self.is_first_order(*f)
                            && args.len() == self.arity(*f)
                            && args.iter().all(|a| self.is_first_order_algebraic(a))
                    }
                    _ => false,
                }
            }
            _ => false,
        }
    }

    // ---- name resolution -------------------------------------------------

    /// Resolve a surface term. Binder-bound names become indices, declared
    /// symbols become symbol references, anything else a free variable
    /// (rejected when `free_ok` is false).
    pub fn elaborate(&self, ast: &Ast, free_ok: bool, line: usize) -> Result<Term, LoadError> {
        let mut bound = Vec::new();
        self.elab(ast, free_ok, line, &mut bound)
    }

    fn elab(
        &self,
        ast: &Ast,
        free_ok: bool,
        line: usize,
        bound: &mut Vec<String>,
    ) -> Result<Term, LoadError> {
        match ast {
            Ast::Star => Ok(Term::star()),
            Ast::Box => Ok(Term::boxed()),
            Ast::Ident(name) => {
                if let Some(i) = bound.iter().rposition(|b| b == name) {
                    Ok(Term::Bound(bound.len() - 1 - i))
                } else if let Some(id) = self.lookup(name) {
                    Ok(Term::Symb(id))
                } else if free_ok {
                    Ok(Term::var(name.clone()))
                } else {
                    Err(invalid(line, format!("unknown name '{name}'")))
                }
            }
            Ast::App(f, a) => Ok(Term::app(
                self.elab(f, free_ok, line, bound)?,
                self.elab(a, free_ok, line, bound)?,
            )),
            Ast::Abs(x, dom, body) => {
                let dom = self.elab(dom, free_ok, line, bound)?;
                bound.push(x.clone());
                let body = self.elab(body, free_ok, line, bound)?;
                bound.pop();
                Ok(Term::abs(x.clone(), dom, body))
            }
            Ast::Prod(x, dom, body) => {
                let dom = self.elab(dom, free_ok, line, bound)?;
                bound.push(x.clone());
                let body = self.elab(body, free_ok, line, bound)?;
                bound.pop();
                Ok(Term::prod(x.clone(), dom, body))
            }
            Ast::Arrow(a, b) => Ok(Term::arrow(
                self.elab(a, free_ok, line, bound)?,
                self.elab(b, free_ok, line, bound)?,
            )),
        }
    }

    /// Resolve a term given in the concrete syntax, free variables allowed.
    pub fn parse_term(&self, source: &str) -> Result<Term, LoadError> {
        let ast = syntax::parse_term(source).map_err(|e| LoadError::Syntax(vec![e]))?;
        self.elaborate(&ast, true, 1)
    }

    // ---- printing ---------------------------------------------------------

    /// Render an internal term back to the concrete syntax.
    pub fn show_term(&self, t: &Term) -> String {
        self.unelaborate(t, &mut Vec::new()).to_string()
    }

    fn unelaborate(&self, t: &Term, bound: &mut Vec<String>) -> Ast {
        match t {
            Term::Sort(Sort::Star) => Ast::Star,
            Term::Sort(Sort::Box) => Ast::Box,
            Term::Var(x) => Ast::Ident(x.clone()),
            Term::Symb(f) => Ast::Ident(self.name(*f).to_string()),
            Term::Bound(i) => {
                let name = bound
                    .get(bound.len().wrapping_sub(1 + i))
                    .cloned()
                    .unwrap_or_else(|| format!("_{i}"));
                Ast::Ident(name)
            }
            Term::App(f, a) => Ast::app(self.unelaborate(f, bound), self.unelaborate(a, bound)),
            Term::Abs(b) | Term::Prod(b) => {
                let dom = self.unelaborate(&b.dom, bound);
                // non-dependent products print as arrows; the dummy never
                // occurs since the body does not use index 0
                if matches!(t, Term::Prod(_)) && !mentions_index(&b.body, 0) {
                    let body = b.body.opened(&Term::var("_unused"));
                    let cod = self.unelaborate(&body, bound);
                    return Ast::Arrow(Box::new(dom), Box::new(cod));
                }
                let name = self.binder_name(&b.hint, &b.body, bound);
                bound.push(name.clone());
                let body = self.unelaborate(&b.body, bound);
                bound.pop();
                if matches!(t, Term::Abs(_)) {
                    Ast::Abs(name, Box::new(dom), Box::new(body))
                } else {
                    Ast::Prod(name, Box::new(dom), Box::new(body))
                }
            }
        }
    }

    // A binder name must not shadow a symbol or free variable used in the
    // body, or the printed term would resolve differently.
    fn binder_name(&self, hint: &str, body: &Term, bound: &[String]) -> String {
        let mut avoid: BTreeSet<String> = body.free_vars();
        for f in body.symbols() {
            avoid.insert(self.name(f).to_string());
        }
        for b in bound {
            avoid.insert(b.clone());
        }
        fresh_name(hint, &avoid)
    }

    pub fn show_subst(&self, s: &Substitution) -> String {
        let items: Vec<String> = s
            .iter()
            .map(|(x, t)| format!("{x} := {}", self.show_term(t)))
            .collect();
        format!("{{{}}}", items.join(", "))
    }

    /// Render a position using argument numbers of full symbol
    /// applications where possible (spine-relative form).
    pub fn show_position(&self, t: &Term, pos: &Position) -> String {
        let mut parts: Vec<String> = Vec::new();
        let mut here = t.clone();
        let mut path = pos.0.as_slice();
        'outer: while !path.is_empty() {
            let (head, args) = here.spine();
            if let Term::Symb(f) = head {
                if args.len() == self.arity(*f) && !args.is_empty() {
                    // position steps of the form 1^k 2 select argument k+1..
                    let n = args.len();
                    let mut ones = 0;
                    while ones < path.len() && path[ones] == 1 {
                        ones += 1;
                    }
                    if ones < n && ones < path.len() && path[ones] == 2 {
                        let arg_index = n - ones; // 1-based from left
                        parts.push(arg_index.to_string());
                        here = args[arg_index - 1].clone();
                        path = &path[ones + 1..];
                        continue 'outer;
                    }
                }
            }
            let step = path[0];
            parts.push(format!("#{step}"));
            here = match here.subterm_at(&Position(vec![step])) {
                Ok(sub) => sub.clone(),
                Err(_) => break,
            };
            path = &path[1..];
        }
        if parts.is_empty() {
            "root".to_string()
        } else {
            parts.join(".")
        }
    }

    // ---- loading ----------------------------------------------------------

    fn add_statement(&mut self, st: &Statement, limits: &Limits) -> Result<(), LoadError> {
        match st {
            Statement::Symbol {
                name,
                ty,
                constant,
                status,
                kind,
                line,
            } => self.add_symbol(name, ty, *constant, *status, *kind, *line, limits),
            Statement::Rule {
                env,
                lhs,
                rhs,
                rho,
                line,
            } => self.add_rule(env, lhs, rhs, rho, *line, limits, st),
            Statement::Eq {
                env,
                lhs,
                rhs,
                rho,
                line,
            } => self.add_equation(env, lhs, rhs, rho, *line, limits, st),
            Statement::Precedence {
                greater,
                smaller,
                line,
            } => {
                let g = self
                    .lookup(greater)
                    .ok_or_else(|| invalid(*line, format!("unknown symbol '{greater}'")))?;
                let s = self
                    .lookup(smaller)
                    .ok_or_else(|| invalid(*line, format!("unknown symbol '{smaller}'")))?;
                self.user_precedence.push((g, s));
                Ok(())
            }
            Statement::Attest { .. } => {
                self.attested_fo_sn = true;
                Ok(())
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn add_symbol(
        &mut self,
        name: &str,
        ty: &Ast,
        constant: bool,
        status: Option<Status>,
        kind: Option<DeclaredKind>,
        line: usize,
        limits: &Limits,
    ) -> Result<(), LoadError> {
        if self.lookup(name).is_some() {
            return Err(invalid(line, format!("symbol '{name}' declared twice")));
        }
        let ty = self.elaborate(ty, false, line)?;
        let sort = match typing::infer(self, &TypingEnv::new(), &ty, limits) {
            Ok(Term::Sort(s)) => s,
            Ok(other) => {
                return Err(invalid(
                    line,
                    format!(
                        "the type of '{name}' must be a type or a kind, but it has type {}",
                        self.show_term(&other)
                    ),
                ))
            }
            Err(e) => {
                return Err(invalid(
                    line,
                    format!("the type of '{name}' is not well-formed: {e}"),
                ))
            }
        };
        let arity = product_prefix_len(&ty);
        let id = SymId(self.symbols.len() as u32);
        self.symbols.push(SymbolDecl {
            name: name.to_string(),
            sort,
            arity,
            ty,
            status: status.unwrap_or(Status::Mul),
            declared_kind: kind,
            declared_constant: constant,
            line,
            kind: SymbolKind::HigherOrder,
            rule_defined: false,
            eq_headed: false,
            primitive: false,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(())
    }

    fn elaborate_env(
        &self,
        env: &[(String, Ast)],
        line: usize,
        limits: &Limits,
    ) -> Result<TypingEnv, LoadError> {
        let mut out = TypingEnv::new();
        for (name, ty_ast) in env {
            if out.lookup(name).is_some() {
                return Err(invalid(line, format!("variable '{name}' declared twice")));
            }
            let ty = self.elaborate(ty_ast, true, line)?;
            match typing::infer(self, &out, &ty, limits) {
                Ok(Term::Sort(_)) => {}
                Ok(other) => {
                    return Err(invalid(
                        line,
                        format!(
                            "the type of '{name}' must be a type or a kind, but it has type {}",
                            self.show_term(&other)
                        ),
                    ))
                }
                Err(e) => {
                    return Err(invalid(
                        line,
                        format!("the type of '{name}' is not well-formed: {e}"),
                    ))
                }
            }
            out.push(name.clone(), ty);
        }
        Ok(out)
    }

    fn elaborate_rho(
        &self,
        rho: &[(String, Ast)],
        env: &TypingEnv,
        line: usize,
    ) -> Result<Substitution, LoadError> {
        let mut out = Substitution::new();
        for (name, t) in rho {
            if env.lookup(name).is_some() {
                return Err(invalid(
                    line,
                    format!("'{name}' is declared in the environment and cannot be substituted"),
                ));
            }
            if out.get(name).is_some() {
                return Err(invalid(line, format!("'{name}' substituted twice")));
            }
            out.insert(name.clone(), self.elaborate(t, true, line)?);
        }
        Ok(out)
    }

    fn head_and_args(&self, t: &Term, line: usize, side: &str) -> Result<(SymId, Vec<Term>), LoadError> {
        let (head, args) = t.spine();
        match head {
            Term::Symb(f) => Ok((*f, args.into_iter().cloned().collect())),
            Term::Var(_) => Err(invalid(
                line,
                format!("the {side} of a rule must not be headed by a variable"),
            )),
            _ => Err(invalid(
                line,
                format!("the {side} of a rule must be a symbol application"),
            )),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn add_rule(
        &mut self,
        env: &[(String, Ast)],
        lhs: &Ast,
        rhs: &Ast,
        rho: &[(String, Ast)],
        line: usize,
        limits: &Limits,
        st: &Statement,
    ) -> Result<(), LoadError> {
        let env = self.elaborate_env(env, line, limits)?;
        let lhs = self.elaborate(lhs, true, line)?;
        let rhs = self.elaborate(rhs, true, line)?;
        let rho = self.elaborate_rho(rho, &env, line)?;
        if !self.is_algebraic(&lhs) {
            return Err(invalid(line, "the left-hand side of a rule must be algebraic"));
        }
        let (head, lhs_args) = self.head_and_args(&lhs, line, "left-hand side")?;
        if self.decl(head).declared_constant {
            return Err(invalid(
                line,
                format!("'{}' is declared constant and cannot head a rule", self.name(head)),
            ));
        }
        let lhs_vars = lhs.free_vars();
        let extra: Vec<String> = rhs
            .free_vars()
            .difference(&lhs_vars)
            .cloned()
            .collect();
        if !extra.is_empty() {
            return Err(invalid(
                line,
                format!(
                    "the right-hand side uses variables not in the left-hand side: {}",
                    extra.join(", ")
                ),
            ));
        }
        self.symbols[head.index()].rule_defined = true;
        self.rules.push(RewriteRule {
            head,
            lhs_args,
            rhs,
            env,
            rho,
            line,
            text: st.to_string(),
        });
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn add_equation(
        &mut self,
        env: &[(String, Ast)],
        lhs: &Ast,
        rhs: &Ast,
        rho: &[(String, Ast)],
        line: usize,
        limits: &Limits,
        st: &Statement,
    ) -> Result<(), LoadError> {
        let env = self.elaborate_env(env, line, limits)?;
        let lhs = self.elaborate(lhs, true, line)?;
        let rhs = self.elaborate(rhs, true, line)?;
        let rho = self.elaborate_rho(rho, &env, line)?;

        let mut violations = Vec::new();
        if !self.is_algebraic(&lhs) {
            violations.push(EquationShapeViolation::LhsNotAlgebraic);
        }
        if !self.is_algebraic(&rhs) {
            violations.push(EquationShapeViolation::RhsNotAlgebraic);
        }
        let lhs_head = match lhs.spine().0 {
            Term::Symb(f) => Some(*f),
            _ => {
                violations.push(EquationShapeViolation::LhsNotSymbolHeaded);
                None
            }
        };
        let rhs_head = match rhs.spine().0 {
            Term::Symb(f) => Some(*f),
            _ => {
                violations.push(EquationShapeViolation::RhsNotSymbolHeaded);
                None
            }
        };
        if lhs.free_vars() != rhs.free_vars() {
            violations.push(EquationShapeViolation::VariableMismatch);
        }

        for head in [lhs_head, rhs_head].into_iter().flatten() {
            if self.decl(head).declared_constant {
                return Err(invalid(
                    line,
                    format!(
                        "'{}' is declared constant and cannot head an equation",
                        self.name(head)
                    ),
                ));
            }
        }

        if violations.is_empty() {
            let (lhs_head, rhs_head) = (lhs_head.unwrap(), rhs_head.unwrap());
            let lhs_args: Vec<Term> = lhs.spine().1.into_iter().cloned().collect();
            let rhs_args: Vec<Term> = rhs.spine().1.into_iter().cloned().collect();
            self.symbols[lhs_head.index()].eq_headed = true;
            self.symbols[rhs_head.index()].eq_headed = true;
            self.equations.push(Equation {
                lhs_head,
                lhs_args,
                rhs_head,
                rhs_args,
                env,
                rho,
                line,
                text: st.to_string(),
            });
        } else {
            for head in [lhs_head, rhs_head].into_iter().flatten() {
                self.symbols[head.index()].eq_headed = true;
            }
            self.malformed_equations.push(MalformedEquation {
                lhs,
                rhs,
                env,
                violations,
                line,
                text: st.to_string(),
            });
        }
        Ok(())
    }

    fn finalize(&mut self, _limits: &Limits) -> Result<(), LoadError> {
        self.build_precedence();
        // primitive cache then classification: first-order function symbols
        // are those whose output is a primitive predicate
        for id in self.symbol_ids().collect::<Vec<_>>() {
            let primitive = self.compute_primitive(id);
            self.symbols[id.index()].primitive = primitive;
        }
        for id in self.symbol_ids().collect::<Vec<_>>() {
            let computed = self.compute_kind(id);
            let decl = &self.symbols[id.index()];
            let kind = match decl.declared_kind {
                Some(DeclaredKind::HigherOrder) => SymbolKind::HigherOrder,
                Some(DeclaredKind::FirstOrder) => {
                    if computed != SymbolKind::FirstOrder {
                        return Err(invalid(
                            decl.line,
                            format!(
                                "'{}' cannot be declared first-order: its output type is not a primitive predicate",
                                decl.name
                            ),
                        ));
                    }
                    SymbolKind::FirstOrder
                }
                None => computed,
            };
            self.symbols[id.index()].kind = kind;
        }
        Ok(())
    }

    fn compute_primitive(&self, c: SymId) -> bool {
        if !self.is_predicate(c) || !self.is_constant(c) {
            return false;
        }
        // not polymorphic: no kind-sorted parameter in the type of c
        let (env, _) = self.telescope(c);
        if env.iter().any(|(_, ty)| self.type_is_kind(ty, &env)) {
            return false;
        }
        for ctor in self.constructors_of(c) {
            let (ctor_env, _) = self.telescope(ctor);
            for (_, ty) in ctor_env.iter() {
                if self.type_is_kind(ty, &ctor_env) {
                    return false;
                }
                if matches!(ty, Term::Prod(_)) {
                    return false; // functional argument
                }
            }
        }
        true
    }

    // A parameter type that is itself a kind (e.g. `*` or `nat => *`)
    // makes the enclosing symbol polymorphic.
    fn type_is_kind(&self, ty: &Term, env: &TypingEnv) -> bool {
        matches!(
            typing::infer(self, env, ty, &Limits::default()),
            Ok(Term::Sort(Sort::Box))
        )
    }

    fn compute_kind(&self, id: SymId) -> SymbolKind {
        let d = self.decl(id);
        match d.sort {
            Sort::Box => {
                // predicate symbol: first-order when of maximal arity
                let (_, output) = self.telescope(id);
                if output == Term::star() {
                    SymbolKind::FirstOrder
                } else {
                    SymbolKind::HigherOrder
                }
            }
            Sort::Star => {
                let (_, output) = self.telescope(id);
                match output.head_symbol() {
                    Some(c) if self.is_primitive(c) => SymbolKind::FirstOrder,
                    _ => SymbolKind::HigherOrder,
                }
            }
        }
    }

    fn build_precedence(&mut self) {
        let n = self.symbols.len();
        let mut graph: DiGraph<(), ()> = DiGraph::new();
        let nodes: Vec<NodeIndex> = (0..n).map(|_| graph.add_node(())).collect();
        let add_edge = |graph: &mut DiGraph<(), ()>, f: SymId, g: SymId| {
            graph.update_edge(nodes[f.index()], nodes[g.index()], ());
        };
        for id in self.symbol_ids() {
            for g in self.decl(id).ty.symbols() {
                add_edge(&mut graph, id, g);
            }
        }
        for rule in &self.rules {
            let mut deps: BTreeSet<SymId> = rule.rhs.symbols();
            for a in &rule.lhs_args {
                deps.extend(a.symbols());
            }
            for g in deps {
                add_edge(&mut graph, rule.head, g);
            }
        }
        for eq in &self.equations {
            let mut deps: BTreeSet<SymId> = BTreeSet::new();
            for a in eq.lhs_args.iter().chain(eq.rhs_args.iter()) {
                deps.extend(a.symbols());
            }
            deps.insert(eq.lhs_head);
            deps.insert(eq.rhs_head);
            for head in [eq.lhs_head, eq.rhs_head] {
                for &g in &deps {
                    add_edge(&mut graph, head, g);
                }
            }
        }
        for &(f, g) in &self.user_precedence {
            add_edge(&mut graph, f, g);
        }

        let sccs = tarjan_scc(&graph);
        let mut class_of = vec![0usize; n];
        for (class, members) in sccs.iter().enumerate() {
            for node in members {
                class_of[node.index()] = class;
            }
        }
        let k = sccs.len();
        // class-level adjacency, then reflexive-transitive closure
        let mut adj = vec![vec![false; k]; k];
        for (i, row) in adj.iter_mut().enumerate() {
            row[i] = true;
        }
        for e in graph.edge_indices() {
            let (a, b) = graph.edge_endpoints(e).unwrap();
            adj[class_of[a.index()]][class_of[b.index()]] = true;
        }
        let mut reach = adj;
        for via in 0..k {
            for a in 0..k {
                if reach[a][via] {
                    let row = reach[via].clone();
                    for (b, reachable) in row.iter().enumerate() {
                        if *reachable {
                            reach[a][b] = true;
                        }
                    }
                }
            }
        }
        self.precedence = Precedence { class_of, reach };
    }
}

fn product_prefix_len(ty: &Term) -> usize {
    match ty {
        Term::Prod(b) => 1 + product_prefix_len(&b.body),
        _ => 0,
    }
}

fn mentions_index(t: &Term, depth: usize) -> bool {
    match t {
        Term::Bound(i) => *i == depth,
        Term::Sort(_) | Term::Var(_) | Term::Symb(_) => false,
        Term::Abs(b) | Term::Prod(b) => {
            mentions_index(&b.dom, depth) || mentions_index(&b.body, depth + 1)
        }
        Term::App(f, a) => mentions_index(f, depth) || mentions_index(a, depth),
    }
}

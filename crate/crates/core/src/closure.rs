//! The computability-closure criterion for rules and equations.
//!
//! A rule passes when every environment variable is accessible in some
//! left-hand side argument and the (repaired) right-hand side is typable
//! in a restricted system where a symbol call is only allowed when the
//! callee is strictly below the head in the precedence, or equivalent to
//! it with arguments strictly smaller in the status extension of the
//! subterm ordering. An equation passes when each argument of the other
//! side is typable this way, in both orientations.
//!
//! The restricted typing mirrors ordinary inference rule by rule:
//! sorts (ax), symbol references (symb-lt / symb-eq), local variables
//! (var/weak), abstraction (abs), application (app), products (prod) and
//! conversion (conv), where conversion only reduces with beta and the
//! rules of symbols strictly below the head.

use std::collections::BTreeSet;

use crate::limits::Limits;
use crate::reduction::{restricted_normalize, ReduceError};
use crate::signature::{EqDirection, Equation, RewriteRule, Signature, Status};
use crate::term::{fresh_name, Sort, SymId, Term};
use crate::typing::TypingEnv;

/// Polarity of the occurrences of a symbol inside a type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Positivity {
    OnlyPositive,
    HasNegative,
    Absent,
}

/// Classify the occurrences of `c` in `t`. Polarity flips on product
/// domains: `c` is positive in `d => c` and negative in `c => d`.
pub fn positive_occurrence(c: SymId, t: &Term) -> Positivity {
    let mut seen = false;
    let mut negative = false;
    fn walk(c: SymId, t: &Term, positive: bool, seen: &mut bool, negative: &mut bool) {
        match t {
            Term::Symb(f) if *f == c => {
                *seen = true;
                if !positive {
                    *negative = true;
                }
            }
            Term::Sort(_) | Term::Bound(_) | Term::Var(_) | Term::Symb(_) => {}
            Term::Prod(b) => {
                walk(c, &b.dom, !positive, seen, negative);
                walk(c, &b.body, positive, seen, negative);
            }
            Term::Abs(b) => {
                walk(c, &b.dom, positive, seen, negative);
                walk(c, &b.body, positive, seen, negative);
            }
            Term::App(f, a) => {
                walk(c, f, positive, seen, negative);
                walk(c, a, positive, seen, negative);
            }
        }
    }
    walk(c, t, true, &mut seen, &mut negative);
    if !seen {
        Positivity::Absent
    } else if negative {
        Positivity::HasNegative
    } else {
        Positivity::OnlyPositive
    }
}

/// Which argument positions of `f` propagate accessibility.
///
/// Arguments of a constructor (a function symbol without rewrite rules)
/// are always accessible. For a rule-defined function symbol whose output
/// type is headed by a constant predicate `c`, the arguments whose
/// declared type contains `c` only positively are accessible.
fn accessible_arg_positions(sig: &Signature, f: SymId) -> Vec<bool> {
    let arity = sig.arity(f);
    if !sig.is_function(f) {
        return vec![false; arity];
    }
    if !sig.is_rule_defined(f) {
        return vec![true; arity];
    }
    let (env, output) = sig.telescope(f);
    let Some(c) = output.head_symbol() else {
        return vec![false; arity];
    };
    if sig.is_rule_defined(c) || !sig.is_predicate(c) {
        return vec![false; arity];
    }
    env.iter()
        .map(|(_, ty)| positive_occurrence(c, ty) == Positivity::OnlyPositive)
        .collect()
}

fn collect_accessible_vars(sig: &Signature, t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(x) => {
            out.insert(x.clone());
        }
        _ => {
            let (head, args) = t.spine();
            if let Term::Symb(f) = head {
                if args.len() == sig.arity(*f) {
                    let positions = accessible_arg_positions(sig, *f);
                    for (arg, ok) in args.iter().zip(positions) {
                        if ok {
                            collect_accessible_vars(sig, arg, out);
                        }
                    }
                }
            }
        }
    }
}

/// Variables reachable from the arguments through accessible positions.
pub fn accessible_vars(sig: &Signature, args: &[Term]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for arg in args {
        collect_accessible_vars(sig, arg, &mut out);
    }
    out
}

/// Strict subterm: `sub` occurs in `sup` and differs from it.
pub fn strict_subterm(sub: &Term, sup: &Term) -> bool {
    fn occurs(sub: &Term, t: &Term) -> bool {
        if sub == t {
            return true;
        }
        match t {
            Term::Sort(_) | Term::Bound(_) | Term::Var(_) | Term::Symb(_) => false,
            Term::Abs(b) | Term::Prod(b) => occurs(sub, &b.dom) || occurs(sub, &b.body),
            Term::App(f, a) => occurs(sub, f) || occurs(sub, a),
        }
    }
    sub != sup && occurs(sub, sup)
}

fn multiset_less(us: &[Term], ls: &[Term]) -> bool {
    // remove pairwise equal elements, then every remaining element on the
    // left must be a strict subterm of some remaining element on the right
    let mut remaining_ls: Vec<&Term> = ls.iter().collect();
    let mut remaining_us: Vec<&Term> = Vec::new();
    for u in us {
        if let Some(i) = remaining_ls.iter().position(|l| *l == u) {
            remaining_ls.remove(i);
        } else {
            remaining_us.push(u);
        }
    }
    !remaining_ls.is_empty()
        && remaining_us
            .iter()
            .all(|u| remaining_ls.iter().any(|l| strict_subterm(u, l)))
}

fn lex_less(us: &[Term], ls: &[Term]) -> bool {
    for (u, l) in us.iter().zip(ls.iter()) {
        if u == l {
            continue;
        }
        return strict_subterm(u, l);
    }
    us.len() < ls.len()
}

/// Status extension of the strict subterm ordering: `us` strictly below
/// `ls` under the given status.
pub fn status_less(us: &[Term], ls: &[Term], status: Status) -> bool {
    match status {
        Status::Mul => multiset_less(us, ls),
        Status::Lex => lex_less(us, ls),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ClosureError {
    #[error("({rule}) {message}")]
    Fail { rule: &'static str, message: String },
    #[error(transparent)]
    Resource(#[from] ReduceError),
}

fn fail<T>(rule: &'static str, message: impl Into<String>) -> Result<T, ClosureError> {
    Err(ClosureError::Fail {
        rule,
        message: message.into(),
    })
}

/// Everything fixed while checking one rule or one equation orientation:
/// the head symbol, the left-hand side arguments the recursive calls are
/// compared against, and the environment whose variables act as symbols
/// below the head.
pub struct ClosureContext<'a> {
    pub sig: &'a Signature,
    pub head: SymId,
    pub lhs_args: &'a [Term],
    pub gamma: &'a TypingEnv,
    pub limits: &'a Limits,
}

impl<'a> ClosureContext<'a> {
    pub fn new(
        sig: &'a Signature,
        head: SymId,
        lhs_args: &'a [Term],
        gamma: &'a TypingEnv,
        limits: &'a Limits,
    ) -> ClosureContext<'a> {
        ClosureContext {
            sig,
            head,
            lhs_args,
            gamma,
            limits,
        }
    }

    fn show(&self, t: &Term) -> String {
        self.sig.show_term(t)
    }

    // Conversion for the restricted system: common reduct under beta and
    // the rules of symbols strictly below the head, approximated by
    // comparing normal forms.
    fn conv(&self, a: &Term, b: &Term) -> Result<bool, ClosureError> {
        if a == b {
            return Ok(true);
        }
        let na = restricted_normalize(a, self.head, self.sig, self.limits)?;
        let nb = restricted_normalize(b, self.head, self.sig, self.limits)?;
        Ok(na == nb)
    }

    fn infer(&self, delta: &TypingEnv, t: &Term) -> Result<Term, ClosureError> {
        match t {
            Term::Sort(Sort::Star) => Ok(Term::boxed()),
            Term::Sort(Sort::Box) => fail("ax", "'box' has no type"),
            Term::Bound(i) => fail("var", format!("dangling binder index {i}")),
            Term::Var(x) => {
                if let Some(ty) = delta.lookup(x) {
                    return Ok(ty.clone());
                }
                if let Some(ty) = self.gamma.lookup(x) {
                    // environment variables act as symbols below the head;
                    // their types may only use symbols below the head
                    for h in ty.symbols() {
                        if !self.sig.precedence.gt(self.head, h) {
                            return fail(
                                "symb-lt",
                                format!(
                                    "the type of environment variable '{x}' uses '{}', which is not below '{}'",
                                    self.sig.name(h),
                                    self.sig.name(self.head)
                                ),
                            );
                        }
                    }
                    return Ok(ty.clone());
                }
                fail("var", format!("unbound variable '{x}'"))
            }
            Term::Symb(_) | Term::App(_, _) => {
                let (head, args) = t.spine();
                match head {
                    Term::Symb(g) => self.infer_symbol_call(delta, t, *g, &args),
                    _ => {
                        let head_ty = self.infer(delta, head)?;
                        self.apply_args(delta, head, head_ty, &args)
                    }
                }
            }
            Term::Abs(b) => {
                self.infer_sort(delta, &b.dom)?;
                let x = self.fresh(delta, &b.body);
                let mut inner = delta.clone();
                inner.push(x.clone(), (*b.dom).clone());
                let body = b.body.opened(&Term::var(x.clone()));
                let body_ty = self.infer(&inner, &body)?;
                self.infer_sort(&inner, &body_ty)?;
                Ok(Term::prod(b.hint.clone(), (*b.dom).clone(), body_ty.closed(&x)))
            }
            Term::Prod(b) => {
                self.infer_sort(delta, &b.dom)?;
                let x = self.fresh(delta, &b.body);
                let mut inner = delta.clone();
                inner.push(x.clone(), (*b.dom).clone());
                let body = b.body.opened(&Term::var(x));
                let s2 = self.infer_sort(&inner, &body)?;
                Ok(Term::Sort(s2))
            }
        }
    }

    fn infer_symbol_call(
        &self,
        delta: &TypingEnv,
        whole: &Term,
        g: SymId,
        args: &[&Term],
    ) -> Result<Term, ClosureError> {
        let sig = self.sig;
        if sig.precedence.gt(self.head, g) {
            // symb-lt: smaller symbols may be used at their declared type
            return self.apply_args(delta, &Term::Symb(g), sig.decl(g).ty.clone(), args);
        }
        if sig.precedence.equiv(self.head, g) {
            let arity = sig.arity(g);
            if args.len() < arity {
                return fail(
                    "symb-eq",
                    format!(
                        "'{}' is equivalent to the head and must be applied to {arity} arguments",
                        sig.name(g)
                    ),
                );
            }
            let (call_args, rest) = args.split_at(arity);
            let call_args_owned: Vec<Term> = call_args.iter().map(|t| (*t).clone()).collect();
            let status = sig.status(self.head);
            if !status_less(&call_args_owned, self.lhs_args, status) {
                let shown: Vec<String> = call_args_owned.iter().map(|t| self.show(t)).collect();
                let lhs: Vec<String> = self.lhs_args.iter().map(|t| self.show(t)).collect();
                return fail(
                    "symb-eq",
                    format!(
                        "arguments ({}) of '{}' are not strictly smaller than ({}) under the {} status",
                        shown.join(", "),
                        sig.name(g),
                        lhs.join(", "),
                        match status {
                            Status::Mul => "multiset",
                            Status::Lex => "lexicographic",
                        }
                    ),
                );
            }
            let mut ty = sig.decl(g).ty.clone();
            for arg in call_args {
                match ty {
                    Term::Prod(b) => {
                        self.check(delta, arg, &b.dom)?;
                        ty = b.body.opened(arg);
                    }
                    other => {
                        return fail(
                            "app",
                            format!("'{}' has non-functional type '{}'", sig.name(g), self.show(&other)),
                        )
                    }
                }
            }
            return self.apply_args(delta, whole, ty, rest);
        }
        fail(
            "symb-lt",
            format!(
                "'{}' is not below '{}' in the precedence",
                sig.name(g),
                sig.name(self.head)
            ),
        )
    }

    fn apply_args(
        &self,
        delta: &TypingEnv,
        fun: &Term,
        mut fun_ty: Term,
        args: &[&Term],
    ) -> Result<Term, ClosureError> {
        for arg in args {
            if !matches!(fun_ty, Term::Prod(_)) {
                fun_ty = restricted_normalize(&fun_ty, self.head, self.sig, self.limits)?;
            }
            match fun_ty {
                Term::Prod(b) => {
                    self.check(delta, arg, &b.dom)?;
                    fun_ty = b.body.opened(arg);
                }
                other => {
                    return fail(
                        "app",
                        format!(
                            "'{}' is applied as a function but has type '{}'",
                            self.show(fun),
                            self.show(&other)
                        ),
                    )
                }
            }
        }
        Ok(fun_ty)
    }

    fn infer_sort(&self, delta: &TypingEnv, t: &Term) -> Result<Sort, ClosureError> {
        if *t == Term::boxed() {
            return fail("ax", "'box' has no type");
        }
        let ty = self.infer(delta, t)?;
        match restricted_normalize(&ty, self.head, self.sig, self.limits)? {
            Term::Sort(s) => Ok(s),
            other => fail(
                "prod",
                format!(
                    "'{}' of type '{}' is not a type or a kind",
                    self.show(t),
                    self.show(&other)
                ),
            ),
        }
    }

    fn check(&self, delta: &TypingEnv, t: &Term, expected: &Term) -> Result<(), ClosureError> {
        let found = self.infer(delta, t)?;
        if self.conv(&found, expected)? {
            Ok(())
        } else {
            fail(
                "conv",
                format!(
                    "'{}' has type '{}', expected '{}'",
                    self.show(t),
                    self.show(&found),
                    self.show(expected)
                ),
            )
        }
    }

    fn fresh(&self, delta: &TypingEnv, body: &Term) -> String {
        let mut taken: BTreeSet<String> = delta.names().cloned().collect();
        taken.extend(self.gamma.names().cloned());
        taken.extend(body.free_vars());
        fresh_name("x", &taken)
    }
}

/// Decide whether `t` has type `expected` in the computability closure
/// of the context's left-hand side.
pub fn closure_check(ctx: &ClosureContext<'_>, t: &Term, expected: &Term) -> Result<(), ClosureError> {
    ctx.check(&TypingEnv::new(), t, expected)
}

/// Verdict for a rule: accessibility of every environment variable plus
/// the closure check of the repaired right-hand side at the instantiated
/// output type.
#[derive(Clone, Debug)]
pub struct SchemaRuleVerdict {
    pub inaccessible_vars: Vec<String>,
    pub failure: Option<ClosureError>,
}

impl SchemaRuleVerdict {
    pub fn pass(&self) -> bool {
        self.inaccessible_vars.is_empty() && self.failure.is_none()
    }

    pub fn describe(&self) -> String {
        if self.pass() {
            return "pass".to_string();
        }
        let mut parts = Vec::new();
        if !self.inaccessible_vars.is_empty() {
            parts.push(format!(
                "inaccessible environment variables: {}",
                self.inaccessible_vars.join(", ")
            ));
        }
        if let Some(err) = &self.failure {
            parts.push(err.to_string());
        }
        parts.join("; ")
    }
}

pub fn general_schema_rule(sig: &Signature, rule: &RewriteRule, limits: &Limits) -> SchemaRuleVerdict {
    let accessible = accessible_vars(sig, &rule.lhs_args);
    let inaccessible_vars: Vec<String> = rule
        .env
        .domain()
        .into_iter()
        .filter(|x| !accessible.contains(x))
        .collect();
    let ctx = ClosureContext::new(sig, rule.head, &rule.lhs_args, &rule.env, limits);
    let expected = crate::typing::output_type(sig, rule.head, &rule.lhs_args).apply_subst(&rule.rho);
    let rhs = rule.rhs.apply_subst(&rule.rho);
    let failure = closure_check(&ctx, &rhs, &expected).err();
    SchemaRuleVerdict {
        inaccessible_vars,
        failure,
    }
}

/// Verdict for one orientation of an equation: every argument of the
/// other side must be in the computability closure of this side.
#[derive(Clone, Debug)]
pub struct SchemaDirectionVerdict {
    pub direction: EqDirection,
    pub inaccessible_vars: Vec<String>,
    /// (argument index, failure)
    pub arg_failures: Vec<(usize, ClosureError)>,
}

impl SchemaDirectionVerdict {
    pub fn pass(&self) -> bool {
        self.inaccessible_vars.is_empty() && self.arg_failures.is_empty()
    }

    pub fn describe(&self) -> String {
        if self.pass() {
            return "pass".to_string();
        }
        let mut parts = Vec::new();
        if !self.inaccessible_vars.is_empty() {
            parts.push(format!(
                "inaccessible environment variables: {}",
                self.inaccessible_vars.join(", ")
            ));
        }
        for (i, err) in &self.arg_failures {
            parts.push(format!("argument {}: {err}", i + 1));
        }
        parts.join("; ")
    }
}

#[derive(Clone, Debug)]
pub struct SchemaEquationVerdict {
    pub directions: Vec<SchemaDirectionVerdict>,
}

impl SchemaEquationVerdict {
    /// Both orientations must pass.
    pub fn pass(&self) -> bool {
        self.directions.iter().all(|d| d.pass())
    }
}

pub fn general_schema_equation(sig: &Signature, eq: &Equation, limits: &Limits) -> SchemaEquationVerdict {
    let directions = EqDirection::BOTH
        .iter()
        .map(|&dir| {
            let (this_head, this_args, other_head, other_args) = match dir {
                EqDirection::LeftToRight => (eq.lhs_head, &eq.lhs_args, eq.rhs_head, &eq.rhs_args),
                EqDirection::RightToLeft => (eq.rhs_head, &eq.rhs_args, eq.lhs_head, &eq.lhs_args),
            };
            let accessible = accessible_vars(sig, this_args);
            let inaccessible_vars: Vec<String> = eq
                .env
                .domain()
                .into_iter()
                .filter(|x| !accessible.contains(x))
                .collect();
            let ctx = ClosureContext::new(sig, this_head, this_args, &eq.env, limits);
            let mut arg_failures = Vec::new();
            let mut ty = sig.decl(other_head).ty.clone();
            for (i, m) in other_args.iter().enumerate() {
                match ty {
                    Term::Prod(b) => {
                        let expected = b.dom.apply_subst(&eq.rho);
                        let arg = m.apply_subst(&eq.rho);
                        if let Err(e) = closure_check(&ctx, &arg, &expected) {
                            arg_failures.push((i, e));
                        }
                        ty = b.body.opened(m);
                    }
                    _ => break,
                }
            }
            SchemaDirectionVerdict {
                direction: dir,
                inaccessible_vars,
                arg_failures,
            }
        })
        .collect();
    SchemaEquationVerdict { directions }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NAT_AC: &str = "\
symbol nat : *
symbol zero : nat
symbol s : nat => nat
symbol plus : nat => nat => nat status mul
rule [x:nat] plus x zero -> x
rule [x:nat, y:nat] plus x (s y) -> s (plus x y)
eq [x:nat, y:nat] plus x y = plus y x
eq [x:nat, y:nat, z:nat] plus x (plus y z) = plus (plus x y) z
";

    const LISTS: &str = "\
symbol nat : *
symbol list : * => *
symbol nil : (A:*) list A
symbol cons : (A:*) A => list A => list A
symbol app : (A:*) list A => list A => list A status lex
rule [A:*, l':list A] app A (nil A') l' -> l' with A' := A
rule [A:*, x:A, l:list A, l':list A] app A (cons A' x l) l' -> cons A x (app A l l') with A' := A
rule [A:*, l:list A, l':list A, l'':list A] app A (app A' l l') l'' -> app A l (app A l' l'') with A' := A
";

    const SETS: &str = "\
symbol set : * => *
symbol empty : (A:*) set A
symbol add : (A:*) A => set A => set A
symbol union : (A:*) set A => set A => set A
eq [A:*, x:A, y:A, S:set A] add A x (add A' y S) = add A y (add A' x S) with A' := A
eq [A:*, S:set A, S':set A] union A S S' = union A S' S
eq [A:*, S:set A, S':set A, S'':set A] union A S (union A' S' S'') = union A (union A' S S') S'' with A' := A
";

    fn sig(src: &str) -> Signature {
        Signature::from_source(src).expect("load")
    }

    fn t(sig: &Signature, src: &str) -> Term {
        sig.parse_term(src).expect("term")
    }

    #[test]
    fn positivity() {
        let s = sig(NAT_AC);
        let nat = s.lookup("nat").unwrap();
        assert_eq!(positive_occurrence(nat, &t(&s, "nat")), Positivity::OnlyPositive);
        assert_eq!(positive_occurrence(nat, &t(&s, "nat => d")), Positivity::HasNegative);
        assert_eq!(positive_occurrence(nat, &t(&s, "d => nat")), Positivity::OnlyPositive);
        assert_eq!(positive_occurrence(nat, &t(&s, "d")), Positivity::Absent);
        // nested flip: ((nat => d) => d) is positive again
        assert_eq!(
            positive_occurrence(nat, &t(&s, "(nat => d) => d")),
            Positivity::OnlyPositive
        );
    }

    #[test]
    fn accessibility_through_constructors() {
        let s = sig(NAT_AC);
        let acc = accessible_vars(&s, &[t(&s, "x"), t(&s, "s y")]);
        assert_eq!(acc.into_iter().collect::<Vec<_>>(), vec!["x", "y"]);
    }

    #[test]
    fn accessibility_through_defined_symbols_needs_positivity() {
        let s = sig(NAT_AC);
        // plus is rule-defined with output nat; nat occurs positively in
        // both argument types, so y and z are accessible in y+z
        let acc = accessible_vars(&s, &[t(&s, "x"), t(&s, "plus y z")]);
        assert_eq!(acc.into_iter().collect::<Vec<_>>(), vec!["x", "y", "z"]);
    }

    #[test]
    fn accessibility_in_app_lhs() {
        let s = sig(LISTS);
        let acc = accessible_vars(&s, &[t(&s, "A"), t(&s, "cons A' x l"), t(&s, "l'")]);
        // A' is reachable too (constructor argument), but the required
        // environment variables A, x, l, l' are all there
        for v in ["A", "x", "l", "l'"] {
            assert!(acc.contains(v), "missing {v}");
        }
    }

    #[test]
    fn status_comparisons() {
        let s = sig(NAT_AC);
        let x = t(&s, "x");
        let y = t(&s, "y");
        let sy = t(&s, "s y");
        let ypz = t(&s, "plus y z");
        // {x, y} < {x, y+z} since y is a strict subterm of y+z
        assert!(status_less(
            &[x.clone(), y.clone()],
            &[x.clone(), ypz.clone()],
            Status::Mul
        ));
        // irreflexive
        assert!(!status_less(&[x.clone(), y.clone()], &[x.clone(), y.clone()], Status::Mul));
        // (y, x) <lex (s y, x): strict decrease in the first position
        assert!(status_less(&[y.clone(), x.clone()], &[sy.clone(), x.clone()], Status::Lex));
        assert!(!status_less(&[sy.clone(), x.clone()], &[sy.clone(), x.clone()], Status::Lex));
        // lex ignores later positions after a strict decrease
        assert!(status_less(&[y.clone(), ypz.clone()], &[sy, x], Status::Lex));
    }

    #[test]
    fn plus_rules_pass_the_schema() {
        let s = sig(NAT_AC);
        let limits = Limits::default();
        for rule in &s.rules {
            let v = general_schema_rule(&s, rule, &limits);
            assert!(v.pass(), "{}: {}", rule.text, v.describe());
        }
    }

    #[test]
    fn app_rules_pass_the_schema() {
        let s = sig(LISTS);
        let limits = Limits::default();
        for rule in &s.rules {
            let v = general_schema_rule(&s, rule, &limits);
            assert!(v.pass(), "{}: {}", rule.text, v.describe());
        }
    }

    #[test]
    fn self_call_on_same_arguments_fails() {
        let s = sig(
            "symbol nat : *\n\
             symbol f : nat => nat\n\
             rule [x:nat] f x -> f x\n",
        );
        let limits = Limits::default();
        let v = general_schema_rule(&s, &s.rules[0], &limits);
        assert!(!v.pass());
        let msg = v.describe();
        assert!(msg.contains("symb-eq"), "{msg}");
    }

    #[test]
    fn commutativity_and_associativity_pass() {
        let s = sig(NAT_AC);
        let limits = Limits::default();
        for eq in &s.equations {
            let v = general_schema_equation(&s, eq, &limits);
            assert!(v.pass(), "{}", eq.text);
            assert_eq!(v.directions.len(), 2);
            for d in &v.directions {
                assert!(d.pass(), "{}: {}", eq.text, d.describe());
            }
        }
    }

    #[test]
    fn set_equations_pass() {
        let s = sig(SETS);
        let limits = Limits::default();
        assert_eq!(s.equations.len(), 3);
        for eq in &s.equations {
            let v = general_schema_equation(&s, eq, &limits);
            assert!(v.pass(), "{}: {:?}", eq.text, v.directions.iter().map(|d| d.describe()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn associativity_needs_decreasing_arguments() {
        // an equation whose argument is not smaller fails: u x y = u (u x y) y
        let s = sig(
            "symbol nat : *\n\
             symbol u : nat => nat => nat\n\
             eq [x:nat, y:nat] u x y = u (u x y) y\n",
        );
        let limits = Limits::default();
        let v = general_schema_equation(&s, &s.equations[0], &limits);
        assert!(!v.pass());
    }

    #[test]
    fn multiset_status_is_a_strict_partial_order() {
        let s = sig(NAT_AC);
        // small universe of terms up to depth 3
        let terms: Vec<Term> = [
            "x", "y", "zero", "s x", "s zero", "plus x y", "plus x zero", "s (s x)",
            "plus (s x) y",
        ]
        .iter()
        .map(|src| t(&s, src))
        .collect();
        let mut tuples: Vec<Vec<Term>> = Vec::new();
        for a in &terms {
            for b in &terms {
                tuples.push(vec![a.clone(), b.clone()]);
            }
        }
        // irreflexivity
        for tup in &tuples {
            assert!(!status_less(tup, tup, Status::Mul), "{tup:?}");
        }
        // transitivity
        for a in &tuples {
            for b in &tuples {
                if !status_less(a, b, Status::Mul) {
                    continue;
                }
                for c in &tuples {
                    if status_less(b, c, Status::Mul) {
                        assert!(status_less(a, c, Status::Mul), "{a:?} {b:?} {c:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn passing_rules_have_all_environment_variables_accessible() {
        let limits = Limits::default();
        for src in [NAT_AC, LISTS, SETS] {
            let s = sig(src);
            for rule in &s.rules {
                if general_schema_rule(&s, rule, &limits).pass() {
                    let acc = accessible_vars(&s, &rule.lhs_args);
                    for x in rule.env.domain() {
                        assert!(acc.contains(&x), "{}: {x}", rule.text);
                    }
                }
            }
        }
    }

    #[test]
    fn coarser_precedence_preserves_smaller_symbol_passes() {
        // merging zero and s into one class keeps them strictly below
        // plus, so calls that were below the head stay below the head
        let merged = Signature::from_source(
            "symbol nat : *\n\
             symbol zero : nat\n\
             symbol s : nat => nat\n\
             symbol plus : nat => nat => nat status mul\n\
             rule [x:nat] plus x zero -> x\n\
             rule [x:nat, y:nat] plus x (s y) -> s (plus x y)\n\
             precedence zero > s\n\
             precedence s > zero\n",
        )
        .unwrap();
        let limits = Limits::default();
        let plus = merged.lookup("plus").unwrap();
        let sctor = merged.lookup("s").unwrap();
        let zero = merged.lookup("zero").unwrap();
        assert!(merged.precedence.equiv(zero, sctor));
        assert!(merged.precedence.gt(plus, sctor));
        for rule in &merged.rules {
            let v = general_schema_rule(&merged, rule, &limits);
            assert!(v.pass(), "{}: {}", rule.text, v.describe());
        }
    }

    #[test]
    fn merging_a_called_symbol_into_the_head_class_is_restrictive() {
        // when s joins plus's class, the call s (plus x y) becomes an
        // equal-symbol call whose argument tuple is not smaller
        let merged = Signature::from_source(
            "symbol nat : *\n\
             symbol zero : nat\n\
             symbol s : nat => nat\n\
             symbol plus : nat => nat => nat status mul\n\
             rule [x:nat, y:nat] plus x (s y) -> s (plus x y)\n\
             precedence s > plus\n",
        )
        .unwrap();
        let limits = Limits::default();
        let plus = merged.lookup("plus").unwrap();
        let sctor = merged.lookup("s").unwrap();
        assert!(merged.precedence.equiv(plus, sctor));
        let v = general_schema_rule(&merged, &merged.rules[0], &limits);
        assert!(!v.pass());
    }
}

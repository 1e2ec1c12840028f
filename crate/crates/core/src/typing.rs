//! Typing: sort inference, type checking with conversion modulo the
//! rules and equations, and the per-rule typing obligations.
//!
//! The calculus is the functional pure type system over `*` and `box`
//! with the axiom `* : box` and products formed at every sort pair.
//! Conversion normalizes both types and compares the normal forms modulo
//! the equations.

use std::collections::BTreeSet;

use crate::limits::Limits;
use crate::reduction::{self, ReduceError};
use crate::signature::{RewriteRule, Signature};
use crate::term::{fresh_name, Sort, Substitution, Term};

/// An ordered list of typed variable declarations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypingEnv {
    entries: Vec<(String, Term)>,
}

impl TypingEnv {
    pub fn new() -> TypingEnv {
        TypingEnv::default()
    }

    pub fn push(&mut self, name: String, ty: Term) {
        self.entries.push((name, ty));
    }

    pub fn lookup(&self, name: &str) -> Option<&Term> {
        self.entries
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(String, Term)> {
        self.entries.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.entries.iter().map(|(n, _)| n)
    }

    pub fn domain(&self) -> BTreeSet<String> {
        self.names().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl FromIterator<(String, Term)> for TypingEnv {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> TypingEnv {
        TypingEnv {
            entries: iter.into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("unbound variable '{0}'")]
    UnboundVar(String),
    #[error("dangling binder index {0}")]
    DanglingIndex(usize),
    #[error("'box' has no type")]
    BoxUntyped,
    #[error("'{term}' is applied as a function but has type '{ty}'")]
    NotAFunction { term: String, ty: String },
    #[error("'{term}' of type '{ty}' is not a type or a kind")]
    NotASort { term: String, ty: String },
    #[error("'{term}' has type '{found}', expected a type convertible to '{expected}'")]
    Mismatch {
        term: String,
        found: String,
        expected: String,
    },
    #[error(transparent)]
    Reduce(#[from] ReduceError),
}

impl TypeError {
    /// Resource errors must surface; other errors mean "ill-typed".
    pub fn is_resource(&self) -> bool {
        matches!(self, TypeError::Reduce(_))
    }
}

/// A verified typing judgment.
#[derive(Clone, Debug)]
pub struct Judgment {
    pub env: TypingEnv,
    pub subject: Term,
    pub ty: Term,
}

fn fresh_for(env: &TypingEnv, hint: &str, body: &Term) -> String {
    let mut taken: BTreeSet<String> = env.names().cloned().collect();
    taken.extend(body.free_vars());
    fresh_name(hint, &taken)
}

/// Infer a type for `t`, principal up to conversion.
pub fn infer(sig: &Signature, env: &TypingEnv, t: &Term, limits: &Limits) -> Result<Term, TypeError> {
    match t {
        Term::Sort(Sort::Star) => Ok(Term::boxed()),
        Term::Sort(Sort::Box) => Err(TypeError::BoxUntyped),
        Term::Bound(i) => Err(TypeError::DanglingIndex(*i)),
        Term::Var(x) => env
            .lookup(x)
            .cloned()
            .ok_or_else(|| TypeError::UnboundVar(x.clone())),
        Term::Symb(f) => Ok(sig.decl(*f).ty.clone()),
        Term::App(f, a) => {
            let fun_ty = infer(sig, env, f, limits)?;
            let fun_ty = reduction::normalize(&fun_ty, sig, limits)?;
            match fun_ty {
                Term::Prod(b) => {
                    checked(sig, env, a, &b.dom, limits)?;
                    Ok(b.body.opened(a))
                }
                other => Err(TypeError::NotAFunction {
                    term: sig.show_term(f),
                    ty: sig.show_term(&other),
                }),
            }
        }
        Term::Abs(b) => {
            infer_sort(sig, env, &b.dom, limits)?;
            let x = fresh_for(env, &b.hint, &b.body);
            let mut inner = env.clone();
            inner.push(x.clone(), (*b.dom).clone());
            let body = b.body.opened(&Term::var(x.clone()));
            let body_ty = infer(sig, &inner, &body, limits)?;
            // the product formed must itself be well-sorted
            infer_sort(sig, &inner, &body_ty, limits)?;
            Ok(Term::prod(b.hint.clone(), (*b.dom).clone(), body_ty.closed(&x)))
        }
        Term::Prod(b) => {
            infer_sort(sig, env, &b.dom, limits)?;
            let x = fresh_for(env, &b.hint, &b.body);
            let mut inner = env.clone();
            inner.push(x.clone(), (*b.dom).clone());
            let body = b.body.opened(&Term::var(x));
            let s2 = infer_sort(sig, &inner, &body, limits)?;
            Ok(Term::Sort(s2))
        }
    }
}

/// Infer and require a sort.
pub fn infer_sort(
    sig: &Signature,
    env: &TypingEnv,
    t: &Term,
    limits: &Limits,
) -> Result<Sort, TypeError> {
    // `box` is the type of `*` but is not itself typable; a kind-level
    // term has type `box` directly.
    if *t == Term::boxed() {
        return Err(TypeError::BoxUntyped);
    }
    let ty = infer(sig, env, t, limits)?;
    match ty {
        Term::Sort(s) => Ok(s),
        other => match reduction::normalize(&other, sig, limits)? {
            Term::Sort(s) => Ok(s),
            nf => Err(TypeError::NotASort {
                term: sig.show_term(t),
                ty: sig.show_term(&nf),
            }),
        },
    }
}

/// Check `t : expected`; ill-typedness is an error carrying the failing
/// sub-judgment.
pub fn checked(
    sig: &Signature,
    env: &TypingEnv,
    t: &Term,
    expected: &Term,
    limits: &Limits,
) -> Result<(), TypeError> {
    let found = infer(sig, env, t, limits)?;
    if found == *expected {
        return Ok(());
    }
    // the expected type must itself be well-sorted (box is allowed as the
    // type of kinds and is not typable)
    if *expected != Term::boxed() {
        infer_sort(sig, env, expected, limits)?;
    }
    if reduction::joinable_modulo(&found, expected, sig, limits)? {
        Ok(())
    } else {
        Err(TypeError::Mismatch {
            term: sig.show_term(t),
            found: sig.show_term(&found),
            expected: sig.show_term(expected),
        })
    }
}

/// Boolean form of `checked`: ill-typedness is `false`, resource
/// exhaustion an error.
pub fn check(
    sig: &Signature,
    env: &TypingEnv,
    t: &Term,
    expected: &Term,
    limits: &Limits,
) -> Result<bool, TypeError> {
    match checked(sig, env, t, expected, limits) {
        Ok(()) => Ok(true),
        Err(e) if e.is_resource() => Err(e),
        Err(_) => Ok(false),
    }
}

/// Infer and package a judgment.
pub fn judge(sig: &Signature, env: &TypingEnv, t: &Term, limits: &Limits) -> Result<Judgment, TypeError> {
    let ty = infer(sig, env, t, limits)?;
    Ok(Judgment {
        env: env.clone(),
        subject: t.clone(),
        ty,
    })
}

/// `theta : gamma ~> delta`: every variable declared in `gamma` maps to a
/// term typable in `delta` at the instantiated declared type.
pub fn substitution_preserves_typing(
    sig: &Signature,
    theta: &Substitution,
    gamma: &TypingEnv,
    delta: &TypingEnv,
    limits: &Limits,
) -> Result<bool, TypeError> {
    for (x, ty) in gamma.iter() {
        let image = theta.get(x).cloned().unwrap_or_else(|| Term::var(x.clone()));
        let expected = ty.apply_subst(theta);
        if !check(sig, delta, &image, &expected, limits)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Result of the two typing obligations attached to a rule: the
/// repaired left-hand side and the right-hand side must both have the
/// instantiated output type in the rule's environment.
#[derive(Clone, Debug)]
pub struct RuleTypingVerdict {
    pub expected_type: Term,
    pub lhs_error: Option<String>,
    pub rhs_error: Option<String>,
}

impl RuleTypingVerdict {
    pub fn pass(&self) -> bool {
        self.lhs_error.is_none() && self.rhs_error.is_none()
    }
}

/// Instantiated output type of `head` applied to `args`: the product
/// prefix of the head's type opened with the arguments.
pub fn output_type(sig: &Signature, head: crate::term::SymId, args: &[Term]) -> Term {
    let mut ty = sig.decl(head).ty.clone();
    for a in args {
        match ty {
            Term::Prod(b) => ty = b.body.opened(a),
            other => return other,
        }
    }
    ty
}

/// Check the typing obligations of a rewrite rule (or one orientation of
/// an equation). The repair substitution is applied to both sides and to
/// the expected type.
pub fn check_rule_typing(sig: &Signature, rule: &RewriteRule, limits: &Limits) -> RuleTypingVerdict {
    check_oriented_typing(sig, rule.head, &rule.lhs_args, &rule.rhs, &rule.env, &rule.rho, limits)
}

pub fn check_oriented_typing(
    sig: &Signature,
    head: crate::term::SymId,
    lhs_args: &[Term],
    rhs: &Term,
    env: &TypingEnv,
    rho: &Substitution,
    limits: &Limits,
) -> RuleTypingVerdict {
    let expected = output_type(sig, head, lhs_args).apply_subst(rho);
    let lhs = Term::apply(Term::Symb(head), lhs_args.iter().cloned()).apply_subst(rho);
    let rhs = rhs.apply_subst(rho);
    let lhs_error = checked(sig, env, &lhs, &expected, limits).err().map(|e| e.to_string());
    let rhs_error = checked(sig, env, &rhs, &expected, limits).err().map(|e| e.to_string());
    RuleTypingVerdict {
        expected_type: expected,
        lhs_error,
        rhs_error,
    }
}

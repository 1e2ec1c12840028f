//! Properties of the term layer: position round-trips, free-variable
//! laws, and agreement of capture-avoiding substitution with a naive
//! named-term implementation that renames binders explicitly.

use std::collections::BTreeSet;

use proptest::prelude::*;

use cacmod::term::{SymId, Substitution, Term};

// ---- named-term oracle -------------------------------------------------------

/// Named terms: binders carry real names, alpha-equivalence is not
/// structural. Used as an independent model for substitution.
#[derive(Clone, Debug, PartialEq, Eq)]
enum NTerm {
    Var(String),
    Symb(u32),
    App(Box<NTerm>, Box<NTerm>),
    Lam(String, Box<NTerm>, Box<NTerm>),
    Pi(String, Box<NTerm>, Box<NTerm>),
}

impl NTerm {
    fn var(s: &str) -> NTerm {
        NTerm::Var(s.to_string())
    }

    fn app(f: NTerm, a: NTerm) -> NTerm {
        NTerm::App(Box::new(f), Box::new(a))
    }

    fn lam(x: &str, d: NTerm, b: NTerm) -> NTerm {
        NTerm::Lam(x.to_string(), Box::new(d), Box::new(b))
    }

    fn pi(x: &str, d: NTerm, b: NTerm) -> NTerm {
        NTerm::Pi(x.to_string(), Box::new(d), Box::new(b))
    }
}

fn nfree(t: &NTerm, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match t {
        NTerm::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        NTerm::Symb(_) => {}
        NTerm::App(f, a) => {
            nfree(f, bound, out);
            nfree(a, bound, out);
        }
        NTerm::Lam(x, d, b) | NTerm::Pi(x, d, b) => {
            nfree(d, bound, out);
            bound.push(x.clone());
            nfree(b, bound, out);
            bound.pop();
        }
    }
}

fn nfree_vars(t: &NTerm) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    nfree(t, &mut Vec::new(), &mut out);
    out
}

fn npick_fresh(avoid: &BTreeSet<String>, hint: &str) -> String {
    let mut name = hint.to_string();
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

/// Naive capture-avoiding substitution: binders colliding with free
/// variables of the images are renamed first.
fn nsubst(t: &NTerm, theta: &[(String, NTerm)]) -> NTerm {
    match t {
        NTerm::Var(x) => theta
            .iter()
            .find(|(v, _)| v == x)
            .map(|(_, img)| img.clone())
            .unwrap_or_else(|| t.clone()),
        NTerm::Symb(_) => t.clone(),
        NTerm::App(f, a) => NTerm::app(nsubst(f, theta), nsubst(a, theta)),
        NTerm::Lam(x, d, b) | NTerm::Pi(x, d, b) => {
            let d2 = nsubst(d, theta);
            // drop bindings shadowed by this binder
            let remaining: Vec<(String, NTerm)> =
                theta.iter().filter(|(v, _)| v != x).cloned().collect();
            let mut avoid: BTreeSet<String> = BTreeSet::new();
            for (_, img) in &remaining {
                avoid.extend(nfree_vars(img));
            }
            avoid.extend(nfree_vars(b));
            let (x2, b2) = if avoid.contains(x) {
                let fresh = npick_fresh(&avoid, x);
                let renamed = nsubst(b, &[(x.clone(), NTerm::var(&fresh))]);
                (fresh, nsubst(&renamed, &remaining))
            } else {
                (x.clone(), nsubst(b, &remaining))
            };
            match t {
                NTerm::Lam(..) => NTerm::lam(&x2, d2, b2),
                _ => NTerm::pi(&x2, d2, b2),
            }
        }
    }
}

/// Resolve names: bound names become indices; the result is the
/// locally-nameless form, so alpha-equal named terms convert equal.
fn to_nameless(t: &NTerm, bound: &mut Vec<String>) -> Term {
    match t {
        NTerm::Var(x) => match bound.iter().rposition(|b| b == x) {
            Some(i) => Term::Bound(bound.len() - 1 - i),
            None => Term::var(x.clone()),
        },
        NTerm::Symb(i) => Term::Symb(SymId(*i)),
        NTerm::App(f, a) => Term::app(to_nameless(f, bound), to_nameless(a, bound)),
        NTerm::Lam(x, d, b) => {
            let d2 = to_nameless(d, bound);
            bound.push(x.clone());
            let b2 = to_nameless(b, bound);
            bound.pop();
            Term::abs(x.clone(), d2, b2)
        }
        NTerm::Pi(x, d, b) => {
            let d2 = to_nameless(d, bound);
            bound.push(x.clone());
            let b2 = to_nameless(b, bound);
            bound.pop();
            Term::prod(x.clone(), d2, b2)
        }
    }
}

fn convert(t: &NTerm) -> Term {
    to_nameless(t, &mut Vec::new())
}

// Enumerate small named terms over variables x, y and two symbols.
fn named_terms(depth: usize) -> Vec<NTerm> {
    if depth == 0 {
        return vec![NTerm::var("x"), NTerm::var("y"), NTerm::Symb(0), NTerm::Symb(1)];
    }
    let smaller = named_terms(depth - 1);
    let mut out = smaller.clone();
    for f in &smaller {
        for a in &smaller {
            out.push(NTerm::app(f.clone(), a.clone()));
        }
        for x in ["x", "y"] {
            out.push(NTerm::lam(x, NTerm::Symb(0), f.clone()));
            out.push(NTerm::pi(x, NTerm::Symb(0), f.clone()));
        }
    }
    out
}

#[test]
fn substitution_agrees_with_the_named_oracle() {
    let images = [
        NTerm::var("x"),
        NTerm::var("y"),
        NTerm::Symb(1),
        NTerm::app(NTerm::Symb(0), NTerm::var("x")),
        NTerm::lam("x", NTerm::Symb(0), NTerm::var("y")),
    ];
    let mut substs: Vec<Vec<(String, NTerm)>> = Vec::new();
    for img in &images {
        substs.push(vec![("x".to_string(), img.clone())]);
        substs.push(vec![("y".to_string(), img.clone())]);
        substs.push(vec![
            ("x".to_string(), img.clone()),
            ("y".to_string(), NTerm::app(NTerm::Symb(1), NTerm::var("x"))),
        ]);
    }
    let mut checked = 0usize;
    for t in named_terms(2) {
        for theta in &substs {
            let fast = convert(&t).apply_subst(
                &theta
                    .iter()
                    .map(|(v, img)| (v.clone(), convert(img)))
                    .collect::<Substitution>(),
            );
            let slow = convert(&nsubst(&t, theta));
            assert_eq!(fast, slow, "term {t:?} subst {theta:?}");
            checked += 1;
        }
    }
    assert!(checked > 1_000, "checked only {checked} cases");
}

#[test]
fn free_vars_agree_with_the_named_oracle() {
    for t in named_terms(2) {
        assert_eq!(convert(&t).free_vars(), nfree_vars(&t), "{t:?}");
    }
    // (x:A) P x y has free variables A, P, y
    let t = NTerm::pi(
        "x",
        NTerm::var("A"),
        NTerm::app(NTerm::app(NTerm::var("P"), NTerm::var("x")), NTerm::var("y")),
    );
    let fv: Vec<String> = nfree_vars(&t).into_iter().collect();
    assert_eq!(fv, vec!["A", "P", "y"]);
    assert_eq!(convert(&t).free_vars().into_iter().collect::<Vec<_>>(), vec!["A", "P", "y"]);
}

#[test]
fn renamed_binder_example() {
    // ([x:n] y){y -> x} keeps the outer x free: the named oracle renames
    // the binder, the nameless form needs no renaming, and both agree.
    let t = NTerm::lam("x", NTerm::Symb(0), NTerm::var("y"));
    let theta = vec![("y".to_string(), NTerm::var("x"))];
    let renamed = nsubst(&t, &theta);
    match &renamed {
        NTerm::Lam(x2, _, body) => {
            assert_ne!(x2.as_str(), "x");
            assert_eq!(**body, NTerm::var("x"));
        }
        other => panic!("unexpected {other:?}"),
    }
    let fast = convert(&t).apply_subst(&Substitution::singleton("y", Term::var("x")));
    assert_eq!(fast, convert(&renamed));
}

#[test]
fn position_roundtrip_exhaustive_to_depth_four() {
    // every term of depth <= 4 over one variable, one symbol, application
    // and abstraction
    let mut pool: Vec<Term> = vec![Term::var("x"), Term::Symb(SymId(0))];
    for _ in 0..3 {
        let prev = pool.clone();
        for f in &prev {
            pool.push(Term::abs("y", Term::Symb(SymId(0)), f.clone()));
            for a in &prev {
                pool.push(Term::app(f.clone(), a.clone()));
            }
        }
        pool.dedup();
    }
    let mut roundtrips = 0usize;
    for t in &pool {
        for p in t.positions() {
            let sub = t.subterm_at(&p).unwrap().clone();
            assert_eq!(&t.replace_at(&p, sub).unwrap(), t);
            roundtrips += 1;
        }
    }
    assert!(roundtrips > 10_000, "only {roundtrips} round-trips");
}

// ---- property tests ----------------------------------------------------------

fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::var("a")),
        Just(Term::var("b")),
        Just(Term::var("c")),
        Just(Term::Symb(SymId(0))),
        Just(Term::Symb(SymId(1))),
        Just(Term::star()),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            (inner.clone(), inner.clone()).prop_map(|(d, b)| Term::abs("x", d, b)),
            (inner.clone(), inner).prop_map(|(d, b)| Term::prod("x", d, b)),
        ]
    })
}

fn arb_subst() -> impl Strategy<Value = Substitution> {
    proptest::collection::btree_map(
        prop_oneof![Just("a".to_string()), Just("b".to_string()), Just("c".to_string())],
        arb_term(),
        0..3,
    )
    .prop_map(|m| m.into_iter().collect())
}

proptest! {
    #[test]
    fn subterm_replace_roundtrip(t in arb_term()) {
        for p in t.positions() {
            let sub = t.subterm_at(&p).unwrap().clone();
            prop_assert_eq!(t.replace_at(&p, sub).unwrap(), t.clone());
        }
    }

    #[test]
    fn free_vars_of_substitution(t in arb_term(), theta in arb_subst()) {
        let result = t.apply_subst(&theta).free_vars();
        let mut expected: BTreeSet<String> = BTreeSet::new();
        for x in t.free_vars() {
            match theta.get(&x) {
                Some(img) => expected.extend(img.free_vars()),
                None => {
                    expected.insert(x);
                }
            }
        }
        prop_assert_eq!(result, expected);
    }

    #[test]
    fn substitution_preserves_alpha_classes(t in arb_term(), theta in arb_subst()) {
        // equal nameless terms stay equal under the same substitution
        let u = t.clone();
        prop_assert_eq!(t.apply_subst(&theta), u.apply_subst(&theta));
    }

    #[test]
    fn positions_are_exactly_the_valid_paths(t in arb_term()) {
        let ps: BTreeSet<_> = t.positions().into_iter().collect();
        for p in &ps {
            prop_assert!(t.subterm_at(p).is_ok());
        }
        // one step beyond any leaf position is invalid
        for p in &ps {
            let t_at = t.subterm_at(p).unwrap();
            let extended = p.child(7);
            prop_assert!(t_at.positions().len() != 1 || t.subterm_at(&extended).is_err());
        }
    }
}

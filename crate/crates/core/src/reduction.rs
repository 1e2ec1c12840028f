//! The rewrite engine: beta steps, rule steps modulo the equations,
//! equivalence-class enumeration, normal forms, joinability and the
//! cap/aliens decomposition.
//!
//! A term rewrites modulo the equations when some member of its
//! equivalence class (the closure under equation steps in both
//! directions) has a syntactic rule redex. Classes are enumerated
//! breadth-first up to a configured bound; matching modulo is class
//! enumeration plus syntactic matching, which is complete whenever the
//! classes are finite.

use std::collections::HashSet;

use crate::limits::Limits;
use crate::signature::{EqDirection, Signature};
use crate::term::{Position, Substitution, SymId, Term};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReduceError {
    #[error("reduction did not finish within {fuel} steps (possible non-termination)")]
    FuelExhausted { fuel: u64 },
    #[error("equivalence class of '{representative}' exceeded {bound} members")]
    ClassBoundExceeded { representative: String, bound: usize },
}

/// One primitive step of a reduction trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepRelation {
    Beta,
    /// Index into `Signature::rules`.
    Rule(usize),
    /// Index into `Signature::equations`, with the orientation used.
    Eq(usize, EqDirection),
    /// Index into `Signature::malformed_equations` (probe steps).
    Probe(usize, EqDirection),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub relation: StepRelation,
    pub position: Position,
    pub subst: Substitution,
}

/// A replayable sequence of primitive steps. Equation steps followed by a
/// final rule step make up one step of the modulo relation.
pub type ReductionTrace = Vec<TraceStep>;

/// Replay a trace from `source`, checking every step. Returns the target.
pub fn replay(source: &Term, trace: &[TraceStep], sig: &Signature) -> Result<Term, String> {
    let mut t = source.clone();
    for (i, step) in trace.iter().enumerate() {
        let sub = t
            .subterm_at(&step.position)
            .map_err(|e| format!("step {i}: {e}"))?
            .clone();
        let reduct = match &step.relation {
            StepRelation::Beta => match &sub {
                Term::App(f, a) => match f.as_ref() {
                    Term::Abs(b) => b.body.opened(a),
                    _ => return Err(format!("step {i}: no beta redex at {}", step.position)),
                },
                _ => return Err(format!("step {i}: no beta redex at {}", step.position)),
            },
            StepRelation::Rule(r) => {
                let rule = sig.rules.get(*r).ok_or_else(|| format!("step {i}: bad rule id"))?;
                let lhs = rule.lhs().apply_subst(&step.subst);
                if lhs != sub {
                    return Err(format!("step {i}: rule does not match at {}", step.position));
                }
                rule.rhs.apply_subst(&step.subst)
            }
            StepRelation::Eq(e, dir) => {
                let eq = sig
                    .equations
                    .get(*e)
                    .ok_or_else(|| format!("step {i}: bad equation id"))?;
                let (from, to) = eq.oriented(*dir);
                if from.apply_subst(&step.subst) != sub {
                    return Err(format!("step {i}: equation does not match at {}", step.position));
                }
                to.apply_subst(&step.subst)
            }
            StepRelation::Probe(e, dir) => {
                let eq = sig
                    .malformed_equations
                    .get(*e)
                    .ok_or_else(|| format!("step {i}: bad probe id"))?;
                let (from, to) = match dir {
                    EqDirection::LeftToRight => (&eq.lhs, &eq.rhs),
                    EqDirection::RightToLeft => (&eq.rhs, &eq.lhs),
                };
                if from.apply_subst(&step.subst) != sub {
                    return Err(format!("step {i}: probe equation does not match at {}", step.position));
                }
                to.apply_subst(&step.subst)
            }
        };
        t = t
            .replace_at(&step.position, reduct)
            .map_err(|e| format!("step {i}: {e}"))?;
    }
    Ok(t)
}

// ---- equivalence classes ---------------------------------------------------

/// The equivalence class of a term under the equations, enumerated
/// breadth-first. `members[0]` is the input term; every member carries a
/// derivation pointer so a step path from the input can be reconstructed.
#[derive(Clone, Debug)]
pub struct EClass {
    pub members: Vec<Term>,
    derivation: Vec<Option<(usize, TraceStep)>>,
    pub truncated: bool,
}

impl EClass {
    pub fn representative(&self) -> &Term {
        &self.members[0]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, t: &Term) -> bool {
        self.members.iter().any(|m| m == t)
    }

    pub fn find(&self, t: &Term) -> Option<usize> {
        self.members.iter().position(|m| m == t)
    }

    /// Equation-step path from the representative to member `index`.
    pub fn path_to(&self, index: usize) -> ReductionTrace {
        let mut steps = Vec::new();
        let mut here = index;
        while let Some((parent, step)) = &self.derivation[here] {
            steps.push(step.clone());
            here = *parent;
        }
        steps.reverse();
        steps
    }

    fn bound_error(&self, sig: &Signature, bound: usize) -> ReduceError {
        ReduceError::ClassBoundExceeded {
            representative: sig.show_term(self.representative()),
            bound,
        }
    }

    /// Treat truncation as an error.
    pub fn ensure_complete(&self, sig: &Signature, limits: &Limits) -> Result<(), ReduceError> {
        if self.truncated {
            Err(self.bound_error(sig, limits.max_class_size))
        } else {
            Ok(())
        }
    }
}

// An oriented equation-like pair used by the class enumerator.
struct OrientedEq {
    relation_l2r: StepRelation,
    lhs: Term,
    rhs: Term,
}

fn oriented_equations(sig: &Signature, eq_indices: Option<&[usize]>) -> Vec<OrientedEq> {
    let mut out = Vec::new();
    for (i, eq) in sig.equations.iter().enumerate() {
        if let Some(allowed) = eq_indices {
            if !allowed.contains(&i) {
                continue;
            }
        }
        for dir in EqDirection::BOTH {
            let (lhs, rhs) = eq.oriented(dir);
            out.push(OrientedEq {
                relation_l2r: StepRelation::Eq(i, dir),
                lhs,
                rhs,
            });
        }
    }
    out
}

// Probe pairs for malformed equations; a direction that would invent
// variables is skipped.
fn probe_pairs(sig: &Signature, probe: &[usize]) -> Vec<OrientedEq> {
    let mut out = Vec::new();
    for &i in probe {
        let Some(eq) = sig.malformed_equations.get(i) else {
            continue;
        };
        for dir in EqDirection::BOTH {
            let (lhs, rhs) = match dir {
                EqDirection::LeftToRight => (eq.lhs.clone(), eq.rhs.clone()),
                EqDirection::RightToLeft => (eq.rhs.clone(), eq.lhs.clone()),
            };
            if rhs.free_vars().is_subset(&lhs.free_vars()) {
                out.push(OrientedEq {
                    relation_l2r: StepRelation::Probe(i, dir),
                    lhs,
                    rhs,
                });
            }
        }
    }
    out
}

fn one_e_steps(t: &Term, eqs: &[OrientedEq]) -> Vec<(Term, TraceStep)> {
    let mut out = Vec::new();
    for pos in t.positions() {
        let sub = t.subterm_at(&pos).expect("position from enumeration");
        for oe in eqs {
            let mut subst = Substitution::new();
            if oe.lhs.match_against(sub, &mut subst) {
                let replaced = oe.rhs.apply_subst(&subst);
                if let Ok(new_term) = t.replace_at(&pos, replaced) {
                    out.push((
                        new_term,
                        TraceStep {
                            relation: oe.relation_l2r.clone(),
                            position: pos.clone(),
                            subst,
                        },
                    ));
                }
            }
        }
    }
    out
}

fn e_class_inner(t: &Term, eqs: &[OrientedEq], bound: usize) -> EClass {
    let mut members = vec![t.clone()];
    let mut derivation: Vec<Option<(usize, TraceStep)>> = vec![None];
    let mut seen: HashSet<Term> = HashSet::new();
    seen.insert(t.clone());
    let mut truncated = false;
    let mut cursor = 0;
    'bfs: while cursor < members.len() {
        let current = members[cursor].clone();
        for (next, step) in one_e_steps(&current, eqs) {
            if seen.contains(&next) {
                continue;
            }
            if members.len() >= bound {
                truncated = true;
                break 'bfs;
            }
            seen.insert(next.clone());
            members.push(next);
            derivation.push(Some((cursor, step)));
        }
        cursor += 1;
    }
    EClass {
        members,
        derivation,
        truncated,
    }
}

/// Closure of `t` under single equation steps at all positions, modulo
/// alpha. The `truncated` flag is set when the bound is hit.
pub fn e_class(t: &Term, sig: &Signature, limits: &Limits) -> EClass {
    e_class_inner(t, &oriented_equations(sig, None), limits.max_class_size)
}

/// Class enumeration restricted to a subset of the equations.
pub fn e_class_filtered(t: &Term, sig: &Signature, eq_indices: &[usize], limits: &Limits) -> EClass {
    e_class_inner(t, &oriented_equations(sig, Some(eq_indices)), limits.max_class_size)
}

/// Class enumeration with additional malformed-equation probe pairs.
pub fn e_class_probe(t: &Term, sig: &Signature, probe: &[usize], limits: &Limits) -> EClass {
    let mut eqs = oriented_equations(sig, None);
    eqs.extend(probe_pairs(sig, probe));
    e_class_inner(t, &eqs, limits.max_class_size)
}

// ---- single steps ------------------------------------------------------------

/// All one-step beta reducts.
pub fn beta_step(t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (pos, reduct) in beta_redexes(t) {
        let _ = pos;
        if seen.insert(reduct.clone()) {
            out.push(reduct);
        }
    }
    out
}

fn beta_redexes(t: &Term) -> Vec<(Position, Term)> {
    let mut out = Vec::new();
    for pos in t.positions() {
        let sub = t.subterm_at(&pos).expect("position from enumeration");
        if let Term::App(f, a) = sub {
            if let Term::Abs(b) = f.as_ref() {
                let reduct = b.body.opened(a);
                out.push((pos.clone(), t.replace_at(&pos, reduct).expect("valid position")));
            }
        }
    }
    out
}

/// All substitutions that make the pattern equal (modulo the equations)
/// to the subject: the subject's class is enumerated and each member
/// matched syntactically.
pub fn match_modulo(
    pattern: &Term,
    subject: &Term,
    sig: &Signature,
    limits: &Limits,
) -> Result<Vec<Substitution>, ReduceError> {
    let class = e_class(subject, sig, limits);
    class.ensure_complete(sig, limits)?;
    let mut out = Vec::new();
    for member in &class.members {
        let mut subst = Substitution::new();
        if pattern.match_against(member, &mut subst) && !out.contains(&subst) {
            out.push(subst);
        }
    }
    Ok(out)
}

/// One step of the combined relation: beta union rule-rewriting modulo
/// the equations. Every reduct comes with a replayable trace (equation
/// path, then the rule step).
pub fn rel_step(
    t: &Term,
    sig: &Signature,
    limits: &Limits,
) -> Result<Vec<(Term, ReductionTrace)>, ReduceError> {
    rel_step_filtered(t, sig, None, None, limits)
}

/// `rel_step` restricted to subsets of the rules and equations (used for
/// the first-order fragment).
pub fn rel_step_filtered(
    t: &Term,
    sig: &Signature,
    rule_indices: Option<&[usize]>,
    eq_indices: Option<&[usize]>,
    limits: &Limits,
) -> Result<Vec<(Term, ReductionTrace)>, ReduceError> {
    let mut out: Vec<(Term, ReductionTrace)> = Vec::new();
    let mut seen: HashSet<Term> = HashSet::new();

    for (pos, reduct) in beta_redexes(t) {
        if seen.insert(reduct.clone()) {
            out.push((
                reduct,
                vec![TraceStep {
                    relation: StepRelation::Beta,
                    position: pos,
                    subst: Substitution::new(),
                }],
            ));
        }
    }

    let class = e_class_inner(t, &oriented_equations(sig, eq_indices), limits.max_class_size);
    class.ensure_complete(sig, limits)?;
    for (mi, member) in class.members.iter().enumerate() {
        for pos in member.positions() {
            let sub = member.subterm_at(&pos).expect("position from enumeration");
            for (ri, rule) in sig.rules.iter().enumerate() {
                if let Some(allowed) = rule_indices {
                    if !allowed.contains(&ri) {
                        continue;
                    }
                }
                let mut subst = Substitution::new();
                if rule.lhs().match_against(sub, &mut subst) {
                    let replaced = rule.rhs.apply_subst(&subst);
                    if let Ok(new_term) = member.replace_at(&pos, replaced) {
                        if seen.insert(new_term.clone()) {
                            let mut trace = class.path_to(mi);
                            trace.push(TraceStep {
                                relation: StepRelation::Rule(ri),
                                position: pos.clone(),
                                subst,
                            });
                            out.push((new_term, trace));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

// Innermost-leftmost syntactic step: beta or a rule match, children first.
fn first_syntactic_step(
    t: &Term,
    sig: &Signature,
    rule_indices: Option<&[usize]>,
) -> Option<(Position, Term, TraceStep)> {
    fn go(
        root: &Term,
        here: &Term,
        pos: Position,
        sig: &Signature,
        rule_indices: Option<&[usize]>,
    ) -> Option<(Position, Term, TraceStep)> {
        let children: Vec<(u8, &Term)> = match here {
            Term::App(f, a) => vec![(1, f.as_ref()), (2, a.as_ref())],
            Term::Abs(b) | Term::Prod(b) => vec![(1, b.dom.as_ref()), (2, b.body.as_ref())],
            _ => Vec::new(),
        };
        for (i, c) in children {
            if let Some(hit) = go(root, c, pos.child(i), sig, rule_indices) {
                return Some(hit);
            }
        }
        if let Term::App(f, a) = here {
            if let Term::Abs(b) = f.as_ref() {
                let reduct = b.body.opened(a);
                let new_term = root.replace_at(&pos, reduct).expect("valid position");
                return Some((
                    pos.clone(),
                    new_term,
                    TraceStep {
                        relation: StepRelation::Beta,
                        position: pos,
                        subst: Substitution::new(),
                    },
                ));
            }
        }
        for (ri, rule) in sig.rules.iter().enumerate() {
            if let Some(allowed) = rule_indices {
                if !allowed.contains(&ri) {
                    continue;
                }
            }
            let mut subst = Substitution::new();
            if rule.lhs().match_against(here, &mut subst) {
                let replaced = rule.rhs.apply_subst(&subst);
                let new_term = root.replace_at(&pos, replaced).expect("valid position");
                return Some((
                    pos.clone(),
                    new_term,
                    TraceStep {
                        relation: StepRelation::Rule(ri),
                        position: pos,
                        subst,
                    },
                ));
            }
        }
        None
    }
    go(t, t, Position::root(), sig, rule_indices)
}

/// Normal form of `t` under beta and rule-rewriting modulo the
/// equations, with the trace of every step taken. Deterministic:
/// innermost-leftmost, rules in declaration order, syntactic redexes
/// before redexes found through the class.
pub fn normalize_traced(
    t: &Term,
    sig: &Signature,
    limits: &Limits,
) -> Result<(Term, ReductionTrace), ReduceError> {
    let mut current = t.clone();
    let mut trace = Vec::new();
    let mut fuel = limits.fuel;
    loop {
        if let Some((_pos, next, step)) = first_syntactic_step(&current, sig, None) {
            if fuel == 0 {
                return Err(ReduceError::FuelExhausted { fuel: limits.fuel });
            }
            fuel -= 1;
            trace.push(step);
            current = next;
            continue;
        }
        // syntactically normal; look for a rule redex elsewhere in the class
        let class = e_class(&current, sig, limits);
        class.ensure_complete(sig, limits)?;
        let mut stepped = false;
        for (mi, member) in class.members.iter().enumerate().skip(1) {
            if let Some((_pos, next, step)) = first_syntactic_step(member, sig, None) {
                if fuel == 0 {
                    return Err(ReduceError::FuelExhausted { fuel: limits.fuel });
                }
                fuel -= 1;
                trace.extend(class.path_to(mi));
                trace.push(step);
                current = next;
                stepped = true;
                break;
            }
        }
        if !stepped {
            return Ok((current, trace));
        }
    }
}

/// Normal form under the combined relation (see `normalize_traced`).
pub fn normalize(t: &Term, sig: &Signature, limits: &Limits) -> Result<Term, ReduceError> {
    normalize_traced(t, sig, limits).map(|(t, _)| t)
}

/// Normal form under beta plus only the rules headed by symbols strictly
/// below `f` in the precedence; matching is syntactic (no equations).
pub fn restricted_normalize(
    t: &Term,
    f: SymId,
    sig: &Signature,
    limits: &Limits,
) -> Result<Term, ReduceError> {
    let below: Vec<usize> = sig
        .rules
        .iter()
        .enumerate()
        .filter(|(_, r)| sig.precedence.gt(f, r.head))
        .map(|(i, _)| i)
        .collect();
    let mut current = t.clone();
    let mut fuel = limits.fuel;
    while let Some((_pos, next, _step)) = first_syntactic_step(&current, sig, Some(&below)) {
        if fuel == 0 {
            return Err(ReduceError::FuelExhausted { fuel: limits.fuel });
        }
        fuel -= 1;
        current = next;
    }
    Ok(current)
}

/// Joinability modulo the equations: both terms normalize and the normal
/// forms are in the same equivalence class.
pub fn joinable_modulo(
    t: &Term,
    u: &Term,
    sig: &Signature,
    limits: &Limits,
) -> Result<bool, ReduceError> {
    let nf_t = normalize(t, sig, limits)?;
    let nf_u = normalize(u, sig, limits)?;
    if nf_t == nf_u {
        return Ok(true);
    }
    let class = e_class(&nf_t, sig, limits);
    class.ensure_complete(sig, limits)?;
    Ok(class.contains(&nf_u))
}

// ---- cap and aliens ----------------------------------------------------------

/// Decompose a term into its largest first-order algebraic prefix (the
/// cap) and the maximal non-first-order subterms (the aliens). Aliens
/// with a common reduct receive the same fresh variable; the variables
/// are numbered by joinability class in left-to-right position order.
pub fn cap_aliens(
    t: &Term,
    sig: &Signature,
    limits: &Limits,
) -> Result<(Term, Vec<(Position, Term)>), ReduceError> {
    let mut aliens: Vec<(Position, Term)> = Vec::new();
    collect_aliens(t, sig, Position::root(), &mut aliens);

    // group aliens by joinability with earlier representatives; fuel
    // exhaustion is treated as "not joinable" (documented approximation)
    let mut reps: Vec<Term> = Vec::new();
    let mut class_index: Vec<usize> = Vec::new();
    for (_, alien) in &aliens {
        let mut found = None;
        for (ci, rep) in reps.iter().enumerate() {
            match joinable_modulo(alien, rep, sig, limits) {
                Ok(true) => {
                    found = Some(ci);
                    break;
                }
                Ok(false) | Err(ReduceError::FuelExhausted { .. }) => {}
                Err(e @ ReduceError::ClassBoundExceeded { .. }) => return Err(e),
            }
        }
        let ci = found.unwrap_or_else(|| {
            reps.push(alien.clone());
            reps.len() - 1
        });
        class_index.push(ci);
    }

    let taken = t.free_vars();
    let var_names: Vec<String> = (1..=reps.len())
        .map(|i| crate::term::fresh_name(&format!("x{i}"), &taken))
        .collect();

    let mut cap = t.clone();
    for ((pos, _), ci) in aliens.iter().zip(&class_index) {
        cap = cap
            .replace_at(pos, Term::var(var_names[*ci].clone()))
            .expect("alien positions are valid");
    }
    Ok((cap, aliens))
}

fn collect_aliens(t: &Term, sig: &Signature, pos: Position, out: &mut Vec<(Position, Term)>) {
    match t {
        Term::Var(_) => {}
        _ => {
            let (head, args) = t.spine();
            if let Term::Symb(f) = head {
                if sig.is_first_order(*f) && args.len() == sig.arity(*f) {
                    // argument i (0-based) of an n-argument spine sits at 1^(n-1-i).2
                    let n = args.len();
                    for (i, arg) in args.iter().enumerate() {
                        let mut path = pos.0.clone();
                        path.extend(std::iter::repeat_n(1, n - 1 - i));
                        path.push(2);
                        collect_aliens(arg, sig, Position(path), out);
                    }
                    return;
                }
            }
            out.push((pos, t.clone()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::Limits;

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

    const NAT_RULES_ONLY: &str = "\
symbol nat : *
symbol zero : nat
symbol s : nat => nat
symbol plus : nat => nat => nat
rule [x:nat] plus x zero -> x
rule [x:nat, y:nat] plus x (s y) -> s (plus x y)
";

    const NAT_COMM: &str = "\
symbol nat : *
symbol zero : nat
symbol s : nat => nat
symbol plus : nat => nat => nat
rule [x:nat] plus x zero -> x
rule [x:nat, y:nat] plus x (s y) -> s (plus x y)
eq [x:nat, y:nat] plus x y = plus y x
";

    fn sig(src: &str) -> Signature {
        Signature::from_source(src).expect("load")
    }

    fn t(sig: &Signature, src: &str) -> Term {
        sig.parse_term(src).expect("term")
    }

    #[test]
    fn beta_steps() {
        let s = sig(NAT_RULES_ONLY);
        let redex = t(&s, "([x:nat] x) zero");
        assert_eq!(beta_step(&redex), vec![t(&s, "zero")]);
        assert!(beta_step(&t(&s, "s zero")).is_empty());
        // ([x:nat][y:nat] x) a b has exactly one redex
        let two = t(&s, "([x:nat] [y:nat] x) a b");
        assert_eq!(beta_step(&two), vec![t(&s, "([y:nat] a) b")]);
    }

    #[test]
    fn class_with_commutativity_only() {
        let s = sig(NAT_COMM);
        let class = e_class(&t(&s, "plus x y"), &s, &Limits::default());
        assert!(!class.truncated);
        assert_eq!(class.len(), 2);
        assert!(class.contains(&t(&s, "plus y x")));
    }

    #[test]
    fn ac_class_of_three_atoms_has_twelve_members() {
        let s = sig(NAT_AC);
        let class = e_class(&t(&s, "plus (plus a b) c"), &s, &Limits::default());
        assert!(!class.truncated);
        assert_eq!(class.len(), 12);
        assert!(class.contains(&t(&s, "plus a (plus b c)")));
        assert!(class.contains(&t(&s, "plus (plus c b) a")));
    }

    #[test]
    fn class_symmetry() {
        let s = sig(NAT_AC);
        let limits = Limits::default();
        let a = t(&s, "plus (plus x y) zero");
        let class_a = e_class(&a, &s, &limits);
        for m in &class_a.members {
            let back = e_class(m, &s, &limits);
            assert!(back.contains(&a));
        }
    }

    #[test]
    fn truncation_guard_for_growing_equation() {
        let s = sig(
            "symbol nat : *\n\
             symbol zero : nat\n\
             symbol plus : nat => nat => nat\n\
             eq [x:nat] plus x zero = x\n",
        );
        assert_eq!(s.malformed_equations.len(), 1);
        let limits = Limits::default().with_class_size(50);
        let class = e_class_probe(&t(&s, "plus x zero"), &s, &[0], &limits);
        assert!(class.truncated);
        // derivation paths replay
        let last = class.len() - 1;
        let path = class.path_to(last);
        let replayed = replay(class.representative(), &path, &s).expect("replay");
        assert_eq!(replayed, class.members[last]);
    }

    #[test]
    fn match_modulo_uses_the_class() {
        let s = sig(NAT_COMM);
        let limits = Limits::default();
        let pat = t(&s, "plus x zero");
        let found = match_modulo(&pat, &t(&s, "plus zero (s z)"), &s, &limits).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].get("x"), Some(&t(&s, "s z")));
        let none = match_modulo(&pat, &t(&s, "s z"), &s, &limits).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn match_modulo_allows_nonlinear_patterns() {
        let s = sig(NAT_COMM);
        let limits = Limits::default();
        let pat = t(&s, "plus x x");
        let found = match_modulo(&pat, &t(&s, "plus a a"), &s, &limits).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].get("x"), Some(&t(&s, "a")));
    }

    #[test]
    fn rel_step_without_equations() {
        let s = sig(NAT_RULES_ONLY);
        let limits = Limits::default();
        let reducts = rel_step(&t(&s, "plus zero (s zero)"), &s, &limits).unwrap();
        let terms: Vec<&Term> = reducts.iter().map(|(t, _)| t).collect();
        assert_eq!(terms, vec![&t(&s, "s (plus zero zero)")]);
        assert!(rel_step(&t(&s, "x"), &s, &limits).unwrap().is_empty());
    }

    #[test]
    fn rel_step_through_the_class() {
        let s = sig(NAT_COMM);
        let limits = Limits::default();
        let reducts = rel_step(&t(&s, "plus zero (s zero)"), &s, &limits).unwrap();
        let terms: Vec<Term> = reducts.iter().map(|(t, _)| t.clone()).collect();
        assert!(terms.contains(&t(&s, "s (plus zero zero)")));
        assert!(terms.contains(&t(&s, "s zero")));
        // every reduct's trace replays to the reduct
        for (term, trace) in &reducts {
            let replayed = replay(&t(&s, "plus zero (s zero)"), trace, &s).expect("replay");
            assert_eq!(&replayed, term);
        }
    }

    #[test]
    fn normalize_two_plus_two() {
        let s = sig(NAT_AC);
        let limits = Limits::default();
        let four = normalize(&t(&s, "plus (s (s zero)) (s (s zero))"), &s, &limits).unwrap();
        assert_eq!(four, t(&s, "s (s (s (s zero)))"));
        // normal forms are fixed points
        assert_eq!(normalize(&t(&s, "s zero"), &s, &limits).unwrap(), t(&s, "s zero"));
    }

    #[test]
    fn normalize_reassociates_nested_concatenation() {
        let s = sig(
            "symbol nat : *\n\
             symbol list : * => *\n\
             symbol nil : (A:*) list A\n\
             symbol cons : (A:*) A => list A => list A\n\
             symbol app : (A:*) list A => list A => list A status lex\n\
             rule [A:*, l':list A] app A (nil A') l' -> l' with A' := A\n\
             rule [A:*, x:A, l:list A, l':list A] app A (cons A' x l) l' -> cons A x (app A l l') with A' := A\n\
             rule [A:*, l:list A, l':list A, l'':list A] app A (app A' l l') l'' -> app A l (app A l' l'') with A' := A\n",
        );
        let limits = Limits::default();
        let nf = normalize(&t(&s, "app A (app A l l') l''"), &s, &limits).unwrap();
        assert_eq!(nf, t(&s, "app A l (app A l' l'')"));
    }

    #[test]
    fn normalize_needs_the_class() {
        // zero + x has no syntactic redex; commutativity exposes one
        let s = sig(NAT_COMM);
        let limits = Limits::default();
        let nf = normalize(&t(&s, "plus zero x"), &s, &limits).unwrap();
        assert_eq!(nf, t(&s, "x"));
        let (nf2, trace) = normalize_traced(&t(&s, "plus zero x"), &s, &limits).unwrap();
        assert_eq!(nf2, t(&s, "x"));
        let replayed = replay(&t(&s, "plus zero x"), &trace, &s).expect("replay");
        assert_eq!(replayed, nf2);
    }

    #[test]
    fn normal_forms_have_no_steps() {
        let s = sig(NAT_AC);
        let limits = Limits::default();
        for src in ["plus (s zero) (plus x (s zero))", "plus zero x", "s (s zero)"] {
            let nf = normalize(&t(&s, src), &s, &limits).unwrap();
            assert!(rel_step(&nf, &s, &limits).unwrap().is_empty(), "nf of {src}");
        }
    }

    #[test]
    fn fuel_exhaustion_is_an_error() {
        let s = sig(
            "symbol nat : *\n\
             symbol f : nat => nat\n\
             rule [x:nat] f x -> f (f x)\n",
        );
        let limits = Limits::default().with_fuel(100);
        let err = normalize(&t(&s, "f x"), &s, &limits).unwrap_err();
        assert!(matches!(err, ReduceError::FuelExhausted { .. }));
    }

    #[test]
    fn restricted_normal_forms() {
        let s = sig(
            "symbol nat : *\n\
             symbol zero : nat\n\
             symbol s : nat => nat\n\
             symbol plus : nat => nat => nat\n\
             symbol g : nat => nat\n\
             rule [x:nat] plus x zero -> x\n\
             rule [x:nat, y:nat] plus x (s y) -> s (plus x y)\n\
             rule [x:nat] g x -> plus x x\n",
        );
        let limits = Limits::default();
        let g = s.lookup("g").unwrap();
        let plus = s.lookup("plus").unwrap();
        // plus is below g, so its rules apply
        assert_eq!(
            restricted_normalize(&t(&s, "plus zero zero"), g, &s, &limits).unwrap(),
            t(&s, "zero")
        );
        // plus's own rules are not below plus
        assert_eq!(
            restricted_normalize(&t(&s, "plus zero zero"), plus, &s, &limits).unwrap(),
            t(&s, "plus zero zero")
        );
        // beta is always allowed
        assert_eq!(
            restricted_normalize(&t(&s, "([x:nat] x) zero"), plus, &s, &limits).unwrap(),
            t(&s, "zero")
        );
    }

    #[test]
    fn joinability_modulo() {
        let s = sig(NAT_COMM);
        let limits = Limits::default();
        assert!(joinable_modulo(
            &t(&s, "plus zero (s zero)"),
            &t(&s, "plus (s zero) zero"),
            &s,
            &limits
        )
        .unwrap());
        assert!(!joinable_modulo(&t(&s, "x"), &t(&s, "y"), &s, &limits).unwrap());
        let r = t(&s, "plus x (s y)");
        assert!(joinable_modulo(&r, &r, &s, &limits).unwrap());
    }

    #[test]
    fn cap_and_aliens() {
        let s = sig(
            "symbol nat : *\n\
             symbol zero : nat\n\
             symbol s : nat => nat\n\
             symbol plus : nat => nat => nat\n\
             symbol f : nat => nat kind ho\n\
             rule [x:nat] plus x zero -> x\n\
             rule [x:nat, y:nat] plus x (s y) -> s (plus x y)\n",
        );
        let limits = Limits::default();
        let term = t(&s, "plus (plus a zero) (f b)");
        let (cap, aliens) = cap_aliens(&term, &s, &limits).unwrap();
        assert_eq!(aliens.len(), 1);
        assert_eq!(aliens[0].1, t(&s, "f b"));
        assert_eq!(cap, t(&s, "plus (plus a zero) x1"));
        // a fully alien term
        let term = t(&s, "f b");
        let (cap, aliens) = cap_aliens(&term, &s, &limits).unwrap();
        assert_eq!(cap, t(&s, "x1"));
        assert_eq!(aliens.len(), 1);
        assert!(aliens[0].0.is_root());
        // the cap is first-order algebraic and aliens are not
        let term = t(&s, "plus (f b) (plus ([x:nat] x) zero)");
        let (cap, aliens) = cap_aliens(&term, &s, &limits).unwrap();
        assert!(s.is_first_order_algebraic(&cap));
        for (_, alien) in &aliens {
            assert!(!s.is_first_order_algebraic(alien));
        }
    }

    #[test]
    fn joinable_aliens_share_a_variable() {
        let s = sig(
            "symbol nat : *\n\
             symbol zero : nat\n\
             symbol s : nat => nat\n\
             symbol plus : nat => nat => nat\n\
             symbol f : nat => nat kind ho\n\
             rule [x:nat] plus x zero -> x\n\
             rule [x:nat, y:nat] plus x (s y) -> s (plus x y)\n",
        );
        let limits = Limits::default();
        // f is declared higher-order, so f-headed subterms are aliens;
        // f (plus zero zero) and f zero join
        let term = t(&s, "plus (f (plus zero zero)) (f zero)");
        let (cap, aliens) = cap_aliens(&term, &s, &limits).unwrap();
        assert_eq!(aliens.len(), 2);
        assert_eq!(cap, t(&s, "plus x1 x1"));
        // distinct aliens get distinct variables
        let term = t(&s, "plus (f zero) (f (s zero))");
        let (cap, _) = cap_aliens(&term, &s, &limits).unwrap();
        assert_eq!(cap, t(&s, "plus x1 x2"));
    }
}

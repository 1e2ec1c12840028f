//! The termination checklist: every condition needed for strong
//! normalization of beta plus rewriting modulo the equations, aggregated
//! into one report.
//!
//! Conditions on equations: well-shaped (algebraic, symbol-headed, same
//! variables on both sides), linear, finite equivalence classes, none on
//! predicate symbols, and the computability-closure criterion in both
//! orientations. Conditions on rules: typing obligations, the first-order
//! block (non-duplication when higher-order rules exist, first-order
//! symbols only, termination attested or searched for refutation), the
//! closure criterion and safety for higher-order rules, and the extra
//! requirements on predicate-level rules. Confluence of the conversion
//! relation is checked last and is required only when type-level rules
//! exist.

use serde::Serialize;

use crate::closure::{general_schema_equation, general_schema_rule};
use crate::confluence::{self, CpKind, OverlapSource};
use crate::limits::Limits;
use crate::reduction::{self, ReductionTrace, TraceStep};
use crate::report::{Evidence, Verdict};
use crate::signature::{EqDirection, Signature};
use crate::term::Term;
use crate::typing::{self, TypingEnv};

/// Options for a checklist run.
#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    /// Accept termination of the first-order block as a user attestation.
    pub attest_fo_sn: bool,
    /// Step budget for the first-order non-termination search.
    pub refutation_steps: usize,
}

impl Default for CheckOptions {
    fn default() -> CheckOptions {
        CheckOptions {
            attest_fo_sn: false,
            refutation_steps: 10_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Condition {
    pub id: &'static str,
    pub statement: String,
    pub verdict: Verdict,
    pub evidence: Vec<Evidence>,
    /// Whether the condition counts toward the overall verdict.
    pub required: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Condition {
    fn new(id: &'static str, statement: impl Into<String>) -> Condition {
        Condition {
            id,
            statement: statement.into(),
            verdict: Verdict::Pass,
            evidence: Vec::new(),
            required: true,
            note: None,
        }
    }

    fn fail_if_evidence(mut self) -> Condition {
        if !self.evidence.is_empty() {
            self.verdict = Verdict::Fail;
        }
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub conditions: Vec<Condition>,
    pub overall: Verdict,
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn condition(&self, id: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.id == id)
    }

    pub fn passes(&self) -> bool {
        self.overall == Verdict::Pass
    }
}

fn eq_subject(sig: &Signature, i: usize) -> String {
    sig.equations[i].text.clone()
}

/// Equation shape: both sides algebraic and symbol-headed, same variables.
pub fn check_equation_shape(sig: &Signature) -> Condition {
    let mut c = Condition::new(
        "equation-shape",
        "every equation has algebraic, symbol-headed sides with the same variables",
    );
    for meq in &sig.malformed_equations {
        let detail = meq
            .violations
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        c.evidence.push(Evidence::new(meq.text.clone(), detail));
    }
    c.fail_if_evidence()
}

/// Every equation is linear: no variable occurs twice on either side.
pub fn check_e_linear(sig: &Signature) -> Condition {
    let mut c = Condition::new("equation-linearity", "every equation is linear on both sides");
    for (i, eq) in sig.equations.iter().enumerate() {
        for (side, term) in [("left", eq.lhs()), ("right", eq.rhs())] {
            let repeated: Vec<String> = term
                .var_occurrences()
                .into_iter()
                .filter(|(_, n)| *n > 1)
                .map(|(x, _)| x)
                .collect();
            if !repeated.is_empty() {
                c.evidence.push(Evidence::new(
                    eq_subject(sig, i),
                    format!("variable(s) {} repeated on the {side}-hand side", repeated.join(", ")),
                ));
            }
        }
    }
    c.fail_if_evidence()
}

// Size- and variable-multiset-preservation: a sound criterion for finite
// classes in permutative theories.
fn size_preserving(lhs: &Term, rhs: &Term) -> bool {
    lhs.symbol_count() == rhs.symbol_count() && lhs.var_occurrences() == rhs.var_occurrences()
}

/// Finite equivalence classes: the syntactic preservation criterion,
/// with a bounded enumeration probe on the equations that fail it.
pub fn check_finite_classes(sig: &Signature, limits: &Limits) -> Condition {
    let mut c = Condition::new(
        "finite-classes",
        "the equivalence classes generated by the equations are finite",
    );
    let probe_limits = limits.with_class_size(limits.max_class_size.min(500));
    let mut unknown = false;
    for (i, eq) in sig.equations.iter().enumerate() {
        if size_preserving(&eq.lhs(), &eq.rhs()) {
            continue;
        }
        let mut truncated = false;
        for side in [eq.lhs(), eq.rhs()] {
            let class = reduction::e_class(&side, sig, &probe_limits);
            if class.truncated {
                truncated = true;
                let last = class.len() - 1;
                c.evidence.push(
                    Evidence::new(
                        eq_subject(sig, i),
                        format!(
                            "class of '{}' exceeded {} members",
                            sig.show_term(&side),
                            probe_limits.max_class_size
                        ),
                    )
                    .with_trace(sig, class.representative(), &class.path_to(last)),
                );
                break;
            }
        }
        if !truncated {
            unknown = true;
            c.evidence.push(Evidence::new(
                eq_subject(sig, i),
                "not size-preserving; the bounded probe found no growth (finiteness unknown)",
            ));
        }
    }
    for (i, meq) in sig.malformed_equations.iter().enumerate() {
        if size_preserving(&meq.lhs, &meq.rhs) {
            continue;
        }
        if !meq.mechanically_usable() {
            unknown = true;
            c.evidence.push(Evidence::new(
                meq.text.clone(),
                "not size-preserving and not probeable (sides do not share their variables)",
            ));
            continue;
        }
        let mut truncated = false;
        for side in [meq.lhs.clone(), meq.rhs.clone()] {
            let class = reduction::e_class_probe(&side, sig, &[i], &probe_limits);
            if class.truncated {
                truncated = true;
                let last = class.len() - 1;
                c.evidence.push(
                    Evidence::new(
                        meq.text.clone(),
                        format!(
                            "class of '{}' exceeded {} members",
                            sig.show_term(&side),
                            probe_limits.max_class_size
                        ),
                    )
                    .with_trace(sig, class.representative(), &class.path_to(last)),
                );
                break;
            }
        }
        if !truncated {
            unknown = true;
            c.evidence.push(Evidence::new(
                meq.text.clone(),
                "not size-preserving; the bounded probe found no growth (finiteness unknown)",
            ));
        }
    }
    let any_truncation = c.evidence.iter().any(|e| e.trace.is_some());
    c.verdict = if any_truncation {
        Verdict::Fail
    } else if unknown {
        Verdict::Unknown
    } else {
        Verdict::Pass
    };
    c
}

/// No equation on predicate symbols.
pub fn check_no_predicate_equations(sig: &Signature) -> Condition {
    let mut c = Condition::new(
        "no-predicate-equations",
        "no equation is headed by a predicate symbol",
    );
    for (i, eq) in sig.equations.iter().enumerate() {
        for head in [eq.lhs_head, eq.rhs_head] {
            if sig.is_predicate(head) {
                c.evidence.push(Evidence::new(
                    eq_subject(sig, i),
                    format!("'{}' is a predicate symbol", sig.name(head)),
                ));
                break;
            }
        }
    }
    c.fail_if_evidence()
}

/// Typing obligations of every rule and of both orientations of every
/// equation.
pub fn check_rule_typing_all(sig: &Signature, limits: &Limits) -> Condition {
    let mut c = Condition::new(
        "rule-typing",
        "both sides of every rule and equation have the instantiated output type",
    );
    for rule in &sig.rules {
        let v = typing::check_rule_typing(sig, rule, limits);
        for (side, err) in [("left", &v.lhs_error), ("right", &v.rhs_error)] {
            if let Some(err) = err {
                c.evidence
                    .push(Evidence::new(rule.text.clone(), format!("{side}-hand side: {err}")));
            }
        }
    }
    for eq in &sig.equations {
        for dir in EqDirection::BOTH {
            let (lhs, rhs) = eq.oriented(dir);
            let head = eq.head(dir);
            let args: Vec<Term> = lhs.spine().1.into_iter().cloned().collect();
            let v = typing::check_oriented_typing(sig, head, &args, &rhs, &eq.env, &eq.rho, limits);
            for (side, err) in [("left", &v.lhs_error), ("right", &v.rhs_error)] {
                if let Some(err) = err {
                    c.evidence.push(Evidence::new(
                        eq.text.clone(),
                        format!("{side}-hand side ({dir:?}): {err}"),
                    ));
                }
            }
        }
    }
    c.fail_if_evidence()
}

fn first_order_only(sig: &Signature, t: &Term) -> Vec<String> {
    t.symbols()
        .into_iter()
        .filter(|f| !sig.is_first_order(*f))
        .map(|f| sig.name(f).to_string())
        .collect()
}

/// The three conditions on the first-order block.
pub fn check_first_order_block(
    sig: &Signature,
    opts: &CheckOptions,
    limits: &Limits,
) -> Vec<Condition> {
    let fo_rules = sig.first_order_rule_indices();
    let ho_rules = sig.higher_order_rule_indices();
    let fo_eqs = sig.first_order_equation_indices();

    // (a) non-duplication, required only when higher-order rules exist
    let mut dup = Condition::new(
        "first-order-non-duplicating",
        "first-order rules do not duplicate variables",
    );
    if ho_rules.is_empty() {
        dup.note = Some("not required: there are no higher-order rules".to_string());
    } else {
        for &i in &fo_rules {
            let rule = &sig.rules[i];
            if !rule.is_non_duplicating() {
                dup.evidence.push(Evidence::new(
                    rule.text.clone(),
                    "a variable occurs more often on the right-hand side than on the left",
                ));
            }
        }
        dup = dup.fail_if_evidence();
    }

    // (b) first-order rules and equations only mention first-order symbols
    let mut pure = Condition::new(
        "first-order-symbols-only",
        "first-order rules and equations contain only first-order symbols",
    );
    for &i in &fo_rules {
        let rule = &sig.rules[i];
        let mut bad = first_order_only(sig, &rule.lhs());
        bad.extend(first_order_only(sig, &rule.rhs));
        bad.dedup();
        if !bad.is_empty() {
            pure.evidence.push(Evidence::new(
                rule.text.clone(),
                format!("uses higher-order symbol(s): {}", bad.join(", ")),
            ));
        }
    }
    for &i in &fo_eqs {
        let eq = &sig.equations[i];
        let mut bad = first_order_only(sig, &eq.lhs());
        bad.extend(first_order_only(sig, &eq.rhs()));
        bad.dedup();
        if !bad.is_empty() {
            pure.evidence.push(Evidence::new(
                eq.text.clone(),
                format!("uses higher-order symbol(s): {}", bad.join(", ")),
            ));
        }
    }
    pure = pure.fail_if_evidence();

    // (c) termination of the first-order block
    let mut sn = Condition::new(
        "first-order-termination",
        "rewriting with the first-order rules modulo the first-order equations terminates \
         on first-order algebraic terms",
    );
    if fo_rules.is_empty() {
        sn.note = Some("trivially: there are no first-order rules".to_string());
    } else if opts.attest_fo_sn || sig.attested_fo_sn() {
        sn.verdict = Verdict::Assumed;
        sn.note = Some("attested by the user".to_string());
    } else {
        match refutation_search(sig, &fo_rules, &fo_eqs, opts.refutation_steps, limits) {
            Some((start, trace)) => {
                sn.verdict = Verdict::Fail;
                sn.evidence.push(
                    Evidence::new(
                        sig.show_term(&start),
                        "a cyclic reduction was found (the term reduces to itself)",
                    )
                    .with_trace(sig, &start, &trace),
                );
            }
            None => {
                sn.verdict = Verdict::Unknown;
                sn.note = Some(format!(
                    "bounded search ({} steps) found no counterexample; attest with \
                     'attest fo-sn' or --attest-fo-sn",
                    opts.refutation_steps
                ));
            }
        }
    }
    vec![dup, pure, sn]
}

// Enumerate small first-order algebraic terms and follow the first-order
// relation looking for a term that reduces to itself. Depth-first with a
// shared step budget; a found cycle is a genuine non-termination witness.
fn refutation_search(
    sig: &Signature,
    fo_rules: &[usize],
    fo_eqs: &[usize],
    step_budget: usize,
    limits: &Limits,
) -> Option<(Term, ReductionTrace)> {
    let seeds = first_order_seed_terms(sig, 3, 600);
    let mut budget = step_budget;
    for seed in seeds {
        if budget == 0 {
            break;
        }
        // frontier of (term, cumulative steps from the seed, depth)
        let mut frontier: Vec<(Term, ReductionTrace, usize)> = vec![(seed.clone(), Vec::new(), 0)];
        while let Some((term, steps, depth)) = frontier.pop() {
            if budget == 0 {
                break;
            }
            budget -= 1;
            if depth > 20 {
                continue;
            }
            let reducts =
                match reduction::rel_step_filtered(&term, sig, Some(fo_rules), Some(fo_eqs), limits) {
                    Ok(r) => r,
                    Err(_) => continue,
                };
            for (next, trace) in reducts {
                let mut all_steps = steps.clone();
                all_steps.extend(trace);
                // a repeat of any prefix term closes a cycle
                if next == seed {
                    return Some((seed, all_steps));
                }
                if let Some(k) = prefix_occurrence(&seed, &steps, &next, sig) {
                    let cycle_steps: ReductionTrace = all_steps[k.1..].to_vec();
                    return Some((k.0, cycle_steps));
                }
                frontier.push((next, all_steps, depth + 1));
            }
        }
    }
    None
}

// Find `needle` among the terms visited along `steps` from `seed`;
// returns the matching term and how many steps led to it.
fn prefix_occurrence(
    seed: &Term,
    steps: &[TraceStep],
    needle: &Term,
    sig: &Signature,
) -> Option<(Term, usize)> {
    let mut here = seed.clone();
    if here == *needle {
        return Some((here, 0));
    }
    for (i, step) in steps.iter().enumerate() {
        here = reduction::replay(&here, std::slice::from_ref(step), sig).ok()?;
        if here == *needle {
            return Some((here, i + 1));
        }
    }
    None
}

fn first_order_seed_terms(sig: &Signature, max_depth: usize, cap: usize) -> Vec<Term> {
    let mut by_depth: Vec<Vec<Term>> = Vec::new();
    let mut level0 = vec![Term::var("x"), Term::var("y")];
    let fo_functions: Vec<_> = sig
        .symbol_ids()
        .filter(|&f| sig.is_function(f) && sig.is_first_order(f))
        .collect();
    for &f in &fo_functions {
        if sig.arity(f) == 0 {
            level0.push(Term::Symb(f));
        }
    }
    by_depth.push(level0);
    for _ in 1..max_depth {
        let pool: Vec<Term> = by_depth.iter().flatten().cloned().collect();
        let mut next = Vec::new();
        for &f in &fo_functions {
            let arity = sig.arity(f);
            if arity == 0 || arity > 2 {
                continue;
            }
            if arity == 1 {
                for t in &pool {
                    next.push(Term::apply(Term::Symb(f), [t.clone()]));
                }
            } else {
                for a in &pool {
                    for b in &pool {
                        next.push(Term::apply(Term::Symb(f), [a.clone(), b.clone()]));
                        if by_depth.iter().flatten().count() + next.len() > cap {
                            break;
                        }
                    }
                }
            }
        }
        by_depth.push(next);
        if by_depth.iter().flatten().count() > cap {
            break;
        }
    }
    by_depth.into_iter().flatten().take(cap).collect()
}

/// Higher-order rules: the closure criterion and safety (no pattern
/// matching on predicate-typed argument positions).
pub fn check_higher_order_rules(sig: &Signature, limits: &Limits) -> Vec<Condition> {
    let ho_rules = sig.higher_order_rule_indices();

    let mut schema = Condition::new(
        "higher-order-schema",
        "every higher-order rule satisfies the computability-closure criterion",
    );
    for &i in &ho_rules {
        let rule = &sig.rules[i];
        let v = general_schema_rule(sig, rule, limits);
        if !v.pass() {
            schema
                .evidence
                .push(Evidence::new(rule.text.clone(), v.describe()));
        }
    }
    schema = schema.fail_if_evidence();
    if ho_rules.is_empty() {
        schema.note = Some("trivially: there are no higher-order rules".to_string());
    }

    let mut safety = Condition::new(
        "higher-order-safety",
        "higher-order rules never match on predicate-typed argument positions",
    );
    for &i in &ho_rules {
        let rule = &sig.rules[i];
        if let Some(detail) = safety_violation(sig, rule, limits) {
            safety.evidence.push(Evidence::new(rule.text.clone(), detail));
        }
    }
    safety = safety.fail_if_evidence();
    if ho_rules.is_empty() {
        safety.note = Some("trivially: there are no higher-order rules".to_string());
    }
    vec![schema, safety]
}

// A left-hand side argument whose declared type is a kind must be a
// variable, and those variables must be pairwise distinct.
fn safety_violation(sig: &Signature, rule: &crate::signature::RewriteRule, limits: &Limits) -> Option<String> {
    let (env, _) = sig.telescope(rule.head);
    let mut seen_vars: Vec<&str> = Vec::new();
    let mut prefix = TypingEnv::new();
    for ((name, ty), arg) in env.iter().zip(rule.lhs_args.iter()) {
        let is_kind = matches!(
            typing::infer(sig, &prefix, ty, limits),
            Ok(Term::Sort(crate::term::Sort::Box))
        );
        if is_kind {
            match arg {
                Term::Var(x) => {
                    if seen_vars.contains(&x.as_str()) {
                        return Some(format!(
                            "predicate-typed argument '{x}' is matched non-linearly"
                        ));
                    }
                    seen_vars.push(x);
                }
                other => {
                    return Some(format!(
                        "predicate-typed argument position '{name}' is matched against '{}'",
                        sig.show_term(other)
                    ));
                }
            }
        }
        prefix.push(name.clone(), ty.clone());
    }
    None
}

/// Rules on predicate symbols: no critical pairs among them, the closure
/// criterion, and smallness (every predicate variable of the right-hand
/// side is one of the left-hand side arguments).
pub fn check_predicate_rules(sig: &Signature, limits: &Limits) -> Condition {
    let mut c = Condition::new(
        "predicate-rules",
        "rules on predicate symbols have no critical pairs, satisfy the closure criterion \
         and are small",
    );
    let pred_rules: Vec<usize> = (0..sig.rules.len())
        .filter(|&i| sig.is_predicate(sig.rules[i].head))
        .collect();
    if pred_rules.is_empty() {
        c.note = Some("trivially: there are no rules on predicate symbols".to_string());
        return c;
    }
    // critical pairs among predicate-level rules
    for cp in confluence::critical_pairs(sig) {
        if cp.kind != CpKind::RR {
            continue;
        }
        let (OverlapSource::Rule(a), OverlapSource::Rule(b)) = (cp.outer, cp.inner) else {
            continue;
        };
        if pred_rules.contains(&a) && pred_rules.contains(&b) {
            c.evidence.push(Evidence::new(
                sig.rules[a].text.clone(),
                format!(
                    "critical pair with '{}' at {} (peak '{}')",
                    sig.rules[b].text,
                    sig.show_position(&cp.peak, &cp.position),
                    sig.show_term(&cp.peak)
                ),
            ));
        }
    }
    for &i in &pred_rules {
        let rule = &sig.rules[i];
        let v = general_schema_rule(sig, rule, limits);
        if !v.pass() {
            c.evidence.push(Evidence::new(rule.text.clone(), v.describe()));
        }
        // smallness
        let mut prefix = TypingEnv::new();
        for (name, ty) in rule.env.iter() {
            let is_kind = matches!(
                typing::infer(sig, &prefix, ty, limits),
                Ok(Term::Sort(crate::term::Sort::Box))
            );
            if is_kind
                && rule.rhs.mentions_var(name)
                && !rule.lhs_args.iter().any(|a| *a == Term::var(name.clone()))
            {
                c.evidence.push(Evidence::new(
                    rule.text.clone(),
                    format!("predicate variable '{name}' of the right-hand side is not a left-hand side argument"),
                ));
            }
            prefix.push(name.clone(), ty.clone());
        }
    }
    c.fail_if_evidence()
}

/// The closure criterion for equations, both orientations.
pub fn check_equation_schema(sig: &Signature, limits: &Limits) -> Condition {
    let mut c = Condition::new(
        "equation-schema",
        "every equation satisfies the computability-closure criterion in both orientations",
    );
    for eq in &sig.equations {
        let v = general_schema_equation(sig, eq, limits);
        for d in &v.directions {
            if !d.pass() {
                c.evidence.push(Evidence::new(
                    eq.text.clone(),
                    format!("{:?}: {}", d.direction, d.describe()),
                ));
            }
        }
    }
    c.fail_if_evidence()
}

/// The termination conditions alone, without the confluence check.
pub fn sn_conditions(sig: &Signature, opts: &CheckOptions, limits: &Limits) -> Vec<Condition> {
    let mut conditions = vec![
        check_rule_typing_all(sig, limits),
        check_equation_shape(sig),
        check_e_linear(sig),
        check_finite_classes(sig, limits),
        check_no_predicate_equations(sig),
    ];
    conditions.extend(check_first_order_block(sig, opts, limits));
    conditions.extend(check_higher_order_rules(sig, limits));
    conditions.push(check_predicate_rules(sig, limits));
    conditions.push(check_equation_schema(sig, limits));
    conditions
}

/// Whether the termination checklist passes (attested conditions count).
pub fn sn_checklist_passes(sig: &Signature, opts: &CheckOptions, limits: &Limits) -> bool {
    sn_conditions(sig, opts, limits)
        .iter()
        .filter(|c| c.required)
        .all(|c| matches!(c.verdict, Verdict::Pass | Verdict::Assumed))
}

/// Run every check and fold the overall verdict. Confluence of the
/// conversion relation is computed last, using the other conditions as
/// the termination premise, and is required only when there are
/// type-level (predicate-headed) rules.
pub fn assemble_report(sig: &Signature, opts: &CheckOptions, limits: &Limits) -> ConditionReport {
    let mut conditions = sn_conditions(sig, opts, limits);

    let sn_passed = conditions
        .iter()
        .filter(|c| c.required)
        .all(|c| matches!(c.verdict, Verdict::Pass | Verdict::Assumed));

    let analysis = confluence::confluence_verdict(sig, sn_passed, limits);
    let type_level_rules = sig.rules.iter().any(|r| sig.is_predicate(r.head));
    let mut confl = Condition::new(
        "conversion-confluence",
        "the conversion relation (beta, rules and equations) is confluent",
    );
    confl.verdict = analysis.verdict_as_report();
    confl.required = type_level_rules;
    if !type_level_rules {
        confl.note = Some("informational: there are no type-level rewrite rules".to_string());
    }
    match &analysis.verdict {
        confluence::ConfluenceVerdict::ConfluentOnClasses { theorem } => {
            confl.evidence.push(Evidence::new(
                "confluence",
                format!(
                    "confluent modulo the equations on equivalence classes ({})",
                    match theorem {
                        confluence::TheoremUsed::SnLocalConfluenceCoherence =>
                            "termination plus local confluence and coherence from the critical pairs",
                        confluence::TheoremUsed::LeftLinearCombination =>
                            "left-linear combination route",
                    }
                ),
            ));
        }
        _ => {
            for b in &analysis.blocking {
                confl.evidence.push(Evidence::new("confluence", b.clone()));
            }
        }
    }
    conditions.push(confl);

    let mut notes = Vec::new();
    let eq_only_defined: Vec<String> = sig
        .symbol_ids()
        .filter(|&f| sig.is_eq_headed(f) && !sig.is_rule_defined(f))
        .map(|f| sig.name(f).to_string())
        .collect();
    if !eq_only_defined.is_empty() {
        notes.push(format!(
            "classification-note: symbols defined only by equations are reported as defined: {}",
            eq_only_defined.join(", ")
        ));
    }
    notes.push(
        "safety reading: a left-hand side argument at a predicate-typed position must be a \
         variable, and such variables must be pairwise distinct"
            .to_string(),
    );
    notes.push(
        "equal-symbol calls compare arguments with the plain (syntactic) subterm ordering; \
         rejections are conservative"
            .to_string(),
    );

    let overall = fold_overall(&conditions);
    ConditionReport {
        conditions,
        overall,
        notes,
    }
}

fn fold_overall(conditions: &[Condition]) -> Verdict {
    let required = conditions.iter().filter(|c| c.required);
    let mut overall = Verdict::Pass;
    for c in required {
        match c.verdict {
            Verdict::Fail => return Verdict::Fail,
            Verdict::Unknown => overall = Verdict::Unknown,
            Verdict::Pass | Verdict::Assumed => {}
        }
    }
    overall
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

    fn sig(src: &str) -> Signature {
        Signature::from_source(src).expect("load")
    }

    fn report(src: &str, attest: bool) -> ConditionReport {
        let s = sig(src);
        let opts = CheckOptions {
            attest_fo_sn: attest,
            ..CheckOptions::default()
        };
        assemble_report(&s, &opts, &Limits::default())
    }

    #[test]
    fn nat_ac_passes_with_attestation() {
        let r = report(NAT_AC, true);
        assert_eq!(r.overall, Verdict::Pass, "{:#?}", r.conditions);
        assert_eq!(r.condition("first-order-termination").unwrap().verdict, Verdict::Assumed);
        assert_eq!(r.condition("equation-schema").unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn nat_ac_is_unknown_without_attestation() {
        let r = report(NAT_AC, false);
        assert_eq!(r.overall, Verdict::Unknown);
        assert_eq!(
            r.condition("first-order-termination").unwrap().verdict,
            Verdict::Unknown
        );
    }

    #[test]
    fn distributivity_fails_linearity() {
        let src = format!(
            "{NAT_AC}symbol times : nat => nat => nat\n\
             eq [x:nat, y:nat, z:nat] times x (plus y z) = plus (times x y) (times x z)\n"
        );
        let r = report(&src, true);
        assert_eq!(r.overall, Verdict::Fail);
        assert_eq!(r.condition("equation-linearity").unwrap().verdict, Verdict::Fail);
        assert_eq!(r.condition("equation-shape").unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn neutrality_fails_finite_classes() {
        let src = format!("{NAT_AC}eq [x:nat] plus x zero = x\n");
        let r = report(&src, true);
        assert_eq!(r.overall, Verdict::Fail);
        let fc = r.condition("finite-classes").unwrap();
        assert_eq!(fc.verdict, Verdict::Fail);
        // the truncation evidence replays
        let ev = fc.evidence.iter().find(|e| e.trace.is_some()).unwrap();
        let (source, steps) = ev.trace.as_ref().unwrap().replayable.clone().unwrap();
        let s = sig(&src);
        assert!(reduction::replay(&source, &steps, &s).is_ok());
    }

    #[test]
    fn absorbing_and_inverse_fail_shape() {
        let src = "\
symbol nat : *
symbol zero : nat
symbol times : nat => nat => nat
symbol minus : nat => nat
symbol plus : nat => nat => nat
eq [x:nat] times x zero = zero
eq [x:nat] plus x (minus x) = zero
";
        let r = report(src, true);
        assert_eq!(r.overall, Verdict::Fail);
        let shape = r.condition("equation-shape").unwrap();
        assert_eq!(shape.verdict, Verdict::Fail);
        assert_eq!(shape.evidence.len(), 2);
        for e in &shape.evidence {
            assert!(e.detail.contains("distinct sets of variables"), "{e:?}");
        }
    }

    #[test]
    fn predicate_equations_are_rejected() {
        let src = "\
symbol conj : * => * => *
eq [A:*, B:*] conj A B = conj B A
";
        let r = report(src, true);
        assert_eq!(
            r.condition("no-predicate-equations").unwrap().verdict,
            Verdict::Fail
        );
        assert_eq!(r.overall, Verdict::Fail);
    }

    #[test]
    fn duplicating_first_order_rule() {
        // with a higher-order rule present, duplication fails
        let with_ho = "\
symbol nat : *
symbol zero : nat
symbol plus : nat => nat => nat
symbol d : nat => nat
symbol list : * => *
symbol nil : (A:*) list A
symbol idl : (A:*) list A => list A
rule [x:nat] d x -> plus x x
rule [A:*, l:list A] idl A l -> l
";
        let r = report(with_ho, true);
        assert_eq!(
            r.condition("first-order-non-duplicating").unwrap().verdict,
            Verdict::Fail
        );
        // without higher-order rules the condition is waived
        let without_ho = "\
symbol nat : *
symbol zero : nat
symbol plus : nat => nat => nat
symbol d : nat => nat
rule [x:nat] d x -> plus x x
";
        let r = report(without_ho, true);
        let c = r.condition("first-order-non-duplicating").unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(c.note.as_deref().unwrap_or("").contains("not required"));
    }

    #[test]
    fn first_order_purity() {
        // len has a primitive output type, so it is classified first-order,
        // yet its rule mentions the higher-order symbol nil
        let src = "\
symbol nat : *
symbol zero : nat
symbol list : * => *
symbol nil : (A:*) list A
symbol len : (A:*) list A => nat
rule [A:*] len A (nil A') -> zero with A' := A
";
        let r = report(src, true);
        assert_eq!(
            r.condition("first-order-symbols-only").unwrap().verdict,
            Verdict::Fail
        );
    }

    #[test]
    fn refutation_search_finds_cycles() {
        // f x -> g x, g x -> f x loops; the search must find the cycle
        let src = "\
symbol nat : *
symbol zero : nat
symbol f : nat => nat
symbol g : nat => nat
rule [x:nat] f x -> g x
rule [x:nat] g x -> f x
";
        let r = report(src, false);
        let c = r.condition("first-order-termination").unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        let ev = &c.evidence[0];
        let (source, steps) = ev.trace.as_ref().unwrap().replayable.clone().unwrap();
        let s = sig(src);
        // the witness trace really is a cycle
        let target = reduction::replay(&source, &steps, &s).unwrap();
        assert_eq!(target, source);
        assert!(!steps.is_empty());
    }

    #[test]
    fn safety_of_higher_order_rules() {
        // matching a predicate-typed position against a constant
        let src = "\
symbol nat : *
symbol list : * => *
symbol nil : (A:*) list A
symbol f : (A:*) list A => list A
rule [l:list nat] f nat l -> l
";
        let r = report(src, true);
        assert_eq!(r.condition("higher-order-safety").unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn report_is_deterministic() {
        let a = serde_json::to_string(&report(NAT_AC, true)).unwrap();
        let b = serde_json::to_string(&report(NAT_AC, true)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn confluence_condition_is_informational_without_type_level_rules() {
        let r = report(NAT_AC, true);
        let c = r.condition("conversion-confluence").unwrap();
        assert!(!c.required);
        assert_eq!(c.verdict, Verdict::Pass);
    }
}

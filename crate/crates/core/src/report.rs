//! Shared report vocabulary: verdicts, evidence entries and rendered
//! reduction traces.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::reduction::{replay, ReductionTrace, StepRelation, TraceStep};
use crate::signature::{EqDirection, Signature};
use crate::term::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Assumed,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Assumed => "ASSUMED",
            Verdict::Unknown => "UNKNOWN",
        };
        write!(f, "{s}")
    }
}

/// A piece of evidence attached to a verdict: what it is about, a short
/// explanation, and optionally a replayable reduction trace.
#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub subject: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<RenderedTrace>,
}

impl Evidence {
    pub fn new(subject: impl Into<String>, detail: impl Into<String>) -> Evidence {
        Evidence {
            subject: subject.into(),
            detail: detail.into(),
            trace: None,
        }
    }

    pub fn with_trace(mut self, sig: &Signature, source: &Term, steps: &ReductionTrace) -> Evidence {
        self.trace = Some(RenderedTrace::new(sig, source, steps));
        self
    }
}

/// A reduction trace rendered for the report; the structured form is kept
/// so the trace can be replayed.
#[derive(Clone, Debug, Serialize)]
pub struct RenderedTrace {
    pub source: String,
    pub target: String,
    pub steps: Vec<RenderedStep>,
    #[serde(skip)]
    pub replayable: Option<(Term, ReductionTrace)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RenderedStep {
    pub relation: String,
    pub using: String,
    pub position: String,
    pub subst: BTreeMap<String, String>,
}

fn direction_name(dir: EqDirection) -> &'static str {
    match dir {
        EqDirection::LeftToRight => "left-to-right",
        EqDirection::RightToLeft => "right-to-left",
    }
}

impl RenderedTrace {
    pub fn new(sig: &Signature, source: &Term, steps: &ReductionTrace) -> RenderedTrace {
        let mut rendered = Vec::new();
        let mut here = source.clone();
        for step in steps {
            let (relation, using) = match &step.relation {
                StepRelation::Beta => ("beta".to_string(), "beta".to_string()),
                StepRelation::Rule(i) => (
                    format!("rule#{i}"),
                    sig.rules.get(*i).map(|r| r.text.clone()).unwrap_or_default(),
                ),
                StepRelation::Eq(i, dir) => (
                    format!("eq#{i}:{}", direction_name(*dir)),
                    sig.equations.get(*i).map(|e| e.text.clone()).unwrap_or_default(),
                ),
                StepRelation::Probe(i, dir) => (
                    format!("probe#{i}:{}", direction_name(*dir)),
                    sig.malformed_equations
                        .get(*i)
                        .map(|e| e.text.clone())
                        .unwrap_or_default(),
                ),
            };
            let subst = step
                .subst
                .iter()
                .map(|(x, t)| (x.clone(), sig.show_term(t)))
                .collect();
            rendered.push(RenderedStep {
                relation,
                using,
                position: sig.show_position(&here, &step.position),
                subst,
            });
            here = replay(&here, std::slice::from_ref(step), sig).unwrap_or(here);
        }
        RenderedTrace {
            source: sig.show_term(source),
            target: sig.show_term(&here),
            steps: rendered,
            replayable: Some((source.clone(), steps.clone())),
        }
    }
}

/// Summary step line for human-readable output.
pub fn describe_step(sig: &Signature, step: &TraceStep) -> String {
    match &step.relation {
        StepRelation::Beta => "beta".to_string(),
        StepRelation::Rule(i) => sig
            .rules
            .get(*i)
            .map(|r| r.text.clone())
            .unwrap_or_else(|| format!("rule#{i}")),
        StepRelation::Eq(i, dir) => format!(
            "{} ({})",
            sig.equations
                .get(*i)
                .map(|e| e.text.clone())
                .unwrap_or_else(|| format!("eq#{i}")),
            direction_name(*dir)
        ),
        StepRelation::Probe(i, dir) => format!(
            "{} ({})",
            sig.malformed_equations
                .get(*i)
                .map(|e| e.text.clone())
                .unwrap_or_else(|| format!("probe#{i}")),
            direction_name(*dir)
        ),
    }
}

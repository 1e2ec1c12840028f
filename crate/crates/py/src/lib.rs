//! Python bindings: load a signature from source text, then normalize,
//! join, typecheck and run the condition/confluence reports from Python.
//! Reports are returned as JSON strings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use cacmod::closure::{general_schema_equation, general_schema_rule};
use cacmod::conditions::{assemble_report, CheckOptions};
use cacmod::confluence::confluence_verdict;
use cacmod::reduction;
use cacmod::typing;
use cacmod::{Limits, Signature, Term, TypingEnv};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// A loaded signature with its resource limits.
#[pyclass]
struct Checker {
    sig: Signature,
    limits: Limits,
}

impl Checker {
    fn term(&self, source: &str) -> PyResult<Term> {
        self.sig.parse_term(source).map_err(value_err)
    }
}

#[pymethods]
impl Checker {
    #[new]
    #[pyo3(signature = (source, max_class_size=10_000, fuel=100_000))]
    fn new(source: &str, max_class_size: usize, fuel: u64) -> PyResult<Self> {
        let limits = Limits {
            max_class_size,
            fuel,
        };
        let sig = Signature::from_source_with(source, &limits).map_err(value_err)?;
        Ok(Checker { sig, limits })
    }

    /// Declared symbol names, in declaration order.
    fn symbols(&self) -> Vec<String> {
        self.sig
            .symbol_ids()
            .map(|f| self.sig.name(f).to_string())
            .collect()
    }

    /// Normal form of a term under beta and rewriting modulo the equations.
    fn normalize(&self, term: &str) -> PyResult<String> {
        let t = self.term(term)?;
        let nf = reduction::normalize(&t, &self.sig, &self.limits).map_err(runtime_err)?;
        Ok(self.sig.show_term(&nf))
    }

    /// Whether two terms have a common reduct modulo the equations.
    fn joinable(&self, left: &str, right: &str) -> PyResult<bool> {
        let l = self.term(left)?;
        let r = self.term(right)?;
        reduction::joinable_modulo(&l, &r, &self.sig, &self.limits).map_err(runtime_err)
    }

    /// Members of the equivalence class of a term (bounded).
    fn equivalence_class(&self, term: &str) -> PyResult<Vec<String>> {
        let t = self.term(term)?;
        let class = reduction::e_class(&t, &self.sig, &self.limits);
        if class.truncated {
            return Err(runtime_err(format!(
                "class exceeded {} members",
                self.limits.max_class_size
            )));
        }
        Ok(class.members.iter().map(|m| self.sig.show_term(m)).collect())
    }

    /// Inferred type of a closed term.
    fn infer_type(&self, term: &str) -> PyResult<String> {
        let t = self.term(term)?;
        let ty = typing::infer(&self.sig, &TypingEnv::new(), &t, &self.limits).map_err(value_err)?;
        Ok(self.sig.show_term(&ty))
    }

    /// Check a closed term against an expected type.
    fn typecheck(&self, term: &str, expected: &str) -> PyResult<bool> {
        let t = self.term(term)?;
        let ty = self.term(expected)?;
        typing::check(&self.sig, &TypingEnv::new(), &t, &ty, &self.limits).map_err(runtime_err)
    }

    /// The full termination checklist as a JSON report.
    #[pyo3(signature = (attest_fo_sn=false))]
    fn check(&self, attest_fo_sn: bool) -> PyResult<String> {
        let opts = CheckOptions {
            attest_fo_sn: attest_fo_sn || self.sig.attested_fo_sn(),
            ..CheckOptions::default()
        };
        let report = assemble_report(&self.sig, &opts, &self.limits);
        serde_json::to_string_pretty(&report).map_err(runtime_err)
    }

    /// Critical pairs and the confluence verdict as a JSON report.
    #[pyo3(signature = (attest_fo_sn=false))]
    fn confluence(&self, attest_fo_sn: bool) -> PyResult<String> {
        let opts = CheckOptions {
            attest_fo_sn: attest_fo_sn || self.sig.attested_fo_sn(),
            ..CheckOptions::default()
        };
        let sn = cacmod::conditions::sn_checklist_passes(&self.sig, &opts, &self.limits);
        let analysis = confluence_verdict(&self.sig, sn, &self.limits);
        serde_json::to_string_pretty(&analysis.to_report(&self.sig)).map_err(runtime_err)
    }

    /// Closure-criterion verdicts per rule and per equation, as JSON.
    fn schema(&self) -> PyResult<String> {
        let mut rules = Vec::new();
        for rule in &self.sig.rules {
            let v = general_schema_rule(&self.sig, rule, &self.limits);
            rules.push(serde_json::json!({
                "rule": rule.text,
                "pass": v.pass(),
                "detail": v.describe(),
            }));
        }
        let mut equations = Vec::new();
        for eq in &self.sig.equations {
            let v = general_schema_equation(&self.sig, eq, &self.limits);
            let directions: Vec<_> = v
                .directions
                .iter()
                .map(|d| {
                    serde_json::json!({
                        "direction": format!("{:?}", d.direction),
                        "pass": d.pass(),
                        "detail": d.describe(),
                    })
                })
                .collect();
            equations.push(serde_json::json!({
                "equation": eq.text,
                "pass": v.pass(),
                "directions": directions,
            }));
        }
        serde_json::to_string_pretty(&serde_json::json!({
            "rules": rules,
            "equations": equations,
        }))
        .map_err(runtime_err)
    }
}

#[pymodule]
fn cacmod_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Checker>()?;
    Ok(())
}

//! Check and verification reports.
//!
//! Checkers produce [`Violation`]s in lexicographic `(p, E, ω)` order; the
//! first one is the minimal witness. Reports carry the named, serializable
//! form [`Witness`].

use serde::{Deserialize, Serialize};

use crate::events::{Event, StateSpace};
use crate::rational::Rational;

/// Upper bound on witnesses kept per report.
pub const MAX_WITNESSES: usize = 8;

/// Index-level violation record. Cheap to copy; converted to a [`Witness`]
/// only when a report is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Violation {
    pub p: Option<Rational>,
    pub event: Option<Event>,
    pub state: Option<usize>,
    pub other_state: Option<usize>,
    pub agent: Option<usize>,
    pub value: Option<Rational>,
    pub note: &'static str,
}

impl Violation {
    pub fn at(state: usize) -> Self {
        Violation {
            state: Some(state),
            ..Default::default()
        }
    }

    pub fn on(event: Event, state: usize) -> Self {
        Violation {
            event: Some(event),
            state: Some(state),
            ..Default::default()
        }
    }

    pub fn event(event: Event) -> Self {
        Violation {
            event: Some(event),
            ..Default::default()
        }
    }

    pub fn with_p(mut self, p: Rational) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_other(mut self, other: usize) -> Self {
        self.other_state = Some(other);
        self
    }

    pub fn with_value(mut self, value: Rational) -> Self {
        self.value = Some(value);
        self
    }

    pub fn with_agent(mut self, agent: usize) -> Self {
        self.agent = Some(agent);
        self
    }

    pub fn note(mut self, note: &'static str) -> Self {
        self.note = note;
        self
    }

    pub fn to_witness(&self, space: &StateSpace, agents: &[String]) -> Witness {
        Witness {
            p: self.p,
            event: self.event.map(|e| space.event_names(e)),
            state: self.state.map(|s| space.name(s).to_string()),
            other_state: self.other_state.map(|s| space.name(s).to_string()),
            agent: self.agent.and_then(|a| agents.get(a).cloned()),
            value: self.value,
            note: (!self.note.is_empty()).then(|| self.note.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct Witness {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other_state: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if let Some(a) = &self.agent {
            parts.push(format!("agent={a}"));
        }
        if let Some(p) = &self.p {
            parts.push(format!("p={p}"));
        }
        if let Some(e) = &self.event {
            parts.push(format!("E={{{}}}", e.join(",")));
        }
        match (&self.state, &self.other_state) {
            (Some(s), Some(o)) => parts.push(format!("at=({s},{o})")),
            (Some(s), None) => parts.push(format!("at={s}")),
            _ => {}
        }
        if let Some(v) = &self.value {
            parts.push(format!("value={v}"));
        }
        if let Some(n) = &self.note {
            parts.push(n.clone());
        }
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub witnesses: Vec<Witness>,
    pub scope: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sub_reports: Vec<CheckReport>,
}

impl CheckReport {
    pub fn pass(name: impl Into<String>, scope: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            passed: true,
            witnesses: Vec::new(),
            scope: scope.into(),
            sub_reports: Vec::new(),
        }
    }

    /// Builds a report from a violation stream: passes iff the stream is
    /// empty, keeping at most [`MAX_WITNESSES`] witnesses.
    pub fn from_violations<I>(
        name: impl Into<String>,
        scope: impl Into<String>,
        violations: I,
        space: &StateSpace,
        agents: &[String],
    ) -> Self
    where
        I: IntoIterator<Item = Violation>,
    {
        let witnesses: Vec<Witness> = violations
            .into_iter()
            .take(MAX_WITNESSES)
            .map(|v| v.to_witness(space, agents))
            .collect();
        CheckReport {
            name: name.into(),
            passed: witnesses.is_empty(),
            witnesses,
            scope: scope.into(),
            sub_reports: Vec::new(),
        }
    }

    /// A conjunction of sub-reports.
    pub fn all(name: impl Into<String>, scope: impl Into<String>, subs: Vec<CheckReport>) -> Self {
        CheckReport {
            name: name.into(),
            passed: subs.iter().all(|r| r.passed),
            witnesses: Vec::new(),
            scope: scope.into(),
            sub_reports: subs,
        }
    }

    /// Adds a witness-bearing failure. Keeps the `passed = false ⟹
    /// witnesses nonempty` contract for conjunctions.
    pub fn with_witness(mut self, w: Witness) -> Self {
        self.passed = false;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(w);
        }
        self
    }

    /// Depth-first search for a sub-report by name.
    pub fn find(&self, name: &str) -> Option<&CheckReport> {
        if self.name == name {
            return Some(self);
        }
        self.sub_reports.iter().find_map(|r| r.find(name))
    }

    /// Witnesses of this report or, for conjunctions, of its first failing
    /// descendant.
    pub fn first_witnesses(&self) -> &[Witness] {
        if !self.witnesses.is_empty() {
            return &self.witnesses;
        }
        self.sub_reports
            .iter()
            .find(|r| !r.passed)
            .map(|r| r.first_witnesses())
            .unwrap_or(&[])
    }

    pub fn render_text(&self, indent: usize, out: &mut String) {
        use std::fmt::Write;
        let pad = "  ".repeat(indent);
        let status = if self.passed { "pass" } else { "FAIL" };
        let _ = writeln!(out, "{pad}{status} {} [{}]", self.name, self.scope);
        for w in &self.witnesses {
            let _ = writeln!(out, "{pad}  witness: {w}");
        }
        for r in &self.sub_reports {
            r.render_text(indent + 1, out);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Every asserted equivalence or conclusion holds.
    Holds,
    /// An asserted equivalence or conclusion fails.
    Falsified,
    /// Preconditions fail and the claim was not asserted.
    HypothesisNotMet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: String,
    pub lhs: Option<bool>,
    pub rhs: Option<bool>,
    pub equivalent: bool,
    pub verdict: Verdict,
    pub diagnostic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conclusion_holds: Option<bool>,
    pub hypotheses: Vec<CheckReport>,
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<VerificationReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(claim: impl Into<String>) -> Self {
        VerificationReport {
            claim: claim.into(),
            lhs: None,
            rhs: None,
            equivalent: true,
            verdict: Verdict::Holds,
            diagnostic: false,
            conclusion_holds: None,
            hypotheses: Vec::new(),
            witnesses: Vec::new(),
            parts: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// An iff report: both sides evaluated, verdict from their agreement.
    pub fn iff(claim: impl Into<String>, lhs: bool, rhs: bool) -> Self {
        let mut r = VerificationReport::new(claim);
        r.lhs = Some(lhs);
        r.rhs = Some(rhs);
        r.equivalent = lhs == rhs;
        r.verdict = if lhs == rhs {
            Verdict::Holds
        } else {
            Verdict::Falsified
        };
        r
    }

    /// A one-directional conclusion report.
    pub fn conclusion(claim: impl Into<String>, holds: bool) -> Self {
        let mut r = VerificationReport::new(claim);
        r.conclusion_holds = Some(holds);
        r.equivalent = holds;
        r.verdict = if holds {
            Verdict::Holds
        } else {
            Verdict::Falsified
        };
        r
    }

    pub fn hypothesis_not_met(claim: impl Into<String>, hypotheses: Vec<CheckReport>) -> Self {
        let mut r = VerificationReport::new(claim);
        r.verdict = Verdict::HypothesisNotMet;
        r.hypotheses = hypotheses;
        r
    }

    pub fn is_falsified(&self) -> bool {
        self.verdict == Verdict::Falsified
    }

    /// Recomputes the verdict from the parts: any falsified part falsifies
    /// the whole.
    pub fn absorb_parts(&mut self) {
        if self.parts.iter().any(|p| p.verdict == Verdict::Falsified) {
            self.verdict = Verdict::Falsified;
            self.equivalent = false;
        }
    }

    pub fn render_text(&self, out: &mut String) {
        self.render_indented(0, out)
    }

    fn render_indented(&self, indent: usize, out: &mut String) {
        use std::fmt::Write;
        let pad = "  ".repeat(indent);
        let verdict = match self.verdict {
            Verdict::Holds => "holds",
            Verdict::Falsified => "FALSIFIED",
            Verdict::HypothesisNotMet => "hypothesis-not-met",
        };
        let _ = write!(out, "{pad}{}: {verdict}", self.claim);
        if let (Some(l), Some(r)) = (self.lhs, self.rhs) {
            let _ = write!(out, " (lhs={l} rhs={r})");
        }
        if let Some(c) = self.conclusion_holds {
            let _ = write!(out, " (conclusion={c})");
        }
        if self.diagnostic {
            let _ = write!(out, " [diagnostic]");
        }
        let _ = writeln!(out);
        for h in self.hypotheses.iter().filter(|h| !h.passed) {
            let _ = writeln!(out, "{pad}  unmet hypothesis: {}", h.name);
            for w in h.first_witnesses() {
                let _ = writeln!(out, "{pad}    witness: {w}");
            }
        }
        for w in &self.witnesses {
            let _ = writeln!(out, "{pad}  witness: {w}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "{pad}  note: {n}");
        }
        for c in &self.checks {
            c.render_text(indent + 1, out);
        }
        for p in &self.parts {
            p.render_indented(indent + 1, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_report_keeps_minimal_witness_first() {
        let space = StateSpace::new(["a", "b"]).unwrap();
        let vs = vec![Violation::at(0), Violation::at(1)];
        let r = CheckReport::from_violations("x", "states", vs, &space, &[]);
        assert!(!r.passed);
        assert_eq!(r.witnesses[0].state.as_deref(), Some("a"));
    }

    #[test]
    fn json_shape_is_stable() {
        let space = StateSpace::new(["a", "b"]).unwrap();
        let v = Violation::on(Event::singleton(1), 0).with_p(Rational::ONE);
        let r = CheckReport::from_violations("entailment", "states", [v], &space, &[]);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "name": "entailment",
                "passed": false,
                "witnesses": [{"p": "1", "event": ["b"], "state": "a"}],
                "scope": "states"
            })
        );
        let back: CheckReport = serde_json::from_value(json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn verification_report_round_trips() {
        let mut r = VerificationReport::iff("theorem-main", true, true);
        r.checks.push(CheckReport::pass("regular", "Σ"));
        let text = serde_json::to_string(&r).unwrap();
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.verdict, Verdict::Holds);
    }
}

//! Interactive models: several agents sharing `(Ω, Σ, μ)`, the mutual and
//! common belief operators, and the agreement checkers.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::axioms;
use crate::beliefs::Prior;
use crate::error::{Error, Result};
use crate::events::{Event, SigmaAlgebra};
use crate::operators::EpistemicModel;
use crate::rational::Rational;
use crate::report::{CheckReport, VerificationReport, Violation, Witness};

/// Agreement vectors examined per `(p, E)` before giving up.
pub const DEFAULT_AGREEMENT_BUDGET: u64 = 1 << 20;

/// How an agent's types were declared; kept so documents round-trip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypeDecl {
    Bayes,
    Additive,
    Capacity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Agent {
    name: String,
    model: EpistemicModel,
    decl: TypeDecl,
}

impl Agent {
    pub fn new(name: impl Into<String>, model: EpistemicModel, decl: TypeDecl) -> Agent {
        Agent {
            name: name.into(),
            model,
            decl,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn model(&self) -> &EpistemicModel {
        &self.model
    }

    pub fn decl(&self) -> TypeDecl {
        self.decl
    }
}

/// `⟨(Ω, Σ, μ), (P_i, t_i)_{i ∈ I}⟩` with a finite, ordered agent list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractiveModel {
    agents: Vec<Agent>,
}

impl InteractiveModel {
    /// At least one agent; all agents share the algebra and the prior.
    pub fn new(agents: Vec<Agent>) -> Result<InteractiveModel> {
        let first = agents
            .first()
            .ok_or_else(|| Error::InvalidParameter("an interactive model needs at least one agent".into()))?;
        for a in &agents[1..] {
            if a.model.sigma() != first.model.sigma() || a.model.prior() != first.model.prior() {
                return Err(Error::Mismatch(format!(
                    "agent `{}` does not share the state space, algebra and prior",
                    a.name
                )));
            }
        }
        let mut names = BTreeSet::new();
        for a in &agents {
            if a.name.is_empty() {
                return Err(Error::InvalidParameter("agent names must be nonempty".into()));
            }
            if !names.insert(a.name.as_str()) {
                return Err(Error::InvalidParameter(format!("duplicate agent `{}`", a.name)));
            }
        }
        Ok(InteractiveModel { agents })
    }

    pub fn single(name: impl Into<String>, model: EpistemicModel, decl: TypeDecl) -> InteractiveModel {
        InteractiveModel {
            agents: vec![Agent::new(name, model, decl)],
        }
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn agent(&self, i: usize) -> &Agent {
        &self.agents[i]
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a.name == name)
    }

    pub fn agent_names(&self) -> Vec<String> {
        self.agents.iter().map(|a| a.name.clone()).collect()
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn sigma(&self) -> &Arc<SigmaAlgebra> {
        self.agents[0].model.sigma()
    }

    pub fn prior(&self) -> &Prior {
        self.agents[0].model.prior()
    }

    pub fn n_states(&self) -> usize {
        self.sigma().n_states()
    }

    pub fn full(&self) -> Event {
        self.sigma().full()
    }

    pub fn not(&self, e: Event) -> Event {
        e.complement_in(self.n_states())
    }

    pub fn is_discrete(&self) -> bool {
        self.prior().is_discrete()
    }

    /// Every agent's model is regular.
    pub fn is_regular(&self) -> bool {
        self.agents.iter().all(|a| axioms::regular_holds(&a.model))
    }

    pub fn events(&self) -> Vec<Event> {
        (0..self.sigma().n_events()).map(|m| self.sigma().event_of_mask(m)).collect()
    }

    /// `∩_i K_i(E)`.
    pub fn mutual_qualitative(&self, e: Event) -> Event {
        self.agents
            .iter()
            .fold(self.full(), |acc, a| acc.intersection(a.model.k(e)))
    }

    /// `∩_i B_i^p(E)`.
    pub fn mutual_p_belief(&self, p: Rational, e: Event) -> Event {
        let mask = self.sigma().mask_of(e);
        self.agents
            .iter()
            .fold(self.full(), |acc, a| acc.intersection(a.model.b_mask(p, mask)))
    }

    /// `Q⁺(ω)`: states reachable in one or more steps of `Q = ∪_i P_i`.
    pub fn reachability(&self) -> Vec<Event> {
        let n = self.n_states();
        let q: Vec<Event> = (0..n)
            .map(|s| {
                self.agents
                    .iter()
                    .fold(Event::EMPTY, |acc, a| acc.union(a.model.poss().cell(s)))
            })
            .collect();
        let mut reach = q.clone();
        loop {
            let mut changed = false;
            for s in 0..n {
                let next = reach[s].states().fold(reach[s], |acc, o| acc.union(q[o]));
                if next != reach[s] {
                    reach[s] = next;
                    changed = true;
                }
            }
            if !changed {
                return reach;
            }
        }
    }

    /// `C(E) = {ω : Q⁺(ω) ⊆ E}`.
    pub fn common_qualitative(&self, e: Event) -> Event {
        let reach = self.reachability();
        Event::from_states((0..self.n_states()).filter(|&s| reach[s].is_subset(e)))
    }

    /// `∩_{1 ≤ n ≤ |Ω|} (∩_i K_i)^n(E)`.
    pub fn common_qualitative_iterative(&self, e: Event) -> Event {
        let mut x = e;
        let mut acc = self.full();
        for _ in 0..self.n_states() {
            x = self.mutual_qualitative(x);
            acc = acc.intersection(x);
        }
        acc
    }

    /// `∩_{n ≥ 1} M_p^n(E)` with `M_p = ∩_i B_i^p`. Iterates until an event
    /// repeats, so no monotone descent is assumed.
    pub fn common_p_belief(&self, p: Rational, e: Event) -> Event {
        let mut seen: Vec<Event> = Vec::new();
        let mut x = e;
        loop {
            x = self.mutual_p_belief(p, x);
            if seen.contains(&x) {
                break;
            }
            seen.push(x);
        }
        seen.into_iter().fold(self.full(), Event::intersection)
    }

    /// `{0, 1}` and every value attained by any agent's types.
    pub fn critical_thresholds(&self) -> Vec<Rational> {
        let mut v: BTreeSet<Rational> = [Rational::ZERO, Rational::ONE].into_iter().collect();
        for a in &self.agents {
            v.extend(a.model.types().attained_values());
        }
        v.into_iter().collect()
    }

    fn report<I: IntoIterator<Item = Violation>>(&self, name: &str, scope: &str, vs: I) -> CheckReport {
        CheckReport::from_violations(name, scope, vs, self.sigma().space(), &self.agent_names())
    }
}

fn hypothesis(name: String, ok: bool, why: &str) -> CheckReport {
    let r = CheckReport::pass(name, "hypothesis");
    if ok {
        r
    } else {
        r.with_witness(Witness {
            note: Some(why.to_string()),
            ..Default::default()
        })
    }
}

fn regular_hypotheses(im: &InteractiveModel) -> Vec<CheckReport> {
    im.agents
        .iter()
        .flat_map(|a| {
            let mut r = axioms::is_regular(&a.model);
            r.name = format!("regular[{}]", a.name);
            let cells = hypothesis(
                format!("positive-cells[{}]", a.name),
                a.model.null_cell().is_none(),
                "some cell has prior mass zero",
            );
            [r, cells]
        })
        .collect()
}

fn finish(claim: &str, hyps: Vec<CheckReport>, checks: Vec<CheckReport>, diagnostic: bool) -> VerificationReport {
    let ok = checks.iter().all(|c| c.passed);
    let mut r = VerificationReport::conclusion(claim, ok);
    r.witnesses = checks
        .iter()
        .find(|c| !c.passed)
        .map(|c| c.first_witnesses().to_vec())
        .unwrap_or_default();
    if hyps.iter().any(|h| !h.passed) {
        r.diagnostic = diagnostic;
        r.notes.push("hypotheses unmet; conclusion evaluated diagnostically".into());
    }
    r.hypotheses = hyps;
    r.checks = checks;
    r
}

fn gated(hyps: &[CheckReport], diagnostic: bool) -> bool {
    diagnostic || hyps.iter().all(|h| h.passed)
}

/// Discrete regular interactive models: `C = C¹`, and `C` satisfies Truth,
/// Positive and Negative Introspection.
pub fn verify_cor_ck(im: &InteractiveModel, diagnostic: bool) -> VerificationReport {
    let mut hyps = vec![hypothesis(
        "discrete".into(),
        im.is_discrete(),
        "not a powerset algebra with positive singleton weights",
    )];
    hyps.extend(regular_hypotheses(im));
    if !gated(&hyps, diagnostic) {
        return VerificationReport::hypothesis_not_met("cor-ck", hyps);
    }
    let events = im.events();
    let c = |e| im.common_qualitative(e);
    let eq: Vec<Violation> = events
        .iter()
        .flat_map(|&e| {
            c(e).symmetric_difference(im.common_p_belief(Rational::ONE, e))
                .states()
                .map(move |s| Violation::on(e, s).note("C(E) ≠ C¹(E)"))
        })
        .collect();
    let checks = vec![
        im.report("c-equals-c1", "events", eq),
        im.report("c-truth", "events", axioms::operator_truth_violations(&events, c)),
        im.report("c-positive-introspection", "events", axioms::operator_pi_violations(&events, c)),
        im.report(
            "c-negative-introspection",
            "events",
            axioms::operator_ni_violations(&events, im.n_states(), c),
        ),
    ];
    finish("cor-ck", hyps, checks, diagnostic)
}

/// Agreement at `(p, E)`: for each attainable posterior vector `r`, with
/// `D = ∩_i {t_i(·,E) = r_i}`, nonempty `C^p(D)` forces
/// `|r_i − r_j| ≤ 1 − p` and nonempty `C(D)` forces `r_i = r_j`.
pub fn agreement_violations(im: &InteractiveModel, p: Rational, e: Event, budget: u64) -> Result<Vec<Violation>> {
    let mask = im.sigma().mask_of(e);
    let values: Vec<Vec<Rational>> = im
        .agents
        .iter()
        .map(|a| {
            (0..im.n_states())
                .map(|s| a.model.types().t_mask(s, mask))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        })
        .collect();
    let total = values
        .iter()
        .try_fold(1u64, |acc, v| acc.checked_mul(v.len() as u64))
        .filter(|&t| t <= budget)
        .ok_or_else(|| {
            Error::ResourceLimit(format!(
                "agreement at p={p} needs more than {budget} posterior vectors"
            ))
        })?;
    let slack = Rational::ONE - p;
    let mut out = Vec::new();
    for idx in 0..total {
        let mut rest = idx;
        let r: Vec<Rational> = values
            .iter()
            .map(|v| {
                let x = v[(rest % v.len() as u64) as usize];
                rest /= v.len() as u64;
                x
            })
            .collect();
        let d = Event::from_states((0..im.n_states()).filter(|&s| {
            im.agents
                .iter()
                .zip(&r)
                .all(|(a, ri)| a.model.types().t_mask(s, mask) == *ri)
        }));
        let cp = !im.common_p_belief(p, d).is_empty();
        let c = !im.common_qualitative(d).is_empty();
        for i in 0..r.len() {
            for j in 0..r.len() {
                let gap = (r[i] - r[j]).abs();
                if cp && gap > slack {
                    out.push(
                        Violation::event(e)
                            .with_p(p)
                            .with_agent(i)
                            .with_value(gap)
                            .note("C^p(D) ≠ ∅ but |r_i − r_j| > 1 − p"),
                    );
                }
                if c && !gap.is_zero() {
                    out.push(
                        Violation::event(e)
                            .with_p(p)
                            .with_agent(i)
                            .with_value(gap)
                            .note("C(D) ≠ ∅ but r_i ≠ r_j"),
                    );
                }
            }
        }
    }
    Ok(out)
}

pub fn verify_agreement(im: &InteractiveModel, p: Rational, e: Event, budget: u64) -> Result<CheckReport> {
    if !p.is_unit_interval() {
        return Err(Error::ValueOutOfRange {
            what: "belief threshold".into(),
            value: p,
        });
    }
    let e = im.sigma().event(e)?;
    Ok(im.report("agreement", "posterior vectors", agreement_violations(im, p, e, budget)?))
}

/// Agreement over every event and every critical threshold.
pub fn verify_prop3(im: &InteractiveModel, budget: u64, diagnostic: bool) -> Result<VerificationReport> {
    let hyps = regular_hypotheses(im);
    if !gated(&hyps, diagnostic) {
        return Ok(VerificationReport::hypothesis_not_met("prop-3", hyps));
    }
    let mut vs = Vec::new();
    for p in im.critical_thresholds() {
        for e in im.events() {
            vs.extend(agreement_violations(im, p, e, budget)?);
        }
    }
    let check = im.report("agreement", "thresholds x events x posterior vectors", vs);
    Ok(finish("prop-3", hyps, vec![check], diagnostic))
}

fn common_truth_as(im: &InteractiveModel, op: impl Fn(Event) -> Event) -> Vec<Violation> {
    let mut out = Vec::new();
    for e in im.events() {
        let gap = op(e).difference(e);
        let mass = im.prior().mu(gap);
        if !mass.is_zero() {
            out.push(Violation::event(e).with_value(mass).note("μ(O(E) ∖ E) > 0"));
        }
        for (i, a) in im.agents.iter().enumerate() {
            for s in 0..im.n_states() {
                let v = a.model.types().t(s, gap);
                if !v.is_zero() {
                    out.push(
                        Violation::on(e, s)
                            .with_agent(i)
                            .with_value(v)
                            .note("t_i(ω, O(E) ∖ E) > 0"),
                    );
                }
            }
        }
    }
    out
}

/// `C` and `C¹` satisfy the Truth Axiom μ-almost surely and
/// `t_i(ω,·)`-almost surely.
pub fn verify_cor_ta_common(im: &InteractiveModel, diagnostic: bool) -> VerificationReport {
    let hyps = regular_hypotheses(im);
    if !gated(&hyps, diagnostic) {
        return VerificationReport::hypothesis_not_met("cor-ta-common", hyps);
    }
    let checks = vec![
        im.report("c-truth-as", "events; agents x states", common_truth_as(im, |e| im.common_qualitative(e))),
        im.report(
            "c1-truth-as",
            "events; agents x states",
            common_truth_as(im, |e| im.common_p_belief(Rational::ONE, e)),
        ),
    ];
    finish("cor-ta-common", hyps, checks, diagnostic)
}

/// Verdict of [`verify_prop3`] without building reports beyond the first
/// violation.
pub fn prop3_falsified(im: &InteractiveModel, budget: u64) -> Result<bool> {
    if !regular_hypotheses(im).iter().all(|h| h.passed) {
        return Ok(false);
    }
    for p in im.critical_thresholds() {
        for e in im.events() {
            if !agreement_violations(im, p, e, budget)?.is_empty() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

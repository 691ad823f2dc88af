//! Possibility correspondences, single-agent epistemic models and the
//! operators `K` and `B^p`.
//!
//! # Deciding "for all p"
//!
//! Let `V = {0, 1} ∪ {t(ω,E)}`. For fixed `E`, `p ↦ B^p(E)` is a step
//! function: a state belongs iff its value is at least `p`, so `B^p(E)`
//! only changes when `p` crosses an attained value. For `p ∈ [0,1]` let
//! `v = min {u ∈ V : u ≥ p}`; no attained value lies in `[p, v)`, hence
//! `B^p(E) = B^v(E)`. Any statement built from `B^p` at a single `p` is
//! therefore decided for every `p ∈ [0,1]` by checking `p ∈ V`.

use std::sync::Arc;

use crate::beliefs::{OrderSets, Prior, TypeMapping};
use crate::error::{Error, Result};
use crate::events::{Event, SigmaAlgebra};
use crate::rational::Rational;
use crate::report::{CheckReport, Violation};

/// `P(ω)` for every state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PossibilityCorrespondence {
    cells: Vec<Event>,
}

impl PossibilityCorrespondence {
    /// Cells must be events of `sigma`.
    pub fn new(sigma: &SigmaAlgebra, cells: Vec<Event>) -> Result<Self> {
        if cells.len() != sigma.n_states() {
            return Err(Error::Mismatch(format!(
                "correspondence has {} cells for {} states",
                cells.len(),
                sigma.n_states()
            )));
        }
        for (s, c) in cells.iter().enumerate() {
            if !sigma.is_measurable(*c) {
                return Err(Error::AlgebraMismatch(format!(
                    "{} (cell of {})",
                    sigma.format_event(*c),
                    sigma.space().name(s)
                )));
            }
        }
        Ok(PossibilityCorrespondence { cells })
    }

    /// `P(ω) = Ω` everywhere.
    pub fn trivial(sigma: &SigmaAlgebra) -> Self {
        PossibilityCorrespondence {
            cells: vec![sigma.full(); sigma.n_states()],
        }
    }

    /// `P(ω)` = block of `ω` in the given partition.
    pub fn from_partition(sigma: &SigmaAlgebra, blocks: &[Event]) -> Result<Self> {
        let mut cells = vec![Event::EMPTY; sigma.n_states()];
        for b in blocks {
            for s in b.states() {
                if !cells[s].is_empty() {
                    return Err(Error::InvalidAtoms(format!(
                        "state {} lies in two blocks",
                        sigma.space().name(s)
                    )));
                }
                cells[s] = *b;
            }
        }
        PossibilityCorrespondence::new(sigma, cells)
    }

    pub fn cell(&self, state: usize) -> Event {
        self.cells[state]
    }

    pub fn cells(&self) -> &[Event] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `K(E) = {ω : P(ω) ⊆ E}`.
    pub fn k(&self, e: Event) -> Event {
        Event::from_states((0..self.cells.len()).filter(|&s| self.cells[s].is_subset(e)))
    }

    pub fn is_reflexive(&self) -> bool {
        self.reflexive_violation().is_none()
    }

    pub fn is_transitive(&self) -> bool {
        self.transitive_violation().is_none()
    }

    pub fn is_euclidean(&self) -> bool {
        self.euclidean_violation().is_none()
    }

    pub fn is_partition(&self) -> bool {
        self.is_reflexive() && self.is_transitive() && self.is_euclidean()
    }

    /// First `ω ∉ P(ω)`.
    pub fn reflexive_violation(&self) -> Option<usize> {
        (0..self.cells.len()).find(|&s| !self.cells[s].contains(s))
    }

    /// First `(ω, ω′)` with `ω′ ∈ P(ω)` and `P(ω′) ⊄ P(ω)`.
    pub fn transitive_violation(&self) -> Option<(usize, usize)> {
        self.pair_violation(|p, q| q.is_subset(p))
    }

    /// First `(ω, ω′)` with `ω′ ∈ P(ω)` and `P(ω) ⊄ P(ω′)`.
    pub fn euclidean_violation(&self) -> Option<(usize, usize)> {
        self.pair_violation(|p, q| p.is_subset(q))
    }

    fn pair_violation(&self, ok: impl Fn(Event, Event) -> bool) -> Option<(usize, usize)> {
        (0..self.cells.len()).find_map(|s| {
            self.cells[s]
                .states()
                .find(|&o| !ok(self.cells[s], self.cells[o]))
                .map(|o| (s, o))
        })
    }

    /// Non-measurable `K(E)` in event order.
    pub fn measurability_violations(&self, sigma: &SigmaAlgebra) -> Vec<Violation> {
        if sigma.is_powerset() {
            return Vec::new();
        }
        (0..sigma.n_events())
            .map(|m| sigma.event_of_mask(m))
            .filter(|&e| !sigma.is_measurable(self.k(e)))
            .map(|e| Violation::event(e).note("K(E) not measurable"))
            .collect()
    }
}

/// Checks `{ω : P(ω) ⊆ E} ∈ Σ` for every event.
pub fn poss_measurability_check(sigma: &SigmaAlgebra, poss: &PossibilityCorrespondence) -> CheckReport {
    CheckReport::from_violations(
        "poss-measurability",
        "events",
        poss.measurability_violations(sigma),
        sigma.space(),
        &[],
    )
}

/// Recovers the correspondence inducing an operator given as a table over
/// atom masks: `P(ω) = ∩ {E : ω ∈ K(E)}`.
pub fn poss_from_operator(sigma: &SigmaAlgebra, table: &[Event]) -> Result<PossibilityCorrespondence> {
    let m = sigma.n_events();
    if table.len() != m {
        return Err(Error::Mismatch(format!(
            "operator table has {} entries for {m} events",
            table.len()
        )));
    }
    let fmt = |mask: usize| sigma.format_event(sigma.event_of_mask(mask));
    for (mask, &ke) in table.iter().enumerate() {
        if !sigma.is_measurable(ke) {
            return Err(Error::NotInducible(format!("K({}) is not an event", fmt(mask))));
        }
    }
    if table[m - 1] != sigma.full() {
        return Err(Error::NotInducible("necessitation fails: K(Ω) ≠ Ω".into()));
    }
    for e in 0..m {
        for f in 0..m {
            if e & !f == 0 && !table[e].is_subset(table[f]) {
                return Err(Error::NotInducible(format!(
                    "monotonicity fails: {} ⊆ {} but K not",
                    fmt(e),
                    fmt(f)
                )));
            }
            if !table[e].intersection(table[f]).is_subset(table[e & f]) {
                return Err(Error::NotInducible(format!(
                    "conjunction fails on {} and {}",
                    fmt(e),
                    fmt(f)
                )));
            }
        }
    }
    let cells: Vec<Event> = (0..sigma.n_states())
        .map(|s| {
            (0..m)
                .filter(|&mask| table[mask].contains(s))
                .fold(sigma.full(), |acc, mask| acc.intersection(sigma.event_of_mask(mask)))
        })
        .collect();
    let poss = PossibilityCorrespondence::new(sigma, cells)?;
    for (mask, &ke) in table.iter().enumerate() {
        if poss.k(sigma.event_of_mask(mask)) != ke {
            return Err(Error::NotInducible(format!("round trip differs at {}", fmt(mask))));
        }
    }
    Ok(poss)
}

/// A single-agent model `⟨Ω, Σ, μ, P, t⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpistemicModel {
    sigma: Arc<SigmaAlgebra>,
    prior: Prior,
    poss: PossibilityCorrespondence,
    types: TypeMapping,
    allow_null_cells: bool,
}

impl EpistemicModel {
    /// Builds a model and enforces measurability and `μ(P(·)) > 0`.
    pub fn new(prior: Prior, poss: PossibilityCorrespondence, types: TypeMapping) -> Result<Self> {
        EpistemicModel::build(prior, poss, types, false)
    }

    /// Like [`EpistemicModel::new`] but admits cells of prior mass zero.
    pub fn with_null_cells(prior: Prior, poss: PossibilityCorrespondence, types: TypeMapping) -> Result<Self> {
        EpistemicModel::build(prior, poss, types, true)
    }

    pub fn build(
        prior: Prior,
        poss: PossibilityCorrespondence,
        types: TypeMapping,
        allow_null_cells: bool,
    ) -> Result<Self> {
        let sigma = prior.sigma().clone();
        if types.sigma().as_ref() != sigma.as_ref() {
            return Err(Error::Mismatch("types and prior use different sigma-algebras".into()));
        }
        if poss.len() != sigma.n_states() {
            return Err(Error::Mismatch("correspondence size differs from state count".into()));
        }
        let model = EpistemicModel {
            sigma,
            prior,
            poss,
            types,
            allow_null_cells,
        };
        model.validate()?;
        Ok(model)
    }

    /// Structural checks: measurability of `P` and `t`, and the base
    /// assumption unless relaxed.
    pub fn validate(&self) -> Result<()> {
        let r = poss_measurability_check(&self.sigma, &self.poss);
        if !r.passed {
            return Err(Error::Invariant(Box::new(r)));
        }
        let r = self.types.measurability_check();
        if !r.passed {
            return Err(Error::Invariant(Box::new(r)));
        }
        if !self.allow_null_cells {
            if let Some(s) = self.null_cell() {
                return Err(Error::AssumptionViolated(format!(
                    "μ(P({})) = 0",
                    self.sigma.space().name(s)
                )));
            }
        }
        Ok(())
    }

    /// First state whose cell has prior mass zero.
    pub fn null_cell(&self) -> Option<usize> {
        (0..self.n_states()).find(|&s| self.prior.mu(self.poss.cell(s)).is_zero())
    }

    pub fn sigma(&self) -> &Arc<SigmaAlgebra> {
        &self.sigma
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn poss(&self) -> &PossibilityCorrespondence {
        &self.poss
    }

    pub fn types(&self) -> &TypeMapping {
        &self.types
    }

    pub fn allows_null_cells(&self) -> bool {
        self.allow_null_cells
    }

    pub fn n_states(&self) -> usize {
        self.sigma.n_states()
    }

    pub fn full(&self) -> Event {
        self.sigma.full()
    }

    pub fn not(&self, e: Event) -> Event {
        e.complement_in(self.n_states())
    }

    /// Powerset algebra with every singleton of positive prior mass.
    pub fn is_discrete(&self) -> bool {
        self.prior.is_discrete()
    }

    pub fn events(&self) -> Result<Vec<Event>> {
        self.sigma.enumerate_events()
    }

    /// `K(E)`.
    pub fn k(&self, e: Event) -> Event {
        self.poss.k(e)
    }

    /// `B^p(E)` for an event given by atom mask.
    pub fn b_mask(&self, p: Rational, mask: usize) -> Event {
        Event::from_states((0..self.n_states()).filter(|&s| self.types.t_mask(s, mask) >= p))
    }

    /// `B^p(E)`.
    pub fn b(&self, p: Rational, e: Event) -> Event {
        self.b_mask(p, self.sigma.mask_of(e))
    }

    /// `V = {0, 1} ∪ {t(ω,E)}` in ascending order.
    pub fn critical_thresholds(&self) -> Vec<Rational> {
        let mut v = self.types.attained_values();
        v.insert(Rational::ZERO);
        v.insert(Rational::ONE);
        v.into_iter().collect()
    }

    pub fn order_sets(&self) -> OrderSets {
        self.types.order_sets()
    }

    /// Same model with another correspondence; structural checks rerun.
    pub fn with_poss(&self, poss: PossibilityCorrespondence) -> Result<Self> {
        EpistemicModel::build(self.prior.clone(), poss, self.types.clone(), self.allow_null_cells)
    }

    /// Same model with another type mapping; structural checks rerun.
    pub fn with_types(&self, types: TypeMapping) -> Result<Self> {
        EpistemicModel::build(self.prior.clone(), self.poss.clone(), types, self.allow_null_cells)
    }

    /// Toggles acceptance of null cells; structural checks rerun.
    pub fn relaxed(&self, allow_null_cells: bool) -> Result<Self> {
        EpistemicModel::build(self.prior.clone(), self.poss.clone(), self.types.clone(), allow_null_cells)
    }
}

/// `K(E)` after checking that `E` is an event.
pub fn qualitative_belief(model: &EpistemicModel, e: Event) -> Result<Event> {
    Ok(model.k(model.sigma.event(e)?))
}

/// `B^p(E)` after checking `E ∈ Σ` and `p ∈ [0,1]`.
pub fn p_belief(model: &EpistemicModel, p: Rational, e: Event) -> Result<Event> {
    if !p.is_unit_interval() {
        return Err(Error::ValueOutOfRange {
            what: "belief threshold".into(),
            value: p,
        });
    }
    Ok(model.b(p, model.sigma.event(e)?))
}

pub fn critical_thresholds(model: &EpistemicModel) -> Vec<Rational> {
    model.critical_thresholds()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn qualitative_belief_examples() {
        let w1 = fixtures::w1();
        assert_eq!(qualitative_belief(&w1, w1.full()).unwrap(), w1.full());
        let e23 = Event::from_states([1, 2]);
        assert_eq!(qualitative_belief(&w1, e23).unwrap(), e23);
        let w2 = fixtures::w2();
        assert_eq!(qualitative_belief(&w2, Event::singleton(0)).unwrap(), Event::singleton(0));
    }

    #[test]
    fn p_belief_examples() {
        let w1 = fixtures::w1();
        assert_eq!(p_belief(&w1, Rational::ZERO, Event::EMPTY).unwrap(), w1.full());
        assert_eq!(
            p_belief(&w1, r(1, 2), Event::singleton(1)).unwrap(),
            Event::from_states([1, 2])
        );
        let w4 = fixtures::w4();
        let b = Event::singleton(1);
        let b1b = p_belief(&w4, Rational::ONE, b).unwrap();
        assert_eq!(b1b, b);
        assert_eq!(p_belief(&w4, Rational::ONE, w4.not(b1b)).unwrap(), Event::EMPTY);
        assert!(p_belief(&w4, r(3, 2), b).is_err());
    }

    #[test]
    fn critical_threshold_examples() {
        assert_eq!(
            critical_thresholds(&fixtures::w2()),
            vec![Rational::ZERO, Rational::ONE]
        );
        assert_eq!(
            critical_thresholds(&fixtures::w1()),
            vec![Rational::ZERO, r(1, 2), Rational::ONE]
        );
        let one = fixtures::single_state();
        assert_eq!(critical_thresholds(&one), vec![Rational::ZERO, Rational::ONE]);
    }

    #[test]
    fn poss_from_operator_examples() {
        let w1 = fixtures::w1();
        let sigma = w1.sigma();
        let identity: Vec<Event> = (0..sigma.n_events()).map(|m| sigma.event_of_mask(m)).collect();
        let p = poss_from_operator(sigma, &identity).unwrap();
        for s in 0..3 {
            assert_eq!(p.cell(s), Event::singleton(s));
        }

        let w2 = fixtures::w2();
        let k_table: Vec<Event> = (0..4).map(|m| w2.k(Event::from_bits(m))).collect();
        let p = poss_from_operator(w2.sigma(), &k_table).unwrap();
        assert_eq!(p, *w2.poss());

        let mut ignorant = vec![Event::EMPTY; 8];
        ignorant[7] = Event::full(3);
        let p = poss_from_operator(sigma, &ignorant).unwrap();
        assert!(p.cells().iter().all(|&c| c == Event::full(3)));

        let mut broken = identity.clone();
        broken[7] = Event::EMPTY;
        assert!(matches!(poss_from_operator(sigma, &broken), Err(Error::NotInducible(_))));
    }

    #[test]
    fn poss_measurability_examples() {
        let w1 = fixtures::w1();
        assert!(poss_measurability_check(w1.sigma(), w1.poss()).passed);

        let space = crate::events::StateSpace::new(["1", "2"]).unwrap();
        let coarse = SigmaAlgebra::from_atoms(space, vec![Event::full(2)]).unwrap();
        // Only ∅ and Ω are events; P(1) = ∅ and P(2) = Ω disagree on K(∅).
        let poss = PossibilityCorrespondence::new(&coarse, vec![Event::EMPTY, Event::full(2)]).unwrap();
        let report = poss_measurability_check(&coarse, &poss);
        assert!(!report.passed);
        assert_eq!(report.witnesses[0].event.as_deref(), Some(&[][..]));
    }

    proptest! {
        #[test]
        fn k_is_a_normal_operator(m in crate::modelgen::strategies::small_model()) {
            let events = m.events().unwrap();
            prop_assert_eq!(m.k(m.full()), m.full());
            for &e in &events {
                prop_assert!(m.sigma().is_measurable(m.k(e)));
                for &f in &events {
                    if e.is_subset(f) {
                        prop_assert!(m.k(e).is_subset(m.k(f)));
                    }
                    prop_assert_eq!(m.k(e).intersection(m.k(f)), m.k(e.intersection(f)));
                }
            }
            for s in 0..m.n_states() {
                prop_assert!(m.k(m.poss().cell(s)).contains(s));
            }
        }

        #[test]
        fn p_belief_changes_only_at_thresholds(m in crate::modelgen::strategies::small_model()) {
            let v = m.critical_thresholds();
            let n = m.sigma().n_events();
            let monotone = m.types().all_monotone();
            for mask in 0..n {
                // Probe every midpoint and the attained values themselves.
                for w in v.windows(2) {
                    let mid = (w[0] + w[1]) * r(1, 2);
                    prop_assert_eq!(m.b_mask(mid, mask), m.b_mask(w[1], mask));
                }
                if monotone {
                    for w in v.windows(2) {
                        prop_assert!(m.b_mask(w[1], mask).is_subset(m.b_mask(w[0], mask)));
                    }
                }
            }
        }
    }
}

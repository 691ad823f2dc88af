//! Single-agent axiom checkers and the regularity predicate.
//!
//! Every checker enumerates its full quantifier domain (events, states and,
//! for `p`-statements, the critical thresholds) and yields violations in
//! lexicographic `(p, E, ω)` order, so the first witness is minimal. The
//! `*_holds` predicates stop at the first violation.

use crate::events::Event;
use crate::operators::EpistemicModel;
use crate::rational::Rational;
use crate::report::{CheckReport, Violation};

fn report<I: IntoIterator<Item = Violation>>(
    model: &EpistemicModel,
    name: &str,
    scope: &str,
    vs: I,
) -> CheckReport {
    CheckReport::from_violations(name, scope, vs, model.sigma().space(), &[])
}

/// `μ(E) ≠ ∫ t(·,E) dμ`, one violation per event.
pub fn invariance_violations(m: &EpistemicModel) -> impl Iterator<Item = Violation> + '_ {
    let sigma = m.sigma();
    let weights = m.prior().weights();
    (0..sigma.n_events()).filter_map(move |mask| {
        let lhs = m.prior().measure_mask(mask);
        let rhs: Rational = sigma
            .atoms()
            .iter()
            .zip(weights)
            .map(|(atom, w)| *w * m.types().t_mask(atom.first().expect("nonempty atom"), mask))
            .sum();
        (lhs != rhs).then(|| {
            Violation::event(sigma.event_of_mask(mask))
                .with_value(rhs)
                .note("prior differs from expected posterior")
        })
    })
}

/// States with `t(ω, P(ω)) ≠ 1`.
pub fn entailment_violations(m: &EpistemicModel) -> impl Iterator<Item = Violation> + '_ {
    (0..m.n_states()).filter_map(move |s| {
        let v = m.types().t(s, m.poss().cell(s));
        (!v.is_one()).then(|| Violation::at(s).with_value(v).note("t(ω, P(ω)) ≠ 1"))
    })
}

fn containment_violations(m: &EpistemicModel, up: bool) -> impl Iterator<Item = Violation> + '_ {
    let t = m.types();
    (0..m.n_states()).flat_map(move |s| {
        m.poss().cell(s).states().filter_map(move |o| {
            let ok = if up {
                t.state_fn(s).dominated_by(t.state_fn(o))
            } else {
                t.state_fn(o).dominated_by(t.state_fn(s))
            };
            (!ok).then(|| Violation::at(s).with_other(o))
        })
    })
}

/// `(ω, ω′)` with `ω′ ∈ P(ω)` but `t(ω,·) ≰ t(ω′,·)`.
pub fn self_evidence_violations(m: &EpistemicModel) -> impl Iterator<Item = Violation> + '_ {
    containment_violations(m, true).map(|v| v.note("P(ω) ⊄ ↑t(ω)"))
}

/// `(ω, ω′)` with `ω′ ∈ P(ω)` but `t(ω′,·) ≰ t(ω,·)`.
pub fn down_containment_violations(m: &EpistemicModel) -> impl Iterator<Item = Violation> + '_ {
    containment_violations(m, false).map(|v| v.note("P(ω) ⊄ ↓t(ω)"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertaintyKind {
    /// `t(ω, [t(ω)]) = 1`.
    Bracket,
    /// `t(ω, ↑t(ω)) = 1`.
    Up,
    /// `t(ω, ↓t(ω)) = 1`.
    Down,
}

/// States where the chosen certainty condition fails, with the attained
/// value.
pub fn certainty_violations(m: &EpistemicModel, kind: CertaintyKind) -> Vec<Violation> {
    let sets = m.order_sets();
    (0..m.n_states())
        .filter_map(|s| {
            let target = match kind {
                CertaintyKind::Bracket => sets.bracket(s),
                CertaintyKind::Up => sets.up[s],
                CertaintyKind::Down => sets.down[s],
            };
            let v = m.types().t(s, target);
            (!v.is_one()).then(|| Violation::at(s).with_value(v))
        })
        .collect()
}

/// The almost-sure form: the states failing `t(ω, [t(ω)]) = 1` form a
/// μ-null set. Violations are the failing states of positive mass.
pub fn certainty_as_violations(m: &EpistemicModel) -> Vec<Violation> {
    let failing = certainty_violations(m, CertaintyKind::Bracket);
    let sigma = m.sigma();
    failing
        .into_iter()
        .filter(|v| {
            let s = v.state.expect("certainty violations carry a state");
            m.prior().weights()[sigma.atom_index_of(s)].is_positive()
        })
        .map(|v| v.note("failure on a state of positive mass"))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Introspection {
    /// `B^p(E) ⊆ B¹B^p(E)`.
    PositiveB1,
    /// `¬B^p(E) ⊆ B¹¬B^p(E)`.
    NegativeB1,
    /// `B^p(E) ⊆ K B^p(E)`.
    PositiveK,
    /// `¬B^p(E) ⊆ K ¬B^p(E)`.
    NegativeK,
}

impl Introspection {
    pub const ALL: [Introspection; 4] = [
        Introspection::PositiveB1,
        Introspection::NegativeB1,
        Introspection::PositiveK,
        Introspection::NegativeK,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Introspection::PositiveB1 => "bp-in-b1bp",
            Introspection::NegativeB1 => "not-bp-in-b1-not-bp",
            Introspection::PositiveK => "bp-in-kbp",
            Introspection::NegativeK => "not-bp-in-k-not-bp",
        }
    }
}

/// Violations `(p, E, ω)` of one `p`-introspection inclusion, over every
/// critical threshold and event.
pub fn introspection_violations(m: &EpistemicModel, kind: Introspection) -> impl Iterator<Item = Violation> + '_ {
    let thresholds = m.critical_thresholds();
    let sigma = m.sigma().clone();
    let n_events = sigma.n_events();
    thresholds.into_iter().flat_map(move |p| {
        let sigma = sigma.clone();
        (0..n_events).flat_map(move |mask| {
            let bp = m.b_mask(p, mask);
            let x = match kind {
                Introspection::PositiveB1 | Introspection::PositiveK => bp,
                Introspection::NegativeB1 | Introspection::NegativeK => m.not(bp),
            };
            let outer = match kind {
                Introspection::PositiveB1 | Introspection::NegativeB1 => m.b(Rational::ONE, x),
                Introspection::PositiveK | Introspection::NegativeK => m.k(x),
            };
            let e = sigma.event_of_mask(mask);
            x.difference(outer)
                .states()
                .map(move |s| Violation::on(e, s).with_p(p))
                .collect::<Vec<_>>()
        })
    })
}

pub fn introspection_holds(m: &EpistemicModel, kind: Introspection) -> bool {
    introspection_violations(m, kind).next().is_none()
}

/// States whose type is not an additive probability measure.
pub fn probability_violations(m: &EpistemicModel) -> impl Iterator<Item = Violation> + '_ {
    (0..m.n_states()).filter_map(move |s| {
        let f = m.types().state_fn(s);
        (!f.is_probability()).then(|| {
            Violation::at(s)
                .with_value(f.at(f.full_mask()))
                .note("type is not an additive probability measure")
        })
    })
}

pub fn invariance_holds(m: &EpistemicModel) -> bool {
    invariance_violations(m).next().is_none()
}

pub fn entailment_holds(m: &EpistemicModel) -> bool {
    entailment_violations(m).next().is_none()
}

pub fn self_evidence_holds(m: &EpistemicModel) -> bool {
    self_evidence_violations(m).next().is_none()
}

pub fn down_containment_holds(m: &EpistemicModel) -> bool {
    down_containment_violations(m).next().is_none()
}

pub fn probability_types_hold(m: &EpistemicModel) -> bool {
    probability_violations(m).next().is_none()
}

/// Additive probability types, Invariance, Entailment and Self-Evidence.
pub fn regular_holds(m: &EpistemicModel) -> bool {
    probability_types_hold(m) && invariance_holds(m) && entailment_holds(m) && self_evidence_holds(m)
}

pub fn check_invariance(m: &EpistemicModel) -> CheckReport {
    report(m, "invariance", "events", invariance_violations(m))
}

pub fn check_entailment(m: &EpistemicModel) -> CheckReport {
    report(m, "entailment", "states", entailment_violations(m))
}

pub fn check_self_evidence(m: &EpistemicModel) -> CheckReport {
    report(m, "self-evidence", "state pairs", self_evidence_violations(m))
}

pub fn check_down_containment(m: &EpistemicModel) -> CheckReport {
    report(m, "down-containment", "state pairs", down_containment_violations(m))
}

pub fn check_certainty(m: &EpistemicModel) -> CheckReport {
    report(m, "certainty", "states", certainty_violations(m, CertaintyKind::Bracket))
}

pub fn check_certainty_as(m: &EpistemicModel) -> CheckReport {
    report(m, "certainty-as", "states (up to a null set)", certainty_as_violations(m))
}

pub fn check_positive_certainty(m: &EpistemicModel) -> CheckReport {
    report(m, "positive-certainty", "states", certainty_violations(m, CertaintyKind::Up))
}

pub fn check_down_certainty(m: &EpistemicModel) -> CheckReport {
    report(m, "down-certainty", "states", certainty_violations(m, CertaintyKind::Down))
}

pub fn check_probability_types(m: &EpistemicModel) -> CheckReport {
    report(m, "probability-types", "states", probability_violations(m))
}

/// The four `p`-introspection inclusions as sub-reports.
pub fn check_p_introspection(m: &EpistemicModel) -> CheckReport {
    let subs = Introspection::ALL
        .iter()
        .map(|&k| report(m, k.name(), "thresholds x events x states", introspection_violations(m, k)))
        .collect();
    CheckReport::all("p-introspection", "thresholds x events x states", subs)
}

pub fn check_introspection(m: &EpistemicModel, kind: Introspection) -> CheckReport {
    report(m, kind.name(), "thresholds x events x states", introspection_violations(m, kind))
}

pub fn is_regular(m: &EpistemicModel) -> CheckReport {
    CheckReport::all(
        "regular",
        "types; events; states",
        vec![
            check_probability_types(m),
            check_invariance(m),
            check_entailment(m),
            check_self_evidence(m),
        ],
    )
}

/// Relational properties of `P` next to the operator-level properties of
/// `K`, with their agreement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeProperties {
    pub reflexive: bool,
    pub transitive: bool,
    pub euclidean: bool,
    pub partition: bool,
    pub truth: bool,
    pub positive_introspection: bool,
    pub negative_introspection: bool,
}

impl KripkeProperties {
    /// True iff the relational and operator-level verdicts agree.
    pub fn consistent(&self) -> bool {
        self.reflexive == self.truth
            && self.transitive == self.positive_introspection
            && self.euclidean == self.negative_introspection
    }
}

/// Operator-level Truth, PI and NI for an operator over all events.
pub fn operator_truth_violations(events: &[Event], op: impl Fn(Event) -> Event) -> Vec<Violation> {
    events
        .iter()
        .flat_map(|&e| op(e).difference(e).states().map(move |s| Violation::on(e, s)))
        .collect()
}

pub fn operator_pi_violations(events: &[Event], op: impl Fn(Event) -> Event) -> Vec<Violation> {
    events
        .iter()
        .flat_map(|&e| {
            let ke = op(e);
            ke.difference(op(ke)).states().map(move |s| Violation::on(e, s))
        })
        .collect()
}

pub fn operator_ni_violations(events: &[Event], n: usize, op: impl Fn(Event) -> Event) -> Vec<Violation> {
    events
        .iter()
        .flat_map(|&e| {
            let nk = op(e).complement_in(n);
            nk.difference(op(nk)).states().map(move |s| Violation::on(e, s))
        })
        .collect()
}

pub fn kripke_properties(m: &EpistemicModel) -> (KripkeProperties, CheckReport) {
    let events: Vec<Event> = (0..m.sigma().n_events()).map(|x| m.sigma().event_of_mask(x)).collect();
    let poss = m.poss();
    let n = m.n_states();
    let k = |e| m.k(e);

    let refl = poss.reflexive_violation().map(|s| Violation::at(s).note("ω ∉ P(ω)"));
    let trans = poss
        .transitive_violation()
        .map(|(s, o)| Violation::at(s).with_other(o).note("not transitive"));
    let eucl = poss
        .euclidean_violation()
        .map(|(s, o)| Violation::at(s).with_other(o).note("not euclidean"));
    let truth = operator_truth_violations(&events, k);
    let pi = operator_pi_violations(&events, k);
    let ni = operator_ni_violations(&events, n, k);

    let props = KripkeProperties {
        reflexive: refl.is_none(),
        transitive: trans.is_none(),
        euclidean: eucl.is_none(),
        partition: refl.is_none() && trans.is_none() && eucl.is_none(),
        truth: truth.is_empty(),
        positive_introspection: pi.is_empty(),
        negative_introspection: ni.is_empty(),
    };
    let mut equivalence = CheckReport::pass("kripke-equivalence", "relational vs operator");
    if !props.consistent() {
        equivalence = equivalence.with_witness(crate::report::Witness {
            note: Some("relational and operator-level verdicts disagree".into()),
            ..Default::default()
        });
    }
    let subs = vec![
        report(m, "reflexive", "states", refl),
        report(m, "transitive", "state pairs", trans),
        report(m, "euclidean", "state pairs", eucl),
        report(m, "truth", "events", truth),
        report(m, "positive-introspection", "events", pi),
        report(m, "negative-introspection", "events", ni),
        equivalence,
    ];
    (props, CheckReport::all("kripke", "states; events", subs))
}

/// Names accepted by [`run_check`], in display order.
pub const CHECK_NAMES: &[&str] = &[
    "type-measurability",
    "poss-measurability",
    "probability-types",
    "invariance",
    "entailment",
    "self-evidence",
    "down-containment",
    "certainty",
    "certainty-as",
    "positive-certainty",
    "down-certainty",
    "p-introspection",
    "regular",
    "kripke",
];

/// Runs a checker by name; `None` for unknown names.
pub fn run_check(name: &str, m: &EpistemicModel) -> Option<CheckReport> {
    Some(match name {
        "type-measurability" => m.types().measurability_check(),
        "poss-measurability" => crate::operators::poss_measurability_check(m.sigma(), m.poss()),
        "probability-types" => check_probability_types(m),
        "invariance" => check_invariance(m),
        "entailment" => check_entailment(m),
        "self-evidence" => check_self_evidence(m),
        "down-containment" => check_down_containment(m),
        "certainty" => check_certainty(m),
        "certainty-as" => check_certainty_as(m),
        "positive-certainty" => check_positive_certainty(m),
        "down-certainty" => check_down_certainty(m),
        "p-introspection" => check_p_introspection(m),
        "regular" => is_regular(m),
        "kripke" => kripke_properties(m).1,
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::modelgen::strategies;
    use proptest::prelude::*;

    #[test]
    fn invariance_examples() {
        assert!(check_invariance(&fixtures::w1()).passed);
        assert!(check_invariance(&fixtures::w2()).passed);
        let r = check_invariance(&fixtures::w1_perturbed());
        assert!(!r.passed);
        // μ({1}) = 1/2 but every posterior gives {1} probability zero.
        assert_eq!(r.witnesses[0].event.as_deref(), Some(&["1".to_string()][..]));
        assert_eq!(r.witnesses[0].value, Some(Rational::ZERO));
    }

    #[test]
    fn entailment_examples() {
        assert!(check_entailment(&fixtures::w1()).passed);
        assert!(check_entailment(&fixtures::w2()).passed);
        let r = check_entailment(&fixtures::w2_narrow_b());
        assert!(!r.passed);
        assert_eq!(r.witnesses[0].state.as_deref(), Some("b"));
        assert_eq!(r.witnesses[0].value, Some(Rational::ZERO));
    }

    #[test]
    fn self_evidence_examples() {
        let w2 = fixtures::w2();
        assert!(check_self_evidence(&w2).passed);
        assert!(check_down_containment(&w2).passed);
        let r = check_self_evidence(&fixtures::w4_ignorant());
        assert!(!r.passed);
        assert!(r
            .witnesses
            .iter()
            .any(|w| w.state.as_deref() == Some("b") && w.other_state.as_deref() == Some("a")));
    }

    #[test]
    fn certainty_examples() {
        let w4 = fixtures::w4();
        assert!(check_positive_certainty(&w4).passed);
        let c = check_certainty(&w4);
        assert!(!c.passed);
        assert_eq!(c.witnesses[0].state.as_deref(), Some("a"));
        assert_eq!(c.witnesses[0].value, Some(Rational::ZERO));
        let d = check_down_certainty(&w4);
        assert!(!d.passed);
        assert_eq!(d.witnesses[0].state.as_deref(), Some("a"));

        let w1 = fixtures::w1();
        assert!(check_certainty(&w1).passed);
        assert!(check_positive_certainty(&w1).passed);
        assert!(check_down_certainty(&w1).passed);
        assert!(check_certainty_as(&w1).passed);
    }

    #[test]
    fn introspection_examples() {
        assert!(check_p_introspection(&fixtures::w1()).passed);
        let w4 = fixtures::w4();
        assert!(introspection_holds(&w4, Introspection::PositiveB1));
        let r = check_introspection(&w4, Introspection::NegativeB1);
        assert!(!r.passed);
        let w = &r.witnesses[0];
        assert_eq!(w.p, Some(Rational::ONE));
        assert_eq!(w.event.as_deref(), Some(&["b".to_string()][..]));
        assert_eq!(w.state.as_deref(), Some("a"));
        assert!(check_p_introspection(&fixtures::constant_type_ignorant()).passed);
    }

    #[test]
    fn regular_examples() {
        assert!(is_regular(&fixtures::w1()).passed);
        assert!(is_regular(&fixtures::w2()).passed);
        let r = is_regular(&fixtures::w4());
        assert!(!r.passed);
        assert!(!r.find("probability-types").unwrap().passed);
    }

    #[test]
    fn kripke_examples() {
        let (p, r) = kripke_properties(&fixtures::w1());
        assert!(p.partition && r.passed);

        let (p, r) = kripke_properties(&fixtures::w2());
        assert!(p.reflexive && p.transitive && !p.euclidean && !p.partition);
        assert!(!p.negative_introspection && p.consistent());
        let e = r.find("euclidean").unwrap();
        assert_eq!(e.witnesses[0].state.as_deref(), Some("b"));
        assert_eq!(e.witnesses[0].other_state.as_deref(), Some("a"));
        let ni = r.find("negative-introspection").unwrap();
        assert_eq!(ni.witnesses[0].event.as_deref(), Some(&["a".to_string()][..]));
        assert_eq!(ni.witnesses[0].state.as_deref(), Some("b"));

        let (p, _) = kripke_properties(&fixtures::constant_type_ignorant());
        assert!(p.partition);
    }

    proptest! {
        #[test]
        fn kripke_equivalences_agree(m in strategies::small_model()) {
            let (p, r) = kripke_properties(&m);
            prop_assert!(p.consistent());
            prop_assert!(r.find("kripke-equivalence").unwrap().passed);
            prop_assert_eq!(r.passed, p.partition);
        }

        #[test]
        fn additive_types_make_certainties_agree(m in strategies::small_additive_model()) {
            let a = check_certainty(&m).passed;
            prop_assert_eq!(check_positive_certainty(&m).passed, a);
            prop_assert_eq!(check_down_certainty(&m).passed, a);
        }

        #[test]
        fn entailment_and_self_evidence_give_positive_certainty(m in strategies::small_model()) {
            if m.types().all_monotone() && entailment_holds(&m) && self_evidence_holds(&m) {
                prop_assert!(check_positive_certainty(&m).passed);
            }
        }

        #[test]
        fn regular_models_share_null_events(m in strategies::small_regular_model()) {
            prop_assert!(regular_holds(&m));
            for mask in 0..m.sigma().n_events() {
                let null = m.prior().measure_mask(mask).is_zero();
                let all_zero = (0..m.n_states()).all(|s| m.types().t_mask(s, mask).is_zero());
                prop_assert_eq!(null, all_zero);
            }
        }

        #[test]
        fn failing_reports_carry_genuine_witnesses(m in strategies::small_model()) {
            let r = check_self_evidence(&m);
            prop_assert_eq!(r.passed, r.witnesses.is_empty());
            for v in self_evidence_violations(&m) {
                let (s, o) = (v.state.unwrap(), v.other_state.unwrap());
                prop_assert!(m.poss().cell(s).contains(o));
                prop_assert!(!m.types().state_fn(s).dominated_by(m.types().state_fn(o)));
            }
            for v in introspection_violations(&m, Introspection::PositiveK) {
                let (p, e, s) = (v.p.unwrap(), v.event.unwrap(), v.state.unwrap());
                let bp = m.b(p, e);
                prop_assert!(bp.contains(s) && !m.k(bp).contains(s));
            }
        }
    }
}

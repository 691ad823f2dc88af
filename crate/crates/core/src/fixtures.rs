//! Small worked models shared by the tests and the shipped `.emod` files.

use std::sync::Arc;

use crate::beliefs::{Prior, SetFunction, TypeMapping};
use crate::events::{Event, SigmaAlgebra, StateSpace};
use crate::multiagent::{Agent, InteractiveModel, TypeDecl};
use crate::operators::{EpistemicModel, PossibilityCorrespondence};
use crate::rational::Rational;
use crate::theorems::bayes_type_from_poss;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn powerset(names: &[&str]) -> Arc<SigmaAlgebra> {
    Arc::new(SigmaAlgebra::powerset(StateSpace::new(names.iter().copied()).expect("valid names")))
}

fn prior(sigma: &Arc<SigmaAlgebra>, w: &[Rational]) -> Prior {
    Prior::new(sigma.clone(), w.to_vec()).expect("normalized prior")
}

fn poss(sigma: &SigmaAlgebra, cells: &[&[usize]]) -> PossibilityCorrespondence {
    let cells = cells.iter().map(|c| Event::from_states(c.iter().copied())).collect();
    PossibilityCorrespondence::new(sigma, cells).expect("cells are events")
}

fn dirac_types(sigma: &Arc<SigmaAlgebra>, targets: &[usize]) -> TypeMapping {
    let k = sigma.n_atoms();
    let fns = targets.iter().map(|&t| SetFunction::dirac(k, t)).collect();
    TypeMapping::new(sigma.clone(), fns).expect("well-formed types")
}

fn bayes(p: Prior, c: PossibilityCorrespondence) -> EpistemicModel {
    let t = bayes_type_from_poss(&p, &c).expect("positive cells");
    EpistemicModel::new(p, c, t).expect("valid model")
}

/// W1: `Ω = {1,2,3}`, `μ = (1/2, 1/4, 1/4)`, partition `{1} | {2,3}`, Bayes
/// types.
pub fn w1() -> EpistemicModel {
    let s = powerset(&["1", "2", "3"]);
    let p = prior(&s, &[r(1, 2), r(1, 4), r(1, 4)]);
    let c = poss(&s, &[&[0], &[1, 2], &[1, 2]]);
    bayes(p, c)
}

/// W1 with `t(1,·) = δ₂`.
pub fn w1_perturbed() -> EpistemicModel {
    let m = w1();
    let mut fns = m.types().fns().to_vec();
    fns[0] = SetFunction::dirac(3, 1);
    m.with_types(TypeMapping::new(m.sigma().clone(), fns).unwrap()).unwrap()
}

/// W1 with `P(1) = Ω`.
pub fn w1_ignorant_at_1() -> EpistemicModel {
    let m = w1();
    let c = poss(m.sigma(), &[&[0, 1, 2], &[1, 2], &[1, 2]]);
    m.with_poss(c).unwrap()
}

/// W2: `Ω = {a,b}`, `μ = (1, 0)`, `P(a) = {a}`, `P(b) = {a,b}`,
/// `t = δ_a` everywhere.
pub fn w2() -> EpistemicModel {
    let s = powerset(&["a", "b"]);
    let p = prior(&s, &[Rational::ONE, Rational::ZERO]);
    let c = poss(&s, &[&[0], &[0, 1]]);
    EpistemicModel::new(p, c, dirac_types(&s, &[0, 0])).unwrap()
}

/// W2 with `P(b) = {b}`, a null cell.
pub fn w2_narrow_b() -> EpistemicModel {
    let m = w2();
    let c = poss(m.sigma(), &[&[0], &[1]]);
    m.relaxed(true).unwrap().with_poss(c).unwrap()
}

/// A regular model with the null cell `P(b) = {b}`.
pub fn null_cell_model() -> EpistemicModel {
    let s = powerset(&["a", "b"]);
    let p = prior(&s, &[Rational::ONE, Rational::ZERO]);
    let c = poss(&s, &[&[0], &[1]]);
    EpistemicModel::with_null_cells(p, c, dirac_types(&s, &[0, 1])).unwrap()
}

/// The capacity of W4 at `a`: zero except `v(Ω) = 1`.
pub fn w4_capacity() -> SetFunction {
    SetFunction::from_table(vec![Rational::ZERO, Rational::ZERO, Rational::ZERO, Rational::ONE]).unwrap()
}

/// W4: `Ω = {a,b}`, `μ = (1/2, 1/2)`, `P = {a} | {b}`, `t(a) = v`,
/// `t(b) = δ_b`.
pub fn w4() -> EpistemicModel {
    let s = powerset(&["a", "b"]);
    let p = prior(&s, &[r(1, 2), r(1, 2)]);
    let c = poss(&s, &[&[0], &[1]]);
    let t = TypeMapping::new(s.clone(), vec![w4_capacity(), SetFunction::dirac(2, 1)]).unwrap();
    EpistemicModel::new(p, c, t).unwrap()
}

/// W4 with `P = Ω` everywhere.
pub fn w4_ignorant() -> EpistemicModel {
    let m = w4();
    m.with_poss(PossibilityCorrespondence::trivial(m.sigma())).unwrap()
}

/// W1's space and prior with `t = μ` and `P = Ω`.
pub fn constant_type_ignorant() -> EpistemicModel {
    let m = w1();
    let t = TypeMapping::constant(m.sigma().clone(), m.prior().as_set_function()).unwrap();
    EpistemicModel::new(m.prior().clone(), PossibilityCorrespondence::trivial(m.sigma()), t).unwrap()
}

/// W1's space and prior, `P = Ω`, and `t(ω) = δ` of the next state.
pub fn shifted_dirac() -> EpistemicModel {
    let m = w1();
    let t = dirac_types(m.sigma(), &[1, 2, 0]);
    EpistemicModel::new(m.prior().clone(), PossibilityCorrespondence::trivial(m.sigma()), t).unwrap()
}

/// Two states with a non-monotone type `v({a}) = 1`, `v(Ω) = 0`.
pub fn non_monotone() -> EpistemicModel {
    let s = powerset(&["a", "b"]);
    let p = prior(&s, &[r(1, 2), r(1, 2)]);
    let v = SetFunction::from_table(vec![Rational::ZERO, Rational::ONE, Rational::ZERO, Rational::ZERO]).unwrap();
    let t = TypeMapping::constant(s.clone(), v).unwrap();
    EpistemicModel::new(p, PossibilityCorrespondence::trivial(&s), t).unwrap()
}

pub fn single_state() -> EpistemicModel {
    let s = powerset(&["s"]);
    let p = prior(&s, &[Rational::ONE]);
    let c = poss(&s, &[&[0]]);
    bayes(p, c)
}

/// IW1: W1's space and prior; Alice has `{1} | {2,3}`, Bob has
/// `{1,2} | {3}`, both Bayes.
pub fn iw1() -> InteractiveModel {
    let alice = w1();
    let bob_poss = poss(alice.sigma(), &[&[0, 1], &[0, 1], &[2]]);
    let bob = bayes(alice.prior().clone(), bob_poss);
    InteractiveModel::new(vec![
        Agent::new("alice", alice, TypeDecl::Bayes),
        Agent::new("bob", bob, TypeDecl::Bayes),
    ])
    .unwrap()
}

/// IW1 with Bob's posteriors replaced by the prior, so Bob is not Bayes.
pub fn iw1_bob_perturbed() -> InteractiveModel {
    let im = iw1();
    let bob = im.agent(1).model();
    let t = TypeMapping::constant(bob.sigma().clone(), bob.prior().as_set_function()).unwrap();
    InteractiveModel::new(vec![
        im.agent(0).clone(),
        Agent::new("bob", bob.with_types(t).unwrap(), TypeDecl::Additive),
    ])
    .unwrap()
}

/// Two copies of W2 as agents `x` and `y`.
pub fn w2_twice() -> InteractiveModel {
    InteractiveModel::new(vec![
        Agent::new("x", w2(), TypeDecl::Additive),
        Agent::new("y", w2(), TypeDecl::Additive),
    ])
    .unwrap()
}

/// Every single-agent fixture with its name.
pub fn all_single() -> Vec<(&'static str, EpistemicModel)> {
    vec![
        ("w1", w1()),
        ("w1-perturbed", w1_perturbed()),
        ("w1-ignorant-at-1", w1_ignorant_at_1()),
        ("w2", w2()),
        ("w2-narrow-b", w2_narrow_b()),
        ("null-cell", null_cell_model()),
        ("w4", w4()),
        ("w4-ignorant", w4_ignorant()),
        ("constant-type-ignorant", constant_type_ignorant()),
        ("shifted-dirac", shifted_dirac()),
        ("non-monotone", non_monotone()),
        ("single-state", single_state()),
    ]
}

/// Every fixture as an interactive model; single-agent fixtures use the
/// agent name `i`.
pub fn all_interactive() -> Vec<(&'static str, InteractiveModel)> {
    let mut out: Vec<(&'static str, InteractiveModel)> = all_single()
        .into_iter()
        .map(|(name, m)| {
            let decl = if name == "w1" || name == "single-state" {
                TypeDecl::Bayes
            } else if m.types().all_additive() {
                TypeDecl::Additive
            } else {
                TypeDecl::Capacity
            };
            (name, InteractiveModel::single("i", m, decl))
        })
        .collect();
    out.push(("iw1", iw1()));
    out.push(("iw1-bob-perturbed", iw1_bob_perturbed()));
    out.push(("w2-twice", w2_twice()));
    out
}

//! Priors, set functions (capacities) and type mappings over a finite
//! sigma-algebra, with classification and the order sets `↑t(ω)`, `↓t(ω)`,
//! `[t(ω)]`.
//!
//! Set-function tables are indexed by atom mask, see
//! [`SigmaAlgebra::mask_of`].

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::events::{Event, SigmaAlgebra};
use crate::rational::Rational;
use crate::report::{CheckReport, Violation};

/// Atom-weight probability measure on a sigma-algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prior {
    sigma: Arc<SigmaAlgebra>,
    weights: Vec<Rational>,
}

impl Prior {
    /// `weights[k]` is the mass of atom `k`. Weights must be nonnegative and
    /// sum to exactly one.
    pub fn new(sigma: Arc<SigmaAlgebra>, weights: Vec<Rational>) -> Result<Prior> {
        if weights.len() != sigma.n_atoms() {
            return Err(Error::Mismatch(format!(
                "prior has {} weights for {} atoms",
                weights.len(),
                sigma.n_atoms()
            )));
        }
        for (k, w) in weights.iter().enumerate() {
            if !w.is_unit_interval() {
                return Err(Error::ValueOutOfRange {
                    what: format!("prior weight of {}", sigma.format_event(sigma.atoms()[k])),
                    value: *w,
                });
            }
        }
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::PriorNotNormalized(total));
        }
        Ok(Prior { sigma, weights })
    }

    pub fn uniform(sigma: Arc<SigmaAlgebra>) -> Prior {
        let k = sigma.n_atoms() as i64;
        let weights = vec![Rational::new(1, k); sigma.n_atoms()];
        Prior { sigma, weights }
    }

    pub fn sigma(&self) -> &Arc<SigmaAlgebra> {
        &self.sigma
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// Mass of the atoms contained in `e`.
    pub fn mu(&self, e: Event) -> Rational {
        if self.sigma.is_powerset() {
            return e.states().map(|s| self.weights[s]).sum();
        }
        self.sigma
            .atoms()
            .iter()
            .zip(&self.weights)
            .filter(|(a, _)| a.is_subset(e))
            .map(|(_, w)| *w)
            .sum()
    }

    pub fn measure_mask(&self, mask: usize) -> Rational {
        let mut m = mask;
        let mut total = Rational::ZERO;
        while m != 0 {
            total = total + self.weights[m.trailing_zeros() as usize];
            m &= m - 1;
        }
        total
    }

    /// `μ(E)` for an event of this algebra.
    pub fn measure_of(&self, e: Event) -> Result<Rational> {
        Ok(self.mu(self.sigma.event(e)?))
    }

    /// `μ(E | F) = μ(E ∩ F) / μ(F)`.
    pub fn conditional(&self, e: Event, f: Event) -> Result<Rational> {
        let denom = self.measure_of(f)?;
        if denom.is_zero() {
            return Err(Error::ConditioningOnNull(self.sigma.format_event(f)));
        }
        Ok(self.measure_of(self.sigma.intersect(e, f)?)? / denom)
    }

    /// `E ⊆ F` μ-a.s., i.e. `μ(E ∖ F) = 0`.
    pub fn almost_contains(&self, e: Event, f: Event) -> Result<bool> {
        Ok(self.measure_of(self.sigma.difference(e, f)?)?.is_zero())
    }

    /// `E = F` μ-a.s., i.e. `μ(E △ F) = 0`.
    pub fn almost_equal(&self, e: Event, f: Event) -> Result<bool> {
        Ok(self
            .measure_of(self.sigma.symmetric_difference(e, f)?)?
            .is_zero())
    }

    /// Integral of a state function; `f` must be constant on atoms.
    pub fn expectation(&self, f: &[Rational]) -> Result<Rational> {
        if f.len() != self.sigma.n_states() {
            return Err(Error::Mismatch(format!(
                "function has {} values for {} states",
                f.len(),
                self.sigma.n_states()
            )));
        }
        let mut total = Rational::ZERO;
        for (atom, w) in self.sigma.atoms().iter().zip(&self.weights) {
            let first = atom.first().expect("atoms are nonempty");
            if let Some(s) = atom.states().find(|&s| f[s] != f[first]) {
                return Err(Error::NotMeasurable(format!(
                    "function differs on states {} and {} of one atom",
                    self.sigma.space().name(first),
                    self.sigma.space().name(s)
                )));
            }
            total = total + f[first] * *w;
        }
        Ok(total)
    }

    /// Powerset algebra and every singleton carries positive mass.
    pub fn is_discrete(&self) -> bool {
        self.sigma.is_powerset() && self.weights.iter().all(|w| w.is_positive())
    }

    /// The prior as a set function on its own algebra.
    pub fn as_set_function(&self) -> SetFunction {
        SetFunction::from_atom_weights(&self.weights)
    }
}

/// A map from every event of the algebra to a rational in `[0,1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetFunction {
    values: Vec<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub normalized: bool,
    pub monotone: bool,
    pub additive: bool,
    pub convex: bool,
    pub one_intersection: bool,
}

impl SetFunction {
    /// `values[mask]` for every atom mask; the length must be `2^k`.
    pub fn from_table(values: Vec<Rational>) -> Result<SetFunction> {
        if !values.len().is_power_of_two() {
            return Err(Error::Mismatch(format!(
                "set-function table of length {} is not indexed by atom masks",
                values.len()
            )));
        }
        if let Some((m, v)) = values.iter().enumerate().find(|(_, v)| !v.is_unit_interval()) {
            return Err(Error::ValueOutOfRange {
                what: format!("set-function value at atom mask {m:#b}"),
                value: *v,
            });
        }
        Ok(SetFunction { values })
    }

    /// Additive extension of per-atom weights.
    pub fn from_atom_weights(weights: &[Rational]) -> SetFunction {
        let k = weights.len();
        let mut values = vec![Rational::ZERO; 1 << k];
        for mask in 1usize..1 << k {
            let low = mask.trailing_zeros() as usize;
            values[mask] = values[mask & (mask - 1)] + weights[low];
        }
        SetFunction { values }
    }

    /// Point mass on atom `atom`.
    pub fn dirac(n_atoms: usize, atom: usize) -> SetFunction {
        let mut w = vec![Rational::ZERO; n_atoms];
        w[atom] = Rational::ONE;
        SetFunction::from_atom_weights(&w)
    }

    pub fn n_atoms(&self) -> usize {
        self.values.len().trailing_zeros() as usize
    }

    pub fn at(&self, mask: usize) -> Rational {
        self.values[mask]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn full_mask(&self) -> usize {
        self.values.len() - 1
    }

    /// Values on single atoms.
    pub fn atom_weights(&self) -> Vec<Rational> {
        (0..self.n_atoms()).map(|k| self.values[1 << k]).collect()
    }

    /// Exhaustive classification over pairs of events.
    pub fn classify(&self) -> Classification {
        let v = &self.values;
        let full = self.full_mask();
        let normalized = v[0].is_zero() && v[full].is_one();
        let mut monotone = true;
        let mut additive = true;
        let mut convex = true;
        let mut one_intersection = true;
        for e in 0..=full {
            for f in 0..=full {
                if e & !f == 0 && v[e] > v[f] {
                    monotone = false;
                }
                if e & f == 0 && v[e | f] != v[e] + v[f] {
                    additive = false;
                }
                if v[e] + v[f] > v[e & f] + v[e | f] {
                    convex = false;
                }
                if v[e].is_one() && v[f].is_one() && !v[e & f].is_one() {
                    one_intersection = false;
                }
            }
        }
        Classification {
            normalized,
            monotone,
            additive,
            convex,
            one_intersection,
        }
    }

    /// Additivity via the atom decomposition: `v(∅) = 0` and every value is
    /// the sum of its atom values. Equivalent to the pairwise definition by
    /// induction on the number of atoms.
    pub fn is_additive(&self) -> bool {
        let v = &self.values;
        v[0].is_zero()
            && (1..v.len()).all(|m| {
                let low = 1 << m.trailing_zeros();
                m == low || v[m] == v[m & !low] + v[low]
            })
    }

    /// Normalized and additive, i.e. a probability measure.
    pub fn is_probability(&self) -> bool {
        self.values[self.full_mask()].is_one() && self.is_additive()
    }

    /// Monotonicity checked along covering pairs `E ⊂ E ∪ A`, which is
    /// equivalent to checking all nested pairs.
    pub fn is_monotone(&self) -> bool {
        let v = &self.values;
        (1..v.len()).all(|m| {
            let mut bits = m;
            while bits != 0 {
                let low = bits & bits.wrapping_neg();
                if v[m & !low] > v[m] {
                    return false;
                }
                bits &= bits - 1;
            }
            true
        })
    }

    /// Pointwise `self ≤ other`.
    pub fn dominated_by(&self, other: &SetFunction) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }
}

/// Classifies a set function; see [`SetFunction::classify`].
pub fn classify(setfn: &SetFunction) -> Classification {
    setfn.classify()
}

/// Per-state set functions `t(ω,·)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeMapping {
    sigma: Arc<SigmaAlgebra>,
    fns: Vec<SetFunction>,
}

/// Precomputed `↑t(ω)` and `↓t(ω)` for every state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderSets {
    pub up: Vec<Event>,
    pub down: Vec<Event>,
}

impl OrderSets {
    pub fn bracket(&self, state: usize) -> Event {
        self.up[state].intersection(self.down[state])
    }
}

impl TypeMapping {
    pub fn new(sigma: Arc<SigmaAlgebra>, fns: Vec<SetFunction>) -> Result<TypeMapping> {
        if fns.len() != sigma.n_states() {
            return Err(Error::Mismatch(format!(
                "type mapping has {} set functions for {} states",
                fns.len(),
                sigma.n_states()
            )));
        }
        if let Some(f) = fns.iter().find(|f| f.values.len() != sigma.n_events()) {
            return Err(Error::Mismatch(format!(
                "set-function table has {} entries for {} events",
                f.values.len(),
                sigma.n_events()
            )));
        }
        Ok(TypeMapping { sigma, fns })
    }

    /// Additive types from per-state atom weights.
    pub fn from_atom_weights(sigma: Arc<SigmaAlgebra>, weights: &[Vec<Rational>]) -> Result<TypeMapping> {
        for w in weights {
            if w.len() != sigma.n_atoms() {
                return Err(Error::Mismatch("atom weight vector of wrong length".into()));
            }
            if let Some(x) = w.iter().find(|x| !x.is_unit_interval()) {
                return Err(Error::ValueOutOfRange {
                    what: "type weight".into(),
                    value: *x,
                });
            }
        }
        let fns: Vec<SetFunction> = weights.iter().map(|w| SetFunction::from_atom_weights(w)).collect();
        if let Some(f) = fns.iter().find(|f| !f.values[f.full_mask()].is_unit_interval()) {
            return Err(Error::ValueOutOfRange {
                what: "total type mass".into(),
                value: f.values[f.full_mask()],
            });
        }
        TypeMapping::new(sigma, fns)
    }

    /// The same set function at every state.
    pub fn constant(sigma: Arc<SigmaAlgebra>, f: SetFunction) -> Result<TypeMapping> {
        let n = sigma.n_states();
        TypeMapping::new(sigma, vec![f; n])
    }

    pub fn sigma(&self) -> &Arc<SigmaAlgebra> {
        &self.sigma
    }

    pub fn state_fn(&self, state: usize) -> &SetFunction {
        &self.fns[state]
    }

    pub fn fns(&self) -> &[SetFunction] {
        &self.fns
    }

    /// `t(ω, E)`.
    pub fn t(&self, state: usize, e: Event) -> Rational {
        self.fns[state].values[self.sigma.mask_of(e)]
    }

    pub fn t_mask(&self, state: usize, mask: usize) -> Rational {
        self.fns[state].values[mask]
    }

    pub fn all_probabilities(&self) -> bool {
        self.fns.iter().all(SetFunction::is_probability)
    }

    pub fn all_additive(&self) -> bool {
        self.fns.iter().all(SetFunction::is_additive)
    }

    pub fn all_monotone(&self) -> bool {
        self.fns.iter().all(SetFunction::is_monotone)
    }

    /// Every attained value `t(ω, E)`.
    pub fn attained_values(&self) -> BTreeSet<Rational> {
        self.fns.iter().flat_map(|f| f.values.iter().copied()).collect()
    }

    fn dominance_set(&self, state: usize, up: bool) -> Event {
        let me = &self.fns[state];
        Event::from_states((0..self.fns.len()).filter(|&o| {
            if up {
                me.dominated_by(&self.fns[o])
            } else {
                self.fns[o].dominated_by(me)
            }
        }))
    }

    /// `↑t(ω)` without the measurability check.
    pub fn up_set_raw(&self, state: usize) -> Event {
        self.dominance_set(state, true)
    }

    /// `↓t(ω)` without the measurability check.
    pub fn down_set_raw(&self, state: usize) -> Event {
        self.dominance_set(state, false)
    }

    pub fn order_sets(&self) -> OrderSets {
        let n = self.fns.len();
        let mut up = vec![Event::EMPTY; n];
        let mut down = vec![Event::EMPTY; n];
        for (i, fi) in self.fns.iter().enumerate() {
            for (j, fj) in self.fns.iter().enumerate() {
                if fi.dominated_by(fj) {
                    up[i] = up[i].union(Event::singleton(j));
                    down[j] = down[j].union(Event::singleton(i));
                }
            }
        }
        OrderSets { up, down }
    }

    fn measurable(&self, set: Event, what: &str, state: usize) -> Result<Event> {
        if self.sigma.is_measurable(set) {
            Ok(set)
        } else {
            Err(Error::NotMeasurable(format!(
                "{what} at {} is {}",
                self.sigma.space().name(state),
                self.sigma.format_event(set)
            )))
        }
    }

    pub fn up_set(&self, state: usize) -> Result<Event> {
        self.measurable(self.up_set_raw(state), "up-set", state)
    }

    pub fn down_set(&self, state: usize) -> Result<Event> {
        self.measurable(self.down_set_raw(state), "down-set", state)
    }

    /// `[t(ω)] = ↑t(ω) ∩ ↓t(ω)`: the states with exactly the type at `ω`.
    pub fn bracket(&self, state: usize) -> Result<Event> {
        let b = self.up_set(state)?.intersection(self.down_set(state)?);
        self.measurable(b, "bracket", state)
    }

    /// Violations of type measurability in `(E, ω)` order, followed by
    /// non-measurable order sets.
    pub fn measurability_violations(&self) -> Vec<Violation> {
        let sigma = &self.sigma;
        let mut out = Vec::new();
        if sigma.is_powerset() {
            // Atoms are singletons and every set is an event.
            return out;
        }
        {
            for mask in 0..sigma.n_events() {
                for atom in sigma.atoms() {
                    let first = atom.first().expect("atoms are nonempty");
                    if let Some(s) = atom
                        .states()
                        .find(|&s| self.fns[s].values[mask] != self.fns[first].values[mask])
                    {
                        out.push(
                            Violation::on(sigma.event_of_mask(mask), first)
                                .with_other(s)
                                .note("type value differs within an atom"),
                        );
                    }
                }
            }
        }
        let sets = self.order_sets();
        for s in 0..self.fns.len() {
            if !sigma.is_measurable(sets.up[s]) {
                out.push(Violation::at(s).note("up-set not measurable"));
            }
            if !sigma.is_measurable(sets.down[s]) {
                out.push(Violation::at(s).note("down-set not measurable"));
            }
        }
        out
    }

    pub fn measurability_check(&self) -> CheckReport {
        CheckReport::from_violations(
            "type-measurability",
            "events x atoms; states",
            self.measurability_violations(),
            self.sigma.space(),
            &[],
        )
    }
}

pub fn up_set(t: &TypeMapping, state: usize) -> Result<Event> {
    t.up_set(state)
}

pub fn down_set(t: &TypeMapping, state: usize) -> Result<Event> {
    t.down_set(state)
}

pub fn bracket(t: &TypeMapping, state: usize) -> Result<Event> {
    t.bracket(state)
}

pub fn type_measurability_check(t: &TypeMapping) -> CheckReport {
    t.measurability_check()
}

//! Finite state spaces, sigma-algebras given by their atom partition, and
//! events as state bitmasks.
//!
//! A finite sigma-algebra is determined by its atoms, so every quantifier of
//! the form "for all E in the algebra" becomes a loop over `2^k` atom masks.
//! Events are plain bitsets over the state order; the algebra validates that
//! a set is a union of its atoms before it is treated as an event.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard limit imposed by the `u64` bitmask representation.
pub const MAX_STATES: usize = 64;
/// Default cap on the number of atoms whose events may be enumerated.
pub const DEFAULT_MAX_ATOMS: usize = 16;

/// Enumeration cap, overridable with `EMCK_MAX_ATOMS`.
pub fn atom_cap() -> usize {
    static CAP: OnceLock<usize> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("EMCK_MAX_ATOMS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&v| v >= 1)
            .unwrap_or(DEFAULT_MAX_ATOMS)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateSpace {
    names: Vec<String>,
}

impl StateSpace {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::EmptySpace);
        }
        if names.len() > MAX_STATES {
            return Err(Error::TooManyStates {
                got: names.len(),
                max: MAX_STATES,
            });
        }
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::EmptyStateName);
            }
            if names[..i].contains(name) {
                return Err(Error::DuplicateState(name.clone()));
            }
        }
        Ok(StateSpace { names })
    }

    /// States named `s0 .. s{n-1}`.
    pub fn numbered(n: usize) -> Result<Self> {
        StateSpace::new((0..n).map(|i| format!("s{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, state: usize) -> &str {
        &self.names[state]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn full(&self) -> Event {
        Event::full(self.len())
    }

    /// Builds a state set from names.
    pub fn set_of<'a, I: IntoIterator<Item = &'a str>>(&self, names: I) -> Result<Event> {
        let mut bits = 0u64;
        for name in names {
            let i = self
                .index_of(name)
                .ok_or_else(|| Error::UnknownState(name.to_string()))?;
            bits |= 1 << i;
        }
        Ok(Event(bits))
    }

    pub fn event_names(&self, e: Event) -> Vec<String> {
        e.states().map(|i| self.names[i].clone()).collect()
    }

    /// `{a,b}` rendering used in reports and CLI output.
    pub fn format_event(&self, e: Event) -> String {
        let names: Vec<&str> = e.states().map(|i| self.name(i)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// A set of states, stored as a bitmask over the state order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Event(u64);

impl Event {
    pub const EMPTY: Event = Event(0);

    pub const fn from_bits(bits: u64) -> Event {
        Event(bits)
    }

    pub fn full(n: usize) -> Event {
        if n >= 64 {
            Event(u64::MAX)
        } else {
            Event((1u64 << n) - 1)
        }
    }

    pub fn singleton(state: usize) -> Event {
        Event(1 << state)
    }

    pub fn from_states<I: IntoIterator<Item = usize>>(states: I) -> Event {
        Event(states.into_iter().fold(0, |acc, s| acc | (1 << s)))
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, state: usize) -> bool {
        self.0 >> state & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: Event) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Event) -> Event {
        Event(self.0 | other.0)
    }

    pub fn intersection(self, other: Event) -> Event {
        Event(self.0 & other.0)
    }

    pub fn difference(self, other: Event) -> Event {
        Event(self.0 & !other.0)
    }

    pub fn symmetric_difference(self, other: Event) -> Event {
        Event(self.0 ^ other.0)
    }

    /// Complement relative to the first `n` states.
    pub fn complement_in(self, n: usize) -> Event {
        Event(!self.0 & Event::full(n).0)
    }

    /// Member states in increasing order.
    pub fn states(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.states()).finish()
    }
}

/// A sigma-algebra on a finite state space, represented by its atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaAlgebra {
    space: StateSpace,
    atoms: Vec<Event>,
    atom_of: Vec<usize>,
}

impl SigmaAlgebra {
    /// The discrete algebra: every subset is an event.
    pub fn powerset(space: StateSpace) -> SigmaAlgebra {
        let n = space.len();
        SigmaAlgebra {
            atoms: (0..n).map(Event::singleton).collect(),
            atom_of: (0..n).collect(),
            space,
        }
    }

    /// The algebra generated by a partition of the states into blocks.
    ///
    /// Atoms are ordered by their smallest state.
    pub fn from_atoms(space: StateSpace, blocks: Vec<Event>) -> Result<SigmaAlgebra> {
        let full = space.full();
        let mut seen = Event::EMPTY;
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidAtoms("empty block".into()));
            }
            if !block.is_subset(full) {
                return Err(Error::InvalidAtoms("block mentions unknown states".into()));
            }
            if !block.intersection(seen).is_empty() {
                return Err(Error::InvalidAtoms(format!(
                    "block {} overlaps another block",
                    space.format_event(*block)
                )));
            }
            seen = seen.union(*block);
        }
        if seen != full {
            return Err(Error::InvalidAtoms(format!(
                "blocks miss {}",
                space.format_event(full.difference(seen))
            )));
        }
        let mut atoms = blocks;
        atoms.sort_by_key(|a| a.first());
        let mut atom_of = vec![0; space.len()];
        for (k, atom) in atoms.iter().enumerate() {
            for s in atom.states() {
                atom_of[s] = k;
            }
        }
        Ok(SigmaAlgebra {
            space,
            atoms,
            atom_of,
        })
    }

    /// Convenience constructor from blocks of state names.
    pub fn from_named_atoms(space: StateSpace, blocks: &[&[&str]]) -> Result<SigmaAlgebra> {
        let events = blocks
            .iter()
            .map(|b| space.set_of(b.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        SigmaAlgebra::from_atoms(space, events)
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn n_states(&self) -> usize {
        self.space.len()
    }

    pub fn atoms(&self) -> &[Event] {
        &self.atoms
    }

    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn n_events(&self) -> usize {
        1 << self.atoms.len()
    }

    pub fn is_powerset(&self) -> bool {
        self.atoms.len() == self.space.len()
    }

    /// Index of the atom containing `state`.
    pub fn atom_index_of(&self, state: usize) -> usize {
        self.atom_of[state]
    }

    pub fn atom_of(&self, state: usize) -> Event {
        self.atoms[self.atom_of[state]]
    }

    pub fn full(&self) -> Event {
        self.space.full()
    }

    /// True iff `set` is a union of atoms.
    pub fn is_measurable(&self, set: Event) -> bool {
        if !set.is_subset(self.full()) {
            return false;
        }
        if self.is_powerset() {
            return true;
        }
        self.atoms
            .iter()
            .all(|&a| a.is_subset(set) || a.intersection(set).is_empty())
    }

    /// Validates that `set` belongs to this algebra.
    pub fn event(&self, set: Event) -> Result<Event> {
        if self.is_measurable(set) {
            Ok(set)
        } else {
            Err(Error::AlgebraMismatch(self.space.format_event(set)))
        }
    }

    pub fn complement(&self, e: Event) -> Result<Event> {
        Ok(self.event(e)?.complement_in(self.n_states()))
    }

    pub fn intersect(&self, e: Event, f: Event) -> Result<Event> {
        Ok(self.event(e)?.intersection(self.event(f)?))
    }

    pub fn union(&self, e: Event, f: Event) -> Result<Event> {
        Ok(self.event(e)?.union(self.event(f)?))
    }

    pub fn difference(&self, e: Event, f: Event) -> Result<Event> {
        Ok(self.event(e)?.difference(self.event(f)?))
    }

    pub fn symmetric_difference(&self, e: Event, f: Event) -> Result<Event> {
        Ok(self.event(e)?.symmetric_difference(self.event(f)?))
    }

    /// Maps a measurable event to its atom mask (bit `k` set iff atom `k`
    /// is contained in the event). The result indexes set-function tables.
    pub fn mask_of(&self, e: Event) -> usize {
        debug_assert!(self.is_measurable(e), "mask_of on a non-event");
        if self.is_powerset() {
            return e.bits() as usize;
        }
        self.atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_subset(e) && !a.is_empty())
            .fold(0, |acc, (k, _)| acc | (1 << k))
    }

    /// Inverse of [`SigmaAlgebra::mask_of`].
    pub fn event_of_mask(&self, mask: usize) -> Event {
        if self.is_powerset() {
            return Event(mask as u64);
        }
        let mut bits = 0u64;
        let mut m = mask;
        while m != 0 {
            let k = m.trailing_zeros() as usize;
            bits |= self.atoms[k].bits();
            m &= m - 1;
        }
        Event(bits)
    }

    /// Smallest event containing `set`.
    pub fn closure(&self, set: Event) -> Event {
        set.states()
            .fold(Event::EMPTY, |acc, s| acc.union(self.atom_of(s)))
    }

    /// All events, ordered by atom mask: `[∅, A1, A2, A1∪A2, ...]`.
    pub fn enumerate_events(&self) -> Result<Vec<Event>> {
        self.enumerate_events_capped(atom_cap())
    }

    pub fn enumerate_events_capped(&self, cap: usize) -> Result<Vec<Event>> {
        self.check_cap(cap)?;
        Ok((0..self.n_events()).map(|m| self.event_of_mask(m)).collect())
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        if self.n_atoms() > cap {
            return Err(Error::TooManyAtoms {
                atoms: self.n_atoms(),
                cap,
            });
        }
        Ok(())
    }

    pub fn format_event(&self, e: Event) -> String {
        self.space.format_event(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space3() -> StateSpace {
        StateSpace::new(["1", "2", "3"]).unwrap()
    }

    #[test]
    fn make_space_examples() {
        assert_eq!(StateSpace::new(["a"]).unwrap().len(), 1);
        assert_eq!(space3().len(), 3);
        assert!(matches!(
            StateSpace::new(["a", "a"]),
            Err(Error::DuplicateState(s)) if s == "a"
        ));
        assert!(matches!(StateSpace::new(["a", ""]), Err(Error::EmptyStateName)));
        assert!(matches!(
            StateSpace::new(Vec::<String>::new()),
            Err(Error::EmptySpace)
        ));
    }

    #[test]
    fn powerset_and_atom_counts() {
        let sigma = SigmaAlgebra::powerset(space3());
        assert_eq!(sigma.n_atoms(), 3);
        assert_eq!(sigma.enumerate_events().unwrap().len(), 8);

        let coarse = SigmaAlgebra::from_named_atoms(space3(), &[&["1"], &["2", "3"]]).unwrap();
        assert_eq!(coarse.enumerate_events().unwrap().len(), 4);

        let bad = SigmaAlgebra::from_named_atoms(space3(), &[&["1"], &["1", "2"]]);
        assert!(matches!(bad, Err(Error::InvalidAtoms(_))));
        let missing = SigmaAlgebra::from_named_atoms(space3(), &[&["1"]]);
        assert!(matches!(missing, Err(Error::InvalidAtoms(_))));
    }

    #[test]
    fn event_algebra_examples() {
        let s = space3();
        let sigma = SigmaAlgebra::powerset(s.clone());
        let e1 = s.set_of(["1"]).unwrap();
        assert_eq!(sigma.complement(e1).unwrap(), s.set_of(["2", "3"]).unwrap());
        let e12 = s.set_of(["1", "2"]).unwrap();
        let e23 = s.set_of(["2", "3"]).unwrap();
        assert_eq!(sigma.intersect(e12, e23).unwrap(), s.set_of(["2"]).unwrap());
        assert_eq!(sigma.symmetric_difference(e1, e1).unwrap(), Event::EMPTY);

        let coarse = SigmaAlgebra::from_named_atoms(s.clone(), &[&["1"], &["2", "3"]]).unwrap();
        let e2 = s.set_of(["2"]).unwrap();
        assert!(matches!(coarse.complement(e2), Err(Error::AlgebraMismatch(_))));
    }

    #[test]
    fn measurability_examples() {
        let s = space3();
        let coarse = SigmaAlgebra::from_named_atoms(s.clone(), &[&["1"], &["2", "3"]]).unwrap();
        assert!(coarse.is_measurable(s.set_of(["2", "3"]).unwrap()));
        assert!(!coarse.is_measurable(s.set_of(["2"]).unwrap()));
        assert!(coarse.is_measurable(Event::EMPTY));
        assert!(SigmaAlgebra::powerset(s).is_measurable(Event::EMPTY));
    }

    #[test]
    fn enumeration_order_and_cap() {
        let s = StateSpace::new(["a", "b"]).unwrap();
        let sigma = SigmaAlgebra::powerset(s.clone());
        let events = sigma.enumerate_events().unwrap();
        assert_eq!(
            events,
            vec![
                Event::EMPTY,
                s.set_of(["a"]).unwrap(),
                s.set_of(["b"]).unwrap(),
                s.full()
            ]
        );

        let big = SigmaAlgebra::powerset(StateSpace::numbered(17).unwrap());
        assert!(matches!(
            big.enumerate_events_capped(16),
            Err(Error::TooManyAtoms { atoms: 17, cap: 16 })
        ));
    }

    fn arb_sigma() -> impl Strategy<Value = SigmaAlgebra> {
        (1usize..=6)
            .prop_flat_map(|n| (Just(n), proptest::collection::vec(0usize..6, n)))
            .prop_map(|(n, labels)| {
                let space = StateSpace::numbered(n).unwrap();
                let mut blocks: Vec<Event> = Vec::new();
                let mut by_label: Vec<(usize, Event)> = Vec::new();
                for (s, l) in labels.into_iter().enumerate() {
                    match by_label.iter_mut().find(|(x, _)| *x == l) {
                        Some((_, e)) => *e = e.union(Event::singleton(s)),
                        None => by_label.push((l, Event::singleton(s))),
                    }
                }
                blocks.extend(by_label.into_iter().map(|(_, e)| e));
                SigmaAlgebra::from_atoms(space, blocks).unwrap()
            })
    }

    proptest! {
        #[test]
        fn events_form_a_boolean_algebra(sigma in arb_sigma()) {
            let events = sigma.enumerate_events().unwrap();
            prop_assert!(events.contains(&Event::EMPTY));
            prop_assert!(events.contains(&sigma.full()));
            for &e in &events {
                prop_assert!(sigma.is_measurable(e));
                let c = sigma.complement(e).unwrap();
                prop_assert!(events.contains(&c));
                prop_assert_eq!(sigma.complement(c).unwrap(), e);
                prop_assert_eq!(sigma.event_of_mask(sigma.mask_of(e)), e);
                for &f in &events {
                    let i = sigma.intersect(e, f).unwrap();
                    let u = sigma.union(e, f).unwrap();
                    prop_assert!(events.contains(&i));
                    prop_assert!(sigma.is_measurable(u));
                    prop_assert!(sigma.is_measurable(sigma.difference(e, f).unwrap()));
                    prop_assert!(sigma.is_measurable(sigma.symmetric_difference(e, f).unwrap()));
                    prop_assert_eq!(i, sigma.intersect(f, e).unwrap());
                    prop_assert_eq!(u, sigma.union(f, e).unwrap());
                    // De Morgan
                    prop_assert_eq!(
                        sigma.complement(u).unwrap(),
                        sigma.intersect(sigma.complement(e).unwrap(), sigma.complement(f).unwrap()).unwrap()
                    );
                    prop_assert_eq!(
                        sigma.complement(i).unwrap(),
                        sigma.union(sigma.complement(e).unwrap(), sigma.complement(f).unwrap()).unwrap()
                    );
                }
            }
        }

        #[test]
        fn intersection_and_union_associate(sigma in arb_sigma(), a in 0usize..64, b in 0usize..64, c in 0usize..64) {
            let m = sigma.n_events();
            let (x, y, z) = (sigma.event_of_mask(a % m), sigma.event_of_mask(b % m), sigma.event_of_mask(c % m));
            let l = sigma.intersect(sigma.intersect(x, y).unwrap(), z).unwrap();
            let r = sigma.intersect(x, sigma.intersect(y, z).unwrap()).unwrap();
            prop_assert_eq!(l, r);
            let l = sigma.union(sigma.union(x, y).unwrap(), z).unwrap();
            let r = sigma.union(x, sigma.union(y, z).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }
    }
}

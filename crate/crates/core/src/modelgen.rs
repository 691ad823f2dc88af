//! Exhaustive and seeded random model generation, and counterexample search
//! over the registered claims.
//!
//! Exhaustive streams are mixed-radix: within each `(n, Σ)` block the index
//! decomposes into the prior, then per agent the correspondence and the
//! types, most significant first. Random streams seed a ChaCha generator
//! per index, so any index range can be evaluated independently.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::axioms;
use crate::beliefs::{Prior, SetFunction, TypeMapping};
use crate::error::{Error, Result};
use crate::events::{Event, SigmaAlgebra, StateSpace};
use crate::multiagent::{self, Agent, InteractiveModel, TypeDecl};
use crate::operators::{EpistemicModel, PossibilityCorrespondence};
use crate::rational::Rational;
use crate::report::{Verdict, VerificationReport};
use crate::theorems;

macro_rules! named_enum {
    ($ty:ident { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub const ALL: &'static [$ty] = &[$($ty::$variant),+];

            pub fn name(self) -> &'static str {
                match self { $($ty::$variant => $name),+ }
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok($ty::$variant),)+
                    _ => Err(Error::InvalidParameter(format!(
                        "unknown {} `{}`; expected one of {}",
                        stringify!($ty),
                        s,
                        [$($name),+].join(", ")
                    ))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
    };
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SigmaMode {
    Powerset,
    RandomPartition,
}
named_enum!(SigmaMode { Powerset => "powerset", RandomPartition => "random-partition" });

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeMode {
    Bayes,
    RandomAdditive,
    RandomCapacity,
    RandomMonotoneCapacity,
}
named_enum!(TypeMode {
    Bayes => "bayes",
    RandomAdditive => "random-additive",
    RandomCapacity => "random-capacity",
    RandomMonotoneCapacity => "random-monotone-capacity",
});

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PossMode {
    Partition,
    Reflexive,
    ArbitraryNonempty,
}
named_enum!(PossMode {
    Partition => "partition",
    Reflexive => "reflexive",
    ArbitraryNonempty => "arbitrary-nonempty",
});

/// Filters re-checked on every emitted model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Requirement {
    Regular,
    Discrete,
    PositiveCells,
    FullSupport,
    Partition,
    Monotone,
    OneIntersection,
    Normalized,
    Additive,
}
named_enum!(Requirement {
    Regular => "regular",
    Discrete => "discrete",
    PositiveCells => "positive-cells",
    FullSupport => "full-support",
    Partition => "partition",
    Monotone => "monotone",
    OneIntersection => "one-intersection",
    Normalized => "normalized",
    Additive => "additive",
});

impl Requirement {
    pub fn holds(self, im: &InteractiveModel) -> bool {
        let all = |f: &dyn Fn(&EpistemicModel) -> bool| im.agents().iter().all(|a| f(a.model()));
        match self {
            Requirement::Regular => all(&axioms::regular_holds),
            Requirement::Discrete => im.is_discrete(),
            Requirement::PositiveCells => all(&|m| m.null_cell().is_none()),
            Requirement::FullSupport => im.prior().weights().iter().all(|w| w.is_positive()),
            Requirement::Partition => all(&|m| m.poss().is_partition()),
            Requirement::Monotone => all(&|m| m.types().all_monotone()),
            Requirement::OneIntersection => {
                all(&|m| m.types().fns().iter().all(theorems::one_intersecting))
            }
            Requirement::Normalized => all(&|m| (0..m.n_states()).all(|s| m.types().t(s, m.full()).is_one())),
            Requirement::Additive => all(&|m| m.types().all_additive()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub min_states: usize,
    pub n_states: usize,
    pub n_agents: usize,
    /// Weights are drawn from `{0, 1/d, …, 1}`.
    pub denominator: u32,
    pub sigma_mode: SigmaMode,
    pub type_mode: TypeMode,
    pub poss_mode: PossMode,
    pub require: Vec<Requirement>,
    /// Capacities get `v(∅) = 0` and `v(Ω) = 1`.
    pub normalized_capacities: bool,
    pub seed: u64,
    /// Exhaustive: maximal grid size. Random: number of models.
    pub budget: Option<u64>,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            min_states: 1,
            n_states: 3,
            n_agents: 1,
            denominator: 2,
            sigma_mode: SigmaMode::Powerset,
            type_mode: TypeMode::RandomAdditive,
            poss_mode: PossMode::ArbitraryNonempty,
            require: Vec::new(),
            normalized_capacities: false,
            seed: 0,
            budget: None,
        }
    }
}

impl GenParams {
    fn validate(&self) -> Result<()> {
        if self.denominator == 0 {
            return Err(Error::InvalidParameter("denominator must be at least 1".into()));
        }
        if self.min_states == 0 || self.min_states > self.n_states {
            return Err(Error::InvalidParameter("state counts must satisfy 1 ≤ min ≤ max".into()));
        }
        if self.n_states > crate::events::MAX_STATES {
            return Err(Error::TooManyStates {
                got: self.n_states,
                max: crate::events::MAX_STATES,
            });
        }
        if self.n_agents == 0 {
            return Err(Error::InvalidParameter("at least one agent is required".into()));
        }
        Ok(())
    }

    fn grid(&self, k: i64) -> Rational {
        Rational::new(k, self.denominator as i64)
    }

    fn accepts(&self, im: &InteractiveModel) -> bool {
        self.require.iter().all(|r| r.holds(im))
    }

    fn decl(&self) -> TypeDecl {
        match self.type_mode {
            TypeMode::Bayes => TypeDecl::Bayes,
            TypeMode::RandomAdditive => TypeDecl::Additive,
            _ => TypeDecl::Capacity,
        }
    }
}

/// Restricted growth strings of length `k` in lexicographic order: every
/// set partition of `0..k` exactly once.
pub fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        let next = prefix.iter().max().map_or(0, |m| m + 1);
        for b in 0..=next {
            prefix.push(b);
            go(prefix, k, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(k), k, &mut out);
    out
}

/// Vectors of `k` nonnegative integers summing to `d`, lexicographic.
pub fn compositions(d: u32, k: usize) -> Vec<Vec<u32>> {
    fn go(left: u32, k: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == k {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for x in 0..=left {
            prefix.push(x);
            go(left - x, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        go(d, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Per-atom cell masks for a labelling of atoms into blocks.
fn partition_cells(labels: &[usize]) -> Vec<usize> {
    labels
        .iter()
        .map(|&l| {
            labels
                .iter()
                .enumerate()
                .filter(|(_, &m)| m == l)
                .fold(0, |acc, (j, _)| acc | 1 << j)
        })
        .collect()
}

fn sigma_from_labels(n: usize, labels: &[usize]) -> Result<Arc<SigmaAlgebra>> {
    let space = StateSpace::numbered(n)?;
    let blocks = (0..=labels.iter().copied().max().unwrap_or(0))
        .map(|b| Event::from_states((0..n).filter(|&s| labels[s] == b)))
        .filter(|e| !e.is_empty())
        .collect();
    Ok(Arc::new(SigmaAlgebra::from_atoms(space, blocks)?))
}

fn monotone_table(v: &[Rational], k: usize) -> bool {
    (0..1usize << k).all(|m| (0..k).all(|j| m & 1 << j != 0 || v[m] <= v[m | 1 << j]))
}

/// Per-atom choices for the correspondence.
enum PossSpace {
    Partitions(Vec<Vec<usize>>),
    PerAtom(Vec<Vec<usize>>),
}

impl PossSpace {
    fn new(mode: PossMode, k: usize) -> PossSpace {
        let all = 1usize..1 << k;
        match mode {
            PossMode::Partition => PossSpace::Partitions(set_partitions(k).iter().map(|l| partition_cells(l)).collect()),
            PossMode::Reflexive => {
                PossSpace::PerAtom((0..k).map(|j| all.clone().filter(|m| m & 1 << j != 0).collect()).collect())
            }
            PossMode::ArbitraryNonempty => PossSpace::PerAtom(vec![all.collect(); k]),
        }
    }

    fn count(&self) -> Option<u64> {
        match self {
            PossSpace::Partitions(p) => Some(p.len() as u64),
            PossSpace::PerAtom(o) => o.iter().try_fold(1u64, |acc, x| acc.checked_mul(x.len() as u64)),
        }
    }

    fn decode(&self, mut digit: u64) -> Vec<usize> {
        match self {
            PossSpace::Partitions(p) => p[digit as usize].clone(),
            PossSpace::PerAtom(o) => {
                let mut out = vec![0; o.len()];
                for j in (0..o.len()).rev() {
                    let len = o[j].len() as u64;
                    out[j] = o[j][(digit % len) as usize];
                    digit /= len;
                }
                out
            }
        }
    }
}

struct Block {
    sigma: Arc<SigmaAlgebra>,
    priors: Vec<Prior>,
    poss: PossSpace,
    /// Shared per-atom type options; `None` for Bayes types.
    types: Option<Vec<SetFunction>>,
    poss_count: u64,
    type_count: u64,
    per_agent: u64,
    len: u64,
}

fn type_options(params: &GenParams, k: usize) -> Result<Option<Vec<SetFunction>>> {
    let d = params.denominator;
    let cap = params.budget.unwrap_or(u64::MAX);
    Ok(match params.type_mode {
        TypeMode::Bayes => None,
        TypeMode::RandomAdditive => Some(
            compositions(d, k)
                .iter()
                .map(|c| SetFunction::from_atom_weights(&c.iter().map(|&x| params.grid(x as i64)).collect::<Vec<_>>()))
                .collect(),
        ),
        TypeMode::RandomCapacity | TypeMode::RandomMonotoneCapacity => {
            let size = 1usize << k;
            let free = if params.normalized_capacities { size.saturating_sub(2) } else { size };
            let count = (d as u64 + 1)
                .checked_pow(free as u32)
                .filter(|&c| c <= cap.min(1 << 24))
                .ok_or_else(|| Error::ResourceLimit(format!("capacity grid for {k} atoms is too large")))?;
            let mut out = Vec::new();
            for mut idx in 0..count {
                let mut v = vec![Rational::ZERO; size];
                for (m, slot) in v.iter_mut().enumerate() {
                    if params.normalized_capacities && (m == 0 || m == size - 1) {
                        *slot = if m == 0 { Rational::ZERO } else { Rational::ONE };
                        continue;
                    }
                    *slot = params.grid((idx % (d as u64 + 1)) as i64);
                    idx /= d as u64 + 1;
                }
                if params.type_mode == TypeMode::RandomCapacity || monotone_table(&v, k) {
                    out.push(SetFunction::from_table(v).expect("grid values lie in [0,1]"));
                }
            }
            out.sort_by(|a, b| a.values().cmp(b.values()));
            Some(out)
        }
    })
}

/// Lazily decoded exhaustive stream.
pub struct Enumeration {
    params: GenParams,
    blocks: Vec<Block>,
    len: u64,
}

impl Enumeration {
    pub fn new(params: &GenParams) -> Result<Enumeration> {
        params.validate()?;
        let overflow = || Error::ResourceLimit("model grid exceeds 2^64".into());
        let mut blocks = Vec::new();
        let mut len = 0u64;
        for n in params.min_states..=params.n_states {
            let sigmas: Vec<Arc<SigmaAlgebra>> = match params.sigma_mode {
                SigmaMode::Powerset => vec![Arc::new(SigmaAlgebra::powerset(StateSpace::numbered(n)?))],
                SigmaMode::RandomPartition => set_partitions(n)
                    .iter()
                    .map(|l| sigma_from_labels(n, l))
                    .collect::<Result<_>>()?,
            };
            for sigma in sigmas {
                let k = sigma.n_atoms();
                sigma.check_cap(crate::events::atom_cap())?;
                let priors: Vec<Prior> = compositions(params.denominator, k)
                    .into_iter()
                    .map(|c| Prior::new(sigma.clone(), c.iter().map(|&x| params.grid(x as i64)).collect()))
                    .collect::<Result<_>>()?;
                let poss = PossSpace::new(params.poss_mode, k);
                let types = type_options(params, k)?;
                let poss_count = poss.count().ok_or_else(overflow)?;
                let type_count = match &types {
                    None => 1,
                    Some(o) => (o.len() as u64).checked_pow(k as u32).ok_or_else(overflow)?,
                };
                let per_agent = poss_count.checked_mul(type_count).ok_or_else(overflow)?;
                let block_len = per_agent
                    .checked_pow(params.n_agents as u32)
                    .and_then(|x| x.checked_mul(priors.len() as u64))
                    .ok_or_else(overflow)?;
                len = len.checked_add(block_len).ok_or_else(overflow)?;
                blocks.push(Block {
                    sigma,
                    priors,
                    poss,
                    types,
                    poss_count,
                    type_count,
                    per_agent,
                    len: block_len,
                });
            }
        }
        if let Some(b) = params.budget {
            if len > b {
                return Err(Error::ResourceLimit(format!(
                    "exhaustive grid has {len} candidates, budget is {b}"
                )));
            }
        }
        Ok(Enumeration {
            params: params.clone(),
            blocks,
            len,
        })
    }

    /// Number of candidate indices, before filtering.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The model at `index`, or `None` when the candidate is filtered out.
    pub fn get(&self, mut index: u64) -> Option<InteractiveModel> {
        let block = self.blocks.iter().find(|b| {
            if index < b.len {
                true
            } else {
                index -= b.len;
                false
            }
        })?;
        let agents = self.params.n_agents;
        let mut digits = vec![0u64; agents];
        for d in digits.iter_mut().rev() {
            *d = index % block.per_agent;
            index /= block.per_agent;
        }
        let prior = &block.priors[index as usize];
        let mut out = Vec::with_capacity(agents);
        for (i, d) in digits.into_iter().enumerate() {
            debug_assert!(d / block.type_count < block.poss_count);
            let cells = block.poss.decode(d / block.type_count);
            let types = block.types.as_ref().map(|o| {
                let k = block.sigma.n_atoms();
                let mut t = d % block.type_count;
                let mut choice = vec![0usize; k];
                for j in (0..k).rev() {
                    choice[j] = (t % o.len() as u64) as usize;
                    t /= o.len() as u64;
                }
                choice.into_iter().map(|c| o[c].clone()).collect::<Vec<_>>()
            });
            let model = assemble(&block.sigma, prior, &cells, types)?;
            out.push(Agent::new(agent_name(i, agents), model, self.params.decl()));
        }
        let im = InteractiveModel::new(out).ok()?;
        self.params.accepts(&im).then_some(im)
    }

    pub fn iter(&self) -> impl Iterator<Item = InteractiveModel> + '_ {
        (0..self.len).filter_map(move |i| self.get(i))
    }
}

fn agent_name(i: usize, n: usize) -> String {
    if n == 1 {
        "i".into()
    } else {
        format!("i{}", i + 1)
    }
}

/// Builds one agent's model from per-atom cells and per-atom types; Bayes
/// types when `types` is `None`. `None` when Bayes types are undefined.
fn assemble(
    sigma: &Arc<SigmaAlgebra>,
    prior: &Prior,
    cells: &[usize],
    types: Option<Vec<SetFunction>>,
) -> Option<EpistemicModel> {
    let n = sigma.n_states();
    let per_state = |s: usize| sigma.atom_index_of(s);
    let poss = PossibilityCorrespondence::new(
        sigma,
        (0..n).map(|s| sigma.event_of_mask(cells[per_state(s)])).collect(),
    )
    .expect("cells are unions of atoms");
    let null = cells.iter().any(|&c| prior.measure_mask(c).is_zero());
    let types = match types {
        None if null => return None,
        None => theorems::bayes_type_from_poss(prior, &poss).expect("positive cells"),
        Some(fs) => TypeMapping::new(sigma.clone(), (0..n).map(|s| fs[per_state(s)].clone()).collect())
            .expect("tables sized to the algebra"),
    };
    Some(EpistemicModel::build(prior.clone(), poss, types, null).expect("generated models are well formed"))
}

pub fn enumerate_interactive(params: &GenParams) -> Result<Enumeration> {
    Enumeration::new(params)
}

/// The single-agent exhaustive stream.
pub fn enumerate_models(params: &GenParams) -> Result<impl Iterator<Item = EpistemicModel>> {
    if params.n_agents != 1 {
        return Err(Error::InvalidParameter("single-agent stream needs n_agents = 1".into()));
    }
    let e = Enumeration::new(params)?;
    Ok((0..e.len).filter_map(move |i| e.get(i).map(|im| im.agent(0).model().clone())))
}

/// Attempts per random index before giving up on the requirements.
pub const MAX_REJECTIONS: u32 = 100_000;

fn random_composition(rng: &mut ChaCha8Rng, d: u32, k: usize) -> Vec<u32> {
    let mut c = vec![0u32; k];
    for _ in 0..d {
        c[rng.gen_range(0..k)] += 1;
    }
    c
}

fn random_candidate(params: &GenParams, rng: &mut ChaCha8Rng) -> Result<Option<InteractiveModel>> {
    let n = rng.gen_range(params.min_states..=params.n_states);
    let sigma = match params.sigma_mode {
        SigmaMode::Powerset => Arc::new(SigmaAlgebra::powerset(StateSpace::numbered(n)?)),
        SigmaMode::RandomPartition => {
            let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            sigma_from_labels(n, &labels)?
        }
    };
    let k = sigma.n_atoms();
    sigma.check_cap(crate::events::atom_cap())?;
    let weights = random_composition(rng, params.denominator, k);
    let prior = Prior::new(sigma.clone(), weights.iter().map(|&x| params.grid(x as i64)).collect())?;
    let d = params.denominator;
    let mut agents = Vec::with_capacity(params.n_agents);
    for i in 0..params.n_agents {
        let cells: Vec<usize> = match params.poss_mode {
            PossMode::Partition => {
                let labels: Vec<usize> = (0..k).map(|_| rng.gen_range(0..k)).collect();
                partition_cells(&labels)
            }
            PossMode::Reflexive => (0..k).map(|j| rng.gen_range(0..1usize << k) | 1 << j).collect(),
            PossMode::ArbitraryNonempty => (0..k).map(|_| rng.gen_range(1..1usize << k)).collect(),
        };
        let size = 1usize << k;
        let types = match params.type_mode {
            TypeMode::Bayes => None,
            TypeMode::RandomAdditive => Some(
                (0..k)
                    .map(|_| {
                        let c = random_composition(rng, d, k);
                        SetFunction::from_atom_weights(&c.iter().map(|&x| params.grid(x as i64)).collect::<Vec<_>>())
                    })
                    .collect(),
            ),
            TypeMode::RandomCapacity | TypeMode::RandomMonotoneCapacity => Some(
                (0..k)
                    .map(|_| {
                        let mut raw: Vec<u32> = (0..size).map(|_| rng.gen_range(0..=d)).collect();
                        if params.type_mode == TypeMode::RandomMonotoneCapacity {
                            // Sorted values laid out by cardinality: a subset
                            // never has more elements than its superset.
                            raw.sort_unstable();
                            let mut order: Vec<usize> = (0..size).collect();
                            order.sort_by_key(|m| (m.count_ones(), *m));
                            let mut v = vec![0u32; size];
                            for (slot, m) in order.into_iter().enumerate() {
                                v[m] = raw[slot];
                            }
                            raw = v;
                        }
                        if params.normalized_capacities {
                            raw[0] = 0;
                            raw[size - 1] = d;
                        }
                        SetFunction::from_table(raw.iter().map(|&x| params.grid(x as i64)).collect())
                            .expect("grid values lie in [0,1]")
                    })
                    .collect(),
            ),
        };
        match assemble(&sigma, &prior, &cells, types) {
            Some(m) => agents.push(Agent::new(agent_name(i, params.n_agents), m, params.decl())),
            None => return Ok(None),
        }
    }
    let im = InteractiveModel::new(agents)?;
    Ok(params.accepts(&im).then_some(im))
}

/// Model number `index` of the random stream for `seed`.
pub fn random_interactive_at(params: &GenParams, seed: u64, index: u64) -> Result<InteractiveModel> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    for _ in 0..MAX_REJECTIONS {
        if let Some(im) = random_candidate(params, &mut rng)? {
            return Ok(im);
        }
    }
    Err(Error::ResourceLimit(format!(
        "no model met the requirements after {MAX_REJECTIONS} attempts"
    )))
}

pub fn random_interactive(params: &GenParams, seed: u64) -> Result<InteractiveModel> {
    random_interactive_at(params, seed, 0)
}

/// A reproducible single-agent model.
pub fn random_model(params: &GenParams, seed: u64) -> Result<EpistemicModel> {
    let im = random_interactive(params, seed)?;
    Ok(im.agent(0).model().clone())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Consistent,
    Falsified,
    /// Outside the claim's domain (for example a null cell where the claim
    /// needs positive cells); counted separately.
    Skipped,
}

/// A searchable claim: a fast falsification test and the full report.
#[derive(Clone, Copy)]
pub struct Claim {
    pub name: &'static str,
    pub test: fn(&InteractiveModel) -> Result<Outcome>,
    pub report: fn(&InteractiveModel) -> Result<VerificationReport>,
}

fn outcome(falsified: bool) -> Outcome {
    if falsified {
        Outcome::Falsified
    } else {
        Outcome::Consistent
    }
}

/// Combines per-agent outcomes of a single-agent claim.
fn per_agent(im: &InteractiveModel, f: impl Fn(&EpistemicModel) -> Result<Outcome>) -> Result<Outcome> {
    let mut skipped = false;
    for a in im.agents() {
        match f(a.model())? {
            Outcome::Falsified => return Ok(Outcome::Falsified),
            Outcome::Skipped => skipped = true,
            Outcome::Consistent => {}
        }
    }
    Ok(if skipped { Outcome::Skipped } else { Outcome::Consistent })
}

/// First falsified agent report, else the first agent's.
fn per_agent_report(
    im: &InteractiveModel,
    f: impl Fn(&EpistemicModel) -> Result<VerificationReport>,
) -> Result<VerificationReport> {
    let mut first = None;
    for a in im.agents() {
        let mut r = f(a.model())?;
        if im.n_agents() > 1 {
            r.notes.push(format!("agent {}", a.name()));
        }
        if r.verdict == Verdict::Falsified {
            return Ok(r);
        }
        first.get_or_insert(r);
    }
    Ok(first.expect("at least one agent"))
}

fn report_outcome(r: VerificationReport) -> Outcome {
    outcome(r.verdict == Verdict::Falsified)
}

macro_rules! single_claim {
    ($name:literal, $verify:expr) => {
        Claim {
            name: $name,
            test: |im| per_agent(im, |m| Ok(report_outcome($verify(m)))),
            report: |im| per_agent_report(im, |m| Ok($verify(m))),
        }
    };
}

pub const CLAIMS: &[Claim] = &[
    Claim {
        name: "theorem-main",
        test: |im| {
            per_agent(im, |m| {
                if m.null_cell().is_some() {
                    return Ok(Outcome::Skipped);
                }
                let (l, r) = theorems::theorem_main_sides(m)?;
                Ok(outcome(l != r))
            })
        },
        report: |im| per_agent_report(im, theorems::verify_theorem_main),
    },
    Claim {
        name: "theorem-main-product",
        test: |im| {
            per_agent(im, |m| {
                let (l, r, iff) = theorems::theorem_main_product_sides(m);
                Ok(outcome(if iff { l != r } else { l && !r }))
            })
        },
        report: |im| per_agent_report(im, |m| Ok(theorems::verify_theorem_main_product(m))),
    },
    single_claim!("prop-1", |m| theorems::verify_prop1(m, false)),
    Claim {
        name: "prop-2",
        test: |im| {
            per_agent(im, |m| {
                Ok(outcome(theorems::prop2_sides(m).iter().any(|(l, r)| l != r)))
            })
        },
        report: |im| per_agent_report(im, |m| Ok(theorems::verify_prop2(m))),
    },
    Claim {
        name: "prop-3",
        test: |im| Ok(outcome(multiagent::prop3_falsified(im, multiagent::DEFAULT_AGREEMENT_BUDGET)?)),
        report: |im| multiagent::verify_prop3(im, multiagent::DEFAULT_AGREEMENT_BUDGET, false),
    },
    single_claim!("cor-main", |m| theorems::verify_cor_main(m, false)),
    single_claim!("cor-main-discrete", |m| theorems::verify_cor_main_discrete(m, false)),
    single_claim!("cor-unaware", |m| theorems::verify_cor_unaware(m, false)),
    Claim {
        name: "cor-regular",
        test: |im| {
            per_agent(im, |m| {
                if m.null_cell().is_some() {
                    return Ok(Outcome::Skipped);
                }
                Ok(report_outcome(theorems::verify_cor_regular(m)))
            })
        },
        report: |im| per_agent_report(im, |m| Ok(theorems::verify_cor_regular(m))),
    },
    single_claim!("cor-ta", |m| theorems::verify_cor_ta(m, false)),
    single_claim!("cor-ta-types", |m| theorems::verify_cor_ta_types(m, false)),
    Claim {
        name: "cor-ck",
        test: |im| Ok(report_outcome(multiagent::verify_cor_ck(im, false))),
        report: |im| Ok(multiagent::verify_cor_ck(im, false)),
    },
    Claim {
        name: "cor-ta-common",
        test: |im| Ok(report_outcome(multiagent::verify_cor_ta_common(im, false))),
        report: |im| Ok(multiagent::verify_cor_ta_common(im, false)),
    },
];

pub fn claim(name: &str) -> Option<Claim> {
    CLAIMS.iter().find(|c| c.name == name).copied()
}

pub fn claim_names() -> Vec<&'static str> {
    CLAIMS.iter().map(|c| c.name).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    Random,
}
named_enum!(SearchMode { Exhaustive => "exhaustive", Random => "random" });

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    NotFound {
        models_checked: u64,
        skipped: u64,
    },
    Found {
        /// Stream index of the counterexample.
        index: u64,
        models_checked: u64,
        model: Box<InteractiveModel>,
        report: Box<VerificationReport>,
    },
}

/// Indices evaluated per parallel round; rounds are merged in order.
const CHUNK: u64 = 1 << 14;

/// Runs `target` over the stream. Exhaustive mode visits the whole grid;
/// random mode visits `budget` models (default 10⁴). The lowest falsified
/// index wins regardless of `workers`.
pub fn search_counterexample(
    target: &Claim,
    params: &GenParams,
    mode: SearchMode,
    workers: usize,
) -> Result<SearchOutcome> {
    params.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
    let enumeration = match mode {
        SearchMode::Exhaustive => Some(Enumeration::new(params)?),
        SearchMode::Random => None,
    };
    let total = match &enumeration {
        Some(e) => e.len(),
        None => params.budget.unwrap_or(10_000),
    };
    let eval = |i: u64| -> Result<Option<(Outcome, InteractiveModel)>> {
        let im = match &enumeration {
            Some(e) => match e.get(i) {
                Some(im) => im,
                None => return Ok(None),
            },
            None => random_interactive_at(params, params.seed, i)?,
        };
        Ok(Some(((target.test)(&im)?, im)))
    };
    let (mut checked, mut skipped) = (0u64, 0u64);
    let mut start = 0u64;
    while start < total {
        let end = total.min(start + CHUNK);
        let results: Vec<Result<Option<Outcome>>> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|i| eval(i).map(|o| o.map(|(x, _)| x)))
                .collect()
        });
        for (offset, r) in results.into_iter().enumerate() {
            match r? {
                None => {}
                Some(Outcome::Consistent) => checked += 1,
                Some(Outcome::Skipped) => skipped += 1,
                Some(Outcome::Falsified) => {
                    checked += 1;
                    let index = start + offset as u64;
                    let (_, model) = eval(index)?.expect("re-evaluating a visited index");
                    let report = (target.report)(&model)?;
                    return Ok(SearchOutcome::Found {
                        index,
                        models_checked: checked,
                        model: Box::new(model),
                        report: Box::new(report),
                    });
                }
            }
        }
        start = end;
    }
    Ok(SearchOutcome::NotFound {
        models_checked: checked,
        skipped,
    })
}

#[cfg(test)]
pub mod strategies {
    //! Proptest strategies built on the seeded generator.

    use super::*;
    use proptest::prelude::*;

    fn from_params(params: GenParams) -> impl Strategy<Value = InteractiveModel> {
        any::<u64>().prop_map(move |seed| random_interactive(&params, seed).expect("generator succeeds"))
    }

    fn varied(agents: usize) -> impl Strategy<Value = GenParams> {
        (
            1usize..=3,
            prop_oneof![Just(2u32), Just(3), Just(4)],
            prop::sample::select(SigmaMode::ALL.to_vec()),
            prop::sample::select(TypeMode::ALL.to_vec()),
            prop::sample::select(PossMode::ALL.to_vec()),
            any::<bool>(),
        )
            .prop_map(move |(n, d, s, t, p, norm)| GenParams {
                min_states: 1,
                n_states: n,
                n_agents: agents,
                denominator: d,
                sigma_mode: s,
                type_mode: t,
                poss_mode: p,
                normalized_capacities: norm,
                ..GenParams::default()
            })
    }

    pub fn small_interactive_model() -> impl Strategy<Value = InteractiveModel> {
        (1usize..=3).prop_flat_map(varied).prop_flat_map(from_params)
    }

    pub fn small_model() -> impl Strategy<Value = EpistemicModel> {
        varied(1).prop_flat_map(from_params).prop_map(|im| im.agent(0).model().clone())
    }

    pub fn small_additive_model() -> impl Strategy<Value = EpistemicModel> {
        varied(1)
            .prop_map(|p| GenParams {
                type_mode: TypeMode::RandomAdditive,
                ..p
            })
            .prop_flat_map(from_params)
            .prop_map(|im| im.agent(0).model().clone())
    }

    pub fn small_positive_cell_model() -> impl Strategy<Value = EpistemicModel> {
        varied(1)
            .prop_map(|p| GenParams {
                require: vec![Requirement::PositiveCells],
                ..p
            })
            .prop_flat_map(from_params)
            .prop_map(|im| im.agent(0).model().clone())
    }

    fn regular(agents: usize) -> impl Strategy<Value = GenParams> {
        varied(agents).prop_map(|p| GenParams {
            type_mode: TypeMode::Bayes,
            poss_mode: PossMode::Partition,
            ..p
        })
    }

    pub fn small_regular_model() -> impl Strategy<Value = EpistemicModel> {
        regular(1)
            .prop_flat_map(from_params)
            .prop_map(|im| im.agent(0).model().clone())
    }

    pub fn small_regular_interactive_model() -> impl Strategy<Value = InteractiveModel> {
        (1usize..=3).prop_flat_map(regular).prop_flat_map(from_params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, d: u32, t: TypeMode, p: PossMode) -> GenParams {
        GenParams {
            min_states: n,
            n_states: n,
            denominator: d,
            type_mode: t,
            poss_mode: p,
            ..GenParams::default()
        }
    }

    #[test]
    fn combinatorics() {
        assert_eq!(set_partitions(3).len(), 5);
        assert_eq!(set_partitions(4).len(), 15);
        assert_eq!(compositions(4, 3).len(), 15);
        assert_eq!(compositions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn enumeration_counts() {
        let one: Vec<_> = enumerate_models(&params(1, 1, TypeMode::Bayes, PossMode::Partition))
            .unwrap()
            .collect();
        assert_eq!(one.len(), 1);

        let e = Enumeration::new(&params(2, 1, TypeMode::Bayes, PossMode::ArbitraryNonempty)).unwrap();
        assert_eq!(e.blocks[0].poss_count, 9);

        let e = Enumeration::new(&params(2, 2, TypeMode::RandomAdditive, PossMode::Partition)).unwrap();
        assert_eq!(e.blocks[0].type_count, 9);
        assert_eq!(e.len(), 3 * 2 * 9);

        let e = Enumeration::new(&params(2, 2, TypeMode::RandomCapacity, PossMode::Partition)).unwrap();
        assert_eq!(e.blocks[0].type_count, 81 * 81);
    }

    #[test]
    fn enumeration_is_duplicate_free_and_deterministic() {
        let p = GenParams {
            sigma_mode: SigmaMode::RandomPartition,
            ..params(3, 2, TypeMode::RandomAdditive, PossMode::Partition)
        };
        let a: Vec<_> = Enumeration::new(&p).unwrap().iter().collect();
        let b: Vec<_> = Enumeration::new(&p).unwrap().iter().collect();
        assert_eq!(a, b);
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                assert_ne!(a[i], a[j]);
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let p = GenParams {
            budget: Some(10),
            ..params(3, 4, TypeMode::RandomAdditive, PossMode::ArbitraryNonempty)
        };
        assert!(matches!(Enumeration::new(&p), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn random_is_reproducible() {
        let p = params(3, 4, TypeMode::RandomCapacity, PossMode::ArbitraryNonempty);
        assert_eq!(random_model(&p, 7).unwrap(), random_model(&p, 7).unwrap());
        let some_non_monotone = (0..50).any(|s| !random_model(&p, s).unwrap().types().all_monotone());
        assert!(some_non_monotone);
        let p = params(3, 4, TypeMode::RandomMonotoneCapacity, PossMode::ArbitraryNonempty);
        assert!((0..50).all(|s| random_model(&p, s).unwrap().types().all_monotone()));
    }

    #[test]
    fn bayes_partition_models_are_regular() {
        let p = GenParams {
            require: vec![Requirement::FullSupport],
            ..params(3, 6, TypeMode::Bayes, PossMode::Partition)
        };
        for s in 0..50 {
            assert!(axioms::regular_holds(&random_model(&p, s).unwrap()));
        }
    }

    #[test]
    fn requirements_filter_soundly() {
        let p = GenParams {
            require: vec![Requirement::Regular, Requirement::Monotone],
            ..params(2, 2, TypeMode::RandomAdditive, PossMode::ArbitraryNonempty)
        };
        let e = Enumeration::new(&p).unwrap();
        let models: Vec<_> = e.iter().collect();
        assert!(!models.is_empty());
        for m in &models {
            assert!(axioms::regular_holds(m.agent(0).model()));
        }
    }

    #[test]
    fn searches_find_nothing_on_true_claims() {
        let p = params(2, 2, TypeMode::RandomAdditive, PossMode::ArbitraryNonempty);
        let out = search_counterexample(&claim("theorem-main").unwrap(), &p, SearchMode::Exhaustive, 2).unwrap();
        let SearchOutcome::NotFound { models_checked, skipped } = out else {
            panic!("unexpected counterexample: {out:?}");
        };
        let e = Enumeration::new(&p).unwrap();
        assert_eq!(models_checked + skipped, e.iter().count() as u64);

        let p = GenParams {
            budget: Some(300),
            seed: 7,
            ..params(2, 2, TypeMode::RandomCapacity, PossMode::ArbitraryNonempty)
        };
        let out = search_counterexample(&claim("prop-2").unwrap(), &p, SearchMode::Random, 1).unwrap();
        assert_eq!(out, SearchOutcome::NotFound { models_checked: 300, skipped: 0 });
    }

    #[test]
    fn broken_verifier_is_caught_at_the_same_index_for_any_worker_count() {
        // Claims "regular" for every model; the first non-regular model wins.
        let broken = Claim {
            name: "broken",
            test: |im| Ok(outcome(!axioms::regular_holds(im.agent(0).model()))),
            report: |im| Ok(VerificationReport::iff("broken", axioms::regular_holds(im.agent(0).model()), true)),
        };
        let p = params(2, 2, TypeMode::RandomAdditive, PossMode::ArbitraryNonempty);
        let a = search_counterexample(&broken, &p, SearchMode::Exhaustive, 1).unwrap();
        let b = search_counterexample(&broken, &p, SearchMode::Exhaustive, 4).unwrap();
        assert_eq!(a, b);
        let SearchOutcome::Found { model, report, .. } = a else {
            panic!("broken verifier not caught");
        };
        assert!(!axioms::regular_holds(model.agent(0).model()));
        assert_eq!(report.verdict, Verdict::Falsified);
    }

    #[test]
    fn every_claim_has_a_unique_name() {
        let names = claim_names();
        let set: std::collections::BTreeSet<_> = names.iter().collect();
        assert_eq!(set.len(), names.len());
        assert!(claim("nonsense").is_none());
    }
}

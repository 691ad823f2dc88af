use std::collections::BTreeMap;
use std::fmt::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::beliefs::{Prior, SetFunction, TypeMapping};
use crate::error::Error;
use crate::events::{Event, SigmaAlgebra, StateSpace};
use crate::multiagent::{Agent, InteractiveModel, TypeDecl};
use crate::operators::{poss_measurability_check, EpistemicModel, PossibilityCorrespondence};
use crate::rational::Rational;
use crate::report::{CheckReport, Violation};
use crate::theorems::{bayes_type_from_poss, poss_from_type};

use super::cursor::{Cursor, Spanned};
use super::{DslError, DslResult, ErrorKind};

/// A parsed document: the model, its named events in declaration order, and
/// the source line of every section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelDoc {
    pub model: InteractiveModel,
    pub events: Vec<(String, Event)>,
    pub sections: BTreeMap<String, (usize, usize)>,
}

impl ModelDoc {
    pub fn new(model: InteractiveModel) -> ModelDoc {
        ModelDoc {
            model,
            events: Vec::new(),
            sections: BTreeMap::new(),
        }
    }

    pub fn event(&self, name: &str) -> Option<Event> {
        self.events.iter().find(|(n, _)| n == name).map(|(_, e)| *e)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Accept cells of prior mass zero.
    pub allow_null_cells: bool,
    /// An agent without a `poss:` line gets the partition into type classes.
    pub poss_from_types: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SerializeOptions {
    /// Write Bayes types as explicit additive tables.
    pub expand_types: bool,
}

type Set = Spanned<Vec<Spanned<String>>>;

#[derive(Clone, Debug)]
enum Key {
    State(Spanned<String>),
    Set(Set),
}

impl Key {
    fn pos(&self) -> (usize, usize) {
        match self {
            Key::State(s) => (s.line, s.col),
            Key::Set(s) => (s.line, s.col),
        }
    }
}

type Entries = Vec<(Key, Spanned<Rational>)>;

enum RawSigma {
    Powerset,
    Atoms(Vec<Set>),
}

struct RawAgent {
    name: Spanned<String>,
    poss: Option<Spanned<Vec<(Spanned<String>, Set)>>>,
    kind: Option<Spanned<TypeDecl>>,
    rows: Vec<(Spanned<String>, Entries)>,
}

#[derive(Default)]
struct RawDoc {
    states: Option<Spanned<Vec<Spanned<String>>>>,
    sigma: Option<Spanned<RawSigma>>,
    prior: Option<Spanned<Entries>>,
    agents: Vec<RawAgent>,
    events: Vec<(Spanned<String>, Set)>,
    end_line: usize,
}

fn duplicate(at: (usize, usize), what: &str) -> DslError {
    DslError::new(at.0, at.1, ErrorKind::Duplicate, format!("duplicate {what}"))
}

fn entries(c: &mut Cursor, sets_only: bool) -> DslResult<Entries> {
    let mut out = Vec::new();
    while !c.at_end() {
        let key = if c.peek() == Some('{') {
            Key::Set(c.set()?)
        } else if sets_only {
            return Err(c.error(ErrorKind::Syntax, "capacity entries are keyed by sets `{…}`"));
        } else {
            Key::State(c.ident()?)
        };
        c.expect('=')?;
        out.push((key, c.rational()?));
    }
    Ok(out)
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a)
}

fn parse_raw(text: &str) -> DslResult<RawDoc> {
    let mut doc = RawDoc::default();
    let mut current: Option<usize> = None;
    for (i, full) in text.lines().enumerate() {
        let line_no = i + 1;
        doc.end_line = line_no;
        let line = strip_comment(full);
        if line.trim().is_empty() {
            continue;
        }
        let indented = line.starts_with(|c: char| c.is_whitespace());
        let mut c = Cursor::new(line, line_no);
        if indented {
            let Some(a) = current else {
                return Err(c.error(ErrorKind::Syntax, "indented line outside an agent block"));
            };
            parse_agent_line(&mut c, &mut doc.agents[a])?;
            continue;
        }
        current = None;
        let head = c.ident()?;
        let at = (head.line, head.col);
        match head.v.as_str() {
            "states" => {
                c.expect(':')?;
                if doc.states.is_some() {
                    return Err(duplicate(at, "`states` section"));
                }
                let mut names = Vec::new();
                while !c.at_end() {
                    names.push(c.ident()?);
                }
                doc.states = Some(Spanned { v: names, line: at.0, col: at.1 });
            }
            "sigma" => {
                c.expect(':')?;
                if doc.sigma.is_some() {
                    return Err(duplicate(at, "`sigma` section"));
                }
                let kind = c.ident()?;
                let v = match kind.v.as_str() {
                    "powerset" => RawSigma::Powerset,
                    "atoms" => {
                        let mut sets = Vec::new();
                        while !c.at_end() {
                            sets.push(c.set()?);
                        }
                        RawSigma::Atoms(sets)
                    }
                    other => {
                        return Err(kind.err(
                            ErrorKind::Syntax,
                            format!("expected `powerset` or `atoms`, found `{other}`"),
                        ))
                    }
                };
                doc.sigma = Some(Spanned { v, line: at.0, col: at.1 });
            }
            "prior" => {
                c.expect(':')?;
                if doc.prior.is_some() {
                    return Err(duplicate(at, "`prior` section"));
                }
                let v = entries(&mut c, false)?;
                doc.prior = Some(Spanned { v, line: at.0, col: at.1 });
            }
            "agent" => {
                let name = c.ident()?;
                c.expect(':')?;
                if doc.agents.iter().any(|a| a.name.v == name.v) {
                    return Err(duplicate((name.line, name.col), &format!("agent `{}`", name.v)));
                }
                doc.agents.push(RawAgent {
                    name,
                    poss: None,
                    kind: None,
                    rows: Vec::new(),
                });
                current = Some(doc.agents.len() - 1);
            }
            "event" => {
                let name = c.ident()?;
                c.expect('=')?;
                let set = c.set()?;
                if doc.events.iter().any(|(n, _)| n.v == name.v) {
                    return Err(duplicate((name.line, name.col), &format!("event `{}`", name.v)));
                }
                doc.events.push((name, set));
            }
            other => {
                return Err(head.err(ErrorKind::Syntax, format!("unknown section `{other}`")));
            }
        }
        c.expect_end()?;
    }
    Ok(doc)
}

fn parse_agent_line(c: &mut Cursor, agent: &mut RawAgent) -> DslResult<()> {
    let head = c.ident()?;
    let at = (head.line, head.col);
    c.expect(':')?;
    if agent.kind.is_none() || head.v == "poss" || head.v == "type" {
        match head.v.as_str() {
            "poss" => {
                if agent.poss.is_some() {
                    return Err(duplicate(at, "`poss` line"));
                }
                let mut cells = Vec::new();
                while !c.at_end() {
                    let s = c.ident()?;
                    if !c.eat_str("->") {
                        return Err(c.error(ErrorKind::Syntax, "expected `->`"));
                    }
                    cells.push((s, c.set()?));
                    if !c.eat(';') {
                        break;
                    }
                }
                agent.poss = Some(Spanned { v: cells, line: at.0, col: at.1 });
            }
            "type" => {
                if agent.kind.is_some() {
                    return Err(duplicate(at, "`type` line"));
                }
                let kind = c.ident()?;
                let v = match kind.v.as_str() {
                    "bayes" => TypeDecl::Bayes,
                    "additive" => TypeDecl::Additive,
                    "capacity" => TypeDecl::Capacity,
                    other => {
                        return Err(kind.err(
                            ErrorKind::Syntax,
                            format!("expected `bayes`, `additive` or `capacity`, found `{other}`"),
                        ))
                    }
                };
                agent.kind = Some(Spanned { v, line: kind.line, col: kind.col });
            }
            other => {
                return Err(head.err(
                    ErrorKind::Syntax,
                    format!("expected `poss:` or `type:` in agent block, found `{other}`"),
                ))
            }
        }
        return c.expect_end();
    }
    let kind = agent.kind.as_ref().expect("type declared").v;
    if kind == TypeDecl::Bayes {
        return Err(head.err(ErrorKind::Syntax, "bayes types take no table rows"));
    }
    if agent.rows.iter().any(|(s, _)| s.v == head.v) {
        return Err(duplicate(at, &format!("type row for `{}`", head.v)));
    }
    let row = entries(c, kind == TypeDecl::Capacity)?;
    agent.rows.push((head, row));
    Ok(())
}

struct Resolver {
    sigma: Arc<SigmaAlgebra>,
}

fn invariant(at: (usize, usize), message: impl Into<String>, report: Option<CheckReport>) -> DslError {
    DslError {
        report,
        ..DslError::new(at.0, at.1, ErrorKind::Invariant, message)
    }
}

fn model_error(at: (usize, usize), e: Error) -> DslError {
    match e {
        Error::Invariant(r) => invariant(at, format!("{} fails", r.name), Some(*r)),
        other => invariant(at, other.to_string(), None),
    }
}

impl Resolver {
    fn space(&self) -> &StateSpace {
        self.sigma.space()
    }

    fn state(&self, s: &Spanned<String>) -> DslResult<usize> {
        self.space()
            .index_of(&s.v)
            .ok_or_else(|| s.err(ErrorKind::UnknownState, format!("unknown state `{}`", s.v)))
    }

    fn raw_set(&self, set: &Set) -> DslResult<Event> {
        let mut e = Event::EMPTY;
        for s in &set.v {
            let i = self.state(s)?;
            if e.contains(i) {
                return Err(duplicate((s.line, s.col), &format!("state `{}` in set", s.v)));
            }
            e = e.union(Event::singleton(i));
        }
        Ok(e)
    }

    /// A set that must be an event of the algebra.
    fn event(&self, set: &Set, what: &str) -> DslResult<Event> {
        let e = self.raw_set(set)?;
        if !self.sigma.is_measurable(e) {
            return Err(invariant(
                (set.line, set.col),
                format!("{what} {} is not an event of the sigma-algebra", self.sigma.format_event(e)),
                None,
            ));
        }
        Ok(e)
    }

    /// Per-atom weights from state or atom keys; unlisted atoms get zero.
    fn weights(&self, entries: &Entries, what: &str) -> DslResult<Vec<Rational>> {
        let mut w = vec![None; self.sigma.n_atoms()];
        for (key, value) in entries {
            let atom = match key {
                Key::State(s) => self.sigma.atom_index_of(self.state(s)?),
                Key::Set(set) => {
                    let e = self.raw_set(set)?;
                    self.sigma.atoms().iter().position(|&a| a == e).ok_or_else(|| {
                        invariant(
                            key.pos(),
                            format!("{} is not an atom of the sigma-algebra", self.sigma.format_event(e)),
                            None,
                        )
                    })?
                }
            };
            if w[atom].is_some() {
                return Err(duplicate(key.pos(), &format!("{what} entry for atom {}", self.sigma.format_event(self.sigma.atoms()[atom]))));
            }
            if !value.v.is_unit_interval() {
                return Err(value.err(
                    ErrorKind::RationalOutOfRange,
                    format!("{what} value {} lies outside [0,1]", value.v),
                ));
            }
            w[atom] = Some(value.v);
        }
        Ok(w.into_iter().map(|x| x.unwrap_or(Rational::ZERO)).collect())
    }
}

fn checked_sum(values: &[Rational]) -> Option<Rational> {
    values.iter().try_fold(Rational::ZERO, |acc, v| acc.checked_add(v))
}

fn resolve(raw: RawDoc, opts: ParseOptions) -> DslResult<ModelDoc> {
    let mut sections = BTreeMap::new();
    let states = raw
        .states
        .ok_or_else(|| DslError::new(1, 1, ErrorKind::Missing, "missing `states:` section"))?;
    sections.insert("states".to_string(), (states.line, states.col));
    let space = StateSpace::new(states.v.iter().map(|s| s.v.clone())).map_err(|e| {
        let at = match &e {
            Error::DuplicateState(name) => states
                .v
                .iter()
                .filter(|s| &s.v == name)
                .nth(1)
                .map_or((states.line, states.col), |s| (s.line, s.col)),
            _ => (states.line, states.col),
        };
        let kind = if matches!(e, Error::DuplicateState(_)) {
            ErrorKind::Duplicate
        } else {
            ErrorKind::Syntax
        };
        DslError::new(at.0, at.1, kind, e.to_string())
    })?;
    let sigma = match &raw.sigma {
        None | Some(Spanned { v: RawSigma::Powerset, .. }) => SigmaAlgebra::powerset(space),
        Some(Spanned { v: RawSigma::Atoms(sets), line, col }) => {
            let probe = Resolver {
                sigma: Arc::new(SigmaAlgebra::powerset(space.clone())),
            };
            let blocks = sets.iter().map(|s| probe.raw_set(s)).collect::<DslResult<Vec<_>>>()?;
            SigmaAlgebra::from_atoms(space, blocks).map_err(|e| invariant((*line, *col), e.to_string(), None))?
        }
    };
    if let Some(s) = &raw.sigma {
        sections.insert("sigma".to_string(), (s.line, s.col));
    }
    sigma
        .check_cap(crate::events::atom_cap())
        .map_err(|e| invariant(raw.sigma.as_ref().map_or((1, 1), |s| (s.line, s.col)), e.to_string(), None))?;
    let r = Resolver { sigma: Arc::new(sigma) };

    let prior_raw = raw
        .prior
        .ok_or_else(|| DslError::new(raw.end_line.max(1), 1, ErrorKind::Missing, "missing `prior:` section"))?;
    let at = (prior_raw.line, prior_raw.col);
    sections.insert("prior".to_string(), at);
    let weights = r.weights(&prior_raw.v, "prior")?;
    let total = checked_sum(&weights)
        .ok_or_else(|| DslError::new(at.0, at.1, ErrorKind::Syntax, "prior weights overflow exact arithmetic"))?;
    if !total.is_one() {
        return Err(DslError::new(
            at.0,
            at.1,
            ErrorKind::PriorNotNormalized,
            format!("prior weights sum to {total}, expected exactly 1"),
        ));
    }
    let prior = Prior::new(r.sigma.clone(), weights).map_err(|e| model_error(at, e))?;

    let mut agents = Vec::new();
    for a in &raw.agents {
        let at = (a.name.line, a.name.col);
        sections.insert(format!("agent {}", a.name.v), at);
        agents.push(resolve_agent(&r, &prior, a, opts)?);
    }
    let model = InteractiveModel::new(agents).map_err(|e| invariant((raw.end_line.max(1), 1), e.to_string(), None))?;

    let mut events = Vec::new();
    for (name, set) in &raw.events {
        sections.insert(format!("event {}", name.v), (name.line, name.col));
        events.push((name.v.clone(), r.event(set, "event")?));
    }
    Ok(ModelDoc {
        model,
        events,
        sections,
    })
}

fn resolve_agent(r: &Resolver, prior: &Prior, a: &RawAgent, opts: ParseOptions) -> DslResult<Agent> {
    let at = (a.name.line, a.name.col);
    let kind = a
        .kind
        .as_ref()
        .ok_or_else(|| DslError::new(at.0, at.1, ErrorKind::Missing, format!("agent `{}` has no `type:` line", a.name.v)))?;
    let (poss, types) = match &a.poss {
        Some(raw) => {
            let poss = resolve_poss(r, raw)?;
            let types = resolve_types(r, prior, a, kind, Some(&poss))?;
            (poss, types)
        }
        None if opts.poss_from_types && kind.v != TypeDecl::Bayes => {
            let types = resolve_types(r, prior, a, kind, None)?;
            let poss = poss_from_type(&types).map_err(|e| model_error((kind.line, kind.col), e))?;
            (poss, types)
        }
        None => {
            return Err(DslError::new(
                at.0,
                at.1,
                ErrorKind::Missing,
                format!("agent `{}` has no `poss:` line", a.name.v),
            ))
        }
    };
    let null = (0..r.sigma.n_states()).any(|s| prior.mu(poss.cell(s)).is_zero());
    let model = EpistemicModel::build(prior.clone(), poss, types, null && opts.allow_null_cells)
        .map_err(|e| model_error(at, e))?;
    Ok(Agent::new(a.name.v.clone(), model, kind.v))
}

fn resolve_poss(r: &Resolver, poss_raw: &Spanned<Vec<(Spanned<String>, Set)>>) -> DslResult<PossibilityCorrespondence> {
    let n = r.sigma.n_states();
    let at = (poss_raw.line, poss_raw.col);
    let mut cells: Vec<Option<Event>> = vec![None; n];
    for (s, set) in &poss_raw.v {
        let i = r.state(s)?;
        if cells[i].is_some() {
            return Err(duplicate((s.line, s.col), &format!("cell for `{}`", s.v)));
        }
        let cell = r.raw_set(set)?;
        if !r.sigma.is_measurable(cell) {
            let report = CheckReport::from_violations(
                "poss-in-sigma",
                "states",
                [Violation::on(cell, i).note("cell is not an event of the sigma-algebra")],
                r.space(),
                &[],
            );
            return Err(invariant(
                (set.line, set.col),
                format!("cell {} of `{}` is not an event of the sigma-algebra", r.sigma.format_event(cell), s.v),
                Some(report),
            ));
        }
        cells[i] = Some(cell);
    }
    let cells = cells
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            c.ok_or_else(|| {
                DslError::new(
                    poss_raw.line,
                    poss_raw.col,
                    ErrorKind::Missing,
                    format!("no cell for state `{}`", r.space().name(i)),
                )
            })
        })
        .collect::<DslResult<Vec<_>>>()?;
    let poss = PossibilityCorrespondence::new(&r.sigma, cells).map_err(|e| model_error(at, e))?;
    let measurability = poss_measurability_check(&r.sigma, &poss);
    if !measurability.passed {
        return Err(invariant(
            (poss_raw.line, poss_raw.col),
            "the correspondence does not map events to events",
            Some(measurability),
        ));
    }
    Ok(poss)
}

fn resolve_types(
    r: &Resolver,
    prior: &Prior,
    a: &RawAgent,
    kind: &Spanned<TypeDecl>,
    poss: Option<&PossibilityCorrespondence>,
) -> DslResult<TypeMapping> {
    let n = r.sigma.n_states();
    let kat = (kind.line, kind.col);
    let row_of = |i: usize| a.rows.iter().find(|(s, _)| s.v == r.space().name(i));
    for (s, _) in &a.rows {
        r.state(s)?;
    }
    let missing_row = |i: usize| {
        DslError::new(
            kat.0,
            kat.1,
            ErrorKind::Missing,
            format!("no type row for state `{}`", r.space().name(i)),
        )
    };
    let types = match kind.v {
        TypeDecl::Bayes => {
            bayes_type_from_poss(prior, poss.expect("bayes types need poss")).map_err(|e| model_error(kat, e))?
        }
        TypeDecl::Additive => {
            let mut rows = Vec::with_capacity(n);
            for i in 0..n {
                let (_, entries) = row_of(i).ok_or_else(|| missing_row(i))?;
                let w = r.weights(entries, "type")?;
                let (s, _) = row_of(i).expect("row exists");
                checked_sum(&w).filter(|t| t.is_unit_interval()).ok_or_else(|| {
                    s.err(ErrorKind::RationalOutOfRange, "type weights must sum to at most 1")
                })?;
                rows.push(w);
            }
            TypeMapping::from_atom_weights(r.sigma.clone(), &rows).map_err(|e| model_error(kat, e))?
        }
        TypeDecl::Capacity => {
            let mut fns = Vec::with_capacity(n);
            for i in 0..n {
                let (s, entries) = row_of(i).ok_or_else(|| missing_row(i))?;
                let mut table: Vec<Option<Rational>> = vec![None; r.sigma.n_events()];
                for (key, value) in entries {
                    let Key::Set(set) = key else { unreachable!("capacity keys are sets") };
                    let e = r.event(set, "capacity key")?;
                    let m = r.sigma.mask_of(e);
                    if table[m].is_some() {
                        return Err(duplicate(key.pos(), &format!("capacity entry for {}", r.sigma.format_event(e))));
                    }
                    if !value.v.is_unit_interval() {
                        return Err(value.err(
                            ErrorKind::RationalOutOfRange,
                            format!("capacity value {} lies outside [0,1]", value.v),
                        ));
                    }
                    table[m] = Some(value.v);
                }
                let table = table
                    .into_iter()
                    .enumerate()
                    .map(|(m, v)| {
                        v.ok_or_else(|| {
                            s.err(
                                ErrorKind::IncompleteCapacity,
                                format!(
                                    "capacity row of `{}` has no entry for event {}",
                                    s.v,
                                    r.sigma.format_event(r.sigma.event_of_mask(m))
                                ),
                            )
                        })
                    })
                    .collect::<DslResult<Vec<_>>>()?;
                fns.push(SetFunction::from_table(table).map_err(|e| model_error((s.line, s.col), e))?);
            }
            TypeMapping::new(r.sigma.clone(), fns).map_err(|e| model_error(kat, e))?
        }
    };
    Ok(types)
}

/// Parses a `.emod` document. Arithmetic that would overflow the exact
/// rationals is reported as an error at the document start.
pub fn parse_model(text: &str, opts: ParseOptions) -> DslResult<ModelDoc> {
    let raw = parse_raw(text)?;
    match catch_unwind(AssertUnwindSafe(|| resolve(raw, opts))) {
        Ok(r) => r,
        Err(_) => Err(DslError::new(
            1,
            1,
            ErrorKind::Invariant,
            "values exceed the exact rational range",
        )),
    }
}

fn set_text(space: &StateSpace, e: Event) -> String {
    format!("{{{}}}", space.event_names(e).join(" "))
}

fn key_text(sigma: &SigmaAlgebra, atom: usize) -> String {
    let a = sigma.atoms()[atom];
    if a.len() == 1 {
        sigma.space().name(a.first().expect("nonempty atom")).to_string()
    } else {
        set_text(sigma.space(), a)
    }
}

fn weights_text(sigma: &SigmaAlgebra, w: &[Rational]) -> String {
    w.iter()
        .enumerate()
        .map(|(j, x)| format!("{}={}", key_text(sigma, j), x))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Canonical text: declaration order, reduced rationals, single spaces.
pub fn serialize_doc(doc: &ModelDoc, opts: SerializeOptions) -> String {
    let im = &doc.model;
    let sigma = im.sigma();
    let space = sigma.space();
    let mut out = String::new();
    let _ = writeln!(out, "states: {}", space.names().join(" "));
    if sigma.is_powerset() {
        out.push_str("sigma: powerset\n");
    } else {
        let atoms: Vec<String> = sigma.atoms().iter().map(|&a| set_text(space, a)).collect();
        let _ = writeln!(out, "sigma: atoms {}", atoms.join(" "));
    }
    let _ = writeln!(out, "prior: {}", weights_text(sigma, im.prior().weights()));
    for a in im.agents() {
        let m = a.model();
        let _ = writeln!(out, "agent {}:", a.name());
        let cells: Vec<String> = (0..m.n_states())
            .map(|s| format!("{} -> {}", space.name(s), set_text(space, m.poss().cell(s))))
            .collect();
        let _ = writeln!(out, "  poss: {}", cells.join("; "));
        let decl = match a.decl() {
            TypeDecl::Bayes if opts.expand_types => TypeDecl::Additive,
            d => d,
        };
        match decl {
            TypeDecl::Bayes => out.push_str("  type: bayes\n"),
            TypeDecl::Additive => {
                out.push_str("  type: additive\n");
                for s in 0..m.n_states() {
                    let w = m.types().state_fn(s).atom_weights();
                    let _ = writeln!(out, "  {}: {}", space.name(s), weights_text(sigma, &w));
                }
            }
            TypeDecl::Capacity => {
                out.push_str("  type: capacity\n");
                for s in 0..m.n_states() {
                    let f = m.types().state_fn(s);
                    let entries: Vec<String> = (0..sigma.n_events())
                        .map(|mask| format!("{}={}", set_text(space, sigma.event_of_mask(mask)), f.at(mask)))
                        .collect();
                    let _ = writeln!(out, "  {}: {}", space.name(s), entries.join(" "));
                }
            }
        }
    }
    for (name, e) in &doc.events {
        let _ = writeln!(out, "event {} = {}", name, set_text(space, *e));
    }
    out
}

pub fn serialize_model(im: &InteractiveModel, opts: SerializeOptions) -> String {
    serialize_doc(&ModelDoc::new(im.clone()), opts)
}

/// JSON mirror of the document structure.
pub fn model_to_json(doc: &ModelDoc) -> Value {
    let im = &doc.model;
    let sigma = im.sigma();
    let space = sigma.space();
    let names = |e: Event| Value::from(space.event_names(e));
    let keyed = |w: &[Rational]| -> Value {
        Value::Array(
            w.iter()
                .enumerate()
                .map(|(j, x)| json!({ "atom": names(sigma.atoms()[j]), "weight": x.to_string() }))
                .collect(),
        )
    };
    let agents: Vec<Value> = im
        .agents()
        .iter()
        .map(|a| {
            let m = a.model();
            let poss: Vec<Value> = (0..m.n_states())
                .map(|s| json!({ "state": space.name(s), "cell": names(m.poss().cell(s)) }))
                .collect();
            let rows: Vec<Value> = (0..m.n_states())
                .map(|s| {
                    let f = m.types().state_fn(s);
                    let table: Vec<Value> = (0..sigma.n_events())
                        .map(|mask| json!({ "event": names(sigma.event_of_mask(mask)), "value": f.at(mask).to_string() }))
                        .collect();
                    json!({ "state": space.name(s), "values": table })
                })
                .collect();
            json!({ "name": a.name(), "poss": poss, "type": a.decl(), "types": rows })
        })
        .collect();
    let sigma_json = if sigma.is_powerset() {
        json!("powerset")
    } else {
        json!({ "atoms": sigma.atoms().iter().map(|&a| names(a)).collect::<Vec<_>>() })
    };
    let events: Vec<Value> = doc
        .events
        .iter()
        .map(|(n, e)| json!({ "name": n, "states": names(*e) }))
        .collect();
    json!({
        "states": space.names(),
        "sigma": sigma_json,
        "prior": keyed(im.prior().weights()),
        "agents": agents,
        "events": events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    pub const W1: &str = "states: 1 2 3
sigma: powerset
prior: 1=1/2 2=1/4 3=1/4
agent alice:
  poss: 1 -> {1}; 2 -> {2 3}; 3 -> {2 3}
  type: bayes
";

    fn parse(text: &str) -> DslResult<ModelDoc> {
        parse_model(text, ParseOptions::default())
    }

    #[test]
    fn w1_parses_and_round_trips() {
        let doc = parse(W1).unwrap();
        let m = doc.model.agent(0).model();
        assert_eq!(m.types().t(1, Event::singleton(1)), Rational::new(1, 2));
        assert_eq!(m, &fixtures::w1());
        assert_eq!(serialize_doc(&doc, SerializeOptions::default()), W1);
    }

    #[test]
    fn expanded_types_match_bayes() {
        let doc = parse(W1).unwrap();
        let text = serialize_doc(&doc, SerializeOptions { expand_types: true });
        assert!(text.contains("type: additive"));
        assert!(text.contains("  2: 1=0 2=1/2 3=1/2"));
        let again = parse(&text).unwrap();
        assert_eq!(again.model.agent(0).model().types(), doc.model.agent(0).model().types());
    }

    #[test]
    fn prior_must_sum_to_one() {
        let e = parse("states: s1 s2\nprior: s1=1/2 s2=1/3\nagent i:\n  poss: s1 -> {s1}; s2 -> {s2}\n  type: bayes\n")
            .unwrap_err();
        assert_eq!(e.kind, ErrorKind::PriorNotNormalized);
        assert_eq!(e.line, 2);
        assert!(e.message.contains("5/6"));
    }

    #[test]
    fn capacity_tables_must_be_complete() {
        let text = "states: s1 s2
prior: s1=1/2 s2=1/2
agent i:
  poss: s1 -> {s1 s2}; s2 -> {s1 s2}
  type: capacity
  s1: {}=0 {s1}=0 {s2}=0 {s1 s2}=1
  s2: {}=0 {s1}=0 {s2}=1
";
        let e = parse(text).unwrap_err();
        assert_eq!(e.kind, ErrorKind::IncompleteCapacity);
        assert_eq!(e.line, 7);
        assert!(e.message.contains("{s1,s2}"), "{}", e.message);
    }

    #[test]
    fn located_errors() {
        let e = parse("states: a b\nprior: a=1 c=0\n").unwrap_err();
        assert_eq!((e.kind, e.line, e.col), (ErrorKind::UnknownState, 2, 12));
        let e = parse("states: a\nstates: a\n").unwrap_err();
        assert_eq!((e.kind, e.line), (ErrorKind::Duplicate, 2));
        let e = parse("states: a\nprior: a=0.5\n").unwrap_err();
        assert_eq!((e.kind, e.line, e.col), (ErrorKind::Syntax, 2, 10));
        let e = parse(
            "states: a b\nsigma: atoms {a b}\nprior: {a b}=1\nagent i:\n  poss: a -> {a}; b -> {a b}\n  type: bayes\n",
        )
        .unwrap_err();
        assert!(e.is_invariant());
        assert_eq!((e.line, e.col), (5, 14));
        assert!(!e.report.unwrap().passed);
    }

    #[test]
    fn zero_agents_are_rejected() {
        let e = parse("states: a\nprior: a=1\n").unwrap_err();
        assert!(e.is_invariant());
    }

    #[test]
    fn null_cells_need_the_option() {
        let text = serialize_model(&fixtures::all_interactive()[4].1, SerializeOptions::default());
        assert!(parse(&text).unwrap_err().is_invariant());
        let doc = parse_model(&text, ParseOptions { allow_null_cells: true, ..Default::default() }).unwrap();
        assert_eq!(doc.model.agent(0).model(), &fixtures::w2_narrow_b());
    }

    #[test]
    fn every_fixture_round_trips() {
        let opts = ParseOptions { allow_null_cells: true, ..Default::default() };
        for (name, im) in fixtures::all_interactive() {
            let text = serialize_model(&im, SerializeOptions::default());
            let doc = parse_model(&text, opts).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
            assert_eq!(doc.model, im, "{name}");
            assert_eq!(serialize_doc(&doc, SerializeOptions::default()), text, "{name}");
        }
    }

    #[test]
    fn non_powerset_round_trip() {
        let text = "states: a b c
sigma: atoms {a b} {c}
prior: {a b}=1/3 c=2/3
agent i:
  poss: a -> {a b}; b -> {a b}; c -> {a b c}
  type: additive
  a: {a b}=1 c=0
  b: {a b}=1 c=0
  c: {a b}=1/3 c=2/3
event E = {a b}
";
        let doc = parse(text).unwrap();
        assert_eq!(serialize_doc(&doc, SerializeOptions::default()), text);
        assert_eq!(doc.event("E"), Some(Event::from_states([0, 1])));
        let j = model_to_json(&doc);
        assert_eq!(j["sigma"]["atoms"][0], json!(["a", "b"]));
    }

    #[test]
    fn types_only_documents() {
        let text = "states: a b c
prior: a=1/2 b=1/4 c=1/4
agent i:
  type: additive
  a: a=1
  b: b=1/2 c=1/2
  c: b=1/2 c=1/2
";
        assert_eq!(parse(text).unwrap_err().kind, ErrorKind::Missing);
        let doc = parse_model(text, ParseOptions { poss_from_types: true, ..Default::default() }).unwrap();
        let m = doc.model.agent(0).model();
        assert_eq!(m.poss().cells(), &[Event::singleton(0), Event::from_states([1, 2]), Event::from_states([1, 2])]);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = format!("# header\n\n{}\n# trailer", W1.replace("sigma: powerset", "sigma: powerset # all subsets"));
        let (a, b) = (parse(&text).unwrap(), parse(W1).unwrap());
        assert_eq!((a.model, a.events), (b.model, b.events));
        assert_eq!(parse(&text).unwrap().sections["prior"], (5, 1));
    }
}

//! The `emck` command line. [`run_captured`] returns the exit code and the
//! exact stdout text, so tests can drive it without a subprocess.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::axioms::{run_check, CHECK_NAMES};
use crate::dslio::{
    eval_expr, model_to_json, parse_expr, parse_model, serialize_doc, serialize_model, DslError, ModelDoc,
    ParseOptions, SerializeOptions,
};
use crate::error::Error;
use crate::modelgen::{
    claim, search_counterexample, GenParams, PossMode, Requirement, SearchMode, SearchOutcome, SigmaMode, TypeMode,
};
use crate::multiagent::{self, Agent, InteractiveModel, TypeDecl, DEFAULT_AGREEMENT_BUDGET};
use crate::operators::EpistemicModel;
use crate::report::{Verdict, VerificationReport};
use crate::theorems;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_HYPOTHESIS: i32 = 4;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "emck", version, about = "Exact checker for finite epistemic models")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct Input {
    file: PathBuf,
    /// Accept possibility cells of prior mass zero.
    #[arg(long)]
    allow_null_cells: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Parse a model and run the structural checks.
    Validate {
        #[command(flatten)]
        input: Input,
    },
    /// Run named axiom checkers.
    Check {
        #[command(flatten)]
        input: Input,
        /// Comma-separated checker names, or `all`.
        #[arg(long, default_value = "all")]
        axioms: String,
        /// Agent name, or `all`.
        #[arg(long, default_value = "all")]
        agent: String,
    },
    /// Verify a claim on the model.
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        claim: String,
        /// Evaluate the conclusion even when hypotheses fail.
        #[arg(long)]
        diagnostic: bool,
        /// Second model for `cor-unique`.
        #[arg(long)]
        against: Option<PathBuf>,
        /// Enumeration budget for `prop-3`.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Evaluate an operator expression.
    Eval {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        expr: String,
        /// Also report membership of this state.
        #[arg(long)]
        at: Option<String>,
    },
    /// Complete a model: derive types from poss or poss from types.
    Canonical {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum)]
        mode: CanonicalMode,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write Bayes types as explicit additive tables.
        #[arg(long)]
        expand_types: bool,
    },
    /// Search generated models for a counterexample.
    Search(SearchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CanonicalMode {
    BayesFromPoss,
    PossFromType,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    claim: String,
    /// Largest state count; every count from `--min-states` up is covered.
    #[arg(long, default_value_t = 3)]
    states: usize,
    #[arg(long, default_value_t = 1)]
    min_states: usize,
    /// Defaults to 2 for interactive claims, 1 otherwise.
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long, default_value_t = 2)]
    denominator: u32,
    #[arg(long, default_value = "exhaustive")]
    mode: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exhaustive: largest admissible grid. Random: number of models.
    #[arg(long)]
    budget: Option<u64>,
    /// Defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    sigma_mode: Option<String>,
    /// Defaults depend on the claim (capacities for prop-1 and prop-2).
    #[arg(long)]
    type_mode: Option<String>,
    #[arg(long)]
    poss_mode: Option<String>,
    /// Comma-separated rejection filters.
    #[arg(long)]
    require: Option<String>,
    /// Write a found counterexample here.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A command failure: exit code plus the text and JSON renderings.
struct Fail {
    code: i32,
    text: String,
    json: Value,
}

impl Fail {
    fn usage(msg: impl Into<String>) -> Fail {
        let msg = msg.into();
        Fail {
            code: EXIT_USAGE,
            text: format!("usage error: {msg}\n"),
            json: json!({ "status": "usage-error", "message": msg }),
        }
    }

    fn dsl(path: &Path, e: DslError) -> Fail {
        let code = if e.is_invariant() { EXIT_INVARIANT } else { EXIT_PARSE };
        let status = if e.is_invariant() { "invariant-error" } else { "parse-error" };
        let mut text = format!("error: {}:{e}\n", path.display());
        if let Some(r) = &e.report {
            r.render_text(1, &mut text);
        }
        Fail {
            code,
            text,
            json: json!({ "status": status, "file": path.display().to_string(), "error": e }),
        }
    }

    fn model(e: Error) -> Fail {
        let code = match e {
            Error::ResourceLimit(_) | Error::InvalidParameter(_) | Error::TooManyStates { .. } => EXIT_USAGE,
            _ => EXIT_INVARIANT,
        };
        let mut text = format!("error: {e}\n");
        let mut j = json!({ "status": if code == EXIT_USAGE { "usage-error" } else { "invariant-error" }, "message": e.to_string() });
        if let Error::Invariant(r) = &e {
            r.render_text(1, &mut text);
            j["report"] = serde_json::to_value(r).expect("reports serialize");
        }
        Fail { code, text, json: j }
    }
}

type CmdResult = Result<(i32, String, Value), Fail>;

fn load(input: &Input, opts: ParseOptions) -> Result<ModelDoc, Fail> {
    let text = std::fs::read_to_string(&input.file)
        .map_err(|e| Fail::usage(format!("cannot read {}: {e}", input.file.display())))?;
    let opts = ParseOptions {
        allow_null_cells: input.allow_null_cells || opts.allow_null_cells,
        ..opts
    };
    parse_model(&text, opts).map_err(|e| Fail::dsl(&input.file, e))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code and stdout text.
pub fn run_captured<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            return (code, e.render().to_string());
        }
    };
    let result = match &cli.cmd {
        Cmd::Validate { input } => cmd_validate(input),
        Cmd::Check { input, axioms, agent } => cmd_check(input, axioms, agent),
        Cmd::Verify {
            input,
            claim,
            diagnostic,
            against,
            budget,
        } => cmd_verify(input, claim, *diagnostic, against.as_deref(), *budget),
        Cmd::Eval { input, expr, at } => cmd_eval(input, expr, at.as_deref()),
        Cmd::Canonical {
            input,
            mode,
            out,
            expand_types,
        } => cmd_canonical(input, *mode, out.as_deref(), *expand_types),
        Cmd::Search(args) => cmd_search(args),
    };
    match (result, cli.format) {
        (Ok((code, text, _)), Format::Text) => (code, text),
        (Ok((code, _, j)), Format::Json) => (code, pretty(&j)),
        (Err(f), Format::Text) => (f.code, f.text),
        (Err(f), Format::Json) => (f.code, pretty(&f.json)),
    }
}

/// Runs the CLI, printing to stdout.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let (code, out) = run_captured(args);
    if code == EXIT_USAGE && !out.starts_with('{') {
        eprint!("{out}");
    } else {
        print!("{out}");
    }
    code
}

fn cmd_validate(input: &Input) -> CmdResult {
    let doc = load(input, ParseOptions::default())?;
    let im = &doc.model;
    let mut checks = Vec::new();
    for a in im.agents() {
        for name in ["poss-measurability", "type-measurability"] {
            checks.push((a.name().to_string(), run_check(name, a.model()).expect("known check")));
        }
    }
    let passed = checks.iter().all(|(_, c)| c.passed);
    let mut text = format!(
        "{}: {} states, {} events, {} agent{} ({})\n",
        if passed { "valid" } else { "INVALID" },
        im.n_states(),
        im.sigma().n_events(),
        im.n_agents(),
        if im.n_agents() == 1 { "" } else { "s" },
        im.agent_names().join(", ")
    );
    for (agent, c) in &checks {
        let _ = write!(text, "  {agent}: ");
        c.render_text(0, &mut text);
    }
    let j = json!({
        "status": if passed { "valid" } else { "invariant-error" },
        "model": model_to_json(&doc),
        "checks": checks.iter().map(|(a, c)| json!({ "agent": a, "report": c })).collect::<Vec<_>>(),
    });
    Ok((if passed { EXIT_OK } else { EXIT_INVARIANT }, text, j))
}

fn select_agents<'a>(im: &'a InteractiveModel, agent: &str) -> Result<Vec<&'a Agent>, Fail> {
    if agent == "all" {
        return Ok(im.agents().iter().collect());
    }
    im.agent_index(agent)
        .map(|i| vec![im.agent(i)])
        .ok_or_else(|| Fail::usage(format!("unknown agent `{agent}`; known: {}", im.agent_names().join(", "))))
}

fn cmd_check(input: &Input, axioms: &str, agent: &str) -> CmdResult {
    let names: Vec<&str> = if axioms == "all" {
        CHECK_NAMES.to_vec()
    } else {
        axioms.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
    };
    if names.is_empty() {
        return Err(Fail::usage("no axioms named"));
    }
    if let Some(bad) = names.iter().find(|n| !CHECK_NAMES.contains(n)) {
        return Err(Fail::usage(format!("unknown axiom `{bad}`; known: {}", CHECK_NAMES.join(", "))));
    }
    let doc = load(input, ParseOptions::default())?;
    let agents = select_agents(&doc.model, agent)?;
    let mut text = String::new();
    let mut all_passed = true;
    let mut out = Vec::new();
    for a in agents {
        let _ = writeln!(text, "agent {}", a.name());
        let mut reports = Vec::new();
        for n in &names {
            let r = run_check(n, a.model()).expect("validated name");
            all_passed &= r.passed;
            r.render_text(1, &mut text);
            reports.push(r);
        }
        out.push(json!({ "agent": a.name(), "checks": reports }));
    }
    let _ = writeln!(text, "{}", if all_passed { "all checks pass" } else { "some checks FAIL" });
    let j = json!({ "passed": all_passed, "agents": out });
    Ok((if all_passed { EXIT_OK } else { EXIT_FAILED }, text, j))
}

pub const VERIFY_CLAIMS: &[&str] = &[
    "theorem-main",
    "theorem-main-product",
    "prop-1",
    "prop-2",
    "prop-3",
    "cor-unique",
    "cor-main",
    "cor-main-discrete",
    "cor-unaware",
    "cor-regular",
    "cor-ta",
    "cor-ta-types",
    "cor-ck",
    "cor-ta-common",
];

fn unmet(claim: &str, e: Error) -> VerificationReport {
    let mut r = VerificationReport::hypothesis_not_met(claim, Vec::new());
    r.notes.push(e.to_string());
    r
}

fn single_agent(claim: &str, m: &EpistemicModel, diagnostic: bool) -> Result<VerificationReport, Error> {
    Ok(match claim {
        "theorem-main" => match theorems::verify_theorem_main(m) {
            Err(e @ Error::AssumptionViolated(_)) => unmet(claim, e),
            r => r?,
        },
        "theorem-main-product" => theorems::verify_theorem_main_product(m),
        "prop-1" => theorems::verify_prop1(m, diagnostic),
        "prop-2" => theorems::verify_prop2(m),
        "cor-main" => theorems::verify_cor_main(m, diagnostic),
        "cor-main-discrete" => theorems::verify_cor_main_discrete(m, diagnostic),
        "cor-unaware" => theorems::verify_cor_unaware(m, diagnostic),
        "cor-regular" => theorems::verify_cor_regular(m),
        "cor-ta" => theorems::verify_cor_ta(m, diagnostic),
        "cor-ta-types" => theorems::verify_cor_ta_types(m, diagnostic),
        _ => unreachable!("dispatched by caller"),
    })
}

/// Verifies `claim` on the model: one report per agent for single-agent
/// claims, one unlabelled report for interactive ones. `cor-unique` needs a
/// second model and is not accepted here.
pub fn verify_claim(
    im: &InteractiveModel,
    claim: &str,
    diagnostic: bool,
    budget: u64,
) -> Result<Vec<(Option<String>, VerificationReport)>, Error> {
    Ok(match claim {
        "prop-3" => vec![(None, multiagent::verify_prop3(im, budget, diagnostic)?)],
        "cor-ck" => vec![(None, multiagent::verify_cor_ck(im, diagnostic))],
        "cor-ta-common" => vec![(None, multiagent::verify_cor_ta_common(im, diagnostic))],
        c if VERIFY_CLAIMS.contains(&c) && c != "cor-unique" => {
            let mut v = Vec::new();
            for a in im.agents() {
                v.push((Some(a.name().to_string()), single_agent(claim, a.model(), diagnostic)?));
            }
            v
        }
        other => return Err(Error::InvalidParameter(format!("unknown claim `{other}`"))),
    })
}

/// Exit code for a set of verdicts: falsified beats unmet hypotheses.
pub fn exit_for(reports: &[VerificationReport]) -> i32 {
    if reports.iter().any(|r| r.verdict == Verdict::Falsified) {
        EXIT_FAILED
    } else if reports.iter().any(|r| r.verdict == Verdict::HypothesisNotMet) {
        EXIT_HYPOTHESIS
    } else {
        EXIT_OK
    }
}

fn cmd_verify(input: &Input, claim: &str, diagnostic: bool, against: Option<&Path>, budget: Option<u64>) -> CmdResult {
    if !VERIFY_CLAIMS.contains(&claim) {
        return Err(Fail::usage(format!("unknown claim `{claim}`; known: {}", VERIFY_CLAIMS.join(", "))));
    }
    if budget == Some(0) {
        return Err(Fail::usage("--budget must be positive"));
    }
    if (claim == "cor-unique") != against.is_some() {
        return Err(Fail::usage("--against is required by cor-unique and only accepted there"));
    }
    let doc = load(input, ParseOptions::default())?;
    let im = &doc.model;
    let labelled = if claim == "cor-unique" {
        let other_input = Input {
            file: against.expect("checked above").to_path_buf(),
            allow_null_cells: input.allow_null_cells,
        };
        let other = load(&other_input, ParseOptions::default())?;
        if other.model.n_agents() != im.n_agents() {
            return Err(Fail::model(Error::Mismatch("the models have different agent counts".into())));
        }
        let mut v = Vec::new();
        for (a, b) in im.agents().iter().zip(other.model.agents()) {
            let r = theorems::verify_cor_unique_type(a.model(), b.model()).map_err(Fail::model)?;
            v.push((Some(a.name().to_string()), r));
        }
        v
    } else {
        verify_claim(im, claim, diagnostic, budget.unwrap_or(DEFAULT_AGREEMENT_BUDGET)).map_err(Fail::model)?
    };
    let reports: Vec<VerificationReport> = labelled.iter().map(|(_, r)| r.clone()).collect();
    let code = exit_for(&reports);
    let mut text = String::new();
    for (agent, r) in &labelled {
        if let Some(a) = agent {
            let _ = writeln!(text, "agent {a}");
        }
        r.render_text(&mut text);
    }
    let model_text = serialize_doc(&doc, SerializeOptions::default());
    if code == EXIT_FAILED {
        text.push_str("model:\n");
        text.push_str(&model_text);
    }
    let j = json!({
        "claim": claim,
        "exit": code,
        "reports": labelled.iter().map(|(a, r)| json!({ "agent": a, "report": r })).collect::<Vec<_>>(),
        "model": if code == EXIT_FAILED { Value::from(model_text) } else { Value::Null },
    });
    Ok((code, text, j))
}

fn cmd_eval(input: &Input, expr: &str, at: Option<&str>) -> CmdResult {
    let doc = load(input, ParseOptions::default())?;
    let e = parse_expr(&doc, expr).map_err(|e| Fail::dsl(Path::new("<expr>"), e))?;
    let result = eval_expr(&doc.model, &e);
    let space = doc.model.sigma().space();
    let mut text = format!("{}\n", space.format_event(result));
    let mut j = json!({ "expr": e.render(&doc.model), "event": space.event_names(result) });
    if let Some(state) = at {
        let i = space
            .index_of(state)
            .ok_or_else(|| Fail::usage(format!("unknown state `{state}` in --at")))?;
        let member = result.contains(i);
        let _ = writeln!(text, "{state} {} the event", if member { "is in" } else { "is not in" });
        j["at"] = json!({ "state": state, "member": member });
    }
    Ok((EXIT_OK, text, j))
}

fn cmd_canonical(input: &Input, mode: CanonicalMode, out: Option<&Path>, expand_types: bool) -> CmdResult {
    let opts = ParseOptions {
        allow_null_cells: true,
        poss_from_types: mode == CanonicalMode::PossFromType,
    };
    let mut doc = load(input, opts)?;
    let mut agents = Vec::new();
    for a in doc.model.agents() {
        let m = a.model();
        let (model, decl) = match mode {
            CanonicalMode::BayesFromPoss => {
                let t = theorems::bayes_type_from_poss(m.prior(), m.poss()).map_err(Fail::model)?;
                (m.with_types(t).map_err(Fail::model)?, TypeDecl::Bayes)
            }
            CanonicalMode::PossFromType => {
                let p = theorems::poss_from_type(m.types()).map_err(Fail::model)?;
                let model = m.relaxed(true).and_then(|m| m.with_poss(p)).map_err(Fail::model)?;
                (model.relaxed(model.null_cell().is_some()).map_err(Fail::model)?, a.decl())
            }
        };
        agents.push(Agent::new(a.name(), model, decl));
    }
    doc.model = InteractiveModel::new(agents).map_err(Fail::model)?;
    let text = serialize_doc(&doc, SerializeOptions { expand_types });
    let j = json!({ "mode": format!("{mode:?}"), "out": out.map(|p| p.display().to_string()), "model": text });
    match out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| Fail::usage(format!("cannot write {}: {e}", path.display())))?;
            Ok((EXIT_OK, format!("wrote {}\n", path.display()), j))
        }
        None => Ok((EXIT_OK, text, j)),
    }
}

fn parse_named<T: std::str::FromStr<Err = Error>>(v: &str) -> Result<T, Fail> {
    v.parse().map_err(|e: Error| Fail::usage(e.to_string()))
}

fn cmd_search(a: &SearchArgs) -> CmdResult {
    let target = claim(&a.claim).ok_or_else(|| {
        Fail::usage(format!(
            "unknown claim `{}`; known: {}",
            a.claim,
            crate::modelgen::claim_names().join(", ")
        ))
    })?;
    if a.budget == Some(0) {
        return Err(Fail::usage("--budget must be positive"));
    }
    if a.workers == Some(0) {
        return Err(Fail::usage("--workers must be positive"));
    }
    let mode: SearchMode = parse_named(&a.mode)?;
    let interactive = matches!(a.claim.as_str(), "prop-3" | "cor-ck" | "cor-ta-common");
    let default_types = match a.claim.as_str() {
        "prop-1" => TypeMode::RandomMonotoneCapacity,
        "prop-2" => TypeMode::RandomCapacity,
        _ => TypeMode::RandomAdditive,
    };
    let mut require: Vec<Requirement> = match &a.require {
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(parse_named)
            .collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    if a.require.is_none() && a.claim == "prop-1" {
        require.push(Requirement::OneIntersection);
    }
    let params = GenParams {
        min_states: a.min_states,
        n_states: a.states,
        n_agents: a.agents.unwrap_or(if interactive { 2 } else { 1 }),
        denominator: a.denominator,
        sigma_mode: a.sigma_mode.as_deref().map(parse_named).transpose()?.unwrap_or(SigmaMode::Powerset),
        type_mode: a.type_mode.as_deref().map(parse_named).transpose()?.unwrap_or(default_types),
        poss_mode: a.poss_mode.as_deref().map(parse_named).transpose()?.unwrap_or(PossMode::ArbitraryNonempty),
        require,
        normalized_capacities: false,
        seed: a.seed,
        budget: a.budget,
    };
    let workers = a
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let outcome = search_counterexample(&target, &params, mode, workers).map_err(Fail::model)?;
    match outcome {
        SearchOutcome::NotFound { models_checked, skipped } => {
            let text = format!(
                "NotFound after {models_checked} models ({skipped} skipped): claim {} mode {} seed {}\n",
                a.claim, a.mode, a.seed
            );
            let j = json!({ "claim": a.claim, "result": "NotFound", "models_checked": models_checked, "skipped": skipped });
            Ok((EXIT_OK, text, j))
        }
        SearchOutcome::Found {
            index,
            models_checked,
            model,
            report,
        } => {
            let model_text = serialize_model(&model, SerializeOptions::default());
            let mut text = format!("Found at index {index} after {models_checked} models: claim {}\n", a.claim);
            report.render_text(&mut text);
            text.push_str("model:\n");
            text.push_str(&model_text);
            if let Some(path) = &a.out {
                std::fs::write(path, &model_text)
                    .map_err(|e| Fail::usage(format!("cannot write {}: {e}", path.display())))?;
            }
            let j = json!({
                "claim": a.claim,
                "result": "Found",
                "index": index,
                "models_checked": models_checked,
                "report": report,
                "model": model_text,
            });
            Ok((EXIT_FAILED, text, j))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String) {
        run_captured(std::iter::once("emck").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(&["search", "--claim", "prop-2", "--budget", "0"]).0, EXIT_USAGE);
        assert_eq!(run(&["search", "--claim", "nope"]).0, EXIT_USAGE);
        assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn small_searches() {
        let (code, out) = run(&["search", "--claim", "prop-2", "--states", "2", "--mode", "random", "--seed", "7", "--budget", "200"]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.starts_with("NotFound after 200 models"), "{out}");
        let (code, out) = run(&["--format", "json", "search", "--claim", "cor-main", "--states", "2", "--workers", "2"]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["result"], "NotFound");
    }
}

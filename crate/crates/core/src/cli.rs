//! Command-line front end behind the `adprice` binary.
//!
//! Exit codes: 0 on success, 1 on domain errors (bad instance, violated
//! precondition, failed audit or verdict), 2 on usage errors. JSON output
//! carries `schema_version` and is byte-stable for a fixed seed and config;
//! the human tables are not a contract.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::allocation::{direct_allocate, indirect_allocate_with};
use crate::constructions::{build, reproduce, Params, TheoremId, Verdict};
use crate::equilibrium::{
    efficiency_report, enumerate_pure_nash, truthful_direct_profile, truthful_star_profile, EquilibriumOptions, EquilibriumReport,
    Overbidding, StrategySpace, DEFAULT_PROFILE_GUARD,
};
use crate::error::{Error, Result};
use crate::io::{load_instance, parse_instance_file, save_instance};
use crate::mechanisms::{run_direct_vcg, run_indirect, MechanismKind, Outcome, RunOptions};
use crate::model::{AgentType, Allocation, AuctionInstance, Bid, StrategyProfile};
use crate::quality::{audit_on_grid, audit_quality, dense_probe_grid, AuditReport};
use crate::synth::{instance_from_seed, QualityMix, SynthConfig};
use crate::NASH_TOL;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "adprice", version, about = "Ad auctions with displayed prices: allocation, payments, and pure Nash analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Choose slots and prices.
    Allocate(RunArgs),
    /// Run a mechanism and list payments and utilities.
    Pay(RunArgs),
    /// Enumerate pure Nash equilibria on a finite strategy grid.
    Equilibria(EqArgs),
    /// Price of anarchy and stability for welfare and revenue.
    Report(EqArgs),
    /// Rebuild a construction (T5, T7, T9, T10, T12) and check its claims.
    Reproduce(ReproduceArgs),
    /// Monotonicity audit of every quality model.
    Audit(AuditArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SpaceKind {
    /// Each grid price with gain zero or the agent's own true gain.
    Own,
    /// Each grid price with gain zero or any agent's true gain at any price.
    Grid,
}

#[derive(Args, Debug)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// Instance file (JSON).
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Built-in construction.
    #[arg(long)]
    theorem: Option<TheoremId>,
    /// Seeded random instance.
    #[arg(long)]
    random_seed: Option<u64>,
}

#[derive(Args, Debug, Default)]
struct ParamArgs {
    /// Number of slots (T7).
    #[arg(long)]
    m: Option<usize>,
    /// Upper critical price.
    #[arg(long)]
    p_bar: Option<f64>,
    /// Lower critical price.
    #[arg(long)]
    p_low: Option<f64>,
    /// Quality level of the weak agent (T9, T10).
    #[arg(long)]
    delta: Option<f64>,
    /// Cost gap below p_low (T5).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Interior grid points of a construction.
    #[arg(long)]
    points: Option<usize>,
    /// Largest declared gain in an overbidding space.
    #[arg(long)]
    gain_cap: Option<f64>,
}

impl ParamArgs {
    fn params(&self) -> Params {
        Params {
            epsilon: self.epsilon,
            delta: self.delta,
            p_low: self.p_low,
            p_bar: self.p_bar,
            m: self.m,
            points: self.points,
            gain_cap: self.gain_cap,
        }
    }
}

#[derive(Args, Debug)]
struct Common {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    params: ParamArgs,
    /// Quality families for --random-seed.
    #[arg(long, value_enum, default_value_t = QualityMix::Mixed)]
    qualities: QualityMix,
    /// Also write the instance to this file.
    #[arg(long)]
    save_instance: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = MechanismKind::IndirectVcg)]
    mechanism: MechanismKind,
    /// Bids as `price:gain[:standalone]`, comma separated, one per agent.
    /// Defaults to the construction's reference profile or the truthful one.
    #[arg(long, value_delimiter = ',', value_parser = parse_bid)]
    bids: Vec<Bid>,
    /// Reported types for direct-vcg as `alpha:cost`, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_type)]
    reports: Vec<AgentType>,
    /// Show agents declaring zero gain in spare slots (default: GSP only).
    #[arg(long)]
    zero_gain_allocable: Option<bool>,
    /// Let GSP last-slot payments count agents priced below the minimum.
    #[arg(long)]
    no_min_price_filter: bool,
    /// Largest gap between inferred and true types counted as a match.
    #[arg(long, default_value_t = 1e-6)]
    inference_tol: f64,
}

#[derive(Args, Debug)]
struct EqArgs {
    #[command(flatten)]
    common: Common,
    /// Defaults to the construction's mechanisms, or both indirect ones.
    #[arg(long, value_enum)]
    mechanism: Option<MechanismKind>,
    #[arg(long, value_enum)]
    overbidding: Option<Overbidding>,
    /// Uniform gain list for every agent, comma separated.
    #[arg(long, value_delimiter = ',')]
    gains: Vec<f64>,
    /// Strategy space when no --gains are given. Constructions default to
    /// their own space.
    #[arg(long, value_enum)]
    space: Option<SpaceKind>,
    #[arg(long, default_value_t = NASH_TOL)]
    nash_tol: f64,
    #[arg(long, default_value_t = DEFAULT_PROFILE_GUARD)]
    max_profiles: u128,
    #[arg(long)]
    zero_gain_allocable: Option<bool>,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    id: TheoremId,
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = NASH_TOL)]
    nash_tol: f64,
    #[arg(long, default_value_t = DEFAULT_PROFILE_GUARD)]
    max_profiles: u128,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[command(flatten)]
    common: Common,
    /// Probe a dense grid of this many prices across the price range
    /// instead of the instance grid.
    #[arg(long)]
    probe_points: Option<usize>,
}

fn parse_fields(s: &str, min: usize, max: usize) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() < min || parts.len() > max {
        return Err(format!("expected {min} to {max} ':'-separated numbers, got {s:?}"));
    }
    parts.iter().map(|p| f64::from_str(p.trim()).map_err(|e| format!("{p:?}: {e}"))).collect()
}

fn parse_bid(s: &str) -> std::result::Result<Bid, String> {
    let v = parse_fields(s, 2, 3)?;
    let bid = Bid::new(v[0], v[1]);
    Ok(if v.len() == 3 { bid.with_standalone(v[2]) } else { bid })
}

fn parse_type(s: &str) -> std::result::Result<AgentType, String> {
    let v = parse_fields(s, 2, 2)?;
    Ok(AgentType { alpha: v[0], cost: v[1] })
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = out.write_all(text.as_bytes());
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        2
                    } else {
                        0
                    }
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

struct Loaded {
    instance: AuctionInstance,
    label: String,
    theorem: Option<crate::constructions::TheoremInstance>,
}

fn load(common: &Common) -> Result<Loaded> {
    let s = &common.source;
    let loaded = if let Some(path) = &s.instance {
        Loaded { instance: load_instance(path)?, label: format!("instance:{}", path.display()), theorem: None }
    } else if let Some(id) = s.theorem {
        let t = build(id, &common.params.params())?;
        Loaded { instance: t.instance.clone(), label: format!("theorem:{id}"), theorem: Some(t) }
    } else {
        let seed = s.random_seed.expect("clap enforces one source");
        let cfg = SynthConfig { qualities: common.qualities, ..Default::default() };
        Loaded { instance: instance_from_seed(seed, &cfg), label: format!("random-seed:{seed}"), theorem: None }
    };
    if let Some(path) = &common.save_instance {
        save_instance(&loaded.instance, path)?;
    }
    Ok(loaded)
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    source: &'a str,
    #[serde(flatten)]
    body: T,
}

fn json<T: Serialize>(command: &str, source: &str, body: T) -> String {
    let env = Envelope { schema_version: SCHEMA_VERSION, command, source, body };
    serde_json::to_string_pretty(&env).expect("outputs serialize") + "\n"
}

/// Six decimals with trailing zeros trimmed.
fn num(x: f64) -> String {
    if !x.is_finite() {
        return if x > 0.0 { "inf".into() } else { format!("{x}") };
    }
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map_or("-".into(), num)
}

fn dispatch(cmd: Command) -> Result<(String, i32)> {
    match cmd {
        Command::Allocate(a) => allocate(&a),
        Command::Pay(a) => pay(&a),
        Command::Equilibria(a) => equilibria(&a),
        Command::Report(a) => report(&a),
        Command::Reproduce(a) => reproduce_cmd(&a),
        Command::Audit(a) => audit(&a),
    }
}

fn run_options(zero_gain: Option<bool>, filter_off: bool) -> RunOptions {
    RunOptions { zero_gain_allocable: zero_gain, gsp_min_price_filter: !filter_off }
}

/// Bids from the flag, the construction's reference profile, or the
/// truthful profile, with a note on where they came from.
fn profile_for(a: &RunArgs, l: &Loaded) -> Result<(StrategyProfile, &'static str)> {
    if !a.bids.is_empty() {
        let p = StrategyProfile::new(a.bids.clone());
        p.validate(&l.instance)?;
        return Ok((p, "given"));
    }
    if let Some(p) = l.theorem.as_ref().and_then(|t| t.reference(a.mechanism)) {
        return Ok((p.clone(), "reference"));
    }
    if a.mechanism == MechanismKind::IndirectVcgStar {
        Ok((truthful_star_profile(&l.instance)?, "truthful"))
    } else {
        Ok((truthful_direct_profile(&l.instance)?, "truthful"))
    }
}

fn reports_for(a: &RunArgs, inst: &AuctionInstance) -> Result<Vec<AgentType>> {
    if a.reports.is_empty() {
        return Ok(inst.types());
    }
    if a.reports.len() != inst.n() {
        return Err(Error::Invalid { path: "reports".into(), reason: format!("expected {} reports, got {}", inst.n(), a.reports.len()) });
    }
    for (i, t) in a.reports.iter().enumerate() {
        t.validate(&format!("reports[{i}]"))?;
    }
    Ok(a.reports.clone())
}

fn allocation_table(s: &mut String, inst: &AuctionInstance, alloc: &Allocation) {
    let _ = writeln!(s, "{:<6}{:<7}{:>10}", "slot", "agent", "price");
    for (j, &i) in alloc.order().iter().enumerate() {
        let _ = writeln!(s, "{:<6}{:<7}{:>10}", j + 1, i, opt_num(alloc.price_of(i)));
    }
    let hidden: Vec<String> = (0..inst.n()).filter(|&i| alloc.slot_of(i).is_none()).map(|i| i.to_string()).collect();
    let _ = writeln!(s, "p_min  {}", opt_num(alloc.min_price()));
    if !hidden.is_empty() {
        let _ = writeln!(s, "hidden {}", hidden.join(" "));
    }
}

fn header(s: &mut String, label: &str, inst: &AuctionInstance) {
    let _ = writeln!(s, "source    {label}");
    let _ = writeln!(s, "instance  {}, {}, {}", plural(inst.n(), "agent"), plural(inst.m(), "slot"), plural(inst.price_grid().len(), "price"));
}

fn plural(k: usize, word: &str) -> String {
    if k == 1 {
        format!("1 {word}")
    } else {
        format!("{k} {word}s")
    }
}

fn allocate(a: &RunArgs) -> Result<(String, i32)> {
    let l = load(&a.common)?;
    let inst = &l.instance;
    let (result, bids) = if a.mechanism == MechanismKind::DirectVcg {
        (direct_allocate(inst, &reports_for(a, inst)?)?, None)
    } else {
        let (profile, from) = profile_for(a, &l)?;
        let zero = run_options(a.zero_gain_allocable, false).zero_gain_for(a.mechanism);
        (indirect_allocate_with(inst, &profile, None, zero)?, Some((profile, from)))
    };
    if a.common.format == Format::Json {
        #[derive(Serialize)]
        struct Body<'a> {
            mechanism: MechanismKind,
            #[serde(skip_serializing_if = "Option::is_none")]
            bids: Option<&'a StrategyProfile>,
            allocation: &'a Allocation,
            declared_welfare: f64,
        }
        let body = Body {
            mechanism: a.mechanism,
            bids: bids.as_ref().map(|b| &b.0),
            allocation: &result.allocation,
            declared_welfare: result.declared_welfare,
        };
        return Ok((json("allocate", &l.label, body), 0));
    }
    let mut s = String::new();
    header(&mut s, &l.label, inst);
    let _ = writeln!(s, "mechanism {}", a.mechanism);
    if let Some((_, from)) = &bids {
        let _ = writeln!(s, "bids      {from}");
    }
    s.push('\n');
    allocation_table(&mut s, inst, &result.allocation);
    let _ = writeln!(s, "declared welfare {}", num(result.declared_welfare));
    Ok((s, 0))
}

#[derive(Serialize)]
struct InferenceCheck {
    agent: usize,
    alpha_hat: f64,
    c_hat: f64,
    matches_truth: bool,
}

fn pay(a: &RunArgs) -> Result<(String, i32)> {
    let l = load(&a.common)?;
    let inst = &l.instance;
    let (outcome, from) = if a.mechanism == MechanismKind::DirectVcg {
        (run_direct_vcg(inst, &reports_for(a, inst)?)?, "reports")
    } else {
        let (profile, from) = profile_for(a, &l)?;
        (run_indirect(inst, a.mechanism, &profile, &run_options(a.zero_gain_allocable, a.no_min_price_filter))?, from)
    };
    let checks: Vec<InferenceCheck> = outcome
        .diagnostics
        .inferred
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let truth = inst.agent_type(i);
            let ok = (t.alpha_hat - truth.alpha).abs() <= a.inference_tol && (t.c_hat - truth.cost).abs() <= a.inference_tol;
            InferenceCheck { agent: i, alpha_hat: t.alpha_hat, c_hat: t.c_hat, matches_truth: ok }
        })
        .collect();
    if a.common.format == Format::Json {
        #[derive(Serialize)]
        struct Body<'a> {
            outcome: &'a Outcome,
            utilities: Vec<f64>,
            #[serde(skip_serializing_if = "Vec::is_empty")]
            inference: Vec<InferenceCheck>,
        }
        let utilities = (0..inst.n()).map(|i| outcome.utility(i)).collect();
        return Ok((json("pay", &l.label, Body { outcome: &outcome, utilities, inference: checks }), 0));
    }
    let mut s = String::new();
    header(&mut s, &l.label, inst);
    let _ = writeln!(s, "mechanism {}", a.mechanism);
    let _ = writeln!(s, "input     {from}");
    s.push('\n');
    let _ = writeln!(s, "{:<6}{:>5}{:>10}{:>10}{:>10}{:>10}{:>10}{:>10}", "agent", "slot", "price", "gain", "declared", "true", "payment", "utility");
    for i in 0..inst.n() {
        let a = &outcome.allocation;
        let _ = writeln!(
            s,
            "{:<6}{:>5}{:>10}{:>10}{:>10}{:>10}{:>10}{:>10}",
            i,
            a.slot_of(i).map_or("-".into(), |j| (j + 1).to_string()),
            opt_num(a.price_of(i)),
            num(outcome.declared_gains[i]),
            num(outcome.declared_values[i]),
            num(outcome.true_values[i]),
            num(outcome.payments[i]),
            num(outcome.utility(i)),
        );
    }
    let _ = writeln!(s, "\np_min             {}", opt_num(outcome.allocation.min_price()));
    let _ = writeln!(s, "declared welfare  {}", num(outcome.declared_welfare));
    let _ = writeln!(s, "true welfare      {}", num(outcome.true_welfare));
    let _ = writeln!(s, "revenue           {}", num(outcome.revenue));
    for c in &checks {
        let _ = writeln!(s, "inferred agent {}: alpha {} cost {} ({})", c.agent, num(c.alpha_hat), num(c.c_hat), if c.matches_truth { "matches" } else { "differs" });
    }
    if outcome.diagnostics.fallback_empty {
        let _ = writeln!(s, "fallback: nothing shown, payments would break individual rationality");
    }
    if !outcome.diagnostics.infeasible_inference.is_empty() {
        let _ = writeln!(s, "infeasible inferred types: {:?}", outcome.diagnostics.infeasible_inference);
    }
    Ok((s, 0))
}

fn eq_options(a: &EqArgs) -> EquilibriumOptions {
    EquilibriumOptions { nash_tol: a.nash_tol, guard: a.max_profiles, run: run_options(a.zero_gain_allocable, false) }
}

fn space_for(a: &EqArgs, l: &Loaded) -> Result<StrategySpace> {
    let ob = a.overbidding.unwrap_or(Overbidding::Forbidden);
    let inst = &l.instance;
    if !a.gains.is_empty() {
        return StrategySpace::uniform(inst, &a.gains, ob);
    }
    match (a.space, &l.theorem) {
        (None, Some(t)) if a.overbidding.map_or(true, |o| o == t.space.overbidding()) => Ok(t.space.clone()),
        (Some(SpaceKind::Grid), _) => StrategySpace::truthful_grid(inst, ob),
        _ if ob == Overbidding::Allowed => StrategySpace::truthful_grid(inst, ob),
        _ => StrategySpace::own_truthful(inst),
    }
}

fn mechanisms_for(a: &EqArgs, l: &Loaded) -> Vec<MechanismKind> {
    match (a.mechanism, &l.theorem) {
        (Some(k), _) => vec![k],
        (None, Some(t)) => t.mechanisms(),
        (None, None) => vec![MechanismKind::IndirectVcg, MechanismKind::IndirectGsp],
    }
}

fn equilibria(a: &EqArgs) -> Result<(String, i32)> {
    let l = load(&a.common)?;
    let inst = &l.instance;
    let space = space_for(a, &l)?;
    let opts = eq_options(a);

    #[derive(Serialize)]
    struct Found {
        bids: StrategyProfile,
        true_welfare: f64,
        revenue: f64,
    }
    #[derive(Serialize)]
    struct PerMechanism {
        mechanism: MechanismKind,
        overbidding: Overbidding,
        profiles_examined: u128,
        equilibria: Vec<Found>,
    }
    let mut all = Vec::new();
    for kind in mechanisms_for(a, &l) {
        let found = enumerate_pure_nash(inst, kind, &space, &opts)?
            .into_iter()
            .map(|p| {
                let o = run_indirect(inst, kind, &p, &opts.run)?;
                Ok(Found { bids: p, true_welfare: o.true_welfare, revenue: o.revenue })
            })
            .collect::<Result<Vec<_>>>()?;
        all.push(PerMechanism { mechanism: kind, overbidding: space.overbidding(), profiles_examined: space.joint_size(), equilibria: found });
    }
    if a.common.format == Format::Json {
        #[derive(Serialize)]
        struct Body {
            results: Vec<PerMechanism>,
        }
        return Ok((json("equilibria", &l.label, Body { results: all }), 0));
    }
    let mut s = String::new();
    header(&mut s, &l.label, inst);
    for r in &all {
        let _ = writeln!(s, "\n{}: {} equilibria in {} profiles", r.mechanism, r.equilibria.len(), r.profiles_examined);
        for f in &r.equilibria {
            let bids: Vec<String> = f.bids.bids.iter().map(|b| format!("({}, {})", num(b.price), num(b.gain))).collect();
            let _ = writeln!(s, "  {}  welfare {}  revenue {}", bids.join(" "), num(f.true_welfare), num(f.revenue));
        }
    }
    Ok((s, 0))
}

fn report(a: &EqArgs) -> Result<(String, i32)> {
    let l = load(&a.common)?;
    let inst = &l.instance;
    let space = space_for(a, &l)?;
    let opts = eq_options(a);
    let reports = mechanisms_for(a, &l)
        .into_iter()
        .map(|k| efficiency_report(inst, k, &space, &opts))
        .collect::<Result<Vec<EquilibriumReport>>>()?;
    if a.common.format == Format::Json {
        #[derive(Serialize)]
        struct Body<'a> {
            reports: &'a [EquilibriumReport],
        }
        return Ok((json("report", &l.label, Body { reports: &reports }), 0));
    }
    let mut s = String::new();
    header(&mut s, &l.label, inst);
    let _ = writeln!(s, "revenue benchmark: {}\n", crate::equilibrium::REVENUE_BENCHMARK);
    let _ = writeln!(
        s,
        "{:<14}{:>11}{:>8}{:>10}{:>10}{:>10}{:>10}{:>10}{:>10}",
        "mechanism", "overbid", "eq", "opt sw", "opt rev", "poa sw", "pos sw", "poa rev", "pos rev"
    );
    for r in &reports {
        let ob = match r.overbidding {
            Overbidding::Allowed => "allowed",
            Overbidding::Forbidden => "forbidden",
        };
        let _ = writeln!(
            s,
            "{:<14}{:>11}{:>8}{:>10}{:>10}{:>10}{:>10}{:>10}{:>10}",
            r.mechanism.name(),
            ob,
            r.equilibria.len(),
            num(r.benchmark_sw),
            num(r.benchmark_rev),
            r.poa_sw.to_string(),
            r.pos_sw.to_string(),
            r.poa_rev.to_string(),
            r.pos_rev.to_string(),
        );
    }
    if let Some(r) = reports.first() {
        let _ = writeln!(s, "\nratios hold on the grid only; largest price gap {}", num(r.grid_resolution));
    }
    Ok((s, 0))
}

fn reproduce_cmd(a: &ReproduceArgs) -> Result<(String, i32)> {
    let opts = EquilibriumOptions { nash_tol: a.nash_tol, guard: a.max_profiles, run: RunOptions::default() };
    let verdict: Verdict = reproduce(a.id, &a.params.params(), &opts)?;
    let code = if verdict.passed() { 0 } else { 1 };
    if a.format == Format::Json {
        #[derive(Serialize)]
        struct Body<'a> {
            passed: bool,
            verdict: &'a Verdict,
        }
        let label = format!("theorem:{}", a.id);
        return Ok((json("reproduce", &label, Body { passed: verdict.passed(), verdict: &verdict }), code));
    }
    let mut s = String::new();
    let _ = writeln!(s, "{}", a.id);
    let _ = writeln!(s, "params {}\n", serde_json::to_string(&verdict.params).expect("params serialize"));
    for c in &verdict.assertions {
        let tag = match (c.passed, c.asserted) {
            (true, true) => "PASS",
            (false, true) => "FAIL",
            (true, false) => "info",
            (false, false) => "note",
        };
        let _ = writeln!(s, "[{tag}] {}: {}", c.name, c.detail);
    }
    let _ = writeln!(s, "\nverdict: {}", if verdict.passed() { "PASS" } else { "FAIL" });
    Ok((s, code))
}

fn audit(a: &AuditArgs) -> Result<(String, i32)> {
    // Files are parsed without the load-time audit so every violation can be
    // listed rather than only the first.
    let (inst, label) = match &a.common.source.instance {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Load { path: path.display().to_string(), reason: e.to_string() })?;
            (parse_instance_file(&text)?.into_instance()?, format!("instance:{}", path.display()))
        }
        None => {
            let l = load(&a.common)?;
            (l.instance, l.label)
        }
    };
    let grid = inst.price_grid();
    let reports: Vec<AuditReport> = (0..inst.n())
        .map(|i| match a.probe_points {
            Some(k) => audit_quality(inst.quality(i), &dense_probe_grid(grid[0], grid[grid.len() - 1], k)),
            None => audit_on_grid(inst.quality(i), grid),
        })
        .collect();
    let clean = reports.iter().all(AuditReport::is_clean);
    let code = if clean { 0 } else { 1 };
    if a.common.format == Format::Json {
        #[derive(Serialize)]
        struct Agent<'a> {
            agent: usize,
            kind: &'static str,
            report: &'a AuditReport,
        }
        #[derive(Serialize)]
        struct Body<'a> {
            clean: bool,
            agents: Vec<Agent<'a>>,
        }
        let agents = reports.iter().enumerate().map(|(i, r)| Agent { agent: i, kind: inst.quality(i).kind_name(), report: r }).collect();
        return Ok((json("audit", &label, Body { clean, agents }), code));
    }
    let mut s = String::new();
    header(&mut s, &label, &inst);
    s.push('\n');
    for (i, r) in reports.iter().enumerate() {
        let status = if r.is_clean() { "clean".to_string() } else { format!("{} violations", r.violations.len()) };
        let _ = writeln!(s, "agent {i} ({}): {status}", inst.quality(i).kind_name());
        for v in &r.violations {
            let _ = writeln!(s, "  {v}");
        }
    }
    Ok((s, code))
}

//! The `negotiate` command line. Exit codes: 0 success, 1 operational error
//! (I/O, parse, bad flags), 2 property violation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use negotiate_core::oracle::compute_optima;
use negotiate_core::scengen::{agent_names, resource_names};
use negotiate_core::{
    classify_utility, envy_report, necessity_construction, run_negotiation, snapshot, Allocation, Bundle, Criterion,
    Deal, NecessityVariant, NegotiationConfig, OptimaReport, Policy, PolicyKind, Rational, Scenario,
    StructuralFilter, TerminationReason,
};

use crate::campaign::{run_campaign, CampaignSpec, SizeRange, Theorem};
use crate::format::{parse_scenario, serialize_scenario, serialize_trace, TraceHeader};

#[derive(Debug, Parser)]
#[command(name = "negotiate", version, about = "Resource allocation by negotiation: runs, oracle queries, verification campaigns")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a negotiation from the scenario's initial allocation.
    Negotiate(NegotiateArgs),
    /// Print optimal allocations found by exhaustive search.
    Oracle(OracleArgs),
    /// Run a randomized verification campaign.
    Verify(VerifyArgs),
    /// Build a scenario in which one given deal is indispensable.
    Construct(ConstructArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Ir,
    Cr,
    Equitable,
    Ppd,
    Elitist,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Ir => Criterion::IndividuallyRational,
            CriterionArg::Cr => Criterion::CooperativelyRational,
            CriterionArg::Equitable => Criterion::Equitable,
            CriterionArg::Ppd => Criterion::SimpleParetoPigouDalton,
            CriterionArg::Elitist => Criterion::Elitist,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    Any,
    OneDeal,
    Swap,
    Cluster,
}

impl From<FilterArg> for StructuralFilter {
    fn from(f: FilterArg) -> Self {
        match f {
            FilterArg::Any => StructuralFilter::Any,
            FilterArg::OneDeal => StructuralFilter::OneDeal,
            FilterArg::Swap => StructuralFilter::Swap,
            FilterArg::Cluster => StructuralFilter::Cluster,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Random,
    First,
    Greedy,
}

impl From<PolicyArg> for PolicyKind {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Random => PolicyKind::UniformRandom,
            PolicyArg::First => PolicyKind::FirstInCanonicalOrder,
            PolicyArg::Greedy => PolicyKind::GreedyWelfareGain,
        }
    }
}

#[derive(Debug, clap::Args)]
pub struct NegotiateArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, value_enum)]
    pub criterion: CriterionArg,
    #[arg(long, value_enum, default_value = "any")]
    pub filter: FilterArg,
    #[arg(long, value_enum, default_value = "random")]
    pub policy: PolicyArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to the number of allocations.
    #[arg(long)]
    pub step_cap: Option<usize>,
    /// Write the full trace as JSON.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Compare the terminal allocation with the exhaustive oracle.
    #[arg(long)]
    pub check_oracle: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportArg {
    Util,
    Egal,
    Leximin,
    Pareto,
    Lorenz,
    Envy,
    Elitist,
    All,
}

#[derive(Debug, clap::Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    pub report: ReportArg,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub theorem: Theorem,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// `K` or a range `K1-K2` drawn per trial.
    #[arg(long, default_value = "3")]
    pub agents: SizeRange,
    #[arg(long, default_value = "3")]
    pub resources: SizeRange,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write a counterexample; printed to stdout otherwise.
    #[arg(long)]
    pub counterexample: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Monotonic,
    Dichotomous,
    Egalitarian,
}

#[derive(Debug, clap::Args)]
pub struct ConstructArgs {
    #[arg(long)]
    pub agents: usize,
    #[arg(long)]
    pub resources: usize,
    /// Bundles before and after, e.g. "1=r1 2=r2 -> 1=r2 2=r1".
    #[arg(long)]
    pub deal: String,
    #[arg(long, value_enum)]
    pub variant: VariantArg,
    /// Only used by the monotonic variant.
    #[arg(long, default_value = "1/2")]
    pub epsilon: String,
    #[arg(long)]
    pub out: PathBuf,
}

/// Outcome of a command that ran to completion.
#[derive(Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Violation,
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut out = String::new();
    let result = run(&cli.command, &mut out);
    print!("{out}");
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

/// Executes a command, appending its standard output to `out`.
pub fn run(command: &Command, out: &mut String) -> anyhow::Result<Outcome> {
    match command {
        Command::Negotiate(a) => negotiate(a, out),
        Command::Oracle(a) => oracle(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Construct(a) => construct(a, out),
    }
}

fn load(path: &Path) -> anyhow::Result<(Scenario, Option<Allocation>)> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_scenario(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn welfare_line(scenario: &Scenario, alloc: &Allocation) -> String {
    let w = snapshot(scenario, alloc);
    format!(
        "{}  sw_u={} sw_e={} sw_el={} ordered={}",
        alloc.display(scenario),
        w.utilitarian,
        w.egalitarian,
        w.elitist,
        w.ordered
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Guarantee {
    MaxUtilitarian,
    Pareto,
    MaxEgalitarian,
    Lorenz,
}

/// The convergence guarantee, if any, that applies to a configuration.
fn guarantee(scenario: &Scenario, criterion: Criterion, filter: StructuralFilter) -> Option<Guarantee> {
    let all = |p: fn(&negotiate_core::UtilityClassification) -> bool| {
        (0..scenario.agent_count()).all(|i| p(&classify_utility(scenario, i)))
    };
    match (criterion, filter) {
        (Criterion::IndividuallyRational, StructuralFilter::Any) => Some(Guarantee::MaxUtilitarian),
        (Criterion::IndividuallyRational, StructuralFilter::OneDeal) if all(|c| c.additive) => Some(Guarantee::MaxUtilitarian),
        (Criterion::CooperativelyRational, StructuralFilter::Any) => Some(Guarantee::Pareto),
        (Criterion::CooperativelyRational, StructuralFilter::OneDeal) if all(|c| c.zero_one) => {
            Some(Guarantee::MaxUtilitarian)
        }
        (Criterion::Equitable, StructuralFilter::Any) => Some(Guarantee::MaxEgalitarian),
        (Criterion::SimpleParetoPigouDalton, StructuralFilter::Any | StructuralFilter::OneDeal)
            if all(|c| c.zero_one) =>
        {
            Some(Guarantee::Lorenz)
        }
        _ => None,
    }
}

fn negotiate(a: &NegotiateArgs, out: &mut String) -> anyhow::Result<Outcome> {
    let (scenario, initial) = load(&a.scenario)?;
    let initial = initial.ok_or_else(|| anyhow!("{} has no initial_allocation", a.scenario.display()))?;
    let criterion: Criterion = a.criterion.into();
    let filter: StructuralFilter = a.filter.into();
    let mut config = NegotiationConfig::new(criterion)
        .with_filter(filter)
        .with_policy(Policy::new(a.policy.into(), a.seed));
    if let Some(cap) = a.step_cap {
        config = config.with_step_cap(cap);
    }
    let trace = run_negotiation(&scenario, &initial, &config)?;

    writeln!(out, "criterion: {criterion}  filter: {filter}  policy: {}  seed: {}", config.policy.kind, a.seed)?;
    writeln!(out, "initial: {}", welfare_line(&scenario, &trace.initial))?;
    for (k, step) in trace.steps.iter().enumerate() {
        let involved: Vec<&str> =
            step.deal.involved_agents().iter().map(|&i| scenario.agents()[i].as_str()).collect();
        write!(out, "step {}: agents {{{}}} -> {}", k + 1, involved.join(","), welfare_line(&scenario, step.deal.after()))?;
        if let Some(p) = &step.payment {
            let parts: Vec<String> = scenario.agents().iter().zip(p.payments()).map(|(n, v)| format!("{n}:{v}")).collect();
            write!(out, "  payment={{{}}}", parts.join(", "))?;
        }
        writeln!(out)?;
    }
    writeln!(out, "terminal: {}", welfare_line(&scenario, &trace.terminal))?;
    writeln!(out, "termination: {}  steps: {}", trace.termination, trace.steps.len())?;

    if let Some(path) = &a.trace {
        let header = TraceHeader {
            criterion: a.criterion.to_possible_value().expect("named").get_name().into(),
            filter: filter.to_string(),
            policy: config.policy.kind.to_string(),
            seed: a.seed,
            step_cap: a.step_cap,
        };
        fs::write(path, serialize_trace(&scenario, Some(&header), &trace))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }

    if !a.check_oracle {
        return Ok(Outcome::Success);
    }
    let Some(kind) = guarantee(&scenario, criterion, filter) else {
        writeln!(out, "oracle: no convergence guarantee for this configuration; not checked")?;
        return Ok(Outcome::Success);
    };
    let optima = compute_optima(&scenario)?;
    let w = trace.terminal_welfare();
    let (ok, what) = match kind {
        Guarantee::MaxUtilitarian => (
            w.utilitarian == optima.max_utilitarian.value,
            format!("terminal sw_u {} vs optimum {}", w.utilitarian, optima.max_utilitarian.value),
        ),
        Guarantee::MaxEgalitarian => (
            w.egalitarian == optima.max_egalitarian.value,
            format!("terminal sw_e {} vs optimum {}", w.egalitarian, optima.max_egalitarian.value),
        ),
        Guarantee::Pareto => (optima.pareto_optimal.contains(&trace.terminal), "terminal Pareto optimal".into()),
        Guarantee::Lorenz => (optima.lorenz_optimal.contains(&trace.terminal), "terminal Lorenz optimal".into()),
    };
    let ok = ok && trace.termination == TerminationReason::NoAdmissibleDeal;
    writeln!(out, "oracle: {what}: {}", if ok { "match" } else { "MISMATCH" })?;
    Ok(if ok { Outcome::Success } else { Outcome::Violation })
}

fn write_set(out: &mut String, scenario: &Scenario, title: &str, set: &[Allocation]) -> std::fmt::Result {
    writeln!(out, "{title}: {} allocation(s)", set.len())?;
    for a in set {
        writeln!(out, "  {}", welfare_line(scenario, a))?;
    }
    Ok(())
}

fn oracle_report(out: &mut String, scenario: &Scenario, rep: &OptimaReport, which: ReportArg) -> std::fmt::Result {
    let wants = |r: ReportArg| which == r || which == ReportArg::All;
    if wants(ReportArg::Util) {
        writeln!(out, "max sw_u: {}", rep.max_utilitarian.value)?;
        write_set(out, scenario, "utilitarian maximizers", &rep.max_utilitarian.witnesses)?;
    }
    if wants(ReportArg::Egal) {
        writeln!(out, "max sw_e: {}", rep.max_egalitarian.value)?;
        write_set(out, scenario, "egalitarian maximizers", &rep.max_egalitarian.witnesses)?;
    }
    if wants(ReportArg::Elitist) {
        writeln!(out, "max sw_el: {}", rep.max_elitist.value)?;
        write_set(out, scenario, "elitist maximizers", &rep.max_elitist.witnesses)?;
    }
    if wants(ReportArg::Leximin) {
        write_set(out, scenario, "leximin maximal", &rep.leximin_maximal)?;
    }
    if wants(ReportArg::Pareto) {
        write_set(out, scenario, "pareto optimal", &rep.pareto_optimal)?;
    }
    if wants(ReportArg::Lorenz) {
        write_set(out, scenario, "lorenz optimal", &rep.lorenz_optimal)?;
    }
    if wants(ReportArg::Envy) {
        writeln!(out, "envy-free: {} allocation(s)", rep.envy_free.len())?;
        for a in &rep.envy_free {
            let po = if rep.pareto_optimal.contains(a) { "yes" } else { "no" };
            writeln!(out, "  {}  pareto_optimal={po}", welfare_line(scenario, a))?;
        }
        let pareto_envy: Vec<Rational> =
            rep.pareto_optimal.iter().map(|a| envy_report(scenario, a).max_envy).collect();
        if let Some(least) = pareto_envy.iter().min() {
            writeln!(out, "least max-envy among pareto optimal: {least}")?;
        }
    }
    Ok(())
}

fn oracle(a: &OracleArgs, out: &mut String) -> anyhow::Result<Outcome> {
    let (scenario, _) = load(&a.scenario)?;
    let rep = compute_optima(&scenario)?;
    oracle_report(out, &scenario, &rep, a.report)?;
    Ok(Outcome::Success)
}

fn verify(a: &VerifyArgs, out: &mut String) -> anyhow::Result<Outcome> {
    let spec = CampaignSpec {
        theorem: a.theorem,
        trials: a.trials,
        agents: a.agents,
        resources: a.resources,
        seed: a.seed,
    };
    let rep = run_campaign(&spec)?;
    writeln!(
        out,
        "{}: {}/{} passed (agents {}, resources {}, seed {})",
        rep.theorem, rep.trials_passed, rep.trials_run, a.agents, a.resources, a.seed
    )?;
    eprintln!("{}: finished in {:.3}s", rep.theorem, rep.duration.as_secs_f64());
    let Some(cx) = &rep.counterexample else {
        return Ok(Outcome::Success);
    };
    writeln!(out, "first failure: trial {} (seed {}): {}", cx.trial, cx.seed, cx.detail)?;
    let text = serde_json::to_string_pretty(&cx.to_json(rep.theorem))? + "\n";
    match &a.counterexample {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
            writeln!(out, "counterexample written to {}", path.display())?;
        }
        None => out.push_str(&text),
    }
    Ok(Outcome::Violation)
}

/// Parses `"1=r1 2=r2 -> 1=r2 2=r1"` over agents `1..n`, resources `r1..rm`.
pub fn parse_deal_spec(spec: &str, agent_count: usize, resource_count: usize) -> anyhow::Result<Deal> {
    let agents = agent_names(agent_count);
    let resources = resource_names(resource_count);
    let side = |text: &str| -> anyhow::Result<Allocation> {
        let mut bundles: Vec<Option<Bundle>> = vec![None; agent_count];
        for token in text.split_whitespace() {
            let (agent, list) = token.split_once('=').ok_or_else(|| anyhow!("expected AGENT=RES,... in {token:?}"))?;
            let i = agents.iter().position(|a| a == agent).ok_or_else(|| anyhow!("unknown agent {agent:?}"))?;
            let mut b = Bundle::EMPTY;
            for name in list.split(',').filter(|s| !s.is_empty()) {
                let r = resources.iter().position(|x| x == name).ok_or_else(|| anyhow!("unknown resource {name:?}"))?;
                b = b.with(r);
            }
            if bundles[i].replace(b).is_some() {
                bail!("agent {agent} listed twice");
            }
        }
        let bundles = bundles
            .into_iter()
            .enumerate()
            .map(|(i, b)| b.ok_or_else(|| anyhow!("agent {} missing; write {}= for an empty bundle", agents[i], agents[i])))
            .collect::<anyhow::Result<Vec<_>>>()?;
        Ok(Allocation::from_bundles(bundles, resource_count)?)
    };
    let (before, after) = spec.split_once("->").ok_or_else(|| anyhow!("deal needs BEFORE -> AFTER"))?;
    Ok(Deal::new(side(before)?, side(after)?)?)
}

fn construct(a: &ConstructArgs, out: &mut String) -> anyhow::Result<Outcome> {
    let deal = parse_deal_spec(&a.deal, a.agents, a.resources)?;
    let variant = match a.variant {
        VariantArg::Monotonic => {
            let epsilon: Rational = a.epsilon.parse().with_context(|| format!("bad epsilon {:?}", a.epsilon))?;
            NecessityVariant::Monotonic { epsilon }
        }
        VariantArg::Dichotomous => NecessityVariant::Dichotomous,
        VariantArg::Egalitarian => NecessityVariant::EgalitarianDichotomous,
    };
    let inst = necessity_construction(a.agents, a.resources, &deal, variant)?;
    fs::write(&a.out, serialize_scenario(&inst.scenario, Some(&inst.initial)))
        .with_context(|| format!("cannot write {}", a.out.display()))?;
    let s = &inst.scenario;
    let p = &inst.predicted;
    writeln!(out, "distinguished agent: {}", s.agents()[inst.distinguished_agent])?;
    writeln!(out, "initial: {}", inst.initial.display(s))?;
    writeln!(out, "target: {}", inst.target.display(s))?;
    writeln!(out, "predicted sw_u(initial) = {}", p.initial_utilitarian)?;
    writeln!(out, "predicted sw_u(target) = {}", p.target_utilitarian)?;
    if let (Some(ei), Some(et)) = (p.initial_egalitarian, p.target_egalitarian) {
        writeln!(out, "predicted sw_e(initial) = {ei}")?;
        writeln!(out, "predicted sw_e(target) = {et}")?;
    }
    writeln!(out, "wrote {}", a.out.display())?;
    Ok(Outcome::Success)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deal_spec_parses() {
        let d = parse_deal_spec("1=r1 2=r2 -> 1=r2 2=r1", 2, 2).unwrap();
        assert_eq!(d.before(), &Allocation::from_owners(&[0, 1], 2));
        assert_eq!(d.after(), &Allocation::from_owners(&[1, 0], 2));
        let d = parse_deal_spec("1=r1,r2 2= -> 1= 2=r1,r2", 2, 2).unwrap();
        assert_eq!(d.after(), &Allocation::all_to(1, 2, 2));
    }

    #[test]
    fn deal_spec_errors() {
        assert!(parse_deal_spec("1=r1 2=r2", 2, 2).is_err());
        assert!(parse_deal_spec("1=r1 -> 1=r2 2=r1", 2, 2).is_err());
        assert!(parse_deal_spec("1=r1 2=r1 -> 1=r2 2=r1", 2, 2).is_err());
        assert!(parse_deal_spec("1=r1 2=r2 -> 1=r1 2=r2", 2, 2).is_err());
        assert!(parse_deal_spec("1=r1 3=r2 -> 1=r2 3=r1", 2, 2).is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use gwa_core::coeff::Coeff;
use gwa_core::exact::{count_a_pmf, count_a_pmf_walk, leaf_pmf_fixed_point, render_table};
use gwa_core::report::ExperimentReport;
use gwa_core::rng::Stream;
use gwa_core::samplers::{
    q_from_gw, root_measure, sample_conditioned, sample_conditioned_rejection, MbSampler,
    SamplerTables,
};
use gwa_core::scaling::{lipschitz_suite, theorem_functional};
use gwa_core::suites::{run_suite, SuiteParams, SUITES};
use gwa_core::transforms::{check_tree, hat, HittingRule};
use gwa_core::{DegreeSet, DfsQueue, DistSpec, Error, OrderedTree, Rational};

#[derive(Parser, Debug)]
#[command(
    name = "gwa",
    version,
    about = "Galton-Watson trees conditioned on the number of vertices with out-degree in A"
)]
struct Cli {
    /// JSON file with default values for any flag; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for sampling experiments.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for cached exact tables.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed; required by stochastic subcommands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact table of P(#_A T = n) for n = 0..=max-n, as p/q strings.
    Exact(ExactArgs),
    /// Draws conditioned trees, printed in parenthesis notation.
    Sample(SampleArgs),
    /// Applies a transform to trees read from stdin, one per line.
    Transform(TransformArgs),
    /// Exact root-partition measure of T^A_n and its scaling functionals.
    RootPartition(RootArgs),
    /// Runs a named verification suite.
    Verify(VerifyArgs),
    /// Renders a saved report.
    Report(ReportArgs),
}

#[derive(Args, Debug, Default)]
struct LawArgs {
    /// Offspring law as JSON, e.g. '{"family":"binary"}'.
    #[arg(long)]
    dist: Option<String>,
    /// Degree set A: "0,2", "all", "0,geq:3" or "not:1".
    #[arg(long)]
    set: Option<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ExactMethod {
    Online,
    Walk,
    FixedPoint,
}

#[derive(Args, Debug)]
struct ExactArgs {
    #[command(flatten)]
    law: LawArgs,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long, value_enum)]
    method: Option<ExactMethod>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SampleMethod {
    Exact,
    Rejection,
    MarkovBranching,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    law: LawArgs,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_enum)]
    method: Option<SampleMethod>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum TransformKind {
    /// Depth-first queue in, hat queue out.
    Hat,
    /// Tree in, check tree out.
    Check,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(value_enum)]
    kind: TransformKind,
    #[arg(long)]
    set: Option<String>,
}

#[derive(Args, Debug)]
struct RootArgs {
    #[command(flatten)]
    law: LawArgs,
    #[arg(long)]
    n: Option<usize>,
    /// Largest root degree enumerated for laws with unbounded support.
    #[arg(long)]
    p_max: Option<usize>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name.
    suite: String,
    /// Offspring laws as JSON; repeatable.
    #[arg(long = "dist", num_args = 1..)]
    dists: Vec<String>,
    /// Degree sets; several may follow one flag.
    #[arg(long, num_args = 1..)]
    sets: Vec<String>,
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long, num_args = 1..)]
    ns: Vec<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// Also write raw samples as CSV to this path.
    #[arg(long)]
    csv_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    path: PathBuf,
}

/// Every setting a run can take, from flags or a config file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dist: Option<DistSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    set: Option<DegreeSet>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    dists: Vec<DistSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    sets: Vec<DegreeSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    ns: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cache_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exact_method: Option<ExactMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sample_method: Option<SampleMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p_max: Option<usize>,
}

enum Failure {
    Config(String, String),
    Checks(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = format!("{e:?}")
            .split(['(', ' ', '{'])
            .next()
            .unwrap_or("Error")
            .to_string();
        Failure::Config(kind, e.to_string())
    }
}

fn config_error(message: impl Into<String>) -> Failure {
    Failure::Config("Config".into(), message.into())
}

type Outcome = std::result::Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            emit_error("Usage", &e.to_string());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(Failure::Config(kind, message)) => {
            emit_error(&kind, &message);
            ExitCode::from(2)
        }
        Err(Failure::Checks(out)) => {
            let _ = io::stdout().lock().write_all(out.as_bytes());
            emit_error("CheckFailed", "one or more checks failed");
            ExitCode::from(1)
        }
    }
}

fn emit_error(kind: &str, message: &str) {
    eprintln!(
        "{}",
        json!({ "error": { "kind": kind, "message": message.trim() } })
    );
}

fn run(cli: Cli) -> Outcome {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| config_error(format!("bad config {}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    overlay(&mut cfg, &cli)?;
    if let Some(k) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| config_error(format!("cannot set threads: {e}")))?;
    }
    match &cli.command {
        Command::Exact(_) => exact(&cfg),
        Command::Sample(_) => sample(&cfg),
        Command::Transform(args) => transform(&cfg, args.kind),
        Command::RootPartition(_) => root_partition(&cfg),
        Command::Verify(args) => verify(&cfg, &args.suite, args.csv_out.as_deref()),
        Command::Report(args) => render_report(&cfg, &args.path),
    }
}

fn set_or<T>(slot: &mut Option<T>, value: Option<T>) {
    if value.is_some() {
        *slot = value;
    }
}

/// Command-line values replace config-file values.
fn overlay(cfg: &mut RunConfig, cli: &Cli) -> std::result::Result<(), Failure> {
    set_or(&mut cfg.threads, cli.threads);
    set_or(&mut cfg.cache_dir, cli.cache_dir.clone());
    set_or(&mut cfg.format, cli.format);
    set_or(&mut cfg.seed, cli.seed);
    let law = |cfg: &mut RunConfig, law: &LawArgs| -> std::result::Result<(), Failure> {
        if let Some(d) = &law.dist {
            cfg.dist = Some(DistSpec::parse(d)?);
        }
        if let Some(s) = &law.set {
            cfg.set = Some(s.parse()?);
        }
        Ok(())
    };
    match &cli.command {
        Command::Exact(a) => {
            law(cfg, &a.law)?;
            set_or(&mut cfg.max_n, a.max_n);
            set_or(&mut cfg.exact_method, a.method);
        }
        Command::Sample(a) => {
            law(cfg, &a.law)?;
            set_or(&mut cfg.n, a.n);
            set_or(&mut cfg.samples, a.samples);
            set_or(&mut cfg.sample_method, a.method);
        }
        Command::Transform(a) => {
            if let Some(s) = &a.set {
                cfg.set = Some(s.parse()?);
            }
        }
        Command::RootPartition(a) => {
            law(cfg, &a.law)?;
            set_or(&mut cfg.n, a.n);
            set_or(&mut cfg.p_max, a.p_max);
        }
        Command::Verify(a) => {
            if !a.dists.is_empty() {
                cfg.dists = a
                    .dists
                    .iter()
                    .map(|d| DistSpec::parse(d))
                    .collect::<gwa_core::Result<_>>()?;
            }
            if !a.sets.is_empty() {
                cfg.sets = a
                    .sets
                    .iter()
                    .map(|s| s.parse())
                    .collect::<gwa_core::Result<_>>()?;
            }
            set_or(&mut cfg.max_n, a.max_n);
            if !a.ns.is_empty() {
                cfg.ns = a.ns.clone();
            }
            set_or(&mut cfg.samples, a.samples);
        }
        Command::Report(_) => {}
    }
    Ok(())
}

fn need<T: Clone>(value: &Option<T>, flag: &str) -> std::result::Result<T, Failure> {
    value
        .clone()
        .ok_or_else(|| config_error(format!("missing --{flag}")))
}

fn format_of(cfg: &RunConfig, default: Format) -> Format {
    cfg.format.unwrap_or(default)
}

fn law_of(
    cfg: &RunConfig,
) -> std::result::Result<(DistSpec, gwa_core::OffspringDist<Rational>, DegreeSet), Failure> {
    let spec = need(&cfg.dist, "dist")?;
    let xi = spec.build()?;
    let set = need(&cfg.set, "set")?;
    set.require_zero()?;
    Ok((spec, xi, set))
}

#[derive(Serialize, Deserialize)]
struct CachedTable {
    dist: DistSpec,
    set: DegreeSet,
    method: ExactMethod,
    table: Vec<String>,
}

fn cache_path(dir: &Path, spec: &DistSpec, set: &DegreeSet, method: ExactMethod) -> PathBuf {
    let key = format!(
        "{}-{}-{:?}",
        serde_json::to_string(spec).expect("spec serializes"),
        set,
        method
    );
    let name: String = key
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect();
    dir.join(format!("{name}.json"))
}

fn exact_table(cfg: &RunConfig) -> std::result::Result<Vec<Rational>, Failure> {
    let (spec, xi, set) = law_of(cfg)?;
    let max_n = need(&cfg.max_n, "max-n")?;
    let method = cfg.exact_method.unwrap_or(ExactMethod::Online);
    let path = cfg
        .cache_dir
        .as_ref()
        .map(|d| cache_path(d, &spec, &set, method));
    if let Some(p) = &path {
        if let Ok(text) = std::fs::read_to_string(p) {
            if let Ok(c) = serde_json::from_str::<CachedTable>(&text) {
                if c.dist == spec && c.set == set && c.table.len() > max_n {
                    return Ok(gwa_core::exact::parse_table(&c.table[..=max_n])?);
                }
            }
        }
    }
    let table = match method {
        ExactMethod::Online => count_a_pmf(&xi, &set, max_n)?,
        ExactMethod::Walk => count_a_pmf_walk(&xi, &set, max_n)?,
        ExactMethod::FixedPoint => {
            if set != DegreeSet::leaves() {
                return Err(config_error("the fixed-point method needs --set 0"));
            }
            leaf_pmf_fixed_point(&xi, max_n)?
        }
    };
    if let (Some(p), Some(dir)) = (&path, &cfg.cache_dir) {
        std::fs::create_dir_all(dir).map_err(|e| config_error(format!("cache dir: {e}")))?;
        let cached = CachedTable {
            dist: spec,
            set,
            method,
            table: render_table(&table),
        };
        std::fs::write(p, serde_json::to_string(&cached).expect("table serializes"))
            .map_err(|e| config_error(format!("cache write: {e}")))?;
    }
    Ok(table)
}

fn exact(cfg: &RunConfig) -> Outcome {
    let table = render_table(&exact_table(cfg)?);
    Ok(match format_of(cfg, Format::Json) {
        Format::Json => format!(
            "{}\n",
            serde_json::to_string(&table).expect("strings serialize")
        ),
        Format::Csv => std::iter::once("n,probability".to_string())
            .chain(table.iter().enumerate().map(|(n, p)| format!("{n},{p}")))
            .map(|l| l + "\n")
            .collect(),
        Format::Text => table
            .iter()
            .enumerate()
            .map(|(n, p)| format!("{n} {p}\n"))
            .collect(),
    })
}

fn sample(cfg: &RunConfig) -> Outcome {
    let (spec, xi, set) = law_of(cfg)?;
    let seed = need(&cfg.seed, "seed")?;
    let n = need(&cfg.n, "n")?;
    let count = cfg.samples.unwrap_or(1);
    let method = cfg.sample_method.unwrap_or(SampleMethod::Exact);
    let root = Stream::new(seed);
    let trees: Vec<OrderedTree> = match method {
        SampleMethod::Exact => {
            let tables = SamplerTables::new(&xi.to_f64(), &set, n)?;
            (0..count)
                .map(|i| sample_conditioned(&tables, &mut root.split(i as u64)))
                .collect::<gwa_core::Result<_>>()?
        }
        SampleMethod::Rejection => (0..count)
            .map(|i| {
                sample_conditioned_rejection(
                    &xi,
                    &set,
                    n,
                    &mut root.split(i as u64),
                    10_000_000,
                    None,
                )
            })
            .collect::<gwa_core::Result<_>>()?,
        SampleMethod::MarkovBranching => {
            let tables = SamplerTables::new(&xi, &set, n)?;
            let mb = MbSampler::new(&q_from_gw(&tables)?);
            (0..count)
                .map(|i| mb.sample(n, &mut root.split(i as u64)))
                .collect::<gwa_core::Result<_>>()?
        }
    };
    let texts: Vec<String> = trees.iter().map(|t| t.to_string()).collect();
    Ok(match format_of(cfg, Format::Text) {
        Format::Json => {
            let body = json!({
                "seed": seed,
                "version": env!("CARGO_PKG_VERSION"),
                "config": { "dist": spec, "set": set, "n": n, "samples": count, "method": method },
                "trees": texts,
            });
            format!("{}\n", serde_json::to_string_pretty(&body).expect("json"))
        }
        Format::Csv => {
            let mut out = format!(
                "# seed {seed} version {}\nindex,tree\n",
                env!("CARGO_PKG_VERSION")
            );
            for (i, t) in texts.iter().enumerate() {
                out.push_str(&format!("{i},\"{t}\"\n"));
            }
            out
        }
        Format::Text => {
            let mut out = format!("# seed {seed} version {}\n", env!("CARGO_PKG_VERSION"));
            for t in texts {
                out.push_str(&t);
                out.push('\n');
            }
            out
        }
    })
}

/// Reads a tree given as parentheses or as a comma-separated queue.
fn parse_tree(line: &str) -> gwa_core::Result<OrderedTree> {
    if line.starts_with('(') {
        line.parse()
    } else {
        Ok(line.parse::<DfsQueue>()?.decode())
    }
}

fn transform(cfg: &RunConfig, kind: TransformKind) -> Outcome {
    let stdin = io::stdin();
    let mut out = String::new();
    let rule = match kind {
        TransformKind::Hat => Some(HittingRule::new(&need(&cfg.set, "set")?)?),
        TransformKind::Check => None,
    };
    for line in stdin.lock().lines() {
        let line = line.map_err(|e| config_error(format!("stdin: {e}")))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match &rule {
            Some(rule) => {
                let q = if line.starts_with('(') {
                    line.parse::<OrderedTree>()?.encode()
                } else {
                    line.parse::<DfsQueue>()?
                };
                out.push_str(&hat(&q, rule.clone())?.to_string());
            }
            None => out.push_str(&check_tree(&parse_tree(line)?)?.to_string()),
        }
        out.push('\n');
    }
    Ok(out)
}

fn root_partition(cfg: &RunConfig) -> Outcome {
    let (spec, xi, set) = law_of(cfg)?;
    let n = need(&cfg.n, "n")?;
    let tables = SamplerTables::new(&xi, &set, n)?;
    let measure = root_measure(&tables, n, cfg.p_max)?;
    let functionals: Vec<(String, f64)> = lipschitz_suite()
        .iter()
        .map(|f| (f.name.to_string(), theorem_functional(n, &measure.atoms, f)))
        .collect();
    Ok(match format_of(cfg, Format::Json) {
        Format::Json => {
            let atoms: Vec<_> = measure
                .atoms
                .iter()
                .map(|(l, w)| json!({ "partition": l.to_string(), "probability": w.render() }))
                .collect();
            let funcs: serde_json::Map<String, serde_json::Value> = functionals
                .into_iter()
                .map(|(k, v)| (k, json!(v)))
                .collect();
            let body = json!({
                "dist": spec,
                "set": set,
                "n": n,
                "atoms": atoms,
                "missing": measure.missing.render(),
                "theorem_functional": funcs,
            });
            format!("{}\n", serde_json::to_string_pretty(&body).expect("json"))
        }
        Format::Csv => {
            let mut out = String::from("partition,probability\n");
            for (l, w) in &measure.atoms {
                out.push_str(&format!("\"{l}\",{}\n", w.render()));
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            for (l, w) in &measure.atoms {
                out.push_str(&format!("{l} {}\n", w.render()));
            }
            out.push_str(&format!("missing {}\n", measure.missing.render()));
            for (k, v) in functionals {
                out.push_str(&format!("functional {k} {v}\n"));
            }
            out
        }
    })
}

fn verify(cfg: &RunConfig, suite: &str, csv_out: Option<&Path>) -> Outcome {
    if !SUITES.contains(&suite) {
        return Err(config_error(format!(
            "unknown suite {suite:?}; expected one of {}",
            SUITES.join(", ")
        )));
    }
    let stochastic = matches!(suite, "hat-law" | "mb-equivalence" | "universality");
    if stochastic && cfg.seed.is_none() {
        return Err(config_error("missing --seed"));
    }
    let params = SuiteParams {
        dists: cfg.dists.clone(),
        sets: cfg.sets.clone(),
        max_n: cfg.max_n,
        ns: cfg.ns.clone(),
        samples: cfg.samples,
        seed: cfg.seed.unwrap_or(0),
    };
    let report = run_suite(suite, &params)?;
    if let Some(path) = csv_out {
        std::fs::write(path, report.to_csv())
            .map_err(|e| config_error(format!("cannot write {}: {e}", path.display())))?;
    }
    let out = render(&report, format_of(cfg, Format::Json));
    if report.passed() {
        Ok(out)
    } else {
        Err(Failure::Checks(out))
    }
}

fn render(report: &ExperimentReport, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", report.to_json()),
        Format::Text => report.to_text(),
        Format::Csv => {
            let mut out = String::from("name,statistic,threshold,pass\n");
            for t in &report.tests {
                out.push_str(&format!(
                    "\"{}\",{},{},{}\n",
                    t.name, t.statistic, t.threshold, t.pass
                ));
            }
            out
        }
    }
}

fn render_report(cfg: &RunConfig, path: &Path) -> Outcome {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    let report = ExperimentReport::from_json(&text)?;
    let out = render(&report, format_of(cfg, Format::Text));
    if report.passed() {
        Ok(out)
    } else {
        Err(Failure::Checks(out))
    }
}

//! The `tradeforge` command-line front end.
//!
//! Every subcommand reads and writes UTF-8 JSON. Stdout carries a single
//! envelope `{"result": …, "manifest": …}` whose result payload is
//! byte-identical across runs and `--jobs` settings; timing goes to stderr.
//! Exit codes: 0 on success, 1 on mismatch/inexact results or failed
//! verification, 2 on usage errors.

mod reproduce;

pub use reproduce::ReproduceTarget;

use crate::adversary;
use crate::constructions::{self, BoundSource, BoundValues};
use crate::domain::{Label, Params, SetsDocument, SwapSet, SwapsDocument};
use crate::graphs;
use crate::search::{self, SearchOptions};
use crate::trades::{self, Trade, TradeSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

/// Per-run provenance embedded in every JSON envelope. Wall time is reported
/// on stderr instead so repeated runs stay byte-identical on stdout.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub version: &'static str,
    /// Requested worker threads (0 = automatic).
    pub threads: usize,
    pub exact: bool,
}

#[derive(Parser)]
#[command(
    name = "tradeforge",
    version,
    about = "Balanced swap-robust defining sets, minimal trades, and exact worst-case discrepancy search"
)]
struct Cli {
    /// Output format for stdout
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,
    /// Worker threads for parallel stages (0 or unset = automatic)
    #[arg(long, global = true, env = "TRADEFORGE_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Emit defining sets from the closed-form constructions
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Evaluate the worst-case discrepancy bounds at (t, p)
    Bounds(BoundsArgs),
    /// Build or verify minimal trades
    #[command(subcommand)]
    Trade(TradeCmd),
    /// Exact worst-case swap adversary
    #[command(subcommand)]
    Adversary(AdversaryCmd),
    /// Optimal defining-set search and partition counting
    #[command(subcommand)]
    Search(SearchCmd),
    /// Swap/potential graph analysis and degree-inequality sweeps
    #[command(subcommand)]
    Graphs(GraphsCmd),
    /// Re-derive the reference tables, bounds, constructions, and sweeps
    Reproduce(ReproduceArgs),
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// Magnitude-one recursive family at level z (t = 5·2^(z-2) - 1)
    P1 {
        #[arg(long)]
        z: u32,
    },
    /// Magnitude-two family at level z (t = 2z + 1)
    P2 {
        #[arg(long)]
        z: u32,
    },
    /// Expand each label into `factor` consecutive labels
    Expand {
        #[arg(long)]
        sets: PathBuf,
        #[arg(long)]
        factor: u32,
    },
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    t: u32,
    #[arg(long)]
    p: u32,
    /// Bound family; defaults to the family attached to p
    #[arg(long, value_enum)]
    which: Option<BoundFamily>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundFamily {
    P1,
    General,
    P2,
}

#[derive(Subcommand)]
enum TradeCmd {
    /// Assemble the parity-selected trade of the given defining sets
    Build {
        #[arg(long)]
        sets: PathBuf,
        /// Extra unpaired elements, e.g. "13,14"
        #[arg(long)]
        unpaired: Option<String>,
    },
    /// Check the trade property by direct subset enumeration
    Verify {
        #[arg(long)]
        trade: PathBuf,
        #[arg(long)]
        v: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        t: u32,
    },
}

#[derive(Subcommand)]
enum AdversaryCmd {
    /// Exact worst-case discrepancy and a minimal witness swap set
    WorstCase {
        #[arg(long)]
        sets: PathBuf,
        /// Swap magnitude; defaults to the p recorded in the sets file
        #[arg(long)]
        p: Option<u32>,
        /// Admit only swaps of distance exactly p
        #[arg(long)]
        exact_distance: bool,
        /// Solver step budget; exceeding it flags the result inexact
        #[arg(long)]
        budget: Option<u64>,
    },
}

#[derive(Subcommand)]
enum SearchCmd {
    /// Minimize the worst case over all canonical balanced partitions
    Optimal {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 100)]
        max_witnesses: usize,
        /// Candidate budget; exceeding it flags the result inexact
        #[arg(long)]
        budget: Option<u64>,
        /// Progress lines on stderr
        #[arg(long)]
        progress: bool,
    },
    /// Count canonical balanced partitions of [4t]
    Count {
        #[arg(long)]
        t: u32,
    },
}

#[derive(Subcommand)]
enum GraphsCmd {
    /// Build both graphs and the degree report for given sets and swaps
    Analyze {
        #[arg(long)]
        sets: PathBuf,
        /// Swap magnitude (the graphs are defined at p = 1)
        #[arg(long, default_value_t = 1)]
        p: u32,
        /// Swap-set file; defaults to the minimal worst-case witness
        #[arg(long)]
        swaps: Option<PathBuf>,
    },
    /// Degree-inequality sweep over every balanced partition at t
    Check {
        #[arg(long)]
        t: u32,
    },
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(value_enum)]
    target: ReproduceTarget,
    /// Include the long-running rows (t = 6 table row, level-4 family)
    #[arg(long)]
    long: bool,
    /// Also write the report to a file
    #[arg(long)]
    out: Option<PathBuf>,
}

pub(crate) enum CliError {
    /// Bad arguments or unreadable/invalid input files (exit 2).
    Usage(String),
    /// Well-formed run with a negative outcome (exit 1).
    Failure(String),
}

pub(crate) struct CommandOutput {
    result: serde_json::Value,
    text: String,
    inputs: BTreeMap<String, String>,
    /// Drives both the manifest flag and the exit code.
    exact: bool,
}

impl CommandOutput {
    pub(crate) fn new(result: impl Serialize, text: String) -> Result<Self, CliError> {
        Ok(CommandOutput {
            result: serde_json::to_value(result)
                .map_err(|e| CliError::Failure(format!("serialization: {e}")))?,
            text,
            inputs: BTreeMap::new(),
            exact: true,
        })
    }

    fn with_input(mut self, path: &Path, digest: String) -> Self {
        self.inputs.insert(path.display().to_string(), digest);
        self
    }

    pub(crate) fn flagged(mut self, exact: bool) -> Self {
        self.exact = exact;
        self
    }
}

/// Entry point for the thin binary.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let argv: Vec<String> = std::env::args().collect();
    let outcome = dispatch(&cli);
    match outcome {
        Ok(out) => {
            let manifest = RunManifest {
                command: argv.join(" "),
                inputs: out.inputs.clone(),
                version: env!("CARGO_PKG_VERSION"),
                threads: cli.jobs.unwrap_or(0),
                exact: out.exact,
            };
            match cli.output {
                OutputFormat::Json => {
                    #[derive(Serialize)]
                    struct Envelope<'a> {
                        result: &'a serde_json::Value,
                        manifest: &'a RunManifest,
                    }
                    let envelope = Envelope {
                        result: &out.result,
                        manifest: &manifest,
                    };
                    println!(
                        "{}",
                        serde_json::to_string(&envelope).expect("envelope serializes")
                    );
                }
                OutputFormat::Text => {
                    println!("{}", out.text);
                }
            }
            eprintln!("tradeforge: done in {} ms", started.elapsed().as_millis());
            if out.exact {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("tradeforge: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("tradeforge: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<CommandOutput, CliError> {
    match &cli.command {
        Command::Construct(cmd) => construct(cmd),
        Command::Bounds(args) => bounds(args),
        Command::Trade(cmd) => trade(cmd),
        Command::Adversary(cmd) => adversary_cmd(cmd),
        Command::Search(cmd) => search_cmd(cmd, cli.jobs),
        Command::Graphs(cmd) => graphs_cmd(cmd),
        Command::Reproduce(args) => {
            reproduce::run(args.target, args.long, args.out.as_deref(), cli.jobs)
        }
    }
}

// ---------------------------------------------------------------------------
// File plumbing
// ---------------------------------------------------------------------------

fn read_file(path: &Path) -> Result<(String, String), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let digest = format!("sha256:{:x}", Sha256::digest(&bytes));
    let text = String::from_utf8(bytes)
        .map_err(|_| CliError::Usage(format!("{} is not UTF-8", path.display())))?;
    Ok((text, digest))
}

fn read_sets(path: &Path) -> Result<(SetsDocument, String), CliError> {
    let (text, digest) = read_file(path)?;
    let doc: SetsDocument = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok((doc, digest))
}

fn parse_label_list(raw: &str) -> Result<Vec<Label>, CliError> {
    raw.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<Label>()
                .map_err(|_| CliError::Usage(format!("bad label {s:?}")))
        })
        .collect()
}

pub(crate) fn ratio_string(r: crate::constructions::Bound) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// ---------------------------------------------------------------------------
// Command handlers
// ---------------------------------------------------------------------------

fn construct(cmd: &ConstructCmd) -> Result<CommandOutput, CliError> {
    match cmd {
        ConstructCmd::P1 { z } => {
            if !(2..=20).contains(z) {
                return Err(CliError::Usage("p1 construction needs 2 <= z <= 20".into()));
            }
            let sets = constructions::recursive_p1(*z);
            let doc = SetsDocument::new(&sets, 1);
            let text = format!("t={} q=2 over [{}]: {}", sets.t(), sets.ground_size(), sets);
            CommandOutput::new(doc, text)
        }
        ConstructCmd::P2 { z } => {
            if *z < 1 {
                return Err(CliError::Usage("p2 construction needs z >= 1".into()));
            }
            let sets = constructions::construct_p2(*z);
            let doc = SetsDocument::new(&sets, 2);
            let text = format!("t={} q=2 over [{}]: {}", sets.t(), sets.ground_size(), sets);
            CommandOutput::new(doc, text)
        }
        ConstructCmd::Expand { sets, factor } => {
            let (doc, digest) = read_sets(sets)?;
            let p = doc.p;
            let base = doc
                .into_sets()
                .map_err(|e| CliError::Usage(format!("{}: {e}", sets.display())))?;
            if base.q() != 2 {
                return Err(CliError::Usage("expansion starts from q = 2 sets".into()));
            }
            if *factor < 2 {
                return Err(CliError::Usage("factor must be at least 2".into()));
            }
            let wide = constructions::expand_q(&base, *factor);
            let out_doc = SetsDocument::new(&wide, p);
            let text = format!(
                "t={} q={} over [{}]: {}",
                wide.t(),
                wide.q(),
                wide.ground_size(),
                wide
            );
            Ok(CommandOutput::new(out_doc, text)?.with_input(sets, digest))
        }
    }
}

#[derive(Serialize)]
struct BoundsOut {
    t: u32,
    p: u32,
    source: BoundSource,
    lower: String,
    upper: Option<String>,
}

fn bounds(args: &BoundsArgs) -> Result<CommandOutput, CliError> {
    if args.t < 1 || args.p < 1 {
        return Err(CliError::Usage("need t >= 1 and p >= 1".into()));
    }
    let values: BoundValues = match args.which {
        Some(BoundFamily::P1) => constructions::bound(args.t, args.p, BoundSource::P1),
        Some(BoundFamily::General) => constructions::bound(args.t, args.p, BoundSource::GeneralP),
        Some(BoundFamily::P2) => constructions::bound(args.t, args.p, BoundSource::P2),
        None => constructions::bound_for(args.t, args.p),
    };
    let out = BoundsOut {
        t: args.t,
        p: args.p,
        source: values.source,
        lower: ratio_string(values.lower),
        upper: values.upper.map(ratio_string),
    };
    let text = format!(
        "lower={} upper={}",
        out.lower,
        out.upper.as_deref().unwrap_or("none")
    );
    CommandOutput::new(out, text)
}

fn trade(cmd: &TradeCmd) -> Result<CommandOutput, CliError> {
    match cmd {
        TradeCmd::Build { sets, unpaired } => {
            let (doc, digest) = read_sets(sets)?;
            let unpaired = match unpaired {
                Some(raw) => parse_label_list(raw)?,
                None => Vec::new(),
            };
            let spec =
                TradeSpec::new(doc.pairs, unpaired).map_err(|e| CliError::Usage(e.to_string()))?;
            let built = trades::build_trade(&spec);
            let text = format!(
                "volume {} per side, blocks of {} over [{}]",
                built.volume(),
                spec.k(),
                spec.v()
            );
            Ok(CommandOutput::new(built, text)?.with_input(sets, digest))
        }
        TradeCmd::Verify { trade, v, k, t } => {
            let (text_in, digest) = read_file(trade)?;
            let parsed: Trade = serde_json::from_str(&text_in)
                .map_err(|e| CliError::Usage(format!("{}: {e}", trade.display())))?;
            let check = trades::verify_trade(&parsed, *v, *k, *t)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let valid = check.is_valid();
            let text = match &check {
                trades::TradeCheck::Valid => "valid".to_string(),
                trades::TradeCheck::Invalid { violation } => format!("invalid: {violation:?}"),
            };
            if !valid {
                eprintln!("trade verify: {text}");
            }
            Ok(CommandOutput::new(check, text)?
                .with_input(trade, digest)
                .flagged(valid))
        }
    }
}

#[derive(Serialize)]
struct WorstCaseOut {
    t: u32,
    p: u32,
    q: u32,
    exact_distance: bool,
    worst_case: u64,
    witness: SwapsDocument,
    per_pair: Vec<u64>,
    explored: u64,
    exact: bool,
}

fn adversary_cmd(cmd: &AdversaryCmd) -> Result<CommandOutput, CliError> {
    let AdversaryCmd::WorstCase {
        sets,
        p,
        exact_distance,
        budget,
    } = cmd;
    let (doc, digest) = read_sets(sets)?;
    let p = p.unwrap_or(doc.p);
    let parsed = doc
        .into_sets()
        .map_err(|e| CliError::Usage(format!("{}: {e}", sets.display())))?;
    let mut params =
        Params::with_q(parsed.t(), p, parsed.q()).map_err(|e| CliError::Usage(e.to_string()))?;
    if *exact_distance {
        params = params.exact_distance();
    }
    let report = adversary::worst_case_with_budget(&parsed, &params, *budget)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let out = WorstCaseOut {
        t: parsed.t(),
        p,
        q: parsed.q(),
        exact_distance: *exact_distance,
        worst_case: report.worst_case,
        witness: SwapsDocument::new(&report.witness),
        per_pair: report.per_pair.clone(),
        explored: report.explored,
        exact: report.exact,
    };
    let text = format!(
        "worst_case={} witness={:?} explored={} exact={}",
        report.worst_case,
        report.witness.swaps(),
        report.explored,
        report.exact
    );
    let exact = report.exact;
    Ok(CommandOutput::new(out, text)?
        .with_input(sets, digest)
        .flagged(exact))
}

#[derive(Serialize)]
struct OptimalOut {
    t: u32,
    p: u32,
    optimal_discrepancy: u64,
    optimal_count: u64,
    candidates_examined: u64,
    exact: bool,
    witnesses: Vec<SetsDocument>,
}

fn search_cmd(cmd: &SearchCmd, jobs: Option<usize>) -> Result<CommandOutput, CliError> {
    match cmd {
        SearchCmd::Optimal {
            t,
            p,
            max_witnesses,
            budget,
            progress,
        } => {
            if *t < 1 || *p < 1 {
                return Err(CliError::Usage("need t >= 1 and p >= 1".into()));
            }
            let options = SearchOptions {
                jobs,
                max_witnesses: *max_witnesses,
                budget: *budget,
                progress: *progress,
            };
            let r = search::find_optimal_with(*t, *p, &options);
            let out = OptimalOut {
                t: *t,
                p: *p,
                optimal_discrepancy: r.optimal_discrepancy,
                optimal_count: r.optimal_count,
                candidates_examined: r.candidates_examined,
                exact: r.exact,
                witnesses: r
                    .witnesses
                    .iter()
                    .map(|w| SetsDocument::new(w, *p))
                    .collect(),
            };
            let text = format!(
                "D*({t},{p}) = {} with {} optimal partitions ({} candidates examined)",
                r.optimal_discrepancy, r.optimal_count, r.candidates_examined
            );
            let exact = r.exact;
            Ok(CommandOutput::new(out, text)?.flagged(exact))
        }
        SearchCmd::Count { t } => {
            if *t < 1 {
                return Err(CliError::Usage("need t >= 1".into()));
            }
            if *t > 7 {
                return Err(CliError::Usage(
                    "count enumerates exhaustively; t <= 7 is the supported envelope".into(),
                ));
            }
            #[derive(Serialize)]
            struct CountOut {
                t: u32,
                count: u64,
                constructive_lower_bound: String,
            }
            let count = search::count_balanced_partitions(*t);
            let bound = search::constructive_lower_bound(*t);
            let out = CountOut {
                t: *t,
                count,
                constructive_lower_bound: bound.to_string(),
            };
            let text = format!("count={count} (constructive lower bound {bound})");
            CommandOutput::new(out, text)
        }
    }
}

#[derive(Serialize)]
struct AnalyzeOut {
    swaps_source: &'static str,
    swaps: SwapsDocument,
    swap_graph: graphs::SwapGraph,
    potential_graph: graphs::PotentialGraph,
    degrees: graphs::DegreeReport,
}

fn graphs_cmd(cmd: &GraphsCmd) -> Result<CommandOutput, CliError> {
    match cmd {
        GraphsCmd::Analyze { sets, p, swaps } => {
            if *p != 1 {
                return Err(CliError::Usage(
                    "the swap/potential graphs are defined at p = 1".into(),
                ));
            }
            let (doc, digest) = read_sets(sets)?;
            let parsed = doc
                .into_sets()
                .map_err(|e| CliError::Usage(format!("{}: {e}", sets.display())))?;
            let params = Params::with_q(parsed.t(), 1, parsed.q())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let mut out_inputs: Vec<(PathBuf, String)> = vec![(sets.clone(), digest)];
            let (swap_set, source) = match swaps {
                Some(path) => {
                    let (text_in, digest) = read_file(path)?;
                    let doc: SwapsDocument = serde_json::from_str(&text_in)
                        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                    let set = SwapSet::validate(doc.swaps, &params)
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                    out_inputs.push((path.clone(), digest));
                    (set, "file")
                }
                None => {
                    let report = adversary::worst_case(&parsed, &params)
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                    (report.witness, "worst_case_witness")
                }
            };
            let swap_graph = graphs::build_swap_graph(&parsed, &swap_set)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let potential = graphs::build_potential_graph(&parsed, &swap_set)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let degrees = graphs::degree_report(&parsed, &swap_graph, &potential)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let text = format!(
                "{} edges, {} arcs ({} into the sink), swaps from {}",
                swap_graph.edges.len(),
                potential.arcs.len(),
                degrees.v0_in,
                source
            );
            let out = AnalyzeOut {
                swaps_source: source,
                swaps: SwapsDocument::new(&swap_set),
                swap_graph,
                potential_graph: potential,
                degrees,
            };
            let mut cmd_out = CommandOutput::new(out, text)?;
            for (path, digest) in out_inputs {
                cmd_out = cmd_out.with_input(&path, digest);
            }
            Ok(cmd_out)
        }
        GraphsCmd::Check { t } => {
            if !(1..=5).contains(t) {
                return Err(CliError::Usage(
                    "the sweep enumerates every balanced partition; t <= 5 is the envelope".into(),
                ));
            }
            let report = graphs::lemma_sweep(*t);
            let clean = report.failures.is_empty();
            let text = format!(
                "t={} partitions={} failures={}",
                report.t,
                report.partitions,
                report.failures.len()
            );
            Ok(CommandOutput::new(report, text)?.flagged(clean))
        }
    }
}

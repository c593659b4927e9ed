use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use treeretract::almost::{check_derivation, twisted_gset, Derivation, GModule, Untwist};
use treeretract::counterexample::{Example, ExampleData, Part};
use treeretract::ggraph::{GGraph, GraphError};
use treeretract::io::{GGraphDoc, InstanceDoc, IoError, ModuleInstanceDoc, ResultDoc, UntwistDoc};
use treeretract::random::seeded_instances;
use treeretract::retract::{check_output, retract_tree, RetractError};
use treeretract::stallings::CoreGraph;
use treeretract::words::{Alphabet, Word};

#[derive(Parser)]
#[command(name = "treeretract", version, about = "Equivariant tree retractions, core graphs and module checks")]
struct Cli {
    /// Seed for randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    report: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Retract a G-tree onto a G-retract of its vertex set.
    #[command(subcommand)]
    Retract(RetractCmd),
    /// Core graphs of finitely generated subgroups of the free group on x, y.
    #[command(subcommand)]
    Stallings(StallingsCmd),
    /// Verify the worked example.
    #[command(subcommand)]
    Counterexample(CounterexampleCmd),
    /// Apply a single move to a G-graph.
    #[command(subcommand)]
    Moves(MovesCmd),
    /// Derivations, twisted G-sets and untwisting.
    #[command(subcommand)]
    Almost(AlmostCmd),
}

#[derive(Subcommand)]
enum RetractCmd {
    /// Run the pipeline on one instance file.
    Run {
        input: PathBuf,
        /// Print the move trace.
        #[arg(long)]
        trace: bool,
    },
    /// Run the pipeline on seeded random instances.
    Batch {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 40)]
        max_vertices: usize,
    },
    /// Write a seeded random instance.
    Generate {
        #[arg(long, default_value_t = 40)]
        max_vertices: usize,
    },
}

#[derive(Subcommand)]
enum StallingsCmd {
    /// Vertex and edge counts and the DOT drawing.
    Core { generators: String },
    Member { generators: String, word: String },
    /// Vertices carrying a closed path labelled by the word.
    Census { generators: String, word: String },
}

#[derive(Subcommand)]
enum CounterexampleCmd {
    Verify {
        #[arg(long, default_value_t = 10)]
        n_max: u32,
        #[arg(long, value_enum)]
        part: Option<PartArg>,
        /// Replace the built-in presentation data with a JSON fixture.
        #[arg(long)]
        fixture: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PartArg {
    Schreier,
    Really,
    Stabilizers,
    Fixed,
}

#[derive(Args)]
struct GraphInput {
    /// Instance file; `retract_U` may be omitted.
    input: PathBuf,
}

#[derive(Subcommand)]
enum MovesCmd {
    /// Slide the orbit of `edge` along `along`.
    Slide {
        #[command(flatten)]
        graph: GraphInput,
        #[arg(long)]
        edge: usize,
        #[arg(long)]
        along: usize,
    },
    /// Collapse every edge not listed in `keep`.
    Compress {
        #[command(flatten)]
        graph: GraphInput,
        #[arg(long, value_delimiter = ',')]
        keep: Vec<usize>,
    },
    /// Subdivide the orbit of `edge`.
    Subdivide {
        #[command(flatten)]
        graph: GraphInput,
        #[arg(long)]
        edge: usize,
    },
}

#[derive(Subcommand)]
enum AlmostCmd {
    /// Check the derivation of a {group, module, derivation} file.
    CheckDerivation { input: PathBuf },
    /// Untwist a function between G-sets.
    Untwist { input: PathBuf },
}

/// Failures mapped to the exit code contract.
#[derive(Debug)]
enum Failure {
    Mismatch(String),
    Input(String),
    Precondition(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Mismatch(_) => 1,
            Failure::Input(_) => 2,
            Failure::Precondition(_) => 3,
            Failure::Internal(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Mismatch(m) => write!(f, "verification failed: {m}"),
            Failure::Input(m) => write!(f, "input error: {m}"),
            Failure::Precondition(m) => write!(f, "precondition failed: {m}"),
            Failure::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Input(e.to_string())
    }
}

fn retract_failure(e: RetractError) -> Failure {
    match e {
        RetractError::Internal(_) | RetractError::Problematic(_) | RetractError::Filtration { .. } => {
            Failure::Internal(e.to_string())
        }
        _ => Failure::Precondition(e.to_string()),
    }
}

fn move_failure(e: GraphError) -> Failure {
    match e {
        GraphError::VertexOutOfRange(_) | GraphError::EdgeOutOfRange(_) => Failure::Input(e.to_string()),
        _ => Failure::Precondition(e.to_string()),
    }
}

/// What a command prints: a text rendering and a JSON value.
struct Output {
    text: String,
    json: serde_json::Value,
    /// Set when the output reports a mismatch; printed before exiting 1.
    mismatch: Option<String>,
}

impl Output {
    fn ok(text: String, json: serde_json::Value) -> Self {
        Output { text, json, mismatch: None }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("serializable")
}

fn words(text: &str) -> Result<Vec<Word>, Failure> {
    Word::parse_list(&Alphabet::xy(), text).map_err(|e| Failure::Input(e.to_string()))
}

fn word(text: &str) -> Result<Word, Failure> {
    Word::parse(&Alphabet::xy(), text).map_err(|e| Failure::Input(e.to_string()))
}

fn core(generators: &str) -> Result<CoreGraph, Failure> {
    CoreGraph::from_generators(&Alphabet::xy(), &words(generators)?).map_err(|e| Failure::Input(e.to_string()))
}

fn load_instance(path: &Path) -> Result<(GGraph, BTreeSet<usize>), Failure> {
    Ok(InstanceDoc::from_json(&read(path)?)?.build()?)
}

fn run_retract(cmd: &RetractCmd, seed: u64) -> Result<Output, Failure> {
    match cmd {
        RetractCmd::Run { input, trace } => {
            let (tree, u) = load_instance(input)?;
            let out = retract_tree(&tree, &u).map_err(retract_failure)?;
            let verdict = check_output(&tree, &u, &out);
            let doc = ResultDoc::new(&tree, &out, verdict.is_ok());
            let mut text = format!(
                "retracted {} -> {}: {} vertices, {} edges, {} moves\n",
                doc.input_hash,
                doc.output_hash,
                out.tree.vertex_count(),
                out.tree.edge_count(),
                out.moves.len()
            );
            if *trace {
                for m in &out.moves {
                    text.push_str(&format!("{m}\n"));
                }
            }
            Ok(Output { text, json: to_json(&doc), mismatch: verdict.err() })
        }
        RetractCmd::Batch { count, max_vertices } => {
            let start = Instant::now();
            let mut results = Vec::new();
            let mut failures = Vec::new();
            for (i, inst) in seeded_instances(seed, *count, *max_vertices).iter().enumerate() {
                let verdict = retract_tree(&inst.tree, &inst.u)
                    .map_err(|e| e.to_string())
                    .and_then(|out| check_output(&inst.tree, &inst.u, &out).map(|_| out));
                match verdict {
                    Ok(out) => results.push(json!({
                        "instance": i,
                        "order": inst.tree.group().order(),
                        "vertices": inst.tree.vertex_count(),
                        "retract": inst.u.len(),
                        "moves": out.moves.len(),
                        "output_hash": treeretract::retract::tree_hash(&out.tree),
                    })),
                    Err(e) => failures.push(format!("instance {i}: {e}")),
                }
            }
            let elapsed = start.elapsed().as_secs_f64();
            let text = format!(
                "{} instances, {} passed, {} failed, {:.2}s\n{}",
                count,
                results.len(),
                failures.len(),
                elapsed,
                failures.iter().map(|f| format!("{f}\n")).collect::<String>()
            );
            let json = json!({ "seed": seed, "results": results, "failures": failures });
            let mismatch = (!failures.is_empty()).then(|| format!("{} instances failed", failures.len()));
            Ok(Output { text, json, mismatch })
        }
        RetractCmd::Generate { max_vertices } => {
            let inst = seeded_instances(seed, 1, *max_vertices).remove(0);
            let doc = InstanceDoc::new(&inst.tree, &inst.u);
            let text = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
            Ok(Output::ok(text, to_json(&doc)))
        }
    }
}

fn run_stallings(cmd: &StallingsCmd) -> Result<Output, Failure> {
    match cmd {
        StallingsCmd::Core { generators } => {
            let c = core(generators)?;
            let (v, e) = (c.vertex_count(), c.edges().len());
            let text = format!("{v} vertices, {e} edges\n{}", c.to_dot());
            Ok(Output::ok(text, json!({ "vertices": v, "edges": e, "dot": c.to_dot() })))
        }
        StallingsCmd::Member { generators, word: w } => {
            let member = core(generators)?.contains(&word(w)?).map_err(|e| Failure::Input(e.to_string()))?;
            Ok(Output::ok(format!("{member}\n"), json!({ "member": member })))
        }
        StallingsCmd::Census { generators, word: w } => {
            let c = core(generators)?;
            let census = c.closed_path_vertices(&word(w)?).map_err(|e| Failure::Input(e.to_string()))?;
            let labels = c.coset_labels();
            let named: Vec<String> =
                census.iter().map(|&v| if v == c.base() { "base".to_string() } else { labels[v].clone() }).collect();
            Ok(Output::ok(format!("{{{}}}\n", named.join(", ")), json!({ "vertices": census, "labels": named })))
        }
    }
}

fn run_counterexample(cmd: &CounterexampleCmd) -> Result<Output, Failure> {
    let CounterexampleCmd::Verify { n_max, part, fixture } = cmd;
    let data = match fixture {
        Some(path) => serde_json::from_str::<ExampleData>(&read(path)?).map_err(|e| Failure::Input(e.to_string()))?,
        None => ExampleData::default(),
    };
    let example = Example::new(&data).map_err(|e| Failure::Input(e.to_string()))?;
    let parts = match part {
        None => vec![Part::Schreier, Part::Really, Part::Stabilizers, Part::Fixed],
        Some(PartArg::Schreier) => vec![Part::Schreier],
        Some(PartArg::Really) => vec![Part::Really],
        Some(PartArg::Stabilizers) => vec![Part::Stabilizers],
        Some(PartArg::Fixed) => vec![Part::Fixed],
    };
    let start = Instant::now();
    let report = example.verify(*n_max, &parts);
    let elapsed = start.elapsed().as_secs_f64();
    let text = format!("{}runtime {elapsed:.3}s\n", report.to_text());
    let mut json = to_json(&report);
    json["runtime_seconds"] = json!(elapsed);
    json["passed"] = json!(report.passed());
    let failed = report.failures().count();
    let mismatch = (failed > 0).then(|| format!("{failed} checks failed"));
    Ok(Output { text, json, mismatch })
}

fn graph_output(g: &GGraph, extra: serde_json::Value) -> Output {
    let report = g.validate();
    let text = format!(
        "{} vertices, {} edges, tree: {}\n{}",
        g.vertex_count(),
        g.edge_count(),
        report.is_tree,
        g.to_dot()
    );
    let json = json!({ "ggraph": to_json(&GGraphDoc::from_ggraph(g)), "is_tree": report.is_tree, "map": extra });
    Output::ok(text, json)
}

fn run_moves(cmd: &MovesCmd) -> Result<Output, Failure> {
    match cmd {
        MovesCmd::Slide { graph, edge, along } => {
            let (tree, _) = load_instance(&graph.input)?;
            let out = tree.slide(*edge, *along).map_err(move_failure)?;
            Ok(graph_output(&out, json!(null)))
        }
        MovesCmd::Compress { graph, keep } => {
            let (tree, _) = load_instance(&graph.input)?;
            let keep: BTreeSet<usize> = keep.iter().copied().collect();
            let (out, c) = tree.compress(&keep).map_err(move_failure)?;
            let map = json!({ "sink_of": c.sink_of, "vertex_origin": c.vertex_origin, "edge_origin": c.edge_origin });
            Ok(graph_output(&out, map))
        }
        MovesCmd::Subdivide { graph, edge } => {
            let (tree, _) = load_instance(&graph.input)?;
            let (out, s) = tree.subdivide(*edge).map_err(move_failure)?;
            let map = json!({ "subdivided": s.subdivided, "midpoints": s.midpoints, "first_halves": s.first_halves });
            Ok(graph_output(&out, map))
        }
    }
}

fn run_almost(cmd: &AlmostCmd) -> Result<Output, Failure> {
    match cmd {
        AlmostCmd::CheckDerivation { input } => {
            let doc: ModuleInstanceDoc = serde_json::from_str(&read(input)?).map_err(|e| Failure::Input(e.to_string()))?;
            let group = doc.group.build()?;
            let m: GModule = doc.module.build(&group)?;
            let dd = doc.derivation.ok_or_else(|| Failure::Input("missing derivation".into()))?;
            let values = dd.values(&m)?;
            let d = Derivation { values };
            let holds = check_derivation(&m, &d);
            let mut json = json!({ "derivation": holds });
            let mut text = format!("derivation: {holds}\n");
            if holds {
                let twisted = twisted_gset(&m, &d).is_ok();
                let kernel: Vec<usize> =
                    d.kernel(&m).map_err(|e| Failure::Internal(e.to_string()))?.elements().iter().copied().collect();
                text.push_str(&format!("twisted action valid: {twisted}\nkernel: {kernel:?}\n"));
                json["twisted_action_valid"] = json!(twisted);
                json["kernel"] = json!(kernel);
            }
            let mismatch = (!holds).then(|| "not a derivation".to_string());
            Ok(Output { text, json, mismatch })
        }
        AlmostCmd::Untwist { input } => {
            let doc: UntwistDoc = serde_json::from_str(&read(input)?).map_err(|e| Failure::Input(e.to_string()))?;
            let group = doc.group.build()?;
            let e = doc.e.build(&group)?;
            let a = doc.a.build(&group)?;
            if doc.phi.len() != e.size() || doc.phi.iter().any(|&x| x >= a.size()) {
                return Err(Failure::Input("phi must map each point of E into A".into()));
            }
            let u = Untwist::new(&e, &a, &doc.transversal).map_err(|err| Failure::Precondition(err.to_string()))?;
            let hat = u.hat(&doc.phi);
            let round_trip = u.tilde(&hat) == doc.phi;
            let text = format!("hat: {hat:?}\nround trip: {round_trip}\n");
            let json = json!({ "hat": hat, "round_trip": round_trip });
            let mismatch = (!round_trip).then(|| "untwist round trip failed".to_string());
            Ok(Output { text, json, mismatch })
        }
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Retract(cmd) => run_retract(cmd, cli.seed),
        Command::Stallings(cmd) => run_stallings(cmd),
        Command::Counterexample(cmd) => run_counterexample(cmd),
        Command::Moves(cmd) => run_moves(cmd),
        Command::Almost(cmd) => run_almost(cmd),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match run(&cli) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("{f}");
            return ExitCode::from(f.code());
        }
    };
    let rendered = match cli.report {
        Format::Text => output.text,
        Format::Json => serde_json::to_string_pretty(&output.json).expect("serializable") + "\n",
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &rendered) {
                eprintln!("input error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{rendered}"),
    }
    match output.mismatch {
        Some(m) => {
            eprintln!("{}", Failure::Mismatch(m));
            ExitCode::from(1)
        }
        None => ExitCode::SUCCESS,
    }
}

//! `graphpoly` command-line tool.
//!
//! Exit status is 0 on success, 1 when a computation reports a failed
//! verdict (identity failure, rho mismatch, reduction error) and 2 on input
//! errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphpoly::dodgson::{dodgson, DodgsonSpec};
use graphpoly::forest::{phi, psi};
use graphpoly::io::{graph_hash, parse_any};
use graphpoly::partition::SetPartition;
use graphpoly::predictor::{predict, predict_with_witness, rho, rho_table_check, RhoMatch};
use graphpoly::reduction::{denominator_reduce, five_invariant, Order, BUDGET_ENV};
use graphpoly::suite::{corpus_reports, random_reports};
use graphpoly::{EdgeId, Error, Graph, VertexId};
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(
    name = "graphpoly",
    version,
    about = "Graph, Dodgson and forest polynomials; denominator reduction; weight-drop prediction"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Plain)]
    format: Format,
    /// Seed recorded in structured output and used by random sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Search budget in nodes (overrides the environment default).
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Worker threads for batch inputs.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
}

#[derive(Args, Debug)]
struct Inputs {
    /// Graph files (text or JSON).
    #[arg(required = true)]
    files: Vec<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kirchhoff polynomial.
    Psi(Inputs),
    /// Spanning forest polynomial for a vertex partition such as "{1}{2,4}".
    Phi {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        partition: String,
    },
    /// Dodgson polynomial Psi^{I,J}_K.
    Dodgson {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long = "I", value_delimiter = ',')]
        i: Vec<EdgeId>,
        #[arg(long = "J", value_delimiter = ',')]
        j: Vec<EdgeId>,
        #[arg(long = "K", value_delimiter = ',')]
        k: Vec<EdgeId>,
    },
    /// Five-invariant of five distinct edges.
    FiveInv {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_delimiter = ',', required = true)]
        edges: Vec<EdgeId>,
    },
    /// Denominator reduction trace.
    Reduce {
        #[command(flatten)]
        inputs: Inputs,
        /// Explicit edge order, comma separated (at least five edges).
        #[arg(long, value_delimiter = ',', conflicts_with = "auto")]
        order: Option<Vec<EdgeId>>,
        /// Search for an order (the default).
        #[arg(long)]
        auto: bool,
    },
    /// Weight-drop prediction from graph structure.
    Predict {
        #[command(flatten)]
        inputs: Inputs,
        /// Run a full reduction and use it as no-drop witness.
        #[arg(long)]
        witness: bool,
    },
    /// The rho polynomial of a join side.
    Rho {
        #[command(flatten)]
        inputs: Inputs,
        /// Defaults to the file's `# terminals` line.
        #[arg(long, value_delimiter = ',')]
        terminals: Option<Vec<VertexId>>,
    },
    /// Identity checks over a directory of graphs and random instances.
    VerifyIdentities {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        random: usize,
    },
    /// Recomputes the bundled rho table.
    RhoTable,
}

enum Failure {
    Input(String),
    Verdict(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownEdge(_)
            | Error::UnknownVertex(_)
            | Error::DuplicateEdge(_)
            | Error::EmptyGraph
            | Error::Disconnected
            | Error::SizeMismatch(..)
            | Error::KOverlap(_)
            | Error::RepeatedEdge(_)
            | Error::InvalidPartition(_)
            | Error::TooFewEdges { .. }
            | Error::TooManyEdges(_)
            | Error::Parse(_)
            | Error::Io { .. }
            | Error::UnknownCatalogEntry(_) => Failure::Input(e.to_string()),
            _ => Failure::Verdict(e.to_string()),
        }
    }
}

/// One computed result: plain text and its structured form.
struct Output {
    text: String,
    value: Value,
}

impl Output {
    fn ok(text: String, value: Value) -> Self {
        Output { text, value }
    }
}

struct Loaded {
    path: PathBuf,
    graph: Graph,
    text: String,
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io { path: path.display().to_string(), reason: e.to_string() })?;
    let graph = parse_any(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(Loaded { path: path.to_path_buf(), graph, text })
}

fn file_terminals(text: &str) -> Option<Vec<VertexId>> {
    text.lines().find_map(|l| {
        let rest = l.trim().strip_prefix('#')?.trim().strip_prefix("terminals")?;
        Some(rest.split_whitespace().filter_map(|t| t.parse().ok()).collect())
    })
}

fn poly_output(p: graphpoly::Poly) -> Output {
    let s = p.to_string();
    Output::ok(s.clone(), json!({"poly": s, "terms": p.num_terms()}))
}

fn run_one(cmd: &Command, l: &Loaded) -> Result<Output, Failure> {
    let g = &l.graph;
    Ok(match cmd {
        Command::Psi(_) => poly_output(psi(g)?),
        Command::Phi { partition, .. } => {
            let p: SetPartition = partition.parse()?;
            poly_output(phi(g, &p)?)
        }
        Command::Dodgson { i, j, k, .. } => poly_output(dodgson(g, &DodgsonSpec::new(i, j, k))?),
        Command::FiveInv { edges, .. } => {
            let e: [EdgeId; 5] = edges
                .clone()
                .try_into()
                .map_err(|_| Failure::Input(format!("--edges needs five edges, got {}", edges.len())))?;
            poly_output(five_invariant(g, e)?)
        }
        Command::Reduce { order, .. } => {
            let ord = match order {
                Some(o) => Order::Explicit(o.clone()),
                None => Order::Auto,
            };
            let t = denominator_reduce(g, &ord)?;
            Output::ok(t.to_string().trim_end().to_string(), t.to_json())
        }
        Command::Predict { witness, .. } => {
            let p = if *witness {
                let t = denominator_reduce(g, &Order::Auto)?;
                predict_with_witness(g, &t)?
            } else {
                predict(g)?
            };
            let value = serde_json::to_value(&p).expect("prediction serializes");
            Output::ok(p.to_string().trim_end().to_string(), value)
        }
        Command::Rho { terminals, .. } => {
            let t = terminals
                .clone()
                .or_else(|| file_terminals(&l.text))
                .ok_or_else(|| Failure::Input("--terminals not given and file has no terminals line".into()))?;
            let t: [VertexId; 3] =
                t.try_into().map_err(|_| Failure::Input("exactly three terminals are required".into()))?;
            let r = rho(g, t)?;
            Output::ok(
                r.to_string(),
                json!({"rho": r.to_string(), "degree": r.degree(), "forces_drop": r.forces_drop()}),
            )
        }
        Command::VerifyIdentities { .. } | Command::RhoTable => unreachable!("not a per-graph command"),
    })
}

fn inputs(cmd: &Command) -> Option<&[PathBuf]> {
    match cmd {
        Command::Psi(i)
        | Command::Phi { inputs: i, .. }
        | Command::Dodgson { inputs: i, .. }
        | Command::FiveInv { inputs: i, .. }
        | Command::Reduce { inputs: i, .. }
        | Command::Predict { inputs: i, .. }
        | Command::Rho { inputs: i, .. } => Some(&i.files),
        _ => None,
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Psi(_) => "psi",
        Command::Phi { .. } => "phi",
        Command::Dodgson { .. } => "dodgson",
        Command::FiveInv { .. } => "five-inv",
        Command::Reduce { .. } => "reduce",
        Command::Predict { .. } => "predict",
        Command::Rho { .. } => "rho",
        Command::VerifyIdentities { .. } => "verify-identities",
        Command::RhoTable => "rho-table",
    }
}

fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    let rd = fs::read_dir(dir).map_err(|e| Error::Io { path: dir.display().to_string(), reason: e.to_string() })?;
    let mut files: Vec<PathBuf> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| matches!(p.extension().and_then(|x| x.to_str()), Some("g" | "json")))
        .collect();
    files.sort();
    Ok(files)
}

fn run(cli: &Cli) -> Result<(Vec<String>, Value, bool), Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.max(1))
        .build()
        .map_err(|e| Failure::Input(e.to_string()))?;
    if let Some(files) = inputs(&cli.command) {
        let loaded: Vec<Loaded> = files.iter().map(|p| load(p)).collect::<Result<_, _>>()?;
        let results: Vec<Result<Output, Failure>> =
            pool.install(|| loaded.par_iter().map(|l| run_one(&cli.command, l)).collect());
        let mut lines = Vec::new();
        let mut docs = Vec::new();
        for (l, r) in loaded.iter().zip(results) {
            let out = r?;
            if loaded.len() > 1 {
                lines.push(format!("# {}", l.path.display()));
            }
            lines.push(out.text);
            docs.push(
                json!({"path": l.path.display().to_string(), "graph_hash": graph_hash(&l.graph), "result": out.value}),
            );
        }
        return Ok((lines, Value::Array(docs), true));
    }
    match &cli.command {
        Command::VerifyIdentities { corpus, random } => {
            let mut graphs = Vec::new();
            if let Some(dir) = corpus {
                for p in corpus_files(dir)? {
                    graphs.push(load(&p)?);
                }
            }
            let seed = cli.seed;
            let per_graph: Vec<_> = pool.install(|| {
                graphs
                    .par_iter()
                    .enumerate()
                    .map(|(n, l)| corpus_reports(&l.path.display().to_string(), &l.graph, seed.wrapping_add(n as u64)))
                    .collect()
            });
            let mut reports = Vec::new();
            for r in per_graph {
                reports.extend(r?);
            }
            reports.extend(random_reports(*random, seed)?);
            let ok = reports.iter().all(|r| r.passed);
            let lines = reports.iter().map(|r| r.to_string()).collect();
            let value = serde_json::to_value(&reports).expect("reports serialize");
            Ok((lines, value, ok))
        }
        Command::RhoTable => {
            let rows = rho_table_check()?;
            let ok = rows.iter().all(|r| r.matched != RhoMatch::Mismatch);
            let lines = rows.iter().map(|r| r.to_string()).collect();
            let value = rows
                .iter()
                .map(|r| {
                    json!({
                        "name": r.name,
                        "expected": r.expected.to_string(),
                        "computed": r.computed.as_ref().map(|c| c.to_string()).unwrap_or_else(|e| format!("error: {e}")),
                        "match": match &r.matched {
                            RhoMatch::Exact => "exact".to_string(),
                            RhoMatch::Permuted(p) => format!("permuted {}", p.iter().collect::<String>()),
                            RhoMatch::Mismatch => "mismatch".to_string(),
                        },
                    })
                })
                .collect();
            Ok((lines, value, ok))
        }
        _ => unreachable!("per-graph commands handled above"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(b) = cli.budget {
        std::env::set_var(BUDGET_ENV, b.to_string());
    }
    match run(&cli) {
        Ok((lines, value, ok)) => {
            let text = match cli.format {
                Format::Plain => lines.join("\n"),
                Format::Json => {
                    let doc = json!({
                        "command": command_name(&cli.command),
                        "seed": cli.seed,
                        "budget": graphpoly::reduction::default_budget(),
                        "result": value,
                    });
                    serde_json::to_string_pretty(&doc).expect("json")
                }
            };
            // a closed pipe (e.g. `| head`) is not an error
            let mut out = std::io::stdout().lock();
            let written = if text.is_empty() { Ok(()) } else { writeln!(out, "{text}").and_then(|_| out.flush()) };
            if let Err(e) = written {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Verdict(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

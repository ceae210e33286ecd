use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cluster_core::explorer::{enumerate, mutation_class_quivers};
use cluster_core::format::{
    graph_to_dot, graph_to_json, matrix_from_json, parse_sequence, positive_integer, quiver_from_str,
    quiver_to_json, seed_to_json,
};
use cluster_core::rank3::{report, report_json};
use cluster_core::{EnumerationLimits, ErrorName, ExchangeMatrix, Quiver, Seed};
use cluster_service::ServiceConfig;
use log::info;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "cluster-mutant", version, about = "Exact cluster mutation of quivers and seeds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply a mutation sequence to the initial seed and print the result.
    Mutate {
        #[command(flatten)]
        input: Input,
        /// 1-based vertices, e.g. "1 2 1".
        #[arg(short, long, default_value = "")]
        sequence: String,
    },
    /// Breadth-first enumeration of the exchange graph.
    Enumerate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        limits: Limits,
        /// Write the graph as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the graph as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Per-vertex mutation cases of a rank-3 quiver.
    ClassifyRank3 {
        #[command(flatten)]
        input: Input,
        /// The quiver is known to be mutation equivalent to an acyclic one.
        #[arg(long)]
        acyclic_witness: bool,
    },
    /// Quivers reachable by mutation, up to isomorphism.
    MutationClass {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        limits: Limits,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Directory with the browser bundle.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
        /// JSON-lines session journal.
        #[arg(long)]
        journal: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Input {
    /// Quiver file, line format or JSON.
    #[arg(short, long)]
    quiver: Option<PathBuf>,
    /// Exchange matrix file, JSON `{"b": [[...]]}`.
    #[arg(short, long)]
    matrix: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Limits {
    #[arg(long, default_value_t = 100_000)]
    max_seeds: usize,
    /// Largest allowed matrix entry, decimal or `2^k`.
    #[arg(long, default_value = "2^32")]
    max_entry: String,
}

enum Failure {
    Usage(String),
    Domain { name: String, detail: String },
}

impl<E: ErrorName + std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain { name: e.name().to_string(), detail: e.to_string() }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Domain {
        name: "IoError".into(),
        detail: format!("{}: {e}", path.display()),
    })
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Domain {
        name: "IoError".into(),
        detail: format!("{}: {e}", path.display()),
    })
}

impl Input {
    fn load(&self) -> Result<ExchangeMatrix, Failure> {
        match (&self.quiver, &self.matrix) {
            (Some(q), _) => Ok(quiver_from_str(&read(q)?)?.to_matrix()),
            (_, Some(m)) => Ok(matrix_from_json(&read(m)?)?),
            _ => unreachable!("clap requires one input"),
        }
    }
}

impl Limits {
    fn parse(&self) -> Result<EnumerationLimits, Failure> {
        let max_entry = positive_integer(&self.max_entry).map_err(|e| Failure::Usage(e.to_string()))?;
        if self.max_seeds == 0 {
            return Err(Failure::Usage("--max-seeds must be positive".into()));
        }
        Ok(EnumerationLimits { max_seeds: self.max_seeds, max_entry, ..Default::default() })
    }
}

fn pretty(v: &Value) -> String {
    let mut out = serde_json::to_string_pretty(v).expect("JSON values serialize");
    out.push('\n');
    out
}

fn run(cmd: Command) -> Result<String, Failure> {
    match cmd {
        Command::Mutate { input, sequence } => {
            let b = input.load()?;
            let seq = parse_sequence(&sequence, b.n()).map_err(|e| Failure::Usage(e.to_string()))?;
            let seed = Seed::initial(b).apply_sequence(&seq)?;
            Ok(pretty(&json!({
                "quiver": quiver_to_json(&Quiver::from_matrix(seed.matrix())),
                "seed": seed_to_json(&seed),
            })))
        }
        Command::Enumerate { input, limits, out, dot } => {
            let limits = limits.parse()?;
            let result = enumerate(&Seed::initial(input.load()?), &limits)?;
            info!("{} seeds, complete: {}", result.graph.len(), result.complete);
            if let Some(path) = out {
                write(&path, &pretty(&graph_to_json(&result)))?;
            }
            if let Some(path) = dot {
                write(&path, &graph_to_dot(&result.graph))?;
            }
            Ok(pretty(&result.stats_json()))
        }
        Command::ClassifyRank3 { input, acyclic_witness } => {
            let q = Quiver::from_matrix(&input.load()?);
            let known = acyclic_witness || q.is_acyclic();
            Ok(pretty(&report_json(&report(&q, known)?)))
        }
        Command::MutationClass { input, limits } => {
            let limits = limits.parse()?;
            let q = Quiver::from_matrix(&input.load()?);
            let result = mutation_class_quivers(&q, &limits)?;
            let classes: Vec<Value> = result
                .classes
                .iter()
                .map(|c| {
                    json!({
                        "quiver": quiver_to_json(&c.representative),
                        "witness": c.witness.iter().map(|k| k + 1).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok(pretty(&json!({ "complete": result.complete, "count": classes.len(), "classes": classes })))
        }
        Command::Serve { bind, static_dir, journal, max_depth } => {
            let config = ServiceConfig { max_depth, journal, static_dir };
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Domain {
                name: "IoError".into(),
                detail: e.to_string(),
            })?;
            rt.block_on(cluster_service::serve(bind, config)).map_err(|e| Failure::Domain {
                name: "IoError".into(),
                detail: e.to_string(),
            })?;
            Ok(String::new())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CLUSTER_MUTANT_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Domain { name, detail }) => {
            eprintln!("error: {name}: {detail}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}

//! `toricghz`: generate torus graphs, find cycle families, disentangle the
//! toric code and inspect entropies.
//!
//! Exit codes: 0 success, 1 usage or I/O, 2 no cycle family, 3 verification
//! failure or invalid cycle file.

mod dot;
mod io;
mod selftest;

use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use toricghz::graph::SCHEMA_VERSION;
use toricghz::pipeline::{
    prepare_family, run_pipeline, RunError, EXIT_NO_FAMILY, EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION,
};
use toricghz::stabilizer::GroupDoc;
use toricghz::topo::{Obstruction, SplitStep};
use toricghz::{
    build_lattice, disentangle, entanglement_entropy, find_family, mutual_information, DisentangleReport, LatticeKind,
    StabilizerGroup, TopoError, TorusGraph,
};

#[derive(Parser)]
#[command(name = "toricghz", version, about = "GHZ disentangling of toric code states on torus graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a periodic lattice as a graph document.
    Generate {
        #[arg(long)]
        lattice: LatticeKind,
        #[arg(long, value_parser = parse_size)]
        size: (usize, usize),
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Search for a parallel family of topological cycles.
    Cycles {
        #[command(flatten)]
        graph: GraphSource,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Run the full pipeline and write the verification report.
    Disentangle {
        #[command(flatten)]
        graph: GraphSource,
        /// Cycle family document; searched when absent.
        #[arg(long)]
        cycles: Option<String>,
        /// Stabilizer group to use instead of the toric code.
        #[arg(long)]
        state: Option<String>,
        /// Dense statevector checks (at most 20 qubits).
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Entanglement entropy of edge regions, with mutual information for two.
    Entropy {
        #[command(flatten)]
        graph: GraphSource,
        #[arg(long)]
        cycles: Option<String>,
        /// Comma-separated edge ids; give twice for mutual information.
        #[arg(long, num_args = 1, action = clap::ArgAction::Append, allow_hyphen_values = true)]
        region: Vec<String>,
        /// Measure the disentangled state instead of the toric code.
        #[arg(long)]
        disentangled: bool,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Graphviz rendering, cycle edges highlighted.
    ExportDot {
        #[command(flatten)]
        graph: GraphSource,
        #[arg(long)]
        cycles: Option<String>,
        /// Append the dual graph as a second graph.
        #[arg(long)]
        dual: bool,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Randomized consistency checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        cases: usize,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

#[derive(Args)]
struct GraphSource {
    /// Graph document ("-" for stdin).
    #[arg(long = "in", conflicts_with_all = ["lattice", "size"])]
    input: Option<String>,
    #[arg(long, requires = "size")]
    lattice: Option<LatticeKind>,
    #[arg(long, value_parser = parse_size, requires = "lattice")]
    size: Option<(usize, usize)>,
}

impl GraphSource {
    fn load(&self) -> Result<TorusGraph, Failure> {
        match (&self.input, self.lattice, self.size) {
            (Some(path), _, _) => {
                let text = io::read_input(path).map_err(Failure::usage)?;
                let doc = serde_json::from_str(&text)
                    .with_context(|| format!("parsing graph {path}"))
                    .map_err(Failure::usage)?;
                TorusGraph::from_doc(&doc).with_context(|| format!("graph {path}")).map_err(Failure::usage)
            }
            (None, Some(kind), Some((lx, ly))) => build_lattice(kind, lx, ly).map_err(|e| Failure::usage(e.into())),
            _ => Err(Failure::usage(anyhow::anyhow!("give --in or --lattice with --size"))),
        }
    }
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("size '{s}' is not of the form LxL"))?;
    let lx = a.trim().parse().map_err(|_| format!("bad size '{s}'"))?;
    let ly = b.trim().parse().map_err(|_| format!("bad size '{s}'"))?;
    Ok((lx, ly))
}

fn parse_region(s: &str, n: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let e: usize = part.trim_start_matches(['e', 'E']).parse().with_context(|| format!("bad edge id '{part}'"))?;
        if e >= n {
            bail!("edge {e} out of range (graph has {n} edges)");
        }
        out.push(e);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Error with the exit code it maps to.
struct Failure {
    code: i32,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: anyhow::Error) -> Self {
        Failure { code: EXIT_USAGE, error }
    }

    fn verification(error: anyhow::Error) -> Self {
        Failure { code: EXIT_VERIFICATION, error }
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        Failure { code: e.exit_code(), error: e.into() }
    }
}

#[derive(Serialize)]
struct ObstructionDoc<'a> {
    schema_version: u32,
    error: &'static str,
    obstructions: &'a [Obstruction],
}

#[derive(Serialize)]
struct DisentangleDoc<'a> {
    #[serde(flatten)]
    report: &'a DisentangleReport,
    splits: &'a [SplitStep],
}

#[derive(Serialize)]
struct EntropyDoc {
    schema_version: u32,
    state: &'static str,
    num_qubits: usize,
    regions: Vec<Vec<usize>>,
    entropies: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mutual_information: Option<u32>,
}

fn write_obstructions(out: &str, obstructions: &[Obstruction]) -> Result<i32, Failure> {
    let doc = ObstructionDoc { schema_version: SCHEMA_VERSION, error: "no_family", obstructions };
    io::write_json(out, &doc).map_err(Failure::usage)?;
    Ok(EXIT_NO_FAMILY)
}

fn read_cycles(path: &Option<String>) -> Result<Option<String>, Failure> {
    path.as_deref().map(io::read_input).transpose().map_err(Failure::usage)
}

fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Generate { lattice, size, out } => {
            let g = build_lattice(lattice, size.0, size.1).map_err(|e| Failure::usage(e.into()))?;
            io::write_json(&out, &g.to_doc()).map_err(Failure::usage)?;
            Ok(EXIT_OK)
        }
        Command::Cycles { graph, out } => {
            let g = graph.load()?;
            match find_family(&g) {
                Ok(family) => {
                    io::write_json(&out, &family.to_doc()).map_err(Failure::usage)?;
                    Ok(EXIT_OK)
                }
                Err(TopoError::NoFamily { obstructions }) => write_obstructions(&out, &obstructions),
                Err(e) => Err(Failure::verification(e.into())),
            }
        }
        Command::Disentangle { graph, cycles, state, oracle, out } => {
            let g = graph.load()?;
            let cycles = read_cycles(&cycles)?;
            let state = match state {
                Some(path) => {
                    let text = io::read_input(&path).map_err(Failure::usage)?;
                    let doc: GroupDoc = serde_json::from_str(&text)
                        .with_context(|| format!("parsing state {path}"))
                        .map_err(Failure::usage)?;
                    Some(StabilizerGroup::from_doc(&doc).map_err(|e| Failure::verification(e.into()))?)
                }
                None => None,
            };
            let run = match run_pipeline(&g, cycles.as_deref(), state, oracle) {
                Ok(run) => run,
                Err(RunError::NoFamily(obstructions)) => return write_obstructions(&out, &obstructions),
                Err(e) => return Err(e.into()),
            };
            let doc = DisentangleDoc { report: &run.report, splits: &run.prepared.splits };
            io::write_json(&out, &doc).map_err(Failure::usage)?;
            let failures = run.report.verdicts.failures();
            if !failures.is_empty() {
                eprintln!("verification failed: {}", failures.join(", "));
            }
            Ok(run.exit_code())
        }
        Command::Entropy { graph, cycles, region, disentangled, out } => {
            let g = graph.load()?;
            if region.is_empty() || region.len() > 2 {
                return Err(Failure::usage(anyhow::anyhow!("give one or two --region")));
            }
            let cycles = read_cycles(&cycles)?;
            let prepared = match prepare_family(&g, cycles.as_deref()) {
                Ok(p) => p,
                Err(RunError::NoFamily(obstructions)) => return write_obstructions(&out, &obstructions),
                Err(e) => return Err(e.into()),
            };
            let n = prepared.state.graph.num_edges();
            let regions =
                region.iter().map(|r| parse_region(r, n)).collect::<Result<Vec<_>>>().map_err(Failure::usage)?;
            let group = if disentangled {
                disentangle(&prepared.state, &prepared.family).map_err(|e| Failure::verification(e.into()))?.output
            } else {
                prepared.state.group
            };
            let entropies = regions
                .iter()
                .map(|r| entanglement_entropy(&group, r))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::usage(e.into()))?;
            let mutual_information = match regions.as_slice() {
                [a, b] => Some(mutual_information(&group, a, b).map_err(|e| Failure::usage(e.into()))?),
                _ => None,
            };
            let doc = EntropyDoc {
                schema_version: SCHEMA_VERSION,
                state: if disentangled { "disentangled" } else { "toric_code" },
                num_qubits: n,
                regions,
                entropies,
                mutual_information,
            };
            io::write_json(&out, &doc).map_err(Failure::usage)?;
            Ok(EXIT_OK)
        }
        Command::ExportDot { graph, cycles, dual, out } => {
            let g = graph.load()?;
            let family = match read_cycles(&cycles)? {
                Some(json) => {
                    Some(toricghz::topo::parse_family(&g, &json).map_err(|e| Failure::verification(e.into()))?)
                }
                None => None,
            };
            let text = dot::render(&g, family.as_ref(), dual);
            io::write_text(&out, &text).map_err(Failure::usage)?;
            Ok(EXIT_OK)
        }
        Command::Selftest { seed, cases, out } => {
            let report = selftest::run(seed, cases);
            io::write_json(&out, &report).map_err(Failure::usage)?;
            Ok(if report.passed { EXIT_OK } else { EXIT_VERIFICATION })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code as u8)
        }
    }
}

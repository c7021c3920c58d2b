//! Command-line interface.
//!
//! Exit codes: 0 success, 2 usage or domain error (including unreadable or
//! malformed input files), 3 search exhausted, 4 search timed out, 5 semantic
//! failure (a certificate or derivation check failed), 6 swap repair failed.

use std::collections::HashSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use biembed_core::bounds::{self, BoundsError};
use biembed_core::current::label_circuits;
use biembed_core::derive::{derive, verify_biembedding, verify_rotations};
use biembed_core::family::{swap_pairs, SwapError};
use biembed_core::search::{describe, enumerate_topologies, Limits, Status};
use biembed_core::CurrentGraph;
use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use crate::cgfile::{self, CgFile, ParseError};
use crate::certificate::{Certificate, Stats};
use crate::{parallel, rotfile};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Parser)]
#[command(name = "biembed", version, about = "Index-3 current graphs and triangular biembeddings of K_n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one of the closed-form bounds.
    Bounds(BoundsArgs),
    /// Search for a pair of current graphs over Z_{24s+21}.
    Search(SearchArgs),
    /// Certify a pair of current graph files; prints the certificate.
    Verify { a: PathBuf, b: PathBuf },
    /// Exchange ring and simple rungs between the graphs of a pair.
    Swap(SwapArgs),
    /// Write the rotation system derived from a current graph file.
    Derive {
        input: PathBuf,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Face-trace a rotation file and report its surface.
    CheckRotations { input: PathBuf },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("formula").required(true).multiple(false)))]
pub struct BoundsArgs {
    /// Lower bound on the genus of each half of a biembedding of K_n.
    #[arg(long, value_name = "N", group = "formula")]
    pub bigenus_lower: Option<u64>,
    /// Upper bound on the bichromatic number of a genus-g surface.
    #[arg(long, value_name = "G", group = "formula")]
    pub bichromatic: Option<u64>,
    /// Genus 24s^2 + 29s + 8 of the family's biembeddings.
    #[arg(long, value_name = "S", group = "formula")]
    pub b_of_s: Option<u64>,
    /// Most edges of a simple graph on V vertices in the genus-g surface.
    #[arg(long, value_name = "V", group = "formula", requires = "genus")]
    pub edge_bound: Option<u64>,
    #[arg(long, value_name = "G")]
    pub genus: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Family parameter; the current group is Z_{24s+21}.
    #[arg(long)]
    pub s: u64,
    /// Directory for A.cg, B.cg and certificate.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Enumerate every solution within the budget instead of stopping at
    /// the first.
    #[arg(long)]
    pub all: bool,
    /// Node budget per template variant.
    #[arg(long, env = "CG_SEARCH_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub max_nodes: u64,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Add search statistics, including elapsed time, to the certificate.
    #[arg(long)]
    pub stats: bool,
}

#[derive(Debug, Args)]
pub struct SwapArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Number of rung pairs to exchange.
    #[arg(long)]
    pub k: usize,
    /// Directory for the swapped A.cg, B.cg and certificate.json.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Only try the default orientation of the moved rungs.
    #[arg(long)]
    pub no_repair: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("search exhausted without a solution")]
    Exhausted,
    #[error("search stopped by its budget without a solution")]
    Timeout,
    #[error("{0}")]
    Semantic(String),
    #[error("{0}")]
    Repair(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Parse { .. } => 2,
            CliError::Exhausted => 3,
            CliError::Timeout => 4,
            CliError::Semantic(_) => 5,
            CliError::Repair(_) => 6,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(io_err(path))
}

fn load(path: &Path) -> Result<CgFile, CliError> {
    cgfile::parse(&read(path)?).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Runs a parsed command. Normal output goes to `out`, diagnostics to
/// `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let put = |w: &mut dyn Write, s: &str| w.write_all(s.as_bytes()).map_err(io_err(Path::new("<stdout>")));
    match cli.command {
        Command::Bounds(args) => {
            let value = bounds_value(&args).map_err(|e| CliError::Usage(e.to_string()))?;
            put(out, &format!("{value}\n"))
        }
        Command::Search(args) => cmd_search(&args, out, err),
        Command::Verify { a, b } => {
            let fa = load(&a)?;
            let fb = load(&b)?;
            let cert = verify_biembedding(&fa.graph, &fb.graph);
            let doc = Certificate::from_core(&cert);
            put(out, &doc.to_json())?;
            if doc.valid {
                return Ok(());
            }
            for f in &doc.failures {
                put(err, &format!("failed: {f}\n"))?;
            }
            for (k, d) in doc.duplicated_residues.iter().enumerate() {
                if !d.is_empty() {
                    put(err, &format!("residues in both [{k}] logs: {}\n", join(d)))?;
                }
            }
            for (k, m) in doc.missing_residues.iter().enumerate() {
                if !m.is_empty() {
                    put(err, &format!("residues in neither [{k}] log: {}\n", join(m)))?;
                }
            }
            Err(CliError::Semantic("pair does not certify".into()))
        }
        Command::Swap(args) => cmd_swap(&args, out),
        Command::Derive { input, out: target } => {
            let f = load(&input)?;
            let n = f.graph.modulus();
            let lc = label_circuits(&f.graph).map_err(|e| CliError::Semantic(e.to_string()))?;
            let de = derive(&lc, n).map_err(|e| CliError::Semantic(e.to_string()))?;
            let text = rotfile::render(&de.to_rotations());
            match target {
                Some(path) => write(&path, &text),
                None => put(out, &text),
            }
        }
        Command::CheckRotations { input } => {
            let rot = rotfile::parse(&read(&input)?).map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
            let r = verify_rotations(&rot);
            let report = RotationReport {
                vertices: r.vertices,
                edges: r.edges,
                faces: r.faces,
                triangular: r.triangular,
                connected: r.connected,
                genus: r.genus,
                regular_degree: (r.regular_degree >= 0).then_some(r.regular_degree as usize),
            };
            let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
            json.push('\n');
            put(out, &json)?;
            if r.triangular && r.connected {
                Ok(())
            } else {
                Err(CliError::Semantic("rotation system is not a connected triangulation".into()))
            }
        }
    }
}

#[derive(Serialize)]
struct RotationReport {
    vertices: usize,
    edges: Option<usize>,
    faces: Option<usize>,
    triangular: bool,
    connected: bool,
    genus: Option<usize>,
    #[serde(rename = "regularDegree")]
    regular_degree: Option<usize>,
}

fn genera(cert: &Certificate) -> String {
    let g = |x: Option<usize>| x.map_or("-".to_string(), |g| g.to_string());
    format!("{} {}", g(cert.genera.a), g(cert.genera.b))
}

fn join(xs: &[u32]) -> String {
    xs.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

pub fn bounds_value(args: &BoundsArgs) -> Result<i64, BoundsError> {
    if let Some(n) = args.bigenus_lower {
        return Ok(bounds::bigenus_lower(n));
    }
    if let Some(g) = args.bichromatic {
        return bounds::bichromatic_upper(g).map(|v| v as i64);
    }
    if let Some(s) = args.b_of_s {
        return Ok(bounds::b_of_s(s) as i64);
    }
    let v = args.edge_bound.expect("clap requires one formula");
    bounds::edge_bound(v, args.genus.unwrap_or(0)).map(|e| e as i64)
}

fn pair_files(dir: &Path, suffix: &str, a: &CurrentGraph, b: &CurrentGraph, header: [String; 2]) -> Result<(), CliError> {
    for (name, graph, header) in [("A", a, &header[0]), ("B", b, &header[1])] {
        let file = CgFile {
            header: vec![header.clone()],
            graph: graph.clone(),
        };
        write(&dir.join(format!("{name}{suffix}.cg")), &cgfile::render(&file))?;
    }
    Ok(())
}

fn cmd_search(args: &SearchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let n = 24 * args.s as u128 + 21;
    if n > biembed_core::search::MAX_MODULUS as u128 {
        return Err(CliError::Usage(format!(
            "s = {} gives Z_{n}; the search supports moduli up to {}",
            args.s,
            biembed_core::search::MAX_MODULUS
        )));
    }
    if args.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    let started = Instant::now();
    let deadline = match args.timeout {
        Some(t) if !(t.is_finite() && t >= 0.0) => {
            return Err(CliError::Usage(format!("invalid --timeout {t}")));
        }
        Some(t) => Some(started + Duration::from_secs_f64(t)),
        None => None,
    };
    let variants = enumerate_topologies(args.s);
    let limits = Limits {
        max_nodes: args.max_nodes,
        max_solutions: if args.all { usize::MAX } else { 1 },
    };
    let result = parallel::search(&variants, &limits, args.threads, deadline);
    let elapsed = started.elapsed().as_millis();

    // different templates can complete to the same pair
    let mut seen = HashSet::new();
    let found: Vec<(usize, &biembed_core::search::SolvedPair)> = result
        .solutions
        .iter()
        .filter(|(_, sol)| seen.insert((cgfile::render_graph(&sol.a), cgfile::render_graph(&sol.b))))
        .map(|(i, sol)| (*i, sol))
        .collect();
    let w = |e: io::Error| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    };
    if found.is_empty() {
        writeln!(err, "searched {} of {} variants, {} nodes", result.variants_searched, result.variants, result.stats.nodes).map_err(w)?;
        return Err(match result.status {
            Status::Timeout => CliError::Timeout,
            _ => CliError::Exhausted,
        });
    }
    out_dir(&args.out)?;
    for (k, (i, sol)) in found.iter().enumerate() {
        let suffix = if args.all { format!("-{k:03}") } else { String::new() };
        let name = describe(&variants[*i]);
        let header = [format!(" graph A over Z_{n}, {name}"), format!(" graph B over Z_{n}, {name}")];
        pair_files(&args.out, &suffix, &sol.a, &sol.b, header)?;
        let mut cert = Certificate::from_core(&verify_biembedding(&sol.a, &sol.b));
        if args.stats {
            cert.stats = Some(Stats::new(&result.stats, result.variants, result.variants_searched, elapsed));
        }
        write(&args.out.join(format!("certificate{suffix}.json")), &cert.to_json())?;
        if !args.all {
            writeln!(out, "found pair in variant {i} ({name}); genera {}", genera(&cert)).map_err(w)?;
        }
    }
    if args.all {
        let complete = result.status == Status::Found && result.variants_searched == result.variants;
        writeln!(out, "found {} pairs{}", found.len(), if complete { "" } else { " (budget reached in some variants)" }).map_err(w)?;
    }
    Ok(())
}

fn cmd_swap(args: &SwapArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let raw_a = read(&args.a)?;
    let raw_b = read(&args.b)?;
    let parse = |text: &str, path: &Path| {
        cgfile::parse(text).map_err(|source| CliError::Parse {
            path: path.to_path_buf(),
            source,
        })
    };
    let fa = parse(&raw_a, &args.a)?;
    let fb = parse(&raw_b, &args.b)?;
    out_dir(&args.out)?;
    let w = |e: io::Error| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    };
    let (a, b) = if args.k == 0 {
        write(&args.out.join("A.cg"), &raw_a)?;
        write(&args.out.join("B.cg"), &raw_b)?;
        (fa.graph, fb.graph)
    } else {
        let (a, b, residues) = swap_pairs(&fa.graph, &fb.graph, args.k, !args.no_repair).map_err(|e| match e {
            SwapError::TooManyPairs { .. } | SwapError::ModulusMismatch => CliError::Usage(e.to_string()),
            SwapError::RepairFailed { .. } => CliError::Repair(e.to_string()),
            _ => CliError::Semantic(e.to_string()),
        })?;
        let n = a.modulus();
        let header = [
            format!(" graph A over Z_{n}, rungs {} swapped", join(&residues)),
            format!(" graph B over Z_{n}, rungs {} swapped", join(&residues)),
        ];
        pair_files(&args.out, "", &a, &b, header)?;
        writeln!(out, "swapped rungs carrying {}", join(&residues)).map_err(w)?;
        (a, b)
    };
    let cert = Certificate::from_core(&verify_biembedding(&a, &b));
    write(&args.out.join("certificate.json"), &cert.to_json())?;
    writeln!(out, "genera {}", genera(&cert)).map_err(w)?;
    if cert.valid {
        Ok(())
    } else {
        Err(CliError::Semantic("swapped pair does not certify".into()))
    }
}

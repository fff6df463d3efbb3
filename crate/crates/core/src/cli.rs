//! The `msp-loc` command line.
//!
//! Exit status 0 means success, 1 an invalid graph or a graph outside an
//! operation's domain, and 2 a usage or parse error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::enumerate::{enumerate_flat_graphs, Caps};
use crate::flatten::{flatten, FlattenError};
use crate::format::{parse_graph, write_graph, write_graph_pretty};
use crate::graph::{validate, DecoratedGraph, Level};
use crate::lg::{lg_vdim, potential_index_set, LgIndex};
use crate::reduce::{certify_vanishing, certify_vanishing_nmsp, Certificate, Verdict};
use crate::vdim::vdim;
use crate::weights::{edge_tangent_weights, vertex_bundle_weights, BundleWeights};

#[derive(Parser, Debug)]
#[command(name = "msp-loc", version, about = "Localization graphs for MSP fields on the (3,3) Calabi-Yau in P2xP2")]
struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a graph file and re-emit it in compact form.
    Validate { file: PathBuf },
    /// Remove every T-balanced node.
    Flatten { file: PathBuf },
    /// Tangent weights of every edge and bundle weights of every level.
    Weights { file: PathBuf },
    /// Virtual dimension and its three-part breakdown.
    Vdim { file: PathBuf },
    /// Run the vanishing reduction and print the certificate.
    Certify {
        file: PathBuf,
        /// Treat the graph as an N-MSP graph: every vertex needs an hour in 1..=N.
        #[arg(long)]
        nmsp: Option<u32>,
    },
    /// Stream every flat graph within the caps, one per line.
    Enumerate {
        #[arg(long, default_value_t = 1)]
        max_genus: u32,
        #[arg(long, default_value_t = 2)]
        max_edges: u32,
        #[arg(long, default_value_t = 2)]
        max_legs: u32,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
        max_deg: u32,
        /// Append the certification verdict to each line.
        #[arg(long)]
        certify: bool,
        /// Worker threads for certification (default: logical cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Admissible LG indices for a genus.
    LgIndex {
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        m_max: u32,
        #[arg(long)]
        d_max: u32,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

fn rejected(message: impl Into<String>) -> Failure {
    Failure { code: 1, message: message.into() }
}

fn read(file: &PathBuf) -> Result<DecoratedGraph, Failure> {
    let text = fs::read_to_string(file).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    parse_graph(&text).map_err(|e| usage(format!("{}: {e}", file.display())))
}

fn require_valid(g: &DecoratedGraph) -> Result<(), Failure> {
    match validate(g).violations.first() {
        Some(v) => Err(rejected(format!("invalid graph: {v}"))),
        None => Ok(()),
    }
}

fn emit_graph(g: &DecoratedGraph, pretty: bool) -> String {
    if pretty {
        write_graph_pretty(g)
    } else {
        write_graph(g)
    }
}

pub fn certificate_json(c: &Certificate) -> Value {
    let mut doc = json!({
        "verdict": c.verdict.name(),
        "terminal_vdims": c.terminal_vdims.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "trace": c.trace.iter().map(|s| json!({
            "kind": s.kind.to_string(),
            "elements": s.elements.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    if let Verdict::Invalid(reason) = &c.verdict {
        doc["reason"] = json!(reason);
    }
    doc
}

fn certificate_table(c: &Certificate) -> String {
    let mut s = format!("verdict: {}\n", c.verdict);
    if let Verdict::Invalid(reason) = &c.verdict {
        s += &format!("reason: {reason}\n");
    }
    let vdims: Vec<String> = c.terminal_vdims.iter().map(|r| r.to_string()).collect();
    s += &format!("terminal vdims: [{}]\n", vdims.join(", "));
    for (i, step) in c.trace.iter().enumerate() {
        let els: Vec<String> = step.elements.iter().map(|e| e.to_string()).collect();
        s += &format!("{:>4}  {:<16} {}\n", i + 1, step.kind.to_string(), els.join(" "));
    }
    s.pop();
    s
}

fn weights_report(g: &DecoratedGraph, pretty: bool) -> Result<String, Failure> {
    let mut edges = Vec::new();
    for e in g.edges() {
        let w = edge_tangent_weights(e).map_err(|err| rejected(format!("{}: {err}", e.id)))?;
        edges.push((e, w));
    }
    let level_name = |l: Level| l.to_string();
    let levels: Vec<(Level, BundleWeights)> = Level::ALL.iter().map(|&l| (l, vertex_bundle_weights(l))).collect();
    if pretty {
        let mut s = String::from("edge  class  low      high\n");
        for (e, w) in &edges {
            s += &format!(
                "{:<5} {:<6} {:<8} {}\n",
                e.id.to_string(),
                e.class.to_string(),
                w.at_low.to_string(),
                w.at_inf_or_high
            );
        }
        s += "level  wL1   wL2   wN\n";
        for (l, b) in &levels {
            s += &match b {
                BundleWeights::Fixed { w_l1, w_l2, w_n } => {
                    format!("{:<6} {:<5} {:<5} {}\n", level_name(*l), w_l1.to_string(), w_l2.to_string(), w_n)
                }
                BundleWeights::InfinityConstraint { w_l2, w_l1_plus_w_n } => {
                    format!("{:<6} wL1 + wN = {w_l1_plus_w_n}, wL2 = {w_l2}\n", level_name(*l))
                }
            };
        }
        s.pop();
        return Ok(s);
    }
    let doc = json!({
        "edges": edges.iter().map(|(e, w)| json!({
            "id": e.id.to_string(),
            "class": e.class.to_string(),
            "low": w.at_low.to_string(),
            "high": w.at_inf_or_high.to_string(),
        })).collect::<Vec<_>>(),
        "levels": levels.iter().map(|(l, b)| match b {
            BundleWeights::Fixed { w_l1, w_l2, w_n } => json!({
                "level": level_name(*l), "wL1": w_l1.to_string(), "wL2": w_l2.to_string(), "wN": w_n.to_string(),
            }),
            BundleWeights::InfinityConstraint { w_l2, w_l1_plus_w_n } => json!({
                "level": level_name(*l), "wL2": w_l2.to_string(), "wL1+wN": w_l1_plus_w_n.to_string(),
            }),
        }).collect::<Vec<_>>(),
    });
    Ok(doc.to_string())
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<u8, Failure> {
    let pretty = cli.pretty;
    let text = match cli.command {
        Command::Validate { file } => {
            let g = read(&file)?;
            require_valid(&g)?;
            emit_graph(&g, pretty)
        }
        Command::Flatten { file } => {
            let g = read(&file)?;
            let flat = flatten(&g).map_err(|e| match e {
                FlattenError::Invalid(report) => match report.violations.first() {
                    Some(v) => rejected(format!("invalid graph: {v}")),
                    None => rejected("invalid graph"),
                },
                other => rejected(other.to_string()),
            })?;
            emit_graph(&flat, pretty)
        }
        Command::Weights { file } => {
            let g = read(&file)?;
            require_valid(&g)?;
            weights_report(&g, pretty)?
        }
        Command::Vdim { file } => {
            let g = read(&file)?;
            require_valid(&g)?;
            let v = vdim(&g).map_err(|e| rejected(e.to_string()))?;
            match (&v.breakdown, pretty) {
                (Some(b), true) => format!("{} {} {} → {}", b.dim_d, b.chi_mu_nu, b.chi_fields, b.total),
                (None, true) => format!("→ {}", v.total),
                (Some(b), false) => json!({
                    "dim_d": b.dim_d.to_string(),
                    "chi_mu_nu": b.chi_mu_nu.to_string(),
                    "chi_fields": b.chi_fields.to_string(),
                    "total": b.total.to_string(),
                })
                .to_string(),
                (None, false) => json!({ "total": v.total.to_string() }).to_string(),
            }
        }
        Command::Certify { file, nmsp } => {
            let g = read(&file)?;
            let cert = match nmsp {
                Some(n) => certify_vanishing_nmsp(&g, n),
                None => certify_vanishing(&g),
            }
            .map_err(|e| rejected(e.to_string()))?;
            let text = if pretty { certificate_table(&cert) } else { certificate_json(&cert).to_string() };
            writeln!(out, "{text}").map_err(|e| usage(e.to_string()))?;
            return Ok(if matches!(cert.verdict, Verdict::Invalid(_)) { 1 } else { 0 });
        }
        Command::Enumerate { max_genus, max_edges, max_legs, max_deg, certify, jobs } => {
            let caps = Caps::new(max_genus, max_edges, max_legs, max_deg);
            let graphs = enumerate_flat_graphs(&caps);
            let verdicts: Vec<Option<String>> = if certify {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(jobs.unwrap_or(0))
                    .build()
                    .map_err(|e| usage(e.to_string()))?;
                pool.install(|| {
                    graphs
                        .par_iter()
                        .map(|g| match certify_vanishing(g) {
                            Ok(c) => Some(c.verdict.name().to_string()),
                            Err(e) => Some(format!("Error: {e}")),
                        })
                        .collect()
                })
            } else {
                vec![None; graphs.len()]
            };
            for (g, verdict) in graphs.iter().zip(verdicts) {
                let line = match verdict {
                    Some(v) => format!("{}\t{v}", write_graph(g)),
                    None => write_graph(g),
                };
                writeln!(out, "{line}").map_err(|e| usage(e.to_string()))?;
            }
            return Ok(0);
        }
        Command::LgIndex { genus, m_max, d_max } => {
            let rows = potential_index_set(genus, m_max, d_max);
            let mut lines = Vec::with_capacity(rows.len() + 1);
            if pretty {
                lines.push("g   m   d'  vdim".to_string());
            }
            for (m, d) in rows {
                let k = lg_vdim(LgIndex { genus, m, k: m, d_prime: d }).expect("admissible by construction");
                lines.push(if pretty {
                    format!("{genus:<3} {m:<3} {d:<3} {k}")
                } else {
                    json!({ "g": genus, "m": m, "d_prime": d, "vdim": k }).to_string()
                });
            }
            lines.join("\n")
        }
    };
    if !text.is_empty() {
        writeln!(out, "{text}").map_err(|e| usage(e.to_string()))?;
    }
    Ok(0)
}

/// Runs the command line with the given arguments (including the program
/// name) and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}

//! Command-line interface: `check` (propagation only), `solve` (complete
//! search), and `table` (derived cardinal composition tables).
//!
//! Exit codes: 0 consistent (or consistent-so-far), 1 inconsistent, 2
//! resource limit, 64 usage error, 65 parse/read error.

use std::path::PathBuf;
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::cardinal::{derive_table, Atom, Calculus};
use crate::lp::translate_bsp;
use crate::network::Network;
use crate::parse::{parse_instance, Instance};
use crate::solver::{check_pc_only, solve, verify_witness, PcCheck, SearchConfig, SolveStatus};

pub const EXIT_CONSISTENT: i32 = 0;
pub const EXIT_INCONSISTENT: i32 = 1;
pub const EXIT_LIMIT: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;
const EXIT_INTERNAL: i32 = 70;

#[derive(Parser)]
#[command(
    name = "scsp",
    version,
    about = "Reasoner for angular-sector constraint networks over 2D points"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run path consistency only and report whether it detects an inconsistency.
    Check {
        file: PathBuf,
        /// Emit a machine-readable JSON report.
        #[arg(long)]
        json: bool,
        /// Print propagation statistics.
        #[arg(long)]
        stats: bool,
        /// Dump the linear system of the propagated network when it is basic.
        #[arg(long)]
        dump_lp: bool,
    },
    /// Decide consistency completely and print a witness placement if one exists.
    Solve {
        file: PathBuf,
        /// Random seed (reserved for randomized heuristics; kept in reports).
        #[arg(long)]
        seed: Option<u64>,
        /// Search node budget.
        #[arg(long)]
        steps: Option<u64>,
        /// Wall-clock budget in milliseconds.
        #[arg(long)]
        time_ms: Option<u64>,
        /// Emit a machine-readable JSON report.
        #[arg(long)]
        json: bool,
        /// Print search statistics.
        #[arg(long)]
        stats: bool,
        /// Dump every leaf linear system in visit order.
        #[arg(long)]
        dump_lp: bool,
        /// Explore root branches in parallel (identical results).
        #[arg(long)]
        parallel: bool,
        /// Re-verify the witness against the instance and say so.
        #[arg(long, hide = true)]
        verify: bool,
    },
    /// Print the derived 9x9 composition table of a cardinal calculus.
    Table {
        /// `cone` or `proj`.
        calculus: String,
    },
}

#[derive(Serialize)]
struct JsonWitnessVar {
    var: String,
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct JsonStats {
    nodes: u64,
    pc_calls: u64,
    lp_calls: u64,
}

#[derive(Serialize)]
struct JsonSolveReport {
    status: &'static str,
    witness: Option<Vec<JsonWitnessVar>>,
    stats: JsonStats,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct JsonCheckReport {
    status: &'static str,
    edge: Option<(usize, usize)>,
    stats: JsonCheckStats,
}

#[derive(Serialize)]
struct JsonCheckStats {
    queue_pops: u64,
    total_updates: u64,
    holes: usize,
    holes_plus: usize,
}

/// Entry point; returns the process exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match cli.cmd {
        Cmd::Check {
            file,
            json,
            stats,
            dump_lp,
        } => cmd_check(&file, json, stats, dump_lp),
        Cmd::Solve {
            file,
            seed,
            steps,
            time_ms,
            json,
            stats,
            dump_lp,
            parallel,
            verify,
        } => cmd_solve(
            &file, seed, steps, time_ms, json, stats, dump_lp, parallel, verify,
        ),
        Cmd::Table { calculus } => cmd_table(&calculus),
    }
}

fn load_instance(file: &PathBuf) -> Result<Instance, i32> {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {}", file.display(), e);
            return Err(EXIT_PARSE);
        }
    };
    match parse_instance(&text) {
        Ok(inst) => {
            for w in &inst.warnings {
                eprintln!("warning: {w}");
            }
            Ok(inst)
        }
        Err(e) => {
            eprintln!("{}:{}", file.display(), e);
            Err(EXIT_PARSE)
        }
    }
}

fn cmd_check(file: &PathBuf, json: bool, stats: bool, dump_lp: bool) -> i32 {
    let inst = match load_instance(file) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let outcome = check_pc_only(&inst.network);
    let (status_line, status_tag, edge, pc_stats) = match &outcome {
        PcCheck::ConsistentSoFar(s) => (
            "PC-CONSISTENT-SO-FAR".to_string(),
            "pc-consistent-so-far",
            None,
            s,
        ),
        PcCheck::Inconsistent { edge, stats } => (
            format!("INCONSISTENT (edge {},{})", edge.0, edge.1),
            "inconsistent",
            Some(*edge),
            stats,
        ),
    };
    if json {
        let report = JsonCheckReport {
            status: status_tag,
            edge,
            stats: JsonCheckStats {
                queue_pops: pc_stats.queue_pops,
                total_updates: pc_stats.total_updates(),
                holes: pc_stats.holes_count,
                holes_plus: pc_stats.holes_plus_count,
            },
        };
        println!(
            "{}",
            serde_json::to_string(&report).expect("report serializes")
        );
    } else {
        println!("{status_line}");
        if stats {
            println!(
                "stats: queue_pops={} updates={} holes={} holes_plus={}",
                pc_stats.queue_pops,
                pc_stats.total_updates(),
                pc_stats.holes_count,
                pc_stats.holes_plus_count
            );
        }
        if dump_lp {
            let mut propagated = inst.network.clone();
            let _ = propagated.path_consistency();
            match translate_bsp(&propagated) {
                Ok(sys) => print!("{}", sys.dump()),
                Err(e) => eprintln!("note: no linear system to dump ({e})"),
            }
        }
    }
    if outcome.is_consistent_so_far() {
        EXIT_CONSISTENT
    } else {
        EXIT_INCONSISTENT
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    file: &PathBuf,
    seed: Option<u64>,
    steps: Option<u64>,
    time_ms: Option<u64>,
    json: bool,
    stats: bool,
    dump_lp: bool,
    parallel: bool,
    verify: bool,
) -> i32 {
    let inst = match load_instance(file) {
        Ok(i) => i,
        Err(code) => return code,
    };
    let cfg = SearchConfig {
        seed: seed.or(inst.options.seed).unwrap_or(0),
        step_limit: steps.or(inst.options.steps),
        time_limit: time_ms.or(inst.options.time_ms).map(Duration::from_millis),
        parallel,
        dump_lp,
        ..SearchConfig::default()
    };
    let outcome = solve(&inst.network, &cfg);
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }

    let status_tag = match outcome.status {
        SolveStatus::Consistent => "consistent",
        SolveStatus::Inconsistent => "inconsistent",
        SolveStatus::ResourceLimit => "limit",
    };
    if json {
        let witness = outcome
            .witness
            .as_ref()
            .map(|w| witness_vars(&inst.network, w));
        let report = JsonSolveReport {
            status: status_tag,
            witness,
            stats: JsonStats {
                nodes: outcome.stats.nodes,
                pc_calls: outcome.stats.pc_calls,
                lp_calls: outcome.stats.lp_calls,
            },
            warnings: outcome.warnings.clone(),
        };
        println!(
            "{}",
            serde_json::to_string(&report).expect("report serializes")
        );
    } else {
        match outcome.status {
            SolveStatus::Consistent => {
                println!("CONSISTENT");
                for v in witness_vars(
                    &inst.network,
                    outcome.witness.as_ref().expect("consistent has witness"),
                ) {
                    println!("var {} = ({}, {})", v.var, v.x, v.y);
                }
            }
            SolveStatus::Inconsistent => println!("INCONSISTENT"),
            SolveStatus::ResourceLimit => println!("LIMIT"),
        }
        if stats {
            println!(
                "stats: nodes={} pc_calls={} lp_calls={} seed={}",
                outcome.stats.nodes, outcome.stats.pc_calls, outcome.stats.lp_calls, cfg.seed
            );
        }
        for dump in &outcome.lp_dumps {
            print!("{dump}");
        }
    }

    if let Some(witness) = &outcome.witness {
        if !verify_witness(&inst.network, witness) {
            eprintln!("error: witness failed re-verification against the instance");
            return EXIT_INTERNAL;
        }
        if verify && !json {
            println!("verify: witness satisfies all constraints");
        }
    }
    match outcome.status {
        SolveStatus::Consistent => EXIT_CONSISTENT,
        SolveStatus::Inconsistent => EXIT_INCONSISTENT,
        SolveStatus::ResourceLimit => EXIT_LIMIT,
    }
}

fn witness_vars(net: &Network, witness: &[crate::relation::Point]) -> Vec<JsonWitnessVar> {
    (1..net.num_vars())
        .map(|i| JsonWitnessVar {
            var: net
                .name(i)
                .map(str::to_string)
                .unwrap_or_else(|| format!("v{i}")),
            x: witness[i].x,
            y: witness[i].y,
        })
        .collect()
}

fn cmd_table(calculus: &str) -> i32 {
    let calculus = match calculus {
        "cone" => Calculus::Cone,
        "proj" => Calculus::Proj,
        other => {
            eprintln!("unknown calculus `{other}`; expected `cone` or `proj`");
            return EXIT_USAGE;
        }
    };
    print!("{}", render_table(calculus));
    EXIT_CONSISTENT
}

/// Fixed-grid rendering of the derived table; `*` abbreviates the universal
/// entry.
pub fn render_table(calculus: Calculus) -> String {
    let table = derive_table(calculus);
    let cell = |entry: &crate::cardinal::TableEntry| -> String {
        if entry.is_universal() {
            "*".to_string()
        } else {
            entry
                .atoms
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join("|")
        }
    };
    let rendered: Vec<Vec<String>> = table
        .iter()
        .map(|row| row.iter().map(cell).collect())
        .collect();
    let mut widths: Vec<usize> = Atom::ALL.iter().map(|a| a.to_string().len()).collect();
    for row in &rendered {
        for (c, text) in row.iter().enumerate() {
            widths[c] = widths[c].max(text.len());
        }
    }
    let head_width = Atom::ALL
        .iter()
        .map(|a| a.to_string().len())
        .chain([format!("{calculus}").len()])
        .max()
        .unwrap_or(2);

    let mut out = String::new();
    let mut line = format!("{:>head_width$}", format!("{calculus}"));
    for (c, atom) in Atom::ALL.iter().enumerate() {
        line.push_str(&format!(
            "  {:<width$}",
            atom.to_string(),
            width = widths[c]
        ));
    }
    out.push_str(line.trim_end());
    out.push('\n');
    for (r, atom) in Atom::ALL.iter().enumerate() {
        let mut line = format!("{:>head_width$}", atom.to_string());
        for (c, text) in rendered[r].iter().enumerate() {
            line.push_str(&format!("  {:<width$}", text, width = widths[c]));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

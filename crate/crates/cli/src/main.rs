mod commands;
mod serve;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;
use treeot_core::sync::Topology;

#[derive(Debug, Parser)]
#[command(name = "treeot", version, about = "Operational transformation for ordered trees and JSON")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Lists,
    Trees,
}

/// A fixed client count `C` or an inclusive range `A-B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct ClientRange(usize, usize);

impl FromStr for ClientRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
        match s.split_once('-') {
            Some((a, b)) => Ok(ClientRange(parse(a)?, parse(b)?)),
            None => parse(s).map(|n| ClientRange(n, n)),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exhaustively check the convergence property on small documents.
    Verify {
        #[arg(long, value_enum, default_value = "trees")]
        target: Target,
        #[arg(long, default_value_t = 6)]
        max_nodes: usize,
        #[arg(long, default_value_t = 3)]
        max_branch: usize,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
        /// Longest list (lists target).
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// Node values; defaults to "v" for trees and "ab" for lists.
        #[arg(long)]
        alphabet: Option<String>,
        /// Where to write the JSON report (stdout if omitted).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run randomized client/server sessions and check convergence.
    Simulate {
        /// Clients per session, `C` or `A-B`.
        #[arg(long, default_value = "2-4")]
        clients: ClientRange,
        /// Local edits per client.
        #[arg(long, default_value_t = 20)]
        ops: usize,
        #[arg(long, default_value_t = 1000)]
        sessions: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Event traces of diverging sessions (default: simulate-trace.json
        /// when there is a divergence).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Serve documents over WebSocket at /ws, and static files at /ui.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: String,
        /// Initial document; its file stem is the document id. Repeatable.
        #[arg(long, required = true)]
        doc: Vec<PathBuf>,
        /// Op log; replayed on start. With several documents, each gets
        /// `<log>.<doc id>`.
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long, default_value = "star")]
        topology: Topology,
        /// Directory served under /ui.
        #[arg(long)]
        ui: Option<PathBuf>,
    },
    /// Apply logged envelopes to a JSON document offline.
    Apply {
        #[arg(long)]
        doc: PathBuf,
        #[arg(long)]
        ops: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    /// A check ran and found problems.
    #[error("{0}")]
    Failed(String),
    #[error("{0}")]
    Startup(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) | CliError::Startup(_) | CliError::Io { .. } => 2,
        }
    }
}

fn parse_addr(s: &str) -> Result<SocketAddr, CliError> {
    s.parse().map_err(|e| CliError::Usage(format!("--addr {s:?}: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Verify { target, max_nodes, max_branch, max_depth, max_len, alphabet, report } => {
            let opts = commands::VerifyOpts {
                lists: target == Target::Lists,
                max_nodes,
                max_branch,
                max_depth,
                max_len,
                alphabet,
            };
            commands::verify(&opts, report.as_deref())
        }
        Command::Simulate { clients, ops, sessions, seed, report, trace } => {
            let cfg = treeot_core::verify::SimConfig {
                min_clients: clients.0,
                max_clients: clients.1,
                max_ops: ops,
                sessions,
                seed,
            };
            commands::simulate(&cfg, report.as_deref(), trace.as_deref())
        }
        Command::Serve { addr, doc, log, topology, ui } => {
            topology.require_star().map_err(|e| CliError::Usage(e.to_string()))?;
            let addr = parse_addr(&addr)?;
            let opts = serve::ServeOpts { addr, docs: doc, log, ui };
            serve::run(opts)
        }
        Command::Apply { doc, ops, out } => commands::apply(&doc, &ops, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("OT_LOG_LEVEL", "info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn client_ranges() {
        assert_eq!("3".parse::<ClientRange>(), Ok(ClientRange(3, 3)));
        assert_eq!("2-4".parse::<ClientRange>(), Ok(ClientRange(2, 4)));
        assert!("x-4".parse::<ClientRange>().is_err());
    }

    #[test]
    fn parser_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn unknown_flag_rejected() {
        assert!(Cli::try_parse_from(["treeot", "verify", "--bogus"]).is_err());
        assert!(Cli::try_parse_from(["treeot"]).is_err());
    }
}

use std::fs;
use std::path::Path;

use serde::Serialize;
use treeot_core::json_model::{json_to_tree, tree_to_json, DocTreeValue};
use treeot_core::sync::{OpEnvelope, ServerState};
use treeot_core::verify::{
    default_payloads, exhaustive_list_tp1, exhaustive_tp1, simulate_with_traces, EnumConfig, SimConfig, SimReport,
};
use treeot_core::Tree;

use crate::CliError;

pub struct VerifyOpts {
    pub lists: bool,
    pub max_nodes: usize,
    pub max_branch: usize,
    pub max_depth: usize,
    pub max_len: usize,
    pub alphabet: Option<String>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn write(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn emit<T: Serialize>(value: &T, to: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_vec_pretty(value).expect("reports encode");
    text.push(b'\n');
    match to {
        Some(path) => write(path, &text),
        None => {
            print!("{}", String::from_utf8_lossy(&text));
            Ok(())
        }
    }
}

pub fn verify(opts: &VerifyOpts, report: Option<&Path>) -> Result<(), CliError> {
    let (cases, violations) = if opts.lists {
        let alphabet: Vec<char> = opts.alphabet.as_deref().unwrap_or("ab").chars().collect();
        if alphabet.is_empty() {
            return Err(CliError::Usage("--alphabet must not be empty".into()));
        }
        let r = exhaustive_list_tp1(opts.max_len, &alphabet);
        emit(&r, report)?;
        (r.cases_total, r.violations.len())
    } else {
        let cfg = EnumConfig {
            max_nodes: opts.max_nodes,
            max_branch: opts.max_branch,
            max_depth: opts.max_depth,
            value_alphabet: opts.alphabet.as_deref().unwrap_or("v").chars().collect(),
            payload_pool: default_payloads(),
        };
        let r = exhaustive_tp1(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
        emit(&r, report)?;
        (r.cases_total, r.violations.len())
    };
    eprintln!("{cases} cases, {violations} violations");
    if violations == 0 {
        Ok(())
    } else {
        Err(CliError::Failed(format!("{violations} convergence violations")))
    }
}

pub fn simulate(cfg: &SimConfig, report: Option<&Path>, trace: Option<&Path>) -> Result<(), CliError> {
    let outcomes = simulate_with_traces(cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    let r = SimReport::from_outcomes(cfg, &outcomes);
    emit(&r, report)?;
    eprintln!("{}/{} sessions converged", r.converged, r.sessions);
    if r.passed() {
        return Ok(());
    }
    let trace_path = trace.unwrap_or(Path::new("simulate-trace.json"));
    emit(&r.divergences, Some(trace_path))?;
    Err(CliError::Failed(format!(
        "{} sessions diverged; traces in {}",
        r.sessions - r.converged,
        trace_path.display()
    )))
}

pub fn apply(doc: &Path, ops: &Path, out: &Path) -> Result<(), CliError> {
    let json: serde_json::Value =
        serde_json::from_str(&read(doc)?).map_err(|e| CliError::Usage(format!("{}: {e}", doc.display())))?;
    let mut server: ServerState<DocTreeValue> = ServerState::new(json_to_tree(&json));
    for (i, line) in read(ops)?.lines().enumerate() {
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let env: OpEnvelope<DocTreeValue> = serde_json::from_str(line)
            .map_err(|e| CliError::Failed(format!("{}:{n}: cannot decode envelope: {e}", ops.display())))?;
        server.ingest(&env).map_err(|e| CliError::Failed(format!("{}:{n}: {e}", ops.display())))?;
    }
    let result = to_json(server.doc()).map_err(CliError::Failed)?;
    let mut text = serde_json::to_vec_pretty(&result).expect("values encode");
    text.push(b'\n');
    write(out, &text)
}

fn to_json(t: &Tree<DocTreeValue>) -> Result<serde_json::Value, String> {
    tree_to_json(t).map_err(|e| format!("result is not a JSON document: {e}"))
}

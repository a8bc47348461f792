//! Benchmark execution: Task-1 choice scoring, Task-2 batch verification and
//! a cached model gateway.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod choice;
pub mod gateway;
mod task2;

pub use choice::{parse_choice, score_task1, ItemScore, ScoreError, Task1Score, Verdict};
pub use gateway::{call_gateway, GatewayConfig, GatewayError};
pub use task2::{extract_submission, run_task2, RunError, Task2Run};

/// One model response as stored in a line-delimited response file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseRecord {
    pub instance_id: String,
    pub raw_text: String,
    #[serde(default = "default_task")]
    pub task: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retries: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn default_task() -> u8 {
    2
}

impl ResponseRecord {
    pub fn new(instance_id: impl Into<String>, raw_text: impl Into<String>, task: u8) -> Self {
        Self { instance_id: instance_id.into(), raw_text: raw_text.into(), task, latency_ms: None, retries: None, error: None }
    }
}

#[derive(Debug, Error)]
#[error("line {line}: {source}")]
pub struct LineError {
    pub line: usize,
    #[source]
    pub source: serde_json::Error,
}

pub fn read_responses(text: &str) -> Result<Vec<ResponseRecord>, LineError> {
    parse_lines(text)
}

pub fn write_responses(records: &[ResponseRecord]) -> String {
    records.iter().map(|r| serde_json::to_string(r).expect("records serialize") + "\n").collect()
}

#[derive(Deserialize)]
struct KeyLine {
    instance_id: String,
    answer: String,
}

/// Answer keys from Task-1 sidecar lines (`{"instance_id", "answer", ...}`).
pub fn read_keys(text: &str) -> Result<HashMap<String, char>, LineError> {
    let lines: Vec<KeyLine> = parse_lines(text)?;
    Ok(lines.into_iter().filter_map(|k| Some((k.instance_id, k.answer.trim().chars().next()?))).collect())
}

fn parse_lines<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>, LineError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| LineError { line: i + 1, source }))
        .collect()
}

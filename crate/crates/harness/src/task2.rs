use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;
use tangram_core::tangram::TceInstance;
use tangram_core::verify::{aggregate, evaluate, CorpusReport, VerificationRecord, VerifyConfig};
use thiserror::Error;

use crate::ResponseRecord;

/// Candidate TCE document text inside a model response: the last fenced
/// block that holds a brace, else the longest balanced brace span, else
/// empty.
pub fn extract_submission(text: &str) -> String {
    let fences = fenced_blocks(text);
    if let Some(b) = fences.iter().rev().find(|b| b.contains('{')).or(fences.last()) {
        return b.trim().to_owned();
    }
    longest_brace_span(text).unwrap_or_default().to_owned()
}

fn fenced_blocks(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find("```") {
        let after = &rest[open + 3..];
        let body_start = after.find('\n').map_or(after.len(), |i| i + 1);
        let body = &after[body_start..];
        match body.find("```") {
            Some(close) => {
                out.push(&body[..close]);
                rest = &body[close + 3..];
            }
            None => break,
        }
    }
    out
}

fn longest_brace_span(text: &str) -> Option<&str> {
    let bytes = text.as_bytes();
    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'{' {
            i += 1;
            continue;
        }
        let (mut depth, mut in_str, mut esc) = (0usize, false, false);
        let mut end = None;
        for (j, &c) in bytes.iter().enumerate().skip(i) {
            if in_str {
                match (esc, c) {
                    (true, _) => esc = false,
                    (false, b'\\') => esc = true,
                    (false, b'"') => in_str = false,
                    _ => {}
                }
                continue;
            }
            match c {
                b'"' => in_str = true,
                b'{' => depth += 1,
                b'}' => {
                    depth -= 1;
                    if depth == 0 {
                        end = Some(j + 1);
                        break;
                    }
                }
                _ => {}
            }
        }
        match end {
            Some(e) => {
                if best.is_none_or(|(s, t)| e - i > t - s) {
                    best = Some((i, e));
                }
                i = e;
            }
            None => i += 1,
        }
    }
    best.map(|(s, e)| &text[s..e])
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RunError {
    #[error("instance {0} appears more than once in the response file")]
    DuplicateResponse(String),
    #[error("response for unknown instance {0}")]
    UnknownInstance(String),
    #[error("no instances to evaluate")]
    Empty,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Task2Run {
    pub report: CorpusReport,
    pub records: Vec<VerificationRecord>,
}

/// Verifies every truth instance against its response (an instance without
/// a response is scored on empty text). Records come back in instance-id
/// order whatever the response order.
pub fn run_task2(responses: &[ResponseRecord], truths: &[TceInstance], cfg: &VerifyConfig) -> Result<Task2Run, RunError> {
    let known: HashSet<&str> = truths.iter().map(|t| t.instance_id.as_str()).collect();
    let mut by_id: BTreeMap<&str, &str> = BTreeMap::new();
    for r in responses {
        if !known.contains(r.instance_id.as_str()) {
            return Err(RunError::UnknownInstance(r.instance_id.clone()));
        }
        if by_id.insert(&r.instance_id, &r.raw_text).is_some() {
            return Err(RunError::DuplicateResponse(r.instance_id.clone()));
        }
    }
    let mut ordered: Vec<&TceInstance> = truths.iter().collect();
    ordered.sort_by(|a, b| a.instance_id.cmp(&b.instance_id));
    let records: Vec<VerificationRecord> = ordered
        .par_iter()
        .map(|t| {
            let doc = extract_submission(by_id.get(t.instance_id.as_str()).copied().unwrap_or(""));
            evaluate(&t.instance_id, &doc, &t.target_outline, cfg)
        })
        .collect();
    let report = aggregate(&records).map_err(|_| RunError::Empty)?;
    Ok(Task2Run { report, records })
}

use std::collections::{BTreeSet, HashMap};
use std::sync::LazyLock;

use regex::Regex;
use serde::Serialize;
use thiserror::Error;

use crate::ResponseRecord;

static ANSWER: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i:answer)(?:\s+(?i:is))?[\s:*\-=>(\[]*(?:(?i:option)\s*)?\(?([A-D])\b").expect("valid pattern")
});
static OPTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i:option)\s*\(?([A-D])\b").expect("valid pattern"));
static LETTER_LINE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?m)^[\s*_`>#(\[]*([A-D])[\s*_`.)\]]*$").expect("valid pattern"));
static TOKEN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b([A-D])\b").expect("valid pattern"));

/// Option letter mined from a free-text answer; `None` when no option can be
/// mapped unambiguously.
///
/// The last explicit answer pattern wins ("answer is B", "option C", a line
/// holding only a letter). Otherwise a single distinct standalone letter is
/// taken; anything else is invalid.
pub fn parse_choice(text: &str) -> Option<char> {
    let last = [&*ANSWER, &*OPTION, &*LETTER_LINE]
        .iter()
        .flat_map(|re| re.captures_iter(text).map(|c| c.get(1).expect("group")))
        .max_by_key(|m| m.start());
    if let Some(m) = last {
        return m.as_str().chars().next();
    }
    let letters: BTreeSet<char> = TOKEN.captures_iter(text).filter_map(|c| c[1].chars().next()).collect();
    (letters.len() == 1).then(|| *letters.first().expect("one letter"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Correct,
    Wrong,
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ItemScore {
    pub instance_id: String,
    pub predicted: Option<char>,
    pub answer: char,
    pub verdict: Verdict,
}

/// Accuracy and invalid rate in percent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Task1Score {
    pub n: usize,
    pub acc: f64,
    pub wrong: f64,
    pub invalid: f64,
    pub items: Vec<ItemScore>,
}

impl Task1Score {
    pub fn render_text(&self) -> String {
        format!("N  Acc  Invalid\n{}  {:.2}  {:.2}\n", self.n, self.acc, self.invalid)
    }

    pub fn render_csv(&self) -> String {
        format!("Acc,Invalid\n{:.2},{:.2}\n", self.acc, self.invalid)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScoreError {
    #[error("no answer key for instance {0}")]
    MissingKey(String),
    #[error("no responses to score")]
    Empty,
}

pub fn score_task1(responses: &[ResponseRecord], keys: &HashMap<String, char>) -> Result<Task1Score, ScoreError> {
    if responses.is_empty() {
        return Err(ScoreError::Empty);
    }
    let mut items = Vec::with_capacity(responses.len());
    for r in responses {
        let answer = *keys.get(&r.instance_id).ok_or_else(|| ScoreError::MissingKey(r.instance_id.clone()))?;
        let predicted = parse_choice(&r.raw_text);
        let verdict = match predicted {
            None => Verdict::Invalid,
            Some(p) if p == answer => Verdict::Correct,
            Some(_) => Verdict::Wrong,
        };
        items.push(ItemScore { instance_id: r.instance_id.clone(), predicted, answer, verdict });
    }
    let n = items.len();
    let pct = |v: Verdict| 100.0 * items.iter().filter(|i| i.verdict == v).count() as f64 / n as f64;
    Ok(Task1Score { n, acc: pct(Verdict::Correct), wrong: pct(Verdict::Wrong), invalid: pct(Verdict::Invalid), items })
}

use std::collections::HashSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::tangram::{silhouette_key, Outline, TceInstance};

pub const LABELS: [char; 4] = ['A', 'B', 'C', 'D'];

#[derive(Clone, Debug, PartialEq)]
pub struct McOption {
    pub label: char,
    pub source_id: String,
    pub outline: Outline,
}

/// A four-way silhouette recognition item.
#[derive(Clone, Debug, PartialEq)]
pub struct McItem {
    pub instance_id: String,
    pub options: Vec<McOption>,
    pub answer: char,
    pub seed: u64,
}

impl McItem {
    pub fn sidecar(&self) -> Value {
        json!({
            "instance_id": self.instance_id,
            "answer": self.answer.to_string(),
            "seed": self.seed,
            "options": self.options.iter().map(|o| o.source_id.clone()).collect::<Vec<_>>(),
        })
    }

    pub fn render_svg(&self) -> String {
        super::render::render_mc(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Task1Error {
    #[error("need 3 distractors not congruent to the truth, pool has {available}")]
    InsufficientPool { available: usize },
    #[error("outline {0} is not exact")]
    Approximate(String),
}

/// FNV-1a over the seed and the instance id, so that each item's randomness
/// is independent of corpus order.
pub fn instance_seed(seed: u64, instance_id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in seed.to_le_bytes().iter().chain(instance_id.as_bytes()) {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Candidate distractor outlines with their congruence keys computed once.
#[derive(Clone, Debug)]
pub struct DistractorPool {
    entries: Vec<(String, Outline, String)>,
}

impl DistractorPool {
    pub fn new(entries: &[(String, Outline)]) -> Result<Self, Task1Error> {
        let entries = entries
            .par_iter()
            .map(|(id, o)| Ok((id.clone(), o.clone(), silhouette_key(o).map_err(|_| Task1Error::Approximate(id.clone()))?)))
            .collect::<Result<Vec<_>, Task1Error>>()?;
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Samples three pairwise distinct, non-congruent distractors from `pool`
/// and shuffles them with the truth.
pub fn gen_task1(i: &TceInstance, pool: &DistractorPool, seed: u64) -> Result<McItem, Task1Error> {
    let truth = silhouette_key(&i.target_outline).map_err(|_| Task1Error::Approximate(i.instance_id.clone()))?;
    let mut seen: HashSet<&str> = HashSet::from([truth.as_str()]);
    let mut candidates: Vec<(&String, &Outline)> = Vec::new();
    for (id, o, key) in pool.entries.iter().filter(|(id, ..)| *id != i.instance_id) {
        if seen.insert(key) {
            candidates.push((id, o));
        }
    }
    if candidates.len() < 3 {
        return Err(Task1Error::InsufficientPool { available: candidates.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(seed, &i.instance_id));
    let mut picks: Vec<(String, Outline)> = vec![(i.instance_id.clone(), i.target_outline.clone())];
    picks.extend(candidates.choose_multiple(&mut rng, 3).map(|&(id, o)| (id.clone(), o.clone())));
    let mut order: Vec<usize> = (0..4).collect();
    order.shuffle(&mut rng);
    let options: Vec<McOption> = order
        .iter()
        .zip(LABELS)
        .map(|(&k, label)| McOption { label, source_id: picks[k].0.clone(), outline: picks[k].1.clone() })
        .collect();
    let answer = options.iter().find(|o| o.source_id == i.instance_id).expect("truth is an option").label;
    Ok(McItem { instance_id: i.instance_id.clone(), options, answer, seed })
}

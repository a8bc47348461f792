use std::collections::{BTreeSet, HashSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::lattice::{orientations, Atom, Frame, FrameKind};
use crate::geom::Point;
use crate::pipeline::normalize_pieces;
use crate::tangram::{recover_transform, silhouette_key, PieceKind, PieceState, Shape, TceInstance};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenerateConfig {
    /// Growth attempts allowed per requested instance.
    pub attempts_per_instance: u32,
    /// Skip outlines congruent to one already produced.
    pub distinct_silhouettes: bool,
}

impl Default for GenerateConfig {
    fn default() -> Self {
        Self { attempts_per_instance: 200, distinct_silhouettes: true }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub instances: Vec<TceInstance>,
    /// Set when the attempt budget ran out before `count` instances.
    pub warning: Option<String>,
}

const ORDER: [Shape; 7] = [
    Shape::LargeTriangle,
    Shape::LargeTriangle,
    Shape::MediumTriangle,
    Shape::SmallTriangle,
    Shape::SmallTriangle,
    Shape::Square,
    Shape::Parallelogram,
];

/// Random lattice assemblies grown piece by piece, each new piece sharing an
/// edge with the ones already placed; kept when hole-free and normalizable.
pub fn generate_instances(count: usize, seed: u64, cfg: &GenerateConfig) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::with_capacity(count);
    let mut keys: HashSet<String> = HashSet::new();
    let mut ids: HashSet<String> = HashSet::new();
    let budget = cfg.attempts_per_instance as usize * count;
    let mut attempts = 0;
    while instances.len() < count && attempts < budget {
        attempts += 1;
        let Some(pieces) = grow(&mut rng) else { continue };
        let Ok(inst) = normalize_pieces(pieces, None) else { continue };
        if cfg.distinct_silhouettes {
            let key = silhouette_key(&inst.target_outline).expect("generated outlines are exact");
            if !keys.insert(key) {
                continue;
            }
        }
        if ids.insert(inst.instance_id.clone()) {
            instances.push(inst);
        }
    }
    let warning = (instances.len() < count).then(|| {
        let w = format!("generated {} of {count} instances within {budget} attempts", instances.len());
        log::warn!("{w}");
        w
    });
    Generated { instances, warning }
}

fn grow(rng: &mut ChaCha8Rng) -> Option<Vec<PieceState>> {
    let frame = Frame::new(if rng.random_bool(0.5) { FrameKind::Axis } else { FrameKind::Diagonal }, Point::origin());
    let mut order = ORDER;
    order.shuffle(rng);
    let mut occupied: HashSet<Atom> = HashSet::new();
    let mut placed: Vec<(Shape, Vec<(i64, i64)>)> = Vec::new();
    for (n, shape) in order.into_iter().enumerate() {
        let orients = orientations(shape);
        let choice = if n == 0 {
            let (ring, atoms) = orients.choose(rng)?.clone();
            Some((ring, atoms))
        } else {
            let frontier: BTreeSet<Atom> = occupied.iter().flat_map(|a| a.neighbours()).filter(|a| !occupied.contains(a)).collect();
            let mut options: BTreeSet<(usize, i64, i64)> = BTreeSet::new();
            for (k, (_, atoms)) in orients.iter().enumerate() {
                for f in &frontier {
                    for b in atoms.iter().filter(|b| b.q == f.q) {
                        let (di, dj) = (f.i - b.i, f.j - b.j);
                        if atoms.iter().all(|a| !occupied.contains(&Atom { i: a.i + di, j: a.j + dj, q: a.q })) {
                            options.insert((k, di, dj));
                        }
                    }
                }
            }
            let options: Vec<_> = options.into_iter().collect();
            options.choose(rng).map(|&(k, di, dj)| {
                let (ring, atoms) = &orients[k];
                (
                    ring.iter().map(|&(x, y)| (x + di, y + dj)).collect(),
                    atoms.iter().map(|a| Atom { i: a.i + di, j: a.j + dj, q: a.q }).collect(),
                )
            })
        };
        let (ring, atoms): (Vec<(i64, i64)>, Vec<Atom>) = choice?;
        occupied.extend(atoms);
        placed.push((shape, ring));
    }
    if encloses_gap(&occupied) {
        return None;
    }
    let mut used: Vec<PieceKind> = Vec::new();
    let mut out = Vec::with_capacity(7);
    for (shape, ring) in placed {
        let kind = PieceKind::ALL.into_iter().find(|k| k.shape() == shape && !used.contains(k))?;
        used.push(kind);
        let t = recover_transform(kind, &frame.polygon_to_world(&ring)).ok()?;
        out.push(PieceState::placed(kind, t));
    }
    out.sort_by_key(|p| p.kind);
    Some(out)
}

/// Whether some free atom inside the bounding box cannot reach the outside
/// through free atoms.
fn encloses_gap(occupied: &HashSet<Atom>) -> bool {
    let i0 = occupied.iter().map(|a| a.i).min().unwrap_or(0) - 1;
    let i1 = occupied.iter().map(|a| a.i).max().unwrap_or(0) + 1;
    let j0 = occupied.iter().map(|a| a.j).min().unwrap_or(0) - 1;
    let j1 = occupied.iter().map(|a| a.j).max().unwrap_or(0) + 1;
    let within = |a: &Atom| a.i >= i0 && a.i <= i1 && a.j >= j0 && a.j <= j1;
    let start = Atom { i: i0, j: j0, q: 0 };
    let mut seen: HashSet<Atom> = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(a) = stack.pop() {
        for b in a.neighbours() {
            if within(&b) && !occupied.contains(&b) && seen.insert(b) {
                stack.push(b);
            }
        }
    }
    let total = ((i1 - i0 + 1) * (j1 - j0 + 1) * 4) as usize;
    seen.len() + occupied.len() != total
}

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use super::lattice::{atoms_in, lattice_edges, orientations, Atom, Frame, FrameKind};
use crate::exactnum::{ExactValue, Scalar};
use crate::geom::{polygon_area, Decomposition, Point};
use crate::tangram::{recover_transform, Outline, PieceKind, PieceState, Shape};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolverConfig {
    pub max_nodes: u64,
    pub time_limit: Duration,
    /// Keep searching after the first solution.
    pub find_all: bool,
    /// Placements are tried in their enumeration order. The search is
    /// sequential, so this only documents the contract.
    pub deterministic: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_nodes: 10_000_000,
            time_limit: Duration::from_secs(60),
            find_all: false,
            deterministic: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("target outline has approximate coordinates")]
    ApproximateOutline,
    #[error("solver budgets must be positive")]
    BadBudget,
}

/// Atoms covering a lattice-aligned target, with the frame they live in.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetCells {
    pub frame: Frame,
    pub atoms: Vec<Atom>,
}

impl TargetCells {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

/// Lattice decomposition of an outline: `None` unless the area is exactly 8
/// and every vertex and edge lies on the axis or the diagonal lattice.
pub fn decompose_target(t: &Outline) -> Result<Option<TargetCells>, SolveError> {
    if !t.is_exact() {
        return Err(SolveError::ApproximateOutline);
    }
    if polygon_area(&t.polygon) != Scalar::from(8) {
        return Ok(None);
    }
    Ok(lattice_cells(t))
}

pub(crate) fn lattice_cells(t: &Outline) -> Option<TargetCells> {
    let origin = t.polygon.vertices().first()?.clone();
    for kind in [FrameKind::Axis, FrameKind::Diagonal] {
        let frame = Frame::new(kind, origin.clone());
        let ring: Option<Vec<(i64, i64)>> = t.polygon.vertices().iter().map(|p| frame.to_grid(p)).collect();
        if let Some(ring) = ring.filter(|r| lattice_edges(r)) {
            let mut atoms = atoms_in(&ring);
            atoms.sort();
            return Some(TargetCells { frame, atoms });
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub struct Placement {
    pub kind: PieceKind,
    pub rotation_deg: u16,
    pub reflected: bool,
    pub translation: Point,
    pub cells: Vec<Atom>,
    pub piece: PieceState,
    grid_anchor: (i64, i64),
}

/// Every placement of `kind` whose cells lie inside `cells`, ordered by
/// anchor, then rotation, then reflection.
pub fn enumerate_placements(kind: PieceKind, cells: &TargetCells) -> Vec<Placement> {
    let inside: std::collections::HashSet<Atom> = cells.atoms.iter().copied().collect();
    let mut out = Vec::new();
    if inside.is_empty() {
        return out;
    }
    for (ring, atoms) in orientations(kind.shape()) {
        let first = atoms[0];
        for a in cells.atoms.iter().filter(|a| a.q == first.q) {
            let (di, dj) = (a.i - first.i, a.j - first.j);
            let moved: Vec<Atom> = atoms.iter().map(|b| Atom { i: b.i + di, j: b.j + dj, q: b.q }).collect();
            if !moved.iter().all(|b| inside.contains(b)) {
                continue;
            }
            let grid: Vec<(i64, i64)> = ring.iter().map(|&(x, y)| (x + di, y + dj)).collect();
            let poly = cells.frame.polygon_to_world(&grid);
            let t = recover_transform(kind, &poly).expect("lattice placements are canonical motions");
            let Decomposition { angle_deg, reflected, translation } = t.decompose().expect("recovered transforms decompose");
            let grid_anchor = cells.frame.to_grid(&translation).expect("anchor on the lattice");
            out.push(Placement {
                kind,
                rotation_deg: angle_deg,
                reflected,
                translation,
                cells: moved,
                piece: PieceState::placed(kind, t),
                grid_anchor,
            });
        }
    }
    out.sort_by_key(|p| (p.grid_anchor, p.rotation_deg, p.reflected));
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub elapsed_ms: u64,
    pub solutions: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnsatReason {
    AreaMismatch,
    NotLatticeAligned,
    NoTiling,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    /// Solutions in search order; the first is the answer, the rest are
    /// present only under `find_all`.
    Solved { solutions: Vec<Vec<PieceState>>, complete: bool, stats: SearchStats },
    Unsat { reason: UnsatReason, stats: SearchStats },
    Exhausted { stats: SearchStats },
}

impl SolveOutcome {
    pub fn solution(&self) -> Option<&[PieceState]> {
        match self {
            SolveOutcome::Solved { solutions, .. } => solutions.first().map(|s| &s[..]),
            _ => None,
        }
    }

    pub fn stats(&self) -> &SearchStats {
        match self {
            SolveOutcome::Solved { stats, .. } | SolveOutcome::Unsat { stats, .. } | SolveOutcome::Exhausted { stats } => stats,
        }
    }
}

const SHAPES: [(Shape, PieceKind, u8); 5] = [
    (Shape::LargeTriangle, PieceKind::LargeTriangle1, 2),
    (Shape::MediumTriangle, PieceKind::MediumTriangle, 1),
    (Shape::SmallTriangle, PieceKind::SmallTriangle1, 2),
    (Shape::Square, PieceKind::Square, 1),
    (Shape::Parallelogram, PieceKind::Parallelogram, 1),
];

const SHAPE_SIZE: [u32; 5] = [8, 4, 2, 4, 4];

struct Search<'a> {
    cfg: &'a SolverConfig,
    start: Instant,
    nodes: u64,
    out_of_budget: bool,
    /// Placement masks and shape indices, by placement id.
    masks: Vec<(u64, usize)>,
    /// Placement ids covering each atom bit.
    covering: Vec<Vec<usize>>,
    neighbours: Vec<u64>,
    full: u64,
    remaining: [u8; 5],
    chosen: Vec<usize>,
    found: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn budget_left(&mut self) -> bool {
        if self.nodes >= self.cfg.max_nodes || (self.nodes.is_multiple_of(1024) && self.start.elapsed() >= self.cfg.time_limit) {
            self.out_of_budget = true;
        }
        !self.out_of_budget
    }

    /// Every connected region of free atoms must be a sum of remaining piece
    /// sizes.
    fn regions_feasible(&self, covered: u64) -> bool {
        let mut free = self.full & !covered;
        let mut sums = 1u64;
        for (s, &n) in self.remaining.iter().enumerate() {
            for _ in 0..n {
                sums |= sums << SHAPE_SIZE[s];
            }
        }
        while free != 0 {
            let mut region = free & free.wrapping_neg();
            loop {
                let mut grown = region;
                let mut bits = region;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    grown |= self.neighbours[b];
                }
                grown &= free;
                if grown == region {
                    break;
                }
                region = grown;
            }
            let size = region.count_ones();
            if size >= 64 || sums >> size & 1 == 0 {
                return false;
            }
            free &= !region;
        }
        true
    }

    fn run(&mut self, covered: u64) -> bool {
        if covered == self.full {
            self.found.push(self.chosen.clone());
            return !self.cfg.find_all;
        }
        let mut best: Option<(usize, usize)> = None;
        let mut free = self.full & !covered;
        while free != 0 {
            let b = free.trailing_zeros() as usize;
            free &= free - 1;
            let n = self.covering[b].iter().filter(|&&p| self.fits(p, covered)).count();
            if best.is_none_or(|(_, m)| n < m) {
                best = Some((b, n));
                if n <= 1 {
                    break;
                }
            }
        }
        let Some((bit, n)) = best else { return false };
        if n == 0 {
            return false;
        }
        let options: Vec<usize> = self.covering[bit].iter().copied().filter(|&p| self.fits(p, covered)).collect();
        for p in options {
            self.nodes += 1;
            if !self.budget_left() {
                return true;
            }
            let (mask, s) = self.masks[p];
            self.remaining[s] -= 1;
            self.chosen.push(p);
            let next = covered | mask;
            let stop = self.regions_feasible(next) && self.run(next);
            self.chosen.pop();
            self.remaining[s] += 1;
            if stop {
                return true;
            }
        }
        false
    }

    fn fits(&self, p: usize, covered: u64) -> bool {
        let (mask, s) = self.masks[p];
        mask & covered == 0 && self.remaining[s] > 0
    }
}

/// Exact-cover search for a seven-piece assembly of `t`.
pub fn solve(t: &Outline, cfg: &SolverConfig) -> Result<SolveOutcome, SolveError> {
    if cfg.max_nodes == 0 || cfg.time_limit.is_zero() {
        return Err(SolveError::BadBudget);
    }
    let start = Instant::now();
    let stats = |nodes: u64, solutions: usize| SearchStats {
        nodes,
        elapsed_ms: start.elapsed().as_millis() as u64,
        solutions,
    };
    if !t.is_exact() {
        return Err(SolveError::ApproximateOutline);
    }
    if polygon_area(&t.polygon) != Scalar::Exact(ExactValue::from_integer(8)) {
        return Ok(SolveOutcome::Unsat { reason: UnsatReason::AreaMismatch, stats: stats(0, 0) });
    }
    let Some(cells) = lattice_cells(t) else {
        return Ok(SolveOutcome::Unsat { reason: UnsatReason::NotLatticeAligned, stats: stats(0, 0) });
    };
    let bit: HashMap<Atom, usize> = cells.atoms.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let mut neighbours = vec![0u64; cells.len()];
    for (a, &i) in &bit {
        for n in a.neighbours() {
            if let Some(&j) = bit.get(&n) {
                neighbours[i] |= 1 << j;
            }
        }
    }
    let mut placements = Vec::new();
    let mut masks = Vec::new();
    let mut covering = vec![Vec::new(); cells.len()];
    for (s, &(_, kind, _)) in SHAPES.iter().enumerate() {
        for p in enumerate_placements(kind, &cells) {
            let mask = p.cells.iter().fold(0u64, |m, a| m | 1 << bit[a]);
            for a in &p.cells {
                covering[bit[a]].push(masks.len());
            }
            masks.push((mask, s));
            placements.push(p);
        }
    }
    let mut search = Search {
        cfg,
        start,
        nodes: 0,
        out_of_budget: false,
        masks,
        covering,
        neighbours,
        full: if cells.len() == 64 { u64::MAX } else { (1u64 << cells.len()) - 1 },
        remaining: SHAPES.map(|s| s.2),
        chosen: Vec::new(),
        found: Vec::new(),
    };
    if search.regions_feasible(0) {
        search.run(0);
    }
    let st = stats(search.nodes, search.found.len());
    if !search.found.is_empty() {
        let solutions = search.found.iter().map(|ids| assemble(ids, &placements)).collect();
        return Ok(SolveOutcome::Solved { solutions, complete: !search.out_of_budget, stats: st });
    }
    if search.out_of_budget {
        return Ok(SolveOutcome::Exhausted { stats: st });
    }
    Ok(SolveOutcome::Unsat { reason: UnsatReason::NoTiling, stats: st })
}

/// Final state in kind order; congruent pieces take kinds in placement order.
fn assemble(ids: &[usize], placements: &[Placement]) -> Vec<PieceState> {
    let mut ordered: Vec<&Placement> = ids.iter().map(|&i| &placements[i]).collect();
    ordered.sort_by_key(|p| (p.kind.shape(), p.grid_anchor, p.rotation_deg, p.reflected));
    let mut used = Vec::new();
    let mut out: Vec<PieceState> = ordered
        .into_iter()
        .map(|p| {
            let kind = PieceKind::ALL.into_iter().find(|k| k.shape() == p.kind.shape() && !used.contains(k)).expect("seven pieces");
            used.push(kind);
            let t = p.piece.transform.clone().expect("placements carry transforms");
            PieceState::placed(kind, t)
        })
        .collect();
    out.sort_by_key(|p| p.kind);
    out
}

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::snap::{snap_point, SnapError};
use crate::exactnum::Scalar;
use crate::geom::{shares_boundary, union_info, Point, Polygon};
use crate::tangram::{
    canonical_pieces, normalize_adjacency, recover_transform, state_json, to_canonical_text, Outline, PieceKind, PieceState, TceInstance,
    TseReport,
};
use crate::verify::{evaluate_pieces, VerificationRecord, VerifyConfig};

/// One line of a raw annotation export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawAssembly {
    pub pieces: Vec<RawPiece>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawPiece {
    #[serde(rename = "type", alias = "kind")]
    pub kind: String,
    pub vertices: Vec<[f64; 2]>,
}

impl RawAssembly {
    pub fn parse_line(line: &str) -> Result<RawAssembly, serde_json::Error> {
        serde_json::from_str(line)
    }

    /// Floating-point export of a state.
    pub fn from_pieces(pieces: &[PieceState]) -> RawAssembly {
        RawAssembly {
            pieces: pieces
                .iter()
                .map(|p| RawPiece {
                    kind: p.kind.type_name().into(),
                    vertices: p.polygon.vertices().iter().map(|v| v.to_f64().into()).collect(),
                })
                .collect(),
        }
    }

    pub fn translate(&self, dx: f64, dy: f64) -> RawAssembly {
        let mut out = self.clone();
        for p in &mut out.pieces {
            for v in &mut p.vertices {
                v[0] += dx;
                v[1] += dy;
            }
        }
        out
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("raw assemblies serialize")
    }
}

/// Parses every non-blank line, keeping per-line failures.
pub fn read_raw_jsonl(text: &str) -> Vec<Result<RawAssembly, serde_json::Error>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(RawAssembly::parse_line).collect()
}

#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum RejectReason {
    #[error("piece {piece} vertex {vertex}: {source}")]
    Unsnappable {
        piece: usize,
        vertex: usize,
        #[serde(skip)]
        source: SnapError,
    },
    #[error("incomplete assembly: {detail}")]
    Incomplete { detail: String },
    #[error("piece {piece} is degenerate")]
    Degenerate { piece: usize },
    #[error("assembly has {components} disconnected parts")]
    Disconnected { components: usize },
    #[error("assembly encloses {holes} hole(s)")]
    Holes { holes: usize },
}

impl RejectReason {
    pub fn code(&self) -> &'static str {
        match self {
            RejectReason::Unsnappable { .. } => "unsnappable",
            RejectReason::Incomplete { .. } => "incomplete",
            RejectReason::Degenerate { .. } => "degenerate",
            RejectReason::Disconnected { .. } => "disconnected",
            RejectReason::Holes { .. } => "holes",
        }
    }
}

fn assign_kinds(a: &RawAssembly) -> Result<Vec<PieceKind>, RejectReason> {
    let incomplete = |detail: String| RejectReason::Incomplete { detail };
    if a.pieces.len() != 7 {
        return Err(incomplete(format!("{} pieces, expected 7", a.pieces.len())));
    }
    let mut kinds: Vec<PieceKind> = Vec::new();
    for p in &a.pieces {
        let name = p.kind.trim().to_ascii_lowercase();
        let kind = match name.as_str() {
            "large_triangle" => [PieceKind::LargeTriangle1, PieceKind::LargeTriangle2].into_iter().find(|k| !kinds.contains(k)),
            "small_triangle" => [PieceKind::SmallTriangle1, PieceKind::SmallTriangle2].into_iter().find(|k| !kinds.contains(k)),
            _ => PieceKind::parse(&name),
        };
        match kind {
            Some(k) if !kinds.contains(&k) => kinds.push(k),
            Some(k) => return Err(incomplete(format!("duplicate {k}"))),
            None => return Err(incomplete(format!("unknown piece type {:?}", p.kind))),
        }
    }
    Ok(kinds)
}

/// Moves a raw assembly to min x = min y = 0, snaps it and accepts it when
/// it is complete, connected and free of holes.
pub fn filter_raw(a: &RawAssembly, tol: f64) -> Result<Vec<PieceState>, RejectReason> {
    let kinds = assign_kinds(a)?;
    let all = || a.pieces.iter().flat_map(|p| p.vertices.iter());
    let x0 = all().map(|v| v[0]).fold(f64::INFINITY, f64::min);
    let y0 = all().map(|v| v[1]).fold(f64::INFINITY, f64::min);
    let mut pieces = Vec::with_capacity(7);
    for (i, (raw, kind)) in a.pieces.iter().zip(kinds).enumerate() {
        let pts = raw
            .vertices
            .iter()
            .enumerate()
            .map(|(j, v)| snap_point(v[0] - x0, v[1] - y0, tol).map_err(|source| RejectReason::Unsnappable { piece: i, vertex: j, source }))
            .collect::<Result<Vec<Point>, _>>()?;
        let poly = Polygon::new(pts).map_err(|_| RejectReason::Degenerate { piece: i })?;
        pieces.push(PieceState::new(kind, poly));
    }
    check_union(&pieces)?;
    Ok(pieces)
}

fn check_union(pieces: &[PieceState]) -> Result<Vec<Point>, RejectReason> {
    let polys: Vec<Polygon> = pieces.iter().map(|p| p.polygon.clone()).collect();
    let info = union_info(&polys).map_err(|_| RejectReason::Degenerate { piece: 0 })?;
    if info.components != 1 {
        return Err(RejectReason::Disconnected { components: info.components });
    }
    if info.holes > 0 || info.loops.len() != 1 {
        return Err(RejectReason::Holes { holes: info.holes.max(info.loops.len().saturating_sub(1)) });
    }
    Ok(info.loops.into_iter().next().expect("one loop"))
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormalizeError {
    #[error("rejected: {0}")]
    Rejected(#[from] RejectReason),
    #[error("{0} is not a 45° motion of its canonical piece")]
    NonCanonical(PieceKind),
    #[error("outline must be exact")]
    Approximate,
    #[error("normalized assembly fails verification")]
    Verify(Box<VerificationRecord>),
}

pub fn normalize(a: &RawAssembly, tol: f64, instance_id: Option<&str>) -> Result<TceInstance, NormalizeError> {
    normalize_pieces(filter_raw(a, tol)?, instance_id)
}

/// Canonical placement of an exact assembly: translated to min x = min y = 0,
/// transforms recovered, outline and adjacency extracted and verified.
pub fn normalize_pieces(pieces: Vec<PieceState>, instance_id: Option<&str>) -> Result<TceInstance, NormalizeError> {
    if pieces.iter().any(|p| !p.polygon.is_exact()) {
        return Err(NormalizeError::Approximate);
    }
    let all = || pieces.iter().flat_map(|p| p.polygon.vertices());
    let min = |f: fn(&Point) -> &Scalar| all().map(|v| f(v).as_exact().expect("exact").clone()).min().expect("non-empty");
    let (dx, dy) = (Scalar::Exact(-min(|p| &p.x)), Scalar::Exact(-min(|p| &p.y)));
    let mut placed = Vec::with_capacity(pieces.len());
    for p in &pieces {
        let moved = p.polygon.translate(&dx, &dy);
        let t = recover_transform(p.kind, &moved).map_err(|_| NormalizeError::NonCanonical(p.kind))?;
        placed.push(PieceState::placed(p.kind, t));
    }
    placed.sort_by_key(|p| p.kind);
    let ring = check_union(&placed)?;
    let outline = Outline::new(canonical_ring(ring));
    let mut adjacency = Vec::new();
    for (i, a) in placed.iter().enumerate() {
        for b in &placed[i + 1..] {
            if shares_boundary(&a.polygon, &b.polygon, 0.0, 0.0) {
                adjacency.push((a.kind, b.kind));
            }
        }
    }
    let id = instance_id.map_or_else(|| default_instance_id(&placed), str::to_owned);
    let record = evaluate_pieces(&id, placed.clone(), TseReport::default(), &outline, &VerifyConfig::default());
    if !record.vpr_pass || record.iou < 1.0 - 1e-9 {
        return Err(NormalizeError::Verify(Box::new(record)));
    }
    Ok(TceInstance {
        instance_id: id,
        target_outline: outline,
        initial_state: canonical_pieces(),
        final_state: placed,
        adjacency_graph: normalize_adjacency(adjacency),
    })
}

/// Counterclockwise ring starting at its lexicographically smallest vertex.
fn canonical_ring(ring: Vec<Point>) -> Polygon {
    let poly = Polygon::new(ring).expect("boundary loop is a polygon");
    let key = |p: &Point| (p.x.as_exact().cloned(), p.y.as_exact().cloned());
    let start = (0..poly.len()).min_by_key(|&i| key(&poly.vertices()[i])).unwrap_or(0);
    poly.rotate_start(start)
}

/// `tce-` followed by the first 12 hex digits of the SHA-256 of the final
/// state's canonical text.
pub fn default_instance_id(final_state: &[PieceState]) -> String {
    let digest = Sha256::digest(to_canonical_text(&state_json(final_state)).as_bytes());
    let hex: String = digest.iter().take(6).map(|b| format!("{b:02x}")).collect();
    format!("tce-{hex}")
}

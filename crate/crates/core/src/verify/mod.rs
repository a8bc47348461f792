//! Two-stage checking of an assembly: constraint validation (syntax, rigid
//! geometry, physics) followed by silhouette similarity (IoU, Hausdorff).

mod report;

use serde::{Deserialize, Serialize, Serializer};

use crate::exactnum::Scalar;
use crate::geom::{self, count_components, hausdorff, intersection_area, iou, polygon_area, polygon_perimeter, shares_boundary, Polygon};
use crate::tangram::{parse_document, Field, Outline, PieceKind, PieceState, TseReport};

pub use report::{aggregate, records_jsonl, render_csv, render_text, CorpusReport, EmptyCorpus};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    /// Hausdorff sampling resolution in scene units.
    pub resolution: f64,
    /// Relative area/perimeter tolerance for approximate pieces.
    pub rigid_rel_tol: f64,
    /// Overlap area above which approximate pieces collide.
    pub overlap_eps: f64,
    /// Gap and minimum shared length for approximate adjacency.
    pub adjacency_gap: f64,
    pub success_iou: f64,
    pub success_hausdorff: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            resolution: geom::DEFAULT_HAUSDORFF_RESOLUTION,
            rigid_rel_tol: 1e-4,
            overlap_eps: 1e-6,
            adjacency_gap: 1e-6,
            success_iou: 0.99,
            success_hausdorff: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RigidDetail {
    pub piece: &'static str,
    pub area_delta: f64,
    pub perimeter_delta: f64,
}

/// Compares a piece with its canonical shape. Exact pieces must match the
/// canonical area and sorted squared edge lengths exactly; approximate ones
/// must match area and perimeter within the relative tolerance.
pub fn check_rigid(p: &PieceState, cfg: &VerifyConfig) -> Result<(), RigidDetail> {
    let kind = p.kind;
    let area = polygon_area(&p.polygon);
    let perimeter = polygon_perimeter(&p.polygon);
    let canon_area = kind.canonical_area();
    let canon_perimeter = kind.canonical_perimeter().to_f64();
    let detail = || RigidDetail {
        piece: kind.label(),
        area_delta: area.to_f64() - canon_area.to_f64(),
        perimeter_delta: perimeter.to_f64() - canon_perimeter,
    };
    let pass = match &area {
        Scalar::Exact(a) => {
            let mut sq: Vec<_> = p.polygon.squared_edge_lengths().into_iter().filter_map(|s| s.as_exact().cloned()).collect();
            sq.sort();
            *a == canon_area && sq == kind.canonical_squared_edges()
        }
        Scalar::Approx(a) => {
            let ca = canon_area.to_f64();
            ((a - ca) / ca).abs() <= cfg.rigid_rel_tol && ((perimeter.to_f64() - canon_perimeter) / canon_perimeter).abs() <= cfg.rigid_rel_tol
        }
    };
    if pass {
        Ok(())
    } else {
        Err(detail())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PhysicsDetail {
    pub overlap_pairs: Vec<(&'static str, &'static str)>,
    pub component_count: usize,
}

impl PhysicsDetail {
    pub fn ok(&self) -> bool {
        self.overlap_pairs.is_empty() && self.component_count == 1
    }
}

fn overlaps(a: &Polygon, b: &Polygon, cfg: &VerifyConfig) -> bool {
    match intersection_area(a, b) {
        Scalar::Exact(v) => v.signum() > 0,
        Scalar::Approx(x) => x > cfg.overlap_eps,
    }
}

/// Pairwise overlap and connectivity of the union under positive-length
/// boundary sharing.
pub fn check_physics(pieces: &[PieceState], cfg: &VerifyConfig) -> PhysicsDetail {
    let mut detail = PhysicsDetail::default();
    for i in 0..pieces.len() {
        for j in (i + 1)..pieces.len() {
            if overlaps(&pieces[i].polygon, &pieces[j].polygon, cfg) {
                detail.overlap_pairs.push((pieces[i].kind.label(), pieces[j].kind.label()));
            }
        }
    }
    detail.component_count = count_components(pieces, |a, b| shares_boundary(&a.polygon, &b.polygon, cfg.adjacency_gap, cfg.adjacency_gap));
    detail
}

fn serialize_distance<S: Serializer>(d: &f64, s: S) -> Result<S::Ok, S::Error> {
    if d.is_finite() {
        s.serialize_f64(*d)
    } else {
        s.serialize_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationRecord {
    pub instance_id: String,
    pub tse: bool,
    pub tse_report: TseReport,
    pub rge: bool,
    pub rge_details: Vec<RigidDetail>,
    pub pe: bool,
    pub pe_detail: PhysicsDetail,
    pub vpr_pass: bool,
    pub iou: f64,
    /// Infinite (serialized as null) when no geometry was recoverable.
    #[serde(serialize_with = "serialize_distance")]
    pub hausdorff: f64,
    pub success: bool,
}

/// Verifies a submission document against a target silhouette.
pub fn evaluate(instance_id: &str, submission: &str, target: &Outline, cfg: &VerifyConfig) -> VerificationRecord {
    let doc = parse_document(submission, &[Field::FinalState]);
    evaluate_pieces(instance_id, doc.final_state.unwrap_or_default(), doc.report, target, cfg)
}

/// Verifies an already-parsed piece list. Pieces beyond one per kind count as
/// syntax errors; missing kinds likewise.
pub fn evaluate_pieces(instance_id: &str, pieces: Vec<PieceState>, mut report: TseReport, target: &Outline, cfg: &VerifyConfig) -> VerificationRecord {
    let mut seen = [false; 7];
    for p in &pieces {
        seen[p.kind.index()] = true;
    }
    let missing: Vec<PieceKind> = PieceKind::ALL.into_iter().filter(|k| !seen[k.index()]).collect();
    if !missing.is_empty() && !report.has(crate::tangram::ViolationKind::BadPieceCount) {
        let names: Vec<&str> = missing.iter().map(|k| k.label()).collect();
        report.violations.push(crate::tangram::Violation {
            kind: crate::tangram::ViolationKind::BadPieceCount,
            path: "final_state".into(),
            message: format!("missing pieces {}", names.join(", ")),
        });
    }
    let tse = !report.is_empty();
    if pieces.is_empty() {
        return VerificationRecord {
            instance_id: instance_id.to_owned(),
            tse,
            tse_report: report,
            rge: false,
            rge_details: Vec::new(),
            pe: false,
            pe_detail: PhysicsDetail::default(),
            vpr_pass: false,
            iou: 0.0,
            hausdorff: f64::INFINITY,
            success: false,
        };
    }
    let rge_details: Vec<RigidDetail> = pieces.iter().filter_map(|p| check_rigid(p, cfg).err()).collect();
    let pe_detail = check_physics(&pieces, cfg);
    let polys: Vec<Polygon> = pieces.iter().map(|p| p.polygon.clone()).collect();
    let iou_v = iou(&polys, &target.polygon);
    let boundary = geom::union_boundary(&polys, cfg.adjacency_gap);
    let hd = hausdorff(&boundary, &target.polygon.boundary(), cfg.resolution);
    let rge = !rge_details.is_empty();
    let pe = !pe_detail.ok();
    let vpr_pass = !tse && !rge && !pe;
    let success = vpr_pass && iou_v >= cfg.success_iou && hd <= cfg.success_hausdorff;
    VerificationRecord {
        instance_id: instance_id.to_owned(),
        tse,
        tse_report: report,
        rge,
        rge_details,
        pe,
        pe_detail,
        vpr_pass,
        iou: iou_v,
        hausdorff: hd,
        success,
    }
}

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::exactnum::{parse_scalar, Scalar};
use crate::geom::{Point, Polygon, RigidTransform};

use super::pieces::{ring_edges, PieceKind, PieceState, Shape};

/// Tolerance for edge lengths given as decimals.
const EDGE_LENGTH_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    UnparseableDocument,
    MissingField,
    BadPieceCount,
    UnknownPieceType,
    DuplicateKind,
    BadCoordinate,
    BadEdgeIndex,
}

impl ViolationKind {
    pub fn code(self) -> &'static str {
        match self {
            ViolationKind::UnparseableDocument => "unparseable-document",
            ViolationKind::MissingField => "missing-field",
            ViolationKind::BadPieceCount => "bad-piece-count",
            ViolationKind::UnknownPieceType => "unknown-piece-type",
            ViolationKind::DuplicateKind => "duplicate-kind",
            ViolationKind::BadCoordinate => "bad-coordinate",
            ViolationKind::BadEdgeIndex => "bad-edge-index",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// JSON path of the offending value, e.g. `final_state[2].vertices[1]`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.kind.code(), self.path, self.message)
    }
}

/// Syntax violations found while reading a document; empty iff valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TseReport {
    pub violations: Vec<Violation>,
}

impl TseReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            kind,
            path: path.into(),
            message: message.into(),
        });
    }
}

/// A target silhouette: one counterclockwise ring.
#[derive(Clone, Debug, PartialEq)]
pub struct Outline {
    pub polygon: Polygon,
}

impl Outline {
    pub fn new(polygon: Polygon) -> Self {
        Self { polygon }
    }

    pub fn edges(&self) -> Vec<(usize, usize, Scalar)> {
        ring_edges(&self.polygon)
    }

    pub fn is_exact(&self) -> bool {
        self.polygon.is_exact()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TceInstance {
    pub instance_id: String,
    pub target_outline: Outline,
    pub initial_state: Vec<PieceState>,
    pub final_state: Vec<PieceState>,
    /// Unordered pairs stored as `(min, max)`, sorted, without repeats.
    pub adjacency_graph: Vec<(PieceKind, PieceKind)>,
}

/// Canonicalizes adjacency pairs: ordered within each pair, sorted, deduped.
pub fn normalize_adjacency(pairs: impl IntoIterator<Item = (PieceKind, PieceKind)>) -> Vec<(PieceKind, PieceKind)> {
    let set: BTreeSet<(PieceKind, PieceKind)> = pairs.into_iter().filter(|(a, b)| a != b).map(|(a, b)| if a <= b { (a, b) } else { (b, a) }).collect();
    set.into_iter().collect()
}

// ---------------------------------------------------------------------------
// Serialization

fn scalar_json(s: &Scalar) -> Value {
    Value::String(s.to_string())
}

fn point_json(p: &Point) -> Value {
    json!([scalar_json(&p.x), scalar_json(&p.y)])
}

fn edges_json(edges: &[(usize, usize, Scalar)]) -> Value {
    Value::Array(edges.iter().map(|(i, j, l)| json!([i, j, scalar_json(l)])).collect())
}

pub fn outline_json(o: &Outline) -> Value {
    json!({
        "vertices": o.polygon.vertices().iter().map(point_json).collect::<Vec<_>>(),
        "edges": edges_json(&o.edges()),
    })
}

pub fn piece_json(p: &PieceState) -> Value {
    let mut m = Map::new();
    m.insert("type".into(), Value::String(p.kind.type_name().into()));
    m.insert("vertices".into(), Value::Array(p.polygon.vertices().iter().map(point_json).collect()));
    m.insert("edges".into(), edges_json(&p.edges()));
    m.insert("center".into(), point_json(&p.center()));
    if let Some(t) = &p.transform {
        let rows: Vec<Value> = t.rows().iter().map(|r| Value::Array(r.iter().map(scalar_json).collect())).collect();
        m.insert("transform_matrix".into(), Value::Array(rows));
    }
    Value::Object(m)
}

pub fn state_json(pieces: &[PieceState]) -> Value {
    Value::Array(pieces.iter().map(piece_json).collect())
}

pub fn tce_json(i: &TceInstance) -> Value {
    json!({
        "instance_id": i.instance_id,
        "target_outline": outline_json(&i.target_outline),
        "initial_state": state_json(&i.initial_state),
        "final_state": state_json(&i.final_state),
        "adjacency_graph": i.adjacency_graph.iter().map(|(a, b)| json!([a.label(), b.label()])).collect::<Vec<_>>(),
    })
}

/// Canonical text: two-space indentation, arrays without objects on one line.
pub fn to_canonical_text(v: &Value) -> String {
    fn has_object(v: &Value) -> bool {
        match v {
            Value::Object(_) => true,
            Value::Array(a) => a.iter().any(has_object),
            _ => false,
        }
    }
    fn write(v: &Value, indent: usize, out: &mut String) {
        let pad = |n: usize| "  ".repeat(n);
        match v {
            Value::Object(m) if !m.is_empty() => {
                out.push_str("{\n");
                for (k, (key, val)) in m.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    out.push_str(&Value::String(key.clone()).to_string());
                    out.push_str(": ");
                    write(val, indent + 1, out);
                    if k + 1 < m.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&pad(indent));
                out.push('}');
            }
            Value::Array(a) if has_object(v) => {
                out.push_str("[\n");
                for (k, item) in a.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    write(item, indent + 1, out);
                    if k + 1 < a.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&pad(indent));
                out.push(']');
            }
            _ => out.push_str(&serde_json::to_string(v).expect("json values serialize")),
        }
    }
    let mut out = String::new();
    write(v, 0, &mut out);
    out.push('\n');
    out
}

pub fn serialize_tce(i: &TceInstance) -> String {
    to_canonical_text(&tce_json(i))
}

// ---------------------------------------------------------------------------
// Parsing

/// Top-level document fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    InstanceId,
    TargetOutline,
    InitialState,
    FinalState,
    AdjacencyGraph,
}

impl Field {
    pub const ALL: [Field; 5] = [Field::InstanceId, Field::TargetOutline, Field::InitialState, Field::FinalState, Field::AdjacencyGraph];

    pub fn key(self) -> &'static str {
        match self {
            Field::InstanceId => "instance_id",
            Field::TargetOutline => "target_outline",
            Field::InitialState => "initial_state",
            Field::FinalState => "final_state",
            Field::AdjacencyGraph => "adjacency_graph",
        }
    }
}

/// Everything recoverable from a document, plus its violations.
#[derive(Clone, Debug, Default)]
pub struct ParsedDocument {
    pub instance_id: Option<String>,
    pub target_outline: Option<Outline>,
    pub initial_state: Option<Vec<PieceState>>,
    pub final_state: Option<Vec<PieceState>>,
    pub adjacency_graph: Option<Vec<(PieceKind, PieceKind)>>,
    pub report: TseReport,
}

fn coordinate(v: &Value) -> Option<Scalar> {
    match v {
        Value::String(s) => parse_scalar(s).ok(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => Some(Scalar::from(i)),
            None => n.as_f64().filter(|x| x.is_finite()).map(Scalar::Approx),
        },
        _ => None,
    }
}

fn point(v: &Value) -> Option<Point> {
    match v {
        Value::Array(a) if a.len() == 2 => Some(Point {
            x: coordinate(&a[0])?,
            y: coordinate(&a[1])?,
        }),
        Value::Object(m) => Some(Point {
            x: coordinate(m.get("x")?)?,
            y: coordinate(m.get("y")?)?,
        }),
        _ => None,
    }
}

fn edge_index(v: &Value) -> Option<usize> {
    v.as_u64().and_then(|i| usize::try_from(i).ok())
}

/// `[i, j]`, `[i, j, length]`, `[[i, j]]` or `[[i, j], length]`.
fn edge_entry(v: &Value) -> Option<(usize, usize, Option<&Value>)> {
    let a = v.as_array()?;
    match a.first()? {
        Value::Array(pair) if pair.len() == 2 && a.len() <= 2 => Some((edge_index(&pair[0])?, edge_index(&pair[1])?, a.get(1))),
        first if (2..=3).contains(&a.len()) => Some((edge_index(first)?, edge_index(&a[1])?, a.get(2))),
        _ => None,
    }
}

fn lengths_agree(given: &Scalar, actual: &Scalar) -> bool {
    match (given, actual) {
        (Scalar::Exact(g), Scalar::Exact(a)) => g == a,
        _ => (given.to_f64() - actual.to_f64()).abs() <= EDGE_LENGTH_TOL,
    }
}

/// Reads a vertex ring plus optional edge relations. Edges must trace the
/// input ring exactly once and any stated length must match.
fn ring(m: &Map<String, Value>, path: &str, report: &mut TseReport) -> Option<Polygon> {
    let Some(verts) = m.get("vertices") else {
        report.push(ViolationKind::MissingField, format!("{path}.vertices"), "missing vertices");
        return None;
    };
    let Some(arr) = verts.as_array() else {
        report.push(ViolationKind::BadCoordinate, format!("{path}.vertices"), "vertices must be an array");
        return None;
    };
    let mut points = Vec::with_capacity(arr.len());
    for (k, v) in arr.iter().enumerate() {
        match point(v) {
            Some(p) => points.push(p),
            None => {
                report.push(ViolationKind::BadCoordinate, format!("{path}.vertices[{k}]"), format!("unreadable vertex {v}"));
                return None;
            }
        }
    }
    let n = points.len();
    let polygon = match Polygon::new(points.clone()) {
        Ok(p) => p,
        Err(e) => {
            report.push(ViolationKind::BadCoordinate, format!("{path}.vertices"), e.to_string());
            return None;
        }
    };
    if let Some(edges) = m.get("edges") {
        check_edges(edges, &points, n, &format!("{path}.edges"), report);
    }
    Some(polygon)
}

fn check_edges(edges: &Value, points: &[Point], n: usize, path: &str, report: &mut TseReport) {
    let Some(arr) = edges.as_array() else {
        report.push(ViolationKind::BadEdgeIndex, path, "edges must be an array");
        return;
    };
    let mut seen = BTreeSet::new();
    for (k, e) in arr.iter().enumerate() {
        let Some((i, j, len)) = edge_entry(e) else {
            report.push(ViolationKind::BadEdgeIndex, format!("{path}[{k}]"), format!("unreadable edge {e}"));
            return;
        };
        let adjacent = i < n && j < n && ((i + 1) % n == j || (j + 1) % n == i);
        if !adjacent || !seen.insert((i.min(j), i.max(j))) {
            report.push(ViolationKind::BadEdgeIndex, format!("{path}[{k}]"), format!("({i}, {j}) is not an unused ring edge of {n} vertices"));
            return;
        }
        if let Some(l) = len {
            let dx = &points[j].x - &points[i].x;
            let dy = &points[j].y - &points[i].y;
            let actual = (&(&dx * &dx) + &(&dy * &dy)).sqrt();
            match coordinate(l) {
                Some(given) if lengths_agree(&given, &actual) => {}
                _ => {
                    report.push(ViolationKind::BadEdgeIndex, format!("{path}[{k}]"), format!("length {l} does not match {actual}"));
                    return;
                }
            }
        }
    }
    if seen.len() != n {
        report.push(ViolationKind::BadEdgeIndex, path, format!("{} edges for a ring of {n} vertices", seen.len()));
    }
}

fn matrix(v: &Value) -> Option<[[Scalar; 3]; 3]> {
    let rows = v.as_array().filter(|r| r.len() == 3)?;
    let mut out: [[Scalar; 3]; 3] = Default::default();
    for (i, r) in rows.iter().enumerate() {
        let r = r.as_array().filter(|r| r.len() == 3)?;
        for (j, e) in r.iter().enumerate() {
            out[i][j] = coordinate(e)?;
        }
    }
    Some(out)
}

enum KindSpec {
    Exact(PieceKind),
    /// `large_triangle` / `small_triangle` without an index.
    Either(Shape),
}

fn kind_spec(name: &str) -> Option<KindSpec> {
    if let Some(k) = PieceKind::parse(name) {
        return Some(KindSpec::Exact(k));
    }
    match name.trim().to_ascii_lowercase().as_str() {
        "large_triangle" | "lt" => Some(KindSpec::Either(Shape::LargeTriangle)),
        "small_triangle" | "st" => Some(KindSpec::Either(Shape::SmallTriangle)),
        _ => None,
    }
}

/// Reads a piece list given either as an array of piece objects or as an
/// object keyed by piece label.
fn state(v: &Value, path: &str, report: &mut TseReport) -> Option<Vec<PieceState>> {
    let entries: Vec<(Option<&str>, &Value)> = match v {
        Value::Array(a) => a.iter().map(|p| (None, p)).collect(),
        Value::Object(m) => m.iter().map(|(k, p)| (Some(k.as_str()), p)).collect(),
        _ => {
            report.push(ViolationKind::UnparseableDocument, path, "piece list must be an array or object");
            return None;
        }
    };
    if entries.len() != 7 {
        report.push(ViolationKind::BadPieceCount, path, format!("expected 7 pieces, found {}", entries.len()));
    }
    let mut parsed: Vec<(usize, KindSpec, Polygon, Option<RigidTransform>)> = Vec::new();
    for (k, (key, p)) in entries.iter().enumerate() {
        let ppath = format!("{path}[{k}]");
        let Some(m) = p.as_object() else {
            report.push(ViolationKind::UnparseableDocument, ppath, "piece must be an object");
            continue;
        };
        let name = m.get("type").and_then(Value::as_str).or(*key);
        let Some(name) = name else {
            report.push(ViolationKind::MissingField, format!("{ppath}.type"), "missing piece type");
            continue;
        };
        let Some(spec) = kind_spec(name) else {
            report.push(ViolationKind::UnknownPieceType, format!("{ppath}.type"), format!("unknown piece type {name:?}"));
            continue;
        };
        let Some(polygon) = ring(m, &ppath, report) else { continue };
        if let Some(c) = m.get("center") {
            if point(c).is_none() {
                report.push(ViolationKind::BadCoordinate, format!("{ppath}.center"), format!("unreadable center {c}"));
            }
        }
        let transform = match m.get("transform_matrix") {
            None | Some(Value::Null) => None,
            Some(t) => match matrix(t) {
                Some(rows) => RigidTransform::from_rows(rows).ok(),
                None => {
                    report.push(ViolationKind::BadCoordinate, format!("{ppath}.transform_matrix"), "transform_matrix must be 3x3 values");
                    None
                }
            },
        };
        parsed.push((k, spec, polygon, transform));
    }
    let mut taken = [false; 7];
    let mut kinds: Vec<Option<PieceKind>> = vec![None; parsed.len()];
    for (slot, (k, spec, _, _)) in parsed.iter().enumerate() {
        if let KindSpec::Exact(kind) = spec {
            if std::mem::replace(&mut taken[kind.index()], true) {
                report.push(ViolationKind::DuplicateKind, format!("{path}[{k}].type"), format!("{kind} appears more than once"));
            } else {
                kinds[slot] = Some(*kind);
            }
        }
    }
    for (slot, (k, spec, _, _)) in parsed.iter().enumerate() {
        if let KindSpec::Either(shape) = spec {
            match PieceKind::ALL.into_iter().find(|c| c.shape() == *shape && !taken[c.index()]) {
                Some(kind) => {
                    taken[kind.index()] = true;
                    kinds[slot] = Some(kind);
                }
                None => report.push(ViolationKind::DuplicateKind, format!("{path}[{k}].type"), format!("too many {shape:?} pieces")),
            }
        }
    }
    Some(
        parsed
            .into_iter()
            .zip(kinds)
            .filter_map(|((_, _, polygon, transform), kind)| Some(PieceState { kind: kind?, polygon, transform }))
            .collect(),
    )
}

fn adjacency(v: &Value, path: &str, report: &mut TseReport) -> Option<Vec<(PieceKind, PieceKind)>> {
    let Some(arr) = v.as_array() else {
        report.push(ViolationKind::UnparseableDocument, path, "adjacency_graph must be an array");
        return None;
    };
    let mut pairs = Vec::new();
    for (k, e) in arr.iter().enumerate() {
        let names: Option<Vec<&str>> = e.as_array().filter(|a| a.len() == 2).and_then(|a| a.iter().map(Value::as_str).collect());
        let Some(names) = names else {
            report.push(ViolationKind::UnparseableDocument, format!("{path}[{k}]"), "adjacency entries are label pairs");
            continue;
        };
        match (PieceKind::parse(names[0]), PieceKind::parse(names[1])) {
            (Some(a), Some(b)) => pairs.push((a, b)),
            _ => report.push(ViolationKind::UnknownPieceType, format!("{path}[{k}]"), format!("unknown label in {e}")),
        }
    }
    Some(normalize_adjacency(pairs))
}

fn outline(v: &Value, path: &str, report: &mut TseReport) -> Option<Outline> {
    match v.as_object() {
        Some(m) => ring(m, path, report).map(Outline::new),
        None => {
            report.push(ViolationKind::UnparseableDocument, path, "target_outline must be an object");
            None
        }
    }
}

/// Lenient document reader: recovers every readable field and records each
/// violation. Fields in `required` that are absent are violations; other
/// fields are validated only when present. A bare piece array is read as a
/// `final_state`.
pub fn parse_document(doc: &str, required: &[Field]) -> ParsedDocument {
    let mut out = ParsedDocument::default();
    let value: Value = match serde_json::from_str(doc) {
        Ok(v) => v,
        Err(e) => {
            out.report.push(ViolationKind::UnparseableDocument, "$", e.to_string());
            return out;
        }
    };
    let obj = match value {
        Value::Object(m) => m,
        Value::Array(_) => {
            let mut m = Map::new();
            m.insert(Field::FinalState.key().into(), value);
            m
        }
        _ => {
            out.report.push(ViolationKind::UnparseableDocument, "$", "document must be a JSON object");
            return out;
        }
    };
    let report = &mut out.report;
    for f in Field::ALL {
        let Some(v) = obj.get(f.key()) else {
            if required.contains(&f) {
                report.push(ViolationKind::MissingField, f.key(), format!("missing {}", f.key()));
            }
            continue;
        };
        match f {
            Field::InstanceId => match v {
                Value::String(s) => out.instance_id = Some(s.clone()),
                Value::Number(n) => out.instance_id = Some(n.to_string()),
                _ => report.push(ViolationKind::UnparseableDocument, f.key(), "instance_id must be a string"),
            },
            Field::TargetOutline => out.target_outline = outline(v, f.key(), report),
            Field::InitialState => out.initial_state = state(v, f.key(), report),
            Field::FinalState => out.final_state = state(v, f.key(), report),
            Field::AdjacencyGraph => out.adjacency_graph = adjacency(v, f.key(), report),
        }
    }
    out
}

/// Parses a complete TCE document. The instance is returned whenever every
/// field could be recovered, even if violations were recorded.
pub fn parse_tce(doc: &str) -> (Option<TceInstance>, TseReport) {
    let p = parse_document(doc, &Field::ALL);
    let instance = match (p.instance_id, p.target_outline, p.initial_state, p.final_state, p.adjacency_graph) {
        (Some(instance_id), Some(target_outline), Some(initial_state), Some(final_state), Some(adjacency_graph)) => Some(TceInstance {
            instance_id,
            target_outline,
            initial_state,
            final_state,
            adjacency_graph,
        }),
        _ => None,
    };
    (instance, p.report)
}

/// Reads an outline from either a bare `{"vertices", "edges"}` object or a
/// document carrying `target_outline`.
pub fn parse_outline(doc: &str) -> Result<Outline, TseReport> {
    let mut report = TseReport::default();
    let value: Value = match serde_json::from_str(doc) {
        Ok(v) => v,
        Err(e) => {
            report.push(ViolationKind::UnparseableDocument, "$", e.to_string());
            return Err(report);
        }
    };
    let (v, path) = match value.get("target_outline") {
        Some(t) => (t, "target_outline"),
        None => (&value, "$"),
    };
    match outline(v, path, &mut report) {
        Some(o) if report.is_empty() => Ok(o),
        _ => Err(report),
    }
}

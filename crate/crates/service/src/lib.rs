//! Local JSON-over-HTTP API over the tangram core: piece inventory, vertex
//! snapping, verification, normalization and rendering.
//!
//! Every response is an envelope `{"ok": true, "data": ...}` or
//! `{"ok": false, "error": {"code", "message", "detail"}}`.

use std::net::{IpAddr, Ipv4Addr, SocketAddr};

use axum::body::Bytes;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Deserialize;
use serde_json::{json, Value};
use tangram_core::exactnum::format_latex;
use tangram_core::pipeline::{normalize, normalize_pieces, render_outline, render_pieces, snap_scalar, NormalizeError, RawAssembly, RejectReason, SNAP_TOL};
use tangram_core::tangram::{canonical_pieces, parse_document, parse_outline, state_json, tce_json, Field};
use tangram_core::verify::{evaluate, VerifyConfig};
use thiserror::Error;

pub const DEFAULT_PORT: u16 = 8731;
pub const PORT_ENV: &str = "TCE_SERVICE_PORT";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorCode {
    BadRequest,
    SnapFailed,
    VerifyFailed,
    Internal,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::BadRequest => "bad-request",
            ErrorCode::SnapFailed => "snap-failed",
            ErrorCode::VerifyFailed => "verify-failed",
            ErrorCode::Internal => "internal",
        }
    }

    fn status(self) -> StatusCode {
        match self {
            ErrorCode::BadRequest => StatusCode::BAD_REQUEST,
            ErrorCode::SnapFailed | ErrorCode::VerifyFailed => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    pub detail: Value,
}

impl ApiError {
    fn new(code: ErrorCode, message: impl Into<String>, detail: Value) -> Self {
        Self { code, message: message.into(), detail }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::BadRequest, message, Value::Null)
    }
}

type ApiResult = Result<Value, ApiError>;

fn envelope(result: ApiResult) -> Response {
    let (status, body) = match result {
        Ok(data) => (StatusCode::OK, json!({"ok": true, "data": data})),
        Err(e) => (
            e.code.status(),
            json!({"ok": false, "error": {"code": e.code.as_str(), "message": e.message, "detail": e.detail}}),
        ),
    };
    (status, [(header::CONTENT_TYPE, "application/json")], body.to_string()).into_response()
}

/// Runs a handler off the async workers; a panic becomes an `internal` error.
async fn compute(f: impl FnOnce() -> ApiResult + Send + 'static) -> Response {
    let result = match tokio::task::spawn_blocking(f).await {
        Ok(r) => r,
        Err(e) => {
            log::error!("handler failed: {e}");
            Err(ApiError::new(ErrorCode::Internal, "internal error", Value::Null))
        }
    };
    envelope(result)
}

fn body_text(body: &Bytes) -> Result<&str, ApiError> {
    let text = std::str::from_utf8(body).map_err(|_| ApiError::bad_request("body is not UTF-8"))?;
    if text.trim().is_empty() {
        return Err(ApiError::bad_request("empty body"));
    }
    Ok(text)
}

fn body_json(body: &Bytes) -> Result<Value, ApiError> {
    serde_json::from_str(body_text(body)?).map_err(|e| ApiError::bad_request(format!("malformed JSON: {e}")))
}

fn pieces() -> ApiResult {
    Ok(state_json(&canonical_pieces()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SnapRequest {
    vertices: Vec<[f64; 2]>,
    #[serde(default)]
    tol: Option<f64>,
}

fn snap(body: Bytes) -> ApiResult {
    let req: SnapRequest = serde_json::from_value(body_json(&body)?).map_err(|e| ApiError::bad_request(format!("invalid snap request: {e}")))?;
    let tol = req.tol.unwrap_or(SNAP_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(ApiError::bad_request("tol must be positive"));
    }
    let mut vertices = Vec::with_capacity(req.vertices.len());
    let mut residuals = Vec::with_capacity(req.vertices.len());
    let mut errors = Vec::new();
    for (i, v) in req.vertices.iter().enumerate() {
        let mut coords = Vec::with_capacity(2);
        let mut res = Vec::with_capacity(2);
        for (axis, &x) in v.iter().enumerate() {
            match snap_scalar(x, tol) {
                Ok(s) => {
                    res.push(json!((x - s.to_f64()).abs()));
                    coords.push(json!(format_latex(&s)));
                }
                Err(e) => {
                    res.push(json!(e.residual));
                    coords.push(Value::Null);
                    errors.push(json!({"vertex": i, "axis": axis, "value": x, "residual": e.residual, "message": e.to_string()}));
                }
            }
        }
        vertices.push(coords);
        residuals.push(res);
    }
    Ok(json!({"vertices": vertices, "residuals": residuals, "errors": errors}))
}

fn validate(body: Bytes) -> ApiResult {
    let text = body_text(&body)?;
    body_json(&body)?;
    let outline = parse_outline(text).map_err(|r| ApiError::new(ErrorCode::BadRequest, "document has no readable target_outline", json!(r)))?;
    let id = parse_document(text, &[]).instance_id.unwrap_or_default();
    let record = evaluate(&id, text, &outline, &VerifyConfig::default());
    Ok(json!(record))
}

#[derive(Deserialize)]
struct NormalizeOptions {
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default)]
    instance_id: Option<String>,
}

fn normalize_error(e: NormalizeError) -> ApiError {
    let message = e.to_string();
    match e {
        NormalizeError::Rejected(RejectReason::Unsnappable { piece, vertex, source }) => ApiError::new(
            ErrorCode::SnapFailed,
            message,
            json!({"reason": "unsnappable", "piece": piece, "vertex": vertex, "value": source.value, "residual": source.residual}),
        ),
        NormalizeError::Rejected(r) => ApiError::new(ErrorCode::VerifyFailed, message, json!(r)),
        NormalizeError::Verify(record) => ApiError::new(ErrorCode::VerifyFailed, message, json!({"reason": "verify", "record": record})),
        NormalizeError::NonCanonical(k) => ApiError::new(ErrorCode::VerifyFailed, message, json!({"reason": "non-canonical", "piece": k.type_name()})),
        NormalizeError::Approximate => ApiError::new(ErrorCode::BadRequest, message, Value::Null),
    }
}

/// Accepts a raw assembly `{"pieces": [...], "tol"?, "instance_id"?}` or a
/// TCE document, which is renormalized from its `final_state`.
fn normalize_endpoint(body: Bytes) -> ApiResult {
    let value = body_json(&body)?;
    let opts: NormalizeOptions = serde_json::from_value(value.clone()).map_err(|e| ApiError::bad_request(format!("invalid options: {e}")))?;
    let instance = if value.get("pieces").is_some() {
        let raw: RawAssembly = serde_json::from_value(value).map_err(|e| ApiError::bad_request(format!("invalid raw assembly: {e}")))?;
        let tol = opts.tol.unwrap_or(SNAP_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(ApiError::bad_request("tol must be positive"));
        }
        normalize(&raw, tol, opts.instance_id.as_deref()).map_err(normalize_error)?
    } else if value.get("final_state").is_some() {
        let doc = parse_document(body_text(&body)?, &[Field::FinalState]);
        if !doc.report.is_empty() {
            return Err(ApiError::new(ErrorCode::BadRequest, "unreadable final_state", json!(doc.report)));
        }
        let id = opts.instance_id.or(doc.instance_id);
        normalize_pieces(doc.final_state.unwrap_or_default(), id.as_deref()).map_err(normalize_error)?
    } else {
        return Err(ApiError::bad_request("expected a raw assembly with pieces or a document with final_state"));
    };
    Ok(tce_json(&instance))
}

/// Renders `{"outline"}` / `{"target_outline"}` as a silhouette, or
/// `{"final_state"}` as a coloured assembly.
fn render(body: Bytes) -> ApiResult {
    let value = body_json(&body)?;
    let annotate = match value.get("annotate") {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(ApiError::bad_request("annotate must be a boolean")),
    };
    let outline = value.get("outline").or_else(|| value.get("target_outline"));
    let svg = if let Some(o) = outline {
        let o = parse_outline(&o.to_string()).map_err(|r| ApiError::new(ErrorCode::BadRequest, "unreadable outline", json!(r)))?;
        render_outline(&o, annotate)
    } else if let Some(state) = value.get("final_state") {
        let doc = parse_document(&json!({"final_state": state}).to_string(), &[Field::FinalState]);
        match doc.final_state {
            Some(p) if doc.report.is_empty() && !p.is_empty() => render_pieces(&p),
            _ => return Err(ApiError::new(ErrorCode::BadRequest, "unreadable final_state", json!(doc.report))),
        }
    } else {
        return Err(ApiError::bad_request("expected outline or final_state"));
    };
    Ok(json!({"svg": svg}))
}

pub fn router() -> Router {
    Router::new()
        .route("/pieces", get(|| compute(pieces)))
        .route("/snap", post(|b: Bytes| compute(move || snap(b))))
        .route("/validate", post(|b: Bytes| compute(move || validate(b))))
        .route("/normalize", post(|b: Bytes| compute(move || normalize_endpoint(b))))
        .route("/render", post(|b: Bytes| compute(move || render(b))))
        .fallback(|| async {
            let mut r = envelope(Err(ApiError::bad_request("unknown endpoint")));
            *r.status_mut() = StatusCode::NOT_FOUND;
            r
        })
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("refusing to bind non-loopback address {0} without allow_remote")]
    NotLoopback(IpAddr),
    #[error("invalid {PORT_ENV} value {0:?}")]
    BadPortEnv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ServeConfig {
    pub host: IpAddr,
    pub port: u16,
    pub allow_remote: bool,
}

impl Default for ServeConfig {
    fn default() -> Self {
        Self { host: IpAddr::V4(Ipv4Addr::LOCALHOST), port: DEFAULT_PORT, allow_remote: false }
    }
}

impl ServeConfig {
    pub fn addr(&self) -> Result<SocketAddr, ServiceError> {
        if !self.host.is_loopback() && !self.allow_remote {
            return Err(ServiceError::NotLoopback(self.host));
        }
        Ok(SocketAddr::new(self.host, self.port))
    }
}

/// Port from the environment, if set.
pub fn port_from_env() -> Result<Option<u16>, ServiceError> {
    match std::env::var(PORT_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| ServiceError::BadPortEnv(v)),
        Err(_) => Ok(None),
    }
}

pub async fn serve(listener: tokio::net::TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router()).await
}

/// Binds and serves until the process is stopped. `on_bound` receives the
/// bound address (useful with port 0).
pub fn run(cfg: &ServeConfig, on_bound: impl FnOnce(SocketAddr)) -> Result<(), ServiceError> {
    let addr = cfg.addr()?;
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        let bound = listener.local_addr()?;
        log::info!("listening on {bound}");
        on_bound(bound);
        serve(listener).await?;
        Ok(())
    })
}

//! Cache-first client for chat-style model endpoints.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use base64::Engine;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use tangram_core::pipeline::{PromptBundle, Variant};
use thiserror::Error;

use crate::ResponseRecord;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GatewayConfig {
    pub endpoint: String,
    /// Request template name; only `chat-completions` is defined.
    pub template: String,
    pub model: String,
    /// Environment variable holding the bearer token.
    pub token_env: Option<String>,
    pub max_parallel: usize,
    pub max_retries: u32,
    pub backoff_ms: u64,
    pub timeout_secs: u64,
    pub cache_dir: Option<PathBuf>,
}

impl Default for GatewayConfig {
    fn default() -> Self {
        Self {
            endpoint: "http://127.0.0.1:8000/v1/chat/completions".into(),
            template: "chat-completions".into(),
            model: "default".into(),
            token_env: None,
            max_parallel: 4,
            max_retries: 3,
            backoff_ms: 500,
            timeout_secs: 120,
            cache_dir: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("max_parallel must be at least 1")]
    Parallelism,
    #[error("unknown request template {0:?}")]
    Template(String),
    #[error("cannot build HTTP client: {0}")]
    Client(String),
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Full => "full",
        Variant::VisualCentric => "visual_centric",
    }
}

/// Cache file for one request; the model is part of the key so that several
/// models may share a cache directory.
pub fn cache_path(dir: &Path, bundle: &PromptBundle, cfg: &GatewayConfig) -> PathBuf {
    let key = format!("{}\u{1f}{}\u{1f}{}\u{1f}{}", bundle.instance_id, cfg.template, variant_name(bundle.variant), cfg.model);
    let digest = Sha256::digest(key.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    dir.join(format!("{hex}.json"))
}

fn request_body(bundle: &PromptBundle, cfg: &GatewayConfig) -> Value {
    let image = base64::engine::general_purpose::STANDARD.encode(bundle.image_svg.as_bytes());
    json!({
        "model": cfg.model,
        "messages": [{
            "role": "user",
            "content": [
                {"type": "text", "text": bundle.text},
                {"type": "image_url", "image_url": {"url": format!("data:image/svg+xml;base64,{image}")}},
            ],
        }],
    })
}

fn response_text(v: &Value) -> Option<String> {
    let content = &v["choices"][0]["message"]["content"];
    match content {
        Value::String(s) => Some(s.clone()),
        Value::Array(parts) => Some(parts.iter().filter_map(|p| p["text"].as_str()).collect::<Vec<_>>().join("")),
        _ => None,
    }
}

static WRITES: AtomicU64 = AtomicU64::new(0);

fn store(path: &Path, rec: &ResponseRecord) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!("tmp{}-{}", std::process::id(), WRITES.fetch_add(1, Ordering::Relaxed)));
    fs::write(&tmp, serde_json::to_vec(rec).expect("records serialize"))?;
    fs::rename(&tmp, path)
}

fn fetch(client: &reqwest::blocking::Client, bundle: &PromptBundle, task: u8, cfg: &GatewayConfig) -> ResponseRecord {
    let token = cfg.token_env.as_deref().and_then(|v| std::env::var(v).ok());
    let body = request_body(bundle, cfg);
    let start = Instant::now();
    let mut last_error = String::new();
    for attempt in 0..=cfg.max_retries {
        if attempt > 0 {
            std::thread::sleep(Duration::from_millis(cfg.backoff_ms.saturating_mul(1 << (attempt - 1).min(16))));
        }
        let mut req = client.post(&cfg.endpoint).json(&body);
        if let Some(t) = &token {
            req = req.bearer_auth(t);
        }
        match req.send() {
            Ok(resp) if resp.status().is_success() => match resp.json::<Value>() {
                Ok(v) => match response_text(&v) {
                    Some(text) => {
                        return ResponseRecord {
                            instance_id: bundle.instance_id.clone(),
                            raw_text: text,
                            task,
                            latency_ms: Some(start.elapsed().as_millis() as u64),
                            retries: Some(attempt),
                            error: None,
                        }
                    }
                    None => last_error = "response has no message content".into(),
                },
                Err(e) => last_error = format!("invalid response body: {e}"),
            },
            Ok(resp) => {
                last_error = format!("HTTP {}", resp.status());
                if !(resp.status().is_server_error() || resp.status().as_u16() == 429) {
                    break;
                }
            }
            Err(e) => last_error = e.to_string(),
        }
    }
    ResponseRecord {
        instance_id: bundle.instance_id.clone(),
        raw_text: String::new(),
        task,
        latency_ms: Some(start.elapsed().as_millis() as u64),
        retries: Some(cfg.max_retries),
        error: Some(last_error),
    }
}

/// One record per bundle, in bundle order. Cached responses are returned
/// without a request; transport failures become records with empty text and
/// an error, and are not cached.
pub fn call_gateway(bundles: &[PromptBundle], task: u8, cfg: &GatewayConfig) -> Result<Vec<ResponseRecord>, GatewayError> {
    if cfg.max_parallel == 0 {
        return Err(GatewayError::Parallelism);
    }
    if cfg.template != "chat-completions" {
        return Err(GatewayError::Template(cfg.template.clone()));
    }
    let client = reqwest::blocking::Client::builder()
        .timeout(Duration::from_secs(cfg.timeout_secs))
        .build()
        .map_err(|e| GatewayError::Client(e.to_string()))?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.max_parallel).build().map_err(|e| GatewayError::Client(e.to_string()))?;
    Ok(pool.install(|| {
        bundles
            .par_iter()
            .map(|b| {
                let path = cfg.cache_dir.as_deref().map(|d| cache_path(d, b, cfg));
                if let Some(rec) = path.as_deref().and_then(|p| fs::read(p).ok()).and_then(|bytes| serde_json::from_slice(&bytes).ok()) {
                    return rec;
                }
                let rec = fetch(&client, b, task, cfg);
                if let (Some(p), None) = (&path, &rec.error) {
                    if let Err(e) = store(p, &rec) {
                        log::warn!("cannot cache response for {}: {e}", b.instance_id);
                    }
                }
                rec
            })
            .collect()
    }))
}

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub prompt: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationResponse {
    pub text: String,
    #[serde(default)]
    pub metadata: Value,
}

/// One request/response pair as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordedPair {
    pub request: GenerationRequest,
    pub response: GenerationResponse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Transport {
    Fixture,
    Http,
    Local,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CallRecord {
    pub transport: Transport,
    pub prompt: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClientError {
    #[error("no recorded response for prompt starting `{0}`")]
    NoRecording(String),
    #[error("{path}: {message}")]
    Fixture { path: PathBuf, message: String },
    #[error("transport error: {0}")]
    Transport(String),
    #[error("service returned HTTP {status}")]
    Status { status: u16 },
    #[error("unexpected response body: {0}")]
    BadResponse(String),
    #[error("empty response text")]
    EmptyResponse,
}

/// A text-generation service. Implementations must be shareable across
/// threads; each call is independent.
pub trait GenerationClient: Send + Sync {
    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, ClientError>;

    /// Every call made so far, in order.
    fn call_log(&self) -> Vec<CallRecord>;

    fn network_calls(&self) -> usize {
        self.call_log().iter().filter(|c| c.transport == Transport::Http).count()
    }
}

impl<C: GenerationClient + ?Sized> GenerationClient for Box<C> {
    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, ClientError> {
        (**self).generate(request)
    }

    fn call_log(&self) -> Vec<CallRecord> {
        (**self).call_log()
    }

    fn network_calls(&self) -> usize {
        (**self).network_calls()
    }
}

fn preview(s: &str) -> String {
    s.chars().take(60).collect()
}

/// Replays recorded pairs, matched on the exact prompt text. Never touches
/// the network.
#[derive(Debug, Default)]
pub struct FixtureClient {
    responses: BTreeMap<String, GenerationResponse>,
    log: Mutex<Vec<CallRecord>>,
}

impl FixtureClient {
    pub fn from_pairs(pairs: impl IntoIterator<Item = RecordedPair>) -> Self {
        FixtureClient {
            responses: pairs.into_iter().map(|p| (p.request.prompt, p.response)).collect(),
            log: Mutex::new(Vec::new()),
        }
    }

    /// Loads every `*.json` file in `dir` as a [`RecordedPair`].
    pub fn open(dir: &Path) -> Result<Self, ClientError> {
        let err = |path: &Path, message: String| ClientError::Fixture { path: path.to_path_buf(), message };
        let mut files: Vec<PathBuf> = fs::read_dir(dir)
            .map_err(|e| err(dir, e.to_string()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        let mut pairs = Vec::new();
        for f in files {
            let text = fs::read_to_string(&f).map_err(|e| err(&f, e.to_string()))?;
            pairs.push(serde_json::from_str::<RecordedPair>(&text).map_err(|e| err(&f, e.to_string()))?);
        }
        Ok(Self::from_pairs(pairs))
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

impl GenerationClient for FixtureClient {
    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, ClientError> {
        self.log
            .lock()
            .unwrap()
            .push(CallRecord { transport: Transport::Fixture, prompt: request.prompt.clone() });
        self.responses
            .get(&request.prompt)
            .cloned()
            .ok_or_else(|| ClientError::NoRecording(preview(&request.prompt)))
    }

    fn call_log(&self) -> Vec<CallRecord> {
        self.log.lock().unwrap().clone()
    }
}

type Responder = dyn Fn(&str) -> Option<String> + Send + Sync;

/// Answers from a function of the prompt; for scripted transcripts and tests.
pub struct FnClient {
    respond: Box<Responder>,
    log: Mutex<Vec<CallRecord>>,
}

impl FnClient {
    pub fn new(respond: impl Fn(&str) -> Option<String> + Send + Sync + 'static) -> Self {
        FnClient { respond: Box::new(respond), log: Mutex::new(Vec::new()) }
    }
}

impl GenerationClient for FnClient {
    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, ClientError> {
        self.log
            .lock()
            .unwrap()
            .push(CallRecord { transport: Transport::Local, prompt: request.prompt.clone() });
        let text = (self.respond)(&request.prompt).ok_or_else(|| ClientError::NoRecording(preview(&request.prompt)))?;
        Ok(GenerationResponse { text, metadata: json!({ "provider": "scripted" }) })
    }

    fn call_log(&self) -> Vec<CallRecord> {
        self.log.lock().unwrap().clone()
    }
}

/// Wraps a client and keeps every successful pair for later replay.
pub struct RecordingClient<C> {
    inner: C,
    pairs: Mutex<Vec<RecordedPair>>,
}

impl<C: GenerationClient> RecordingClient<C> {
    pub fn new(inner: C) -> Self {
        RecordingClient { inner, pairs: Mutex::new(Vec::new()) }
    }

    pub fn pairs(&self) -> Vec<RecordedPair> {
        self.pairs.lock().unwrap().clone()
    }

    pub fn into_inner(self) -> C {
        self.inner
    }
}

impl<C: GenerationClient> GenerationClient for RecordingClient<C> {
    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, ClientError> {
        let response = self.inner.generate(request)?;
        self.pairs
            .lock()
            .unwrap()
            .push(RecordedPair { request: request.clone(), response: response.clone() });
        Ok(response)
    }

    fn call_log(&self) -> Vec<CallRecord> {
        self.inner.call_log()
    }
}

/// Writes pairs as `001.json`, `002.json`, ... in call order.
pub fn write_pairs(dir: &Path, pairs: &[RecordedPair]) -> std::io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    for (i, p) in pairs.iter().enumerate() {
        let path = dir.join(format!("{:03}.json", i + 1));
        let mut text = serde_json::to_string_pretty(p).expect("pair serializes");
        text.push('\n');
        fs::write(&path, text)?;
        out.push(path);
    }
    Ok(out)
}

/// Environment variable holding the service credential.
pub const API_KEY_ENV: &str = "STORYGAME_API_KEY";

#[derive(Debug, Clone, PartialEq)]
pub struct HttpConfig {
    pub endpoint: String,
    pub model: String,
    pub timeout: Duration,
    pub retries: u32,
    /// Name of the environment variable read for a bearer token.
    pub api_key_env: String,
}

impl HttpConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        HttpConfig {
            endpoint: endpoint.into(),
            model: model.into(),
            timeout: Duration::from_secs(60),
            retries: 2,
            api_key_env: API_KEY_ENV.into(),
        }
    }
}

/// POSTs `{model, prompt, temperature, max_output_tokens}` as JSON and reads
/// the reply text from `text`, `choices[0].text`,
/// `choices[0].message.content` or `candidates[0].content.parts[0].text`.
pub struct HttpClient {
    config: HttpConfig,
    agent: ureq::Agent,
    log: Mutex<Vec<CallRecord>>,
}

impl HttpClient {
    pub fn new(config: HttpConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        HttpClient { config, agent, log: Mutex::new(Vec::new()) }
    }

    fn attempt(&self, request: &GenerationRequest) -> Result<GenerationResponse, ClientError> {
        let body = json!({
            "model": self.config.model,
            "prompt": request.prompt,
            "temperature": request.temperature,
            "max_output_tokens": request.max_output_tokens,
        });
        let mut req = self.agent.post(&self.config.endpoint).header("Accept", "application/json");
        if let Ok(key) = std::env::var(&self.config.api_key_env) {
            req = req.header("Authorization", format!("Bearer {key}"));
        }
        let mut resp = req.send_json(&body).map_err(|e| ClientError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        if !(200..300).contains(&status) {
            return Err(ClientError::Status { status });
        }
        let v: Value = resp.body_mut().read_json().map_err(|e| ClientError::BadResponse(e.to_string()))?;
        let text = extract_text(&v).ok_or_else(|| ClientError::BadResponse(preview(&v.to_string())))?;
        if text.trim().is_empty() {
            return Err(ClientError::EmptyResponse);
        }
        Ok(GenerationResponse {
            text,
            metadata: json!({
                "provider": "http",
                "model": v.get("model").cloned().unwrap_or_else(|| json!(self.config.model)),
            }),
        })
    }
}

fn extract_text(v: &Value) -> Option<String> {
    let candidates = [
        v.pointer("/text"),
        v.pointer("/choices/0/text"),
        v.pointer("/choices/0/message/content"),
        v.pointer("/candidates/0/content/parts/0/text"),
    ];
    candidates.into_iter().flatten().find_map(|t| t.as_str().map(str::to_string))
}

fn retryable(e: &ClientError) -> bool {
    match e {
        ClientError::Transport(_) => true,
        ClientError::Status { status } => *status == 429 || *status >= 500,
        _ => false,
    }
}

impl GenerationClient for HttpClient {
    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, ClientError> {
        let mut tries = 0;
        loop {
            self.log
                .lock()
                .unwrap()
                .push(CallRecord { transport: Transport::Http, prompt: request.prompt.clone() });
            match self.attempt(request) {
                Err(e) if retryable(&e) && tries < self.config.retries => {
                    tries += 1;
                    std::thread::sleep(Duration::from_millis(100 * tries as u64));
                }
                other => return other,
            }
        }
    }

    fn call_log(&self) -> Vec<CallRecord> {
        self.log.lock().unwrap().clone()
    }
}

use std::collections::HashMap;
use std::io::Read;
use std::path::{Component, Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use percent_encoding::percent_decode_str;
use texting_robots::Robot;
use thiserror::Error;
use url::Url;

use super::urls::{normalize_url, SiteScope};
use super::{CrawlConfig, PageSource};

pub const MAX_REDIRECTS: usize = 5;
const MAX_BODY_BYTES: u64 = 16 * 1024 * 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FetchError {
    #[error("network error: {0}")]
    Network(String),
    #[error("timed out")]
    Timeout,
    #[error("more than {MAX_REDIRECTS} redirects")]
    TooManyRedirects,
    #[error("redirect left the site: {0}")]
    LeftSite(String),
    #[error("bad redirect target \"{0}\"")]
    BadRedirect(String),
    #[error("path escapes the offline root: {0}")]
    OutsideRoot(String),
    #[error("unsupported URL for this backend: {0}")]
    Unsupported(String),
}

/// One request/response exchange, without redirect handling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawResponse {
    pub status: u16,
    pub content_type: Option<String>,
    pub location: Option<String>,
    pub body: Vec<u8>,
}

impl RawResponse {
    pub fn ok(content_type: Option<&str>, body: Vec<u8>) -> Self {
        RawResponse {
            status: 200,
            content_type: content_type.map(str::to_string),
            location: None,
            body,
        }
    }

    pub fn status(status: u16) -> Self {
        RawResponse {
            status,
            content_type: None,
            location: None,
            body: Vec::new(),
        }
    }

    pub fn redirect(status: u16, location: &str) -> Self {
        RawResponse {
            location: Some(location.to_string()),
            ..RawResponse::status(status)
        }
    }
}

/// Something that can answer a GET.
pub trait Backend: Send + Sync {
    fn get(&self, url: &Url) -> Result<RawResponse, FetchError>;
}

/// Live HTTP(S) backend.
pub struct HttpBackend {
    agent: ureq::Agent,
}

impl HttpBackend {
    pub fn new(config: &CrawlConfig) -> Self {
        let agent = ureq::AgentBuilder::new()
            .redirects(0)
            .timeout(Duration::from_millis(config.timeout_ms))
            .user_agent(&config.user_agent)
            .build();
        HttpBackend { agent }
    }
}

fn is_timeout(err: &(dyn std::error::Error + 'static)) -> bool {
    let mut source = Some(err);
    while let Some(e) = source {
        if let Some(io) = e.downcast_ref::<std::io::Error>() {
            if matches!(
                io.kind(),
                std::io::ErrorKind::TimedOut | std::io::ErrorKind::WouldBlock
            ) {
                return true;
            }
        }
        source = e.source();
    }
    false
}

impl Backend for HttpBackend {
    fn get(&self, url: &Url) -> Result<RawResponse, FetchError> {
        let response = match self.agent.get(url.as_str()).call() {
            Ok(r) => r,
            Err(ureq::Error::Status(code, _)) => return Ok(RawResponse::status(code)),
            Err(ureq::Error::Transport(t)) => {
                return Err(if is_timeout(&t) {
                    FetchError::Timeout
                } else {
                    FetchError::Network(t.to_string())
                });
            }
        };
        let status = response.status();
        let content_type = response.header("content-type").map(str::to_string);
        let location = response.header("location").map(str::to_string);
        let mut body = Vec::new();
        if (200..300).contains(&status) {
            response
                .into_reader()
                .take(MAX_BODY_BYTES)
                .read_to_end(&mut body)
                .map_err(|e| {
                    if is_timeout(&e) {
                        FetchError::Timeout
                    } else {
                        FetchError::Network(e.to_string())
                    }
                })?;
        }
        Ok(RawResponse {
            status,
            content_type,
            location,
            body,
        })
    }
}

/// Serves URLs from a directory tree.
///
/// `file:` URLs map their path onto the root; `http(s)` URLs map to
/// `root/<host>/<path>`, so one root can hold several offline sites.
/// A directory URL without a trailing slash gets a 301 to the slashed form,
/// and a slashed directory serves its `index.html`.
pub struct FileBackend {
    root: PathBuf,
}

impl FileBackend {
    pub fn new(root: impl AsRef<Path>) -> std::io::Result<Self> {
        Ok(FileBackend {
            root: root.as_ref().canonicalize()?,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn local_path(&self, url: &Url) -> Result<PathBuf, FetchError> {
        let mut path = self.root.clone();
        match url.scheme() {
            "file" => {}
            "http" | "https" => {
                let host = url
                    .host_str()
                    .ok_or_else(|| FetchError::Unsupported(url.to_string()))?;
                path.push(host);
            }
            _ => return Err(FetchError::Unsupported(url.to_string())),
        }
        for segment in url.path().split('/').filter(|s| !s.is_empty()) {
            let decoded = percent_decode_str(segment)
                .decode_utf8()
                .map_err(|_| FetchError::OutsideRoot(url.to_string()))?;
            let mut components = Path::new(decoded.as_ref()).components();
            match (components.next(), components.next()) {
                (Some(Component::Normal(part)), None) => path.push(part),
                _ => return Err(FetchError::OutsideRoot(url.to_string())),
            }
        }
        Ok(path)
    }
}

fn guess_content_type(path: &Path) -> Option<&'static str> {
    let ext = path.extension()?.to_str()?.to_ascii_lowercase();
    match ext.as_str() {
        "html" | "htm" => Some("text/html"),
        "txt" => Some("text/plain"),
        "css" => Some("text/css"),
        "pdf" => Some("application/pdf"),
        _ => None,
    }
}

impl Backend for FileBackend {
    fn get(&self, url: &Url) -> Result<RawResponse, FetchError> {
        let mut path = self.local_path(url)?;
        if path.is_dir() {
            if !url.path().ends_with('/') {
                let mut slashed = url.clone();
                slashed.set_path(&format!("{}/", url.path()));
                return Ok(RawResponse::redirect(301, slashed.as_str()));
            }
            path.push("index.html");
        }
        let Ok(real) = path.canonicalize() else {
            return Ok(RawResponse::status(404));
        };
        if !real.starts_with(&self.root) {
            return Err(FetchError::OutsideRoot(url.to_string()));
        }
        match std::fs::read(&real) {
            Ok(body) => Ok(RawResponse::ok(guess_content_type(&real), body)),
            Err(e) if e.kind() == std::io::ErrorKind::PermissionDenied => {
                Ok(RawResponse::status(403))
            }
            Err(_) => Ok(RawResponse::status(404)),
        }
    }
}

/// Per-host minimum spacing between requests, shared by all workers.
pub struct HostThrottle {
    delay: Duration,
    next_slot: Mutex<HashMap<String, Instant>>,
}

impl HostThrottle {
    pub fn new(delay: Duration) -> Self {
        HostThrottle {
            delay,
            next_slot: Mutex::new(HashMap::new()),
        }
    }

    /// Blocks until the host of `url` may be contacted again.
    pub fn wait(&self, url: &Url) {
        if self.delay.is_zero() {
            return;
        }
        let host = url.host_str().unwrap_or("").to_string();
        let now = Instant::now();
        let slot = {
            let mut slots = self.next_slot.lock().expect("throttle lock poisoned");
            let slot = slots.get(&host).copied().unwrap_or(now).max(now);
            slots.insert(host, slot + self.delay);
            slot
        };
        std::thread::sleep(slot.saturating_duration_since(now));
    }
}

/// Fetches `url`, following up to [`MAX_REDIRECTS`] same-site redirects.
pub fn fetch(
    url: &Url,
    depth: usize,
    backend: &dyn Backend,
    scope: &SiteScope,
    throttle: &HostThrottle,
) -> Result<PageSource, FetchError> {
    let mut current = url.clone();
    for hop in 0..=MAX_REDIRECTS {
        throttle.wait(&current);
        let response = backend.get(&current)?;
        let is_redirect = matches!(response.status, 301 | 302 | 303 | 307 | 308);
        if let (true, Some(location)) = (is_redirect, response.location.as_deref()) {
            if hop == MAX_REDIRECTS {
                return Err(FetchError::TooManyRedirects);
            }
            let next = normalize_url(&current, location)
                .map_err(|_| FetchError::BadRedirect(location.to_string()))?;
            if scope.is_outbound(&next) {
                return Err(FetchError::LeftSite(next.to_string()));
            }
            current = next;
            continue;
        }
        let success = (200..300).contains(&response.status);
        return Ok(PageSource {
            requested_url: url.clone(),
            final_url: current,
            status: response.status,
            content_type: response.content_type,
            body: success.then_some(response.body),
            depth,
        });
    }
    unreachable!("loop returns on the last hop")
}

/// robots.txt rules, fetched once per origin.
pub struct RobotsCache {
    user_agent: String,
    enabled: bool,
    rules: Mutex<HashMap<String, Option<Robot>>>,
}

impl RobotsCache {
    pub fn new(user_agent: &str, enabled: bool) -> Self {
        RobotsCache {
            user_agent: user_agent.to_string(),
            enabled,
            rules: Mutex::new(HashMap::new()),
        }
    }

    pub fn allowed(&self, url: &Url, backend: &dyn Backend) -> bool {
        if !self.enabled {
            return true;
        }
        let origin = url.origin().ascii_serialization();
        let mut rules = self.rules.lock().expect("robots lock poisoned");
        let robot = rules.entry(origin).or_insert_with(|| {
            let robots_url = url.join("/robots.txt").ok()?;
            let response = backend.get(&robots_url).ok()?;
            if response.status != 200 {
                return None;
            }
            Robot::new(&self.user_agent, &response.body).ok()
        });
        robot.as_ref().is_none_or(|r| r.allowed(url.as_str()))
    }
}

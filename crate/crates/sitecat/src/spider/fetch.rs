//! Page fetching behind a trait, so crawls run identically against the
//! live web and against fixtures.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::Duration;

use thiserror::Error;
use url::Url;

/// A transport-level fetch failure (connect, DNS, timeout, read).
#[derive(Debug, Clone, Error)]
#[error("{0}")]
pub struct FetchError(pub String);

/// One HTTP response. Header names are lowercased.
#[derive(Debug, Clone)]
pub struct FetchResponse {
    pub status: u16,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl FetchResponse {
    pub fn ok(body: impl Into<Vec<u8>>) -> Self {
        FetchResponse {
            status: 200,
            headers: Vec::new(),
            body: body.into(),
        }
    }

    pub fn redirect(status: u16, location: &str) -> Self {
        FetchResponse {
            status,
            headers: vec![("location".to_string(), location.to_string())],
            body: Vec::new(),
        }
    }

    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }

    pub fn is_redirect(&self) -> bool {
        matches!(self.status, 301 | 302 | 303 | 307 | 308)
    }

    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }
}

/// Fetches one URL. Implementations must honor the configured
/// per-request timeout and must not follow redirects themselves; the
/// crawler owns redirect policy.
pub trait Fetcher: Send + Sync {
    fn fetch(&self, url: &Url) -> Result<FetchResponse, FetchError>;
}

/// Live HTTP fetcher.
pub struct HttpFetcher {
    agent: ureq::Agent,
}

impl HttpFetcher {
    pub fn new(timeout: Duration, user_agent: &str) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .max_redirects(0)
            .http_status_as_error(false)
            .timeout_global(Some(timeout))
            .user_agent(user_agent)
            .build()
            .into();
        HttpFetcher { agent }
    }
}

impl Fetcher for HttpFetcher {
    fn fetch(&self, url: &Url) -> Result<FetchResponse, FetchError> {
        let mut response = self
            .agent
            .get(url.as_str())
            .call()
            .map_err(|e| FetchError(e.to_string()))?;
        let status = response.status().as_u16();
        let headers = response
            .headers()
            .iter()
            .map(|(name, value)| {
                (
                    name.as_str().to_ascii_lowercase(),
                    value.to_str().unwrap_or("").to_string(),
                )
            })
            .collect();
        let body = response
            .body_mut()
            .read_to_vec()
            .map_err(|e| FetchError(format!("body read: {e}")))?;
        Ok(FetchResponse {
            status,
            headers,
            body,
        })
    }
}

/// In-memory fetcher for tests and demos: maps exact URLs to canned
/// responses and records every request it serves.
#[derive(Default)]
pub struct ScriptedFetcher {
    routes: HashMap<String, Result<FetchResponse, FetchError>>,
    log: Mutex<Vec<String>>,
}

impl ScriptedFetcher {
    pub fn new() -> Self {
        Self::default()
    }

    /// Serves an HTML page at the URL.
    pub fn page(mut self, url: &str, html: &str) -> Self {
        self.routes
            .insert(url.to_string(), Ok(FetchResponse::ok(html.as_bytes().to_vec())));
        self
    }

    /// Serves a 302 redirect.
    pub fn redirect(mut self, url: &str, location: &str) -> Self {
        self.routes
            .insert(url.to_string(), Ok(FetchResponse::redirect(302, location)));
        self
    }

    /// Serves an arbitrary response.
    pub fn response(mut self, url: &str, response: FetchResponse) -> Self {
        self.routes.insert(url.to_string(), Ok(response));
        self
    }

    /// Simulates a transport failure.
    pub fn failure(mut self, url: &str, reason: &str) -> Self {
        self.routes
            .insert(url.to_string(), Err(FetchError(reason.to_string())));
        self
    }

    /// URLs fetched so far, in request order.
    pub fn requests(&self) -> Vec<String> {
        self.log.lock().unwrap().clone()
    }
}

impl Fetcher for ScriptedFetcher {
    fn fetch(&self, url: &Url) -> Result<FetchResponse, FetchError> {
        self.log.lock().unwrap().push(url.as_str().to_string());
        match self.routes.get(url.as_str()) {
            Some(Ok(resp)) => Ok(resp.clone()),
            Some(Err(e)) => Err(e.clone()),
            None => Err(FetchError(format!("connection refused: {url}"))),
        }
    }
}

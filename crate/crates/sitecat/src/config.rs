//! Toolkit configuration: one sectioned key = value file (TOML) holding
//! every knob, each overridable by a command-line flag (flags win).

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;

use crate::knn::DecisionConfig;
use crate::lsi::IndexConfig;
use crate::spider::CrawlPolicy;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub crawl: CrawlSection,
    #[serde(default)]
    pub index: IndexSection,
    #[serde(default)]
    pub decision: DecisionSection,
    #[serde(default)]
    pub paths: PathsSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrawlSection {
    pub key_substrings: Vec<String>,
    pub max_followed_links: usize,
    pub max_depth: usize,
    pub timeout_ms: u64,
    pub max_redirects: usize,
    pub politeness_delay_ms: u64,
    pub respect_robots: bool,
    pub keep_sources: bool,
    pub user_agent: String,
}

impl Default for CrawlSection {
    fn default() -> Self {
        let p = CrawlPolicy::default();
        CrawlSection {
            key_substrings: p.key_substrings,
            max_followed_links: p.max_followed_links,
            max_depth: p.max_depth,
            timeout_ms: p.per_request_timeout.as_millis() as u64,
            max_redirects: p.max_redirects,
            politeness_delay_ms: p.politeness_delay.as_millis() as u64,
            respect_robots: p.respect_robots,
            keep_sources: p.keep_sources,
            user_agent: p.user_agent,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IndexSection {
    pub rank: usize,
    pub min_df: usize,
    /// Optional stopword list: one word per line, `#` comments.
    pub stopwords: Option<PathBuf>,
}

impl Default for IndexSection {
    fn default() -> Self {
        let c = IndexConfig::default();
        IndexSection {
            rank: c.rank,
            min_df: c.min_df,
            stopwords: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecisionSection {
    pub knn_k: usize,
    pub threshold: f64,
    pub multi_label: bool,
}

impl Default for DecisionSection {
    fn default() -> Self {
        let c = DecisionConfig::default();
        DecisionSection {
            knn_k: c.k,
            threshold: c.threshold,
            multi_label: c.multi_label,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PathsSection {
    pub crosswalk: Option<PathBuf>,
}

impl Config {
    pub fn load(path: impl AsRef<Path>) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let config: Config = toml::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.crawl.key_substrings.is_empty() {
            return Err(ConfigError::Invalid("crawl.key_substrings is empty".into()));
        }
        if self.crawl.max_depth < 1 {
            return Err(ConfigError::Invalid("crawl.max_depth must be >= 1".into()));
        }
        if self.index.rank < 1 {
            return Err(ConfigError::Invalid("index.rank must be >= 1".into()));
        }
        if self.decision.knn_k < 1 {
            return Err(ConfigError::Invalid("decision.knn_k must be >= 1".into()));
        }
        if self.decision.threshold < 0.0 {
            return Err(ConfigError::Invalid(
                "decision.threshold must be >= 0".into(),
            ));
        }
        Ok(())
    }

    pub fn crawl_policy(&self) -> CrawlPolicy {
        CrawlPolicy {
            key_substrings: self.crawl.key_substrings.clone(),
            max_followed_links: self.crawl.max_followed_links,
            max_depth: self.crawl.max_depth,
            per_request_timeout: Duration::from_millis(self.crawl.timeout_ms),
            max_redirects: self.crawl.max_redirects,
            politeness_delay: Duration::from_millis(self.crawl.politeness_delay_ms),
            respect_robots: self.crawl.respect_robots,
            keep_sources: self.crawl.keep_sources,
            user_agent: self.crawl.user_agent.clone(),
        }
    }

    pub fn index_config(&self) -> Result<IndexConfig, ConfigError> {
        let stopwords = match &self.index.stopwords {
            Some(path) => load_stopwords(path)?,
            None => BTreeSet::new(),
        };
        Ok(IndexConfig {
            rank: self.index.rank,
            min_df: self.index.min_df,
            stopwords,
        })
    }

    pub fn decision_config(&self) -> DecisionConfig {
        DecisionConfig {
            k: self.decision.knn_k,
            threshold: self.decision.threshold,
            multi_label: self.decision.multi_label,
        }
    }
}

pub fn load_stopwords(path: impl AsRef<Path>) -> Result<BTreeSet<String>, ConfigError> {
    let text = std::fs::read_to_string(path)?;
    Ok(text
        .lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_lowercase())
        .collect())
}

//! Run configuration: a flat `key = value` file, overridable key by key.

use std::path::{Path, PathBuf};

use crate::analysis::TimeWindow;
use crate::corpus::Group;
use crate::matchers::{Bm25Params, MatcherKind};
use crate::textpipe::{Stopwords, TokenizerConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tweets_path: Option<PathBuf>,
    pub articles_path: Option<PathBuf>,
    pub labels_path: Option<PathBuf>,
    pub embeddings_path: Option<PathBuf>,
    pub docvecs_path: Option<PathBuf>,
    pub lexicon_path: Option<PathBuf>,
    pub index_path: Option<PathBuf>,
    pub matches_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub tokenizer: TokenizerConfig,
    pub matcher: MatcherKind,
    pub bm25: Bm25Params,
    pub threshold: f64,
    pub election_start: i64,
    pub election_end: i64,
    pub peak_k: f64,
    pub jobs: usize,
    pub timeline_bin_seconds: i64,
    pub top_n: usize,
    pub concentration_fractions: Vec<f64>,
    pub keywords: Vec<String>,
    pub keyword_user: Option<String>,
    pub analysis_group: Option<Group>,
    pub min_precision: Option<f64>,
    pub quiet: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            tweets_path: None,
            articles_path: None,
            labels_path: None,
            embeddings_path: None,
            docvecs_path: None,
            lexicon_path: None,
            index_path: None,
            matches_path: None,
            output_dir: PathBuf::from("out"),
            tokenizer: TokenizerConfig::default(),
            matcher: MatcherKind::Bm25,
            bm25: Bm25Params::default(),
            threshold: 30.5,
            election_start: TimeWindow::election_2016().start(),
            election_end: TimeWindow::election_2016().end(),
            peak_k: 2.0,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            timeline_bin_seconds: 86_400,
            top_n: 1000,
            concentration_fractions: vec![0.1, 0.2],
            keywords: [
                "Clinton",
                "Sanders",
                "Trump",
                "election",
                "Democratic",
                "FBI",
            ]
            .map(String::from)
            .to_vec(),
            keyword_user: None,
            analysis_group: None,
            min_precision: None,
            quiet: false,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Config(format!("{key}: cannot parse {value:?}: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!(
            "{key}: expected true/false, got {value:?}"
        ))),
    }
}

/// Epoch seconds, an RFC 3339 timestamp, or a `YYYY-MM-DD` date (UTC midnight).
pub fn parse_time(key: &str, value: &str) -> Result<i64> {
    if let Ok(secs) = value.parse::<i64>() {
        return Ok(secs);
    }
    if let Ok(dt) = chrono::DateTime::parse_from_rfc3339(value) {
        return Ok(dt.timestamp());
    }
    if let Ok(d) = chrono::NaiveDate::parse_from_str(value, "%Y-%m-%d") {
        return Ok(d
            .and_hms_opt(0, 0, 0)
            .expect("midnight")
            .and_utc()
            .timestamp());
    }
    Err(Error::Config(format!(
        "{key}: expected epoch seconds, RFC 3339 or YYYY-MM-DD, got {value:?}"
    )))
}

fn optional(value: &str) -> Option<&str> {
    match value {
        "" | "none" | "null" => None,
        v => Some(v),
    }
}

impl RunConfig {
    /// Reads a config file. Relative paths inside it are resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| {
            if source.kind() == std::io::ErrorKind::NotFound {
                Error::MissingInput(path.to_path_buf())
            } else {
                Error::Read {
                    path: path.to_path_buf(),
                    source,
                }
            }
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, base)
    }

    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            cfg.set_with_base(key.trim(), unquote(value.trim()), base)?;
        }
        cfg.election()?;
        Ok(cfg)
    }

    pub fn election(&self) -> Result<TimeWindow> {
        Ok(TimeWindow::new(self.election_start, self.election_end)?)
    }

    /// Sets one key; relative paths are taken as given.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.set_with_base(key, value, Path::new(""))
    }

    fn set_with_base(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let path = |v: &str| optional(v).map(|p| base.join(p));
        match key {
            "tweets_path" => self.tweets_path = path(value),
            "articles_path" => self.articles_path = path(value),
            "labels_path" => self.labels_path = path(value),
            "embeddings_path" => self.embeddings_path = path(value),
            "docvecs_path" => self.docvecs_path = path(value),
            "lexicon_path" => self.lexicon_path = path(value),
            "index_path" => self.index_path = path(value),
            "matches_path" => self.matches_path = path(value),
            "output_dir" => {
                self.output_dir =
                    path(value).ok_or_else(|| Error::Config("output_dir: empty".into()))?
            }
            "stopwords_path" => {
                self.tokenizer.stopwords = match value {
                    "" | "default" => Stopwords::Default,
                    "none" => Stopwords::Disabled,
                    p => Stopwords::File(base.join(p)),
                }
            }
            "min_token_len" => self.tokenizer.min_token_len = parse_num(key, value)?,
            "strip_urls" => self.tokenizer.strip_urls = parse_bool(key, value)?,
            "strip_mentions" => self.tokenizer.strip_mentions = parse_bool(key, value)?,
            "stemming" => self.tokenizer.stemming = parse_bool(key, value)?,
            "matcher" => self.matcher = value.parse().map_err(Error::Config)?,
            "bm25_k1" => {
                self.bm25 = Bm25Params::new(parse_num(key, value)?, self.bm25.b)?;
            }
            "bm25_b" => {
                self.bm25 = Bm25Params::new(self.bm25.k1, parse_num(key, value)?)?;
            }
            "threshold" => {
                let h: f64 = parse_num(key, value)?;
                if !h.is_finite() {
                    return Err(Error::Config(format!(
                        "threshold must be finite, got {value}"
                    )));
                }
                self.threshold = h;
            }
            "election_start" => self.election_start = parse_time(key, value)?,
            "election_end" => self.election_end = parse_time(key, value)?,
            "peak_k" => self.peak_k = parse_num(key, value)?,
            "jobs" => {
                let jobs: usize = parse_num(key, value)?;
                if jobs == 0 {
                    return Err(Error::Config("jobs must be at least 1".into()));
                }
                self.jobs = jobs;
            }
            "timeline_bin_seconds" => {
                let w: i64 = parse_num(key, value)?;
                if w <= 0 {
                    return Err(Error::Config(
                        "timeline_bin_seconds must be positive".into(),
                    ));
                }
                self.timeline_bin_seconds = w;
            }
            "top_n" => self.top_n = parse_num(key, value)?,
            "concentration_fractions" => {
                self.concentration_fractions = split_list(value)
                    .map(|v| parse_num(key, v))
                    .collect::<Result<_>>()?
            }
            "keywords" => self.keywords = split_list(value).map(String::from).collect(),
            "keyword_user" => self.keyword_user = optional(value).map(String::from),
            "analysis_group" => {
                self.analysis_group = match optional(value) {
                    None | Some("all") => None,
                    Some(g) => Some(g.parse().map_err(Error::Config)?),
                }
            }
            "min_precision" => {
                self.min_precision = optional(value).map(|v| parse_num(key, v)).transpose()?
            }
            "quiet" => self.quiet = parse_bool(key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn index_path(&self) -> PathBuf {
        self.index_path
            .clone()
            .unwrap_or_else(|| self.output_dir.join("index.bin"))
    }

    pub fn matches_path(&self) -> PathBuf {
        self.matches_path
            .clone()
            .unwrap_or_else(|| self.output_dir.join("matches.jsonl"))
    }

    /// The configured path for `key`, which must exist.
    pub fn require(&self, key: &str, path: &Option<PathBuf>) -> Result<PathBuf> {
        let p = path
            .clone()
            .ok_or_else(|| Error::Config(format!("{key} is not set")))?;
        if !p.exists() {
            return Err(Error::MissingInput(p));
        }
        Ok(p)
    }
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(v)
}

fn split_list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

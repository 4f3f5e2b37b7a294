//! Tweets, verified rumor articles and evaluation labels, loaded from JSON Lines.
//!
//! Loading is fail-fast: the first bad line aborts the load and nothing is
//! returned. Every type invariant is checked here so downstream code can rely
//! on it without re-validating.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("MALFORMED_LINE: {path} line {line_no}: {reason}")]
    MalformedLine {
        path: PathBuf,
        line_no: usize,
        reason: String,
    },
    #[error("DUPLICATE_ID: {0}")]
    DuplicateId(String),
    #[error("EMPTY_BODY: article {0}")]
    EmptyBody(String),
    #[error("EMPTY_TEXT: tweet {0}")]
    EmptyText(String),
    #[error("DANGLING_TWEET_REF: {0}")]
    DanglingTweetRef(String),
    #[error("DANGLING_ARTICLE_REF: {0}")]
    DanglingArticleRef(String),
    #[error("RUMOR_WITHOUT_ARTICLE: tweet {0} (article_id must be present iff label is RUMOR)")]
    RumorWithoutArticle(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Group {
    ClintonFollower,
    TrumpFollower,
    Other,
}

impl Group {
    pub const ALL: [Group; 3] = [Group::ClintonFollower, Group::TrumpFollower, Group::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::ClintonFollower => "CLINTON_FOLLOWER",
            Group::TrumpFollower => "TRUMP_FOLLOWER",
            Group::Other => "OTHER",
        }
    }
}

impl std::str::FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Group::ALL
            .into_iter()
            .find(|g| g.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown group {s:?}"))
    }
}

/// Candidate a rumor article is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Subject {
    Clinton,
    Trump,
    Other,
}

impl Subject {
    pub fn as_str(self) -> &'static str {
        match self {
            Subject::Clinton => "CLINTON",
            Subject::Trump => "TRUMP",
            Subject::Other => "OTHER",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tweet {
    pub id: String,
    pub user_id: String,
    pub group: Group,
    /// UTC seconds since the Unix epoch.
    pub timestamp: i64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RumorArticle {
    pub id: String,
    pub title: String,
    pub body: String,
    #[serde(default = "other_only", deserialize_with = "subjects_or_other")]
    pub subjects: BTreeSet<Subject>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_url: Option<String>,
}

fn other_only() -> BTreeSet<Subject> {
    BTreeSet::from([Subject::Other])
}

fn subjects_or_other<'de, D>(de: D) -> Result<BTreeSet<Subject>, D::Error>
where
    D: serde::Deserializer<'de>,
{
    let subjects = Option::<BTreeSet<Subject>>::deserialize(de)?.unwrap_or_default();
    Ok(if subjects.is_empty() {
        other_only()
    } else {
        subjects
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Label {
    Rumor,
    Nonrumor,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Rumor => "RUMOR",
            Label::Nonrumor => "NONRUMOR",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledTweet {
    pub tweet_id: String,
    pub label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub article_id: Option<String>,
}

/// A fully loaded and cross-validated corpus. Immutable once built.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusHandle {
    pub tweets: Vec<Tweet>,
    pub articles: Vec<RumorArticle>,
    pub labels: Option<Vec<LabeledTweet>>,
}

impl CorpusHandle {
    pub fn load(
        tweets: &Path,
        articles: &Path,
        labels: Option<&Path>,
    ) -> Result<Self, CorpusError> {
        let mut corpus = CorpusHandle {
            tweets: load_tweets(tweets)?,
            articles: load_articles(articles)?,
            labels: None,
        };
        if let Some(path) = labels {
            corpus.labels = Some(load_labels(path, &corpus)?);
        }
        Ok(corpus)
    }

    pub fn tweet(&self, id: &str) -> Option<&Tweet> {
        self.tweets.iter().find(|t| t.id == id)
    }

    pub fn write_jsonl(&self, dir: &Path) -> Result<(), CorpusError> {
        write_jsonl(&dir.join("tweets.jsonl"), &self.tweets)?;
        write_jsonl(&dir.join("articles.jsonl"), &self.articles)?;
        if let Some(labels) = &self.labels {
            write_jsonl(&dir.join("labels.jsonl"), labels)?;
        }
        Ok(())
    }
}

/// Parses every non-blank line of `path` as one `T`, keeping 1-based line numbers.
fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>, CorpusError> {
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    let mut out = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| CorpusError::MalformedLine {
            path: path.to_path_buf(),
            line_no: idx + 1,
            reason: e.to_string(),
        })?;
        out.push((idx + 1, record));
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), CorpusError> {
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = std::io::BufWriter::new(File::create(path).map_err(io_err)?);
    for r in records {
        let line = serde_json::to_string(r).expect("corpus records always serialize");
        writeln!(w, "{line}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn load_tweets(path: &Path) -> Result<Vec<Tweet>, CorpusError> {
    let records: Vec<(usize, Tweet)> = read_jsonl(path)?;
    let mut seen = HashSet::with_capacity(records.len());
    for (line_no, t) in &records {
        if t.id.is_empty() {
            return Err(CorpusError::MalformedLine {
                path: path.to_path_buf(),
                line_no: *line_no,
                reason: "empty tweet id".into(),
            });
        }
        if !seen.insert(t.id.as_str()) {
            return Err(CorpusError::DuplicateId(t.id.clone()));
        }
        if t.text.trim().is_empty() {
            return Err(CorpusError::EmptyText(t.id.clone()));
        }
    }
    Ok(records.into_iter().map(|(_, t)| t).collect())
}

pub fn load_articles(path: &Path) -> Result<Vec<RumorArticle>, CorpusError> {
    let articles: Vec<RumorArticle> = read_jsonl(path)?.into_iter().map(|(_, a)| a).collect();
    let mut seen = HashSet::with_capacity(articles.len());
    for a in &articles {
        if !seen.insert(a.id.as_str()) {
            return Err(CorpusError::DuplicateId(a.id.clone()));
        }
        if a.body.trim().is_empty() {
            return Err(CorpusError::EmptyBody(a.id.clone()));
        }
    }
    Ok(articles)
}

pub fn load_labels(path: &Path, corpus: &CorpusHandle) -> Result<Vec<LabeledTweet>, CorpusError> {
    let labels: Vec<LabeledTweet> = read_jsonl(path)?.into_iter().map(|(_, l)| l).collect();
    validate_labels(&labels, corpus)?;
    Ok(labels)
}

pub fn validate_labels(labels: &[LabeledTweet], corpus: &CorpusHandle) -> Result<(), CorpusError> {
    let tweet_ids: HashSet<&str> = corpus.tweets.iter().map(|t| t.id.as_str()).collect();
    let article_ids: HashSet<&str> = corpus.articles.iter().map(|a| a.id.as_str()).collect();
    let mut seen = HashMap::with_capacity(labels.len());
    for l in labels {
        if seen.insert(l.tweet_id.as_str(), ()).is_some() {
            return Err(CorpusError::DuplicateId(l.tweet_id.clone()));
        }
        if !tweet_ids.contains(l.tweet_id.as_str()) {
            return Err(CorpusError::DanglingTweetRef(l.tweet_id.clone()));
        }
        match (l.label, &l.article_id) {
            (Label::Rumor, Some(a)) => {
                if !article_ids.contains(a.as_str()) {
                    return Err(CorpusError::DanglingArticleRef(a.clone()));
                }
            }
            (Label::Nonrumor, None) => {}
            _ => return Err(CorpusError::RumorWithoutArticle(l.tweet_id.clone())),
        }
    }
    Ok(())
}

//! Scoring tweets against the article reference set.

pub mod bm25;
pub mod embedding;
pub mod engine;
pub mod index;
pub mod lexicon;
pub mod tfidf;

use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

use crate::corpus::Label;
use crate::textpipe::TextError;

pub use bm25::{score_bm25, Bm25Params, Bm25Scorer};
pub use embedding::{score_embedding, ArticleVectors, EmbeddingScores, EmbeddingTable};
pub use engine::{MatchEngine, Matcher};
pub use index::{build_index, ArticleIndex, Posting};
pub use lexicon::{match_lexicon, LexiconPatternSet};
pub use tfidf::score_tfidf;

#[derive(Debug, Error)]
pub enum MatchError {
    #[error("EMPTY_CORPUS: no articles to index")]
    EmptyCorpus,
    #[error("ALL_EMPTY_AFTER_TOKENIZE: every article tokenized to nothing")]
    AllEmptyAfterTokenize,
    #[error("EMPTY_SCORES: nothing to take the best match of")]
    EmptyScores,
    #[error("score list has {found} entries but the index has {expected} articles")]
    ScoreLength { expected: usize, found: usize },
    #[error("DIM_MISMATCH: {what} has dimension {found}, expected {expected}")]
    DimMismatch {
        expected: usize,
        found: usize,
        what: String,
    },
    #[error("no document vector for article {0}")]
    MissingVector(String),
    #[error("embedding file line {line}: {reason}")]
    EmbeddingFormat { line: usize, reason: String },
    #[error("invalid lexicon pattern: {0}")]
    Pattern(String),
    #[error("invalid BM25 parameters: {0}")]
    InvalidParams(String),
    #[error("index file: {0}")]
    IndexFormat(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Text(#[from] TextError),
}

/// Which scoring algorithm a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatcherKind {
    Tfidf,
    Bm25,
    /// Averaged word vectors.
    Embedding,
    /// Externally trained document vectors.
    Docvec,
    Lexicon,
}

impl MatcherKind {
    pub const ALL: [MatcherKind; 5] = [
        MatcherKind::Tfidf,
        MatcherKind::Bm25,
        MatcherKind::Embedding,
        MatcherKind::Docvec,
        MatcherKind::Lexicon,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MatcherKind::Tfidf => "TFIDF",
            MatcherKind::Bm25 => "BM25",
            MatcherKind::Embedding => "EMBEDDING",
            MatcherKind::Docvec => "DOCVEC",
            MatcherKind::Lexicon => "LEXICON",
        }
    }

    /// True for matchers that produce per-article scores.
    pub fn is_vector(self) -> bool {
        self != MatcherKind::Lexicon
    }
}

impl std::fmt::Display for MatcherKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for MatcherKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        MatcherKind::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .or_else(|| match s.to_ascii_lowercase().as_str() {
                "tf-idf" => Some(MatcherKind::Tfidf),
                "word2vec" => Some(MatcherKind::Embedding),
                "doc2vec" => Some(MatcherKind::Docvec),
                _ => None,
            })
            .ok_or_else(|| {
                format!(
                    "unknown matcher {s:?} (expected TFIDF, BM25, EMBEDDING, DOCVEC or LEXICON)"
                )
            })
    }
}

/// Outcome of scoring one tweet.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchResult {
    pub tweet_id: String,
    pub best_article_id: Option<String>,
    pub best_score: f64,
    pub scores: Option<Vec<f64>>,
    /// The matcher had no representation for the tweet (embedding matchers).
    pub undefined: bool,
}

/// One line of the match output file.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct MatchRecord {
    pub tweet_id: String,
    pub article_id: Option<String>,
    pub score: f64,
    pub label: Label,
}

/// Argmax over `scores`; ties go to the lowest ordinal.
pub fn best_match(scores: &[f64], index: &ArticleIndex) -> Result<(usize, f64), MatchError> {
    if scores.len() != index.n_articles() {
        return Err(MatchError::ScoreLength {
            expected: index.n_articles(),
            found: scores.len(),
        });
    }
    argmax(scores)
}

pub fn argmax(scores: &[f64]) -> Result<(usize, f64), MatchError> {
    let (&first, rest) = scores.split_first().ok_or(MatchError::EmptyScores)?;
    let mut best = (0, first);
    for (i, &s) in rest.iter().enumerate() {
        if s > best.1 {
            best = (i + 1, s);
        }
    }
    Ok(best)
}

/// RUMOR iff the best score is strictly larger than `threshold`.
pub fn classify(result: &MatchResult, threshold: f64) -> Label {
    if result.best_score > threshold {
        Label::Rumor
    } else {
        Label::Nonrumor
    }
}

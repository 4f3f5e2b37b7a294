//! Rumor detection as text matching.
//!
//! Verified rumor articles are indexed once; each tweet is scored against all
//! of them with one of five matchers (TF-IDF, BM25, averaged word vectors,
//! document vectors, or a signal-phrase lexicon). The best-scoring article
//! identifies which rumor a tweet refers to, and a score threshold decides
//! whether it is a rumor at all.

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod evaluation;
pub mod matchers;
pub mod textpipe;

use std::path::PathBuf;

use thiserror::Error;

pub use corpus::{CorpusHandle, Group, Label, LabeledTweet, RumorArticle, Subject, Tweet};
pub use matchers::{MatchRecord, MatchResult, MatcherKind};
pub use textpipe::{TokenSeq, Tokenizer, TokenizerConfig};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Text(#[from] textpipe::TextError),
    #[error(transparent)]
    Match(#[from] matchers::MatchError),
    #[error(transparent)]
    Eval(#[from] evaluation::EvalError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
    #[error("config: {0}")]
    Config(String),
    #[error("input file not found: {}", .0.display())]
    MissingInput(PathBuf),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit code: 2 input error, 3 empty or degenerate corpus,
    /// 4 evaluation degeneracy, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use analysis::AnalysisError as A;
        use evaluation::EvalError as E;
        use matchers::MatchError as M;
        match self {
            Error::Corpus(_) | Error::Config(_) | Error::MissingInput(_) | Error::Read { .. } => 2,
            Error::Text(textpipe::TextError::EmptyCorpus) => 3,
            Error::Text(_) => 2,
            Error::Match(M::EmptyCorpus | M::AllEmptyAfterTokenize) => 3,
            Error::Match(M::Text(textpipe::TextError::EmptyCorpus)) => 3,
            Error::Match(M::EmptyScores | M::ScoreLength { .. }) => 1,
            Error::Match(_) => 2,
            Error::Eval(E::DegenerateLabels | E::NoRumorLabels | E::UnreachablePrecision(_)) => 4,
            Error::Eval(_) => 1,
            Error::Analysis(A::EmptyDenominator | A::NoRumors | A::ZeroArticlesForSubject(_)) => 3,
            Error::Analysis(_) => 2,
            Error::Write { .. } => 1,
        }
    }
}

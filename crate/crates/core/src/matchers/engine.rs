//! Batch driver: one configured matcher applied to many tweets.

use rayon::prelude::*;

use super::{
    argmax, classify, ArticleIndex, ArticleVectors, Bm25Scorer, EmbeddingTable, LexiconPatternSet,
    MatchRecord, MatchResult, MatcherKind,
};
use crate::corpus::{Label, Tweet};
use crate::textpipe::Tokenizer;

pub enum Matcher {
    Tfidf,
    Bm25(Bm25Scorer),
    Embedding {
        table: EmbeddingTable,
        articles: ArticleVectors,
    },
    /// Tweet vectors are looked up by tweet id in `docvecs`.
    Docvec {
        docvecs: EmbeddingTable,
        articles: ArticleVectors,
    },
    Lexicon(LexiconPatternSet),
}

impl Matcher {
    pub fn kind(&self) -> MatcherKind {
        match self {
            Matcher::Tfidf => MatcherKind::Tfidf,
            Matcher::Bm25(_) => MatcherKind::Bm25,
            Matcher::Embedding { .. } => MatcherKind::Embedding,
            Matcher::Docvec { .. } => MatcherKind::Docvec,
            Matcher::Lexicon(_) => MatcherKind::Lexicon,
        }
    }
}

/// Immutable after construction; share freely across threads.
pub struct MatchEngine {
    index: ArticleIndex,
    tokenizer: Tokenizer,
    matcher: Matcher,
}

impl MatchEngine {
    pub fn new(index: ArticleIndex, tokenizer: Tokenizer, matcher: Matcher) -> Self {
        MatchEngine {
            index,
            tokenizer,
            matcher,
        }
    }

    pub fn kind(&self) -> MatcherKind {
        self.matcher.kind()
    }

    pub fn index(&self) -> &ArticleIndex {
        &self.index
    }

    pub fn tokenizer(&self) -> &Tokenizer {
        &self.tokenizer
    }

    pub fn match_tweet(&self, tweet_id: &str, text: &str, keep_scores: bool) -> MatchResult {
        let scored = |scores: Vec<f64>, undefined: bool| {
            let (best, best_score) = if undefined {
                (None, 0.0)
            } else {
                let (ordinal, score) = argmax(&scores).expect("index is never empty");
                (Some(self.index.article_id(ordinal).to_owned()), score)
            };
            MatchResult {
                tweet_id: tweet_id.to_owned(),
                best_article_id: best,
                best_score,
                scores: keep_scores.then_some(scores),
                undefined,
            }
        };
        match &self.matcher {
            Matcher::Tfidf => {
                let tokens = self.tokenizer.tokenize(text);
                scored(super::score_tfidf(&tokens, &self.index), false)
            }
            Matcher::Bm25(scorer) => {
                let tokens = self.tokenizer.tokenize(text);
                scored(scorer.score(&tokens, &self.index), false)
            }
            Matcher::Embedding { table, articles } => {
                let tokens = self.tokenizer.tokenize(text);
                let r = super::score_embedding(&tokens, articles, table)
                    .expect("table and article vectors share a dimension");
                scored(r.scores, r.undefined)
            }
            Matcher::Docvec { docvecs, articles } => {
                let r = articles
                    .score_query(docvecs.get(tweet_id))
                    .expect("document vectors share a dimension");
                scored(r.scores, r.undefined)
            }
            Matcher::Lexicon(patterns) => MatchResult {
                tweet_id: tweet_id.to_owned(),
                best_article_id: None,
                best_score: if patterns.is_match(text) { 1.0 } else { 0.0 },
                scores: None,
                undefined: false,
            },
        }
    }

    /// Lexicon results are labeled by their hit flag; every other matcher by
    /// the strict threshold rule.
    pub fn label(&self, result: &MatchResult, threshold: f64) -> Label {
        match self.matcher {
            Matcher::Lexicon(_) => classify(result, 0.0),
            _ => classify(result, threshold),
        }
    }

    pub fn record(&self, result: MatchResult, threshold: f64) -> MatchRecord {
        let label = self.label(&result, threshold);
        MatchRecord {
            tweet_id: result.tweet_id,
            article_id: result.best_article_id,
            score: result.best_score,
            label,
        }
    }

    pub fn match_records(&self, tweets: &[Tweet], threshold: f64) -> Vec<MatchRecord> {
        tweets
            .iter()
            .map(|t| self.record(self.match_tweet(&t.id, &t.text, false), threshold))
            .collect()
    }

    /// Same output as [`match_records`](Self::match_records), computed on the
    /// current rayon pool. Output order always follows input order.
    pub fn par_match_records(&self, tweets: &[Tweet], threshold: f64) -> Vec<MatchRecord> {
        tweets
            .par_iter()
            .with_min_len(64)
            .map(|t| self.record(self.match_tweet(&t.id, &t.text, false), threshold))
            .collect()
    }
}

//! Okapi BM25 with tweets as queries and articles as documents.
//!
//! score(d) = sum over unique query terms q of
//!   idf(q) * f(q,d) * (k1 + 1) / (f(q,d) + k1 * (1 - b + b * |d| / avgdl))

use super::index::ArticleIndex;
use super::MatchError;
use crate::textpipe::TokenSeq;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn new(k1: f64, b: f64) -> Result<Self, MatchError> {
        if !(k1.is_finite() && k1 >= 0.0) {
            return Err(MatchError::InvalidParams(format!(
                "k1 must be >= 0, got {k1}"
            )));
        }
        if !(0.0..=1.0).contains(&b) {
            return Err(MatchError::InvalidParams(format!(
                "b must be in [0,1], got {b}"
            )));
        }
        Ok(Bm25Params { k1, b })
    }
}

/// BM25 scorer with the per-article length normalizers precomputed.
#[derive(Debug, Clone)]
pub struct Bm25Scorer {
    params: Bm25Params,
    /// k1 * (1 - b + b * |d| / avgdl) per article.
    length_norm: Vec<f64>,
}

impl Bm25Scorer {
    pub fn new(index: &ArticleIndex, params: Bm25Params) -> Self {
        let avgdl = index.vocabulary().avgdl();
        let Bm25Params { k1, b } = params;
        let length_norm = index
            .doc_len()
            .iter()
            .map(|&len| k1 * (1.0 - b + b * len as f64 / avgdl))
            .collect();
        Bm25Scorer {
            params,
            length_norm,
        }
    }

    pub fn params(&self) -> Bm25Params {
        self.params
    }

    pub fn score(&self, tokens: &TokenSeq, index: &ArticleIndex) -> Vec<f64> {
        let mut scores = vec![0.0; index.n_articles()];
        let vocab = index.vocabulary();
        let mut terms: Vec<u32> = tokens.iter().filter_map(|t| vocab.id(t)).collect();
        terms.sort_unstable();
        terms.dedup();
        let k1p1 = self.params.k1 + 1.0;
        for term in terms {
            let idf = index.bm25_idf(term);
            for p in index.postings(term) {
                let f = p.count as f64;
                scores[p.article as usize] +=
                    idf * f * k1p1 / (f + self.length_norm[p.article as usize]);
            }
        }
        scores
    }
}

pub fn score_bm25(tokens: &TokenSeq, index: &ArticleIndex, params: Bm25Params) -> Vec<f64> {
    Bm25Scorer::new(index, params).score(tokens, index)
}

//! Cosine similarity between TF-IDF vectors (raw counts times `ln(N/df)`).

use std::collections::HashMap;

use super::index::ArticleIndex;
use crate::textpipe::TokenSeq;

/// Query vector of a token sequence under the index vocabulary; unnormalized.
pub fn query_vector(tokens: &TokenSeq, index: &ArticleIndex) -> Vec<(u32, f64)> {
    let vocab = index.vocabulary();
    let mut counts: HashMap<u32, u32> = HashMap::new();
    for t in tokens.iter() {
        if let Some(id) = vocab.id(t) {
            *counts.entry(id).or_insert(0) += 1;
        }
    }
    let mut q: Vec<(u32, f64)> = counts
        .into_iter()
        .map(|(id, c)| (id, c as f64 * index.tfidf_idf(id)))
        .filter(|(_, w)| *w != 0.0)
        .collect();
    q.sort_unstable_by_key(|(id, _)| *id);
    q
}

pub fn score_tfidf(tokens: &TokenSeq, index: &ArticleIndex) -> Vec<f64> {
    let mut scores = vec![0.0; index.n_articles()];
    let q = query_vector(tokens, index);
    let norm = q.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    if norm == 0.0 {
        return scores;
    }
    for (term, w) in q {
        for p in index.postings(term) {
            scores[p.article as usize] += w * p.tfidf;
        }
    }
    for s in &mut scores {
        *s = (*s / norm).clamp(0.0, 1.0);
    }
    scores
}

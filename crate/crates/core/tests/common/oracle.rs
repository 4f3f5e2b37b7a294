//! Direct, unindexed reference computations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rumormatch::{Label, LabeledTweet};

fn count(tokens: &[String]) -> HashMap<&str, f64> {
    let mut m = HashMap::new();
    for t in tokens {
        *m.entry(t.as_str()).or_insert(0.0) += 1.0;
    }
    m
}

/// Scores every document against the query straight from the formula.
pub fn bm25(docs: &[Vec<String>], query: &[String], k1: f64, b: f64) -> Vec<f64> {
    let n = docs.len() as f64;
    let avgdl = docs.iter().map(Vec::len).sum::<usize>() as f64 / n;
    let distinct: BTreeSet<&str> = query.iter().map(String::as_str).collect();
    docs.iter()
        .map(|d| {
            let tf = count(d);
            let dl = d.len() as f64;
            distinct
                .iter()
                .map(|q| {
                    let df = docs.iter().filter(|d| d.iter().any(|t| t == q)).count() as f64;
                    let Some(&f) = tf.get(q) else { return 0.0 };
                    let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
                    idf * f * (k1 + 1.0) / (f + k1 * (1.0 - b + b * dl / avgdl))
                })
                .sum()
        })
        .collect()
}

/// Dense TF-IDF vectors over the document vocabulary, compared by cosine.
pub fn tfidf_cosine(docs: &[Vec<String>], query: &[String]) -> Vec<f64> {
    let vocab: Vec<&str> = docs
        .iter()
        .flatten()
        .map(String::as_str)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = docs.len() as f64;
    let idf: Vec<f64> = vocab
        .iter()
        .map(|t| {
            let df = docs.iter().filter(|d| d.iter().any(|x| x == t)).count() as f64;
            (n / df).ln()
        })
        .collect();
    let dense = |tokens: &[String]| -> Vec<f64> {
        let tf = count(tokens);
        vocab
            .iter()
            .zip(&idf)
            .map(|(t, w)| tf.get(t).copied().unwrap_or(0.0) * w)
            .collect()
    };
    let q = dense(query);
    let qn = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    docs.iter()
        .map(|d| {
            let v = dense(d);
            let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if qn == 0.0 || vn == 0.0 {
                return 0.0;
            }
            q.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / (qn * vn)
        })
        .collect()
}

/// Confusion counts `(tp, fp, fn, tn)` for `score > threshold`.
pub fn confusion(
    scores: &HashMap<String, f64>,
    labels: &[LabeledTweet],
    threshold: f64,
) -> (usize, usize, usize, usize) {
    let mut c = (0, 0, 0, 0);
    for l in labels {
        let predicted = scores[&l.tweet_id] > threshold;
        match (l.label == Label::Rumor, predicted) {
            (true, true) => c.0 += 1,
            (false, true) => c.1 += 1,
            (true, false) => c.2 += 1,
            (false, false) => c.3 += 1,
        }
    }
    c
}

/// Every distinct score (descending) then `-inf`, each reclassified from
/// scratch.
pub fn sweep(
    scores: &HashMap<String, f64>,
    labels: &[LabeledTweet],
) -> Vec<(f64, (usize, usize, usize, usize))> {
    let distinct: BTreeMap<u64, f64> = labels
        .iter()
        .map(|l| {
            let s = scores[&l.tweet_id];
            (s.to_bits(), s)
        })
        .collect();
    let mut thresholds: Vec<f64> = distinct.into_values().collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.push(f64::NEG_INFINITY);
    thresholds
        .into_iter()
        .map(|t| (t, confusion(scores, labels, t)))
        .collect()
}

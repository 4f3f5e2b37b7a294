//! Classification (threshold sweep) and identification (argmax) evaluation.

use std::collections::HashMap;

use thiserror::Error;

use crate::corpus::{Label, LabeledTweet};
use crate::matchers::MatchResult;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("DEGENERATE_LABELS: need at least one RUMOR and one NONRUMOR label")]
    DegenerateLabels,
    #[error("NO_RUMOR_LABELS: identification needs RUMOR-labeled tweets")]
    NoRumorLabels,
    #[error("UNREACHABLE_PRECISION: no threshold reaches precision {0}")]
    UnreachablePrecision(f64),
    #[error("no score for labeled tweet {0}")]
    MissingScore(String),
    #[error("no match result for rumor-labeled tweet {0}")]
    MissingMatch(String),
}

/// One point of a precision/recall curve with its confusion matrix.
///
/// `threshold` is NaN for a fixed (threshold-free) classifier and `-inf` for
/// the point where every tweet is predicted positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl PrPoint {
    /// Builds a point from counts. Precision is 1 when nothing is predicted
    /// positive.
    pub fn from_counts(threshold: f64, tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        let precision = if tp + fp == 0 {
            1.0
        } else {
            tp as f64 / (tp + fp) as f64
        };
        let recall = if tp + fn_ == 0 {
            0.0
        } else {
            tp as f64 / (tp + fn_) as f64
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        PrPoint {
            threshold,
            precision,
            recall,
            f1,
            tp,
            fp,
            fn_,
            tn,
        }
    }

    pub fn is_fixed(&self) -> bool {
        self.threshold.is_nan()
    }

    pub fn predicted_positive(&self) -> usize {
        self.tp + self.fp
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Ordered by descending threshold.
    pub points: Vec<PrPoint>,
    pub max_f1_point: PrPoint,
}

fn label_counts(labels: &[LabeledTweet]) -> (usize, usize) {
    let pos = labels.iter().filter(|l| l.label == Label::Rumor).count();
    (pos, labels.len() - pos)
}

/// Exact PR curve: one point per distinct observed score (classifying with a
/// strict `>`), plus a final `-inf` point where everything is positive.
pub fn sweep(
    scores: &HashMap<String, f64>,
    labels: &[LabeledTweet],
) -> Result<SweepResult, EvalError> {
    let (n_pos, n_neg) = label_counts(labels);
    if n_pos == 0 || n_neg == 0 {
        return Err(EvalError::DegenerateLabels);
    }
    let mut scored: Vec<(f64, bool)> = labels
        .iter()
        .map(|l| {
            scores
                .get(&l.tweet_id)
                .map(|&s| (s, l.label == Label::Rumor))
                .ok_or_else(|| EvalError::MissingScore(l.tweet_id.clone()))
        })
        .collect::<Result<_, _>>()?;
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut points = Vec::new();
    let (mut tp, mut fp) = (0, 0);
    let mut i = 0;
    while i < scored.len() {
        let threshold = scored[i].0;
        points.push(PrPoint::from_counts(
            threshold,
            tp,
            fp,
            n_pos - tp,
            n_neg - fp,
        ));
        while i < scored.len() && scored[i].0 == threshold {
            if scored[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
    }
    points.push(PrPoint::from_counts(f64::NEG_INFINITY, tp, fp, 0, 0));

    let max_f1_point = *points
        .iter()
        .reduce(|best, p| if p.f1 > best.f1 { p } else { best })
        .expect("sweep has at least one point");
    Ok(SweepResult {
        points,
        max_f1_point,
    })
}

/// Evaluates a threshold-free classifier. Missing predictions count as
/// negative.
pub fn fixed_point_eval(predictions: &HashMap<String, bool>, labels: &[LabeledTweet]) -> PrPoint {
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for l in labels {
        let predicted = predictions.get(&l.tweet_id).copied().unwrap_or(false);
        match (l.label == Label::Rumor, predicted) {
            (true, true) => tp += 1,
            (true, false) => fn_ += 1,
            (false, true) => fp += 1,
            (false, false) => tn += 1,
        }
    }
    PrPoint::from_counts(f64::NAN, tp, fp, fn_, tn)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentificationReport {
    pub accuracy: f64,
    pub n_correct: usize,
    pub n_evaluated: usize,
}

/// Share of RUMOR-labeled tweets whose best match is their labeled article.
pub fn identification_accuracy(
    matches: &[MatchResult],
    labels: &[LabeledTweet],
) -> Result<IdentificationReport, EvalError> {
    let by_id: HashMap<&str, Option<&str>> = matches
        .iter()
        .map(|m| (m.tweet_id.as_str(), m.best_article_id.as_deref()))
        .collect();
    let mut n_evaluated = 0;
    let mut n_correct = 0;
    for l in labels.iter().filter(|l| l.label == Label::Rumor) {
        let best = by_id
            .get(l.tweet_id.as_str())
            .ok_or_else(|| EvalError::MissingMatch(l.tweet_id.clone()))?;
        n_evaluated += 1;
        if best.is_some() && *best == l.article_id.as_deref() {
            n_correct += 1;
        }
    }
    if n_evaluated == 0 {
        return Err(EvalError::NoRumorLabels);
    }
    Ok(IdentificationReport {
        accuracy: n_correct as f64 / n_evaluated as f64,
        n_correct,
        n_evaluated,
    })
}

/// Highest-recall point with at least `min_precision`. Points that predict
/// nothing positive do not qualify.
pub fn operating_point(sweep: &SweepResult, min_precision: f64) -> Result<PrPoint, EvalError> {
    sweep
        .points
        .iter()
        .filter(|p| p.predicted_positive() > 0 && p.precision >= min_precision)
        .reduce(|best, p| if p.recall > best.recall { p } else { best })
        .copied()
        .ok_or(EvalError::UnreachablePrecision(min_precision))
}

//! Corpus-level statistics over detection output: who posts rumors, which
//! candidates they are about, and when.
//!
//! Every function is a pure function of its inputs and does not depend on the
//! order tweets are supplied in.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::corpus::{Group, Label, RumorArticle, Subject, Tweet};
use crate::matchers::MatchRecord;
use crate::textpipe::Tokenizer;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("EMPTY_DENOMINATOR: no tweets in scope")]
    EmptyDenominator,
    #[error("NO_RUMORS: no rumor tweets in scope")]
    NoRumors,
    #[error("ZERO_ARTICLES_FOR_SUBJECT: no reference article is about {0}")]
    ZeroArticlesForSubject(&'static str),
    #[error("no detection for tweet {0}")]
    MissingDetection(String),
    #[error("invalid time window: start {start} is after end {end}")]
    InvalidWindow { start: i64, end: i64 },
    #[error("bin width must be positive, got {0}")]
    InvalidBinWidth(i64),
    #[error("top fraction must be in (0, 1], got {0}")]
    InvalidFraction(f64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detection {
    pub tweet_id: String,
    pub is_rumor: bool,
    /// Matched article; present iff `is_rumor`.
    pub article_id: Option<String>,
}

impl Detection {
    pub fn rumor(tweet_id: &str, article_id: &str) -> Self {
        Detection {
            tweet_id: tweet_id.into(),
            is_rumor: true,
            article_id: Some(article_id.into()),
        }
    }

    pub fn nonrumor(tweet_id: &str) -> Self {
        Detection {
            tweet_id: tweet_id.into(),
            is_rumor: false,
            article_id: None,
        }
    }
}

impl From<&MatchRecord> for Detection {
    fn from(r: &MatchRecord) -> Self {
        let is_rumor = r.label == Label::Rumor;
        Detection {
            tweet_id: r.tweet_id.clone(),
            is_rumor,
            article_id: if is_rumor { r.article_id.clone() } else { None },
        }
    }
}

/// Detections keyed by tweet id.
#[derive(Debug, Clone, Default)]
pub struct Detections(HashMap<String, Detection>);

impl Detections {
    pub fn get(&self, tweet_id: &str) -> Option<&Detection> {
        self.0.get(tweet_id)
    }

    fn lookup(&self, tweet_id: &str) -> Result<&Detection, AnalysisError> {
        self.get(tweet_id)
            .ok_or_else(|| AnalysisError::MissingDetection(tweet_id.to_owned()))
    }

    fn is_rumor(&self, tweet_id: &str) -> Result<bool, AnalysisError> {
        Ok(self.lookup(tweet_id)?.is_rumor)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<Detection> for Detections {
    fn from_iter<I: IntoIterator<Item = Detection>>(iter: I) -> Self {
        Detections(iter.into_iter().map(|d| (d.tweet_id.clone(), d)).collect())
    }
}

/// Half-open `[start, end)` interval of UTC epoch seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeWindow {
    start: i64,
    end: i64,
}

impl TimeWindow {
    /// `start == end` gives an empty window.
    pub fn new(start: i64, end: i64) -> Result<Self, AnalysisError> {
        if start > end {
            return Err(AnalysisError::InvalidWindow { start, end });
        }
        Ok(TimeWindow { start, end })
    }

    /// 2016-04-01T00:00Z to 2016-10-01T00:00Z.
    pub fn election_2016() -> Self {
        TimeWindow {
            start: 1_459_468_800,
            end: 1_475_280_000,
        }
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.end
    }

    pub fn contains(&self, ts: i64) -> bool {
        self.start <= ts && ts < self.end
    }
}

fn in_window(t: &Tweet, window: Option<TimeWindow>) -> bool {
    window.is_none_or(|w| w.contains(t.timestamp))
}

/// Share of a group's tweets (optionally restricted to a window) detected as
/// rumors.
pub fn group_rumor_ratio(
    tweets: &[Tweet],
    detections: &Detections,
    group: Group,
    window: Option<TimeWindow>,
) -> Result<f64, AnalysisError> {
    let mut total = 0usize;
    let mut rumors = 0usize;
    for t in tweets
        .iter()
        .filter(|t| t.group == group && in_window(t, window))
    {
        total += 1;
        if detections.is_rumor(&t.id)? {
            rumors += 1;
        }
    }
    if total == 0 {
        return Err(AnalysisError::EmptyDenominator);
    }
    Ok(rumors as f64 / total as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserRumorStats {
    pub user_id: String,
    pub rumor_count: usize,
    pub total_count: usize,
    pub ratio: f64,
}

fn per_user(
    tweets: &[Tweet],
    detections: &Detections,
) -> Result<Vec<UserRumorStats>, AnalysisError> {
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for t in tweets {
        let entry = counts.entry(t.user_id.as_str()).or_default();
        entry.1 += 1;
        if detections.is_rumor(&t.id)? {
            entry.0 += 1;
        }
    }
    Ok(counts
        .into_iter()
        .map(|(user, (rumor_count, total_count))| UserRumorStats {
            user_id: user.to_owned(),
            rumor_count,
            total_count,
            ratio: rumor_count as f64 / total_count as f64,
        })
        .collect())
}

/// Share of all rumor tweets posted by the top `ceil(top_fraction * users)`
/// users, users ranked by rumor count (ties by user id).
pub fn user_concentration(
    tweets: &[Tweet],
    detections: &Detections,
    top_fraction: f64,
) -> Result<f64, AnalysisError> {
    if !(top_fraction > 0.0 && top_fraction <= 1.0) {
        return Err(AnalysisError::InvalidFraction(top_fraction));
    }
    let mut users = per_user(tweets, detections)?;
    let total: usize = users.iter().map(|u| u.rumor_count).sum();
    if total == 0 {
        return Err(AnalysisError::NoRumors);
    }
    users.sort_by(|a, b| {
        b.rumor_count
            .cmp(&a.rumor_count)
            .then_with(|| a.user_id.cmp(&b.user_id))
    });
    // Guard against products like 0.7 * 10 = 7.000000000000001.
    let k = ((top_fraction * users.len() as f64) - 1e-9).ceil() as usize;
    let k = k.clamp(1, users.len());
    let top: usize = users[..k].iter().map(|u| u.rumor_count).sum();
    Ok(top as f64 / total as f64)
}

/// Users by rumor ratio, then rumor count (both descending), then user id.
pub fn user_rumor_ratio_ranking(
    tweets: &[Tweet],
    detections: &Detections,
    top_n: usize,
) -> Result<Vec<UserRumorStats>, AnalysisError> {
    let mut users = per_user(tweets, detections)?;
    users.sort_by(|a, b| {
        b.ratio
            .total_cmp(&a.ratio)
            .then_with(|| b.rumor_count.cmp(&a.rumor_count))
            .then_with(|| a.user_id.cmp(&b.user_id))
    });
    users.truncate(top_n);
    Ok(users)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeywordCount {
    pub keyword: String,
    pub rumor: usize,
    pub nonrumor: usize,
}

/// For each keyword, how many rumor and nonrumor tweets contain it as a token.
/// Keywords go through the same tokenizer as tweets when they survive it.
pub fn keyword_breakdown(
    tweets: &[Tweet],
    detections: &Detections,
    keywords: &[&str],
    tokenizer: &Tokenizer,
) -> Result<Vec<KeywordCount>, AnalysisError> {
    let normalized: Vec<String> = keywords
        .iter()
        .map(|k| {
            let toks = tokenizer.tokenize(k);
            match toks.tokens() {
                [one] => one.clone(),
                _ => k.trim().to_lowercase(),
            }
        })
        .collect();
    let mut out: Vec<KeywordCount> = keywords
        .iter()
        .map(|k| KeywordCount {
            keyword: k.to_string(),
            rumor: 0,
            nonrumor: 0,
        })
        .collect();
    for t in tweets {
        let rumor = detections.is_rumor(&t.id)?;
        let tokens = tokenizer.tokenize(&t.text);
        let present: HashSet<&str> = tokens.iter().collect();
        for (cell, kw) in out.iter_mut().zip(&normalized) {
            if present.contains(kw.as_str()) {
                if rumor {
                    cell.rumor += 1;
                } else {
                    cell.nonrumor += 1;
                }
            }
        }
    }
    Ok(out)
}

/// Rumor tweets of `group` matched to articles about each subject, divided by
/// the number of reference articles about that subject. Articles with several
/// subjects count toward each of them.
pub fn content_attribution(
    tweets: &[Tweet],
    detections: &Detections,
    articles: &[RumorArticle],
    group: Group,
    subjects: &[Subject],
) -> Result<Vec<(Subject, f64)>, AnalysisError> {
    let by_id: HashMap<&str, &RumorArticle> = articles.iter().map(|a| (a.id.as_str(), a)).collect();
    let mut out = Vec::with_capacity(subjects.len());
    for &subject in subjects {
        let n_articles = articles
            .iter()
            .filter(|a| a.subjects.contains(&subject))
            .count();
        if n_articles == 0 {
            return Err(AnalysisError::ZeroArticlesForSubject(subject.as_str()));
        }
        let mut n_tweets = 0usize;
        for t in tweets.iter().filter(|t| t.group == group) {
            let d = detections.lookup(&t.id)?;
            if !d.is_rumor {
                continue;
            }
            let about = d
                .article_id
                .as_deref()
                .and_then(|a| by_id.get(a))
                .is_some_and(|a| a.subjects.contains(&subject));
            if about {
                n_tweets += 1;
            }
        }
        out.push((subject, n_tweets as f64 / n_articles as f64));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimelineBin {
    pub start: i64,
    pub count: usize,
}

/// Rumor counts in consecutive `bin_width`-second bins tiling the window.
/// The last bin may be cut short by the window end.
pub fn timeline(
    tweets: &[Tweet],
    detections: &Detections,
    bin_width: i64,
    window: TimeWindow,
) -> Result<Vec<TimelineBin>, AnalysisError> {
    if bin_width <= 0 {
        return Err(AnalysisError::InvalidBinWidth(bin_width));
    }
    let span = window.end - window.start;
    let n_bins = ((span + bin_width - 1) / bin_width) as usize;
    let mut bins: Vec<TimelineBin> = (0..n_bins)
        .map(|i| TimelineBin {
            start: window.start + i as i64 * bin_width,
            count: 0,
        })
        .collect();
    for t in tweets.iter().filter(|t| window.contains(t.timestamp)) {
        if detections.is_rumor(&t.id)? {
            let i = ((t.timestamp - window.start) / bin_width) as usize;
            bins[i].count += 1;
        }
    }
    Ok(bins)
}

/// Strict local maxima that also exceed `mean + k * stddev` (population
/// standard deviation) of the whole series.
pub fn detect_peaks(series: &[usize], k: f64) -> Vec<usize> {
    if series.is_empty() {
        return Vec::new();
    }
    let n = series.len() as f64;
    let mean = series.iter().map(|&c| c as f64).sum::<f64>() / n;
    let var = series
        .iter()
        .map(|&c| (c as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    let cutoff = mean + k * var.sqrt();
    (0..series.len())
        .filter(|&i| {
            let c = series[i];
            let left = i == 0 || c > series[i - 1];
            let right = i + 1 == series.len() || c > series[i + 1];
            left && right && c as f64 > cutoff
        })
        .collect()
}

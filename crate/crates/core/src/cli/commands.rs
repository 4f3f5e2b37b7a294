//! The `index`, `match`, `eval`, `analyze` and `all` subcommands.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use super::config::RunConfig;
use super::output::{fmt_ratio, fmt_threshold, write_atomic, CsvOut};
use crate::analysis::{self, AnalysisError, Detection, Detections};
use crate::corpus::{self, Group, Label, LabeledTweet, RumorArticle, Subject, Tweet};
use crate::evaluation::{self, PrPoint};
use crate::matchers::{
    build_index, ArticleIndex, ArticleVectors, Bm25Scorer, EmbeddingTable, LexiconPatternSet,
    MatchEngine, MatchError, MatchRecord, MatchResult, Matcher, MatcherKind,
};
use crate::textpipe::Tokenizer;
use crate::{Error, Result};

const PROGRESS_EVERY: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalTask {
    Classify,
    Identify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Analysis {
    Ratio,
    Users,
    Keywords,
    Attribution,
    Timeline,
}

impl Analysis {
    pub const ALL: [Analysis; 5] = [
        Analysis::Ratio,
        Analysis::Users,
        Analysis::Keywords,
        Analysis::Attribution,
        Analysis::Timeline,
    ];
}

impl std::str::FromStr for Analysis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ratio" => Ok(Analysis::Ratio),
            "users" => Ok(Analysis::Users),
            "keywords" => Ok(Analysis::Keywords),
            "attribution" => Ok(Analysis::Attribution),
            "timeline" => Ok(Analysis::Timeline),
            other => Err(format!("unknown analysis {other:?}")),
        }
    }
}

fn log(cfg: &RunConfig, msg: impl AsRef<str>) {
    if !cfg.quiet {
        eprintln!("{}", msg.as_ref());
    }
}

fn load_articles(cfg: &RunConfig) -> Result<Vec<RumorArticle>> {
    let path = cfg.require("articles_path", &cfg.articles_path)?;
    Ok(corpus::load_articles(&path)?)
}

fn load_tweets(cfg: &RunConfig) -> Result<Vec<Tweet>> {
    let path = cfg.require("tweets_path", &cfg.tweets_path)?;
    Ok(corpus::load_tweets(&path)?)
}

fn tokenizer(cfg: &RunConfig) -> Result<Tokenizer> {
    if let crate::textpipe::Stopwords::File(p) = &cfg.tokenizer.stopwords {
        if !p.exists() {
            return Err(Error::MissingInput(p.clone()));
        }
    }
    Ok(Tokenizer::new(cfg.tokenizer.clone())?)
}

fn index_bytes(index: &ArticleIndex) -> Vec<u8> {
    let mut bytes = Vec::new();
    index
        .write_to(&mut bytes)
        .expect("writing to memory cannot fail");
    bytes
}

fn fresh_index(cfg: &RunConfig, tok: &Tokenizer) -> Result<ArticleIndex> {
    let articles = load_articles(cfg)?;
    let index = build_index(&articles, tok)?;
    for w in index.warnings() {
        log(cfg, format!("warning: {w}"));
    }
    Ok(index)
}

/// Builds the article index and writes it to `index_path`.
pub fn cmd_index(cfg: &RunConfig) -> Result<PathBuf> {
    let tok = tokenizer(cfg)?;
    let index = fresh_index(cfg, &tok)?;
    let path = cfg.index_path();
    write_atomic(&path, &index_bytes(&index))?;
    log(
        cfg,
        format!(
            "indexed {} articles, {} terms -> {}",
            index.n_articles(),
            index.vocabulary().len(),
            path.display()
        ),
    );
    Ok(path)
}

/// Loads the index file when present (it must match the configured
/// tokenizer), otherwise builds one from the articles.
fn obtain_index(cfg: &RunConfig, tok: &Tokenizer) -> Result<ArticleIndex> {
    let path = cfg.index_path();
    if !path.exists() {
        return fresh_index(cfg, tok);
    }
    let bytes = std::fs::read(&path).map_err(|source| Error::Read {
        path: path.clone(),
        source,
    })?;
    let index = ArticleIndex::read_from(bytes.as_slice())?;
    if index.tokenizer_fingerprint() != tok.fingerprint() {
        return Err(MatchError::IndexFormat(format!(
            "{} was built with different tokenizer settings; rerun `index`",
            path.display()
        ))
        .into());
    }
    Ok(index)
}

pub fn build_engine(
    cfg: &RunConfig,
    kind: MatcherKind,
    index: ArticleIndex,
    tok: Tokenizer,
) -> Result<MatchEngine> {
    let matcher = match kind {
        MatcherKind::Tfidf => Matcher::Tfidf,
        MatcherKind::Bm25 => Matcher::Bm25(Bm25Scorer::new(&index, cfg.bm25)),
        MatcherKind::Embedding => {
            let path = cfg.require("embeddings_path", &cfg.embeddings_path)?;
            let table = EmbeddingTable::load(&path)?;
            let articles = ArticleVectors::from_word_vectors(&index, &table);
            Matcher::Embedding { table, articles }
        }
        MatcherKind::Docvec => {
            let path = cfg.require("docvecs_path", &cfg.docvecs_path)?;
            let docvecs = EmbeddingTable::load(&path)?;
            let articles = ArticleVectors::from_document_vectors(&index, &docvecs)?;
            Matcher::Docvec { docvecs, articles }
        }
        MatcherKind::Lexicon => Matcher::Lexicon(match &cfg.lexicon_path {
            Some(_) => LexiconPatternSet::load(&cfg.require("lexicon_path", &cfg.lexicon_path)?)?,
            None => LexiconPatternSet::default(),
        }),
    };
    Ok(MatchEngine::new(index, tok, matcher))
}

/// Scores `tweets` on `jobs` workers. Output order follows input order for
/// any worker count.
pub fn match_tweets(
    engine: &MatchEngine,
    tweets: &[Tweet],
    threshold: f64,
    jobs: usize,
    mut progress: impl FnMut(usize),
) -> Result<Vec<MatchRecord>> {
    let pool = if jobs > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?,
        )
    } else {
        None
    };
    let mut out = Vec::with_capacity(tweets.len());
    for chunk in tweets.chunks(PROGRESS_EVERY) {
        let records = match &pool {
            Some(pool) => pool.install(|| engine.par_match_records(chunk, threshold)),
            None => engine.match_records(chunk, threshold),
        };
        out.extend(records);
        progress(out.len());
    }
    Ok(out)
}

pub fn render_matches(records: &[MatchRecord]) -> Vec<u8> {
    let mut buf = Vec::with_capacity(records.len() * 64);
    for r in records {
        serde_json::to_writer(&mut buf, r).expect("match records always serialize");
        buf.push(b'\n');
    }
    buf
}

/// Scores every tweet and writes one JSON line per tweet to `matches_path`.
pub fn cmd_match(cfg: &RunConfig) -> Result<PathBuf> {
    let tok = tokenizer(cfg)?;
    let tweets = load_tweets(cfg)?;
    let index = obtain_index(cfg, &tok)?;
    let engine = build_engine(cfg, cfg.matcher, index, tok)?;
    let records = match_tweets(&engine, &tweets, cfg.threshold, cfg.jobs, |n| {
        if n % PROGRESS_EVERY == 0 {
            log(cfg, format!("matched {n} tweets"));
        }
    })?;
    let path = cfg.matches_path();
    write_atomic(&path, &render_matches(&records))?;
    let rumors = records.iter().filter(|r| r.label == Label::Rumor).count();
    log(
        cfg,
        format!(
            "{} tweets, {rumors} above threshold ({}) -> {}",
            records.len(),
            engine.kind(),
            path.display()
        ),
    );
    Ok(path)
}

pub fn read_matches(path: &Path) -> Result<Vec<MatchRecord>> {
    if !path.exists() {
        return Err(Error::MissingInput(path.to_path_buf()));
    }
    let file = std::fs::File::open(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| Error::Read {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| corpus::CorpusError::MalformedLine {
            path: path.to_path_buf(),
            line_no: i + 1,
            reason: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

struct Labeled {
    tweets: Vec<Tweet>,
    labels: Vec<LabeledTweet>,
}

fn load_labeled(cfg: &RunConfig) -> Result<Labeled> {
    let labels_path = cfg.require("labels_path", &cfg.labels_path)?;
    let corpus = corpus::CorpusHandle {
        tweets: load_tweets(cfg)?,
        articles: load_articles(cfg)?,
        labels: None,
    };
    let labels = corpus::load_labels(&labels_path, &corpus)?;
    let wanted: HashSet<&str> = labels.iter().map(|l| l.tweet_id.as_str()).collect();
    let tweets = corpus
        .tweets
        .iter()
        .filter(|t| wanted.contains(t.id.as_str()))
        .cloned()
        .collect();
    Ok(Labeled { tweets, labels })
}

fn eval_matchers(cfg: &RunConfig, all: bool) -> Vec<MatcherKind> {
    if !all {
        return vec![cfg.matcher];
    }
    MatcherKind::ALL
        .into_iter()
        .filter(|m| match m {
            MatcherKind::Embedding => cfg.embeddings_path.is_some(),
            MatcherKind::Docvec => cfg.docvecs_path.is_some(),
            _ => true,
        })
        .collect()
}

fn point_row(csv: &mut CsvOut, matcher: &str, p: &PrPoint) {
    csv.row(&[
        matcher.to_owned(),
        fmt_threshold(p.threshold),
        p.precision.to_string(),
        p.recall.to_string(),
        p.f1.to_string(),
    ]);
}

/// Runs the classification sweep and/or identification accuracy over the
/// labeled tweets. With `all_matchers`, every matcher whose inputs are
/// configured is evaluated.
pub fn cmd_eval(cfg: &RunConfig, tasks: &[EvalTask], all_matchers: bool) -> Result<Vec<PathBuf>> {
    let data = load_labeled(cfg)?;
    let tok = tokenizer(cfg)?;
    let index = obtain_index(cfg, &tok)?;
    let kinds = eval_matchers(cfg, all_matchers);
    let dir = &cfg.output_dir;
    let mut written = Vec::new();

    let mut summary = CsvOut::new(&["matcher", "threshold", "precision", "recall", "f1"]);
    let mut operating = CsvOut::new(&["matcher", "threshold", "precision", "recall", "f1"]);
    let mut ident = CsvOut::new(&["matcher", "accuracy", "n_evaluated"]);

    for kind in kinds {
        let engine = build_engine(
            cfg,
            kind,
            index.clone(),
            Tokenizer::new(tok.config().clone())?,
        )?;
        let results: Vec<MatchResult> = data
            .tweets
            .iter()
            .map(|t| engine.match_tweet(&t.id, &t.text, false))
            .collect();
        let name = kind.as_str().to_ascii_lowercase();
        let curve_path = if all_matchers {
            dir.join(format!("pr_curve_{name}.csv"))
        } else {
            dir.join("pr_curve.csv")
        };

        if tasks.contains(&EvalTask::Classify) {
            let mut curve = CsvOut::new(&["threshold", "precision", "recall", "f1"]);
            if kind.is_vector() {
                let scores: HashMap<String, f64> = results
                    .iter()
                    .map(|r| (r.tweet_id.clone(), r.best_score))
                    .collect();
                let sweep = evaluation::sweep(&scores, &data.labels)?;
                for p in &sweep.points {
                    curve.row(&[
                        fmt_threshold(p.threshold),
                        p.precision.to_string(),
                        p.recall.to_string(),
                        p.f1.to_string(),
                    ]);
                }
                point_row(&mut summary, kind.as_str(), &sweep.max_f1_point);
                if let Some(min_p) = cfg.min_precision {
                    let op = evaluation::operating_point(&sweep, min_p)?;
                    point_row(&mut operating, kind.as_str(), &op);
                }
            } else {
                let preds: HashMap<String, bool> = results
                    .iter()
                    .map(|r| {
                        (
                            r.tweet_id.clone(),
                            engine.label(r, cfg.threshold) == Label::Rumor,
                        )
                    })
                    .collect();
                let p = evaluation::fixed_point_eval(&preds, &data.labels);
                curve.row(&[
                    fmt_threshold(p.threshold),
                    p.precision.to_string(),
                    p.recall.to_string(),
                    p.f1.to_string(),
                ]);
                point_row(&mut summary, kind.as_str(), &p);
            }
            curve.write(&curve_path)?;
            written.push(curve_path);
        }

        if tasks.contains(&EvalTask::Identify) && kind.is_vector() {
            let report = evaluation::identification_accuracy(&results, &data.labels)?;
            ident.row(&[
                kind.as_str().to_owned(),
                report.accuracy.to_string(),
                report.n_evaluated.to_string(),
            ]);
        }
    }

    if tasks.contains(&EvalTask::Classify) {
        let p = dir.join("max_f1.csv");
        summary.write(&p)?;
        written.push(p);
        if cfg.min_precision.is_some() {
            let p = dir.join("operating_point.csv");
            operating.write(&p)?;
            written.push(p);
        }
    }
    if tasks.contains(&EvalTask::Identify) {
        let p = dir.join("identification.csv");
        ident.write(&p)?;
        written.push(p);
    }
    for p in &written {
        log(cfg, format!("wrote {}", p.display()));
    }
    Ok(written)
}

/// `NA` for degenerate cells (no tweets, no rumors, no articles for a
/// subject); other errors propagate.
fn or_na(r: std::result::Result<f64, AnalysisError>) -> Result<String> {
    match r {
        Ok(v) => Ok(fmt_ratio(v)),
        Err(
            AnalysisError::EmptyDenominator
            | AnalysisError::NoRumors
            | AnalysisError::ZeroArticlesForSubject(_),
        ) => Ok("NA".into()),
        Err(e) => Err(e.into()),
    }
}

fn detections_from(records: &[MatchRecord], articles: &[RumorArticle]) -> Result<Detections> {
    let known: HashSet<&str> = articles.iter().map(|a| a.id.as_str()).collect();
    for r in records {
        if let Some(a) = &r.article_id {
            if r.label == Label::Rumor && !known.contains(a.as_str()) {
                return Err(corpus::CorpusError::DanglingArticleRef(a.clone()).into());
            }
        }
    }
    Ok(records.iter().map(Detection::from).collect())
}

fn iso8601(ts: i64) -> String {
    chrono::DateTime::from_timestamp(ts, 0)
        .map(|d| d.format("%Y-%m-%dT%H:%M:%SZ").to_string())
        .unwrap_or_else(|| ts.to_string())
}

/// Writes the requested analysis CSVs from the match output.
pub fn cmd_analyze(cfg: &RunConfig, which: &[Analysis]) -> Result<Vec<PathBuf>> {
    let matches = read_matches(&cfg.matches_path())?;
    let tweets = load_tweets(cfg)?;
    let articles = load_articles(cfg)?;
    let detections = detections_from(&matches, &articles)?;
    let election = cfg.election()?;
    let dir = &cfg.output_dir;
    let scoped: Vec<Tweet> = match cfg.analysis_group {
        Some(g) => tweets.iter().filter(|t| t.group == g).cloned().collect(),
        None => tweets.clone(),
    };
    let mut written = Vec::new();

    if which.contains(&Analysis::Ratio) {
        let mut csv = CsvOut::new(&["group", "window", "ratio"]);
        let present: HashSet<Group> = tweets.iter().map(|t| t.group).collect();
        for g in Group::ALL.into_iter().filter(|g| present.contains(g)) {
            for (label, window) in [("entire", None), ("election", Some(election))] {
                let v = or_na(analysis::group_rumor_ratio(&tweets, &detections, g, window))?;
                csv.row(&[g.as_str().into(), label.into(), v]);
            }
        }
        let p = dir.join("group_ratio.csv");
        csv.write(&p)?;
        written.push(p);
    }

    if which.contains(&Analysis::Users) {
        let mut csv = CsvOut::new(&["fraction", "share"]);
        for &f in &cfg.concentration_fractions {
            let v = or_na(analysis::user_concentration(&scoped, &detections, f))?;
            csv.row(&[f.to_string(), v]);
        }
        let p = dir.join("concentration.csv");
        csv.write(&p)?;
        written.push(p);

        let mut csv = CsvOut::new(&["user_id", "rumor_count", "total_count", "ratio"]);
        for u in analysis::user_rumor_ratio_ranking(&scoped, &detections, cfg.top_n)? {
            csv.row(&[
                u.user_id,
                u.rumor_count.to_string(),
                u.total_count.to_string(),
                fmt_ratio(u.ratio),
            ]);
        }
        let p = dir.join("user_ranking.csv");
        csv.write(&p)?;
        written.push(p);
    }

    if which.contains(&Analysis::Keywords) {
        let mut csv = CsvOut::new(&["user_id", "keyword", "rumor_count", "nonrumor_count"]);
        let user = match &cfg.keyword_user {
            Some(u) => Some(u.clone()),
            None => {
                let mut ranked =
                    analysis::user_rumor_ratio_ranking(&scoped, &detections, usize::MAX)?;
                ranked.sort_by(|a, b| {
                    b.rumor_count
                        .cmp(&a.rumor_count)
                        .then_with(|| a.user_id.cmp(&b.user_id))
                });
                ranked.into_iter().next().map(|u| u.user_id)
            }
        };
        if let Some(user) = user {
            let own: Vec<Tweet> = tweets
                .iter()
                .filter(|t| t.user_id == user)
                .cloned()
                .collect();
            let keywords: Vec<&str> = cfg.keywords.iter().map(String::as_str).collect();
            let tok = tokenizer(cfg)?;
            for k in analysis::keyword_breakdown(&own, &detections, &keywords, &tok)? {
                csv.row(&[
                    user.clone(),
                    k.keyword,
                    k.rumor.to_string(),
                    k.nonrumor.to_string(),
                ]);
            }
        }
        let p = dir.join("keywords.csv");
        csv.write(&p)?;
        written.push(p);
    }

    if which.contains(&Analysis::Attribution) {
        let mut csv = CsvOut::new(&["group", "subject", "value"]);
        for g in [Group::ClintonFollower, Group::TrumpFollower] {
            for s in [Subject::Clinton, Subject::Trump] {
                let v = or_na(
                    analysis::content_attribution(&tweets, &detections, &articles, g, &[s])
                        .map(|r| r[0].1),
                )?;
                csv.row(&[g.as_str().into(), s.as_str().into(), v]);
            }
        }
        let p = dir.join("attribution.csv");
        csv.write(&p)?;
        written.push(p);
    }

    if which.contains(&Analysis::Timeline) {
        let bins = analysis::timeline(&scoped, &detections, cfg.timeline_bin_seconds, election)?;
        let counts: Vec<usize> = bins.iter().map(|b| b.count).collect();
        let peaks: HashSet<usize> = analysis::detect_peaks(&counts, cfg.peak_k)
            .into_iter()
            .collect();
        let mut csv = CsvOut::new(&["bin_start_iso8601", "count", "is_peak"]);
        for (i, b) in bins.iter().enumerate() {
            csv.row(&[
                iso8601(b.start),
                b.count.to_string(),
                peaks.contains(&i).to_string(),
            ]);
        }
        let p = dir.join("timeline.csv");
        csv.write(&p)?;
        written.push(p);
    }

    for p in &written {
        log(cfg, format!("wrote {}", p.display()));
    }
    Ok(written)
}

/// index, match, eval (when labels are configured), then every analysis.
pub fn cmd_all(cfg: &RunConfig) -> Result<()> {
    cmd_index(cfg)?;
    cmd_match(cfg)?;
    if cfg.labels_path.is_some() {
        cmd_eval(cfg, &[EvalTask::Classify, EvalTask::Identify], false)?;
    }
    cmd_analyze(cfg, &Analysis::ALL)?;
    Ok(())
}

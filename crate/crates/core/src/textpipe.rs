//! Text normalization and corpus term statistics.
//!
//! Every matcher sees text only through [`Tokenizer::tokenize`], so the index
//! side (articles) and the query side (tweets) are always normalized the same
//! way.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::PathBuf;

use regex::Regex;
use rust_stemmers::{Algorithm, Stemmer};
use thiserror::Error;

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

#[derive(Debug, Error)]
pub enum TextError {
    #[error("EMPTY_CORPUS: no documents with any tokens")]
    EmptyCorpus,
    #[error("cannot read stopwords file {path}: {source}")]
    Stopwords {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Where the stopword list comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stopwords {
    /// The bundled English function-word list.
    Default,
    /// No stopword filtering at all.
    Disabled,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizerConfig {
    pub stopwords: Stopwords,
    pub min_token_len: usize,
    pub strip_urls: bool,
    pub strip_mentions: bool,
    pub stemming: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            stopwords: Stopwords::Default,
            min_token_len: 2,
            strip_urls: true,
            strip_mentions: true,
            stemming: false,
        }
    }
}

/// An ordered list of normalized terms.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenSeq(Vec<String>);

impl TokenSeq {
    pub fn new(tokens: Vec<String>) -> Self {
        TokenSeq(tokens)
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn join(&self) -> String {
        self.0.join(" ")
    }
}

impl<S: Into<String>> FromIterator<S> for TokenSeq {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        TokenSeq(iter.into_iter().map(Into::into).collect())
    }
}

/// Compiled tokenizer. Cheap to share across threads.
pub struct Tokenizer {
    config: TokenizerConfig,
    stopwords: HashSet<String>,
    url: Regex,
    mention: Regex,
    stemmer: Option<Stemmer>,
}

impl std::fmt::Debug for Tokenizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tokenizer")
            .field("config", &self.config)
            .field("stopwords", &self.stopwords.len())
            .finish()
    }
}

/// Lowercases, removes apostrophes inside words and turns every other
/// non-alphanumeric character into a separator.
fn squash_punctuation(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        if c == '\'' || c == '\u{2019}' {
            continue;
        }
        if c.is_alphanumeric() {
            out.extend(c.to_lowercase());
        } else {
            out.push(' ');
        }
    }
    out
}

fn parse_stopwords(content: &str) -> HashSet<String> {
    content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .flat_map(|l| {
            squash_punctuation(l)
                .split_whitespace()
                .map(str::to_owned)
                .collect::<Vec<_>>()
        })
        .collect()
}

impl Tokenizer {
    pub fn new(config: TokenizerConfig) -> Result<Self, TextError> {
        let stopwords = match &config.stopwords {
            Stopwords::Default => parse_stopwords(DEFAULT_STOPWORDS),
            Stopwords::Disabled => HashSet::new(),
            Stopwords::File(path) => {
                let content =
                    std::fs::read_to_string(path).map_err(|source| TextError::Stopwords {
                        path: path.clone(),
                        source,
                    })?;
                parse_stopwords(&content)
            }
        };
        Ok(Self::with_stopword_set(config, stopwords))
    }

    pub fn with_stopword_set(config: TokenizerConfig, stopwords: HashSet<String>) -> Self {
        Tokenizer {
            stemmer: config.stemming.then(|| Stemmer::create(Algorithm::English)),
            config,
            stopwords,
            url: Regex::new(r"(?i)\b(?:https?://|www\.)\S*").expect("url pattern"),
            mention: Regex::new(r"@[\w]+").expect("mention pattern"),
        }
    }

    pub fn config(&self) -> &TokenizerConfig {
        &self.config
    }

    pub fn is_stopword(&self, term: &str) -> bool {
        self.stopwords.contains(term)
    }

    pub fn tokenize(&self, text: &str) -> TokenSeq {
        let mut text = std::borrow::Cow::Borrowed(text);
        if self.config.strip_urls {
            text = std::borrow::Cow::Owned(self.url.replace_all(&text, " ").into_owned());
        }
        if self.config.strip_mentions {
            text = std::borrow::Cow::Owned(self.mention.replace_all(&text, " ").into_owned());
        }
        let squashed = squash_punctuation(&text);
        let min_len = self.config.min_token_len;
        let tokens = squashed
            .split_whitespace()
            .filter(|t| !self.stopwords.contains(*t))
            .filter(|t| t.chars().count() >= min_len)
            .map(|t| match &self.stemmer {
                Some(s) => s.stem(t).into_owned(),
                None => t.to_owned(),
            })
            .collect();
        TokenSeq(tokens)
    }

    /// Stable description of every setting that changes tokenizer output.
    pub fn fingerprint(&self) -> String {
        let mut words: Vec<&str> = self.stopwords.iter().map(String::as_str).collect();
        words.sort_unstable();
        format!(
            "min_len={};urls={};mentions={};stem={};stopwords={}",
            self.config.min_token_len,
            self.config.strip_urls,
            self.config.strip_mentions,
            self.config.stemming,
            words.join(",")
        )
    }
}

/// One-shot tokenization. Builds a fresh [`Tokenizer`]; reuse one for batches.
pub fn tokenize(text: &str, config: &TokenizerConfig) -> Result<TokenSeq, TextError> {
    Ok(Tokenizer::new(config.clone())?.tokenize(text))
}

pub fn term_counts(doc: &TokenSeq) -> BTreeMap<&str, u32> {
    let mut counts = BTreeMap::new();
    for t in doc.iter() {
        *counts.entry(t).or_insert(0) += 1;
    }
    counts
}

/// Term dictionary plus the corpus statistics every matcher needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    ids: HashMap<String, u32>,
    doc_freq: Vec<u32>,
    n_docs: usize,
    avgdl: f64,
}

impl Vocabulary {
    /// Reassembles a vocabulary from stored parts (terms in id order).
    pub(crate) fn from_parts(
        terms: Vec<String>,
        doc_freq: Vec<u32>,
        n_docs: usize,
        total_tokens: u64,
    ) -> Self {
        let ids = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Vocabulary {
            terms,
            ids,
            doc_freq,
            n_docs,
            avgdl: if n_docs == 0 {
                0.0
            } else {
                total_tokens as f64 / n_docs as f64
            },
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn id(&self, term: &str) -> Option<u32> {
        self.ids.get(term).copied()
    }

    pub fn term(&self, id: u32) -> &str {
        &self.terms[id as usize]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn doc_freq(&self, id: u32) -> u32 {
        self.doc_freq[id as usize]
    }

    pub fn doc_freq_of(&self, term: &str) -> Option<u32> {
        self.id(term).map(|id| self.doc_freq(id))
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn avgdl(&self) -> f64 {
        self.avgdl
    }
}

/// Builds the dictionary over `docs`; ids follow first appearance.
pub fn build_vocabulary(docs: &[TokenSeq]) -> Result<Vocabulary, TextError> {
    let mut terms = Vec::new();
    let mut ids: HashMap<String, u32> = HashMap::new();
    let mut doc_freq: Vec<u32> = Vec::new();
    let mut last_doc: Vec<usize> = Vec::new();
    let mut total = 0u64;
    for (d, doc) in docs.iter().enumerate() {
        total += doc.len() as u64;
        for t in doc.iter() {
            let id = match ids.get(t) {
                Some(&id) => id,
                None => {
                    let id = terms.len() as u32;
                    terms.push(t.to_owned());
                    ids.insert(t.to_owned(), id);
                    doc_freq.push(0);
                    last_doc.push(usize::MAX);
                    id
                }
            } as usize;
            if last_doc[id] != d {
                last_doc[id] = d;
                doc_freq[id] += 1;
            }
        }
    }
    if total == 0 {
        return Err(TextError::EmptyCorpus);
    }
    Ok(Vocabulary {
        terms,
        ids,
        doc_freq,
        n_docs: docs.len(),
        avgdl: total as f64 / docs.len() as f64,
    })
}

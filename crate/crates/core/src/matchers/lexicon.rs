//! Signal-phrase matching: a tweet is rumor-signaling if any pattern matches.

use std::path::Path;

use regex::{RegexSet, RegexSetBuilder};

use super::MatchError;

const DEFAULT_PATTERNS: &str = include_str!("../../data/lexicon.txt");

#[derive(Debug, Clone)]
pub struct LexiconPatternSet {
    patterns: Vec<String>,
    set: RegexSet,
}

impl LexiconPatternSet {
    pub fn new<I, S>(patterns: I) -> Result<Self, MatchError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let patterns: Vec<String> = patterns.into_iter().map(Into::into).collect();
        let set = RegexSetBuilder::new(&patterns)
            .case_insensitive(true)
            .build()
            .map_err(|e| MatchError::Pattern(e.to_string()))?;
        Ok(LexiconPatternSet { patterns, set })
    }

    /// Parses one pattern per line; blank lines and `#` comments are skipped.
    pub fn parse(content: &str) -> Result<Self, MatchError> {
        Self::new(
            content
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn load(path: &Path) -> Result<Self, MatchError> {
        let content = std::fs::read_to_string(path).map_err(|source| MatchError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&content)
    }

    pub fn patterns(&self) -> &[String] {
        &self.patterns
    }

    pub fn is_match(&self, text: &str) -> bool {
        self.set.is_match(text)
    }
}

impl Default for LexiconPatternSet {
    fn default() -> Self {
        Self::parse(DEFAULT_PATTERNS).expect("bundled lexicon compiles")
    }
}

pub fn match_lexicon(text: &str, patterns: &LexiconPatternSet) -> bool {
    patterns.is_match(text)
}

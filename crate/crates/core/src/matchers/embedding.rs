//! Dense-vector matching: averaged word vectors, or externally supplied
//! document vectors, compared by cosine similarity.

use std::collections::HashMap;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::index::ArticleIndex;
use super::MatchError;
use crate::textpipe::TokenSeq;

/// Term (or document id) to vector lookup, all vectors of length `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize, vectors: HashMap<String, Vec<f64>>) -> Result<Self, MatchError> {
        if dim == 0 {
            return Err(MatchError::EmbeddingFormat {
                line: 0,
                reason: "dimension must be positive".into(),
            });
        }
        if let Some((term, v)) = vectors.iter().find(|(_, v)| v.len() != dim) {
            return Err(MatchError::DimMismatch {
                expected: dim,
                found: v.len(),
                what: format!("vector for {term:?}"),
            });
        }
        Ok(EmbeddingTable { dim, vectors })
    }

    /// Reads the word2vec text format: a `<count> <dim>` header, then one
    /// `term v1 .. vdim` line per entry.
    pub fn load(path: &Path) -> Result<Self, MatchError> {
        let file = std::fs::File::open(path).map_err(|source| MatchError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let bad = |line: usize, reason: String| MatchError::EmbeddingFormat { line, reason };
        let mut lines = BufReader::new(file).lines().enumerate();
        let (count, dim) = match lines.next() {
            Some((_, Ok(header))) => {
                let mut parts = header.split_whitespace();
                let count = parts.next().and_then(|p| p.parse::<usize>().ok());
                let dim = parts.next().and_then(|p| p.parse::<usize>().ok());
                match (count, dim, parts.next()) {
                    (Some(c), Some(d), None) if d > 0 => (c, d),
                    _ => return Err(bad(1, "header must be \"<count> <dim>\"".into())),
                }
            }
            Some((_, Err(e))) => return Err(bad(1, e.to_string())),
            None => return Err(bad(1, "empty file".into())),
        };
        let mut vectors = HashMap::with_capacity(count);
        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line.map_err(|e| bad(line_no, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let term = parts.next().expect("non-blank line has a first field");
            let values = parts
                .map(|p| p.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| bad(line_no, e.to_string()))?;
            if values.len() != dim {
                return Err(bad(
                    line_no,
                    format!("expected {dim} values, found {}", values.len()),
                ));
            }
            if vectors.insert(term.to_owned(), values).is_some() {
                return Err(bad(line_no, format!("duplicate entry {term:?}")));
            }
        }
        if vectors.len() != count {
            return Err(bad(
                1,
                format!(
                    "header announces {count} entries, file has {}",
                    vectors.len()
                ),
            ));
        }
        Ok(EmbeddingTable { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, term: &str) -> Option<&[f64]> {
        self.vectors.get(term).map(Vec::as_slice)
    }

    /// Copy with every vector multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        EmbeddingTable {
            dim: self.dim,
            vectors: self
                .vectors
                .iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|x| x * factor).collect()))
                .collect(),
        }
    }

    /// Mean of the vectors of in-vocabulary tokens; `None` if there are none.
    pub fn mean_vector(&self, tokens: &TokenSeq) -> Option<Vec<f64>> {
        let mut sum = vec![0.0; self.dim];
        let mut n = 0usize;
        for v in tokens.iter().filter_map(|t| self.get(t)) {
            sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
            n += 1;
        }
        (n > 0).then(|| {
            sum.iter_mut().for_each(|s| *s /= n as f64);
            sum
        })
    }
}

/// Per-article vectors with cached norms, one per index ordinal.
#[derive(Debug, Clone, PartialEq)]
pub struct ArticleVectors {
    dim: usize,
    vectors: Vec<Vec<f64>>,
    norms: Vec<f64>,
}

impl ArticleVectors {
    pub fn new(dim: usize, vectors: Vec<Vec<f64>>) -> Result<Self, MatchError> {
        if let Some((i, v)) = vectors.iter().enumerate().find(|(_, v)| v.len() != dim) {
            return Err(MatchError::DimMismatch {
                expected: dim,
                found: v.len(),
                what: format!("article vector {i}"),
            });
        }
        let norms = vectors.iter().map(|v| l2(v)).collect();
        Ok(ArticleVectors {
            dim,
            vectors,
            norms,
        })
    }

    /// Averages each article's tokens through `table`. Articles without any
    /// in-vocabulary token get the zero vector (and score 0 against anything).
    pub fn from_word_vectors(index: &ArticleIndex, table: &EmbeddingTable) -> Self {
        let vocab = index.vocabulary();
        let vectors = index
            .article_term_counts()
            .into_iter()
            .map(|counts| {
                let mut sum = vec![0.0; table.dim()];
                let mut n = 0u64;
                for (term, count) in counts {
                    if let Some(v) = table.get(vocab.term(term)) {
                        sum.iter_mut()
                            .zip(v)
                            .for_each(|(s, x)| *s += count as f64 * x);
                        n += count as u64;
                    }
                }
                if n > 0 {
                    sum.iter_mut().for_each(|s| *s /= n as f64);
                }
                sum
            })
            .collect();
        Self::new(table.dim(), vectors).expect("vectors built at table dim")
    }

    /// Looks every article id up in a document-vector table.
    pub fn from_document_vectors(
        index: &ArticleIndex,
        docvecs: &EmbeddingTable,
    ) -> Result<Self, MatchError> {
        let vectors = index
            .article_ids()
            .iter()
            .map(|id| {
                docvecs
                    .get(id)
                    .map(<[f64]>::to_vec)
                    .ok_or_else(|| MatchError::MissingVector(id.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(docvecs.dim(), vectors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Cosine of `query` against every article. `None`, or a zero query, means
    /// the representation is undefined: all scores are 0 and the result is
    /// flagged.
    pub fn score_query(&self, query: Option<&[f64]>) -> Result<EmbeddingScores, MatchError> {
        let undefined = || EmbeddingScores {
            scores: vec![0.0; self.vectors.len()],
            undefined: true,
        };
        let Some(q) = query else {
            return Ok(undefined());
        };
        if q.len() != self.dim {
            return Err(MatchError::DimMismatch {
                expected: self.dim,
                found: q.len(),
                what: "query vector".into(),
            });
        }
        let qn = l2(q);
        if qn == 0.0 {
            return Ok(undefined());
        }
        let scores = self
            .vectors
            .iter()
            .zip(&self.norms)
            .map(|(v, &n)| {
                if n == 0.0 {
                    0.0
                } else {
                    let dot: f64 = q.iter().zip(v).map(|(a, b)| a * b).sum();
                    (dot / (qn * n)).clamp(-1.0, 1.0)
                }
            })
            .collect();
        Ok(EmbeddingScores {
            scores,
            undefined: false,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingScores {
    pub scores: Vec<f64>,
    /// The tweet had no usable vector.
    pub undefined: bool,
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn score_embedding(
    tokens: &TokenSeq,
    articles: &ArticleVectors,
    table: &EmbeddingTable,
) -> Result<EmbeddingScores, MatchError> {
    if table.dim() != articles.dim() {
        return Err(MatchError::DimMismatch {
            expected: articles.dim(),
            found: table.dim(),
            what: "embedding table".into(),
        });
    }
    articles.score_query(table.mean_vector(tokens).as_deref())
}

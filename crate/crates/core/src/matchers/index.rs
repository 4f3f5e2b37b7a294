//! Inverted index over the verified rumor articles.

use std::collections::HashMap;
use std::io::{Read, Write};

use super::MatchError;
use crate::corpus::RumorArticle;
use crate::textpipe::{build_vocabulary, TextError, TokenSeq, Tokenizer, Vocabulary};

const MAGIC: &[u8; 6] = b"RMIDX\0";
const FORMAT_VERSION: u8 = 1;

/// One (term, article) occurrence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Posting {
    pub article: u32,
    pub count: u32,
    /// Component of the article's L2-normalized TF-IDF vector for this term.
    pub tfidf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArticleIndex {
    vocabulary: Vocabulary,
    /// Indexed by term id; each list is sorted by article ordinal.
    postings: Vec<Vec<Posting>>,
    doc_len: Vec<u32>,
    article_ids: Vec<String>,
    tfidf_idf: Vec<f64>,
    bm25_idf: Vec<f64>,
    tfidf_vectors: Vec<Vec<(u32, f64)>>,
    warnings: Vec<String>,
    tokenizer_fingerprint: String,
}

/// `ln(N / df)`.
pub fn tfidf_idf(n_docs: usize, df: u32) -> f64 {
    (n_docs as f64 / df as f64).ln()
}

/// `ln(1 + (N - df + 0.5) / (df + 0.5))`, never negative.
pub fn bm25_idf(n_docs: usize, df: u32) -> f64 {
    let n = n_docs as f64;
    let df = df as f64;
    (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
}

pub fn build_index(
    articles: &[RumorArticle],
    tokenizer: &Tokenizer,
) -> Result<ArticleIndex, MatchError> {
    if articles.is_empty() {
        return Err(MatchError::EmptyCorpus);
    }
    let docs: Vec<TokenSeq> = articles
        .iter()
        .map(|a| tokenizer.tokenize(&a.body))
        .collect();
    let ids = articles.iter().map(|a| a.id.clone()).collect();
    ArticleIndex::from_token_seqs(ids, &docs, tokenizer.fingerprint())
}

impl ArticleIndex {
    /// Indexes already-tokenized documents.
    pub fn from_token_seqs(
        article_ids: Vec<String>,
        docs: &[TokenSeq],
        tokenizer_fingerprint: String,
    ) -> Result<Self, MatchError> {
        if docs.is_empty() {
            return Err(MatchError::EmptyCorpus);
        }
        assert_eq!(article_ids.len(), docs.len());
        let vocabulary = build_vocabulary(docs).map_err(|e| match e {
            TextError::EmptyCorpus => MatchError::AllEmptyAfterTokenize,
            other => MatchError::Text(other),
        })?;
        let mut postings: Vec<Vec<(u32, u32)>> = vec![Vec::new(); vocabulary.len()];
        let mut counts: HashMap<u32, u32> = HashMap::new();
        for (d, doc) in docs.iter().enumerate() {
            counts.clear();
            for t in doc.iter() {
                let id = vocabulary.id(t).expect("term came from these docs");
                *counts.entry(id).or_insert(0) += 1;
            }
            for (&term, &count) in &counts {
                postings[term as usize].push((d as u32, count));
            }
        }
        let doc_len = docs.iter().map(|d| d.len() as u32).collect();
        Ok(Self::assemble(
            vocabulary,
            postings,
            doc_len,
            article_ids,
            tokenizer_fingerprint,
        ))
    }

    /// Derives the weight tables from raw postings. Deterministic in its inputs.
    fn assemble(
        vocabulary: Vocabulary,
        raw: Vec<Vec<(u32, u32)>>,
        doc_len: Vec<u32>,
        article_ids: Vec<String>,
        tokenizer_fingerprint: String,
    ) -> Self {
        let n = vocabulary.n_docs();
        let tfidf_idf: Vec<f64> = (0..vocabulary.len() as u32)
            .map(|t| tfidf_idf(n, vocabulary.doc_freq(t)))
            .collect();
        let bm25_idf: Vec<f64> = (0..vocabulary.len() as u32)
            .map(|t| bm25_idf(n, vocabulary.doc_freq(t)))
            .collect();

        let mut tfidf_vectors: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for (term, list) in raw.iter().enumerate() {
            for &(d, count) in list {
                let w = count as f64 * tfidf_idf[term];
                if w != 0.0 {
                    tfidf_vectors[d as usize].push((term as u32, w));
                }
            }
        }
        let mut norms = vec![0.0; n];
        for (d, v) in tfidf_vectors.iter_mut().enumerate() {
            let norm = v.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
            norms[d] = norm;
            if norm > 0.0 {
                v.iter_mut().for_each(|(_, w)| *w /= norm);
            }
        }
        let postings = raw
            .into_iter()
            .enumerate()
            .map(|(term, list)| {
                list.into_iter()
                    .map(|(article, count)| {
                        let norm = norms[article as usize];
                        let tfidf = if norm > 0.0 {
                            count as f64 * tfidf_idf[term] / norm
                        } else {
                            0.0
                        };
                        Posting {
                            article,
                            count,
                            tfidf,
                        }
                    })
                    .collect()
            })
            .collect();

        let warnings = doc_len
            .iter()
            .zip(&article_ids)
            .filter(|(len, _)| **len == 0)
            .map(|(_, id)| format!("article {id} has no tokens after tokenization"))
            .collect();

        ArticleIndex {
            vocabulary,
            postings,
            doc_len,
            article_ids,
            tfidf_idf,
            bm25_idf,
            tfidf_vectors,
            warnings,
            tokenizer_fingerprint,
        }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn n_articles(&self) -> usize {
        self.article_ids.len()
    }

    pub fn article_id(&self, ordinal: usize) -> &str {
        &self.article_ids[ordinal]
    }

    pub fn article_ids(&self) -> &[String] {
        &self.article_ids
    }

    pub fn postings(&self, term: u32) -> &[Posting] {
        &self.postings[term as usize]
    }

    pub fn doc_len(&self) -> &[u32] {
        &self.doc_len
    }

    pub fn tfidf_idf(&self, term: u32) -> f64 {
        self.tfidf_idf[term as usize]
    }

    pub fn bm25_idf(&self, term: u32) -> f64 {
        self.bm25_idf[term as usize]
    }

    /// L2-normalized TF-IDF vector of one article, sorted by term id.
    pub fn tfidf_vector(&self, ordinal: usize) -> &[(u32, f64)] {
        &self.tfidf_vectors[ordinal]
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn tokenizer_fingerprint(&self) -> &str {
        &self.tokenizer_fingerprint
    }

    /// Raw term counts of one article, sorted by term id.
    pub fn article_term_counts(&self) -> Vec<Vec<(u32, u32)>> {
        let mut out = vec![Vec::new(); self.n_articles()];
        for (term, list) in self.postings.iter().enumerate() {
            for p in list {
                out[p.article as usize].push((term as u32, p.count));
            }
        }
        out
    }

    /// Serializes the index. Byte-identical for identical inputs.
    ///
    /// Layout (little endian): magic, version byte, tokenizer fingerprint,
    /// article ids, per-article lengths, terms with document frequencies, then
    /// postings per term as (article, count) pairs. Weight tables are
    /// recomputed on load.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&[FORMAT_VERSION])?;
        write_str(&mut w, &self.tokenizer_fingerprint)?;
        write_u32(&mut w, self.article_ids.len() as u32)?;
        for (id, len) in self.article_ids.iter().zip(&self.doc_len) {
            write_str(&mut w, id)?;
            write_u32(&mut w, *len)?;
        }
        write_u32(&mut w, self.vocabulary.len() as u32)?;
        for (t, term) in self.vocabulary.terms().iter().enumerate() {
            write_str(&mut w, term)?;
            write_u32(&mut w, self.vocabulary.doc_freq(t as u32))?;
            let list = &self.postings[t];
            write_u32(&mut w, list.len() as u32)?;
            for p in list {
                write_u32(&mut w, p.article)?;
                write_u32(&mut w, p.count)?;
            }
        }
        w.flush()
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, MatchError> {
        let mut magic = [0u8; 6];
        r.read_exact(&mut magic).map_err(format_err)?;
        if &magic != MAGIC {
            return Err(MatchError::IndexFormat("not an article index file".into()));
        }
        let mut version = [0u8; 1];
        r.read_exact(&mut version).map_err(format_err)?;
        if version[0] != FORMAT_VERSION {
            return Err(MatchError::IndexFormat(format!(
                "index format version {} is not supported (expected {FORMAT_VERSION})",
                version[0]
            )));
        }
        let fingerprint = read_str(&mut r)?;
        let n = read_u32(&mut r)? as usize;
        let mut article_ids = Vec::with_capacity(n);
        let mut doc_len = Vec::with_capacity(n);
        for _ in 0..n {
            article_ids.push(read_str(&mut r)?);
            doc_len.push(read_u32(&mut r)?);
        }
        let v = read_u32(&mut r)? as usize;
        let mut terms = Vec::with_capacity(v);
        let mut doc_freq = Vec::with_capacity(v);
        let mut raw = Vec::with_capacity(v);
        for _ in 0..v {
            terms.push(read_str(&mut r)?);
            let df = read_u32(&mut r)?;
            let len = read_u32(&mut r)? as usize;
            if len != df as usize {
                return Err(MatchError::IndexFormat("postings/df mismatch".into()));
            }
            let mut list = Vec::with_capacity(len);
            for _ in 0..len {
                let article = read_u32(&mut r)?;
                if article as usize >= n {
                    return Err(MatchError::IndexFormat("posting out of range".into()));
                }
                list.push((article, read_u32(&mut r)?));
            }
            doc_freq.push(df);
            raw.push(list);
        }
        let total: u64 = doc_len.iter().map(|&l| l as u64).sum();
        let vocabulary = Vocabulary::from_parts(terms, doc_freq, n, total);
        Ok(Self::assemble(
            vocabulary,
            raw,
            doc_len,
            article_ids,
            fingerprint,
        ))
    }
}

fn format_err(e: std::io::Error) -> MatchError {
    MatchError::IndexFormat(format!("truncated or unreadable index: {e}"))
}

fn write_u32<W: Write>(w: &mut W, v: u32) -> std::io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn write_str<W: Write>(w: &mut W, s: &str) -> std::io::Result<()> {
    write_u32(w, s.len() as u32)?;
    w.write_all(s.as_bytes())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, MatchError> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf).map_err(format_err)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_str<R: Read>(r: &mut R) -> Result<String, MatchError> {
    let len = read_u32(r)? as usize;
    let mut buf = vec![0u8; len];
    r.read_exact(&mut buf).map_err(format_err)?;
    String::from_utf8(buf).map_err(|_| MatchError::IndexFormat("invalid utf-8".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textpipe::TokenizerConfig;

    fn seq(s: &str) -> TokenSeq {
        s.split_whitespace().collect()
    }

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("a{i}")).collect()
    }

    #[test]
    fn disjoint_articles_have_singleton_postings() {
        let idx = ArticleIndex::from_token_seqs(ids(2), &[seq("aa bb"), seq("cc dd")], "x".into())
            .unwrap();
        for t in 0..idx.vocabulary().len() as u32 {
            assert_eq!(idx.postings(t).len(), 1);
        }
    }

    #[test]
    fn empty_article_is_indexed_with_warning() {
        let idx = ArticleIndex::from_token_seqs(
            ids(3),
            &[seq("aa bb"), seq(""), seq("bb cc")],
            "x".into(),
        )
        .unwrap();
        assert_eq!(idx.doc_len(), [2, 0, 2]);
        assert!(idx.tfidf_vector(1).is_empty());
        assert_eq!(idx.warnings().len(), 1);
        assert!(idx.warnings()[0].contains("a1"));
    }

    #[test]
    fn errors_on_degenerate_input() {
        assert!(matches!(
            ArticleIndex::from_token_seqs(vec![], &[], "x".into()),
            Err(MatchError::EmptyCorpus)
        ));
        assert!(matches!(
            ArticleIndex::from_token_seqs(ids(2), &[seq(""), seq("")], "x".into()),
            Err(MatchError::AllEmptyAfterTokenize)
        ));
        let tok = Tokenizer::new(TokenizerConfig::default()).unwrap();
        assert!(matches!(
            build_index(&[], &tok),
            Err(MatchError::EmptyCorpus)
        ));
    }

    #[test]
    fn tfidf_vectors_are_unit_length() {
        let idx = ArticleIndex::from_token_seqs(
            ids(3),
            &[seq("aa bb bb"), seq("bb cc"), seq("dd aa aa ee")],
            "x".into(),
        )
        .unwrap();
        for d in 0..3 {
            let norm: f64 = idx.tfidf_vector(d).iter().map(|(_, w)| w * w).sum();
            assert!((norm.sqrt() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn shape_at_reference_set_size() {
        let docs: Vec<TokenSeq> = (0..1723).map(|i| seq(&format!("w{i} common"))).collect();
        let idx = ArticleIndex::from_token_seqs(ids(1723), &docs, "x".into()).unwrap();
        assert_eq!(idx.doc_len().len(), 1723);
        assert_eq!(idx.vocabulary().n_docs(), 1723);
    }

    #[test]
    fn binary_round_trip_and_determinism() {
        let idx = ArticleIndex::from_token_seqs(
            ids(3),
            &[seq("aa bb bb"), seq(""), seq("dd aa aa ee")],
            "fp".into(),
        )
        .unwrap();
        let mut a = Vec::new();
        idx.write_to(&mut a).unwrap();
        let back = ArticleIndex::read_from(a.as_slice()).unwrap();
        assert_eq!(back, idx);
        let mut b = Vec::new();
        back.write_to(&mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_other_versions_and_garbage() {
        let idx = ArticleIndex::from_token_seqs(ids(1), &[seq("aa")], "fp".into()).unwrap();
        let mut bytes = Vec::new();
        idx.write_to(&mut bytes).unwrap();
        bytes[6] = FORMAT_VERSION + 1;
        assert!(matches!(
            ArticleIndex::read_from(bytes.as_slice()),
            Err(MatchError::IndexFormat(m)) if m.contains("version")
        ));
        assert!(ArticleIndex::read_from(&b"hello world"[..]).is_err());
        bytes[6] = FORMAT_VERSION;
        bytes.truncate(bytes.len() - 2);
        assert!(ArticleIndex::read_from(bytes.as_slice()).is_err());
    }
}

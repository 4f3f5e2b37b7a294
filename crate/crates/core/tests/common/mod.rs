#![allow(dead_code)]

pub mod analysis_fixture;
pub mod oracle;

use std::collections::{BTreeSet, HashMap};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use rumormatch::{Group, Label, LabeledTweet, RumorArticle, Tweet};

pub const PLANTED_SEED: u64 = 20_161_108;
pub const ELECTION_START: i64 = 1_459_468_800;
pub const ELECTION_END: i64 = 1_475_280_000;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn article(id: &str, body: &str) -> RumorArticle {
    RumorArticle {
        id: id.into(),
        title: format!("title {id}"),
        body: body.into(),
        subjects: BTreeSet::new(),
        source_url: None,
    }
}

pub fn tweet(id: &str, user: &str, group: Group, timestamp: i64, text: &str) -> Tweet {
    Tweet {
        id: id.into(),
        user_id: user.into(),
        group,
        timestamp,
        text: text.into(),
    }
}

pub fn rumor_label(tweet_id: &str, article_id: &str) -> LabeledTweet {
    LabeledTweet {
        tweet_id: tweet_id.into(),
        label: Label::Rumor,
        article_id: Some(article_id.into()),
    }
}

pub fn nonrumor_label(tweet_id: &str) -> LabeledTweet {
    LabeledTweet {
        tweet_id: tweet_id.into(),
        label: Label::Nonrumor,
        article_id: None,
    }
}

/// Draws term ranks 0..n from a Zipf law.
pub struct ZipfTerms {
    zipf: Zipf<f64>,
    prefix: char,
}

impl ZipfTerms {
    pub fn new(prefix: char, n: usize, s: f64) -> Self {
        ZipfTerms {
            zipf: Zipf::new(n as f64, s).unwrap(),
            prefix,
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> String {
        let rank = self.zipf.sample(rng) as usize - 1;
        format!("{}{rank:04}", self.prefix)
    }
}

/// Top `k` terms of each document by raw-count TF-IDF with `ln(N/df)`,
/// ties broken by term.
pub fn top_tfidf_terms(docs: &[Vec<String>], k: usize) -> Vec<Vec<String>> {
    let n = docs.len() as f64;
    let mut df: HashMap<&str, usize> = HashMap::new();
    for d in docs {
        let distinct: BTreeSet<&str> = d.iter().map(String::as_str).collect();
        for t in distinct {
            *df.entry(t).or_default() += 1;
        }
    }
    docs.iter()
        .map(|d| {
            let mut tf: HashMap<&str, usize> = HashMap::new();
            for t in d {
                *tf.entry(t.as_str()).or_default() += 1;
            }
            let mut weighted: Vec<(&str, f64)> = tf
                .into_iter()
                .map(|(t, c)| (t, c as f64 * (n / df[t] as f64).ln()))
                .collect();
            weighted.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
            weighted
                .into_iter()
                .take(k)
                .map(|(t, _)| t.to_owned())
                .collect()
        })
        .collect()
}

pub struct Planted {
    pub articles: Vec<RumorArticle>,
    pub rumor_tweets: Vec<Tweet>,
    pub negative_tweets: Vec<Tweet>,
    pub labels: Vec<LabeledTweet>,
}

impl Planted {
    pub fn tweets(&self) -> Vec<Tweet> {
        self.rumor_tweets
            .iter()
            .chain(&self.negative_tweets)
            .cloned()
            .collect()
    }
}

fn meta(rng: &mut impl Rng) -> (String, Group, i64) {
    let user = format!("u{:02}", rng.random_range(0..40));
    let group = *Group::ALL.choose(rng).unwrap();
    let ts = rng.random_range(ELECTION_START..ELECTION_END);
    (user, group, ts)
}

/// 50 articles of 80-150 tokens over a 1,000-term Zipf vocabulary; 500 rumor
/// tweets built from 8-15 of one article's top-20 TF-IDF terms plus up to 3
/// noise tokens; 500 negatives over a disjoint vocabulary.
pub fn planted_corpus(seed: u64) -> Planted {
    let mut rng = rng(seed);
    let vocab = ZipfTerms::new('w', 1000, 1.0);
    let docs: Vec<Vec<String>> = (0..50)
        .map(|_| {
            let len = rng.random_range(80..=150);
            (0..len).map(|_| vocab.sample(&mut rng)).collect()
        })
        .collect();
    let top = top_tfidf_terms(&docs, 20);
    let articles: Vec<RumorArticle> = docs
        .iter()
        .enumerate()
        .map(|(i, d)| article(&format!("a{i:02}"), &d.join(" ")))
        .collect();

    let mut rumor_tweets = Vec::new();
    let mut labels = Vec::new();
    for i in 0..500 {
        let a = rng.random_range(0..articles.len());
        let k = rng.random_range(8..=15);
        let mut tokens: Vec<String> = top[a].choose_multiple(&mut rng, k).cloned().collect();
        for _ in 0..rng.random_range(0..=3) {
            tokens.push(vocab.sample(&mut rng));
        }
        tokens.shuffle(&mut rng);
        let id = format!("r{i:03}");
        let (user, group, ts) = meta(&mut rng);
        rumor_tweets.push(tweet(&id, &user, group, ts, &tokens.join(" ")));
        labels.push(rumor_label(&id, &articles[a].id));
    }

    let negative_vocab = ZipfTerms::new('n', 1000, 1.0);
    let mut negative_tweets = Vec::new();
    for i in 0..500 {
        let len = rng.random_range(8..=18);
        let tokens: Vec<String> = (0..len).map(|_| negative_vocab.sample(&mut rng)).collect();
        let id = format!("x{i:03}");
        let (user, group, ts) = meta(&mut rng);
        negative_tweets.push(tweet(&id, &user, group, ts, &tokens.join(" ")));
        labels.push(nonrumor_label(&id));
    }

    Planted {
        articles,
        rumor_tweets,
        negative_tweets,
        labels,
    }
}

/// A large article/tweet stream sharing one Zipf vocabulary.
pub fn synthetic_stream(
    seed: u64,
    n_articles: usize,
    n_tweets: usize,
) -> (Vec<RumorArticle>, Vec<Tweet>) {
    let mut rng = rng(seed);
    let vocab = ZipfTerms::new('w', 20_000, 1.05);
    let articles = (0..n_articles)
        .map(|i| {
            let len = rng.random_range(80..=300);
            let body: Vec<String> = (0..len).map(|_| vocab.sample(&mut rng)).collect();
            article(&format!("a{i:05}"), &body.join(" "))
        })
        .collect();
    let tweets = (0..n_tweets)
        .map(|i| {
            let len = rng.random_range(5..=20);
            let text: Vec<String> = (0..len).map(|_| vocab.sample(&mut rng)).collect();
            let (user, group, ts) = meta(&mut rng);
            tweet(&format!("t{i:06}"), &user, group, ts, &text.join(" "))
        })
        .collect();
    (articles, tweets)
}

/// Up to 100 documents over up to 50 terms; some documents may be empty but
/// never all of them.
pub fn random_token_corpus(rng: &mut impl Rng) -> Vec<Vec<String>> {
    let n_docs = rng.random_range(1..=100);
    let n_terms = rng.random_range(1..=50);
    let mut docs: Vec<Vec<String>> = (0..n_docs)
        .map(|_| {
            let len = rng.random_range(0..=30);
            (0..len)
                .map(|_| format!("t{}", rng.random_range(0..n_terms)))
                .collect()
        })
        .collect();
    if docs.iter().all(Vec::is_empty) {
        docs[0].push("t0".into());
    }
    docs
}

/// A query mixing in-vocabulary terms (possibly repeated) and unseen ones.
pub fn random_query(rng: &mut impl Rng) -> Vec<String> {
    let len = rng.random_range(0..=12);
    (0..len)
        .map(|_| {
            if rng.random_bool(0.85) {
                format!("t{}", rng.random_range(0..50))
            } else {
                format!("zz{}", rng.random_range(0..5))
            }
        })
        .collect()
}

/// Random scores (with deliberate ties) and labels holding both classes.
pub fn random_scored_labels(rng: &mut impl Rng) -> (HashMap<String, f64>, Vec<LabeledTweet>) {
    let n = rng.random_range(2..=200);
    let coarse = rng.random_bool(0.5);
    let mut scores = HashMap::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let id = format!("t{i}");
        let s = if coarse {
            rng.random_range(0..8) as f64 / 4.0
        } else {
            rng.random_range(0.0..50.0)
        };
        scores.insert(id.clone(), s);
        labels.push(if rng.random_bool(0.4) {
            rumor_label(&id, "a1")
        } else {
            nonrumor_label(&id)
        });
    }
    labels[0] = rumor_label("t0", "a1");
    labels[1] = nonrumor_label("t1");
    (scores, labels)
}

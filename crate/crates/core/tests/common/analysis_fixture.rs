//! The committed 24-tweet fixture under `tests/fixtures/analysis`, with
//! hand-counted expectations.
//!
//! alice (TRUMP_FOLLOWER) 6/10 rumors, bob (TRUMP_FOLLOWER) 2/8, carol
//! (CLINTON_FOLLOWER) 3/6. Inside the 10-day window: alice 4/8, bob 2/7,
//! carol 3/5. Subjects: CLINTON {a1, a2, a4}, TRUMP {a3, a4}, a5 untagged.

use std::path::{Path, PathBuf};
use std::process::Command;

use rumormatch::analysis::{
    content_attribution, detect_peaks, group_rumor_ratio, keyword_breakdown, timeline,
    user_concentration, user_rumor_ratio_ranking, Detection, Detections, TimeWindow,
};
use rumormatch::corpus::{load_articles, load_tweets};
use rumormatch::{Group, MatchRecord, RumorArticle, Subject, Tokenizer, TokenizerConfig, Tweet};

pub const START: i64 = 1_467_331_200;
pub const DAY: i64 = 86_400;

pub fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/analysis")
}

pub struct Fixture {
    pub tweets: Vec<Tweet>,
    pub articles: Vec<RumorArticle>,
    pub detections: Detections,
}

pub fn load() -> Fixture {
    let d = dir();
    let records: Vec<MatchRecord> = std::fs::read_to_string(d.join("detections.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    Fixture {
        tweets: load_tweets(&d.join("tweets.jsonl")).unwrap(),
        articles: load_articles(&d.join("articles.jsonl")).unwrap(),
        detections: records.iter().map(Detection::from).collect(),
    }
}

fn q(a: usize, b: usize) -> f64 {
    a as f64 / b as f64
}

pub fn window() -> TimeWindow {
    TimeWindow::new(START, START + 10 * DAY).unwrap()
}

pub const TIMELINE: [usize; 10] = [0, 1, 0, 5, 0, 0, 1, 0, 2, 0];

pub fn verify_library() {
    let f = load();
    assert_eq!(f.tweets.len(), 24);
    assert_eq!(f.articles.len(), 5);
    let (t, d) = (&f.tweets, &f.detections);
    let tf = Group::TrumpFollower;
    let cf = Group::ClintonFollower;

    assert_eq!(group_rumor_ratio(t, d, tf, None).unwrap(), q(8, 18));
    assert_eq!(
        group_rumor_ratio(t, d, tf, Some(window())).unwrap(),
        q(6, 15)
    );
    assert_eq!(group_rumor_ratio(t, d, cf, None).unwrap(), q(3, 6));
    assert_eq!(
        group_rumor_ratio(t, d, cf, Some(window())).unwrap(),
        q(3, 5)
    );

    assert_eq!(user_concentration(t, d, 0.1).unwrap(), q(6, 11));
    assert_eq!(user_concentration(t, d, 0.2).unwrap(), q(6, 11));
    assert_eq!(user_concentration(t, d, 0.5).unwrap(), q(9, 11));
    assert_eq!(user_concentration(t, d, 1.0).unwrap(), 1.0);

    let ranking: Vec<(String, usize, usize, f64)> = user_rumor_ratio_ranking(t, d, 10)
        .unwrap()
        .into_iter()
        .map(|u| (u.user_id, u.rumor_count, u.total_count, u.ratio))
        .collect();
    assert_eq!(
        ranking,
        [
            ("alice".to_string(), 6, 10, q(6, 10)),
            ("carol".to_string(), 3, 6, q(3, 6)),
            ("bob".to_string(), 2, 8, q(2, 8)),
        ]
    );

    let alice: Vec<Tweet> = t.iter().filter(|x| x.user_id == "alice").cloned().collect();
    let tok = Tokenizer::new(TokenizerConfig::default()).unwrap();
    let kw: Vec<(String, usize, usize)> =
        keyword_breakdown(&alice, d, &["Clinton", "Trump", "FBI", "emails"], &tok)
            .unwrap()
            .into_iter()
            .map(|k| (k.keyword, k.rumor, k.nonrumor))
            .collect();
    assert_eq!(
        kw,
        [
            ("Clinton".to_string(), 4, 1),
            ("Trump".to_string(), 2, 1),
            ("FBI".to_string(), 2, 1),
            ("emails".to_string(), 2, 0),
        ]
    );

    let subjects = [Subject::Clinton, Subject::Trump];
    assert_eq!(
        content_attribution(t, d, &f.articles, tf, &subjects).unwrap(),
        [(Subject::Clinton, q(5, 3)), (Subject::Trump, q(4, 2))]
    );
    assert_eq!(
        content_attribution(t, d, &f.articles, cf, &subjects).unwrap(),
        [(Subject::Clinton, q(1, 3)), (Subject::Trump, q(2, 2))]
    );

    let bins = timeline(t, d, DAY, window()).unwrap();
    let starts: Vec<i64> = bins.iter().map(|b| b.start).collect();
    let expected_starts: Vec<i64> = (0..10).map(|i| START + i * DAY).collect();
    assert_eq!(starts, expected_starts);
    let counts: Vec<usize> = bins.iter().map(|b| b.count).collect();
    assert_eq!(counts, TIMELINE);

    // mean 0.9, population sd sqrt(2.29)
    assert_eq!(detect_peaks(&counts, 0.5), [3, 8]);
    assert_eq!(detect_peaks(&counts, 1.0), [3]);
    assert_eq!(detect_peaks(&counts, 2.0), [3]);
}

fn csv(path: PathBuf) -> Vec<String> {
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
        .lines()
        .map(String::from)
        .collect()
}

/// Runs `analyze` on the fixture through the binary and checks every CSV.
pub fn verify_cli(bin: &str) {
    let out = tempfile::tempdir().unwrap();
    let status = Command::new(bin)
        .args(["--config"])
        .arg(dir().join("analysis.conf"))
        .arg("--out")
        .arg(out.path())
        .args(["--quiet", "analyze"])
        .status()
        .unwrap();
    assert!(status.success());
    let o = out.path();
    assert_eq!(
        csv(o.join("group_ratio.csv")),
        [
            "group,window,ratio".to_string(),
            format!("CLINTON_FOLLOWER,entire,{}", q(3, 6)),
            format!("CLINTON_FOLLOWER,election,{}", q(3, 5)),
            format!("TRUMP_FOLLOWER,entire,{}", q(8, 18)),
            format!("TRUMP_FOLLOWER,election,{}", q(6, 15)),
        ]
    );
    assert_eq!(
        csv(o.join("concentration.csv")),
        [
            "fraction,share".to_string(),
            format!("0.1,{}", q(6, 11)),
            format!("0.2,{}", q(6, 11)),
        ]
    );
    assert_eq!(
        csv(o.join("user_ranking.csv")),
        [
            "user_id,rumor_count,total_count,ratio",
            "alice,6,10,0.6",
            "carol,3,6,0.5",
            "bob,2,8,0.25",
        ]
    );
    assert_eq!(
        csv(o.join("keywords.csv")),
        [
            "user_id,keyword,rumor_count,nonrumor_count",
            "alice,Clinton,4,1",
            "alice,Trump,2,1",
            "alice,FBI,2,1",
            "alice,emails,2,0",
        ]
    );
    assert_eq!(
        csv(o.join("attribution.csv")),
        [
            "group,subject,value".to_string(),
            format!("CLINTON_FOLLOWER,CLINTON,{}", q(1, 3)),
            "CLINTON_FOLLOWER,TRUMP,1".to_string(),
            format!("TRUMP_FOLLOWER,CLINTON,{}", q(5, 3)),
            "TRUMP_FOLLOWER,TRUMP,2".to_string(),
        ]
    );
    let timeline = csv(o.join("timeline.csv"));
    assert_eq!(timeline[0], "bin_start_iso8601,count,is_peak");
    let rows: Vec<String> = (0..10)
        .map(|i| {
            let peak = i == 3 || i == 8;
            format!("2016-07-{:02}T00:00:00Z,{},{peak}", i + 1, TIMELINE[i])
        })
        .collect();
    assert_eq!(timeline[1..], rows[..]);
}

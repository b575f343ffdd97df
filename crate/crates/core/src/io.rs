//! Corpus and report file formats.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;

use crate::ccm::{CausalVerdict, CvReport, LagCorrelationCurve};
use crate::error::{Error, Result};
use crate::lexicon::Emotion;
use crate::sentiment::SentimentScore;
use crate::series::{CitySeries, Feature, PeriodReport, ScoredPost};
use crate::text::RawPost;

/// Posts parsed from a JSON-lines corpus. Malformed lines are skipped and
/// counted; blank lines are ignored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub posts: Vec<RawPost>,
    pub lines: usize,
    pub malformed: usize,
    /// First few malformed line numbers with their messages.
    pub errors: Vec<(usize, String)>,
}

impl Corpus {
    pub fn malformed_fraction(&self) -> f64 {
        if self.lines == 0 {
            0.0
        } else {
            self.malformed as f64 / self.lines as f64
        }
    }
}

pub fn parse_corpus<R: BufRead>(reader: R, source: &Path) -> Result<Corpus> {
    let mut corpus = Corpus::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(source, e))?;
        if line.trim().is_empty() {
            continue;
        }
        corpus.lines += 1;
        match serde_json::from_str::<RawPost>(&line) {
            Ok(p) if !p.city.trim().is_empty() => corpus.posts.push(p),
            Ok(_) => {
                corpus.malformed += 1;
                if corpus.errors.len() < 10 {
                    corpus.errors.push((idx + 1, "empty city".into()));
                }
            }
            Err(e) => {
                corpus.malformed += 1;
                if corpus.errors.len() < 10 {
                    corpus.errors.push((idx + 1, e.to_string()));
                }
            }
        }
    }
    Ok(corpus)
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_corpus(BufReader::new(file), path)
}

pub fn write_corpus<W: Write>(mut out: W, posts: &[RawPost]) -> Result<()> {
    for p in posts {
        serde_json::to_writer(&mut out, p)?;
        out.write_all(b"\n").map_err(|e| Error::io("<corpus>", e))?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map_err(|e| Error::io(path, e))
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_text(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    let path = path.as_ref();
    let mut f = create(path)?;
    f.write_all(contents.as_bytes()).map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    Ok(csv::Writer::from_writer(create(path)?))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub const SCORED_HEADER: [&str; 7] = ["id", "date", "city", "negative", "neutral", "positive", "compound"];

/// `emotion_<name>`; plain names would clash with the polarity columns.
pub fn emotion_column(e: Emotion) -> String {
    format!("emotion_{}", e.name())
}

/// Scored posts: id, date, city, the four polarity columns, one column per
/// emotion frequency, the three engagement counts and the cleaned text.
pub fn write_scored<W: Write>(out: W, posts: &[ScoredPost]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = SCORED_HEADER.iter().map(|s| s.to_string()).collect();
    header.extend(Emotion::ALL.iter().map(|e| emotion_column(*e)));
    header.extend(["like_count", "reply_count", "retweet_count", "text"].map(String::from));
    w.write_record(&header)?;
    for p in posts {
        let mut row = vec![
            p.id.clone(),
            p.date.to_string(),
            p.city.clone(),
            p.sentiment.negative.to_string(),
            p.sentiment.neutral.to_string(),
            p.sentiment.positive.to_string(),
            p.sentiment.compound.to_string(),
        ];
        row.extend(p.emotions.iter().map(f64::to_string));
        row.extend([
            p.like_count.to_string(),
            p.reply_count.to_string(),
            p.retweet_count.to_string(),
            p.text.clone(),
        ]);
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<scored>", e))
}

fn field<T: FromStr>(rec: &csv::StringRecord, i: usize, name: &str, source: &Path, line: usize) -> Result<T> {
    let raw = rec.get(i).ok_or_else(|| Error::parse(source, line, format!("missing column {name}")))?;
    raw.trim()
        .parse()
        .map_err(|_| Error::parse(source, line, format!("bad {name}: {raw:?}")))
}

pub fn read_scored(path: impl AsRef<Path>) -> Result<Vec<ScoredPost>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::parse(path, 1, format!("missing column {name}")))
    };
    let idx: Vec<usize> = SCORED_HEADER.iter().map(|n| col(n)).collect::<Result<_>>()?;
    let emo: Vec<usize> = Emotion::ALL.iter().map(|e| col(&emotion_column(*e))).collect::<Result<_>>()?;
    let extra = |name: &str| header.iter().position(|h| h == name);
    let (likes, replies, retweets, text) =
        (extra("like_count"), extra("reply_count"), extra("retweet_count"), extra("text"));
    let mut posts = Vec::new();
    for (n, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = n + 2;
        let count = |c: Option<usize>, name: &str| -> Result<u64> {
            match c {
                Some(i) => field(&rec, i, name, path, line),
                None => Ok(0),
            }
        };
        let mut emotions = [0.0; 10];
        for (slot, &i) in emotions.iter_mut().zip(&emo) {
            *slot = field(&rec, i, "emotion", path, line)?;
        }
        posts.push(ScoredPost {
            id: rec.get(idx[0]).unwrap_or_default().to_string(),
            date: field(&rec, idx[1], "date", path, line)?,
            city: rec.get(idx[2]).unwrap_or_default().to_string(),
            sentiment: SentimentScore {
                negative: field(&rec, idx[3], "negative", path, line)?,
                neutral: field(&rec, idx[4], "neutral", path, line)?,
                positive: field(&rec, idx[5], "positive", path, line)?,
                compound: field(&rec, idx[6], "compound", path, line)?,
            },
            emotions,
            like_count: count(likes, "like_count")?,
            reply_count: count(replies, "reply_count")?,
            retweet_count: count(retweets, "retweet_count")?,
            text: text.and_then(|i| rec.get(i)).unwrap_or_default().to_string(),
        });
    }
    Ok(posts)
}

/// Long-format series table: date, city, feature, value.
pub fn write_series(path: impl AsRef<Path>, series: &[CitySeries]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    w.write_record(["date", "city", "feature", "value"])?;
    for s in series {
        let feature = s.feature.to_string();
        for (date, v) in s.dates().zip(&s.values) {
            w.write_record([date.to_string(), s.city.clone(), feature.clone(), v.to_string()])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads a long-format series table. Each (city, feature) must cover a
/// gap-free run of days; rows may come in any order.
pub fn read_series(path: impl AsRef<Path>) -> Result<Vec<CitySeries>> {
    let path = path.as_ref();
    let mut r = csv::Reader::from_path(path)?;
    let mut groups: BTreeMap<(String, String), BTreeMap<NaiveDate, f64>> = BTreeMap::new();
    for (n, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = n + 2;
        let date: NaiveDate = field(&rec, 0, "date", path, line)?;
        let city = rec.get(1).unwrap_or_default().to_string();
        let feature = rec.get(2).unwrap_or_default().trim().to_string();
        let value: f64 = field(&rec, 3, "value", path, line)?;
        if city.is_empty() || feature.is_empty() {
            return Err(Error::parse(path, line, "empty city or feature"));
        }
        if groups.entry((city, feature)).or_default().insert(date, value).is_some() {
            return Err(Error::parse(path, line, "duplicate date"));
        }
    }
    let mut out = Vec::new();
    for ((city, feature), days) in groups {
        let start = *days.keys().next().unwrap();
        for (i, d) in days.keys().enumerate() {
            if (*d - start).num_days() != i as i64 {
                return Err(Error::parse(path, 0, format!("{city}/{feature}: gap before {d}")));
            }
        }
        out.push(CitySeries::new(city, Feature::from_str(&feature)?, start, days.into_values().collect()));
    }
    Ok(out)
}

pub fn write_periods(path: impl AsRef<Path>, report: &PeriodReport) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    w.write_record(["city", "period", "n_tweets", "mean", "sd"])?;
    for s in &report.summaries {
        w.write_record([s.city.clone(), s.period.clone(), s.n_tweets.to_string(), opt(s.mean), opt(s.sd)])?;
    }
    for (city, n) in &report.remainder {
        w.write_record([city.clone(), "(none)".into(), n.to_string(), String::new(), String::new()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Both curves in one table: direction, tau, rho.
pub fn write_curves(path: impl AsRef<Path>, curves: &[&LagCorrelationCurve]) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    w.write_record(["direction", "tau", "rho"])?;
    for c in curves {
        let dir = c.direction();
        for p in &c.points {
            w.write_record([dir.clone(), p.lag.to_string(), p.rho.to_string()])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn verdict_text(v: &CausalVerdict, xy: &LagCorrelationCurve, yx: &LagCorrelationCurve) -> String {
    let skipped = |c: &LagCorrelationCurve| c.skipped.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
    let mut s = v.summary();
    s += &format!("direction_xy={}\ndirection_yx={}\n", xy.direction(), yx.direction());
    s += &format!("skipped_xy={}\nskipped_yx={}\n", skipped(xy), skipped(yx));
    if v.weak {
        s += "note=weak relationship\n";
    }
    s
}

/// One row per (config, held-out unit).
pub fn write_grid_report(path: impl AsRef<Path>, report: &CvReport) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv_writer(path)?;
    w.write_record([
        "config",
        "size",
        "spectral_radius",
        "leak",
        "input_scale",
        "sparsity",
        "ridge",
        "seed",
        "washout",
        "fold",
        "nrmse",
    ])?;
    for f in &report.folds {
        let c = &report.configs[f.config_index];
        w.write_record([
            f.config_index.to_string(),
            c.size.to_string(),
            c.spectral_radius.to_string(),
            c.leak.to_string(),
            c.input_scale.to_string(),
            c.sparsity.to_string(),
            c.ridge.to_string(),
            c.seed.to_string(),
            c.washout.to_string(),
            f.held_out.clone(),
            opt(f.nrmse),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

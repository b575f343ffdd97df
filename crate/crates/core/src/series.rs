//! Daily per-city series, keyword subsets, period summaries and heatmaps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use chrono::{Days, NaiveDate};

use crate::error::{Error, Result};
use crate::lexicon::Emotion;
use crate::sentiment::SentimentScore;

/// A post after scoring, with the fields the aggregations need.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPost {
    pub id: String,
    pub date: NaiveDate,
    pub city: String,
    pub sentiment: SentimentScore,
    /// Indexed by [`Emotion::index`].
    pub emotions: [f64; 10],
    pub like_count: u64,
    pub reply_count: u64,
    pub retweet_count: u64,
    /// Artifact-stripped text, used for keyword subsets.
    pub text: String,
}

impl ScoredPost {
    pub fn emotion(&self, e: Emotion) -> f64 {
        self.emotions[e.index()]
    }
}

/// Anything with text that keyword subsets can match against.
pub trait PostText {
    fn post_text(&self) -> &str;
}

impl PostText for ScoredPost {
    fn post_text(&self) -> &str {
        &self.text
    }
}

impl PostText for crate::text::RawPost {
    fn post_text(&self) -> &str {
        &self.text
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    CompoundMean,
    TweetCount,
    LikeTotal,
    ReplyTotal,
    RetweetTotal,
    Cases,
    /// Any other label, e.g. synthetic series.
    Other(String),
}

impl Feature {
    pub const FROM_POSTS: [Feature; 5] = [
        Feature::CompoundMean,
        Feature::TweetCount,
        Feature::LikeTotal,
        Feature::ReplyTotal,
        Feature::RetweetTotal,
    ];

    pub fn name(&self) -> &str {
        match self {
            Feature::CompoundMean => "compound_mean",
            Feature::TweetCount => "tweet_count",
            Feature::LikeTotal => "like_total",
            Feature::ReplyTotal => "reply_total",
            Feature::RetweetTotal => "retweet_total",
            Feature::Cases => "cases",
            Feature::Other(s) => s,
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "compound_mean" => Feature::CompoundMean,
            "tweet_count" => Feature::TweetCount,
            "like_total" => Feature::LikeTotal,
            "reply_total" => Feature::ReplyTotal,
            "retweet_total" => Feature::RetweetTotal,
            "cases" => Feature::Cases,
            "" => return Err(Error::Config("empty feature name".into())),
            other => Feature::Other(other.to_string()),
        })
    }
}

/// One feature for one city over a gap-free run of days.
#[derive(Debug, Clone, PartialEq)]
pub struct CitySeries {
    pub city: String,
    pub feature: Feature,
    pub start: NaiveDate,
    pub values: Vec<f64>,
    /// Days whose value was filled in rather than observed.
    pub imputed: Vec<bool>,
}

impl CitySeries {
    pub fn new(city: impl Into<String>, feature: Feature, start: NaiveDate, values: Vec<f64>) -> Self {
        let imputed = vec![false; values.len()];
        CitySeries {
            city: city.into(),
            feature,
            start,
            values,
            imputed,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn date(&self, i: usize) -> NaiveDate {
        self.start + Days::new(i as u64)
    }

    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        (0..self.len()).map(|i| self.date(i))
    }

    pub fn end(&self) -> Option<NaiveDate> {
        (!self.is_empty()).then(|| self.date(self.len() - 1))
    }
}

fn day_index(start: NaiveDate, date: NaiveDate) -> usize {
    (date - start).num_days() as usize
}

/// Order-independent sum.
fn stable_sum(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values.iter().sum()
}

/// Daily series of `feature` for `city`. The range defaults to the first
/// and last day the city has posts. Counts are 0 on days without posts;
/// the sentiment mean is carried forward from the previous day (or back
/// from the first observed day) and flagged as imputed.
pub fn aggregate_daily(
    posts: &[ScoredPost],
    city: &str,
    feature: &Feature,
    from: Option<NaiveDate>,
    to: Option<NaiveDate>,
) -> Result<CitySeries> {
    let city_posts: Vec<&ScoredPost> = posts.iter().filter(|p| p.city == city).collect();
    if city_posts.is_empty() {
        return Err(Error::UnknownCity(city.to_string()));
    }
    let start = from.unwrap_or_else(|| city_posts.iter().map(|p| p.date).min().unwrap());
    let end = to.unwrap_or_else(|| city_posts.iter().map(|p| p.date).max().unwrap());
    if start > end {
        return Err(Error::EmptyRange);
    }
    let days = day_index(start, end) + 1;
    let mut buckets: Vec<Vec<&ScoredPost>> = vec![Vec::new(); days];
    for p in city_posts.iter().filter(|p| p.date >= start && p.date <= end) {
        buckets[day_index(start, p.date)].push(p);
    }
    if buckets.iter().all(Vec::is_empty) {
        return Err(Error::EmptyRange);
    }
    let sum_of = |b: &[&ScoredPost], f: fn(&ScoredPost) -> u64| b.iter().map(|p| f(p)).sum::<u64>() as f64;
    let mut series = CitySeries::new(city, feature.clone(), start, vec![0.0; days]);
    match feature {
        Feature::CompoundMean => {
            let mut last: Option<f64> = None;
            for (i, b) in buckets.iter().enumerate() {
                if b.is_empty() {
                    series.imputed[i] = true;
                    series.values[i] = last.unwrap_or(f64::NAN);
                } else {
                    let mut vals: Vec<f64> = b.iter().map(|p| p.sentiment.compound).collect();
                    let mean = stable_sum(&mut vals) / vals.len() as f64;
                    series.values[i] = mean;
                    last = Some(mean);
                }
            }
            let first = series
                .values
                .iter()
                .copied()
                .find(|v| !v.is_nan())
                .expect("at least one observed day");
            for v in series.values.iter_mut().take_while(|v| v.is_nan()) {
                *v = first;
            }
        }
        Feature::TweetCount => {
            for (v, b) in series.values.iter_mut().zip(&buckets) {
                *v = b.len() as f64;
            }
        }
        Feature::LikeTotal => {
            for (v, b) in series.values.iter_mut().zip(&buckets) {
                *v = sum_of(b, |p| p.like_count);
            }
        }
        Feature::ReplyTotal => {
            for (v, b) in series.values.iter_mut().zip(&buckets) {
                *v = sum_of(b, |p| p.reply_count);
            }
        }
        Feature::RetweetTotal => {
            for (v, b) in series.values.iter_mut().zip(&buckets) {
                *v = sum_of(b, |p| p.retweet_count);
            }
        }
        Feature::Cases | Feature::Other(_) => {
            return Err(Error::Config(format!(
                "feature {feature} is not derived from posts; load it from a series file"
            )))
        }
    }
    Ok(series)
}

/// Posts whose text contains `keyword`, case-insensitively, in input order.
pub fn keyword_filter<'a, P: PostText>(posts: &'a [P], keyword: &str) -> Result<Vec<&'a P>> {
    let needle = keyword.trim().to_lowercase();
    if needle.is_empty() {
        return Err(Error::Config("keyword must be nonempty".into()));
    }
    Ok(posts
        .iter()
        .filter(|p| p.post_text().to_lowercase().contains(&needle))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Period {
    pub label: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl Period {
    pub fn contains(&self, date: NaiveDate) -> bool {
        date >= self.start && date <= self.end
    }
}

/// Periods per city, with `*` as the fallback for cities without a section.
///
/// ```text
/// [*]
/// Period 1 = 2020-02-24 .. 2020-03-16
/// [Toronto]
/// Period 1 = 2020-02-24 .. 2020-03-23
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PeriodConfig {
    pub sections: BTreeMap<String, Vec<Period>>,
}

impl PeriodConfig {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, Vec<Period>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim().to_string();
                if name.is_empty() {
                    return Err(Error::parse(source, lineno, "empty section name"));
                }
                sections.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let section = current
                .as_ref()
                .ok_or_else(|| Error::parse(source, lineno, "period outside a [section]"))?;
            let (label, range) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(source, lineno, "expected label = start .. end"))?;
            let (a, b) = range
                .split_once("..")
                .ok_or_else(|| Error::parse(source, lineno, "expected start .. end"))?;
            let date = |s: &str| {
                NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
                    .map_err(|_| Error::parse(source, lineno, format!("bad ISO date {:?}", s.trim())))
            };
            let period = Period {
                label: label.trim().to_string(),
                start: date(a)?,
                end: date(b)?,
            };
            if period.label.is_empty() {
                return Err(Error::parse(source, lineno, "empty period label"));
            }
            if period.start > period.end {
                return Err(Error::parse(source, lineno, "period ends before it starts"));
            }
            let list = sections.get_mut(section).unwrap();
            if let Some(prev) = list.last() {
                if period.start <= prev.end {
                    return Err(Error::parse(source, lineno, "periods must be ordered and non-overlapping"));
                }
            }
            list.push(period);
        }
        Ok(PeriodConfig { sections })
    }

    pub fn periods_for(&self, city: &str) -> &[Period] {
        self.sections
            .get(city)
            .or_else(|| self.sections.get("*"))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSummary {
    pub city: String,
    pub period: String,
    pub n_tweets: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation; absent below two posts.
    pub sd: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodReport {
    pub summaries: Vec<PeriodSummary>,
    /// Posts per city that fell in no period.
    pub remainder: BTreeMap<String, usize>,
}

/// Count, mean and sample sd of post-level compound scores per city and period.
pub fn period_summary(posts: &[ScoredPost], config: &PeriodConfig) -> PeriodReport {
    let cities: BTreeSet<&str> = posts.iter().map(|p| p.city.as_str()).collect();
    let mut summaries = Vec::new();
    let mut remainder = BTreeMap::new();
    for city in cities {
        let periods = config.periods_for(city);
        let city_posts: Vec<&ScoredPost> = posts.iter().filter(|p| p.city == city).collect();
        let outside = city_posts
            .iter()
            .filter(|p| !periods.iter().any(|per| per.contains(p.date)))
            .count();
        remainder.insert(city.to_string(), outside);
        for period in periods {
            let mut vals: Vec<f64> = city_posts
                .iter()
                .filter(|p| period.contains(p.date))
                .map(|p| p.sentiment.compound)
                .collect();
            let n = vals.len();
            let mean = (n > 0).then(|| stable_sum(&mut vals) / n as f64);
            let sd = mean.filter(|_| n >= 2).map(|m| {
                let mut sq: Vec<f64> = vals.iter().map(|v| (v - m).powi(2)).collect();
                (stable_sum(&mut sq) / (n - 1) as f64).sqrt()
            });
            summaries.push(PeriodSummary {
                city: city.to_string(),
                period: period.label.clone(),
                n_tweets: n,
                mean,
                sd,
            });
        }
    }
    PeriodReport { summaries, remainder }
}

/// Cities by dates matrix of one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub feature: Feature,
    pub cities: Vec<String>,
    pub start: NaiveDate,
    pub days: usize,
    /// Row-major, one row per city.
    pub values: Vec<Vec<f64>>,
}

pub fn heatmap_matrix(series: &[CitySeries]) -> Result<Heatmap> {
    let first = series.first().ok_or(Error::MismatchedSeries)?;
    if series
        .iter()
        .any(|s| s.feature != first.feature || s.start != first.start || s.len() != first.len())
    {
        return Err(Error::MismatchedSeries);
    }
    Ok(Heatmap {
        feature: first.feature.clone(),
        cities: series.iter().map(|s| s.city.clone()).collect(),
        start: first.start,
        days: first.len(),
        values: series.iter().map(|s| s.values.clone()).collect(),
    })
}

const NEGATIVE_RGB: (f64, f64, f64) = (27.0, 120.0, 55.0);
const MIDPOINT_RGB: (f64, f64, f64) = (247.0, 247.0, 247.0);
const POSITIVE_RGB: (f64, f64, f64) = (230.0, 97.0, 1.0);

/// Diverging color centered at zero: green below, orange above.
pub fn diverging_color(value: f64, max_abs: f64) -> String {
    let t = if max_abs > 0.0 && value.is_finite() {
        (value / max_abs).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    let end = if t < 0.0 { NEGATIVE_RGB } else { POSITIVE_RGB };
    let w = t.abs();
    let mix = |a: f64, b: f64| (a + (b - a) * w).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(MIDPOINT_RGB.0, end.0),
        mix(MIDPOINT_RGB.1, end.1),
        mix(MIDPOINT_RGB.2, end.2)
    )
}

impl Heatmap {
    pub fn dates(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        (0..self.days).map(|i| self.start + Days::new(i as u64))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("city");
        for d in self.dates() {
            let _ = write!(out, ",{d}");
        }
        out.push('\n');
        for (city, row) in self.cities.iter().zip(&self.values) {
            out.push_str(&csv_field(city));
            for v in row {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_svg(&self) -> String {
        const CELL_W: usize = 6;
        const CELL_H: usize = 18;
        const LEFT: usize = 110;
        const TOP: usize = 24;
        let max_abs = self
            .values
            .iter()
            .flatten()
            .filter(|v| v.is_finite())
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let width = LEFT + CELL_W * self.days + 10;
        let height = TOP + CELL_H * self.cities.len() + 24;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(s, r#"<text x="{LEFT}" y="14">{}</text>"#, xml_escape(self.feature.name()));
        for (r, (city, row)) in self.cities.iter().zip(&self.values).enumerate() {
            let y = TOP + r * CELL_H;
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
                LEFT - 6,
                y + CELL_H - 5,
                xml_escape(city)
            );
            for (c, v) in row.iter().enumerate() {
                let _ = writeln!(
                    s,
                    r#"<rect x="{}" y="{y}" width="{CELL_W}" height="{CELL_H}" fill="{}"/>"#,
                    LEFT + c * CELL_W,
                    diverging_color(*v, max_abs)
                );
            }
        }
        if let (Some(first), Some(last)) = (self.dates().next(), self.dates().last()) {
            let y = TOP + CELL_H * self.cities.len() + 14;
            let _ = writeln!(s, r#"<text x="{LEFT}" y="{y}">{first}</text>"#);
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{y}" text-anchor="end">{last}</text>"#,
                LEFT + CELL_W * self.days
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

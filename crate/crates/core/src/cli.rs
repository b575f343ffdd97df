//! Command-line front end. Every subcommand resolves a [`RunConfig`] from an
//! optional TOML file plus flag and `ECHOCAUSAL_*` environment overrides,
//! prints it, and writes its outputs under the output directory.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use chrono::{Days, NaiveDate};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ccm::{analyze_pair, loo_cv_grid_search, GridSpec, LagGrid, UnitSeries};
use crate::error::{Error, Result};
use crate::esn::ReservoirConfig;
use crate::io;
use crate::lexicon::{bundled_stopwords, parse_wordlist, EmotionLexicon, ValenceLexicon};
use crate::sentiment::Analyzer;
use crate::series::{
    aggregate_daily, heatmap_matrix, keyword_filter, period_summary, CitySeries, Feature, PeriodConfig,
    ScoredPost,
};
use crate::synth::{gen_ar1, gen_coupled_logistic, CoupledMapConfig};
use crate::text::{is_english, strip_artifacts, RawPost, Wordlist};

/// Share of malformed corpus lines above which a command fails.
pub const MALFORMED_LIMIT: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valence_lexicon: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emotion_lexicon: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stopwords: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub periods: Option<PathBuf>,
    pub out: PathBuf,
    pub cities: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<NaiveDate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub to: Option<NaiveDate>,
    pub keywords: Vec<String>,
    pub seed: u64,
    pub lags: LagGrid,
    /// Reservoir for the X -> Y direction.
    pub reservoir: ReservoirConfig,
    /// Reservoir for the Y -> X direction; defaults to `reservoir`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reservoir_yx: Option<ReservoirConfig>,
    pub grid: GridSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            valence_lexicon: None,
            emotion_lexicon: None,
            stopwords: None,
            periods: None,
            out: PathBuf::from("out"),
            cities: Vec::new(),
            from: None,
            to: None,
            keywords: Vec::new(),
            seed: 0,
            lags: LagGrid::default(),
            reservoir: ReservoirConfig::default(),
            reservoir_yx: None,
            grid: GridSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        // Relative paths in the file are taken relative to the file.
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.valence_lexicon,
            &mut cfg.emotion_lexicon,
            &mut cfg.stopwords,
            &mut cfg.periods,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Checks that referenced files exist and the numeric settings are valid.
    pub fn validate(&self) -> Result<()> {
        for p in [&self.valence_lexicon, &self.emotion_lexicon, &self.stopwords, &self.periods]
            .into_iter()
            .flatten()
        {
            if !p.is_file() {
                return Err(Error::Config(format!("file not found: {}", p.display())));
            }
        }
        if let (Some(a), Some(b)) = (self.from, self.to) {
            if a > b {
                return Err(Error::EmptyRange);
            }
        }
        LagGrid::new(self.lags.min, self.lags.max)?;
        self.reservoir.validate()?;
        if let Some(r) = &self.reservoir_yx {
            r.validate()?;
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_else(|e| format!("# unprintable config: {e}\n"))
    }

    pub fn analyzer(&self) -> Result<Analyzer> {
        let valence = match &self.valence_lexicon {
            Some(p) => ValenceLexicon::load(p)?,
            None => ValenceLexicon::bundled(),
        };
        let emotion = match &self.emotion_lexicon {
            Some(p) => EmotionLexicon::load(p)?,
            None => EmotionLexicon::bundled(),
        };
        let stopwords = match &self.stopwords {
            Some(p) => parse_wordlist(&std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?),
            None => bundled_stopwords(),
        };
        Ok(Analyzer::new(valence, emotion, stopwords))
    }

    /// Reservoirs for both directions, seeded from the run seed.
    pub fn reservoirs(&self) -> (ReservoirConfig, ReservoirConfig) {
        let xy = self.reservoir.with_seed(self.seed);
        let yx = self.reservoir_yx.unwrap_or(self.reservoir).with_seed(self.seed.wrapping_add(1));
        (xy, yx)
    }
}

#[derive(Debug, Parser)]
#[command(name = "echocausal", version, about = "Tweet sentiment series and echo-state cross-mapping")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// TOML run configuration.
    #[arg(long, global = true, env = "ECHOCAUSAL_CONFIG")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = "ECHOCAUSAL_SEED")]
    pub seed: Option<u64>,
    /// Restrict to these cities (repeatable or comma separated).
    #[arg(long, global = true, env = "ECHOCAUSAL_CITY", value_delimiter = ',')]
    pub city: Vec<String>,
    /// Keyword subsets (repeatable or comma separated).
    #[arg(long, global = true, env = "ECHOCAUSAL_KEYWORD", value_delimiter = ',')]
    pub keyword: Vec<String>,
    #[arg(long, global = true, env = "ECHOCAUSAL_FROM")]
    pub from: Option<NaiveDate>,
    #[arg(long, global = true, env = "ECHOCAUSAL_TO")]
    pub to: Option<NaiveDate>,
    /// Output directory.
    #[arg(long, global = true, env = "ECHOCAUSAL_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Strip URLs, hashtags and mentions and drop non-English posts.
    Clean { input: PathBuf },
    /// Score a cleaned corpus.
    Score { input: PathBuf },
    /// Daily series (and period summaries) from scored posts.
    Aggregate {
        input: PathBuf,
        /// Features to emit; defaults to all post-derived features.
        #[arg(long, value_delimiter = ',')]
        feature: Vec<Feature>,
    },
    /// City by date heatmap of one feature, as CSV and SVG.
    Heatmap {
        input: PathBuf,
        #[arg(long, default_value = "compound_mean")]
        feature: Feature,
    },
    /// Cross-map X and Y in both directions over a lag grid and classify.
    Ccm {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Leave-one-city-out grid search over reservoir settings.
    Gridsearch {
        #[command(flatten)]
        pair: PairArgs,
        /// Lag at which X predicts Y.
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        lag: i64,
    },
    /// Generate synthetic series with known coupling.
    Synth(SynthArgs),
    /// clean, score and aggregate in one go.
    Pipeline {
        input: PathBuf,
        #[arg(long, value_delimiter = ',')]
        feature: Vec<Feature>,
    },
}

#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    /// Series CSV files (date, city, feature, value).
    #[arg(required = true)]
    pub series: Vec<PathBuf>,
    #[arg(long)]
    pub x: Feature,
    #[arg(long)]
    pub y: Feature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    Coupled,
    Ar1,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value = "coupled")]
    pub kind: SynthKind,
    #[arg(long, default_value_t = 500)]
    pub len: usize,
    /// Number of independent units, written as separate cities.
    #[arg(long, default_value_t = 1)]
    pub units: usize,
    #[arg(long, default_value_t = 3.8)]
    pub r_x: f64,
    #[arg(long, default_value_t = 3.5)]
    pub r_y: f64,
    #[arg(long, default_value_t = 0.0)]
    pub c_xy: f64,
    #[arg(long, default_value_t = 0.1)]
    pub c_yx: f64,
    #[arg(long, default_value_t = 0)]
    pub delay: usize,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0.5)]
    pub phi: f64,
}

/// Merges file config, then flags (which clap has already merged with env).
pub fn resolve(global: &GlobalArgs) -> Result<RunConfig> {
    let mut cfg = match &global.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = global.seed {
        cfg.seed = s;
    }
    if !global.city.is_empty() {
        cfg.cities = global.city.clone();
    }
    if !global.keyword.is_empty() {
        cfg.keywords = global.keyword.clone();
    }
    if global.from.is_some() {
        cfg.from = global.from;
    }
    if global.to.is_some() {
        cfg.to = global.to;
    }
    if let Some(o) = &global.out {
        cfg.out = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(cli: Cli) -> Result<()> {
    let cfg = resolve(&cli.global)?;
    println!("# resolved config\n{}# seed = {}", cfg.to_toml(), cfg.seed);
    match cli.command {
        Command::Clean { input } => cmd_clean(&cfg, &cfg.analyzer()?, &input).map(|_| ()),
        Command::Score { input } => cmd_score(&cfg, &input).map(|_| ()),
        Command::Aggregate { input, feature } => {
            let posts = io::read_scored(&input)?;
            cmd_aggregate(&cfg, &posts, &feature).map(|_| ())
        }
        Command::Heatmap { input, feature } => cmd_heatmap(&cfg, &input, &feature),
        Command::Ccm { pair } => cmd_ccm(&cfg, &pair),
        Command::Gridsearch { pair, lag } => cmd_gridsearch(&cfg, &pair, lag),
        Command::Synth(args) => cmd_synth(&cfg, &args),
        Command::Pipeline { input, feature } => cmd_pipeline(&cfg, &input, &feature),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CleanReport {
    pub lines: usize,
    pub malformed: usize,
    /// Posts whose text changed when URLs, hashtags and mentions were stripped.
    pub artifacts_stripped: usize,
    pub non_english_removed: usize,
    /// Stopword tokens in the kept posts, dropped before emotion counting.
    pub stopword_tokens: usize,
    pub kept: usize,
}

impl CleanReport {
    pub fn to_csv(&self) -> String {
        format!(
            "rule,count\nlines_read,{}\nmalformed,{}\nrule1_artifacts_stripped,{}\nrule2_non_english_removed,{}\nrule3_stopword_tokens,{}\nkept,{}\n",
            self.lines, self.malformed, self.artifacts_stripped, self.non_english_removed, self.stopword_tokens, self.kept
        )
    }
}

/// Applies the cleaning rules in order: strip artifacts, then the language
/// filter on the stripped text.
pub fn clean_posts(posts: &[RawPost], analyzer: &Analyzer) -> (Vec<RawPost>, CleanReport) {
    let wordlist = Wordlist::from_lexicons(&analyzer.valence, &analyzer.emotion, analyzer.tokenizer.stopwords());
    let mut report = CleanReport::default();
    let mut kept = Vec::new();
    for p in posts {
        let text = strip_artifacts(&p.text);
        if text != p.text {
            report.artifacts_stripped += 1;
        }
        let post = RawPost { text, ..p.clone() };
        if !is_english(&post, &wordlist) {
            report.non_english_removed += 1;
            continue;
        }
        report.stopword_tokens += analyzer.doc(&post.text, &post.id).tokens.iter().filter(|t| t.is_stopword).count();
        kept.push(post);
    }
    report.kept = kept.len();
    (kept, report)
}

fn read_checked_corpus(path: &Path) -> Result<io::Corpus> {
    let corpus = io::read_corpus(path)?;
    for (line, msg) in &corpus.errors {
        log::warn!("{}:{line}: skipped malformed line: {msg}", path.display());
    }
    Ok(corpus)
}

fn malformed_check(path: &Path, corpus: &io::Corpus) -> Result<()> {
    if corpus.malformed_fraction() > MALFORMED_LIMIT {
        return Err(Error::Config(format!(
            "{}: {} of {} lines malformed (limit {}%)",
            path.display(),
            corpus.malformed,
            corpus.lines,
            MALFORMED_LIMIT * 100.0
        )));
    }
    Ok(())
}

/// Writes `clean.jsonl` and `clean_report.csv`.
pub fn cmd_clean(cfg: &RunConfig, analyzer: &Analyzer, input: &Path) -> Result<Vec<RawPost>> {
    let corpus = read_checked_corpus(input)?;
    let (kept, mut report) = clean_posts(&corpus.posts, analyzer);
    report.lines = corpus.lines;
    report.malformed = corpus.malformed;
    let mut buf = Vec::new();
    io::write_corpus(&mut buf, &kept)?;
    io::write_text(cfg.out.join("clean.jsonl"), std::str::from_utf8(&buf).expect("json is utf-8"))?;
    io::write_text(cfg.out.join("clean_report.csv"), &report.to_csv())?;
    print!("{}", report.to_csv());
    malformed_check(input, &corpus)?;
    Ok(kept)
}

pub fn score_posts(posts: &[RawPost], analyzer: &Analyzer) -> Vec<ScoredPost> {
    posts
        .par_iter()
        .map(|p| {
            let doc = analyzer.doc(&p.text, &p.id);
            let (sentiment, emotions) = analyzer.score_doc(&doc);
            ScoredPost {
                id: p.id.clone(),
                date: p.date,
                city: p.city.clone(),
                sentiment,
                emotions: emotions.frequencies,
                like_count: p.like_count,
                reply_count: p.reply_count,
                retweet_count: p.retweet_count,
                text: p.text.clone(),
            }
        })
        .collect()
}

fn write_scored_file(cfg: &RunConfig, scored: &[ScoredPost]) -> Result<()> {
    let mut buf = Vec::new();
    io::write_scored(&mut buf, scored)?;
    io::write_text(cfg.out.join("scored.csv"), std::str::from_utf8(&buf).expect("csv is utf-8"))
}

/// Writes `scored.csv`.
pub fn cmd_score(cfg: &RunConfig, input: &Path) -> Result<Vec<ScoredPost>> {
    let corpus = read_checked_corpus(input)?;
    malformed_check(input, &corpus)?;
    let scored = score_posts(&corpus.posts, &cfg.analyzer()?);
    write_scored_file(cfg, &scored)?;
    println!("scored {} posts", scored.len());
    Ok(scored)
}

fn selected_cities(cfg: &RunConfig, posts: &[ScoredPost]) -> Vec<String> {
    if cfg.cities.is_empty() {
        let all: BTreeSet<&str> = posts.iter().map(|p| p.city.as_str()).collect();
        all.into_iter().map(String::from).collect()
    } else {
        cfg.cities.clone()
    }
}

/// The configured range, or the span of the selected cities' posts, so every
/// city's series covers the same days.
fn common_range(cfg: &RunConfig, posts: &[ScoredPost], cities: &[String]) -> Result<(NaiveDate, NaiveDate)> {
    let dates = || posts.iter().filter(|p| cities.contains(&p.city)).map(|p| p.date);
    let from = cfg.from.or_else(|| dates().min());
    let to = cfg.to.or_else(|| dates().max());
    match (from, to) {
        (Some(a), Some(b)) if a <= b => Ok((a, b)),
        _ => match cities.first() {
            Some(c) if !posts.iter().any(|p| &p.city == c) => Err(Error::UnknownCity(c.clone())),
            _ => Err(Error::EmptyRange),
        },
    }
}

/// Writes `series.csv` (plus `periods.csv` when periods are configured).
/// Keyword subsets get the feature name suffixed with `@keyword`.
pub fn cmd_aggregate(cfg: &RunConfig, posts: &[ScoredPost], features: &[Feature]) -> Result<Vec<CitySeries>> {
    let features: Vec<Feature> = if features.is_empty() {
        Feature::FROM_POSTS.to_vec()
    } else {
        features.to_vec()
    };
    let cities = selected_cities(cfg, posts);
    let (from, to) = common_range(cfg, posts, &cities)?;
    let mut out = Vec::new();
    for city in &cities {
        for f in &features {
            out.push(aggregate_daily(posts, city, f, Some(from), Some(to))?);
        }
    }
    for kw in &cfg.keywords {
        let subset: Vec<ScoredPost> = keyword_filter(posts, kw)?.into_iter().cloned().collect();
        for city in &cities {
            if !subset.iter().any(|p| &p.city == city) {
                log::warn!("no posts mention {kw:?} in {city}");
                continue;
            }
            for f in &features {
                let mut s = aggregate_daily(&subset, city, f, Some(from), Some(to))?;
                s.feature = Feature::Other(format!("{f}@{kw}"));
                out.push(s);
            }
        }
    }
    io::write_series(cfg.out.join("series.csv"), &out)?;
    if let Some(p) = &cfg.periods {
        let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
        let periods = PeriodConfig::parse(&text, &p.display().to_string())?;
        let in_cities: Vec<ScoredPost> = posts.iter().filter(|p| cities.contains(&p.city)).cloned().collect();
        io::write_periods(cfg.out.join("periods.csv"), &period_summary(&in_cities, &periods))?;
    }
    println!("{} series over {from} .. {to}", out.len());
    Ok(out)
}

/// Writes `heatmap_<feature>.csv` and `.svg`.
pub fn cmd_heatmap(cfg: &RunConfig, input: &Path, feature: &Feature) -> Result<()> {
    let posts = io::read_scored(input)?;
    let cities = selected_cities(cfg, &posts);
    let (from, to) = common_range(cfg, &posts, &cities)?;
    let series = cities
        .iter()
        .map(|c| aggregate_daily(&posts, c, feature, Some(from), Some(to)))
        .collect::<Result<Vec<_>>>()?;
    let h = heatmap_matrix(&series)?;
    io::write_text(cfg.out.join(format!("heatmap_{feature}.csv")), &h.to_csv())?;
    io::write_text(cfg.out.join(format!("heatmap_{feature}.svg")), &h.to_svg())?;
    println!("heatmap {} cities x {} days", h.cities.len(), h.days);
    Ok(())
}

/// Pairs X and Y per city over their overlapping days.
pub fn load_units(cfg: &RunConfig, files: &[PathBuf], x: &Feature, y: &Feature) -> Result<Vec<UnitSeries>> {
    let mut by_key: BTreeMap<(String, Feature), CitySeries> = BTreeMap::new();
    for f in files {
        for s in io::read_series(f)? {
            by_key.insert((s.city.clone(), s.feature.clone()), s);
        }
    }
    let cities: BTreeSet<String> = by_key.keys().map(|(c, _)| c.clone()).collect();
    let mut units = Vec::new();
    for city in cities {
        if !cfg.cities.is_empty() && !cfg.cities.contains(&city) {
            continue;
        }
        let (Some(sx), Some(sy)) = (by_key.get(&(city.clone(), x.clone())), by_key.get(&(city.clone(), y.clone())))
        else {
            continue;
        };
        let mut start = sx.start.max(sy.start);
        let mut end = sx.end().unwrap().min(sy.end().unwrap());
        if let Some(f) = cfg.from {
            start = start.max(f);
        }
        if let Some(t) = cfg.to {
            end = end.min(t);
        }
        if start > end {
            log::warn!("{city}: {x} and {y} do not overlap");
            continue;
        }
        let slice = |s: &CitySeries| {
            let a = (start - s.start).num_days() as usize;
            let b = (end - s.start).num_days() as usize;
            s.values[a..=b].to_vec()
        };
        units.push(UnitSeries::new(city, slice(sx), slice(sy))?);
    }
    if units.is_empty() {
        return Err(Error::Config(format!("no city has both {x} and {y}")));
    }
    Ok(units)
}

/// Writes `ccm_curves.csv` and `ccm_verdict.txt`.
pub fn cmd_ccm(cfg: &RunConfig, pair: &PairArgs) -> Result<()> {
    let units = load_units(cfg, &pair.series, &pair.x, &pair.y)?;
    let (xy, yx) = cfg.reservoirs();
    let a = analyze_pair(&units, &xy, &yx, &cfg.lags, pair.x.name(), pair.y.name())?;
    io::write_curves(cfg.out.join("ccm_curves.csv"), &[&a.xy, &a.yx])?;
    let text = io::verdict_text(&a.verdict, &a.xy, &a.yx);
    io::write_text(cfg.out.join("ccm_verdict.txt"), &text)?;
    print!("{text}");
    Ok(())
}

/// Writes `grid_report.csv` and `grid_winner.toml`.
pub fn cmd_gridsearch(cfg: &RunConfig, pair: &PairArgs, lag: i64) -> Result<()> {
    let units = load_units(cfg, &pair.series, &pair.x, &pair.y)?;
    let grid: Vec<ReservoirConfig> = GridSpec {
        seed: cfg.seed,
        ..cfg.grid.clone()
    }
    .expand();
    let report = loo_cv_grid_search(&units, &grid, lag)?;
    io::write_grid_report(cfg.out.join("grid_report.csv"), &report)?;
    let winner = report
        .winner_config()
        .ok_or_else(|| Error::Config("every grid cell failed".into()))?;
    let toml = toml::to_string(winner).map_err(|e| Error::Config(e.to_string()))?;
    let score = report.scores[report.winner.unwrap()].unwrap();
    io::write_text(cfg.out.join("grid_winner.toml"), &format!("# mean held-out NRMSE {score}\n{toml}"))?;
    println!("winner (mean NRMSE {score}):\n{toml}");
    Ok(())
}

pub fn synth_series(cfg: &RunConfig, args: &SynthArgs) -> Result<Vec<CitySeries>> {
    let start = NaiveDate::from_ymd_opt(2020, 1, 1).expect("valid date");
    let mut out = Vec::new();
    for k in 0..args.units {
        let seed = cfg.seed.wrapping_add(k as u64);
        let (x, y) = match args.kind {
            SynthKind::Coupled => gen_coupled_logistic(&CoupledMapConfig {
                r_x: args.r_x,
                r_y: args.r_y,
                c_xy: args.c_xy,
                c_yx: args.c_yx,
                delay: args.delay,
                len: args.len,
                noise_sd: args.noise,
                seed,
            })?,
            SynthKind::Ar1 => (
                gen_ar1(args.phi, args.len, seed.wrapping_mul(2))?,
                gen_ar1(args.phi, args.len, seed.wrapping_mul(2).wrapping_add(1))?,
            ),
        };
        let city = if args.units == 1 {
            "synthetic".to_string()
        } else {
            format!("unit{}", k + 1)
        };
        out.push(CitySeries::new(city.clone(), Feature::Other("x".into()), start, x));
        out.push(CitySeries::new(city, Feature::Other("y".into()), start, y));
    }
    Ok(out)
}

/// Writes `series.csv` with features `x` and `y`.
pub fn cmd_synth(cfg: &RunConfig, args: &SynthArgs) -> Result<()> {
    if args.units == 0 {
        return Err(Error::Config("--units must be positive".into()));
    }
    let series = synth_series(cfg, args)?;
    io::write_series(cfg.out.join("series.csv"), &series)?;
    let last = series[0].start + Days::new(args.len.saturating_sub(1) as u64);
    println!("{} units of {} days ({} .. {last})", args.units, args.len, series[0].start);
    Ok(())
}

/// Same files as running clean, score and aggregate one after another.
pub fn cmd_pipeline(cfg: &RunConfig, input: &Path, features: &[Feature]) -> Result<()> {
    let analyzer = cfg.analyzer()?;
    let kept = cmd_clean(cfg, &analyzer, input)?;
    let scored = score_posts(&kept, &analyzer);
    write_scored_file(cfg, &scored)?;
    cmd_aggregate(cfg, &scored, features)?;
    Ok(())
}

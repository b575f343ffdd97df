//! Lexicon-based polarity scoring with emphasis rules, and emotion profiles.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lexicon::{bundled_stopwords, Emotion, EmotionLexicon, ValenceLexicon};
use crate::text::{remove_stopwords, strip_artifacts, CleanDoc, Token, Tokenizer};

const NEGATORS: &[&str] = &[
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt", "ain't", "aren't",
    "can't", "couldn't", "daren't", "didn't", "doesn't", "dont", "hadnt", "hasnt", "havent",
    "isnt", "mightnt", "mustnt", "neither", "don't", "hadn't", "hasn't", "haven't", "isn't",
    "mightn't", "mustn't", "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing",
    "nowhere", "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent", "oughtn't", "shan't",
    "shouldn't", "uh-uh", "wasn't", "weren't", "without", "wont", "wouldnt", "won't", "wouldn't",
    "rarely", "seldom", "despite",
];

const BOOST_UP: &[&str] = &[
    "absolutely", "amazingly", "awfully", "completely", "considerable", "considerably",
    "decidedly", "deeply", "effing", "enormous", "enormously", "entirely", "especially",
    "exceptional", "exceptionally", "extreme", "extremely", "fabulously", "flipping", "flippin",
    "frackin", "fracking", "fricking", "frickin", "frigging", "friggin", "fully", "fuckin",
    "fucking", "fuggin", "fugging", "greatly", "hella", "highly", "hugely", "incredible",
    "incredibly", "intensely", "major", "majorly", "more", "most", "particularly", "purely",
    "quite", "really", "remarkably", "so", "substantially", "thoroughly", "total", "totally",
    "tremendous", "tremendously", "uber", "unbelievably", "unusually", "utter", "utterly", "very",
];

const BOOST_DOWN: &[&str] = &[
    "almost", "barely", "hardly", "kinda", "kindof", "kind-of", "less", "little", "marginal",
    "marginally", "occasional", "occasionally", "partly", "scarce", "scarcely", "slight",
    "slightly", "somewhat", "sorta", "sortof", "sort-of",
];

/// Negators, intensity modifiers and the constants of the emphasis rules.
#[derive(Debug, Clone, PartialEq)]
pub struct ModifierTables {
    pub negators: HashSet<String>,
    pub boosters: HashMap<String, f64>,
    pub caps_boost: f64,
    pub exclamation_step: f64,
    pub question_boost: f64,
    pub negation_factor: f64,
    pub norm_alpha: f64,
    /// How many preceding tokens are searched for negators and boosters.
    pub window: usize,
}

impl Default for ModifierTables {
    fn default() -> Self {
        const BOOSTER: f64 = 0.293;
        let boosters = BOOST_UP
            .iter()
            .map(|w| (w.to_string(), BOOSTER))
            .chain(BOOST_DOWN.iter().map(|w| (w.to_string(), -BOOSTER)))
            .collect();
        ModifierTables {
            negators: NEGATORS.iter().map(|w| w.to_string()).collect(),
            boosters,
            caps_boost: 0.733,
            exclamation_step: 0.292,
            question_boost: 0.18,
            negation_factor: -0.74,
            norm_alpha: 15.0,
            window: 3,
        }
    }
}

impl ModifierTables {
    pub fn validate(&self) -> Result<()> {
        if !(self.negation_factor > -1.0 && self.negation_factor < 0.0) {
            return Err(Error::Config("negation_factor must lie in (-1, 0)".into()));
        }
        if !(self.norm_alpha > 0.0) {
            return Err(Error::Config("norm_alpha must be positive".into()));
        }
        Ok(())
    }

    pub fn is_negator(&self, token: &Token) -> bool {
        self.negators.contains(&token.normalized) || token.normalized.ends_with("n't")
    }

    pub fn booster(&self, token: &Token) -> Option<f64> {
        self.boosters.get(&token.normalized).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentScore {
    pub negative: f64,
    pub neutral: f64,
    pub positive: f64,
    pub compound: f64,
}

impl SentimentScore {
    pub const NEUTRAL: SentimentScore = SentimentScore {
        negative: 0.0,
        neutral: 1.0,
        positive: 0.0,
        compound: 0.0,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmotionProfile {
    /// Indexed by [`Emotion::index`].
    pub counts: [u32; 10],
    pub frequencies: [f64; 10],
    pub word_total: usize,
    /// Set when the document had no words to count.
    pub degenerate: bool,
}

impl EmotionProfile {
    pub fn count(&self, e: Emotion) -> u32 {
        self.counts[e.index()]
    }

    pub fn frequency(&self, e: Emotion) -> f64 {
        self.frequencies[e.index()]
    }
}

fn signum(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Adjusted valence per token; `None` for tokens without a lexicon hit and
/// for booster words, which only modify their neighbours.
pub fn token_valences(doc: &CleanDoc, lex: &ValenceLexicon, mods: &ModifierTables) -> Vec<Option<f64>> {
    let tokens = &doc.tokens;
    tokens
        .iter()
        .enumerate()
        .map(|(i, token)| {
            if mods.booster(token).is_some() {
                return None;
            }
            let mut v = lex.lookup(&token.normalized)?;
            let sign = signum(v);
            if token.all_caps {
                v += mods.caps_boost * sign;
            }
            let preceding = &tokens[i.saturating_sub(mods.window)..i];
            for prev in preceding {
                if let Some(inc) = mods.booster(prev) {
                    v += inc * sign;
                }
            }
            if preceding.iter().any(|p| mods.is_negator(p)) {
                v *= mods.negation_factor;
            }
            Some(v)
        })
        .collect()
}

/// Adjusted valences of the lexicon-matched tokens, in text order.
pub fn word_valences(doc: &CleanDoc, lex: &ValenceLexicon, mods: &ModifierTables) -> Vec<f64> {
    token_valences(doc, lex, mods).into_iter().flatten().collect()
}

/// Punctuation emphasis added in the direction of the raw sum.
fn emphasis(sum: f64, doc: &CleanDoc, mods: &ModifierTables) -> f64 {
    let mut amp = mods.exclamation_step * f64::from(doc.trailing_exclamations.min(3));
    if doc.trailing_double_question {
        amp += mods.question_boost;
    }
    amp * signum(sum)
}

/// Normalizes a raw valence sum into `(-1, 1)` via `s / sqrt(s^2 + alpha)`.
pub fn normalize(sum: f64, alpha: f64) -> f64 {
    if sum.is_infinite() {
        return signum(sum);
    }
    let out = sum / (sum * sum + alpha).sqrt();
    out.clamp(-1.0, 1.0)
}

pub fn compound_score(valences: &[f64], doc: &CleanDoc, mods: &ModifierTables) -> f64 {
    let sum: f64 = valences.iter().sum();
    normalize(sum + emphasis(sum, doc, mods), mods.norm_alpha)
}

pub fn polarity_proportions(doc: &CleanDoc, lex: &ValenceLexicon, mods: &ModifierTables) -> SentimentScore {
    if doc.is_empty() {
        return SentimentScore::NEUTRAL;
    }
    let per_token = token_valences(doc, lex, mods);
    let mut pos = 0.0;
    let mut neg = 0.0;
    let mut neu = 0.0;
    for v in &per_token {
        match *v {
            Some(v) if v > 0.0 => pos += v + 1.0,
            Some(v) if v < 0.0 => neg += v - 1.0,
            _ => neu += 1.0,
        }
    }
    let z = pos + neg.abs() + neu;
    let valences: Vec<f64> = per_token.into_iter().flatten().collect();
    SentimentScore {
        negative: neg.abs() / z,
        neutral: neu / z,
        positive: pos / z,
        compound: compound_score(&valences, doc, mods),
    }
}

/// Sum of raw matched valences divided by the number of tokens.
pub fn mean_word_score(doc: &CleanDoc, lex: &ValenceLexicon) -> Result<f64> {
    if doc.is_empty() {
        return Err(Error::EmptyDocument);
    }
    let sum: f64 = doc.tokens.iter().filter_map(|t| lex.lookup(&t.normalized)).sum();
    Ok(sum / doc.len() as f64)
}

/// Emotion counts over a stopword-free document, and counts divided by its
/// token count.
pub fn emotion_profile(doc: &CleanDoc, lex: &EmotionLexicon) -> EmotionProfile {
    let mut counts = [0u32; 10];
    for set in doc.tokens.iter().filter_map(|t| lex.lookup(&t.normalized)) {
        for e in set.iter() {
            counts[e.index()] += 1;
        }
    }
    let word_total = doc.len();
    let mut frequencies = [0.0; 10];
    if word_total > 0 {
        for (f, c) in frequencies.iter_mut().zip(counts) {
            *f = f64::from(c) / word_total as f64;
        }
    }
    EmotionProfile {
        counts,
        frequencies,
        word_total,
        degenerate: word_total == 0,
    }
}

/// Text-to-scores front end bundling the lexicons, tokenizer and modifiers.
#[derive(Debug, Clone)]
pub struct Analyzer {
    pub valence: ValenceLexicon,
    pub emotion: EmotionLexicon,
    pub tokenizer: Tokenizer,
    pub mods: ModifierTables,
}

impl Analyzer {
    pub fn new(valence: ValenceLexicon, emotion: EmotionLexicon, stopwords: BTreeSet<String>) -> Self {
        let tokenizer = Tokenizer::new(&valence, stopwords);
        Analyzer {
            valence,
            emotion,
            tokenizer,
            mods: ModifierTables::default(),
        }
    }

    pub fn bundled() -> Self {
        Self::new(
            ValenceLexicon::bundled(),
            EmotionLexicon::bundled(),
            bundled_stopwords(),
        )
    }

    /// Tokenizes already artifact-stripped text.
    pub fn doc(&self, text: &str, id: &str) -> CleanDoc {
        self.tokenizer.tokenize(text, id)
    }

    /// Polarity on the full token stream, emotions on the stopword-free one.
    pub fn score_doc(&self, doc: &CleanDoc) -> (SentimentScore, EmotionProfile) {
        let polarity = polarity_proportions(doc, &self.valence, &self.mods);
        let content = remove_stopwords(doc, self.tokenizer.stopwords());
        (polarity, emotion_profile(&content, &self.emotion))
    }

    /// Strips artifacts, tokenizes and scores raw text.
    pub fn score_text(&self, text: &str) -> (SentimentScore, EmotionProfile) {
        self.score_doc(&self.doc(&strip_artifacts(text), ""))
    }
}

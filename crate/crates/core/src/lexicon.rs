//! Immutable valence and emotion lexicons.
//!
//! The valence lexicon is a tab-separated file whose first column is the
//! token and whose second column is its mean valence in `[-4, 4]`; extra
//! columns are ignored. The emotion lexicon is a tab-separated file of
//! `word<TAB>emotion<TAB>flag` triples, where a flag of `1` attaches the
//! emotion to the word.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use log::warn;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

const BUNDLED_VALENCE: &str = include_str!("../data/vader_lexicon.txt");
const BUNDLED_EMOTION: &str = include_str!("../data/nrc_emotion_lexicon.txt");
const BUNDLED_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

/// Case-folds a token unless it has no letters at all, in which case it is
/// returned verbatim (emoticons such as `:-)` or `</3`).
pub fn fold_token(token: &str) -> String {
    if token.chars().any(char::is_alphabetic) {
        token.to_lowercase()
    } else {
        token.to_string()
    }
}

/// A token made only of symbols, with at least one non-alphanumeric character.
pub fn is_symbolic(token: &str) -> bool {
    !token.is_empty()
        && !token.chars().any(char::is_alphabetic)
        && token.chars().any(|c| !c.is_alphanumeric())
}

/// Where a lexicon came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub source: String,
    /// Hex SHA-256 of the source bytes.
    pub checksum: String,
}

impl Provenance {
    fn new(source: &str, bytes: &[u8]) -> Self {
        Provenance {
            source: source.to_string(),
            checksum: hex::encode(Sha256::digest(bytes)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValenceLexicon {
    entries: HashMap<String, f64>,
    provenance: Provenance,
    duplicates: usize,
}

impl ValenceLexicon {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// The Vader lexicon shipped with this crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_VALENCE, "<bundled vader_lexicon.txt>")
            .expect("bundled valence lexicon is valid")
    }

    /// Parses lexicon text; `source` is used for provenance and error messages.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut entries = HashMap::new();
        let mut duplicates = 0;
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let token = fields.next().unwrap_or("").trim();
            let Some(raw_valence) = fields.next() else {
                return Err(Error::parse(source, lineno, "expected at least 2 tab-separated fields"));
            };
            if token.is_empty() {
                return Err(Error::parse(source, lineno, "empty token"));
            }
            let valence: f64 = raw_valence.trim().parse().map_err(|_| {
                Error::parse(source, lineno, format!("non-numeric valence {raw_valence:?}"))
            })?;
            if !valence.is_finite() || !(-4.0..=4.0).contains(&valence) {
                return Err(Error::parse(
                    source,
                    lineno,
                    format!("valence {valence} outside [-4, 4]"),
                ));
            }
            if entries.insert(fold_token(token), valence).is_some() {
                duplicates += 1;
            }
        }
        if duplicates > 0 {
            warn!("{source}: {duplicates} duplicate token rows, last occurrence kept");
        }
        Ok(ValenceLexicon {
            entries,
            provenance: Provenance::new(source, text.as_bytes()),
            duplicates,
        })
    }

    /// Case-folded exact lookup.
    pub fn lookup(&self, token: &str) -> Option<f64> {
        self.entries.get(&fold_token(token)).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.entries.contains_key(&fold_token(token))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Number of rows that overwrote an earlier row for the same token.
    pub fn duplicate_rows(&self) -> usize {
        self.duplicates
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Symbol-only entries, longest first, used by the tokenizer to keep
    /// emoticons intact.
    pub fn emoticons(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .entries
            .keys()
            .filter(|t| is_symbolic(t))
            .cloned()
            .collect();
        out.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then(a.cmp(b)));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Emotion {
    Anticipation,
    Positive,
    Negative,
    Sadness,
    Disgust,
    Joy,
    Anger,
    Surprise,
    Fear,
    Trust,
}

impl Emotion {
    pub const ALL: [Emotion; 10] = [
        Emotion::Anticipation,
        Emotion::Positive,
        Emotion::Negative,
        Emotion::Sadness,
        Emotion::Disgust,
        Emotion::Joy,
        Emotion::Anger,
        Emotion::Surprise,
        Emotion::Fear,
        Emotion::Trust,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Emotion::Anticipation => "anticipation",
            Emotion::Positive => "positive",
            Emotion::Negative => "negative",
            Emotion::Sadness => "sadness",
            Emotion::Disgust => "disgust",
            Emotion::Joy => "joy",
            Emotion::Anger => "anger",
            Emotion::Surprise => "surprise",
            Emotion::Fear => "fear",
            Emotion::Trust => "trust",
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Emotion {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Emotion::ALL
            .into_iter()
            .find(|e| e.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown emotion label {s:?}"))
    }
}

/// A set of emotion categories, one bit per category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct EmotionSet(u16);

impl EmotionSet {
    pub fn insert(&mut self, e: Emotion) {
        self.0 |= 1 << e.index();
    }

    pub fn remove(&mut self, e: Emotion) {
        self.0 &= !(1 << e.index());
    }

    pub fn contains(self, e: Emotion) -> bool {
        self.0 & (1 << e.index()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = Emotion> {
        Emotion::ALL.into_iter().filter(move |e| self.contains(*e))
    }
}

impl FromIterator<Emotion> for EmotionSet {
    fn from_iter<I: IntoIterator<Item = Emotion>>(iter: I) -> Self {
        let mut set = EmotionSet::default();
        for e in iter {
            set.insert(e);
        }
        set
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmotionLexicon {
    entries: HashMap<String, EmotionSet>,
    provenance: Provenance,
}

impl EmotionLexicon {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// The NRC word-emotion lexicon shipped with this crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_EMOTION, "<bundled nrc_emotion_lexicon.txt>")
            .expect("bundled emotion lexicon is valid")
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut entries: HashMap<String, EmotionSet> = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() < 3 {
                return Err(Error::parse(source, lineno, "expected word<TAB>emotion<TAB>flag"));
            }
            let token = fields[0].trim();
            if token.is_empty() {
                return Err(Error::parse(source, lineno, "empty token"));
            }
            let emotion: Emotion = fields[1]
                .parse()
                .map_err(|msg: String| Error::parse(source, lineno, msg))?;
            let set = entries.entry(fold_token(token)).or_default();
            match fields[2].trim() {
                "1" => set.insert(emotion),
                "0" => set.remove(emotion),
                other => {
                    return Err(Error::parse(source, lineno, format!("malformed flag {other:?}")))
                }
            }
        }
        entries.retain(|_, set| !set.is_empty());
        Ok(EmotionLexicon {
            entries,
            provenance: Provenance::new(source, text.as_bytes()),
        })
    }

    pub fn lookup(&self, token: &str) -> Option<EmotionSet> {
        self.entries.get(&fold_token(token)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// The bundled English stopword list.
pub fn bundled_stopwords() -> BTreeSet<String> {
    parse_wordlist(BUNDLED_STOPWORDS)
}

/// One word per line; blank lines and `#` comments skipped; case-folded.
pub fn parse_wordlist(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(fold_token)
        .collect()
}

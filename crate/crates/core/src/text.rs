//! Post cleaning and emphasis-aware tokenization.
//!
//! The pipeline order is fixed: [`strip_artifacts`], then the [`is_english`]
//! filter, then [`Tokenizer::tokenize`], then [`remove_stopwords`].
//! Punctuation emphasis is read off the text during tokenization, before
//! punctuation is dropped.

use std::collections::{BTreeSet, HashSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::lexicon::{fold_token, EmotionLexicon, ValenceLexicon};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawPost {
    pub id: String,
    #[serde(alias = "timestamp")]
    pub date: NaiveDate,
    pub city: String,
    pub text: String,
    #[serde(default)]
    pub like_count: u64,
    #[serde(default)]
    pub reply_count: u64,
    #[serde(default)]
    pub retweet_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub normalized: String,
    pub all_caps: bool,
    pub is_emoticon: bool,
    pub is_stopword: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CleanDoc {
    pub tokens: Vec<Token>,
    /// Longest run of `!` in the text.
    pub trailing_exclamations: u32,
    /// Whether the text contains a run of two or more `?`.
    pub trailing_double_question: bool,
    pub source_id: String,
}

impl CleanDoc {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Space-joined surfaces.
    pub fn text(&self) -> String {
        self.tokens
            .iter()
            .map(|t| t.surface.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn is_url(word: &str) -> bool {
    let lower = word.to_ascii_lowercase();
    lower.contains("://") || lower.starts_with("www.") || lower.contains("t.co/")
}

fn is_handle_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Removes URLs, `#` symbols (keeping the tagged word), and `@` mentions
/// (symbol and handle). Whitespace is collapsed to single spaces.
pub fn strip_artifacts(text: &str) -> String {
    let mut words = Vec::new();
    for word in text.split_whitespace() {
        if is_url(word) {
            continue;
        }
        let mut out = String::with_capacity(word.len());
        let mut chars = word.chars().peekable();
        while let Some(c) = chars.next() {
            match c {
                '#' => {}
                '@' => {
                    while chars.peek().is_some_and(|c| is_handle_char(*c)) {
                        chars.next();
                    }
                }
                _ => out.push(c),
            }
        }
        if !out.is_empty() {
            words.push(out);
        }
    }
    words.join(" ")
}

/// A set of known English words used by the language heuristic.
pub trait Vocabulary {
    fn contains_word(&self, word: &str) -> bool;
}

impl Vocabulary for ValenceLexicon {
    fn contains_word(&self, word: &str) -> bool {
        self.contains(word)
    }
}

impl Vocabulary for EmotionLexicon {
    fn contains_word(&self, word: &str) -> bool {
        self.lookup(word).is_some()
    }
}

impl Vocabulary for HashSet<String> {
    fn contains_word(&self, word: &str) -> bool {
        self.contains(&fold_token(word))
    }
}

impl Vocabulary for BTreeSet<String> {
    fn contains_word(&self, word: &str) -> bool {
        self.contains(&fold_token(word))
    }
}

/// Reference word list assembled from the lexicons plus a stopword list.
#[derive(Debug, Clone, Default)]
pub struct Wordlist(HashSet<String>);

impl Wordlist {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Wordlist(words.into_iter().map(|w| fold_token(w.as_ref())).collect())
    }

    pub fn from_lexicons(
        valence: &ValenceLexicon,
        emotion: &EmotionLexicon,
        stopwords: &BTreeSet<String>,
    ) -> Self {
        Wordlist::new(
            valence
                .tokens()
                .chain(emotion.tokens())
                .chain(stopwords.iter().map(String::as_str)),
        )
    }
}

impl Vocabulary for Wordlist {
    fn contains_word(&self, word: &str) -> bool {
        self.0.contains(&fold_token(word))
    }
}

/// Share of alphabetic words required by the untagged-language heuristic.
pub const ENGLISH_RATIO: f64 = 0.4;

/// Honors the post's language tag. An untagged post with alphabetic words is
/// English when at least 40% of them are in `wordlist` or when trigram
/// detection picks English; the small lexicon vocabulary misses plenty of
/// everyday words, and trigrams alone misfire on very short posts.
pub fn is_english(post: &RawPost, wordlist: &dyn Vocabulary) -> bool {
    match post.lang.as_deref().map(str::trim) {
        Some(tag) if !tag.is_empty() => tag.eq_ignore_ascii_case("en"),
        _ => match english_ratio(&post.text, wordlist) {
            None => false,
            Some(r) => r >= ENGLISH_RATIO || whatlang::detect_lang(&post.text) == Some(whatlang::Lang::Eng),
        },
    }
}

/// Fraction of alphabetic words found in `wordlist`; `None` when the text has
/// no alphabetic words.
pub fn english_ratio(text: &str, wordlist: &dyn Vocabulary) -> Option<f64> {
    let words: Vec<&str> = text
        .split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphabetic()))
        .filter(|w| !w.is_empty() && w.chars().all(|c| c.is_alphabetic() || c == '\''))
        .collect();
    if words.is_empty() {
        return None;
    }
    let hits = words.iter().filter(|w| wordlist.contains_word(w)).count();
    Some(hits as f64 / words.len() as f64)
}

fn all_caps(surface: &str) -> bool {
    let letters: Vec<char> = surface.chars().filter(|c| c.is_alphabetic()).collect();
    letters.len() >= 2 && letters.iter().all(|c| c.is_uppercase())
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Runs of `!` and `?` in `text`: (longest `!` run, any `??`).
fn punctuation_emphasis(text: &str) -> (u32, bool) {
    let mut max_bang = 0;
    let mut bang = 0;
    let mut question = 0;
    let mut double_q = false;
    for c in text.chars() {
        if c == '!' {
            bang += 1;
            max_bang = max_bang.max(bang);
        } else {
            bang = 0;
        }
        if c == '?' {
            question += 1;
            double_q |= question >= 2;
        } else {
            question = 0;
        }
    }
    (max_bang, double_q)
}

/// Splits artifact-stripped text into tokens. Emoticons come from the
/// symbol-only entries of the valence lexicon.
#[derive(Debug, Clone, Default)]
pub struct Tokenizer {
    emoticons: Vec<String>,
    emoticon_set: HashSet<String>,
    stopwords: BTreeSet<String>,
}

impl Tokenizer {
    pub fn new(lexicon: &ValenceLexicon, stopwords: BTreeSet<String>) -> Self {
        Self::with_emoticons(lexicon.emoticons(), stopwords)
    }

    pub fn with_emoticons(mut emoticons: Vec<String>, stopwords: BTreeSet<String>) -> Self {
        emoticons.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then(a.cmp(b)));
        let emoticon_set = emoticons.iter().cloned().collect();
        Tokenizer {
            emoticons,
            emoticon_set,
            stopwords,
        }
    }

    pub fn stopwords(&self) -> &BTreeSet<String> {
        &self.stopwords
    }

    fn emoticon(&self, surface: &str) -> Token {
        Token {
            surface: surface.to_string(),
            normalized: surface.to_string(),
            all_caps: false,
            is_emoticon: true,
            is_stopword: false,
        }
    }

    fn word(&self, surface: &str) -> Option<Token> {
        let trimmed = surface.trim_matches(|c: char| !c.is_alphanumeric() && !is_apostrophe(c));
        let trimmed = trimmed.trim_matches(is_apostrophe);
        if !trimmed.chars().any(char::is_alphanumeric) {
            return None;
        }
        let normalized = fold_token(trimmed);
        Some(Token {
            surface: trimmed.to_string(),
            all_caps: all_caps(trimmed),
            is_emoticon: false,
            is_stopword: self.stopwords.contains(&normalized),
            normalized,
        })
    }

    pub fn tokenize(&self, text: &str, source_id: &str) -> CleanDoc {
        let (trailing_exclamations, trailing_double_question) = punctuation_emphasis(text);
        let mut tokens = Vec::new();
        for chunk in text.split_whitespace() {
            if self.emoticon_set.contains(chunk) {
                tokens.push(self.emoticon(chunk));
                continue;
            }
            let bare = chunk.trim_end_matches(['!', '?', '.', ',', ';']);
            if !bare.is_empty() && self.emoticon_set.contains(bare) {
                tokens.push(self.emoticon(bare));
                continue;
            }
            // word with an emoticon glued to its end, e.g. "ok:-)"
            let suffix = self
                .emoticons
                .iter()
                .find(|e| bare.len() > e.len() && bare.ends_with(e.as_str()));
            match suffix {
                Some(emo) => {
                    let head = &bare[..bare.len() - emo.len()];
                    if let Some(tok) = self.word(head) {
                        tokens.push(tok);
                    }
                    tokens.push(self.emoticon(emo));
                }
                None => tokens.extend(self.word(chunk)),
            }
        }
        CleanDoc {
            tokens,
            trailing_exclamations,
            trailing_double_question,
            source_id: source_id.to_string(),
        }
    }
}

/// Drops tokens whose normalized form is in `stoplist`; emphasis metadata is kept.
pub fn remove_stopwords(doc: &CleanDoc, stoplist: &BTreeSet<String>) -> CleanDoc {
    CleanDoc {
        tokens: doc
            .tokens
            .iter()
            .filter(|t| !stoplist.contains(&t.normalized))
            .cloned()
            .collect(),
        ..doc.clone()
    }
}

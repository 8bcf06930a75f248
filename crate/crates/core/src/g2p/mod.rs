//! Multi-dialect grapheme-to-phoneme conversion.
//!
//! Text is segmented by greedy longest match against a [`Lexicon`], each
//! matched surface is replaced by its most frequent pronunciation, and every
//! syllable's tone is checked against the dialect's tone inventory. Commas
//! become pause positions in the resulting [`PhonemeSequence`].

mod lexicon;
mod segment;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::corpus::Dialect;

pub use lexicon::{load_lexicon, Lexicon, LexiconEntry};
pub use segment::{segment_text, Token};

#[derive(Debug, Error)]
pub enum G2pError {
    #[error("failed to read lexicon: {0}")]
    Io(#[from] std::io::Error),
    #[error("lexicon line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("lexicon line {line}: surface {surface:?} has {chars} characters but {syllables} syllables")]
    LengthMismatch {
        line: usize,
        surface: String,
        chars: usize,
        syllables: usize,
    },
    #[error("lexicon line {line}: unknown dialect {label:?}")]
    UnknownDialect { line: usize, label: String },
    #[error("unknown character {ch:?} at offset {offset}")]
    UnknownChar { ch: char, offset: usize },
    #[error("syllable {syllable} has a tone outside the {dialect} inventory")]
    ToneOutOfInventory { syllable: Syllable, dialect: Dialect },
    #[error("invalid syllable {0:?}")]
    BadSyllable(String),
}

/// One tone-bearing syllable, e.g. `ho3`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub onset_rime: String,
    pub tone: u8,
}

impl Syllable {
    pub fn new(onset_rime: impl Into<String>, tone: u8) -> Result<Self, G2pError> {
        let onset_rime = onset_rime.into();
        if onset_rime.is_empty() || !onset_rime.bytes().all(|b| b.is_ascii_lowercase()) {
            return Err(G2pError::BadSyllable(format!("{onset_rime}{tone}")));
        }
        Ok(Syllable { onset_rime, tone })
    }
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.onset_rime, self.tone)
    }
}

impl FromStr for Syllable {
    type Err = G2pError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let split = s
            .find(|c: char| c.is_ascii_digit())
            .ok_or_else(|| G2pError::BadSyllable(s.to_owned()))?;
        let (letters, digits) = s.split_at(split);
        let tone = digits
            .parse::<u8>()
            .map_err(|_| G2pError::BadSyllable(s.to_owned()))?;
        Syllable::new(letters, tone).map_err(|_| G2pError::BadSyllable(s.to_owned()))
    }
}

impl Serialize for Syllable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Syllable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Syllables plus the inter-syllable positions that carry a fixed-length
/// pause. A pause at `i` sits between `syllables[i - 1]` and `syllables[i]`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhonemeSequence {
    pub syllables: Vec<Syllable>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub pauses: BTreeSet<usize>,
}

impl PhonemeSequence {
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Every pause lies strictly inside the syllable sequence.
    pub fn pauses_valid(&self) -> bool {
        self.pauses.iter().all(|&p| p >= 1 && p < self.syllables.len())
    }

    /// `self` followed by `other`, with a pause at the junction.
    pub fn join_with_pause(&self, other: &PhonemeSequence) -> PhonemeSequence {
        let offset = self.syllables.len();
        let mut syllables = self.syllables.clone();
        syllables.extend(other.syllables.iter().cloned());
        let mut pauses = self.pauses.clone();
        pauses.extend(other.pauses.iter().map(|p| p + offset));
        if offset > 0 && !other.is_empty() {
            pauses.insert(offset);
        }
        PhonemeSequence { syllables, pauses }
    }

    /// Syllables `range`, keeping the pauses that fall strictly inside it.
    pub fn slice(&self, range: std::ops::Range<usize>) -> PhonemeSequence {
        let syllables = self.syllables[range.clone()].to_vec();
        let pauses = self
            .pauses
            .iter()
            .filter(|&&p| p > range.start && p < range.end)
            .map(|p| p - range.start)
            .collect();
        PhonemeSequence { syllables, pauses }
    }
}

impl fmt::Display for PhonemeSequence {
    /// Space-separated syllables with `,` standing for each pause.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, syl) in self.syllables.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
                if self.pauses.contains(&i) {
                    f.write_str(", ")?;
                }
            }
            write!(f, "{syl}")?;
        }
        Ok(())
    }
}

/// Allowed tones per dialect. Dialects without an explicit entry accept
/// tones 1 through 8.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ToneInventory(pub BTreeMap<Dialect, BTreeSet<u8>>);

impl ToneInventory {
    pub const DEFAULT_TONES: std::ops::RangeInclusive<u8> = 1..=8;

    pub fn allows(&self, dialect: Dialect, tone: u8) -> bool {
        match self.0.get(&dialect) {
            Some(set) => set.contains(&tone),
            None => Self::DEFAULT_TONES.contains(&tone),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct G2pOptions {
    pub tones: ToneInventory,
    /// Reject characters missing from the lexicon instead of skipping them.
    pub strict: bool,
}

impl Default for G2pOptions {
    fn default() -> Self {
        G2pOptions {
            tones: ToneInventory::default(),
            strict: true,
        }
    }
}

/// Conversion output that also remembers which input character produced
/// each syllable, so callers can cut the text where they cut the phonemes.
#[derive(Debug, Clone, PartialEq)]
pub struct Phonemized {
    pub phonemes: PhonemeSequence,
    /// Char offset (not byte offset) into the input for each syllable.
    pub char_offsets: Vec<usize>,
}

/// Converts `text` to syllables using the highest-frequency pronunciation of
/// each longest-match surface.
pub fn g2p_convert(
    text: &str,
    dialect: Dialect,
    lexicon: &Lexicon,
    options: &G2pOptions,
) -> Result<PhonemeSequence, G2pError> {
    g2p_convert_detailed(text, dialect, lexicon, options).map(|p| p.phonemes)
}

pub fn g2p_convert_detailed(
    text: &str,
    dialect: Dialect,
    lexicon: &Lexicon,
    options: &G2pOptions,
) -> Result<Phonemized, G2pError> {
    let tokens = segment_text(text, dialect, lexicon, options.strict)?;
    let mut syllables = Vec::new();
    let mut char_offsets = Vec::new();
    let mut pauses = BTreeSet::new();
    for (offset, token) in tokens {
        match token {
            Token::Word(surface) => {
                let entry = lexicon
                    .best(dialect, &surface)
                    .expect("segmenter only emits lexicon surfaces");
                for (i, syl) in entry.pronunciation.iter().enumerate() {
                    if !options.tones.allows(dialect, syl.tone) {
                        return Err(G2pError::ToneOutOfInventory {
                            syllable: syl.clone(),
                            dialect,
                        });
                    }
                    syllables.push(syl.clone());
                    char_offsets.push(offset + i);
                }
            }
            Token::Pause => {
                if !syllables.is_empty() {
                    pauses.insert(syllables.len());
                }
            }
            Token::Punct(_) | Token::Unk(_) => {}
        }
    }
    let n = syllables.len();
    pauses.retain(|&p| p < n);
    Ok(Phonemized {
        phonemes: PhonemeSequence { syllables, pauses },
        char_offsets,
    })
}

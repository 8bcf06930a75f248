use std::collections::HashMap;
use std::path::Path;

use crate::corpus::Dialect;
use crate::text::nfc;

use super::{G2pError, Syllable};

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub surface: String,
    pub dialect: Dialect,
    /// One syllable per surface character.
    pub pronunciation: Vec<Syllable>,
    pub frequency: u64,
}

/// Pronunciation table indexed by `(dialect, surface)`.
///
/// Heteronyms keep every variant, ordered by descending frequency with ties
/// left in load order.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: HashMap<Dialect, HashMap<String, Vec<LexiconEntry>>>,
    max_surface_len: HashMap<Dialect, usize>,
}

impl Lexicon {
    pub fn from_entries(entries: impl IntoIterator<Item = LexiconEntry>) -> Self {
        let mut lex = Lexicon::default();
        for entry in entries {
            let len = entry.surface.chars().count();
            let max = lex.max_surface_len.entry(entry.dialect).or_insert(0);
            *max = (*max).max(len);
            lex.entries
                .entry(entry.dialect)
                .or_default()
                .entry(entry.surface.clone())
                .or_default()
                .push(entry);
        }
        for by_surface in lex.entries.values_mut() {
            for variants in by_surface.values_mut() {
                // stable: equal frequencies stay in load order
                variants.sort_by_key(|v| std::cmp::Reverse(v.frequency));
            }
        }
        lex
    }

    /// Parses the tab-separated lexicon format:
    /// `surface<TAB>dialect<TAB>syllables<TAB>frequency`, `#` comments.
    pub fn parse(src: &str) -> Result<Self, G2pError> {
        let mut entries = Vec::new();
        for (idx, raw) in src.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            if fields.len() != 4 {
                return Err(G2pError::Parse {
                    line,
                    message: format!("expected 4 tab-separated fields, found {}", fields.len()),
                });
            }
            let surface = nfc(fields[0].trim());
            if surface.is_empty() {
                return Err(G2pError::Parse { line, message: "empty surface".into() });
            }
            let dialect: Dialect = fields[1].trim().parse().map_err(|_| G2pError::UnknownDialect {
                line,
                label: fields[1].trim().to_owned(),
            })?;
            let pronunciation = fields[2]
                .split_whitespace()
                .map(|s| {
                    s.parse::<Syllable>().map_err(|_| G2pError::Parse {
                        line,
                        message: format!("invalid syllable {s:?}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let frequency = fields[3].trim().parse::<u64>().map_err(|_| G2pError::Parse {
                line,
                message: format!("invalid frequency {:?}", fields[3]),
            })?;
            let chars = surface.chars().count();
            if chars != pronunciation.len() {
                return Err(G2pError::LengthMismatch {
                    line,
                    surface,
                    chars,
                    syllables: pronunciation.len(),
                });
            }
            entries.push(LexiconEntry { surface, dialect, pronunciation, frequency });
        }
        Ok(Lexicon::from_entries(entries))
    }

    /// All variants for a surface, most frequent first.
    pub fn lookup(&self, dialect: Dialect, surface: &str) -> Option<&[LexiconEntry]> {
        self.entries
            .get(&dialect)
            .and_then(|m| m.get(surface))
            .map(Vec::as_slice)
    }

    pub fn best(&self, dialect: Dialect, surface: &str) -> Option<&LexiconEntry> {
        self.lookup(dialect, surface).and_then(|v| v.first())
    }

    pub fn contains(&self, dialect: Dialect, surface: &str) -> bool {
        self.lookup(dialect, surface).is_some()
    }

    pub fn max_surface_len(&self, dialect: Dialect) -> usize {
        self.max_surface_len.get(&dialect).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.entries.values().flat_map(|m| m.values()).map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every distinct syllable the lexicon can produce for `dialect`.
    pub fn syllable_inventory(&self, dialect: Dialect) -> std::collections::BTreeSet<Syllable> {
        self.entries
            .get(&dialect)
            .into_iter()
            .flat_map(|m| m.values())
            .flatten()
            .flat_map(|e| e.pronunciation.iter().cloned())
            .collect()
    }
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon, G2pError> {
    let src = std::fs::read_to_string(path)?;
    Lexicon::parse(&src)
}

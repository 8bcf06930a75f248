use crate::corpus::Dialect;
use crate::text::{is_pause_comma, is_punctuation};

use super::{G2pError, Lexicon};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Token {
    /// A lexicon surface.
    Word(String),
    /// `,` or `，`.
    Pause,
    /// Any other punctuation, including sentence-final marks.
    Punct(char),
    /// Out-of-lexicon character (lenient mode only).
    Unk(char),
}

/// Greedy left-to-right maximum matching.
///
/// Returns each token with the char offset where it starts. Whitespace is
/// dropped. In strict mode an uncovered character is an error; otherwise it
/// becomes [`Token::Unk`].
pub fn segment_text(
    text: &str,
    dialect: Dialect,
    lexicon: &Lexicon,
    strict: bool,
) -> Result<Vec<(usize, Token)>, G2pError> {
    let chars: Vec<char> = text.chars().collect();
    let max_len = lexicon.max_surface_len(dialect);
    let mut out = Vec::new();
    let mut i = 0;
    let mut buf = String::new();
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if is_pause_comma(c) {
            out.push((i, Token::Pause));
            i += 1;
            continue;
        }
        if is_punctuation(c) {
            out.push((i, Token::Punct(c)));
            i += 1;
            continue;
        }
        let longest = (1..=max_len.min(chars.len() - i)).rev().find(|&len| {
            buf.clear();
            buf.extend(&chars[i..i + len]);
            lexicon.contains(dialect, &buf)
        });
        match longest {
            Some(len) => {
                out.push((i, Token::Word(chars[i..i + len].iter().collect())));
                i += len;
            }
            None if strict => return Err(G2pError::UnknownChar { ch: c, offset: i }),
            None => {
                out.push((i, Token::Unk(c)));
                i += 1;
            }
        }
    }
    Ok(out)
}

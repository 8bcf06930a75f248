//! Character classes and normalization shared by the text-facing modules.

use unicode_normalization::{is_nfc, UnicodeNormalization};

/// Returns the NFC form of `text`.
pub fn nfc(text: &str) -> String {
    if is_nfc(text) {
        text.to_owned()
    } else {
        text.nfc().collect()
    }
}

pub fn is_nfc_normalized(text: &str) -> bool {
    is_nfc(text)
}

/// ASCII or ideographic comma: both mark the fixed-length pause.
pub fn is_pause_comma(c: char) -> bool {
    matches!(c, ',' | '，')
}

/// Sentence-final marks that close a clause without a pause token.
pub fn is_sentence_final(c: char) -> bool {
    matches!(c, '。' | '？' | '！' | '.' | '?' | '!')
}

/// Punctuation in the ASCII, general-punctuation, CJK-symbol and
/// full-width ranges. Hakka texts only use these blocks in practice.
pub fn is_punctuation(c: char) -> bool {
    if c.is_ascii_punctuation() {
        return true;
    }
    matches!(c as u32,
        0x00A1..=0x00BF
        | 0x2010..=0x205E
        | 0x3000..=0x303F
        | 0xFE10..=0xFE1F
        | 0xFE30..=0xFE6F
        | 0xFF01..=0xFF0F
        | 0xFF1A..=0xFF20
        | 0xFF3B..=0xFF40
        | 0xFF5B..=0xFF65
    ) && c != '\u{3005}' // 々 is an iteration mark, not punctuation
}

/// Characters that count toward speaking-rate statistics: everything
/// except punctuation and whitespace.
pub fn is_counted_char(c: char) -> bool {
    !c.is_whitespace() && !is_punctuation(c)
}

pub fn count_chars(text: &str) -> usize {
    text.chars().filter(|&c| is_counted_char(c)).count()
}

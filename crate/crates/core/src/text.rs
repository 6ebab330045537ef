//! Text normalization shared by tokenization, linking and vector lookup.
//!
//! Every module that compares strings for identity goes through
//! [`normalize`], so a token produced by the tokenizer, a key in a vector
//! file and a schema name all agree on what "the same text" means.

use unicode_normalization::UnicodeNormalization;

/// Arabic elongation mark.
pub const TATWEEL: char = '\u{0640}';

/// Arabic harakat, tanween, shadda, sukun, superscript alef and Quranic
/// annotation marks.
pub fn is_arabic_diacritic(c: char) -> bool {
    matches!(c,
        '\u{0610}'..='\u{061A}'
        | '\u{064B}'..='\u{065F}'
        | '\u{0670}'
        | '\u{06D6}'..='\u{06DC}'
        | '\u{06DF}'..='\u{06E8}'
        | '\u{06EA}'..='\u{06ED}')
}

pub fn is_arabic_letter(c: char) -> bool {
    matches!(c, '\u{0620}'..='\u{064A}' | '\u{066E}'..='\u{06D3}' | '\u{06FA}'..='\u{06FF}')
}

/// True when the text contains any Arabic letter.
pub fn contains_arabic(text: &str) -> bool {
    text.chars().any(is_arabic_letter)
}

/// NFKC, drop tatweel and Arabic diacritics, lowercase, collapse whitespace.
pub fn normalize(text: &str) -> String {
    let folded: String =
        text.nfkc().filter(|&c| c != TATWEEL && !is_arabic_diacritic(c)).flat_map(char::to_lowercase).collect();
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// NFKC plus lowercasing, without the Arabic-specific stripping.
pub fn normalize_latin(text: &str) -> String {
    let folded: String = text.nfkc().flat_map(char::to_lowercase).collect();
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}

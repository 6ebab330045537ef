use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Arabic,
    English,
}

impl Language {
    /// Arabic when the text contains at least one Arabic letter.
    pub fn detect(text: &str) -> Self {
        if text::contains_arabic(text) {
            Language::Arabic
        } else {
            Language::English
        }
    }
}

/// Rule-based tokenizer: normalize, then split on Unicode word boundaries.
///
/// Word segments become tokens; every non-whitespace, non-word segment
/// (punctuation) is split into one token per character.
pub fn tokenize(question: &str, language: Language) -> Vec<String> {
    let normalized = match language {
        Language::Arabic => text::normalize(question),
        Language::English => text::normalize_latin(question),
    };
    let mut tokens = Vec::new();
    for segment in normalized.split_word_bounds() {
        if segment.chars().all(char::is_whitespace) {
            continue;
        }
        if segment.chars().any(char::is_alphanumeric) {
            tokens.push(segment.to_owned());
        } else {
            tokens.extend(segment.chars().filter(|c| !c.is_whitespace()).map(String::from));
        }
    }
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn english_sample() {
        assert_eq!(
            tokenize("Count the number of products.", Language::English),
            ["count", "the", "number", "of", "products", "."]
        );
    }

    #[test]
    fn arabic_sample() {
        assert_eq!(tokenize("احسب عدد المنتجات.", Language::Arabic), ["احسب", "عدد", "المنتجات", "."]);
    }

    #[test]
    fn arabic_question_mark_and_diacritics() {
        assert_eq!(
            tokenize("كم من المُنتجات لكل شركة صناعية؟", Language::Arabic),
            ["كم", "من", "المنتجات", "لكل", "شركة", "صناعية", "؟"]
        );
    }

    #[test]
    fn empty_and_blank() {
        assert!(tokenize("", Language::English).is_empty());
        assert!(tokenize(" \t\n", Language::Arabic).is_empty());
    }

    #[test]
    fn detection() {
        assert_eq!(Language::detect("ما هو"), Language::Arabic);
        assert_eq!(Language::detect("what is"), Language::English);
    }

    proptest! {
        #[test]
        fn tokens_cover_all_non_whitespace(s in "[a-zA-Z0-9 ,.?!'()\u{0621}-\u{063A}\u{0641}-\u{064A}]{0,60}") {
            let lang = Language::detect(&s);
            let joined: String = tokenize(&s, lang).concat();
            let expected: String = text::normalize(&s).chars().filter(|c| !c.is_whitespace()).collect();
            prop_assert_eq!(joined, expected);
        }
    }
}

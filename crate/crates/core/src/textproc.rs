//! Tokenization, sentence splitting, character n-grams and syllable counts.
//!
//! Every downstream feature family consumes this module's output, so the
//! rules here are deliberately simple and fully deterministic: lowercase
//! everything, tokens are maximal runs of Unicode letters/digits (plus
//! apostrophes between two such characters), and a sentence ends at `.`,
//! `!` or `?` followed by whitespace or end of text.

use crate::error::{Error, Result};

/// A tokenized document: lowercase word tokens plus sentence spans expressed
/// as `(start, end)` token-index ranges (end exclusive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDoc {
    pub tokens: Vec<String>,
    pub sentences: Vec<(usize, usize)>,
    pub source_id: String,
}

impl TokenizedDoc {
    pub fn n_tokens(&self) -> usize {
        self.tokens.len()
    }

    pub fn n_sentences(&self) -> usize {
        self.sentences.len()
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Tokenize `text` into lowercase word tokens and sentence spans.
///
/// A trailing run of tokens without closing punctuation still forms a final
/// sentence, so any text with at least one token has at least one sentence.
pub fn tokenize(text: &str) -> TokenizedDoc {
    let lower = text.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();

    let mut tokens: Vec<String> = Vec::new();
    let mut sentences: Vec<(usize, usize)> = Vec::new();
    let mut current = String::new();
    let mut sentence_start = 0usize;

    for idx in 0..chars.len() {
        let c = chars[idx];
        if c.is_alphanumeric() {
            current.push(c);
        } else if is_apostrophe(c)
            && !current.is_empty()
            && chars.get(idx + 1).is_some_and(|n| n.is_alphanumeric())
        {
            // internal apostrophe, as in "don't"
            current.push(c);
        } else {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            if matches!(c, '.' | '!' | '?') {
                let closes = match chars.get(idx + 1) {
                    None => true,
                    Some(n) => n.is_whitespace(),
                };
                if closes && tokens.len() > sentence_start {
                    sentences.push((sentence_start, tokens.len()));
                    sentence_start = tokens.len();
                }
            }
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    if tokens.len() > sentence_start {
        sentences.push((sentence_start, tokens.len()));
    }

    TokenizedDoc {
        tokens,
        sentences,
        source_id: String::new(),
    }
}

/// Character n-grams over the lowercased text with every whitespace run
/// collapsed to a single space. No padding is added; n-grams spanning a
/// word boundary keep the space character.
pub fn char_ngrams(text: &str, n: usize) -> Result<Vec<String>> {
    if n < 1 {
        return Err(Error::InvalidParameter(format!(
            "char n-gram size must be >= 1, got {n}"
        )));
    }
    let lower = text.to_lowercase();
    let mut collapsed: Vec<char> = Vec::with_capacity(lower.len());
    let mut prev_ws = false;
    for c in lower.chars() {
        if c.is_whitespace() {
            if !prev_ws {
                collapsed.push(' ');
            }
            prev_ws = true;
        } else {
            collapsed.push(c);
            prev_ws = false;
        }
    }
    if collapsed.len() < n {
        return Ok(Vec::new());
    }
    Ok(collapsed
        .windows(n)
        .map(|w| w.iter().collect::<String>())
        .collect())
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y')
}

/// Heuristic syllable count: number of vowel-letter runs (a, e, i, o, u, y),
/// minus a silent trailing `e`, with a floor of one.
///
/// The trailing `e` is kept when it follows an `l` that itself follows a
/// consonant (the "-ble"/"-tle" pattern, as in "table").
pub fn count_syllables(word: &str) -> Result<usize> {
    if word.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot count syllables of an empty word".into(),
        ));
    }
    let chars: Vec<char> = word.to_lowercase().chars().collect();

    let mut groups = 0usize;
    let mut in_group = false;
    for &c in &chars {
        if is_vowel(c) {
            if !in_group {
                groups += 1;
            }
            in_group = true;
        } else {
            in_group = false;
        }
    }

    let n = chars.len();
    let silent_e = n >= 2 && chars[n - 1] == 'e' && !is_vowel(chars[n - 2]) && {
        let consonant_le = chars[n - 2] == 'l'
            && n >= 3
            && chars[n - 3].is_alphabetic()
            && !is_vowel(chars[n - 3]);
        !consonant_le
    };

    Ok(groups.saturating_sub(silent_e as usize).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_sentence() {
        let doc = tokenize("The cat sat.");
        assert_eq!(doc.tokens, vec!["the", "cat", "sat"]);
        assert_eq!(doc.sentences, vec![(0, 3)]);
    }

    #[test]
    fn empty_text() {
        let doc = tokenize("");
        assert_eq!(doc.n_tokens(), 0);
        assert_eq!(doc.n_sentences(), 0);
    }

    #[test]
    fn boundary_rule() {
        let doc = tokenize("Hi! Bye.");
        assert_eq!(doc.tokens, vec!["hi", "bye"]);
        assert_eq!(doc.sentences, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn trailing_text_closes_implicitly() {
        let doc = tokenize("no punctuation here");
        assert_eq!(doc.n_tokens(), 3);
        assert_eq!(doc.sentences, vec![(0, 3)]);
    }

    #[test]
    fn internal_apostrophe_kept() {
        let doc = tokenize("Don't say 'hi' twice.");
        assert_eq!(doc.tokens, vec!["don't", "say", "hi", "twice"]);
    }

    #[test]
    fn decimal_point_is_not_a_boundary() {
        let doc = tokenize("pi is 3.14 roughly. yes.");
        assert_eq!(doc.tokens, vec!["pi", "is", "3", "14", "roughly", "yes"]);
        assert_eq!(doc.n_sentences(), 2);
    }

    #[test]
    fn ellipsis_closes_once() {
        let doc = tokenize("Wait... ok");
        assert_eq!(doc.sentences, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn ngram_window_arithmetic() {
        assert_eq!(char_ngrams("abcd", 3).unwrap(), vec!["abc", "bcd"]);
    }

    #[test]
    fn ngram_short_input() {
        assert!(char_ngrams("ab", 3).unwrap().is_empty());
    }

    #[test]
    fn ngram_whitespace_collapse() {
        // "a  b" collapses to "a b" before windowing
        assert_eq!(char_ngrams("a  b", 3).unwrap(), vec!["a b"]);
    }

    #[test]
    fn ngram_rejects_zero() {
        assert!(char_ngrams("abc", 0).is_err());
    }

    #[test]
    fn ngram_lowercases_and_keeps_punctuation() {
        assert_eq!(char_ngrams("A,b", 2).unwrap(), vec!["a,", ",b"]);
    }

    #[test]
    fn syllables_hand_cases() {
        assert_eq!(count_syllables("cat").unwrap(), 1);
        assert_eq!(count_syllables("table").unwrap(), 2);
        assert_eq!(count_syllables("strength").unwrap(), 1);
        assert_eq!(count_syllables("whale").unwrap(), 1);
        assert_eq!(count_syllables("the").unwrap(), 1);
        assert_eq!(count_syllables("syllable").unwrap(), 3);
        assert_eq!(count_syllables("readability").unwrap(), 5);
    }

    #[test]
    fn syllables_empty_word_errors() {
        assert!(count_syllables("").is_err());
    }

    proptest! {
        // Tokenizing the space-joined tokens reproduces the token sequence.
        #[test]
        fn tokenize_idempotent(text in "\\PC{0,120}") {
            let first = tokenize(&text);
            let rejoined = first.tokens.join(" ");
            let second = tokenize(&rejoined);
            prop_assert_eq!(first.tokens, second.tokens);
        }

        #[test]
        fn syllables_at_least_one(word in "[a-z]{1,20}") {
            prop_assert!(count_syllables(&word).unwrap() >= 1);
        }

        #[test]
        fn sentence_spans_in_bounds(text in "\\PC{0,120}") {
            let doc = tokenize(&text);
            let mut prev_end = 0usize;
            for &(s, e) in &doc.sentences {
                prop_assert!(s < e);
                prop_assert!(e <= doc.tokens.len());
                prop_assert_eq!(s, prev_end);
                prev_end = e;
            }
            if !doc.tokens.is_empty() {
                prop_assert_eq!(prev_end, doc.tokens.len());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn ngram_count_formula(text in "\\PC{0,80}", n in 1usize..6) {
            let grams = char_ngrams(&text, n).unwrap();
            let lower = text.to_lowercase();
            let mut len = 0usize;
            let mut prev_ws = false;
            for c in lower.chars() {
                if c.is_whitespace() {
                    if !prev_ws { len += 1; }
                    prev_ws = true;
                } else {
                    len += 1;
                    prev_ws = false;
                }
            }
            // max(0, len - n + 1)
            prop_assert_eq!(grams.len(), len.saturating_sub(n - 1));
        }
    }
}

//! Readability indices computed from word, sentence and syllable counts.
//!
//! Coefficients are the standard published ones, frozen here so scores are
//! reproducible bit for bit. A "complex" word is any word our syllable
//! heuristic counts at three or more syllables; the classical proper-noun
//! and suffix exclusions are deliberately not applied.

use crate::error::{Error, Result};
use crate::textproc::{count_syllables, TokenizedDoc};

/// Width of the readability feature block.
pub const READABILITY_DIM: usize = 3;

/// Aggregate counts feeding the three indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReadabilityStats {
    pub n_words: usize,
    pub n_sentences: usize,
    pub n_syllables: usize,
    pub n_complex_words: usize,
}

impl ReadabilityStats {
    pub fn is_empty(&self) -> bool {
        self.n_words == 0 || self.n_sentences == 0
    }
}

/// Count words, sentences, syllables and complex words for a tokenized
/// document. An empty document yields all zeros.
pub fn text_stats(doc: &TokenizedDoc) -> ReadabilityStats {
    let mut syllables = 0usize;
    let mut complex = 0usize;
    for token in &doc.tokens {
        let s = count_syllables(token).expect("tokens are never empty");
        syllables += s;
        if s >= 3 {
            complex += 1;
        }
    }
    ReadabilityStats {
        n_words: doc.tokens.len(),
        n_sentences: doc.sentences.len(),
        n_syllables: syllables,
        n_complex_words: complex,
    }
}

/// Flesch reading ease: `206.835 - 1.015*(words/sentences) - 84.6*(syllables/words)`.
pub fn flesch_reading_ease(s: &ReadabilityStats) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptyText);
    }
    let wps = s.n_words as f64 / s.n_sentences as f64;
    let spw = s.n_syllables as f64 / s.n_words as f64;
    Ok(206.835 - 1.015 * wps - 84.6 * spw)
}

/// Flesch–Kincaid grade level: `0.39*(words/sentences) + 11.8*(syllables/words) - 15.59`.
pub fn flesch_kincaid_grade(s: &ReadabilityStats) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptyText);
    }
    let wps = s.n_words as f64 / s.n_sentences as f64;
    let spw = s.n_syllables as f64 / s.n_words as f64;
    Ok(0.39 * wps + 11.8 * spw - 15.59)
}

/// Gunning fog index: `0.4 * ((words/sentences) + 100*(complex_words/words))`.
pub fn gunning_fog(s: &ReadabilityStats) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptyText);
    }
    let wps = s.n_words as f64 / s.n_sentences as f64;
    let complex_ratio = s.n_complex_words as f64 / s.n_words as f64;
    Ok(0.4 * (wps + 100.0 * complex_ratio))
}

/// The three indices as a feature block, with zeros for empty documents so
/// batch featurization stays total.
pub fn readability_block(doc: &TokenizedDoc) -> [f64; READABILITY_DIM] {
    let stats = text_stats(doc);
    if stats.is_empty() {
        return [0.0; READABILITY_DIM];
    }
    [
        flesch_reading_ease(&stats).expect("checked non-empty"),
        flesch_kincaid_grade(&stats).expect("checked non-empty"),
        gunning_fog(&stats).expect("checked non-empty"),
    ]
}

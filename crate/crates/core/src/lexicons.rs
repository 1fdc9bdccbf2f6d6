//! Cue lexicons: loading, count features, and bias-lexicon induction via
//! semantic orientation.
//!
//! Semantic orientation is estimated as the base-2 log ratio of add-one
//! smoothed unigram probabilities between two corpora; positive values
//! associate a word with the second ("right") corpus, negative with the
//! first ("left"). Words whose absolute score clears a threshold form the
//! two induced bias lexicons.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::textproc::tokenize;

/// Default |SO| threshold for bias-lexicon induction.
pub const DEFAULT_SO_THRESHOLD: f64 = 0.4;

/// A named set of lowercase cue terms. Multi-word cues are stored with
/// single spaces between words and matched against contiguous token runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    name: String,
    terms: BTreeSet<String>,
}

impl Lexicon {
    /// Normalizes terms to lowercase with collapsed internal whitespace and
    /// drops empties. The name must be non-empty; the term set may be empty
    /// (induction can legitimately produce an empty side).
    pub fn new(name: impl Into<String>, terms: impl IntoIterator<Item = String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::InvalidParameter(
                "lexicon name must be non-empty".into(),
            ));
        }
        let terms: BTreeSet<String> = terms
            .into_iter()
            .map(|t| {
                t.to_lowercase()
                    .split_whitespace()
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .filter(|t| !t.is_empty())
            .collect();
        Ok(Lexicon { name, terms })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.terms.contains(term)
    }

    /// Longest cue length in words (1 for a purely single-word lexicon).
    fn max_cue_words(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.split(' ').count())
            .max()
            .unwrap_or(1)
    }
}

/// Load a lexicon file: one cue per line, `#` starts a comment line, blank
/// lines ignored. Errors when nothing survives parsing.
pub fn load_lexicon(path: impl AsRef<Path>, name: impl Into<String>) -> Result<Lexicon> {
    let path = path.as_ref();
    let name = name.into();
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let terms = content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string);
    let lexicon = Lexicon::new(name, terms)?;
    if lexicon.is_empty() {
        return Err(Error::EmptyLexicon { name: lexicon.name });
    }
    Ok(lexicon)
}

/// Number of cue occurrences in the token sequence, with multiplicity.
/// Multi-word cues are matched as contiguous token windows, one count per
/// matching window.
pub fn lexicon_count<S: AsRef<str>>(tokens: &[S], lex: &Lexicon) -> usize {
    if lex.is_empty() || tokens.is_empty() {
        return 0;
    }
    let max_len = lex.max_cue_words().min(tokens.len());
    let mut count = 0usize;
    let mut window = String::new();
    for width in 1..=max_len {
        for start in 0..=(tokens.len() - width) {
            window.clear();
            for (k, tok) in tokens[start..start + width].iter().enumerate() {
                if k > 0 {
                    window.push(' ');
                }
                window.push_str(tok.as_ref());
            }
            if lex.contains(&window) {
                count += 1;
            }
        }
    }
    count
}

/// A word with its semantic-orientation score. Positive scores associate the
/// word with the second corpus, negative with the first.
#[derive(Debug, Clone, PartialEq)]
pub struct SoScore {
    pub term: String,
    pub so: f64,
}

fn unigram_counts(corpus: &Corpus) -> (HashMap<String, usize>, usize) {
    let mut counts: HashMap<String, usize> = HashMap::new();
    let mut total = 0usize;
    for doc in corpus.iter() {
        for token in tokenize(&doc.text).tokens {
            *counts.entry(token).or_insert(0) += 1;
            total += 1;
        }
    }
    (counts, total)
}

/// Semantic orientation of every word in the union vocabulary of the two
/// corpora: `log2(P(w|right) / P(w|left))` with add-one smoothed unigram
/// probabilities `P(w|c) = (count(w,c)+1) / (N_c + |V|)`.
///
/// Results are sorted by descending |SO|, ties broken lexicographically.
pub fn semantic_orientation(left: &Corpus, right: &Corpus) -> Result<Vec<SoScore>> {
    for c in [left, right] {
        if c.is_empty() {
            return Err(Error::EmptyCorpus {
                name: c.name().to_string(),
            });
        }
    }
    let (left_counts, left_total) = unigram_counts(left);
    let (right_counts, right_total) = unigram_counts(right);

    let mut vocab: BTreeSet<&String> = left_counts.keys().collect();
    vocab.extend(right_counts.keys());
    let v = vocab.len();
    if v == 0 {
        return Err(Error::EmptyCorpus {
            name: format!("{} ∪ {}", left.name(), right.name()),
        });
    }

    // log2(P(w|right) / P(w|left)) computed as a difference of per-side
    // log-probabilities so that exchanging the corpora negates every score
    // bit for bit.
    let left_log_denom = ((left_total + v) as f64).log2();
    let right_log_denom = ((right_total + v) as f64).log2();
    let mut scores: Vec<SoScore> = vocab
        .into_iter()
        .map(|term| {
            let left_log_p =
                ((left_counts.get(term).copied().unwrap_or(0) + 1) as f64).log2() - left_log_denom;
            let right_log_p = ((right_counts.get(term).copied().unwrap_or(0) + 1) as f64).log2()
                - right_log_denom;
            SoScore {
                term: term.clone(),
                so: right_log_p - left_log_p,
            }
        })
        .collect();
    scores.sort_by(|a, b| {
        b.so.abs()
            .partial_cmp(&a.so.abs())
            .expect("SO scores are finite")
            .then_with(|| a.term.cmp(&b.term))
    });
    Ok(scores)
}

/// Threshold the scores into the two bias lexicons: words with
/// `so <= -threshold` go left, `so >= threshold` go right.
pub fn induce_bias_lexicons(scores: &[SoScore], threshold: f64) -> Result<(Lexicon, Lexicon)> {
    if threshold <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "SO threshold must be positive, got {threshold}"
        )));
    }
    let left = Lexicon::new(
        "bias_left",
        scores
            .iter()
            .filter(|s| s.so <= -threshold)
            .map(|s| s.term.clone()),
    )?;
    let right = Lexicon::new(
        "bias_right",
        scores
            .iter()
            .filter(|s| s.so >= threshold)
            .map(|s| s.term.clone()),
    )?;
    Ok((left, right))
}

/// Bias score of a document against one lexicon: cue occurrences divided by
/// the token count. Empty documents score 0.
pub fn bias_score<S: AsRef<str>>(tokens: &[S], lex: &Lexicon) -> f64 {
    if tokens.is_empty() {
        return 0.0;
    }
    lexicon_count(tokens, lex) as f64 / tokens.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use proptest::prelude::*;
    use std::io::Write as _;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn corpus_of(name: &str, texts: &[&str]) -> Corpus {
        let docs = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Document::unlabeled(format!("{name}{i}"), *t))
            .collect();
        Corpus::new(name, docs).unwrap()
    }

    #[test]
    fn load_normalizes_and_dedups() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "good\nBAD\n# note\nbad").unwrap();
        let lex = load_lexicon(f.path(), "test").unwrap();
        assert_eq!(lex.terms().collect::<Vec<_>>(), vec!["bad", "good"]);
    }

    #[test]
    fn load_rejects_comment_only_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "# just a comment\n# another").unwrap();
        assert!(matches!(
            load_lexicon(f.path(), "empty").unwrap_err(),
            Error::EmptyLexicon { .. }
        ));
    }

    #[test]
    fn count_with_multiplicity() {
        let lex = Lexicon::new("l", vec!["bad".into()]).unwrap();
        assert_eq!(lexicon_count(&toks(&["bad", "bad", "good"]), &lex), 2);
    }

    #[test]
    fn count_empty_tokens() {
        let lex = Lexicon::new("l", vec!["bad".into()]).unwrap();
        assert_eq!(lexicon_count::<String>(&[], &lex), 0);
    }

    #[test]
    fn count_multiword_cue() {
        let lex = Lexicon::new("l", vec!["not good".into()]).unwrap();
        assert_eq!(lexicon_count(&toks(&["not", "good"]), &lex), 1);
        assert_eq!(lexicon_count(&toks(&["not", "bad"]), &lex), 0);
        // overlapping windows each count
        let lex2 = Lexicon::new("l2", vec!["a a".into()]).unwrap();
        assert_eq!(lexicon_count(&toks(&["a", "a", "a"]), &lex2), 2);
    }

    #[test]
    fn so_hand_example() {
        let left = corpus_of("left", &["war war peace"]);
        let right = corpus_of("right", &["tax tax peace"]);
        let scores = semantic_orientation(&left, &right).unwrap();
        let find = |t: &str| scores.iter().find(|s| s.term == t).unwrap().so;
        // |V|=3, N=3 each side: P(war|right)=1/6, P(war|left)=3/6
        assert!((find("war") - (1.0f64 / 3.0).log2()).abs() < 1e-12);
        assert!((find("war") + 1.5849625007).abs() < 1e-9);
        assert!((find("tax") - 1.5849625007).abs() < 1e-9);
        assert_eq!(find("peace"), 0.0);
        // sorted by |SO| descending, ties lexicographic
        assert_eq!(scores[0].term, "tax");
        assert_eq!(scores[1].term, "war");
        assert_eq!(scores[2].term, "peace");
    }

    #[test]
    fn so_identical_corpora_all_zero() {
        let a = corpus_of("a", &["same words here"]);
        let b = corpus_of("b", &["same words here"]);
        for s in semantic_orientation(&a, &b).unwrap() {
            assert_eq!(s.so, 0.0);
        }
    }

    #[test]
    fn so_rejects_empty_corpus() {
        let a = Corpus::new("a", vec![]).unwrap();
        let b = corpus_of("b", &["text"]);
        assert!(semantic_orientation(&a, &b).is_err());
    }

    #[test]
    fn induction_hand_example() {
        let left = corpus_of("left", &["war war peace"]);
        let right = corpus_of("right", &["tax tax peace"]);
        let scores = semantic_orientation(&left, &right).unwrap();
        let (bl_left, bl_right) = induce_bias_lexicons(&scores, DEFAULT_SO_THRESHOLD).unwrap();
        assert_eq!(bl_left.terms().collect::<Vec<_>>(), vec!["war"]);
        assert_eq!(bl_right.terms().collect::<Vec<_>>(), vec!["tax"]);

        let (l2, r2) = induce_bias_lexicons(&scores, 2.0).unwrap();
        assert!(l2.is_empty());
        assert!(r2.is_empty());
    }

    #[test]
    fn induction_rejects_nonpositive_threshold() {
        assert!(induce_bias_lexicons(&[], 0.0).is_err());
        assert!(induce_bias_lexicons(&[], -0.4).is_err());
    }

    #[test]
    fn bias_score_hand_values() {
        let lex = Lexicon::new("bl", vec!["war".into()]).unwrap();
        assert!((bias_score(&toks(&["war", "war", "tax"]), &lex) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(bias_score::<String>(&[], &lex), 0.0);
        let none = Lexicon::new("n", vec!["absent".into()]).unwrap();
        assert_eq!(bias_score(&toks(&["a", "b"]), &none), 0.0);
    }

    proptest! {
        // Exchanging the corpora negates every score exactly.
        #[test]
        fn so_antisymmetry(
            left_words in proptest::collection::vec("[a-e]{1,3}", 1..40),
            right_words in proptest::collection::vec("[a-e]{1,3}", 1..40),
        ) {
            let left = corpus_of("l", &[left_words.join(" ").as_str()]);
            let right = corpus_of("r", &[right_words.join(" ").as_str()]);
            let fwd = semantic_orientation(&left, &right).unwrap();
            let rev = semantic_orientation(&right, &left).unwrap();
            let rev_map: HashMap<&str, f64> =
                rev.iter().map(|s| (s.term.as_str(), s.so)).collect();
            for s in &fwd {
                prop_assert_eq!(-s.so, rev_map[s.term.as_str()]);
            }
        }

        #[test]
        fn bias_score_bounded(
            words in proptest::collection::vec("[a-c]", 0..60),
            cues in proptest::collection::btree_set("[a-c]", 1..3),
        ) {
            let lex = Lexicon::new("p", cues.into_iter().collect::<Vec<_>>()).unwrap();
            let score = bias_score(&words, &lex);
            prop_assert!((0.0..=1.0).contains(&score));
        }

        // Subadditivity of counts over lexicon union (single-word cues).
        #[test]
        fn count_subadditive(
            words in proptest::collection::vec("[a-d]", 0..50),
            a in proptest::collection::btree_set("[a-d]", 1..4),
            b in proptest::collection::btree_set("[a-d]", 1..4),
        ) {
            let union: Vec<String> = a.union(&b).cloned().collect();
            let disjoint = a.is_disjoint(&b);
            let la = Lexicon::new("a", a.into_iter().collect::<Vec<_>>()).unwrap();
            let lb = Lexicon::new("b", b.into_iter().collect::<Vec<_>>()).unwrap();
            let lu = Lexicon::new("u", union).unwrap();
            let cu = lexicon_count(&words, &lu);
            let ca = lexicon_count(&words, &la);
            let cb = lexicon_count(&words, &lb);
            prop_assert!(cu <= ca + cb);
            if disjoint {
                prop_assert_eq!(cu, ca + cb);
            }
        }
    }
}

//! TFiDF vectorization for word \[1,2\]-grams and character 3-grams, plus
//! Naive-Bayes log-ratio scaling.
//!
//! The numerical conventions are centralized here: `tf` is the raw in-document
//! count, `idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1`, every document vector
//! is L2-normalized, and the NB ratio vector uses L1 normalization with the
//! natural log. Binarized term frequency is available as an option.

use std::collections::HashMap;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::sparse::SparseVector;
use crate::textproc::{char_ngrams, tokenize};

/// Feature channel a vocabulary belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    /// Word unigrams and bigrams (bigrams joined with a single space).
    Word12,
    /// Character 3-grams over whitespace-collapsed lowercase text.
    Char3,
}

impl Channel {
    /// Extract this channel's term stream from raw document text.
    pub fn terms(&self, text: &str) -> Vec<String> {
        match self {
            Channel::Word12 => {
                let tokens = tokenize(text).tokens;
                let mut terms = Vec::with_capacity(tokens.len().saturating_mul(2));
                for pair in tokens.windows(2) {
                    terms.push(format!("{} {}", pair[0], pair[1]));
                }
                terms.extend(tokens);
                terms
            }
            Channel::Char3 => char_ngrams(text, 3).expect("3 >= 1"),
        }
    }
}

/// A fitted term dictionary: contiguous column ids, document frequencies and
/// the corpus size they were counted over.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    channel: Channel,
    terms: Vec<String>,
    columns: HashMap<String, usize>,
    document_frequency: Vec<u32>,
    n_docs: u32,
}

impl Vocabulary {
    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> u32 {
        self.n_docs
    }

    pub fn column(&self, term: &str) -> Option<usize> {
        self.columns.get(term).copied()
    }

    /// Term at a column id; columns are assigned in rank order (corpus
    /// frequency descending, ties lexicographic).
    pub fn term(&self, column: usize) -> &str {
        &self.terms[column]
    }

    pub fn document_frequency(&self, column: usize) -> u32 {
        self.document_frequency[column]
    }

    /// Smooth inverse document frequency of a column.
    pub fn idf(&self, column: usize) -> f64 {
        let n = f64::from(self.n_docs);
        let df = f64::from(self.document_frequency[column]);
        ((1.0 + n) / (1.0 + df)).ln() + 1.0
    }

    /// Rebuild from serialized parts (used by the archive reader).
    pub(crate) fn from_parts(
        channel: Channel,
        terms: Vec<String>,
        document_frequency: Vec<u32>,
        n_docs: u32,
    ) -> Self {
        let columns = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Vocabulary {
            channel,
            terms,
            columns,
            document_frequency,
            n_docs,
        }
    }

    pub(crate) fn parts(&self) -> (&[String], &[u32], u32) {
        (&self.terms, &self.document_frequency, self.n_docs)
    }
}

/// Fit a vocabulary over a corpus.
///
/// Terms whose document-frequency ratio exceeds `max_df` are dropped; the
/// survivors are ranked by total corpus frequency (ties lexicographic) and
/// truncated to `k` when a cap is given. The character channel conventionally
/// passes `None` to keep every surviving 3-gram.
pub fn build_vocabulary(
    corpus: &Corpus,
    channel: Channel,
    k: Option<usize>,
    max_df: f64,
) -> Result<Vocabulary> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus {
            name: corpus.name().to_string(),
        });
    }
    if !(max_df > 0.0 && max_df <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "max_df must lie in (0, 1], got {max_df}"
        )));
    }
    if k == Some(0) {
        return Err(Error::InvalidParameter(
            "vocabulary cap k must be >= 1".into(),
        ));
    }

    let n_docs = corpus.len();
    let mut corpus_freq: HashMap<String, u64> = HashMap::new();
    let mut doc_freq: HashMap<String, u32> = HashMap::new();
    for doc in corpus.iter() {
        let terms = channel.terms(&doc.text);
        let mut local: HashMap<&str, u64> = HashMap::new();
        for term in &terms {
            *local.entry(term.as_str()).or_insert(0) += 1;
        }
        for (term, count) in local {
            match corpus_freq.get_mut(term) {
                Some(total) => *total += count,
                None => {
                    corpus_freq.insert(term.to_string(), count);
                }
            }
            match doc_freq.get_mut(term) {
                Some(df) => *df += 1,
                None => {
                    doc_freq.insert(term.to_string(), 1);
                }
            }
        }
    }

    let mut ranked: Vec<(String, u64)> = corpus_freq
        .into_iter()
        .filter(|(term, _)| {
            let df = doc_freq[term.as_str()];
            f64::from(df) / n_docs as f64 <= max_df
        })
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    if let Some(cap) = k {
        ranked.truncate(cap);
    }

    let terms: Vec<String> = ranked.into_iter().map(|(t, _)| t).collect();
    let document_frequency: Vec<u32> = terms.iter().map(|t| doc_freq[t.as_str()]).collect();
    let columns: HashMap<String, usize> = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    Ok(Vocabulary {
        channel,
        terms,
        columns,
        document_frequency,
        n_docs: n_docs as u32,
    })
}

/// TFiDF vector of one document's term stream: raw (or binarized) term count
/// times smooth idf, L2-normalized. Out-of-vocabulary terms are dropped.
pub fn tfidf_transform<S: AsRef<str>>(
    terms: &[S],
    vocab: &Vocabulary,
    binary_tf: bool,
) -> SparseVector {
    let mut counts: HashMap<usize, f64> = HashMap::new();
    for term in terms {
        if let Some(col) = vocab.column(term.as_ref()) {
            let slot = counts.entry(col).or_insert(0.0);
            if binary_tf {
                *slot = 1.0;
            } else {
                *slot += 1.0;
            }
        }
    }
    let mut vector = SparseVector::from_pairs(
        vocab.len(),
        counts
            .into_iter()
            .map(|(col, tf)| (col, tf * vocab.idf(col))),
    );
    vector.l2_normalize();
    vector
}

/// Convenience: extract the channel's terms from raw text and transform.
pub fn tfidf_transform_text(text: &str, vocab: &Vocabulary, binary_tf: bool) -> SparseVector {
    tfidf_transform(&vocab.channel().terms(text), vocab, binary_tf)
}

/// The fitted Naive-Bayes log-count ratio vector.
#[derive(Debug, Clone, PartialEq)]
pub struct NbRatios {
    pub r: Vec<f64>,
    pub alpha: f64,
}

impl NbRatios {
    pub fn dim(&self) -> usize {
        self.r.len()
    }
}

/// Fit the NB ratio vector from training rows and labels:
/// `p = alpha + sum of positive rows`, `q = alpha + sum of negative rows`,
/// `r = ln((p/||p||_1) / (q/||q||_1))` elementwise.
pub fn fit_nb_ratios(rows: &[SparseVector], labels: &[u8], alpha: f64) -> Result<NbRatios> {
    if rows.is_empty() || rows.len() != labels.len() {
        return Err(Error::InvalidParameter(format!(
            "need equally many rows and labels, got {} rows and {} labels",
            rows.len(),
            labels.len()
        )));
    }
    if alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "smoothing alpha must be positive, got {alpha}"
        )));
    }
    let dim = rows[0].dim();
    for row in rows {
        if row.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: row.dim(),
            });
        }
    }

    let mut p = vec![alpha; dim];
    let mut q = vec![alpha; dim];
    for (row, &label) in rows.iter().zip(labels) {
        let target = if label == 1 { &mut p } else { &mut q };
        for (i, v) in row.iter() {
            target[i] += v;
        }
    }
    let p_norm: f64 = p.iter().map(|v| v.abs()).sum();
    let q_norm: f64 = q.iter().map(|v| v.abs()).sum();
    // ln((p/||p||) / (q/||q||)) computed as a difference of per-class log
    // terms so that swapping the labels negates r bit for bit.
    let ln_p_norm = p_norm.ln();
    let ln_q_norm = q_norm.ln();
    let r = p
        .iter()
        .zip(&q)
        .map(|(pi, qi)| (pi.ln() - ln_p_norm) - (qi.ln() - ln_q_norm))
        .collect();
    Ok(NbRatios { r, alpha })
}

/// Elementwise product of a TFiDF row with the ratio vector. Entries that
/// become exactly zero are dropped from the sparse representation.
pub fn apply_nb_scaling(x: &SparseVector, ratios: &NbRatios) -> Result<SparseVector> {
    if x.dim() != ratios.dim() {
        return Err(Error::DimensionMismatch {
            expected: ratios.dim(),
            got: x.dim(),
        });
    }
    Ok(SparseVector::from_pairs(
        x.dim(),
        x.iter().map(|(i, v)| (i, v * ratios.r[i])),
    ))
}

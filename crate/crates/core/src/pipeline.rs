//! The end-to-end feature pipeline: fit per-family state on a training
//! corpus, then turn any document into one sparse feature row.
//!
//! The feature layout is frozen at fit time in this fixed family order,
//! skipping disabled families:
//!
//! ```text
//! [ word n-grams | char trigrams | bias(2) | lexical(L) | richness(5) | readability(3) ]
//! ```
//!
//! All fitted state (vocabularies, NB ratios, induced bias lexicons, count
//! lexicons, optional standardizer) comes from the training corpus only, so
//! no label information leaks into validation features.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::archive::{ArchiveReader, ArchiveWriter, Decoder, Encoder, SectionTag};
use crate::corpus::{Corpus, Document};
use crate::error::{Error, Result};
use crate::lexicons::{
    bias_score, induce_bias_lexicons, lexicon_count, semantic_orientation, Lexicon,
    DEFAULT_SO_THRESHOLD,
};
use crate::readability::{readability_block, READABILITY_DIM};
use crate::sparse::SparseVector;
use crate::stylometry::{richness_features, RICHNESS_DIM};
use crate::textproc::tokenize;
use crate::vectorizer::{
    apply_nb_scaling, build_vocabulary, fit_nb_ratios, tfidf_transform, Channel, NbRatios,
    Vocabulary,
};

/// Width of the bias block: one score per induced lexicon side.
pub const BIAS_DIM: usize = 2;

/// The six feature families, in layout order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FeatureFamily {
    WordNgrams,
    CharTrigrams,
    Bias,
    Lexical,
    Richness,
    Readability,
}

impl FeatureFamily {
    pub const ALL: [FeatureFamily; 6] = [
        FeatureFamily::WordNgrams,
        FeatureFamily::CharTrigrams,
        FeatureFamily::Bias,
        FeatureFamily::Lexical,
        FeatureFamily::Richness,
        FeatureFamily::Readability,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureFamily::WordNgrams => "word_ngrams",
            FeatureFamily::CharTrigrams => "char_trigrams",
            FeatureFamily::Bias => "bias",
            FeatureFamily::Lexical => "lexical",
            FeatureFamily::Richness => "richness",
            FeatureFamily::Readability => "readability",
        }
    }

    pub fn parse(s: &str) -> Result<FeatureFamily> {
        FeatureFamily::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown feature family `{s}`")))
    }

    fn tag(self) -> u8 {
        match self {
            FeatureFamily::WordNgrams => 0,
            FeatureFamily::CharTrigrams => 1,
            FeatureFamily::Bias => 2,
            FeatureFamily::Lexical => 3,
            FeatureFamily::Richness => 4,
            FeatureFamily::Readability => 5,
        }
    }

    fn from_tag(tag: u8) -> Option<FeatureFamily> {
        FeatureFamily::ALL.into_iter().find(|f| f.tag() == tag)
    }
}

/// Everything that shapes the feature space and its preprocessing.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    /// Enabled families; at least one required.
    pub families: BTreeSet<FeatureFamily>,
    /// Word-channel vocabulary cap (most frequent \[1,2\]-grams kept).
    pub k: usize,
    /// Optional character-channel cap; `None` keeps all surviving trigrams.
    pub char_k: Option<usize>,
    /// Terms present in more than this fraction of documents are dropped.
    pub max_df: f64,
    /// NB smoothing parameter.
    pub alpha: f64,
    /// Apply NB ratio scaling to the word channel.
    pub nb_scaling: bool,
    /// Extend NB ratio scaling to the character channel.
    pub nb_scale_char: bool,
    /// Binarize term frequency before idf weighting.
    pub binary_tf: bool,
    /// Divide lexicon counts by document length.
    pub normalize_lexicon_counts: bool,
    /// Standardize dense feature blocks to zero mean / unit variance using
    /// training statistics (applied before the constant scale factors).
    pub standardize: bool,
    /// |SO| threshold for bias-lexicon induction.
    pub so_threshold: f64,
    /// Per-family constant scale factor; families absent from the map use 1.
    pub scale_factors: BTreeMap<FeatureFamily, f64>,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        let mut scale_factors = BTreeMap::new();
        scale_factors.insert(FeatureFamily::WordNgrams, 1.0);
        scale_factors.insert(FeatureFamily::CharTrigrams, 1.0);
        scale_factors.insert(FeatureFamily::Bias, 0.01);
        scale_factors.insert(FeatureFamily::Lexical, 0.01);
        scale_factors.insert(FeatureFamily::Richness, 0.01);
        scale_factors.insert(FeatureFamily::Readability, 0.01);
        FeatureConfig {
            families: FeatureFamily::ALL.into_iter().collect(),
            k: 200_000,
            char_k: None,
            max_df: 0.9,
            alpha: 1.0,
            nb_scaling: true,
            nb_scale_char: false,
            binary_tf: false,
            normalize_lexicon_counts: false,
            standardize: false,
            so_threshold: DEFAULT_SO_THRESHOLD,
            scale_factors,
        }
    }
}

impl FeatureConfig {
    /// Config with exactly the given families enabled and defaults elsewhere.
    pub fn with_families(families: impl IntoIterator<Item = FeatureFamily>) -> Self {
        FeatureConfig {
            families: families.into_iter().collect(),
            ..FeatureConfig::default()
        }
    }

    pub fn enabled(&self, family: FeatureFamily) -> bool {
        self.families.contains(&family)
    }

    pub fn scale(&self, family: FeatureFamily) -> f64 {
        self.scale_factors.get(&family).copied().unwrap_or(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one feature family must be enabled".into(),
            ));
        }
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        if self.char_k == Some(0) {
            return Err(Error::InvalidParameter(
                "char_k must be >= 1 when set".into(),
            ));
        }
        if !(self.max_df > 0.0 && self.max_df <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "max_df must lie in (0, 1], got {}",
                self.max_df
            )));
        }
        if self.alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if self.so_threshold <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "so_threshold must be positive, got {}",
                self.so_threshold
            )));
        }
        for (family, factor) in &self.scale_factors {
            if !(*factor > 0.0 && factor.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "scale factor for {} must be a positive number, got {factor}",
                    family.as_str()
                )));
            }
        }
        Ok(())
    }
}

/// One family's slice of the feature space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayoutEntry {
    pub family: FeatureFamily,
    pub offset: usize,
    pub width: usize,
}

/// Training-set mean and standard deviation per dense column, keyed by
/// family. Columns with zero variance standardize to zero.
#[derive(Debug, Clone, PartialEq, Default)]
struct Standardizer {
    stats: BTreeMap<FeatureFamily, Vec<(f64, f64)>>,
}

impl Standardizer {
    fn apply(&self, family: FeatureFamily, block: &mut [f64]) {
        if let Some(stats) = self.stats.get(&family) {
            for (value, (mean, std)) in block.iter_mut().zip(stats) {
                *value = if *std > 0.0 {
                    (*value - mean) / std
                } else {
                    0.0
                };
            }
        }
    }
}

/// A fitted feature pipeline. Immutable after [`fit_pipeline`]; `transform`
/// is pure and safe to call from many threads.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedPipeline {
    config: FeatureConfig,
    word_vocab: Option<Vocabulary>,
    char_vocab: Option<Vocabulary>,
    word_nb: Option<NbRatios>,
    char_nb: Option<NbRatios>,
    bias_lexicons: Option<(Lexicon, Lexicon)>,
    count_lexicons: Vec<Lexicon>,
    standardizer: Option<Standardizer>,
    layout: Vec<LayoutEntry>,
}

fn compute_layout(
    config: &FeatureConfig,
    word_width: usize,
    char_width: usize,
    lexical_width: usize,
) -> Vec<LayoutEntry> {
    let mut layout = Vec::new();
    let mut offset = 0;
    for family in FeatureFamily::ALL {
        if !config.enabled(family) {
            continue;
        }
        let width = match family {
            FeatureFamily::WordNgrams => word_width,
            FeatureFamily::CharTrigrams => char_width,
            FeatureFamily::Bias => BIAS_DIM,
            FeatureFamily::Lexical => lexical_width,
            FeatureFamily::Richness => RICHNESS_DIM,
            FeatureFamily::Readability => READABILITY_DIM,
        };
        layout.push(LayoutEntry {
            family,
            offset,
            width,
        });
        offset += width;
    }
    layout
}

/// Fit the pipeline on a labeled training corpus. `count_lexicons` are the
/// user-supplied cue lexicons backing the lexical family (may be empty, in
/// which case that block has zero width).
pub fn fit_pipeline(
    train: &Corpus,
    config: &FeatureConfig,
    count_lexicons: &[Lexicon],
) -> Result<FittedPipeline> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyCorpus {
            name: train.name().to_string(),
        });
    }
    if !train.is_labeled() {
        return Err(Error::UnlabeledCorpus {
            name: train.name().to_string(),
        });
    }
    let labels = train.labels()?;

    let word_vocab = if config.enabled(FeatureFamily::WordNgrams) {
        Some(build_vocabulary(
            train,
            Channel::Word12,
            Some(config.k),
            config.max_df,
        )?)
    } else {
        None
    };
    let char_vocab = if config.enabled(FeatureFamily::CharTrigrams) {
        Some(build_vocabulary(
            train,
            Channel::Char3,
            config.char_k,
            config.max_df,
        )?)
    } else {
        None
    };

    let fit_channel_nb = |vocab: &Vocabulary| -> Result<NbRatios> {
        let rows: Vec<SparseVector> = train
            .iter()
            .map(|doc| tfidf_transform(&vocab.channel().terms(&doc.text), vocab, config.binary_tf))
            .collect();
        fit_nb_ratios(&rows, &labels, config.alpha)
    };
    let word_nb = match (&word_vocab, config.nb_scaling) {
        (Some(vocab), true) => Some(fit_channel_nb(vocab)?),
        _ => None,
    };
    let char_nb = match (&char_vocab, config.nb_scale_char) {
        (Some(vocab), true) => Some(fit_channel_nb(vocab)?),
        _ => None,
    };

    let bias_lexicons = if config.enabled(FeatureFamily::Bias) {
        let neg: Vec<Document> = train
            .iter()
            .filter(|d| d.label == Some(false))
            .cloned()
            .collect();
        let pos: Vec<Document> = train
            .iter()
            .filter(|d| d.label == Some(true))
            .cloned()
            .collect();
        if neg.is_empty() || pos.is_empty() {
            return Err(Error::SingleClass);
        }
        let neg = Corpus::new(format!("{}-neg", train.name()), neg)?;
        let pos = Corpus::new(format!("{}-pos", train.name()), pos)?;
        let scores = semantic_orientation(&neg, &pos)?;
        Some(induce_bias_lexicons(&scores, config.so_threshold)?)
    } else {
        None
    };

    let count_lexicons = if config.enabled(FeatureFamily::Lexical) {
        count_lexicons.to_vec()
    } else {
        Vec::new()
    };

    let layout = compute_layout(
        config,
        word_vocab.as_ref().map_or(0, Vocabulary::len),
        char_vocab.as_ref().map_or(0, Vocabulary::len),
        count_lexicons.len(),
    );

    let mut pipeline = FittedPipeline {
        config: config.clone(),
        word_vocab,
        char_vocab,
        word_nb,
        char_nb,
        bias_lexicons,
        count_lexicons,
        standardizer: None,
        layout,
    };

    if config.standardize {
        pipeline.standardizer = Some(pipeline.fit_standardizer(train));
    }
    Ok(pipeline)
}

impl FittedPipeline {
    pub fn config(&self) -> &FeatureConfig {
        &self.config
    }

    pub fn layout(&self) -> &[LayoutEntry] {
        &self.layout
    }

    pub fn total_dim(&self) -> usize {
        self.layout.last().map_or(0, |e| e.offset + e.width)
    }

    /// Column range occupied by a family, when enabled.
    pub fn block_range(&self, family: FeatureFamily) -> Option<std::ops::Range<usize>> {
        self.layout
            .iter()
            .find(|e| e.family == family)
            .map(|e| e.offset..e.offset + e.width)
    }

    pub fn word_vocabulary(&self) -> Option<&Vocabulary> {
        self.word_vocab.as_ref()
    }

    pub fn char_vocabulary(&self) -> Option<&Vocabulary> {
        self.char_vocab.as_ref()
    }

    pub fn nb_ratios(&self) -> Option<&NbRatios> {
        self.word_nb.as_ref()
    }

    pub fn bias_lexicons(&self) -> Option<(&Lexicon, &Lexicon)> {
        self.bias_lexicons.as_ref().map(|(l, r)| (l, r))
    }

    pub fn count_lexicons(&self) -> &[Lexicon] {
        &self.count_lexicons
    }

    fn dense_families(&self) -> impl Iterator<Item = FeatureFamily> + '_ {
        self.layout.iter().map(|e| e.family).filter(|f| {
            matches!(
                f,
                FeatureFamily::Bias
                    | FeatureFamily::Lexical
                    | FeatureFamily::Richness
                    | FeatureFamily::Readability
            )
        })
    }

    fn fit_standardizer(&self, train: &Corpus) -> Standardizer {
        let mut stats = BTreeMap::new();
        let families: Vec<FeatureFamily> = self.dense_families().collect();
        if families.is_empty() {
            return Standardizer::default();
        }
        let n = train.len() as f64;
        let mut sums: BTreeMap<FeatureFamily, (Vec<f64>, Vec<f64>)> = families
            .iter()
            .map(|&f| {
                let width = self.block_range(f).map_or(0, |r| r.len());
                (f, (vec![0.0; width], vec![0.0; width]))
            })
            .collect();
        for doc in train.iter() {
            let tokens = tokenize(&doc.text);
            for &family in &families {
                let block = self.raw_dense_block(family, &tokens);
                let (sum, sum_sq) = sums.get_mut(&family).expect("family present");
                for (j, v) in block.iter().enumerate() {
                    sum[j] += v;
                    sum_sq[j] += v * v;
                }
            }
        }
        for (family, (sum, sum_sq)) in sums {
            let pairs = sum
                .iter()
                .zip(&sum_sq)
                .map(|(s, sq)| {
                    let mean = s / n;
                    let var = (sq / n - mean * mean).max(0.0);
                    (mean, var.sqrt())
                })
                .collect();
            stats.insert(family, pairs);
        }
        Standardizer { stats }
    }

    /// The unscaled values of one dense family for a tokenized document.
    fn raw_dense_block(
        &self,
        family: FeatureFamily,
        tokens: &crate::textproc::TokenizedDoc,
    ) -> Vec<f64> {
        match family {
            FeatureFamily::Bias => {
                let (left, right) = self.bias_lexicons.as_ref().expect("bias fitted");
                vec![
                    bias_score(&tokens.tokens, left),
                    bias_score(&tokens.tokens, right),
                ]
            }
            FeatureFamily::Lexical => self
                .count_lexicons
                .iter()
                .map(|lex| {
                    let count = lexicon_count(&tokens.tokens, lex) as f64;
                    if self.config.normalize_lexicon_counts && !tokens.tokens.is_empty() {
                        count / tokens.tokens.len() as f64
                    } else {
                        count
                    }
                })
                .collect(),
            FeatureFamily::Richness => richness_features(&tokens.tokens).to_block().to_vec(),
            FeatureFamily::Readability => readability_block(tokens).to_vec(),
            FeatureFamily::WordNgrams | FeatureFamily::CharTrigrams => {
                unreachable!("n-gram families are not dense")
            }
        }
    }

    /// Featurize one document into a sparse row of `total_dim()` columns.
    pub fn transform(&self, doc: &Document) -> SparseVector {
        let needs_tokens = self
            .layout
            .iter()
            .any(|e| e.family != FeatureFamily::CharTrigrams);
        let tokens = if needs_tokens {
            Some(tokenize(&doc.text))
        } else {
            None
        };

        let mut blocks: Vec<SparseVector> = Vec::with_capacity(self.layout.len());
        for entry in &self.layout {
            let scale = self.config.scale(entry.family);
            let mut block = match entry.family {
                FeatureFamily::WordNgrams => {
                    let vocab = self.word_vocab.as_ref().expect("word vocab fitted");
                    let terms = vocab.channel().terms(&doc.text);
                    let tfidf = tfidf_transform(&terms, vocab, self.config.binary_tf);
                    match &self.word_nb {
                        Some(nb) => apply_nb_scaling(&tfidf, nb)
                            .expect("NB ratios fitted with matching dimension"),
                        None => tfidf,
                    }
                }
                FeatureFamily::CharTrigrams => {
                    let vocab = self.char_vocab.as_ref().expect("char vocab fitted");
                    let terms = vocab.channel().terms(&doc.text);
                    let tfidf = tfidf_transform(&terms, vocab, self.config.binary_tf);
                    match &self.char_nb {
                        Some(nb) => apply_nb_scaling(&tfidf, nb)
                            .expect("NB ratios fitted with matching dimension"),
                        None => tfidf,
                    }
                }
                dense => {
                    let tokens = tokens.as_ref().expect("tokens computed for dense families");
                    let mut values = self.raw_dense_block(dense, tokens);
                    if let Some(standardizer) = &self.standardizer {
                        standardizer.apply(dense, &mut values);
                    }
                    SparseVector::from_pairs(values.len(), values.into_iter().enumerate())
                }
            };
            if scale != 1.0 {
                block.scale(scale);
            }
            blocks.push(block);
        }
        SparseVector::hconcat(&blocks)
    }

    /// Featurize every document of a corpus, in corpus order.
    pub fn transform_corpus(&self, corpus: &Corpus) -> Vec<SparseVector> {
        corpus.iter().map(|doc| self.transform(doc)).collect()
    }

    /// Append this pipeline's sections to an archive under construction.
    pub fn write_into(&self, writer: &mut ArchiveWriter) {
        writer.add(SectionTag::Config, encode_config(&self.config));
        if let Some(vocab) = &self.word_vocab {
            writer.add(SectionTag::WordVocab, encode_vocab(vocab));
        }
        if let Some(vocab) = &self.char_vocab {
            writer.add(SectionTag::CharVocab, encode_vocab(vocab));
        }
        if self.word_nb.is_some() || self.char_nb.is_some() {
            let mut enc = Encoder::new();
            for nb in [&self.word_nb, &self.char_nb] {
                match nb {
                    Some(nb) => {
                        enc.put_bool(true);
                        enc.put_f64(nb.alpha);
                        enc.put_f64_slice(&nb.r);
                    }
                    None => enc.put_bool(false),
                }
            }
            writer.add(SectionTag::NbRatios, enc);
        }
        if let Some((left, right)) = &self.bias_lexicons {
            let mut enc = Encoder::new();
            for lex in [left, right] {
                enc.put_str(lex.name());
                enc.put_str_slice(&lex.terms().collect::<Vec<_>>());
            }
            writer.add(SectionTag::BiasLexicons, enc);
        }
        if !self.count_lexicons.is_empty() {
            let mut enc = Encoder::new();
            enc.put_u64(self.count_lexicons.len() as u64);
            for lex in &self.count_lexicons {
                enc.put_str(lex.name());
                enc.put_str_slice(&lex.terms().collect::<Vec<_>>());
            }
            writer.add(SectionTag::CountLexicons, enc);
        }
        if let Some(standardizer) = &self.standardizer {
            let mut enc = Encoder::new();
            enc.put_u64(standardizer.stats.len() as u64);
            for (family, pairs) in &standardizer.stats {
                enc.put_u8(family.tag());
                enc.put_f64_slice(&pairs.iter().map(|(m, _)| *m).collect::<Vec<_>>());
                enc.put_f64_slice(&pairs.iter().map(|(_, s)| *s).collect::<Vec<_>>());
            }
            writer.add(SectionTag::Standardizer, enc);
        }
    }

    /// Reconstruct a pipeline from a parsed archive.
    pub fn read_from(reader: &ArchiveReader) -> Result<FittedPipeline> {
        let mut dec = reader.require(SectionTag::Config)?;
        let config = decode_config(&mut dec)?;
        dec.finish()?;

        let word_vocab = match reader.find(SectionTag::WordVocab) {
            Some(payload) => {
                let mut dec = Decoder::new("word_vocab", payload);
                let vocab = decode_vocab(&mut dec, Channel::Word12)?;
                dec.finish()?;
                Some(vocab)
            }
            None => None,
        };
        let char_vocab = match reader.find(SectionTag::CharVocab) {
            Some(payload) => {
                let mut dec = Decoder::new("char_vocab", payload);
                let vocab = decode_vocab(&mut dec, Channel::Char3)?;
                dec.finish()?;
                Some(vocab)
            }
            None => None,
        };

        let (word_nb, char_nb) = match reader.find(SectionTag::NbRatios) {
            Some(payload) => {
                let mut dec = Decoder::new("nb_ratios", payload);
                let read_one = |dec: &mut Decoder| -> Result<Option<NbRatios>> {
                    if dec.bool()? {
                        let alpha = dec.f64()?;
                        let r = dec.f64_vec()?;
                        Ok(Some(NbRatios { r, alpha }))
                    } else {
                        Ok(None)
                    }
                };
                let word = read_one(&mut dec)?;
                let chr = read_one(&mut dec)?;
                dec.finish()?;
                (word, chr)
            }
            None => (None, None),
        };

        let bias_lexicons = match reader.find(SectionTag::BiasLexicons) {
            Some(payload) => {
                let mut dec = Decoder::new("bias_lexicons", payload);
                let read_lex = |dec: &mut Decoder| -> Result<Lexicon> {
                    let name = dec.str()?;
                    let terms = dec.str_vec()?;
                    Lexicon::new(name, terms)
                };
                let left = read_lex(&mut dec)?;
                let right = read_lex(&mut dec)?;
                dec.finish()?;
                Some((left, right))
            }
            None => None,
        };

        let count_lexicons = match reader.find(SectionTag::CountLexicons) {
            Some(payload) => {
                let mut dec = Decoder::new("count_lexicons", payload);
                let n = dec.len_prefix()?;
                let mut lexicons = Vec::with_capacity(n);
                for _ in 0..n {
                    let name = dec.str()?;
                    let terms = dec.str_vec()?;
                    lexicons.push(Lexicon::new(name, terms)?);
                }
                dec.finish()?;
                lexicons
            }
            None => Vec::new(),
        };

        let standardizer = match reader.find(SectionTag::Standardizer) {
            Some(payload) => {
                let mut dec = Decoder::new("standardizer", payload);
                let n = dec.len_prefix()?;
                let mut stats = BTreeMap::new();
                for _ in 0..n {
                    let tag = dec.u8()?;
                    let family = FeatureFamily::from_tag(tag).ok_or_else(|| Error::Archive {
                        section: "standardizer".into(),
                        message: format!("unknown family tag {tag}"),
                    })?;
                    let means = dec.f64_vec()?;
                    let stds = dec.f64_vec()?;
                    if means.len() != stds.len() {
                        return Err(Error::Archive {
                            section: "standardizer".into(),
                            message: "mean/std length mismatch".into(),
                        });
                    }
                    stats.insert(family, means.into_iter().zip(stds).collect());
                }
                dec.finish()?;
                Some(Standardizer { stats })
            }
            None => None,
        };

        let layout = compute_layout(
            &config,
            word_vocab.as_ref().map_or(0, Vocabulary::len),
            char_vocab.as_ref().map_or(0, Vocabulary::len),
            count_lexicons.len(),
        );
        Ok(FittedPipeline {
            config,
            word_vocab,
            char_vocab,
            word_nb,
            char_nb,
            bias_lexicons,
            count_lexicons,
            standardizer,
            layout,
        })
    }
}

fn encode_config(config: &FeatureConfig) -> Encoder {
    let mut enc = Encoder::new();
    enc.put_u64(config.families.len() as u64);
    for family in &config.families {
        enc.put_u8(family.tag());
    }
    enc.put_u64(config.k as u64);
    match config.char_k {
        Some(k) => {
            enc.put_bool(true);
            enc.put_u64(k as u64);
        }
        None => enc.put_bool(false),
    }
    enc.put_f64(config.max_df);
    enc.put_f64(config.alpha);
    enc.put_bool(config.nb_scaling);
    enc.put_bool(config.nb_scale_char);
    enc.put_bool(config.binary_tf);
    enc.put_bool(config.normalize_lexicon_counts);
    enc.put_bool(config.standardize);
    enc.put_f64(config.so_threshold);
    enc.put_u64(config.scale_factors.len() as u64);
    for (family, factor) in &config.scale_factors {
        enc.put_u8(family.tag());
        enc.put_f64(*factor);
    }
    enc
}

fn decode_family(dec: &mut Decoder, section: &str) -> Result<FeatureFamily> {
    let tag = dec.u8()?;
    FeatureFamily::from_tag(tag).ok_or_else(|| Error::Archive {
        section: section.into(),
        message: format!("unknown family tag {tag}"),
    })
}

fn decode_config(dec: &mut Decoder) -> Result<FeatureConfig> {
    let n_families = dec.len_prefix()?;
    let mut families = BTreeSet::new();
    for _ in 0..n_families {
        families.insert(decode_family(dec, "config")?);
    }
    let k = dec.u64()? as usize;
    let char_k = if dec.bool()? {
        Some(dec.u64()? as usize)
    } else {
        None
    };
    let max_df = dec.f64()?;
    let alpha = dec.f64()?;
    let nb_scaling = dec.bool()?;
    let nb_scale_char = dec.bool()?;
    let binary_tf = dec.bool()?;
    let normalize_lexicon_counts = dec.bool()?;
    let standardize = dec.bool()?;
    let so_threshold = dec.f64()?;
    let n_scales = dec.len_prefix()?;
    let mut scale_factors = BTreeMap::new();
    for _ in 0..n_scales {
        let family = decode_family(dec, "config")?;
        scale_factors.insert(family, dec.f64()?);
    }
    Ok(FeatureConfig {
        families,
        k,
        char_k,
        max_df,
        alpha,
        nb_scaling,
        nb_scale_char,
        binary_tf,
        normalize_lexicon_counts,
        standardize,
        so_threshold,
        scale_factors,
    })
}

fn encode_vocab(vocab: &Vocabulary) -> Encoder {
    let (terms, df, n_docs) = vocab.parts();
    let mut enc = Encoder::new();
    enc.put_str_slice(terms);
    enc.put_u32_slice(df);
    enc.put_u32(n_docs);
    enc
}

fn decode_vocab(dec: &mut Decoder, channel: Channel) -> Result<Vocabulary> {
    let terms = dec.str_vec()?;
    let df = dec.u32_vec()?;
    let n_docs = dec.u32()?;
    if terms.len() != df.len() {
        return Err(Error::Archive {
            section: match channel {
                Channel::Word12 => "word_vocab".into(),
                Channel::Char3 => "char_vocab".into(),
            },
            message: "term/df length mismatch".into(),
        });
    }
    Ok(Vocabulary::from_parts(channel, terms, df, n_docs))
}

/// Serialize a fitted pipeline into standalone archive bytes.
pub fn save_pipeline(pipeline: &FittedPipeline) -> Vec<u8> {
    let mut writer = ArchiveWriter::new();
    pipeline.write_into(&mut writer);
    writer.finish()
}

/// Parse a pipeline from archive bytes (standalone or combined with a model).
pub fn load_pipeline(bytes: &[u8]) -> Result<FittedPipeline> {
    FittedPipeline::read_from(&ArchiveReader::parse(bytes)?)
}

/// Write a pipeline archive to disk.
pub fn save_pipeline_file(pipeline: &FittedPipeline, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, save_pipeline(pipeline)).map_err(|e| Error::io(path, e))
}

/// Read a pipeline archive from disk.
pub fn load_pipeline_file(path: impl AsRef<Path>) -> Result<FittedPipeline> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    load_pipeline(&bytes)
}

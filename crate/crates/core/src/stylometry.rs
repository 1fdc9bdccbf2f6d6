//! Vocabulary-richness statistics over the word-frequency spectrum.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};

/// Width of the richness feature block produced by [`richness_features`].
pub const RICHNESS_DIM: usize = 5;

/// Clamp applied to `legomena / types` when every type is a hapax, keeping
/// Honoré's R finite on short texts.
const HONORE_CLAMP: f64 = 1e-6;

/// Token/type counts plus the frequency spectrum: `spectrum[i]` is the number
/// of types occurring exactly `i` times.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrequencySpectrum {
    pub n_tokens: usize,
    pub n_types: usize,
    pub spectrum: BTreeMap<usize, usize>,
}

impl FrequencySpectrum {
    /// Number of types with exactly `freq` occurrences.
    pub fn types_with_frequency(&self, freq: usize) -> usize {
        self.spectrum.get(&freq).copied().unwrap_or(0)
    }
}

/// The five richness features, in feature-block order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RichnessFeatures {
    pub ttr: f64,
    pub hapax_legomena: usize,
    pub hapax_dislegomena: usize,
    pub honore_r: f64,
    pub yule_k: f64,
}

impl RichnessFeatures {
    pub fn to_block(self) -> [f64; RICHNESS_DIM] {
        [
            self.ttr,
            self.hapax_legomena as f64,
            self.hapax_dislegomena as f64,
            self.honore_r,
            self.yule_k,
        ]
    }
}

/// Exact frequency spectrum of a token sequence.
pub fn frequency_spectrum<S: AsRef<str>>(tokens: &[S]) -> FrequencySpectrum {
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in tokens {
        *counts.entry(t.as_ref()).or_insert(0) += 1;
    }
    let mut spectrum: BTreeMap<usize, usize> = BTreeMap::new();
    for &freq in counts.values() {
        *spectrum.entry(freq).or_insert(0) += 1;
    }
    FrequencySpectrum {
        n_tokens: tokens.len(),
        n_types: counts.len(),
        spectrum,
    }
}

/// Honoré's R: `100 * ln(tokens) / (1 - legomena/types)`.
///
/// When every type is a hapax the denominator vanishes; the ratio is clamped
/// to `1 - 1e-6` so short documents still featurize.
pub fn honore_r(spec: &FrequencySpectrum) -> Result<f64> {
    if spec.n_tokens == 0 {
        return Err(Error::EmptyText);
    }
    let legomena = spec.types_with_frequency(1) as f64;
    let ratio = (legomena / spec.n_types as f64).min(1.0 - HONORE_CLAMP);
    Ok(100.0 * (spec.n_tokens as f64).ln() / (1.0 - ratio))
}

/// Yule's characteristic K: `10^4 * (sum_i i^2 * types_i - tokens) / tokens^2`.
pub fn yule_k(spec: &FrequencySpectrum) -> Result<f64> {
    if spec.n_tokens == 0 {
        return Err(Error::EmptyText);
    }
    let inner: f64 = spec
        .spectrum
        .iter()
        .map(|(&freq, &types)| (freq * freq * types) as f64)
        .sum();
    let n = spec.n_tokens as f64;
    Ok(1e4 * (inner - n) / (n * n))
}

/// Bundle all five richness features. Empty input yields all zeros.
pub fn richness_features<S: AsRef<str>>(tokens: &[S]) -> RichnessFeatures {
    let spec = frequency_spectrum(tokens);
    if spec.n_tokens == 0 {
        return RichnessFeatures::default();
    }
    RichnessFeatures {
        ttr: spec.n_types as f64 / spec.n_tokens as f64,
        hapax_legomena: spec.types_with_frequency(1),
        hapax_dislegomena: spec.types_with_frequency(2),
        honore_r: honore_r(&spec).expect("non-empty by construction"),
        yule_k: yule_k(&spec).expect("non-empty by construction"),
    }
}

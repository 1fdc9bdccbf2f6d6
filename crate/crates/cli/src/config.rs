//! TOML schemas: the feature config file, the ablation rows file and the
//! tuning grid file.
//!
//! The feature config has one section per feature family plus a few shared
//! top-level keys; every field is optional and falls back to the library
//! defaults. Lexicon paths are resolved relative to the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use partisan_core::eval::{NamedConfig, ScaleGrid};
use partisan_core::lexicons::load_lexicon;
use partisan_core::pipeline::{FeatureConfig, FeatureFamily};
use partisan_core::Lexicon;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub max_df: Option<f64>,
    pub alpha: Option<f64>,
    pub binary_tf: Option<bool>,
    pub standardize: Option<bool>,
    #[serde(default)]
    pub word_ngrams: WordSection,
    #[serde(default)]
    pub char_trigrams: CharSection,
    #[serde(default)]
    pub bias: BiasSection,
    #[serde(default)]
    pub lexical: LexicalSection,
    #[serde(default)]
    pub richness: PlainSection,
    #[serde(default)]
    pub readability: PlainSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordSection {
    pub enabled: Option<bool>,
    pub k: Option<usize>,
    pub nb_scaling: Option<bool>,
    pub scale: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharSection {
    pub enabled: Option<bool>,
    pub k: Option<usize>,
    pub nb_scaling: Option<bool>,
    pub scale: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasSection {
    pub enabled: Option<bool>,
    pub so_threshold: Option<f64>,
    pub scale: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LexicalSection {
    pub enabled: Option<bool>,
    #[serde(default)]
    pub lexicons: Vec<PathBuf>,
    pub normalize: Option<bool>,
    pub scale: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlainSection {
    pub enabled: Option<bool>,
    pub scale: Option<f64>,
}

/// A feature config plus the loaded count lexicons it references.
pub struct LoadedConfig {
    pub config: FeatureConfig,
    pub lexicons: Vec<Lexicon>,
    pub lexicon_paths: Vec<PathBuf>,
}

impl ConfigFile {
    pub fn into_loaded(self, base_dir: &Path) -> Result<LoadedConfig> {
        let defaults = FeatureConfig::default();
        let mut families = std::collections::BTreeSet::new();
        let mut scale_factors = BTreeMap::new();

        let mut family = |on: Option<bool>, scale: Option<f64>, f: FeatureFamily| {
            if on.unwrap_or(true) {
                families.insert(f);
            }
            scale_factors.insert(f, scale.unwrap_or_else(|| defaults.scale(f)));
        };
        family(
            self.word_ngrams.enabled,
            self.word_ngrams.scale,
            FeatureFamily::WordNgrams,
        );
        family(
            self.char_trigrams.enabled,
            self.char_trigrams.scale,
            FeatureFamily::CharTrigrams,
        );
        family(self.bias.enabled, self.bias.scale, FeatureFamily::Bias);
        family(
            self.lexical.enabled,
            self.lexical.scale,
            FeatureFamily::Lexical,
        );
        family(
            self.richness.enabled,
            self.richness.scale,
            FeatureFamily::Richness,
        );
        family(
            self.readability.enabled,
            self.readability.scale,
            FeatureFamily::Readability,
        );

        let config = FeatureConfig {
            families,
            k: self.word_ngrams.k.unwrap_or(defaults.k),
            char_k: self.char_trigrams.k,
            max_df: self.max_df.unwrap_or(defaults.max_df),
            alpha: self.alpha.unwrap_or(defaults.alpha),
            nb_scaling: self.word_ngrams.nb_scaling.unwrap_or(defaults.nb_scaling),
            nb_scale_char: self
                .char_trigrams
                .nb_scaling
                .unwrap_or(defaults.nb_scale_char),
            binary_tf: self.binary_tf.unwrap_or(defaults.binary_tf),
            normalize_lexicon_counts: self
                .lexical
                .normalize
                .unwrap_or(defaults.normalize_lexicon_counts),
            standardize: self.standardize.unwrap_or(defaults.standardize),
            so_threshold: self.bias.so_threshold.unwrap_or(defaults.so_threshold),
            scale_factors,
        };

        let mut lexicons = Vec::new();
        let mut lexicon_paths = Vec::new();
        for rel in &self.lexical.lexicons {
            let path = if rel.is_absolute() {
                rel.clone()
            } else {
                base_dir.join(rel)
            };
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("lexicon")
                .to_string();
            lexicons.push(
                load_lexicon(&path, name)
                    .with_context(|| format!("loading lexicon {}", path.display()))?,
            );
            lexicon_paths.push(path);
        }

        Ok(LoadedConfig {
            config,
            lexicons,
            lexicon_paths,
        })
    }
}

/// Read the feature config, or defaults when no file is given.
pub fn load_feature_config(path: Option<&Path>) -> Result<LoadedConfig> {
    match path {
        None => Ok(LoadedConfig {
            config: FeatureConfig::default(),
            lexicons: Vec::new(),
            lexicon_paths: Vec::new(),
        }),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            let file: ConfigFile = toml::from_str(&text)
                .with_context(|| format!("parsing config {}", path.display()))?;
            let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
            file.into_loaded(base_dir)
        }
    }
}

/// Render a feature config in the config-file schema (used by `tune --out`).
pub fn config_to_toml(config: &FeatureConfig, lexicon_paths: &[PathBuf]) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    writeln!(out, "max_df = {}", config.max_df).unwrap();
    writeln!(out, "alpha = {}", config.alpha).unwrap();
    writeln!(out, "binary_tf = {}", config.binary_tf).unwrap();
    writeln!(out, "standardize = {}", config.standardize).unwrap();

    let section = |out: &mut String, name: &str, family: FeatureFamily| {
        writeln!(out, "\n[{name}]").unwrap();
        writeln!(out, "enabled = {}", config.enabled(family)).unwrap();
    };

    section(&mut out, "word_ngrams", FeatureFamily::WordNgrams);
    writeln!(out, "k = {}", config.k).unwrap();
    writeln!(out, "nb_scaling = {}", config.nb_scaling).unwrap();
    writeln!(out, "scale = {}", config.scale(FeatureFamily::WordNgrams)).unwrap();

    section(&mut out, "char_trigrams", FeatureFamily::CharTrigrams);
    if let Some(k) = config.char_k {
        writeln!(out, "k = {k}").unwrap();
    }
    writeln!(out, "nb_scaling = {}", config.nb_scale_char).unwrap();
    writeln!(out, "scale = {}", config.scale(FeatureFamily::CharTrigrams)).unwrap();

    section(&mut out, "bias", FeatureFamily::Bias);
    writeln!(out, "so_threshold = {}", config.so_threshold).unwrap();
    writeln!(out, "scale = {}", config.scale(FeatureFamily::Bias)).unwrap();

    section(&mut out, "lexical", FeatureFamily::Lexical);
    if !lexicon_paths.is_empty() {
        let rendered: Vec<String> = lexicon_paths
            .iter()
            .map(|p| format!("{:?}", p.display().to_string()))
            .collect();
        writeln!(out, "lexicons = [{}]", rendered.join(", ")).unwrap();
    }
    writeln!(out, "normalize = {}", config.normalize_lexicon_counts).unwrap();
    writeln!(out, "scale = {}", config.scale(FeatureFamily::Lexical)).unwrap();

    section(&mut out, "richness", FeatureFamily::Richness);
    writeln!(out, "scale = {}", config.scale(FeatureFamily::Richness)).unwrap();

    section(&mut out, "readability", FeatureFamily::Readability);
    writeln!(out, "scale = {}", config.scale(FeatureFamily::Readability)).unwrap();
    out
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AblationFile {
    #[serde(default)]
    base: Option<ConfigFile>,
    #[serde(default)]
    row: Vec<AblationRowSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AblationRowSpec {
    name: String,
    families: Vec<String>,
    nb_scaling: Option<bool>,
    nb_scale_char: Option<bool>,
    binary_tf: Option<bool>,
    standardize: Option<bool>,
    #[serde(default)]
    scales: BTreeMap<String, f64>,
}

/// Parse the ablation rows file: an optional `[base]` config plus `[[row]]`
/// entries that pick families and override a few knobs.
pub fn load_ablation_rows(path: &Path) -> Result<(Vec<NamedConfig>, Vec<Lexicon>)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading rows file {}", path.display()))?;
    let file: AblationFile =
        toml::from_str(&text).with_context(|| format!("parsing rows file {}", path.display()))?;
    if file.row.is_empty() {
        bail!("rows file {} defines no [[row]] entries", path.display());
    }
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));
    let loaded = file.base.unwrap_or_default().into_loaded(base_dir)?;

    let mut rows = Vec::with_capacity(file.row.len());
    for spec in file.row {
        let mut config = loaded.config.clone();
        config.families = spec
            .families
            .iter()
            .map(|s| FeatureFamily::parse(s).map_err(anyhow::Error::from))
            .collect::<Result<_>>()?;
        if let Some(v) = spec.nb_scaling {
            config.nb_scaling = v;
        }
        if let Some(v) = spec.nb_scale_char {
            config.nb_scale_char = v;
        }
        if let Some(v) = spec.binary_tf {
            config.binary_tf = v;
        }
        if let Some(v) = spec.standardize {
            config.standardize = v;
        }
        for (family, factor) in &spec.scales {
            config
                .scale_factors
                .insert(FeatureFamily::parse(family)?, *factor);
        }
        rows.push(NamedConfig {
            name: spec.name,
            config,
        });
    }
    Ok((rows, loaded.lexicons))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    #[serde(default)]
    k: Vec<usize>,
    #[serde(default)]
    scales: BTreeMap<String, Vec<f64>>,
}

/// Parse the tuning grid file: optional `k = [..]` plus a `[scales]` table
/// mapping family names to candidate factors.
pub fn load_grid(path: &Path) -> Result<ScaleGrid> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading grid file {}", path.display()))?;
    let file: GridFile =
        toml::from_str(&text).with_context(|| format!("parsing grid file {}", path.display()))?;
    let mut factors = BTreeMap::new();
    for (family, values) in file.scales {
        factors.insert(FeatureFamily::parse(&family)?, values);
    }
    Ok(ScaleGrid { factors, k: file.k })
}

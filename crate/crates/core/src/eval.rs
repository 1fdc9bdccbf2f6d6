//! Evaluation metrics, the incremental ablation runner and scale-factor
//! grid search.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::classifier::{predict_proba, train, ModelWeights, TrainOptions};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::lexicons::Lexicon;
use crate::pipeline::{fit_pipeline, FeatureConfig, FeatureFamily, FittedPipeline};

/// Confusion counts and the derived metrics. The positive class is the
/// hyperpartisan label (1). Degenerate denominators follow the 0-convention:
/// zero predicted positives give precision 0 and hence F1 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl Metrics {
    pub fn from_counts(
        true_pos: usize,
        false_pos: usize,
        true_neg: usize,
        false_neg: usize,
    ) -> Metrics {
        let total = true_pos + false_pos + true_neg + false_neg;
        let accuracy = if total > 0 {
            (true_pos + true_neg) as f64 / total as f64
        } else {
            0.0
        };
        let precision = if true_pos + false_pos > 0 {
            true_pos as f64 / (true_pos + false_pos) as f64
        } else {
            0.0
        };
        let recall = if true_pos + false_neg > 0 {
            true_pos as f64 / (true_pos + false_neg) as f64
        } else {
            0.0
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Metrics {
            accuracy,
            precision,
            recall,
            f1,
            true_pos,
            false_pos,
            true_neg,
            false_neg,
        }
    }

    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }
}

/// Evaluate a model over a labeled corpus at the 0.5 decision threshold.
pub fn evaluate(
    model: &ModelWeights,
    pipeline: &FittedPipeline,
    corpus: &Corpus,
) -> Result<Metrics> {
    if !corpus.is_labeled() {
        return Err(Error::UnlabeledCorpus {
            name: corpus.name().to_string(),
        });
    }
    let mut true_pos = 0;
    let mut false_pos = 0;
    let mut true_neg = 0;
    let mut false_neg = 0;
    for doc in corpus.iter() {
        let row = pipeline.transform(doc);
        let predicted = predict_proba(model, &row)? >= 0.5;
        match (predicted, doc.label == Some(true)) {
            (true, true) => true_pos += 1,
            (true, false) => false_pos += 1,
            (false, false) => true_neg += 1,
            (false, true) => false_neg += 1,
        }
    }
    Ok(Metrics::from_counts(
        true_pos, false_pos, true_neg, false_neg,
    ))
}

/// A feature configuration with a display name, as read from an ablation
/// rows file.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedConfig {
    pub name: String,
    pub config: FeatureConfig,
}

/// Result of one ablation run: configs in input order, one metrics record
/// per evaluation set.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationReport {
    pub eval_sets: Vec<String>,
    pub rows: Vec<AblationRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub name: String,
    pub metrics: Vec<Metrics>,
}

impl AblationReport {
    /// Machine-readable CSV; this column set is the stable contract.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("config_name,eval_set,accuracy,precision,recall,f1,tp,fp,tn,fn\n");
        for row in &self.rows {
            for (set, m) in self.eval_sets.iter().zip(&row.metrics) {
                writeln!(
                    out,
                    "{},{},{:.6},{:.6},{:.6},{:.6},{},{},{},{}",
                    row.name,
                    set,
                    m.accuracy,
                    m.precision,
                    m.recall,
                    m.f1,
                    m.true_pos,
                    m.false_pos,
                    m.true_neg,
                    m.false_neg
                )
                .expect("string write cannot fail");
            }
        }
        out
    }

    /// Aligned human-readable table.
    pub fn to_text(&self) -> String {
        let name_width = self
            .rows
            .iter()
            .map(|r| r.name.len())
            .chain(std::iter::once("config".len()))
            .max()
            .unwrap_or(6);
        let mut out = String::new();
        writeln!(
            out,
            "{:<name_width$}  {:<16}  {:>8}  {:>8}  {:>8}  {:>8}",
            "config", "eval_set", "acc", "prec", "rec", "f1"
        )
        .expect("string write cannot fail");
        for row in &self.rows {
            for (set, m) in self.eval_sets.iter().zip(&row.metrics) {
                writeln!(
                    out,
                    "{:<name_width$}  {:<16}  {:>8.4}  {:>8.4}  {:>8.4}  {:>8.4}",
                    row.name, set, m.accuracy, m.precision, m.recall, m.f1
                )
                .expect("string write cannot fail");
            }
        }
        out
    }
}

/// Run every row config end to end: fit the pipeline on `train`, train a
/// model, evaluate on every eval set. A failing row aborts the run and names
/// the row.
pub fn ablation_run(
    train_corpus: &Corpus,
    eval_sets: &[(String, Corpus)],
    rows: &[NamedConfig],
    count_lexicons: &[Lexicon],
    train_opts: &TrainOptions,
) -> Result<AblationReport> {
    let mut report_rows = Vec::with_capacity(rows.len());
    for named in rows {
        let run_row = || -> Result<AblationRow> {
            let pipeline = fit_pipeline(train_corpus, &named.config, count_lexicons)?;
            let features = pipeline.transform_corpus(train_corpus);
            let labels = train_corpus.labels()?;
            let model = train(&features, &labels, train_opts)?;
            let mut metrics = Vec::with_capacity(eval_sets.len());
            for (_, eval_corpus) in eval_sets {
                metrics.push(evaluate(&model, &pipeline, eval_corpus)?);
            }
            Ok(AblationRow {
                name: named.name.clone(),
                metrics,
            })
        };
        report_rows.push(run_row().map_err(|e| Error::AblationRow {
            row: named.name.clone(),
            source: Box::new(e),
        })?);
    }
    Ok(AblationReport {
        eval_sets: eval_sets.iter().map(|(n, _)| n.clone()).collect(),
        rows: report_rows,
    })
}

/// Search space for [`grid_search_scales`]: candidate scale factors per
/// family, plus optional word-vocabulary caps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScaleGrid {
    pub factors: BTreeMap<FeatureFamily, Vec<f64>>,
    pub k: Vec<usize>,
}

impl ScaleGrid {
    pub fn is_empty(&self) -> bool {
        self.factors.values().all(|v| v.is_empty()) && self.k.is_empty()
    }

    /// Materialize the Cartesian product in deterministic order: vocabulary
    /// caps outermost, then families in layout order, candidate values in
    /// their given order.
    fn candidates(&self, base: &FeatureConfig) -> Vec<FeatureConfig> {
        let k_choices: Vec<usize> = if self.k.is_empty() {
            vec![base.k]
        } else {
            self.k.clone()
        };
        let axes: Vec<(&FeatureFamily, &Vec<f64>)> =
            self.factors.iter().filter(|(_, v)| !v.is_empty()).collect();

        let mut configs = Vec::new();
        for &k in &k_choices {
            let mut indices = vec![0usize; axes.len()];
            loop {
                let mut config = base.clone();
                config.k = k;
                for (axis, &value_idx) in axes.iter().zip(&indices) {
                    config.scale_factors.insert(*axis.0, axis.1[value_idx]);
                }
                configs.push(config);
                // advance the odometer
                let mut pos = axes.len();
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    indices[pos] += 1;
                    if indices[pos] < axes[pos].1.len() {
                        break;
                    }
                    indices[pos] = 0;
                }
                if axes.is_empty() || indices.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
        configs
    }
}

/// Exhaustive grid search selecting the configuration with the highest dev
/// accuracy; ties keep the first candidate in enumeration order.
pub fn grid_search_scales(
    train_corpus: &Corpus,
    dev_corpus: &Corpus,
    base: &FeatureConfig,
    grid: &ScaleGrid,
    count_lexicons: &[Lexicon],
    train_opts: &TrainOptions,
) -> Result<(FeatureConfig, Metrics)> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("grid must be non-empty".into()));
    }
    let mut best: Option<(FeatureConfig, Metrics)> = None;
    for config in grid.candidates(base) {
        let pipeline = fit_pipeline(train_corpus, &config, count_lexicons)?;
        let features = pipeline.transform_corpus(train_corpus);
        let labels = train_corpus.labels()?;
        let model = train(&features, &labels, train_opts)?;
        let metrics = evaluate(&model, &pipeline, dev_corpus)?;
        let better = match &best {
            None => true,
            Some((_, incumbent)) => metrics.accuracy > incumbent.accuracy,
        };
        if better {
            best = Some((config, metrics));
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("grid produced no candidates".into()))
}

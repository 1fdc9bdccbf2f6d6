//! Implementations behind the subcommands.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use partisan_core::archive::{ArchiveReader, ArchiveWriter};
use partisan_core::classifier::{
    predict_proba, read_model_from, train, write_model_into, ModelWeights, Solver, TrainOptions,
};
use partisan_core::corpus::{load_corpus, Corpus, CorpusFormat};
use partisan_core::eval::{ablation_run, evaluate, grid_search_scales, Metrics};
use partisan_core::lexicons::{induce_bias_lexicons, semantic_orientation};
use partisan_core::pipeline::{fit_pipeline, FeatureConfig, FittedPipeline};

use crate::args::{Cli, Command, ConfigOverrides, FormatArg, SolverArg, TrainFlags};
use crate::config::{self, LoadedConfig};

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train {
            corpus,
            format,
            out,
            overrides,
            train,
        } => cmd_train(&corpus, format, &out, &overrides, &train),
        Command::Predict {
            model,
            corpus,
            format,
            pipeline,
            out,
        } => cmd_predict(&model, &corpus, format, pipeline.as_deref(), out.as_deref()),
        Command::Evaluate {
            model,
            corpus,
            format,
            pipeline,
            csv,
        } => cmd_evaluate(&model, &corpus, format, pipeline.as_deref(), csv),
        Command::InduceLexicon {
            left,
            right,
            threshold,
            out_left,
            out_right,
            scores_out,
        } => cmd_induce(
            &left,
            &right,
            threshold,
            &out_left,
            &out_right,
            scores_out.as_deref(),
        ),
        Command::Featurize {
            corpus,
            format,
            pipeline,
            out,
        } => cmd_featurize(&corpus, format, &pipeline, out.as_deref()),
        Command::Ablate {
            train,
            rows,
            eval_sets,
            out,
            overrides,
            train_flags,
        } => cmd_ablate(
            &train,
            &rows,
            &eval_sets,
            out.as_deref(),
            &overrides,
            &train_flags,
        ),
        Command::Tune {
            train,
            dev,
            grid,
            out,
            overrides,
            train_flags,
        } => cmd_tune(
            &train,
            &dev,
            &grid,
            out.as_deref(),
            &overrides,
            &train_flags,
        ),
    }
}

fn require_file(path: &Path) -> Result<()> {
    if !path.is_file() {
        bail!("file not found: {}", path.display());
    }
    Ok(())
}

fn corpus_format(path: &Path, arg: Option<FormatArg>) -> CorpusFormat {
    match arg {
        Some(FormatArg::Jsonl) => CorpusFormat::Jsonl,
        Some(FormatArg::Tsv) => CorpusFormat::Tsv,
        None => CorpusFormat::from_path(path),
    }
}

fn read_corpus(path: &Path, format: Option<FormatArg>) -> Result<Corpus> {
    require_file(path)?;
    load_corpus(path, corpus_format(path, format))
        .with_context(|| format!("loading corpus {}", path.display()))
}

fn train_options(flags: &TrainFlags) -> TrainOptions {
    TrainOptions {
        c: flags.c,
        solver: match flags.solver {
            SolverArg::BatchGd => Solver::BatchGd,
            SolverArg::AvgIncremental => Solver::AvgIncremental,
        },
        seed: flags.seed,
        tol: flags.tol,
        max_iter: flags.max_iter,
    }
}

fn loaded_config(overrides: &ConfigOverrides) -> Result<LoadedConfig> {
    if let Some(path) = &overrides.config {
        require_file(path)?;
    }
    let mut loaded = config::load_feature_config(overrides.config.as_deref())?;
    apply_overrides(&mut loaded.config, overrides);
    Ok(loaded)
}

fn apply_overrides(config: &mut FeatureConfig, overrides: &ConfigOverrides) {
    if let Some(k) = overrides.k {
        config.k = k;
    }
    if let Some(max_df) = overrides.max_df {
        config.max_df = max_df;
    }
    if let Some(alpha) = overrides.alpha {
        config.alpha = alpha;
    }
}

fn write_or_print(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            std::io::stdout()
                .lock()
                .write_all(content.as_bytes())
                .context("writing to stdout")?;
            Ok(())
        }
    }
}

fn cmd_train(
    corpus_path: &Path,
    format: Option<FormatArg>,
    out: &Path,
    overrides: &ConfigOverrides,
    flags: &TrainFlags,
) -> Result<()> {
    let corpus = read_corpus(corpus_path, format)?;
    let loaded = loaded_config(overrides)?;

    let pipeline = fit_pipeline(&corpus, &loaded.config, &loaded.lexicons)?;
    let features = pipeline.transform_corpus(&corpus);
    let labels = corpus.labels()?;
    let model = train(&features, &labels, &train_options(flags))?;

    let mut writer = ArchiveWriter::new();
    pipeline.write_into(&mut writer);
    write_model_into(&mut writer, &model);
    std::fs::write(out, writer.finish())
        .with_context(|| format!("writing archive {}", out.display()))?;

    println!(
        "trained on {} documents: dim={} iterations={} objective={:.6} converged={} -> {}",
        corpus.len(),
        pipeline.total_dim(),
        model.meta.iterations,
        model.meta.final_objective,
        model.meta.converged,
        out.display()
    );
    Ok(())
}

/// Load model plus pipeline from one archive, or from two when a separate
/// pipeline path is given. The dimensions must agree.
fn load_model_and_pipeline(
    model_path: &Path,
    pipeline_path: Option<&Path>,
) -> Result<(ModelWeights, FittedPipeline)> {
    require_file(model_path)?;
    let model_bytes = std::fs::read(model_path)
        .with_context(|| format!("reading archive {}", model_path.display()))?;
    let model_reader = ArchiveReader::parse(&model_bytes)
        .with_context(|| format!("parsing archive {}", model_path.display()))?;
    let model = read_model_from(&model_reader)
        .with_context(|| format!("no usable model in {}", model_path.display()))?;

    let pipeline = match pipeline_path {
        Some(path) => {
            require_file(path)?;
            let bytes = std::fs::read(path)
                .with_context(|| format!("reading archive {}", path.display()))?;
            let reader = ArchiveReader::parse(&bytes)
                .with_context(|| format!("parsing archive {}", path.display()))?;
            FittedPipeline::read_from(&reader)
                .with_context(|| format!("no usable pipeline in {}", path.display()))?
        }
        None => FittedPipeline::read_from(&model_reader)
            .with_context(|| format!("no usable pipeline in {}", model_path.display()))?,
    };

    if model.dim() != pipeline.total_dim() {
        bail!(
            "dimension mismatch: model has {} features, pipeline produces {}",
            model.dim(),
            pipeline.total_dim()
        );
    }
    Ok((model, pipeline))
}

fn cmd_predict(
    model_path: &Path,
    corpus_path: &Path,
    format: Option<FormatArg>,
    pipeline_path: Option<&Path>,
    out: Option<&Path>,
) -> Result<()> {
    let corpus = read_corpus(corpus_path, format)?;
    let (model, pipeline) = load_model_and_pipeline(model_path, pipeline_path)?;

    let mut buf = String::new();
    for doc in corpus.iter() {
        let p = predict_proba(&model, &pipeline.transform(doc))?;
        writeln!(buf, "{}\t{:.6}\t{}", doc.id, p, u8::from(p >= 0.5)).unwrap();
    }
    write_or_print(out, &buf)
}

fn metrics_line(m: &Metrics) -> String {
    format!(
        "accuracy={:.6} precision={:.6} recall={:.6} f1={:.6} tp={} fp={} tn={} fn={}",
        m.accuracy, m.precision, m.recall, m.f1, m.true_pos, m.false_pos, m.true_neg, m.false_neg
    )
}

fn cmd_evaluate(
    model_path: &Path,
    corpus_path: &Path,
    format: Option<FormatArg>,
    pipeline_path: Option<&Path>,
    csv: bool,
) -> Result<()> {
    let corpus = read_corpus(corpus_path, format)?;
    let (model, pipeline) = load_model_and_pipeline(model_path, pipeline_path)?;
    let m = evaluate(&model, &pipeline, &corpus)?;
    if csv {
        println!("eval_set,accuracy,precision,recall,f1,tp,fp,tn,fn");
        println!(
            "{},{:.6},{:.6},{:.6},{:.6},{},{},{},{}",
            corpus.name(),
            m.accuracy,
            m.precision,
            m.recall,
            m.f1,
            m.true_pos,
            m.false_pos,
            m.true_neg,
            m.false_neg
        );
    } else {
        println!("{}", metrics_line(&m));
    }
    Ok(())
}

fn cmd_induce(
    left_path: &Path,
    right_path: &Path,
    threshold: f64,
    out_left: &Path,
    out_right: &Path,
    scores_out: Option<&Path>,
) -> Result<()> {
    let left = read_corpus(left_path, None)?;
    let right = read_corpus(right_path, None)?;
    let scores = semantic_orientation(&left, &right)?;
    let (bl_left, bl_right) = induce_bias_lexicons(&scores, threshold)?;

    for (lex, path) in [(&bl_left, out_left), (&bl_right, out_right)] {
        let mut content = String::new();
        for term in lex.terms() {
            writeln!(content, "{term}").unwrap();
        }
        std::fs::write(path, content)
            .with_context(|| format!("writing lexicon {}", path.display()))?;
    }
    if let Some(path) = scores_out {
        let mut content = String::new();
        for s in &scores {
            writeln!(content, "{}\t{}", s.term, s.so).unwrap();
        }
        std::fs::write(path, content)
            .with_context(|| format!("writing scores {}", path.display()))?;
    }
    println!(
        "induced {} left and {} right cues at |SO| >= {}",
        bl_left.len(),
        bl_right.len(),
        threshold
    );
    Ok(())
}

fn cmd_featurize(
    corpus_path: &Path,
    format: Option<FormatArg>,
    pipeline_path: &Path,
    out: Option<&Path>,
) -> Result<()> {
    let corpus = read_corpus(corpus_path, format)?;
    require_file(pipeline_path)?;
    let bytes = std::fs::read(pipeline_path)
        .with_context(|| format!("reading archive {}", pipeline_path.display()))?;
    let reader = ArchiveReader::parse(&bytes)?;
    let pipeline = FittedPipeline::read_from(&reader)?;

    let mut buf = format!("# dim={}\n", pipeline.total_dim());
    for doc in corpus.iter() {
        let row = pipeline.transform(doc);
        write!(buf, "{}\t", doc.id).unwrap();
        let mut first = true;
        for (i, v) in row.iter() {
            if !first {
                buf.push(' ');
            }
            write!(buf, "{i}:{v}").unwrap();
            first = false;
        }
        buf.push('\n');
    }
    write_or_print(out, &buf)
}

fn parse_eval_sets(specs: &[String]) -> Result<Vec<(String, PathBuf)>> {
    specs
        .iter()
        .map(|spec| match spec.split_once('=') {
            Some((name, path)) if !name.is_empty() && !path.is_empty() => {
                Ok((name.to_string(), PathBuf::from(path)))
            }
            _ => bail!("eval set `{spec}` is not of the form NAME=PATH"),
        })
        .collect()
}

fn cmd_ablate(
    train_path: &Path,
    rows_path: &Path,
    eval_specs: &[String],
    out: Option<&Path>,
    overrides: &ConfigOverrides,
    flags: &TrainFlags,
) -> Result<()> {
    require_file(rows_path)?;
    let eval_paths = parse_eval_sets(eval_specs)?;
    for (_, path) in &eval_paths {
        require_file(path)?;
    }
    let train_corpus = read_corpus(train_path, None)?;
    let (mut rows, lexicons) = config::load_ablation_rows(rows_path)?;
    for named in &mut rows {
        apply_overrides(&mut named.config, overrides);
    }
    let mut eval_sets = Vec::with_capacity(eval_paths.len());
    for (name, path) in eval_paths {
        eval_sets.push((name, read_corpus(&path, None)?));
    }

    let report = ablation_run(
        &train_corpus,
        &eval_sets,
        &rows,
        &lexicons,
        &train_options(flags),
    )?;
    print!("{}", report.to_text());
    if let Some(path) = out {
        std::fs::write(path, report.to_csv())
            .with_context(|| format!("writing report {}", path.display()))?;
    }
    Ok(())
}

fn cmd_tune(
    train_path: &Path,
    dev_path: &Path,
    grid_path: &Path,
    out: Option<&Path>,
    overrides: &ConfigOverrides,
    flags: &TrainFlags,
) -> Result<()> {
    require_file(grid_path)?;
    let train_corpus = read_corpus(train_path, None)?;
    let dev_corpus = read_corpus(dev_path, None)?;
    let loaded = loaded_config(overrides)?;
    let grid = config::load_grid(grid_path)?;

    let (best, metrics) = grid_search_scales(
        &train_corpus,
        &dev_corpus,
        &loaded.config,
        &grid,
        &loaded.lexicons,
        &train_options(flags),
    )?;

    println!("best dev {}", metrics_line(&metrics));
    let rendered = config::config_to_toml(&best, &loaded.lexicon_paths);
    match out {
        Some(path) => {
            std::fs::write(path, &rendered)
                .with_context(|| format!("writing config {}", path.display()))?;
            println!("wrote best config to {}", path.display());
        }
        None => print!("{rendered}"),
    }
    Ok(())
}

//! Command-line surface. Flag defaults mirror the library defaults; values
//! given here override anything read from a config file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "partisan",
    version,
    about = "Hyperpartisan text detection: engineered features + logistic regression"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Jsonl,
    Tsv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    BatchGd,
    AvgIncremental,
}

/// Solver flags shared by every command that trains models.
#[derive(Args)]
pub struct TrainFlags {
    /// Regularization parameter C (smaller = stronger regularization)
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,

    /// Training algorithm
    #[arg(long, value_enum, default_value_t = SolverArg::BatchGd)]
    pub solver: SolverArg,

    /// Convergence tolerance on the gradient infinity norm
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,

    /// Iteration budget (epochs for the incremental solver)
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,

    /// Seed for the incremental solver's sample order
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Feature-config overrides applied on top of the config file.
#[derive(Args)]
pub struct ConfigOverrides {
    /// Feature config file (TOML); defaults apply when omitted
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Word-channel vocabulary cap (default 200000)
    #[arg(long)]
    pub k: Option<usize>,

    /// Drop terms present in more than this fraction of documents (default 0.9)
    #[arg(long)]
    pub max_df: Option<f64>,

    /// NB smoothing parameter (default 1.0)
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Fit the feature pipeline and train a model; writes one archive
    /// holding both
    Train {
        /// Labeled training corpus
        #[arg(long)]
        corpus: PathBuf,

        /// Corpus file format (inferred from the extension when omitted)
        #[arg(long, value_enum)]
        format: Option<FormatArg>,

        /// Output archive path
        #[arg(long)]
        out: PathBuf,

        #[command(flatten)]
        overrides: ConfigOverrides,

        #[command(flatten)]
        train: TrainFlags,
    },

    /// Score a corpus with a trained model; TSV `id<TAB>probability<TAB>label`
    Predict {
        /// Archive holding the model (and pipeline, unless --pipeline is given)
        #[arg(long)]
        model: PathBuf,

        /// Corpus to score
        #[arg(long)]
        corpus: PathBuf,

        #[arg(long, value_enum)]
        format: Option<FormatArg>,

        /// Read the pipeline from a different archive
        #[arg(long)]
        pipeline: Option<PathBuf>,

        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Compute accuracy/precision/recall/F1 of a model on a labeled corpus
    Evaluate {
        #[arg(long)]
        model: PathBuf,

        #[arg(long)]
        corpus: PathBuf,

        #[arg(long, value_enum)]
        format: Option<FormatArg>,

        /// Read the pipeline from a different archive
        #[arg(long)]
        pipeline: Option<PathBuf>,

        /// Emit CSV instead of the key=value line
        #[arg(long)]
        csv: bool,
    },

    /// Induce left/right bias lexicons from two corpora via semantic
    /// orientation
    #[command(name = "induce-lexicon")]
    InduceLexicon {
        /// Corpus of the "left" side (negative SO)
        #[arg(long)]
        left: PathBuf,

        /// Corpus of the "right" side (positive SO)
        #[arg(long)]
        right: PathBuf,

        /// |SO| threshold for inclusion
        #[arg(long, default_value_t = 0.4)]
        threshold: f64,

        /// Output file for the left lexicon
        #[arg(long)]
        out_left: PathBuf,

        /// Output file for the right lexicon
        #[arg(long)]
        out_right: PathBuf,

        /// Also export every SO score as TSV `term<TAB>so`
        #[arg(long)]
        scores_out: Option<PathBuf>,
    },

    /// Dump sparse feature rows for a corpus under a fitted pipeline
    Featurize {
        #[arg(long)]
        corpus: PathBuf,

        #[arg(long, value_enum)]
        format: Option<FormatArg>,

        /// Archive holding the fitted pipeline
        #[arg(long)]
        pipeline: PathBuf,

        /// Output file (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Run an incremental feature-ablation experiment from a rows file
    Ablate {
        /// Labeled training corpus
        #[arg(long)]
        train: PathBuf,

        /// Ablation rows file (TOML)
        #[arg(long)]
        rows: PathBuf,

        /// Evaluation sets as name=path, repeatable
        #[arg(long = "eval", value_name = "NAME=PATH", required = true)]
        eval_sets: Vec<String>,

        /// Write the report CSV here (text table always goes to stdout)
        #[arg(long)]
        out: Option<PathBuf>,

        #[command(flatten)]
        overrides: ConfigOverrides,

        #[command(flatten)]
        train_flags: TrainFlags,
    },

    /// Grid-search scale factors (and optionally k) against a dev set
    Tune {
        /// Labeled training corpus
        #[arg(long)]
        train: PathBuf,

        /// Labeled dev corpus selection is based on
        #[arg(long)]
        dev: PathBuf,

        /// Grid file (TOML)
        #[arg(long)]
        grid: PathBuf,

        /// Write the winning config as TOML
        #[arg(long)]
        out: Option<PathBuf>,

        #[command(flatten)]
        overrides: ConfigOverrides,

        #[command(flatten)]
        train_flags: TrainFlags,
    },
}

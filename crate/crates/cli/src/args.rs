use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "rankforge", version, about = "Learning to rank with rank functionals, rank losses and L-BFGS")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model by minimizing the regularized empirical risk.
    Train(TrainArgs),
    /// Report ranking metrics of a model on a dataset.
    Eval(EvalArgs),
    /// Write each query's objects in predicted order.
    Predict(PredictArgs),
    /// Generate a synthetic dataset from a planted linear scorer.
    Synth(SynthArgs),
    /// Compare analytic gradients with central finite differences.
    Gradcheck(GradcheckArgs),
    /// Fuzz the pairwise bound on the exact rating-model likelihood.
    VerifyBound(VerifyBoundArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// `<rating> qid:<id> <fid>:<val> ...`, one combined vector per object.
    Letor,
    /// A query-vector file plus a triples file of object vectors.
    Separate,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Letor => "letor",
            Format::Separate => "separate",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Ranking data (combined file, or triples file for `--format separate`).
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Letor)]
    pub format: Format,
    /// Query-vector file for `--format separate`.
    #[arg(long)]
    pub queries: Option<PathBuf>,
    /// Number of rating levels; defaults to the largest rating plus one.
    #[arg(long)]
    pub levels: Option<u32>,
}

#[derive(Debug, Clone, Args)]
pub struct LossArgs {
    /// mlogit, smooth-mrr, smooth-ndcg, smooth-err, pair-quad, pair-hinge,
    /// pair-exp, pair-logit, wpl, rpl, gpl, wpll, wub.
    #[arg(long, default_value = "pair-logit")]
    pub loss: String,
    /// Element weight: unit, rating, sqrt, expgain, invpos, logdisc.
    #[arg(long, default_value = "unit")]
    pub eweight: String,
    /// Pair weight: unit, invq, rdiff, rdiffq, gdn, gd, gdiff, gdiffq.
    #[arg(long, default_value = "unit")]
    pub pweight: String,
    /// Group aggregation for gpl: min, max, amean, gmean.
    #[arg(long, default_value = "gmean")]
    pub agg: String,
    /// Pair-potential scale for wpll and wub: a positive number or `auto`.
    #[arg(long, default_value = "auto")]
    pub gamma: String,
    /// Sigmoid temperature of the smooth metric losses.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// linear, quad, bilinear or metric.
    #[arg(long, default_value = "linear")]
    pub functional: String,
    /// Correlation threshold for second-order features.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Shared embedding dimension of bilinear and metric models.
    #[arg(long, default_value_t = 10)]
    pub embed_dim: usize,
    /// Distance temperature of the metric model.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// sigmoid or tanh, for the bilinear model.
    #[arg(long, default_value = "sigmoid")]
    pub squash: String,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Development data used for per-iteration reporting and tuning.
    #[arg(long)]
    pub dev: Option<PathBuf>,
    /// Query-vector file of the development data for `--format separate`.
    #[arg(long)]
    pub dev_queries: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub loss: LossArgs,
    /// Regularization factor; tuned on `--dev` when omitted.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub iters: usize,
    /// L-BFGS history length.
    #[arg(long, default_value_t = 10)]
    pub memory: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub grad_tol: f64,
    /// Initialization seed, or a comma-separated list for multi-start; the
    /// start with the lowest final risk is kept.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub seed: Vec<u64>,
    /// Sequential, order-fixed reductions for byte-identical reruns.
    #[arg(long)]
    pub bit_exact: bool,
    /// Z-score features with training statistics.
    #[arg(long)]
    pub normalize: bool,
    /// Model file; `model.txt` when omitted.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    /// Manifest path; defaults to `<model-out>.manifest`.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Rerun the configuration recorded in a manifest. `--model-out` and
    /// `--manifest` given alongside override the recorded paths.
    #[arg(long)]
    pub replay: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    /// Comma-separated subset of mrr, err, ndcg@<k>.
    #[arg(long, default_value = "mrr,ndcg@1,ndcg@5,ndcg@10,err")]
    pub metrics: String,
    /// Also write per-query metrics as TSV.
    #[arg(long)]
    pub per_query: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    /// Output TSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    Linear,
    TwoTier,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 50)]
    pub num_queries: usize,
    #[arg(long, default_value_t = 20)]
    pub docs: usize,
    #[arg(long, default_value_t = 10)]
    pub dim: usize,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 5)]
    pub levels: u32,
    /// Number of planted pairwise interaction terms.
    #[arg(long, default_value_t = 0)]
    pub interactions: usize,
    #[arg(long, default_value_t = 1.0)]
    pub interaction_scale: f64,
    #[arg(long, value_enum, default_value_t = Profile::Linear)]
    pub profile: Profile,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the planted weight vector, one value per line.
    #[arg(long)]
    pub weights_out: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GradcheckArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub loss: LossArgs,
    #[arg(long, default_value_t = 0.1)]
    pub lambda: f64,
    /// Number of random parameter points.
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub h: f64,
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyBoundArgs {
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Objects per instance.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub levels: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

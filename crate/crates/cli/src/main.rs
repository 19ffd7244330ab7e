//! Command-line runner: dataset generation, recommendation, evaluation
//! sweeps, population classification and questionnaire scoring.
//!
//! Exit codes: 0 success, 1 usage or validation problem, 2 data problem,
//! 3 internal failure. Diagnostics go to stderr; data goes to stdout or
//! the requested output files.

mod config;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use personarec::data::{
    filter_min_views, generate_synthetic, load_dataset, save_dataset, DataError, Dataset,
    RatingsTable, RatingsView, SynthConfig,
};
use personarec::evaluation::{
    classify_population, histogram_csv, metrics_csv, run_sweep, EvalError, HoldoutConfig,
};
use personarec::personality::{score_bfi10, PersonalityModelKind, QuestionnaireResponse};
use personarec::recommender::{
    recommend_top_n, HybridConfig, PredictorConfig, RecommendError,
};
use personarec::similarity::{BlendConfig, Combiner, SimilarityError};

use config::{resolve, ConfigMap};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(DataError),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Data(err) => write!(f, "{err}"),
            CliError::Internal(msg) => write!(f, "{msg}"),
        }
    }
}

fn data_err(err: DataError) -> CliError {
    match err {
        // Config validation reflects bad flag values, not bad data files.
        DataError::InvalidConfig(msg) => CliError::Usage(msg),
        other => CliError::Data(other),
    }
}

fn engine_err(err: RecommendError) -> CliError {
    match err {
        RecommendError::InvalidConfig(_)
        | RecommendError::Similarity(
            SimilarityError::InvalidAlpha0(_) | SimilarityError::InvalidDecayCount,
        ) => CliError::Usage(err.to_string()),
        other => CliError::Internal(other.to_string()),
    }
}

fn eval_err(err: EvalError) -> CliError {
    match err {
        EvalError::BucketsNotIncreasing
        | EvalError::UnsupportedModel(_)
        | EvalError::InvalidMargin => CliError::Usage(err.to_string()),
        EvalError::Recommend(inner) => engine_err(inner),
        other => CliError::Internal(other.to_string()),
    }
}

fn parse_flag<T>(raw: &str, what: &str) -> Result<T, CliError>
where
    T: std::str::FromStr,
    T::Err: fmt::Display,
{
    raw.parse::<T>()
        .map_err(|e| CliError::Usage(format!("{what}: {e}")))
}

#[derive(Parser)]
#[command(
    name = "personarec",
    version,
    about = "Personality-aware neighborhood recommender"
)]
struct Cli {
    /// Flat key=value file supplying defaults; flags override its entries.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded synthetic dataset into a directory.
    Generate(GenerateArgs),
    /// Print the top-N recommendations for one user as item_id,score lines.
    Recommend(RecommendArgs),
    /// Evaluate models across history buckets and emit a metrics CSV.
    Sweep(SweepArgs),
    /// Count users per dominant trait or per type and emit a histogram CSV.
    Classify(ClassifyArgs),
    /// Score ten questionnaire answers into the five-factor traits.
    ScoreBfi10(ScoreArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    users: Option<u32>,
    #[arg(long)]
    items: Option<u32>,
    #[arg(long)]
    labels: Option<u32>,
    /// Mean views per user (Poisson).
    #[arg(long)]
    views_per_user: Option<u32>,
    /// Trait-to-preference coupling strength; 0 decouples them.
    #[arg(long)]
    affinity_strength: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for users.csv, items.csv and events.csv.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct DataArgs {
    /// Directory holding users.csv, items.csv and events.csv.
    #[arg(long, value_name = "DIR")]
    data: Option<PathBuf>,
    /// Users file; overrides the --data location.
    #[arg(long, value_name = "FILE")]
    users_file: Option<PathBuf>,
    /// Items file; overrides the --data location.
    #[arg(long, value_name = "FILE")]
    items_file: Option<PathBuf>,
    /// Events file; overrides the --data location.
    #[arg(long, value_name = "FILE")]
    events_file: Option<PathBuf>,
    /// Drop users with fewer distinct viewed items than this.
    #[arg(long)]
    min_views: Option<u32>,
}

impl DataArgs {
    fn load(&self, cfg: &ConfigMap) -> Result<Dataset, CliError> {
        let dir = match &self.data {
            Some(dir) => Some(dir.clone()),
            None => cfg.get::<PathBuf>("data")?,
        };
        let path_of = |explicit: &Option<PathBuf>, key: &str, name: &str| -> Result<PathBuf, CliError> {
            if let Some(path) = explicit {
                return Ok(path.clone());
            }
            if let Some(path) = cfg.get::<PathBuf>(key)? {
                return Ok(path);
            }
            match &dir {
                Some(dir) => Ok(dir.join(name)),
                None => Err(CliError::Usage(format!(
                    "no dataset location: pass --data DIR or --{key}"
                ))),
            }
        };
        let users = path_of(&self.users_file, "users-file", "users.csv")?;
        let items = path_of(&self.items_file, "items-file", "items.csv")?;
        let events = path_of(&self.events_file, "events-file", "events.csv")?;
        let ds = load_dataset(&users, &items, &events).map_err(data_err)?;
        let min_views = resolve(self.min_views, cfg, "min-views", 0)?;
        Ok(if min_views > 0 {
            filter_min_views(&ds, min_views)
        } else {
            ds
        })
    }
}

#[derive(Args)]
struct EngineArgs {
    /// Model: big5, eysenck, hexaco, mbti or hybrid.
    #[arg(long)]
    model: Option<String>,
    /// Personality weight at zero history.
    #[arg(long)]
    alpha0: Option<f64>,
    /// Rated-item count at which the personality weight reaches zero.
    #[arg(long)]
    decay_count: Option<u32>,
    /// weighted-sum or product.
    #[arg(long)]
    combiner: Option<String>,
    /// Personality threshold of the hybrid's cold branch.
    #[arg(long)]
    lambda: Option<f64>,
    /// Combined-similarity threshold of the hybrid's warm branch.
    #[arg(long)]
    delta: Option<f64>,
    /// History size below which a user counts as cold.
    #[arg(long)]
    coldstart_count: Option<u32>,
    /// Combined-similarity cutoff for trait-model neighborhoods.
    #[arg(long)]
    neighbor_threshold: Option<f64>,
    /// Neighborhood size cap.
    #[arg(long)]
    max_neighbors: Option<usize>,
    /// Trait model backing the hybrid's personality similarity.
    #[arg(long)]
    hybrid_trait_model: Option<String>,
}

impl EngineArgs {
    fn predictor_config(&self, cfg: &ConfigMap) -> Result<PredictorConfig, CliError> {
        let defaults = PredictorConfig::default();
        let model: PersonalityModelKind = parse_flag(
            &resolve(
                self.model.clone(),
                cfg,
                "model",
                defaults.model.to_string(),
            )?,
            "--model",
        )?;
        let combiner: Combiner = parse_flag(
            &resolve(
                self.combiner.clone(),
                cfg,
                "combiner",
                defaults.blend.combiner.to_string(),
            )?,
            "--combiner",
        )?;
        let trait_model: PersonalityModelKind = parse_flag(
            &resolve(
                self.hybrid_trait_model.clone(),
                cfg,
                "hybrid-trait-model",
                defaults.hybrid.trait_model.to_string(),
            )?,
            "--hybrid-trait-model",
        )?;
        let built = PredictorConfig {
            model,
            blend: BlendConfig {
                alpha0: resolve(self.alpha0, cfg, "alpha0", defaults.blend.alpha0)?,
                decay_count: resolve(
                    self.decay_count,
                    cfg,
                    "decay-count",
                    defaults.blend.decay_count,
                )?,
                combiner,
            },
            hybrid: HybridConfig {
                lambda: resolve(self.lambda, cfg, "lambda", defaults.hybrid.lambda)?,
                delta: resolve(self.delta, cfg, "delta", defaults.hybrid.delta)?,
                coldstart_view_count: resolve(
                    self.coldstart_count,
                    cfg,
                    "coldstart-count",
                    defaults.hybrid.coldstart_view_count,
                )?,
                trait_model,
            },
            neighbor_threshold: resolve(
                self.neighbor_threshold,
                cfg,
                "neighbor-threshold",
                defaults.neighbor_threshold,
            )?,
            max_neighbors: resolve(
                self.max_neighbors,
                cfg,
                "max-neighbors",
                defaults.max_neighbors,
            )?,
        };
        built.validate().map_err(engine_err)?;
        Ok(built)
    }
}

#[derive(Args)]
struct RecommendArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Textual user id to recommend for.
    #[arg(long)]
    user: String,
    /// How many items to print.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Comma-separated model list evaluated in order.
    #[arg(long)]
    models: Option<String>,
    /// Comma-separated, strictly increasing history bucket sizes.
    #[arg(long)]
    buckets: Option<String>,
    /// Relevance cutoff above the user's mean rating.
    #[arg(long)]
    relevance_margin: Option<f64>,
    /// Metrics CSV destination; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    data: DataArgs,
    /// big5, eysenck, hexaco or mbti.
    #[arg(long)]
    model: Option<String>,
    /// Histogram CSV destination; stdout when omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Ten comma-separated answers, each 1..=5.
    #[arg(long)]
    answers: String,
}

fn parse_list<T>(raw: &str, what: &str) -> Result<Vec<T>, CliError>
where
    T: std::str::FromStr,
    T::Err: fmt::Display,
{
    raw.split(',')
        .map(str::trim)
        .filter(|part| !part.is_empty())
        .map(|part| parse_flag(part, what))
        .collect()
}

fn write_output(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| {
            CliError::Data(DataError::Io {
                path: path.to_path_buf(),
                source,
            })
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_generate(args: &GenerateArgs, cfg: &ConfigMap) -> Result<(), CliError> {
    let defaults = SynthConfig::default();
    let synth = SynthConfig {
        n_users: resolve(args.users, cfg, "users", defaults.n_users)?,
        n_items: resolve(args.items, cfg, "items", defaults.n_items)?,
        n_labels: resolve(args.labels, cfg, "labels", defaults.n_labels)?,
        views_per_user: resolve(
            args.views_per_user,
            cfg,
            "views-per-user",
            defaults.views_per_user,
        )?,
        affinity_strength: resolve(
            args.affinity_strength,
            cfg,
            "affinity-strength",
            defaults.affinity_strength,
        )?,
        seed: resolve(args.seed, cfg, "seed", defaults.seed)?,
    };
    let ds = generate_synthetic(&synth).map_err(data_err)?;
    save_dataset(&ds, &args.out).map_err(data_err)?;
    eprintln!(
        "generated {} users, {} items, {} events -> {}",
        ds.n_users(),
        ds.n_items(),
        ds.events().len(),
        args.out.display()
    );
    Ok(())
}

fn run_recommend(args: &RecommendArgs, cfg: &ConfigMap) -> Result<(), CliError> {
    let ds = args.data.load(cfg)?;
    let pcfg = args.engine.predictor_config(cfg)?;
    let n = resolve(args.n, cfg, "n", 10)?;
    let user = ds
        .user_id(&args.user)
        .ok_or_else(|| CliError::Usage(format!("unknown user id {:?}", args.user)))?;
    let table = RatingsTable::new(&ds);
    let view = RatingsView::full(&table);
    let ranked = recommend_top_n(user, n, &ds, &view, &pcfg).map_err(engine_err)?;
    let mut text = String::new();
    for (item, score) in ranked {
        text.push_str(&format!("{},{score:.6}\n", ds.item(item).id));
    }
    write_output(&text, None)
}

fn run_sweep_cmd(args: &SweepArgs, cfg: &ConfigMap) -> Result<(), CliError> {
    let ds = args.data.load(cfg)?;
    let pcfg = args.engine.predictor_config(cfg)?;
    let models_raw = resolve(
        args.models.clone(),
        cfg,
        "models",
        "big5,eysenck,hexaco,mbti,hybrid".to_string(),
    )?;
    let models: Vec<PersonalityModelKind> = parse_list(&models_raw, "--models")?;
    if models.is_empty() {
        return Err(CliError::Usage("--models must name at least one model".to_string()));
    }
    let buckets_raw = resolve(
        args.buckets.clone(),
        cfg,
        "buckets",
        "0,5,10,20,50".to_string(),
    )?;
    let buckets: Vec<u32> = parse_list(&buckets_raw, "--buckets")?;
    if buckets.is_empty() {
        return Err(CliError::Usage("--buckets must name at least one bucket".to_string()));
    }
    let split = HoldoutConfig {
        relevance_margin: resolve(args.relevance_margin, cfg, "relevance-margin", 0.0)?,
    };
    let points = run_sweep(&ds, &models, &buckets, &pcfg, &split).map_err(eval_err)?;
    write_output(&metrics_csv(&points), args.out.as_deref())
}

fn run_classify(args: &ClassifyArgs, cfg: &ConfigMap) -> Result<(), CliError> {
    let ds = args.data.load(cfg)?;
    let model: PersonalityModelKind = parse_flag(
        &resolve(args.model.clone(), cfg, "model", "big5".to_string())?,
        "--model",
    )?;
    let histogram = classify_population(&ds, model).map_err(eval_err)?;
    write_output(&histogram_csv(&histogram), args.out.as_deref())
}

fn run_score(args: &ScoreArgs) -> Result<(), CliError> {
    let answers: Vec<u8> = parse_list(&args.answers, "--answers")?;
    let response = QuestionnaireResponse::new(&answers)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let scored = score_bfi10(&response);
    let labels = scored
        .model()
        .dimension_labels()
        .expect("scored vector has labels");
    let mut text = String::new();
    for (label, score) in labels.iter().zip(scored.scores()) {
        text.push_str(&format!("{label},{score:.6}\n"));
    }
    write_output(&text, None)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => ConfigMap::load(path)?,
        None => ConfigMap::empty(),
    };
    match &cli.command {
        Command::Generate(args) => run_generate(args, &cfg),
        Command::Recommend(args) => run_recommend(args, &cfg),
        Command::Sweep(args) => run_sweep_cmd(args, &cfg),
        Command::Classify(args) => run_classify(args, &cfg),
        Command::ScoreBfi10(args) => run_score(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

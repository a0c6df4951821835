//! `sgwc` — encode/decode saliency-annotated images, rank objects against a
//! repository, train satisfaction models, and run bandwidth-allocation
//! scenarios end to end.
//!
//! Exit codes: 0 success, 1 domain/computation error, 2 usage or
//! config-schema error.

mod scenario;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use sgwc::codec::{
    self, decode_bytes, encode_image, encode_image_target_bytes, mask_from_boxes,
    quality_metrics, EncodeConfig,
};
use sgwc::imaging::{load_image, save_image};
use sgwc::ranking::{rank_objects, Repository};
use sgwc::saliency::SaliencyAnnotation;
use sgwc::satisfaction::{
    synthesize_survey, train_satisfaction, ParametricParams, SurveyTable,
    DEFAULT_SURVEY_DELAY_MAX,
};

#[derive(Parser)]
#[command(name = "sgwc", version, about = "Saliency-guided wavelet codec and bandwidth allocator")]
struct Cli {
    /// Seed for commands with a random component (survey-gen; simulate when
    /// the config omits one).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print progress details to stderr.
    #[arg(long, global = true, default_value_t = false)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a PNM image into an SGWC bitstream.
    Encode(EncodeArgs),
    /// Decompress an SGWC bitstream back to PNM.
    Decode(DecodeArgs),
    /// Rank annotated objects by repository similarity.
    Rank(RankArgs),
    /// Generate a synthetic satisfaction survey CSV.
    SurveyGen(SurveyGenArgs),
    /// Train a k-NN satisfaction model from a survey CSV.
    Train(TrainArgs),
    /// Run a full allocation scenario and emit a report.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct EncodeArgs {
    /// Input image (PGM/PPM, maxval 255).
    #[arg(long = "in")]
    input: PathBuf,
    /// Bounding-box annotation JSON; omitted means no salient regions.
    #[arg(long)]
    annotations: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Decomposition levels K.
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// Coefficient budget fraction in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    budget: f64,
    /// Keep only these labels at full saliency (comma separated).
    #[arg(long, value_delimiter = ',')]
    select: Option<Vec<String>>,
    /// Pick the budget to hit this encoded size (within 5%) instead.
    #[arg(long, conflicts_with = "budget")]
    target_bytes: Option<usize>,
    /// Decode the result and report PSNR against the input (overall and
    /// per annotated box).
    #[arg(long, default_value_t = false)]
    compare: bool,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    image: PathBuf,
    #[arg(long)]
    annotations: PathBuf,
    #[arg(long)]
    repo_manifest: PathBuf,
    /// Spatial-pyramid depth.
    #[arg(long, default_value_t = sgwc::ranking::DEFAULT_PYRAMID_LEVELS)]
    levels: usize,
}

#[derive(Args)]
struct SurveyGenArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 500)]
    rows: usize,
    #[arg(long, default_value_t = 0.02)]
    noise_sd: f64,
    #[arg(long, default_value_t = 3.0)]
    delta_half: f64,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long, default_value_t = DEFAULT_SURVEY_DELAY_MAX)]
    delta_max: f64,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    survey: PathBuf,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out_report: PathBuf,
}

/// Distinguishes config-schema problems (exit 2) from domain failures (exit 1).
enum CliError {
    Schema(String),
    Domain(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Domain(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Schema(message)) => {
            eprintln!("error: invalid configuration\n{message}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Encode(args) => cmd_encode(args, cli.verbose),
        Command::Decode(args) => cmd_decode(args),
        Command::Rank(args) => cmd_rank(args),
        Command::SurveyGen(args) => cmd_survey_gen(args, cli.seed),
        Command::Train(args) => cmd_train(args),
        Command::Simulate(args) => scenario::cmd_simulate(&args.config, &args.out_report, cli.seed, cli.verbose),
    }
}

fn load_annotation(path: Option<&Path>) -> Result<SaliencyAnnotation, CliError> {
    match path {
        None => Ok(SaliencyAnnotation::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading annotations {}", p.display()))?;
            Ok(SaliencyAnnotation::from_json(&text)?)
        }
    }
}

fn cmd_encode(args: EncodeArgs, verbose: bool) -> Result<(), CliError> {
    let bytes = std::fs::read(&args.input)
        .with_context(|| format!("reading image {}", args.input.display()))?;
    let image = load_image(&bytes)?;
    let annotation = load_annotation(args.annotations.as_deref())?;
    let selected: Option<HashSet<String>> =
        args.select.map(|labels| labels.into_iter().collect());

    let (bitstream, budget_used) = match args.target_bytes {
        Some(target) => {
            encode_image_target_bytes(&image, &annotation, args.levels, selected, target)?
        }
        None => {
            let config = EncodeConfig {
                levels: args.levels,
                budget_fraction: args.budget,
                selected_labels: selected,
            };
            (encode_image(&image, &annotation, &config)?, args.budget)
        }
    };
    let encoded = bitstream.to_bytes();
    std::fs::write(&args.out, &encoded)
        .with_context(|| format!("writing {}", args.out.display()))?;

    let total = bitstream.header.width as usize * bitstream.header.height as usize;
    print!(
        "bytes={} selected={} total={} budget={}",
        encoded.len(),
        bitstream.header.selected_count,
        total,
        budget_used
    );
    if args.compare {
        let decoded = codec::decode_image(&bitstream)?;
        let overall = quality_metrics(&image, &decoded, None)?;
        print!(" psnr_db={}", overall.psnr_db);
        for b in &annotation.boxes {
            let mask = mask_from_boxes((image.width(), image.height()), std::slice::from_ref(b));
            let region = quality_metrics(&image, &decoded, Some(&mask))?;
            print!(" psnr_db[{}]={}", b.label, region.psnr_db);
        }
    }
    println!();
    if verbose {
        eprintln!(
            "encoded {} -> {} ({} boxes, K={})",
            args.input.display(),
            args.out.display(),
            bitstream.header.boxes.len(),
            bitstream.header.levels
        );
    }
    Ok(())
}

fn cmd_decode(args: DecodeArgs) -> Result<(), CliError> {
    let bytes = std::fs::read(&args.input)
        .with_context(|| format!("reading bitstream {}", args.input.display()))?;
    let image = decode_bytes(&bytes)?;
    std::fs::write(&args.out, save_image(&image)?)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("decoded {}x{} ({} channels)", image.width(), image.height(), image.channels());
    Ok(())
}

fn cmd_rank(args: RankArgs) -> Result<(), CliError> {
    let bytes = std::fs::read(&args.image)
        .with_context(|| format!("reading image {}", args.image.display()))?;
    let image = load_image(&bytes)?;
    let annotation = load_annotation(Some(&args.annotations))?;
    let repository = Repository::load_manifest(&args.repo_manifest)?;
    let ranking = rank_objects(&image, &annotation, &repository, args.levels)?;

    #[derive(serde::Serialize)]
    struct RankRow<'a> {
        label: &'a str,
        similarity: f64,
    }
    #[derive(serde::Serialize)]
    struct RankOutput<'a> {
        p: usize,
        ranked: Vec<RankRow<'a>>,
    }
    let output = RankOutput {
        p: ranking.p(),
        ranked: ranking
            .ranked
            .iter()
            .map(|o| RankRow { label: &o.label, similarity: o.similarity })
            .collect(),
    };
    println!("{}", serde_json::to_string_pretty(&output).map_err(|e| anyhow!(e))?);
    Ok(())
}

fn cmd_survey_gen(args: SurveyGenArgs, seed: u64) -> Result<(), CliError> {
    if args.rows == 0 {
        return Err(CliError::Schema("rows: must be at least 1".into()));
    }
    let params = ParametricParams { delta_half: args.delta_half, gamma: args.gamma };
    let table = synthesize_survey(&params, args.rows, args.noise_sd, args.delta_max, seed);
    std::fs::write(&args.out, table.to_csv())
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("wrote {} rows to {}", table.rows.len(), args.out.display());
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.survey)
        .with_context(|| format!("reading survey {}", args.survey.display()))?;
    let table = SurveyTable::from_csv(&text)?;
    let model = train_satisfaction(&table, args.k)?;
    let json = serde_json::to_string_pretty(&model).map_err(|e| anyhow!(e))?;
    std::fs::write(&args.out, json)
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!("trained k-NN model on {} rows (k={})", table.rows.len(), args.k);
    Ok(())
}

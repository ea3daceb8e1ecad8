//! Command-line front end: adaptive pricing, interpolation deltas,
//! control-variate runs, mesh export and the benchmark table harness.
//! All results are emitted as JSON; meshes are written as CSV.

mod presets;
mod tables;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cubature::adaptive::{AdaptiveConfig, Strategy};
use cubature::greeks::{delta_mc_fd, delta_tcheb, DeltaConfig};
use cubature::model::{
    bs_closed_form_delta_1d, price_adaptive, price_replications, ModelConfig, ModelSpec, PayoffKind,
};
use cubature::reduction_cv::{build_pca, cv_estimator};
use cubature::{export_mesh_to_path, Error};

use presets::{preset, PresetDefaults, PRESET_NAMES};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cubature",
    version,
    about = "Adaptive quasi-Monte Carlo pricing of multidimensional vanilla options",
    after_help = "Built-in presets: ex1..ex20 plus t1k1..t4k2 (see README)."
)]
struct Cli {
    /// Cap on worker threads (default: logical CPU count).
    #[arg(long, global = true, env = "CUBATURE_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price an option with the adaptive integrator.
    Price(PriceArgs),
    /// Delta by Chebyshev interpolation, with optional Monte Carlo check.
    Delta(DeltaArgs),
    /// Control-variate Monte Carlo with PCA dimension reduction.
    Cv(CvArgs),
    /// Price once and export the final mesh as CSV.
    Mesh(MeshArgs),
    /// Rerun a published benchmark table and report pass/fail per row.
    Table(TableArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Fas,
    Grs,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Strategy {
        match s {
            StrategyArg::Fas => Strategy::Fas,
            StrategyArg::Grs => Strategy::Grs,
        }
    }
}

#[derive(Args)]
struct ModelSource {
    /// Path to a model JSON document.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Name of a built-in configuration (ex1..ex20, t1k1..t4k2).
    #[arg(long)]
    preset: Option<String>,
}

#[derive(Args)]
struct PricingFlags {
    /// Splitting strategy.
    #[arg(long, value_enum, default_value = "grs")]
    strategy: StrategyArg,
    /// Adaptive iterations (default: preset value or 2000 d).
    #[arg(long)]
    iters: Option<usize>,
    /// Coarse rule level.
    #[arg(long)]
    q1: Option<u32>,
    /// Fine rule level.
    #[arg(long)]
    q2: Option<u32>,
    /// Points-per-basis-function multiplier of the rules.
    #[arg(long)]
    alpha: Option<u32>,
    /// Domain truncation: integration runs over [-A, A]^d.
    #[arg(long = "A")]
    truncation: Option<f64>,
    /// Seed of the GRS direction stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PriceArgs {
    #[command(flatten)]
    source: ModelSource,
    #[command(flatten)]
    pricing: PricingFlags,
    /// Number of independent GRS replications (>= 2 adds mean/median/err).
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DeltaArgs {
    #[command(flatten)]
    source: ModelSource,
    #[command(flatten)]
    pricing: PricingFlags,
    /// Spot coordinate being differentiated.
    #[arg(long, default_value_t = 0)]
    asset: usize,
    /// Interpolation node count m.
    #[arg(long, default_value_t = 5)]
    nodes: usize,
    /// Absolute half-width of the interpolation window.
    #[arg(long, default_value_t = 0.1)]
    half_width: f64,
    /// Also run the finite-difference Monte Carlo benchmark with this
    /// sample count.
    #[arg(long)]
    mc_samples: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CvArgs {
    #[command(flatten)]
    source: ModelSource,
    #[command(flatten)]
    pricing: PricingFlags,
    /// Retained PCA components; comma-separated list sweeps several runs.
    #[arg(long, value_delimiter = ',')]
    components: Option<Vec<usize>>,
    /// Monte Carlo samples.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MeshArgs {
    #[command(flatten)]
    source: ModelSource,
    #[command(flatten)]
    pricing: PricingFlags,
    /// CSV output path for the mesh.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TableArgs {
    /// Table identifier, t1 through t13.
    table_id: String,
    /// Shrinks iteration and sample counts; 1.0 is the full protocol.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: failed to configure thread pool: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let result = match cli.command {
        Command::Price(args) => cmd_price(args),
        Command::Delta(args) => cmd_delta(args),
        Command::Cv(args) => cmd_cv(args),
        Command::Mesh(args) => cmd_mesh(args),
        Command::Table(args) => cmd_table(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_)
        | Error::CorrelationOutOfRange { .. }
        | Error::MissingBarriers
        | Error::UnsupportedDimension(_)
        | Error::ResourceLimit(_)
        | Error::Io { .. } => EXIT_CONFIG,
        Error::RankDeficient { .. }
        | Error::Evaluation { .. }
        | Error::NonPositiveEigenvalue { .. } => EXIT_NUMERICAL,
    }
}

/// Resolved model plus effective run parameters.
struct Resolved {
    label: String,
    description: Option<String>,
    model_json: Value,
    model: ModelSpec,
    payoff: PayoffKind,
    defaults: PresetDefaults,
}

fn resolve_model(source: &ModelSource) -> Result<Resolved, Error> {
    match (&source.config, &source.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.display().to_string(),
                source: e,
            })?;
            let config: ModelConfig = serde_json::from_str(&text).map_err(|e| {
                Error::InvalidParameter(format!(
                    "{} is not a valid model config: {e}",
                    path.display()
                ))
            })?;
            let (model, payoff) = config.build()?;
            let d = model.dim();
            Ok(Resolved {
                label: path.display().to_string(),
                description: None,
                model_json: serde_json::to_value(&config).expect("config serializes"),
                model,
                payoff,
                defaults: PresetDefaults {
                    iterations: 2000 * d,
                    q1: 18,
                    q2: 24,
                    alpha: 3,
                    truncation: 12.0,
                    samples: 100_000,
                    components: (0..=d.min(3)).collect(),
                },
            })
        }
        (None, Some(name)) => {
            let preset = preset(name).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown preset {name:?}; available: {}",
                    PRESET_NAMES.join(", ")
                ))
            })?;
            let (model, payoff) = preset.model.build()?;
            Ok(Resolved {
                label: preset.name.to_string(),
                description: Some(preset.about.to_string()),
                model_json: serde_json::to_value(&preset.model).expect("config serializes"),
                model,
                payoff,
                defaults: preset.defaults,
            })
        }
        _ => Err(Error::InvalidParameter(
            "exactly one of --config or --preset is required".into(),
        )),
    }
}

fn adaptive_config(flags: &PricingFlags, defaults: &PresetDefaults) -> (AdaptiveConfig, f64) {
    let config = AdaptiveConfig::new(
        flags.strategy.into(),
        flags.iters.unwrap_or(defaults.iterations),
        flags.q1.unwrap_or(defaults.q1),
        flags.q2.unwrap_or(defaults.q2),
        flags.alpha.unwrap_or(defaults.alpha),
        flags.seed,
    );
    let truncation = flags.truncation.unwrap_or(defaults.truncation);
    (config, truncation)
}

fn emit(value: &Value, out: Option<&Path>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).expect("json serializes");
    match out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| Error::Io {
            path: path.display().to_string(),
            source: e,
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run_settings_json(config: &AdaptiveConfig, truncation: f64) -> Value {
    json!({
        "strategy": match config.strategy { Strategy::Fas => "fas", Strategy::Grs => "grs" },
        "iterations": config.iterations,
        "q1": config.q1,
        "q2": config.q2,
        "alpha": config.alpha,
        "truncation": truncation,
        "seed": config.seed,
    })
}

/// Point counts and condition numbers of the two rules in use.
fn rule_diagnostics(d: usize, config: &AdaptiveConfig) -> Result<Value, Error> {
    let mut out = serde_json::Map::new();
    for (name, q) in [("q1", config.q1), ("q2", config.q2)] {
        let rule = cubature::cached_rule(d, q, config.alpha)?;
        out.insert(
            name.to_string(),
            json!({
                "level": q,
                "points": rule.point_count(),
                "basis_size": rule.index_set().len(),
                "condition_number": rule.condition_number(),
            }),
        );
    }
    Ok(Value::Object(out))
}

fn cmd_price(args: PriceArgs) -> Result<(), Error> {
    let resolved = resolve_model(&args.source)?;
    let (config, truncation) = adaptive_config(&args.pricing, &resolved.defaults);
    let mut body = json!({
        "command": "price",
        "model": resolved.label,
        "description": resolved.description,
        "config": resolved.model_json,
        "run": run_settings_json(&config, truncation),
    });
    body["rules"] = rule_diagnostics(resolved.model.dim(), &config)?;
    if args.runs <= 1 {
        let priced = price_adaptive(&resolved.model, resolved.payoff, truncation, &config)?;
        body["price"] = json!(priced.estimate.value);
        body["error_indicator"] = json!(priced.estimate.uncertainty);
        body["eval_count"] = json!(priced.estimate.eval_count);
        body["regions"] = json!(priced.adaptive.mesh.len());
    } else {
        let stats = price_replications(
            &resolved.model,
            resolved.payoff,
            truncation,
            &config,
            args.runs,
        )?;
        body["price"] = json!(stats.mean);
        body["runs"] = json!(args.runs);
        body["mean"] = json!(stats.mean);
        body["median"] = json!(stats.median);
        body["err"] = json!(stats.std_dev);
        body["values"] = json!(stats.values);
        body["eval_count"] = json!(stats.eval_count);
    }
    emit(&body, args.out.as_deref())
}

fn cmd_delta(args: DeltaArgs) -> Result<(), Error> {
    let resolved = resolve_model(&args.source)?;
    let (pricing, truncation) = adaptive_config(&args.pricing, &resolved.defaults);
    if pricing.strategy != Strategy::Grs {
        return Err(Error::InvalidParameter(
            "interpolation deltas use GRS pricing; pass --strategy grs".into(),
        ));
    }
    let cfg = DeltaConfig {
        asset_index: args.asset,
        nodes: args.nodes,
        half_width: args.half_width,
        truncation,
        pricing: pricing.clone(),
    };
    let delta = delta_tcheb(&resolved.model, resolved.payoff, &cfg)?;
    let mut body = json!({
        "command": "delta",
        "model": resolved.label,
        "config": resolved.model_json,
        "run": run_settings_json(&pricing, truncation),
        "asset_index": args.asset,
        "nodes": args.nodes,
        "half_width": args.half_width,
        "delta_interp": delta,
    });
    if resolved.model.dim() == 1
        && matches!(
            resolved.payoff,
            PayoffKind::BasketCall | PayoffKind::BasketPut
        )
    {
        body["closed_form_delta"] =
            json!(bs_closed_form_delta_1d(&resolved.model, resolved.payoff)?);
    }
    if let Some(n) = args.mc_samples {
        body["delta_mc_fd"] = json!(delta_mc_fd(
            &resolved.model,
            resolved.payoff,
            args.asset,
            n,
            args.pricing.seed
        )?);
        body["mc_samples"] = json!(n);
    }
    emit(&body, args.out.as_deref())
}

fn cmd_cv(args: CvArgs) -> Result<(), Error> {
    let resolved = resolve_model(&args.source)?;
    let components = args
        .components
        .clone()
        .unwrap_or_else(|| resolved.defaults.components.clone());
    let samples = args.samples.unwrap_or(resolved.defaults.samples);
    let pca = build_pca(&resolved.model)?;
    let mut results = Vec::new();
    for &l in &components {
        let mut flags_defaults = resolved.defaults.clone();
        flags_defaults.iterations = 2000 * l.max(1);
        let (config, truncation) = adaptive_config(&args.pricing, &flags_defaults);
        let est = cv_estimator(
            &pca,
            &resolved.model,
            resolved.payoff,
            l,
            samples,
            args.pricing.seed,
            truncation,
            &config,
        )?;
        results.push(serde_json::to_value(&est).expect("estimate serializes"));
    }
    let body = json!({
        "command": "cv",
        "model": resolved.label,
        "config": resolved.model_json,
        "samples": samples,
        "seed": args.pricing.seed,
        "components": components,
        "eigenvalues": pca.eigenvalues.iter().copied().collect::<Vec<f64>>(),
        "results": results,
    });
    emit(&body, args.out.as_deref())
}

fn cmd_mesh(args: MeshArgs) -> Result<(), Error> {
    let resolved = resolve_model(&args.source)?;
    let (config, truncation) = adaptive_config(&args.pricing, &resolved.defaults);
    let priced = price_adaptive(&resolved.model, resolved.payoff, truncation, &config)?;
    export_mesh_to_path(&priced.adaptive, &args.out)?;
    let body = json!({
        "command": "mesh",
        "model": resolved.label,
        "run": run_settings_json(&config, truncation),
        "rules": rule_diagnostics(resolved.model.dim(), &config)?,
        "price": priced.estimate.value,
        "error_indicator": priced.estimate.uncertainty,
        "eval_count": priced.estimate.eval_count,
        "regions": priced.adaptive.mesh.len(),
        "out": args.out.display().to_string(),
    });
    emit(&body, None)
}

fn cmd_table(args: TableArgs) -> Result<(), Error> {
    let report = tables::run_table(&args.table_id, args.scale, args.seed)?;
    let body = serde_json::to_value(&report).expect("report serializes");
    emit(&body, args.out.as_deref())
}

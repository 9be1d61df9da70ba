use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tripgen::data::{
    apply_scaler, assemble, clean, fit_scaler, parse_csv, render_truth, split, synthesize, Dataset,
    Target, FEATURE_NAMES, N_FEATURES, TARGET_NAMES,
};
use tripgen::error::Error;
use tripgen::eval::{evaluate_model, export_pairs, ZeroPolicy};
use tripgen::nn::forward;
use tripgen::store;
use tripgen::train::{train_with_validation, TrainConfig, TrainedModel};
use tripgen::tune::{grid_search, parse_grid, GridSpec};
use tripgen::util::write_atomic;

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (model schema 1)");

#[derive(Parser)]
#[command(name = "tripgen", version = VERSION, about = "Person/vehicle trip prediction from household survey features")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic survey-shaped CSV with known ground truth
    GenData(GenDataArgs),
    /// Train a model and export its loss curve
    Train(TrainArgs),
    /// Grid-search batch size and epochs with k-fold cross-validation
    Tune(TuneArgs),
    /// Score a saved model with MAPE and export actual/predicted pairs
    Evaluate(EvaluateArgs),
    /// Predict trips for feature rows (target columns not required)
    Predict(PredictArgs),
    /// Print the canonical feature and target column names in order
    Schema,
}

#[derive(Args)]
struct GenDataArgs {
    #[arg(long)]
    rows: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Lognormal noise parameter applied multiplicatively to targets
    #[arg(long, default_value_t = 0.02)]
    noise: f64,
    #[arg(long)]
    out: PathBuf,
    /// Print the generative coefficients
    #[arg(long)]
    show_truth: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 20)]
    batch: usize,
    #[arg(long, default_value_t = 5)]
    epochs: usize,
    #[arg(long, default_value_t = 0.001)]
    lr: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// train,val,test fractions (must sum to 1)
    #[arg(long, default_value = "0.7,0.2,0.1")]
    split: String,
    /// "train" fits the scaler on the training split only; "paper" fits it
    /// on all rows before splitting, replicating the leaky original order
    #[arg(long, default_value = "train", value_parser = ["train", "paper"])]
    scale_mode: String,
    /// Include a created_at timestamp in the model file
    #[arg(long)]
    timestamp: bool,
    #[arg(long)]
    model_out: PathBuf,
    #[arg(long)]
    curve_out: PathBuf,
}

#[derive(Args)]
struct TuneArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    target: String,
    /// e.g. "batch=10,20;epochs=5,10,50"
    #[arg(long)]
    grid: String,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.001)]
    lr: f64,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "error", value_parser = ["error", "exclude"])]
    zero_policy: String,
    #[arg(long)]
    pairs_out: PathBuf,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenData(args) => cmd_gen_data(args),
        Command::Train(args) => cmd_train(args),
        Command::Tune(args) => cmd_tune(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Schema => cmd_schema(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 2 for input/argument problems, 3 for numeric divergence, 4 for I/O.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Divergence { .. } => 3,
        Error::Io { .. } => 4,
        _ => 2,
    }
}

fn open(path: &Path) -> Result<impl Read, Error> {
    File::open(path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn load_dataset(path: &Path, target: Target) -> Result<Dataset, Error> {
    let table = parse_csv(open(path)?, &path.display().to_string())?;
    let (cleaned, report) = clean(&table)?;
    if !cleaned.extra_columns.is_empty() {
        eprintln!(
            "warning: ignoring extra columns: {}",
            cleaned.extra_columns.join(", ")
        );
    }
    if report.rows_out < report.rows_in {
        eprintln!(
            "note: dropped {} of {} rows with missing cells",
            report.rows_in - report.rows_out,
            report.rows_in
        );
    }
    assemble(&cleaned, target)
}

fn cmd_gen_data(args: GenDataArgs) -> Result<(), Error> {
    let table = synthesize(args.rows, args.seed, args.noise)?;
    write_atomic(&args.out, table.to_csv().as_bytes())?;
    if args.show_truth {
        print!("{}", render_truth());
    }
    println!("wrote {} rows to {}", args.rows, args.out.display());
    Ok(())
}

fn parse_split(s: &str) -> Result<(f64, f64, f64), Error> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::Argument(format!("split fraction '{p}' is not a number")))
        })
        .collect::<Result<_, _>>()?;
    match parts.as_slice() {
        [a, b, c] => Ok((*a, *b, *c)),
        _ => Err(Error::Argument(format!(
            "--split expects three comma-separated fractions, got '{s}'"
        ))),
    }
}

fn cmd_train(args: TrainArgs) -> Result<(), Error> {
    let target = Target::parse(&args.target)?;
    let (train_frac, val_frac, test_frac) = parse_split(&args.split)?;
    let ds = load_dataset(&args.data, target)?;

    // Scaler source: the training split only, unless replicating the
    // original scale-then-split order.
    let parts = split(&ds, train_frac, val_frac, test_frac, args.seed)?;
    let scaler = match args.scale_mode.as_str() {
        "paper" => fit_scaler(&ds)?,
        _ => fit_scaler(&parts.train)?,
    };

    let config = TrainConfig {
        batch_size: args.batch,
        epochs: args.epochs,
        learning_rate: args.lr,
        seed: args.seed,
        validation_fraction: 0.0, // validation comes from the dataset split
    };
    let scaled_train = apply_scaler(&parts.train, &scaler)?;
    let scaled_val = parts
        .val
        .as_ref()
        .map(|v| apply_scaler(v, &scaler))
        .transpose()?;
    let model = train_with_validation(&scaled_train, scaled_val.as_ref(), &scaler, &config)?;

    store::save(&model, &args.model_out, args.timestamp)?;
    write_atomic(&args.curve_out, curve_csv(&model).as_bytes())?;

    if let Some(val) = &parts.val {
        let report = evaluate_model(&model, val, ZeroPolicy::Exclude)?;
        println!("validation {}", report.summary());
    }
    println!(
        "model written to {}, loss curve to {}",
        args.model_out.display(),
        args.curve_out.display()
    );
    Ok(())
}

fn curve_csv(model: &TrainedModel) -> String {
    let mut out = String::from("epoch,train_loss,val_loss\n");
    for (i, train_loss) in model.curve.train_loss.iter().enumerate() {
        let val = model
            .curve
            .val_loss
            .get(i)
            .map(|v| v.to_string())
            .unwrap_or_default();
        out.push_str(&format!("{},{},{}\n", i + 1, train_loss, val));
    }
    out
}

fn cmd_tune(args: TuneArgs) -> Result<(), Error> {
    let target = Target::parse(&args.target)?;
    let (batch_sizes, epochs_list) = parse_grid(&args.grid)?;
    let ds = load_dataset(&args.data, target)?;
    let scaler = fit_scaler(&ds)?;
    let scaled = apply_scaler(&ds, &scaler)?;
    let grid = GridSpec {
        batch_sizes,
        epochs_list,
        folds: args.folds,
        base: TrainConfig {
            learning_rate: args.lr,
            seed: args.seed,
            validation_fraction: 0.0,
            ..TrainConfig::default()
        },
    };
    let result = grid_search(&scaled, &grid)?;
    println!("batch,epochs,mean_cv_mse");
    for cell in &result.cells {
        let score = if cell.diverged {
            "diverged".to_string()
        } else {
            cell.mean_cv_loss.to_string()
        };
        println!("{},{},{}", cell.batch_size, cell.epochs, score);
    }
    println!(
        "best: batch={} epochs={}",
        result.best_config.batch_size, result.best_config.epochs
    );
    Ok(())
}

fn zero_policy(name: &str) -> ZeroPolicy {
    match name {
        "exclude" => ZeroPolicy::Exclude,
        _ => ZeroPolicy::Error,
    }
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), Error> {
    let model = store::load(&args.model)?;
    let ds = load_dataset(&args.data, model.target_name)?;
    let report = evaluate_model(&model, &ds, zero_policy(&args.zero_policy))?;
    let mut buf = Vec::new();
    export_pairs(&report, &mut buf)
        .map_err(|e| Error::io(args.pairs_out.display().to_string(), e))?;
    write_atomic(&args.pairs_out, &buf)?;
    println!("{}", report.summary());
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<(), Error> {
    let model = store::load(&args.model)?;
    let table = parse_csv(open(&args.input)?, &args.input.display().to_string())?;

    // Feature columns only; target columns are optional for prediction.
    let mut positions = Vec::with_capacity(N_FEATURES);
    for name in FEATURE_NAMES {
        match table.header.iter().position(|h| h == name) {
            Some(p) => positions.push(p),
            None => return Err(Error::Schema(format!("input is missing column '{name}'"))),
        }
    }
    let mut values = Vec::with_capacity(table.rows.len() * N_FEATURES);
    for (i, row) in table.rows.iter().enumerate() {
        for (&pos, name) in positions.iter().zip(FEATURE_NAMES) {
            match row[pos] {
                Some(v) => values.push(v),
                None => {
                    return Err(Error::Format {
                        line: i + 2,
                        message: format!("missing value for feature '{name}'"),
                    })
                }
            }
        }
    }
    if table.rows.is_empty() {
        return Err(Error::Argument("input has no data rows".into()));
    }
    let features =
        tripgen::numerics::Matrix::from_vec(table.rows.len(), N_FEATURES, values)?;
    let ds = Dataset::from_parts(
        features,
        tripgen::numerics::Matrix::zeros(table.rows.len(), 1),
        model.target_name,
    )?;
    let scaled = apply_scaler(&ds, &model.scaler)?;
    let (pred, _) = forward(&model.network, &scaled.features)?;

    let mut out = String::from("index,predicted\n");
    for (i, p) in pred.values().iter().enumerate() {
        out.push_str(&format!("{i},{p}\n"));
    }
    write_atomic(&args.out, out.as_bytes())?;
    println!(
        "wrote {} predictions to {}",
        table.rows.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_schema() -> Result<(), Error> {
    for name in FEATURE_NAMES.iter().chain(TARGET_NAMES.iter()) {
        println!("{name}");
    }
    Ok(())
}

//! `sigclass` command line: label, synth, train, tune, predict, evaluate.
//!
//! Exit codes: 2 input, 3 generation, 4 training, 5 evaluation. Errors are
//! reported as one line, `error code=<n> kind=<kind>: <message>`.

mod config;

use std::ffi::OsString;
use std::fmt::{self, Write as _};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::cart::{self, grid_search, load_model, save_model, TreeParams};
use crate::eval::{compare_partitions, render_table};
use crate::ingest::{
    parse_dataset_csv, parse_observation_csv, parse_satellite_csv, write_catalog_csv, write_dataset_csv, CatalogEntry,
    SatelliteSighting,
};
use crate::io::write_atomic;
use crate::scene::{label_condition, SatDirection, UrbanScene};
use crate::synth::{generate_dataset, Cn0Model, EpochSpan, GenerationPlan};

pub use config::{default_partitions, PartitionConfig, RunConfig, DEFAULT_EPOCH_START_S, DEFAULT_SEED};

const DEFAULT_OUT_DIR: &str = "sigclass-out";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    fn new(code: i32, kind: &'static str, message: impl fmt::Display) -> Self {
        // keep the report on one line
        let message = message.to_string().split_whitespace().collect::<Vec<_>>().join(" ");
        CliError { code, kind, message }
    }

    fn input(m: impl fmt::Display) -> Self {
        Self::new(2, "input", m)
    }

    fn generation(m: impl fmt::Display) -> Self {
        Self::new(3, "generation", m)
    }

    fn training(m: impl fmt::Display) -> Self {
        Self::new(4, "training", m)
    }

    fn evaluation(m: impl fmt::Display) -> Self {
        Self::new(5, "evaluation", m)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error code={} kind={}: {}", self.code, self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

#[derive(Parser, Debug)]
#[command(name = "sigclass", version, about = "GPS reception condition labeling, synthesis and CART classification")]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ground-truth label for every receiver/satellite pair of a scene.
    Label {
        #[arg(long)]
        scene: Option<String>,
        #[arg(long)]
        satellites: Option<String>,
    },
    /// Generate the T0-T3 dataset partitions and their catalog.
    Synth {
        #[arg(long)]
        satellites: Option<String>,
        #[arg(long)]
        cn0_model: Option<PathBuf>,
    },
    /// Fit a tree with fixed hyperparameters.
    Train {
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long, conflicts_with = "unlimited_depth")]
        max_depth: Option<u32>,
        #[arg(long)]
        unlimited_depth: bool,
        #[arg(long)]
        min_samples_split: Option<usize>,
        #[arg(long)]
        min_samples_leaf: Option<usize>,
        #[arg(long)]
        min_impurity_decrease: Option<f64>,
    },
    /// Stratified k-fold grid search, then fit the best point on all data.
    Tune {
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Classify the records of an observation CSV.
    Predict {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Per-partition and pooled accuracy reports.
    Evaluate {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long = "dataset")]
        datasets: Vec<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    write_atomic(path, contents.as_bytes()).map_err(|e| CliError::new(1, "io", format!("{}: {e}", path.display())))
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned())
}

fn load_scene(reference: &str) -> Result<UrbanScene, CliError> {
    let (text, origin) = match reference.strip_prefix("builtin:") {
        Some(id) => {
            let text = config::builtin_scene(id).ok_or_else(|| CliError::input(format!("no bundled scene {id:?}")))?;
            (text.to_string(), reference.to_string())
        }
        None => (read(Path::new(reference))?, reference.to_string()),
    };
    UrbanScene::from_json(&text).map_err(|e| CliError::input(format!("{origin}: {e}")))
}

fn load_satellites(reference: &str) -> Result<Vec<SatelliteSighting>, CliError> {
    let text = match reference.strip_prefix("builtin:") {
        Some(id) => config::builtin_satellites(id)
            .ok_or_else(|| CliError::input(format!("no bundled satellite list {id:?}")))?
            .to_string(),
        None => read(Path::new(reference))?,
    };
    parse_satellite_csv(&text).map_err(|e| CliError::input(format!("{reference}: {e}")))
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::input(format!("missing --{flag}")))
}

struct Context {
    cfg: RunConfig,
    seed: u64,
    out: PathBuf,
}

impl Context {
    fn out_file(&self, name: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.out)
            .map_err(|e| CliError::new(1, "io", format!("{}: {e}", self.out.display())))?;
        Ok(self.out.join(name))
    }
}

/// Parses `args` (including the program name) and runs one subcommand.
/// Human-readable progress goes to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            CliError { code: 0, kind: "help", message: e.to_string() }
        }
        _ => CliError::input(e.to_string()),
    })?;
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(CliError::input)?,
        None => RunConfig::default(),
    };
    let seed = cli.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let out = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let ctx = Context { cfg, seed, out };
    let mut text = String::new();
    match cli.command {
        Command::Label { scene, satellites } => cmd_label(&ctx, scene, satellites, &mut text)?,
        Command::Synth { satellites, cn0_model } => cmd_synth(&ctx, satellites, cn0_model, &mut text)?,
        Command::Train { dataset, max_depth, unlimited_depth, min_samples_split, min_samples_leaf, min_impurity_decrease } => {
            let mut params = ctx.cfg.params.unwrap_or_default();
            if unlimited_depth {
                params.max_depth = None;
            } else if max_depth.is_some() {
                params.max_depth = max_depth;
            }
            params.min_samples_split = min_samples_split.unwrap_or(params.min_samples_split);
            params.min_samples_leaf = min_samples_leaf.unwrap_or(params.min_samples_leaf);
            params.min_impurity_decrease = min_impurity_decrease.unwrap_or(params.min_impurity_decrease);
            cmd_train(&ctx, dataset, params, &mut text)?
        }
        Command::Tune { dataset, k } => cmd_tune(&ctx, dataset, k, &mut text)?,
        Command::Predict { model, input } => cmd_predict(&ctx, model, input, &mut text)?,
        Command::Evaluate { model, datasets } => cmd_evaluate(&ctx, model, datasets, &mut text)?,
    }
    stdout.write_all(text.as_bytes()).map_err(|e| CliError::new(1, "io", e))?;
    Ok(())
}

fn cmd_label(ctx: &Context, scene: Option<String>, satellites: Option<String>, text: &mut String) -> Result<(), CliError> {
    let scene = load_scene(&require(scene.or_else(|| ctx.cfg.scene.clone()), "scene")?)?;
    let sats = load_satellites(&require(satellites.or_else(|| ctx.cfg.satellites.clone()), "satellites")?)?;
    let mut csv = String::from("scene_id,receiver_id,sat_id,azimuth_deg,elevation_deg,label\n");
    let mut rows = 0;
    for rx in scene.receivers() {
        for sat in &sats {
            let truth = label_condition(&scene, rx.pos, SatDirection::from_az_el(sat.azimuth_deg, sat.elevation_deg));
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                scene.scene_id(),
                rx.id,
                sat.sat_id,
                sat.azimuth_deg,
                sat.elevation_deg,
                truth.as_str()
            );
            rows += 1;
        }
    }
    let path = ctx.out_file(&format!("labels_{}.csv", scene.scene_id()))?;
    write(&path, &csv)?;
    let _ = writeln!(text, "labeled {rows} receiver/satellite pairs -> {}", path.display());
    Ok(())
}

fn cmd_synth(ctx: &Context, satellites: Option<String>, cn0_model: Option<PathBuf>, text: &mut String) -> Result<(), CliError> {
    let sat_ref = satellites.or_else(|| ctx.cfg.satellites.clone()).unwrap_or_else(|| "builtin:default".into());
    let sats = load_satellites(&sat_ref)?;
    let model = match cn0_model.or_else(|| ctx.cfg.cn0_model.clone()) {
        Some(path) => Cn0Model::from_json(&read(&path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?,
        None => Cn0Model::default(),
    };
    let partitions = ctx.cfg.partitions.clone().unwrap_or_else(default_partitions);
    if partitions.is_empty() {
        return Err(CliError::input("no partitions configured"));
    }
    let mut catalog = Vec::with_capacity(partitions.len());
    let mut outputs = Vec::with_capacity(partitions.len());
    for part in &partitions {
        if !crate::scene::valid_id(&part.tag) {
            return Err(CliError::input(format!("invalid partition tag {:?}", part.tag)));
        }
        let scenes = part.scenes.iter().map(|s| load_scene(s)).collect::<Result<Vec<_>, _>>()?;
        let plan = GenerationPlan {
            partition_tag: part.tag.clone(),
            epochs: EpochSpan { start_s: part.epoch_start_s, count: part.epochs, step_s: part.epoch_step_s },
            per_class_cap: part.per_class_cap,
            seed: ctx.seed,
        };
        let dataset = generate_dataset(&scenes, &model, &sats, &plan)
            .map_err(|e| CliError::generation(format!("partition {}: {e}", part.tag)))?;
        catalog.push(CatalogEntry::from_dataset(&dataset));
        outputs.push((format!("{}.csv", part.tag), write_dataset_csv(&dataset)));
    }
    // nothing is written unless every partition generated
    for (name, body) in &outputs {
        write(&ctx.out_file(name)?, body)?;
    }
    write(&ctx.out_file("catalog.csv")?, &write_catalog_csv(&catalog))?;
    for e in &catalog {
        let [a, b, c] = e.counts.0;
        let _ = writeln!(text, "{}: {} samples (NLOS {a}, LOS {b}, LOS+NLOS {c})", e.partition_tag, e.total);
    }
    Ok(())
}

fn load_training_set(ctx: &Context, dataset: Option<PathBuf>) -> Result<crate::ingest::Dataset, CliError> {
    let path = require(dataset.or_else(|| ctx.cfg.dataset.clone()), "dataset")?;
    let d = parse_dataset_csv(&read(&path)?, stem(&path)).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if d.is_empty() {
        return Err(CliError::training(format!("{}: dataset is empty", path.display())));
    }
    Ok(d)
}

fn describe(p: &TreeParams) -> String {
    format!(
        "max_depth={} min_samples_split={} min_samples_leaf={} min_impurity_decrease={}",
        p.max_depth.map_or_else(|| "unlimited".into(), |d| d.to_string()),
        p.min_samples_split,
        p.min_samples_leaf,
        p.min_impurity_decrease
    )
}

fn cmd_train(ctx: &Context, dataset: Option<PathBuf>, params: TreeParams, text: &mut String) -> Result<(), CliError> {
    let data = load_training_set(ctx, dataset)?;
    let model = cart::fit(&data, &params).map_err(CliError::training)?.with_seed(ctx.seed);
    let path = ctx.out_file("model.json")?;
    write(&path, &save_model(&model))?;
    let _ = writeln!(text, "trained on {} samples: {}", data.len(), describe(&params));
    let _ = writeln!(text, "depth {}, {} leaves -> {}", model.depth(), model.leaf_count(), path.display());
    Ok(())
}

fn cmd_tune(ctx: &Context, dataset: Option<PathBuf>, k: Option<usize>, text: &mut String) -> Result<(), CliError> {
    let data = load_training_set(ctx, dataset)?;
    let grid = ctx.cfg.grid.clone().unwrap_or_else(cart::default_grid);
    let k = k.or(ctx.cfg.k).unwrap_or(cart::DEFAULT_FOLDS);
    let report = grid_search(&data, &grid, k, ctx.seed).map_err(CliError::training)?;
    let model = cart::fit(&data, &report.best).map_err(CliError::training)?.with_seed(ctx.seed);
    let mut report_json = serde_json::to_string_pretty(&report).expect("report serializes");
    report_json.push('\n');
    write(&ctx.out_file("cv_report.json")?, &report_json)?;
    write(&ctx.out_file("model.json")?, &save_model(&model))?;
    let best = &report.grid[report.best_index];
    let _ = writeln!(text, "{} grid points, {k}-fold CV on {} samples", report.grid.len(), data.len());
    let _ = writeln!(text, "best: {} (mean accuracy {:.2}%)", describe(&report.best), best.mean_accuracy * 100.0);
    Ok(())
}

fn load_model_file(ctx: &Context, model: Option<PathBuf>, text: &mut String) -> Result<cart::TreeModel, CliError> {
    let path = require(model.or_else(|| ctx.cfg.model.clone()), "model")?;
    let loaded = load_model(&read(&path)?).map_err(|e| CliError::evaluation(format!("{}: {e}", path.display())))?;
    if loaded.fingerprint_mismatch {
        let _ = writeln!(text, "warning: {} was modified after fitting (fingerprint mismatch)", path.display());
    }
    Ok(loaded.model)
}

fn cmd_predict(ctx: &Context, model: Option<PathBuf>, input: Option<PathBuf>, text: &mut String) -> Result<(), CliError> {
    let model = load_model_file(ctx, model, text)?;
    let path = require(input.or_else(|| ctx.cfg.input.clone()), "input")?;
    let records =
        parse_observation_csv(&read(&path)?).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut csv = String::from("epoch,sat_id,label\n");
    for r in &records {
        let _ = writeln!(csv, "{},{},{}", r.epoch, r.sat_id, model.predict(&cart::extract_features(r)));
    }
    let out = ctx.out_file("predictions.csv")?;
    write(&out, &csv)?;
    let _ = writeln!(text, "classified {} records -> {}", records.len(), out.display());
    Ok(())
}

fn cmd_evaluate(ctx: &Context, model: Option<PathBuf>, datasets: Vec<PathBuf>, text: &mut String) -> Result<(), CliError> {
    let model = load_model_file(ctx, model, text)?;
    let paths = if datasets.is_empty() { ctx.cfg.datasets.clone().unwrap_or_default() } else { datasets };
    if paths.is_empty() {
        return Err(CliError::input("missing --dataset"));
    }
    let mut partitions = Vec::with_capacity(paths.len());
    for path in &paths {
        let body = read(path)?;
        let d = parse_dataset_csv(&body, stem(path)).map_err(|e| CliError::evaluation(format!("{}: {e}", path.display())))?;
        if partitions.iter().any(|p: &crate::ingest::Dataset| p.partition_tag() == d.partition_tag()) {
            return Err(CliError::input(format!("two datasets named {}", d.partition_tag())));
        }
        partitions.push(d);
    }
    let cmp = compare_partitions(&model, &partitions).map_err(CliError::evaluation)?;
    for r in &cmp.partitions {
        write(&ctx.out_file(&format!("report_{}.json", r.partition_tag))?, &r.to_json())?;
    }
    write(&ctx.out_file("report_pooled.json")?, &cmp.pooled.to_json())?;
    let mut all: Vec<_> = cmp.partitions.iter().collect();
    all.push(&cmp.pooled);
    let table = render_table(&all);
    write(&ctx.out_file("report.txt")?, &table)?;
    text.push_str(&table);
    Ok(())
}

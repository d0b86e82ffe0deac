use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cart::TreeParams;

pub const DEFAULT_SEED: u64 = 42;

/// Week-of-time origin for generated epochs (Wednesday 00:00 GPST).
pub const DEFAULT_EPOCH_START_S: f64 = 345_600.0;

/// One output partition of `synth`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    pub tag: String,
    /// Scene files, or `builtin:<id>` for a bundled scene.
    pub scenes: Vec<String>,
    #[serde(default = "default_epoch_start")]
    pub epoch_start_s: f64,
    pub epochs: u32,
    #[serde(default = "default_epoch_step")]
    pub epoch_step_s: f64,
    #[serde(default)]
    pub per_class_cap: Option<u64>,
}

fn default_epoch_start() -> f64 {
    DEFAULT_EPOCH_START_S
}

fn default_epoch_step() -> f64 {
    1.0
}

/// Settings shared by all subcommands; every field can also come from a flag.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// Satellite list CSV or `builtin:default`.
    pub satellites: Option<String>,
    /// Scene file or `builtin:<id>` for `label`.
    pub scene: Option<String>,
    /// JSON C/N0 model overriding the built-in calibration.
    pub cn0_model: Option<PathBuf>,
    pub partitions: Option<Vec<PartitionConfig>>,
    pub dataset: Option<PathBuf>,
    pub datasets: Option<Vec<PathBuf>>,
    pub model: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub params: Option<TreeParams>,
    pub grid: Option<Vec<TreeParams>>,
    pub k: Option<usize>,
}

impl RunConfig {
    /// Reads a config file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let fix_ref = |s: &mut String| {
            if !s.starts_with("builtin:") && Path::new(s).is_relative() {
                *s = base.join(&*s).to_string_lossy().into_owned();
            }
        };
        for p in [&mut cfg.out, &mut cfg.cn0_model, &mut cfg.dataset, &mut cfg.model, &mut cfg.input].into_iter().flatten() {
            fix(p);
        }
        cfg.datasets.iter_mut().flatten().for_each(fix);
        cfg.satellites.iter_mut().for_each(fix_ref);
        cfg.scene.iter_mut().for_each(fix_ref);
        for part in cfg.partitions.iter_mut().flatten() {
            part.scenes.iter_mut().for_each(fix_ref);
        }
        Ok(cfg)
    }
}

/// T0/T1 from scenes A-C on disjoint epochs, T2 from D, T3 from E with
/// about 1.5x the T0 sample count.
pub fn default_partitions() -> Vec<PartitionConfig> {
    let abc: Vec<String> = ["A", "B", "C"].iter().map(|s| format!("builtin:{s}")).collect();
    let part = |tag: &str, scenes: Vec<String>, start_offset: f64, epochs: u32, cap: Option<u64>| PartitionConfig {
        tag: tag.into(),
        scenes,
        epoch_start_s: DEFAULT_EPOCH_START_S + start_offset,
        epochs,
        epoch_step_s: 1.0,
        per_class_cap: cap,
    };
    vec![
        part("T0", abc.clone(), 0.0, 120, Some(2500)),
        part("T1", abc, 3600.0, 120, Some(2500)),
        part("T2", vec!["builtin:D".into()], 0.0, 130, Some(2100)),
        part("T3", vec!["builtin:E".into()], 0.0, 230, Some(3750)),
    ]
}

pub(crate) fn builtin_scene(id: &str) -> Option<&'static str> {
    match id {
        "A" => Some(include_str!("../../data/scenes/A.json")),
        "B" => Some(include_str!("../../data/scenes/B.json")),
        "C" => Some(include_str!("../../data/scenes/C.json")),
        "D" => Some(include_str!("../../data/scenes/D.json")),
        "E" => Some(include_str!("../../data/scenes/E.json")),
        _ => None,
    }
}

pub(crate) fn builtin_satellites(id: &str) -> Option<&'static str> {
    (id == "default").then_some(include_str!("../../data/satellites.csv"))
}

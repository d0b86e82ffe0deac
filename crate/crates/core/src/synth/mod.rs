//! Seeded synthetic observations: geometric labels from [`crate::scene`],
//! class-conditional C/N0 from a [`Cn0Model`].

mod model;
mod stream;

use std::collections::HashSet;

use rayon::prelude::*;

pub use model::{sample_cn0, ClassCn0, Cn0Model, Cn0Sample};
pub use stream::{keyed_rng, keyed_seed};

use crate::ingest::{
    build_dataset, stratified_subsample, Dataset, FeatureVector, IngestError, LabeledSample, Provenance,
    SatelliteSighting,
};
use crate::scene::{label_condition, SatDirection, UrbanScene};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("invalid C/N0 model: {0}")]
    InvalidModel(String),
    #[error("invalid generation plan: {0}")]
    InvalidPlan(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
}

/// Evenly spaced epochs, seconds of GPS week.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochSpan {
    pub start_s: f64,
    pub count: u32,
    pub step_s: f64,
}

impl EpochSpan {
    pub fn epoch(&self, i: u32) -> f64 {
        self.start_s + i as f64 * self.step_s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationPlan {
    pub partition_tag: String,
    pub epochs: EpochSpan,
    /// Balanced per-class size after generation; `None` keeps everything.
    pub per_class_cap: Option<u64>,
    pub seed: u64,
}

/// Provenance scene field for a sample seen by `receiver_id` in `scene_id`.
pub fn provenance_scene(scene_id: &str, receiver_id: &str) -> String {
    format!("{scene_id}/{receiver_id}")
}

/// Inverse of [`provenance_scene`].
pub fn split_provenance_scene(field: &str) -> Option<(&str, &str)> {
    field.split_once('/')
}

/// Per-scene additive C/N0 offset for this run seed.
pub fn scene_bias_db(model: &Cn0Model, scene_id: &str, seed: u64) -> f64 {
    model.draw_scene_bias(&mut keyed_rng(seed, &["scene-bias", scene_id]))
}

/// Labels every (receiver, satellite) pair of every scene, draws C/N0 for
/// each epoch, drops `NoSignal` pairs and, if capped, subsamples to a
/// balanced dataset.
pub fn generate_dataset(
    scenes: &[UrbanScene],
    model: &Cn0Model,
    satellites: &[SatelliteSighting],
    plan: &GenerationPlan,
) -> Result<Dataset, SynthError> {
    model.validate()?;
    let EpochSpan { start_s, count, step_s } = plan.epochs;
    if count == 0 {
        return Err(SynthError::InvalidPlan("at least one epoch is required".into()));
    }
    let last = plan.epochs.epoch(count - 1);
    if !(start_s >= 0.0 && step_s > 0.0 && last < 604_800.0) {
        return Err(SynthError::InvalidPlan(format!("epochs {start_s} + k * {step_s} must stay inside one GPS week")));
    }
    let mut ids = HashSet::new();
    if let Some(dup) = scenes.iter().find(|s| !ids.insert(s.scene_id())) {
        return Err(SynthError::InvalidPlan(format!("scene {} listed twice", dup.scene_id())));
    }

    let mut cells = Vec::new();
    for scene in scenes {
        let bias = scene_bias_db(model, scene.scene_id(), plan.seed);
        for rx in scene.receivers() {
            for sat in satellites {
                cells.push((scene, rx, sat, bias));
            }
        }
    }

    let per_cell: Vec<Vec<LabeledSample>> = cells
        .par_iter()
        .map(|&(scene, rx, sat, bias)| {
            let dir = SatDirection::from_az_el(sat.azimuth_deg, sat.elevation_deg);
            let Some(label) = label_condition(scene, rx.pos, dir).class() else {
                return Vec::new();
            };
            let origin = provenance_scene(scene.scene_id(), &rx.id);
            (0..count)
                .map(|i| {
                    let epoch = plan.epochs.epoch(i);
                    let epoch_key = epoch.to_string();
                    let mut rng = keyed_rng(plan.seed, &["cn0", scene.scene_id(), &rx.id, &sat.sat_id, &epoch_key]);
                    let draw = sample_cn0(model, label, sat.elevation_deg, bias, &mut rng);
                    LabeledSample {
                        features: FeatureVector::new(sat.elevation_deg, draw.cn0_rhcp_dbhz, draw.cn0_diff_dbhz),
                        label,
                        provenance: Provenance {
                            scene_id: origin.clone(),
                            epoch,
                            sat_id: sat.sat_id.clone(),
                            lhcp_imputed: false,
                        },
                    }
                })
                .collect()
        })
        .collect();

    let all = build_dataset(per_cell.into_iter().flatten().collect(), plan.partition_tag.clone());
    match plan.per_class_cap {
        Some(cap) => Ok(stratified_subsample(&all, cap, keyed_seed(plan.seed, &["subsample", &plan.partition_tag]))?),
        None => Ok(all),
    }
}

/// Class counts the scenes would yield per epoch before any cap.
pub fn label_census(scenes: &[UrbanScene], satellites: &[SatelliteSighting]) -> (crate::ClassCounts, u64) {
    let mut counts = crate::ClassCounts::default();
    let mut no_signal = 0;
    for scene in scenes {
        for rx in scene.receivers() {
            for sat in satellites {
                match label_condition(scene, rx.pos, SatDirection::from_az_el(sat.azimuth_deg, sat.elevation_deg)).class() {
                    Some(c) => counts[c] += 1,
                    None => no_signal += 1,
                }
            }
        }
    }
    (counts, no_signal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{Building, Receiver, Vec3};
    use crate::SignalClass;

    fn canyon() -> UrbanScene {
        let wall = |x0: f64, x1: f64, h: f64| Building {
            footprint: vec![[x0, -100.0], [x1, -100.0], [x1, 100.0], [x0, 100.0]],
            height: h,
        };
        UrbanScene::new(
            "C1".into(),
            vec![wall(-30.0, -10.0, 40.0), wall(10.0, 30.0, 25.0)],
            vec![
                Receiver { id: "r1".into(), pos: Vec3::new(0.0, 0.0, 1.5) },
                Receiver { id: "r2".into(), pos: Vec3::new(-6.0, 20.0, 1.5) },
            ],
        )
        .unwrap()
    }

    fn sats() -> Vec<SatelliteSighting> {
        [(0.0, 70.0), (90.0, 20.0), (90.0, 60.0), (270.0, 30.0), (270.0, 75.0), (45.0, 40.0), (180.0, 15.0)]
            .iter()
            .enumerate()
            .map(|(i, &(az, el))| SatelliteSighting { sat_id: format!("G{:02}", i + 1), azimuth_deg: az, elevation_deg: el })
            .collect()
    }

    fn plan(cap: Option<u64>) -> GenerationPlan {
        GenerationPlan {
            partition_tag: "T0".into(),
            epochs: EpochSpan { start_s: 345_600.0, count: 20, step_s: 1.0 },
            per_class_cap: cap,
            seed: 42,
        }
    }

    #[test]
    fn labels_match_geometry() {
        let scene = canyon();
        let d = generate_dataset(std::slice::from_ref(&scene), &Cn0Model::default(), &sats(), &plan(None)).unwrap();
        assert!(!d.is_empty());
        for s in d.samples() {
            let (sid, rid) = split_provenance_scene(&s.provenance.scene_id).unwrap();
            assert_eq!(sid, "C1");
            let rx = scene.receivers().iter().find(|r| r.id == rid).unwrap();
            let sat = sats().into_iter().find(|t| t.sat_id == s.provenance.sat_id).unwrap();
            let truth = label_condition(&scene, rx.pos, SatDirection::from_az_el(sat.azimuth_deg, sat.elevation_deg));
            assert_eq!(truth.class(), Some(s.label));
            assert_eq!(s.features.elevation_deg, sat.elevation_deg);
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let a = generate_dataset(&[canyon()], &Cn0Model::default(), &sats(), &plan(None)).unwrap();
        let b = generate_dataset(&[canyon()], &Cn0Model::default(), &sats(), &plan(None)).unwrap();
        assert_eq!(a, b);
        let c = generate_dataset(&[canyon()], &Cn0Model::default(), &sats(), &GenerationPlan { seed: 7, ..plan(None) }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn satellite_order_does_not_change_draws() {
        let a = generate_dataset(&[canyon()], &Cn0Model::default(), &sats(), &plan(None)).unwrap();
        let mut rev = sats();
        rev.reverse();
        let b = generate_dataset(&[canyon()], &Cn0Model::default(), &rev, &plan(None)).unwrap();
        let key = |s: &LabeledSample| (s.provenance.scene_id.clone(), s.provenance.sat_id.clone(), s.provenance.epoch.to_bits());
        let mut x: Vec<_> = a.samples().iter().map(|s| (key(s), s.features.to_array().map(f64::to_bits))).collect();
        let mut y: Vec<_> = b.samples().iter().map(|s| (key(s), s.features.to_array().map(f64::to_bits))).collect();
        x.sort();
        y.sort();
        assert_eq!(x, y);
    }

    #[test]
    fn cap_balances_or_fails() {
        let all = generate_dataset(&[canyon()], &Cn0Model::default(), &sats(), &plan(None)).unwrap();
        let min = all.class_counts().0.into_iter().min().unwrap();
        assert!(min > 0, "{:?}", all.class_counts());
        let capped = generate_dataset(&[canyon()], &Cn0Model::default(), &sats(), &plan(Some(min))).unwrap();
        assert_eq!(capped.class_counts().0, [min; 3]);
        let err = generate_dataset(&[canyon()], &Cn0Model::default(), &sats(), &plan(Some(min + 1))).unwrap_err();
        assert!(matches!(err, SynthError::Ingest(IngestError::InsufficientClassSamples { .. })));
    }

    #[test]
    fn bad_plans() {
        let mut p = plan(None);
        p.epochs.count = 0;
        assert!(generate_dataset(&[canyon()], &Cn0Model::default(), &sats(), &p).is_err());
        let mut p = plan(None);
        p.epochs.start_s = 604_799.0;
        assert!(generate_dataset(&[canyon()], &Cn0Model::default(), &sats(), &p).is_err());
        assert!(generate_dataset(&[canyon(), canyon()], &Cn0Model::default(), &sats(), &plan(None)).is_err());
    }

    #[test]
    fn bias_shifts_means_within_clamps() {
        let m = Cn0Model::default();
        let mean = |bias: f64| {
            let mut rng = keyed_rng(1, &["t"]);
            let draws: Vec<Cn0Sample> = (0..5000).map(|_| sample_cn0(&m, SignalClass::NlosOnly, 20.0, bias, &mut rng)).collect();
            assert!(draws.iter().all(|d| (25.0..=51.0).contains(&d.cn0_rhcp_dbhz) && (-10.0..=8.0).contains(&d.cn0_diff_dbhz)));
            draws.iter().map(|d| d.cn0_rhcp_dbhz).sum::<f64>() / draws.len() as f64
        };
        assert!(mean(3.0) > mean(0.0) + 2.0);
        assert!(mean(-3.0) < mean(0.0) - 2.0);
    }
}

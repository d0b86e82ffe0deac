use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::SynthError;
use crate::SignalClass;

/// C/N0 generator for one reception class.
///
/// `cn0_rhcp = clamp(rhcp_mean + rhcp_elevation_gain * sin(el) + bias + N(0, rhcp_std^2))`
/// and `cn0_diff = clamp(diff_mean + bias + N(0, diff_std^2))`, where `bias`
/// is the per-scene offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassCn0 {
    pub rhcp_mean: f64,
    #[serde(default)]
    pub rhcp_elevation_gain: f64,
    pub rhcp_std: f64,
    pub rhcp_min: f64,
    pub rhcp_max: f64,
    pub diff_mean: f64,
    pub diff_std: f64,
    pub diff_min: f64,
    pub diff_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cn0Model {
    pub nlos_only: ClassCn0,
    pub los_only: ClassCn0,
    pub los_nlos: ClassCn0,
    /// Std. dev. of the additive per-scene offset, dB.
    pub scene_bias_std_db: f64,
}

impl Default for Cn0Model {
    fn default() -> Self {
        Cn0Model {
            nlos_only: ClassCn0 {
                rhcp_mean: 33.0,
                rhcp_elevation_gain: 0.0,
                rhcp_std: 5.0,
                rhcp_min: 25.0,
                rhcp_max: 51.0,
                diff_mean: -1.0,
                diff_std: 3.0,
                diff_min: -10.0,
                diff_max: 8.0,
            },
            los_only: ClassCn0 {
                rhcp_mean: 38.0,
                rhcp_elevation_gain: 9.0,
                rhcp_std: 2.0,
                rhcp_min: 36.0,
                rhcp_max: 51.0,
                diff_mean: 7.0,
                diff_std: 2.5,
                diff_min: 0.5,
                diff_max: 15.0,
            },
            los_nlos: ClassCn0 {
                rhcp_mean: 40.0,
                rhcp_elevation_gain: 0.0,
                rhcp_std: 5.0,
                rhcp_min: 25.0,
                rhcp_max: 51.0,
                diff_mean: 3.0,
                diff_std: 4.0,
                diff_min: -8.0,
                diff_max: 14.0,
            },
            scene_bias_std_db: 1.5,
        }
    }
}

/// One synthetic C/N0 pair; `cn0_diff_dbhz` is the clamped draw itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cn0Sample {
    pub cn0_rhcp_dbhz: f64,
    pub cn0_lhcp_dbhz: f64,
    pub cn0_diff_dbhz: f64,
}

impl Cn0Model {
    pub fn class(&self, label: SignalClass) -> &ClassCn0 {
        match label {
            SignalClass::NlosOnly => &self.nlos_only,
            SignalClass::LosOnly => &self.los_only,
            SignalClass::LosNlos => &self.los_nlos,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        for class in SignalClass::ALL {
            let c = self.class(class);
            let bad = |what: &str| Err(SynthError::InvalidModel(format!("{class}: {what}")));
            let all = [
                c.rhcp_mean,
                c.rhcp_elevation_gain,
                c.rhcp_std,
                c.rhcp_min,
                c.rhcp_max,
                c.diff_mean,
                c.diff_std,
                c.diff_min,
                c.diff_max,
            ];
            if all.iter().any(|v| !v.is_finite()) {
                return bad("non-finite parameter");
            }
            if !(c.rhcp_std > 0.0 && c.diff_std > 0.0) {
                return bad("standard deviations must be positive");
            }
            if !(c.rhcp_min < c.rhcp_max && c.diff_min < c.diff_max) {
                return bad("clamp bounds must be ordered");
            }
        }
        if self.los_only.diff_min <= 0.0 {
            return Err(SynthError::InvalidModel("LOS: diff lower clamp must be positive".into()));
        }
        if !(self.scene_bias_std_db.is_finite() && self.scene_bias_std_db > 0.0) {
            return Err(SynthError::InvalidModel("scene bias std must be positive".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, SynthError> {
        let m: Cn0Model = serde_json::from_str(text).map_err(|e| SynthError::InvalidModel(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    /// Per-scene additive offset, dB.
    pub fn draw_scene_bias<R: Rng>(&self, rng: &mut R) -> f64 {
        Normal::new(0.0, self.scene_bias_std_db).expect("validated std").sample(rng)
    }
}

/// Draws RHCP and LHCP C/N0 for one observation of class `label`.
pub fn sample_cn0<R: Rng>(model: &Cn0Model, label: SignalClass, elevation_deg: f64, scene_bias_db: f64, rng: &mut R) -> Cn0Sample {
    let c = model.class(label);
    let rhcp_noise = Normal::new(0.0, c.rhcp_std).expect("validated std").sample(rng);
    let diff_noise = Normal::new(0.0, c.diff_std).expect("validated std").sample(rng);
    let rhcp = (c.rhcp_mean + c.rhcp_elevation_gain * elevation_deg.to_radians().sin() + scene_bias_db + rhcp_noise)
        .clamp(c.rhcp_min, c.rhcp_max);
    let diff = (c.diff_mean + scene_bias_db + diff_noise).clamp(c.diff_min, c.diff_max);
    Cn0Sample { cn0_rhcp_dbhz: rhcp, cn0_lhcp_dbhz: rhcp - diff, cn0_diff_dbhz: diff }
}

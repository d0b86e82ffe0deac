//! 2.5D urban scene and geometric ground-truth labeling.
//!
//! Buildings are vertical prisms (polygon footprint, flat roof). A satellite
//! is a direction at infinity. The direct path is blocked when the ray from
//! the receiver hits any facade or roof; a reflected path exists when some
//! facade admits an unobstructed single-bounce specular path, found by
//! mirroring the receiver across the facade plane.

mod polygon;
mod trace;
mod vec3;

use serde::{Deserialize, Serialize};

pub use polygon::Containment;
pub use trace::{label_condition, los_blocked, reflection_exists, GroundTruth, RAY_EPSILON_M, SURFACE_TOLERANCE};
pub use vec3::{SatDirection, Vec3};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SceneError {
    #[error("scene JSON: {0}")]
    Json(String),
    #[error("scene id must be non-empty without commas, slashes or whitespace, got {0:?}")]
    BadId(String),
    #[error("building {building}: {reason}")]
    BadBuilding { building: usize, reason: String },
    #[error("receiver {receiver}: {reason}")]
    BadReceiver { receiver: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Building {
    /// Counter-clockwise footprint vertices `[east, north]`, meters.
    pub footprint: Vec<[f64; 2]>,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Receiver {
    pub id: String,
    pub pos: Vec3,
}

/// One vertical wall rectangle of a building.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Facade {
    pub building: usize,
    pub start: [f64; 2],
    pub end: [f64; 2],
    /// Outward horizontal unit normal.
    pub normal: [f64; 2],
    pub height: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SceneFile", into = "SceneFile")]
pub struct UrbanScene {
    scene_id: String,
    buildings: Vec<Building>,
    receivers: Vec<Receiver>,
    facades: Vec<Facade>,
}

#[derive(Serialize, Deserialize)]
struct SceneFile {
    scene_id: String,
    buildings: Vec<Building>,
    receivers: Vec<Receiver>,
}

impl TryFrom<SceneFile> for UrbanScene {
    type Error = SceneError;
    fn try_from(f: SceneFile) -> Result<Self, SceneError> {
        UrbanScene::new(f.scene_id, f.buildings, f.receivers)
    }
}

impl From<UrbanScene> for SceneFile {
    fn from(s: UrbanScene) -> Self {
        SceneFile { scene_id: s.scene_id, buildings: s.buildings, receivers: s.receivers }
    }
}

impl PartialEq for UrbanScene {
    fn eq(&self, other: &Self) -> bool {
        self.scene_id == other.scene_id && self.buildings == other.buildings && self.receivers == other.receivers
    }
}

pub fn valid_id(id: &str) -> bool {
    !id.is_empty() && !id.chars().any(|c| c == ',' || c == '/' || c.is_whitespace() || c.is_control())
}

impl UrbanScene {
    pub fn new(scene_id: String, buildings: Vec<Building>, receivers: Vec<Receiver>) -> Result<Self, SceneError> {
        if !valid_id(&scene_id) {
            return Err(SceneError::BadId(scene_id));
        }
        for (i, b) in buildings.iter().enumerate() {
            polygon::validate_building(b).map_err(|reason| SceneError::BadBuilding { building: i, reason })?;
        }
        let mut seen = std::collections::HashSet::new();
        for r in &receivers {
            let bad = |reason: String| SceneError::BadReceiver { receiver: r.id.clone(), reason };
            if !valid_id(&r.id) {
                return Err(bad("invalid id".into()));
            }
            if !seen.insert(r.id.as_str()) {
                return Err(bad("duplicate id".into()));
            }
            if !r.pos.is_finite() {
                return Err(bad("non-finite position".into()));
            }
            for (i, b) in buildings.iter().enumerate() {
                let inside_plan = polygon::contains([r.pos.e, r.pos.n], &b.footprint) == Containment::Inside;
                if inside_plan && r.pos.u > 0.0 && r.pos.u < b.height {
                    return Err(bad(format!("strictly inside building {i}")));
                }
            }
        }
        let facades = buildings
            .iter()
            .enumerate()
            .flat_map(|(bi, b)| {
                let n = b.footprint.len();
                (0..n).map(move |k| {
                    let start = b.footprint[k];
                    let end = b.footprint[(k + 1) % n];
                    let (dx, dy) = (end[0] - start[0], end[1] - start[1]);
                    let len = dx.hypot(dy);
                    Facade { building: bi, start, end, normal: [dy / len, -dx / len], height: b.height }
                })
            })
            .collect();
        Ok(UrbanScene { scene_id, buildings, receivers, facades })
    }

    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        serde_json::from_str(text).map_err(|e| SceneError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    pub fn scene_id(&self) -> &str {
        &self.scene_id
    }

    pub fn buildings(&self) -> &[Building] {
        &self.buildings
    }

    pub fn receivers(&self) -> &[Receiver] {
        &self.receivers
    }

    pub(crate) fn facades(&self) -> &[Facade] {
        &self.facades
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x: f64, y: f64, s: f64, h: f64) -> Building {
        Building { footprint: vec![[x, y], [x + s, y], [x + s, y + s], [x, y + s]], height: h }
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{ "scene_id": "A", "buildings": [ { "footprint": [[0,0],[10,0],[10,10],[0,10]], "height": 20 } ],
                        "receivers": [ { "id": "r1", "pos": [15, 5, 1.5] } ] }"#;
        let scene = UrbanScene::from_json(text).unwrap();
        assert_eq!(scene.facades().len(), 4);
        assert_eq!(scene.receivers()[0].pos, Vec3::new(15.0, 5.0, 1.5));
        assert_eq!(UrbanScene::from_json(&scene.to_json()).unwrap(), scene);
    }

    #[test]
    fn outward_normals() {
        let scene = UrbanScene::new("A".into(), vec![square(0.0, 0.0, 10.0, 5.0)], vec![]).unwrap();
        let normals: Vec<[f64; 2]> = scene.facades().iter().map(|f| f.normal).collect();
        assert_eq!(normals, vec![[0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]);
    }

    #[test]
    fn rejects_clockwise_and_degenerate() {
        let cw = Building { footprint: vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]], height: 3.0 };
        assert!(matches!(UrbanScene::new("A".into(), vec![cw], vec![]), Err(SceneError::BadBuilding { .. })));
        let two = Building { footprint: vec![[0.0, 0.0], [1.0, 0.0]], height: 3.0 };
        assert!(UrbanScene::new("A".into(), vec![two], vec![]).is_err());
        let bowtie = Building { footprint: vec![[0.0, 0.0], [2.0, 2.0], [2.0, 0.0], [0.0, 2.0]], height: 3.0 };
        assert!(UrbanScene::new("A".into(), vec![bowtie], vec![]).is_err());
        let flat = Building { height: 0.0, ..square(0.0, 0.0, 1.0, 1.0) };
        assert!(UrbanScene::new("A".into(), vec![flat], vec![]).is_err());
    }

    #[test]
    fn rejects_receiver_inside_building() {
        let inside = Receiver { id: "r".into(), pos: Vec3::new(5.0, 5.0, 1.0) };
        assert!(matches!(
            UrbanScene::new("A".into(), vec![square(0.0, 0.0, 10.0, 5.0)], vec![inside]),
            Err(SceneError::BadReceiver { .. })
        ));
        // on the roof or on a wall is allowed
        let roof = Receiver { id: "r".into(), pos: Vec3::new(5.0, 5.0, 5.0) };
        let wall = Receiver { id: "w".into(), pos: Vec3::new(10.0, 5.0, 1.0) };
        assert!(UrbanScene::new("A".into(), vec![square(0.0, 0.0, 10.0, 5.0)], vec![roof, wall]).is_ok());
    }

    #[test]
    fn rejects_bad_ids() {
        assert!(matches!(UrbanScene::new("a b".into(), vec![], vec![]), Err(SceneError::BadId(_))));
        let r = Receiver { id: "x".into(), pos: Vec3::default() };
        assert!(UrbanScene::new("A".into(), vec![], vec![r.clone(), r]).is_err());
    }
}

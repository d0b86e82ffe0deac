use super::polygon::{contains, Containment};
use super::{Facade, SatDirection, UrbanScene, Vec3};
use crate::SignalClass;

/// Minimum ray parameter, meters; hits closer to the origin are ignored.
pub const RAY_EPSILON_M: f64 = 1e-6;

/// Slack on normalized facade coordinates; hits on edges count.
pub const SURFACE_TOLERANCE: f64 = 1e-9;

const PARALLEL_EPS: f64 = 1e-15;

/// Geometric ground truth for one receiver/satellite pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundTruth {
    Class(SignalClass),
    /// Direct path blocked and no reflected path; never enters a dataset.
    NoSignal,
}

impl GroundTruth {
    pub fn class(self) -> Option<SignalClass> {
        match self {
            GroundTruth::Class(c) => Some(c),
            GroundTruth::NoSignal => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GroundTruth::Class(c) => c.as_str(),
            GroundTruth::NoSignal => "NONE",
        }
    }
}

fn hits_facade(f: &Facade, origin: Vec3, dir: Vec3, t_max: f64) -> bool {
    let denom = f.normal[0] * dir.e + f.normal[1] * dir.n;
    if denom.abs() < PARALLEL_EPS {
        return false;
    }
    let t = (f.normal[0] * (f.start[0] - origin.e) + f.normal[1] * (f.start[1] - origin.n)) / denom;
    if !(t > RAY_EPSILON_M && t < t_max) {
        return false;
    }
    let q = origin + dir * t;
    let (dx, dy) = (f.end[0] - f.start[0], f.end[1] - f.start[1]);
    let s = ((q.e - f.start[0]) * dx + (q.n - f.start[1]) * dy) / (dx * dx + dy * dy);
    let v = q.u / f.height;
    (-SURFACE_TOLERANCE..=1.0 + SURFACE_TOLERANCE).contains(&s)
        && (-SURFACE_TOLERANCE..=1.0 + SURFACE_TOLERANCE).contains(&v)
}

fn hits_roof(footprint: &[[f64; 2]], height: f64, origin: Vec3, dir: Vec3, t_max: f64) -> bool {
    if dir.u.abs() < PARALLEL_EPS {
        return false;
    }
    let t = (height - origin.u) / dir.u;
    if !(t > RAY_EPSILON_M && t < t_max) {
        return false;
    }
    let q = origin + dir * t;
    contains([q.e, q.n], footprint) != Containment::Outside
}

/// Whether the ray `origin + t * dir`, `RAY_EPSILON_M < t < t_max`, meets any
/// surface other than facade `skip`.
fn obstructed(scene: &UrbanScene, origin: Vec3, dir: Vec3, t_max: f64, skip: Option<usize>) -> bool {
    let walls = scene.facades().iter().enumerate().any(|(i, f)| Some(i) != skip && hits_facade(f, origin, dir, t_max));
    walls || scene.buildings().iter().any(|b| hits_roof(&b.footprint, b.height, origin, dir, t_max))
}

/// True when the direct ray toward the satellite meets any facade or roof.
pub fn los_blocked(scene: &UrbanScene, receiver: Vec3, dir: SatDirection) -> bool {
    obstructed(scene, receiver, dir.vector(), f64::INFINITY, None)
}

/// True when some facade admits an unobstructed single-bounce specular path.
pub fn reflection_exists(scene: &UrbanScene, receiver: Vec3, dir: SatDirection) -> bool {
    let d = dir.vector();
    scene.facades().iter().enumerate().any(|(i, f)| {
        let facing = f.normal[0] * d.e + f.normal[1] * d.n;
        let dist = f.normal[0] * (receiver.e - f.start[0]) + f.normal[1] * (receiver.n - f.start[1]);
        // satellite and receiver must both be on the outward side
        if facing <= PARALLEL_EPS || dist <= 0.0 {
            return false;
        }
        let image = Vec3::new(receiver.e - 2.0 * dist * f.normal[0], receiver.n - 2.0 * dist * f.normal[1], receiver.u);
        let q = image + d * (dist / facing);
        let (dx, dy) = (f.end[0] - f.start[0], f.end[1] - f.start[1]);
        let s = ((q.e - f.start[0]) * dx + (q.n - f.start[1]) * dy) / (dx * dx + dy * dy);
        let v = q.u / f.height;
        let range = -SURFACE_TOLERANCE..=1.0 + SURFACE_TOLERANCE;
        if !(range.contains(&s) && range.contains(&v)) {
            return false;
        }
        let leg = q - receiver;
        let len = leg.norm();
        let inbound_clear = !obstructed(scene, receiver, leg * (1.0 / len), len - RAY_EPSILON_M, Some(i));
        inbound_clear && !obstructed(scene, q, d, f64::INFINITY, Some(i))
    })
}

pub fn label_condition(scene: &UrbanScene, receiver: Vec3, dir: SatDirection) -> GroundTruth {
    match (los_blocked(scene, receiver, dir), reflection_exists(scene, receiver, dir)) {
        (false, false) => GroundTruth::Class(SignalClass::LosOnly),
        (false, true) => GroundTruth::Class(SignalClass::LosNlos),
        (true, true) => GroundTruth::Class(SignalClass::NlosOnly),
        (true, false) => GroundTruth::NoSignal,
    }
}

//! Random scenes of convex prisms with receivers kept clear of every wall.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sigclass::scene::{Building, Receiver, UrbanScene, Vec3};

use super::geometry_oracle::sd_prism;

pub fn convex_building(rng: &mut impl Rng) -> Building {
    let (cx, cy) = (rng.gen_range(-60.0..60.0), rng.gen_range(-60.0..60.0));
    let radius = rng.gen_range(4.0..20.0);
    let k = rng.gen_range(3..=6);
    let slot = std::f64::consts::TAU / k as f64;
    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
    let footprint = (0..k)
        .map(|i| {
            let a = phase + slot * (i as f64 + rng.gen_range(0.1..0.9));
            [cx + radius * a.cos(), cy + radius * a.sin()]
        })
        .collect();
    Building { footprint, height: rng.gen_range(5.0..60.0) }
}

/// Scene with 2 to 5 buildings and `receivers` receivers at least 0.5 m from any prism.
pub fn random_scene(seed: u64, receivers: usize) -> UrbanScene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let buildings: Vec<Building> = (0..rng.gen_range(2..=5)).map(|_| convex_building(&mut rng)).collect();
    let mut rx = Vec::new();
    while rx.len() < receivers {
        let p = Vec3::new(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0), rng.gen_range(0.0..20.0));
        if buildings.iter().all(|b| sd_prism(p, &b.footprint, b.height) > 0.5) {
            rx.push(Receiver { id: format!("R{}", rx.len()), pos: p });
        }
    }
    UrbanScene::new(format!("rand{seed}"), buildings, rx).expect("generated scene is valid")
}

/// Rotates every point about the vertical axis through `pivot` by `theta` radians
/// (counter-clockwise seen from above).
pub fn rotate_scene(scene: &UrbanScene, pivot: [f64; 2], theta: f64) -> UrbanScene {
    let (s, c) = theta.sin_cos();
    let rot = |x: f64, y: f64| {
        let (dx, dy) = (x - pivot[0], y - pivot[1]);
        [pivot[0] + c * dx - s * dy, pivot[1] + s * dx + c * dy]
    };
    let buildings = scene
        .buildings()
        .iter()
        .map(|b| Building { footprint: b.footprint.iter().map(|v| rot(v[0], v[1])).collect(), height: b.height })
        .collect();
    let receivers = scene
        .receivers()
        .iter()
        .map(|r| {
            let [e, n] = rot(r.pos.e, r.pos.n);
            Receiver { id: r.id.clone(), pos: Vec3::new(e, n, r.pos.u) }
        })
        .collect();
    UrbanScene::new(scene.scene_id().to_string(), buildings, receivers).unwrap()
}

//! Brute-force geometry used to check the scene labeler. Works only on
//! convex footprints, which is what the random scene generator produces.

use sigclass::scene::{UrbanScene, Vec3};

/// Cases whose deciding quantity lies within this distance of its threshold
/// are reported as ambiguous.
pub const BOUNDARY_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Ambiguous,
}

fn dist_to_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let s = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    (p[0] - a[0] - s * dx).hypot(p[1] - a[1] - s * dy)
}

/// Signed distance to a convex CCW polygon (negative inside).
fn sd_polygon(p: [f64; 2], poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    let mut inside = true;
    let mut d = f64::INFINITY;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        if cross < 0.0 {
            inside = false;
        }
        d = d.min(dist_to_segment(p, a, b));
    }
    if inside {
        -d
    } else {
        d
    }
}

/// Signed distance to the prism `footprint x [0, height]`.
pub fn sd_prism(p: Vec3, footprint: &[[f64; 2]], height: f64) -> f64 {
    let d2 = sd_polygon([p.e, p.n], footprint);
    let dz = (-p.u).max(p.u - height);
    if d2 <= 0.0 && dz <= 0.0 {
        d2.max(dz)
    } else {
        d2.max(0.0).hypot(dz.max(0.0))
    }
}

const SAMPLES: usize = 400;
const GOLDEN_ITERS: usize = 100;

/// Minimum of a convex function on [lo, hi]: dense sampling, then golden
/// section inside the bracket around the best sample.
fn min_convex(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let step = (hi - lo) / SAMPLES as f64;
    let mut best = (f64::INFINITY, 0usize);
    for i in 0..=SAMPLES {
        let v = f(lo + step * i as f64);
        if v < best.0 {
            best = (v, i);
        }
    }
    let mut a = lo + step * best.1.saturating_sub(1) as f64;
    let mut b = (lo + step * (best.1 + 1) as f64).min(hi);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    best.0.min(fc).min(fd).min(f(a)).min(f(b))
}

/// Parameter beyond which the ray from `o` along unit `d` is outside every prism.
fn exit_parameter(scene: &UrbanScene, o: Vec3, d: Vec3) -> f64 {
    let radius = scene.buildings().iter().flat_map(|b| b.footprint.iter()).map(|v| v[0].hypot(v[1])).fold(0.0, f64::max);
    let top = scene.buildings().iter().map(|b| b.height).fold(0.0, f64::max);
    let horiz = d.e.hypot(d.n);
    let by_plan = if horiz > 1e-12 { (radius + o.e.hypot(o.n) + 1.0) / horiz } else { f64::INFINITY };
    let by_height = if d.u > 1e-12 { ((top - o.u).max(0.0) + 1.0) / d.u } else { f64::INFINITY };
    by_plan.min(by_height)
}

/// Smallest signed distance to any prism (except `skip`) along `o + t d`, `t in [t0, t1]`.
fn path_clearance(scene: &UrbanScene, o: Vec3, d: Vec3, t0: f64, t1: f64, skip: Option<usize>) -> f64 {
    scene
        .buildings()
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != skip)
        .map(|(_, b)| min_convex(|t| sd_prism(o + d * t, &b.footprint, b.height), t0, t1))
        .fold(f64::INFINITY, f64::min)
}

fn classify_clearance(m: f64) -> Verdict {
    if m < -BOUNDARY_MARGIN {
        Verdict::Yes
    } else if m > BOUNDARY_MARGIN {
        Verdict::No
    } else {
        Verdict::Ambiguous
    }
}

/// Is the direct ray obstructed? `Yes` means some ray point is inside a prism.
pub fn oracle_blocked(scene: &UrbanScene, p: Vec3, d: Vec3) -> Verdict {
    let t1 = exit_parameter(scene, p, d);
    classify_clearance(path_clearance(scene, p, d, 1e-6, t1, None))
}

fn angle_between(a: Vec3, b: Vec3) -> f64 {
    let cross = Vec3::new(a.n * b.u - a.u * b.n, a.u * b.e - a.e * b.u, a.e * b.n - a.n * b.e);
    cross.norm().atan2(a.dot(b))
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let candidates = [(a, f(a)), (b, f(b)), (c, fc), (d, fd)];
    candidates.into_iter().min_by(|x, y| x.1.total_cmp(&y.1)).unwrap()
}

const GRID: usize = 128;

/// Point on facade `(start, end, height)` where the specular law toward `p`
/// holds best: `(s, v, angular error)` with `s` along the edge and `v` up.
///
/// The error is unimodal along every line of the facade plane and its
/// sublevel sets below 90 degrees are convex, so the profile
/// `s -> min over v` is searched on a grid and refined inside the bracket
/// around the best grid point.
pub fn specular_search(p: Vec3, d: Vec3, start: [f64; 2], end: [f64; 2], height: f64, normal: [f64; 2]) -> (f64, f64, f64) {
    let dn = normal[0] * d.e + normal[1] * d.n;
    let reflected = Vec3::new(-d.e + 2.0 * dn * normal[0], -d.n + 2.0 * dn * normal[1], -d.u);
    let point = |s: f64, v: f64| Vec3::new(start[0] + s * (end[0] - start[0]), start[1] + s * (end[1] - start[1]), v * height);
    let err = |s: f64, v: f64| angle_between(p - point(s, v), reflected);
    let profile = |s: f64| golden_min(|v| err(s, v), 0.0, 1.0);

    let cell = 1.0 / GRID as f64;
    let mut best = (0.0, f64::INFINITY);
    for i in 0..=GRID {
        let s = i as f64 * cell;
        let e = profile(s).1;
        if e < best.1 {
            best = (s, e);
        }
    }
    let (s, _) = golden_min(|s| profile(s).1, (best.0 - cell).max(0.0), (best.0 + cell).min(1.0));
    let (v, e) = profile(s);
    (s, v, e)
}

/// Angular error below which the searched point is taken as the specular point.
const SPECULAR_FOUND: f64 = 1e-9;

/// Does some facade carry an unobstructed single-bounce specular path?
pub fn oracle_reflection(scene: &UrbanScene, p: Vec3, d: Vec3) -> Verdict {
    let mut ambiguous = false;
    for (bi, b) in scene.buildings().iter().enumerate() {
        let n = b.footprint.len();
        for k in 0..n {
            let start = b.footprint[k];
            let end = b.footprint[(k + 1) % n];
            let len = (end[0] - start[0]).hypot(end[1] - start[1]);
            let normal = [(end[1] - start[1]) / len, -(end[0] - start[0]) / len];
            let facing = normal[0] * d.e + normal[1] * d.n;
            let front = normal[0] * (p.e - start[0]) + normal[1] * (p.n - start[1]);
            if facing.abs() < BOUNDARY_MARGIN || front.abs() < BOUNDARY_MARGIN {
                ambiguous = true;
                continue;
            }
            if facing < 0.0 || front < 0.0 {
                continue;
            }
            let (s, v, e) = specular_search(p, d, start, end, b.height, normal);
            if e >= 1e-6 {
                continue;
            }
            let margin = BOUNDARY_MARGIN;
            if e >= SPECULAR_FOUND || s < margin || s > 1.0 - margin || v < margin || v > 1.0 - margin {
                ambiguous = true;
                continue;
            }
            let q = Vec3::new(start[0] + s * (end[0] - start[0]), start[1] + s * (end[1] - start[1]), v * b.height);
            let leg = q - p;
            let l = leg.norm();
            // own prism is convex and the path stays on the facade's outer side
            let inbound = classify_clearance(path_clearance(scene, p, leg * (1.0 / l), 1e-6, l, Some(bi)));
            let outbound = classify_clearance(path_clearance(scene, q, d, 1e-6, exit_parameter(scene, q, d), Some(bi)));
            match (inbound, outbound) {
                (Verdict::No, Verdict::No) => return Verdict::Yes,
                (Verdict::Yes, _) | (_, Verdict::Yes) => {}
                _ => ambiguous = true,
            }
        }
    }
    if ambiguous {
        Verdict::Ambiguous
    } else {
        Verdict::No
    }
}

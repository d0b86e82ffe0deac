use super::Building;

/// Distance in meters within which a point counts as on a polygon edge.
const EDGE_TOLERANCE_M: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

pub(crate) fn signed_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| cross([0.0, 0.0], poly[i], poly[(i + 1) % n])).sum::<f64>() / 2.0
}

fn on_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> bool {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let s = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0);
    let (cx, cy) = (a[0] + s * dx, a[1] + s * dy);
    (p[0] - cx).hypot(p[1] - cy) <= EDGE_TOLERANCE_M
}

/// Point-in-polygon with edges counted as `Boundary`.
pub(crate) fn contains(p: [f64; 2], poly: &[[f64; 2]]) -> Containment {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if on_segment(p, a, b) {
            return Containment::Boundary;
        }
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    if inside {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

fn segments_touch(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    on_segment(a, c, d) || on_segment(b, c, d) || on_segment(c, a, b) || on_segment(d, a, b)
}

pub(crate) fn validate_building(b: &Building) -> Result<(), String> {
    let poly = &b.footprint;
    let n = poly.len();
    if n < 3 {
        return Err(format!("footprint needs at least 3 vertices, has {n}"));
    }
    if !(b.height.is_finite() && b.height > 0.0) {
        return Err(format!("height must be positive, got {}", b.height));
    }
    if poly.iter().flatten().any(|v| !v.is_finite()) {
        return Err("non-finite footprint vertex".into());
    }
    for i in 0..n {
        let (a, c) = (poly[i], poly[(i + 1) % n]);
        if (a[0] - c[0]).hypot(a[1] - c[1]) <= EDGE_TOLERANCE_M {
            return Err(format!("zero-length edge at vertex {i}"));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (a, b2) = (poly[i], poly[(i + 1) % n]);
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            if adjacent {
                // adjacent edges share one vertex; they must not fold back onto each other
                let shared = if j == i + 1 { b2 } else { a };
                let (p, q) = if j == i + 1 { (a, d) } else { (b2, c) };
                if cross(shared, p, q).abs() <= EDGE_TOLERANCE_M
                    && (p[0] - shared[0]) * (q[0] - shared[0]) + (p[1] - shared[1]) * (q[1] - shared[1]) > 0.0
                {
                    return Err(format!("edges {i} and {j} overlap"));
                }
            } else if segments_touch(a, b2, c, d) {
                return Err(format!("footprint self-intersects at edges {i} and {j}"));
            }
        }
    }
    if signed_area(poly) <= 0.0 {
        return Err("footprint must be counter-clockwise".into());
    }
    Ok(())
}

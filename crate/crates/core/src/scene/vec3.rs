use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Point or vector in the local east-north-up frame, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub e: f64,
    pub n: f64,
    pub u: f64,
}

impl Vec3 {
    pub const fn new(e: f64, n: f64, u: f64) -> Self {
        Vec3 { e, n, u }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.e * o.e + self.n * o.n + self.u * o.u
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.e.is_finite() && self.n.is_finite() && self.u.is_finite()
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(v: [f64; 3]) -> Self {
        Vec3::new(v[0], v[1], v[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.e, v.n, v.u]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.e + o.e, self.n + o.n, self.u + o.u)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.e - o.e, self.n - o.n, self.u - o.u)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, k: f64) -> Vec3 {
        Vec3::new(self.e * k, self.n * k, self.u * k)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.e, -self.n, -self.u)
    }
}

/// Unit vector from the receiver toward a satellite at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatDirection(Vec3);

impl SatDirection {
    /// Azimuth clockwise from north, elevation above the horizon, degrees.
    pub fn from_az_el(azimuth_deg: f64, elevation_deg: f64) -> Self {
        let (sa, ca) = azimuth_deg.to_radians().sin_cos();
        let (se, ce) = elevation_deg.to_radians().sin_cos();
        SatDirection(Vec3::new(sa * ce, ca * ce, se))
    }

    pub fn vector(self) -> Vec3 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Vec3, b: Vec3) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn zenith_for_any_azimuth() {
        for az in [0.0, 45.0, 123.4, 359.0] {
            let d = SatDirection::from_az_el(az, 90.0).vector();
            assert!(close(d, Vec3::new(0.0, 0.0, 1.0)), "{d:?}");
        }
    }

    #[test]
    fn north_horizon() {
        assert!(close(SatDirection::from_az_el(0.0, 0.0).vector(), Vec3::new(0.0, 1.0, 0.0)));
    }

    #[test]
    fn east_45() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(SatDirection::from_az_el(90.0, 45.0).vector(), Vec3::new(h, 0.0, h)));
    }

    #[test]
    fn unit_norm_and_up_component() {
        for az in (0..360).step_by(7) {
            for el in (0..=90).step_by(5) {
                let d = SatDirection::from_az_el(az as f64, el as f64).vector();
                assert!((d.norm() - 1.0).abs() < 1e-12);
                assert!((d.u - (el as f64).to_radians().sin()).abs() < 1e-12);
            }
        }
    }
}

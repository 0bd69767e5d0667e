#![allow(dead_code)]

use gaussian_density::polytope::{validate_polygon, Point, Polytope};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Convex polygon with 3..=8 vertices inside [-3, 3]², vertices on a random
/// ellipse with angular gaps of at least 0.15 rad.
pub fn random_convex_polygon(rng: &mut StdRng) -> Polytope {
    loop {
        let n = rng.random_range(3..=8usize);
        let (cx, cy) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let (a, b) = (rng.random_range(0.3..2.0), rng.random_range(0.3..2.0));
        let tilt: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let mut angles: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        angles.sort_by(f64::total_cmp);
        let gaps_ok = angles.windows(2).all(|w| w[1] - w[0] > 0.15)
            && angles[0] + std::f64::consts::TAU - angles[n - 1] > 0.15;
        if !gaps_ok {
            continue;
        }
        let pts: Vec<Point> = angles
            .iter()
            .map(|t| {
                let (u, v) = (a * t.cos(), b * t.sin());
                Point::xy(
                    cx + u * tilt.cos() - v * tilt.sin(),
                    cy + u * tilt.sin() + v * tilt.cos(),
                )
            })
            .collect();
        if let Ok(p) = validate_polygon(&pts) {
            return p;
        }
    }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

//! Shared helpers for the integration suites.
#![allow(dead_code)]

use lgin_core::{ModelParams, Point};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Log-uniform draw on [lo, hi].
pub fn log_uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let u: f64 = r.gen();
    10f64.powf(lo.log10() + u * (hi.log10() - lo.log10()))
}

/// Log-uniform parameter draw on [1e-2, 1e2]^6.
pub fn random_params(r: &mut ChaCha8Rng) -> ModelParams {
    ModelParams::new(
        log_uniform(r, 1e-2, 1e2),
        log_uniform(r, 1e-2, 1e2),
        log_uniform(r, 1e-2, 1e2),
        log_uniform(r, 1e-2, 1e2),
        log_uniform(r, 1e-2, 1e2),
        log_uniform(r, 1e-2, 1e2),
    )
    .unwrap()
}

pub fn random_quadrant_point(r: &mut ChaCha8Rng, hi: f64) -> Point {
    Point { x: r.gen::<f64>() * hi, y: r.gen::<f64>() * hi }
}

pub fn p1() -> ModelParams {
    ModelParams::new(3.0, 3.0, 1.0, 1.0, 0.5, 0.5).unwrap()
}

pub fn p2() -> ModelParams {
    ModelParams::new(2.0, 2.0, 0.5, 0.5, 1.0, 1.0).unwrap()
}

/// A three-equilibria (bistable) instance: strong symmetric competition
/// with weak immigration.
pub fn p3_bistable() -> ModelParams {
    ModelParams::new(5.0, 5.0, 4.0, 4.0, 0.01, 0.01).unwrap()
}

/// Centered finite-difference Jacobian of the map.
pub fn fd_jacobian(p: &ModelParams, pt: Point) -> [f64; 4] {
    let hx = 1e-6 * (1.0 + pt.x.abs());
    let hy = 1e-6 * (1.0 + pt.y.abs());
    let f = |x: f64, y: f64| {
        let q = lgin_core::step(p, Point { x, y }).unwrap();
        (q.x, q.y)
    };
    let (fxp, gxp) = f(pt.x + hx, pt.y);
    let (fxm, gxm) = f((pt.x - hx).max(0.0), pt.y);
    let dx = pt.x + hx - (pt.x - hx).max(0.0);
    let (fyp, gyp) = f(pt.x, pt.y + hy);
    let (fym, gym) = f(pt.x, (pt.y - hy).max(0.0));
    let dy = pt.y + hy - (pt.y - hy).max(0.0);
    [
        (fxp - fxm) / dx,
        (fyp - fym) / dy,
        (gxp - gxm) / dx,
        (gyp - gym) / dy,
    ]
}

//! Synthetic data helpers for the experiment-level tests.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1: f64 = rng.random_range(1e-12..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    let r = (-2.0 * u1.ln()).sqrt();
    (
        r * (2.0 * std::f64::consts::PI * u2).cos(),
        r * (2.0 * std::f64::consts::PI * u2).sin(),
    )
}

/// Three overlapping Gaussian blobs in the plane, labels 1..=3, written as a
/// csv file with a header row.
pub fn write_blobs_csv(path: &Path, per_class: usize, spread: f64, seed: u64) {
    let mut rng = rng(seed);
    let centers = [(0.0, 0.0), (2.2, 0.6), (1.0, 2.0)];
    let mut text = String::from("f1,f2,label\n");
    for (class, center) in centers.iter().enumerate() {
        for _ in 0..per_class {
            let (g1, g2) = gaussian_pair(&mut rng);
            writeln!(
                text,
                "{},{},{}",
                center.0 + spread * g1,
                center.1 + spread * g2,
                class + 1
            )
            .unwrap();
        }
    }
    std::fs::write(path, text).unwrap();
}

/// Noisy linear regression rows as csv.
pub fn write_regression_csv(path: &Path, n: usize, seed: u64) {
    let mut rng = rng(seed);
    let mut text = String::from("x1,x2,y\n");
    for _ in 0..n {
        let x1: f64 = rng.random_range(-1.0..1.0);
        let x2: f64 = rng.random_range(-1.0..1.0);
        let (noise, _) = gaussian_pair(&mut rng);
        writeln!(text, "{},{},{}", x1, x2, 2.0 * x1 - x2 + 0.1 * noise).unwrap();
    }
    std::fs::write(path, text).unwrap();
}

/// Small synthetic ranking set: two relevance levels per query, scores
/// driven by the first feature.
pub fn write_ranking_file(path: &Path, queries: usize, per_query: usize, seed: u64) {
    let mut rng = rng(seed);
    let mut text = String::new();
    for q in 0..queries {
        for i in 0..per_query {
            let relevance = if i < per_query / 2 { 1 } else { 0 };
            let x1 = relevance as f64 + rng.random_range(-0.4..0.4);
            let x2: f64 = rng.random_range(-1.0..1.0);
            writeln!(text, "{relevance} qid:{q} 1:{x1} 2:{x2}").unwrap();
        }
    }
    std::fs::write(path, text).unwrap();
}

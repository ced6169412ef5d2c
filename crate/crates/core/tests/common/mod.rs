#![allow(dead_code)]

use gdpsom_core::dataset::FeatureRow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BLOB_CENTERS: [[f64; 4]; 4] = [
    [0.0, 0.0, 0.0, 0.0],
    [20.0, 0.0, 20.0, 0.0],
    [0.0, 20.0, 0.0, 20.0],
    [20.0, 20.0, 20.0, 20.0],
];

/// Standard normal draw (Box-Muller).
pub fn normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// `n` rows drawn around the four centers in turn, with standard deviation
/// `sd`. Returns rows and the index of the generating center.
pub fn blobs(n: usize, sd: f64, seed: u64) -> (Vec<FeatureRow>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut truth = Vec::with_capacity(n);
    for i in 0..n {
        let c = BLOB_CENTERS[i % 4];
        let v: Vec<f64> = c.iter().map(|m| m + sd * normal(&mut rng)).collect();
        rows.push(FeatureRow::new(v[0], v[1], v[2], v[3]));
        truth.push(i % 4);
    }
    (rows, truth)
}

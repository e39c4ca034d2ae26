#![allow(dead_code)]

use persgrad::PointCloud;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_cloud(seed: u64, m: usize, n: usize) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
        .collect();
    PointCloud::new(&pts).unwrap()
}

/// A random cloud whose current coordinates are jittered away from the
/// initial ones.
pub fn perturbed_cloud(seed: u64, m: usize, n: usize, sigma: f64) -> PointCloud {
    let base = random_cloud(seed, m, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let moved: Vec<Vec<f64>> = base
        .initial_rows()
        .into_iter()
        .map(|p| {
            p.into_iter()
                .map(|x| x + sigma * (2.0 * rng.random::<f64>() - 1.0))
                .collect()
        })
        .collect();
    PointCloud::with_current(&base.initial_rows(), &moved).unwrap()
}

/// Central differences of `f` at every current coordinate.
pub fn central_differences(cloud: &PointCloud, h: f64, f: impl Fn(&PointCloud) -> f64) -> Vec<f64> {
    let mut probe = cloud.clone();
    (0..cloud.current().len())
        .map(|k| {
            let x = cloud.current()[k];
            probe.current_mut()[k] = x + h;
            let plus = f(&probe);
            probe.current_mut()[k] = x - h;
            let minus = f(&probe);
            probe.current_mut()[k] = x;
            (plus - minus) / (2.0 * h)
        })
        .collect()
}

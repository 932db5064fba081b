//! Shared fixtures for the criterion benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use skewlab::modelzoo::{random_channel, random_density, random_hermitian};
use skewlab::{DensityMatrix, KrausChannel, ObservableSet, SkewContext, SkewParams};

pub struct ObservableFixture {
    pub ctx: SkewContext,
    pub set: ObservableSet,
}

pub fn observables(dim: usize, n: usize, seed: u64) -> ObservableFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = random_density(dim, &mut rng);
    let set = ObservableSet::new((0..n).map(|_| random_hermitian(dim, &mut rng)).collect()).unwrap();
    let ctx = SkewContext::new(&rho, SkewParams::new(0.3, 0.4, 0.6).unwrap()).unwrap();
    ObservableFixture { ctx, set }
}

pub fn state(dim: usize, seed: u64) -> DensityMatrix {
    random_density(dim, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn channels(dim: usize, n_kraus: usize, count: usize, seed: u64) -> Vec<KrausChannel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_channel(dim, n_kraus, &mut rng).unwrap()).collect()
}

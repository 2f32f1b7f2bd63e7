use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Seeded source of Wiener increments and auxiliary standard-normal draws.
///
/// Every draw comes from one ChaCha8 stream keyed by `seed`, so identical
/// seeds produce bit-identical sequences on any platform or thread.
#[derive(Debug, Clone)]
pub struct WienerSource {
    seed: u64,
    dim: usize,
    rng: ChaCha8Rng,
}

impl WienerSource {
    pub fn new(seed: u64, dim: usize) -> Self {
        WienerSource { seed, dim, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent substream of the same seed. Stream 0 is the default one.
    pub fn substream(seed: u64, dim: usize, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        WienerSource { seed, dim, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Fills `out` with increments `N(0, dt)`.
    pub fn increments(&mut self, dt: f64, out: &mut [f64]) {
        let scale = dt.sqrt();
        for v in out.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut self.rng);
            *v = scale * z;
        }
    }

    /// Fills `out` with standard-normal draws.
    pub fn standard_normals(&mut self, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = StandardNormal.sample(&mut self.rng);
        }
    }
}

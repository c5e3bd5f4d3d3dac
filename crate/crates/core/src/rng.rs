//! Minimal deterministic pseudo-random numbers (splitmix64). Keeps sample
//! runs reproducible without pulling in an RNG dependency.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform draw from the open unit interval.
    pub fn next_unit_open(&mut self) -> f64 {
        loop {
            let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            if u > 0.0 && u < 1.0 {
                return u;
            }
        }
    }
}

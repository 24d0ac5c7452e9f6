//! Counter-based pseudo-random generator with named streams.
//!
//! Every consumer derives its own stream key from `(seed, tag...)`, so any
//! sample path or measure draw can be reproduced in isolation without
//! replaying the draws that preceded it. The generator is splitmix64 run in
//! counter mode; Gaussian variates come from the Box-Muller transform.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a stream key by folding the given parts into one 64-bit value.
pub fn derive_key(parts: &[u64]) -> u64 {
    let mut key = 0x243F_6A88_85A3_08D3; // arbitrary fixed starting constant
    for &p in parts {
        key = mix64(key ^ p);
    }
    key
}

/// Counter-mode splitmix64 stream.
#[derive(Clone, Debug)]
pub struct CounterRng {
    key: u64,
    counter: u64,
    spare_normal: Option<f64>,
}

impl CounterRng {
    pub fn new(key: u64) -> Self {
        Self {
            key,
            counter: 0,
            spare_normal: None,
        }
    }

    /// Stream keyed on several identifiers, e.g. `(seed, dim, sample, step)`.
    pub fn from_parts(parts: &[u64]) -> Self {
        Self::new(derive_key(parts))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let out = mix64(self.key.wrapping_add(self.counter.wrapping_mul(GAMMA)));
        self.counter = self.counter.wrapping_add(1);
        out
    }

    /// Uniform draw in the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal draw via Box-Muller; the paired variate is cached.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let phi = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * phi.sin());
        r * phi.cos()
    }
}

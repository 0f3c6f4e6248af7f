//! Deterministic random streams and multinomial type sampling.
//!
//! Every random quantity in the crate is drawn from a `RandomStream` derived
//! from a 64-bit seed and a stream index. Derivation walks disjoint windows
//! of the splitmix64 output sequence to build a ChaCha12 key, so streams with
//! different indices are independent and reproducible regardless of how many
//! draws other streams have consumed. By convention, index 0 carries setup
//! draws (random features) and indices 1.. carry per-trial draws.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution as SampleDist, StandardNormal};

use crate::alphabet::{Distribution, EmpiricalType};
use crate::error::{Error, Result};

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix_next(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn derive_key(seed: u64, index: u64) -> [u8; 32] {
    // each index owns a disjoint 4-output window of the splitmix64 sequence
    let mut state = seed.wrapping_add(GAMMA.wrapping_mul(index.wrapping_mul(4)));
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix_next(&mut state).to_le_bytes());
    }
    key
}

/// Reproducible random stream addressed by (seed, index).
pub struct RandomStream {
    rng: ChaCha12Rng,
}

impl RandomStream {
    pub fn derive(seed: u64, index: u64) -> Self {
        Self {
            rng: ChaCha12Rng::from_seed(derive_key(seed, index)),
        }
    }

    /// Uniform draw in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    fn binomial(&mut self, n: u64, p: f64) -> u64 {
        if n == 0 || p <= 0.0 {
            return 0;
        }
        if p >= 1.0 {
            return n;
        }
        Binomial::new(n, p)
            .expect("p clamped to [0, 1]")
            .sample(&mut self.rng)
    }
}

/// Draws the empirical type of n i.i.d. observations from pi.
///
/// Counts come from N-1 sequential conditional binomials: given the draws so
/// far, the count at symbol z is Binomial(remaining, pi(z) / mass_left). The
/// last symbol takes whatever remains, so the counts always sum to n.
pub fn sample_type(pi: &Distribution, n: usize, stream: &mut RandomStream) -> Result<EmpiricalType> {
    if n == 0 {
        return Err(Error::InvalidSampleSize { n });
    }
    let size = pi.alphabet_size();
    let mut counts = vec![0u64; size];
    let mut remaining = n as u64;
    let mut mass_left = 1.0_f64;
    for z in 0..size - 1 {
        if remaining == 0 {
            break;
        }
        let p = if mass_left > 0.0 {
            (pi.w(z) / mass_left).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let c = stream.binomial(remaining, p);
        counts[z] = c;
        remaining -= c;
        mass_left -= pi.w(z);
    }
    counts[size - 1] += remaining;
    EmpiricalType::new(counts)
}

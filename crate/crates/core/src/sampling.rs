//! Seed-derived randomness. Every draw is a pure function of `(seed, stream)`
//! so parallel workers reproduce the same samples in any order.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rotation::Angle;

/// Denominator of sampled rationals: the Mersenne prime `2^61 − 1`. It is
/// odd, so a sampled θ is never `1/2`, and numerators start at 1.
pub const THETA_DENOM: u64 = (1 << 61) - 1;

/// Independent generator for one `(seed, stream)` pair.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A uniform rational in `(0, 1)` with denominator [`THETA_DENOM`].
pub fn random_unit<R: Rng>(rng: &mut R) -> BigRational {
    let u = rng.random_range(1..THETA_DENOM);
    BigRational::new(BigInt::from(u), BigInt::from(THETA_DENOM))
}

/// A rational θ off the boundary orbits.
pub fn random_theta<R: Rng>(rng: &mut R) -> Angle {
    Angle::rational(random_unit(rng))
}

/// `count` angles; sample `i` depends only on `(seed, i)`.
pub fn theta_samples(seed: u64, count: usize) -> Vec<Angle> {
    (0..count).map(|i| random_theta(&mut rng_for(seed, i as u64))).collect()
}

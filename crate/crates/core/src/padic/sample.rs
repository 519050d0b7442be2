use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::point::Point;
use super::scalar::PadicScalar;

/// The generator used for every seeded draw in the crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A Haar-random element of Z_p at depth `n`: digits `0..n` i.i.d. uniform.
pub fn haar_sample<R: Rng + ?Sized>(p: u32, rng: &mut R, n: u32) -> PadicScalar {
    assert!(n >= 1, "sampling depth must be positive");
    let digits: Vec<u32> = (0..n).map(|_| rng.gen_range(0..p)).collect();
    PadicScalar::from_digits(p, &digits, 0, n as i64).expect("digits are in range")
}

/// Seeded form of [`haar_sample`].
pub fn haar_sample_unit(p: u32, seed: u64, n: u32) -> PadicScalar {
    haar_sample(p, &mut seeded_rng(seed), n)
}

/// A Haar-random point of the unit polydisc at depth `n`.
pub fn haar_point<R: Rng + ?Sized>(p: u32, rng: &mut R, n: u32) -> Point {
    let x = haar_sample(p, rng, n);
    let y = haar_sample(p, rng, n);
    Point { x, y }
}

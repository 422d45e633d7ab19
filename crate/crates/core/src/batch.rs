//! Data-parallel sweeps over seeded random instances.
//!
//! Item `i` of a sweep draws from its own ChaCha stream, so results do not
//! depend on scheduling. With the `parallel` feature the items run on the
//! rayon pool; without it they run in order on the calling thread.

use rand_chacha::ChaCha8Rng;

use crate::biflipper::encode;
use crate::flips::Isometry;
use crate::headtotail::{head_to_tail, Mode};
use crate::numkernel::{SpaceTag, Tolerance};
use crate::sample;

/// Generator for item `index` of a sweep.
pub fn item_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut r = sample::rng(seed);
    r.set_stream(index as u64);
    r
}

pub fn sweep_sequential<U, F>(seed: u64, n: usize, f: F) -> Vec<U>
where
    F: Fn(&mut ChaCha8Rng) -> U,
{
    (0..n).map(|i| f(&mut item_rng(seed, i))).collect()
}

#[cfg(feature = "parallel")]
pub fn sweep_parallel<U, F>(seed: u64, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(&mut ChaCha8Rng) -> U + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(|i| f(&mut item_rng(seed, i))).collect()
}

/// Runs `f` on `n` seeded items, in parallel when the feature is enabled.
pub fn sweep<U, F>(seed: u64, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(&mut ChaCha8Rng) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        sweep_parallel(seed, n, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        sweep_sequential(seed, n, f)
    }
}

/// Largest entry-wise distance between two isometries, up to sign in `RP2`.
pub fn matrix_error(a: &Isometry, b: &Isometry) -> f64 {
    let d = (a.matrix() - b.matrix()).amax();
    if a.space() == SpaceTag::RP2 {
        d.min((a.matrix() + b.matrix()).amax())
    } else {
        d
    }
}

/// Error of one fallback head-to-tail composition against the matrix product,
/// `INFINITY` when the composition fails.
pub fn head_to_tail_error(space: SpaceTag, r: &mut ChaCha8Rng, tol: Tolerance) -> f64 {
    let (bt, bs) = (sample::biflipper(r, space), sample::biflipper(r, space));
    let oracle = encode(&bs).compose(&encode(&bt)).expect("same space");
    match head_to_tail(&bt, &bs, Mode::Fallback, tol) {
        Ok(res) => matrix_error(&encode(&res.biflipper), &oracle),
        Err(_) => f64::INFINITY,
    }
}

/// Errors of `n` random head-to-tail compositions in `space`.
pub fn head_to_tail_sweep(space: SpaceTag, seed: u64, n: usize, tol: Tolerance) -> Vec<f64> {
    sweep(seed, n, |r| head_to_tail_error(space, r, tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweeps_do_not_depend_on_scheduling() {
        let f = |r: &mut ChaCha8Rng| sample::coords(r, 2);
        assert_eq!(sweep(3, 64, f), sweep_sequential(3, 64, f));
    }

    #[test]
    fn small_head_to_tail_sweep() {
        for space in [SpaceTag::E2, SpaceTag::S2, SpaceTag::H2] {
            let errs = head_to_tail_sweep(space, 11, 20, Tolerance::default());
            assert!(errs.iter().all(|e| *e < 1e-8), "{space}: {errs:?}");
        }
    }
}

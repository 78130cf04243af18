use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::Kernel;

/// Walks `length` steps from `start`, drawing each step by inverse CDF
/// over the row entries in basis order. Returns `length + 1` states.
pub fn sample_path<R: Rng + ?Sized>(
    k: &Kernel,
    start: usize,
    length: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let mut path = Vec::with_capacity(length + 1);
    let mut state = start;
    path.push(state);
    for _ in 0..length {
        state = step(k, state, rng)?;
        path.push(state);
    }
    Ok(path)
}

/// `sample_path` with a ChaCha8 generator seeded from `seed`.
pub fn sample_path_seeded(
    k: &Kernel,
    start: usize,
    length: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_path(k, start, length, &mut rng)
}

/// Endpoints of `paths` independent walks of `length` steps, all drawn from
/// one generator seeded with `seed`.
pub fn sample_endpoints(
    k: &Kernel,
    start: usize,
    length: usize,
    paths: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..paths)
        .map(|_| sample_path(k, start, length, &mut rng).map(|p| p[length]))
        .collect()
}

fn step<R: Rng + ?Sized>(k: &Kernel, s: usize, rng: &mut R) -> Result<usize> {
    if !k.is_row_complete(s) {
        return Err(Error::TruncationOverflow(format!(
            "sampled walk reached row {s}, whose products leave the window"
        )));
    }
    let (cols, vals) = k.row(s);
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (&t, &v) in cols.iter().zip(vals) {
        acc += v;
        if u < acc {
            return Ok(t);
        }
    }
    // rounding: the row sums to slightly less than u
    cols.iter()
        .zip(vals)
        .rev()
        .find(|(_, &v)| v > 0.0)
        .map(|(&t, _)| t)
        .ok_or_else(|| Error::Validation(format!("row {s} has no mass")))
}

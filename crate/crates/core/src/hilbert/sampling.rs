use rand::Rng;

use crate::error::{Error, Result};

/// Draws an outcome index from a (possibly unnormalized) probability vector.
///
/// Entries down to `-1e-12` are treated as zero. An all-zero vector is the
/// null branch of a trace-decreasing operation and yields [`Error::NullBranch`].
pub fn sample_outcome<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> Result<usize> {
    let mut total = 0.0;
    for &p in probabilities {
        if !(p >= -1e-12) {
            return Err(Error::InvalidProbability {
                name: "outcome probability",
                value: p,
            });
        }
        total += p.max(0.0);
    }
    if total <= 0.0 {
        return Err(Error::NullBranch);
    }
    let u = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    let mut last = 0;
    for (k, &p) in probabilities.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = k;
        if u < acc {
            return Ok(k);
        }
    }
    // rounding left u at the very top of the range
    Ok(last)
}

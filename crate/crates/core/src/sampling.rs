//! Seeded Monte-Carlo minimisation over the unit sphere of `C^n`.
//!
//! Samples are drawn in fixed-size chunks, each from its own ChaCha stream
//! derived from `(seed, chunk index)`, so the result does not depend on
//! how chunks are scheduled across threads.

use crate::exec::Exec;
use crate::fixtures;
use crate::linop::CVec;

pub const CHUNK: usize = 256;

#[derive(Clone, Debug)]
pub struct SampledMin {
    pub value: f64,
    pub argmin: CVec,
    pub samples: usize,
    pub seed: u64,
}

/// Minimum of `f` over `samples` random unit vectors in `C^n`.
pub fn min_over_unit_sphere<F>(n: usize, samples: usize, seed: u64, exec: Exec, f: F) -> SampledMin
where
    F: Fn(&CVec) -> f64 + Sync + Send,
{
    let samples = samples.max(1);
    let chunks = samples.div_ceil(CHUNK);
    let per_chunk = exec.map(chunks, |c| {
        let mut rng = fixtures::rng_stream(seed, c as u64);
        let count = CHUNK.min(samples - c * CHUNK);
        let mut best: Option<(f64, CVec)> = None;
        for _ in 0..count {
            let x = fixtures::unit_vector(n, &mut rng);
            let v = f(&x);
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, x));
            }
        }
        best.expect("chunk holds at least one sample")
    });
    let (value, argmin) = per_chunk
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one chunk");
    SampledMin {
        value,
        argmin,
        samples,
        seed,
    }
}

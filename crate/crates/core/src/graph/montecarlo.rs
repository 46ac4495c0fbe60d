use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::model::ModelParams;

use super::{count_rigid, in_subspace, sample_graph_with, ENUMERATION_LIMIT};

/// Sample mean of `X(G) = R(G)·[G in subspace]` over independent graphs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub in_subspace_fraction: f64,
    pub samples: usize,
}

/// RNG for sample `index` of an experiment: stream `index` of ChaCha8 keyed
/// by `seed`. Sample 0 is the graph [`super::sample_graph`] returns.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn mc_first_moment(
    n: usize,
    m: usize,
    params: &ModelParams,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(param("samples must be at least 1"));
    }
    if n == 0 {
        return Err(param("n must be at least 1"));
    }
    if n > ENUMERATION_LIMIT {
        return Err(Error::Capacity {
            n,
            limit: ENUMERATION_LIMIT,
        });
    }
    // integer accumulators keep the sum independent of the worker split
    let (sum, sum_sq, hits) = (0..samples as u64)
        .into_par_iter()
        .map(|k| -> Result<(u128, u128, u64)> {
            let g = sample_graph_with(&mut sample_rng(seed, k), n, m)?;
            if !in_subspace(&g, params) {
                return Ok((0, 0, 0));
            }
            let x = count_rigid(&g)? as u128;
            Ok((x, x * x, 1))
        })
        .try_reduce(
            || (0, 0, 0),
            |a, b| Ok((a.0 + b.0, a.1 + b.1, a.2 + b.2)),
        )?;

    let count = samples as f64;
    let mean = sum as f64 / count;
    let stderr = if samples > 1 {
        // Σ(x − x̄)² = Σx² − (Σx)²/N, exact in integers up to the final division
        let centred = sum_sq as f64 - (sum as f64) * (sum as f64) / count;
        (centred.max(0.0) / (count - 1.0) / count).sqrt()
    } else {
        0.0
    };
    Ok(McEstimate {
        estimate: mean,
        stderr,
        in_subspace_fraction: hits as f64 / count,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_graph;

    #[test]
    fn rejects_zero_samples_and_large_n() {
        let p = ModelParams::new(1.25, 4, 2.0).unwrap();
        assert!(matches!(mc_first_moment(4, 5, &p, 0, 1), Err(Error::Parameter(_))));
        assert!(matches!(mc_first_moment(25, 5, &p, 3, 1), Err(Error::Capacity { .. })));
    }

    #[test]
    fn stream_zero_is_the_plain_sampler() {
        let mut rng = sample_rng(77, 0);
        let a = sample_graph_with(&mut rng, 9, 13).unwrap();
        assert_eq!(a, sample_graph(9, 13, 77).unwrap());
    }

    #[test]
    fn estimate_is_non_negative_and_deterministic() {
        let p = ModelParams::new(1.25, 4, 2.0).unwrap();
        let a = mc_first_moment(4, 5, &p, 2000, 11).unwrap();
        let b = mc_first_moment(4, 5, &p, 2000, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.estimate >= 0.0 && a.stderr >= 0.0);
        assert_eq!(a.in_subspace_fraction, 1.0);
    }

    #[test]
    fn worker_count_does_not_change_result() {
        let p = ModelParams::new(1.25, 4, 2.0).unwrap();
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| mc_first_moment(5, 6, &p, 3000, 5).unwrap());
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| mc_first_moment(5, 6, &p, 3000, 5).unwrap());
        assert_eq!(serial, parallel);
    }

    #[test]
    fn empty_subspace_gives_zero() {
        let p = ModelParams::new(2.468155, 8, 1e-9).unwrap();
        let r = mc_first_moment(6, 15, &p, 500, 3).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert_eq!(r.in_subspace_fraction, 0.0);
    }
}

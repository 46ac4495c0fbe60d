//! Desk-scale experiments on the random multigraph model: sampling, degree
//! profiles, subspace membership, exact colouring counts and a Monte Carlo
//! estimate of the restricted first moment.

mod colouring;
mod io;
mod montecarlo;

pub use colouring::{
    count_proper, count_rigid, is_proper, is_rigid, repair_to_rigid, Colouring, ENUMERATION_LIMIT,
};
pub use io::parse_graph;
pub use montecarlo::{mc_first_moment, sample_rng, McEstimate};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{param, Result};
use crate::model::{build_profile, ModelParams};

/// `n` vertices and an ordered list of `m` ordered vertex pairs. Loops and
/// repeated pairs are allowed; a loop adds 2 to its vertex's degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl MultiGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(param("a graph needs at least one vertex"));
        }
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n || v >= n) {
            return Err(param(format!("edge ({u}, {v}) out of range for n = {n}")));
        }
        Ok(Self { n, edges })
    }

    /// The graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }
}

/// Draws `m` edges independently and uniformly from the `n²` ordered pairs,
/// so that every one of the `n^{2m}` edge lists is equally likely.
pub fn sample_graph(n: usize, m: usize, seed: u64) -> Result<MultiGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_graph_with(&mut rng, n, m)
}

pub fn sample_graph_with<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Result<MultiGraph> {
    if n == 0 {
        return Err(param("cannot sample a graph on zero vertices"));
    }
    let edges = (0..m)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect();
    MultiGraph::new(n, edges)
}

/// Empirical degree fractions `θ_x` for `x ≤ x_max` and the share `τ` of
/// vertices above `x_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeProfileEmpirical {
    pub fractions: Vec<f64>,
    pub tail_fraction: f64,
}

pub fn degree_profile(g: &MultiGraph, x_max: usize) -> DegreeProfileEmpirical {
    let mut counts = vec![0usize; x_max + 1];
    let mut tail = 0usize;
    for d in g.degrees() {
        match counts.get_mut(d) {
            Some(slot) => *slot += 1,
            None => tail += 1,
        }
    }
    let n = g.n() as f64;
    DegreeProfileEmpirical {
        fractions: counts.into_iter().map(|k| k as f64 / n).collect(),
        tail_fraction: tail as f64 / n,
    }
}

/// Whether every degree fraction `θ_x`, `x ≤ x_max`, is within `ε` of the
/// Poisson(`2c`) weight `p_x`.
pub fn in_subspace(g: &MultiGraph, params: &ModelParams) -> bool {
    let empirical = degree_profile(g, params.x_max());
    let poisson = build_profile(params);
    empirical
        .fractions
        .iter()
        .zip(poisson.weights())
        .all(|(theta, p)| (theta - p).abs() < params.epsilon())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_graph_degrees() {
        let g = sample_graph(5, 0, 3).unwrap();
        assert_eq!(g.m(), 0);
        let prof = degree_profile(&g, 4);
        assert_eq!(prof.fractions[0], 1.0);
        assert!(prof.fractions[1..].iter().all(|&f| f == 0.0));
        assert_eq!(prof.tail_fraction, 0.0);
    }

    #[test]
    fn loop_counts_twice() {
        let g = MultiGraph::new(1, vec![(0, 0)]).unwrap();
        assert_eq!(g.degrees(), vec![2]);
        let prof = degree_profile(&g, 3);
        assert_eq!(prof.fractions[2], 1.0);
        let prof = degree_profile(&g, 1);
        assert_eq!(prof.tail_fraction, 1.0);
    }

    #[test]
    fn handshake_and_determinism() {
        for seed in 0..20 {
            let g = sample_graph(30, 70, seed).unwrap();
            assert_eq!(g.degrees().iter().sum::<usize>(), 140);
            assert_eq!(g, sample_graph(30, 70, seed).unwrap());
        }
        assert_ne!(sample_graph(30, 70, 1).unwrap(), sample_graph(30, 70, 2).unwrap());
    }

    #[test]
    fn zero_vertices_rejected() {
        assert!(sample_graph(0, 3, 1).is_err());
        assert!(MultiGraph::new(2, vec![(0, 2)]).is_err());
    }

    #[test]
    fn profile_sums_to_one() {
        let g = sample_graph(500, 1234, 9).unwrap();
        let prof = degree_profile(&g, 6);
        let total: f64 = prof.fractions.iter().sum::<f64>() + prof.tail_fraction;
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degree_fractions_track_poisson() {
        let n = 10_000;
        let c = 2.468;
        let g = sample_graph(n, 24_680, 2024).unwrap();
        let prof = degree_profile(&g, 10);
        let params = ModelParams::new(c, 10, 1.0).unwrap();
        let poisson = build_profile(&params);
        for x in 0..=10 {
            assert!((prof.fractions[x] - poisson.weight(x)).abs() < 0.02, "x = {x}");
        }
    }

    #[test]
    fn subspace_edge_cases() {
        let g = MultiGraph::empty(50).unwrap();
        let loose = ModelParams::new(2.47, 8, 1.01).unwrap();
        assert!(in_subspace(&g, &loose));
        let tight = ModelParams::new(2.47, 8, 0.1).unwrap();
        assert!(!in_subspace(&g, &tight));
        let sampled = sample_graph(7, 11, 5).unwrap();
        assert!(in_subspace(&sampled, &ModelParams::new(2.47, 8, 1.5).unwrap()));
    }
}

//! Seeded fixtures shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use redgraph::potential::{Normalization, PoissonProblem};
use redgraph::random::{random_connected, random_mass_zero_measure};
use redgraph::{GraphMeasure, MetrizedGraph};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A connected graph with `vertices` vertices and `vertices / 2` extra edges.
pub fn graph(seed: u64, vertices: usize) -> MetrizedGraph {
    random_connected(&mut rng(seed), vertices, vertices / 2)
}

/// A mass-zero target on a graph of the given size, normalized against the
/// uniform measure.
pub fn poisson_problem(seed: u64, vertices: usize) -> PoissonProblem {
    let mut r = rng(seed);
    let g = random_connected(&mut r, vertices, vertices / 2);
    let target = random_mass_zero_measure(&mut r, &g);
    PoissonProblem::new(target, Normalization::Measure(GraphMeasure::uniform(&g)))
}

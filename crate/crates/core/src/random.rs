//! Seeded random instances: graphs of several shapes, points, continuous
//! piecewise quadratics and measures. Used by the property checks and the
//! benchmarks.

use rand::Rng;

use crate::graph::{
    Edge, EdgeDensity, EdgeProfile, GraphDivisor, GraphMeasure, GraphPoint, MetrizedGraph,
    PiecewisePoly,
};
use crate::rational::{self, Rational};

/// Graph shapes exercising loops, multi-edges and vertices of various degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Circle,
    Path,
    /// Two vertices joined by three parallel edges.
    Theta,
    /// One vertex carrying two loops.
    Bouquet,
    /// A triangle with a loop at one corner, a doubled side and a pendant edge.
    Mixed,
}

impl Topology {
    pub const ALL: [Topology; 5] = [
        Topology::Circle,
        Topology::Path,
        Topology::Theta,
        Topology::Bouquet,
        Topology::Mixed,
    ];
}

/// `num/den` with `num ∈ [-max, max]`, `den ∈ [1, max_den]`.
pub fn small_rational<R: Rng>(rng: &mut R, max: i64, max_den: i64) -> Rational {
    rational::rat(rng.random_range(-max..=max), rng.random_range(1..=max_den))
}

pub fn positive_rational<R: Rng>(rng: &mut R, max: i64, max_den: i64) -> Rational {
    rational::rat(rng.random_range(1..=max), rng.random_range(1..=max_den))
}

fn length<R: Rng>(rng: &mut R) -> Rational {
    positive_rational(rng, 12, 4)
}

pub fn random_graph<R: Rng>(rng: &mut R, topology: Topology) -> MetrizedGraph {
    let edges: Vec<(usize, usize)> = match topology {
        Topology::Circle => vec![(0, 0)],
        Topology::Path => vec![(0, 1)],
        Topology::Theta => vec![(0, 1), (0, 1), (1, 0)],
        Topology::Bouquet => vec![(0, 0), (0, 0)],
        Topology::Mixed => vec![(0, 1), (1, 2), (2, 0), (1, 2), (0, 0), (2, 3)],
    };
    let n = edges.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0) + 1;
    let names = (0..n).map(|i| format!("v{i}")).collect();
    let edges = edges
        .into_iter()
        .map(|(from, to)| Edge {
            from,
            to,
            length: length(rng),
        })
        .collect();
    MetrizedGraph::new(names, edges).expect("connected by construction")
}

/// A random connected graph: a random spanning tree on `vertices` vertices
/// plus `extra` edges with uniformly chosen endpoints (loops and parallel
/// edges included).
pub fn random_connected<R: Rng>(rng: &mut R, vertices: usize, extra: usize) -> MetrizedGraph {
    let vertices = vertices.max(1);
    let mut edges = Vec::new();
    for v in 1..vertices {
        edges.push(Edge {
            from: rng.random_range(0..v),
            to: v,
            length: length(rng),
        });
    }
    for _ in 0..extra {
        edges.push(Edge {
            from: rng.random_range(0..vertices),
            to: rng.random_range(0..vertices),
            length: length(rng),
        });
    }
    let names = (0..vertices).map(|i| format!("v{i}")).collect();
    MetrizedGraph::new(names, edges).expect("connected by construction")
}

/// Uniform over edges, offset on a grid of step `length/12`; endpoints come
/// back as vertices.
pub fn random_point<R: Rng>(rng: &mut R, graph: &MetrizedGraph) -> GraphPoint {
    if graph.edges().is_empty() {
        return GraphPoint::Vertex(rng.random_range(0..graph.vertices().len()));
    }
    let e = rng.random_range(0..graph.edges().len());
    let offset = &graph.edge(e).length * rational::rat(rng.random_range(0..=12), 12);
    graph.point(e, offset).expect("offset in range")
}

/// Strictly increasing interior positions of `(0, length)`.
fn interior_nodes<R: Rng>(rng: &mut R, length: &Rational, count: usize) -> Vec<Rational> {
    let mut ks: Vec<i64> = (0..count).map(|_| rng.random_range(1..24)).collect();
    ks.sort_unstable();
    ks.dedup();
    ks.into_iter()
        .map(|k| length * rational::rat(k, 24))
        .collect()
}

/// Continuous, quadratic on each of at most `max_breaks + 1` pieces per edge.
pub fn random_poly<R: Rng>(rng: &mut R, graph: &MetrizedGraph, max_breaks: usize) -> PiecewisePoly {
    let vertex_values: Vec<Rational> = (0..graph.vertices().len())
        .map(|_| small_rational(rng, 6, 3))
        .collect();
    let profiles: Vec<EdgeProfile> = graph
        .edges()
        .iter()
        .map(|e| {
            let count = rng.random_range(0..=max_breaks);
            let nodes: Vec<(Rational, Rational)> = interior_nodes(rng, &e.length, count)
                .into_iter()
                .map(|t| (t, small_rational(rng, 6, 3)))
                .collect();
            let curvature = (0..=nodes.len())
                .map(|_| small_rational(rng, 4, 3))
                .collect();
            EdgeProfile { nodes, curvature }
        })
        .collect();
    PiecewisePoly::from_profiles(graph, &vertex_values, &profiles).expect("consistent profile")
}

fn random_densities<R: Rng>(
    rng: &mut R,
    graph: &MetrizedGraph,
    positive: bool,
) -> Vec<EdgeDensity> {
    graph
        .edges()
        .iter()
        .map(|e| {
            let count = rng.random_range(0..=2);
            let breaks = interior_nodes(rng, &e.length, count);
            let values = (0..=breaks.len())
                .map(|_| {
                    if positive {
                        rational::rat(rng.random_range(0..=4), rng.random_range(1..=3))
                    } else {
                        small_rational(rng, 4, 3)
                    }
                })
                .collect();
            EdgeDensity::new(breaks, values)
        })
        .collect()
}

fn random_atoms<R: Rng>(rng: &mut R, graph: &MetrizedGraph, positive: bool) -> GraphDivisor {
    let mut atoms = GraphDivisor::new();
    for _ in 0..rng.random_range(1..=3) {
        let w = if positive {
            positive_rational(rng, 4, 3)
        } else {
            small_rational(rng, 4, 3)
        };
        atoms.add(random_point(rng, graph), w);
    }
    atoms
}

/// Random atoms and densities, balanced to total mass zero by one extra atom.
pub fn random_mass_zero_measure<R: Rng>(rng: &mut R, graph: &MetrizedGraph) -> GraphMeasure {
    let mut atoms = random_atoms(rng, graph, false);
    let densities = random_densities(rng, graph, false);
    let partial =
        GraphMeasure::new(graph, atoms.clone(), densities.clone()).expect("valid measure");
    atoms.add(random_point(rng, graph), -partial.total_mass());
    GraphMeasure::new(graph, atoms, densities).expect("valid measure")
}

/// Nonnegative atoms and densities scaled to mass one.
pub fn random_probability_measure<R: Rng>(rng: &mut R, graph: &MetrizedGraph) -> GraphMeasure {
    let raw = GraphMeasure::new(
        graph,
        random_atoms(rng, graph, true),
        random_densities(rng, graph, true),
    )
    .expect("valid measure");
    let mass = raw.total_mass();
    raw.scale(&mass.recip())
}

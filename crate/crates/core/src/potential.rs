//! Distributional second derivative, Poisson solver, Green functions and
//! Dirichlet energy on metrized graphs.
//!
//! Sign convention: [`d2`] has density `f''` on every piece and, at each
//! vertex or breakpoint, an atom equal to the sum of the outgoing slopes of
//! `f` there. With this convention `∫ f·d2(f) = −∫ (f')²` and the curvature
//! of `O(D) ⊗ O(g)` is `μ_D + d2(g)`.

use num_traits::Zero;

use crate::graph::{
    EdgeDensity, EdgeProfile, GraphDivisor, GraphMeasure, GraphPoint, MetrizedGraph, PiecewisePoly,
};
use crate::linalg::{self, Matrix};
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// How the additive constant of a Poisson solution is fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalization {
    /// `f(point) = 0`.
    Point(GraphPoint),
    /// `∫ f dμ = 0` for a probability measure `μ`.
    Measure(GraphMeasure),
}

/// Find `f` with `d2(f) = target` and the given normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoissonProblem {
    pub target: GraphMeasure,
    pub normalization: Normalization,
}

impl PoissonProblem {
    pub fn new(target: GraphMeasure, normalization: Normalization) -> Self {
        Self {
            target,
            normalization,
        }
    }

    pub fn graph(&self) -> &MetrizedGraph {
        self.target.graph()
    }
}

pub fn d2(f: &PiecewisePoly) -> GraphMeasure {
    let graph = f.graph();
    let mut atoms = GraphDivisor::new();
    let mut densities = Vec::with_capacity(graph.edges().len());
    for (i, (edge, poly)) in graph.edges().iter().zip(f.edges()).enumerate() {
        let pieces = poly.pieces();
        for (k, b) in poly.breaks().iter().enumerate() {
            let jump = pieces[k + 1].derivative(b) - pieces[k].derivative(b);
            atoms.add(
                GraphPoint::Edge {
                    edge: i,
                    offset: b.clone(),
                },
                jump,
            );
        }
        atoms.add(
            GraphPoint::Vertex(edge.from),
            pieces[0].derivative(&Rational::zero()),
        );
        atoms.add(
            GraphPoint::Vertex(edge.to),
            -pieces[pieces.len() - 1].derivative(&edge.length),
        );
        densities.push(EdgeDensity::new(
            poly.breaks().to_vec(),
            pieces.iter().map(|q| q.second_derivative()).collect(),
        ));
    }
    GraphMeasure::new(graph, atoms, densities).expect("d2 of a valid function is a valid measure")
}

/// Dirichlet energy `∫ (f')² dt`.
pub fn energy(f: &PiecewisePoly) -> Rational {
    f.graph()
        .edges()
        .iter()
        .zip(f.edges())
        .flat_map(|(edge, poly)| {
            poly.segments(&edge.length)
                .map(|(a, b, q)| q.derivative_energy(a, b))
                .collect::<Vec<_>>()
        })
        .fold(Rational::zero(), |acc, e| acc + e)
}

/// Node layout for the Kirchhoff system: vertices first, then interior
/// nodes edge by edge in increasing offset.
struct Nodes {
    vertex_count: usize,
    interior: Vec<Vec<Rational>>,
    base: Vec<usize>,
}

impl Nodes {
    fn build(
        graph: &MetrizedGraph,
        measures: &[&GraphMeasure],
        extra: Option<&GraphPoint>,
    ) -> Self {
        let mut interior: Vec<Vec<Rational>> = vec![Vec::new(); graph.edges().len()];
        for m in measures {
            for (p, _) in m.atoms().iter() {
                if let GraphPoint::Edge { edge, offset } = p {
                    interior[*edge].push(offset.clone());
                }
            }
            for (i, d) in m.densities().iter().enumerate() {
                interior[i].extend(d.breaks().iter().cloned());
            }
        }
        if let Some(GraphPoint::Edge { edge, offset }) = extra {
            interior[*edge].push(offset.clone());
        }
        let mut base = Vec::with_capacity(interior.len());
        let mut next = graph.vertices().len();
        for list in &mut interior {
            list.sort();
            list.dedup();
            base.push(next);
            next += list.len();
        }
        Self {
            vertex_count: graph.vertices().len(),
            interior,
            base,
        }
    }

    fn len(&self) -> usize {
        self.vertex_count + self.interior.iter().map(Vec::len).sum::<usize>()
    }

    fn index(&self, p: &GraphPoint) -> usize {
        match p {
            GraphPoint::Vertex(v) => *v,
            GraphPoint::Edge { edge, offset } => {
                let k = self.interior[*edge]
                    .binary_search(offset)
                    .expect("point registered as a node");
                self.base[*edge] + k
            }
        }
    }

    /// `(node_a, node_b, start, end)` for each segment of an edge.
    fn segments(
        &self,
        graph: &MetrizedGraph,
        edge: usize,
    ) -> Vec<(usize, usize, Rational, Rational)> {
        let e = graph.edge(edge);
        let list = &self.interior[edge];
        let mut out = Vec::with_capacity(list.len() + 1);
        let mut prev = (e.from, Rational::zero());
        for (k, t) in list.iter().enumerate() {
            let node = self.base[edge] + k;
            out.push((prev.0, node, prev.1.clone(), t.clone()));
            prev = (node, t.clone());
        }
        out.push((prev.0, e.to, prev.1, e.length.clone()));
        out
    }
}

/// Solves `d2(f) = target` exactly.
///
/// On every segment between consecutive nodes the solution is the quadratic
/// with second derivative equal to the target density, so it is determined
/// by its node values. Those satisfy the Kirchhoff flux balance at each node;
/// one balance row (redundant because the target has mass zero) is replaced
/// by the normalization.
pub fn solve_d2(problem: &PoissonProblem) -> Result<PiecewisePoly> {
    let graph = problem.graph();
    let target = &problem.target;
    let mass = target.total_mass();
    if !mass.is_zero() {
        return Err(Error::NoSolution(mass));
    }

    let (reference, anchor) = match &problem.normalization {
        Normalization::Point(p) => {
            graph.check_point(p)?;
            (None, Some(p))
        }
        Normalization::Measure(mu) => {
            if mu.graph() != graph {
                return Err(Error::GraphMismatch);
            }
            let m = mu.total_mass();
            if m != rational::one() {
                return Err(Error::NotProbability(m));
            }
            (Some(mu), None)
        }
    };

    let mut measures = vec![target];
    measures.extend(reference);
    let nodes = Nodes::build(graph, &measures, anchor);
    let n = nodes.len();
    let two = Rational::from_integer(2.into());
    let twelve = Rational::from_integer(12.into());

    let mut a = Matrix::zeros(n, n);
    let mut rhs = vec![Rational::zero(); n];
    for (p, w) in target.atoms().iter() {
        rhs[nodes.index(p)] += w;
    }

    let mut segment_curvatures: Vec<Vec<Rational>> = Vec::with_capacity(graph.edges().len());
    for (i, density) in target.densities().iter().enumerate() {
        let mut curvatures = Vec::new();
        for (na, nb, s, e) in nodes.segments(graph, i) {
            let h = &e - &s;
            let mid = (&s + &e) / &two;
            let rho = density.value_at(&mid).clone();
            let inv_h = h.recip();
            // flux out of each end: (u_other − u_self)/h − ρh/2
            let half_load = &rho * &h / &two;
            for (me, other) in [(na, nb), (nb, na)] {
                *a.get_mut(me, other) += &inv_h;
                *a.get_mut(me, me) -= &inv_h;
                rhs[me] += &half_load;
            }
            curvatures.push(rho);
        }
        segment_curvatures.push(curvatures);
    }

    // normalization replaces the first balance row
    for c in 0..n {
        *a.get_mut(0, c) = Rational::zero();
    }
    rhs[0] = Rational::zero();
    match (&reference, anchor) {
        (_, Some(p)) => *a.get_mut(0, nodes.index(p)) = rational::one(),
        (Some(mu), None) => {
            for (p, w) in mu.atoms().iter() {
                *a.get_mut(0, nodes.index(p)) += w;
            }
            for (i, density) in mu.densities().iter().enumerate() {
                for ((na, nb, s, e), rho) in nodes
                    .segments(graph, i)
                    .into_iter()
                    .zip(&segment_curvatures[i])
                {
                    let h = &e - &s;
                    let sigma = density.value_at(&((&s + &e) / &two)).clone();
                    if sigma.is_zero() {
                        continue;
                    }
                    let w = &sigma * &h / &two;
                    *a.get_mut(0, na) += &w;
                    *a.get_mut(0, nb) += &w;
                    rhs[0] += &sigma * rho * &h * &h * &h / &twelve;
                }
            }
        }
        (None, None) => unreachable!(),
    }

    let values = linalg::solve(a, rhs)?;

    let profiles: Vec<EdgeProfile> = nodes
        .interior
        .iter()
        .enumerate()
        .map(|(i, list)| EdgeProfile {
            nodes: list
                .iter()
                .enumerate()
                .map(|(k, t)| (t.clone(), values[nodes.base[i] + k].clone()))
                .collect(),
            curvature: segment_curvatures[i].clone(),
        })
        .collect();
    PiecewisePoly::from_profiles(graph, &values[..nodes.vertex_count], &profiles)
}

/// Green function `g_μ(y, ·)`: `d2(g) = μ − δ_y`, `∫ g dμ = 0`.
pub fn green(graph: &MetrizedGraph, y: &GraphPoint, mu: &GraphMeasure) -> Result<PiecewisePoly> {
    graph.check_point(y)?;
    if mu.graph() != graph {
        return Err(Error::GraphMismatch);
    }
    let mass = mu.total_mass();
    if mass != rational::one() {
        return Err(Error::NotProbability(mass));
    }
    let target = mu.sub(&GraphMeasure::dirac(graph, y.clone(), rational::one())?)?;
    solve_d2(&PoissonProblem::new(
        target,
        Normalization::Measure(mu.clone()),
    ))
}

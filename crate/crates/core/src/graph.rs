//! Metrized graphs, points, divisors, piecewise-quadratic functions and
//! measures, together with exact integration.
//!
//! Every edge carries an arc-length coordinate `t ∈ [0, length]` running from
//! its source vertex to its target vertex. Polynomial coefficients are always
//! expressed in that absolute edge coordinate.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::rational::{self, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub length: Rational,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

#[derive(Debug, PartialEq, Eq)]
struct GraphInner {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

/// A finite connected graph whose edges are segments of positive rational
/// length. Loops and multiple edges are allowed.
///
/// Cloning is cheap; clones share storage.
#[derive(Clone)]
pub struct MetrizedGraph(Arc<GraphInner>);

impl PartialEq for MetrizedGraph {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for MetrizedGraph {}

impl fmt::Debug for MetrizedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetrizedGraph")
            .field("vertices", &self.0.vertices)
            .field("edges", &self.0.edges)
            .finish()
    }
}

impl MetrizedGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.as_str()) {
                return Err(Error::InvalidGraph(format!("duplicate vertex {v:?}")));
            }
        }
        for (i, e) in edges.iter().enumerate() {
            if e.from >= vertices.len() || e.to >= vertices.len() {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} has an undeclared endpoint"
                )));
            }
            if !e.length.is_positive() {
                return Err(Error::InvalidLength(e.length.clone()));
            }
        }

        // connectivity by union-find
        let mut parent: Vec<usize> = (0..vertices.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &edges {
            let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        if (0..vertices.len()).any(|v| find(&mut parent, v) != root) {
            return Err(Error::Disconnected);
        }

        Ok(Self(Arc::new(GraphInner { vertices, edges })))
    }

    /// Builds a graph from vertex names and `(from, to, length)` triples.
    pub fn from_named(vertices: &[&str], edges: &[(&str, &str, Rational)]) -> Result<Self> {
        let names: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        let lookup = |name: &str| {
            names
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::InvalidGraph(format!("unknown vertex {name:?}")))
        };
        let edges = edges
            .iter()
            .map(|(a, b, len)| {
                Ok(Edge {
                    from: lookup(a)?,
                    to: lookup(b)?,
                    length: len.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(names, edges)
    }

    pub fn vertices(&self) -> &[String] {
        &self.0.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.0.edges
    }

    pub fn edge(&self, index: usize) -> &Edge {
        &self.0.edges[index]
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.0.vertices.iter().position(|v| v == name)
    }

    pub fn total_length(&self) -> Rational {
        self.0
            .edges
            .iter()
            .fold(Rational::zero(), |acc, e| acc + &e.length)
    }

    /// One vertex carrying a single loop.
    pub fn is_circle(&self) -> bool {
        self.0.vertices.len() == 1 && self.0.edges.len() == 1 && self.0.edges[0].is_loop()
    }

    pub fn vertex(&self, index: usize) -> Result<GraphPoint> {
        if index >= self.0.vertices.len() {
            return Err(Error::PointOutOfRange(format!("vertex {index}")));
        }
        Ok(GraphPoint::Vertex(index))
    }

    /// The point at arc-length `offset` along `edge`, in canonical form.
    pub fn point(&self, edge: usize, offset: Rational) -> Result<GraphPoint> {
        let e = self
            .0
            .edges
            .get(edge)
            .ok_or_else(|| Error::PointOutOfRange(format!("edge {edge}")))?;
        if offset.is_negative() || offset > e.length {
            return Err(Error::PointOutOfRange(format!(
                "offset {} on edge {edge} of length {}",
                rational::format(&offset),
                rational::format(&e.length)
            )));
        }
        if offset.is_zero() {
            Ok(GraphPoint::Vertex(e.from))
        } else if offset == e.length {
            Ok(GraphPoint::Vertex(e.to))
        } else {
            Ok(GraphPoint::Edge { edge, offset })
        }
    }

    pub(crate) fn check_point(&self, p: &GraphPoint) -> Result<()> {
        match p {
            GraphPoint::Vertex(v) if *v < self.0.vertices.len() => Ok(()),
            GraphPoint::Edge { edge, offset }
                if *edge < self.0.edges.len()
                    && offset.is_positive()
                    && *offset < self.0.edges[*edge].length =>
            {
                Ok(())
            }
            _ => Err(Error::PointOutOfRange(format!("{p:?}"))),
        }
    }
}

/// A circle of circumference `length`: one vertex, one loop.
pub fn circle_graph(length: &Rational) -> Result<MetrizedGraph> {
    if !length.is_positive() {
        return Err(Error::InvalidLength(length.clone()));
    }
    MetrizedGraph::new(
        vec!["v0".into()],
        vec![Edge {
            from: 0,
            to: 0,
            length: length.clone(),
        }],
    )
}

/// A segment `[0, length]` with vertices `v0` and `v1`.
pub fn path_graph(length: &Rational) -> Result<MetrizedGraph> {
    if !length.is_positive() {
        return Err(Error::InvalidLength(length.clone()));
    }
    MetrizedGraph::new(
        vec!["v0".into(), "v1".into()],
        vec![Edge {
            from: 0,
            to: 1,
            length: length.clone(),
        }],
    )
}

/// A point of a metrized graph. Interior edge points have offsets strictly
/// inside `(0, length)`; endpoints are always represented by their vertex,
/// so structural equality is metric equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GraphPoint {
    Vertex(usize),
    Edge { edge: usize, offset: Rational },
}

/// Finitely supported rational combination of graph points.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphDivisor {
    coefficients: BTreeMap<GraphPoint, Rational>,
}

impl GraphDivisor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn point(p: GraphPoint, weight: Rational) -> Self {
        let mut d = Self::new();
        d.add(p, weight);
        d
    }

    pub fn add(&mut self, p: GraphPoint, weight: Rational) {
        let total = self.coefficients.remove(&p).unwrap_or_else(Rational::zero) + weight;
        if !total.is_zero() {
            self.coefficients.insert(p, total);
        }
    }

    pub fn coefficient(&self, p: &GraphPoint) -> Rational {
        self.coefficients
            .get(p)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Rational {
        self.coefficients
            .values()
            .fold(Rational::zero(), |acc, w| acc + w)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GraphPoint, &Rational)> {
        self.coefficients.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        let mut out = Self::new();
        if factor.is_zero() {
            return out;
        }
        for (p, w) in &self.coefficients {
            out.coefficients.insert(p.clone(), w * factor);
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, w) in &other.coefficients {
            out.add(p.clone(), w.clone());
        }
        out
    }
}

/// `c2·t² + c1·t + c0`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Quadratic {
    pub c2: Rational,
    pub c1: Rational,
    pub c0: Rational,
}

impl Quadratic {
    pub fn new(c2: Rational, c1: Rational, c0: Rational) -> Self {
        Self { c2, c1, c0 }
    }

    pub fn constant(c0: Rational) -> Self {
        Self::new(Rational::zero(), Rational::zero(), c0)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        (&self.c2 * t + &self.c1) * t + &self.c0
    }

    pub fn derivative(&self, t: &Rational) -> Rational {
        Rational::from_integer(2.into()) * &self.c2 * t + &self.c1
    }

    pub fn second_derivative(&self) -> Rational {
        Rational::from_integer(2.into()) * &self.c2
    }

    /// `∫_a^b q(t) dt`.
    pub fn integral(&self, a: &Rational, b: &Rational) -> Rational {
        let antiderivative = |t: &Rational| {
            let t2 = t * t;
            &self.c2 * &t2 * t / Rational::from_integer(3.into())
                + &self.c1 * &t2 / Rational::from_integer(2.into())
                + &self.c0 * t
        };
        antiderivative(b) - antiderivative(a)
    }

    /// `∫_a^b q'(t)² dt`.
    pub fn derivative_energy(&self, a: &Rational, b: &Rational) -> Rational {
        // q' = 2 c2 t + c1
        let antiderivative = |t: &Rational| {
            let t2 = t * t;
            Rational::from_integer(4.into()) * &self.c2 * &self.c2 * &t2 * t
                / Rational::from_integer(3.into())
                + Rational::from_integer(2.into()) * &self.c2 * &self.c1 * &t2
                + &self.c1 * &self.c1 * t
        };
        antiderivative(b) - antiderivative(a)
    }

    pub fn combine(&self, a: &Rational, other: &Self, b: &Rational) -> Self {
        Self::new(
            a * &self.c2 + b * &other.c2,
            a * &self.c1 + b * &other.c1,
            a * &self.c0 + b * &other.c0,
        )
    }

    /// `curv/2·(t−a)(t−b) + va + (vb−va)(t−a)/(b−a)`: the quadratic with
    /// second derivative `curv` taking values `va`, `vb` at `a`, `b`.
    pub fn interpolating(
        a: &Rational,
        b: &Rational,
        va: &Rational,
        vb: &Rational,
        curv: &Rational,
    ) -> Self {
        let half = curv / Rational::from_integer(2.into());
        let slope = (vb - va) / (b - a);
        Self::new(
            half.clone(),
            -&half * (a + b) + &slope,
            &half * a * b + va - &slope * a,
        )
    }
}

/// Restriction of a piecewise polynomial to one edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgePoly {
    breaks: Vec<Rational>,
    pieces: Vec<Quadratic>,
}

impl EdgePoly {
    pub fn new(breaks: Vec<Rational>, pieces: Vec<Quadratic>) -> Self {
        Self { breaks, pieces }
    }

    pub fn single(piece: Quadratic) -> Self {
        Self::new(Vec::new(), vec![piece])
    }

    pub fn breaks(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Quadratic] {
        &self.pieces
    }

    /// Piece bounds `(start, end, quadratic)` on an edge of the given length.
    pub fn segments<'a>(
        &'a self,
        length: &'a Rational,
    ) -> impl Iterator<Item = (&'a Rational, &'a Rational, &'a Quadratic)> + 'a {
        let zero: &'static Rational = &ZERO;
        self.pieces.iter().enumerate().map(move |(k, q)| {
            let start = if k == 0 { zero } else { &self.breaks[k - 1] };
            let end = self.breaks.get(k).unwrap_or(length);
            (start, end, q)
        })
    }

    pub fn piece_at(&self, t: &Rational) -> &Quadratic {
        &self.pieces[self.breaks.partition_point(|b| b < t)]
    }

    fn merge_equal(&mut self) {
        let mut breaks = Vec::with_capacity(self.breaks.len());
        let mut pieces: Vec<Quadratic> = Vec::with_capacity(self.pieces.len());
        for (k, q) in self.pieces.drain(..).enumerate() {
            if let Some(last) = pieces.last() {
                if *last == q {
                    continue;
                }
                breaks.push(self.breaks[k - 1].clone());
            }
            pieces.push(q);
        }
        self.breaks = breaks;
        self.pieces = pieces;
    }
}

static ZERO: std::sync::LazyLock<Rational> = std::sync::LazyLock::new(Rational::zero);

/// Interior node values and per-segment second derivatives on one edge; the
/// input form of [`PiecewisePoly::from_profiles`].
#[derive(Debug, Clone, Default)]
pub struct EdgeProfile {
    /// `(position, value)` at interior nodes, strictly increasing in `(0, length)`.
    pub nodes: Vec<(Rational, Rational)>,
    /// Second derivative on each of the `nodes.len() + 1` segments.
    pub curvature: Vec<Rational>,
}

/// Continuous function on a metrized graph, quadratic on each piece of each
/// edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewisePoly {
    graph: MetrizedGraph,
    edges: Vec<EdgePoly>,
    vertex_values: Vec<Rational>,
}

impl PiecewisePoly {
    /// Validates continuity and stores the function with adjacent equal
    /// pieces merged. Vertices without incident edges take the value 0.
    pub fn new(graph: &MetrizedGraph, mut edges: Vec<EdgePoly>) -> Result<Self> {
        if edges.len() != graph.edges().len() {
            return Err(Error::InvalidFunction(format!(
                "{} edge polynomials for {} edges",
                edges.len(),
                graph.edges().len()
            )));
        }
        let mut vertex_values: Vec<Option<Rational>> = vec![None; graph.vertices().len()];
        for (i, (edge, poly)) in graph.edges().iter().zip(&edges).enumerate() {
            if poly.pieces.len() != poly.breaks.len() + 1 {
                return Err(Error::InvalidFunction(format!(
                    "edge {i}: {} pieces for {} breakpoints",
                    poly.pieces.len(),
                    poly.breaks.len()
                )));
            }
            let mut prev = Rational::zero();
            for (k, b) in poly.breaks.iter().enumerate() {
                if *b <= prev || *b >= edge.length {
                    return Err(Error::InvalidFunction(format!(
                        "edge {i}: breakpoints must increase strictly inside (0, length)"
                    )));
                }
                if poly.pieces[k].eval(b) != poly.pieces[k + 1].eval(b) {
                    return Err(Error::InvalidFunction(format!(
                        "edge {i}: discontinuity at {}",
                        rational::format(b)
                    )));
                }
                prev = b.clone();
            }
            let ends = [
                (edge.from, poly.pieces[0].eval(&Rational::zero())),
                (edge.to, poly.pieces.last().unwrap().eval(&edge.length)),
            ];
            for (v, value) in ends {
                match &vertex_values[v] {
                    Some(existing) if *existing != value => {
                        return Err(Error::InvalidFunction(format!(
                            "discontinuity at vertex {:?}",
                            graph.vertices()[v]
                        )));
                    }
                    Some(_) => {}
                    None => vertex_values[v] = Some(value),
                }
            }
        }
        for e in &mut edges {
            e.merge_equal();
        }
        Ok(Self {
            graph: graph.clone(),
            edges,
            vertex_values: vertex_values
                .into_iter()
                .map(|v| v.unwrap_or_else(Rational::zero))
                .collect(),
        })
    }

    pub fn constant(graph: &MetrizedGraph, value: Rational) -> Self {
        Self {
            graph: graph.clone(),
            edges: graph
                .edges()
                .iter()
                .map(|_| EdgePoly::single(Quadratic::constant(value.clone())))
                .collect(),
            vertex_values: vec![value; graph.vertices().len()],
        }
    }

    pub fn zero(graph: &MetrizedGraph) -> Self {
        Self::constant(graph, Rational::zero())
    }

    /// Builds the unique function with the given vertex values, interior node
    /// values and piecewise-constant second derivative. Continuity holds by
    /// construction.
    pub fn from_profiles(
        graph: &MetrizedGraph,
        vertex_values: &[Rational],
        profiles: &[EdgeProfile],
    ) -> Result<Self> {
        if vertex_values.len() != graph.vertices().len() || profiles.len() != graph.edges().len() {
            return Err(Error::InvalidFunction("profile shape mismatch".into()));
        }
        let mut edges = Vec::with_capacity(profiles.len());
        for (i, (edge, profile)) in graph.edges().iter().zip(profiles).enumerate() {
            if profile.curvature.len() != profile.nodes.len() + 1 {
                return Err(Error::InvalidFunction(format!(
                    "edge {i}: {} curvatures for {} nodes",
                    profile.curvature.len(),
                    profile.nodes.len()
                )));
            }
            let mut knots = Vec::with_capacity(profile.nodes.len() + 2);
            knots.push((Rational::zero(), vertex_values[edge.from].clone()));
            knots.extend(profile.nodes.iter().cloned());
            knots.push((edge.length.clone(), vertex_values[edge.to].clone()));
            let pieces = knots
                .windows(2)
                .zip(&profile.curvature)
                .map(|(w, curv)| Quadratic::interpolating(&w[0].0, &w[1].0, &w[0].1, &w[1].1, curv))
                .collect();
            let breaks = profile.nodes.iter().map(|(t, _)| t.clone()).collect();
            edges.push(EdgePoly::new(breaks, pieces));
        }
        let mut f = Self::new(graph, edges)?;
        // isolated vertices keep their requested values
        f.vertex_values = vertex_values.to_vec();
        Ok(f)
    }

    pub fn graph(&self) -> &MetrizedGraph {
        &self.graph
    }

    pub fn edges(&self) -> &[EdgePoly] {
        &self.edges
    }

    pub fn vertex_values(&self) -> &[Rational] {
        &self.vertex_values
    }

    pub fn eval(&self, p: &GraphPoint) -> Rational {
        match p {
            GraphPoint::Vertex(v) => self.vertex_values[*v].clone(),
            GraphPoint::Edge { edge, offset } => self.eval_on_edge(*edge, offset),
        }
    }

    pub fn eval_on_edge(&self, edge: usize, t: &Rational) -> Rational {
        self.edges[edge].piece_at(t).eval(t)
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: &Rational, other: &Self, b: &Rational) -> Result<Self> {
        if self.graph != other.graph {
            return Err(Error::GraphMismatch);
        }
        let edges = self
            .graph
            .edges()
            .iter()
            .zip(self.edges.iter().zip(&other.edges))
            .map(|(edge, (f, g))| {
                let breaks = merged_breaks(&f.breaks, &g.breaks);
                let pieces = segment_midpoints(&breaks, &edge.length)
                    .map(|mid| f.piece_at(&mid).combine(a, g.piece_at(&mid), b))
                    .collect();
                EdgePoly::new(breaks, pieces)
            })
            .collect();
        let mut out = Self::new(&self.graph, edges)?;
        out.vertex_values = self
            .vertex_values
            .iter()
            .zip(&other.vertex_values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(&rational::one(), other, &rational::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(&rational::one(), other, &-rational::one())
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        let mut out = self.clone();
        for e in &mut out.edges {
            for q in &mut e.pieces {
                *q = q.combine(factor, &Quadratic::default(), &Rational::zero());
            }
            e.merge_equal();
        }
        for v in &mut out.vertex_values {
            *v = &*v * factor;
        }
        out
    }
}

/// Piecewise-constant density on one edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeDensity {
    breaks: Vec<Rational>,
    values: Vec<Rational>,
}

impl EdgeDensity {
    pub fn new(breaks: Vec<Rational>, values: Vec<Rational>) -> Self {
        Self { breaks, values }
    }

    pub fn constant(value: Rational) -> Self {
        Self::new(Vec::new(), vec![value])
    }

    pub fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    pub fn breaks(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value_at(&self, t: &Rational) -> &Rational {
        &self.values[self.breaks.partition_point(|b| b < t)]
    }

    pub fn segments<'a>(
        &'a self,
        length: &'a Rational,
    ) -> impl Iterator<Item = (&'a Rational, &'a Rational, &'a Rational)> + 'a {
        let zero: &'static Rational = &ZERO;
        self.values.iter().enumerate().map(move |(k, v)| {
            let start = if k == 0 { zero } else { &self.breaks[k - 1] };
            let end = self.breaks.get(k).unwrap_or(length);
            (start, end, v)
        })
    }

    pub fn mass(&self, length: &Rational) -> Rational {
        self.segments(length)
            .fold(Rational::zero(), |acc, (a, b, v)| acc + v * (b - a))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    fn validate(&self, length: &Rational) -> Result<()> {
        if self.values.len() != self.breaks.len() + 1 {
            return Err(Error::InvalidMeasure(
                "density needs one value per piece".into(),
            ));
        }
        let mut prev = Rational::zero();
        for b in &self.breaks {
            if *b <= prev || b >= length {
                return Err(Error::InvalidMeasure(
                    "density breakpoints must increase strictly inside (0, length)".into(),
                ));
            }
            prev = b.clone();
        }
        Ok(())
    }

    fn merge_equal(&mut self) {
        let mut breaks = Vec::new();
        let mut values: Vec<Rational> = Vec::new();
        for (k, v) in self.values.drain(..).enumerate() {
            if let Some(last) = values.last() {
                if *last == v {
                    continue;
                }
                breaks.push(self.breaks[k - 1].clone());
            }
            values.push(v);
        }
        self.breaks = breaks;
        self.values = values;
    }

    fn combine(&self, a: &Rational, other: &Self, b: &Rational, length: &Rational) -> Self {
        let breaks = merged_breaks(&self.breaks, &other.breaks);
        let values = segment_midpoints(&breaks, length)
            .map(|mid| a * self.value_at(&mid) + b * other.value_at(&mid))
            .collect();
        let mut out = Self::new(breaks, values);
        out.merge_equal();
        out
    }
}

/// Signed measure on a metrized graph: finitely many atoms plus a
/// piecewise-constant density with respect to arc length on each edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphMeasure {
    graph: MetrizedGraph,
    atoms: GraphDivisor,
    densities: Vec<EdgeDensity>,
}

impl GraphMeasure {
    pub fn new(
        graph: &MetrizedGraph,
        atoms: GraphDivisor,
        mut densities: Vec<EdgeDensity>,
    ) -> Result<Self> {
        if densities.len() != graph.edges().len() {
            return Err(Error::InvalidMeasure(format!(
                "{} densities for {} edges",
                densities.len(),
                graph.edges().len()
            )));
        }
        for (p, _) in atoms.iter() {
            graph.check_point(p)?;
        }
        for (edge, d) in graph.edges().iter().zip(&mut densities) {
            d.validate(&edge.length)?;
            d.merge_equal();
        }
        Ok(Self {
            graph: graph.clone(),
            atoms,
            densities,
        })
    }

    pub fn zero(graph: &MetrizedGraph) -> Self {
        Self {
            graph: graph.clone(),
            atoms: GraphDivisor::new(),
            densities: vec![EdgeDensity::zero(); graph.edges().len()],
        }
    }

    pub fn from_divisor(graph: &MetrizedGraph, divisor: GraphDivisor) -> Result<Self> {
        Self::new(
            graph,
            divisor,
            vec![EdgeDensity::zero(); graph.edges().len()],
        )
    }

    pub fn dirac(graph: &MetrizedGraph, p: GraphPoint, weight: Rational) -> Result<Self> {
        Self::from_divisor(graph, GraphDivisor::point(p, weight))
    }

    /// Normalized arc-length measure `dt / total_length`. On an edgeless
    /// graph this is the unit atom at its vertex.
    pub fn uniform(graph: &MetrizedGraph) -> Self {
        if graph.edges().is_empty() {
            let mut m = Self::zero(graph);
            m.atoms.add(GraphPoint::Vertex(0), rational::one());
            return m;
        }
        let density = graph.total_length().recip();
        Self {
            graph: graph.clone(),
            atoms: GraphDivisor::new(),
            densities: vec![EdgeDensity::constant(density); graph.edges().len()],
        }
    }

    pub fn graph(&self) -> &MetrizedGraph {
        &self.graph
    }

    pub fn atoms(&self) -> &GraphDivisor {
        &self.atoms
    }

    pub fn densities(&self) -> &[EdgeDensity] {
        &self.densities
    }

    pub fn total_mass(&self) -> Rational {
        let continuous = self
            .graph
            .edges()
            .iter()
            .zip(&self.densities)
            .fold(Rational::zero(), |acc, (e, d)| acc + d.mass(&e.length));
        self.atoms.degree() + continuous
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty() && self.densities.iter().all(EdgeDensity::is_zero)
    }

    /// True iff every atom weight and every density value is nonnegative.
    pub fn is_positive(&self) -> bool {
        self.atoms.iter().all(|(_, w)| !w.is_negative())
            && self
                .densities
                .iter()
                .all(|d| d.values.iter().all(|v| !v.is_negative()))
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: &Rational, other: &Self, b: &Rational) -> Result<Self> {
        if self.graph != other.graph {
            return Err(Error::GraphMismatch);
        }
        let atoms = self.atoms.scaled(a).plus(&other.atoms.scaled(b));
        let densities = self
            .graph
            .edges()
            .iter()
            .zip(self.densities.iter().zip(&other.densities))
            .map(|(e, (x, y))| x.combine(a, y, b, &e.length))
            .collect();
        Ok(Self {
            graph: self.graph.clone(),
            atoms,
            densities,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(&rational::one(), other, &rational::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(&rational::one(), other, &-rational::one())
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        self.combine(factor, &Self::zero(&self.graph), &Rational::zero())
            .expect("same graph")
    }
}

pub fn total_mass(measure: &GraphMeasure) -> Rational {
    measure.total_mass()
}

/// Exact `∫ f dμ`.
pub fn integrate(f: &PiecewisePoly, measure: &GraphMeasure) -> Result<Rational> {
    if f.graph != measure.graph {
        return Err(Error::GraphMismatch);
    }
    let mut total = Rational::zero();
    for (p, w) in measure.atoms.iter() {
        total += f.eval(p) * w;
    }
    for ((edge, poly), density) in f.graph.edges().iter().zip(&f.edges).zip(&measure.densities) {
        if density.is_zero() {
            continue;
        }
        let breaks = merged_breaks(&poly.breaks, &density.breaks);
        let mut start = Rational::zero();
        for end in breaks.iter().chain(std::iter::once(&edge.length)) {
            let mid = (&start + end) / Rational::from_integer(2.into());
            let rho = density.value_at(&mid);
            if !rho.is_zero() {
                total += poly.piece_at(&mid).integral(&start, end) * rho;
            }
            start = end.clone();
        }
    }
    Ok(total)
}

pub(crate) fn merged_breaks(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out: Vec<Rational> = a.iter().chain(b).cloned().collect();
    out.sort();
    out.dedup();
    out
}

pub(crate) fn segment_midpoints<'a>(
    breaks: &'a [Rational],
    length: &'a Rational,
) -> impl Iterator<Item = Rational> + 'a {
    let two = Rational::from_integer(2.into());
    let starts = std::iter::once(Rational::zero()).chain(breaks.iter().cloned());
    let ends = breaks.iter().chain(std::iter::once(length));
    starts.zip(ends).map(move |(a, b)| (a + b) / &two)
}

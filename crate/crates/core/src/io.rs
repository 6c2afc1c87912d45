//! JSON descriptors for graphs, measures, models and solutions.
//!
//! Rationals are always written as `"p/q"` strings in lowest terms.
//!
//! Graph: `{"vertices": ["v0"], "edges": [{"from": "v0", "to": "v0", "length": "5/1"}]}`
//!
//! Measure: `{"atoms": [{"vertex": "v0", "weight": "-1/1"}, {"edge": 0, "offset": "1/2",
//! "weight": "1/1"}], "densities": [{"edge": 0, "breaks": [], "values": ["1/5"]}]}`;
//! edges without a density entry carry none.
//!
//! Points on the command line are a vertex name (`v0`) or `edge:offset`
//! (`0:3/2`).

use serde::{Deserialize, Serialize};

use crate::graph::{
    Edge, EdgeDensity, GraphDivisor, GraphMeasure, GraphPoint, MetrizedGraph, PiecewisePoly,
};
use crate::rational::{self, serde_rational, serde_rational_vec, Rational};
use crate::shilov::SpecialFiberModel;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub from: String,
    pub to: String,
    #[serde(with = "serde_rational")]
    pub length: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeEntry>,
}

impl GraphFile {
    pub fn from_graph(graph: &MetrizedGraph) -> Self {
        let names = graph.vertices();
        Self {
            vertices: names.to_vec(),
            edges: graph
                .edges()
                .iter()
                .map(|e| EdgeEntry {
                    from: names[e.from].clone(),
                    to: names[e.to].clone(),
                    length: e.length.clone(),
                })
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<MetrizedGraph> {
        let index = |name: &str| {
            self.vertices.iter().position(|v| v == name).ok_or_else(|| {
                Error::InvalidGraph(format!("edge endpoint {name:?} is not a declared vertex"))
            })
        };
        let edges = self
            .edges
            .iter()
            .map(|e| {
                Ok(Edge {
                    from: index(&e.from)?,
                    to: index(&e.to)?,
                    length: e.length.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MetrizedGraph::new(self.vertices.clone(), edges)
    }
}

pub fn parse_graph(json: &str) -> Result<MetrizedGraph> {
    let file: GraphFile = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_graph()
}

pub fn graph_to_json(graph: &MetrizedGraph) -> String {
    serde_json::to_string_pretty(&GraphFile::from_graph(graph)).expect("serializable")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<String>,
    #[serde(with = "serde_rational")]
    pub weight: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityEntry {
    pub edge: usize,
    #[serde(default, with = "serde_rational_vec")]
    pub breaks: Vec<Rational>,
    #[serde(with = "serde_rational_vec")]
    pub values: Vec<Rational>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureFile {
    #[serde(default)]
    pub atoms: Vec<AtomEntry>,
    #[serde(default)]
    pub densities: Vec<DensityEntry>,
}

impl MeasureFile {
    pub fn to_measure(&self, graph: &MetrizedGraph) -> Result<GraphMeasure> {
        let mut atoms = GraphDivisor::new();
        for a in &self.atoms {
            let point = match (&a.vertex, a.edge, &a.offset) {
                (Some(name), None, None) => vertex_point(graph, name)?,
                (None, Some(edge), Some(offset)) => graph.point(edge, rational::parse(offset)?)?,
                _ => {
                    return Err(Error::Parse(
                        "atom needs either \"vertex\" or \"edge\" with \"offset\"".into(),
                    ))
                }
            };
            atoms.add(point, a.weight.clone());
        }
        let mut densities = vec![EdgeDensity::zero(); graph.edges().len()];
        for d in &self.densities {
            let slot = densities
                .get_mut(d.edge)
                .ok_or_else(|| Error::PointOutOfRange(format!("edge {}", d.edge)))?;
            *slot = EdgeDensity::new(d.breaks.clone(), d.values.clone());
        }
        GraphMeasure::new(graph, atoms, densities)
    }

    pub fn from_measure(measure: &GraphMeasure) -> Self {
        let graph = measure.graph();
        let atoms = measure
            .atoms()
            .iter()
            .map(|(p, w)| match p {
                GraphPoint::Vertex(v) => AtomEntry {
                    vertex: Some(graph.vertices()[*v].clone()),
                    edge: None,
                    offset: None,
                    weight: w.clone(),
                },
                GraphPoint::Edge { edge, offset } => AtomEntry {
                    vertex: None,
                    edge: Some(*edge),
                    offset: Some(rational::format(offset)),
                    weight: w.clone(),
                },
            })
            .collect();
        let densities = measure
            .densities()
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(|(i, d)| DensityEntry {
                edge: i,
                breaks: d.breaks().to_vec(),
                values: d.values().to_vec(),
            })
            .collect();
        Self { atoms, densities }
    }
}

pub fn parse_measure(json: &str, graph: &MetrizedGraph) -> Result<GraphMeasure> {
    let file: MeasureFile = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_measure(graph)
}

fn vertex_point(graph: &MetrizedGraph, name: &str) -> Result<GraphPoint> {
    graph
        .vertex_index(name)
        .map(GraphPoint::Vertex)
        .ok_or_else(|| Error::PointOutOfRange(format!("unknown vertex {name:?}")))
}

/// Parses `v0` (vertex name) or `edge:offset`.
pub fn parse_point(text: &str, graph: &MetrizedGraph) -> Result<GraphPoint> {
    if let Some(v) = graph.vertex_index(text) {
        return Ok(GraphPoint::Vertex(v));
    }
    match text.split_once(':') {
        Some((edge, offset)) => {
            let edge: usize = edge
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad edge index in point {text:?}")))?;
            graph.point(edge, rational::parse(offset)?)
        }
        None => Err(Error::PointOutOfRange(format!("unknown vertex {text:?}"))),
    }
}

pub fn format_point(point: &GraphPoint, graph: &MetrizedGraph) -> String {
    match point {
        GraphPoint::Vertex(v) => graph.vertices()[*v].clone(),
        GraphPoint::Edge { edge, offset } => format!("{edge}:{}", rational::format(offset)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceEntry {
    #[serde(with = "serde_rational")]
    pub start: Rational,
    #[serde(with = "serde_rational")]
    pub end: Rational,
    #[serde(with = "serde_rational")]
    pub c2: Rational,
    #[serde(with = "serde_rational")]
    pub c1: Rational,
    #[serde(with = "serde_rational")]
    pub c0: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgePieces {
    pub edge: usize,
    pub from: String,
    pub to: String,
    #[serde(with = "serde_rational")]
    pub length: Rational,
    pub pieces: Vec<PieceEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexValue {
    pub vertex: String,
    #[serde(with = "serde_rational")]
    pub value: Rational,
}

/// Piece table of a piecewise polynomial, coefficients in the edge
/// arc-length coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceTable {
    pub vertex_values: Vec<VertexValue>,
    pub edges: Vec<EdgePieces>,
}

impl PieceTable {
    pub fn from_poly(f: &PiecewisePoly) -> Self {
        let graph = f.graph();
        let names = graph.vertices();
        Self {
            vertex_values: names
                .iter()
                .zip(f.vertex_values())
                .map(|(n, v)| VertexValue {
                    vertex: n.clone(),
                    value: v.clone(),
                })
                .collect(),
            edges: graph
                .edges()
                .iter()
                .zip(f.edges())
                .enumerate()
                .map(|(i, (e, poly))| EdgePieces {
                    edge: i,
                    from: names[e.from].clone(),
                    to: names[e.to].clone(),
                    length: e.length.clone(),
                    pieces: poly
                        .segments(&e.length)
                        .map(|(a, b, q)| PieceEntry {
                            start: a.clone(),
                            end: b.clone(),
                            c2: q.c2.clone(),
                            c1: q.c1.clone(),
                            c0: q.c0.clone(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

pub fn parse_model(json: &str) -> Result<SpecialFiberModel> {
    let model: SpecialFiberModel =
        serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    model.validate()?;
    Ok(model)
}

/// Parses `[(a1,b1),(a2,b2)]` with rational endpoints.
pub fn parse_intervals(text: &str) -> Result<Vec<(Rational, Rational)>> {
    let bad = || Error::Parse(format!("bad interval list {text:?}"));
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(bad)?
        .trim();
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut rest = inner;
    loop {
        let open = rest.strip_prefix('(').ok_or_else(bad)?;
        let close = open.find(')').ok_or_else(bad)?;
        let (a, b) = open[..close].split_once(',').ok_or_else(bad)?;
        out.push((rational::parse(a)?, rational::parse(b)?));
        rest = open[close + 1..].trim_start();
        if rest.is_empty() {
            return Ok(out);
        }
        rest = rest.strip_prefix(',').ok_or_else(bad)?.trim_start();
    }
}

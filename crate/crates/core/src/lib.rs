//! Exact potential theory on metrized reduction graphs.
//!
//! The crate models the non-archimedean side of Arakelov geometry at the
//! level of reduction graphs: Dirac measures at Shilov points built from
//! special-fiber data, the distributional Laplacian and Green functions on
//! metrized graphs, metrized line bundles of the form `O(D) ⊗ O(g)` with
//! their curvature measures, Néron–Tate local heights on Tate curves,
//! equidistribution diagnostics for torsion orbits, explicit height lower
//! bounds, and escape-rate canonical heights of polynomial maps.
//!
//! Every computation is carried out in exact rational arithmetic. Heights and
//! bounds are returned as rational coefficients of `log N_v`; floats appear
//! only as display shadows.
//!
//! ```
//! use redgraph::{bundles, rational::rat};
//!
//! let nt = bundles::neron_tate_bundle(&rat(5, 1)).unwrap();
//! let curvature = bundles::curvature(&nt).unwrap();
//! assert_eq!(curvature, redgraph::GraphMeasure::uniform(nt.graph()));
//! ```

pub mod bounds;
pub mod bundles;
pub mod canheight;
mod error;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod potential;
pub mod random;
pub mod rational;
pub mod shilov;
pub mod tate;

pub use error::{Error, Result};
pub use graph::{
    circle_graph, integrate, total_mass, EdgeDensity, EdgePoly, EdgeProfile, GraphDivisor,
    GraphMeasure, GraphPoint, MetrizedGraph, PiecewisePoly, Quadratic,
};
pub use rational::Rational;

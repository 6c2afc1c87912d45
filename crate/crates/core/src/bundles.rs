//! Metrized line bundles `O(D) ⊗ O(g)` on a reduction graph: curvature,
//! the Néron–Tate bundle of a Tate curve, height shifts under metric
//! perturbation, `Φ_P` energies, and assembly of local contributions into a
//! global height.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::graph::{
    circle_graph, integrate, EdgePoly, GraphDivisor, GraphMeasure, GraphPoint, MetrizedGraph,
    PiecewisePoly, Quadratic,
};
use crate::potential::{self, Normalization, PoissonProblem};
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// `O(D) ⊗ O(g)` restricted to the reduction graph: the specialization of
/// `D` and the metric function `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetrizedBundle {
    divisor: GraphDivisor,
    g: PiecewisePoly,
}

impl MetrizedBundle {
    pub fn new(divisor: GraphDivisor, g: PiecewisePoly) -> Result<Self> {
        for (p, w) in divisor.iter() {
            g.graph().check_point(p)?;
            if !rational::is_integer(w) {
                return Err(Error::NonIntegerDivisor(w.clone()));
            }
        }
        Ok(Self { divisor, g })
    }

    /// `O(g)` on the trivial bundle.
    pub fn trivial(g: PiecewisePoly) -> Self {
        Self {
            divisor: GraphDivisor::new(),
            g,
        }
    }

    pub fn graph(&self) -> &MetrizedGraph {
        self.g.graph()
    }

    pub fn divisor(&self) -> &GraphDivisor {
        &self.divisor
    }

    pub fn metric(&self) -> &PiecewisePoly {
        &self.g
    }

    pub fn degree(&self) -> Rational {
        self.divisor.degree()
    }

    /// `self ⊗ O(φ)`.
    pub fn twist(&self, phi: &PiecewisePoly) -> Result<Self> {
        Ok(Self {
            divisor: self.divisor.clone(),
            g: self.g.add(phi)?,
        })
    }
}

/// Residue-field cardinality `N_v` of a finite place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaceTag(u64);

impl PlaceTag {
    pub fn new(residue_cardinality: u64) -> Result<Self> {
        if residue_cardinality < 2 {
            return Err(Error::InvalidArgument(format!(
                "residue cardinality must be ≥ 2, got {residue_cardinality}"
            )));
        }
        Ok(Self(residue_cardinality))
    }

    pub fn residue_cardinality(self) -> u64 {
        self.0
    }

    pub fn log(self) -> f64 {
        (self.0 as f64).ln()
    }
}

/// `μ_D + d2(g)`.
pub fn curvature(bundle: &MetrizedBundle) -> Result<GraphMeasure> {
    let divisor = GraphMeasure::from_divisor(bundle.graph(), bundle.divisor.clone())?;
    divisor.add(&potential::d2(&bundle.g))
}

pub fn is_semipositive(bundle: &MetrizedBundle) -> Result<bool> {
    Ok(curvature(bundle)?.is_positive())
}

/// `g₀(t) = t²/2ℓ − t/2 + ℓ/12` on the circle of length `ℓ`.
pub fn g0_closed_form(ell: &Rational) -> Result<PiecewisePoly> {
    let graph = circle_graph(ell)?;
    let two = Rational::from_integer(2.into());
    let q = Quadratic::new(
        (&two * ell).recip(),
        -two.recip(),
        ell / Rational::from_integer(12.into()),
    );
    PiecewisePoly::new(&graph, vec![EdgePoly::single(q)])
}

/// `O(origin) ⊗ O(g)` on the circle of length `ℓ`, with `g` the Green
/// function of the origin against the uniform measure (which is `g₀`).
pub fn neron_tate_bundle(ell: &Rational) -> Result<MetrizedBundle> {
    let graph = circle_graph(ell)?;
    let origin = GraphPoint::Vertex(0);
    let g = potential::green(&graph, &origin, &GraphMeasure::uniform(&graph))?;
    MetrizedBundle::new(GraphDivisor::point(origin, rational::one()), g)
}

/// Change of a point height under `L ↦ L ⊗ O(φ)`, in units of `log N_v`.
pub fn height_shift_point(phi: &PiecewisePoly, point_measure: &GraphMeasure) -> Result<Rational> {
    let mass = point_measure.total_mass();
    if mass != rational::one() {
        return Err(Error::NotProbability(mass));
    }
    integrate(phi, point_measure)
}

/// Change of the variety height under `L ↦ L ⊗ O(εφ)`, in units of
/// `log N_v`: `ε∫φ c₁/deg − ε² E(φ)/(2 deg)`.
pub fn height_shift_variety(
    bundle: &MetrizedBundle,
    phi: &PiecewisePoly,
    epsilon: &Rational,
) -> Result<Rational> {
    let deg = bundle.degree();
    if !deg.is_positive() {
        return Err(Error::ZeroDegree);
    }
    let linear = integrate(phi, &curvature(bundle)?)? / &deg;
    let quadratic = potential::energy(phi) / (Rational::from_integer(2.into()) * &deg);
    Ok(epsilon * linear - epsilon * epsilon * quadratic)
}

/// Dirichlet energy of `ψ` with `d2(ψ) = δ_p − δ_q`; the local contribution
/// of `−Φ_P²` without its `log N_v` factor. Equals the effective resistance
/// between `p` and `q`.
pub fn phi_energy(graph: &MetrizedGraph, p: &GraphPoint, q: &GraphPoint) -> Result<Rational> {
    graph.check_point(p)?;
    graph.check_point(q)?;
    if p == q {
        return Ok(Rational::zero());
    }
    let target = GraphMeasure::dirac(graph, p.clone(), rational::one())?
        .sub(&GraphMeasure::dirac(graph, q.clone(), rational::one())?)?;
    let psi = potential::solve_d2(&PoissonProblem::new(
        target,
        Normalization::Point(q.clone()),
    ))?;
    Ok(potential::energy(&psi))
}

/// `(1/ℓ)∫₀^ℓ t(ℓ−t)/ℓ dt`, integrated exactly on the circle.
pub fn szpiro_ullmo_average(ell: &Rational) -> Result<Rational> {
    let graph = circle_graph(ell)?;
    // t(ℓ−t)/ℓ = −t²/ℓ + t
    let q = Quadratic::new(-ell.recip(), rational::one(), Rational::zero());
    let f = PiecewisePoly::new(&graph, vec![EdgePoly::single(q)])?;
    integrate(&f, &GraphMeasure::uniform(&graph))
}

/// `Σ_v c_v · log N_v`, kept symbolically with a float evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalHeight {
    pub terms: Vec<(Rational, PlaceTag)>,
    pub value: f64,
}

impl fmt::Display for GlobalHeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, place)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}·log {}", c, place.0)?;
        }
        Ok(())
    }
}

pub fn assemble_global(contributions: &[(Rational, PlaceTag)]) -> GlobalHeight {
    let terms: Vec<_> = contributions
        .iter()
        .filter(|(c, _)| !c.is_zero())
        .cloned()
        .collect();
    let value = terms
        .iter()
        .map(|(c, place)| rational::to_f64(c) * place.log())
        .sum();
    GlobalHeight { terms, value }
}

//! Lower bounds for the heights of point sequences whose specializations
//! avoid part of the reduction circle.
//!
//! If the limit measure of a sequence lives on a closed set `C` and `φ ≤ 0`
//! on `C`, then `liminf h(x_n) ≥ h(X) + (∫φ c₁/deg − E(φ)/(2 deg))·log N_v`.
//! The functions here evaluate that shift term exactly; the variety height
//! `h(X)` is not included.

use num_traits::{Signed, Zero};

use crate::bundles::{self, MetrizedBundle};
use crate::graph::{circle_graph, EdgePoly, PiecewisePoly, Quadratic};
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Open intervals `(a_i, b_i)` of the circle `[0, ℓ)` on which the bump is
/// supported; the closed complement is the allowed region `C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalComplement {
    ell: Rational,
    intervals: Vec<(Rational, Rational)>,
}

impl IntervalComplement {
    /// Requires `0 ≤ a₁ < b₁ ≤ a₂ < … < b_t ≤ ℓ`.
    pub fn new(ell: Rational, intervals: Vec<(Rational, Rational)>) -> Result<Self> {
        if !ell.is_positive() {
            return Err(Error::InvalidLength(ell));
        }
        let mut floor = Rational::zero();
        for (i, (a, b)) in intervals.iter().enumerate() {
            if *a < floor || a >= b || *b > ell {
                return Err(Error::InvalidIntervals(format!(
                    "interval {} ({}, {}) breaks 0 ≤ a₁ < b₁ ≤ … ≤ ℓ = {}",
                    i + 1,
                    rational::format(a),
                    rational::format(b),
                    rational::format(&ell)
                )));
            }
            floor = b.clone();
        }
        Ok(Self { ell, intervals })
    }

    /// Points forced through the neutral component: `(0, ℓ)`.
    pub fn neutral(ell: Rational) -> Result<Self> {
        let intervals = vec![(Rational::zero(), ell.clone())];
        Self::new(ell, intervals)
    }

    /// Integral points of the Néron model: the unit intervals `(i−1, i)`
    /// for integer `ℓ`.
    pub fn neron(ell: Rational) -> Result<Self> {
        if !rational::is_integer(&ell) {
            return Err(Error::InvalidIntervals(format!(
                "Néron preset needs an integer length, got {}",
                rational::format(&ell)
            )));
        }
        let count: u64 = ell
            .to_integer()
            .try_into()
            .map_err(|_| Error::InvalidIntervals("length too large".into()))?;
        let intervals = (0..count)
            .map(|i| (rational::int(i as i64), rational::int(i as i64 + 1)))
            .collect();
        Self::new(ell, intervals)
    }

    /// Points avoiding one singular point: the single interval `(0, 1)`.
    pub fn avoid_point(ell: Rational) -> Result<Self> {
        Self::new(ell, vec![(Rational::zero(), rational::one())])
    }

    pub fn ell(&self) -> &Rational {
        &self.ell
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }
}

/// Interval data plus the bump coefficients `c_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BumpSpec {
    complement: IntervalComplement,
    coefficients: Vec<Rational>,
}

impl BumpSpec {
    pub fn new(complement: IntervalComplement, coefficients: Vec<Rational>) -> Result<Self> {
        if coefficients.len() != complement.intervals.len() {
            return Err(Error::InvalidIntervals(format!(
                "{} coefficients for {} intervals",
                coefficients.len(),
                complement.intervals.len()
            )));
        }
        Ok(Self {
            complement,
            coefficients,
        })
    }

    /// Every coefficient set to the optimum `1/(2ℓ)`.
    pub fn with_optimal_coefficients(complement: IntervalComplement) -> Self {
        let c = (Rational::from_integer(2.into()) * &complement.ell).recip();
        let coefficients = vec![c; complement.intervals.len()];
        Self {
            complement,
            coefficients,
        }
    }

    pub fn complement(&self) -> &IntervalComplement {
        &self.complement
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }
}

/// `φ(t) = c_i(t − a_i)(b_i − t)` on each interval, zero elsewhere.
pub fn optimal_bump(spec: &BumpSpec) -> Result<PiecewisePoly> {
    let ell = &spec.complement.ell;
    let graph = circle_graph(ell)?;
    let mut breaks = Vec::new();
    let mut pieces = vec![Quadratic::default()];
    for ((a, b), c) in spec.complement.intervals.iter().zip(&spec.coefficients) {
        let q = Quadratic::new(-c.clone(), c * (a + b), -(c * a * b));
        if a.is_zero() {
            // replaces the leading zero piece
            pieces.pop();
        } else if breaks.last() != Some(a) {
            breaks.push(a.clone());
        } else {
            // touching the previous interval: its trailing zero piece goes
            pieces.pop();
        }
        pieces.push(q);
        if b < ell {
            breaks.push(b.clone());
            pieces.push(Quadratic::default());
        }
    }
    PiecewisePoly::new(&graph, vec![EdgePoly::new(breaks, pieces)])
}

/// `∫φ c₁/deg − E(φ)/(2 deg)` for `φ` on the bundle's graph.
pub fn lower_bound(bundle: &MetrizedBundle, phi: &PiecewisePoly) -> Result<Rational> {
    bundles::height_shift_variety(bundle, phi, &rational::one())
}

/// `Σ (b_i − a_i)³ / (24ℓ²)`: the Néron–Tate bound with `c_i = 1/(2ℓ)`.
pub fn closed_form_bound(complement: &IntervalComplement) -> Rational {
    let ell = &complement.ell;
    let cubes = complement
        .intervals
        .iter()
        .map(|(a, b)| {
            let d = b - a;
            &d * &d * &d
        })
        .fold(Rational::zero(), |acc, x| acc + x);
    cubes / (Rational::from_integer(24.into()) * ell * ell)
}

/// Per-interval contribution `(b−a)³ c(1 − ℓc)/(6ℓ)` of a bump with
/// coefficient `c` against the Néron–Tate bundle.
pub fn interval_contribution(width: &Rational, ell: &Rational, c: &Rational) -> Rational {
    width * width * width * c * (rational::one() - ell * c)
        / (Rational::from_integer(6.into()) * ell)
}

/// Maximizer `c* = 1/(2ℓ)` of `c(1 − ℓc)` and the attained value `1/(4ℓ)`.
/// The optimum does not depend on the interval width.
pub fn optimize_coefficient(width: &Rational, ell: &Rational) -> Result<(Rational, Rational)> {
    if !width.is_positive() {
        return Err(Error::InvalidLength(width.clone()));
    }
    if !ell.is_positive() {
        return Err(Error::InvalidLength(ell.clone()));
    }
    let c = (Rational::from_integer(2.into()) * ell).recip();
    let value = &c * (rational::one() - ell * &c);
    Ok((c, value))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Neutral,
    Neron,
    Point,
}

impl Preset {
    pub fn complement(self, ell: Rational) -> Result<IntervalComplement> {
        match self {
            Preset::Neutral => IntervalComplement::neutral(ell),
            Preset::Neron => IntervalComplement::neron(ell),
            Preset::Point => IntervalComplement::avoid_point(ell),
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neutral" => Ok(Preset::Neutral),
            "neron" => Ok(Preset::Neron),
            "point" => Ok(Preset::Point),
            other => Err(Error::Parse(format!("unknown preset {other:?}"))),
        }
    }
}

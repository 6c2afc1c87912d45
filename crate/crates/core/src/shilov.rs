//! Measures supported on Shilov points, built from special-fiber data of a
//! model: components with multiplicities, bundle exponents and the
//! intersection numbers of the reduced bundles with each component.
//!
//! Intersection numbers are inputs; labels are opaque names for the Shilov
//! points `ξ_j`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, serde_rational, Rational};
use crate::{Error, Result};

/// A component `X_j` of the special fiber.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub label: String,
    #[serde(rename = "mult")]
    pub multiplicity: u64,
    /// `(c₁(L₁)⋯c₁(L_d) | X_j)` for the reduced model bundles.
    #[serde(with = "serde_rational")]
    pub deg: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialFiberModel {
    pub components: Vec<Component>,
    /// `e_i` such that the model bundle extends `L_i^{e_i}`.
    pub exponents: Vec<u64>,
    /// `(c₁(L₁)⋯c₁(L_d) | X)` on the generic fiber.
    #[serde(with = "serde_rational")]
    pub total_degree: Rational,
}

impl SpecialFiberModel {
    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::Inconsistent("model has no components".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.components {
            if c.multiplicity == 0 {
                return Err(Error::Inconsistent(format!(
                    "component {:?} has multiplicity 0",
                    c.label
                )));
            }
            if !seen.insert(c.label.as_str()) {
                return Err(Error::Inconsistent(format!(
                    "duplicate label {:?}",
                    c.label
                )));
            }
        }
        if self.exponents.contains(&0) {
            return Err(Error::Inconsistent("exponents must be ≥ 1".into()));
        }
        Ok(())
    }

    pub fn exponent_product(&self) -> BigInt {
        self.exponents.iter().map(|&e| BigInt::from(e)).product()
    }

    /// `Σ ν_j deg_j`, the special-fiber degree of the model bundles.
    pub fn fiber_degree(&self) -> Rational {
        self.components.iter().fold(Rational::zero(), |acc, c| {
            acc + Rational::from_integer(c.multiplicity.into()) * &c.deg
        })
    }
}

/// Finitely supported measure on labelled points, zero weights omitted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DiscreteMeasure {
    weights: BTreeMap<String, Rational>,
}

impl DiscreteMeasure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, label: impl Into<String>, weight: Rational) {
        let label = label.into();
        let total = self.weights.remove(&label).unwrap_or_else(Rational::zero) + weight;
        if !total.is_zero() {
            self.weights.insert(label, total);
        }
    }

    pub fn weight(&self, label: &str) -> Rational {
        self.weights
            .get(label)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.weights.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_mass(&self) -> Rational {
        self.weights
            .values()
            .fold(Rational::zero(), |acc, w| acc + w)
    }

    pub fn is_positive(&self) -> bool {
        self.weights.values().all(|w| !w.is_negative())
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        let mut out = Self::new();
        for (k, w) in &self.weights {
            out.add(k.clone(), w * factor);
        }
        out
    }
}

impl FromIterator<(String, Rational)> for DiscreteMeasure {
    fn from_iter<I: IntoIterator<Item = (String, Rational)>>(iter: I) -> Self {
        let mut m = Self::new();
        for (k, w) in iter {
            m.add(k, w);
        }
        m
    }
}

/// Weights `ν_j·deg_j / Π e_i` at the Shilov points; total mass must match
/// the declared generic degree.
pub fn shilov_measure(model: &SpecialFiberModel) -> Result<DiscreteMeasure> {
    let measure = unchecked_measure(model)?;
    let mass = measure.total_mass();
    if mass != model.total_degree {
        return Err(Error::Inconsistent(format!(
            "total mass {} differs from declared degree {}",
            rational::format(&mass),
            rational::format(&model.total_degree)
        )));
    }
    Ok(measure)
}

fn unchecked_measure(model: &SpecialFiberModel) -> Result<DiscreteMeasure> {
    model.validate()?;
    let scale = Rational::from_integer(model.exponent_product()).recip();
    Ok(model
        .components
        .iter()
        .map(|c| {
            (
                c.label.clone(),
                Rational::from_integer(c.multiplicity.into()) * &c.deg * &scale,
            )
        })
        .collect())
}

/// The Shilov measure rescaled to total mass 1.
pub fn normalized_measure(model: &SpecialFiberModel) -> Result<DiscreteMeasure> {
    if model.total_degree.is_zero() {
        return Err(Error::ZeroDegree);
    }
    let measure = shilov_measure(model)?;
    Ok(measure.scaled(&model.total_degree.recip()))
}

/// Image measure under a generically finite map of degree `map_degree`
/// whose action on Shilov points is `relabel`. Labels sharing an image have
/// their weights summed.
pub fn pushforward(
    measure: &DiscreteMeasure,
    map_degree: u64,
    relabel: &BTreeMap<String, String>,
) -> Result<DiscreteMeasure> {
    if map_degree == 0 {
        return Err(Error::InvalidArgument("map degree must be positive".into()));
    }
    let factor = Rational::from_integer(map_degree.into());
    let mut out = DiscreteMeasure::new();
    for (label, w) in measure.iter() {
        let image = relabel
            .get(label)
            .ok_or_else(|| Error::MissingLabel(label.to_string()))?;
        out.add(image.clone(), w * &factor);
    }
    Ok(out)
}

/// Product measure on pairs with the binomial weight `C(d+e, d)`; labels are
/// rendered as `"(ξ,η)"`.
pub fn product_measure(
    left: &DiscreteMeasure,
    left_dim: u64,
    right: &DiscreteMeasure,
    right_dim: u64,
) -> DiscreteMeasure {
    let binom = Rational::from_integer(rational::binomial(left_dim + right_dim, left_dim));
    let mut out = DiscreteMeasure::new();
    for (xi, a) in left.iter() {
        for (eta, b) in right.iter() {
            out.add(format!("({xi},{eta})"), &binom * a * b);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn model(
        parts: &[(&str, u64, Rational)],
        exponents: &[u64],
        total: Rational,
    ) -> SpecialFiberModel {
        SpecialFiberModel {
            components: parts
                .iter()
                .map(|(l, m, d)| Component {
                    label: l.to_string(),
                    multiplicity: *m,
                    deg: d.clone(),
                })
                .collect(),
            exponents: exponents.to_vec(),
            total_degree: total,
        }
    }

    #[test]
    fn single_component() {
        let m = model(&[("xi", 1, rat(7, 2))], &[1], rat(7, 2));
        let mu = shilov_measure(&m).unwrap();
        assert_eq!(mu.weight("xi"), rat(7, 2));
        assert_eq!(mu.len(), 1);
    }

    #[test]
    fn gauss_point() {
        // P^d with O(1) and good reduction: the Gauss point carries mass 1.
        let m = model(&[("gauss", 1, int(1))], &[1], int(1));
        let mu = shilov_measure(&m).unwrap();
        assert_eq!(mu.weight("gauss"), int(1));
        assert_eq!(normalized_measure(&m).unwrap(), mu);
    }

    #[test]
    fn two_components() {
        let m = model(&[("X1", 1, int(3)), ("X2", 2, int(1))], &[1], int(5));
        let mu = shilov_measure(&m).unwrap();
        assert_eq!(mu.weight("X1"), int(3));
        assert_eq!(mu.weight("X2"), int(2));
        assert_eq!(mu.total_mass(), int(5));
        let nu = normalized_measure(&m).unwrap();
        assert_eq!(nu.weight("X1"), rat(3, 5));
        assert_eq!(nu.weight("X2"), rat(2, 5));
    }

    #[test]
    fn exponents_divide() {
        // model of L^2 ⊗ L^3 on a surface: fiber degree 6·deg
        let m = model(&[("a", 1, int(6)), ("b", 3, int(4))], &[2, 3], int(3));
        let mu = shilov_measure(&m).unwrap();
        assert_eq!(mu.weight("a"), int(1));
        assert_eq!(mu.weight("b"), int(2));
        assert_eq!(
            mu.total_mass() * Rational::from_integer(m.exponent_product()),
            m.fiber_degree()
        );
    }

    #[test]
    fn inconsistent_degree() {
        let m = model(&[("a", 1, int(2))], &[1], int(3));
        assert!(matches!(shilov_measure(&m), Err(Error::Inconsistent(_))));
        let zero = model(&[("a", 1, int(0))], &[1], int(0));
        assert_eq!(normalized_measure(&zero), Err(Error::ZeroDegree));
        let bad = model(&[("a", 0, int(0))], &[1], int(0));
        assert!(shilov_measure(&bad).is_err());
        let dup = model(&[("a", 1, int(1)), ("a", 1, int(1))], &[1], int(2));
        assert!(shilov_measure(&dup).is_err());
    }

    #[test]
    fn pushforward_laws() {
        let mu: DiscreteMeasure = [("x".to_string(), int(2)), ("y".to_string(), int(1))]
            .into_iter()
            .collect();
        let identity: BTreeMap<_, _> = [("x", "x"), ("y", "y")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(pushforward(&mu, 1, &identity).unwrap(), mu);
        let single: DiscreteMeasure = [("x".to_string(), int(2))].into_iter().collect();
        assert_eq!(
            pushforward(&single, 3, &identity).unwrap().weight("x"),
            int(6)
        );
        let merge: BTreeMap<_, _> = [("x", "z"), ("y", "z")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let merged = pushforward(&mu, 1, &merge).unwrap();
        assert_eq!(merged.weight("z"), int(3));
        assert_eq!(merged.len(), 1);
        let partial: BTreeMap<_, _> = [("x".to_string(), "x".to_string())].into_iter().collect();
        assert_eq!(
            pushforward(&mu, 1, &partial),
            Err(Error::MissingLabel("y".into()))
        );
    }

    #[test]
    fn product_binomials() {
        let unit: DiscreteMeasure = [("p".to_string(), int(1))].into_iter().collect();
        let other: DiscreteMeasure = [("q".to_string(), int(1))].into_iter().collect();
        assert_eq!(product_measure(&unit, 1, &other, 1).weight("(p,q)"), int(2));
        assert_eq!(product_measure(&unit, 2, &other, 1).weight("(p,q)"), int(3));
        let a: DiscreteMeasure = [("p".to_string(), int(5))].into_iter().collect();
        assert_eq!(product_measure(&a, 0, &other, 4).weight("(p,q)"), int(5));
    }
}

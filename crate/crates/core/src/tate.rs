//! Tate-curve specialization, torsion orbits, empirical measures on the
//! reduction circle and equidistribution diagnostics.
//!
//! A point `u ∈ C_p^*/q^Z` specializes to `v(u) mod ℓ` on the circle of
//! length `ℓ = v(q)`. The `n`-torsion points are `ζ_n^a q^{b/n}`, so their
//! specializations are `bℓ/n`, each hit `n` times.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{self, BumpSpec, IntervalComplement};
use crate::bundles::{self, PlaceTag};
use crate::graph::{
    circle_graph, integrate, GraphDivisor, GraphMeasure, GraphPoint, MetrizedGraph, PiecewisePoly,
};
use crate::rational::{self, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TateCurve {
    ell: Rational,
    place: PlaceTag,
    circle: MetrizedGraph,
}

impl TateCurve {
    /// `ell = v(q) = v(Δ)`, the length of the reduction circle.
    pub fn new(ell: Rational, place: PlaceTag) -> Result<Self> {
        let circle = circle_graph(&ell)?;
        Ok(Self { ell, place, circle })
    }

    pub fn ell(&self) -> &Rational {
        &self.ell
    }

    pub fn place(&self) -> PlaceTag {
        self.place
    }

    pub fn circle(&self) -> &MetrizedGraph {
        &self.circle
    }

    /// Graph point at circle coordinate `t`, reduced mod `ℓ`.
    pub fn point_at(&self, t: &Rational) -> GraphPoint {
        self.circle
            .point(0, rational::rem_euclid(t, &self.ell))
            .expect("reduced coordinate lies on the circle")
    }
}

/// Circle coordinate of a point with valuation `valuation`.
pub fn specialize(curve: &TateCurve, valuation: &Rational) -> Rational {
    rational::rem_euclid(valuation, &curve.ell)
}

/// Multiset of circle coordinates in `[0, ℓ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSample {
    counts: BTreeMap<Rational, u64>,
}

impl OrbitSample {
    pub fn new(points: impl IntoIterator<Item = (Rational, u64)>, ell: &Rational) -> Result<Self> {
        let mut counts = BTreeMap::new();
        for (t, k) in points {
            if t.is_negative() || t >= *ell {
                return Err(Error::PointOutOfRange(format!(
                    "coordinate {} outside [0, {})",
                    rational::format(&t),
                    rational::format(ell)
                )));
            }
            if k > 0 {
                *counts.entry(t).or_insert(0) += k;
            }
        }
        if counts.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(Self { counts })
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Rational, u64)> {
        self.counts.iter().map(|(t, k)| (t, *k))
    }

    pub fn multiplicity(&self, t: &Rational) -> u64 {
        self.counts.get(t).copied().unwrap_or(0)
    }
}

/// Specializations of the full `n`-torsion, optionally dropping the
/// identity point itself (the rest of its fiber stays).
pub fn torsion_specializations(
    curve: &TateCurve,
    n: u64,
    exclude_identity: bool,
) -> Result<OrbitSample> {
    if n == 0 {
        return Err(Error::InvalidArgument("torsion order must be ≥ 1".into()));
    }
    let points = (0..n).map(|b| {
        let t = &curve.ell * Rational::new(b.into(), n.into());
        let k = if b == 0 && exclude_identity { n - 1 } else { n };
        (t, k)
    });
    OrbitSample::new(points, &curve.ell)
}

/// Probability measure with atom `multiplicity/total` at each coordinate.
pub fn empirical_measure(curve: &TateCurve, sample: &OrbitSample) -> Result<GraphMeasure> {
    let total = Rational::from_integer(sample.total().into());
    let mut atoms = GraphDivisor::new();
    for (t, k) in sample.iter() {
        atoms.add(curve.point_at(t), Rational::from_integer(k.into()) / &total);
    }
    GraphMeasure::from_divisor(&curve.circle, atoms)
}

/// Cumulative difference `D(t) = (μ − ν)([0, t])` on a circle, sampled at
/// every event point as `(t, D(t−), D(t))`. The final entry is `ℓ` with its
/// left limit.
fn cumulative_difference(
    mu: &GraphMeasure,
    nu: &GraphMeasure,
) -> Result<Vec<(Rational, Rational, Rational)>> {
    let graph = mu.graph();
    if !graph.is_circle() {
        return Err(Error::NotCircle);
    }
    if nu.graph() != graph {
        return Err(Error::GraphMismatch);
    }
    let ell = graph.edge(0).length.clone();
    let diff = mu.sub(nu)?;
    let coordinate = |p: &GraphPoint| match p {
        GraphPoint::Vertex(_) => Rational::zero(),
        GraphPoint::Edge { offset, .. } => offset.clone(),
    };
    let mut events: Vec<Rational> = vec![Rational::zero(), ell.clone()];
    events.extend(diff.atoms().iter().map(|(p, _)| coordinate(p)));
    events.extend(diff.densities()[0].breaks().iter().cloned());
    events.sort();
    events.dedup();

    let density = &diff.densities()[0];
    let two = Rational::from_integer(2.into());
    let mut out = Vec::with_capacity(events.len());
    let mut running = Rational::zero();
    let mut prev: Option<Rational> = None;
    for t in events {
        if let Some(s) = &prev {
            let mid = (s + &t) / &two;
            running += density.value_at(&mid) * (&t - s);
        }
        let left = running.clone();
        if t != ell {
            let point = graph.point(0, t.clone())?;
            running += diff.atoms().coefficient(&point);
        }
        out.push((t.clone(), left, running.clone()));
        prev = Some(t);
    }
    Ok(out)
}

/// `sup_t |F_μ(t) − F_ν(t)|` with CDFs taken from the origin.
pub fn ks_between(mu: &GraphMeasure, nu: &GraphMeasure) -> Result<Rational> {
    Ok(cumulative_difference(mu, nu)?
        .into_iter()
        .flat_map(|(_, left, right)| [left.abs(), right.abs()])
        .fold(Rational::zero(), |acc, v| if v > acc { v } else { acc }))
}

/// Kolmogorov distance to the uniform measure on the circle.
pub fn kolmogorov_distance(mu: &GraphMeasure) -> Result<Rational> {
    ks_between(mu, &GraphMeasure::uniform(mu.graph()))
}

/// Wasserstein-1 distance on the circle, `min_α ∫ |F_μ − F_ν − α| dt`,
/// evaluated in floating point.
pub fn wasserstein1(mu: &GraphMeasure, nu: &GraphMeasure) -> Result<f64> {
    let samples = cumulative_difference(mu, nu)?;
    // linear pieces (length, start value, end value)
    let pieces: Vec<(f64, f64, f64)> = samples
        .windows(2)
        .map(|w| {
            (
                rational::to_f64(&(&w[1].0 - &w[0].0)),
                rational::to_f64(&w[0].2),
                rational::to_f64(&w[1].1),
            )
        })
        .collect();
    let cost = |alpha: f64| -> f64 {
        pieces
            .iter()
            .map(|&(h, a, b)| {
                let (a, b) = (a - alpha, b - alpha);
                if a * b >= 0.0 {
                    h * (a + b).abs() / 2.0
                } else {
                    h * (a * a + b * b) / (2.0 * (a.abs() + b.abs()))
                }
            })
            .sum()
    };
    let (mut lo, mut hi) = pieces
        .iter()
        .flat_map(|&(_, a, b)| [a, b])
        .fold((0.0f64, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    // cost is convex in α
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let m1 = hi - ratio * (hi - lo);
        let m2 = lo + ratio * (hi - lo);
        if cost(m1) <= cost(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    Ok(cost((lo + hi) / 2.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub n: u64,
    pub count: u64,
    pub ks: Rational,
    /// `|∫φ dμ_n − ∫φ d(uniform)|` per test function.
    pub errors: Vec<Rational>,
    pub wasserstein: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub test_names: Vec<String>,
    pub rows: Vec<ReportRow>,
}

/// One row per sample: KS distance, Wasserstein-1 shadow, and integration
/// error of each test function against the invariant measure. Rows are
/// computed in parallel and returned in input order.
pub fn weak_convergence_report(
    curve: &TateCurve,
    samples: &[(u64, OrbitSample)],
    tests: &[(String, PiecewisePoly)],
) -> Result<Report> {
    let uniform = GraphMeasure::uniform(&curve.circle);
    let targets = tests
        .iter()
        .map(|(_, phi)| integrate(phi, &uniform))
        .collect::<Result<Vec<_>>>()?;
    let rows = samples
        .par_iter()
        .map(|(n, sample)| {
            let mu = empirical_measure(curve, sample)?;
            let errors = tests
                .iter()
                .zip(&targets)
                .map(|((_, phi), target)| Ok((integrate(phi, &mu)? - target).abs()))
                .collect::<Result<Vec<_>>>()?;
            Ok(ReportRow {
                n: *n,
                count: sample.total(),
                ks: ks_between(&mu, &uniform)?,
                errors,
                wasserstein: wasserstein1(&mu, &uniform)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report {
        test_names: tests.iter().map(|(name, _)| name.clone()).collect(),
        rows,
    })
}

impl Report {
    /// CSV with columns `n, count, ks_num, ks_den, ks_float`, then
    /// `err_<name>` (exact) and `err_<name>_float` per test function, then
    /// `w1_float`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,count,ks_num,ks_den,ks_float");
        for name in &self.test_names {
            let _ = write!(out, ",err_{name},err_{name}_float");
        }
        out.push_str(",w1_float\n");
        for row in &self.rows {
            let _ = write!(
                out,
                "{},{},{},{},{}",
                row.n,
                row.count,
                row.ks.numer(),
                row.ks.denom(),
                rational::to_f64(&row.ks)
            );
            for e in &row.errors {
                let _ = write!(out, ",{},{}", rational::format(e), rational::to_f64(e));
            }
            let _ = writeln!(out, ",{}", row.wasserstein);
        }
        out
    }
}

/// Runs the torsion experiment for `n = first..=max_n` with `g₀` and the
/// given extra test functions.
pub fn torsion_report(
    curve: &TateCurve,
    max_n: u64,
    exclude_identity: bool,
    extra_tests: Vec<(String, PiecewisePoly)>,
) -> Result<Report> {
    let first = if exclude_identity { 2 } else { 1 };
    let samples = (first..=max_n)
        .map(|n| Ok((n, torsion_specializations(curve, n, exclude_identity)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut tests = vec![("g0".to_string(), bundles::g0_closed_form(&curve.ell)?)];
    tests.extend(extra_tests);
    weak_convergence_report(curve, &samples, &tests)
}

/// Number of grid steps used to place random bump endpoints.
pub const BUMP_GRID: i64 = 64;

/// Deterministic random bump test functions.
///
/// A ChaCha8 generator seeded with `seed` draws, for each bump, two distinct
/// integers `0 ≤ i < j ≤ 64` and a multiplier `k ∈ {1, 2, 3, 4}`; the bump
/// lives on `(iℓ/64, jℓ/64)` with coefficient `k/(4ℓ)`.
pub fn seeded_bumps(
    curve: &TateCurve,
    seed: u64,
    count: usize,
) -> Result<Vec<(String, PiecewisePoly)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (1..=count)
        .map(|idx| {
            let i = rng.random_range(0..BUMP_GRID);
            let j = rng.random_range(i + 1..=BUMP_GRID);
            let k = rng.random_range(1..=4i64);
            let a = &curve.ell * rational::rat(i, BUMP_GRID);
            let b = &curve.ell * rational::rat(j, BUMP_GRID);
            let c = rational::rat(k, 4) / &curve.ell;
            let complement = IntervalComplement::new(curve.ell.clone(), vec![(a, b)])?;
            let phi = bounds::optimal_bump(&BumpSpec::new(complement, vec![c])?)?;
            Ok((format!("bump{idx}"), phi))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn curve(ell: Rational) -> TateCurve {
        TateCurve::new(ell, PlaceTag::new(2).unwrap()).unwrap()
    }

    #[test]
    fn specialization_mod_ell() {
        let c = curve(int(5));
        assert_eq!(specialize(&c, &int(0)), int(0));
        assert_eq!(specialize(&c, &int(7)), int(2));
        assert_eq!(specialize(&c, &int(-1)), int(4));
        assert_eq!(specialize(&c, &rat(12, 1)), specialize(&c, &int(7)));
    }

    #[test]
    fn torsion_multisets() {
        let c = curve(int(5));
        let one = torsion_specializations(&c, 1, false).unwrap();
        assert_eq!(one.total(), 1);
        assert_eq!(one.multiplicity(&int(0)), 1);
        let two = torsion_specializations(&c, 2, false).unwrap();
        assert_eq!(two.multiplicity(&int(0)), 2);
        assert_eq!(two.multiplicity(&rat(5, 2)), 2);
        assert_eq!(two.total(), 4);
        let three = torsion_specializations(&c, 3, false).unwrap();
        for b in 0..3 {
            assert_eq!(three.multiplicity(&rat(5 * b, 3)), 3);
        }
        assert!(torsion_specializations(&c, 0, false).is_err());
        assert_eq!(
            torsion_specializations(&c, 1, true),
            Err(Error::EmptySample)
        );
        let excl = torsion_specializations(&c, 3, true).unwrap();
        assert_eq!(excl.multiplicity(&int(0)), 2);
        assert_eq!(excl.total(), 8);
    }

    #[test]
    fn empirical_measures() {
        let c = curve(int(5));
        let two = torsion_specializations(&c, 2, false).unwrap();
        let mu = empirical_measure(&c, &two).unwrap();
        assert_eq!(mu.total_mass(), int(1));
        assert_eq!(mu.atoms().coefficient(&GraphPoint::Vertex(0)), rat(1, 2));
        assert_eq!(mu.atoms().coefficient(&c.point_at(&rat(5, 2))), rat(1, 2));
        let single = OrbitSample::new([(int(3), 4)], c.ell()).unwrap();
        let delta = empirical_measure(&c, &single).unwrap();
        assert_eq!(
            delta,
            GraphMeasure::dirac(c.circle(), c.point_at(&int(3)), int(1)).unwrap()
        );
        assert_eq!(
            OrbitSample::new(Vec::new(), c.ell()),
            Err(Error::EmptySample)
        );
        assert!(OrbitSample::new([(int(5), 1)], c.ell()).is_err());
    }

    #[test]
    fn ks_examples() {
        let c = curve(rat(7, 2));
        let uniform = GraphMeasure::uniform(c.circle());
        assert_eq!(kolmogorov_distance(&uniform).unwrap(), int(0));
        let delta = GraphMeasure::dirac(c.circle(), GraphPoint::Vertex(0), int(1)).unwrap();
        assert_eq!(kolmogorov_distance(&delta).unwrap(), int(1));
        for n in 1..8 {
            let mu =
                empirical_measure(&c, &torsion_specializations(&c, n, false).unwrap()).unwrap();
            assert_eq!(kolmogorov_distance(&mu).unwrap(), rat(1, n as i64));
        }
        let path = crate::graph::path_graph(&int(1)).unwrap();
        assert_eq!(
            kolmogorov_distance(&GraphMeasure::uniform(&path)),
            Err(Error::NotCircle)
        );
    }

    #[test]
    fn ks_with_density_breaks() {
        // density 2/ℓ on the first half of the circle, nothing on the second
        let ell = int(4);
        let c = curve(ell.clone());
        let mu = GraphMeasure::new(
            c.circle(),
            GraphDivisor::new(),
            vec![crate::graph::EdgeDensity::new(
                vec![int(2)],
                vec![rat(1, 2), int(0)],
            )],
        )
        .unwrap();
        assert_eq!(kolmogorov_distance(&mu).unwrap(), rat(1, 2));
    }

    #[test]
    fn wasserstein_examples() {
        let c = curve(int(1));
        let uniform = GraphMeasure::uniform(c.circle());
        assert!(wasserstein1(&uniform, &uniform).unwrap().abs() < 1e-12);
        let delta = GraphMeasure::dirac(c.circle(), GraphPoint::Vertex(0), int(1)).unwrap();
        // mean distance to a point on the unit circle is 1/4
        assert!((wasserstein1(&delta, &uniform).unwrap() - 0.25).abs() < 1e-9);
        let other = GraphMeasure::dirac(c.circle(), c.point_at(&rat(3, 10)), int(1)).unwrap();
        assert!((wasserstein1(&delta, &other).unwrap() - 0.3).abs() < 1e-9);
    }

    #[test]
    fn report_rows() {
        let ell = int(3);
        let c = curve(ell.clone());
        let constant = PiecewisePoly::constant(c.circle(), int(7));
        let report = torsion_report(&c, 6, false, vec![("const".into(), constant)]).unwrap();
        assert_eq!(report.rows.len(), 6);
        for row in &report.rows {
            let n = row.n as i64;
            assert_eq!(row.count, row.n * row.n);
            assert_eq!(row.ks, rat(1, n));
            // mean of g₀ over the grid is ℓ/(12 n²)
            assert_eq!(row.errors[0], &ell / int(12 * n * n));
            assert!(row.errors[0] <= &ell / int(8 * n));
            assert_eq!(row.errors[1], int(0));
        }
        let csv = report.to_csv();
        assert!(csv.starts_with("n,count,ks_num,ks_den,ks_float,err_g0,err_g0_float,err_const,err_const_float,w1_float\n"));
        assert!(csv
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("1,1,1,1,1,1/4,0.25,0/1,0,"));
    }

    #[test]
    fn concentrated_sequence_does_not_converge() {
        let c = curve(int(2));
        let samples: Vec<_> = (1..5)
            .map(|n| (n, OrbitSample::new([(int(0), n * n)], c.ell()).unwrap()))
            .collect();
        let report = weak_convergence_report(&c, &samples, &[]).unwrap();
        assert!(report.rows.iter().all(|r| r.ks == int(1)));
    }

    #[test]
    fn seeded_bumps_are_deterministic() {
        let c = curve(rat(5, 3));
        let a = seeded_bumps(&c, 7, 3).unwrap();
        let b = seeded_bumps(&c, 7, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, seeded_bumps(&c, 8, 3).unwrap());
    }
}

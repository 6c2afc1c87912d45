//! Canonical local heights of polynomial maps at a finite place, via the
//! escape rate `λ(x) = lim b^{−n} max(0, −v_p(fⁿ(x)))`.
//!
//! Once an iterate `y` satisfies `v_p(y) < E` the leading term dominates
//! forever, `v_p(f(y)) = v_p(a_b) + b·v_p(y)`, and the limit has the closed
//! form `b^{−n}(v* − v_p(y))` with `v* = −v_p(a_b)/(b−1)`. Conversely, once
//! an iterate lands in a disc `{v_p ≥ L}` mapped into itself, the height
//! is zero. Either event certifies the result.

use num_traits::{One, Zero};

use crate::rational::{self, Rational};
use crate::{Error, Result};

/// `f(x) = Σ a_i x^i` of degree `b ≥ 2` over the rationals, at the prime `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMap {
    /// Coefficients from the leading term down to the constant term.
    coefficients: Vec<Rational>,
    prime: u64,
}

/// Escape-rate value in units of `log p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalHeightValue {
    pub value: Rational,
    pub converged: bool,
    pub iterations: u32,
}

fn is_prime(n: u64) -> bool {
    n >= 2
        && (2..)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

fn ceil_div(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

impl PolyMap {
    pub fn new(coefficients: Vec<Rational>, prime: u64) -> Result<Self> {
        if !is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
        if coefficients.len() < 3 {
            return Err(Error::InvalidPolynomial("degree must be at least 2".into()));
        }
        if coefficients[0].is_zero() {
            return Err(Error::InvalidPolynomial(
                "leading coefficient is zero".into(),
            ));
        }
        Ok(Self {
            coefficients,
            prime,
        })
    }

    pub fn degree(&self) -> u32 {
        (self.coefficients.len() - 1) as u32
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coefficients
            .iter()
            .fold(Rational::zero(), |acc, a| acc * x + a)
    }

    /// `(power, v_p(a_power))` for nonzero coefficients.
    fn valuations(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let b = self.degree() as i64;
        self.coefficients
            .iter()
            .enumerate()
            .filter_map(move |(k, a)| rational::valuation(a, self.prime).map(|v| (b - k as i64, v)))
    }

    fn leading_valuation(&self) -> i64 {
        rational::valuation(&self.coefficients[0], self.prime).expect("nonzero leading coefficient")
    }

    /// `v*`, the repelling fixed valuation of `v ↦ v(a_b) + b·v`.
    fn fixed_valuation(&self) -> Rational {
        let b = self.degree() as i64;
        rational::rat(-self.leading_valuation(), b - 1)
    }

    /// Escape threshold `E`: for `v_p(y) < E` the leading term strictly
    /// dominates and the iterate's valuation keeps decreasing.
    fn escape_threshold(&self) -> Rational {
        let b = self.degree() as i64;
        let lead = self.leading_valuation();
        self.valuations()
            .filter(|&(i, _)| i < b)
            .map(|(i, v)| rational::rat(v - lead, b - i))
            .chain(std::iter::once(self.fixed_valuation()))
            .min()
            .expect("nonempty")
    }

    /// Lower bound `L` of a disc `{v_p ≥ L}` with `f` mapping it into itself,
    /// if one exists.
    fn invariant_disc(&self) -> Option<i64> {
        let mut linear_ok = true;
        let mut constant = i64::MAX;
        let mut lower = i64::MIN;
        for (i, v) in self.valuations() {
            match i {
                0 => constant = v,
                1 => linear_ok = v >= 0,
                _ => lower = lower.max(ceil_div(-v, i - 1)),
            }
        }
        (linear_ok && lower <= constant).then_some(lower)
    }

    /// Good reduction: integral coefficients and a unit leading coefficient.
    pub fn has_good_reduction(&self) -> bool {
        self.leading_valuation() == 0 && self.valuations().all(|(_, v)| v >= 0)
    }
}

/// Canonical local height of `x` under `f`, certified when the orbit is
/// seen to escape or to enter an invariant disc within `max_iter` steps.
pub fn canonical_local_height(
    f: &PolyMap,
    x: &Rational,
    max_iter: u32,
) -> Result<LocalHeightValue> {
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be ≥ 1".into()));
    }
    let threshold = f.escape_threshold();
    let fixed = f.fixed_valuation();
    let disc = f.invariant_disc();
    let b = Rational::from_integer(f.degree().into());

    let mut y = x.clone();
    let mut scale = Rational::one();
    for n in 0..=max_iter {
        match rational::valuation(&y, f.prime) {
            Some(v) => {
                let v = Rational::from_integer(v.into());
                if v < threshold {
                    return Ok(LocalHeightValue {
                        value: (&fixed - v) / &scale,
                        converged: true,
                        iterations: n,
                    });
                }
                if disc.is_some_and(|l| v >= Rational::from_integer(l.into())) {
                    return Ok(LocalHeightValue {
                        value: Rational::zero(),
                        converged: true,
                        iterations: n,
                    });
                }
                if n == max_iter {
                    let estimate = if v < Rational::zero() {
                        -v / &scale
                    } else {
                        Rational::zero()
                    };
                    return Ok(LocalHeightValue {
                        value: estimate,
                        converged: false,
                        iterations: n,
                    });
                }
            }
            // y = 0 lies in every disc around 0
            None if disc.is_some() => {
                return Ok(LocalHeightValue {
                    value: Rational::zero(),
                    converged: true,
                    iterations: n,
                })
            }
            None if n == max_iter => {
                return Ok(LocalHeightValue {
                    value: Rational::zero(),
                    converged: false,
                    iterations: n,
                })
            }
            None => {}
        }
        y = f.eval(&y);
        scale *= &b;
    }
    unreachable!("loop returns by n = max_iter")
}

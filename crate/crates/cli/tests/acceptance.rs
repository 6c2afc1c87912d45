//! Acceptance checks, one line per criterion. Exits non-zero if any fails.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use redgraph::bounds::{
    closed_form_bound, lower_bound, optimal_bump, BumpSpec, IntervalComplement, Preset,
};
use redgraph::bundles::{curvature, neron_tate_bundle, phi_energy, szpiro_ullmo_average, PlaceTag};
use redgraph::canheight::{canonical_local_height, PolyMap};
use redgraph::graph::Quadratic;
use redgraph::potential::{d2, energy, green, solve_d2, Normalization, PoissonProblem};
use redgraph::random::{
    random_graph, random_mass_zero_measure, random_point, random_poly, random_probability_measure,
    Topology,
};
use redgraph::rational::{binomial, int, rat, valuation, zero, Rational};
use redgraph::shilov::{
    product_measure, pushforward, shilov_measure, Component, DiscreteMeasure, SpecialFiberModel,
};
use redgraph::tate::{torsion_report, TateCurve};
use redgraph::{circle_graph, integrate, GraphMeasure, GraphPoint};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn random_length(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.random_range(1..=100), rng.random_range(1..=12))
}

fn criterion_1() -> Check {
    for ell in [int(1), int(2), rat(5, 2), int(11)] {
        let c = curvature(&neron_tate_bundle(&ell).map_err(err)?).map_err(err)?;
        let uniform = GraphMeasure::uniform(&circle_graph(&ell).map_err(err)?);
        ensure(c == uniform, || {
            format!("curvature differs from dt/ℓ at ℓ = {ell}")
        })?;
        ensure(
            c.atoms().is_empty() && c.densities()[0].values() == [ell.recip()],
            || format!("density is not 1/ℓ at ℓ = {ell}"),
        )?;
    }
    Ok(())
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let ell = random_length(&mut rng);
        let g = circle_graph(&ell).map_err(err)?;
        let uniform = GraphMeasure::uniform(&g);
        let target = uniform
            .sub(&GraphMeasure::dirac(&g, GraphPoint::Vertex(0), int(1)).map_err(err)?)
            .map_err(err)?;
        let f = solve_d2(&PoissonProblem::new(
            target,
            Normalization::Measure(uniform.clone()),
        ))
        .map_err(err)?;
        let expected = Quadratic::new((int(2) * &ell).recip(), rat(-1, 2), &ell / int(12));
        let edge = &f.edges()[0];
        ensure(
            edge.breaks().is_empty() && edge.pieces() == [expected],
            || format!("solution at ℓ = {ell} is {:?}", edge.pieces()),
        )?;
        let mean = integrate(&f, &uniform).map_err(err)?;
        ensure(mean == zero(), || format!("∫g₀ dt/ℓ = {mean} at ℓ = {ell}"))?;
    }
    Ok(())
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut lengths: Vec<Rational> = (1..=20).map(int).collect();
    lengths.extend((0..10).map(|_| random_length(&mut rng)));
    for ell in &lengths {
        let neutral = closed_form_bound(&Preset::Neutral.complement(ell.clone()).map_err(err)?);
        ensure(neutral == ell / int(24), || {
            format!("neutral bound {neutral} at ℓ = {ell}")
        })?;
        if *ell >= int(1) {
            let point = closed_form_bound(&Preset::Point.complement(ell.clone()).map_err(err)?);
            ensure(point == (int(24) * ell * ell).recip(), || {
                format!("point bound {point} at ℓ = {ell}")
            })?;
        }
    }
    for l in 1..=20 {
        let ell = int(l);
        let neron = closed_form_bound(&Preset::Neron.complement(ell.clone()).map_err(err)?);
        ensure(neron == (int(24) * &ell).recip(), || {
            format!("Néron bound {neron} at ℓ = {ell}")
        })?;
    }
    for case in 0..50 {
        let ell = random_length(&mut rng);
        let mut cuts: Vec<i64> = (0..rng.random_range(2..=10))
            .map(|_| rng.random_range(0..=60))
            .collect();
        cuts.sort_unstable();
        cuts.dedup();
        let intervals = cuts
            .chunks_exact(2)
            .map(|w| (&ell * rat(w[0], 60), &ell * rat(w[1], 60)))
            .collect();
        let complement = IntervalComplement::new(ell.clone(), intervals).map_err(err)?;
        let phi =
            optimal_bump(&BumpSpec::with_optimal_coefficients(complement.clone())).map_err(err)?;
        let via_solver = lower_bound(&neron_tate_bundle(&ell).map_err(err)?, &phi).map_err(err)?;
        let closed = closed_form_bound(&complement);
        ensure(via_solver == closed, || {
            format!("case {case}: solver {via_solver} vs closed form {closed}")
        })?;
    }
    Ok(())
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut lengths = vec![int(6), int(1)];
    lengths.extend((0..5).map(|_| random_length(&mut rng)));
    for ell in &lengths {
        let avg = szpiro_ullmo_average(ell).map_err(err)?;
        ensure(avg == ell / int(6), || {
            format!("average {avg} at ℓ = {ell}")
        })?;
    }
    let n = 1000i64;
    for ell in [int(6), rat(7, 3)] {
        let g = circle_graph(&ell).map_err(err)?;
        let origin = GraphPoint::Vertex(0);
        let mut total = zero();
        for k in 0..n {
            let p = g.point(0, &ell * rat(k, n)).map_err(err)?;
            total += phi_energy(&g, &p, &origin).map_err(err)?;
        }
        let mean = total / int(n);
        let gap = &ell / int(6) - &mean;
        let gap = if gap < zero() { -gap } else { gap };
        ensure(gap <= &ell / int(1000), || {
            format!("grid average misses ℓ/6 by {gap} at ℓ = {ell}")
        })?;
    }
    Ok(())
}

fn criterion_5() -> Check {
    for ell in [int(5), rat(7, 2)] {
        let curve = TateCurve::new(ell.clone(), PlaceTag::new(2).map_err(err)?).map_err(err)?;
        let report = torsion_report(&curve, 200, false, vec![]).map_err(err)?;
        ensure(report.rows.len() == 200, || {
            "report has the wrong number of rows".into()
        })?;
        for row in &report.rows {
            let bound = rat(1, row.n as i64);
            ensure(row.ks <= bound, || {
                format!("KS {} > 1/{} at ℓ = {ell}", row.ks, row.n)
            })?;
            ensure(row.n < 2 || row.ks == bound, || {
                format!("KS {} ≠ 1/{} at ℓ = {ell}", row.ks, row.n)
            })?;
        }
        for pair in report.rows.windows(2) {
            ensure(pair[1].errors[0] < pair[0].errors[0], || {
                format!("|∫g₀ dμ_n| not decreasing at n = {} (ℓ = {ell})", pair[1].n)
            })?;
        }
    }
    Ok(())
}

fn random_model(rng: &mut ChaCha8Rng) -> SpecialFiberModel {
    let components: Vec<Component> = (0..rng.random_range(1..=6))
        .map(|i| Component {
            label: format!("X{i}"),
            multiplicity: rng.random_range(1..=5),
            deg: rat(rng.random_range(0..=30), rng.random_range(1..=6)),
        })
        .collect();
    let exponents: Vec<u64> = (0..rng.random_range(1..=3))
        .map(|_| rng.random_range(1..=4))
        .collect();
    let mut model = SpecialFiberModel {
        components,
        exponents,
        total_degree: zero(),
    };
    model.total_degree = model.fiber_degree() / Rational::from_integer(model.exponent_product());
    model
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..100 {
        let model = random_model(&mut rng);
        let mu = shilov_measure(&model).map_err(err)?;
        ensure(mu.total_mass() == model.total_degree, || {
            format!("model {case}: mass ≠ degree")
        })?;
        ensure(mu.is_positive(), || {
            format!("model {case}: negative weight")
        })?;
        let deg = rng.random_range(1..=6u64);
        let relabel: BTreeMap<String, String> = model
            .components
            .iter()
            .map(|c| (c.label.clone(), format!("Y{}", rng.random_range(0..3))))
            .collect();
        let image = pushforward(&mu, deg, &relabel).map_err(err)?;
        ensure(
            image.total_mass() == mu.total_mass() * int(deg as i64),
            || format!("model {case}: pushforward mass"),
        )?;
    }
    let dirac = |l: &str| -> DiscreteMeasure { [(l.to_string(), int(1))].into_iter().collect() };
    let w = |d: u64, e: u64| product_measure(&dirac("x"), d, &dirac("y"), e).weight("(x,y)");
    for n in 0..=8u64 {
        for d in 0..=n {
            let e = n - d;
            ensure(w(d, e) == Rational::from_integer(binomial(n, d)), || {
                format!("C({n},{d})")
            })?;
            if d > 0 && e > 0 {
                ensure(w(d, e) == w(d - 1, e) + w(d, e - 1), || {
                    format!("Pascal fails at ({d},{e})")
                })?;
            }
        }
    }
    Ok(())
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut count = 0;
    for topology in Topology::ALL {
        for case in 0..24 {
            let g = random_graph(&mut rng, topology);
            let tag = || format!("{topology:?} case {case}");
            let f = random_poly(&mut rng, &g, 3);
            let df = d2(&f);
            ensure(df.total_mass() == zero(), || {
                format!("{}: mass(d2 f) ≠ 0", tag())
            })?;
            ensure(integrate(&f, &df).map_err(err)? == -energy(&f), || {
                format!("{}: integration by parts", tag())
            })?;

            let rho = random_mass_zero_measure(&mut rng, &g);
            let mu = random_probability_measure(&mut rng, &g);
            let solved = solve_d2(&PoissonProblem::new(
                rho.clone(),
                Normalization::Measure(mu.clone()),
            ))
            .map_err(err)?;
            ensure(d2(&solved) == rho, || format!("{}: d2 ∘ solve ≠ id", tag()))?;

            let x = random_point(&mut rng, &g);
            let y = random_point(&mut rng, &g);
            let gx = green(&g, &x, &mu).map_err(err)?;
            let gy = green(&g, &y, &mu).map_err(err)?;
            ensure(gx.eval(&y) == gy.eval(&x), || {
                format!("{}: Green symmetry", tag())
            })?;
            count += 1;
        }
    }
    ensure(count >= 100, || format!("only {count} instances"))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut certified = 0;
    for p in [2u64, 3, 5] {
        let families = [
            vec![int(1), zero(), zero()],
            vec![int(1), zero(), zero(), zero()],
            vec![int(1), zero(), int(p as i64)],
        ];
        for coeffs in families {
            let f = PolyMap::new(coeffs, p).map_err(err)?;
            let b = int(f.degree() as i64);
            for _ in 0..50 {
                let sign = if rng.random_bool(0.5) { 1 } else { -1 };
                let x = rat(sign * rng.random_range(1..=500), rng.random_range(1..=500));
                let h = canonical_local_height(&f, &x, 8).map_err(err)?;
                let hf = canonical_local_height(&f, &f.eval(&x), 8).map_err(err)?;
                ensure(h.converged && hf.converged, || {
                    format!("uncertified orbit of {x} at p = {p}")
                })?;
                ensure(hf.value == &b * &h.value, || {
                    format!("λ(f({x})) ≠ b·λ({x}) at p = {p}")
                })?;
                let v = valuation(&x, p).expect("x ≠ 0");
                ensure(h.value == int((-v).max(0)), || {
                    format!("λ({x}) ≠ max(0, −v) at p = {p}")
                })?;
                certified += 1;
            }
        }
    }
    ensure(certified == 450, || format!("{certified} certified inputs"))
}

fn criterion_9() -> Check {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_redgraph"))
            .args([
                "equi", "run", "--ell", "5/1", "--max-n", "60", "--seed", "7",
            ])
            .output()
            .map_err(err)
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success() && b.status.success(), || {
        String::from_utf8_lossy(&a.stderr).into_owned()
    })?;
    ensure(!a.stdout.is_empty() && a.stdout == b.stdout, || {
        "outputs differ".into()
    })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            "Néron–Tate curvature is dt/ℓ",
            criterion_1,
            Duration::from_secs(1),
        ),
        (
            "Green solver reproduces g₀",
            criterion_2,
            Duration::from_secs(1),
        ),
        (
            "lower-bound constants and solver agreement",
            criterion_3,
            Duration::from_secs(5),
        ),
        (
            "Szpiro–Ullmo average ℓ/6",
            criterion_4,
            Duration::from_secs(5),
        ),
        (
            "torsion equidistribution, n ≤ 200",
            criterion_5,
            Duration::from_secs(10),
        ),
        ("Shilov measure laws", criterion_6, Duration::from_secs(1)),
        (
            "potential-theory property suite",
            criterion_7,
            Duration::from_secs(30),
        ),
        (
            "canonical height functional equation",
            criterion_8,
            Duration::from_secs(5),
        ),
        (
            "deterministic equi run",
            criterion_9,
            Duration::from_secs(30),
        ),
    ];
    let mut failures = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let outcome = match result {
            Ok(()) if elapsed <= *limit => Ok(()),
            Ok(()) => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            Err(e) => Err(e),
        };
        match outcome {
            Ok(()) => println!("criterion {}: PASS  {name} ({elapsed:.2?})", i + 1),
            Err(e) => {
                failures += 1;
                println!("criterion {}: FAIL  {name} ({elapsed:.2?}): {e}", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

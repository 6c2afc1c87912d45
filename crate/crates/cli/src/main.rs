//! `redgraph` command-line front end.
//!
//! Exit codes: 0 on success, 1 on domain errors, 2 on usage, I/O and parse
//! errors. `REDGRAPH_THREADS` caps the worker pool.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use redgraph::bounds::{self, BumpSpec, IntervalComplement, Preset};
use redgraph::bundles::{self, PlaceTag};
use redgraph::canheight::{canonical_local_height, PolyMap};
use redgraph::io;
use redgraph::potential::{solve_d2, Normalization, PoissonProblem};
use redgraph::rational::{self, Rational};
use redgraph::shilov;
use redgraph::tate::{self, TateCurve};
use redgraph::{GraphMeasure, MetrizedGraph};

#[derive(Parser)]
#[command(
    name = "redgraph",
    version,
    about = "Exact potential theory and heights on metrized graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Poisson problems on a graph.
    Graph {
        #[command(subcommand)]
        action: GraphAction,
    },
    /// Shilov-point measures of a special-fiber model.
    Shilov {
        #[command(subcommand)]
        action: ShilovAction,
    },
    /// Néron–Tate metric g₀ on the circle of length ℓ.
    Nt {
        #[arg(long, value_parser = parse_rational)]
        ell: Rational,
        /// Evaluate g₀ at this arc-length coordinate.
        #[arg(long, value_parser = parse_rational)]
        eval: Option<Rational>,
    },
    /// Energy of the potential of δ_p − δ_q (effective resistance).
    PhiEnergy {
        #[arg(long)]
        graph: PathBuf,
        /// Vertex name or `edge:offset`.
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// Equidistribution experiments on Tate curves.
    Equi {
        #[command(subcommand)]
        action: EquiAction,
    },
    /// Height lower bounds from bump functions.
    Bound {
        #[command(subcommand)]
        action: BoundAction,
    },
    /// Canonical local height of a polynomial map at a prime.
    Canheight {
        /// Coefficients from the leading term down, e.g. "1,0,0" for x².
        #[arg(long)]
        poly: String,
        #[arg(long)]
        p: u64,
        #[arg(long, value_parser = parse_rational)]
        x: Rational,
        #[arg(long, default_value_t = 8)]
        max_iter: u32,
    },
}

#[derive(Subcommand)]
enum GraphAction {
    /// Solve d2(f) = target and print the piece table.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        target: PathBuf,
        /// `uniform` (∫f dt/L = 0) or `point:<vertex or edge:offset>` (f = 0 there).
        #[arg(long, default_value = "uniform")]
        normalize: String,
    },
}

#[derive(Subcommand)]
enum ShilovAction {
    Measure {
        #[arg(long)]
        model: PathBuf,
    },
}

#[derive(Subcommand)]
enum EquiAction {
    /// Torsion experiment for n = 1..max-n, written as CSV.
    Run {
        #[arg(long, value_parser = parse_rational)]
        ell: Rational,
        #[arg(long)]
        max_n: u64,
        /// Seed for the random bump test functions.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        exclude_identity: bool,
        /// Number of seeded random bump test functions besides g₀.
        #[arg(long, default_value_t = 3)]
        bumps: usize,
        /// Residue field size recorded with the curve.
        #[arg(long, default_value_t = 2)]
        place: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BoundAction {
    /// Lower bound on the circle of length ℓ, in units of log N_v.
    Compute {
        #[arg(long, value_parser = parse_rational)]
        ell: Rational,
        /// `neutral`, `neron` or `point`.
        #[arg(long, conflicts_with = "intervals")]
        preset: Option<String>,
        /// Interval list, e.g. "[(0/1,1/1),(3/1,4/1)]".
        #[arg(long)]
        intervals: Option<String>,
        /// Override the coefficient of the i-th interval (1-based): `i:value`.
        #[arg(long = "c")]
        coefficients: Vec<String>,
    },
}

fn parse_rational(text: &str) -> std::result::Result<Rational, String> {
    rational::parse(text).map_err(|e| e.to_string())
}

fn exact(value: &Rational) -> Value {
    Value::String(rational::format(value))
}

fn float(value: &Rational) -> Value {
    json!(rational::to_f64(value))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_graph(path: &Path) -> Result<MetrizedGraph> {
    Ok(io::parse_graph(&read(path)?)?)
}

fn graph_solve(graph: &Path, target: &Path, normalize: &str) -> Result<Value> {
    let g = load_graph(graph)?;
    let rho = io::parse_measure(&read(target)?, &g)?;
    let normalization = match normalize.split_once(':') {
        _ if normalize == "uniform" => Normalization::Measure(GraphMeasure::uniform(&g)),
        Some(("point", p)) => Normalization::Point(io::parse_point(p, &g)?),
        _ => {
            return Err(
                redgraph::Error::Parse(format!("unknown normalization {normalize:?}")).into(),
            )
        }
    };
    let f = solve_d2(&PoissonProblem::new(rho, normalization))?;
    Ok(json!({
        "energy": exact(&redgraph::potential::energy(&f)),
        "solution": serde_json::to_value(io::PieceTable::from_poly(&f))?,
    }))
}

fn shilov_measure(model: &Path) -> Result<Value> {
    let model = io::parse_model(&read(model)?)?;
    let mu = shilov::shilov_measure(&model)?;
    let weights = |m: &shilov::DiscreteMeasure| -> Vec<Value> {
        m.iter()
            .map(|(label, w)| json!({"label": label, "weight": exact(w), "weight_float": float(w)}))
            .collect()
    };
    let normalized = if model.total_degree > rational::zero() {
        Value::Array(weights(&shilov::normalized_measure(&model)?))
    } else {
        Value::Null
    };
    Ok(json!({
        "weights": weights(&mu),
        "total_mass": exact(&mu.total_mass()),
        "normalized": normalized,
    }))
}

fn nt(ell: &Rational, eval: Option<&Rational>) -> Result<Value> {
    let bundle = bundles::neron_tate_bundle(ell)?;
    let g = bundle.metric();
    let piece = &g.edges()[0].pieces()[0];
    let curv = bundles::curvature(&bundle)?;
    let mut out = json!({
        "ell": exact(ell),
        "g0": {"c2": exact(&piece.c2), "c1": exact(&piece.c1), "c0": exact(&piece.c0)},
        "curvature_density": exact(curv.densities()[0].value_at(&rational::zero())),
        "curvature_atoms": curv.atoms().len(),
        "semipositive": bundles::is_semipositive(&bundle)?,
        "energy": exact(&redgraph::potential::energy(g)),
    });
    if let Some(t) = eval {
        let t = rational::rem_euclid(t, ell);
        let value = g.eval_on_edge(0, &t);
        out["t"] = exact(&t);
        out["value"] = exact(&value);
        out["value_float"] = float(&value);
    }
    Ok(out)
}

fn phi_energy(graph: &Path, p: &str, q: &str) -> Result<Value> {
    let g = load_graph(graph)?;
    let (pp, qq) = (io::parse_point(p, &g)?, io::parse_point(q, &g)?);
    let e = bundles::phi_energy(&g, &pp, &qq)?;
    Ok(json!({
        "p": io::format_point(&pp, &g),
        "q": io::format_point(&qq, &g),
        "energy": exact(&e),
        "energy_float": float(&e),
    }))
}

fn equi_run(
    ell: Rational,
    max_n: u64,
    seed: u64,
    exclude_identity: bool,
    bumps: usize,
    place: u64,
) -> Result<String> {
    if max_n == 0 {
        return Err(redgraph::Error::InvalidArgument("--max-n must be ≥ 1".into()).into());
    }
    let curve = TateCurve::new(ell, PlaceTag::new(place)?)?;
    let extra = tate::seeded_bumps(&curve, seed, bumps)?;
    Ok(tate::torsion_report(&curve, max_n, exclude_identity, extra)?.to_csv())
}

fn bound_compute(
    ell: Rational,
    preset: Option<&str>,
    intervals: Option<&str>,
    overrides: &[String],
) -> Result<Value> {
    let complement = match (preset, intervals) {
        (Some(p), None) => p.parse::<Preset>()?.complement(ell)?,
        (None, Some(text)) => IntervalComplement::new(ell, io::parse_intervals(text)?)?,
        (None, None) => Preset::Neutral.complement(ell)?,
        (Some(_), Some(_)) => unreachable!("clap rejects both"),
    };
    let optimal = BumpSpec::with_optimal_coefficients(complement.clone());
    let mut coefficients = optimal.coefficients().to_vec();
    for item in overrides {
        let (i, value) = item
            .split_once(':')
            .ok_or_else(|| redgraph::Error::Parse(format!("--c expects i:value, got {item:?}")))?;
        let i: usize = i
            .trim()
            .parse()
            .map_err(|_| redgraph::Error::Parse(format!("bad interval index in {item:?}")))?;
        let slot = i
            .checked_sub(1)
            .and_then(|k| coefficients.get_mut(k))
            .ok_or_else(|| redgraph::Error::InvalidArgument(format!("no interval number {i}")))?;
        *slot = rational::parse(value)?;
    }
    let uses_optimum = coefficients == optimal.coefficients();
    let spec = BumpSpec::new(complement.clone(), coefficients)?;
    let phi = bounds::optimal_bump(&spec)?;
    let bundle = bundles::neron_tate_bundle(complement.ell())?;
    let bound = bounds::lower_bound(&bundle, &phi)?;
    let mut out = json!({
        "ell": exact(complement.ell()),
        "intervals": complement
            .intervals()
            .iter()
            .map(|(a, b)| json!([exact(a), exact(b)]))
            .collect::<Vec<_>>(),
        "coefficients": spec.coefficients().iter().map(exact).collect::<Vec<_>>(),
        "bound": exact(&bound),
        "bound_num": bound.numer().to_string(),
        "bound_den": bound.denom().to_string(),
        "bound_float": float(&bound),
        "units": "log Nv",
    });
    if uses_optimum {
        out["closed_form"] = exact(&bounds::closed_form_bound(&complement));
    }
    Ok(out)
}

fn canheight(poly: &str, p: u64, x: &Rational, max_iter: u32) -> Result<Value> {
    let coefficients = poly
        .split(',')
        .map(rational::parse)
        .collect::<redgraph::Result<Vec<_>>>()?;
    let f = PolyMap::new(coefficients, p)?;
    let h = canonical_local_height(&f, x, max_iter)?;
    Ok(json!({
        "value": exact(&h.value),
        "value_float": float(&h.value),
        "converged": h.converged,
        "iterations": h.iterations,
        "units": "log p",
    }))
}

/// Writes to stdout; a closed pipe on the reading side is not an error.
fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn print_json(value: &Value) -> Result<()> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Graph {
            action:
                GraphAction::Solve {
                    graph,
                    target,
                    normalize,
                },
        } => print_json(&graph_solve(&graph, &target, &normalize)?),
        Command::Shilov {
            action: ShilovAction::Measure { model },
        } => print_json(&shilov_measure(&model)?),
        Command::Nt { ell, eval } => print_json(&nt(&ell, eval.as_ref())?),
        Command::PhiEnergy { graph, p, q } => print_json(&phi_energy(&graph, &p, &q)?),
        Command::Equi {
            action:
                EquiAction::Run {
                    ell,
                    max_n,
                    seed,
                    exclude_identity,
                    bumps,
                    place,
                    out,
                },
        } => {
            let csv = equi_run(ell, max_n, seed, exclude_identity, bumps, place)?;
            match out {
                Some(path) => fs::write(&path, csv)
                    .with_context(|| format!("cannot write {}", path.display())),
                None => emit(&csv),
            }
        }
        Command::Bound {
            action:
                BoundAction::Compute {
                    ell,
                    preset,
                    intervals,
                    coefficients,
                },
        } => print_json(&bound_compute(
            ell,
            preset.as_deref(),
            intervals.as_deref(),
            &coefficients,
        )?),
        Command::Canheight {
            poly,
            p,
            x,
            max_iter,
        } => print_json(&canheight(&poly, p, &x, max_iter)?),
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(text) = std::env::var("REDGRAPH_THREADS") {
        let n: usize = text.trim().parse().map_err(|_| {
            redgraph::Error::Parse(format!("REDGRAPH_THREADS={text:?} is not a count"))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<redgraph::Error>() {
        Some(redgraph::Error::Parse(_)) => 2,
        Some(_) => 1,
        None => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

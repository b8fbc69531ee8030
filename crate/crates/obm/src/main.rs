//! Command-line front end: JSON bodies and phi descriptors in, CSV/JSON
//! reports and hull polylines out.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use obm::additions::{
    associativity_defect, m_sum, naive_sum_probe, orlicz_sum, CoeffSet,
};
use obm::bodies::{body_from_json, ConvexBody, DirectionGrid};
use obm::error::Error;
use obm::functionals::{
    orlicz_centroid_body, orlicz_projection_body, Quadrature,
};
use obm::inequalities::{
    compare_vphi_vs_hat, mixed_volume_v1, mixed_volume_vphi, mixed_volume_vphi_hat,
    validate_bm_m_addition, validate_bm_split, validate_log_inequality,
    validate_log_minkowski, validate_orlicz_bm, validate_orlicz_minkowski,
    validate_vphi_hat_minkowski, InequalityReport,
};
use obm::oracle::{random_polytope, BodyFamily, Seed};
use obm::phi::{decompose_2d, phi_from_json, ParsedPhi, PhiFunction, PhiM};

#[derive(Parser)]
#[command(name = "obm", about = "Convex-body computations with Orlicz additions", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct IoArgs {
    /// phi descriptor (JSON file)
    #[arg(long)]
    phi: Option<PathBuf>,
    /// first body (JSON file)
    #[arg(long = "K")]
    k: Option<PathBuf>,
    /// second body (JSON file)
    #[arg(long = "L")]
    l: Option<PathBuf>,
    /// JSON array of bodies
    #[arg(long)]
    bodies: Option<PathBuf>,
    /// coefficient set: JSON file or name (singleton | simplex | lp,p=<p>)
    #[arg(long = "M")]
    m: Option<String>,
    /// direction-grid size
    #[arg(long, default_value_t = 720)]
    grid: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Orlicz or M-sum of bodies; emits grid supports and hull vertices
    Add(IoArgs),
    /// Mixed volume: --name v1 | vphi | vphi-hat
    Mvol {
        #[arg(long)]
        name: String,
        #[command(flatten)]
        io: IoArgs,
    },
    /// One inequality validator by name
    Ineq {
        #[arg(long)]
        name: String,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Orlicz projection body of a polytope
    Projbody(IoArgs),
    /// Orlicz centroid body
    Centroidbody {
        /// cells:<n> or mc:<samples>,<seed>
        #[arg(long, default_value = "cells:512")]
        quadrature: String,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Planar decomposition of a 1-unconditional body into a phi pair
    Decompose(IoArgs),
    /// Search for subadditivity violations of the naive phi-sum
    ProbeNaive {
        #[arg(long, default_value_t = 5000)]
        pairs: usize,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Associativity defect of the two-fold Orlicz sum over three bodies
    ProbeAssoc(IoArgs),
    /// Planar Brunn-Minkowski split chain
    Split(IoArgs),
    /// Randomized validator suite
    Suite {
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Mixed-volume comparison H(a, b) on the rectangle/disk pair
    Hab {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[command(flatten)]
        io: IoArgs,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::SolverFailure { .. } => 3,
        _ => 2,
    }
}

fn emit_error(e: &Error) {
    let kind = match e {
        Error::SolverFailure { .. } => "solver",
        Error::Io(_) | Error::Json(_) | Error::Parse(_) => "input",
        _ => "validation",
    };
    eprintln!("{}", json!({"error": e.to_string(), "kind": kind}));
}

fn read_json(path: &PathBuf) -> Result<serde_json::Value, Error> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn load_body(path: &Option<PathBuf>, flag: &str) -> Result<ConvexBody, Error> {
    let p = path
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter(format!("missing --{flag}")))?;
    body_from_json(&read_json(p)?)
}

fn load_bodies(io: &IoArgs) -> Result<Vec<ConvexBody>, Error> {
    if let Some(path) = &io.bodies {
        let v = read_json(path)?;
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse("--bodies must be a JSON array".into()))?;
        arr.iter().map(body_from_json).collect()
    } else {
        Ok(vec![load_body(&io.k, "K")?, load_body(&io.l, "L")?])
    }
}

fn load_phi(io: &IoArgs) -> Result<ParsedPhi, Error> {
    let p = io
        .phi
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("missing --phi".into()))?;
    phi_from_json(&read_json(p)?)
}

fn parse_m(spec: &str, arity: usize) -> Result<CoeffSet, Error> {
    if spec == "singleton" {
        return Ok(CoeffSet::singleton_ones(arity));
    }
    if spec == "simplex" {
        return Ok(CoeffSet::simplex(arity));
    }
    if let Some(rest) = spec.strip_prefix("lp,p=") {
        let p: f64 = rest
            .parse()
            .map_err(|_| Error::Parse(format!("bad p in --M {spec}")))?;
        return CoeffSet::lp_arc(arity, p);
    }
    let v = read_json(&PathBuf::from(spec))?;
    let pts = v
        .get("points")
        .and_then(|p| p.as_array())
        .ok_or_else(|| Error::Parse("coefficient file needs a \"points\" array".into()))?;
    let pts: Vec<Vec<f64>> = pts
        .iter()
        .map(|row| {
            row.as_array()
                .map(|r| r.iter().filter_map(|x| x.as_f64()).collect())
                .ok_or_else(|| Error::Parse("points rows must be arrays".into()))
        })
        .collect::<Result<_, _>>()?;
    CoeffSet::from_points(pts)
}

fn write_out(io: &IoArgs, text: &str) -> Result<(), Error> {
    match &io.out {
        Some(p) => fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn body_payload(body: &ConvexBody, grid: &DirectionGrid) -> serde_json::Value {
    let supports: Vec<f64> = grid.directions.iter().map(|u| body.support(u)).collect();
    let hull = body
        .outer_polytope(grid)
        .ok()
        .and_then(|p| p.vertices().cloned());
    json!({
        "dim": body.dim,
        "grid": grid.len(),
        "directions": grid.directions,
        "supports": supports,
        "hull_vertices": hull,
    })
}

fn reports_payload(io: &IoArgs, reports: &[InequalityReport]) -> String {
    if io.format == "csv" {
        let mut s = String::from("name,lhs,rhs,slack,holds,equality_case,grid,seed\n");
        for r in reports {
            s.push_str(&r.csv_row(io.grid, io.seed));
            s.push('\n');
        }
        s
    } else {
        let rows: Vec<serde_json::Value> = reports
            .iter()
            .map(|r| {
                json!({
                    "name": r.name,
                    "lhs": r.lhs,
                    "rhs": r.rhs,
                    "slack": r.slack,
                    "holds": r.holds,
                    "conjecture": r.conjecture,
                    "equality_case": format!("{:?}", r.equality_case),
                    "provenance": r.provenance,
                    "grid": io.grid,
                    "seed": io.seed,
                })
            })
            .collect();
        serde_json::to_string_pretty(&rows).unwrap()
    }
}

fn threads() -> usize {
    std::env::var("OBM_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

fn run() -> Result<u8, Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Add(io) => {
            let bodies = load_bodies(&io)?;
            let dim = bodies.first().map(|b| b.dim).unwrap_or(2);
            let grid = DirectionGrid::with_min_count(dim, io.grid);
            let sum = if let Some(mspec) = &io.m {
                let m = parse_m(mspec, bodies.len())?;
                m_sum(&m, &bodies)?
            } else {
                let phi = load_phi(&io)?.resolve(bodies.len())?;
                orlicz_sum(&phi, &bodies)?
            };
            write_out(&io, &serde_json::to_string_pretty(&body_payload(&sum, &grid)).unwrap())?;
            Ok(0)
        }
        Command::Mvol { name, io } => {
            let k = load_body(&io.k, "K")?;
            let l = load_body(&io.l, "L")?;
            let r = match name.as_str() {
                "v1" => mixed_volume_v1(&k, &l)?,
                "vphi" => mixed_volume_vphi(&load_phi(&io)?.scalar()?, &k, &l)?,
                "vphi-hat" => mixed_volume_vphi_hat(&load_phi(&io)?.scalar()?, &k, &l)?,
                other => {
                    return Err(Error::InvalidParameter(format!("unknown mixed volume {other}")))
                }
            };
            write_out(
                &io,
                &json!({"name": r.formula, "value": r.value, "atoms": r.atoms}).to_string(),
            )?;
            Ok(0)
        }
        Command::Ineq { name, io } => {
            let reports = run_ineq(&name, &io)?;
            let all_hold = reports.iter().all(|r| r.holds || r.conjecture);
            write_out(&io, &reports_payload(&io, &reports))?;
            Ok(if all_hold { 0 } else { 4 })
        }
        Command::Projbody(io) => {
            let k = load_body(&io.k, "K")?;
            let phi = load_phi(&io)?.scalar()?;
            let pb = orlicz_projection_body(&phi, &k)?;
            let grid = DirectionGrid::with_min_count(k.dim, io.grid);
            write_out(&io, &serde_json::to_string_pretty(&body_payload(&pb, &grid)).unwrap())?;
            Ok(0)
        }
        Command::Centroidbody { quadrature, io } => {
            let k = load_body(&io.k, "K")?;
            let phi = load_phi(&io)?.scalar()?;
            let quad = parse_quadrature(&quadrature)?;
            let cb = orlicz_centroid_body(&phi, &k, &quad)?;
            let grid = DirectionGrid::with_min_count(k.dim, io.grid);
            write_out(&io, &serde_json::to_string_pretty(&body_payload(&cb, &grid)).unwrap())?;
            Ok(0)
        }
        Command::Decompose(io) => {
            let k = load_body(&io.k, "K")?;
            let d = decompose_2d(&k)?;
            let ts: Vec<f64> = (0..=200).map(|i| i as f64 / 100.0).collect();
            let phi1: Vec<f64> = ts.iter().map(|&t| d.phi1.eval(t)).collect();
            let phi2: Vec<f64> = ts.iter().map(|&t| d.phi2.eval(t)).collect();
            write_out(
                &io,
                &serde_json::to_string_pretty(&json!({
                    "case": format!("{:?}", d.case),
                    "tau1": d.tau1,
                    "tau2": d.tau2,
                    "t": ts,
                    "phi1": phi1,
                    "phi2": phi2,
                }))
                .unwrap(),
            )?;
            Ok(0)
        }
        Command::ProbeNaive { pairs, io } => {
            let k = load_body(&io.k, "K")?;
            let l = load_body(&io.l, "L")?;
            let phi = load_phi(&io)?.scalar()?;
            let probe = naive_sum_probe(&phi, &k, &l, pairs, io.seed)?;
            write_out(
                &io,
                &serde_json::to_string_pretty(&json!({
                    "is_support_function": probe.is_support_function,
                    "worst_defect": probe.worst_defect,
                    "witness": probe.witness,
                    "pairs": pairs,
                    "seed": io.seed,
                }))
                .unwrap(),
            )?;
            Ok(0)
        }
        Command::ProbeAssoc(io) => {
            let bodies = load_bodies(&io)?;
            if bodies.len() != 3 {
                return Err(Error::InvalidParameter(
                    "probe-assoc needs exactly three bodies".into(),
                ));
            }
            let phi = load_phi(&io)?.scalar()?;
            let grid = DirectionGrid::with_min_count(bodies[0].dim, io.grid);
            let defect = associativity_defect(&phi, &bodies[0], &bodies[1], &bodies[2], &grid)?;
            write_out(
                &io,
                &json!({"associativity_defect": defect, "grid": grid.len()}).to_string(),
            )?;
            Ok(0)
        }
        Command::Split(io) => {
            let k = load_body(&io.k, "K")?;
            let l = load_body(&io.l, "L")?;
            let s = validate_bm_split(&k, &l)?;
            let reports = vec![s.link1.clone(), s.link2.clone(), s.bm.clone()];
            let ok = reports.iter().all(|r| r.holds);
            write_out(&io, &reports_payload(&io, &reports))?;
            Ok(if ok { 0 } else { 4 })
        }
        Command::Suite { cases, io } => {
            let reports = run_suite(cases, io.seed)?;
            let ok = reports.iter().all(|r| r.holds || r.conjecture);
            write_out(&io, &reports_payload(&io, &reports))?;
            Ok(if ok { 0 } else { 4 })
        }
        Command::Hab { a, b, io } => {
            let r = compare_vphi_vs_hat(a, b)?;
            write_out(
                &io,
                &json!({
                    "a": r.a, "b": r.b,
                    "H_closed": r.closed,
                    "H_geometric": r.geometric,
                    "sign": r.sign,
                })
                .to_string(),
            )?;
            Ok(0)
        }
    }
}

fn parse_quadrature(spec: &str) -> Result<Quadrature, Error> {
    if let Some(n) = spec.strip_prefix("cells:") {
        return Ok(Quadrature::Cells(
            n.parse().map_err(|_| Error::Parse(format!("bad quadrature {spec}")))?,
        ));
    }
    if let Some(rest) = spec.strip_prefix("mc:") {
        let mut parts = rest.split(',');
        let samples = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad quadrature {spec}")))?;
        let seed = parts.next().and_then(|s| s.parse().ok()).unwrap_or(0);
        return Ok(Quadrature::MonteCarlo { samples, seed });
    }
    Err(Error::Parse(format!("bad quadrature {spec}")))
}

fn run_ineq(name: &str, io: &IoArgs) -> Result<Vec<InequalityReport>, Error> {
    let k = load_body(&io.k, "K")?;
    let l = load_body(&io.l, "L")?;
    match name {
        "orlicz-minkowski" => Ok(vec![validate_orlicz_minkowski(
            &load_phi(io)?.scalar()?,
            &k,
            &l,
        )?]),
        "vphi-hat-minkowski" => Ok(vec![validate_vphi_hat_minkowski(
            &load_phi(io)?.scalar()?,
            &k,
            &l,
        )?]),
        "orlicz-bm" => validate_orlicz_bm(&load_phi(io)?.resolve(2)?, &k, &l),
        "log" => Ok(vec![validate_log_inequality(&k, &l)?]),
        "log-minkowski" => Ok(vec![validate_log_minkowski(&k, &l)?]),
        "bm-m" => {
            let m = parse_m(
                io.m.as_deref()
                    .ok_or_else(|| Error::InvalidParameter("bm-m needs --M".into()))?,
                2,
            )?;
            validate_bm_m_addition(&m, &[k, l], None)
        }
        other => Err(Error::InvalidParameter(format!("unknown inequality {other}"))),
    }
}

/// One randomized pass of every validator per case, deterministic in
/// (seed, case index) and safe to compute on worker threads.
fn suite_case(seed: u64, case: usize) -> Result<Vec<InequalityReport>, Error> {
    let root = Seed::new(seed).derive(&format!("case{case}"));
    let k = random_polytope(&root.derive("K"), 2, 6, BodyFamily::OriginInterior)?;
    let l = random_polytope(&root.derive("L"), 2, 6, BodyFamily::OriginInterior)?;
    let ks = random_polytope(&root.derive("Ks"), 2, 6, BodyFamily::Symmetric)?;
    let ls = random_polytope(&root.derive("Ls"), 2, 6, BodyFamily::Symmetric)?;
    let phi = PhiFunction::power(1.0 + (case % 5) as f64 / 2.0)?;
    let mut out = Vec::new();
    out.push(validate_orlicz_minkowski(&phi, &k, &l)?);
    out.push(validate_vphi_hat_minkowski(&phi, &k, &l)?);
    let pm = PhiM::replicate(&phi, 2)?;
    out.extend(validate_orlicz_bm(&pm, &k, &l)?);
    out.extend(validate_bm_m_addition(
        &CoeffSet::lp_arc(2, 2.0)?,
        &[k.clone(), l.clone()],
        None,
    )?);
    // shrink L until it sits strictly inside K
    let grid = DirectionGrid::uniform2d(256);
    let ratio = grid
        .directions
        .iter()
        .map(|u| k.support(u) / l.support(u).max(1e-12))
        .fold(f64::INFINITY, f64::min);
    let inner = l.scale_body(0.5 * ratio);
    out.push(validate_log_inequality(&k, &inner)?);
    out.push(validate_log_minkowski(&ks, &ls)?);
    let split = validate_bm_split(&ks, &ls)?;
    out.push(split.link1);
    out.push(split.link2);
    out.push(split.bm);
    Ok(out)
}

fn run_suite(cases: usize, seed: u64) -> Result<Vec<InequalityReport>, Error> {
    let nthreads = threads().min(cases.max(1));
    if nthreads <= 1 {
        let mut all = Vec::new();
        for c in 0..cases {
            all.extend(suite_case(seed, c)?);
        }
        return Ok(all);
    }
    let mut handles = Vec::new();
    for t in 0..nthreads {
        let h = std::thread::spawn(move || -> Result<Vec<(usize, Vec<InequalityReport>)>, Error> {
            let mut mine = Vec::new();
            let mut c = t;
            while c < cases {
                mine.push((c, suite_case(seed, c)?));
                c += nthreads;
            }
            Ok(mine)
        });
        handles.push(h);
    }
    let mut indexed = Vec::new();
    for h in handles {
        indexed.extend(h.join().map_err(|_| Error::Parse("suite worker panicked".into()))??);
    }
    indexed.sort_by_key(|(c, _)| *c);
    Ok(indexed.into_iter().flat_map(|(_, r)| r).collect())
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            emit_error(&e);
            ExitCode::from(exit_code_for(&e))
        }
    }
}

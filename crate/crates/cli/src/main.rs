//! `zerohalf` command-line front end. Every run prints one JSON report on
//! standard output.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use zerohalf::halfclosure::{closure_from_cuts, generate_cuts, membership, HalfCut};
use zerohalf::polyhedra::{is_integral, reproduces_vertex, vertices, Integrality};
use zerohalf::reduction::{
    augment_min_degree, check_closure_integrality, max_stable_set, min_cuts_to_hull, verify_claims, CheckStatus,
};
use zerohalf::redundancy::irredundant_rows;
use zerohalf::scalar::{format_vector, parse_rational};
use zerohalf::tdi::{is_tdi, reduction_dual_certificate, verify_fractional_vertex_certificate};
use zerohalf::{Error, Graph, Limits, LinearSystem, Rational, ReductionInstance};

#[derive(Parser)]
#[command(name = "zerohalf", version, about = "Exact {0,1/2}-closures, vertices and TDI certificates")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Cap on enumerated GF(2) kernel elements.
    #[arg(long, global = true, default_value_t = zerohalf::DEFAULT_KERNEL_LIMIT)]
    kernel_limit: u64,
    /// Cap on integer candidates scanned in a box.
    #[arg(long, global = true, default_value_t = zerohalf::DEFAULT_BOX_LIMIT)]
    box_limit: u64,
    /// Cap on cut subsets tried by min-cuts.
    #[arg(long, global = true, default_value_t = zerohalf::DEFAULT_BASIS_LIMIT)]
    basis_limit: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Build the linear system of the Stable Set reduction.
    Reduce {
        graph: PathBuf,
        #[arg(long)]
        k: i64,
        /// Also write the system in text format here.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// All {0,1/2}-cuts of a system.
    Closure {
        system: PathBuf,
        /// Also write the closure system in text format here.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Vertices of a bounded system.
    Vertices { system: PathBuf },
    /// Whether the polytope (or with --closure its {0,1/2}-closure) is integral.
    Integral {
        system: PathBuf,
        #[arg(long)]
        closure: bool,
    },
    /// Whether a point lies in the {0,1/2}-closure.
    Membership {
        system: PathBuf,
        /// Comma separated rationals, e.g. 1/2,0,1.
        #[arg(long)]
        point: String,
    },
    /// Total dual integrality of a bounded system.
    Tdi { system: PathBuf },
    /// Maximum stable set of the augmented graph against k.
    StableSet {
        graph: PathBuf,
        #[arg(long)]
        k: i64,
    },
    /// Fewest cuts that make the polytope integral.
    MinCuts {
        system: PathBuf,
        #[arg(long)]
        budget: usize,
    },
    /// Every structural check of the reduction on one graph.
    VerifyClaims {
        graph: PathBuf,
        #[arg(long)]
        k: i64,
    },
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    inputs: Vec<InputDigest>,
    verdict: Value,
    certificates: Value,
    elapsed_seconds: f64,
}

enum Failure {
    Input(String),
    Limit(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::LimitExceeded { .. } | Error::TooLarge { .. } => Failure::Limit(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Verdict, certificates and whether every self-check passed.
struct Outcome {
    verdict: Value,
    certificates: Value,
    consistent: bool,
}

struct Run {
    limits: Limits,
    inputs: Vec<InputDigest>,
}

impl Run {
    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let digest = Sha256::digest(&bytes);
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        });
        String::from_utf8(bytes).map_err(|_| Failure::Input(format!("{}: not UTF-8", path.display())))
    }

    fn system(&mut self, path: &Path) -> Result<LinearSystem, Failure> {
        let text = self.read(path)?;
        LinearSystem::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }

    fn graph(&mut self, path: &Path) -> Result<Graph, Failure> {
        let text = self.read(path)?;
        Graph::parse_dimacs(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    if let Some(path) = path {
        fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("reports serialize")
}

fn parse_point(text: &str) -> Result<Vec<Rational>, Failure> {
    text.split(',')
        .enumerate()
        .map(|(i, tok)| parse_rational(tok).ok_or_else(|| Failure::Input(format!("point entry {}: `{tok}` is not a rational", i + 1))))
        .collect()
}

fn cut_records(cuts: &[HalfCut], sys: &LinearSystem) -> (Value, bool) {
    let rederived = cuts
        .iter()
        .all(|c| HalfCut::from_multiplier(sys, &c.multiplier).is_some_and(|d| d.cut == c.cut));
    (to_value(&cuts), rederived)
}

fn dispatch(command: &Command, run: &mut Run) -> Result<Outcome, Failure> {
    let limits = run.limits;
    match command {
        Command::Reduce { graph, k, output } => {
            let g = run.graph(graph)?;
            let inst = ReductionInstance::build(&g, *k)?;
            let text = inst.system.to_text();
            write_output(output, &text)?;
            Ok(Outcome {
                verdict: json!({
                    "n": inst.n,
                    "m": inst.m,
                    "rows": inst.system.len(),
                    "augmented": inst.graph != g,
                }),
                certificates: json!({ "graph": inst.graph, "system": text }),
                consistent: inst.gc_cardinality_cut_check(),
            })
        }
        Command::Closure { system, output } => {
            let sys = run.system(system)?;
            let family = generate_cuts(&sys, limits.kernel)?;
            write_output(output, &closure_from_cuts(&sys, &family).to_text())?;
            let (cuts, rederived) = cut_records(&family.cuts, &sys);
            Ok(Outcome {
                verdict: json!({
                    "kernel_dimension": family.kernel_dimension,
                    "cuts": family.len(),
                    "closure_empty": family.closure_empty,
                }),
                certificates: json!({ "cuts": cuts, "multiplicity": family.multiplicity }),
                consistent: rederived,
            })
        }
        Command::Vertices { system } => {
            let sys = run.system(system)?;
            let poly = vertices::<Rational>(&sys)?;
            let bases: Vec<Vec<usize>> = (0..poly.len()).map(|i| poly.basis(&sys, i)).collect();
            let consistent = poly.vertices.iter().zip(&bases).all(|(v, b)| reproduces_vertex(&sys, v, b));
            let integrality = is_integral(&sys, &poly);
            Ok(Outcome {
                verdict: json!({ "count": poly.len(), "integral": integrality.is_integral() }),
                certificates: json!({
                    "vertices": to_value(&poly)["vertices"],
                    "bases": bases,
                    "fractional_witness": fractional_witness(&integrality),
                }),
                consistent,
            })
        }
        Command::Integral { system, closure } => {
            let sys = run.system(system)?;
            let target = if *closure {
                closure_from_cuts(&sys, &generate_cuts(&sys, limits.kernel)?)
            } else {
                sys
            };
            let reduced = target.select(&irredundant_rows(&target)?);
            let poly = vertices::<Rational>(&reduced)?;
            let integrality = is_integral(&reduced, &poly);
            let consistent = match &integrality {
                Integrality::Integral => true,
                Integrality::Fractional { vertex, basis } => {
                    verify_fractional_vertex_certificate(&reduced, vertex, basis).valid
                }
            };
            Ok(Outcome {
                verdict: json!({ "integral": integrality.is_integral(), "vertices": poly.len() }),
                certificates: json!({
                    "fractional_witness": fractional_witness(&integrality),
                    "reduced_system": reduced.to_text(),
                }),
                consistent,
            })
        }
        Command::Membership { system, point } => {
            let sys = run.system(system)?;
            let point = parse_point(point)?;
            if point.len() != sys.n_vars() {
                return Err(Failure::Input(format!(
                    "point has {} entries, the system has {} variables",
                    point.len(),
                    sys.n_vars()
                )));
            }
            let cert = membership(&sys, &point, limits.kernel)?;
            Ok(Outcome {
                verdict: json!({ "member": cert.is_member() }),
                certificates: to_value(&cert),
                consistent: cert.verify_violation(&sys, &point),
            })
        }
        Command::Tdi { system } => tdi(&run.system(system)?, &limits),
        Command::StableSet { graph, k } => {
            let g = run.graph(graph)?;
            let augmented = augment_min_degree(&g);
            let best = max_stable_set(&augmented)?;
            Ok(Outcome {
                verdict: json!({
                    "alpha": best.size,
                    "k": k,
                    "stable_set_of_size_k": best.size as i64 >= *k,
                }),
                certificates: json!({ "graph": augmented, "stable_set": best.nodes }),
                consistent: augmented.is_stable(&best.nodes),
            })
        }
        Command::MinCuts { system, budget } => {
            let sys = run.system(system)?;
            let found = min_cuts_to_hull(&sys, *budget, &limits)?;
            let (cuts, rederived) = match &found {
                Some(m) => cut_records(&m.cuts, &sys),
                None => (Value::Null, true),
            };
            Ok(Outcome {
                verdict: json!({ "budget": budget, "count": found.as_ref().map(|m| m.count) }),
                certificates: json!({ "cuts": cuts }),
                consistent: rederived,
            })
        }
        Command::VerifyClaims { graph, k } => {
            let g = run.graph(graph)?;
            let checks = verify_claims(&g, *k, &limits)?;
            for c in &checks {
                let status = match c.status {
                    CheckStatus::Pass => "PASS",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Skipped => "SKIP",
                };
                eprintln!("{status:<5} {:<52} {}", c.name, c.detail);
            }
            let inst = ReductionInstance::build(&g, *k)?;
            let closure = check_closure_integrality(&inst, limits.kernel)?;
            let oracle = zerohalf::reduction::decide_via_graph(&g, *k)?;
            Ok(Outcome {
                verdict: json!({ "closure_integral": closure.integral, "oracle": oracle }),
                certificates: json!({ "checks": checks, "closure": closure }),
                consistent: checks.iter().all(|c| c.status != CheckStatus::Fail),
            })
        }
    }
}

fn fractional_witness(integrality: &Integrality) -> Value {
    match integrality {
        Integrality::Integral => Value::Null,
        Integrality::Fractional { vertex, basis } => json!({ "vertex": format_vector(vertex), "basis": basis }),
    }
}

/// Systems whose polytope is a unit simplex and that contain the rows
/// `±1ᵀx <= ±1` and `-x <= 0` are TDI by an explicit integral dual; everything
/// else goes through the Hilbert basis checker.
fn tdi(sys: &LinearSystem, limits: &Limits) -> Result<Outcome, Failure> {
    let n = sys.n_vars();
    let reduced = sys.select(&irredundant_rows(sys)?);
    let poly = vertices::<Rational>(&reduced)?;
    let simplex = poly.len() == n
        && poly.vertices.iter().rev().enumerate().all(|(i, v)| {
            v.iter().enumerate().all(|(j, x)| *x == Rational::from_integer(((i == j) as i64).into()))
        });
    if simplex {
        let mut objectives: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| (i == j) as i64).collect())
            .collect();
        objectives.push(vec![-1; n]);
        objectives.push(vec![0; n]);
        let certs: Result<Vec<_>, Error> = objectives.iter().map(|c| reduction_dual_certificate(sys, c)).collect();
        if let Ok(certs) = certs {
            let consistent = certs.iter().all(|c| c.recombines(sys) && c.value_matches(&reduced));
            return Ok(Outcome {
                verdict: json!({ "tdi": true, "method": "cardinality-rows" }),
                certificates: json!({ "samples": certs }),
                consistent,
            });
        }
    }
    let verdict = is_tdi(sys, limits.boxes)?;
    let consistent = match (&verdict.failing_vertex, verdict.shortcut) {
        (Some(v), true) => {
            let basis = &poly.basis(&reduced, poly.vertices.iter().position(|w| w == v).unwrap_or(0));
            let rows: Vec<usize> = basis.iter().map(|&r| reduced_row_in(sys, &reduced, r)).collect();
            verify_fractional_vertex_certificate(sys, v, &rows).valid
        }
        _ => true,
    };
    let method = if verdict.shortcut { "fractional-vertex" } else { "hilbert-basis" };
    Ok(Outcome {
        verdict: json!({ "tdi": verdict.tdi, "method": method }),
        certificates: to_value(&verdict),
        consistent,
    })
}

fn reduced_row_in(sys: &LinearSystem, reduced: &LinearSystem, r: usize) -> usize {
    let row = reduced.row(r);
    sys.rows().iter().position(|s| s == row).expect("reduced rows come from the system")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let limits = Limits {
        kernel: cli.global.kernel_limit,
        boxes: cli.global.box_limit,
        basis: cli.global.basis_limit,
    };
    let name = match &cli.command {
        Command::Reduce { .. } => "reduce",
        Command::Closure { .. } => "closure",
        Command::Vertices { .. } => "vertices",
        Command::Integral { .. } => "integral",
        Command::Membership { .. } => "membership",
        Command::Tdi { .. } => "tdi",
        Command::StableSet { .. } => "stable-set",
        Command::MinCuts { .. } => "min-cuts",
        Command::VerifyClaims { .. } => "verify-claims",
    };
    let start = Instant::now();
    let mut run = Run {
        limits,
        inputs: Vec::new(),
    };
    match dispatch(&cli.command, &mut run) {
        Ok(outcome) => {
            let report = RunReport {
                command: name,
                inputs: run.inputs,
                verdict: outcome.verdict,
                certificates: outcome.certificates,
                elapsed_seconds: start.elapsed().as_secs_f64(),
            };
            // a closed pipe downstream is not an error of the run
            let _ = writeln!(io::stdout().lock(), "{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
            if outcome.consistent {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: a property check failed");
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Limit(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

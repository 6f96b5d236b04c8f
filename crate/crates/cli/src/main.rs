//! `schauder`: command-line access to the schauder-core library.
//!
//! Exit status: 0 on a computed result (negative verdicts included), 2 when
//! the input is rejected, 3 when a computation fails.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use schauder::decomposition::{validate_family, ProjectionFamily, ValidationOptions};
use schauder::geometry::{
    besselian_constant, hilbertian_constant, khintchine_constants, lp_sandwich, min_max_sign_norm, or_type_probe,
    rademacher_average, random_vector_sets, riesz_constant, type_cotype_check, unconditional_constant, AveragePower,
    CoefficientSet, ProbeKind, SignMode,
};
use schauder::io::{
    candidates_from_json, family_from_json, norm_from_json, norm_label, orlicz_from_json, parse_norm, parse_orlicz,
    parse_vector, read_json, scenario_from_json, subspaces_from_json, Scenario,
};
use schauder::nalgebra::DVector;
use schauder::orlicz::{delta2_margin, NormSpec, OrliczFunction};
use schauder::report::ConstantRow;
use schauder::scenario::line_pair;
use schauder::stability::{
    c0_stability_check, check_opening_condition, hilbertian_stability_check, kato_check, lambda_threshold, opening,
    perturbation_sigma,
};
use schauder::sweep::{angle_sweep, epsilon_sweep, khintchine_sweep, parse_grid, SweepParameter};
use schauder::Error;

use output::{object, render, Format, Report};

#[derive(Parser)]
#[command(name = "schauder", version, about = "Orlicz norms, Schauder decompositions and their stability")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Seed for every sampled quantity.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Sphere samples for constants that are not computed exactly.
    #[arg(long, default_value_t = 256, global = true)]
    samples: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Norm of a vector: a Luxemburg norm (--phi) or any ambient norm (--norm).
    Norm {
        #[arg(long, conflicts_with = "norm", required_unless_present = "norm")]
        phi: Option<String>,
        #[arg(long)]
        norm: Option<String>,
        /// Comma-separated entries.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Sampled Δ₂ ratios Φ(2t)/Φ(t) toward zero.
    Delta2 {
        #[arg(long)]
        phi: String,
        #[arg(long, default_value = "log:1:1e-6:61")]
        grid: String,
    },
    /// Riesz, Hilbertian, Besselian and unconditional constants of a family.
    Constants {
        #[arg(long)]
        family: String,
        /// Aggregate norm on block-norm profiles.
        #[arg(long, default_value = "l2")]
        psi: String,
        #[arg(long, default_value = "zero-one")]
        coefficients: String,
        #[arg(long, value_delimiter = ',', default_value = "riesz,hilbertian,besselian,unconditional")]
        which: Vec<String>,
        #[command(flatten)]
        validation: Validation,
    },
    /// Exact Rademacher averages and extreme sign sums of a vector list.
    Rademacher {
        /// `1,0;0,1` or a JSON file holding a list of vectors.
        #[arg(long, allow_hyphen_values = true)]
        vectors: String,
        #[arg(long, default_value = "l2")]
        norm: String,
    },
    /// Block sandwich check on a family, or a Rademacher inequality probe.
    TypeCotype(TypeCotypeArgs),
    /// Khintchine constants, and the ℓ_p sandwich when --m is given.
    Khintchine {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        m: Option<f64>,
    },
    /// Opening between two subspaces.
    Opening {
        #[arg(long, conflicts_with = "angle", required_unless_present = "angle")]
        subspaces: Option<String>,
        /// Two lines in the plane at this angle, in degrees.
        #[arg(long)]
        angle: Option<f64>,
        #[arg(long, default_value = "l2")]
        norm: String,
    },
    /// The admissible opening budget λ, and the opening condition for candidates.
    Lambda {
        #[arg(long, conflicts_with = "candidates", required_unless_present = "candidates")]
        family: Option<String>,
        #[arg(long)]
        candidates: Option<String>,
    },
    /// Perturbation constant of a scenario.
    Sigma {
        #[arg(long)]
        scenario: String,
    },
    /// Euclidean quadratic hypothesis and the similarity construction.
    Kato {
        #[arg(long)]
        scenario: String,
    },
    /// Hilbertian stability hypothesis and the similarity construction.
    Similarity {
        #[arg(long)]
        scenario: String,
    },
    /// Max-norm stability hypothesis and the similarity construction.
    C0Check {
        #[arg(long)]
        scenario: String,
        /// Overrides the scenario's `C`.
        #[arg(long)]
        c: Option<f64>,
    },
    /// One row per grid point over epsilon, angle (degrees) or p.
    Sweep {
        #[arg(long)]
        parameter: String,
        /// `a,b,c`, `lin:a:b:n` or `log:a:b:n`.
        #[arg(long)]
        grid: String,
        /// Base scenario for epsilon sweeps; its `J` is replaced at each point.
        #[arg(long)]
        scenario: Option<String>,
        /// Ambient norm for angle sweeps.
        #[arg(long, default_value = "l2")]
        norm: String,
    },
}

#[derive(Args)]
struct Validation {
    /// Accept families whose blocks do not sum to the identity.
    #[arg(long)]
    allow_incomplete: bool,
}

#[derive(Args)]
struct TypeCotypeArgs {
    #[arg(long)]
    family: Option<String>,
    /// Take constants and aggregates from the ℓ_p sandwich with this p.
    #[arg(long, requires = "m")]
    sandwich_p: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    /// Upper aggregate and its constant.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    t: Option<f64>,
    /// Lower aggregate and its constant.
    #[arg(long)]
    psi: Option<String>,
    #[arg(long)]
    c: Option<f64>,
    /// Probe mode: type, cotype, infratype or m-cotype.
    #[arg(long, conflicts_with = "family")]
    probe: Option<String>,
    #[arg(long, default_value = "l2")]
    norm: String,
    #[arg(long, default_value = "l2")]
    aggregate: String,
    #[arg(long)]
    candidate: Option<f64>,
    #[arg(long, default_value_t = 4)]
    dim: usize,
    #[arg(long, default_value_t = 100)]
    sets: usize,
    #[arg(long, default_value_t = 4)]
    size: usize,
}

type Result<T> = std::result::Result<T, Error>;

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn to_value<S: Serialize>(s: &S) -> Result<Value> {
    Ok(serde_json::to_value(s)?)
}

/// Inline JSON, a path to a JSON file, or `None` for shorthand.
fn document(arg: &str) -> Result<Option<Value>> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(Some(serde_json::from_str(t)?));
    }
    let path = Path::new(arg);
    if path.is_file() {
        return read_json(path).map(Some);
    }
    Ok(None)
}

fn load_orlicz(arg: &str) -> Result<OrliczFunction<f64>> {
    match document(arg)? {
        Some(v) => orlicz_from_json(v),
        None => parse_orlicz(arg),
    }
}

fn load_norm(arg: &str) -> Result<NormSpec<f64>> {
    match document(arg)? {
        Some(v) => norm_from_json(v),
        None => parse_norm(arg),
    }
}

fn required_doc(arg: &str) -> Result<Value> {
    document(arg)?.ok_or_else(|| usage(format!("no such file: {arg}")))
}

fn check_family(fam: &ProjectionFamily<f64>, allow_incomplete: bool, label: &str) -> Result<()> {
    let mut opts = ValidationOptions::default_for(fam);
    opts.require_completeness = !allow_incomplete;
    let report = validate_family(fam, opts);
    if report.passed {
        Ok(())
    } else {
        Err(usage(format!("{label} is not a projection family: {}", report.summary())))
    }
}

fn load_scenario(arg: &str) -> Result<Scenario<f64>> {
    let s = scenario_from_json(required_doc(arg)?)?;
    check_family(&s.p, false, "P")?;
    check_family(&s.j, false, "J")?;
    Ok(s)
}

fn rows<S: Serialize>(items: &[S]) -> Result<Report> {
    Ok(Report::Rows(items.iter().map(to_value).collect::<Result<_>>()?))
}

fn run(cmd: Command, common: &Common) -> Result<Report> {
    let (samples, seed) = (common.samples, common.seed);
    match cmd {
        Command::Norm { phi, norm, x } => {
            let spec = match (phi, norm) {
                (Some(p), _) => NormSpec::orlicz(load_orlicz(&p)?),
                (None, Some(n)) => load_norm(&n)?,
                (None, None) => return Err(usage("give --phi or --norm")),
            };
            let x = parse_vector::<f64>(&x)?;
            let value = match &spec {
                NormSpec::Orlicz { phi } => schauder::orlicz::luxemburg_norm(phi, &x)?,
                other => other.norm(&x),
            };
            Ok(Report::Single {
                value: object(vec![("norm", json!(norm_label(&spec))), ("value", json!(value))]),
                headline: Some(output::round12(value)),
            })
        }
        Command::Delta2 { phi, grid } => {
            let phi = load_orlicz(&phi)?;
            let grid = parse_grid(&grid)?;
            Ok(Report::single(to_value(&delta2_margin(&phi, &grid)?)?))
        }
        Command::Constants { family, psi, coefficients, which, validation } => {
            let fam = family_from_json::<f64>(required_doc(&family)?)?;
            check_family(&fam, validation.allow_incomplete, "family")?;
            let psi = load_norm(&psi)?;
            let set: CoefficientSet = coefficients.parse()?;
            let mut out = Vec::new();
            for name in &which {
                let est = match name.as_str() {
                    "riesz" => riesz_constant(&fam)?,
                    "hilbertian" => hilbertian_constant(&fam, &psi, samples, seed)?,
                    "besselian" => besselian_constant(&fam, &psi, samples, seed)?,
                    "unconditional" => unconditional_constant(&fam, set, samples, seed)?,
                    other => return Err(usage(format!("unknown constant {other:?}"))),
                };
                let label =
                    if name == "unconditional" { format!("unconditional/{}", set.as_str()) } else { name.clone() };
                out.push(ConstantRow::new(label, &est));
            }
            rows(&out)
        }
        Command::Rademacher { vectors, norm } => {
            let vs: Vec<Vec<f64>> = match document(&vectors)? {
                Some(v) => serde_json::from_value(v)?,
                None => vectors.split(';').map(parse_vector).collect::<Result<_>>()?,
            };
            let vs: Vec<_> = vs.into_iter().map(nalgebra_vector).collect();
            let norm = load_norm(&norm)?;
            let min = min_max_sign_norm(&vs, &norm, SignMode::Min)?;
            let max = min_max_sign_norm(&vs, &norm, SignMode::Max)?;
            Ok(Report::single(object(vec![
                ("mean", json!(rademacher_average(&vs, &norm, AveragePower::Mean)?)),
                ("quadratic", json!(rademacher_average(&vs, &norm, AveragePower::Quadratic)?)),
                ("min", json!(min.value)),
                ("min_witness", json!(min.witness.describe())),
                ("max", json!(max.value)),
                ("max_witness", json!(max.witness.describe())),
                ("patterns", json!(max.trials)),
            ])))
        }
        Command::TypeCotype(a) => type_cotype(a, samples, seed),
        Command::Khintchine { p, m } => {
            let k = khintchine_constants(p)?;
            let mut v = to_value(&k)?;
            if let Some(m) = m {
                v["sandwich"] = to_value(&lp_sandwich(p, m)?)?;
            }
            Ok(Report::single(v))
        }
        Command::Opening { subspaces, angle, norm } => {
            let (a, b) = match (subspaces, angle) {
                (Some(doc), _) => subspaces_from_json::<f64>(required_doc(&doc)?)?,
                (None, Some(deg)) => line_pair(deg.to_radians(), load_norm(&norm)?)?,
                (None, None) => return Err(usage("give --subspaces or --angle")),
            };
            let ambient = a.space().norm.clone();
            Ok(Report::single(to_value(&opening(&a, &b, &ambient, samples, seed)?)?))
        }
        Command::Lambda { family, candidates } => match (family, candidates) {
            (_, Some(doc)) => {
                let (fam, cands, p) = candidates_from_json::<f64>(required_doc(&doc)?)?;
                check_family(&fam, false, "family")?;
                Ok(Report::single(to_value(&check_opening_condition(&fam, &cands, p, samples, seed)?)?))
            }
            (Some(doc), None) => {
                let fam = family_from_json::<f64>(required_doc(&doc)?)?;
                check_family(&fam, false, "family")?;
                Ok(Report::single(to_value(&lambda_threshold(&fam))?))
            }
            (None, None) => Err(usage("give --family or --candidates")),
        },
        Command::Sigma { scenario } => {
            let s = load_scenario(&scenario)?;
            Ok(Report::single(to_value(&perturbation_sigma(&s.p, &s.j, &s.psi, samples, seed)?)?))
        }
        Command::Kato { scenario } => {
            let s = load_scenario(&scenario)?;
            Ok(Report::single(to_value(&kato_check(&s.p, &s.j)?)?))
        }
        Command::Similarity { scenario } => {
            let s = load_scenario(&scenario)?;
            Ok(Report::single(to_value(&hilbertian_stability_check(&s.p, &s.j, &s.psi, s.c, samples, seed)?)?))
        }
        Command::C0Check { scenario, c } => {
            let s = load_scenario(&scenario)?;
            let c = c.or(s.c).ok_or_else(|| usage("the c0 check needs a constant C (--c or \"C\" in the scenario)"))?;
            Ok(Report::single(to_value(&c0_stability_check(&s.p, &s.j, c)?)?))
        }
        Command::Sweep { parameter, grid, scenario, norm } => {
            let grid = parse_grid(&grid)?;
            match parameter.parse::<SweepParameter>()? {
                SweepParameter::Epsilon => {
                    let doc = scenario.ok_or_else(|| usage("an epsilon sweep needs --scenario"))?;
                    let s = load_scenario(&doc)?;
                    rows(&epsilon_sweep(&s.p, &s.psi, s.c, &grid, samples, seed)?)
                }
                SweepParameter::Angle => rows(&angle_sweep(&load_norm(&norm)?, &grid, samples, seed)?),
                SweepParameter::P => rows(&khintchine_sweep::<f64>(&grid)?),
            }
        }
    }
}

fn nalgebra_vector(v: Vec<f64>) -> DVector<f64> {
    DVector::from_vec(v)
}

fn type_cotype(a: TypeCotypeArgs, samples: usize, seed: u64) -> Result<Report> {
    if let Some(kind) = a.probe {
        let kind: ProbeKind = kind.parse()?;
        let candidate = a.candidate.ok_or_else(|| usage("a probe needs --candidate"))?;
        let sets = random_vector_sets::<f64>(a.dim, a.sets, a.size, seed);
        let report = or_type_probe(&sets, &load_norm(&a.aggregate)?, &load_norm(&a.norm)?, candidate, kind)?;
        return Ok(Report::single(to_value(&report)?));
    }
    let doc = a.family.ok_or_else(|| usage("give --family or --probe"))?;
    let fam = family_from_json::<f64>(required_doc(&doc)?)?;
    check_family(&fam, false, "family")?;
    let (phi, t, psi, c) = match a.sandwich_p {
        Some(p) => {
            let s = lp_sandwich(p, a.m.unwrap_or(1.0))?;
            (s.right_aggregate, s.right, s.left_aggregate, s.left)
        }
        None => {
            let need = |o: Option<f64>, name: &str| o.ok_or_else(|| usage(format!("missing --{name}")));
            let phi = a.phi.as_deref().ok_or_else(|| usage("missing --phi"))?;
            let psi = a.psi.as_deref().ok_or_else(|| usage("missing --psi"))?;
            (load_norm(phi)?, need(a.t, "t")?, load_norm(psi)?, need(a.c, "c")?)
        }
    };
    let report = type_cotype_check(&fam, &phi, &psi, t, c, samples, seed)?;
    let mut v = to_value(&report)?;
    v["right_aggregate"] = json!(norm_label(&phi));
    v["t"] = json!(t);
    v["left_aggregate"] = json!(norm_label(&psi));
    v["c"] = json!(c);
    Ok(Report::single(v))
}

fn emit(text: &str, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli.command, &cli.common).and_then(|report| {
        let text = render(&report, cli.common.format)?;
        emit(&text, cli.common.output.as_deref())?;
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("schauder: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}

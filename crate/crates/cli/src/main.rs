//! `dpwai`: analyze planar polynomial vector fields for Darboux first
//! integrals built from curves with one place at infinity.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dpwai_core::algebra::{guard, interval, Poly};
use dpwai_core::darboux::{first_integral, AnalysisOptions};
use dpwai_core::error::Error;
use dpwai_core::generator::{build_form, default_tower, random_spec};
use dpwai_core::input::{parse, parse_constant, parse_integral, Body, InputDocument};
use dpwai_core::reduction::{continued_fraction, digits_u64, prox_of};
use dpwai_core::report::{integral_text, write_artifacts};
use num_traits::{Signed, Zero};
use serde_json::json;

const EXIT_ZERO: u8 = 10;
const EXIT_VERIFY_FAILED: u8 = 11;
const EXIT_IO: u8 = 27;

#[derive(Parser)]
#[command(name = "dpwai", version, about = "Darboux first integrals via the extended reduction over the line at infinity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Tuning {
    /// Cap on blown-up and extension points.
    #[arg(long)]
    budget_points: Option<usize>,
    /// Continued-fraction digits reported per chain.
    #[arg(long)]
    cf_depth: Option<usize>,
    /// Largest interval precision, in bits.
    #[arg(long)]
    precision_max: Option<u32>,
    /// Worker threads for independent sub-analyses.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the algorithm and write report.json, integral.txt, omega.dot and chains/*.dot.
    Analyze {
        input: PathBuf,
        #[arg(short, long, default_value = "dpwai-out")]
        out: PathBuf,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Build a system with a prescribed integral; writes system.dpw and truth.json.
    Generate {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long, default_value = "dpwai-gen")]
        out: PathBuf,
    },
    /// Check that a product of powers is a first integral of the input system.
    Verify {
        input: PathBuf,
        /// Integral in the format of integral.txt, e.g. "(x)^pi * (y)".
        #[arg(long)]
        integral: String,
    },
    /// Continued-fraction digits and proximity chain of a positive number.
    Prox {
        /// Expression over the constants, e.g. "17/6" or "(4+8*r2)/pi".
        #[arg(allow_hyphen_values = true)]
        ratio: String,
        /// Document whose constant declarations are used; defaults to pi and r2.
        #[arg(long)]
        constants: Option<PathBuf>,
        #[arg(long)]
        cf_depth: Option<usize>,
        #[arg(long)]
        precision_max: Option<u32>,
        /// Write the DOT graph here instead of standard output.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::UndeclaredSymbol { .. } | Error::NonPolynomial { .. } | Error::InvalidConstant(_) => 20,
        Error::UnsupportedAlgebraicPoint { .. } => 21,
        Error::PrecisionExhausted { .. } => 22,
        Error::BudgetExceeded { .. } => 23,
        Error::DegenerateInfinity => 24,
        Error::NonInvertible { .. } => 25,
        Error::DivisionByZero | Error::NotCoprime { .. } | Error::InvalidSystem(_) | Error::InvalidSpec(_) => 26,
        Error::ShearFailure { .. } => 28,
    }
}

enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn io<T>(r: std::io::Result<T>, what: &Path) -> Result<T, Failure> {
    r.map_err(|e| Failure::Io(format!("{}: {e}", what.display())))
}

fn read_document(path: &Path) -> Result<InputDocument, Failure> {
    let text = io(fs::read_to_string(path), path)?;
    Ok(parse(&text)?)
}

fn options(doc: Option<&InputDocument>, t: &Tuning) -> AnalysisOptions {
    let mut o = AnalysisOptions::default();
    if let Some(doc) = doc {
        let get = |k: &str| doc.options.get(k).copied().filter(|v| *v > 0);
        if let Some(v) = get("budget_points") {
            o.budget_points = v as usize;
        }
        if let Some(v) = get("cf_depth") {
            o.cf_depth = v as usize;
        }
        if let Some(v) = get("precision_max") {
            o.precision_cap = v as u32;
        }
    }
    o.budget_points = t.budget_points.unwrap_or(o.budget_points);
    o.cf_depth = t.cf_depth.unwrap_or(o.cf_depth);
    o.precision_cap = t.precision_max.unwrap_or(o.precision_cap);
    o.jobs = t.jobs.unwrap_or(1).max(1);
    o
}

fn analyze(input: &Path, out: &Path, tuning: &Tuning) -> Result<u8, Failure> {
    let doc = read_document(input)?;
    let opts = options(Some(&doc), tuning);
    let system = doc.system()?;
    let analysis = first_integral(&system, doc.tower.symbols(), &opts)?;
    io(write_artifacts(out, &analysis, &doc.render(), &doc.tower, &doc.approximations), out)?;
    print!("{}", integral_text(&analysis));
    if let Some(z) = &analysis.zero {
        eprintln!("algorithm returned 0: {}", z.reason);
        return Ok(EXIT_ZERO);
    }
    Ok(0)
}

fn generate(seed: u64, out: &Path) -> Result<u8, Failure> {
    let tower = default_tower();
    let spec = random_spec(seed, &tower)?;
    let system = build_form(&spec)?;
    let approximations = vec![
        "3.14159265358979323846264338327950288419716939937510582097494459".to_string(),
        "1.41421356237309504880168872420969807856967187537694807317667973".to_string(),
    ];
    let doc = InputDocument {
        tower: tower.clone(),
        approximations,
        body: Body::System { p: system.p.clone(), q: system.q.clone() },
        options: Default::default(),
    };
    io(fs::create_dir_all(out), out)?;
    let file = out.join("system.dpw");
    io(fs::write(&file, doc.render()), &file)?;
    let truth = json!({
        "seed": seed,
        "curves": spec.curves.iter().map(|c| c.render(&["x", "y"])).collect::<Vec<_>>(),
        "alpha": spec.alpha.iter().map(|a| json!({ "exact": a.to_string(), "approx": interval::approx_string(a, 20) })).collect::<Vec<_>>(),
    });
    let file = out.join("truth.json");
    let mut text = serde_json::to_string_pretty(&truth).expect("truth serializes");
    text.push('\n');
    io(fs::write(&file, text), &file)?;
    println!("{}", file.display());
    Ok(0)
}

fn verify(input: &Path, integral: &str) -> Result<u8, Failure> {
    let doc = read_document(input)?;
    let system = doc.system()?;
    let factors = parse_integral(integral, &doc.tower)?;
    let ok = guard(|| {
        let mut sum = Poly::zero(2);
        for (f, e) in &factors {
            match system.cofactor(f) {
                Some(k) => sum = &sum + &k.scale(e),
                None => {
                    eprintln!("{} is not invariant", f.render(&["x", "y"]));
                    return Ok(false);
                }
            }
        }
        Ok(sum.is_zero())
    })?;
    if ok {
        println!("verified");
        Ok(0)
    } else {
        eprintln!("not a first integral");
        Ok(EXIT_VERIFY_FAILED)
    }
}

fn prox(ratio: &str, constants: Option<&Path>, depth: Option<usize>, cap: Option<u32>, out: Option<&Path>) -> Result<u8, Failure> {
    let tower = match constants {
        Some(path) => read_document(path)?.tower,
        None => default_tower(),
    };
    let defaults = AnalysisOptions::default();
    let (depth, cap) = (depth.unwrap_or(defaults.cf_depth), cap.unwrap_or(defaults.precision_cap));
    let value = parse_constant(ratio, &tower)?;
    let cf = guard(|| continued_fraction(&value, depth, cap))?;
    let positive = cf.digits.first().is_some_and(|d| d.is_positive() || (d.is_zero() && cf.digits.len() > 1));
    if !positive {
        return Err(Error::InvalidSpec(format!("{ratio} is not positive")).into());
    }
    let digits = digits_u64(&cf);
    let p = prox_of(&digits, cf.terminated);
    let text: Vec<String> = cf.digits.iter().map(|d| d.to_string()).collect();
    let shown = match text.split_first() {
        Some((head, [])) => format!("[{head}]"),
        Some((head, rest)) => format!("[{head};{}]", rest.join(",")),
        None => "[]".to_string(),
    };
    println!("digits {shown}{}", if cf.terminated { "" } else { " ..." });
    if let Some(m) = &p.multiplicities {
        println!("multiplicities {m:?}");
    }
    let dot = p.prefix.to_dot("prox");
    match out {
        Some(path) => io(fs::write(path, dot), path)?,
        None => print!("{dot}"),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze { input, out, tuning } => analyze(input, out, tuning),
        Command::Generate { seed, out } => generate(*seed, out),
        Command::Verify { input, integral } => verify(input, integral),
        Command::Prox { ratio, constants, cf_depth, precision_max, out } => {
            prox(ratio, constants.as_deref(), *cf_depth, *precision_max, out.as_deref())
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}

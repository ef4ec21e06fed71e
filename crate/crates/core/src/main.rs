//! classforge command line.
//!
//! Exit codes: 0 success, 1 computation failure or replay mismatch,
//! 2 configuration error, 3 refutation candidate found.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use classforge::bh::{self, BhParams};
use classforge::bqf::{self, Form};
use classforge::elliptic::{self, Curve, Point, PointOrder};
use classforge::pipeline::{
    self, Certificate, SearchReport, SquarefreePolicy, Thm11Config, Thm12Config,
};
use classforge::{soleng, Error};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_REFUTATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "classforge",
    version,
    about = "Elliptic torsion to ideal class witnesses"
)]
struct Cli {
    /// key = value file supplying defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rational torsion subgroup of y^2 = x^3 + a2 x^2 + a4 x + a6.
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Torsion {
        #[arg(long, value_parser = parse_curve)]
        curve: Curve,
    },
    /// Quadratic twist of y^2 = x^3 + a x + b by d.
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Twist {
        #[arg(long)]
        a: BigInt,
        #[arg(long)]
        b: BigInt,
        #[arg(long)]
        d: BigInt,
    },
    /// Ideal class attached to a primitive point.
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Soleng {
        #[arg(long, value_parser = parse_curve)]
        curve: Curve,
        /// A,B,C for the point (A/C^2, B/C^3), or "inf".
        #[arg(long, value_parser = parse_point)]
        point: Point,
    },
    /// Class number of a discriminant.
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Classnum {
        #[arg(long)]
        disc: BigInt,
    },
    /// Order of a form class.
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Order {
        #[arg(long, value_parser = parse_form)]
        form: Form,
    },
    /// The form (p, 2k, p^(l-1)) and its exact order.
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Bh {
        #[arg(long)]
        k: BigInt,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        p: BigInt,
    },
    /// Sweep primes p, shifting the twisted curve's torsion generator by p.
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Thm11 {
        #[arg(long)]
        a: BigInt,
        #[arg(long)]
        b: BigInt,
        #[arg(long)]
        d: BigInt,
        #[arg(long)]
        pmin: BigInt,
        #[arg(long)]
        pmax: BigInt,
        #[command(flatten)]
        out: SweepOutput,
    },
    /// Sweep pairs (p, q), combining the BH witness at p with the curve witness at q.
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Thm12 {
        #[arg(long)]
        k: BigInt,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        pmin: BigInt,
        #[arg(long)]
        pmax: BigInt,
        #[arg(long)]
        a: BigInt,
        #[arg(long)]
        b: BigInt,
        #[arg(long)]
        d: BigInt,
        #[arg(long)]
        qmin: BigInt,
        #[arg(long)]
        qmax: BigInt,
        #[command(flatten)]
        out: SweepOutput,
    },
    /// Recompute certificates from a JSON file and compare byte for byte.
    #[command(args_override_self = true)]
    Replay {
        #[arg(long)]
        cert: PathBuf,
    },
}

#[derive(Args)]
struct SweepOutput {
    #[arg(long, default_value = "require")]
    squarefree: SquarefreePolicy,
    /// Write the certificate array here.
    #[arg(long, value_name = "FILE")]
    json: Option<PathBuf>,
}

fn parse_curve(s: &str) -> Result<Curve, String> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    let n = |t: &str| BigInt::from_str(t).map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [a, b] => Ok(Curve::short(n(a)?, n(b)?)),
        [a2, a4, a6] => Ok(Curve::new(n(a2)?, n(a4)?, n(a6)?)),
        _ => Err(format!("expected [a2,a4,a6] or [a,b], got {s:?}")),
    }
}

fn parse_point(s: &str) -> Result<Point, String> {
    if s.trim().eq_ignore_ascii_case("inf") {
        return Ok(Point::Infinity);
    }
    let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    let n = |t: &str| BigInt::from_str(t).map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [a, b] => Ok(Point::integral(n(a)?, n(b)?)),
        [a, b, c] => Point::affine(n(a)?, n(b)?, n(c)?).map_err(|e| e.to_string()),
        _ => Err(format!("expected A,B,C, got {s:?}")),
    }
}

fn parse_form(s: &str) -> Result<Form, String> {
    s.parse::<Form>().map_err(|e| e.to_string())
}

/// Turns `key = value` lines into `--key value` arguments.
fn config_args(path: &Path) -> Result<Vec<String>, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "{}:{}: expected key = value",
                path.display(),
                i + 1
            ))
        })?;
        out.push(format!("--{}", k.trim().trim_start_matches("--")));
        out.push(v.trim().to_string());
    }
    Ok(out)
}

/// Splices config-file arguments in front of the user's subcommand flags so
/// that explicit flags win.
fn expand_args(raw: Vec<String>) -> Result<Vec<String>, Error> {
    let mut args = Vec::with_capacity(raw.len());
    let mut config = None;
    let mut it = raw.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            config = Some(
                it.next()
                    .ok_or_else(|| Error::Config("--config needs a file".into()))?,
            );
        } else if let Some(path) = a.strip_prefix("--config=") {
            config = Some(path.to_string());
        } else {
            args.push(a);
        }
    }
    let Some(path) = config else { return Ok(args) };
    let extra = config_args(Path::new(&path))?;
    let sub = args
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|i| i + 2)
        .unwrap_or(args.len());
    args.splice(sub..sub, extra);
    Ok(args)
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn main() -> ExitCode {
    let args = match expand_args(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let cli = Cli::parse_from(args);
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn run(cmd: Cmd) -> Result<u8, Error> {
    match cmd {
        Cmd::Torsion { curve } => {
            let t = curve.torsion_subgroup()?;
            println!("curve {curve}");
            println!("torsion {} (order {})", t.shape, t.order());
            for p in &t.points {
                match curve.point_order(p)? {
                    PointOrder::Finite(k) => println!("  {p}  order {k}"),
                    PointOrder::NonTorsion => println!("  {p}  non-torsion"),
                }
            }
            println!("generator {} of order {}", t.generator, t.generator_order());
        }
        Cmd::Twist { a, b, d } => {
            let curve = elliptic::twist(&a, &b, &d)?;
            println!("y^2 = x^3 + ({}) x + ({})", curve.a4, curve.a6);
            println!("curve {curve}");
        }
        Cmd::Soleng { curve, point } => {
            let ideal = soleng::point_to_ideal(&curve, &point)?;
            let class = soleng::soleng_class(&curve, &point)?;
            println!("ideal {ideal}  k = {}", ideal.multiplier_k);
            println!("class {}  discriminant {}", class.form, class.discriminant);
            println!("order {}", bqf::class_order(&class.form)?);
        }
        Cmd::Classnum { disc } => {
            let h = if disc < BigInt::from(0) {
                bqf::class_number_imag(&disc)?
            } else {
                bqf::class_number_real(&disc)?
            };
            println!("h({disc}) = {h}");
        }
        Cmd::Order { form } => {
            let reduced = form.reduce()?;
            println!("{form} ~ {reduced}  discriminant {}", form.discriminant());
            println!("order {}", bqf::class_order(&reduced)?);
        }
        Cmd::Bh { k, l, p } => {
            let cert = bh::bh_certificate(&BhParams::new(k, l, p))?;
            println!("{}", cert.summary());
            if let Some(o) = cert.fundamental_order {
                println!(
                    "order at the fundamental discriminant {}: {o}",
                    cert.radicand
                );
            }
        }
        Cmd::Thm11 {
            a,
            b,
            d,
            pmin,
            pmax,
            out,
        } => {
            let cfg = Thm11Config {
                a,
                b,
                d,
                prime_lo: pmin,
                prime_hi: pmax,
                squarefree_policy: out.squarefree,
            };
            return finish_sweep(pipeline::thm11_search(&cfg)?, out.json.as_deref());
        }
        Cmd::Thm12 {
            k,
            l,
            pmin,
            pmax,
            a,
            b,
            d,
            qmin,
            qmax,
            out,
        } => {
            let cfg = Thm12Config {
                kk: k,
                l,
                p_lo: pmin,
                p_hi: pmax,
                a,
                b,
                d,
                q_lo: qmin,
                q_hi: qmax,
                squarefree_policy: out.squarefree,
            };
            return finish_sweep(pipeline::thm12_search(&cfg)?, out.json.as_deref());
        }
        Cmd::Replay { cert } => return replay_file(&cert),
    }
    Ok(0)
}

fn finish_sweep(report: SearchReport, json: Option<&Path>) -> Result<u8, Error> {
    if report.vacuous {
        println!("twisted curve has trivial torsion: nothing to search");
    }
    for c in &report.certificates {
        println!("{}", c.summary());
    }
    println!();
    print!("{}", report.tally.table());
    let refutations = report.refutation_candidates();
    println!("refutation candidates: {}", refutations.len());
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&report.certificates)
            .map_err(|e| Error::Parse(e.to_string()))?;
        fs::write(path, text + "\n")
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(if refutations.is_empty() {
        0
    } else {
        EXIT_REFUTATION
    })
}

fn replay_file(path: &Path) -> Result<u8, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let certs: Vec<Certificate> = match value {
        serde_json::Value::Array(_) => serde_json::from_value(value),
        _ => serde_json::from_value(value).map(|c| vec![c]),
    }
    .map_err(|e| Error::Parse(e.to_string()))?;
    let mut mismatches = 0;
    for c in &certs {
        let outcome = pipeline::replay(c)?;
        if let Some(w) = &outcome.version_warning {
            eprintln!("warning: {w}");
        }
        let primes: Vec<String> = c.primes().iter().map(|p| p.to_string()).collect();
        let status = if outcome.identical {
            "identical"
        } else {
            "MISMATCH"
        };
        println!("p = {:<10} {status}", primes.join(","));
        if !outcome.identical {
            mismatches += 1;
        }
    }
    println!("{} certificates, {mismatches} mismatches", certs.len());
    Ok(if mismatches == 0 { 0 } else { EXIT_FAILURE })
}

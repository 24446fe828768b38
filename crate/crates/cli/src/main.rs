//! `toricstab`: exact stability thresholds of polarized toric varieties.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use toricstab::export::{curve_csv, dh_csv, fmt_q, svg_plot};
use toricstab::filtrations::{dh_measure, energy_from_dh, filtration_curve};
use toricstab::geometry::LatticeVector;
use toricstab::problem::{describe, Problem, ProblemFile};
use toricstab::rational::format_rational;
use toricstab::test_curves::extended_curve;
use toricstab::thresholds::{delta_search, inequality_report};
use toricstab::toric::ToricDivisor;
use toricstab::volume_fn::{big_volume, volume_curve};
use toricstab::{Error, Rational};

#[derive(Parser)]
#[command(
    name = "toricstab",
    version,
    about = "Exact stability thresholds of polarized toric varieties"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "table")]
    format: Format,
    /// Worker threads for candidate evaluation (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Append 12-digit decimal approximations to exact values in tables.
    #[arg(long, global = true)]
    decimals: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check the fan and the rest of a problem file.
    Validate { path: PathBuf },
    /// Volume of a divisor, or the curve t -> vol(D - t C) with --curve C.
    Volume {
        path: PathBuf,
        #[arg(long, default_value = "L")]
        divisor: String,
        #[arg(long)]
        curve: Option<String>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Minimum of A/S over primitive toric valuations in an infinity-ball.
    Delta {
        path: PathBuf,
        #[arg(long)]
        radius: Option<u32>,
    },
    /// Functionals of the extended test curve of L - tau D.
    Curve {
        path: PathBuf,
        #[arg(long)]
        direction: Option<String>,
        /// Comma-separated subset of E,Ealpha,ER,Jt,Ent,Mt.
        #[arg(long, value_delimiter = ',')]
        functionals: Option<Vec<String>>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Duistermaat-Heckman measure of the valuation with weight vector u.
    Dh {
        path: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Delta together with the delta_pp and delta' quotients of directions.
    Report {
        path: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        directions: Option<Vec<String>>,
        #[arg(long)]
        radius: Option<u32>,
    },
}

/// A failed run: exit code 2 for invalid input, 3 for failed computations.
enum Failure {
    Validation(Error),
    Computation(Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Computation(_) => 3,
        }
    }

    fn to_json(&self) -> Value {
        let (stage, e) = match self {
            Failure::Validation(e) => ("validation", e),
            Failure::Computation(e) => ("computation", e),
        };
        json!({"error": {"stage": stage, "kind": e.kind(), "message": e.to_string()}})
    }
}

type Outcome = Result<String, Failure>;

fn invalid(e: Error) -> Failure {
    Failure::Validation(e)
}

fn failed(e: Error) -> Failure {
    Failure::Computation(e)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| {
        invalid(Error::InvalidInput(format!(
            "cannot read {}: {e}",
            path.display()
        )))
    })
}

fn load(path: &Path) -> Result<Problem, Failure> {
    Problem::parse(&read(path)?).map_err(invalid)
}

fn write_plot(path: &Path, svg: &str) -> Result<(), Failure> {
    std::fs::write(path, svg).map_err(|e| {
        failed(Error::InvalidInput(format!(
            "cannot write {}: {e}",
            path.display()
        )))
    })
}

fn q(x: &Rational) -> Value {
    Value::String(format_rational(x))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value");
    s.push('\n');
    s
}

fn cmd_validate(cli: &Cli, path: &Path) -> Outcome {
    let file = ProblemFile::parse(&read(path)?).map_err(invalid)?;
    let diag = file.fan_diagnostics();
    if !diag.is_valid() {
        return Err(invalid(Error::InvalidFan(describe(&diag))));
    }
    let p = Problem::from_file(file).map_err(invalid)?;
    let fan = p.fan();
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "valid": true,
            "diagnostics": diag,
            "dimension": fan.dim(),
            "rays": fan.ray_count(),
            "cones": fan.cones().len(),
            "model": p.model.summary_json(),
            "polarization": p.l,
        })),
        Format::Csv => format!(
            "valid,primitive,smooth,complete,dimension,rays,cones\ntrue,{},{},{},{},{},{}\n",
            diag.primitive,
            diag.smooth,
            diag.complete,
            fan.dim(),
            fan.ray_count(),
            fan.cones().len()
        ),
        Format::Table => format!(
            "valid: smooth complete fan of dimension {} with {} rays and {} cones\npolarization on the model: {}\n",
            fan.dim(),
            fan.ray_count(),
            fan.cones().len(),
            p.l
        ),
    })
}

fn cmd_volume(
    cli: &Cli,
    path: &Path,
    divisor: &str,
    curve: Option<&str>,
    plot: Option<&Path>,
) -> Outcome {
    let p = load(path)?;
    let d = p.divisor(divisor).map_err(invalid)?;
    let Some(dir) = curve else {
        let v = big_volume(p.fan(), &d).map_err(failed)?;
        return Ok(match cli.format {
            Format::Json => pretty(&json!({"divisor": divisor, "volume": q(&v)})),
            Format::Csv => format!("divisor,volume\n{divisor},{}\n", format_rational(&v)),
            Format::Table => format!("vol({divisor}) = {}\n", fmt_q(&v, cli.decimals)),
        });
    };
    let c = p.divisor(dir).map_err(invalid)?;
    let vc = volume_curve(p.fan(), &d, &c).map_err(failed)?;
    if let Some(path) = plot {
        write_plot(
            path,
            &svg_plot(
                &format!("vol({divisor} - t {dir})"),
                &[("vol", &vc.curve)],
                &[],
            ),
        )?;
    }
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "divisor": divisor,
            "direction": dir,
            "tau_plus": q(&vc.tau_plus),
            "volume": q(&vc.volume),
            "curve": vc.curve,
        })),
        Format::Csv => curve_csv(&vc.curve, 8),
        Format::Table => format!(
            "vol({divisor} - t {dir}) on [0, {}]\n{}\n",
            format_rational(&vc.tau_plus),
            vc.curve
        ),
    })
}

fn cmd_delta(cli: &Cli, path: &Path, radius: Option<u32>) -> Outcome {
    let p = load(path)?;
    let radius = radius.or(p.file.params.radius).unwrap_or(2);
    if radius == 0 {
        return Err(invalid(Error::InvalidInput(
            "radius must be at least 1".into(),
        )));
    }
    let r = delta_search(p.model.base(), &p.l_base, radius).map_err(failed)?;
    Ok(match cli.format {
        Format::Json => pretty(&serde_json::to_value(&r).expect("report")),
        Format::Csv => {
            let mut s = String::from("u,A,S,A/S\n");
            for c in &r.candidates {
                writeln!(
                    s,
                    "\"{}\",{},{},{}",
                    c.u,
                    format_rational(&c.a),
                    format_rational(&c.s),
                    format_rational(&c.quotient)
                )
                .unwrap();
            }
            s
        }
        Format::Table => r.to_table(cli.decimals),
    })
}

const FUNCTIONALS: [&str; 6] = ["E", "Ealpha", "ER", "Jt", "Ent", "Mt"];

fn cmd_curve(
    cli: &Cli,
    path: &Path,
    direction: Option<&str>,
    functionals: Option<&[String]>,
    plot: Option<&Path>,
) -> Outcome {
    let p = load(path)?;
    let dir = direction
        .map(str::to_string)
        .or_else(|| p.file.params.direction.clone())
        .ok_or_else(|| invalid(Error::InvalidInput("missing --direction".into())))?;
    let wanted: Vec<String> = functionals
        .map(<[String]>::to_vec)
        .or_else(|| p.file.params.functionals.clone())
        .unwrap_or_else(|| FUNCTIONALS.iter().map(|s| s.to_string()).collect());
    if let Some(bad) = wanted.iter().find(|f| !FUNCTIONALS.contains(&f.as_str())) {
        return Err(invalid(Error::InvalidInput(format!(
            "unknown functional {bad:?}; expected one of {}",
            FUNCTIONALS.join(",")
        ))));
    }
    let d = p.divisor(&dir).map_err(invalid)?;
    let c = extended_curve(&p.model, &p.l, &d).map_err(failed)?;
    let mut values: Vec<(String, Rational)> = Vec::new();
    for f in &wanted {
        let v = match f.as_str() {
            "E" => c.energy(),
            "Ealpha" => c.alpha_energy(&p.l).map_err(failed)?,
            "ER" => c.ricci_energy().map_err(failed)?,
            "Jt" => c.jtilde().map_err(failed)?,
            "Ent" => c.entropy().map_err(failed)?,
            "Mt" => c.twisted_mabuchi().map_err(failed)?,
            _ => unreachable!("checked above"),
        };
        values.push((f.clone(), v));
    }
    if let Some(path) = plot {
        let mass = toricstab::poly::PiecewisePolynomial::new(
            std::iter::once(c.chambers()[0].lo.clone())
                .chain(c.chambers().iter().map(|ch| ch.hi.clone()))
                .collect(),
            c.chambers().iter().map(|ch| ch.mass.clone()).collect(),
        )
        .map_err(failed)?;
        write_plot(
            path,
            &svg_plot(&format!("mass of L - tau {dir}"), &[("mass", &mass)], &[]),
        )?;
    }
    Ok(match cli.format {
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("direction".into(), Value::String(dir.clone()));
            obj.insert("tau_plus".into(), q(c.tau_plus()));
            obj.insert("model_relative".into(), Value::Bool(!p.model.is_trivial()));
            for (k, v) in &values {
                obj.insert(k.clone(), q(v));
            }
            pretty(&Value::Object(obj))
        }
        Format::Csv => {
            let mut s = String::from("functional,value\n");
            for (k, v) in &values {
                writeln!(s, "{k},{}", format_rational(v)).unwrap();
            }
            s
        }
        Format::Table => {
            let mut s = format!(
                "test curve of L - tau {dir} on [0, {}]\n",
                format_rational(c.tau_plus())
            );
            for (k, v) in &values {
                writeln!(s, "{k} = {}", fmt_q(v, cli.decimals)).unwrap();
            }
            s
        }
    })
}

fn cmd_dh(cli: &Cli, path: &Path, u: Option<&str>, plot: Option<&Path>) -> Outcome {
    let p = load(path)?;
    let u: LatticeVector = match u {
        Some(s) => s.parse().map_err(invalid)?,
        None => p
            .file
            .params
            .u
            .clone()
            .ok_or_else(|| invalid(Error::InvalidInput("missing --u".into())))?,
    };
    if u.dim() != p.fan().dim() {
        return Err(invalid(Error::DimensionMismatch {
            expected: p.fan().dim(),
            got: u.dim(),
        }));
    }
    if u.is_zero() {
        return Err(invalid(Error::ZeroVector));
    }
    let curve = filtration_curve(p.model.base(), &p.l_base, &u).map_err(failed)?;
    let v = curve
        .eval(&Rational::from_integer(0.into()))
        .expect("domain starts at 0");
    let nu = dh_measure(&curve, &v).map_err(failed)?;
    let energy = energy_from_dh(&nu);
    if let Some(path) = plot {
        write_plot(
            path,
            &svg_plot(
                &format!("DH measure of u = {u}"),
                &[("density", &nu.density)],
                &nu.atoms,
            ),
        )?;
    }
    Ok(match cli.format {
        Format::Json => pretty(&json!({
            "u": u,
            "volume_curve": curve,
            "density": nu.density,
            "atoms": nu.atoms,
            "total_mass": q(&nu.total_mass()),
            "energy": q(&energy),
        })),
        Format::Csv => dh_csv(&nu, 8),
        Format::Table => format!(
            "vol R^(tau) for u = {u}\n{curve}\ndensity\n{}\natoms: {}\ntotal mass = {}\nenergy = {}\n",
            nu.density,
            nu.atoms.len(),
            fmt_q(&nu.total_mass(), cli.decimals),
            fmt_q(&energy, cli.decimals)
        ),
    })
}

fn cmd_report(
    cli: &Cli,
    path: &Path,
    directions: Option<&[String]>,
    radius: Option<u32>,
) -> Outcome {
    let p = load(path)?;
    let radius = radius.or(p.file.params.radius).unwrap_or(2);
    if radius == 0 {
        return Err(invalid(Error::InvalidInput(
            "radius must be at least 1".into(),
        )));
    }
    let names: Vec<String> = directions
        .map(<[String]>::to_vec)
        .or_else(|| p.file.params.directions.clone())
        .unwrap_or_else(|| p.divisor_names().cloned().collect());
    let dirs: Vec<(String, ToricDivisor)> = names
        .iter()
        .map(|n| Ok((n.clone(), p.divisor(n)?)))
        .collect::<Result<_, Error>>()
        .map_err(invalid)?;
    let r = inequality_report(&p.model, &p.l_base, &dirs, radius).map_err(failed)?;
    Ok(match cli.format {
        Format::Json => pretty(&serde_json::to_value(&r).expect("report")),
        Format::Csv => {
            let mut s = String::from("claim,lhs,relation,rhs,holds\n");
            for v in &r.verdicts {
                writeln!(
                    s,
                    "\"{}\",{},{},{},{}",
                    v.claim,
                    format_rational(&v.lhs),
                    v.relation,
                    format_rational(&v.rhs),
                    v.holds
                )
                .unwrap();
            }
            s
        }
        Format::Table => r.to_table(cli.decimals),
    })
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate { path } => cmd_validate(cli, path),
        Command::Volume {
            path,
            divisor,
            curve,
            plot,
        } => cmd_volume(cli, path, divisor, curve.as_deref(), plot.as_deref()),
        Command::Delta { path, radius } => cmd_delta(cli, path, *radius),
        Command::Curve {
            path,
            direction,
            functionals,
            plot,
        } => cmd_curve(
            cli,
            path,
            direction.as_deref(),
            functionals.as_deref(),
            plot.as_deref(),
        ),
        Command::Dh { path, u, plot } => cmd_dh(cli, path, u.as_deref(), plot.as_deref()),
        Command::Report {
            path,
            directions,
            radius,
        } => cmd_report(cli, path, directions.as_deref(), *radius),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("TORICSTAB_LOG")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
        {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.code())
        }
    }
}

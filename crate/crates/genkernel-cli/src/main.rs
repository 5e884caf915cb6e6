//! `genkernel`: evaluate, tabulate and verify generalized Fourier and
//! dihedral Dunkl kernels.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input,
//! 3 numerical failure. Errors are printed to stderr as JSON.

mod json;
mod request;

use clap::{Args, Parser, Subcommand};
use genkernel::kernel_dunkl::DihedralPoint;
use genkernel::verify::{run_suite, Report, Suite, VerifyOptions};
use json::Json;
use request::{parse_fourier, parse_group, usage, Failure, Kernel, KernelKind, Point, Record};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "genkernel", version, about = "Generalized Fourier and dihedral Dunkl kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a kernel at one point pair.
    #[command(allow_negative_numbers = true)]
    Eval(EvalArgs),
    /// Evaluate a kernel over a rectangular grid.
    #[command(allow_negative_numbers = true)]
    Table(TableArgs),
    /// Run a verification suite and print its JSON report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long, value_enum, default_value = "fourier")]
    kernel: KernelKind,
    /// Deformation parameter, decimal or p/q (fourier).
    #[arg(long)]
    a: Option<String>,
    /// Dimension (fourier); inferred from --x when omitted.
    #[arg(long)]
    m: Option<u32>,
    /// Dihedral group such as I3 or I4 (dunkl, dunkl-bessel).
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Second multiplicity, required for even groups.
    #[arg(long)]
    beta: Option<f64>,
    /// fourier: series, closed, convolution, integral, auto.
    /// dunkl: series, closed, m1, m2, auto.
    /// dunkl-bessel: series, closed, jacobi, average-m1, average-m2, auto.
    #[arg(long, default_value = "auto")]
    method: String,
    /// Series truncation tolerance.
    #[arg(long, default_value_t = 1e-14)]
    tol: f64,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    /// First point as a comma-separated vector.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "y")]
    x: Option<Vec<f64>>,
    /// Second point as a comma-separated vector.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "x")]
    y: Option<Vec<f64>>,
    /// |x||y| (fourier).
    #[arg(long, requires = "xi", conflicts_with = "x")]
    z: Option<f64>,
    /// <x,y>/(|x||y|) (fourier).
    #[arg(long, requires = "z")]
    xi: Option<f64>,
    #[arg(long, requires_all = ["phi1", "r2", "phi2"], conflicts_with = "x")]
    r1: Option<f64>,
    #[arg(long)]
    phi1: Option<f64>,
    #[arg(long)]
    r2: Option<f64>,
    #[arg(long)]
    phi2: Option<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    #[arg(long, default_value_t = 0.0)]
    z_min: f64,
    #[arg(long, default_value_t = 5.0)]
    z_max: f64,
    #[arg(long, default_value_t = 11)]
    nz: usize,
    #[arg(long, default_value_t = -1.0)]
    xi_min: f64,
    #[arg(long, default_value_t = 1.0)]
    xi_max: f64,
    #[arg(long, default_value_t = 5)]
    nxi: usize,
    /// Fixed first point of a dihedral grid.
    #[arg(long, default_value_t = 1.0)]
    r1: f64,
    #[arg(long, default_value_t = 0.0)]
    phi1: f64,
    #[arg(long, default_value_t = 0.0)]
    r2_min: f64,
    #[arg(long, default_value_t = 1.5)]
    r2_max: f64,
    #[arg(long, default_value_t = 4)]
    nr2: usize,
    #[arg(long, default_value_t = 0.0)]
    phi2_min: f64,
    #[arg(long, default_value_t = 3.0)]
    phi2_max: f64,
    #[arg(long, default_value_t = 4)]
    nphi2: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// specfun, laplace, fourier, dunkl or all.
    #[arg(default_value = "all")]
    suite: String,
    /// Budget override NAME=VALUE; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&Failure::Usage(e.render().to_string().trim().to_string())),
    };
    let result = match cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Table(a) => cmd_table(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => fail(&f),
    }
}

fn fail(f: &Failure) -> ExitCode {
    let _ = std::io::stderr().write_all(f.to_json().render().as_bytes());
    ExitCode::from(f.exit_code() as u8)
}

fn build_kernel(k: &KernelArgs, inferred_m: Option<u32>) -> Result<Kernel, Failure> {
    if !(k.tol > 0.0) {
        return usage(format!("--tol must be positive (got {})", k.tol));
    }
    match k.kernel {
        KernelKind::Fourier => {
            let Some(a) = &k.a else { return usage("the fourier kernel needs --a") };
            let m = match (k.m, inferred_m) {
                (Some(m), Some(d)) if m != d => return usage(format!("--m {m} disagrees with vector dimension {d}")),
                (Some(m), _) | (None, Some(m)) => m,
                (None, None) => return usage("the fourier kernel needs --m or --x/--y"),
            };
            Ok(Kernel::Fourier { params: parse_fourier(a, m, &k.method)?, tol: k.tol })
        }
        KernelKind::Dunkl | KernelKind::DunklBessel => {
            let Some(group) = &k.group else { return usage("dihedral kernels need --group") };
            let Some(alpha) = k.alpha else { return usage("dihedral kernels need --alpha") };
            let params = parse_group(group, alpha, k.beta)?;
            Ok(if k.kernel == KernelKind::Dunkl {
                Kernel::Dunkl { params, method: k.method.parse()?, tol: k.tol }
            } else {
                Kernel::Bessel { params, method: k.method.parse()? }
            })
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| Failure::Numeric(e.to_string()))
        }
    }
}

fn render_csv(records: &[Record]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if let Some(first) = records.first() {
        w.write_record(first.csv_header()).map_err(|e| Failure::Numeric(e.to_string()))?;
    }
    for r in records {
        w.write_record(r.csv_row()).map_err(|e| Failure::Numeric(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Numeric(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn cmd_eval(a: EvalArgs) -> Result<u8, Failure> {
    let point = match (&a.x, &a.y, a.z, a.xi, a.r1) {
        (Some(x), Some(y), ..) => Point::Vectors { x: x.clone(), y: y.clone() },
        (_, _, Some(z), Some(xi), _) => Point::Reduced { z, xi },
        (.., Some(r1)) => Point::Polar {
            z1: DihedralPoint::new(r1, a.phi1.unwrap())?,
            z2: DihedralPoint::new(a.r2.unwrap(), a.phi2.unwrap())?,
        },
        _ => return usage("give the points with --x/--y, --z/--xi or --r1/--phi1/--r2/--phi2"),
    };
    let inferred = a.x.as_ref().map(|x| x.len() as u32);
    let kernel = build_kernel(&a.kernel, if a.kernel.kernel == KernelKind::Fourier { inferred } else { None })?;
    let record = kernel.eval(&point)?;
    let text = if a.output.csv { render_csv(&[record])? } else { record.to_json().render() };
    emit(&a.output.out, &text)?;
    Ok(0)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>, Failure> {
    if n == 0 {
        return usage("grid sizes must be at least 1");
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn cmd_table(a: TableArgs) -> Result<u8, Failure> {
    let kernel = build_kernel(&a.kernel, None)?;
    let mut points = Vec::new();
    if kernel.kind() == KernelKind::Fourier {
        for z in linspace(a.z_min, a.z_max, a.nz)? {
            for xi in linspace(a.xi_min, a.xi_max, a.nxi)? {
                points.push(Point::Reduced { z, xi });
            }
        }
    } else {
        let z1 = DihedralPoint::new(a.r1, a.phi1)?;
        for r2 in linspace(a.r2_min, a.r2_max, a.nr2)? {
            for phi2 in linspace(a.phi2_min, a.phi2_max, a.nphi2)? {
                points.push(Point::Polar { z1, z2: DihedralPoint::new(r2, phi2)? });
            }
        }
    }
    let records = points.iter().map(|p| kernel.eval(p)).collect::<Result<Vec<_>, _>>()?;
    let text = if a.output.json {
        Json::Arr(records.iter().map(Record::to_json).collect()).render()
    } else {
        render_csv(&records)?
    };
    emit(&a.output.out, &text)?;
    Ok(0)
}

fn report_json(r: &Report) -> Json {
    let checks = r
        .checks
        .iter()
        .map(|c| {
            Json::obj([
                ("name", Json::str(c.name.clone())),
                ("status", Json::str(c.status.as_str())),
                ("max_error", Json::Num(c.max_error)),
                ("budget", Json::Num(c.budget)),
                ("samples", Json::Int(c.samples as i64)),
                ("message", c.message.clone().map_or(Json::Null, Json::Str)),
            ])
        })
        .collect();
    Json::obj([
        ("suite", Json::str(r.suite.as_str())),
        ("checks", Json::Arr(checks)),
        ("pass_count", Json::Int(r.pass_count() as i64)),
        ("fail_count", Json::Int(r.fail_count() as i64)),
        ("passed", Json::Bool(r.passed())),
    ])
}

fn cmd_verify(a: VerifyArgs) -> Result<u8, Failure> {
    let suite: Suite = a.suite.parse()?;
    let mut opts = VerifyOptions::default();
    for t in &a.tol {
        let Some((name, value)) = t.split_once('=') else { return usage(format!("--tol expects NAME=VALUE, got {t}")) };
        let v: f64 = value.parse().map_err(|_| Failure::Usage(format!("invalid budget in --tol {t}")))?;
        if !genkernel::verify::registry().iter().any(|c| c.name == name) {
            return usage(format!("unknown check '{name}' in --tol"));
        }
        opts.overrides.insert(name.to_string(), v);
    }
    let report = run_suite(suite, &opts);
    emit(&a.out, &report_json(&report).render())?;
    Ok(if report.passed() { 0 } else { 1 })
}

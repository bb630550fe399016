use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dbs_core::experiments::{
    fmt_sig12, run_disk_validation, run_paradox, run_validation, ParadoxConfig, Tolerances,
    ValidateOptions,
};
use dbs_core::geometry::{regular_polygon, Domain, PolygonMode};
use dbs_core::solver::{
    cluster_multiplicities, compute_spectrum, Method, DEFAULT_CLUSTER_TOL, DEFAULT_NULL_THRESHOLD,
};
use dbs_core::Error;

#[derive(Parser)]
#[command(
    name = "dbs",
    version,
    about = "Steklov-type biharmonic eigenvalues on convex planar domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Relative cutoff for near-null directions of the interior Gram matrix.
    #[arg(long, global = true, default_value_t = DEFAULT_NULL_THRESHOLD)]
    null_threshold: f64,

    /// Relative tolerance for merging eigenvalues into multiplicity clusters.
    #[arg(long, global = true, default_value_t = DEFAULT_CLUSTER_TOL)]
    cluster_tol: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BasisKind {
    Poly,
    Mfs,
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Spectrum of the disk compared with the closed-form values.
    Disk {
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Spectrum of one regular polygon.
    Polygon {
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        mode: PolygonMode,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = BasisKind::Poly)]
        basis: BasisKind,
        /// Number of fundamental-solution sources; defaults to 4 (2 degree + 1).
        #[arg(long)]
        mfs_size: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Regular-polygon convergence study against the disk.
    Paradox {
        /// Comma-separated side counts, strictly increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        k_list: Vec<usize>,
        #[arg(long, value_enum)]
        mode: PolygonMode,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Exit with status 1 unless every error column strictly decreases.
        #[arg(long)]
        strict: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Disk, cross-validation, dilation and rigid-motion checks.
    Validate {
        #[arg(long, default_value_t = 12)]
        degree: usize,
        #[arg(long, default_value_t = 100)]
        mfs_size: usize,
        /// Allowed relative disagreement between the two bases.
        #[arg(long, default_value_t = 1e-4)]
        cross_tol: f64,
    },
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), Error> {
    match &out.output {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn to_json(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let tol = Tolerances {
        null_threshold: cli.null_threshold,
        cluster_tol: cli.cluster_tol,
    };
    match cli.command {
        Command::Disk {
            n_max,
            degree,
            radius,
            out,
        } => {
            let report = run_disk_validation(n_max, degree, radius, tol)?;
            eprintln!(
                "max abs error {:e}; multiplicities {:?}; retained {} (cond {:e})",
                report.max_abs_error,
                report.clusters.multiplicities(),
                report.retained_dim,
                report.cond_a
            );
            let text = match out.format {
                Format::Csv => report.to_csv(),
                Format::Json => to_json(&report),
            };
            emit(&out, &text)?;
        }
        Command::Polygon {
            k,
            mode,
            radius,
            degree,
            n_max,
            basis,
            mfs_size,
            out,
        } => {
            let domain: Domain = regular_polygon(k, radius, mode)?.into();
            let method = match basis {
                BasisKind::Poly => Method::Poly { degree },
                BasisKind::Mfs => Method::Mfs {
                    size: mfs_size.unwrap_or(4 * (2 * degree + 1)),
                },
            };
            let spectrum = compute_spectrum(&domain, method, n_max, tol.null_threshold)?;
            if spectrum.truncated {
                eprintln!(
                    "warning: only {} of {n_max} eigenvalues available (retained dimension {})",
                    spectrum.values.len(),
                    spectrum.retained_dim
                );
            }
            eprintln!(
                "{}; retained {} of {} (cond {:e}); perimeter/area {}",
                method.describe(),
                spectrum.retained_dim,
                spectrum.basis_size,
                spectrum.cond_a,
                fmt_sig12(domain.constant_quotient())
            );
            let text = match out.format {
                Format::Csv => {
                    let mut s = String::from("n,delta\n");
                    for (i, v) in spectrum.values.iter().enumerate() {
                        s.push_str(&format!("{},{}\n", i + 1, fmt_sig12(*v)));
                    }
                    s
                }
                Format::Json => to_json(&serde_json::json!({
                    "k": k,
                    "mode": mode,
                    "radius": radius,
                    "spectrum": spectrum,
                    "clusters": cluster_multiplicities(&spectrum.values, tol.cluster_tol),
                })),
            };
            emit(&out, &text)?;
        }
        Command::Paradox {
            k_list,
            mode,
            degree,
            n_max,
            radius,
            strict,
            out,
        } => {
            let cfg = ParadoxConfig {
                radius,
                tolerances: tol,
                ..ParadoxConfig::new(k_list, mode, degree, n_max)
            };
            let table = run_paradox(&cfg)?;
            let text = match out.format {
                Format::Csv => table.to_csv(),
                Format::Json => {
                    let mut s = table.to_json();
                    s.push('\n');
                    s
                }
            };
            emit(&out, &text)?;
            for row in &table.rows {
                if let Some(f) = &row.failure {
                    eprintln!("row k={} failed: {f}", row.k);
                }
            }
            let violations = table.monotonicity_violations();
            for (n, k) in &violations {
                eprintln!("warning: error column {n} does not decrease at k={k}");
            }
            if strict && !violations.is_empty() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Validate {
            degree,
            mfs_size,
            cross_tol,
        } => {
            let checks = run_validation(&ValidateOptions {
                degree,
                mfs_size,
                cross_tol,
                tolerances: tol,
            });
            let mut ok = true;
            for c in &checks {
                println!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
                ok &= c.passed;
            }
            if !ok {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

//! `czeros`: command-line front end for the cosine-zeros laboratory.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cosine_zeros::experiment::{compare_with_theory, write_results, OutputFormat};
use cosine_zeros::schemes::{decompose, effective_basis, index_map};
use cosine_zeros::{
    density, expected_zeros, i_ell, inner_identity, k_ell, run_mc, table1, CoefficientScheme, ExperimentConfig,
    GridConfig, QuadratureConfig, SchemeKind,
};
use serde_json::{json, Value};

/// Environment variable holding the default worker count for `mc`.
const WORKERS_ENV: &str = "CZEROS_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "czeros", version, about = "Real zeros of random cosine polynomials with palindromic blocks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Print structured JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Exit with status 2 when a quadrature misses its tolerance.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct SchemeArgs {
    /// iid, palindromic-blocks or contiguous-blocks
    #[arg(long)]
    scheme: String,
    /// Block length (required for block schemes, rejected for iid).
    #[arg(long)]
    ell: Option<usize>,
    /// Polynomial degree.
    #[arg(long)]
    n: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Limiting constant K_ell.
    Kl {
        #[arg(long)]
        ell: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Recompute the reference table of K_ell values.
    Table1 {
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        with_2019: bool,
        #[command(flatten)]
        common: Common,
    },
    /// (1/pi) int_0^pi sqrt(1-u^2)/(1+u cos t) dt, which should equal 1.
    InnerId {
        #[arg(long, allow_hyphen_values = true)]
        u: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Exact expected zero count on (0, 2pi) by Kac-Rice quadrature.
    Expect {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Sample the Kac-Rice density on a uniform grid and write x,value CSV.
    Density {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Pre-limit integral I_ell(n).
    Ilim {
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo zero counts; writes per-trial CSV plus a JSON summary.
    Mc {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        /// Output path; a `.json` path writes the summary there and the CSV beside it.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
        #[arg(long, default_value_t = 16)]
        samples_per_period: usize,
        /// Also compute the Kac-Rice expectation and a z-score.
        #[arg(long)]
        kacrice: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Show the block decomposition and coefficient tying of a scheme.
    Schemes {
        #[arg(long, default_value = "palindromic-blocks")]
        scheme: String,
        #[arg(long)]
        ell: Option<usize>,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<cosine_zeros::Error> for Failure {
    fn from(e: cosine_zeros::Error) -> Self {
        match e {
            cosine_zeros::Error::InvalidParameter(_)
            | cosine_zeros::Error::DegreeTooSmall { .. }
            | cosine_zeros::Error::Domain { .. } => Failure::Usage(e.to_string()),
            other => Failure::Compute(other.to_string()),
        }
    }
}

fn resolve_scheme(name: &str, ell: Option<usize>) -> Result<CoefficientScheme, Failure> {
    let kind: SchemeKind = name.parse().map_err(|e: cosine_zeros::Error| Failure::Usage(e.to_string()))?;
    match (kind, ell) {
        (SchemeKind::Iid, None) => Ok(CoefficientScheme::iid()),
        (SchemeKind::Iid, Some(_)) => Err(Failure::Usage("--ell is not accepted for the iid scheme".into())),
        (_, None) => Err(Failure::Usage(format!("--ell is required for scheme {kind}"))),
        (SchemeKind::PalindromicBlocks, Some(l)) => Ok(CoefficientScheme::palindromic(l)),
        (SchemeKind::ContiguousEqualBlocks, Some(l)) => Ok(CoefficientScheme::contiguous(l)),
    }
}

fn quad(tol: f64) -> QuadratureConfig {
    QuadratureConfig::default().with_rel_tol(tol)
}

/// Prints the resolved config, then the result, in the requested style.
fn emit(common: &Common, config: Value, result: Value, text: impl FnOnce() -> String) {
    if common.json {
        println!("{}", json!({ "config": config, "result": result }));
    } else {
        println!("# config {config}");
        println!("{}", text());
    }
}

fn strict_check(common: &Common, converged: bool) -> Result<(), Failure> {
    if common.strict && !converged {
        return Err(Failure::Compute("quadrature tolerance not met".into()));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Kl { ell, tol, common } => {
            let r = k_ell(ell, &quad(tol))?;
            emit(&common, json!({ "ell": ell, "tol": tol }), json!(r), || {
                format!("K_{ell} = {:.8} (error estimate {:.2e}, {} panels)", r.value, r.error_estimate, r.panels_used)
            });
            strict_check(&common, r.converged)
        }
        Command::Table1 { tol, with_2019, common } => {
            let rows = table1(tol, with_2019)?;
            emit(&common, json!({ "tol": tol, "with_2019": with_2019 }), json!(rows), || {
                let mut s = String::from("ell  computed    reference   |diff|");
                for row in &rows {
                    s.push_str(&format!(
                        "\n{:<4} {:.8}  {:<10}  {:.2e}",
                        row.ell, row.computed, row.reference, row.abs_diff
                    ));
                }
                s
            });
            Ok(())
        }
        Command::InnerId { u, common } => {
            let v = inner_identity(u)?;
            emit(&common, json!({ "u": u }), json!({ "value": v, "deviation": v - 1.0 }), || {
                format!("inner identity at u = {u}: {v:.15} (deviation {:.2e})", v - 1.0)
            });
            Ok(())
        }
        Command::Expect { scheme, tol, common } => {
            let s = resolve_scheme(&scheme.scheme, scheme.ell)?;
            let basis = effective_basis(&s, scheme.n)?;
            let e = expected_zeros(&basis, (0.0, 2.0 * PI), &quad(tol))?;
            let config = json!({ "scheme": s.kind, "ell": s.reported_ell(), "n": scheme.n, "tol": tol });
            emit(&common, config, json!(e), || {
                format!(
                    "E[N(0, 2pi)] = {:.8} ({} deterministic + {:.8} Kac-Rice, error {:.2e})",
                    e.value, e.deterministic, e.integral.value, e.integral.error
                )
            });
            strict_check(&common, e.integral.converged)
        }
        Command::Density { scheme, points, out, common } => {
            if points == 0 {
                return Err(Failure::Usage("--points must be >= 1".into()));
            }
            let s = resolve_scheme(&scheme.scheme, scheme.ell)?;
            let basis = effective_basis(&s, scheme.n)?;
            let write = || -> std::io::Result<usize> {
                let mut w = BufWriter::new(File::create(&out)?);
                writeln!(w, "x,value")?;
                let mut degenerate = 0;
                for i in 0..points {
                    let x = 2.0 * PI * (i as f64 + 0.5) / points as f64;
                    match density(&basis, x) {
                        Ok(d) => writeln!(w, "{x},{d}")?,
                        Err(_) => {
                            degenerate += 1;
                            writeln!(w, "{x},NaN")?
                        }
                    }
                }
                w.flush()?;
                Ok(degenerate)
            };
            let degenerate = write().map_err(|e| Failure::Compute(format!("{}: {e}", out.display())))?;
            let config =
                json!({ "scheme": s.kind, "ell": s.reported_ell(), "n": scheme.n, "points": points, "out": out });
            emit(&common, config, json!({ "points": points, "degenerate": degenerate }), || {
                format!("wrote {points} density samples to {} ({degenerate} degenerate)", out.display())
            });
            Ok(())
        }
        Command::Ilim { ell, n, tol, common } => {
            let r = i_ell(ell, n, &quad(tol))?;
            emit(&common, json!({ "ell": ell, "n": n, "tol": tol }), json!(r), || {
                format!("I_{ell}({n}) = {:.8} (error {:.2e})", r.value, r.error)
            });
            strict_check(&common, r.converged)
        }
        Command::Mc { scheme, trials, seed, out, workers, samples_per_period, kacrice, common } => {
            let s = resolve_scheme(&scheme.scheme, scheme.ell)?;
            let mut cfg = ExperimentConfig::new(s, scheme.n, trials, seed).with_workers(workers).with_kacrice(kacrice);
            cfg.grid = GridConfig::default().with_samples_per_period(samples_per_period);
            if !common.json {
                println!("# config {}", serde_json::to_string(&cfg).unwrap_or_default());
            }
            let result = run_mc(&cfg)?;
            let format = match out.extension().and_then(|e| e.to_str()) {
                Some("json") => OutputFormat::Json,
                _ => OutputFormat::Csv,
            };
            let (csv_path, json_path) = write_results(&result, &out, format)?;
            let cmp = compare_with_theory(&result, None);
            if common.json {
                let report = json!({
                    "config": cfg,
                    "result": { "comparison": cmp, "csv": csv_path, "summary": json_path, "elapsed": result.elapsed },
                });
                println!("{report}");
            } else {
                println!(
                    "mean = {:.4} +- {:.4} over {} trials ({:.2} s)",
                    result.mean, result.stderr, trials, result.elapsed
                );
                println!("asymptote = {:.4} (relative deviation {:+.4})", cmp.asymptote, cmp.rel_dev_vs_asymptote);
                if let (Some(k), Some(z)) = (cmp.kacrice, cmp.z_score_vs_kacrice) {
                    println!("kac-rice = {k:.4} (z = {z:+.3})");
                }
                println!("wrote {} and {}", csv_path.display(), json_path.display());
            }
            Ok(())
        }
        Command::Schemes { scheme, ell, n, common } => {
            let s = resolve_scheme(&scheme, ell)?;
            let map = index_map(&s, n)?;
            let basis = effective_basis(&s, n)?;
            let decomp = if s.kind.is_block() { Some(decompose(n, s.ell)?) } else { None };
            let config = json!({ "scheme": s.kind, "ell": s.reported_ell(), "n": n });
            let result = json!({ "decomposition": decomp, "index_map": map, "basis": basis.functions });
            emit(&common, config, result, || {
                let mut out = String::new();
                if let Some(d) = &decomp {
                    out.push_str(&format!("n = 2*{}*{} + ({}), tilde = {:?}\n", d.ell, d.m, d.r, d.tilde_indices));
                }
                out.push_str(&format!("free variables F = {}\n", map.free_count));
                out.push_str(&format!("assignment = {:?}", map.assignment));
                for (i, f) in basis.functions.iter().enumerate() {
                    out.push_str(&format!("\n  xi_{i}: cos frequencies {f:?}"));
                }
                out
            });
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("usage: czeros <kl|table1|inner-id|expect|density|ilim|mc|schemes> [flags]; see --help");
            ExitCode::from(1)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

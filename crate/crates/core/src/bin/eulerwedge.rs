use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use eulerwedge::report::{self, DemoOptions, ReportEnvelope, ReportError};

/// Euler elements, wedge orbits and finite-dimensional nets of standard subspaces.
#[derive(Parser, Debug)]
#[command(name = "eulerwedge", version)]
struct Cli {
    /// Emit a JSON report envelope (the default).
    #[arg(long, global = true, conflicts_with = "table")]
    json: bool,
    /// Emit an aligned plain-text table.
    #[arg(long, global = true)]
    table: bool,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Residual tolerance for the axiom checks.
    #[arg(long, global = true, default_value_t = eulerwedge::modular::AXIOM_TOL)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Euler and symmetric Euler coweights of an irreducible root system.
    Classify {
        /// A, B, C, D, BC, E6, E7, E8, F4 or G2.
        family: Option<String>,
        rank: Option<usize>,
        /// Every family with rank at most 8.
        #[arg(long)]
        all: bool,
    },
    /// Dimensions of the 3-grading of a classical algebra, e.g. `sl 4 h2`, `so 3 3 h1`, `sp 4 hn`.
    Grading {
        algebra: String,
        /// Matrix sizes followed by the Euler element name.
        #[arg(num_args = 2.., required = true)]
        args: Vec<String>,
    },
    /// Wedge orbits over the Moebius orbit for the n-fold cover.
    Orbits {
        /// Covering order; omit for the universal cover.
        cover: Option<u64>,
    },
    /// Builds a BGL net on a finite-dimensional model and runs the axiom suite.
    BglDemo {
        /// mobius, affine, orthogonal, poincare-mock or trivial.
        model: String,
        dim: usize,
        /// Covering order of the Moebius model.
        #[arg(long, default_value_t = 2)]
        cover: u64,
        /// Replace the value at the base wedge by a rotated subspace.
        #[arg(long)]
        perturb: bool,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
}

enum Outcome {
    Pass,
    AxiomFailure,
}

fn emit<T: Serialize>(cli: &Cli, command: &str, params: Value, payload: &T, table: impl FnOnce() -> String) {
    let text = if cli.table {
        table()
    } else {
        let env = ReportEnvelope::new(command, params, serde_json::to_value(payload).expect("serializable"));
        serde_json::to_string_pretty(&env).expect("serializable") + "\n"
    };
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn run(cli: &Cli) -> Result<Outcome, ReportError> {
    match &cli.command {
        Command::Classify { family, rank, all } => {
            let reports = if *all {
                report::classify_all()
            } else {
                let (Some(f), Some(r)) = (family, rank) else {
                    return Err(ReportError::Usage("classify needs FAMILY RANK or --all".into()));
                };
                vec![report::classify(f, *r)?]
            };
            let params = json!({ "family": family, "rank": rank, "all": all });
            if *all {
                emit(cli, "classify", params, &reports, || report::classify_table(&reports));
            } else {
                emit(cli, "classify", params, &reports[0], || report::classify_table(&reports));
            }
            Ok(Outcome::Pass)
        }
        Command::Grading { algebra, args } => {
            let (which, sizes) = args.split_last().expect("at least two arguments");
            let params = sizes
                .iter()
                .map(|s| s.parse::<usize>().map_err(|_| ReportError::Usage(format!("bad size {s}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let rep = report::grading(algebra, &params, which)?;
            emit(cli, "grading", json!({ "algebra": algebra, "params": params, "euler": which }), &rep, || {
                let d = rep.dims;
                report::table(
                    &["algebra", "euler", "g_1", "g_0", "g_-1"],
                    &[[
                        format!("{algebra} {params:?}"),
                        which.clone(),
                        d.dim_plus.to_string(),
                        d.dim_zero.to_string(),
                        d.dim_minus.to_string(),
                    ]],
                )
            });
            Ok(Outcome::Pass)
        }
        Command::Orbits { cover } => {
            let rep = report::orbits(*cover)?;
            emit(cli, "orbits", json!({ "cover": cover }), &rep, || {
                report::table(
                    &["cover", "orbits", "Z-", "Z1", "Z2"],
                    &[[
                        cover.map_or("universal".to_string(), |n| n.to_string()),
                        rep.orbits.to_string(),
                        rep.z_minus.to_string(),
                        rep.z_one.to_string(),
                        rep.z_two.to_string(),
                    ]],
                )
            });
            Ok(Outcome::Pass)
        }
        Command::BglDemo { model, dim, cover, perturb, samples } => {
            let opts = DemoOptions {
                seed: cli.seed,
                perturb: *perturb,
                tol: cli.tol,
                cover: *cover,
                samples: *samples,
            };
            let rep = report::bgl_demo(model, *dim, opts)?;
            let params = json!({
                "model": model, "dim": dim, "cover": cover, "perturb": perturb,
                "samples": samples, "seed": cli.seed, "tol": cli.tol,
            });
            emit(cli, "bgl-demo", params, &rep, || {
                let rows: Vec<[String; 2]> = rep
                    .report
                    .entries()
                    .into_iter()
                    .map(|(name, status)| [name.to_string(), status.to_string()])
                    .collect();
                report::table(&["check", "result"], &rows)
            });
            Ok(if rep.passed { Outcome::Pass } else { Outcome::AxiomFailure })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("EULERWEDGE_LOG")).init();
    let cli = Cli::parse();
    log::debug!("{cli:?}");
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::AxiomFailure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}

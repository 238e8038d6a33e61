use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mo_tracking::harness::{
    default_alphas, parse_key_values, parse_list, parse_pair, parse_pair_list, run_convergence_rpm,
    run_convergence_wsm, run_front, short_decimal as short, write_convergence_csv, write_front_csv,
    write_front_error_csv, ExperimentConfig, RunSettings, ZetaSelection, DEFAULT_ZETA_INDICES,
};
use mo_tracking::scalarize::{rpm_front, wsm_front};
use mo_tracking::{ideal_vector, solve_rpm, solve_wsm, Error, Method, SolveReport, Weights};

#[derive(Parser)]
#[command(
    name = "mo-tracking",
    version,
    about = "Weighted-sum and reference-point fronts of a bicriterial pointwise-tracking Poisson control problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Args, Default)]
struct Shared {
    /// key=value file with defaults for the flags below
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Mesh level of single solves and single fronts [default: 6]
    #[arg(long, global = true, value_name = "L")]
    level: Option<String>,
    /// Reference level of studies [default: 8]
    #[arg(long, global = true, value_name = "L")]
    ref_level: Option<String>,
    /// Study levels, e.g. 2,3,4,5
    #[arg(long, global = true, value_name = "L1,L2,..")]
    levels: Option<String>,
    /// Regularization weights [default: 0.1,0.1]
    #[arg(long, global = true, value_name = "L1,L2")]
    lambda: Option<String>,
    /// Control bounds [default: -7,15]
    #[arg(long, global = true, value_name = "UA,UB")]
    bounds: Option<String>,
    /// Observations of the first objective [default: 0.75,0.25=6]
    #[arg(long, global = true, value_name = "x,y=v[;...]")]
    obs1: Option<String>,
    /// Observations of the second objective [default: 0.25,0.75=-2]
    #[arg(long, global = true, value_name = "x,y=v[;...]")]
    obs2: Option<String>,
    /// Fixed-point tolerance of the gradient iteration [default: 1e-8]
    #[arg(long, global = true, value_name = "T")]
    tol: Option<String>,
    /// Iteration cap of the gradient iteration [default: 5000]
    #[arg(long, global = true, value_name = "N")]
    max_iter: Option<String>,
    /// Endpoint weight offset of the sweeps [default: 1e-3]
    #[arg(long, global = true, value_name = "E")]
    eps: Option<String>,
    /// Normal step of the reference-point sweep [default: 0.2]
    #[arg(long, global = true, value_name = "P")]
    h_perp: Option<String>,
    /// Tangential step of the reference-point sweep [default: 0.2]
    #[arg(long, global = true, value_name = "Q")]
    h_par: Option<String>,
    /// Output directory [default: out]
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<String>,
    /// Cache directory for reference controls, or "none" [default: <out>/cache]
    #[arg(long, global = true, value_name = "DIR")]
    cache: Option<String>,
    /// Worker threads [default: 1]
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<String>,
    /// Start every sweep entry from the projected zero control
    #[arg(long, global = true)]
    cold_start: bool,
    /// Entries of a weighted-sum sweep [default: 50]
    #[arg(long, global = true, value_name = "N")]
    front_size: Option<String>,
    /// Step cap of a reference-point sweep [default: 15]
    #[arg(long, global = true, value_name = "N")]
    rpm_front_size: Option<String>,
    /// Cell diagonal: falling or rising [default: falling]
    #[arg(long, global = true, value_name = "DIR")]
    diagonal: Option<String>,
}

#[derive(Copy, Clone, ValueEnum)]
enum MethodArg {
    Wsm,
    Rpm,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Wsm => Method::Wsm,
            MethodArg::Rpm => Method::Rpm,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum ZetaMode {
    /// Reference-level points on every level
    Frozen,
    /// Each level's own sweep points
    PerLevel,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one weighted-sum problem
    SolveWsm {
        #[arg(long, value_name = "A1,A2")]
        alpha: String,
    },
    /// Solve one reference-point problem
    SolveRpm {
        #[arg(long, value_name = "Z1,Z2")]
        zeta: String,
    },
    /// Sweep a Pareto front
    Front {
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Sweep every study level and the reference level and write front errors
        #[arg(long)]
        study: bool,
    },
    /// Control errors on the study levels against the reference level
    Convergence {
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Weights of a weighted-sum study [default: 0.2,0.8;0.4,0.6;0.6,0.4;0.8,0.2]
        #[arg(long, value_name = "A1,A2[;...]")]
        alphas: Option<String>,
        /// Explicit reference points of a reference-point study
        #[arg(long, value_name = "Z1,Z2[;...]", conflicts_with = "zeta_indices")]
        zetas: Option<String>,
        /// Sweep steps of a reference-point study [default: 2,4,7,9]
        #[arg(long, value_name = "I1,I2,..")]
        zeta_indices: Option<String>,
        /// How sweep points are used on the study levels
        #[arg(long, value_enum, default_value = "frozen")]
        zeta_mode: ZetaMode,
    },
    /// Componentwise minima of the two objectives
    IdealVector,
}

fn settings(shared: &Shared) -> Result<RunSettings, Error> {
    let mut map = match &shared.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            parse_key_values(&text)?
        }
        None => BTreeMap::new(),
    };
    let flags = [
        ("level", &shared.level),
        ("ref-level", &shared.ref_level),
        ("levels", &shared.levels),
        ("lambda", &shared.lambda),
        ("bounds", &shared.bounds),
        ("obs1", &shared.obs1),
        ("obs2", &shared.obs2),
        ("tol", &shared.tol),
        ("max-iter", &shared.max_iter),
        ("eps", &shared.eps),
        ("h-perp", &shared.h_perp),
        ("h-par", &shared.h_par),
        ("out", &shared.out),
        ("cache", &shared.cache),
        ("jobs", &shared.jobs),
        ("front-size", &shared.front_size),
        ("rpm-front-size", &shared.rpm_front_size),
        ("diagonal", &shared.diagonal),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            map.insert(key.to_string(), v.clone());
        }
    }
    if shared.cold_start {
        map.insert("cold-start".into(), "true".into());
    }
    RunSettings::from_map(&map)
}

fn print_report(report: &SolveReport) {
    println!("objectives  {}", report.objectives);
    println!("value       {:.10e}", report.value);
    println!("iterations  {}", report.iterations);
    println!("converged   {}", report.converged);
    println!("residual    {:.3e}", report.final_residual);
    println!("pde solves  {}", report.solve_count);
    if let Some(valid) = report.reference_valid {
        println!("ref. below  {valid}");
    }
}

fn ensure_dir(dir: &Path) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn finish_single(
    config: &ExperimentConfig,
    report: &SolveReport,
    name: String,
) -> Result<ExitCode, Error> {
    print_report(report);
    ensure_dir(&config.output_dir)?;
    let path = config.output_dir.join(name);
    report.control.write(&path)?;
    println!("control     {}", path.display());
    Ok(if report.converged {
        ExitCode::SUCCESS
    } else {
        eprintln!("error: gradient iteration did not converge");
        ExitCode::from(3)
    })
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let s = settings(&cli.shared)?;
    let config = &s.experiment;
    let problem = &config.problem;
    let lambda = problem.lambda();
    let lambda_tag = format!("{}_{}", short(lambda[0]), short(lambda[1]));
    match cli.command {
        Command::SolveWsm { alpha } => {
            let [a1, a2] = parse_pair(&alpha)?;
            let weights = Weights::new(a1, a2)?;
            let system = config.system(s.level)?;
            let report = solve_wsm(problem, &system, weights, &config.bb)?;
            let name = format!("control_wsm_{}_{}_L{}.ctl", short(a1), short(a2), s.level);
            finish_single(config, &report, name)
        }
        Command::SolveRpm { zeta } => {
            let z = parse_pair(&zeta)?;
            let system = config.system(s.level)?;
            let report = solve_rpm(problem, &system, z, &config.bb)?;
            let name = format!(
                "control_rpm_{}_{}_L{}.ctl",
                short(z[0]),
                short(z[1]),
                s.level
            );
            finish_single(config, &report, name)
        }
        Command::Front { method, study } => {
            let method = Method::from(method);
            ensure_dir(&config.output_dir)?;
            if study {
                let st = run_front(config, method, lambda)?;
                for (level, front) in st.levels.iter().zip(&st.fronts) {
                    let path = config
                        .output_dir
                        .join(format!("front_{}_{lambda_tag}_L{level}.csv", method.name()));
                    write_front_csv(front, &path)?;
                }
                let path = config
                    .output_dir
                    .join(format!("front_{}_{lambda_tag}.csv", method.name()));
                write_front_csv(&st.reference, &path)?;
                let err_path = config
                    .output_dir
                    .join(format!("front_error_{}_{lambda_tag}.csv", method.name()));
                write_front_error_csv(&st, &err_path)?;
                println!(
                    "reference front ({} entries): {}",
                    st.reference.entries.len(),
                    path.display()
                );
                println!("front errors: {}", err_path.display());
                println!(
                    "parameters with monotone front error: {:.0}%",
                    100.0 * st.monotone_fraction()
                );
            } else {
                let system = config.system(s.level)?;
                let front = match method {
                    Method::Wsm => {
                        wsm_front(problem, &system, config.front_size, config.eps, &config.bb)?
                    }
                    Method::Rpm => rpm_front(
                        problem,
                        &system,
                        config.rpm_front_size,
                        config.h_perp,
                        config.h_par,
                        config.eps,
                        &config.bb,
                    )?,
                };
                for e in &front.entries {
                    let [p1, p2] = e.parameter();
                    println!(
                        "{p1:>12.6} {p2:>12.6}  {}  it={:<4} {}",
                        e.report.objectives,
                        e.report.iterations,
                        if e.report.converged {
                            ""
                        } else {
                            "not converged"
                        }
                    );
                }
                if let Some(why) = &front.aborted {
                    eprintln!("warning: sweep stopped early: {why}");
                }
                let path = config
                    .output_dir
                    .join(format!("front_{}_{lambda_tag}.csv", method.name()));
                write_front_csv(&front, &path)?;
                println!("{}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Convergence {
            method,
            alphas,
            zetas,
            zeta_indices,
            zeta_mode,
        } => {
            let method = Method::from(method);
            let table = match method {
                Method::Wsm => {
                    let weights = match alphas {
                        Some(text) => parse_pair_list(&text)?
                            .into_iter()
                            .map(|[a, b]| Weights::new(a, b))
                            .collect::<Result<Vec<_>, _>>()?,
                        None => default_alphas(),
                    };
                    run_convergence_wsm(config, &weights)?
                }
                Method::Rpm => {
                    let selection = match (zetas, zeta_indices) {
                        (Some(text), _) => ZetaSelection::Explicit(parse_pair_list(&text)?),
                        (None, indices) => {
                            let idx = match indices {
                                Some(text) => parse_list(&text)?,
                                None => DEFAULT_ZETA_INDICES.to_vec(),
                            };
                            match zeta_mode {
                                ZetaMode::Frozen => ZetaSelection::SweepIndices(idx),
                                ZetaMode::PerLevel => ZetaSelection::PerLevelSweep(idx),
                            }
                        }
                    };
                    run_convergence_rpm(config, &selection)?
                }
            };
            print!("{:>10}", "h");
            for label in &table.labels {
                print!(" {label:>14}");
            }
            println!();
            for (h, row) in table.hs.iter().zip(&table.errors) {
                print!("{h:>10.6}");
                for e in row {
                    print!(" {e:>14.6}");
                }
                println!();
            }
            print!("{:>10}", "rate");
            for r in &table.rates {
                match r {
                    Some(r) => print!(" {r:>14.2}"),
                    None => print!(" {:>14}", "-"),
                }
            }
            println!();
            if table.converged.iter().flatten().any(|c| !c) {
                eprintln!("warning: some cells did not converge");
            }
            let path = config
                .output_dir
                .join(format!("convergence_{}.csv", method.name()));
            write_convergence_csv(&table, &path)?;
            println!("{}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::IdealVector => {
            let system = config.system(s.level)?;
            let v = ideal_vector(problem, &system, config.eps, &config.bb)?;
            println!("{} {}", v.j1, v.j2);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::SolverFailure { .. } | Error::DegenerateGeometry => ExitCode::from(3),
                Error::Io { .. } => ExitCode::FAILURE,
                _ => ExitCode::from(2),
            }
        }
    }
}
